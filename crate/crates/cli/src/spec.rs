//! Textual element specs.
//!
//! Terms are joined by `+` or `-`; each term is an atom with an optional
//! real coefficient `c*`:
//!
//! * `1` or `one`: the unit
//! * `uN`: the isometry `u_N`, `uN*` its adjoint
//! * a bare number `c`: `c` times the unit
//!
//! So `u1 + u1*`, `2*u1 - 0.5*one` and `u2*` are valid. Anything starting
//! with `{` is inline element JSON and `@path` reads element JSON from a
//! file. Term syntax needs a rank-one group.

use xprod::action::FineSystem;
use xprod::io::parse_l1;
use xprod::l1x::{DeltaMode, L1Element};
use xprod::linalg::C64;
use xprod::ogroup::GroupElement;

use crate::error::{read_file, CliError};

pub fn parse_element_spec(sys: &FineSystem, spec: &str, mode: DeltaMode) -> Result<L1Element, CliError> {
    let spec = spec.trim();
    if spec.starts_with('{') {
        return parse_l1(sys, spec, mode).map_err(|e| CliError::Config(format!("element JSON: {e}")));
    }
    if let Some(path) = spec.strip_prefix('@') {
        let text = read_file(std::path::Path::new(path))?;
        return parse_l1(sys, &text, mode).map_err(|e| CliError::Config(format!("element JSON in {path}: {e}")));
    }
    if sys.group_dim() != 1 {
        return Err(CliError::Config(format!(
            "term syntax needs a rank-one group (k = {}); pass element JSON instead",
            sys.group_dim()
        )));
    }
    let terms = split_terms(spec)?;
    let mut out = L1Element::zero(sys);
    for (sign, term) in terms {
        let t = parse_term(sys, term)?.scale(C64::new(sign, 0.0));
        out = out.add(&t).map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(out)
}

/// Splits on top-level `+`/`-`, leaving exponents such as `1e-3` intact.
fn split_terms(spec: &str) -> Result<Vec<(f64, &str)>, CliError> {
    let bytes = spec.as_bytes();
    let mut out = Vec::new();
    let mut sign = 1.0;
    let mut start = 0;
    for (i, &c) in bytes.iter().enumerate() {
        if c != b'+' && c != b'-' {
            continue;
        }
        let exponent = i >= 2
            && matches!(bytes[i - 1], b'e' | b'E')
            && (bytes[i - 2].is_ascii_digit() || bytes[i - 2] == b'.');
        if exponent {
            continue;
        }
        let piece = spec[start..i].trim();
        if !piece.is_empty() {
            out.push((sign, piece));
        } else if i > 0 && !spec[..i].trim().is_empty() {
            return Err(CliError::Config(format!("empty term in element spec {spec:?}")));
        }
        sign = if c == b'-' { -1.0 } else { 1.0 };
        start = i + 1;
    }
    let piece = spec[start..].trim();
    if piece.is_empty() {
        return Err(CliError::Config(format!("empty term in element spec {spec:?}")));
    }
    out.push((sign, piece));
    Ok(out)
}

fn parse_term(sys: &FineSystem, term: &str) -> Result<L1Element, CliError> {
    if let Ok(c) = term.parse::<f64>() {
        return Ok(L1Element::one(sys).scale(C64::new(c, 0.0)));
    }
    let (coeff, atom) = match term.split_once('*') {
        Some((c, rest)) if c.trim().parse::<f64>().is_ok() => (c.trim().parse::<f64>().unwrap(), rest.trim()),
        _ => (1.0, term),
    };
    let bad = || CliError::Config(format!("cannot parse term {term:?}"));
    let value = match atom {
        "1" | "one" => L1Element::one(sys),
        _ => {
            let rest = atom.strip_prefix('u').ok_or_else(bad)?;
            let (digits, star) = match rest.strip_suffix('*') {
                Some(d) => (d, true),
                None => (rest, false),
            };
            let n: i64 = digits.trim().parse().map_err(|_| bad())?;
            if n < 0 {
                return Err(CliError::Config(format!("u_x needs x >= 0, got {n}")));
            }
            let x = GroupElement::scalar(n);
            let r = if star { L1Element::u_star(sys, &x) } else { L1Element::u(sys, &x) };
            r.map_err(|e| CliError::Config(e.to_string()))?
        }
    };
    Ok(value.scale(C64::new(coeff, 0.0)))
}

/// `3` or, for k > 1, `1:0:-2`.
pub fn parse_degree(text: &str, dim: usize) -> Result<GroupElement, CliError> {
    let coords = text
        .split(':')
        .map(|c| c.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Config(format!("cannot parse degree {text:?}")))?;
    if coords.len() != dim {
        return Err(CliError::Config(format!(
            "degree {text:?} has {} coordinates, the group has {dim}",
            coords.len()
        )));
    }
    GroupElement::new(coords).map_err(|e| CliError::Config(e.to_string()))
}

/// Comma-separated list of semigroup elements.
pub fn parse_cone_list(text: &str, dim: usize) -> Result<Vec<GroupElement>, CliError> {
    let out = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_degree(s, dim))
        .collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        return Err(CliError::Config("empty generator list".into()));
    }
    if let Some(x) = out.iter().find(|x| !x.is_positive()) {
        return Err(CliError::Config(format!("{x} is not in the positive cone")));
    }
    Ok(out)
}
