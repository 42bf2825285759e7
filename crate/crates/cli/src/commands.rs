use std::sync::Arc;

use serde_json::json;

use xprod::action::{
    fine_representability_verdict, verify_transfer, ActionError, DynamicalSystem, EndoAction, FineSystem,
    TransferReport, Verdict, DEFAULT_TOL,
};
use xprod::algebra::AlgebraElement;
use xprod::fixtures::{fixture_action, list_fixtures};
use xprod::io::{element_from_json, l1_to_json, matrix_to_json, parse_system, MatrixJson};
use xprod::l1x::{monomial_product_oracle, DeltaMode, L1Element, L1Error};
use xprod::norms::{cstar_norm_bounds, zero_test, ZeroVerdict};
use xprod::ogroup::GroupElement;
use xprod::regrep::{
    adjointness_check, build_regrep, covariance_check, integrated_form_check, property_star_check, RegrepError,
    RepReport, StateFunctional, TruncatedRep, DEFAULT_RANK_TOL,
};
use xprod::sampling::{random_element, random_group_element, SampleRng, SampleSpec};

use crate::config::{
    CheckSystemArgs, CommandConfig, Expectation, MulArgs, NormArgs, RegrepArgs, RunConfig, SourceArgs, TransferArgs,
};
use crate::error::{read_file, CliError};
use crate::report::{Check, Report, SystemInfo};
use crate::spec::{parse_cone_list, parse_degree, parse_element_spec};

/// Runs one configured command. Errors are recorded in the report.
pub fn run(config: &RunConfig) -> (Report, Option<CliError>) {
    let mut report = Report::new(config);
    let result = match &config.command {
        CommandConfig::Fixtures => fixtures(&mut report),
        CommandConfig::CheckSystem(a) => check_system(config, a, &mut report),
        CommandConfig::Transfer(a) => transfer(config, a, &mut report),
        CommandConfig::Mul(a) => mul(config, a, &mut report),
        CommandConfig::Norm(a) => norm(config, a, &mut report),
        CommandConfig::Regrep(a) => regrep(config, a, &mut report),
        CommandConfig::Selftest => selftest(config, &mut report),
    };
    match result {
        Ok(()) => {
            report.finish();
            (report, None)
        }
        Err(e) => {
            report.fail_with(&e);
            (report, Some(e))
        }
    }
}

fn load_action(src: &SourceArgs, tol: Option<f64>) -> Result<(SystemInfo, Arc<EndoAction>), CliError> {
    let (source, name, action) = match (&src.fixture, &src.system) {
        (Some(name), None) => {
            let action = fixture_action(name, tol.unwrap_or(DEFAULT_TOL)).ok_or_else(|| {
                let known: Vec<&str> = list_fixtures().iter().map(|f| f.name).collect();
                CliError::Config(format!("unknown fixture {name:?} (known: {})", known.join(", ")))
            })?;
            (format!("fixture:{name}"), Some(name.clone()), action)
        }
        (None, Some(path)) => {
            let text = read_file(path)?;
            let (json, action) =
                parse_system(&text, tol).map_err(|e| CliError::SystemLoad(format!("{}: {e}", path.display())))?;
            (path.display().to_string(), json.name, action)
        }
        _ => return Err(CliError::Config("exactly one of --fixture and --system is required".into())),
    };
    let info = SystemInfo {
        source,
        name,
        shape: action.shape().block_sizes().to_vec(),
        group_dim: action.group_dim(),
        tol: action.tol(),
    };
    Ok((info, action))
}

fn decide(config: &RunConfig, action: Arc<EndoAction>) -> Result<DynamicalSystem, CliError> {
    fine_representability_verdict(action, &SampleSpec::with_seed(config.seed))
        .map_err(|e| CliError::module("representability verdict", e))
}

fn load_fine(config: &RunConfig, src: &SourceArgs, report: &mut Report) -> Result<FineSystem, CliError> {
    let (info, action) = load_action(src, config.tol)?;
    report.system = Some(info);
    decide(config, action)?
        .fine()
        .map_err(|e| CliError::module("crossed product needs a finely representable system", e))
}

fn transfer_checks(r: &TransferReport, tol: f64) -> impl Iterator<Item = Check> + '_ {
    r.checks.iter().map(move |c| Check {
        name: c.name.clone(),
        residual: Some(c.max_residual),
        tolerance: Some(tol),
        passed: c.passed,
    })
}

fn rep_checks(r: &RepReport, tol: f64) -> impl Iterator<Item = Check> + '_ {
    r.checks.iter().map(move |c| Check {
        name: c.name.clone(),
        residual: Some(c.residual),
        tolerance: Some(tol),
        passed: c.passed,
    })
}

fn fixtures(report: &mut Report) -> Result<(), CliError> {
    let list = list_fixtures();
    for f in &list {
        let verdict = if f.expected_representable {
            "representable"
        } else {
            "not representable"
        };
        report.line(format!("{:5} {:?}  {}  [{verdict}]", f.name, f.shape, f.generator));
        report.line(format!("      {}", f.notes));
    }
    report.set("fixtures", &list);
    Ok(())
}

fn check_system(config: &RunConfig, args: &CheckSystemArgs, report: &mut Report) -> Result<(), CliError> {
    let (info, action) = load_action(&args.source, config.tol)?;
    let tol = info.tol;
    let fixture = args
        .source
        .fixture
        .as_deref()
        .and_then(|n| list_fixtures().into_iter().find(|f| f.name == n));
    report.system = Some(info);
    let ds = decide(config, action)?;

    let (verdict, witness) = match ds.verdict() {
        Verdict::FinelyRepresentable => ("FinelyRepresentable", None),
        Verdict::NotFinelyRepresentable(w) => ("NotFinelyRepresentable", Some(w)),
    };
    report.line(format!("verdict: {verdict}"));
    if let Some(w) = witness {
        report.line(format!("witness: {w}"));
    }
    report.set("verdict", verdict);
    report.set("witness", witness);
    report.set("witness_text", witness.map(ToString::to_string));
    report.set("expected_representable", fixture.map(|f| f.expected_representable));
    report.set("probed", &ds.report().probed);

    // the residual tables behind the verdict; informational unless --expect is set
    let vr = ds.report();
    let mut diagnostics = Vec::new();
    for h in &vr.hereditary {
        diagnostics.push(Check {
            name: format!("hereditary at x={} (image dim {}, corner dim {})", h.x, h.image_dim, h.corner_dim),
            residual: Some(h.residual),
            tolerance: Some(tol),
            passed: h.holds,
        });
    }
    if let Some(c) = &vr.compatibility {
        let pair = c.pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
        diagnostics.push(Check::residual(
            format!("projection compatibility over {} pairs", c.pairs.len()),
            pair,
            tol,
        ));
        let iso = c.isomorphisms.iter().map(|i| i.isometry_residual).fold(0.0, f64::max);
        diagnostics.push(Check {
            name: format!("alpha_x isometric on P_x A over {} elements", c.isomorphisms.len()),
            residual: Some(iso),
            tolerance: Some(tol),
            passed: iso <= tol && c.isomorphisms.iter().all(|i| i.injective),
        });
    }
    if let Some(t) = &vr.transfer {
        diagnostics.extend(transfer_checks(t, tol));
    }
    report.set("diagnostics", &diagnostics);

    if let Some(expect) = args.expect {
        let want = expect == Expectation::Representable;
        report.push(Check::flag(
            format!("verdict is {}", if want { "FinelyRepresentable" } else { "NotFinelyRepresentable" }),
            ds.verdict().is_representable() == want,
        ));
    }
    Ok(())
}

fn transfer(config: &RunConfig, args: &TransferArgs, report: &mut Report) -> Result<(), CliError> {
    let sys = load_fine(config, &args.source, report)?;
    let x = parse_degree(&args.x, sys.group_dim())?;
    if !x.is_positive() {
        return Err(CliError::Config(format!("{x} is not in the positive cone")));
    }
    let ta = sys.transfer_action();
    let lx = ta.transfer(&x).map_err(|e| CliError::module("transfer", e))?;
    let px = ta.projection(&x).map_err(|e| CliError::module("transfer", e))?;
    let unit = sys.unit_projection(&x).map_err(|e| CliError::module("transfer", e))?;
    let verified = verify_transfer(sys.action(), ta, &SampleSpec::with_seed(config.seed))
        .map_err(|e| CliError::module("transfer verification", e))?;

    report.line(format!("x = {x}, P_x block mask {:?}", px.mask()));
    report.set("x", &x);
    report.set("projection_mask", px.mask());
    report.set("unit_image", xprod::io::element_to_json(&unit));
    report.set("matrix", matrix_to_json(lx.matrix()));
    report.extend(transfer_checks(&verified, sys.tol()));
    Ok(())
}

fn mul(config: &RunConfig, args: &MulArgs, report: &mut Report) -> Result<(), CliError> {
    let sys = load_fine(config, &args.source, report)?;
    let mode = if args.project { DeltaMode::Project } else { DeltaMode::Strict };
    let a = parse_element_spec(&sys, &args.a, mode)?;
    let b = parse_element_spec(&sys, &args.b, mode)?;
    let m = |e| CliError::module("multiplication", e);
    let ab = a.mul(&b).map_err(m)?;
    let tol = sys.tol();

    report.push(Check::residual(
        "product satisfies the support constraint",
        ab.constraint_residual().map_err(m)?,
        tol,
    ));
    let lhs = ab.star().map_err(m)?;
    let rhs = b.star().map_err(m)?.mul(&a.star().map_err(m)?).map_err(m)?;
    report.push(Check::residual("(ab)* = b* a*", lhs.dist(&rhs).map_err(m)?, tol));
    let excess = ab.l1_norm() - a.l1_norm() * b.l1_norm();
    report.push(Check::residual(
        "||ab||_1 <= ||a||_1 ||b||_1",
        excess.max(0.0),
        tol * (1.0 + a.l1_norm() * b.l1_norm()),
    ));
    if let (Some((g1, x)), Some((g2, y)), 1, 1) =
        (a.coeffs().iter().next(), b.coeffs().iter().next(), a.coeffs().len(), b.coeffs().len())
    {
        let oracle = monomial_product_oracle(&sys, (x, g1), (y, g2)).map_err(m)?;
        report.push(Check::residual(
            "agrees with the monomial case table",
            ab.dist(&oracle).map_err(m)?,
            tol,
        ));
    }
    let support: Vec<&GroupElement> = ab.support().collect();
    report.line(format!(
        "support of ab: {}",
        support.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")
    ));
    report.set("a", l1_to_json(&a));
    report.set("b", l1_to_json(&b));
    report.set("product", l1_to_json(&ab));
    report.set("l1_norm", ab.l1_norm());
    Ok(())
}

fn norm(config: &RunConfig, args: &NormArgs, report: &mut Report) -> Result<(), CliError> {
    let sys = load_fine(config, &args.source, report)?;
    let mode = if args.project { DeltaMode::Project } else { DeltaMode::Strict };
    let a = parse_element_spec(&sys, &args.element, mode)?;
    if args.kmax == 0 {
        return Err(CliError::Config("--kmax must be at least 1".into()));
    }
    let cert = cstar_norm_bounds(&a, args.kmax, args.support_cap).map_err(|e| CliError::module("norm", e))?;
    let tol = sys.tol();

    let crossing = cert
        .lower
        .iter()
        .zip(&cert.upper)
        .map(|(s, t)| s - t)
        .fold(0.0, f64::max);
    report.push(Check::residual("s_k <= t_k for every k", crossing, tol));
    report.push(Check::residual(
        "interval is nonempty",
        (cert.interval[0] - cert.interval[1]).max(0.0),
        tol,
    ));
    report.push(Check::residual(
        "max_g ||a_g|| <= upper bound",
        (a.max_coeff_norm() - cert.interval[1]).max(0.0),
        tol,
    ));
    report.line(format!(
        "||a|| in [{:.6}, {:.6}] from k = 1..{}",
        cert.interval[0], cert.interval[1], cert.k_max
    ));
    report.set("k", &cert.k);
    report.set("lower", &cert.lower);
    report.set("upper", &cert.upper);
    report.set("interval", cert.interval);
    report.set("positive_degrees", &cert.positive_degrees);
    report.set("element_hash", &cert.element_hash);
    report.set("element", l1_to_json(&a));
    Ok(())
}

fn regrep_error(e: RegrepError) -> CliError {
    match e {
        RegrepError::EmptyWindow(_)
        | RegrepError::MarginTooSmall { .. }
        | RegrepError::EmptyInterior { .. }
        | RegrepError::NotAState(_)
        | RegrepError::DimensionMismatch { .. } => CliError::Config(e.to_string()),
        other => CliError::module("regular representation", other),
    }
}

fn load_state(sys: &FineSystem, state: &str) -> Result<StateFunctional, CliError> {
    if state == "trace" {
        return Ok(StateFunctional::trace(sys.shape()));
    }
    let text = read_file(std::path::Path::new(state))?;
    let blocks: Vec<MatrixJson> =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("state density {state}: {e}")))?;
    let density =
        element_from_json(sys.shape(), &blocks).map_err(|e| CliError::Config(format!("state density {state}: {e}")))?;
    StateFunctional::new(density, sys.tol()).map_err(regrep_error)
}

/// `a delta_g` summed over `terms` random degrees of radius at most `radius`,
/// coefficients projected onto their corners.
fn random_l1(sys: &FineSystem, radius: i64, terms: usize, rng: &mut SampleRng) -> Result<L1Element, CliError> {
    let m = |e: L1Error| CliError::module("sampling", e);
    let mut out = L1Element::zero(sys);
    for _ in 0..terms {
        let g = random_group_element(sys.group_dim(), radius, rng);
        let a = random_element(sys.shape(), rng);
        out = out.add(&L1Element::delta(sys, &a, &g, DeltaMode::Project).map_err(m)?).map_err(m)?;
    }
    Ok(out)
}

const REGREP_SAMPLES: usize = 6;

fn regrep_suite(
    rep: &TruncatedRep,
    xs: &[GroupElement],
    margin: u64,
    tol: f64,
    rng: &mut SampleRng,
) -> Result<Vec<Check>, CliError> {
    let sys = rep.system();
    let shape = sys.shape();
    let n = rep.window().radius() as i64;
    let algebra: Vec<AlgebraElement> = (0..REGREP_SAMPLES).map(|_| random_element(shape, rng)).collect();
    let pairs: Vec<(AlgebraElement, AlgebraElement)> = (0..REGREP_SAMPLES)
        .map(|_| (random_element(shape, rng), random_element(shape, rng)))
        .collect();
    let r_pair = (n / 4).max(1).min(n / 2);
    let mut l1_pairs = Vec::new();
    let mut singles = Vec::new();
    for _ in 0..REGREP_SAMPLES {
        l1_pairs.push((random_l1(sys, r_pair, 3, rng)?, random_l1(sys, r_pair, 3, rng)?));
        singles.push(random_l1(sys, (n / 2).max(0), 3, rng)?);
    }

    let mut out = Vec::new();
    out.extend(rep_checks(&covariance_check(rep, xs, &algebra, margin, tol).map_err(regrep_error)?, tol));
    out.extend(rep_checks(&adjointness_check(rep, xs, &pairs, margin, tol).map_err(regrep_error)?, tol));
    out.extend(rep_checks(&integrated_form_check(rep, &l1_pairs, tol).map_err(regrep_error)?, tol));
    let star = property_star_check(rep, &singles, tol).map_err(regrep_error)?;
    let excess = star.iter().map(|s| (s.lhs - s.rhs).max(0.0)).fold(0.0, f64::max);
    out.push(Check {
        name: format!("||E_0(a)|| <= ||(pi x U)(a)|| over {} samples", star.len()),
        residual: Some(excess),
        tolerance: Some(tol),
        passed: star.iter().all(|s| s.passed),
    });
    Ok(out)
}

fn regrep(config: &RunConfig, args: &RegrepArgs, report: &mut Report) -> Result<(), CliError> {
    let sys = load_fine(config, &args.source, report)?;
    let xs = parse_cone_list(&args.gens, sys.group_dim())?;
    let state = load_state(&sys, &args.state)?;
    let rep = build_regrep(&sys, &state, args.window, &xs, DEFAULT_RANK_TOL).map_err(regrep_error)?;
    let margin = args.margin.unwrap_or_else(|| rep.default_margin());
    let tol = sys.tol();
    let mut rng = SampleSpec::with_seed(config.seed).rng();
    report.extend(regrep_suite(&rep, &xs, margin, tol, &mut rng)?);

    let dims = rep.dims();
    report.line(format!(
        "window radius {}, total dimension {}, margin {margin}",
        rep.window().radius(),
        rep.total_dim()
    ));
    report.line(format!(
        "d_g: {}",
        dims.iter().map(|d| format!("{}:{}", d.g, d.dim)).collect::<Vec<_>>().join(" ")
    ));
    report.set("window", args.window);
    report.set("margin", margin);
    report.set("generators", &xs);
    report.set("state", if args.state == "trace" { "trace" } else { "custom" });
    report.set("total_dim", rep.total_dim());
    report.set("dims", &dims);
    Ok(())
}

/// Full invariant suite over the built-in fixtures.
fn selftest(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let spec = SampleSpec::with_seed(config.seed);
    let mut rng = spec.rng();
    let fixtures = list_fixtures();
    report.push(Check::flag(
        format!("fixture catalog lists {} systems", fixtures.len()),
        fixtures.len() == 4,
    ));

    for f in &fixtures {
        let action = fixture_action(f.name, config.tol.unwrap_or(DEFAULT_TOL)).expect("catalog fixture exists");
        let tol = action.tol();
        let ds = decide(config, action)?;
        report.push(Check::flag(
            format!("{}: verdict matches catalog", f.name),
            ds.verdict().is_representable() == f.expected_representable,
        ));
        if f.name == "SNeg" {
            let at_one = matches!(ds.verdict(), Verdict::NotFinelyRepresentable(w) if w.is_hereditary_at(&GroupElement::scalar(1)));
            report.push(Check::flag("SNeg: witness is hereditary failure at x=1", at_one));
        }
        let Ok(sys) = ds.fine() else { continue };
        fixture_suite(f.name, &sys, &spec, tol, &mut rng, report)?;
    }

    // the norm example: ||u_1|| = 1 in S2
    let s2 = decide(config, fixture_action("S2", config.tol.unwrap_or(DEFAULT_TOL)).expect("S2"))?
        .fine()
        .map_err(|e| CliError::module("selftest", e))?;
    let u1 = L1Element::u(&s2, &GroupElement::scalar(1)).map_err(|e| CliError::module("selftest", e))?;
    let cert = cstar_norm_bounds(&u1, 10, xprod::norms::DEFAULT_SUPPORT_CAP).map_err(|e| CliError::module("norm", e))?;
    let outside = (1.0 - cert.interval[0]).max(cert.interval[1] - 1.08).max(0.0);
    report.push(Check::residual("S2: norm interval of u1 within [1, 1.08]", outside, 1e-12));
    report.line(format!("S2 u1 interval [{:.6}, {:.6}]", cert.interval[0], cert.interval[1]));
    let passed = report.checks.iter().filter(|c| c.passed).count();
    report.line(format!("{passed} of {} checks passed", report.checks.len()));
    Ok(())
}

fn fixture_suite(
    name: &str,
    sys: &FineSystem,
    spec: &SampleSpec,
    tol: f64,
    rng: &mut SampleRng,
    report: &mut Report,
) -> Result<(), CliError> {
    let m = |e: L1Error| CliError::module("selftest", e);
    let verified =
        verify_transfer(sys.action(), sys.transfer_action(), spec).map_err(|e: ActionError| CliError::module("selftest", e))?;
    let worst = verified.checks.iter().map(|c| c.max_residual).fold(0.0, f64::max);
    report.push(Check {
        name: format!("{name}: {} transfer identities", verified.checks.len()),
        residual: Some(worst),
        tolerance: Some(tol),
        passed: verified.passed(),
    });

    let mut oracle = 0.0_f64;
    for g1 in -3..=3 {
        for g2 in -3..=3 {
            let (x, y) = (GroupElement::scalar(g1), GroupElement::scalar(g2));
            let a = L1Element::delta(sys, &random_element(sys.shape(), rng), &x, DeltaMode::Project).map_err(m)?;
            let b = L1Element::delta(sys, &random_element(sys.shape(), rng), &y, DeltaMode::Project).map_err(m)?;
            let product = a.mul(&b).map_err(m)?;
            let expected = monomial_product_oracle(sys, (&a.coeff(&x), &x), (&b.coeff(&y), &y)).map_err(m)?;
            oracle = oracle.max(product.dist(&expected).map_err(m)?);
        }
    }
    report.push(Check::residual(format!("{name}: monomial products match the case table"), oracle, tol));

    let (mut assoc, mut star, mut constraint) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..20 {
        let a = random_l1(sys, 3, 3, rng)?;
        let b = random_l1(sys, 3, 3, rng)?;
        let c = random_l1(sys, 3, 3, rng)?;
        let ab = a.mul(&b).map_err(m)?;
        let left = ab.mul(&c).map_err(m)?;
        let right = a.mul(&b.mul(&c).map_err(m)?).map_err(m)?;
        let scale = 1.0 + a.l1_norm() * b.l1_norm() * c.l1_norm();
        assoc = assoc.max(left.dist(&right).map_err(m)? / scale);
        let ba = b.star().map_err(m)?.mul(&a.star().map_err(m)?).map_err(m)?;
        star = star.max(ab.star().map_err(m)?.dist(&ba).map_err(m)?);
        constraint = constraint.max(ab.constraint_residual().map_err(m)?);
    }
    report.push(Check::residual(format!("{name}: (ab)c = a(bc), relative"), assoc, tol));
    report.push(Check::residual(format!("{name}: (ab)* = b* a*"), star, tol));
    report.push(Check::residual(format!("{name}: products satisfy the support constraint"), constraint, tol));

    let a = random_l1(sys, 3, 4, rng)?;
    let zero = zero_test(&a.sub(&a).map_err(m)?, tol).map_err(|e| CliError::module("selftest", e))?;
    report.push(Check::flag(format!("{name}: a - a tests zero"), zero == ZeroVerdict::Zero));
    let u1 = L1Element::u(sys, &GroupElement::scalar(1)).map_err(m)?;
    let nz = zero_test(&u1, tol).map_err(|e| CliError::module("selftest", e))?;
    report.push(Check::flag(
        format!("{name}: u1 tests nonzero with witness 1"),
        nz == ZeroVerdict::NonZero(GroupElement::scalar(1)),
    ));

    let xs = [GroupElement::scalar(1), GroupElement::scalar(2)];
    let rep = build_regrep(sys, &StateFunctional::trace(sys.shape()), 8, &xs, DEFAULT_RANK_TOL).map_err(regrep_error)?;
    let checks = regrep_suite(&rep, &xs, rep.default_margin(), tol, rng)?;
    let worst = checks.iter().filter_map(|c| c.residual).fold(0.0, f64::max);
    report.push(Check {
        name: format!("{name}: {} regular representation checks on a radius-8 window", checks.len()),
        residual: Some(worst),
        tolerance: Some(tol),
        passed: checks.iter().all(|c| c.passed),
    });
    report.set(&format!("regrep_{name}"), json!({ "total_dim": rep.total_dim(), "checks": checks }));
    Ok(())
}
