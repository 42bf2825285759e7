//! Two-sided bounds on the enveloping C*-norm of finitely supported
//! elements, the dual-group gauge action and the coefficient-vanishing test.

use std::collections::BTreeSet;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::l1x::{L1Element, L1Error, DROP_TOL};
use crate::linalg::C64;
use crate::ogroup::{GroupElement, GroupError};

/// Default cap on the number of degrees in intermediate supports.
pub const DEFAULT_SUPPORT_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormError {
    #[error(transparent)]
    L1(#[from] L1Error),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("k must be positive")]
    ZeroPower,
    #[error("support grew to {size} degrees at k={k}, above the cap {cap}")]
    SupportBlowup { k: usize, size: usize, cap: usize },
    #[error("gauge angles have length {got}, group has dimension {expected}")]
    AngleDimension { expected: usize, got: usize },
    #[error(
        "coefficient test and degree-zero test disagree beyond rounding: \
         max coefficient norm {max_coeff:.3e}, sqrt of ||E0(a*a)|| {e0_root:.3e}"
    )]
    InconsistentEquivalence { max_coeff: f64, e0_root: f64 },
}

/// SHA-256 over degrees and the bit patterns of all coefficient entries.
pub fn element_hash(a: &L1Element) -> String {
    let mut h = Sha256::new();
    for (g, c) in a.coeffs() {
        for x in g.coords() {
            h.update(x.to_le_bytes());
        }
        for z in c.to_vec().iter() {
            h.update(z.re.to_bits().to_le_bytes());
            h.update(z.im.to_bits().to_le_bytes());
        }
        h.update([0xff]);
    }
    hex::encode(h.finalize())
}

/// `||E_0[(a a^*)^{2k}]||`.
pub fn e0_power_norm(a: &L1Element, k: u32) -> Result<f64, NormError> {
    if k == 0 {
        return Err(NormError::ZeroPower);
    }
    let (n, e) = normalized(a);
    let c = product(&n, &n.star()?)?;
    let mut p = L1Element::one(a.system());
    for _ in 0..2 * k {
        p = product(&p, &c)?;
    }
    let e0 = p.coeff(&GroupElement::zero(a.system().group_dim())).op_norm();
    Ok(e0 * 2f64.powi(-4 * k as i32 * e))
}

/// `(2^e a, e)` with the largest coefficient of `2^e a` in `[1/sqrt 2, sqrt 2]`.
///
/// Norms are homogeneous, and scaling by a power of two is exact, so the
/// certificate is computed on a normalized element. Without this, the
/// powers of a small element fall below the absolute drop threshold and
/// are pruned to zero.
fn normalized(a: &L1Element) -> (L1Element, i32) {
    let m = a.max_coeff_norm();
    let e = if m > 0.0 { -(m.log2().round() as i32) } else { 0 };
    (a.scale_pow2(e), e)
}

/// Product with dust removed relative to the largest coefficient.
fn product(x: &L1Element, y: &L1Element) -> Result<L1Element, NormError> {
    let mut p = x.mul_unpruned(y)?;
    p.prune_relative(DROP_TOL);
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormCertificate {
    pub element_hash: String,
    pub k_max: usize,
    pub k: Vec<usize>,
    /// `s_k = ||E_0[(aa^*)^{2k}]||^{1/4k}`.
    pub lower: Vec<f64>,
    /// `t_k = (2|F_k| + 1)^{1/4k} s_k`.
    pub upper: Vec<f64>,
    /// `|F_k|` for each k.
    pub positive_degrees: Vec<usize>,
    pub interval: [f64; 2],
}

impl NormCertificate {
    pub fn width(&self) -> f64 {
        self.interval[1] - self.interval[0]
    }

    pub fn contains(&self, value: f64, tol: f64) -> bool {
        value >= self.interval[0] - tol && value <= self.interval[1] + tol
    }
}

fn sumset(a: &BTreeSet<GroupElement>, b: &BTreeSet<GroupElement>) -> Result<BTreeSet<GroupElement>, GroupError> {
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            out.insert(x.checked_add(y)?);
        }
    }
    Ok(out)
}

/// Certified bracket of the C*-norm of `a` from the first `k_max` powers.
///
/// Writing `b = (aa^*)^k = sum_{g in S} b_g delta_g` with `S` symmetric,
/// `||a||^{4k} = ||b b^*|| <= |S| ||E_0(b b^*)||`, and `|S| = 2|F_k| + 1`
/// where `F_k` is the positive part of `S`. `S` is taken as the k-fold
/// sumset of the difference set `supp(a) - supp(a)`, which contains the
/// support of `b` before any pruning.
pub fn cstar_norm_bounds(a: &L1Element, k_max: usize, support_cap: usize) -> Result<NormCertificate, NormError> {
    if k_max == 0 {
        return Err(NormError::ZeroPower);
    }
    let mut cert = NormCertificate {
        element_hash: element_hash(a),
        k_max,
        k: Vec::with_capacity(k_max),
        lower: Vec::with_capacity(k_max),
        upper: Vec::with_capacity(k_max),
        positive_degrees: Vec::with_capacity(k_max),
        interval: [0.0, 0.0],
    };
    let zero = GroupElement::zero(a.system().group_dim());
    if a.is_empty() {
        for k in 1..=k_max {
            cert.k.push(k);
            cert.lower.push(0.0);
            cert.upper.push(0.0);
            cert.positive_degrees.push(0);
        }
        return Ok(cert);
    }

    let supp: BTreeSet<GroupElement> = a.support().cloned().collect();
    let mut diff = BTreeSet::new();
    for x in &supp {
        for y in &supp {
            diff.insert(x.checked_sub(y)?);
        }
    }
    let (n, e) = normalized(a);
    let unscale = 2f64.powi(-e);
    let aa = product(&n, &n.star()?)?;
    let mut sums = diff.clone();
    let mut power = aa.clone();
    for k in 1..=k_max {
        if k > 1 {
            sums = sumset(&sums, &diff)?;
            if sums.len() > support_cap {
                return Err(NormError::SupportBlowup {
                    k,
                    size: sums.len(),
                    cap: support_cap,
                });
            }
            power = product(&power, &aa)?;
        }
        let square = product(&power, &power)?;
        if square.coeffs().len() > support_cap {
            return Err(NormError::SupportBlowup {
                k,
                size: square.coeffs().len(),
                cap: support_cap,
            });
        }
        let e0 = square.coeff(&zero).op_norm();
        let f_k = sums.iter().filter(|g| g.is_strictly_positive()).count();
        let exponent = 1.0 / (4.0 * k as f64);
        let s = e0.powf(exponent) * unscale;
        let t = ((2 * f_k + 1) as f64).powf(exponent) * s;
        cert.k.push(k);
        cert.lower.push(s);
        cert.upper.push(t);
        cert.positive_degrees.push(f_k);
    }
    let lo = cert.lower.iter().copied().fold(0.0, f64::max);
    let hi = cert.upper.iter().copied().fold(f64::INFINITY, f64::min);
    cert.interval = [lo, hi];
    Ok(cert)
}

/// Dual-group action: the coefficient at `g` is multiplied by `exp(i <theta, g>)`.
pub fn gauge_twist(a: &L1Element, theta: &[f64]) -> Result<L1Element, NormError> {
    let dim = a.system().group_dim();
    if theta.len() != dim {
        return Err(NormError::AngleDimension {
            expected: dim,
            got: theta.len(),
        });
    }
    Ok(a.map_coeffs(|g, c| {
        let phase: f64 = g.coords().iter().zip(theta).map(|(&x, t)| x as f64 * t).sum();
        c.scale(C64::from_polar(1.0, phase))
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ZeroVerdict {
    Zero,
    NonZero(GroupElement),
}

/// Decides whether `a` vanishes by two routes: every coefficient is below
/// `tol`, and `sqrt(||E_0(a^* a)||)` is below `tol`.
///
/// For an element satisfying the support constraint the two quantities obey
/// `max_g ||a_g|| <= sqrt(||E_0(a^* a)||) <= sqrt(n) max_g ||a_g||` with `n`
/// the support size. A violation of that chain is an arithmetic error. When
/// the chain holds but `tol` falls between the two numbers the element is
/// reported as nonzero.
pub fn zero_test(a: &L1Element, tol: f64) -> Result<ZeroVerdict, NormError> {
    let witness = a
        .coeffs()
        .iter()
        .map(|(g, c)| (g, c.op_norm()))
        .max_by(|x, y| x.1.total_cmp(&y.1));
    let max_coeff = witness.map_or(0.0, |w| w.1);
    let e0 = a
        .star()?
        .mul_unpruned(a)?
        .coeff(&GroupElement::zero(a.system().group_dim()))
        .op_norm();
    let e0_root = e0.sqrt();
    let n = a.coeffs().len().max(1) as f64;
    let slack = 1e-9 * (1.0 + max_coeff);
    if max_coeff > e0_root + slack || e0_root > n.sqrt() * max_coeff + slack {
        return Err(NormError::InconsistentEquivalence { max_coeff, e0_root });
    }
    match witness {
        Some((g, _)) if max_coeff > tol || e0_root > tol => Ok(ZeroVerdict::NonZero(g.clone())),
        _ => Ok(ZeroVerdict::Zero),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{fine_representability_verdict, FineSystem};
    use crate::algebra::AlgebraElement;
    use crate::fixtures::fixture;
    use crate::l1x::DeltaMode;
    use crate::sampling::SampleSpec;

    fn sys(name: &str) -> FineSystem {
        fine_representability_verdict(fixture(name).unwrap(), &SampleSpec::default())
            .unwrap()
            .fine()
            .unwrap()
    }

    fn g(n: i64) -> GroupElement {
        GroupElement::scalar(n)
    }

    #[test]
    fn e0_examples() {
        let s = sys("S2");
        let u = L1Element::u(&s, &g(1)).unwrap();
        let a = u.add(&L1Element::u_star(&s, &g(1)).unwrap()).unwrap();
        for k in 1..5 {
            assert!((e0_power_norm(&u, k).unwrap() - 1.0).abs() < 1e-12);
            assert!((e0_power_norm(&a, k).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(e0_power_norm(&L1Element::zero(&s), k).unwrap(), 0.0);
        }
        assert_eq!(e0_power_norm(&u, 0), Err(NormError::ZeroPower));
    }

    #[test]
    fn certificate_for_partial_isometry() {
        let s = sys("S2");
        let u = L1Element::u(&s, &g(1)).unwrap();
        let cert = cstar_norm_bounds(&u, 10, DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(cert.lower.len(), 10);
        assert!(cert.lower.iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert!(cert.upper[9] <= 1.08);
        assert!(cert.contains(1.0, 1e-12));
    }

    #[test]
    fn certificate_for_one_plus_shift() {
        let s = sys("SAut");
        let a = L1Element::one(&s).add(&L1Element::u(&s, &g(1)).unwrap()).unwrap();
        let cert = cstar_norm_bounds(&a, 6, DEFAULT_SUPPORT_CAP).unwrap();
        // supp(a) - supp(a) = {-1, 0, 1}; its k-fold sumset has k positive elements
        assert_eq!(cert.positive_degrees, vec![1, 2, 3, 4, 5, 6]);
        // E_0[(aa^*)^{2k}] = C(4k, 2k) for the unitary u
        let binom = |n: u64, r: u64| (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
        for (i, k) in cert.k.iter().enumerate() {
            let expected = binom(4 * *k as u64, 2 * *k as u64).powf(1.0 / (4.0 * *k as f64));
            assert!((cert.lower[i] - expected).abs() < 1e-9);
            assert!(cert.lower[i] <= cert.upper[i]);
        }
        assert!(cert.contains(2.0, 1e-12));
    }

    #[test]
    fn certificates_are_homogeneous() {
        // ||1 + u|| = 2 in SAut; the powers of a small multiple used to be pruned away
        let s = sys("SAut");
        let a = L1Element::one(&s).add(&L1Element::u(&s, &g(1)).unwrap()).unwrap();
        let base = cstar_norm_bounds(&a, 6, DEFAULT_SUPPORT_CAP).unwrap();
        for lambda in [2f64.powi(-30), 1e-5, 0.148, 1e6] {
            let b = a.scale(C64::new(lambda, 0.0));
            let cert = cstar_norm_bounds(&b, 6, DEFAULT_SUPPORT_CAP).unwrap();
            for (x, y) in cert.lower.iter().zip(&base.lower).chain(cert.upper.iter().zip(&base.upper)) {
                assert!((x - lambda * y).abs() <= 1e-12 * lambda * y, "{lambda}: {x} vs {}", lambda * y);
            }
            assert!(cert.contains(2.0 * lambda, 1e-12 * lambda));
            for k in 1..4 {
                let e = e0_power_norm(&b, k).unwrap();
                let expected = e0_power_norm(&a, k).unwrap() * lambda.powi(4 * k as i32);
                assert!((e - expected).abs() <= 1e-12 * expected);
            }
        }
    }

    #[test]
    fn zero_element_and_degree_zero_collapse() {
        let s = sys("SMx");
        let cert = cstar_norm_bounds(&L1Element::zero(&s), 3, 10).unwrap();
        assert_eq!(cert.interval, [0.0, 0.0]);
        let mut m = crate::linalg::CMat::zeros(2, 2);
        m[(0, 0)] = C64::new(3.0, 0.0);
        m[(1, 0)] = C64::new(1.0, 0.0);
        let c = AlgebraElement::from_blocks(s.shape(), vec![m.clone(), crate::linalg::CMat::zeros(1, 1)]).unwrap();
        let expected = crate::linalg::spectral_norm(&m);
        let a = L1Element::delta(&s, &c, &g(0), DeltaMode::Strict).unwrap();
        let cert = cstar_norm_bounds(&a, 4, DEFAULT_SUPPORT_CAP).unwrap();
        assert!((cert.interval[0] - expected).abs() < 1e-9);
        assert!((cert.interval[1] - expected).abs() < 1e-9);
    }

    #[test]
    fn support_cap_is_enforced() {
        let s = sys("SAut");
        let a = L1Element::one(&s).add(&L1Element::u(&s, &g(3)).unwrap()).unwrap();
        let err = cstar_norm_bounds(&a, 5, 5).unwrap_err();
        assert!(matches!(err, NormError::SupportBlowup { k: 2, .. }));
    }

    #[test]
    fn gauge_examples() {
        let s = sys("S2");
        let u = L1Element::u(&s, &g(1)).unwrap();
        let t = gauge_twist(&u, &[std::f64::consts::FRAC_PI_2]).unwrap();
        let expected = AlgebraElement::from_scalars(s.shape(), &[C64::new(0.0, 1.0), C64::new(0.0, 0.0)]).unwrap();
        assert!(t.coeff(&g(1)).dist(&expected) < 1e-15);
        assert_eq!(gauge_twist(&u, &[0.0]).unwrap().coeffs(), u.coeffs());
        let w = L1Element::u(&sys("SAut"), &g(2)).unwrap();
        let tw = gauge_twist(&w, &[std::f64::consts::PI]).unwrap();
        assert!(tw.dist(&w).unwrap() < 1e-12);
        assert!(matches!(gauge_twist(&u, &[0.0, 1.0]), Err(NormError::AngleDimension { .. })));
    }

    #[test]
    fn zero_test_examples() {
        let s = sys("S2");
        let u = L1Element::u(&s, &g(1)).unwrap();
        assert_eq!(zero_test(&u.sub(&u).unwrap(), 1e-9).unwrap(), ZeroVerdict::Zero);
        assert_eq!(zero_test(&u, 1e-9).unwrap(), ZeroVerdict::NonZero(g(1)));
        let tiny = AlgebraElement::from_real_scalars(s.shape(), &[5e-10, 0.0]).unwrap();
        let d = L1Element::delta(&s, &tiny, &g(1), DeltaMode::Strict).unwrap();
        assert_eq!(zero_test(&d, 1e-9).unwrap(), ZeroVerdict::Zero);
    }

    #[test]
    fn hash_is_stable_and_discriminating() {
        let s = sys("S2");
        let u = L1Element::u(&s, &g(1)).unwrap();
        assert_eq!(element_hash(&u), element_hash(&u.clone()));
        assert_ne!(element_hash(&u), element_hash(&u.star().unwrap()));
        assert_eq!(element_hash(&u).len(), 64);
    }
}
