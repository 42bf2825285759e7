//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use xprod::action::{checks, fine_representability_verdict, verify_transfer, LinearMap, Verdict};
use xprod::algebra::AlgebraElement;
use xprod::fixtures::fixture;
use xprod::l1x::{monomial_product_oracle, L1Element};
use xprod::linalg::{CMat, C64};
use xprod::norms::{cstar_norm_bounds, e0_power_norm, gauge_twist, zero_test, ZeroVerdict, DEFAULT_SUPPORT_CAP};
use xprod::ogroup::GroupElement;
use xprod::regrep::{
    adjointness_check, build_regrep, covariance_check, integrated_form_check, property_star_check, StateFunctional,
    TruncatedRep, DEFAULT_RANK_TOL,
};
use xprod::sampling::{random_element, random_phases, SampleSpec};

#[derive(Default)]
struct Check {
    fails: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn le(&mut self, what: &str, value: f64, bound: f64) {
        if !(value <= bound) {
            self.fails.push(format!("{what}: {value:.3e} > {bound:.1e}"));
        }
    }

    fn that(&mut self, what: &str, ok: bool) {
        if !ok {
            self.fails.push(what.to_string());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn max_entry(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn ac1_transfer_synthesis() -> Check {
    let mut c = Check::default();
    let x = g(1);

    let s2 = system("S2");
    let l = s2.transfer_action().transfer(&x).unwrap();
    let oracle = LinearMap::from_fn(s2.shape(), |a| {
        AlgebraElement::from_scalars(a.shape(), &[C64::new(0.0, 0.0), a.block(0)[(0, 0)]]).unwrap()
    });
    let r = max_entry(&(l.matrix() - oracle.matrix()));
    c.le("S2 L_1 vs (0, a1)", r, 1e-12);

    let smx = system("SMx");
    let l = smx.transfer_action().transfer(&x).unwrap();
    let oracle = LinearMap::from_fn(smx.shape(), |a| {
        AlgebraElement::from_blocks(
            a.shape(),
            vec![CMat::zeros(2, 2), CMat::from_element(1, 1, a.block(0)[(0, 0)])],
        )
        .unwrap()
    });
    let r2 = max_entry(&(l.matrix() - oracle.matrix()));
    c.le("SMx L_1 vs (0, m11)", r2, 1e-12);

    let saut = system("SAut");
    let l = saut.transfer_action().transfer(&x).unwrap();
    let swap = LinearMap::from_fn(saut.shape(), |a| {
        AlgebraElement::from_scalars(a.shape(), &[a.block(1)[(0, 0)], a.block(0)[(0, 0)]]).unwrap()
    });
    c.that("SAut L_1 is exactly the swap", l.matrix() == swap.matrix());
    c.note(format!("max entry error S2 {r:.1e}, SMx {r2:.1e}, SAut exact"));
    c
}

fn ac2_verdicts() -> Check {
    let mut c = Check::default();
    let expected = [("S2", true), ("SAut", true), ("SMx", true), ("SNeg", false)];
    let mut runs = 0;
    for seed in 0..200u64 {
        let spec = SampleSpec {
            seed,
            count: 24,
            max_coord: 8,
        };
        for (name, representable) in expected {
            let sys = fine_representability_verdict(fixture(name).unwrap(), &spec).unwrap();
            runs += 1;
            match sys.verdict() {
                Verdict::FinelyRepresentable => c.that(&format!("{name} seed {seed}: false positive"), representable),
                Verdict::NotFinelyRepresentable(w) => {
                    c.that(&format!("{name} seed {seed}: false negative ({w})"), !representable);
                    c.that(
                        &format!("{name} seed {seed}: witness {w} is not hereditary at 1"),
                        representable || w.is_hereditary_at(&g(1)),
                    );
                }
            }
        }
    }
    c.note(format!("{runs} verdicts, SNeg witness hereditary at x=1"));
    c
}

fn ac3_transfer_axioms() -> Check {
    use checks::*;
    let mut c = Check::default();
    let names = [
        TRANSFER_IDENTITY,
        TRANSFER_IDENTITY_RIGHT,
        CORNER_LEFT,
        CORNER_RIGHT,
        COMPLETENESS,
        EXPECTATION_IDEMPOTENT,
        EXPECTATION_RANGE,
        EXPECTATION_BIMODULE,
        NONDEGENERATE_II,
        NONDEGENERATE_III,
        SEMIGROUP,
    ];
    let mut worst = 0.0_f64;
    for name in REPRESENTABLE.iter().chain(&["S2lex"]) {
        let sys = system(name);
        let spec = SampleSpec {
            seed: 3,
            count: 64,
            max_coord: 8,
        };
        let report = verify_transfer(sys.action(), sys.transfer_action(), &spec).unwrap();
        for n in names {
            match report.get(n) {
                Some(r) => {
                    c.le(&format!("{name} {n}"), r.max_residual, 1e-9);
                    c.that(&format!("{name} {n} sampled {} < 64 times", r.samples), r.samples >= 64);
                    worst = worst.max(r.max_residual);
                }
                None => c.that(&format!("{name} {n} missing"), false),
            }
        }
    }
    c.note(format!("max residual {worst:.1e}"));
    c
}

fn signed_degree<R: Rng>(dim: usize, sign: i32, rng: &mut R) -> GroupElement {
    if sign == 0 {
        return GroupElement::zero(dim);
    }
    let mut coords = vec![0i64; dim];
    let lead = rng.random_range(0..dim);
    coords[lead] = rng.random_range(1..=3);
    for x in coords.iter_mut().skip(lead + 1) {
        *x = rng.random_range(-3..=3);
    }
    let p = GroupElement::new(coords).unwrap();
    if sign > 0 {
        p
    } else {
        p.checked_neg().unwrap()
    }
}

fn ac4_l1_algebra() -> Check {
    let mut c = Check::default();
    let mut assoc = 0.0_f64;
    let mut star = 0.0_f64;
    let mut slack = 0.0_f64;
    let mut negative_sums = 0;
    let mut r = rng(4);
    for name in REPRESENTABLE.iter().chain(&["S2lex"]) {
        let sys = system(name);
        let k = sys.group_dim();
        for i in 0..1000 {
            let p: i32 = i % 27;
            let signs = [p % 3 - 1, (p / 3) % 3 - 1, p / 9 - 1];
            let gs: Vec<GroupElement> = signs.iter().map(|&s| signed_degree(k, s, &mut r)).collect();
            let total = gs[0].checked_add(&gs[1]).unwrap().checked_add(&gs[2]).unwrap();
            if !total.is_positive() {
                negative_sums += 1;
            }
            let a = monomial(&sys, &gs[0], &mut r);
            let b = monomial(&sys, &gs[1], &mut r);
            let d = monomial(&sys, &gs[2], &mut r);
            let lhs = a.mul(&b).unwrap().mul(&d).unwrap();
            let rhs = a.mul(&b.mul(&d).unwrap()).unwrap();
            assoc = assoc.max(lhs.dist(&rhs).unwrap());
        }
        for _ in 0..500 {
            let a = random_l1(&sys, 3, 3, &mut r);
            let b = random_l1(&sys, 3, 3, &mut r);
            let ab = a.mul(&b).unwrap();
            let rhs = b.star().unwrap().mul(&a.star().unwrap()).unwrap();
            star = star.max(ab.star().unwrap().dist(&rhs).unwrap());
            slack = slack.max(ab.l1_norm() - a.l1_norm() * b.l1_norm());
        }
    }
    c.le("associativity", assoc, 1e-9);
    c.le("star(ab) = star(b) star(a)", star, 1e-9);
    c.le("||ab||_1 - ||a||_1 ||b||_1", slack, 1e-9);
    c.that("no triple with negative degree sum", negative_sums > 0);
    c.note(format!(
        "assoc {assoc:.1e}, star {star:.1e}, submult slack {slack:.1e}, {negative_sums} triples with sum < 0"
    ));
    c
}

fn ac5_cross_oracle() -> Check {
    let mut c = Check::default();
    let mut worst = 0.0_f64;
    let mut r = rng(5);
    for name in REPRESENTABLE {
        let sys = system(name);
        for g1 in -3..=3 {
            for g2 in -3..=3 {
                let a = monomial(&sys, &g(g1), &mut r);
                let b = monomial(&sys, &g(g2), &mut r);
                let prod = a.mul(&b).unwrap();
                let o = monomial_product_oracle(&sys, (&a.coeff(&g(g1)), &g(g1)), (&b.coeff(&g(g2)), &g(g2))).unwrap();
                let res = prod.dist(&o).unwrap();
                c.le(&format!("{name} ({g1},{g2})"), res, 1e-12);
                worst = worst.max(res);
            }
        }
    }
    c.note(format!("147 monomial pairs, max residual {worst:.1e}"));
    c
}

fn ac6_norm_certificates() -> Check {
    let mut c = Check::default();
    let s2 = system("S2");
    let u = L1Element::u(&s2, &g(1)).unwrap();
    let cert = cstar_norm_bounds(&u, 10, DEFAULT_SUPPORT_CAP).unwrap();
    c.that("S2 u(1): lower = 1 exactly", cert.lower.iter().all(|&s| s == 1.0));
    c.le("S2 u(1): upper at k=10", cert.upper[9], 1.08);

    let a = u.add(&L1Element::u_star(&s2, &g(1)).unwrap()).unwrap();
    let sq = a.mul(&a).unwrap();
    let one = L1Element::one(&s2);
    c.le("S2 (u + u*)^2 - 1", sq.dist(&one).unwrap(), 1e-12);
    c.that("S2 (u + u*)^2 supported at 0", sq.support().all(GroupElement::is_zero));
    let cert2 = cstar_norm_bounds(&a, 10, DEFAULT_SUPPORT_CAP).unwrap();
    c.that(
        "S2 u + u*: interval inside [1 - 1e-9, 1.08]",
        cert2.interval[0] >= 1.0 - 1e-9 && cert2.interval[1] <= 1.08,
    );

    let saut = system("SAut");
    let b = L1Element::one(&saut).add(&L1Element::u(&saut, &g(1)).unwrap()).unwrap();
    let cert3 = cstar_norm_bounds(&b, 12, DEFAULT_SUPPORT_CAP).unwrap();
    c.that("SAut 1 + u: lower >= 1.9 by k = 12", cert3.lower.iter().any(|&s| s >= 1.9));
    let rep = build_regrep(&saut, &StateFunctional::trace(saut.shape()), 24, &[g(1)], DEFAULT_RANK_TOL).unwrap();
    let n = rep.interior_norm(&rep.pi_times_u(&b).unwrap(), 1).unwrap();
    c.that("SAut 1 + u: N=24 interior norm in interval", cert3.contains(n, 1e-6));
    c.note(format!(
        "S2 u [{:.4}, {:.4}]; S2 u+u* [{:.4}, {:.4}]; SAut 1+u [{:.4}, {:.4}] vs interior norm {n:.6}",
        cert.interval[0], cert.interval[1], cert2.interval[0], cert2.interval[1], cert3.interval[0], cert3.interval[1]
    ));
    c
}

fn ac7_coefficient_bound() -> Check {
    let mut c = Check::default();
    let mut r = rng(7);
    let mut worst = f64::NEG_INFINITY;
    for name in REPRESENTABLE {
        let sys = system(name);
        for i in 0..200 {
            let a = random_l1(&sys, 2, 1 + i % 4, &mut r);
            let cert = cstar_norm_bounds(&a, 3, DEFAULT_SUPPORT_CAP).unwrap();
            let gap = a.max_coeff_norm() - cert.interval[1];
            c.le(&format!("{name} sample {i}"), gap, 1e-9);
            worst = worst.max(gap);
        }
    }
    c.note(format!("600 elements, max (coefficient - upper) {worst:.3e}"));
    c
}

fn regrep_for(name: &str, n: i64, gens: &[i64]) -> TruncatedRep {
    let sys = system(name);
    let gens: Vec<GroupElement> = gens.iter().map(|&x| g(x)).collect();
    build_regrep(&sys, &StateFunctional::trace(sys.shape()), n, &gens, DEFAULT_RANK_TOL).unwrap()
}

fn ac8_regular_representation() -> Check {
    let mut c = Check::default();
    let mut r = rng(8);
    let mut worst = 0.0_f64;
    for name in REPRESENTABLE {
        let rep = regrep_for(name, 12, &[0, 1, 2, 3]);
        let sys = rep.system().clone();
        let xs = rep.generators().to_vec();
        let samples: Vec<AlgebraElement> = (0..6).map(|_| random_element(sys.shape(), &mut r)).collect();
        let pairs: Vec<(AlgebraElement, AlgebraElement)> = (0..6)
            .map(|_| (random_element(sys.shape(), &mut r), random_element(sys.shape(), &mut r)))
            .collect();
        let cov = covariance_check(&rep, &xs, &samples, 6, 1e-9).unwrap();
        let adj = adjointness_check(&rep, &xs, &pairs, 3, 1e-9).unwrap();
        let l1_pairs: Vec<(L1Element, L1Element)> = (0..12)
            .map(|_| (random_l1(&sys, 2, 3, &mut r), random_l1(&sys, 2, 3, &mut r)))
            .collect();
        let hom = integrated_form_check(&rep, &l1_pairs, 1e-9).unwrap();
        for report in [&cov, &adj, &hom] {
            for chk in &report.checks {
                c.le(&format!("{name} {}", chk.name), chk.residual, 1e-9);
            }
            worst = worst.max(report.max_residual());
        }
    }
    let s2 = regrep_for("S2", 12, &[1]);
    let dims = (
        s2.dim_at(&g(0)).unwrap(),
        s2.dim_at(&g(1)).unwrap(),
        s2.dim_at(&g(-1)).unwrap(),
        (2..=12)
            .flat_map(|k| [k, -k])
            .map(|k| s2.dim_at(&g(k)).unwrap())
            .max()
            .unwrap(),
    );
    c.that(&format!("S2 dimensions {dims:?} != (2, 1, 1, 0)"), dims == (2, 1, 1, 0));
    c.note(format!("max residual {worst:.1e}; S2 dims {dims:?}"));
    c
}

fn ac9_property_star_and_gauge() -> Check {
    let mut c = Check::default();
    let mut r = rng(9);
    let mut e0_gap = 0.0_f64;
    let mut norm_gap = 0.0_f64;
    for name in REPRESENTABLE {
        let rep = regrep_for(name, 12, &[1]);
        let sys = rep.system().clone();
        let samples: Vec<L1Element> = (0..100).map(|i| random_l1(&sys, 2, 1 + i % 4, &mut r)).collect();
        let stars = property_star_check(&rep, &samples, 1e-9).unwrap();
        c.that(
            &format!("{name}: property (*) fails on {} samples", stars.iter().filter(|s| !s.passed).count()),
            stars.iter().all(|s| s.passed),
        );
        for _ in 0..32 {
            let theta = random_phases(1, &mut r);
            let raw = random_l1(&sys, 2, 3, &mut r);
            let a = raw.scale(C64::new(1.0 / raw.l1_norm().max(1e-300), 0.0));
            let t = gauge_twist(&a, &theta).unwrap();
            e0_gap = e0_gap.max((e0_power_norm(&t, 2).unwrap() - e0_power_norm(&a, 2).unwrap()).abs());
            let m = a.support_radius();
            let na = rep.interior_norm(&rep.pi_times_u(&a).unwrap(), m).unwrap();
            let nt = rep.interior_norm(&rep.pi_times_u(&t).unwrap(), m).unwrap();
            norm_gap = norm_gap.max((na - nt).abs());
        }
    }
    c.le("e0_power_norm gauge invariance", e0_gap, 1e-12);
    c.le("interior norm gauge agreement", norm_gap, 1e-6);
    c.note(format!("300 property (*) samples; e0 gap {e0_gap:.1e}; norm gap {norm_gap:.1e}"));
    c
}

fn ac10_zero_test() -> Check {
    let mut c = Check::default();
    let tol = 1e-9;
    let mut r = rng(10);
    let mut zeros = 0;
    let mut total = 0;
    for name in REPRESENTABLE {
        let sys = system(name);
        let zero_deg = GroupElement::zero(1);
        for i in 0..500 {
            let (a, expect_zero) = match i % 5 {
                0 => (random_l1(&sys, 3, 1 + i % 3, &mut r), None),
                1 => {
                    let a = random_l1(&sys, 3, 3, &mut r);
                    (a.sub(&a).unwrap(), Some(true))
                }
                2 => {
                    let x = g(r.random_range(0..=3));
                    let u = L1Element::u(&sys, &x).unwrap();
                    let v = u.mul(&L1Element::one(&sys)).unwrap();
                    (u.sub(&v).unwrap(), Some(true))
                }
                3 => {
                    let d = g(r.random_range(-3..=3));
                    let m = monomial(&sys, &d, &mut r);
                    let n = m.coeff(&d).op_norm();
                    let scale = if n > 0.0 { 0.5 * tol / n } else { 0.0 };
                    (m.scale(C64::new(scale, 0.0)), Some(true))
                }
                _ => {
                    let a = random_l1(&sys, 3, 2, &mut r);
                    (a.mul(&L1Element::zero(&sys)).unwrap(), Some(true))
                }
            };
            total += 1;
            let ii = a.max_coeff_norm() <= tol;
            let iii = a.star().unwrap().mul_unpruned(&a).unwrap().coeff(&zero_deg).op_norm().sqrt() <= tol;
            c.that(&format!("{name} sample {i}: (ii) = {ii}, (iii) = {iii}"), ii == iii);
            match zero_test(&a, tol) {
                Ok(v) => {
                    let is_zero = v == ZeroVerdict::Zero;
                    zeros += is_zero as usize;
                    c.that(&format!("{name} sample {i}: verdict disagrees with (ii)"), is_zero == ii);
                    if let Some(e) = expect_zero {
                        c.that(&format!("{name} sample {i}: forced zero not detected"), is_zero == e);
                    }
                }
                Err(e) => c.that(&format!("{name} sample {i}: {e}"), false),
            }
        }
    }
    c.note(format!("{total} samples, {zeros} zero"));
    c
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Check); 10] = [
        ("AC1", "transfer synthesis", ac1_transfer_synthesis),
        ("AC2", "representability verdicts", ac2_verdicts),
        ("AC3", "transfer axioms", ac3_transfer_axioms),
        ("AC4", "l1 algebra laws", ac4_l1_algebra),
        ("AC5", "product vs monomial case table", ac5_cross_oracle),
        ("AC6", "norm certificates", ac6_norm_certificates),
        ("AC7", "coefficient bound", ac7_coefficient_bound),
        ("AC8", "regular representation", ac8_regular_representation),
        ("AC9", "property (*) and gauge action", ac9_property_star_and_gauge),
        ("AC10", "zero test equivalence", ac10_zero_test),
    ];
    let mut failed = 0;
    for (id, title, run) in criteria {
        let start = Instant::now();
        let check = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Check {
                fails: vec![format!("panicked: {msg}")],
                notes: vec![],
            }
        });
        let secs = start.elapsed().as_secs_f64();
        if check.fails.is_empty() {
            println!("{id} PASS {title}: {} ({secs:.1}s)", check.notes.join("; "));
        } else {
            failed += 1;
            let shown: Vec<&String> = check.fails.iter().take(5).collect();
            println!(
                "{id} FAIL {title}: {} failure(s): {:?} ({secs:.1}s)",
                check.fails.len(),
                shown
            );
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
