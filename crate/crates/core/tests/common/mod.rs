#![allow(dead_code)]

use rand::Rng;
use xprod::action::{fine_representability_verdict, FineSystem};
use xprod::algebra::AlgebraElement;
use xprod::fixtures::{fixture, s2_lex_action};
use xprod::l1x::{DeltaMode, L1Element};
use xprod::ogroup::GroupElement;
use xprod::sampling::{random_element, SampleSpec};

pub const REPRESENTABLE: [&str; 3] = ["S2", "SAut", "SMx"];

pub fn system(name: &str) -> FineSystem {
    let action = if name == "S2lex" {
        s2_lex_action(1e-9)
    } else {
        fixture(name).expect("known fixture")
    };
    fine_representability_verdict(action, &SampleSpec::default())
        .expect("verdict")
        .fine()
        .expect("representable")
}

pub fn g(n: i64) -> GroupElement {
    GroupElement::scalar(n)
}

/// `a delta_g` with `a` random and projected onto the allowed corner.
pub fn monomial<R: Rng>(sys: &FineSystem, g: &GroupElement, rng: &mut R) -> L1Element {
    let a = random_element(sys.shape(), rng);
    L1Element::delta(sys, &a, g, DeltaMode::Project).expect("projected delta")
}

pub fn random_degree<R: Rng>(dim: usize, radius: i64, rng: &mut R) -> GroupElement {
    GroupElement::new((0..dim).map(|_| rng.random_range(-radius..=radius)).collect()).expect("dim > 0")
}

/// Random element with up to `terms` coefficients in degrees of radius at most `radius`.
pub fn random_l1<R: Rng>(sys: &FineSystem, radius: i64, terms: usize, rng: &mut R) -> L1Element {
    let mut out = L1Element::zero(sys);
    for _ in 0..terms {
        let d = random_degree(sys.group_dim(), radius, rng);
        out = out.add(&monomial(sys, &d, rng)).expect("same system");
    }
    out
}

pub fn projected(sys: &FineSystem, a: &AlgebraElement, g: &GroupElement) -> L1Element {
    L1Element::delta(sys, a, g, DeltaMode::Project).expect("projected delta")
}
