//! Built-in low-dimensional systems.

use std::sync::Arc;

use serde::Serialize;

use crate::action::{commutative_generator, EndoAction, LinearMap, DEFAULT_TOL};
use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::linalg::CMat;
use crate::ogroup::GroupElement;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub shape: &'static [usize],
    pub generator: &'static str,
    pub expected_representable: bool,
    pub notes: &'static str,
}

pub const FIXTURES: [FixtureInfo; 4] = [
    FixtureInfo {
        name: "S2",
        shape: &[1, 1],
        generator: "alpha_1(l1, l2) = (l2, 0) on C^2",
        expected_representable: true,
        notes: "alpha_1(1) = (1,0); alpha_x = 0 for x >= 2; P_1 = (0,1); L_1(a1, a2) = (0, a1)",
    },
    FixtureInfo {
        name: "SAut",
        shape: &[1, 1],
        generator: "alpha_1 = coordinate swap on C^2",
        expected_representable: true,
        notes: "automorphism; L_1 = swap; P_x = 1",
    },
    FixtureInfo {
        name: "SNeg",
        shape: &[2, 1],
        generator: "alpha_1(m, l) = (l I_2, l) on M_2 + C",
        expected_representable: false,
        notes: "alpha_1(A) is one-dimensional while alpha_1(1) A alpha_1(1) = A; hereditary fails at x=1",
    },
    FixtureInfo {
        name: "SMx",
        shape: &[2, 1],
        generator: "alpha_1(m, l) = (l e11, 0) on M_2 + C",
        expected_representable: true,
        notes: "alpha_1(1) = (e11, 0); P_1 = (0,1); L_1(m, l) = (0, m11)",
    },
];

fn shape_of(name: &str) -> Option<Vec<usize>> {
    FIXTURES.iter().find(|f| f.name == name).map(|f| f.shape.to_vec())
}

/// Catalog of built-in systems with their expected verdicts.
pub fn list_fixtures() -> Vec<FixtureInfo> {
    FIXTURES.to_vec()
}

/// Generator matrix of a built-in system.
pub fn generator_matrix(name: &str) -> Option<(AlgebraShape, CMat)> {
    let shape = AlgebraShape::new(shape_of(name)?).expect("fixture shapes are valid");
    let m = match name {
        "S2" => commutative_generator(&shape, &[Some(1), None]).expect("valid map"),
        "SAut" => commutative_generator(&shape, &[Some(1), Some(0)]).expect("valid map"),
        "SNeg" => LinearMap::from_fn(&shape, |a| {
            let l = a.block(1)[(0, 0)];
            AlgebraElement::from_blocks(a.shape(), vec![CMat::identity(2, 2) * l, CMat::from_element(1, 1, l)])
                .expect("fixture blocks")
        })
        .matrix()
        .clone(),
        "SMx" => LinearMap::from_fn(&shape, |a| {
            let l = a.block(1)[(0, 0)];
            let mut m = CMat::zeros(2, 2);
            m[(0, 0)] = l;
            AlgebraElement::from_blocks(a.shape(), vec![m, CMat::zeros(1, 1)]).expect("fixture blocks")
        })
        .matrix()
        .clone(),
        _ => return None,
    };
    Some((shape, m))
}

pub fn fixture_action(name: &str, tol: f64) -> Option<Arc<EndoAction>> {
    let (shape, m) = generator_matrix(name)?;
    Some(Arc::new(
        EndoAction::from_generator_matrix(&shape, m, tol).expect("fixture generators are endomorphisms"),
    ))
}

pub fn fixture(name: &str) -> Option<Arc<EndoAction>> {
    fixture_action(name, DEFAULT_TOL)
}

/// The S2 map lifted to `Z^2` with lexicographic order:
/// `alpha_(p,q) = beta^p` for `p > 0` and the identity for `p = 0`.
pub fn s2_lex_action(tol: f64) -> Arc<EndoAction> {
    let (shape, beta) = generator_matrix("S2").expect("S2 exists");
    let oracle = move |x: &GroupElement| {
        let p = x.coords()[0];
        let mut m = CMat::identity(beta.nrows(), beta.ncols());
        for _ in 0..p.max(0) {
            m = &beta * m;
        }
        m
    };
    Arc::new(EndoAction::from_oracle(&shape, 2, Arc::new(oracle), tol))
}
