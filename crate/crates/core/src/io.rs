//! JSON formats for shapes, algebra elements, crossed-product elements and
//! rank-one systems.
//!
//! * shape: `[2, 1]` or `{"commutative": 2}`
//! * complex number: `0.5` or `[0.5, -1.0]`
//! * algebra element: one matrix per block, each a list of rows
//! * crossed-product element: `{"coeffs": [{"g": [1], "value": <element>}]}`
//! * system: `{"shape": .., "generator": <matrix> | "commutative_map": [1, null], "tol": 1e-9}`

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{commutative_generator, ActionError, EndoAction, FineSystem, DEFAULT_TOL};
use crate::algebra::{AlgebraElement, AlgebraError, AlgebraShape};
use crate::l1x::{DeltaMode, L1Element, L1Error};
use crate::linalg::{CMat, C64};
use crate::ogroup::GroupElement;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    L1(#[from] L1Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexJson {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexJson> for C64 {
    fn from(z: ComplexJson) -> Self {
        match z {
            ComplexJson::Real(r) => C64::new(r, 0.0),
            ComplexJson::Pair([re, im]) => C64::new(re, im),
        }
    }
}

impl From<C64> for ComplexJson {
    fn from(z: C64) -> Self {
        if z.im == 0.0 {
            ComplexJson::Real(z.re)
        } else {
            ComplexJson::Pair([z.re, z.im])
        }
    }
}

pub type MatrixJson = Vec<Vec<ComplexJson>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShapeJson {
    Blocks(Vec<usize>),
    Commutative { commutative: usize },
}

impl ShapeJson {
    pub fn to_shape(&self) -> Result<AlgebraShape, IoError> {
        Ok(match self {
            ShapeJson::Blocks(b) => AlgebraShape::new(b.clone())?,
            ShapeJson::Commutative { commutative } => AlgebraShape::commutative(*commutative)?,
        })
    }
}

pub fn matrix_from_json(m: &MatrixJson) -> Result<CMat, IoError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(IoError::Invalid("matrix rows have different lengths".into()));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| m[i][j].into()))
}

pub fn matrix_to_json(m: &CMat) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
        .collect()
}

pub fn element_from_json(shape: &AlgebraShape, blocks: &[MatrixJson]) -> Result<AlgebraElement, IoError> {
    let mats = blocks.iter().map(matrix_from_json).collect::<Result<Vec<_>, _>>()?;
    Ok(AlgebraElement::from_blocks(shape, mats)?)
}

pub fn element_to_json(a: &AlgebraElement) -> Vec<MatrixJson> {
    a.blocks().iter().map(matrix_to_json).collect()
}

pub fn parse_element(shape: &AlgebraShape, text: &str) -> Result<AlgebraElement, IoError> {
    let blocks: Vec<MatrixJson> = serde_json::from_str(text)?;
    element_from_json(shape, &blocks)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffJson {
    pub g: GroupElement,
    pub value: Vec<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1Json {
    pub coeffs: Vec<CoeffJson>,
}

pub fn l1_to_json(a: &L1Element) -> L1Json {
    L1Json {
        coeffs: a
            .coeffs()
            .iter()
            .map(|(g, c)| CoeffJson {
                g: g.clone(),
                value: element_to_json(c),
            })
            .collect(),
    }
}

pub fn l1_from_json(system: &FineSystem, json: &L1Json, mode: DeltaMode) -> Result<L1Element, IoError> {
    let mut terms = Vec::with_capacity(json.coeffs.len());
    for c in &json.coeffs {
        if c.g.dim() != system.group_dim() {
            return Err(IoError::Invalid(format!(
                "degree {} has dimension {}, system has {}",
                c.g,
                c.g.dim(),
                system.group_dim()
            )));
        }
        terms.push((c.g.clone(), element_from_json(system.shape(), &c.value)?));
    }
    Ok(L1Element::from_terms(
        system,
        terms.iter().map(|(g, v)| (g.clone(), v)),
        mode,
    )?)
}

pub fn parse_l1(system: &FineSystem, text: &str, mode: DeltaMode) -> Result<L1Element, IoError> {
    l1_from_json(system, &serde_json::from_str(text)?, mode)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemJson {
    #[serde(default)]
    pub name: Option<String>,
    pub shape: ShapeJson,
    #[serde(default = "one")]
    pub group_dim: usize,
    /// Matrix of `alpha_1` on the vectorized algebra (row-major blocks).
    #[serde(default)]
    pub generator: Option<MatrixJson>,
    /// For commutative shapes: `alpha_1(l)_i = l_{map[i]}`, `null` for zero.
    #[serde(default)]
    pub commutative_map: Option<Vec<Option<usize>>>,
    #[serde(default)]
    pub tol: Option<f64>,
}

fn one() -> usize {
    1
}

impl SystemJson {
    /// Builds the action. Only rank-one groups can be described by a
    /// single generator; higher-rank actions are built through
    /// [`EndoAction::from_oracle`].
    pub fn to_action(&self, tol_override: Option<f64>) -> Result<Arc<EndoAction>, IoError> {
        if self.group_dim != 1 {
            return Err(ActionError::GeneratorNeedsRankOne(self.group_dim).into());
        }
        let shape = self.shape.to_shape()?;
        let tol = tol_override.or(self.tol).unwrap_or(DEFAULT_TOL);
        let matrix = match (&self.generator, &self.commutative_map) {
            (Some(m), None) => matrix_from_json(m)?,
            (None, Some(map)) => commutative_generator(&shape, map)?,
            _ => {
                return Err(IoError::Invalid(
                    "exactly one of \"generator\" and \"commutative_map\" is required".into(),
                ))
            }
        };
        Ok(Arc::new(EndoAction::from_generator_matrix(&shape, matrix, tol)?))
    }
}

pub fn parse_system(text: &str, tol_override: Option<f64>) -> Result<(SystemJson, Arc<EndoAction>), IoError> {
    let json: SystemJson = serde_json::from_str(text)?;
    let action = json.to_action(tol_override)?;
    Ok((json, action))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::fine_representability_verdict;
    use crate::fixtures::generator_matrix;
    use crate::sampling::SampleSpec;

    #[test]
    fn shapes() {
        let s: ShapeJson = serde_json::from_str("[2, 1]").unwrap();
        assert_eq!(s.to_shape().unwrap().block_sizes(), &[2, 1]);
        let c: ShapeJson = serde_json::from_str(r#"{"commutative": 3}"#).unwrap();
        assert!(c.to_shape().unwrap().is_commutative());
        let bad: ShapeJson = serde_json::from_str("[0]").unwrap();
        assert!(bad.to_shape().is_err());
    }

    #[test]
    fn element_round_trip() {
        let shape = AlgebraShape::new(vec![2, 1]).unwrap();
        let a = parse_element(&shape, "[[[1, [0, 2]], [3, 4]], [[-1]]]").unwrap();
        assert_eq!(a.block(0)[(0, 1)], C64::new(0.0, 2.0));
        let text = serde_json::to_string(&element_to_json(&a)).unwrap();
        assert_eq!(parse_element(&shape, &text).unwrap(), a);
        assert!(parse_element(&shape, "[[[1, 2], [3]], [[1]]]").is_err());
        assert!(parse_element(&shape, "[[[1]]]").is_err());
    }

    #[test]
    fn system_from_commutative_map() {
        let (_, a) = parse_system(r#"{"shape": {"commutative": 2}, "commutative_map": [1, null]}"#, None).unwrap();
        let (_, m) = generator_matrix("S2").unwrap();
        assert_eq!(a.act(&GroupElement::scalar(1)).unwrap().map().matrix(), &m);
        assert!(parse_system(r#"{"shape": [1, 1]}"#, None).is_err());
        assert!(parse_system(r#"{"shape": [1], "commutative_map": [0], "group_dim": 2}"#, None).is_err());
        assert!(parse_system(r#"{"shape": [1], "commutative_map": [0], "extra": 1}"#, None).is_err());
    }

    #[test]
    fn system_from_matrix_and_l1_round_trip() {
        let (_, m) = generator_matrix("SMx").unwrap();
        let text = format!(
            r#"{{"shape": [2, 1], "generator": {}}}"#,
            serde_json::to_string(&matrix_to_json(&m)).unwrap()
        );
        let (_, action) = parse_system(&text, Some(1e-10)).unwrap();
        assert_eq!(action.tol(), 1e-10);
        let sys = fine_representability_verdict(action, &SampleSpec::default())
            .unwrap()
            .fine()
            .unwrap();
        let l1 = r#"{"coeffs": [{"g": [1], "value": [[[1, 0], [0, 0]], [[0]]]}, {"g": [0], "value": [[[0, 0], [0, 0]], [[2]]]}]}"#;
        let a = parse_l1(&sys, l1, DeltaMode::Strict).unwrap();
        assert_eq!(a.coeffs().len(), 2);
        let back = serde_json::to_string(&l1_to_json(&a)).unwrap();
        let b = parse_l1(&sys, &back, DeltaMode::Strict).unwrap();
        assert!(a.dist(&b).unwrap() == 0.0);
        let bad = r#"{"coeffs": [{"g": [1], "value": [[[0, 0], [0, 0]], [[1]]]}]}"#;
        assert!(matches!(
            parse_l1(&sys, bad, DeltaMode::Strict),
            Err(IoError::L1(L1Error::ConstraintViolation { .. }))
        ));
    }
}
