//! Semigroup actions of the positive cone by *-endomorphisms, and the
//! transfer action they induce when one exists.
//!
//! The verdict pipeline checks, for every probed cone element `x`:
//!
//! * `ker alpha_x` is a block-sum ideal, which yields the central projection
//!   `P_x` onto its complement;
//! * `alpha_x(A) = alpha_x(1) A alpha_x(1)` (the image is a hereditary corner);
//! * `alpha_x(P_{x+y}) = alpha_x(1) P_y` on sampled pairs, and `alpha_x` is
//!   isometric on `P_x A`.
//!
//! When all of these hold the transfer operator is obtained by inverting
//! `alpha_x` on `P_x A`: `L_x(a) = alpha_x^{-1}(alpha_x(1) a alpha_x(1))`.
//! The synthesized family is then re-validated against the transfer
//! identity, completeness, non-degeneracy and the semigroup law.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    span_to_central_projection, AlgebraElement, AlgebraError, AlgebraShape, CentralProjection,
};
use crate::linalg::{self, CMat, CVec, C64};
use crate::ogroup::{GroupElement, GroupError};
use crate::sampling::{random_cone_element, random_element, SampleSpec};

pub const DEFAULT_TOL: f64 = 1e-9;

type BasisLabel = (usize, usize, usize);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ActionError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("map matrix is {rows}x{cols}, algebra dimension is {expected}")]
    MatrixSize { rows: usize, cols: usize, expected: usize },
    #[error("not multiplicative on basis pair {left:?}, {right:?} (residual {residual:.3e})")]
    NotMultiplicative {
        left: BasisLabel,
        right: BasisLabel,
        residual: f64,
    },
    #[error("not *-preserving on basis element {basis:?} (residual {residual:.3e})")]
    NotStarPreserving { basis: BasisLabel, residual: f64 },
    #[error("{0} is not in the positive cone")]
    NotInCone(GroupElement),
    #[error("action oracle inconsistent: alpha_{y} o alpha_(x-y) != alpha_{x} (residual {residual:.3e})")]
    OracleInconsistent {
        x: GroupElement,
        y: GroupElement,
        residual: f64,
    },
    #[error("kernel of alpha_{x} is not a block-sum ideal (nullity {nullity}, block sum {block_dim})")]
    KernelNotIdeal {
        x: GroupElement,
        nullity: usize,
        block_dim: usize,
    },
    #[error("alpha_{x}(1) a alpha_{x}(1) is not in the range of alpha_{x} (residual {residual:.3e})")]
    NotInvertibleOnCorner { x: GroupElement, residual: f64 },
    #[error("alpha_{x} is not injective on P_x A")]
    NotInjectiveOnIdeal { x: GroupElement },
    #[error("a single generator describes only rank-one groups, got dimension {0}")]
    GeneratorNeedsRankOne(usize),
    #[error("system is not finely representable: {0}")]
    NotFinelyRepresentable(Witness),
}

/// A linear map on the vectorized algebra.
#[derive(Clone, PartialEq)]
pub struct LinearMap {
    shape: AlgebraShape,
    matrix: CMat,
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearMap{:?}{}", self.shape, self.matrix)
    }
}

impl LinearMap {
    pub fn from_matrix(shape: &AlgebraShape, matrix: CMat) -> Result<Self, ActionError> {
        let d = shape.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(ActionError::MatrixSize {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected: d,
            });
        }
        Ok(LinearMap {
            shape: shape.clone(),
            matrix,
        })
    }

    /// Matrix of `f` evaluated on the matrix-unit basis.
    pub fn from_fn(shape: &AlgebraShape, f: impl Fn(&AlgebraElement) -> AlgebraElement) -> Self {
        let cols: Vec<CVec> = shape.basis().iter().map(|e| f(e).to_vec()).collect();
        LinearMap {
            shape: shape.clone(),
            matrix: CMat::from_columns(&cols),
        }
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        let d = shape.dim();
        LinearMap {
            shape: shape.clone(),
            matrix: CMat::identity(d, d),
        }
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        let d = shape.dim();
        LinearMap {
            shape: shape.clone(),
            matrix: CMat::zeros(d, d),
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn apply(&self, a: &AlgebraElement) -> AlgebraElement {
        let v = &self.matrix * a.to_vec();
        AlgebraElement::from_vec(&self.shape, v.as_slice()).expect("map preserves dimension")
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &LinearMap) -> LinearMap {
        LinearMap {
            shape: self.shape.clone(),
            matrix: &self.matrix * &inner.matrix,
        }
    }

    /// Operator-norm distance of the matrices.
    pub fn dist(&self, other: &LinearMap) -> f64 {
        linalg::spectral_norm(&(&self.matrix - &other.matrix))
    }
}

/// A validated *-endomorphism.
#[derive(Debug, Clone, PartialEq)]
pub struct Endomorphism(LinearMap);

impl Endomorphism {
    pub fn identity(shape: &AlgebraShape) -> Self {
        Endomorphism(LinearMap::identity(shape))
    }

    pub fn map(&self) -> &LinearMap {
        &self.0
    }

    pub fn apply(&self, a: &AlgebraElement) -> AlgebraElement {
        self.0.apply(a)
    }

    pub fn compose(&self, inner: &Endomorphism) -> Endomorphism {
        Endomorphism(self.0.compose(&inner.0))
    }

    pub fn unit_image(&self) -> AlgebraElement {
        self.apply(&AlgebraElement::unit(self.0.shape()))
    }
}

/// Checks multiplicativity on all pairs of matrix units and *-preservation
/// on each matrix unit.
pub fn validate_endomorphism(
    matrix: CMat,
    shape: &AlgebraShape,
    tol: f64,
) -> Result<Endomorphism, ActionError> {
    let map = LinearMap::from_matrix(shape, matrix)?;
    let labels = shape.basis_labels();
    let basis = shape.basis();
    let images: Vec<AlgebraElement> = basis.iter().map(|e| map.apply(e)).collect();
    for (k, e) in basis.iter().enumerate() {
        let residual = map.apply(&e.adjoint()).dist(&images[k].adjoint());
        if residual > tol {
            return Err(ActionError::NotStarPreserving {
                basis: labels[k],
                residual,
            });
        }
    }
    for (i, ei) in basis.iter().enumerate() {
        for (j, ej) in basis.iter().enumerate() {
            let residual = map.apply(&(ei * ej)).dist(&(&images[i] * &images[j]));
            if residual > tol {
                return Err(ActionError::NotMultiplicative {
                    left: labels[i],
                    right: labels[j],
                    residual,
                });
            }
        }
    }
    Ok(Endomorphism(map))
}

/// Caller-supplied description of `x -> alpha_x` as a matrix on the
/// vectorized algebra.
pub type ActionOracle = dyn Fn(&GroupElement) -> CMat + Send + Sync;

enum ActionSource {
    Generator(Endomorphism),
    Oracle(Arc<ActionOracle>),
}

/// A semigroup homomorphism from the positive cone of `Z^k` into `End(A)`.
pub struct EndoAction {
    shape: AlgebraShape,
    group_dim: usize,
    source: ActionSource,
    tol: f64,
    memo: RwLock<HashMap<GroupElement, Arc<Endomorphism>>>,
}

impl fmt::Debug for EndoAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EndoAction")
            .field("shape", &self.shape)
            .field("group_dim", &self.group_dim)
            .field("tol", &self.tol)
            .finish_non_exhaustive()
    }
}

impl EndoAction {
    /// Rank-one action generated by `alpha_1`.
    pub fn from_generator(generator: Endomorphism, tol: f64) -> Self {
        let shape = generator.map().shape().clone();
        EndoAction {
            shape,
            group_dim: 1,
            source: ActionSource::Generator(generator),
            tol,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn from_generator_matrix(shape: &AlgebraShape, matrix: CMat, tol: f64) -> Result<Self, ActionError> {
        Ok(Self::from_generator(validate_endomorphism(matrix, shape, tol)?, tol))
    }

    /// Action given pointwise by an oracle. Each value is validated as an
    /// endomorphism and cross-checked for homomorphy against the values
    /// already requested.
    pub fn from_oracle(shape: &AlgebraShape, group_dim: usize, oracle: Arc<ActionOracle>, tol: f64) -> Self {
        EndoAction {
            shape: shape.clone(),
            group_dim,
            source: ActionSource::Oracle(oracle),
            tol,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn group_dim(&self) -> usize {
        self.group_dim
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Cone elements that generate (k = 1) or probe (k >= 2) the action.
    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.group_dim)
            .map(|i| {
                let mut c = vec![0; self.group_dim];
                c[i] = 1;
                GroupElement::new(c).expect("positive dimension")
            })
            .collect()
    }

    fn check_cone(&self, x: &GroupElement) -> Result<(), ActionError> {
        if x.dim() != self.group_dim {
            return Err(GroupError::DimensionMismatch {
                left: x.dim(),
                right: self.group_dim,
            }
            .into());
        }
        if !x.is_positive() {
            return Err(ActionError::NotInCone(x.clone()));
        }
        Ok(())
    }

    fn cached(&self, x: &GroupElement) -> Option<Arc<Endomorphism>> {
        self.memo.read().expect("memo lock").get(x).cloned()
    }

    fn store(&self, x: GroupElement, e: Endomorphism) -> Arc<Endomorphism> {
        let arc = Arc::new(e);
        self.memo
            .write()
            .expect("memo lock")
            .entry(x)
            .or_insert(arc)
            .clone()
    }

    /// `alpha_x`.
    pub fn act(&self, x: &GroupElement) -> Result<Arc<Endomorphism>, ActionError> {
        self.check_cone(x)?;
        if let Some(e) = self.cached(x) {
            return Ok(e);
        }
        if x.is_zero() {
            return Ok(self.store(x.clone(), Endomorphism::identity(&self.shape)));
        }
        match &self.source {
            ActionSource::Generator(g) => {
                let n = x.coords()[0];
                // extend from the largest cached power below n
                let (mut m, mut cur) = {
                    let memo = self.memo.read().expect("memo lock");
                    let best = memo
                        .iter()
                        .filter(|(k, _)| k.coords()[0] < n)
                        .max_by_key(|(k, _)| k.coords()[0]);
                    match best {
                        Some((k, e)) => (k.coords()[0], (**e).clone()),
                        None => (0, Endomorphism::identity(&self.shape)),
                    }
                };
                while m < n {
                    cur = g.compose(&cur);
                    m += 1;
                    self.store(GroupElement::scalar(m), cur.clone());
                }
                Ok(self.cached(x).expect("just stored"))
            }
            ActionSource::Oracle(f) => {
                let e = validate_endomorphism(f(x), &self.shape, self.tol)?;
                self.cross_check(x, &e)?;
                Ok(self.store(x.clone(), e))
            }
        }
    }

    fn cross_check(&self, x: &GroupElement, ax: &Endomorphism) -> Result<(), ActionError> {
        let memo = self.memo.read().expect("memo lock");
        for (y, ay) in memo.iter() {
            if y.is_zero() {
                continue;
            }
            // x = y + z with z cached
            if let Ok(z) = x.checked_sub(y) {
                if z.is_strictly_positive() {
                    if let Some(az) = memo.get(&z) {
                        let residual = ay.compose(az).map().dist(ax.map());
                        if residual > self.tol {
                            return Err(ActionError::OracleInconsistent {
                                x: x.clone(),
                                y: y.clone(),
                                residual,
                            });
                        }
                    }
                }
            }
            // x + y cached
            if let Ok(s) = x.checked_add(y) {
                if let Some(as_) = memo.get(&s) {
                    let residual = ay.compose(ax).map().dist(as_.map());
                    if residual > self.tol {
                        return Err(ActionError::OracleInconsistent {
                            x: s,
                            y: y.clone(),
                            residual,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// `alpha_x(1)`.
    pub fn unit_projection(&self, x: &GroupElement) -> Result<AlgebraElement, ActionError> {
        Ok(self.act(x)?.unit_image())
    }
}

/// `P_x`: the central projection complementary to `ker alpha_x`.
pub fn kernel_projection(action: &EndoAction, x: &GroupElement, tol: f64) -> Result<CentralProjection, ActionError> {
    let ax = action.act(x)?;
    let shape = action.shape();
    let mut kernel_mask = vec![true; shape.num_blocks()];
    for ((b, _, _), e) in shape.basis_labels().into_iter().zip(shape.basis()) {
        if ax.apply(&e).op_norm() > tol {
            kernel_mask[b] = false;
        }
    }
    let kernel = CentralProjection::from_mask(kernel_mask);
    let nullity = shape.dim() - linalg::rank(ax.map().matrix(), tol);
    let block_dim = kernel.dim(shape);
    if nullity != block_dim {
        return Err(ActionError::KernelNotIdeal {
            x: x.clone(),
            nullity,
            block_dim,
        });
    }
    Ok(kernel.complement())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HereditaryCheck {
    pub x: GroupElement,
    pub image_dim: usize,
    pub corner_dim: usize,
    /// Largest distance between the two subspaces' spanning vectors.
    pub residual: f64,
    pub holds: bool,
}

/// Compares `span alpha_x(basis)` with `span alpha_x(1) basis alpha_x(1)`.
pub fn hereditary_check(action: &EndoAction, x: &GroupElement, tol: f64) -> Result<HereditaryCheck, ActionError> {
    let ax = action.act(x)?;
    let p = ax.unit_image();
    let basis = action.shape().basis();
    let image = ax.map().matrix().clone();
    let corner_cols: Vec<CVec> = basis.iter().map(|e| (&(&p * e) * &p).to_vec()).collect();
    let corner = CMat::from_columns(&corner_cols);
    let qi = linalg::column_basis(&image, tol);
    let qc = linalg::column_basis(&corner, tol);
    let residual = linalg::distance_to_span(&qi, &qc).max(linalg::distance_to_span(&qc, &qi));
    let holds = qi.ncols() == qc.ncols() && residual <= tol;
    Ok(HereditaryCheck {
        x: x.clone(),
        image_dim: qi.ncols(),
        corner_dim: qc.ncols(),
        residual,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairResidual {
    pub x: GroupElement,
    pub y: GroupElement,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsomorphismResidual {
    pub x: GroupElement,
    pub injective: bool,
    /// max | ||alpha_x(a)|| - ||a|| | over sampled `a` in `P_x A`.
    pub isometry_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompatibilityReport {
    pub pairs: Vec<PairResidual>,
    pub isomorphisms: Vec<IsomorphismResidual>,
    pub passed: bool,
}

impl CompatibilityReport {
    pub fn first_pair_failure(&self, tol: f64) -> Option<&PairResidual> {
        self.pairs.iter().find(|p| p.residual > tol)
    }

    pub fn first_isomorphism_failure(&self, tol: f64) -> Option<&IsomorphismResidual> {
        self.isomorphisms
            .iter()
            .find(|i| !i.injective || i.isometry_residual > tol)
    }
}

/// Residuals of `alpha_x(P_{x+y}) = alpha_x(1) P_y` on `pairs`, and of
/// `alpha_x: P_x A -> alpha_x(A)` being an isometric *-isomorphism for each
/// element of `xs`.
pub fn projection_compatibility_check<R: Rng + ?Sized>(
    action: &EndoAction,
    xs: &[GroupElement],
    pairs: &[(GroupElement, GroupElement)],
    tol: f64,
    samples: usize,
    rng: &mut R,
) -> Result<CompatibilityReport, ActionError> {
    let shape = action.shape();
    let mut out_pairs = Vec::with_capacity(pairs.len());
    for (x, y) in pairs {
        let s = x.checked_add(y)?;
        let ps = kernel_projection(action, &s, tol)?.element(shape);
        let py = kernel_projection(action, y, tol)?.element(shape);
        let ax = action.act(x)?;
        let residual = ax.apply(&ps).dist(&(&ax.unit_image() * &py));
        out_pairs.push(PairResidual {
            x: x.clone(),
            y: y.clone(),
            residual,
        });
    }
    let mut isos = Vec::with_capacity(xs.len());
    for x in xs {
        let p = kernel_projection(action, x, tol)?;
        let ax = action.act(x)?;
        let idx = p.basis_indices(shape);
        let restricted = restricted_columns(ax.map().matrix(), &idx);
        let injective = linalg::rank(&restricted, tol) == idx.len();
        let mut iso = 0.0_f64;
        for _ in 0..samples {
            let a = p.apply(&random_element(shape, rng));
            iso = iso.max((ax.apply(&a).op_norm() - a.op_norm()).abs());
        }
        isos.push(IsomorphismResidual {
            x: x.clone(),
            injective,
            isometry_residual: iso,
        });
    }
    let passed = out_pairs.iter().all(|p| p.residual <= tol)
        && isos.iter().all(|i| i.injective && i.isometry_residual <= tol);
    Ok(CompatibilityReport {
        pairs: out_pairs,
        isomorphisms: isos,
        passed,
    })
}

fn restricted_columns(m: &CMat, cols: &[usize]) -> CMat {
    CMat::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])])
}

/// `L_x(a) = alpha_x^{-1}(alpha_x(1) a alpha_x(1))`, with `alpha_x` inverted
/// on `P_x A` by least squares.
pub fn synthesize_transfer(action: &EndoAction, x: &GroupElement, tol: f64) -> Result<LinearMap, ActionError> {
    let shape = action.shape();
    let ax = action.act(x)?;
    let p = ax.unit_image();
    let px = kernel_projection(action, x, tol)?;
    let idx = px.basis_indices(shape);
    let restricted = restricted_columns(ax.map().matrix(), &idx);
    if linalg::rank(&restricted, tol) != idx.len() {
        return Err(ActionError::NotInjectiveOnIdeal { x: x.clone() });
    }
    let rhs_cols: Vec<CVec> = shape.basis().iter().map(|e| (&(&p * e) * &p).to_vec()).collect();
    let rhs = CMat::from_columns(&rhs_cols);
    let (z, residual) = linalg::least_squares(&restricted, &rhs, tol * 1e-3);
    if residual > tol {
        return Err(ActionError::NotInvertibleOnCorner {
            x: x.clone(),
            residual,
        });
    }
    let d = shape.dim();
    let mut matrix = CMat::zeros(d, d);
    for (r, &row) in idx.iter().enumerate() {
        for c in 0..d {
            matrix[(row, c)] = z[(r, c)];
        }
    }
    LinearMap::from_matrix(shape, matrix)
}

/// The complete transfer action, synthesized lazily per cone element.
pub struct TransferAction {
    action: Arc<EndoAction>,
    tol: f64,
    memo: RwLock<HashMap<GroupElement, Arc<(LinearMap, CentralProjection)>>>,
}

impl fmt::Debug for TransferAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransferAction").field("tol", &self.tol).finish_non_exhaustive()
    }
}

impl TransferAction {
    pub fn new(action: Arc<EndoAction>) -> Self {
        let tol = action.tol();
        TransferAction {
            action,
            tol,
            memo: RwLock::new(HashMap::new()),
        }
    }

    fn entry(&self, x: &GroupElement) -> Result<Arc<(LinearMap, CentralProjection)>, ActionError> {
        if let Some(e) = self.memo.read().expect("memo lock").get(x) {
            return Ok(e.clone());
        }
        let map = if x.is_zero() {
            self.action.check_cone(x)?;
            LinearMap::identity(self.action.shape())
        } else {
            synthesize_transfer(&self.action, x, self.tol)?
        };
        let p = kernel_projection(&self.action, x, self.tol)?;
        let arc = Arc::new((map, p));
        Ok(self
            .memo
            .write()
            .expect("memo lock")
            .entry(x.clone())
            .or_insert(arc)
            .clone())
    }

    /// `L_x`.
    pub fn transfer(&self, x: &GroupElement) -> Result<LinearMap, ActionError> {
        Ok(self.entry(x)?.0.clone())
    }

    pub fn apply(&self, x: &GroupElement, a: &AlgebraElement) -> Result<AlgebraElement, ActionError> {
        Ok(self.entry(x)?.0.apply(a))
    }

    /// `P_x`.
    pub fn projection(&self, x: &GroupElement) -> Result<CentralProjection, ActionError> {
        Ok(self.entry(x)?.1.clone())
    }

    /// The conditional expectation `E_x = alpha_x o L_x` onto `alpha_x(A)`.
    pub fn expectation(&self, x: &GroupElement) -> Result<LinearMap, ActionError> {
        Ok(self.action.act(x)?.map().compose(&self.transfer(x)?))
    }
}

/// Maximum residual of one named identity over the sampled inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResidual {
    pub name: String,
    pub max_residual: f64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TransferReport {
    pub checks: Vec<CheckResidual>,
}

impl TransferReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResidual> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<&CheckResidual> {
        self.checks.iter().find(|c| !c.passed)
    }
}

struct Acc {
    tol: f64,
    order: Vec<String>,
    values: HashMap<String, (f64, usize, bool)>,
}

impl Acc {
    fn new(tol: f64) -> Self {
        Acc {
            tol,
            order: Vec::new(),
            values: HashMap::new(),
        }
    }

    fn record(&mut self, name: &str, residual: f64) {
        self.flag(name, residual, residual <= self.tol);
    }

    fn flag(&mut self, name: &str, residual: f64, ok: bool) {
        if !self.values.contains_key(name) {
            self.order.push(name.to_string());
        }
        let e = self.values.entry(name.to_string()).or_insert((0.0, 0, true));
        e.0 = e.0.max(residual);
        e.1 += 1;
        e.2 &= ok && residual.is_finite();
    }

    fn finish(self) -> TransferReport {
        let checks = self
            .order
            .iter()
            .map(|n| {
                let (r, s, ok) = self.values[n];
                CheckResidual {
                    name: n.clone(),
                    max_residual: r,
                    samples: s,
                    passed: ok,
                }
            })
            .collect();
        TransferReport { checks }
    }
}

/// Names of the identities checked by [`verify_transfer`].
pub mod checks {
    pub const TRANSFER_IDENTITY: &str = "transfer_identity";
    pub const TRANSFER_IDENTITY_RIGHT: &str = "transfer_identity_right";
    pub const CORNER_LEFT: &str = "corner_reduction_left";
    pub const CORNER_RIGHT: &str = "corner_reduction_right";
    pub const COMPLETENESS: &str = "completeness";
    pub const EXPECTATION_IDEMPOTENT: &str = "nondegenerate_i_idempotent";
    pub const EXPECTATION_RANGE: &str = "nondegenerate_i_range";
    pub const EXPECTATION_BIMODULE: &str = "nondegenerate_i_bimodule";
    pub const NONDEGENERATE_II: &str = "nondegenerate_ii";
    pub const NONDEGENERATE_III: &str = "nondegenerate_iii";
    pub const SEMIGROUP: &str = "transfer_semigroup";
    pub const PROJECTION_IS_UNIT_IMAGE: &str = "projection_equals_transfer_of_unit";
    pub const POSITIVE: &str = "transfer_positive";
    pub const CONTRACTIVE: &str = "transfer_contractive";
    pub const RANGE_IS_IDEAL: &str = "transfer_range_is_ideal";
    pub const PROJECTIONS_MONOTONE: &str = "projections_nonincreasing";
    pub const UNIT_IMAGES_MONOTONE: &str = "unit_images_nonincreasing";
    pub const KERNELS_MONOTONE: &str = "kernels_increasing";
    pub const UNIQUE_SOLUTION: &str = "transfer_unique";
}

/// Re-validates a synthesized transfer action on sampled cone elements,
/// pairs and algebra elements.
pub fn verify_transfer(
    action: &EndoAction,
    transfer: &TransferAction,
    spec: &SampleSpec,
) -> Result<TransferReport, ActionError> {
    use checks::*;
    let tol = action.tol();
    let shape = action.shape();
    let one = AlgebraElement::unit(shape);
    let mut rng = spec.rng();
    let mut acc = Acc::new(tol);
    let k = action.group_dim();

    // drawn with repetition so every identity sees at least `count` samples
    let mut xs: Vec<GroupElement> = action.generators();
    xs.push(GroupElement::zero(k));
    for _ in 0..spec.count {
        xs.push(random_cone_element(k, spec.max_coord, &mut rng));
    }

    for x in &xs {
        let ax = action.act(x)?;
        let lx = transfer.transfer(x)?;
        let px = transfer.projection(x)?;
        let p1 = ax.unit_image();
        let ex = transfer.expectation(x)?;

        acc.record(PROJECTION_IS_UNIT_IMAGE, lx.apply(&one).dist(&px.element(shape)));
        acc.record(NONDEGENERATE_III, ax.apply(&lx.apply(&one)).dist(&p1));
        acc.record(NONDEGENERATE_II, ax.map().compose(&lx).compose(ax.map()).dist(ax.map()));
        acc.record(EXPECTATION_IDEMPOTENT, ex.compose(&ex).dist(&ex));
        let image_basis = linalg::column_basis(ax.map().matrix(), tol);
        acc.record(EXPECTATION_RANGE, linalg::distance_to_span(&image_basis, ex.matrix()));

        let idx = px.basis_indices(shape);
        let restricted = restricted_columns(ax.map().matrix(), &idx);
        let full_rank = linalg::rank(&restricted, tol) == idx.len();
        acc.flag(UNIQUE_SOLUTION, 0.0, full_rank);

        // L_x(A) = L_x(1) A
        let range = linalg::column_basis(lx.matrix(), tol);
        let ideal_cols: Vec<CVec> = shape.basis().iter().map(|e| (&lx.apply(&one) * e).to_vec()).collect();
        let ideal = linalg::column_basis(&CMat::from_columns(&ideal_cols), tol);
        let span_res = linalg::distance_to_span(&range, &ideal).max(linalg::distance_to_span(&ideal, &range));
        acc.flag(RANGE_IS_IDEAL, span_res, span_res <= tol && range.ncols() == ideal.ncols());

        for _ in 0..2 {
            let a = random_element(shape, &mut rng);
            let b = random_element(shape, &mut rng);
            let c = random_element(shape, &mut rng);
            let aa = ax.apply(&a);
            acc.record(TRANSFER_IDENTITY, lx.apply(&(&aa * &b)).dist(&(&a * &lx.apply(&b))));
            acc.record(TRANSFER_IDENTITY_RIGHT, lx.apply(&(&b * &aa)).dist(&(&lx.apply(&b) * &a)));
            acc.record(CORNER_LEFT, lx.apply(&b).dist(&lx.apply(&(&p1 * &b))));
            acc.record(CORNER_RIGHT, lx.apply(&b).dist(&lx.apply(&(&b * &p1))));
            acc.record(COMPLETENESS, ax.apply(&lx.apply(&b)).dist(&(&(&p1 * &b) * &p1)));
            let ac = ax.apply(&c);
            acc.record(
                EXPECTATION_BIMODULE,
                ex.apply(&(&(&aa * &b) * &ac)).dist(&(&(&aa * &ex.apply(&b)) * &ac)),
            );
            let bb = &b.adjoint() * &b;
            acc.flag(POSITIVE, 0.0, lx.apply(&bb).is_positive(tol));
            let n = b.op_norm();
            let excess = (lx.apply(&b).op_norm() - n * (1.0 + tol)).max(0.0);
            acc.record(CONTRACTIVE, excess);
        }
    }

    for _ in 0..spec.count {
        let x = random_cone_element(k, spec.max_coord, &mut rng);
        let y = random_cone_element(k, spec.max_coord, &mut rng);
        let s = x.checked_add(&y)?;
        let lx = transfer.transfer(&x)?;
        let ly = transfer.transfer(&y)?;
        let ls = transfer.transfer(&s)?;
        acc.record(SEMIGROUP, ly.compose(&lx).dist(&ls));

        // monotonicity along lo <= hi
        let (lo, hi) = if x <= y { (&x, &y) } else { (&y, &x) };
        let plo = transfer.projection(lo)?;
        let phi = transfer.projection(hi)?;
        acc.flag(PROJECTIONS_MONOTONE, 0.0, phi.le(&plo));
        let ulo = action.unit_projection(lo)?;
        let uhi = action.unit_projection(hi)?;
        acc.record(UNIT_IMAGES_MONOTONE, (&ulo * &uhi).dist(&uhi));
        // ker alpha_lo is contained in ker alpha_hi
        acc.flag(KERNELS_MONOTONE, 0.0, plo.complement().le(&phi.complement()));

        let a = random_element(shape, &mut rng);
        acc.record(SEMIGROUP, ly.apply(&lx.apply(&a)).dist(&ls.apply(&a)));
    }
    Ok(acc.finish())
}

/// The first reason a system failed to be finely representable.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    KernelNotIdeal { x: GroupElement },
    HereditaryFails { x: GroupElement, image_dim: usize, corner_dim: usize },
    CompatibilityFails { x: GroupElement, y: GroupElement, residual: f64 },
    NotIsomorphic { x: GroupElement },
    NotInvertibleOnCorner { x: GroupElement, residual: f64 },
    TransferAxiomFails { check: String, residual: f64 },
}

impl Witness {
    pub fn is_hereditary_at(&self, at: &GroupElement) -> bool {
        matches!(self, Witness::HereditaryFails { x, .. } if x == at)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::KernelNotIdeal { x } => write!(f, "kernel not an ideal at x={x}"),
            Witness::HereditaryFails { x, .. } => write!(f, "hereditary fails at x={x}"),
            Witness::CompatibilityFails { x, y, .. } => {
                write!(f, "projection compatibility fails at (x,y)=({x},{y})")
            }
            Witness::NotIsomorphic { x } => write!(f, "alpha not isometric on P_x A at x={x}"),
            Witness::NotInvertibleOnCorner { x, .. } => write!(f, "corner not in range at x={x}"),
            Witness::TransferAxiomFails { check, residual } => {
                write!(f, "transfer check {check} fails (residual {residual:.3e})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", content = "witness")]
pub enum Verdict {
    FinelyRepresentable,
    NotFinelyRepresentable(Witness),
}

impl Verdict {
    pub fn is_representable(&self) -> bool {
        matches!(self, Verdict::FinelyRepresentable)
    }
}

/// Everything computed while deciding representability.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerdictReport {
    pub probed: Vec<GroupElement>,
    pub hereditary: Vec<HereditaryCheck>,
    pub compatibility: Option<CompatibilityReport>,
    pub transfer: Option<TransferReport>,
}

/// `(A, Z^k_+, alpha)` with its representability verdict.
#[derive(Debug)]
pub struct DynamicalSystem {
    action: Arc<EndoAction>,
    transfer: Option<Arc<TransferAction>>,
    verdict: Verdict,
    report: VerdictReport,
}

impl DynamicalSystem {
    pub fn action(&self) -> &Arc<EndoAction> {
        &self.action
    }

    pub fn transfer(&self) -> Option<&Arc<TransferAction>> {
        self.transfer.as_ref()
    }

    pub fn verdict(&self) -> &Verdict {
        &self.verdict
    }

    pub fn report(&self) -> &VerdictReport {
        &self.report
    }

    pub fn shape(&self) -> &AlgebraShape {
        self.action.shape()
    }

    /// Handle for crossed-product arithmetic; fails unless representable.
    pub fn fine(&self) -> Result<FineSystem, ActionError> {
        match (&self.verdict, &self.transfer) {
            (Verdict::FinelyRepresentable, Some(t)) => Ok(FineSystem {
                action: self.action.clone(),
                transfer: t.clone(),
            }),
            (Verdict::NotFinelyRepresentable(w), _) => Err(ActionError::NotFinelyRepresentable(w.clone())),
            (Verdict::FinelyRepresentable, None) => unreachable!("verdict and transfer agree"),
        }
    }
}

/// Runs the representability criterion on the generators and on the
/// cone elements and pairs drawn from `spec`.
pub fn fine_representability_verdict(action: Arc<EndoAction>, spec: &SampleSpec) -> Result<DynamicalSystem, ActionError> {
    let tol = action.tol();
    let k = action.group_dim();
    let mut rng = spec.rng();
    let mut xs: BTreeSet<GroupElement> = action.generators().into_iter().collect();
    xs.insert(GroupElement::zero(k));
    for _ in 0..spec.count {
        xs.insert(random_cone_element(k, spec.max_coord, &mut rng));
    }
    let pairs: Vec<(GroupElement, GroupElement)> = (0..spec.count)
        .map(|_| {
            (
                random_cone_element(k, spec.max_coord, &mut rng),
                random_cone_element(k, spec.max_coord, &mut rng),
            )
        })
        .collect();

    let mut report = VerdictReport {
        probed: xs.iter().cloned().collect(),
        ..Default::default()
    };
    let reject = |w: Witness, report: VerdictReport| DynamicalSystem {
        action: action.clone(),
        transfer: None,
        verdict: Verdict::NotFinelyRepresentable(w),
        report,
    };

    for x in &xs {
        match kernel_projection(&action, x, tol) {
            Ok(_) => {}
            Err(ActionError::KernelNotIdeal { .. }) => {
                return Ok(reject(Witness::KernelNotIdeal { x: x.clone() }, report));
            }
            Err(e) => return Err(e),
        }
        let h = hereditary_check(&action, x, tol)?;
        let holds = h.holds;
        report.hereditary.push(h.clone());
        if !holds {
            return Ok(reject(
                Witness::HereditaryFails {
                    x: x.clone(),
                    image_dim: h.image_dim,
                    corner_dim: h.corner_dim,
                },
                report,
            ));
        }
    }

    let xs_vec: Vec<GroupElement> = xs.iter().cloned().collect();
    let compat = match projection_compatibility_check(&action, &xs_vec, &pairs, tol, 4, &mut rng) {
        Ok(c) => c,
        Err(ActionError::KernelNotIdeal { x, .. }) => {
            return Ok(reject(Witness::KernelNotIdeal { x }, report));
        }
        Err(e) => return Err(e),
    };
    let pair_fail = compat.first_pair_failure(tol).cloned();
    let iso_fail = compat.first_isomorphism_failure(tol).cloned();
    report.compatibility = Some(compat);
    if let Some(p) = pair_fail {
        return Ok(reject(
            Witness::CompatibilityFails {
                x: p.x,
                y: p.y,
                residual: p.residual,
            },
            report,
        ));
    }
    if let Some(i) = iso_fail {
        return Ok(reject(Witness::NotIsomorphic { x: i.x }, report));
    }

    let transfer = Arc::new(TransferAction::new(action.clone()));
    for x in &xs {
        match transfer.transfer(x) {
            Ok(_) => {}
            Err(ActionError::NotInvertibleOnCorner { x, residual }) => {
                return Ok(reject(Witness::NotInvertibleOnCorner { x, residual }, report));
            }
            Err(ActionError::NotInjectiveOnIdeal { x }) => {
                return Ok(reject(Witness::NotIsomorphic { x }, report));
            }
            Err(e) => return Err(e),
        }
    }
    let tr = match verify_transfer(&action, &transfer, spec) {
        Ok(r) => r,
        Err(ActionError::NotInvertibleOnCorner { x, residual }) => {
            return Ok(reject(Witness::NotInvertibleOnCorner { x, residual }, report));
        }
        Err(e) => return Err(e),
    };
    let failure = tr.first_failure().cloned();
    report.transfer = Some(tr);
    if let Some(f) = failure {
        return Ok(reject(
            Witness::TransferAxiomFails {
                check: f.name,
                residual: f.max_residual,
            },
            report,
        ));
    }
    Ok(DynamicalSystem {
        action,
        transfer: Some(transfer),
        verdict: Verdict::FinelyRepresentable,
        report,
    })
}

/// A finely representable system together with its transfer action; the
/// handle crossed-product elements refer to.
#[derive(Debug, Clone)]
pub struct FineSystem {
    action: Arc<EndoAction>,
    transfer: Arc<TransferAction>,
}

impl FineSystem {
    pub fn shape(&self) -> &AlgebraShape {
        self.action.shape()
    }

    pub fn group_dim(&self) -> usize {
        self.action.group_dim()
    }

    pub fn tol(&self) -> f64 {
        self.action.tol()
    }

    pub fn action(&self) -> &EndoAction {
        &self.action
    }

    pub fn transfer_action(&self) -> &TransferAction {
        &self.transfer
    }

    pub fn same_as(&self, other: &FineSystem) -> bool {
        Arc::ptr_eq(&self.action, &other.action)
    }

    /// `alpha_x(a)`.
    pub fn alpha(&self, x: &GroupElement, a: &AlgebraElement) -> Result<AlgebraElement, ActionError> {
        Ok(self.action.act(x)?.apply(a))
    }

    /// `L_x(a)`.
    pub fn transfer(&self, x: &GroupElement, a: &AlgebraElement) -> Result<AlgebraElement, ActionError> {
        self.transfer.apply(x, a)
    }

    /// `alpha_x(1)`.
    pub fn unit_projection(&self, x: &GroupElement) -> Result<AlgebraElement, ActionError> {
        self.action.unit_projection(x)
    }
}

/// Block-sum ideal check used by tests and reports: is `span(elems)` a
/// union of blocks?
pub fn span_is_block_ideal(shape: &AlgebraShape, elems: &[AlgebraElement], tol: f64) -> bool {
    span_to_central_projection(shape, elems, tol).is_ok()
}

/// Builds a generator matrix from a scalar map of a commutative algebra:
/// `alpha(lambda)_i = lambda_{map[i]}`, or `0` where `map[i]` is `None`.
pub fn commutative_generator(shape: &AlgebraShape, map: &[Option<usize>]) -> Result<CMat, ActionError> {
    let n = shape.num_blocks();
    if !shape.is_commutative() || map.len() != n || map.iter().flatten().any(|&j| j >= n) {
        return Err(AlgebraError::VectorLength {
            got: map.len(),
            expected: n,
        }
        .into());
    }
    let mut m = CMat::zeros(n, n);
    for (i, src) in map.iter().enumerate() {
        if let Some(j) = src {
            m[(i, *j)] = C64::new(1.0, 0.0);
        }
    }
    Ok(m)
}
