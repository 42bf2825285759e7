//! Finite-dimensional C*-algebras `M_{n1} (+) ... (+) M_{nm}`.
//!
//! Elements are stored as one dense complex matrix per block. The
//! vectorization used by linear maps on the algebra concatenates the blocks,
//! each flattened row-major; its standard basis is the family of matrix units.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{self, hermitian_eigen, spectral_norm, CMat, CVec, C64, ONE, ZERO};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("algebra shapes differ: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("invalid shape {0:?}: need at least one block, all sizes positive")]
    InvalidShape(Vec<usize>),
    #[error("block {block} has dimensions {rows}x{cols}, expected {expected}x{expected}")]
    BlockDimension {
        block: usize,
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("vector length {got} does not match algebra dimension {expected}")]
    VectorLength { got: usize, expected: usize },
    #[error("span is not a two-sided ideal: rank {rank}, block-sum dimension {dim}")]
    NotAnIdeal { rank: usize, dim: usize },
}

/// Block sizes `(n1, ..., nm)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraShape(Arc<[usize]>);

impl AlgebraShape {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self, AlgebraError> {
        if block_sizes.is_empty() || block_sizes.contains(&0) {
            return Err(AlgebraError::InvalidShape(block_sizes));
        }
        Ok(AlgebraShape(block_sizes.into()))
    }

    /// `C(X)` for `|X| = n`, i.e. `n` blocks of size one.
    pub fn commutative(n: usize) -> Result<Self, AlgebraError> {
        Self::new(vec![1; n])
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn num_blocks(&self) -> usize {
        self.0.len()
    }

    pub fn is_commutative(&self) -> bool {
        self.0.iter().all(|&n| n == 1)
    }

    /// `dim A = sum n_i^2`.
    pub fn dim(&self) -> usize {
        self.0.iter().map(|n| n * n).sum()
    }

    pub fn block_offset(&self, block: usize) -> usize {
        self.0[..block].iter().map(|n| n * n).sum()
    }

    /// Position of the matrix unit `e_{ij}` of `block` in the vectorization.
    pub fn basis_index(&self, block: usize, i: usize, j: usize) -> usize {
        self.block_offset(block) + i * self.0[block] + j
    }

    /// `(block, i, j)` for every matrix unit, in vectorization order.
    pub fn basis_labels(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.dim());
        for (b, &n) in self.0.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    out.push((b, i, j));
                }
            }
        }
        out
    }

    pub fn basis(&self) -> Vec<AlgebraElement> {
        self.basis_labels()
            .into_iter()
            .map(|(b, i, j)| AlgebraElement::matrix_unit(self, b, i, j))
            .collect()
    }

    fn ensure_same(&self, other: &Self) -> Result<(), AlgebraError> {
        if self != other {
            return Err(AlgebraError::ShapeMismatch {
                left: self.0.to_vec(),
                right: other.0.to_vec(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0[..])
    }
}

#[derive(Clone, PartialEq)]
pub struct AlgebraElement {
    shape: AlgebraShape,
    blocks: Vec<CMat>,
}

impl AlgebraElement {
    pub fn from_blocks(shape: &AlgebraShape, blocks: Vec<CMat>) -> Result<Self, AlgebraError> {
        if blocks.len() != shape.num_blocks() {
            return Err(AlgebraError::InvalidShape(
                blocks.iter().map(|b| b.nrows()).collect(),
            ));
        }
        for (b, (m, &n)) in blocks.iter().zip(shape.block_sizes()).enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(AlgebraError::BlockDimension {
                    block: b,
                    rows: m.nrows(),
                    cols: m.ncols(),
                    expected: n,
                });
            }
        }
        Ok(AlgebraElement {
            shape: shape.clone(),
            blocks,
        })
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        AlgebraElement {
            shape: shape.clone(),
            blocks: shape.block_sizes().iter().map(|&n| CMat::zeros(n, n)).collect(),
        }
    }

    pub fn unit(shape: &AlgebraShape) -> Self {
        AlgebraElement {
            shape: shape.clone(),
            blocks: shape
                .block_sizes()
                .iter()
                .map(|&n| CMat::identity(n, n))
                .collect(),
        }
    }

    pub fn matrix_unit(shape: &AlgebraShape, block: usize, i: usize, j: usize) -> Self {
        let mut a = Self::zero(shape);
        a.blocks[block][(i, j)] = ONE;
        a
    }

    /// Diagonal element of a commutative algebra, one scalar per block.
    pub fn from_scalars(shape: &AlgebraShape, values: &[C64]) -> Result<Self, AlgebraError> {
        if !shape.is_commutative() || values.len() != shape.num_blocks() {
            return Err(AlgebraError::VectorLength {
                got: values.len(),
                expected: shape.num_blocks(),
            });
        }
        Self::from_vec(shape, values)
    }

    pub fn from_real_scalars(shape: &AlgebraShape, values: &[f64]) -> Result<Self, AlgebraError> {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_scalars(shape, &v)
    }

    pub fn from_vec(shape: &AlgebraShape, v: &[C64]) -> Result<Self, AlgebraError> {
        if v.len() != shape.dim() {
            return Err(AlgebraError::VectorLength {
                got: v.len(),
                expected: shape.dim(),
            });
        }
        let mut blocks = Vec::with_capacity(shape.num_blocks());
        let mut off = 0;
        for &n in shape.block_sizes() {
            blocks.push(CMat::from_row_slice(n, n, &v[off..off + n * n]));
            off += n * n;
        }
        Ok(AlgebraElement {
            shape: shape.clone(),
            blocks,
        })
    }

    pub fn to_vec(&self) -> CVec {
        let mut out = Vec::with_capacity(self.shape.dim());
        for m in &self.blocks {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    out.push(m[(i, j)]);
                }
            }
        }
        CVec::from_vec(out)
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &CMat {
        &self.blocks[b]
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMat, &CMat) -> CMat) -> Result<Self, AlgebraError> {
        self.shape.ensure_same(&other.shape)?;
        Ok(AlgebraElement {
            shape: self.shape.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn adjoint(&self) -> Self {
        AlgebraElement {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|m| m.adjoint()).collect(),
        }
    }

    pub fn scale(&self, lambda: C64) -> Self {
        AlgebraElement {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|m| m * lambda).collect(),
        }
    }

    pub fn lincomb(shape: &AlgebraShape, terms: &[(C64, &AlgebraElement)]) -> Result<Self, AlgebraError> {
        let mut acc = Self::zero(shape);
        for (c, e) in terms {
            acc = acc.try_add(&e.scale(*c))?;
        }
        Ok(acc)
    }

    /// C*-norm: the largest singular value over all blocks.
    pub fn op_norm(&self) -> f64 {
        self.blocks.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    /// `op_norm(self - other)`; panics on shape mismatch.
    pub fn dist(&self, other: &Self) -> f64 {
        (self - other).op_norm()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.op_norm() <= tol
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.dist(&self.adjoint()) <= tol
    }

    pub fn is_positive(&self, tol: f64) -> bool {
        self.is_self_adjoint(tol)
            && self
                .blocks
                .iter()
                .all(|m| hermitian_eigen(m).0.first().is_none_or(|&l| l >= -tol))
    }

    pub fn is_projection(&self, tol: f64) -> bool {
        self.is_self_adjoint(tol) && self.dist(&(self * self)) <= tol
    }

    /// Mask of blocks on which `self` is non-negligible.
    pub fn block_support(&self, tol: f64) -> Vec<bool> {
        self.blocks.iter().map(|m| spectral_norm(m) > tol).collect()
    }

    /// Sum of block traces of `self * other`.
    pub fn trace_pairing(&self, other: &Self) -> C64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a * b).trace())
            .fold(ZERO, |acc, z| acc + z)
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for m in &self.blocks {
            let rows: Vec<Vec<(f64, f64)>> = (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| (m[(i, j)].re, m[(i, j)].im)).collect())
                .collect();
            list.entry(&rows);
        }
        list.finish()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl<'a> $trait<&'a AlgebraElement> for &'a AlgebraElement {
            type Output = AlgebraElement;
            fn $method(self, rhs: &'a AlgebraElement) -> AlgebraElement {
                self.$try(rhs).expect("algebra shape mismatch")
            }
        }
        impl $trait for AlgebraElement {
            type Output = AlgebraElement;
            fn $method(self, rhs: AlgebraElement) -> AlgebraElement {
                (&self).$try(&rhs).expect("algebra shape mismatch")
            }
        }
    };
}

binop!(Mul, mul, try_mul);
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// A central projection of a block algebra, described by the blocks it covers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CentralProjection {
    mask: Vec<bool>,
}

impl CentralProjection {
    pub fn from_mask(mask: Vec<bool>) -> Self {
        CentralProjection { mask }
    }

    pub fn full(num_blocks: usize) -> Self {
        Self::from_mask(vec![true; num_blocks])
    }

    pub fn empty(num_blocks: usize) -> Self {
        Self::from_mask(vec![false; num_blocks])
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn complement(&self) -> Self {
        Self::from_mask(self.mask.iter().map(|b| !b).collect())
    }

    /// Projection order `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.mask.iter().zip(&other.mask).all(|(a, b)| !a || *b)
    }

    pub fn element(&self, shape: &AlgebraShape) -> AlgebraElement {
        let mut e = AlgebraElement::unit(shape);
        for (m, &keep) in e.blocks.iter_mut().zip(&self.mask) {
            if !keep {
                m.fill(ZERO);
            }
        }
        e
    }

    /// `P a`, which equals `a P` since `P` is central.
    pub fn apply(&self, a: &AlgebraElement) -> AlgebraElement {
        let mut out = a.clone();
        for (m, &keep) in out.blocks.iter_mut().zip(&self.mask) {
            if !keep {
                m.fill(ZERO);
            }
        }
        out
    }

    /// Vectorization indices of the matrix units spanning `P A`.
    pub fn basis_indices(&self, shape: &AlgebraShape) -> Vec<usize> {
        shape
            .basis_labels()
            .into_iter()
            .enumerate()
            .filter(|(_, (b, _, _))| self.mask[*b])
            .map(|(k, _)| k)
            .collect()
    }

    pub fn dim(&self, shape: &AlgebraShape) -> usize {
        shape
            .block_sizes()
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .map(|(n, _)| n * n)
            .sum()
    }
}

/// Central projection onto the smallest block-sum ideal containing `elems`.
///
/// Each matrix block is simple, so any element with a non-negligible
/// component in a block generates that entire block as a two-sided ideal.
pub fn ideal_to_central_projection(
    shape: &AlgebraShape,
    elems: &[AlgebraElement],
    tol: f64,
) -> Result<CentralProjection, AlgebraError> {
    let mut mask = vec![false; shape.num_blocks()];
    for e in elems {
        shape.ensure_same(e.shape())?;
        for (m, hit) in mask.iter_mut().zip(e.block_support(tol)) {
            *m |= hit;
        }
    }
    Ok(CentralProjection::from_mask(mask))
}

/// Like [`ideal_to_central_projection`], but requires the linear span of
/// `elems` to already be that block sum.
pub fn span_to_central_projection(
    shape: &AlgebraShape,
    elems: &[AlgebraElement],
    tol: f64,
) -> Result<CentralProjection, AlgebraError> {
    let p = ideal_to_central_projection(shape, elems, tol)?;
    let cols: Vec<CVec> = elems.iter().map(|e| e.to_vec()).collect();
    let r = if cols.is_empty() {
        0
    } else {
        linalg::rank(&CMat::from_columns(&cols), tol)
    };
    let dim = p.dim(shape);
    if r != dim {
        return Err(AlgebraError::NotAnIdeal { rank: r, dim });
    }
    Ok(p)
}
