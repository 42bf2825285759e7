//! The totally ordered abelian group `Z^k` under lexicographic order.
//!
//! Elements carry their own dimension; every binary operation checks that
//! both operands live in the same group. Arithmetic is checked: an overflow
//! is reported as an error instead of wrapping, since norm computations add
//! supports repeatedly.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("integer overflow in group arithmetic")]
    Overflow,
    #[error("group dimension must be at least 1")]
    ZeroDimension,
}

/// An element of `Z^k`.
///
/// The derived `Ord` is lexicographic on coordinates, which is the group
/// order whenever both sides have the same dimension. Use [`GroupElement::compare`]
/// when the dimensions are not already known to agree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<i64>);

impl GroupElement {
    pub fn new(coords: Vec<i64>) -> Result<Self, GroupError> {
        if coords.is_empty() {
            return Err(GroupError::ZeroDimension);
        }
        Ok(GroupElement(coords))
    }

    /// Shorthand for the rank-one group `Z`.
    pub fn scalar(n: i64) -> Self {
        GroupElement(vec![n])
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "group dimension must be at least 1");
        GroupElement(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    fn check_dim(&self, other: &Self) -> Result<(), GroupError> {
        if self.dim() != other.dim() {
            return Err(GroupError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn compare(&self, other: &Self) -> Result<Ordering, GroupError> {
        self.check_dim(other)?;
        Ok(self.0.cmp(&other.0))
    }

    /// Membership in the positive cone: `0 <= self`.
    pub fn is_positive(&self) -> bool {
        match self.0.iter().find(|&&c| c != 0) {
            None => true,
            Some(&c) => c > 0,
        }
    }

    /// Strictly positive: `0 < self`.
    pub fn is_strictly_positive(&self) -> bool {
        !self.is_zero() && self.is_positive()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, GroupError> {
        self.check_dim(other)?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(GroupError::Overflow))
            .collect::<Result<Vec<_>, _>>()
            .map(GroupElement)
    }

    pub fn checked_neg(&self) -> Result<Self, GroupError> {
        self.0
            .iter()
            .map(|a| a.checked_neg().ok_or(GroupError::Overflow))
            .collect::<Result<Vec<_>, _>>()
            .map(GroupElement)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, GroupError> {
        self.checked_add(&other.checked_neg()?)
    }

    /// `max(g, -g)`, the representative of `g` in the cone.
    pub fn abs(&self) -> Result<Self, GroupError> {
        if self.is_positive() {
            Ok(self.clone())
        } else {
            self.checked_neg()
        }
    }

    /// Splits `g = pos - neg` with both parts in the positive cone.
    pub fn cone_decomposition(&self) -> Result<(Self, Self), GroupError> {
        let zero = GroupElement::zero(self.dim());
        if self.is_positive() {
            Ok((self.clone(), zero))
        } else {
            Ok((zero, self.checked_neg()?))
        }
    }

    /// Sup-norm of the coordinates; the "radius" used for window margins.
    pub fn radius(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
