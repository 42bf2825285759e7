//! Finitely supported elements of the Banach *-algebra `l1(Gamma, alpha, A)`.
//!
//! An element is a finite map `g -> a_g` subject to the support constraint
//! `a_x = a_x alpha_x(1)` and `a_{-x} = alpha_x(1) a_{-x}` for `x >= 0`.
//! Multiplication is the twisted convolution in which degree-raising terms
//! are pushed through `alpha` and degree-lowering products go through the
//! transfer operators `L`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::action::{ActionError, FineSystem};
use crate::algebra::{AlgebraElement, AlgebraError};
use crate::linalg::C64;
use crate::ogroup::{GroupElement, GroupError};

/// Coefficients with operator norm at or below this are dropped.
pub const DROP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum L1Error {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("elements belong to different systems")]
    SystemMismatch,
    #[error("coefficient at degree {g} violates the support constraint (residual {residual:.3e})")]
    ConstraintViolation { g: GroupElement, residual: f64 },
}

/// How [`L1Element::delta`] treats a coefficient outside its allowed corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeltaMode {
    /// Reject coefficients the constraint would change by more than the tolerance.
    #[default]
    Strict,
    /// Multiply by the relevant `alpha_x(1)` silently.
    Project,
}

#[derive(Clone)]
pub struct L1Element {
    system: FineSystem,
    coeffs: BTreeMap<GroupElement, AlgebraElement>,
}

impl fmt::Debug for L1Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.coeffs.iter()).finish()
    }
}

impl L1Element {
    pub fn zero(system: &FineSystem) -> Self {
        L1Element {
            system: system.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    /// The unit `1 delta_0`.
    pub fn one(system: &FineSystem) -> Self {
        let one = AlgebraElement::unit(system.shape());
        Self::delta(system, &one, &GroupElement::zero(system.group_dim()), DeltaMode::Strict)
            .expect("the unit satisfies the degree-zero constraint")
    }

    /// Projects `a` onto the allowed corner for degree `g`.
    fn project(system: &FineSystem, a: &AlgebraElement, g: &GroupElement) -> Result<AlgebraElement, L1Error> {
        if g.is_positive() {
            Ok(a * &system.unit_projection(g)?)
        } else {
            Ok(&system.unit_projection(&g.checked_neg()?)? * a)
        }
    }

    /// `a delta_g`.
    pub fn delta(system: &FineSystem, a: &AlgebraElement, g: &GroupElement, mode: DeltaMode) -> Result<Self, L1Error> {
        let projected = Self::project(system, a, g)?;
        if mode == DeltaMode::Strict {
            let residual = projected.try_sub(a)?.op_norm();
            if residual > system.tol() {
                return Err(L1Error::ConstraintViolation { g: g.clone(), residual });
            }
        }
        let mut out = Self::zero(system);
        out.accumulate(g.clone(), projected);
        out.prune();
        Ok(out)
    }

    /// Sum of `a_g delta_g` over the given terms.
    pub fn from_terms<'a>(
        system: &FineSystem,
        terms: impl IntoIterator<Item = (GroupElement, &'a AlgebraElement)>,
        mode: DeltaMode,
    ) -> Result<Self, L1Error> {
        let mut out = Self::zero(system);
        for (g, a) in terms {
            out = out.add(&Self::delta(system, a, &g, mode)?)?;
        }
        Ok(out)
    }

    /// `u_x = alpha_x(1) delta_x`.
    pub fn u(system: &FineSystem, x: &GroupElement) -> Result<Self, L1Error> {
        let p = system.unit_projection(x)?;
        Self::delta(system, &p, x, DeltaMode::Strict)
    }

    /// `u_x^* = alpha_x(1) delta_{-x}`.
    pub fn u_star(system: &FineSystem, x: &GroupElement) -> Result<Self, L1Error> {
        let p = system.unit_projection(x)?;
        Self::delta(system, &p, &x.checked_neg()?, DeltaMode::Strict)
    }

    pub fn system(&self) -> &FineSystem {
        &self.system
    }

    pub fn coeffs(&self) -> &BTreeMap<GroupElement, AlgebraElement> {
        &self.coeffs
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.coeffs.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest coordinate magnitude over the support.
    pub fn support_radius(&self) -> u64 {
        self.coeffs.keys().map(GroupElement::radius).max().unwrap_or(0)
    }

    /// `E_g(a)`: the degree-`g` coefficient, zero when absent.
    pub fn coeff(&self, g: &GroupElement) -> AlgebraElement {
        self.coeffs
            .get(g)
            .cloned()
            .unwrap_or_else(|| AlgebraElement::zero(self.system.shape()))
    }

    /// `sum_g ||a_g||`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(AlgebraElement::op_norm).sum()
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.values().map(AlgebraElement::op_norm).fold(0.0, f64::max)
    }

    /// Largest change any coefficient would undergo if re-projected onto
    /// its allowed corner.
    pub fn constraint_residual(&self) -> Result<f64, L1Error> {
        let mut worst = 0.0_f64;
        for (g, a) in &self.coeffs {
            worst = worst.max(Self::project(&self.system, a, g)?.try_sub(a)?.op_norm());
        }
        Ok(worst)
    }

    fn check_same(&self, other: &Self) -> Result<(), L1Error> {
        if !self.system.same_as(&other.system) {
            return Err(L1Error::SystemMismatch);
        }
        Ok(())
    }

    fn accumulate(&mut self, g: GroupElement, a: AlgebraElement) {
        match self.coeffs.get_mut(&g) {
            Some(c) => *c = &*c + &a,
            None => {
                self.coeffs.insert(g, a);
            }
        }
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, a| a.op_norm() > DROP_TOL);
    }

    /// Drops coefficients of norm at most `rel` times the largest one.
    pub(crate) fn prune_relative(&mut self, rel: f64) {
        let cut = rel * self.max_coeff_norm();
        self.coeffs.retain(|_, a| a.op_norm() > cut);
    }

    /// `2^e self`; exact in floating point, so nothing is pruned.
    pub(crate) fn scale_pow2(&self, e: i32) -> Self {
        let f = C64::new(2f64.powi(e), 0.0);
        L1Element {
            system: self.system.clone(),
            coeffs: self.coeffs.iter().map(|(g, a)| (g.clone(), a.scale(f))).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, L1Error> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (g, a) in &other.coeffs {
            out.accumulate(g.clone(), a.clone());
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, L1Error> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, lambda: C64) -> Self {
        let mut out = L1Element {
            system: self.system.clone(),
            coeffs: self.coeffs.iter().map(|(g, a)| (g.clone(), a.scale(lambda))).collect(),
        };
        out.prune();
        out
    }

    /// `(a^*)_g = (a_{-g})^*`.
    pub fn star(&self) -> Result<Self, L1Error> {
        let mut coeffs = BTreeMap::new();
        for (g, a) in &self.coeffs {
            coeffs.insert(g.checked_neg()?, a.adjoint());
        }
        Ok(L1Element {
            system: self.system.clone(),
            coeffs,
        })
    }

    /// Applies `f` to every coefficient, keeping degrees.
    pub(crate) fn map_coeffs(&self, f: impl Fn(&GroupElement, &AlgebraElement) -> AlgebraElement) -> Self {
        let mut out = L1Element {
            system: self.system.clone(),
            coeffs: self.coeffs.iter().map(|(g, a)| (g.clone(), f(g, a))).collect(),
        };
        out.prune();
        out
    }

    /// Twisted convolution. Each pair of support degrees `(g1, g2)` is
    /// sorted into one of three families by the signs of `g1` and `g2`:
    ///
    /// * `a_x . b_{-y}` (`x, y > 0`): `a alpha_{x-y}(b)` when `x >= y`,
    ///   `alpha_{y-x}(a) b` otherwise;
    /// * `a_{-x} . b_y` (`x, y > 0`): `L_x(ab)` when `y >= x`, `L_y(ab)` otherwise;
    /// * both degrees on the same side of zero: `a alpha_x(b)` for `x, y >= 0`,
    ///   `alpha_y(a) b` for `-x, -y <= 0`.
    pub fn mul(&self, other: &Self) -> Result<Self, L1Error> {
        let mut out = self.mul_unpruned(other)?;
        out.prune();
        Ok(out)
    }

    /// [`L1Element::mul`] keeping coefficients below [`DROP_TOL`].
    pub fn mul_unpruned(&self, other: &Self) -> Result<Self, L1Error> {
        self.check_same(other)?;
        let sys = &self.system;
        let mut out = Self::zero(sys);
        for (g1, a) in &self.coeffs {
            for (g2, b) in &other.coeffs {
                let g = g1.checked_add(g2)?;
                let term = if g1.is_positive() && g2.is_positive() {
                    a * &sys.alpha(g1, b)?
                } else if g1.is_strictly_positive() {
                    // g2 < 0
                    let (x, y) = (g1, g2.checked_neg()?);
                    if g.is_positive() {
                        a * &sys.alpha(&x.checked_sub(&y)?, b)?
                    } else {
                        &sys.alpha(&y.checked_sub(x)?, a)? * b
                    }
                } else if g2.is_strictly_positive() {
                    // g1 < 0
                    let (x, y) = (g1.checked_neg()?, g2);
                    if g.is_positive() {
                        sys.transfer(&x, &(a * b))?
                    } else {
                        sys.transfer(y, &(a * b))?
                    }
                } else {
                    // g1 <= 0, g2 <= 0, not both zero
                    &sys.alpha(&g2.checked_neg()?, a)? * b
                };
                out.accumulate(g, term);
            }
        }
        Ok(out)
    }

    /// `self^n` by repeated squaring.
    pub fn pow(&self, n: u32) -> Result<Self, L1Error> {
        let mut result = Self::one(&self.system);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Largest coefficient distance `max_g ||a_g - b_g||`, without pruning.
    pub fn dist(&self, other: &Self) -> Result<f64, L1Error> {
        self.check_same(other)?;
        let mut worst = 0.0_f64;
        for g in self.coeffs.keys().chain(other.coeffs.keys()) {
            worst = worst.max(self.coeff(g).try_sub(&other.coeff(g))?.op_norm());
        }
        Ok(worst)
    }
}

/// Product of two monomials `(a delta_g1)(b delta_g2)` by the explicit case
/// table for the integrated form of a covariant representation, split first
/// on the sign of `g1 + g2`. Independent of [`L1Element::mul`]'s pairing
/// loop; used as its cross-check.
pub fn monomial_product_oracle(
    system: &FineSystem,
    (a, g1): (&AlgebraElement, &GroupElement),
    (b, g2): (&AlgebraElement, &GroupElement),
) -> Result<L1Element, L1Error> {
    let s = g1.checked_add(g2)?;
    let coeff = if s.is_positive() {
        if g1.is_strictly_positive() && !g2.is_positive() {
            // I.1
            a * &system.alpha(&s, b)?
        } else if !g1.is_positive() && g2.is_strictly_positive() {
            // I.2
            system.transfer(&g1.checked_neg()?, &(a * b))?
        } else {
            // I.3: g1, g2 >= 0
            a * &system.alpha(g1, b)?
        }
    } else {
        let minus_s = s.checked_neg()?;
        if g1.is_strictly_positive() {
            // II.1: g2 < 0
            &system.alpha(&minus_s, a)? * b
        } else if g2.is_strictly_positive() {
            // II.2: g1 < 0
            system.transfer(g2, &(a * b))?
        } else {
            // II.3: g1, g2 <= 0
            &system.alpha(&g2.checked_neg()?, a)? * b
        }
    };
    L1Element::delta(system, &coeff, &s, DeltaMode::Project)
}
