//! The regular representation on a truncated window of degrees.
//!
//! For a state `f` each degree `g` carries the Hilbert space `H_g` obtained
//! from `A` and the semi-inner product
//!
//! * `<v, u>_0 = f(u^* v)`,
//! * `<v, u>_x = f(L_x(u^* v))`,
//! * `<v, u>_{-x} = f(u^* alpha_x(1) v)` for `x > 0`.
//!
//! `H_g` is represented by an orthonormal basis obtained from the Gram
//! matrix over the matrix units. Operators are assembled blockwise on
//! `sum_{g in W} H_g` with sources outside the window treated as zero, so
//! identities are only compared on interior vectors.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::action::{ActionError, FineSystem, LinearMap};
use crate::algebra::{AlgebraElement, AlgebraError, AlgebraShape};
use crate::l1x::{L1Element, L1Error};
use crate::linalg::{hermitian_eigen, restricted_norm, spectral_norm, CMat, C64};
use crate::ogroup::{GroupElement, GroupError};

pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegrepError {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    L1(#[from] L1Error),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("Gram matrix at degree {g} has eigenvalue {eigenvalue:.3e}")]
    GramNotPSD { g: GroupElement, eigenvalue: f64 },
    #[error("window radius {0} is negative")]
    EmptyWindow(i64),
    #[error("margin {margin} is below the required {required}")]
    MarginTooSmall { margin: u64, required: u64 },
    #[error("margin {margin} leaves no interior in a window of radius {radius}")]
    EmptyInterior { margin: u64, radius: u64 },
    #[error("support radius {support} does not fit a window of radius {radius}")]
    SupportExceedsWindow { support: u64, radius: u64 },
    #[error("density is not a state: {0}")]
    NotAState(String),
    #[error("group element has dimension {got}, window has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// `f(a) = sum_b tr(rho_b a_b)` for a positive density `rho` of trace one.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFunctional {
    density: AlgebraElement,
    faithful: bool,
}

impl StateFunctional {
    pub fn new(density: AlgebraElement, tol: f64) -> Result<Self, RegrepError> {
        if !density.is_positive(tol) {
            return Err(RegrepError::NotAState("density is not positive".into()));
        }
        let trace = density.trace_pairing(&AlgebraElement::unit(density.shape()));
        if (trace - C64::new(1.0, 0.0)).norm() > tol {
            return Err(RegrepError::NotAState(format!("trace is {trace}")));
        }
        let faithful = density.blocks().iter().all(|m| {
            let (vals, _) = hermitian_eigen(m);
            vals.first().is_some_and(|&l| l > tol)
        });
        Ok(StateFunctional { density, faithful })
    }

    /// Normalized trace weighting each block by its size.
    pub fn trace(shape: &AlgebraShape) -> Self {
        let total: usize = shape.block_sizes().iter().sum();
        let density = AlgebraElement::unit(shape).scale(C64::new(1.0 / total as f64, 0.0));
        StateFunctional {
            density,
            faithful: true,
        }
    }

    pub fn density(&self) -> &AlgebraElement {
        &self.density
    }

    pub fn is_faithful(&self) -> bool {
        self.faithful
    }

    pub fn eval(&self, a: &AlgebraElement) -> C64 {
        self.density.trace_pairing(a)
    }
}

/// `<v, u>_g`.
pub fn inner_product(
    system: &FineSystem,
    f: &StateFunctional,
    g: &GroupElement,
    v: &AlgebraElement,
    u: &AlgebraElement,
) -> Result<C64, RegrepError> {
    let uv = &u.adjoint() * v;
    Ok(if g.is_zero() {
        f.eval(&uv)
    } else if g.is_positive() {
        f.eval(&system.transfer(g, &uv)?)
    } else {
        let p = system.unit_projection(&g.checked_neg()?)?;
        f.eval(&(&(&u.adjoint() * &p) * v))
    })
}

/// Orthonormal coordinates for `H_g`: `whiten` maps coordinates of `A` to
/// the basis, `lift` maps back to representatives in `A`.
#[derive(Debug, Clone)]
pub struct GnsSpace {
    pub degree: GroupElement,
    pub whiten: CMat,
    pub lift: CMat,
    pub eigenvalues: Vec<f64>,
}

impl GnsSpace {
    pub fn dim(&self) -> usize {
        self.whiten.nrows()
    }
}

/// Gram matrix `G[i][j] = <e_j, e_i>_g` over the matrix units, so that
/// `<v, u>_g = u^H G v` in coordinates.
pub fn gram_matrix(system: &FineSystem, f: &StateFunctional, g: &GroupElement) -> Result<CMat, RegrepError> {
    let basis = system.shape().basis();
    let n = basis.len();
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = inner_product(system, f, g, &basis[j], &basis[i])?;
        }
    }
    Ok((&m + m.adjoint()) * C64::new(0.5, 0.0))
}

pub fn gns_space(
    system: &FineSystem,
    f: &StateFunctional,
    g: &GroupElement,
    rank_tol: f64,
) -> Result<GnsSpace, RegrepError> {
    let gram = gram_matrix(system, f, g)?;
    let (vals, vecs) = hermitian_eigen(&gram);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    if let Some(&low) = vals.first() {
        if low < -rank_tol * top.max(1.0) {
            return Err(RegrepError::GramNotPSD {
                g: g.clone(),
                eigenvalue: low,
            });
        }
    }
    let cutoff = (rank_tol * top).max(f64::EPSILON * 16.0);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > cutoff).collect();
    let n = gram.nrows();
    let mut whiten = CMat::zeros(keep.len(), n);
    let mut lift = CMat::zeros(n, keep.len());
    for (r, &i) in keep.iter().enumerate() {
        let s = vals[i].sqrt();
        for j in 0..n {
            whiten[(r, j)] = vecs[(j, i)].conj() * s;
            lift[(j, r)] = vecs[(j, i)] / s;
        }
    }
    Ok(GnsSpace {
        degree: g.clone(),
        whiten,
        lift,
        eigenvalues: keep.iter().map(|&i| vals[i]).collect(),
    })
}

/// Box `{g : |g_i| <= radius}` of degrees in lexicographic order.
#[derive(Debug, Clone)]
pub struct Window {
    radius: u64,
    group_dim: usize,
    degrees: Vec<GroupElement>,
    index: HashMap<GroupElement, usize>,
}

impl Window {
    pub fn new(group_dim: usize, radius: i64) -> Result<Self, RegrepError> {
        if radius < 0 {
            return Err(RegrepError::EmptyWindow(radius));
        }
        let mut degrees = vec![vec![]];
        for _ in 0..group_dim {
            degrees = degrees
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (-radius..=radius).map(move |c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        let mut degrees: Vec<GroupElement> = degrees
            .into_iter()
            .map(GroupElement::new)
            .collect::<Result<_, _>>()?;
        degrees.sort();
        let index = degrees.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        Ok(Window {
            radius: radius as u64,
            group_dim,
            degrees,
            index,
        })
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn degrees(&self) -> &[GroupElement] {
        &self.degrees
    }

    pub fn position(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeDim {
    pub g: GroupElement,
    pub dim: usize,
}

pub struct TruncatedRep {
    system: FineSystem,
    state: StateFunctional,
    window: Window,
    spaces: Vec<GnsSpace>,
    offsets: Vec<usize>,
    total_dim: usize,
    generators: Vec<GroupElement>,
}

impl std::fmt::Debug for TruncatedRep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TruncatedRep")
            .field("radius", &self.window.radius)
            .field("total_dim", &self.total_dim)
            .finish()
    }
}

fn left_mul(shape: &AlgebraShape, a: &AlgebraElement) -> CMat {
    LinearMap::from_fn(shape, |h| a * h).matrix().clone()
}

/// Which case of the degreewise formula is used; kept for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Above,
    Between,
    Below,
}

fn u_case(x: &GroupElement, g: &GroupElement) -> Result<Side, GroupError> {
    Ok(if g.checked_sub(x)?.is_positive() {
        Side::Above
    } else if g.is_positive() {
        Side::Between
    } else {
        Side::Below
    })
}

fn u_star_case(x: &GroupElement, g: &GroupElement) -> Result<Side, GroupError> {
    Ok(if g.is_positive() {
        Side::Above
    } else if g.checked_add(x)?.is_positive() {
        Side::Between
    } else {
        Side::Below
    })
}

/// Builds the truncated regular representation on the box of radius
/// `radius`. `generators` are the semigroup elements whose `U_x` the caller
/// intends to use; they fix the default margin.
pub fn build_regrep(
    system: &FineSystem,
    state: &StateFunctional,
    radius: i64,
    generators: &[GroupElement],
    rank_tol: f64,
) -> Result<TruncatedRep, RegrepError> {
    let window = Window::new(system.group_dim(), radius)?;
    for x in generators {
        if x.dim() != system.group_dim() {
            return Err(RegrepError::DimensionMismatch {
                expected: system.group_dim(),
                got: x.dim(),
            });
        }
        if !x.is_positive() {
            return Err(ActionError::NotInCone(x.clone()).into());
        }
    }
    let spaces = window
        .degrees()
        .iter()
        .map(|g| gns_space(system, state, g, rank_tol))
        .collect::<Result<Vec<_>, _>>()?;
    let mut offsets = Vec::with_capacity(spaces.len());
    let mut total_dim = 0;
    for s in &spaces {
        offsets.push(total_dim);
        total_dim += s.dim();
    }
    Ok(TruncatedRep {
        system: system.clone(),
        state: state.clone(),
        window,
        spaces,
        offsets,
        total_dim,
        generators: generators.to_vec(),
    })
}

impl TruncatedRep {
    pub fn system(&self) -> &FineSystem {
        &self.system
    }

    pub fn state(&self) -> &StateFunctional {
        &self.state
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    /// Largest generator radius: the margin at which the generator relations
    /// are exact.
    pub fn default_margin(&self) -> u64 {
        self.generators.iter().map(GroupElement::radius).max().unwrap_or(0).max(1)
    }

    pub fn dims(&self) -> Vec<DegreeDim> {
        self.spaces
            .iter()
            .map(|s| DegreeDim {
                g: s.degree.clone(),
                dim: s.dim(),
            })
            .collect()
    }

    pub fn dim_at(&self, g: &GroupElement) -> Option<usize> {
        self.window.position(g).map(|i| self.spaces[i].dim())
    }

    /// Basis indices of the degrees at distance at least `margin` from the
    /// boundary.
    pub fn interior(&self, margin: u64) -> Result<Vec<usize>, RegrepError> {
        if margin > self.window.radius {
            return Err(RegrepError::EmptyInterior {
                margin,
                radius: self.window.radius,
            });
        }
        let bound = self.window.radius - margin;
        let mut cols = Vec::new();
        for (i, g) in self.window.degrees().iter().enumerate() {
            if g.radius() <= bound {
                cols.extend(self.offsets[i]..self.offsets[i] + self.spaces[i].dim());
            }
        }
        Ok(cols)
    }

    /// Coordinates of `h` as a vector of `H_g`.
    pub fn embed(&self, g: &GroupElement, h: &AlgebraElement) -> Option<crate::linalg::CVec> {
        let i = self.window.position(g)?;
        let mut v = crate::linalg::CVec::zeros(self.total_dim);
        let w = &self.spaces[i].whiten * h.to_vec();
        v.rows_mut(self.offsets[i], w.len()).copy_from(&w);
        Some(v)
    }

    fn assemble(
        &self,
        shift: &GroupElement,
        block: impl Fn(&GroupElement) -> Result<CMat, RegrepError>,
    ) -> Result<CMat, RegrepError> {
        let mut out = CMat::zeros(self.total_dim, self.total_dim);
        for (i, g) in self.window.degrees().iter().enumerate() {
            let Some(j) = self.window.position(&g.checked_sub(shift)?) else {
                continue;
            };
            let (dst, src) = (&self.spaces[i], &self.spaces[j]);
            if dst.dim() == 0 || src.dim() == 0 {
                continue;
            }
            let b = &dst.whiten * block(g)? * &src.lift;
            out.view_mut((self.offsets[i], self.offsets[j]), (dst.dim(), src.dim()))
                .copy_from(&b);
        }
        Ok(out)
    }

    fn check_dim(&self, x: &GroupElement) -> Result<(), RegrepError> {
        if x.dim() != self.window.group_dim {
            return Err(RegrepError::DimensionMismatch {
                expected: self.window.group_dim,
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// `pi(a)`: left multiplication by `a` in degrees `g >= 0` and by
    /// `alpha_{-g}(a)` in degrees `g < 0`.
    pub fn pi(&self, a: &AlgebraElement) -> Result<CMat, RegrepError> {
        let shape = self.system.shape();
        let zero = GroupElement::zero(self.window.group_dim);
        self.assemble(&zero, |g| {
            if g.is_positive() {
                Ok(left_mul(shape, a))
            } else {
                Ok(left_mul(shape, &self.system.alpha(&g.checked_neg()?, a)?))
            }
        })
    }

    /// `U_x`, mapping degree `g - x` to degree `g`.
    pub fn u(&self, x: &GroupElement) -> Result<CMat, RegrepError> {
        self.check_dim(x)?;
        if !x.is_positive() {
            return Err(ActionError::NotInCone(x.clone()).into());
        }
        let sys = &self.system;
        let shape = sys.shape();
        let ux = sys.unit_projection(x)?;
        let alpha_x = sys.action().act(x)?.map().matrix().clone();
        self.assemble(x, |g| {
            Ok(match u_case(x, g)? {
                Side::Above => alpha_x.clone(),
                Side::Between => left_mul(shape, &ux) * sys.action().act(g)?.map().matrix(),
                Side::Below => left_mul(shape, &sys.unit_projection(&x.checked_sub(g)?)?),
            })
        })
    }

    /// `U_x^*`, mapping degree `g + x` to degree `g`.
    pub fn u_star(&self, x: &GroupElement) -> Result<CMat, RegrepError> {
        self.check_dim(x)?;
        if !x.is_positive() {
            return Err(ActionError::NotInCone(x.clone()).into());
        }
        let sys = &self.system;
        let shape = sys.shape();
        let lx = sys.transfer_action().transfer(x)?.matrix().clone();
        self.assemble(&x.checked_neg()?, |g| {
            Ok(match u_star_case(x, g)? {
                Side::Above => lx.clone(),
                Side::Between => sys.transfer_action().transfer(&g.checked_add(x)?)?.matrix().clone(),
                Side::Below => left_mul(shape, &sys.unit_projection(&g.checked_neg()?)?),
            })
        })
    }

    /// `(pi x U)(a) = sum_{x>0} U_x^* pi(a_{-x}) + pi(a_0) + sum_{x>0} pi(a_x) U_x`.
    pub fn pi_times_u(&self, a: &L1Element) -> Result<CMat, RegrepError> {
        if !a.system().same_as(&self.system) {
            return Err(L1Error::SystemMismatch.into());
        }
        let r = a.support_radius();
        if r > self.window.radius {
            return Err(RegrepError::SupportExceedsWindow {
                support: r,
                radius: self.window.radius,
            });
        }
        let mut out = CMat::zeros(self.total_dim, self.total_dim);
        for (g, c) in a.coeffs() {
            let p = self.pi(c)?;
            if g.is_zero() {
                out += p;
            } else if g.is_positive() {
                out += p * self.u(g)?;
            } else {
                out += self.u_star(&g.checked_neg()?)? * p;
            }
        }
        Ok(out)
    }

    /// Operator norm of `op` on vectors supported in the interior.
    pub fn interior_norm(&self, op: &CMat, margin: u64) -> Result<f64, RegrepError> {
        Ok(restricted_norm(op, &self.interior(margin)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepCheck {
    pub name: String,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct RepReport {
    pub checks: Vec<RepCheck>,
}

impl RepReport {
    fn push(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        self.checks.push(RepCheck {
            name: name.into(),
            residual,
            passed: residual <= tol,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn first_failure(&self) -> Option<&RepCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn require_margin(xs: &[GroupElement], margin: u64) -> Result<(), RegrepError> {
    let required = xs.iter().map(GroupElement::radius).max().unwrap_or(0);
    if margin < required {
        return Err(RegrepError::MarginTooSmall { margin, required });
    }
    Ok(())
}

/// Covariance relations `U_x pi(a) U_x^* = pi(alpha_x(a))`,
/// `U_x^* pi(a) U_x = pi(L_x(a))`, `U_x pi(a) = pi(alpha_x(a)) U_x` and the
/// semigroup law `U_x U_y = U_{x+y}` (for `|x| + |y| <= margin`), compared
/// on interior vectors.
pub fn covariance_check(
    rep: &TruncatedRep,
    xs: &[GroupElement],
    samples: &[AlgebraElement],
    margin: u64,
    tol: f64,
) -> Result<RepReport, RegrepError> {
    require_margin(xs, margin)?;
    let cols = rep.interior(margin)?;
    let sys = rep.system();
    let mut report = RepReport::default();
    let mut us = Vec::with_capacity(xs.len());
    for x in xs {
        us.push((rep.u(x)?, rep.u_star(x)?));
    }
    for (x, (u, us_)) in xs.iter().zip(&us) {
        let mut cov = 0.0_f64;
        let mut cov_star = 0.0_f64;
        let mut comm = 0.0_f64;
        for a in samples {
            let pa = rep.pi(a)?;
            let pax = rep.pi(&sys.alpha(x, a)?)?;
            let plx = rep.pi(&sys.transfer(x, a)?)?;
            cov = cov.max(restricted_norm(&(u * &pa * us_ - &pax), &cols));
            cov_star = cov_star.max(restricted_norm(&(us_ * &pa * u - &plx), &cols));
            comm = comm.max(restricted_norm(&(u * &pa - &pax * u), &cols));
        }
        report.push(format!("U_x pi(a) U_x* = pi(alpha_x(a)) at x={x}"), cov, tol);
        report.push(format!("U_x* pi(a) U_x = pi(L_x(a)) at x={x}"), cov_star, tol);
        report.push(format!("U_x pi(a) = pi(alpha_x(a)) U_x at x={x}"), comm, tol);
    }
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in xs.iter().enumerate() {
            if x.radius() + y.radius() > margin {
                continue;
            }
            let xy = x.checked_add(y)?;
            let r = restricted_norm(&(&us[i].0 * &us[j].0 - rep.u(&xy)?), &cols);
            report.push(format!("U_x U_y = U_(x+y) at x={x}, y={y}"), r, tol);
        }
    }
    Ok(report)
}

/// Mutual adjointness of `U_x` and `U_x^*` on interior vectors, and the
/// three Gram-level identities behind it, tested on sampled `v, u` for
/// every interior degree `g`:
///
/// * `<alpha_x(v), u>_g = <v, L_x(u)>_{g-x}` for `x <= g`;
/// * `<alpha_x(1) alpha_g(v), u>_g = <v, L_g(u)>_{g-x}` for `0 <= g <= x`;
/// * `<alpha_{x-g}(1) v, u>_g = <v, alpha_{x-g}(1) u>_{g-x}` for `g <= 0`.
pub fn adjointness_check(
    rep: &TruncatedRep,
    xs: &[GroupElement],
    samples: &[(AlgebraElement, AlgebraElement)],
    margin: u64,
    tol: f64,
) -> Result<RepReport, RegrepError> {
    require_margin(xs, margin)?;
    let cols = rep.interior(margin)?;
    let sys = rep.system();
    let f = rep.state();
    let bound = rep.window().radius() - margin;
    let mut report = RepReport::default();
    for x in xs {
        let diff = rep.u(x)? - rep.u_star(x)?.adjoint();
        report.push(format!("<U_x h, h'> = <h, U_x* h'> at x={x}"), restricted_norm(&diff, &cols), tol);

        let ux = sys.unit_projection(x)?;
        let mut worst = [0.0_f64; 3];
        for g in rep.window().degrees().iter().filter(|g| g.radius() <= bound) {
            let gx = g.checked_sub(x)?;
            for (v, u) in samples {
                let (case, lhs, rhs) = if gx.is_positive() {
                    (
                        0,
                        inner_product(sys, f, g, &sys.alpha(x, v)?, u)?,
                        inner_product(sys, f, &gx, v, &sys.transfer(x, u)?)?,
                    )
                } else if g.is_positive() {
                    let left = &ux * &sys.alpha(g, v)?;
                    (
                        1,
                        inner_product(sys, f, g, &left, u)?,
                        inner_product(sys, f, &gx, v, &sys.transfer(g, u)?)?,
                    )
                } else {
                    let p = sys.unit_projection(&x.checked_sub(g)?)?;
                    (
                        2,
                        inner_product(sys, f, g, &(&p * v), u)?,
                        inner_product(sys, f, &gx, v, &(&p * u))?,
                    )
                };
                worst[case] = worst[case].max((lhs - rhs).norm());
            }
        }
        report.push(format!("<alpha_x(v),u>_g = <v,L_x(u)>_(g-x), x <= g, at x={x}"), worst[0], tol);
        report.push(
            format!("<alpha_x(1)alpha_g(v),u>_g = <v,L_g(u)>_(g-x), 0 <= g <= x, at x={x}"),
            worst[1],
            tol,
        );
        report.push(
            format!("<alpha_(x-g)(1)v,u>_g = <v,alpha_(x-g)(1)u>_(g-x), g <= 0, at x={x}"),
            worst[2],
            tol,
        );
    }
    Ok(report)
}

/// Multiplicativity and *-compatibility of `pi x U` on interior vectors.
pub fn integrated_form_check(
    rep: &TruncatedRep,
    pairs: &[(L1Element, L1Element)],
    tol: f64,
) -> Result<RepReport, RegrepError> {
    let mut hom = 0.0_f64;
    let mut star = 0.0_f64;
    for (a, b) in pairs {
        let margin = a.support_radius() + b.support_radius();
        let cols = rep.interior(margin)?;
        let pa = rep.pi_times_u(a)?;
        let pb = rep.pi_times_u(b)?;
        let pab = rep.pi_times_u(&a.mul(b)?)?;
        hom = hom.max(restricted_norm(&(&pa * &pb - pab), &cols));
        // both sides are exact on the interior-by-interior block
        let inner = rep.interior(a.support_radius())?;
        let d = rep.pi_times_u(&a.star()?)? - pa.adjoint();
        let sub = d.select_rows(&inner).select_columns(&inner);
        star = star.max(spectral_norm(&sub));
    }
    let mut report = RepReport::default();
    report.push("(pi x U)(ab) = (pi x U)(a) (pi x U)(b)", hom, tol);
    report.push("(pi x U)(a*) = (pi x U)(a)*", star, tol);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarSample {
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
}

/// `||E_0(a)|| <= ||(pi x U)(a)||` for each sample, the right side taken on
/// interior vectors.
pub fn property_star_check(
    rep: &TruncatedRep,
    samples: &[L1Element],
    tol: f64,
) -> Result<Vec<StarSample>, RegrepError> {
    samples
        .iter()
        .map(|a| {
            let lhs = a.coeff(&GroupElement::zero(rep.window().group_dim)).op_norm();
            let rhs = rep.interior_norm(&rep.pi_times_u(a)?, a.support_radius())?;
            Ok(StarSample {
                lhs,
                rhs,
                passed: lhs <= rhs + tol,
            })
        })
        .collect()
}
