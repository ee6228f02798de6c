//! The energy `J`, its limit `J^inf`, first variations of `J` and of the norm
//! `I`, the projection onto the constraint `I = 1`, and the residual of the
//! Euler-Lagrange equation
//!
//! ```text
//! -lap u + V u = lambda |u|^{p-2} u / rho(u).
//! ```
//!
//! Gradients are weighted representers: `<g, v>_w = sum_i w_i g_i v_i` equals the
//! directional derivative of the discrete functional along `v`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{dirichlet_integral, gradient_sq, laplacian, Field, Grid};
use crate::scalar::{sum, Scalar};
use crate::varexp::{luxemburg_unchecked, rho_unchecked, Exponent, Potential};

/// The data triple of the problem: grid, exponent and potential.
#[derive(Debug, Clone)]
pub struct ProblemSpec<T> {
    grid: Arc<Grid<T>>,
    p: Exponent<T>,
    v: Potential<T>,
}

impl<T: Scalar> ProblemSpec<T> {
    pub fn new(p: Exponent<T>, v: Potential<T>) -> Result<Self> {
        p.field().check_same_grid(v.field())?;
        Ok(ProblemSpec {
            grid: p.field().grid().clone(),
            p,
            v,
        })
    }

    /// The autonomous problem `p = p_inf`, `V = V_inf` on `grid`.
    pub fn autonomous(grid: Arc<Grid<T>>, p_inf: T, v_inf: T) -> Result<Self> {
        Self::new(
            Exponent::constant(grid.clone(), p_inf)?,
            Potential::constant(grid, v_inf)?,
        )
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn exponent(&self) -> &Exponent<T> {
        &self.p
    }

    pub fn potential(&self) -> &Potential<T> {
        &self.v
    }

    /// The limit problem attached to this one.
    pub fn limit(&self) -> Result<Self> {
        Self::autonomous(self.grid.clone(), self.p.p_inf(), self.v.v_inf())
    }

    fn check(&self, u: &Field<T>) -> Result<()> {
        u.check_same_grid(self.p.field())
    }
}

fn potential_term<T: Scalar>(u: &Field<T>, v: impl Fn(usize) -> T) -> T {
    let w = u.grid().weights();
    sum((0..u.len()).map(|i| w[i] * v(i) * u.values()[i] * u.values()[i]))
}

/// `J(u) = int |grad u|^2 + V u^2`.
pub fn energy<T: Scalar>(u: &Field<T>, spec: &ProblemSpec<T>) -> Result<T> {
    spec.check(u)?;
    Ok(energy_unchecked(u, spec))
}

pub(crate) fn energy_unchecked<T: Scalar>(u: &Field<T>, spec: &ProblemSpec<T>) -> T {
    let v = spec.v.values();
    dirichlet_integral(u) + potential_term(u, |i| v[i])
}

/// `J^inf(u) = int |grad u|^2 + V_inf u^2`.
pub fn energy_inf<T: Scalar>(u: &Field<T>, v_inf: T) -> T {
    dirichlet_integral(u) + potential_term(u, |_| v_inf)
}

/// Pointwise integrand of `J`, `|grad u|^2 + V u^2`.
pub fn energy_density<T: Scalar>(u: &Field<T>, spec: &ProblemSpec<T>) -> Result<Field<T>> {
    spec.check(u)?;
    let g = gradient_sq(u);
    let v = spec.v.values();
    let vals = (0..u.len())
        .map(|i| g.values()[i] + v[i] * u.values()[i] * u.values()[i])
        .collect();
    Ok(Field::from_vec(u.grid().clone(), vals))
}

/// Representer of `J'(u)`: `2(-lap u + V u)`.
pub fn grad_energy<T: Scalar>(u: &Field<T>, spec: &ProblemSpec<T>) -> Result<Field<T>> {
    spec.check(u)?;
    Ok(grad_energy_unchecked(u, spec))
}

pub(crate) fn grad_energy_unchecked<T: Scalar>(u: &Field<T>, spec: &ProblemSpec<T>) -> Field<T> {
    let lap = laplacian(u);
    let v = spec.v.values();
    let two = T::of(2.0);
    let vals = (0..u.len())
        .map(|i| two * (v[i] * u.values()[i] - lap.values()[i]))
        .collect();
    Field::from_vec(u.grid().clone(), vals)
}

/// Representer of `I'(u)`:
/// `|u/I|^{p-2} (u/I) / int |u/I|^p`.
pub fn grad_norm<T: Scalar>(u: &Field<T>, p: &Exponent<T>) -> Result<Field<T>> {
    u.check_same_grid(p.field())?;
    if u.is_zero() {
        return Err(Error::UndefinedGradient);
    }
    let norm = luxemburg_unchecked(u, p)?;
    Ok(grad_norm_at(u, p, norm))
}

pub(crate) fn grad_norm_at<T: Scalar>(u: &Field<T>, p: &Exponent<T>, norm: T) -> Field<T> {
    let w = u.grid().weights();
    let q = p.values();
    let scaled: Vec<T> = u.values().iter().map(|&v| v / norm).collect();
    let num: Vec<T> = (0..u.len())
        .map(|i| {
            let s = scaled[i];
            s.abs().powf(q[i] - T::of(2.0)) * s
        })
        .collect();
    let den = sum((0..u.len()).map(|i| w[i] * num[i] * scaled[i]));
    Field::from_vec(u.grid().clone(), num.into_iter().map(|v| v / den).collect())
}

/// `u / I(u)`, which lies on the constraint manifold `I = 1`.
pub fn project_to_manifold<T: Scalar>(u: &Field<T>, p: &Exponent<T>) -> Result<Field<T>> {
    u.check_same_grid(p.field())?;
    let norm = luxemburg_unchecked(u, p)?;
    if norm == T::zero() {
        return Err(Error::InvalidParameter(
            "cannot project the zero field onto the constraint".into(),
        ));
    }
    Ok(u.scale(norm.recip()))
}

/// Relative residual of the Euler-Lagrange equation on the interior nodes:
///
/// ```text
/// |A - B| / (|A| + |B|),  A = -lap u + V u,  B = lambda |u|^{p-2} u / rho(u)
/// ```
///
/// with weighted L2 norms. Boundary nodes carry the Dirichlet condition and are
/// excluded.
pub fn el_residual<T: Scalar>(u: &Field<T>, lambda: T, spec: &ProblemSpec<T>) -> Result<T> {
    spec.check(u)?;
    if u.is_zero() {
        return Err(Error::InvalidParameter(
            "residual is undefined at the zero field".into(),
        ));
    }
    let half = T::of(0.5);
    let lin = grad_energy_unchecked(u, spec);
    let r = rho_unchecked(u, &spec.p);
    let q = spec.p.values();
    let w = u.grid().weights();
    let (mut diff, mut a2, mut b2) = (T::zero(), T::zero(), T::zero());
    for i in 0..u.len() {
        if u.grid().is_boundary(i) {
            continue;
        }
        let a = half * lin.values()[i];
        let ui = u.values()[i];
        let b = lambda * ui.abs().powf(q[i] - T::of(2.0)) * ui / r;
        diff = diff + w[i] * (a - b) * (a - b);
        a2 = a2 + w[i] * a * a;
        b2 = b2 + w[i] * b * b;
    }
    let den = a2.sqrt() + b2.sqrt();
    if den == T::zero() {
        return Ok(T::zero());
    }
    Ok(diff.sqrt() / den)
}
