//! Ground states: minimization of `J` over the constraint manifold `I = 1`.
//!
//! The iteration is a projected descent on the scale-invariant quotient
//! `F(u) = J(u) / I(u)^2`, which coincides with `J` on the manifold and with
//! `J` composed with the projection everywhere. Each step moves along the
//! preconditioned gradient of `F`, projects back with `u / I(u)`, and accepts
//! the step by Armijo backtracking on `F`. Fields are held at zero on the
//! boundary nodes (homogeneous Dirichlet truncation).

mod precond;
mod shooting;

pub use shooting::{shooting_oracle, shooting_profile, ShootingProfile};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::energy::{el_residual, energy_unchecked, grad_energy_unchecked, grad_norm_at, ProblemSpec};
use crate::error::{invalid, Result};
use crate::grid::{Field, Grid};
use crate::scalar::Scalar;
use crate::varexp::luxemburg_unchecked;
use precond::Preconditioner;

/// Starting profile of the descent.
#[derive(Debug, Clone)]
pub enum InitProfile<T> {
    /// `exp(-|x|^2)`.
    Gaussian,
    /// `sech(sqrt(V_inf) |x|)^{2/(p_inf - 2)}`, the shape of the 1D soliton.
    SolitonGuess,
    User(Field<T>),
}

#[derive(Debug, Clone)]
pub struct SolveOptions<T> {
    pub max_iter: usize,
    /// Relative norm of the tangential gradient that ends the iteration.
    pub tol_grad: T,
    /// Euler-Lagrange residual required for `converged`.
    pub tol_residual: T,
    pub step_init: T,
    pub armijo_shrink: T,
    pub armijo_slope: T,
    pub init_profile: InitProfile<T>,
    pub rng_seed: u64,
    /// Relative amplitude of the seeded multiplicative noise on the initial profile.
    pub init_perturbation: T,
    pub record_history: bool,
}

impl<T: Scalar> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions {
            max_iter: 5000,
            tol_grad: T::of(1e-7),
            tol_residual: T::of(1e-7),
            step_init: T::of(0.5),
            armijo_shrink: T::of(0.5),
            armijo_slope: T::of(1e-4),
            init_profile: InitProfile::Gaussian,
            rng_seed: 0,
            init_perturbation: T::zero(),
            record_history: true,
        }
    }
}

impl<T: Scalar> SolveOptions<T> {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: T| x > T::zero() && x < T::one();
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be positive"));
        }
        if !(self.tol_grad > T::zero() && self.tol_residual > T::zero()) {
            return Err(invalid("tolerances must be positive"));
        }
        if !(self.step_init > T::zero()) {
            return Err(invalid("step_init must be positive"));
        }
        if !unit(self.armijo_shrink) || !unit(self.armijo_slope) {
            return Err(invalid("Armijo parameters must lie in (0, 1)"));
        }
        if !(self.init_perturbation >= T::zero()) {
            return Err(invalid("init_perturbation must be non-negative"));
        }
        Ok(())
    }
}

/// One accepted iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateRecord<T> {
    pub energy: T,
    pub constraint_defect: T,
}

#[derive(Debug, Clone)]
pub struct GroundState<T> {
    /// The minimizer, non-negative and on the constraint manifold.
    pub w: Field<T>,
    /// `J(w)`, which equals the multiplier at a critical point.
    pub lambda: T,
    pub iterations: usize,
    pub residual: T,
    pub constraint_defect: T,
    /// Final relative tangential gradient.
    pub tangential_gradient: T,
    pub converged: bool,
    /// Iterates accepted by the line search, starting from the initial one.
    pub history: Vec<IterateRecord<T>>,
}

fn initial_field<T: Scalar>(spec: &ProblemSpec<T>, opts: &SolveOptions<T>) -> Result<Field<T>> {
    let grid = spec.grid();
    let base = match &opts.init_profile {
        InitProfile::Gaussian => Field::from_radial(grid.clone(), |r| (-r * r).exp())?,
        InitProfile::SolitonGuess => {
            let k = spec.potential().v_inf().sqrt();
            let e = T::of(2.0) / (spec.exponent().p_inf() - T::of(2.0));
            Field::from_radial(grid.clone(), |r| (k * r).cosh().recip().powf(e))?
        }
        InitProfile::User(f) => {
            f.check_same_grid(spec.exponent().field())?;
            f.clone()
        }
    };
    let base = if opts.init_perturbation > T::zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
        let amp = opts.init_perturbation;
        let vals = base
            .values()
            .iter()
            .map(|&v| v * (T::one() + amp * T::of(rng.gen_range(-1.0..1.0))))
            .collect();
        Field::new(grid.clone(), vals)?
    } else {
        base
    };
    let base = base.with_zero_boundary();
    if base.is_zero() {
        return Err(invalid("initial profile vanishes on the free nodes"));
    }
    Ok(base)
}

struct Iterate<T> {
    u: Field<T>,
    energy: T,
}

/// Gradient of `F = J / I^2` at `u` with `I(u) = 1`, masked on the boundary,
/// together with the relative tangential gradient.
fn quotient_gradient<T: Scalar>(it: &Iterate<T>, spec: &ProblemSpec<T>) -> (Field<T>, T) {
    let gj = grad_energy_unchecked(&it.u, spec);
    let gi = grad_norm_at(&it.u, spec.exponent(), T::one());
    let mask = it.u.grid().boundary_mask();
    let two = T::of(2.0);
    let masked = |f: &Field<T>| {
        let vals = f
            .values()
            .iter()
            .zip(mask)
            .map(|(&v, &b)| if b { T::zero() } else { v })
            .collect();
        Field::from_vec(f.grid().clone(), vals)
    };
    let gj_m = masked(&gj);
    let gi_m = masked(&gi);
    let f_grad = gj_m.axpy_unchecked(-two * it.energy, &gi_m);
    let gi2 = gi_m.dot_unchecked(&gi_m);
    let tangential = if gi2 > T::zero() {
        gj_m.axpy_unchecked(-gj_m.dot_unchecked(&gi_m) / gi2, &gi_m)
    } else {
        gj_m.clone()
    };
    let scale = gj_m.norm();
    let rel = if scale > T::zero() {
        tangential.norm() / scale
    } else {
        T::zero()
    };
    (f_grad, rel)
}

fn project<T: Scalar>(v: &Field<T>, spec: &ProblemSpec<T>) -> Result<Field<T>> {
    let n = luxemburg_unchecked(v, spec.exponent())?;
    if !(n > T::zero()) {
        return Err(invalid("iterate collapsed to zero"));
    }
    Ok(v.scale(n.recip()))
}

fn defect<T: Scalar>(u: &Field<T>, spec: &ProblemSpec<T>) -> Result<T> {
    Ok((luxemburg_unchecked(u, spec.exponent())? - T::one()).abs())
}

/// Minimizes `J` on the constraint manifold of `spec`.
///
/// Non-convergence is reported through `converged = false`, never as an error.
pub fn solve_ground_state<T: Scalar>(
    spec: &ProblemSpec<T>,
    opts: &SolveOptions<T>,
) -> Result<GroundState<T>> {
    opts.validate()?;
    let start = project(&initial_field(spec, opts)?, spec)?;
    let pre = Preconditioner::new(&start, spec.potential().v_inf());
    let mut it = Iterate {
        energy: energy_unchecked(&start, spec),
        u: start,
    };
    let mut history = Vec::new();
    if opts.record_history {
        history.push(IterateRecord {
            energy: it.energy,
            constraint_defect: defect(&it.u, spec)?,
        });
    }
    let noise = T::of(64.0) * T::epsilon();
    let mut iterations = 0;
    let mut rel_grad;
    let mut converged = false;
    loop {
        let (f_grad, rel) = quotient_gradient(&it, spec);
        rel_grad = rel;
        if rel_grad <= opts.tol_grad
            && el_residual(&it.u, it.energy, spec)? <= opts.tol_residual
        {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        let dir = pre.apply(&f_grad);
        let slope = f_grad.dot_unchecked(&dir);
        if !(slope > T::zero()) {
            break;
        }
        let mut tau = opts.step_init;
        let floor = opts.step_init * T::of(1e-14);
        let mut accepted = None;
        while tau >= floor {
            let trial = project(&it.u.axpy_unchecked(-tau, &dir), spec)?;
            let e = energy_unchecked(&trial, spec);
            let drop = opts.armijo_slope * tau * slope;
            let sufficient = e <= it.energy - drop;
            let below_noise = drop <= noise * it.energy.abs() && e <= it.energy;
            if sufficient || below_noise {
                accepted = Some(Iterate { u: trial, energy: e });
                break;
            }
            tau = tau * opts.armijo_shrink;
        }
        let Some(next) = accepted else {
            // line search exhausted: the iterate is at the rounding floor
            break;
        };
        it = next;
        iterations += 1;
        if opts.record_history {
            history.push(IterateRecord {
                energy: it.energy,
                constraint_defect: defect(&it.u, spec)?,
            });
        }
    }
    finish(it, spec, opts, iterations, rel_grad, converged, history)
}

fn finish<T: Scalar>(
    it: Iterate<T>,
    spec: &ProblemSpec<T>,
    opts: &SolveOptions<T>,
    iterations: usize,
    rel_grad: T,
    converged: bool,
    history: Vec<IterateRecord<T>>,
) -> Result<GroundState<T>> {
    let mut w = it.u;
    let mut lambda = it.energy;
    if w.integral() < T::zero() {
        w = w.scale(-T::one());
    }
    if w.values().iter().any(|&v| v < T::zero()) {
        w = project(&w.map(|v| v.abs()), spec)?;
        lambda = energy_unchecked(&w, spec);
    }
    let residual = el_residual(&w, lambda, spec)?;
    let constraint_defect = defect(&w, spec)?;
    let converged = converged
        && residual <= opts.tol_residual
        && constraint_defect <= T::of(1e-9);
    Ok(GroundState {
        w,
        lambda,
        iterations,
        residual,
        constraint_defect,
        tangential_gradient: rel_grad,
        converged,
        history,
    })
}

/// Ground state of the autonomous problem `p = p_inf`, `V = V_inf` on `grid`.
pub fn solve_limit_problem<T: Scalar>(
    p_inf: T,
    v_inf: T,
    grid: Arc<Grid<T>>,
    opts: &SolveOptions<T>,
) -> Result<GroundState<T>> {
    let spec = ProblemSpec::autonomous(grid, p_inf, v_inf)?;
    solve_ground_state(&spec, opts)
}
