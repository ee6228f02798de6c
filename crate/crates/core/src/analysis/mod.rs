//! Computations attached to the existence results: the threshold
//! `(p^-/p^inf)^{2/p^inf} lambda_1^inf`, the criterion check, trial-function
//! bounds for exponents that approach `p^inf` from below, the behaviour of
//! `rho`, `I` and `J` under translation, and a reflection-symmetry diagnostic.

mod symmetry;
mod translation;
mod trial;

pub use symmetry::{axial_symmetry_defect, search_symmetry_axis, AxisDefect};
pub use translation::{translation_experiment, TranslationRow, TranslationTable};
pub use trial::{
    find_min_a, rho_lower_bound, trial_upper_bound, DipFamily, MinAReport, TrialBound, TrialSpec,
};

use crate::energy::{energy_unchecked, ProblemSpec};
use crate::error::{invalid, Result};
use crate::grid::{translate_cells, Field, GridKind};
use crate::scalar::Scalar;
use crate::solver::{solve_ground_state, solve_limit_problem, GroundState, InitProfile, SolveOptions};
use crate::varexp::luxemburg_unchecked;

/// Relative margin below which the comparison is reported as not strict.
pub const DEFAULT_CRITERION_RTOL: f64 = 1e-8;

/// `(p^- / p^inf)^{2 / p^inf} * lambda_inf`.
pub fn threshold<T: Scalar>(p_minus: T, p_inf: T, lambda_inf: T) -> Result<T> {
    if !(p_minus > T::of(2.0) && p_minus <= p_inf && p_inf.is_finite()) {
        return Err(invalid(format!(
            "threshold needs 2 < p^- <= p^inf, got p^- = {p_minus}, p^inf = {p_inf}"
        )));
    }
    if !(lambda_inf > T::zero() && lambda_inf.is_finite()) {
        return Err(invalid(format!("lambda_inf must be positive, got {lambda_inf}")));
    }
    Ok((p_minus / p_inf).powf(T::of(2.0) / p_inf) * lambda_inf)
}

/// Which trial produced `lambda1_upper`.
#[derive(Debug, Clone, PartialEq)]
pub enum BestTrial {
    Solver,
    /// The solver restarted from the best shifted limit minimizer.
    WarmRestart,
    /// Limit minimizer shifted by this many cells along the first axis.
    TranslatedLimit(isize),
    /// Index into the supplied `e^{-psi}` trials.
    Exponential(usize),
}

#[derive(Debug, Clone)]
pub struct CriterionReport<T> {
    /// Smallest `J` over the trial battery; an upper bound for `lambda_1`.
    pub lambda1_upper: T,
    /// The solver's value alone.
    pub lambda1_solver: T,
    pub lambda1_inf: T,
    pub threshold: T,
    pub margin: T,
    /// `margin > rtol * threshold`.
    pub strict: bool,
    pub best: BestTrial,
    /// Euler-Lagrange residual and iteration count of the solver run.
    pub solver_residual: T,
    pub solver_iterations: usize,
    /// False when either solve did not converge; the report is then advisory.
    pub authoritative: bool,
}

/// Extra inputs for [`check_criterion_with`].
#[derive(Debug, Clone)]
pub struct CriterionInputs<'a, T> {
    pub trials: &'a [TrialSpec<T>],
    /// A previously computed limit ground state on the same grid.
    pub limit: Option<&'a GroundState<T>>,
    pub rtol: T,
}

impl<T: Scalar> Default for CriterionInputs<'_, T> {
    fn default() -> Self {
        CriterionInputs {
            trials: &[],
            limit: None,
            rtol: T::of(DEFAULT_CRITERION_RTOL),
        }
    }
}

/// Compares the best available upper bound for `lambda_1` with the threshold.
pub fn check_criterion<T: Scalar>(
    spec: &ProblemSpec<T>,
    opts: &SolveOptions<T>,
) -> Result<CriterionReport<T>> {
    check_criterion_with(spec, opts, &CriterionInputs::default())
}

fn shifted_trial_energy<T: Scalar>(w: &Field<T>, k: isize, spec: &ProblemSpec<T>) -> Result<Option<T>> {
    let cells = match w.grid().kind() {
        GridKind::Line1d => vec![k],
        GridKind::Cartesian2d => vec![k, 0],
        GridKind::RadialNd => return Ok(None),
    };
    let moved = translate_cells(w, &cells)?.with_zero_boundary();
    if moved.is_zero() {
        return Ok(None);
    }
    let n = luxemburg_unchecked(&moved, spec.exponent())?;
    Ok(Some(energy_unchecked(&moved, spec) / (n * n)))
}

pub fn check_criterion_with<T: Scalar>(
    spec: &ProblemSpec<T>,
    opts: &SolveOptions<T>,
    inputs: &CriterionInputs<'_, T>,
) -> Result<CriterionReport<T>> {
    let grid = spec.grid();
    let p = spec.exponent();
    let v_inf = spec.potential().v_inf();
    let owned;
    let limit = match inputs.limit {
        Some(l) => {
            l.w.check_same_grid(p.field())?;
            l
        }
        None => {
            owned = solve_limit_problem(p.p_inf(), v_inf, grid.clone(), opts)?;
            &owned
        }
    };
    let lambda_inf = limit.lambda;
    let gs = solve_ground_state(spec, opts)?;

    let mut best = (gs.lambda, BestTrial::Solver);
    let consider = |best: &mut (T, BestTrial), value: T, label: BestTrial| {
        if value < best.0 {
            *best = (value, label);
        }
    };
    let n = grid.axis_len() as isize;
    for k in [0, n / 8, n / 4] {
        if let Some(e) = shifted_trial_energy(&limit.w, k, spec)? {
            consider(&mut best, e, BestTrial::TranslatedLimit(k));
        }
    }
    for (i, t) in inputs.trials.iter().enumerate() {
        let b = trial_upper_bound(t, spec)?;
        consider(&mut best, b.bound, BestTrial::Exponential(i));
    }
    // a warm restart from the best shifted limit profile guards against saddles
    if let BestTrial::TranslatedLimit(k) = best.1 {
        let cells = match grid.kind() {
            GridKind::Cartesian2d => vec![k, 0],
            _ => vec![k],
        };
        let start = translate_cells(&limit.w, &cells)?.with_zero_boundary();
        let warm = SolveOptions {
            init_profile: InitProfile::User(start),
            init_perturbation: T::zero(),
            ..opts.clone()
        };
        let again = solve_ground_state(spec, &warm)?;
        consider(&mut best, again.lambda, BestTrial::WarmRestart);
    }

    let thr = threshold(p.p_minus(), p.p_inf(), lambda_inf)?;
    let margin = thr - best.0;
    Ok(CriterionReport {
        lambda1_upper: best.0,
        lambda1_solver: gs.lambda,
        lambda1_inf: lambda_inf,
        threshold: thr,
        margin,
        strict: margin > inputs.rtol * thr,
        best: best.1,
        solver_residual: gs.residual,
        solver_iterations: gs.iterations,
        authoritative: gs.converged && limit.converged,
    })
}
