//! Trial functions `e^{-psi(|x|)}` and exponent families
//! `p(x) = p^inf - a / psi(|x|)` outside a ball.

use std::sync::Arc;

use super::{check_criterion_with, CriterionInputs, CriterionReport};
use crate::energy::{energy_unchecked, ProblemSpec};
use crate::error::{invalid, Result};
use crate::exprlang::{Bindings, Expr};
use crate::grid::{Field, Grid};
use crate::scalar::{sum, Scalar};
use crate::solver::{solve_limit_problem, SolveOptions};
use crate::varexp::{luxemburg_unchecked, Exponent, Potential};

/// `psi`, the radius `R` beyond which the exponent dips, and the depth `a`.
#[derive(Debug, Clone)]
pub struct TrialSpec<T> {
    pub psi: Expr,
    pub radius: T,
    pub a: T,
}

impl<T: Scalar> TrialSpec<T> {
    pub fn new(psi: Expr, radius: T, a: T) -> Result<Self> {
        if psi.uses_cartesian() {
            return Err(invalid("psi must be a function of r only"));
        }
        if !(radius > T::zero() && radius.is_finite()) {
            return Err(invalid("trial radius R must be positive"));
        }
        if !(a >= T::zero() && a.is_finite()) {
            return Err(invalid("trial depth a must be non-negative"));
        }
        Ok(TrialSpec { psi, radius, a })
    }

    fn psi_at(&self, r: T) -> Result<T> {
        Ok(T::of(self.psi.eval(&Bindings::radial(r.to_f64_lossy()))?))
    }

    /// `psi(|x_i|)` at every node, after checking monotonicity beyond `R`.
    fn sample_psi(&self, grid: &Grid<T>) -> Result<Vec<T>> {
        let vals = (0..grid.len())
            .map(|i| self.psi_at(grid.radius(i)))
            .collect::<Result<Vec<T>>>()?;
        let mut outer: Vec<(T, T)> = (0..grid.len())
            .filter(|&i| grid.radius(i) >= self.radius)
            .map(|i| (grid.radius(i), vals[i]))
            .collect();
        outer.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let slack = T::of(1e-12);
        for pair in outer.windows(2) {
            if pair[1].1 < pair[0].1 - slack * pair[0].1.abs().max(T::one()) {
                return Err(invalid(format!(
                    "psi decreases beyond R between r = {} and r = {}",
                    pair[0].0, pair[1].0
                )));
            }
        }
        Ok(vals)
    }

    /// `e^{-psi(|x|)}` on `grid`, zero on the boundary nodes.
    pub fn profile(&self, grid: &Arc<Grid<T>>) -> Result<Field<T>> {
        let psi = self.sample_psi(grid)?;
        let g = Field::new(grid.clone(), psi.iter().map(|&s| (-s).exp()).collect())?;
        let g = g.with_zero_boundary();
        if g.is_zero() {
            return Err(invalid("e^{-psi} vanishes numerically on the grid"));
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialBound<T> {
    /// `J(g)` for `g = e^{-psi}`.
    pub energy: T,
    /// `I(g)`.
    pub norm: T,
    /// `J(g) / I(g)^2 = J(g / I(g))`, an upper bound for `lambda_1`.
    pub bound: T,
}

/// Energy of the normalized trial `e^{-psi} / I(e^{-psi})`.
pub fn trial_upper_bound<T: Scalar>(
    trial: &TrialSpec<T>,
    spec: &ProblemSpec<T>,
) -> Result<TrialBound<T>> {
    let g = trial.profile(spec.grid())?;
    let energy = energy_unchecked(&g, spec);
    if !energy.is_finite() {
        return Err(invalid("e^{-psi} has infinite discrete energy"));
    }
    let norm = luxemburg_unchecked(&g, spec.exponent())?;
    Ok(TrialBound {
        energy,
        norm,
        bound: energy / (norm * norm),
    })
}

/// `e^a * int_{|x| > R} e^{-p^inf psi(|x|)} dx` by quadrature.
pub fn rho_lower_bound<T: Scalar>(trial: &TrialSpec<T>, p_inf: T, grid: &Grid<T>) -> Result<T> {
    let psi = trial.sample_psi(grid)?;
    let w = grid.outside_ball_weights(trial.radius);
    let tail = sum((0..grid.len()).map(|i| w[i] * (-p_inf * psi[i]).exp()));
    Ok(trial.a.exp() * tail)
}

/// Problems with `p(x) = max(floor, min(p^inf, p^inf - a / psi(max(|x|, R))))`
/// and a fixed potential, indexed by `a`.
///
/// Inside the ball the exponent is frozen at its value on the sphere, so it is
/// continuous. Such exponents reach `p^inf` only like `1 / psi`, so the tail
/// proxy check of [`Exponent::new`] is bypassed; convergence holds by
/// construction whenever `psi -> infinity`.
#[derive(Debug, Clone)]
pub struct DipFamily<T> {
    pub potential: Potential<T>,
    pub p_inf: T,
    pub psi: Expr,
    pub radius: T,
    pub floor: T,
    /// First value of the geometric scan.
    pub a0: T,
    pub a_max: T,
}

impl<T: Scalar> DipFamily<T> {
    pub fn grid(&self) -> &Arc<Grid<T>> {
        self.potential.field().grid()
    }

    pub fn trial(&self, a: T) -> Result<TrialSpec<T>> {
        TrialSpec::new(self.psi.clone(), self.radius, a)
    }

    pub fn exponent(&self, a: T) -> Result<Exponent<T>> {
        if !(self.floor > T::of(2.0) && self.floor <= self.p_inf) {
            return Err(invalid("exponent floor must lie in (2, p_inf]"));
        }
        let trial = self.trial(a)?;
        let grid = self.grid().clone();
        let vals = (0..grid.len())
            .map(|i| {
                let s = trial.psi_at(grid.radius(i).max(self.radius))?;
                let p = if s > T::zero() {
                    (self.p_inf - a / s).min(self.p_inf)
                } else {
                    self.floor
                };
                Ok(p.max(self.floor))
            })
            .collect::<Result<Vec<T>>>()?;
        Exponent::new(Field::new(grid, vals)?, self.p_inf, T::infinity())
    }

    pub fn problem(&self, a: T) -> Result<ProblemSpec<T>> {
        ProblemSpec::new(self.exponent(a)?, self.potential.clone())
    }
}

#[derive(Debug, Clone)]
pub struct MinAReport<T> {
    /// Smallest strict `a` found, to about two significant digits.
    pub a: Option<T>,
    pub report: Option<CriterionReport<T>>,
    /// Every evaluated `a` with its strict flag, in evaluation order.
    pub evaluations: Vec<(T, bool)>,
    pub lambda1_inf: T,
}

/// Geometric scan `a0 * 2^k` up to `a_max` for the first strict criterion,
/// then bisection between the last non-strict and the first strict value.
pub fn find_min_a<T: Scalar>(family: &DipFamily<T>, opts: &SolveOptions<T>) -> Result<MinAReport<T>> {
    if !(family.a0 > T::zero() && family.a_max >= family.a0) {
        return Err(invalid("need 0 < a0 <= a_max"));
    }
    let limit = solve_limit_problem(
        family.p_inf,
        family.potential.v_inf(),
        family.grid().clone(),
        opts,
    )?;
    let mut evaluations = Vec::new();
    let mut eval = |a: T| -> Result<CriterionReport<T>> {
        let trials = [family.trial(a)?];
        let inputs = CriterionInputs {
            trials: &trials,
            limit: Some(&limit),
            ..CriterionInputs::default()
        };
        let r = check_criterion_with(&family.problem(a)?, opts, &inputs)?;
        evaluations.push((a, r.strict));
        Ok(r)
    };

    let mut lo: Option<T> = None;
    let mut a = family.a0;
    let mut found = None;
    while a <= family.a_max {
        let r = eval(a)?;
        if r.strict {
            found = Some((a, r));
            break;
        }
        lo = Some(a);
        a = a * T::of(2.0);
    }
    let Some((mut hi, mut best)) = found else {
        return Ok(MinAReport {
            a: None,
            report: None,
            evaluations,
            lambda1_inf: limit.lambda,
        });
    };
    if let Some(mut lo) = lo {
        while hi - lo > T::of(0.005) * hi {
            let mid = T::of(0.5) * (lo + hi);
            let r = eval(mid)?;
            if r.strict {
                hi = mid;
                best = r;
            } else {
                lo = mid;
            }
        }
    }
    Ok(MinAReport {
        a: Some(hi),
        report: Some(best),
        evaluations,
        lambda1_inf: limit.lambda,
    })
}
