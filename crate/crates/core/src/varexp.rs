//! Variable-exponent Lebesgue machinery: the modular, the modified Luxemburg
//! norm with the `1/p(x)` weight, and their constant-exponent limits.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::grid::{Field, Grid};
use crate::scalar::{sum, Scalar};

/// Default tolerance for the tail checks that stand in for the limits at infinity.
pub const DEFAULT_TAIL_TOL: f64 = 0.05;

/// Nodes with `|x| >= TAIL_FRACTION * R_dom` are checked against the limit values.
pub const TAIL_FRACTION: f64 = 0.9;

/// Critical Sobolev exponent `2N/(N-2)`; `None` stands for `+inf` (`N <= 2`).
pub fn critical_exponent<T: Scalar>(dim: usize) -> Option<T> {
    (dim >= 3).then(|| T::of(2.0 * dim as f64 / (dim as f64 - 2.0)))
}

fn below_critical<T: Scalar>(q: T, dim: usize) -> bool {
    critical_exponent::<T>(dim).is_none_or(|c| q < c)
}

fn tail_indices<T: Scalar>(grid: &Grid<T>) -> impl Iterator<Item = usize> + '_ {
    let cut = T::of(TAIL_FRACTION) * grid.truncation_radius();
    (0..grid.len()).filter(move |&i| grid.radius(i) >= cut)
}

/// Samples of `p(x)` with `p^-`, `p^+` and the limit `p^inf`.
#[derive(Debug, Clone)]
pub struct Exponent<T> {
    field: Field<T>,
    p_minus: T,
    p_plus: T,
    p_inf: T,
}

impl<T: Scalar> Exponent<T> {
    /// Validates `2 < p^- <= p^+ < 2*` and the tail proxy for `p -> p^inf`.
    ///
    /// `p^-` and `p^+` are taken over the samples together with `p^inf`, since
    /// the limit value belongs to the closure of the range of `p`.
    pub fn new(field: Field<T>, p_inf: T, tail_tol: T) -> Result<Self> {
        let dim = field.grid().dim();
        if !p_inf.is_finite() {
            return Err(invalid("p_inf must be finite"));
        }
        let (lo, hi) = field
            .values()
            .iter()
            .fold((p_inf, p_inf), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if !(lo > T::of(2.0)) {
            return Err(Error::Hypothesis(format!("p^- = {lo} must exceed 2")));
        }
        if !below_critical(hi, dim) {
            return Err(Error::Hypothesis(format!(
                "p^+ = {hi} must stay below the critical exponent in dimension {dim}"
            )));
        }
        if let Some(i) =
            tail_indices(field.grid()).find(|&i| (field.values()[i] - p_inf).abs() > tail_tol)
        {
            return Err(Error::Hypothesis(format!(
                "p = {} at |x| = {} is not within {tail_tol} of p_inf = {p_inf}",
                field.values()[i],
                field.grid().radius(i)
            )));
        }
        Ok(Exponent {
            field,
            p_minus: lo,
            p_plus: hi,
            p_inf,
        })
    }

    pub fn constant(grid: Arc<Grid<T>>, q: T) -> Result<Self> {
        Self::new(Field::constant(grid, q), q, T::zero())
    }

    pub fn field(&self) -> &Field<T> {
        &self.field
    }

    pub fn values(&self) -> &[T] {
        self.field.values()
    }

    pub fn p_minus(&self) -> T {
        self.p_minus
    }

    pub fn p_plus(&self) -> T {
        self.p_plus
    }

    pub fn p_inf(&self) -> T {
        self.p_inf
    }

    pub fn is_constant(&self) -> bool {
        self.p_minus == self.p_plus
    }
}

/// Samples of `V(x)` with its limit `V^inf > 0`.
#[derive(Debug, Clone)]
pub struct Potential<T> {
    field: Field<T>,
    v_inf: T,
}

impl<T: Scalar> Potential<T> {
    pub fn new(field: Field<T>, v_inf: T, tail_tol: T) -> Result<Self> {
        if !(v_inf > T::zero()) || !v_inf.is_finite() {
            return Err(Error::Hypothesis(format!("V_inf = {v_inf} must be positive")));
        }
        if let Some(i) =
            tail_indices(field.grid()).find(|&i| (field.values()[i] - v_inf).abs() > tail_tol)
        {
            return Err(Error::Hypothesis(format!(
                "V = {} at |x| = {} is not within {tail_tol} of V_inf = {v_inf}",
                field.values()[i],
                field.grid().radius(i)
            )));
        }
        Ok(Potential { field, v_inf })
    }

    pub fn constant(grid: Arc<Grid<T>>, v: T) -> Result<Self> {
        Self::new(Field::constant(grid, v), v, T::zero())
    }

    pub fn field(&self) -> &Field<T> {
        &self.field
    }

    pub fn values(&self) -> &[T] {
        self.field.values()
    }

    pub fn v_inf(&self) -> T {
        self.v_inf
    }

    pub fn inf(&self) -> T {
        self.values().iter().fold(T::infinity(), |m, &v| m.min(v))
    }
}

fn check<T: Scalar>(u: &Field<T>, p: &Exponent<T>) -> Result<()> {
    u.check_same_grid(p.field())
}

/// `rho(u) = sum_i w_i |u_i|^{p_i}`.
pub fn rho<T: Scalar>(u: &Field<T>, p: &Exponent<T>) -> Result<T> {
    check(u, p)?;
    Ok(rho_unchecked(u, p))
}

pub(crate) fn rho_unchecked<T: Scalar>(u: &Field<T>, p: &Exponent<T>) -> T {
    let w = u.grid().weights();
    sum((0..u.len()).map(|i| w[i] * u.values()[i].abs().powf(p.values()[i])))
}

/// `sum_i w_i |u_i / gamma|^{p_i} / p_i`.
pub fn weighted_modular<T: Scalar>(u: &Field<T>, p: &Exponent<T>, gamma: T) -> Result<T> {
    check(u, p)?;
    if !(gamma > T::zero()) {
        return Err(invalid("gamma must be positive"));
    }
    let w = u.grid().weights();
    Ok(sum((0..u.len()).map(|i| {
        let q = p.values()[i];
        w[i] * (u.values()[i].abs() / gamma).powf(q) / q
    })))
}

/// `int |u|^{p(x)-1} |v| dx`, the left side of the Young-type estimate.
pub fn cross_modular<T: Scalar>(u: &Field<T>, v: &Field<T>, p: &Exponent<T>) -> Result<T> {
    check(u, p)?;
    u.check_same_grid(v)?;
    let w = u.grid().weights();
    Ok(sum((0..u.len()).map(|i| {
        w[i] * u.values()[i].abs().powf(p.values()[i] - T::one()) * v.values()[i].abs()
    })))
}

/// Nonzero terms of the modular in log form, for repeated evaluation at many `gamma`.
struct LogModular<T> {
    /// `(w_i / p_i, p_i, ln |u_i|)`
    terms: Vec<(T, T, T)>,
}

impl<T: Scalar> LogModular<T> {
    fn new(u: &Field<T>, p: &Exponent<T>) -> Self {
        let w = u.grid().weights();
        let terms = (0..u.len())
            .filter(|&i| u.values()[i] != T::zero())
            .map(|i| {
                let q = p.values()[i];
                (w[i] / q, q, u.values()[i].abs().ln())
            })
            .collect();
        LogModular { terms }
    }

    /// Returns the modular `m` and `s = sum w |u/gamma|^p` at `gamma = e^t`,
    /// so that `dm/dt = -s`.
    fn eval(&self, t: T) -> (T, T) {
        let mut m = T::zero();
        let mut s = T::zero();
        for &(wq, q, a) in &self.terms {
            let e = (q * (a - t)).exp();
            m = m + wq * e;
            s = s + wq * q * e;
        }
        (m, s)
    }
}

/// The modified Luxemburg norm: the unique `gamma` with modular `1` at `u/gamma`.
///
/// The bracket comes from the modular/norm relation
/// `p^- min(g^{p^+}, g^{p^-}) <= rho <= p^+ max(g^{p^+}, g^{p^-})` and is widened
/// geometrically until it straddles the root. Inside the bracket the root of
/// `ln m(e^t)`, which is convex and decreasing in `t`, is found by Newton
/// steps with a bisection fallback; iteration stops at machine precision.
pub fn luxemburg_norm<T: Scalar>(u: &Field<T>, p: &Exponent<T>) -> Result<T> {
    check(u, p)?;
    luxemburg_unchecked(u, p)
}

pub(crate) fn luxemburg_unchecked<T: Scalar>(u: &Field<T>, p: &Exponent<T>) -> Result<T> {
    let lm = LogModular::new(u, p);
    if lm.terms.is_empty() {
        return Ok(T::zero());
    }
    let (pm, pp) = (p.p_minus(), p.p_plus());
    let r = rho_unchecked(u, p);
    let (lo, hi) = if r.is_finite() && r > T::zero() {
        let a = r / pp;
        let b = r / pm;
        (
            a.powf(pp.recip()).min(a.powf(pm.recip())),
            b.powf(pm.recip()).max(b.powf(pp.recip())),
        )
    } else {
        let m = u.max_abs();
        (m, m)
    };
    // log-space bracket; the relation is exact, the factor guards rounding
    let two = T::of(2.0);
    let (mut tlo, mut thi) = (lo.ln() - two.ln(), hi.ln() + two.ln());
    let phi = |t: T| -> (T, T) {
        let (m, s) = lm.eval(t);
        (m.ln(), s / m)
    };
    let mut doublings = 0usize;
    loop {
        let (f, _) = phi(tlo);
        if f >= T::zero() {
            break;
        }
        tlo = tlo - two.ln();
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NumericFailure(
                "norm bracket expansion exceeded 200 doublings".into(),
            ));
        }
    }
    loop {
        let (f, _) = phi(thi);
        if f <= T::zero() {
            break;
        }
        thi = thi + two.ln();
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NumericFailure(
                "norm bracket expansion exceeded 200 doublings".into(),
            ));
        }
    }
    let eps = T::epsilon();
    let mut t = thi;
    for _ in 0..200 {
        let (f, slope) = phi(t);
        if f == T::zero() {
            break;
        }
        if !f.is_finite() {
            t = tlo + (thi - tlo) / two;
            continue;
        }
        if f > T::zero() {
            tlo = t;
        } else {
            thi = t;
        }
        // phi' = -slope
        let mut next = t + f / slope;
        if !(next > tlo && next < thi) || !next.is_finite() {
            next = tlo + (thi - tlo) / two;
        }
        let step = (next - t).abs();
        t = next;
        let scale = two * eps * t.abs().max(T::one());
        if step <= scale || thi - tlo <= scale {
            break;
        }
    }
    Ok(t.exp())
}

/// Derived from the norm: `max(|u|^{p^- - 1}, |u|^{p^+ - 1})`.
pub fn sigma<T: Scalar>(u: &Field<T>, p: &Exponent<T>) -> Result<T> {
    Ok(sigma_of_norm(luxemburg_norm(u, p)?, p.p_minus(), p.p_plus()))
}

pub fn sigma_of_norm<T: Scalar>(norm: T, p_minus: T, p_plus: T) -> T {
    norm.powf(p_minus - T::one())
        .max(norm.powf(p_plus - T::one()))
}

/// `rho^inf(u) = sum_i w_i |u_i|^{p_inf}`.
pub fn rho_inf<T: Scalar>(u: &Field<T>, p_inf: T) -> T {
    let w = u.grid().weights();
    sum((0..u.len()).map(|i| w[i] * u.values()[i].abs().powf(p_inf)))
}

/// Constant-exponent norm with the `1/q` weight: `(rho^inf / q)^{1/q}`.
pub fn norm_inf<T: Scalar>(u: &Field<T>, p_inf: T) -> T {
    (rho_inf(u, p_inf) / p_inf).powf(p_inf.recip())
}
