//! Shooting on `w(0)` for the radial limit equation
//!
//! ```text
//! -w'' - (N-1)/r w' + V w = w^{q-1},   w'(0) = 0,   w(r) -> 0,
//! ```
//!
//! independent of the grid machinery. Amplitudes that are too small turn back
//! up before reaching zero; amplitudes that are too large cross zero.

use crate::error::{Error, Result};
use crate::grid::unit_sphere_area;

const DR: f64 = 1e-3;

/// The decaying profile found by shooting, cut where it stops decaying.
#[derive(Debug, Clone)]
pub struct ShootingProfile {
    pub amplitude: f64,
    pub r: Vec<f64>,
    pub w: Vec<f64>,
    pub dw: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Outcome {
    Undershoot,
    Overshoot,
}

struct Ode {
    n: f64,
    q: f64,
    v: f64,
}

impl Ode {
    fn rhs(&self, r: f64, w: f64, dw: f64) -> (f64, f64) {
        let reaction = self.v * w - w.abs().powf(self.q - 2.0) * w;
        let ddw = if r == 0.0 {
            reaction / self.n
        } else {
            reaction - (self.n - 1.0) / r * dw
        };
        (dw, ddw)
    }

    fn step(&self, r: f64, w: f64, dw: f64) -> (f64, f64) {
        let h = DR;
        let (k1w, k1d) = self.rhs(r, w, dw);
        let (k2w, k2d) = self.rhs(r + h / 2.0, w + h / 2.0 * k1w, dw + h / 2.0 * k1d);
        let (k3w, k3d) = self.rhs(r + h / 2.0, w + h / 2.0 * k2w, dw + h / 2.0 * k2d);
        let (k4w, k4d) = self.rhs(r + h, w + h * k3w, dw + h * k3d);
        (
            w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w),
            dw + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d),
        )
    }

    fn r_max(&self) -> f64 {
        60.0 / self.v.sqrt()
    }

    /// Integrates from `w(0) = alpha` until the trajectory classifies itself.
    /// The returned arrays stop at the last sample before the event.
    fn shoot(&self, alpha: f64, keep: bool) -> (Outcome, ShootingProfile) {
        let mut prof = ShootingProfile {
            amplitude: alpha,
            r: vec![0.0],
            w: vec![alpha],
            dw: vec![0.0],
        };
        let (mut r, mut w, mut dw) = (0.0, alpha, 0.0);
        let steps = (self.r_max() / DR) as usize;
        for k in 1..=steps {
            let (nw, nd) = self.step(r, w, dw);
            r = k as f64 * DR;
            if nw < 0.0 {
                return (Outcome::Overshoot, prof);
            }
            if nd > 0.0 {
                return (Outcome::Undershoot, prof);
            }
            w = nw;
            dw = nd;
            if keep {
                prof.r.push(r);
                prof.w.push(w);
                prof.dw.push(dw);
            }
        }
        (Outcome::Undershoot, prof)
    }
}

fn validate(p_inf: f64, v_inf: f64, dim: usize) -> Result<Ode> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidParameter(format!("dim must be 1, 2 or 3, got {dim}")));
    }
    let crit = if dim >= 3 {
        2.0 * dim as f64 / (dim as f64 - 2.0)
    } else {
        f64::INFINITY
    };
    if !(p_inf > 2.0 && p_inf < crit) {
        return Err(Error::InvalidParameter(format!(
            "p_inf must lie in (2, {crit}), got {p_inf}"
        )));
    }
    if !(v_inf > 0.0 && v_inf.is_finite()) {
        return Err(Error::InvalidParameter(format!("V_inf must be positive, got {v_inf}")));
    }
    Ok(Ode {
        n: dim as f64,
        q: p_inf,
        v: v_inf,
    })
}

/// Decaying positive solution of the radial limit equation.
pub fn shooting_profile(p_inf: f64, v_inf: f64, dim: usize) -> Result<ShootingProfile> {
    let ode = validate(p_inf, v_inf, dim)?;
    let mut lo = v_inf.powf(1.0 / (p_inf - 2.0));
    let mut hi = 2.0 * lo;
    while ode.shoot(hi, false).0 == Outcome::Undershoot {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::OracleFailure("no overshooting amplitude found".into()));
        }
    }
    if ode.shoot(lo, false).0 == Outcome::Overshoot {
        return Err(Error::OracleFailure("lower amplitude already overshoots".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match ode.shoot(mid, false).0 {
            Outcome::Undershoot => lo = mid,
            Outcome::Overshoot => hi = mid,
        }
    }
    let (_, prof) = ode.shoot(lo, true);
    if prof.w.len() < 100 || *prof.w.last().unwrap() > 1e-4 * lo {
        return Err(Error::OracleFailure(format!(
            "shooting did not resolve the decaying branch (amplitude {lo})"
        )));
    }
    Ok(prof)
}

/// `lambda_1^inf` as `J^inf(w / I^inf(w))` for the shooting profile `w`.
pub fn shooting_oracle(p_inf: f64, v_inf: f64, dim: usize) -> Result<f64> {
    let prof = shooting_profile(p_inf, v_inf, dim)?;
    let omega = unit_sphere_area::<f64>(dim);
    let n = dim as f64;
    let mut energy = 0.0;
    let mut rho = 0.0;
    for k in 1..prof.r.len() {
        let integrand = |i: usize| {
            let m = prof.r[i].powf(n - 1.0);
            let w = prof.w[i];
            (
                m * (prof.dw[i] * prof.dw[i] + v_inf * w * w),
                m * w.powf(p_inf),
            )
        };
        let (ea, ra) = integrand(k - 1);
        let (eb, rb) = integrand(k);
        energy += 0.5 * DR * (ea + eb);
        rho += 0.5 * DR * (ra + rb);
    }
    energy *= omega;
    rho *= omega;
    let norm = (rho / p_inf).powf(1.0 / p_inf);
    Ok(energy / (norm * norm))
}
