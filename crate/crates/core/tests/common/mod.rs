#![allow(dead_code)]

use std::sync::Arc;

use nlground::{Exponent, Field, Grid, GridKind, Potential, ProblemSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn grid(dim: usize, kind: GridKind, r: f64, h: f64) -> Arc<Grid<f64>> {
    Arc::new(Grid::build(dim, kind, r, h).unwrap())
}

/// A sum of one to four Gaussian bumps with log-uniform overall scale,
/// pinned to zero on the boundary.
pub fn random_field(g: &Arc<Grid<f64>>, rng: &mut ChaCha8Rng) -> Field<f64> {
    let r = g.truncation_radius();
    let k = rng.gen_range(1..=4);
    let dim = g.coord_stride();
    let radial = g.kind() == GridKind::RadialNd;
    let bumps: Vec<(Vec<f64>, f64, f64)> = (0..k)
        .map(|_| {
            let c = (0..dim)
                .map(|_| if radial { 0.0 } else { rng.gen_range(-0.4 * r..0.4 * r) })
                .collect();
            (c, rng.gen_range(-1.0..1.0), rng.gen_range(0.3..2.0))
        })
        .collect();
    let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
    Field::from_fn(g.clone(), |x| {
        scale
            * bumps
                .iter()
                .map(|(c, a, s)| {
                    let d2: f64 = x.iter().zip(c).map(|(xi, ci)| (xi - ci).powi(2)).sum();
                    a * (-d2 / (s * s)).exp()
                })
                .sum::<f64>()
    })
    .unwrap()
    .with_zero_boundary()
}

/// Five exponent families on a grid of radius 5: constant, a dip, an
/// oscillating tail, a two-sided step (tail check off) and a bump above the limit.
pub fn exponent_families(g: &Arc<Grid<f64>>) -> Vec<(&'static str, Exponent<f64>)> {
    let make = |f: &dyn Fn(&[f64]) -> f64, p_inf: f64, tol: f64| {
        Exponent::new(Field::from_fn(g.clone(), f).unwrap(), p_inf, tol).unwrap()
    };
    let r = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    vec![
        ("constant", Exponent::constant(g.clone(), 3.5).unwrap()),
        ("dip", make(&|x| 4.0 - 1.5 * (-r(x) * r(x)).exp(), 4.0, 0.05)),
        ("oscillating", make(&|x| 3.0 + 0.8 * (2.0 * r(x)).sin() * (-r(x)).exp(), 3.0, 0.05)),
        ("step", make(&|x| 4.0 + (2.0 * x[0]).tanh(), 5.0, f64::INFINITY)),
        ("bump", make(&|x| 2.5 + 2.0 * (-r(x) * r(x)).exp(), 2.5, 0.05)),
    ]
}

pub fn autonomous(g: &Arc<Grid<f64>>, q: f64, v: f64) -> ProblemSpec<f64> {
    ProblemSpec::autonomous(g.clone(), q, v).unwrap()
}

pub fn spec_from(
    g: &Arc<Grid<f64>>,
    p: impl Fn(&[f64]) -> f64,
    p_inf: f64,
    v: impl Fn(&[f64]) -> f64,
    v_inf: f64,
) -> ProblemSpec<f64> {
    let p = Exponent::new(Field::from_fn(g.clone(), p).unwrap(), p_inf, 0.05).unwrap();
    let v = Potential::new(Field::from_fn(g.clone(), v).unwrap(), v_inf, 0.05).unwrap();
    ProblemSpec::new(p, v).unwrap()
}

/// Composite trapezoid rule on `[a, b]` with `n` panels.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = 0.5 * (f(a) + f(b));
    for i in 1..n {
        s += f(a + i as f64 * h);
    }
    s * h
}

/// Plain bisection for an increasing-to-decreasing sign change of `f` on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "no sign change");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A 1D profile given by closures: `lambda = J(w) / I(w)^2` with
/// `I(w) = (rho(w)/q)^{1/q}`, by fine trapezoid quadrature on `[-l, l]`.
pub fn profile_lambda_1d(
    w: impl Fn(f64) -> f64,
    dw: impl Fn(f64) -> f64,
    q: f64,
    v: f64,
    l: f64,
) -> f64 {
    let n = 600_000;
    let energy = trapezoid(|x| dw(x).powi(2) + v * w(x).powi(2), -l, l, n);
    let rho = trapezoid(|x| w(x).abs().powf(q), -l, l, n);
    let norm = (rho / q).powf(1.0 / q);
    energy / (norm * norm)
}

/// `sqrt(2c) sech(sqrt(c) x)` solves `-w'' + c w = w^3`.
pub fn soliton_q4(c: f64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let k = c.sqrt();
    let amp = (2.0 * c).sqrt();
    (
        move |x: f64| amp / (k * x).cosh(),
        move |x: f64| -amp * k * (k * x).tanh() / (k * x).cosh(),
    )
}

/// `(3/2) sech^2(x/2)` solves `-w'' + w = w^2`.
pub fn soliton_q3() -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    (
        |x: f64| 1.5 / (0.5 * x).cosh().powi(2),
        |x: f64| -1.5 * (0.5 * x).tanh() / (0.5 * x).cosh().powi(2),
    )
}

/// Largest residual of `-w'' + v w - w^{q-1}` by central differences on `[-l, l]`.
pub fn ode_defect(w: impl Fn(f64) -> f64, q: f64, v: f64, l: f64) -> f64 {
    let d = 1e-4;
    let mut worst: f64 = 0.0;
    let mut x = -l;
    while x <= l {
        let wpp = (w(x + d) - 2.0 * w(x) + w(x - d)) / (d * d);
        worst = worst.max((-wpp + v * w(x) - w(x).powf(q - 1.0)).abs());
        x += 0.01;
    }
    worst
}
