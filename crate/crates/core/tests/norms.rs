mod common;

use common::*;
use nlground::varexp::{
    cross_modular, luxemburg_norm, norm_inf, rho, rho_inf, sigma, sigma_of_norm, weighted_modular,
};
use nlground::{Error, Exponent, Field, GridKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn rho_examples() {
    let g = grid(1, GridKind::Line1d, 1.0, 0.01);
    let p = Exponent::new(
        Field::from_fn(g.clone(), |x| 3.0 + x[0] * x[0]).unwrap(),
        4.0,
        0.5,
    )
    .unwrap();
    assert!((rho(&Field::constant(g.clone(), 1.0), &p).unwrap() - 2.0).abs() < 1e-12);
    let half = grid(1, GridKind::Line1d, 0.5, 0.01);
    let p3 = Exponent::constant(half.clone(), 3.0).unwrap();
    assert!((rho(&Field::constant(half.clone(), 2.0), &p3).unwrap() - 8.0).abs() < 1e-12);
    assert_eq!(rho(&Field::zeros(half.clone()), &p3).unwrap(), 0.0);
    assert_eq!(rho(&Field::zeros(g), &p3), Err(Error::GridMismatch));
}

#[test]
fn rho_matches_refined_quadrature() {
    // smooth u decaying well inside the domain, sinusoidal p
    let u = |x: f64| (1.0 + 0.5 * (3.0 * x).sin()) * (-x * x).exp();
    let p = |x: f64| 3.0 + 0.5 * (2.0 * x).sin();
    let h = 0.05;
    let g = grid(1, GridKind::Line1d, 8.0, h);
    let pe = Exponent::new(Field::from_fn(g.clone(), |x| p(x[0])).unwrap(), 3.0, f64::INFINITY)
        .unwrap();
    let uf = Field::from_fn(g.clone(), |x| u(x[0])).unwrap();
    let ours = rho(&uf, &pe).unwrap();
    let n = (16.0 / (h / 8.0)) as usize;
    let oracle = trapezoid(|x| u(x).abs().powf(p(x)), -8.0, 8.0, n);
    assert!((ours - oracle).abs() <= 1e-8 * oracle, "{ours} vs {oracle}");
}

#[test]
fn weighted_modular_examples() {
    let g = grid(1, GridKind::Line1d, 0.5, 0.01);
    let p4 = Exponent::constant(g.clone(), 4.0).unwrap();
    let two = Field::constant(g.clone(), 2.0);
    assert!((weighted_modular(&two, &p4, 2.0).unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(weighted_modular(&Field::zeros(g.clone()), &p4, 0.3).unwrap(), 0.0);
    let a = weighted_modular(&two, &p4, 1.0).unwrap();
    let b = weighted_modular(&two, &p4, 1.1).unwrap();
    assert!(a > b);
    assert!(weighted_modular(&two, &p4, 0.0).is_err());
}

#[test]
fn luxemburg_examples() {
    let g = grid(1, GridKind::Line1d, 0.5, 0.01);
    let p4 = Exponent::constant(g.clone(), 4.0).unwrap();
    let n = luxemburg_norm(&Field::constant(g.clone(), 2.0), &p4).unwrap();
    assert!((n - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(luxemburg_norm(&Field::zeros(g), &p4).unwrap(), 0.0);
}

#[test]
fn two_zone_norm_matches_scalar_bisection() {
    // p = 3 on [-1, 0), p = 5 on [0, 1]; u = 1.
    // The modular per unit length is h-weighted; the node at 0 carries p = 5.
    let h = 0.01;
    let g = grid(1, GridKind::Line1d, 1.0, h);
    let p = Exponent::new(
        Field::from_fn(g.clone(), |x| if x[0] < 0.0 { 3.0 } else { 5.0 }).unwrap(),
        5.0,
        f64::INFINITY,
    )
    .unwrap();
    let ours = luxemburg_norm(&Field::constant(g.clone(), 1.0), &p).unwrap();
    // trapezoid measure of each zone: left nodes -1..-h, right nodes 0..1
    let left = 1.0 - 0.5 * h;
    let right = 1.0 + 0.5 * h;
    let f = |gamma: f64| left * gamma.powf(-3.0) / 3.0 + right * gamma.powf(-5.0) / 5.0 - 1.0;
    let oracle = bisect(f, 0.1, 10.0, 1e-14);
    assert!((ours - oracle).abs() < 1e-12, "{ours} vs {oracle}");
    // and the continuum two-zone value to quadrature accuracy
    let cont = bisect(|g| g.powf(-3.0) / 3.0 + g.powf(-5.0) / 5.0 - 1.0, 0.1, 10.0, 1e-14);
    assert!((ours - cont).abs() < 1e-3);
}

#[test]
fn sigma_examples() {
    assert_eq!(sigma_of_norm(1.0, 3.0, 5.0), 1.0);
    assert_eq!(sigma_of_norm(2.0, 3.0, 5.0), 16.0);
    assert_eq!(sigma_of_norm(0.5, 3.0, 5.0), 0.25);
    let g = grid(1, GridKind::Line1d, 0.5, 0.01);
    let p4 = Exponent::constant(g.clone(), 4.0).unwrap();
    let u = Field::constant(g, 2.0);
    let s = sigma(&u, &p4).unwrap();
    assert!((s - 2f64.sqrt().powi(3)).abs() < 1e-12);
}

#[test]
fn limit_quantities() {
    let g = grid(1, GridKind::Line1d, 1.0, 0.01);
    let one = Field::constant(g.clone(), 1.0);
    assert!((rho_inf(&one, 4.0) - 2.0).abs() < 1e-12);
    assert!((norm_inf(&one, 4.0) - 0.5f64.powf(0.25)).abs() < 1e-12);
    let zero = Field::zeros(g.clone());
    assert_eq!((rho_inf(&zero, 4.0), norm_inf(&zero, 4.0)), (0.0, 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = Exponent::constant(g.clone(), 3.3).unwrap();
    for _ in 0..20 {
        let u = random_field(&g, &mut rng);
        let a = luxemburg_norm(&u, &p).unwrap();
        let b = norm_inf(&u, 3.3);
        assert!((a - b).abs() <= 1e-10 * b);
    }
}

#[test]
fn homogeneity() {
    let g = grid(2, GridKind::RadialNd, 5.0, 0.05);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (_, p) in exponent_families(&g) {
        let u = random_field(&g, &mut rng);
        let base = luxemburg_norm(&u, &p).unwrap();
        for t in [0.1, 1.0, 7.3] {
            let scaled = luxemburg_norm(&u.scale(t), &p).unwrap();
            assert!((scaled - t * base).abs() <= 1e-10 * t * base);
        }
    }
}

#[test]
fn norm_relations_on_random_fields() {
    for (dim, kind) in [(1, GridKind::Line1d), (3, GridKind::RadialNd), (2, GridKind::Cartesian2d)] {
        let h = if kind == GridKind::Cartesian2d { 0.2 } else { 0.05 };
        let g = grid(dim, kind, 5.0, h);
        let mut rng = ChaCha8Rng::seed_from_u64(dim as u64);
        for (name, p) in exponent_families(&g) {
            let (lo, hi) = (p.p_minus(), p.p_plus());
            for _ in 0..34 {
                let u = random_field(&g, &mut rng);
                let v = random_field(&g, &mut rng);
                let n = luxemburg_norm(&u, &p).unwrap();
                let r = rho(&u, &p).unwrap();
                let lower = lo * n.powf(hi).min(n.powf(lo));
                let upper = hi * n.powf(hi).max(n.powf(lo));
                assert!(lower <= r * (1.0 + 1e-9), "{name}: modular below the norm powers");
                assert!(r <= upper * (1.0 + 1e-9), "{name}: modular above the norm powers");
                let one = weighted_modular(&u, &p, n).unwrap();
                assert!((one - 1.0).abs() <= 1e-10, "{name}: modular at the norm {one}");
                let nv = luxemburg_norm(&v, &p).unwrap();
                let lhs = cross_modular(&u, &v, &p).unwrap();
                let rhs = hi * sigma_of_norm(n, lo, hi) * nv;
                assert!(lhs <= rhs * (1.0 + 1e-9), "{name}: cross modular");
                let diff = u.axpy(-1.0, &v).unwrap();
                let lhs = (r - rho(&v, &p).unwrap()).abs();
                let rhs = hi * hi
                    * (sigma_of_norm(n, lo, hi) + sigma_of_norm(nv, lo, hi))
                    * luxemburg_norm(&diff, &p).unwrap();
                assert!(lhs <= rhs * (1.0 + 1e-9), "{name}: modular difference");
            }
        }
    }
}

#[test]
fn f32_matches_f64_to_single_precision() {
    let g32 = std::sync::Arc::new(nlground::Grid::<f32>::build(1, GridKind::Line1d, 5.0, 0.05).unwrap());
    let g64 = grid(1, GridKind::Line1d, 5.0, 0.05);
    let u32f = Field::from_fn(g32.clone(), |x| (-x[0] * x[0]).exp()).unwrap();
    let u64f = Field::from_fn(g64.clone(), |x| (-x[0] * x[0]).exp()).unwrap();
    let a = luxemburg_norm(&u32f, &Exponent::constant(g32, 3.0f32).unwrap()).unwrap();
    let b = luxemburg_norm(&u64f, &Exponent::constant(g64, 3.0).unwrap()).unwrap();
    assert!(((a as f64) - b).abs() < 1e-5 * b);
}
