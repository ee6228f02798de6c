//! Reflection symmetry of fields on the square grid.
//!
//! In the plane the axial average around a line `L` through 0 is the
//! symmetrization `(w + w o R_L) / 2`, with `R_L` the reflection across `L`.
//! Reflections across the axes and diagonals permute the nodes exactly; other
//! lines use bicubic interpolation, which is accurate to the interpolation
//! error of `w` (about `h^3` for smooth fields).

use crate::error::{invalid, Error, Result};
use crate::grid::{Field, GridKind};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisDefect<T> {
    /// Unit direction of the line.
    pub axis: [T; 2],
    /// `|w - w_sym| / |w|` in the weighted `L^2` norm, clamped to `[0, 1]`.
    pub defect: T,
}

fn check<T: Scalar>(w: &Field<T>) -> Result<()> {
    if w.grid().kind() != GridKind::Cartesian2d {
        return Err(Error::UnsupportedOperation(
            "symmetry defects are computed on cartesian2d grids".into(),
        ));
    }
    if w.is_zero() {
        return Err(invalid("symmetry defect of the zero field"));
    }
    Ok(())
}

/// Index of the symmetry of the square matching the line at `angle`, if any.
fn lattice_reflection<T: Scalar>(angle: T) -> Option<usize> {
    let quarter = T::FRAC_PI_4();
    let k = (angle / quarter).round();
    if (angle - k * quarter).abs() > T::of(1e-12) {
        return None;
    }
    Some(k.to_f64_lossy().rem_euclid(4.0) as usize)
}

fn cubic_weights<T: Scalar>(t: T) -> [T; 4] {
    // Catmull-Rom (Keys, a = -1/2)
    let half = T::of(0.5);
    let t2 = t * t;
    let t3 = t2 * t;
    [
        half * (-t3 + T::of(2.0) * t2 - t),
        half * (T::of(3.0) * t3 - T::of(5.0) * t2 + T::of(2.0)),
        half * (-T::of(3.0) * t3 + T::of(4.0) * t2 + t),
        half * (t3 - t2),
    ]
}

fn interpolate<T: Scalar>(w: &Field<T>, x: T, y: T) -> T {
    let grid = w.grid();
    let n = grid.axis_len() as isize;
    let h = grid.spacing();
    let r = grid.truncation_radius();
    let fx = (x + r) / h;
    let fy = (y + r) / h;
    let ix = fx.floor();
    let iy = fy.floor();
    let wx = cubic_weights(fx - ix);
    let wy = cubic_weights(fy - iy);
    let (ix, iy) = (ix.to_f64_lossy() as isize, iy.to_f64_lossy() as isize);
    let vals = w.values();
    let mut acc = T::zero();
    for (dy, &cy) in wy.iter().enumerate() {
        let jy = iy - 1 + dy as isize;
        if !(0..n).contains(&jy) {
            continue;
        }
        for (dx, &cx) in wx.iter().enumerate() {
            let jx = ix - 1 + dx as isize;
            if (0..n).contains(&jx) {
                acc = acc + cy * cx * vals[(jy * n + jx) as usize];
            }
        }
    }
    acc
}

fn reflected<T: Scalar>(w: &Field<T>, angle: T) -> Vec<T> {
    let grid = w.grid();
    let n = grid.axis_len();
    let vals = w.values();
    if let Some(k) = lattice_reflection(angle) {
        let flip = |i: usize| n - 1 - i;
        return (0..grid.len())
            .map(|idx| {
                let (ix, iy) = (idx % n, idx / n);
                let (jx, jy) = match k {
                    0 => (ix, flip(iy)),
                    1 => (iy, ix),
                    2 => (flip(ix), iy),
                    _ => (flip(iy), flip(ix)),
                };
                vals[jy * n + jx]
            })
            .collect();
    }
    let (s, c) = angle.sin_cos();
    let two = T::of(2.0);
    (0..grid.len())
        .map(|i| {
            let p = grid.node(i);
            let d = p[0] * c + p[1] * s;
            interpolate(w, two * d * c - p[0], two * d * s - p[1])
        })
        .collect()
}

fn defect_at<T: Scalar>(w: &Field<T>, angle: T) -> T {
    let refl = reflected(w, angle);
    let wt = w.grid().weights();
    let mut diff = T::zero();
    for i in 0..w.len() {
        let d = w.values()[i] - refl[i];
        diff = diff + wt[i] * d * d;
    }
    (T::of(0.5) * diff.sqrt() / w.norm()).min(T::one())
}

/// Defect for each candidate axis; returns the best one.
pub fn axial_symmetry_defect<T: Scalar>(w: &Field<T>, axes: &[[T; 2]]) -> Result<AxisDefect<T>> {
    check(w)?;
    let mut best: Option<AxisDefect<T>> = None;
    for a in axes {
        let len = a[0].hypot(a[1]);
        if !(len > T::zero() && len.is_finite()) {
            return Err(invalid("axis directions must be non-zero"));
        }
        let axis = [a[0] / len, a[1] / len];
        let defect = defect_at(w, axis[1].atan2(axis[0]));
        if best.is_none_or(|b| defect < b.defect) {
            best = Some(AxisDefect { axis, defect });
        }
    }
    best.ok_or_else(|| invalid("no candidate axes given"))
}

/// Scans 64 directions, refines the best by golden-section search, and keeps
/// the exact lattice reflections in the comparison.
pub fn search_symmetry_axis<T: Scalar>(w: &Field<T>) -> Result<AxisDefect<T>> {
    check(w)?;
    let step = T::PI() / T::of(64.0);
    let mut best_angle = T::zero();
    let mut best = defect_at(w, T::zero());
    for k in 1..64 {
        let a = step * T::of_usize(k);
        let d = defect_at(w, a);
        if d < best {
            best = d;
            best_angle = a;
        }
    }
    let g = T::of(0.5) * (T::of(5.0).sqrt() - T::one());
    let (mut lo, mut hi) = (best_angle - step, best_angle + step);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (defect_at(w, x1), defect_at(w, x2));
    for _ in 0..60 {
        if hi - lo < T::of(1e-10) {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = defect_at(w, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = defect_at(w, x2);
        }
    }
    let (a, d) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    if d < best {
        best = d;
        best_angle = a;
    }
    Ok(AxisDefect {
        axis: [best_angle.cos(), best_angle.sin()],
        defect: best,
    })
}
