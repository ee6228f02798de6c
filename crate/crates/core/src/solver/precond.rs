//! Inverse of the shifted operator `-lap + c` on the free (non-boundary) nodes,
//! used as a Sobolev preconditioner for the descent direction.

use crate::grid::{Field, GridKind};
use crate::scalar::Scalar;

pub(crate) enum Preconditioner<T> {
    /// Path graphs (line and radial grids): symmetric tridiagonal solve.
    Tridiagonal {
        diag: Vec<T>,
        /// `off[i]` couples nodes `i` and `i + 1`.
        off: Vec<T>,
        free: Vec<bool>,
    },
    /// Square grids: Jacobi-preconditioned conjugate gradients.
    Cg {
        diag: Vec<T>,
        shift_w: Vec<T>,
        free: Vec<bool>,
        max_iter: usize,
        rtol: T,
    },
}

impl<T: Scalar> Preconditioner<T> {
    pub fn new(template: &Field<T>, shift: T) -> Self {
        let grid = template.grid();
        let n = grid.len();
        let h2 = grid.spacing() * grid.spacing();
        let free: Vec<bool> = grid.boundary_mask().iter().map(|b| !b).collect();
        let shift_w: Vec<T> = grid.weights().iter().map(|&w| shift * w).collect();
        let mut diag = shift_w.clone();
        for e in grid.edges() {
            let k = e.coef / h2;
            diag[e.a] = diag[e.a] + k;
            diag[e.b] = diag[e.b] + k;
        }
        match grid.kind() {
            GridKind::Line1d | GridKind::RadialNd => {
                let mut off = vec![T::zero(); n.saturating_sub(1)];
                for e in grid.edges() {
                    debug_assert_eq!(e.b, e.a + 1);
                    if free[e.a] && free[e.b] {
                        off[e.a] = -e.coef / h2;
                    }
                }
                Preconditioner::Tridiagonal { diag, off, free }
            }
            GridKind::Cartesian2d => Preconditioner::Cg {
                diag,
                shift_w,
                free,
                max_iter: 400,
                rtol: T::of(1e-8),
            },
        }
    }

    /// Solves `(-lap + c) d = g` for the representer `d`, with `d = 0` on the boundary.
    pub fn apply(&self, g: &Field<T>) -> Field<T> {
        let grid = g.grid();
        let w = grid.weights();
        let rhs: Vec<T> = (0..g.len()).map(|i| w[i] * g.values()[i]).collect();
        let d = match self {
            Preconditioner::Tridiagonal { diag, off, free } => thomas(diag, off, free, rhs),
            Preconditioner::Cg {
                diag,
                shift_w,
                free,
                max_iter,
                rtol,
            } => cg(g, diag, shift_w, free, rhs, *max_iter, *rtol),
        };
        Field::from_vec(grid.clone(), d)
    }
}

fn thomas<T: Scalar>(diag: &[T], off: &[T], free: &[bool], mut rhs: Vec<T>) -> Vec<T> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut b: Vec<T> = diag.to_vec();
    for i in 0..n {
        if !free[i] {
            b[i] = T::one();
            rhs[i] = T::zero();
        }
    }
    // forward sweep
    for i in 0..n {
        let lower = if i > 0 { off[i - 1] } else { T::zero() };
        let denom = if i > 0 { b[i] - lower * c[i - 1] } else { b[i] };
        if i + 1 < n {
            c[i] = off[i] / denom;
        }
        rhs[i] = if i > 0 {
            (rhs[i] - lower * rhs[i - 1]) / denom
        } else {
            rhs[i] / denom
        };
    }
    for i in (0..n.saturating_sub(1)).rev() {
        rhs[i] = rhs[i] - c[i] * rhs[i + 1];
    }
    rhs
}

fn cg<T: Scalar>(
    template: &Field<T>,
    diag: &[T],
    shift_w: &[T],
    free: &[bool],
    mut b: Vec<T>,
    max_iter: usize,
    rtol: T,
) -> Vec<T> {
    let grid = template.grid();
    let n = b.len();
    let h2 = grid.spacing() * grid.spacing();
    let apply = |x: &[T], out: &mut [T]| {
        for i in 0..n {
            out[i] = shift_w[i] * x[i];
        }
        for e in grid.edges() {
            let k = e.coef / h2 * (x[e.a] - x[e.b]);
            out[e.a] = out[e.a] + k;
            out[e.b] = out[e.b] - k;
        }
        for i in 0..n {
            if !free[i] {
                out[i] = T::zero();
            }
        }
    };
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y);

    for i in 0..n {
        if !free[i] {
            b[i] = T::zero();
        }
    }
    let mut x = vec![T::zero(); n];
    let bnorm = dot(&b, &b).sqrt();
    if bnorm == T::zero() {
        return x;
    }
    let mut r = b;
    let mut z: Vec<T> = (0..n).map(|i| r[i] / diag[i]).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![T::zero(); n];
    for _ in 0..max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > T::zero()) {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] = x[i] + alpha * p[i];
            r[i] = r[i] - alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= rtol * bnorm {
            break;
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    x
}
