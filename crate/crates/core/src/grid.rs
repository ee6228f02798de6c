//! Discretization of the truncated domain.
//!
//! Three layouts are supported: a uniform line `[-R, R]`, a radial grid of
//! concentric shells in `N` dimensions, and a uniform square `[-R, R]^2`.
//!
//! Every grid carries a quadrature weight per node and a list of edges with
//! coefficients such that the discrete Dirichlet integral is
//!
//! ```text
//! D(u) = sum_e c_e * ((u_j - u_i) / h)^2
//! ```
//!
//! The Laplacian is the weighted representer of `-D/2`, i.e.
//! `<lap u, v>_w = -sum_e c_e (u_j - u_i)(v_j - v_i) / h^2`, which makes it
//! exactly symmetric and keeps `J` and its gradient consistent. At interior
//! nodes the stencil is the usual second-order one; on radial grids it is the
//! finite-volume form of `u'' + (N-1)/r u'`.
//!
//! Boundary nodes (the outermost layer) are where the homogeneous Dirichlet
//! condition is imposed by the solver.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::scalar::{sum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridKind {
    Line1d,
    RadialNd,
    Cartesian2d,
}

impl GridKind {
    pub fn name(self) -> &'static str {
        match self {
            GridKind::Line1d => "line1d",
            GridKind::RadialNd => "radialNd",
            GridKind::Cartesian2d => "cartesian2d",
        }
    }
}

impl std::str::FromStr for GridKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "line1d" => Ok(GridKind::Line1d),
            "radialNd" | "radial" => Ok(GridKind::RadialNd),
            "cartesian2d" => Ok(GridKind::Cartesian2d),
            other => Err(invalid(format!("unknown grid kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Edge<T> {
    pub a: usize,
    pub b: usize,
    pub coef: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    dim: usize,
    kind: GridKind,
    truncation_radius: T,
    spacing: T,
    /// Nodes per axis (line, square) or number of shells (radial).
    axis_len: usize,
    /// Flat coordinates; one per node, two per node on the square.
    coords: Vec<T>,
    weights: Vec<T>,
    edges: Vec<Edge<T>>,
    boundary: Vec<bool>,
}

/// Surface area of the unit sphere in `R^n` (`2`, `2π`, `4π`).
pub fn unit_sphere_area<T: Scalar>(n: usize) -> T {
    match n {
        1 => T::of(2.0),
        2 => T::of(2.0) * T::PI(),
        3 => T::of(4.0) * T::PI(),
        _ => unreachable!("dimension checked at construction"),
    }
}

fn cells_for<T: Scalar>(r_dom: T, h: T) -> usize {
    let ratio = (r_dom / h).to_f64_lossy();
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        rounded as usize
    } else {
        ratio.ceil() as usize
    }
}

impl<T: Scalar> Grid<T> {
    /// Builds a uniform grid. When `R_dom / h` is not an integer the spacing is
    /// shrunk to `R_dom / ceil(R_dom / h)` so that the outer nodes sit on the
    /// truncation radius.
    pub fn build(dim: usize, kind: GridKind, r_dom: T, h: T) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return Err(invalid("grid spacing h must be positive"));
        }
        if !(r_dom > T::zero()) || !r_dom.is_finite() {
            return Err(invalid("truncation radius R_dom must be positive"));
        }
        // R_dom >= 10 h is advised for accuracy; two cells are the structural minimum
        if cells_for(r_dom, h) < 2 {
            return Err(invalid("truncation radius must span at least two cells"));
        }
        match (kind, dim) {
            (GridKind::Line1d, 1) => Ok(Self::line(r_dom, h)),
            (GridKind::RadialNd, 1..=3) => Ok(Self::radial(dim, r_dom, h)),
            (GridKind::Cartesian2d, 2) => Ok(Self::square(r_dom, h)),
            _ => Err(invalid(format!(
                "unsupported grid: dim = {dim} with kind {}",
                kind.name()
            ))),
        }
    }

    fn line_axis(r_dom: T, h: T) -> (usize, T, Vec<T>, Vec<T>) {
        let m = cells_for(r_dom, h);
        let h = r_dom / T::of_usize(m);
        let n = 2 * m + 1;
        let coords = (0..n)
            .map(|i| (T::of_usize(i) - T::of_usize(m)) * h)
            .collect();
        let mut weights = vec![h; n];
        weights[0] = h / T::of(2.0);
        weights[n - 1] = h / T::of(2.0);
        (n, h, coords, weights)
    }

    fn line(r_dom: T, h: T) -> Self {
        let (n, h, coords, weights) = Self::line_axis(r_dom, h);
        let edges = (0..n - 1)
            .map(|i| Edge {
                a: i,
                b: i + 1,
                coef: h,
            })
            .collect();
        let mut boundary = vec![false; n];
        boundary[0] = true;
        boundary[n - 1] = true;
        Grid {
            dim: 1,
            kind: GridKind::Line1d,
            truncation_radius: r_dom,
            spacing: h,
            axis_len: n,
            coords,
            weights,
            edges,
            boundary,
        }
    }

    fn radial(dim: usize, r_dom: T, h: T) -> Self {
        let m = cells_for(r_dom, h);
        let h = r_dom / T::of_usize(m);
        let area = unit_sphere_area::<T>(dim);
        let nd = T::of_usize(dim);
        let half = T::of(0.5);
        let ball = |r: T| area / nd * r.powi(dim as i32);
        let coords = (0..m).map(|i| (T::of_usize(i) + half) * h).collect();
        let weights = (0..m)
            .map(|i| ball(T::of_usize(i + 1) * h) - ball(T::of_usize(i) * h))
            .collect();
        let edges = (0..m - 1)
            .map(|i| {
                let r = T::of_usize(i + 1) * h;
                Edge {
                    a: i,
                    b: i + 1,
                    coef: area * r.powi(dim as i32 - 1) * h,
                }
            })
            .collect();
        let mut boundary = vec![false; m];
        boundary[m - 1] = true;
        Grid {
            dim,
            kind: GridKind::RadialNd,
            truncation_radius: r_dom,
            spacing: h,
            axis_len: m,
            coords,
            weights,
            edges,
            boundary,
        }
    }

    fn square(r_dom: T, h: T) -> Self {
        let (n, h, axis, w1) = Self::line_axis(r_dom, h);
        let mut coords = Vec::with_capacity(2 * n * n);
        let mut weights = Vec::with_capacity(n * n);
        let mut boundary = Vec::with_capacity(n * n);
        for iy in 0..n {
            for ix in 0..n {
                coords.push(axis[ix]);
                coords.push(axis[iy]);
                weights.push(w1[ix] * w1[iy]);
                boundary.push(ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1);
            }
        }
        let mut edges = Vec::with_capacity(2 * n * (n - 1));
        for iy in 0..n {
            for ix in 0..n {
                let i = iy * n + ix;
                if ix + 1 < n {
                    edges.push(Edge {
                        a: i,
                        b: i + 1,
                        coef: h * w1[iy],
                    });
                }
                if iy + 1 < n {
                    edges.push(Edge {
                        a: i,
                        b: i + n,
                        coef: h * w1[ix],
                    });
                }
            }
        }
        Grid {
            dim: 2,
            kind: GridKind::Cartesian2d,
            truncation_radius: r_dom,
            spacing: h,
            axis_len: n,
            coords,
            weights,
            edges,
            boundary,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn truncation_radius(&self) -> T {
        self.truncation_radius
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Nodes per axis for line and square grids; shell count for radial grids.
    pub fn axis_len(&self) -> usize {
        self.axis_len
    }

    /// Number of coordinates stored per node.
    pub fn coord_stride(&self) -> usize {
        match self.kind {
            GridKind::Cartesian2d => 2,
            _ => 1,
        }
    }

    pub fn node(&self, i: usize) -> &[T] {
        let s = self.coord_stride();
        &self.coords[i * s..(i + 1) * s]
    }

    /// Euclidean distance of node `i` from the origin.
    pub fn radius(&self, i: usize) -> T {
        match self.kind {
            GridKind::Line1d => self.coords[i].abs(),
            GridKind::RadialNd => self.coords[i],
            GridKind::Cartesian2d => self.coords[2 * i].hypot(self.coords[2 * i + 1]),
        }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    pub(crate) fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    /// Measure of the truncated domain in closed form.
    pub fn domain_measure(&self) -> T {
        let r = self.truncation_radius;
        match self.kind {
            GridKind::Line1d => T::of(2.0) * r,
            GridKind::Cartesian2d => T::of(4.0) * r * r,
            GridKind::RadialNd => {
                unit_sphere_area::<T>(self.dim) / T::of_usize(self.dim) * r.powi(self.dim as i32)
            }
        }
    }

    /// Quadrature of the sampled values `f`.
    pub fn integrate(&self, f: &[T]) -> T {
        debug_assert_eq!(f.len(), self.len());
        sum(self.weights.iter().zip(f).map(|(&w, &v)| w * v))
    }

    /// Part of each node's measure that lies outside the ball of radius `radius`.
    ///
    /// Radial grids use the exact shell measure; the line uses the exact cell
    /// overlap; the square uses the node indicator with half weight on ties.
    pub fn outside_ball_weights(&self, radius: T) -> Vec<T> {
        let h = self.spacing;
        let half = T::of(0.5);
        match self.kind {
            GridKind::RadialNd => {
                let area = unit_sphere_area::<T>(self.dim);
                let nd = T::of_usize(self.dim);
                let ball = |r: T| area / nd * r.powi(self.dim as i32);
                (0..self.len())
                    .map(|i| {
                        let lo = T::of_usize(i) * h;
                        let hi = lo + h;
                        let start = lo.max(radius);
                        if start >= hi {
                            T::zero()
                        } else {
                            ball(hi) - ball(start)
                        }
                    })
                    .collect()
            }
            GridKind::Line1d => (0..self.len())
                .map(|i| {
                    let x = self.coords[i];
                    let lo = (x - half * h).max(-self.truncation_radius);
                    let hi = (x + half * h).min(self.truncation_radius);
                    let inside = (hi.min(radius) - lo.max(-radius)).max(T::zero());
                    (hi - lo - inside).max(T::zero())
                })
                .collect(),
            GridKind::Cartesian2d => {
                let tie = T::of(1e-9) * h;
                (0..self.len())
                    .map(|i| {
                        let r = self.radius(i);
                        if (r - radius).abs() <= tie {
                            half * self.weights[i]
                        } else if r > radius {
                            self.weights[i]
                        } else {
                            T::zero()
                        }
                    })
                    .collect()
            }
        }
    }
}

/// A real function sampled on the nodes of a [`Grid`].
#[derive(Debug, Clone)]
pub struct Field<T> {
    grid: Arc<Grid<T>>,
    values: Vec<T>,
}

impl<T: Scalar> PartialEq for Field<T> {
    fn eq(&self, other: &Self) -> bool {
        same_grid(&self.grid, &other.grid) && self.values == other.values
    }
}

pub(crate) fn same_grid<T: Scalar>(a: &Arc<Grid<T>>, b: &Arc<Grid<T>>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl<T: Scalar> Field<T> {
    pub fn new(grid: Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "field has {} values but the grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite field value at node {i}")));
        }
        Ok(Field { grid, values })
    }

    /// Internal constructor for values known to be finite.
    pub(crate) fn from_vec(grid: Arc<Grid<T>>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field { grid, values }
    }

    pub fn zeros(grid: Arc<Grid<T>>) -> Self {
        let n = grid.len();
        Field::from_vec(grid, vec![T::zero(); n])
    }

    pub fn constant(grid: Arc<Grid<T>>, c: T) -> Self {
        let n = grid.len();
        Field::from_vec(grid, vec![c; n])
    }

    /// Samples `f` at each node; `f` receives the node coordinates.
    pub fn from_fn(grid: Arc<Grid<T>>, f: impl Fn(&[T]) -> T) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Field::new(grid, values)
    }

    /// Samples a function of the distance to the origin.
    pub fn from_radial(grid: Arc<Grid<T>>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.radius(i))).collect();
        Field::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == T::zero())
    }

    pub fn check_same_grid(&self, other: &Field<T>) -> Result<()> {
        if same_grid(&self.grid, &other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Field::from_vec(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: T, other: &Field<T>) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(self.axpy_unchecked(s, other))
    }

    pub(crate) fn axpy_unchecked(&self, s: T, other: &Field<T>) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a + s * b)
            .collect();
        Field::from_vec(self.grid.clone(), values)
    }

    /// Weighted inner product `sum_i w_i u_i v_i`.
    pub fn dot(&self, other: &Field<T>) -> Result<T> {
        self.check_same_grid(other)?;
        Ok(self.dot_unchecked(other))
    }

    pub(crate) fn dot_unchecked(&self, other: &Field<T>) -> T {
        sum(self
            .grid
            .weights
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(&w, (&a, &b))| w * a * b))
    }

    /// Weighted L2 norm.
    pub fn norm(&self) -> T {
        self.dot_unchecked(self).sqrt()
    }

    /// Quadrature `sum_i w_i u_i`.
    pub fn integral(&self) -> T {
        self.grid.integrate(&self.values)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Sets the values on boundary nodes to zero.
    pub fn with_zero_boundary(mut self) -> Self {
        for (v, &b) in self.values.iter_mut().zip(&self.grid.boundary) {
            if b {
                *v = T::zero();
            }
        }
        self
    }
}

/// Discrete Laplacian (weighted representer of minus half the Dirichlet integral).
pub fn laplacian<T: Scalar>(u: &Field<T>) -> Field<T> {
    let grid = u.grid();
    let h2 = grid.spacing * grid.spacing;
    let mut out = vec![T::zero(); grid.len()];
    for e in grid.edges() {
        let flux = e.coef * (u.values[e.b] - u.values[e.a]) / h2;
        out[e.a] = out[e.a] + flux;
        out[e.b] = out[e.b] - flux;
    }
    for (o, &w) in out.iter_mut().zip(&grid.weights) {
        *o = *o / w;
    }
    Field::from_vec(grid.clone(), out)
}

/// Pointwise squared gradient. Each edge's energy is split evenly between its
/// two end nodes, so in the interior this is the mean of the squared forward
/// and backward differences and at the boundary it is one-sided. Its
/// quadrature equals the Dirichlet integral exactly.
pub fn gradient_sq<T: Scalar>(u: &Field<T>) -> Field<T> {
    let grid = u.grid();
    let h = grid.spacing;
    let half = T::of(0.5);
    let mut out = vec![T::zero(); grid.len()];
    for e in grid.edges() {
        let d = (u.values[e.b] - u.values[e.a]) / h;
        let share = half * e.coef * d * d;
        out[e.a] = out[e.a] + share;
        out[e.b] = out[e.b] + share;
    }
    for (o, &w) in out.iter_mut().zip(&grid.weights) {
        *o = *o / w;
    }
    Field::from_vec(grid.clone(), out)
}

/// Discrete Dirichlet integral `sum_e c_e ((u_b - u_a)/h)^2`.
pub fn dirichlet_integral<T: Scalar>(u: &Field<T>) -> T {
    let grid = u.grid();
    let h = grid.spacing;
    sum(grid.edges().iter().map(|e| {
        let d = (u.values[e.b] - u.values[e.a]) / h;
        e.coef * d * d
    }))
}

/// Converts an offset in coordinates to whole cells, rejecting non-multiples of `h`.
pub fn offset_to_cells<T: Scalar>(grid: &Grid<T>, offset: &[T]) -> Result<Vec<isize>> {
    let stride = grid.coord_stride();
    if grid.kind() == GridKind::RadialNd {
        return Err(Error::UnsupportedOperation(
            "translation is not defined on radial grids".into(),
        ));
    }
    if offset.len() != stride {
        return Err(invalid(format!(
            "offset has {} components, grid needs {stride}",
            offset.len()
        )));
    }
    offset
        .iter()
        .map(|&y| {
            let k = (y / grid.spacing).to_f64_lossy();
            let r = k.round();
            if (k - r).abs() > 1e-9 * r.abs().max(1.0) {
                Err(invalid("offset must be an integer multiple of the spacing"))
            } else {
                Ok(r as isize)
            }
        })
        .collect()
}

/// Shifts the field by `y` (`u(. - y)`); values shifted in from outside are 0.
pub fn translate<T: Scalar>(u: &Field<T>, y: &[T]) -> Result<Field<T>> {
    let cells = offset_to_cells(u.grid(), y)?;
    translate_cells(u, &cells)
}

/// Shifts the field by whole cells per axis.
pub fn translate_cells<T: Scalar>(u: &Field<T>, cells: &[isize]) -> Result<Field<T>> {
    let grid = u.grid();
    let n = grid.axis_len() as isize;
    let fetch = |i: isize| -> Option<usize> { (0..n).contains(&i).then_some(i as usize) };
    let values = match grid.kind() {
        GridKind::RadialNd => {
            return Err(Error::UnsupportedOperation(
                "translation is not defined on radial grids".into(),
            ))
        }
        GridKind::Line1d => {
            let [k] = cells else {
                return Err(invalid("line translation needs one offset"));
            };
            (0..n)
                .map(|i| fetch(i - k).map_or(T::zero(), |j| u.values[j]))
                .collect()
        }
        GridKind::Cartesian2d => {
            let [kx, ky] = cells else {
                return Err(invalid("square translation needs two offsets"));
            };
            let mut out = Vec::with_capacity(grid.len());
            for iy in 0..n {
                for ix in 0..n {
                    let v = match (fetch(ix - kx), fetch(iy - ky)) {
                        (Some(jx), Some(jy)) => u.values[jy * n as usize + jx],
                        _ => T::zero(),
                    };
                    out.push(v);
                }
            }
            out
        }
    };
    Ok(Field::from_vec(grid.clone(), values))
}
