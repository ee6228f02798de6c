//! Ground states of nonlinear Schrödinger-type problems with a variable
//! exponent constraint,
//!
//! ```text
//! minimize J(u) = int |grad u|^2 + V u^2   subject to   I(u) = 1,
//! ```
//!
//! where `I` is the Luxemburg norm of `L^{p(x)}` built from the modular
//! `int |u|^{p(x)} / p(x)`. Everything is discretized on a [`Grid`] and generic
//! over the floating point type; the `*64` aliases fix `f64`.

pub mod analysis;
pub mod energy;
pub mod error;
pub mod exprlang;
pub mod grid;
mod scalar;
pub mod solver;
pub mod varexp;

pub use energy::ProblemSpec;
pub use error::{Error, Result};
pub use grid::{Field, Grid, GridKind};
pub use scalar::Scalar;
pub use solver::{GroundState, InitProfile, SolveOptions};
pub use varexp::{Exponent, Potential};

pub type Grid64 = Grid<f64>;
pub type Field64 = Field<f64>;
pub type Exponent64 = Exponent<f64>;
pub type Potential64 = Potential<f64>;
pub type ProblemSpec64 = ProblemSpec<f64>;
pub type SolveOptions64 = SolveOptions<f64>;
pub type GroundState64 = GroundState<f64>;

pub type Grid32 = Grid<f32>;
pub type Field32 = Field<f32>;
