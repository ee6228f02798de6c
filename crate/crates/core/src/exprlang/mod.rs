//! A small arithmetic language for user-supplied `V(x)`, `p(x)` and `psi(r)`.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          // right associative
//! atom    := number | 'pi' | var | func '(' sum (',' sum)* ')' | '(' sum ')'
//! ```
//!
//! Variables are `r`, `x`, `y`, `z`; `r` is the Euclidean norm of whatever
//! coordinates are bound.

mod eval;
mod parse;

pub use eval::Bindings;
pub use parse::parse;

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::grid::{Field, Grid, GridKind};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    R,
    X,
    Y,
    Z,
}

impl Var {
    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "r" => Var::R,
            "x" => Var::X,
            "y" => Var::Y,
            "z" => Var::Z,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Var::R => "r",
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Abs,
    Sqrt,
    Sin,
    Cos,
    Tanh,
    Sech,
    Min,
    Max,
}

impl Func {
    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tanh" => Func::Tanh,
            "sech" => Func::Sech,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tanh => "tanh",
            Func::Sech => "sech",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    /// True when the expression mentions a variable other than `r`.
    pub fn uses_cartesian(&self) -> bool {
        match self {
            Expr::Var(v) => *v != Var::R,
            Expr::Num(_) | Expr::Pi => false,
            Expr::Neg(e) => e.uses_cartesian(),
            Expr::Binary(_, a, b) => a.uses_cartesian() || b.uses_cartesian(),
            Expr::Call(_, args) => args.iter().any(Expr::uses_cartesian),
        }
    }
}

/// Fully parenthesised form; parsing it back yields the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Samples `expr` at every grid node. On radial grids only `r` is bound.
pub fn sample<T: Scalar>(expr: &Expr, grid: &Arc<Grid<T>>) -> Result<Field<T>> {
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let at = match grid.kind() {
            GridKind::RadialNd => Bindings::radial(grid.radius(i).to_f64_lossy()),
            _ => {
                let c: Vec<f64> = grid.node(i).iter().map(|v| v.to_f64_lossy()).collect();
                Bindings::cartesian(&c)
            }
        };
        values.push(T::of(expr.eval(&at)?));
    }
    Field::new(grid.clone(), values)
}
