use super::{BinOp, Expr, Func, Var};
use crate::error::{Error, Result};

/// Values bound to the expression variables at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Bindings {
    pub r: Option<f64>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub z: Option<f64>,
}

impl Bindings {
    /// Only `r` bound (radial grids).
    pub fn radial(r: f64) -> Self {
        Bindings {
            r: Some(r),
            ..Default::default()
        }
    }

    /// Binds `x`, `y`, `z` from up to three coordinates, and `r` to their norm.
    pub fn cartesian(coords: &[f64]) -> Self {
        let r = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        Bindings {
            r: Some(r),
            x: coords.first().copied(),
            y: coords.get(1).copied(),
            z: coords.get(2).copied(),
        }
    }

    fn get(&self, v: Var) -> Result<f64> {
        let value = match v {
            Var::R => self.r,
            Var::X => self.x,
            Var::Y => self.y,
            Var::Z => self.z,
        };
        value.ok_or_else(|| Error::Evaluation(format!("variable `{}` is not bound", v.name())))
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation(format!("{what} produced a non-finite value")))
    }
}

impl Expr {
    /// Evaluates in IEEE double precision.
    pub fn eval(&self, at: &Bindings) -> Result<f64> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Pi => Ok(std::f64::consts::PI),
            Expr::Var(v) => at.get(*v),
            Expr::Neg(e) => Ok(-e.eval(at)?),
            Expr::Binary(op, a, b) => {
                let a = a.eval(at)?;
                let b = b.eval(at)?;
                match op {
                    BinOp::Add => finite(a + b, "addition"),
                    BinOp::Sub => finite(a - b, "subtraction"),
                    BinOp::Mul => finite(a * b, "multiplication"),
                    BinOp::Div => {
                        if b == 0.0 {
                            Err(Error::Evaluation("division by zero".into()))
                        } else {
                            finite(a / b, "division")
                        }
                    }
                    BinOp::Pow => finite(a.powf(b), "power"),
                }
            }
            Expr::Call(func, args) => {
                let t = args[0].eval(at)?;
                match func {
                    Func::Exp => finite(t.exp(), "exp"),
                    Func::Log => {
                        if t <= 0.0 {
                            Err(Error::Evaluation(format!("log of non-positive value {t}")))
                        } else {
                            Ok(t.ln())
                        }
                    }
                    Func::Abs => Ok(t.abs()),
                    Func::Sqrt => {
                        if t < 0.0 {
                            Err(Error::Evaluation(format!("sqrt of negative value {t}")))
                        } else {
                            Ok(t.sqrt())
                        }
                    }
                    Func::Sin => Ok(t.sin()),
                    Func::Cos => Ok(t.cos()),
                    Func::Tanh => Ok(t.tanh()),
                    Func::Sech => Ok(1.0 / t.cosh()),
                    Func::Min => Ok(t.min(args[1].eval(at)?)),
                    Func::Max => Ok(t.max(args[1].eval(at)?)),
                }
            }
        }
    }
}
