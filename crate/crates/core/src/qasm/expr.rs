//! Real-valued parameter expressions.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Real(f64),
    Int(u64),
    Pi,
    Param(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ExprError {
    #[error("unbound parameter '{0}'")]
    UnboundParameter(String),
    #[error("expression '{0}' does not evaluate to a finite real")]
    NonFiniteResult(String),
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Evaluates with `pi = 3.141592653589793`; `^` is right-associative at
    /// parse time. Division by zero, `ln` of a non-positive value and other
    /// non-finite intermediates are errors.
    pub fn eval(&self, bindings: &HashMap<String, f64>) -> Result<f64, ExprError> {
        let value = match self {
            Expr::Real(x) => *x,
            Expr::Int(n) => *n as f64,
            Expr::Pi => std::f64::consts::PI,
            Expr::Param(name) => *bindings
                .get(name)
                .ok_or_else(|| ExprError::UnboundParameter(name.clone()))?,
            Expr::Neg(e) => -e.eval(bindings)?,
            Expr::Binary(op, l, r) => {
                let (a, b) = (l.eval(bindings)?, r.eval(bindings)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b == 0.0 => return Err(ExprError::NonFiniteResult(self.to_string())),
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, arg) => {
                let x = arg.eval(bindings)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Exp => x.exp(),
                    Func::Ln if x <= 0.0 => return Err(ExprError::NonFiniteResult(self.to_string())),
                    Func::Ln => x.ln(),
                    Func::Sqrt => x.sqrt(),
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(ExprError::NonFiniteResult(self.to_string()))
        }
    }

    /// Identifiers referenced anywhere in the expression.
    pub fn params(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Param(name) => out.push(name),
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_params(out),
            Expr::Binary(_, l, r) => {
                l.collect_params(out);
                r.collect_params(out);
            }
            Expr::Real(_) | Expr::Int(_) | Expr::Pi => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let wrap = self.precedence() < min;
        if wrap {
            f.write_str("(")?;
        }
        match self {
            Expr::Real(x) => write!(f, "{x:?}")?,
            Expr::Int(n) => write!(f, "{n}")?,
            Expr::Pi => f.write_str("pi")?,
            Expr::Param(name) => f.write_str(name)?,
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write_prec(f, 3)?;
            }
            Expr::Binary(op, l, r) => {
                let p = self.precedence();
                let (lmin, rmin) = if *op == BinOp::Pow { (5, 3) } else { (p, p + 1) };
                l.write_prec(f, lmin)?;
                f.write_str(op.symbol())?;
                r.write_prec(f, rmin)?;
            }
            Expr::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.write_prec(f, 0)?;
                f.write_str(")")?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Prints with the minimum parentheses needed to re-parse the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}
