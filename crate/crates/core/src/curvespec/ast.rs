use std::fmt;

use crate::error::Result;
use crate::jet::{jet_apply, jet_div, jet_mul, Jet, Rational, UnaryFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn unary(self) -> UnaryFn {
        match self {
            Func::Sin => UnaryFn::Sin,
            Func::Cos => UnaryFn::Cos,
            Func::Tan => UnaryFn::Tan,
            Func::Exp => UnaryFn::Exp,
            Func::Log => UnaryFn::Log,
            Func::Sqrt => UnaryFn::Sqrt,
            Func::Sinh => UnaryFn::Sinh,
            Func::Cosh => UnaryFn::Cosh,
        }
    }
}

/// Expression tree over the single parameter `s`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Param,
    Const(Constant),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Exponent is always a literal rational.
    Pow(Box<Expr>, Rational),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    pub fn eval_jet(&self, s0: f64) -> Result<Jet> {
        self.eval_with(&Jet::variable(s0))
    }

    /// Evaluate with the parameter bound to an arbitrary jet.
    pub fn eval_with(&self, param: &Jet) -> Result<Jet> {
        Ok(match self {
            Expr::Num(c) => Jet::constant(*c),
            Expr::Param => *param,
            Expr::Const(c) => Jet::constant(c.value()),
            Expr::Neg(a) => -a.eval_with(param)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval_with(param)?;
                let b = b.eval_with(param)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => jet_mul(a, b),
                    BinOp::Div => jet_div(a, b)?,
                }
            }
            Expr::Pow(a, r) => jet_apply(UnaryFn::Pow(*r), a.eval_with(param)?)?,
            Expr::Call(f, a) => jet_apply(f.unary(), a.eval_with(param)?)?,
        })
    }

    pub fn eval(&self, s0: f64) -> Result<f64> {
        self.eval_jet(s0).map(|j| j.value())
    }

    pub fn uses_param(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Const(_) => false,
            Expr::Param => true,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.uses_param(),
            Expr::Binary(_, a, b) => a.uses_param() || b.uses_param(),
        }
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: Rational) -> fmt::Result {
    match (r.is_integer(), r.num < 0) {
        (true, false) => write!(f, "{}", r.num),
        (true, true) => write!(f, "({})", r.num),
        (false, _) => write!(f, "({}/{})", r.num, r.den),
    }
}

/// Fully parenthesized form; reparses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) if *c < 0.0 => write!(f, "(-{:?})", -c),
            Expr::Num(c) => write!(f, "{c:?}"),
            Expr::Param => f.write_str("s"),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::E) => f.write_str("e"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Pow(a, r) => {
                write!(f, "({a})^")?;
                write_rational(f, *r)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
