//! Scalar expressions over chart coordinates.
//!
//! Expressions are parsed once ([`parse`]), stay immutable, and are evaluated
//! pointwise with exact first and second derivatives ([`Jet2`]). There is no
//! finite differencing anywhere in here; derivatives come from jet arithmetic
//! (evaluation) and from [`Expr::derivative`] (AST construction).

mod jet;
mod parse;

pub use jet::{eval_jet2, eval_value, Jet2};
pub use parse::parse;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Built-in unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }
}

/// Binary operators. `Pow` is right-associative, the rest left-associative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Abstract syntax tree of a scalar function of chart coordinates.
///
/// Variables are stored by name and resolved against the chart's ordered
/// coordinate list at evaluation time, which makes lifting an expression to a
/// product chart a no-op.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Const(value)
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn one() -> Expr {
        Expr::Const(1.0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 1.0)
    }

    pub fn pow(self, rhs: Expr) -> Expr {
        Expr::Bin(BinOp::Pow, Box::new(self), Box::new(rhs))
    }

    pub fn powi(self, exponent: i32) -> Expr {
        self.pow(Expr::Const(exponent as f64))
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Box::new(arg))
    }

    /// Scale by a constant factor.
    pub fn scale(self, factor: f64) -> Expr {
        if factor == 0.0 {
            Expr::zero()
        } else if factor == 1.0 {
            self
        } else {
            Expr::Const(factor).mul(self)
        }
    }

    /// Names of all variables referenced by this expression.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(name) => {
                if !out.iter().any(|n| n == name) {
                    out.push(name.clone());
                }
            }
            Expr::Neg(inner) => inner.collect_variables(out),
            Expr::Bin(_, lhs, rhs) => {
                lhs.collect_variables(out);
                rhs.collect_variables(out);
            }
            Expr::Call(_, arg) => arg.collect_variables(out),
        }
    }

    /// Exact partial derivative with respect to the named variable.
    ///
    /// `u^v` with non-constant exponent differentiates through
    /// `u^v (v' log u + v u'/u)`; everything else is the plain chain rule.
    pub fn derivative(&self, var: &str) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(name) => {
                if name == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Neg(inner) => inner.derivative(var).neg(),
            Expr::Bin(op, lhs, rhs) => {
                let dl = lhs.derivative(var);
                let dr = rhs.derivative(var);
                match op {
                    BinOp::Add => dl.add(dr),
                    BinOp::Sub => dl.sub(dr),
                    BinOp::Mul => dl.mul((**rhs).clone()).add((**lhs).clone().mul(dr)),
                    BinOp::Div => dl
                        .mul((**rhs).clone())
                        .sub((**lhs).clone().mul(dr))
                        .div((**rhs).clone().powi(2)),
                    BinOp::Pow => match &**rhs {
                        Expr::Const(c) => {
                            // d(u^c) = c u^(c-1) u'
                            let power = (**lhs).clone().pow(Expr::Const(c - 1.0));
                            Expr::Const(*c).mul(power).mul(dl)
                        }
                        _ => {
                            // d(u^v) = u^v (v' log u + v u'/u)
                            let u = (**lhs).clone();
                            let v = (**rhs).clone();
                            let bracket = dr
                                .mul(Expr::call(Func::Log, u.clone()))
                                .add(v.mul(dl).div(u.clone()));
                            self.clone().mul(bracket)
                        }
                    },
                }
            }
            Expr::Call(func, arg) => {
                let da = arg.derivative(var);
                let outer = match func {
                    // d sqrt(u) = u' / (2 sqrt(u))
                    Func::Sqrt => {
                        return da.div(Expr::Const(2.0).mul(self.clone()));
                    }
                    Func::Exp => self.clone(),
                    Func::Log => {
                        return da.div((**arg).clone());
                    }
                    Func::Sin => Expr::call(Func::Cos, (**arg).clone()),
                    Func::Cos => Expr::call(Func::Sin, (**arg).clone()).neg(),
                    Func::Sinh => Expr::call(Func::Cosh, (**arg).clone()),
                    Func::Cosh => Expr::call(Func::Sinh, (**arg).clone()),
                    // d tanh(u) = (1 - tanh(u)^2) u'
                    Func::Tanh => Expr::one().sub(self.clone().powi(2)),
                };
                outer.mul(da)
            }
        }
    }

    /// Substitute expressions for variables. Variables without a replacement
    /// are left alone.
    pub fn substitute(&self, map: &[(String, Expr)]) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(name) => map
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, e)| e.clone())
                .unwrap_or_else(|| Expr::Var(name.clone())),
            Expr::Neg(inner) => Expr::Neg(Box::new(inner.substitute(map))),
            Expr::Bin(op, lhs, rhs) => Expr::Bin(
                *op,
                Box::new(lhs.substitute(map)),
                Box::new(rhs.substitute(map)),
            ),
            Expr::Call(func, arg) => Expr::Call(*func, Box::new(arg.substitute(map))),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Const(c) if *c < 0.0 => 1, // prints with a leading minus
            Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => 4,
            Expr::Neg(_) => 1,
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Bin(BinOp::Pow, ..) => 3,
        }
    }
}

/// Negation, folding constants so printed trees re-parse to themselves.
impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(-c),
            other => Expr::Neg(Box::new(other)),
        }
    }
}

/// The arithmetic impls fold away zero and one operands so that derived
/// expressions (pullbacks, Christoffels of constant metrics) stay small.
impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        Expr::Bin(BinOp::Add, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        if rhs.is_zero() {
            return self;
        }
        Expr::Bin(BinOp::Sub, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.is_one() {
            return rhs;
        }
        if rhs.is_one() {
            return self;
        }
        Expr::Bin(BinOp::Mul, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        if rhs.is_one() {
            return self;
        }
        Expr::Bin(BinOp::Div, Box::new(self), Box::new(rhs))
    }
}

/// Prints a form that re-parses to a structurally identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn paren(f: &mut fmt::Formatter<'_>, e: &Expr, need: bool) -> fmt::Result {
            if need {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(name) => write!(f, "{name}"),
            Expr::Neg(inner) => {
                // Prefix minus parses at factor level, between * and ^.
                write!(f, "-")?;
                paren(f, inner, inner.precedence() <= 2)
            }
            Expr::Bin(op, lhs, rhs) => {
                let (sym, prec) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                    BinOp::Pow => ("^", 3),
                };
                // Left-associative ops need parens on an equal-precedence rhs;
                // right-associative pow is the mirror image.
                let (lneed, rneed) = if *op == BinOp::Pow {
                    (lhs.precedence() <= prec, rhs.precedence() < prec)
                } else {
                    (lhs.precedence() < prec, rhs.precedence() <= prec)
                };
                paren(f, lhs, lneed)?;
                write!(f, " {sym} ")?;
                paren(f, rhs, rneed)
            }
            Expr::Call(func, arg) => write!(f, "{}({})", func.name(), arg),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(text: &str, coords: &[&str]) {
        let parsed = parse(text, coords).unwrap();
        let printed = parsed.to_string();
        let reparsed = parse(&printed, coords).unwrap();
        assert_eq!(parsed, reparsed, "`{text}` -> `{printed}` changed shape");
    }

    #[test]
    fn print_parse_roundtrip_corpus() {
        let corpus = [
            "1", "-1", "x", "-x", "x + y", "x - y", "x - -y", "x * y", "x / y",
            "x ^ 2", "x ^ -2", "2 ^ x ^ 2", "(x + y) * (x - y)", "x - (y - 1)",
            "x / (y / 2)", "x / y / 2", "-(x + y)", "-(x * y)", "-x ^ 2",
            "(-x) ^ 2", "sqrt(x ^ 2 + y ^ 2)", "exp(-x ^ 2 / 2)",
            "log(x / (1 + y))", "sin(cos(x))", "sinh(x) * cosh(y) - tanh(x * y)",
            "1.5e-3 * x", "0.25 + x * 1e2", "x ^ 2 ^ 3", "(x ^ 2) ^ 3",
            "2 * x + 3 * y - 4", "x * (y + 1) / (y - 1)", "cosh(t)",
            "1 / (1 + exp(-x))", "sqrt(sqrt(x))", "-(1 + x) - -(1 - x)",
        ];
        for text in corpus {
            roundtrip(text, &["x", "y", "t"]);
        }
    }

    #[test]
    fn derivative_basics() {
        let coords = ["x", "y"];
        let e = parse("x ^ 2 * y + sin(x)", &coords).unwrap();
        let dx = e.derivative("x");
        let p = [0.7, -1.3];
        let expected = 2.0 * 0.7 * -1.3 + 0.7f64.cos();
        let got = eval_value(&dx, &coords.map(String::from), &p).unwrap();
        assert!((got - expected).abs() < 1e-14);
        // d/dy
        let dy = e.derivative("y");
        let got = eval_value(&dy, &coords.map(String::from), &p).unwrap();
        assert!((got - 0.49f64).abs() < 1e-14);
    }

    #[test]
    fn derivative_of_general_power() {
        let coords = ["x"];
        let e = parse("x ^ x", &coords).unwrap();
        let dx = e.derivative("x");
        let x: f64 = 1.37;
        let expected = x.powf(x) * (x.ln() + 1.0);
        let got = eval_value(&dx, &[String::from("x")], &[x]).unwrap();
        assert!((got - expected).abs() < 1e-13 * expected.abs());
    }

    #[test]
    fn substitute_composes() {
        let coords = ["u"];
        let outer = parse("u ^ 2 + 1", &coords).unwrap();
        let inner = parse("sin(x)", &["x"]).unwrap();
        let composed = outer.substitute(&[("u".to_string(), inner)]);
        let got = eval_value(&composed, &[String::from("x")], &[0.4]).unwrap();
        assert!((got - (0.4f64.sin().powi(2) + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn variables_are_collected_once() {
        let e = parse("x * x + y * x", &["x", "y"]).unwrap();
        assert_eq!(e.variables(), vec!["x".to_string(), "y".to_string()]);
    }
}
