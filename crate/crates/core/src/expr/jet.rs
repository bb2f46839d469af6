use super::{BinOp, Expr, Func};
use crate::error::{Error, Result};

/// Second-order forward-mode jet: value, gradient, and Hessian of a scalar
/// function at one chart point.
///
/// The Hessian is stored once per unordered index pair (packed upper
/// triangle), so symmetry is structural rather than numerical. All arithmetic
/// propagates the Leibniz and chain rules exactly; the only error is f64
/// rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    dim: usize,
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>, // packed upper triangle, index (i, j) with i <= j
}

#[inline]
fn packed_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

#[inline]
fn packed_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

impl Jet2 {
    pub fn constant(dim: usize, value: f64) -> Jet2 {
        Jet2 {
            dim,
            value,
            grad: vec![0.0; dim],
            hess: vec![0.0; packed_len(dim)],
        }
    }

    /// Jet of the `index`-th coordinate function at a point where it takes
    /// `value`: unit gradient entry, zero Hessian.
    pub fn variable(dim: usize, index: usize, value: f64) -> Jet2 {
        let mut jet = Jet2::constant(dim, value);
        jet.grad[index] = 1.0;
        jet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    /// Hessian entry; `(i, j)` and `(j, i)` read the same slot.
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[packed_index(self.dim, i, j)]
    }

    fn is_constant(&self) -> bool {
        self.grad.iter().all(|g| *g == 0.0) && self.hess.iter().all(|h| *h == 0.0)
    }

    /// Univariate chain rule: for outer function u with u(f) = `value`,
    /// u'(f) = `d1`, u''(f) = `d2`, returns the jet of u ∘ self.
    fn chain(&self, value: f64, d1: f64, d2: f64) -> Jet2 {
        if self.is_constant() {
            return Jet2::constant(self.dim, value);
        }
        let mut out = Jet2::constant(self.dim, value);
        for i in 0..self.dim {
            out.grad[i] = d1 * self.grad[i];
        }
        let mut k = 0;
        for i in 0..self.dim {
            for j in i..self.dim {
                out.hess[k] = d1 * self.hess[k] + d2 * self.grad[i] * self.grad[j];
                k += 1;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Jet2) -> Jet2 {
        debug_assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        out.value += rhs.value;
        for (a, b) in out.grad.iter_mut().zip(&rhs.grad) {
            *a += b;
        }
        for (a, b) in out.hess.iter_mut().zip(&rhs.hess) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, rhs: &Jet2) -> Jet2 {
        debug_assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        out.value -= rhs.value;
        for (a, b) in out.grad.iter_mut().zip(&rhs.grad) {
            *a -= b;
        }
        for (a, b) in out.hess.iter_mut().zip(&rhs.hess) {
            *a -= b;
        }
        out
    }

    pub fn neg(&self) -> Jet2 {
        let mut out = self.clone();
        out.value = -out.value;
        for g in &mut out.grad {
            *g = -*g;
        }
        for h in &mut out.hess {
            *h = -*h;
        }
        out
    }

    pub fn mul(&self, rhs: &Jet2) -> Jet2 {
        debug_assert_eq!(self.dim, rhs.dim);
        let mut out = Jet2::constant(self.dim, self.value * rhs.value);
        for i in 0..self.dim {
            out.grad[i] = self.grad[i] * rhs.value + self.value * rhs.grad[i];
        }
        let mut k = 0;
        for i in 0..self.dim {
            for j in i..self.dim {
                out.hess[k] = self.hess[k] * rhs.value
                    + self.value * rhs.hess[k]
                    + self.grad[i] * rhs.grad[j]
                    + self.grad[j] * rhs.grad[i];
                k += 1;
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Jet2 {
        let mut out = self.clone();
        out.value *= factor;
        for g in &mut out.grad {
            *g *= factor;
        }
        for h in &mut out.hess {
            *h *= factor;
        }
        out
    }

    pub fn recip(&self) -> Result<Jet2> {
        if self.value == 0.0 {
            return Err(Error::Domain("division by zero".to_string()));
        }
        let inv = 1.0 / self.value;
        Ok(self.chain(inv, -inv * inv, 2.0 * inv * inv * inv))
    }

    pub fn div(&self, rhs: &Jet2) -> Result<Jet2> {
        Ok(self.mul(&rhs.recip()?))
    }

    /// `self^c` for a constant exponent. Integer exponents of modest size run
    /// through repeated multiplication, which is exact for zero or negative
    /// bases; fractional exponents require a positive base.
    pub fn pow_const(&self, c: f64) -> Result<Jet2> {
        if c == 0.0 {
            return Ok(Jet2::constant(self.dim, 1.0));
        }
        if c == 1.0 {
            return Ok(self.clone());
        }
        if c.fract() == 0.0 && c.abs() <= 64.0 {
            let n = c.abs() as u32;
            let mut acc = Jet2::constant(self.dim, 1.0);
            for _ in 0..n {
                acc = acc.mul(self);
            }
            if c < 0.0 {
                return acc.recip();
            }
            return Ok(acc);
        }
        if self.value <= 0.0 {
            return Err(Error::Domain(format!(
                "{} ^ {c} with fractional exponent needs a positive base",
                self.value
            )));
        }
        let v = self.value;
        Ok(self.chain(v.powf(c), c * v.powf(c - 1.0), c * (c - 1.0) * v.powf(c - 2.0)))
    }

    /// `self^rhs` for a non-constant exponent via exp(rhs * log(self)).
    pub fn pow_jet(&self, rhs: &Jet2) -> Result<Jet2> {
        self.apply(Func::Log)?.mul(rhs).apply(Func::Exp)
    }

    pub fn apply(&self, func: Func) -> Result<Jet2> {
        let v = self.value;
        Ok(match func {
            Func::Sqrt => {
                if v < 0.0 {
                    return Err(Error::Domain(format!("sqrt of negative value {v}")));
                }
                let s = v.sqrt();
                self.chain(s, 0.5 / s, -0.25 / (s * s * s))
            }
            Func::Exp => {
                let e = v.exp();
                self.chain(e, e, e)
            }
            Func::Log => {
                if v <= 0.0 {
                    return Err(Error::Domain(format!("log of non-positive value {v}")));
                }
                self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
            }
            Func::Sin => self.chain(v.sin(), v.cos(), -v.sin()),
            Func::Cos => self.chain(v.cos(), -v.sin(), -v.cos()),
            Func::Sinh => self.chain(v.sinh(), v.cosh(), v.sinh()),
            Func::Cosh => self.chain(v.cosh(), v.sinh(), v.cosh()),
            Func::Tanh => {
                let t = v.tanh();
                let sech2 = 1.0 - t * t;
                self.chain(t, sech2, -2.0 * t * sech2)
            }
        })
    }
}

/// Evaluate `expr` at `point` carrying exact value, gradient, and Hessian.
pub fn eval_jet2(expr: &Expr, coords: &[String], point: &[f64]) -> Result<Jet2> {
    if coords.len() != point.len() {
        return Err(Error::InvalidParameters(format!(
            "point has dimension {}, chart has dimension {}",
            point.len(),
            coords.len()
        )));
    }
    jet_rec(expr, coords, point)
}

fn jet_rec(expr: &Expr, coords: &[String], point: &[f64]) -> Result<Jet2> {
    let dim = coords.len();
    match expr {
        Expr::Const(c) => Ok(Jet2::constant(dim, *c)),
        Expr::Var(name) => {
            let index = coords.iter().position(|c| c == name).ok_or_else(|| {
                Error::UnknownVariable {
                    name: name.clone(),
                    coords: coords.to_vec(),
                }
            })?;
            Ok(Jet2::variable(dim, index, point[index]))
        }
        Expr::Neg(inner) => Ok(jet_rec(inner, coords, point)?.neg()),
        Expr::Bin(op, lhs, rhs) => {
            let a = jet_rec(lhs, coords, point)?;
            match op {
                BinOp::Add => Ok(a.add(&jet_rec(rhs, coords, point)?)),
                BinOp::Sub => Ok(a.sub(&jet_rec(rhs, coords, point)?)),
                BinOp::Mul => Ok(a.mul(&jet_rec(rhs, coords, point)?)),
                BinOp::Div => a.div(&jet_rec(rhs, coords, point)?),
                BinOp::Pow => match &**rhs {
                    Expr::Const(c) => a.pow_const(*c),
                    _ => a.pow_jet(&jet_rec(rhs, coords, point)?),
                },
            }
        }
        Expr::Call(func, arg) => jet_rec(arg, coords, point)?.apply(*func),
    }
}

/// Evaluate `expr` at `point`, value only. Same domain checks as
/// [`eval_jet2`].
pub fn eval_value(expr: &Expr, coords: &[String], point: &[f64]) -> Result<f64> {
    if coords.len() != point.len() {
        return Err(Error::InvalidParameters(format!(
            "point has dimension {}, chart has dimension {}",
            point.len(),
            coords.len()
        )));
    }
    value_rec(expr, coords, point)
}

fn value_rec(expr: &Expr, coords: &[String], point: &[f64]) -> Result<f64> {
    match expr {
        Expr::Const(c) => Ok(*c),
        Expr::Var(name) => {
            let index = coords.iter().position(|c| c == name).ok_or_else(|| {
                Error::UnknownVariable {
                    name: name.clone(),
                    coords: coords.to_vec(),
                }
            })?;
            Ok(point[index])
        }
        Expr::Neg(inner) => Ok(-value_rec(inner, coords, point)?),
        Expr::Bin(op, lhs, rhs) => {
            let a = value_rec(lhs, coords, point)?;
            let b = value_rec(rhs, coords, point)?;
            match op {
                BinOp::Add => Ok(a + b),
                BinOp::Sub => Ok(a - b),
                BinOp::Mul => Ok(a * b),
                BinOp::Div => {
                    if b == 0.0 {
                        Err(Error::Domain("division by zero".to_string()))
                    } else {
                        Ok(a / b)
                    }
                }
                BinOp::Pow => {
                    if b.fract() == 0.0 {
                        Ok(a.powi(b as i32))
                    } else if a <= 0.0 {
                        Err(Error::Domain(format!(
                            "{a} ^ {b} with fractional exponent needs a positive base"
                        )))
                    } else {
                        Ok(a.powf(b))
                    }
                }
            }
        }
        Expr::Call(func, arg) => {
            let v = value_rec(arg, coords, point)?;
            Ok(match func {
                Func::Sqrt => {
                    if v < 0.0 {
                        return Err(Error::Domain(format!("sqrt of negative value {v}")));
                    }
                    v.sqrt()
                }
                Func::Exp => v.exp(),
                Func::Log => {
                    if v <= 0.0 {
                        return Err(Error::Domain(format!("log of non-positive value {v}")));
                    }
                    v.ln()
                }
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Sinh => v.sinh(),
                Func::Cosh => v.cosh(),
                Func::Tanh => v.tanh(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn jet_of(text: &str, coords: &[&str], point: &[f64]) -> Jet2 {
        let names: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
        let e = parse(text, coords).unwrap();
        eval_jet2(&e, &names, point).unwrap()
    }

    #[test]
    fn square_has_linear_gradient_and_constant_hessian() {
        let j = jet_of("x1^2", &["x1"], &[3.0]);
        assert_eq!(j.value(), 9.0);
        assert_eq!(j.gradient(), &[6.0]);
        assert_eq!(j.hess(0, 0), 2.0);
    }

    #[test]
    fn exp_jet_at_origin() {
        let j = jet_of("exp(t)", &["t"], &[0.0]);
        assert_eq!(j.value(), 1.0);
        assert_eq!(j.gradient(), &[1.0]);
        assert_eq!(j.hess(0, 0), 1.0);
    }

    #[test]
    fn cosh_jet_matches_closed_forms() {
        let t = 0.7;
        let j = jet_of("cosh(t)", &["t"], &[t]);
        assert!((j.value() - t.cosh()).abs() <= 1e-14 * t.cosh());
        assert!((j.gradient()[0] - t.sinh()).abs() <= 1e-14 * t.sinh());
        assert!((j.hess(0, 0) - t.cosh()).abs() <= 1e-14 * t.cosh());
    }

    #[test]
    fn mixed_partials_are_shared() {
        let j = jet_of("x * y^2 + sin(x * y)", &["x", "y"], &[0.3, 1.7]);
        assert_eq!(j.hess(0, 1), j.hess(1, 0));
        let (x, y): (f64, f64) = (0.3, 1.7);
        let expected = 2.0 * y + (x * y).cos() - (x * y) * (x * y).sin() * 1.0;
        // d2/dxdy [x y^2] = 2y; d2/dxdy [sin(xy)] = cos(xy) - xy sin(xy)
        assert!((j.hess(0, 1) - expected).abs() < 1e-14);
    }

    #[test]
    fn division_by_zero_is_a_domain_error() {
        let e = parse("1 / x", &["x"]).unwrap();
        let err = eval_jet2(&e, &[String::from("x")], &[0.0]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn log_and_sqrt_domain_errors() {
        let names = [String::from("x")];
        let log = parse("log(x)", &["x"]).unwrap();
        assert!(eval_jet2(&log, &names, &[0.0]).is_err());
        assert!(eval_jet2(&log, &names, &[-1.0]).is_err());
        let sqrt = parse("sqrt(x)", &["x"]).unwrap();
        assert!(eval_jet2(&sqrt, &names, &[-0.5]).is_err());
        assert!(eval_jet2(&sqrt, &names, &[4.0]).is_ok());
    }

    #[test]
    fn integer_powers_handle_zero_and_negative_bases() {
        let j = jet_of("x^3", &["x"], &[0.0]);
        assert_eq!((j.value(), j.gradient()[0], j.hess(0, 0)), (0.0, 0.0, 0.0));
        let j = jet_of("x^2", &["x"], &[-2.0]);
        assert_eq!((j.value(), j.gradient()[0], j.hess(0, 0)), (4.0, -4.0, 2.0));
        let j = jet_of("x^-2", &["x"], &[2.0]);
        assert_eq!(j.value(), 0.25);
        assert_eq!(j.gradient()[0], -0.25);
        assert_eq!(j.hess(0, 0), 0.375);
    }

    #[test]
    fn general_power_uses_exp_log() {
        let j = jet_of("x^x", &["x"], &[1.5]);
        let x: f64 = 1.5;
        let v = x.powf(x);
        assert!((j.value() - v).abs() < 1e-13);
        assert!((j.gradient()[0] - v * (x.ln() + 1.0)).abs() < 1e-13);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let names = [String::from("x"), String::from("y")];
        let e = parse("x + y", &["x", "y"]).unwrap();
        assert!(matches!(
            eval_jet2(&e, &names, &[1.0]),
            Err(Error::InvalidParameters(_))
        ));
        assert!(matches!(
            eval_value(&e, &names, &[1.0, 2.0, 3.0]),
            Err(Error::InvalidParameters(_))
        ));
    }

    #[test]
    fn expressions_evaluate_concurrently() {
        let names: Vec<String> = vec!["x".into(), "y".into()];
        let e = std::sync::Arc::new(parse("sinh(x) * cos(y) + x^3", &["x", "y"]).unwrap());
        let reference = eval_jet2(&e, &names, &[0.4, 1.2]).unwrap();
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let e = e.clone();
                let names = names.clone();
                std::thread::spawn(move || eval_jet2(&e, &names, &[0.4, 1.2]).unwrap())
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), reference);
        }
    }

    #[test]
    fn value_and_jet_agree() {
        let names = [String::from("x"), String::from("y")];
        let e = parse("sinh(x) / (1 + y^2) + tanh(x * y)", &["x", "y"]).unwrap();
        let p = [0.45, -0.8];
        let v = eval_value(&e, &names, &p).unwrap();
        let j = eval_jet2(&e, &names, &p).unwrap();
        assert!((v - j.value()).abs() < 1e-15);
    }
}
