//! Symbolic scalar fields in the fiber coordinates `h0..h3`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, rat, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(Rational),
    Var(usize),
    Add(ScalarField, ScalarField),
    Sub(ScalarField, ScalarField),
    Mul(ScalarField, ScalarField),
    Div(ScalarField, ScalarField),
    Neg(ScalarField),
    Pow(ScalarField, i32),
    Apply(Func, ScalarField),
}

/// Immutable expression tree; clones share structure.
///
/// The constructors fold constants and drop neutral elements, which keeps
/// derivatives of constant trees at a literal zero.
#[derive(Clone, Debug)]
pub struct ScalarField(Arc<Inner>);

#[derive(Debug)]
struct Inner {
    node: Node,
    // bitmask of coordinates occurring below this node
    vars: u8,
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.vars == other.0.vars && self.0.node == other.0.node)
    }
}

impl ScalarField {
    fn wrap(node: Node) -> Self {
        let vars = match &node {
            Node::Const(_) => 0,
            Node::Var(i) => 1 << i,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.free_vars() | b.free_vars()
            }
            Node::Neg(a) | Node::Pow(a, _) | Node::Apply(_, a) => a.free_vars(),
        };
        Self(Arc::new(Inner { node, vars }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    fn key(&self) -> *const Inner {
        Arc::as_ptr(&self.0)
    }

    pub fn constant(c: Rational) -> Self {
        Self::wrap(Node::Const(c))
    }

    pub fn int(v: i64) -> Self {
        Self::constant(rat(v, 1))
    }

    /// The coordinate `h_i`.
    pub fn var(i: usize) -> Self {
        assert!(i < 4, "fiber coordinate index out of range");
        Self::wrap(Node::Var(i))
    }

    pub fn as_constant(&self) -> Option<&Rational> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_literal_zero(&self) -> bool {
        self.as_constant().is_some_and(Zero::is_zero)
    }

    fn is_literal_one(&self) -> bool {
        self.as_constant().is_some_and(One::is_one)
    }

    /// Bitmask of the coordinates occurring in the tree.
    pub fn free_vars(&self) -> u8 {
        self.0.vars
    }

    pub fn is_constant(&self) -> bool {
        self.free_vars() == 0
    }

    fn add_f(&self, o: &Self) -> Self {
        match (self.as_constant(), o.as_constant()) {
            (Some(a), Some(b)) => return Self::constant(a + b),
            (Some(a), _) if a.is_zero() => return o.clone(),
            (_, Some(b)) if b.is_zero() => return self.clone(),
            _ => {}
        }
        if let Node::Neg(x) = o.node() {
            return self.sub_f(x);
        }
        Self::wrap(Node::Add(self.clone(), o.clone()))
    }

    fn sub_f(&self, o: &Self) -> Self {
        match (self.as_constant(), o.as_constant()) {
            (Some(a), Some(b)) => return Self::constant(a - b),
            (Some(a), _) if a.is_zero() => return o.neg_f(),
            (_, Some(b)) if b.is_zero() => return self.clone(),
            _ => {}
        }
        if self == o {
            return Self::int(0);
        }
        if let Node::Neg(x) = o.node() {
            return self.add_f(x);
        }
        Self::wrap(Node::Sub(self.clone(), o.clone()))
    }

    fn mul_f(&self, o: &Self) -> Self {
        match (self.as_constant(), o.as_constant()) {
            (Some(a), Some(b)) => return Self::constant(a * b),
            (Some(a), _) if a.is_zero() => return Self::int(0),
            (_, Some(b)) if b.is_zero() => return Self::int(0),
            (Some(a), _) if a.is_one() => return o.clone(),
            (_, Some(b)) if b.is_one() => return self.clone(),
            (Some(a), _) if (-a).is_one() => return o.neg_f(),
            (_, Some(b)) if (-b).is_one() => return self.neg_f(),
            _ => {}
        }
        Self::wrap(Node::Mul(self.clone(), o.clone()))
    }

    fn div_f(&self, o: &Self) -> Self {
        match (self.as_constant(), o.as_constant()) {
            (Some(a), Some(b)) if !b.is_zero() => return Self::constant(a / b),
            (_, Some(b)) if b.is_one() => return self.clone(),
            (Some(a), _) if a.is_zero() && o.as_constant().is_none() => return Self::int(0),
            _ => {}
        }
        Self::wrap(Node::Div(self.clone(), o.clone()))
    }

    fn neg_f(&self) -> Self {
        match self.node() {
            Node::Const(c) => Self::constant(-c),
            Node::Neg(x) => x.clone(),
            _ => Self::wrap(Node::Neg(self.clone())),
        }
    }

    pub fn powi(&self, k: i32) -> Self {
        if k == 0 {
            return Self::int(1);
        }
        if k == 1 {
            return self.clone();
        }
        if let Some(c) = self.as_constant() {
            if !c.is_zero() || k > 0 {
                let p = num_traits::pow(c.clone(), k.unsigned_abs() as usize);
                return Self::constant(if k < 0 { p.recip() } else { p });
            }
        }
        if let Node::Pow(base, j) = self.node() {
            if let Some(m) = j.checked_mul(k) {
                if (*j > 0) == (m > 0) {
                    return base.powi(m);
                }
            }
        }
        Self::wrap(Node::Pow(self.clone(), k))
    }

    pub fn apply(f: Func, a: &Self) -> Self {
        if let Some(c) = a.as_constant() {
            let folded = match f {
                Func::Sqrt => c.try_sqrt(),
                Func::Exp => c.try_exp(),
                Func::Log => (c.is_positive()).then(|| c.try_ln()).flatten(),
                Func::Sin => c.try_sin(),
                Func::Cos => c.try_cos(),
            };
            if let Some(v) = folded {
                return Self::constant(v);
            }
        }
        Self::wrap(Node::Apply(f, a.clone()))
    }

    pub fn sqrt(&self) -> Self {
        Self::apply(Func::Sqrt, self)
    }

    pub fn exp(&self) -> Self {
        Self::apply(Func::Exp, self)
    }

    pub fn log(&self) -> Self {
        Self::apply(Func::Log, self)
    }

    pub fn sin(&self) -> Self {
        Self::apply(Func::Sin, self)
    }

    pub fn cos(&self) -> Self {
        Self::apply(Func::Cos, self)
    }

    /// `d/dh_b`.
    pub fn derivative(&self, b: usize) -> Self {
        let mut memo = HashMap::new();
        self.derivative_memo(b, &mut memo)
    }

    fn derivative_memo(&self, b: usize, memo: &mut HashMap<*const Inner, ScalarField>) -> Self {
        if self.free_vars() & (1 << b) == 0 {
            return Self::int(0);
        }
        let key = self.key();
        if let Some(d) = memo.get(&key) {
            return d.clone();
        }
        let d = match self.node() {
            Node::Const(_) => Self::int(0),
            Node::Var(i) => Self::int((*i == b) as i64),
            Node::Add(x, y) => x
                .derivative_memo(b, memo)
                .add_f(&y.derivative_memo(b, memo)),
            Node::Sub(x, y) => x
                .derivative_memo(b, memo)
                .sub_f(&y.derivative_memo(b, memo)),
            Node::Mul(x, y) => {
                let dx = x.derivative_memo(b, memo);
                let dy = y.derivative_memo(b, memo);
                dx.mul_f(y).add_f(&x.mul_f(&dy))
            }
            Node::Div(x, y) => {
                let dx = x.derivative_memo(b, memo);
                let dy = y.derivative_memo(b, memo);
                if dy.is_literal_zero() {
                    dx.div_f(y)
                } else {
                    dx.mul_f(y).sub_f(&x.mul_f(&dy)).div_f(&y.powi(2))
                }
            }
            Node::Neg(x) => x.derivative_memo(b, memo).neg_f(),
            Node::Pow(x, k) => {
                let dx = x.derivative_memo(b, memo);
                Self::int(*k as i64).mul_f(&x.powi(k - 1)).mul_f(&dx)
            }
            Node::Apply(f, x) => {
                let dx = x.derivative_memo(b, memo);
                let outer = match f {
                    Func::Sqrt => Self::int(1).div_f(&Self::int(2).mul_f(self)),
                    Func::Exp => self.clone(),
                    Func::Log => Self::int(1).div_f(x),
                    Func::Sin => x.cos(),
                    Func::Cos => x.sin().neg_f(),
                };
                if outer.is_literal_one() {
                    dx
                } else if dx.is_literal_one() {
                    outer
                } else if let Func::Log = f {
                    dx.div_f(x)
                } else {
                    outer.mul_f(&dx)
                }
            }
        };
        memo.insert(key, d.clone());
        d
    }

    /// Gradient `(d/dh_0, .., d/dh_3)`.
    pub fn gradient(&self) -> [Self; 4] {
        std::array::from_fn(|b| self.derivative(b))
    }

    /// Evaluate at `point`; exact for rationals as long as no transcendental
    /// node needs an irrational value.
    pub fn eval<T: Scalar>(&self, point: &[T; 4]) -> Result<T> {
        let mut memo = HashMap::new();
        self.eval_memo(point, &mut memo)
    }

    fn eval_memo<T: Scalar>(&self, p: &[T; 4], memo: &mut HashMap<*const Inner, T>) -> Result<T> {
        let key = self.key();
        if let Some(v) = memo.get(&key) {
            return Ok(v.clone());
        }
        let v = match self.node() {
            Node::Const(c) => T::from_rational(c),
            Node::Var(i) => p[*i].clone(),
            Node::Add(a, b) => a.eval_memo(p, memo)? + b.eval_memo(p, memo)?,
            Node::Sub(a, b) => a.eval_memo(p, memo)? - b.eval_memo(p, memo)?,
            Node::Mul(a, b) => a.eval_memo(p, memo)? * b.eval_memo(p, memo)?,
            Node::Div(a, b) => {
                let den = b.eval_memo(p, memo)?;
                if den.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                a.eval_memo(p, memo)? / den
            }
            Node::Neg(a) => -a.eval_memo(p, memo)?,
            Node::Pow(a, k) => {
                let base = a.eval_memo(p, memo)?;
                let pos = num_traits::pow(base, k.unsigned_abs() as usize);
                if *k < 0 {
                    if pos.is_zero() {
                        return Err(Error::DivisionByZero);
                    }
                    T::one() / pos
                } else {
                    pos
                }
            }
            Node::Apply(f, a) => {
                let x = a.eval_memo(p, memo)?;
                let out = match f {
                    Func::Sqrt if x < T::zero() => return Err(Error::Domain("sqrt")),
                    Func::Log if x <= T::zero() => return Err(Error::Domain("log")),
                    Func::Sqrt => x.try_sqrt(),
                    Func::Exp => x.try_exp(),
                    Func::Log => x.try_ln(),
                    Func::Sin => x.try_sin(),
                    Func::Cos => x.try_cos(),
                };
                out.ok_or(Error::Inexact(f.name()))?
            }
        };
        memo.insert(key, v.clone());
        Ok(v)
    }

    pub fn eval_f64(&self, point: &[f64; 4]) -> Result<f64> {
        self.eval(point)
    }

    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Const(c) if c.is_negative() => 3,
            Node::Const(c) if !c.is_integer() => 2,
            Node::Const(_) | Node::Var(_) | Node::Apply(..) => 5,
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Neg(_) => 3,
            Node::Pow(..) => 4,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &ScalarField, min: u8) -> fmt::Result {
    if child.precedence() < min {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

/// Prints in the grammar accepted by [`crate::forms::parse`].
impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write!(f, "{}", format_rational(c)),
            Node::Var(i) => write!(f, "h{i}"),
            Node::Add(a, b) => {
                write_child(f, a, 1)?;
                f.write_str(" + ")?;
                write_child(f, b, 1)
            }
            Node::Sub(a, b) => {
                write_child(f, a, 1)?;
                f.write_str(" - ")?;
                write_child(f, b, 2)
            }
            Node::Mul(a, b) => {
                write_child(f, a, 2)?;
                f.write_str("*")?;
                write_child(f, b, 3)
            }
            Node::Div(a, b) => {
                write_child(f, a, 2)?;
                f.write_str("/")?;
                write_child(f, b, 4)
            }
            Node::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, 3)
            }
            Node::Pow(a, k) => {
                write_child(f, a, 5)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Node::Apply(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr for ScalarField {
            type Output = ScalarField;
            fn $m(self, o: ScalarField) -> ScalarField {
                ScalarField::$f(&self, &o)
            }
        }
        impl $tr<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $m(self, o: &ScalarField) -> ScalarField {
                ScalarField::$f(self, o)
            }
        }
    };
}

binop!(Add, add, add_f);
binop!(Sub, sub, sub_f);
binop!(Mul, mul, mul_f);
binop!(Div, div, div_f);

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        ScalarField::neg_f(&self)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        ScalarField::neg_f(self)
    }
}

impl Zero for ScalarField {
    fn zero() -> Self {
        Self::int(0)
    }
    fn is_zero(&self) -> bool {
        self.is_literal_zero()
    }
}

impl One for ScalarField {
    fn one() -> Self {
        Self::int(1)
    }
}

impl From<i64> for ScalarField {
    fn from(v: i64) -> Self {
        Self::int(v)
    }
}

impl From<Rational> for ScalarField {
    fn from(v: Rational) -> Self {
        Self::constant(v)
    }
}

/// `h_0^2 + h_1^2 + h_2^2 + h_3^2`.
pub fn norm_sq() -> ScalarField {
    (0..4)
        .map(|i| ScalarField::var(i).powi(2))
        .fold(ScalarField::int(0), |a, b| a + b)
}

/// `t = sqrt(h_0^2 + h_1^2 + h_2^2 + h_3^2)`.
pub fn radius() -> ScalarField {
    norm_sq().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(i: usize) -> ScalarField {
        ScalarField::var(i)
    }

    #[test]
    fn constants_fold() {
        let x = ScalarField::int(2) * ScalarField::int(3) + ScalarField::int(1);
        assert_eq!(x.as_constant(), Some(&rat(7, 1)));
        assert_eq!(ScalarField::int(9).sqrt().as_constant(), Some(&rat(3, 1)));
        assert!(ScalarField::int(2).sqrt().as_constant().is_none());
        assert!((h(0) - h(0)).is_literal_zero());
    }

    #[test]
    fn derivative_rules() {
        let p = [rat(1, 2), rat(-1, 3), rat(2, 1), rat(1, 1)];
        // d/dh0 (h0^3 h1 / (1 + h0^2))
        let f = h(0).powi(3) * h(1) / (ScalarField::int(1) + h(0).powi(2));
        let df = f.derivative(0).eval(&p).unwrap();
        let (x, y) = (rat(1, 2), rat(-1, 3));
        let one = rat(1, 1);
        let expected = (rat(3, 1) * &x * &x * &y * (&one + &x * &x)
            - &x * &x * &x * &y * rat(2, 1) * &x)
            / ((&one + &x * &x) * (&one + &x * &x));
        assert_eq!(df, expected);
        assert!(ScalarField::int(5).sin().derivative(2).is_literal_zero());
    }

    #[test]
    fn transcendental_derivatives_numeric() {
        let f = (h(0) * h(1)).sin() + h(2).exp() * h(3).cos() + h(0).powi(2).sqrt() + h(1).log();
        let p = [0.7, 1.3, -0.4, 0.9];
        let eps = 1e-6;
        for b in 0..4 {
            let mut hi = p;
            let mut lo = p;
            hi[b] += eps;
            lo[b] -= eps;
            let fd = (f.eval_f64(&hi).unwrap() - f.eval_f64(&lo).unwrap()) / (2.0 * eps);
            let d = f.derivative(b).eval_f64(&p).unwrap();
            assert!((fd - d).abs() < 1e-7, "b={b}: {fd} vs {d}");
        }
    }

    #[test]
    fn evaluation_errors() {
        let p = [rat(0, 1), rat(2, 1), rat(-1, 1), rat(1, 1)];
        assert_eq!((h(1) / h(0)).eval(&p), Err(Error::DivisionByZero));
        assert_eq!(h(0).powi(-2).eval(&p), Err(Error::DivisionByZero));
        assert_eq!(h(2).sqrt().eval(&p), Err(Error::Domain("sqrt")));
        assert_eq!(h(1).sqrt().eval(&p), Err(Error::Inexact("sqrt")));
        assert_eq!(h(3).exp().eval(&p), Err(Error::Inexact("exp")));
        assert_eq!(
            h(0).log().eval(&[0.0, 0.0, 0.0, 0.0]),
            Err(Error::Domain("log"))
        );
    }

    #[test]
    fn display_parenthesizes() {
        let f = (h(0) + h(1)) * -(h(2) - h(3)) / h(0).powi(-3);
        assert_eq!(f.to_string(), "(h0 + h1)*-(h2 - h3)/h0^(-3)");
        let g = h(0) - (h(1) - h(2));
        assert_eq!(g.to_string(), "h0 - (h1 - h2)");
        assert_eq!(
            (ScalarField::constant(rat(-1, 2)) * h(1)).to_string(),
            "-1/2*h1"
        );
        assert_eq!(
            ScalarField::constant(rat(-1, 2)).powi(3).to_string(),
            "-1/8"
        );
        assert_eq!(
            (h(0) - ScalarField::int(2)).powi(3).to_string(),
            "(h0 - 2)^3"
        );
    }
}
