//! Scalar abstraction shared by every module.
//!
//! All linear-algebra code is written against [`Scalar`], which is implemented
//! for `f32`, `f64` and the arbitrary-precision [`Rational`]. Exact scalars
//! compare against zero with no tolerance; floating scalars use the tolerance
//! carried by the model or check that owns them.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Default tolerance for floating arithmetic.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

pub trait Scalar:
    Num + Signed + Clone + Debug + Display + PartialOrd + FromPrimitive + Send + Sync + 'static
{
    /// True when arithmetic is exact and equality is decidable.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Zero test: exact for rationals, `|x| <= tol` for floats.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Square root when it exists in this scalar type.
    ///
    /// Rationals return `Some` only for perfect squares.
    fn try_sqrt(&self) -> Option<Self>;

    fn try_exp(&self) -> Option<Self>;

    fn try_ln(&self) -> Option<Self>;

    fn try_sin(&self) -> Option<Self>;

    fn try_cos(&self) -> Option<Self>;

    fn from_int(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("integer conversion")
    }

    fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(&rat(p, q))
    }

    /// Whether the value is finite (always true for rationals).
    fn is_finite_value(&self) -> bool {
        true
    }
}

/// Shorthand for the rational `p/q`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Largest absolute value in a sequence (zero when empty).
pub fn max_abs<'a, T: Scalar>(values: impl IntoIterator<Item = &'a T>) -> T {
    values
        .into_iter()
        .map(|v| v.abs())
        .fold(T::zero(), |acc, v| if v > acc { v } else { acc })
}

fn exact_sqrt_int(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let root = n.sqrt();
    (&root * &root == *n).then_some(root)
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn try_sqrt(&self) -> Option<Self> {
        let num = exact_sqrt_int(self.numer())?;
        let den = exact_sqrt_int(self.denom())?;
        Some(Rational::new(num, den))
    }

    fn try_exp(&self) -> Option<Self> {
        self.is_zero().then(Rational::one)
    }

    fn try_ln(&self) -> Option<Self> {
        self.is_one().then(Rational::zero)
    }

    fn try_sin(&self) -> Option<Self> {
        self.is_zero().then(Rational::zero)
    }

    fn try_cos(&self) -> Option<Self> {
        self.is_zero().then(Rational::one)
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_rational(r: &Rational) -> Self {
                ToPrimitive::to_f64(r).unwrap_or(f64::NAN) as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn is_negligible(&self, tol: f64) -> bool {
                (*self as f64).abs() <= tol
            }

            fn try_sqrt(&self) -> Option<Self> {
                (*self >= 0.0).then(|| self.sqrt())
            }

            fn try_exp(&self) -> Option<Self> {
                Some(self.exp())
            }

            fn try_ln(&self) -> Option<Self> {
                (*self > 0.0).then(|| self.ln())
            }

            fn try_sin(&self) -> Option<Self> {
                Some(self.sin())
            }

            fn try_cos(&self) -> Option<Self> {
                Some(self.cos())
            }

            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

/// Parse `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            (!q.is_zero()).then(|| Rational::new(p, q))
        }
        None => {
            if let Ok(p) = s.parse::<BigInt>() {
                return Some(Rational::from_integer(p));
            }
            // decimal literal such as "0.25"
            let (int, frac) = s.split_once('.')?;
            let neg = int.starts_with('-');
            let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
            let num: BigInt = digits.parse().ok()?;
            let den = num_traits::pow(BigInt::from(10), frac.len());
            let r = Rational::new(num, den);
            Some(if neg { -r } else { r })
        }
    }
}

/// Format a rational as `"p/q"` (or `"p"` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sqrt_only_for_squares() {
        assert_eq!(rat(9, 4).try_sqrt(), Some(rat(3, 2)));
        assert_eq!(rat(2, 1).try_sqrt(), None);
        assert_eq!(rat(-4, 1).try_sqrt(), None);
    }

    #[test]
    fn transcendental_on_rationals_is_partial() {
        assert_eq!(rat(0, 1).try_exp(), Some(rat(1, 1)));
        assert_eq!(rat(1, 2).try_exp(), None);
        assert_eq!(rat(0, 1).try_cos(), Some(rat(1, 1)));
        assert_eq!(rat(1, 1).try_ln(), Some(rat(0, 1)));
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["3/7", "-5", "0", "-12/5"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert_eq!(parse_rational("0.25"), Some(rat(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(rat(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn float_tolerance() {
        assert!(1e-12f64.is_negligible(1e-10));
        assert!(!1e-8f64.is_negligible(1e-10));
        assert!(!rat(1, 1_000_000_000_000).is_negligible(1.0));
    }
}
