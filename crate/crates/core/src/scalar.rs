//! Numeric backends.
//!
//! Every finite-alphabet computation is generic over [`Scalar`], which is
//! implemented for IEEE doubles (fast sweeps) and for arbitrary-precision
//! rationals (exact oracle equality on small instances).

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Absolute tolerance used when validating that a float vector is stochastic.
pub const STOCHASTIC_TOL: f64 = 1e-12;

pub trait Scalar:
    Num + Clone + Debug + Display + PartialOrd + Signed + Send + Sync + 'static
{
    /// Exact value `num / den` (rounded for floats).
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Converts a finite double. Rationals take the exact binary value.
    fn from_f64(x: f64) -> Option<Self>;

    /// Parses a decimal literal (`0.25`, `1e-3`) or a fraction (`1/3`).
    fn parse_literal(text: &str) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Tolerance for stochasticity checks: `1e-12` for floats, zero for rationals.
    fn tolerance() -> Self;

    fn is_exact() -> bool;

    /// Exact textual form (fraction for rationals, shortest round-trip for floats).
    fn to_literal(&self) -> String {
        self.to_string()
    }
}

pub fn sum<S: Scalar>(values: &[S]) -> S {
    values.iter().fold(S::zero(), |acc, v| acc + v.clone())
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Maximum with lowest-index tie-breaking. Panics on an empty slice.
pub fn argmax<S: Scalar>(values: &[S]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

pub fn argmin<S: Scalar>(values: &[S]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn parse_literal(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let n: f64 = n.trim().parse().ok()?;
            let d: f64 = d.trim().parse().ok()?;
            let v = n / d;
            return v.is_finite().then_some(v);
        }
        let v: f64 = text.parse().ok()?;
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn tolerance() -> Self {
        STOCHASTIC_TOL
    }

    fn is_exact() -> bool {
        false
    }

    fn to_literal(&self) -> String {
        format!("{self:?}")
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn parse_literal(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            return Some(BigRational::new(n, d));
        }
        parse_decimal(text)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn is_exact() -> bool {
        true
    }
}

/// Exact decimal parsing: `-12.5e-3` becomes `-125/10000`.
fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// Convenience constructor for exact test instances.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_parse_exactly() {
        assert_eq!(BigRational::parse_literal("0.25"), Some(rational(1, 4)));
        assert_eq!(BigRational::parse_literal("-1.5e-1"), Some(rational(-3, 20)));
        assert_eq!(BigRational::parse_literal("3"), Some(rational(3, 1)));
        assert_eq!(BigRational::parse_literal("2/6"), Some(rational(1, 3)));
        assert_eq!(BigRational::parse_literal("1/0"), None);
        assert_eq!(BigRational::parse_literal("NaN"), None);
        assert_eq!(BigRational::parse_literal("."), None);
    }

    #[test]
    fn float_literals_reject_non_finite() {
        assert_eq!(f64::parse_literal("0.5"), Some(0.5));
        assert_eq!(f64::parse_literal("NaN"), None);
        assert_eq!(f64::parse_literal("inf"), None);
        assert_eq!(f64::parse_literal("1/4"), Some(0.25));
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmin(&[2.0, 1.0, 1.0]), 1);
    }
}
