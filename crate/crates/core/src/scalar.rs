//! Numeric modes.
//!
//! Every table, kernel and stationarity check is generic over [`Scalar`], so
//! the same code runs on exact rationals (zero-tolerance verdicts) and on
//! binary floats (entropy curves, simulation). Entropies themselves are always
//! evaluated in `f64`.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// A probability-valued scalar: exact rational or IEEE float.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Whether arithmetic is exact (no rounding).
    const EXACT: bool;

    /// Slack allowed for identities such as row sums. Zero in exact mode.
    fn tolerance() -> Self;

    /// Parses `p/q`, an integer, or a decimal literal such as `0.125` or `1e-3`.
    ///
    /// Rationals parse decimal literals exactly, so `0.1` is `1/10`.
    fn parse_literal(s: &str) -> Option<Self>;

    /// Text form used in rule files and CSV output.
    fn to_literal(&self) -> String;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer fits") / Self::from_i64(den).expect("integer fits")
    }

    fn from_usize_lossless(n: usize) -> Self {
        Self::from_usize(n).expect("integer fits")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= Self::tolerance()
    }

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::tolerance()
    }
}

fn parse_float_literal(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n.trim().parse().ok()?;
        let d: f64 = d.trim().parse().ok()?;
        if d == 0.0 {
            return None;
        }
        return Some(n / d);
    }
    let v: f64 = s.parse().ok()?;
    v.is_finite().then_some(v)
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        1e-12
    }

    fn parse_literal(s: &str) -> Option<Self> {
        parse_float_literal(s)
    }

    fn to_literal(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        1e-5
    }

    fn parse_literal(s: &str) -> Option<Self> {
        parse_float_literal(s).map(|v| v as f32)
    }

    fn to_literal(&self) -> String {
        format!("{self}")
    }
}

/// Parses a decimal literal (optional sign, fraction, exponent) exactly.
fn parse_decimal_exact(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], i64::from_str(&s[pos + 1..]).ok()?),
        None => (s, 0),
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
    let digits = if digits.is_empty() { "0".to_string() } else { digits };
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).ok()?);
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 10_000 {
        return None;
    }
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= pow;
    } else {
        value /= pow;
    }
    Some(if negative { -value } else { value })
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn parse_literal(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            return Some(BigRational::new(n, d));
        }
        parse_decimal_exact(s)
    }

    fn to_literal(&self) -> String {
        if self.denom().is_one() {
            format!("{}/1", self.numer())
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Converts between numeric modes. Float to rational is exact on the binary value.
pub fn convert<S: Scalar, T: Scalar>(x: &S) -> T {
    if S::EXACT && T::EXACT {
        return T::parse_literal(&x.to_literal()).expect("rational literal round-trips");
    }
    if T::EXACT {
        let f = x.to_f64_lossy();
        // shortest round-trip decimal, so 0.1_f64 becomes 1/10
        return T::parse_literal(&format!("{f}")).expect("finite float");
    }
    T::from_f64(x.to_f64_lossy()).expect("finite float")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_literals() {
        let r = BigRational::parse_literal("0.1").unwrap();
        assert_eq!(r, BigRational::ratio(1, 10));
        assert_eq!(BigRational::parse_literal("3/6").unwrap(), BigRational::ratio(1, 2));
        assert_eq!(BigRational::parse_literal("1e-3").unwrap(), BigRational::ratio(1, 1000));
        assert_eq!(BigRational::parse_literal("-2.50").unwrap(), BigRational::ratio(-5, 2));
        assert!(BigRational::parse_literal("1/0").is_none());
        assert!(BigRational::parse_literal("abc").is_none());
        assert_eq!(BigRational::ratio(1, 10).to_literal(), "1/10");
        assert_eq!(BigRational::ratio(2, 2).to_literal(), "1/1");
    }

    #[test]
    fn float_literals() {
        assert_eq!(f64::parse_literal("1/4"), Some(0.25));
        assert_eq!(f64::parse_literal("0.1"), Some(0.1));
        assert!(f64::parse_literal("nan").is_none());
    }

    #[test]
    fn conversions() {
        let q: BigRational = convert(&0.1_f64);
        assert_eq!(q, BigRational::ratio(1, 10));
        let f: f64 = convert(&BigRational::ratio(1, 4));
        assert_eq!(f, 0.25);
    }
}
