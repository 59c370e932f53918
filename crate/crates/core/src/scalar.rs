//! Scalar abstraction shared by the solver, bound and model code.
//!
//! Everything numeric in this crate is generic over [`Scalar`]. `f64` is the
//! working type for LP and branch-and-bound; [`Rational`] runs the same code
//! paths exactly, which is what the identity and lift checks rely on.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, the storage type for instance data.
pub type Rational = BigRational;

pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static {
    /// True when arithmetic is exact and all tolerances are zero.
    const EXACT: bool;

    fn feasibility_tol() -> Self;
    fn optimality_tol() -> Self;
    fn pivot_tol() -> Self;
    fn integrality_tol() -> Self;

    /// Nearest representable value of an exact rational.
    fn from_rational(r: &Rational) -> Self;
    /// Converts a configuration constant. Exact types read the shortest
    /// decimal form, so `approx(0.1)` is exactly 1/10 for [`Rational`].
    fn approx(v: f64) -> Self;
    fn as_f64(&self) -> f64;
    /// Exact rational value of `self` (binary expansion for floats).
    fn to_rational(&self) -> Rational;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn feasibility_tol() -> Self {
        1e-7
    }
    fn optimality_tol() -> Self {
        1e-9
    }
    fn pivot_tol() -> Self {
        1e-10
    }
    fn integrality_tol() -> Self {
        1e-6
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
    fn approx(v: f64) -> Self {
        v
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).expect("non-finite f64 has no rational value")
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn feasibility_tol() -> Self {
        1e-4
    }
    fn optimality_tol() -> Self {
        1e-5
    }
    fn pivot_tol() -> Self {
        1e-6
    }
    fn integrality_tol() -> Self {
        1e-4
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f32().unwrap_or(f32::NAN)
    }
    fn approx(v: f64) -> Self {
        v as f32
    }
    fn as_f64(&self) -> f64 {
        f64::from(*self)
    }
    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).expect("non-finite f32 has no rational value")
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn feasibility_tol() -> Self {
        Rational::zero()
    }
    fn optimality_tol() -> Self {
        Rational::zero()
    }
    fn pivot_tol() -> Self {
        Rational::zero()
    }
    fn integrality_tol() -> Self {
        Rational::zero()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn approx(v: f64) -> Self {
        assert!(v.is_finite(), "cannot convert {v} to a rational");
        parse_rational(&format!("{v}")).expect("f64 display is a decimal literal")
    }
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

pub(crate) fn min_of<S: Scalar>(a: S, b: S) -> S {
    if b < a {
        b
    } else {
        a
    }
}

pub(crate) fn max_of<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

/// Parses a decimal literal (`-12`, `0.25`, `1.5e-3`) or a fraction (`-7/3`)
/// into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }

    let (negative, body) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], body[pos + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Some(if negative { -value } else { value })
}

/// Decimal text for rationals whose denominator is of the form 2^a 5^b,
/// `None` otherwise.
pub fn terminating_decimal(r: &Rational) -> Option<String> {
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = r * Rational::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().abs().to_string();
    let sign = if r.is_negative() { "-" } else { "" };
    if places == 0 {
        return Some(format!("{sign}{digits}"));
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - places);
    Some(format!("{sign}{int_part}.{frac_part}"))
}

/// Shortest faithful text for a rational: a decimal when one exists,
/// otherwise `p/q`.
pub fn format_rational(r: &Rational) -> String {
    terminating_decimal(r).unwrap_or_else(|| format!("{}/{}", r.numer(), r.denom()))
}

pub(crate) fn rational_from_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from_i64(v).expect("i64 fits BigInt"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("0.1"), Some(q(1, 10)));
        assert_eq!(parse_rational("-2.5e-1"), Some(q(-1, 4)));
        assert_eq!(parse_rational("3E2"), Some(q(300, 1)));
        assert_eq!(parse_rational("-7/3"), Some(q(-7, 3)));
        assert_eq!(parse_rational(".5"), Some(q(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("NaN"), None);
        assert_eq!(parse_rational("inf"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn formats_terminating_and_repeating() {
        assert_eq!(format_rational(&q(-1, 8)), "-0.125");
        assert_eq!(format_rational(&q(5, 1)), "5");
        assert_eq!(format_rational(&q(1, 3)), "1/3");
        assert_eq!(format_rational(&q(-3, 200)), "-0.015");
    }

    #[test]
    fn approx_reads_shortest_decimal() {
        assert_eq!(<Rational as Scalar>::approx(0.1), q(1, 10));
        assert_eq!(<Rational as Scalar>::approx(-1e-3), q(-1, 1000));
    }

    proptest::proptest! {
        #[test]
        fn decimal_text_round_trips(num in -1_000_000i64..1_000_000, pow2 in 0u32..8, pow5 in 0u32..8) {
            let r = q(num, 2i64.pow(pow2) * 5i64.pow(pow5));
            let text = terminating_decimal(&r).unwrap();
            proptest::prop_assert_eq!(parse_rational(&text), Some(r));
        }
    }
}
