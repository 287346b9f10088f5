//! Dual-mode arithmetic: exact rationals when every input is rational,
//! binary64 with a fixed relative tolerance otherwise.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Relative tolerance used for every equality test in float mode.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// Number type the geometric data is generic over.
///
/// Implemented for `f64` (tolerant comparisons) and [`BigRational`]
/// (exact comparisons). Transcendental results such as logarithms are
/// always produced in `f64` from the exact value via [`Scalar::to_f64`].
pub trait Scalar: Num + Clone + PartialOrd + Debug {
    /// `true` for exact arithmetic.
    const EXACT: bool;

    fn to_f64(&self) -> f64;

    /// `None` for non-finite input.
    fn from_f64(x: f64) -> Option<Self>;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// Equality up to `FLOAT_TOLERANCE * |scale|` in float mode, exact otherwise.
    fn tol_eq(&self, other: &Self, scale: &Self) -> bool;

    /// Simplest rational (smallest denominator) within `1e-10` of the
    /// value. Rationals with small denominators and their float images
    /// snap to the same value.
    fn snap_rational(&self) -> BigRational;

    fn is_finite(&self) -> bool;

    fn abs_value(&self) -> Self {
        if *self < Self::zero() {
            Self::zero() - self.clone()
        } else {
            self.clone()
        }
    }

    /// Equality relative to the larger magnitude of the two operands.
    fn rel_eq(&self, other: &Self) -> bool {
        let a = self.abs_value();
        let b = other.abs_value();
        let scale = if a > b { a } else { b };
        self.tol_eq(other, &scale)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

const SNAP_TOLERANCE: i64 = 10_000_000_000;

fn snap_exact(x: &BigRational) -> BigRational {
    let tol = BigRational::new(BigInt::from(1), BigInt::from(SNAP_TOLERANCE));
    simplest_between(&(x - &tol), &(x + &tol))
}

/// Rational with the smallest denominator in the closed interval
/// `[lo, hi]`, via continued fractions.
pub fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    if lo > hi {
        return simplest_between(hi, lo);
    }
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    if !lo.is_positive() {
        return BigRational::zero();
    }
    let ceil = lo.ceil();
    if &ceil <= hi {
        return ceil;
    }
    let n = lo.floor();
    let inner = simplest_between(&(hi - &n).recip(), &(lo - &n).recip());
    n + inner.recip()
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn tol_eq(&self, other: &Self, scale: &Self) -> bool {
        (self - other).abs() <= FLOAT_TOLERANCE * scale.abs()
    }

    fn snap_rational(&self) -> BigRational {
        BigRational::from_float(*self).map(|x| snap_exact(&x)).unwrap_or_default()
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(if self.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        })
    }

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn tol_eq(&self, other: &Self, _scale: &Self) -> bool {
        self == other
    }

    fn snap_rational(&self) -> BigRational {
        snap_exact(self)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }
}

/// Parses a locale-independent real literal into an exact rational.
///
/// Accepts integers, decimals with an optional exponent (`1.25`, `-3e-2`)
/// and fractions `p/q`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((p, q)) = text.split_once('/') {
        let numer: BigInt = p.trim().parse().ok()?;
        let denom: BigInt = q.trim().parse().ok()?;
        if denom.is_zero() {
            return None;
        }
        return Some(BigRational::new(numer, denom));
    }

    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all_digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Renders a rational as `p` or `p/q`.
pub fn format_rational(value: &BigRational) -> String {
    if value.denom() == &BigInt::from(1) {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}
