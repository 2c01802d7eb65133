//! Length arithmetic shared by every module.
//!
//! Two number systems are supported. `f64` compares with an absolute
//! tolerance of [`EPSILON`]; [`Rational`] compares exactly. Everything
//! geometric in the crate is generic over [`Scalar`] so that integer and
//! rational inputs never go through floating point.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::Value;

/// Exact rational lengths.
pub type Rational = Ratio<i128>;

/// Absolute tolerance applied to floating-point length comparisons.
pub const EPSILON: f64 = 1e-9;

/// Significant digits used when serializing floating-point lengths.
pub const SIGNIFICANT_DIGITS: usize = 12;

pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True when comparisons are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn from_int(v: i64) -> Self;
    /// `num / den`; `den` must be nonzero.
    fn from_frac(num: i64, den: i64) -> Self;
    fn half(self) -> Self;
    fn abs(self) -> Self;
    fn to_f64(self) -> f64;
    /// Default comparison tolerance: [`EPSILON`] or exactly zero.
    fn tolerance() -> Self;

    /// `self / step` when it is (within tolerance) a nonnegative integer.
    fn whole_multiple_of(self, step: Self) -> Option<u64>;

    /// Common grid step for a set of lengths: the largest `1/k` such that
    /// every length is an integer multiple of it.
    fn common_step(lengths: &[Self]) -> Option<Self>;

    fn to_json(self) -> Value;
    fn from_json(v: &Value) -> Option<Self>;
    fn parse_str(s: &str) -> Option<Self>;
    fn render(self) -> String;

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// `|self - other| <= tol`.
    fn close_to(self, other: Self, tol: Self) -> bool {
        (self - other).abs() <= tol
    }

    fn approx_eq(self, other: Self) -> bool {
        self.close_to(other, Self::tolerance())
    }

    /// `self <= other` up to the default tolerance.
    fn approx_le(self, other: Self) -> bool {
        self <= other + Self::tolerance()
    }

    /// `self < other` by more than the default tolerance.
    fn definitely_lt(self, other: Self) -> bool {
        self + Self::tolerance() < other
    }

    fn is_positive(self) -> bool {
        self > Self::tolerance()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_frac(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn half(self) -> Self {
        0.5 * self
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn tolerance() -> Self {
        EPSILON
    }

    fn whole_multiple_of(self, step: Self) -> Option<u64> {
        let q = self / step;
        let r = q.round();
        if r >= 0.0 && ((q - r) * step).abs() <= EPSILON {
            Some(r as u64)
        } else {
            None
        }
    }

    fn common_step(lengths: &[Self]) -> Option<Self> {
        // Floats carry no denominator, so search small ones.
        (1..=1024u32)
            .map(|k| 1.0 / k as f64)
            .find(|&step| lengths.iter().all(|&l| l.whole_multiple_of(step).is_some()))
    }

    fn to_json(self) -> Value {
        Value::from(round_significant(self, SIGNIFICANT_DIGITS))
    }

    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => Self::parse_str(s),
            _ => None,
        }
    }

    fn parse_str(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            return (q != 0.0).then(|| p / q);
        }
        s.parse().ok().filter(|x: &f64| x.is_finite())
    }

    fn render(self) -> String {
        let r = round_significant(self, SIGNIFICANT_DIGITS);
        format!("{r}")
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <Rational as Zero>::zero()
    }

    fn from_int(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }

    fn from_frac(num: i64, den: i64) -> Self {
        Ratio::new(num as i128, den as i128)
    }

    fn half(self) -> Self {
        self / Ratio::from_integer(2)
    }

    fn abs(self) -> Self {
        Signed::abs(&self)
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn tolerance() -> Self {
        <Rational as Zero>::zero()
    }

    fn whole_multiple_of(self, step: Self) -> Option<u64> {
        let q = self / step;
        (q.is_integer() && !q.is_negative()).then(|| *q.numer() as u64)
    }

    fn common_step(lengths: &[Self]) -> Option<Self> {
        let lcm = lengths.iter().fold(1i128, |acc, l| acc.lcm(l.denom()));
        Some(Ratio::new(1, lcm))
    }

    fn to_json(self) -> Value {
        if self.is_integer() {
            match i64::try_from(*self.numer()) {
                Ok(n) => Value::from(n),
                Err(_) => Value::from(self.numer().to_string()),
            }
        } else {
            Value::from(format!("{}/{}", self.numer(), self.denom()))
        }
    }

    fn from_json(v: &Value) -> Option<Self> {
        match v {
            // Use the literal's decimal text so 0.1 means 1/10.
            Value::Number(n) => parse_decimal(&n.to_string()),
            Value::String(s) => Self::parse_str(s),
            _ => None,
        }
    }

    fn parse_str(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i128 = p.trim().parse().ok()?;
            let q: i128 = q.trim().parse().ok()?;
            return (q != 0).then(|| Ratio::new(p, q));
        }
        parse_decimal(s)
    }

    fn render(self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Exact value of a decimal literal such as `-12.5e-3`.
fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value: i128 = if all.is_empty() { 0 } else { all.parse().ok()? };
    if neg {
        value = -value;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = 10i128;
    let r = if scale >= 0 {
        Ratio::from_integer(value.checked_mul(ten.checked_pow(scale as u32)?)?)
    } else {
        Ratio::new(value, ten.checked_pow((-scale) as u32)?)
    };
    Some(r)
}

/// Round to `digits` significant decimal digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    s.parse().unwrap_or(x)
}
