//! Exact rationals and the scalar abstraction shared by the solvers.
//!
//! Every probability in a game is an exact [`Rational`]. Solvers are generic
//! over [`Numeric`], which is implemented for [`Rational`] (exact mode,
//! strategy iteration) and `f64` (value iteration).

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::solve_single::ReachEngine;

pub type Rational = BigRational;

/// Which single-objective engine backs a solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Value iteration in floating point.
    Vi,
    /// Strategy iteration with exact rational linear solves.
    Exact,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vi" => Ok(Mode::Vi),
            "exact" => Ok(Mode::Exact),
            other => Err(format!("unknown mode `{other}` (expected vi|exact)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Vi => "vi",
            Mode::Exact => "exact",
        })
    }
}

/// Scalar type the solvers compute with.
pub trait Numeric:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Zero
    + One
    + Signed
    + ToPrimitive
    + ReachEngine
{
    const MODE: Mode;

    fn from_rational(r: &Rational) -> Self;
    /// Exact rational image; floats convert through their binary expansion.
    fn to_rational(&self) -> Rational;

    /// Compares `self` with `other`, treating values within `eps` as equal.
    /// The exact implementation ignores `eps`.
    fn cmp_tol(&self, other: &Self, eps: f64) -> Ordering;

    /// Exact values print as reduced fractions, floats with 9 significant digits.
    fn render(&self) -> String;
}

impl Numeric for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn cmp_tol(&self, other: &Self, _eps: f64) -> Ordering {
        self.cmp(other)
    }
    fn render(&self) -> String {
        format_rational(self)
    }
}

impl Numeric for f64 {
    const MODE: Mode = Mode::Vi;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).unwrap_or_else(Zero::zero)
    }
    fn cmp_tol(&self, other: &Self, eps: f64) -> Ordering {
        if (self - other).abs() <= eps {
            Ordering::Equal
        } else if self < other {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
    fn render(&self) -> String {
        format_float(*self)
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Floating-point image of any scalar.
pub fn as_f64<N: Numeric>(x: &N) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `a/b`, an integer, or a decimal literal such as `0.125` into an
/// exact rational. Decimals are read as exact decimal fractions.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = parse_plain_int(num)?;
        let den: BigInt = parse_plain_int(den)?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = Rational::new(num, den);
    Some(if negative { -value } else { value })
}

fn parse_plain_int(text: &str) -> Option<BigInt> {
    let t = text.trim();
    let body = t.strip_prefix('-').unwrap_or(t);
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    t.parse().ok()
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nine significant digits, trailing zeros trimmed.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).clamp(0, 17) as usize;
    let text = format!("{x:.decimals$}");
    if text.contains('.') {
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        text
    }
}

/// Rounds to the nearest multiple of `10^-6`; used by threshold queries in VI mode.
pub fn round_to_micro(x: f64) -> i64 {
    (x * 1e6).round() as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/2"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("2/4"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("0.25"), Some(ratio(1, 4)));
        assert_eq!(parse_rational(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("1"), Some(rat_int(1)));
        assert_eq!(parse_rational("0.1"), Some(ratio(1, 10)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("1.2.3"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn formats() {
        assert_eq!(format_rational(&ratio(2, 4)), "1/2");
        assert_eq!(format_rational(&rat_int(1)), "1");
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(0.25), "0.25");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(0.0), "0");
    }

    #[test]
    fn tolerance_compare() {
        assert_eq!(0.5f64.cmp_tol(&(0.5 + 1e-9), 1e-6), Ordering::Equal);
        assert_eq!(0.5f64.cmp_tol(&0.6, 1e-6), Ordering::Less);
        assert_eq!(ratio(1, 2).cmp_tol(&ratio(1, 3), 1.0), Ordering::Greater);
    }
}
