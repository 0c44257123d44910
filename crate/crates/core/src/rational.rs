//! Exact nonnegative rationals backed by `num_rational::Ratio<u128>`.
//!
//! Prime values, semigroup elements and measure positions all live here so
//! that threshold comparisons (`value <= x`) and position merging are exact.
//! Every multiplication on the hot paths goes through [`checked_mul`] so an
//! overflow surfaces as an error instead of a silently wrapped value.

use num_rational::Ratio;
use num_traits::{CheckedDiv, CheckedMul, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{BeurlingError, Result};

pub type Rational = Ratio<u128>;

/// `num / den` in lowest terms. Panics on a zero denominator.
pub fn rat(num: u128, den: u128) -> Rational {
    Ratio::new(num, den)
}

pub fn int(n: u128) -> Rational {
    Ratio::from_integer(n)
}

pub fn to_f64(r: &Rational) -> f64 {
    let (n, d) = (*r.numer(), *r.denom());
    if d == 1 {
        return n as f64;
    }
    // Split off the integer part so values near 1 keep their relative precision.
    let whole = n / d;
    let rem = n % d;
    whole as f64 + rem as f64 / d as f64
}

/// Natural logarithm in double precision.
pub fn ln(r: &Rational) -> f64 {
    let (n, d) = (*r.numer(), *r.denom());
    if d == 1 {
        return (n as f64).ln();
    }
    let whole = n / d;
    if whole == 1 {
        // ln(1 + rem/d) without cancellation
        return ((n - d) as f64 / d as f64).ln_1p();
    }
    (n as f64).ln() - (d as f64).ln()
}

pub fn checked_mul(a: &Rational, b: &Rational) -> Result<Rational> {
    a.checked_mul(b)
        .ok_or_else(|| BeurlingError::Overflow(format!("{a} * {b}")))
}

pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        return Err(BeurlingError::invalid("division by zero"));
    }
    a.checked_div(b)
        .ok_or_else(|| BeurlingError::Overflow(format!("{a} / {b}")))
}

/// `base^k`, or `None` when the exact result does not fit.
pub fn checked_pow(base: &Rational, k: u32) -> Option<Rational> {
    let mut acc = Rational::one();
    for _ in 0..k {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Parses `"12"`, `"1.5"`, `"1e6"`, `"2.5E-1"` or `"3/2"` exactly.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || BeurlingError::invalid(format!("not a nonnegative rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: u128 = n.trim().parse().map_err(|_| bad())?;
        let d: u128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(rat(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let mantissa = mantissa.strip_prefix('+').unwrap_or(mantissa);
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = digits.trim_start_matches('0');
    let num: u128 = if digits.is_empty() {
        0
    } else {
        digits
            .parse()
            .map_err(|_| BeurlingError::Overflow(s.to_string()))?
    };
    let scale = exp - frac_part.len() as i32;
    let ten_pow = |k: u32| {
        10u128
            .checked_pow(k)
            .ok_or_else(|| BeurlingError::Overflow(s.to_string()))
    };
    if scale >= 0 {
        let m = ten_pow(scale as u32)?;
        let n = num
            .checked_mul(m)
            .ok_or_else(|| BeurlingError::Overflow(s.to_string()))?;
        Ok(int(n))
    } else {
        Ok(rat(num, ten_pow((-scale) as u32)?))
    }
}

/// Exact rational for the shortest decimal representation of `x`.
pub fn from_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() || x < 0.0 {
        return Err(BeurlingError::invalid(format!(
            "not a finite nonnegative value: {x}"
        )));
    }
    parse(&format!("{x}"))
}

pub fn floor_u64(r: &Rational) -> u64 {
    r.to_integer().to_u64().unwrap_or(u64::MAX)
}

/// Numerator/denominator pair as used by every JSON and CSV format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: u128,
    pub den: u128,
}

impl From<&Rational> for RationalJson {
    fn from(r: &Rational) -> Self {
        RationalJson {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

impl TryFrom<RationalJson> for Rational {
    type Error = BeurlingError;

    fn try_from(r: RationalJson) -> Result<Self> {
        if r.den == 0 {
            return Err(BeurlingError::invalid(format!(
                "zero denominator in {}/{}",
                r.num, r.den
            )));
        }
        let v = rat(r.num, r.den);
        if *v.numer() != r.num {
            return Err(BeurlingError::invalid(format!(
                "{}/{} is not in lowest terms",
                r.num, r.den
            )));
        }
        Ok(v)
    }
}
