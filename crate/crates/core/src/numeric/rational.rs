use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Mode, Scalar};
use crate::{Error, Result};

impl Scalar for BigRational {
    const MODE: Mode = Mode::ExactRational;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_bounds(lo: &BigRational, hi: &BigRational) -> Option<Self> {
        (lo == hi).then(|| lo.clone())
    }

    fn lower(&self) -> BigRational {
        self.clone()
    }

    fn upper(&self) -> BigRational {
        self.clone()
    }

    fn approx(&self) -> f64 {
        rational_to_f64(self)
    }

    fn certainly_lt(&self, other: &Self) -> bool {
        self < other
    }

    fn certainly_le(&self, other: &Self) -> bool {
        self <= other
    }

    fn certainly_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn min_with(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    fn max_with(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    fn magnitude(&self) -> Self {
        self.abs()
    }
}

/// Nearest-ish `f64`; exact conversion is not required by callers, which
/// correct the result against the rational when they need a bound.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(f) = r.to_f64() {
        if f.is_finite() {
            return f;
        }
    }
    // scale both parts down to keep the division finite
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb.max(db) - 1000;
    if shift <= 0 {
        return r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN);
    }
    let n = (r.numer() >> shift.min(nb) as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift.min(db) as usize).to_f64().unwrap_or(0.0);
    let corr = (shift.min(nb) - shift.min(db)) as i32;
    n / d * 2f64.powi(corr)
}

/// Renders `n` for integers and `n/d` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"n"`, `"n/d"`, or a decimal such as `"0.05"` or `"1.5e-3"`,
/// always exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let err = || Error::ParseRational(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| err())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: BigInt = format!("0{}{}", int_part, frac_part)
        .parse()
        .map_err(|_| err())?;
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 100_000 {
        return Err(err());
    }
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Closest rational to `x` with denominator at most `max_den`.
pub fn limit_denominator(x: &BigRational, max_den: &BigInt) -> BigRational {
    assert!(max_den >= &BigInt::one());
    if x.denom() <= max_den {
        return x.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (
        BigInt::zero(),
        BigInt::one(),
        BigInt::one(),
        BigInt::zero(),
    );
    let mut n = x.numer().clone();
    let mut d = x.denom().clone();
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
    }
    let k = (max_den - &q0).div_floor(&q1);
    let bound1 = BigRational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let bound2 = BigRational::new(p1, q1);
    if (&bound2 - x).abs() <= (&bound1 - x).abs() {
        bound2
    } else {
        bound1
    }
}
