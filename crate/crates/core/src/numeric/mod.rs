//! Scalar kernel: exact rationals and outward-rounded intervals.
//!
//! Everything geometric in this crate is written against [`Scalar`]. The two
//! families of implementations are:
//!
//! * `BigRational` (`Mode::ExactRational`): closed under `+ - * /` and integer
//!   powers, comparisons are decisive. Certificates are produced in this mode.
//! * [`Interval<F>`] for `F = f32 | f64` (`Mode::RoundedInterval`): every
//!   operation rounds outward, so the true real result always lies inside
//!   `[lo, hi]`. Comparisons only answer when the enclosures separate.

pub mod cf;
mod interval;
pub mod log;
mod rational;
mod span;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub use interval::{Interval, RoundingFloat};
pub use rational::{format_rational, limit_denominator, parse_rational, rational_to_f64};
pub use span::{distance_to_merged, first_meeting, merge_spans, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Mode {
    ExactRational,
    RoundedInterval,
}

/// A real number, either exactly or as a certified enclosure.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    /// Smallest enclosure of `r` representable in this type.
    fn from_rational(r: &BigRational) -> Self;

    /// Value enclosing `[lo, hi]`, if this type can represent it.
    fn from_bounds(lo: &BigRational, hi: &BigRational) -> Option<Self>;

    /// Exact rational lower bound of the represented value.
    fn lower(&self) -> BigRational;

    /// Exact rational upper bound of the represented value.
    fn upper(&self) -> BigRational;

    /// Nearest `f64` to the value (midpoint for enclosures). Not certified.
    fn approx(&self) -> f64;

    fn certainly_lt(&self, other: &Self) -> bool;

    fn certainly_le(&self, other: &Self) -> bool;

    /// True only when both values are provably the same real number.
    fn certainly_eq(&self, other: &Self) -> bool;

    /// A total order used for sorting. Consistent with `certainly_lt`:
    /// `a.certainly_lt(b)` implies `a.key_cmp(b) == Less`.
    fn key_cmp(&self, other: &Self) -> Ordering;

    fn min_with(&self, other: &Self) -> Self;

    fn max_with(&self, other: &Self) -> Self;

    fn magnitude(&self) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn powu(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    fn is_exact() -> bool {
        Self::MODE == Mode::ExactRational
    }
}

/// Budgets that keep exact computations bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest total exponent `m + n` of a monomial `p^m q^n`.
    pub max_exponent: u32,
    /// Largest depth accepted by uniform cover construction.
    pub max_cover_depth: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_exponent: 4096,
            max_cover_depth: 10,
        }
    }
}

impl Caps {
    pub fn check_exponent(&self, total: u64) -> Result<()> {
        if total > self.max_exponent as u64 {
            return Err(Error::ExponentCap {
                requested: total,
                cap: self.max_exponent,
            });
        }
        Ok(())
    }
}

/// A validated parameter pair `(p, q)` in `(0, 1/16]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Params<S> {
    p: S,
    q: S,
}

fn sixteenth() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(16))
}

fn check_range<S: Scalar>(name: &'static str, v: &S) -> Result<()> {
    let ok = v.lower() > BigRational::zero() && v.upper() <= sixteenth();
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value: format!("{:?}", v),
        })
    }
}

impl<S: Scalar> Params<S> {
    /// Rejects values whose enclosure is not entirely inside `(0, 1/16]`.
    /// The closed end keeps `1 - max(p, q) >= 15/16`, which the window
    /// argument needs.
    pub fn new(p: S, q: S) -> Result<Self> {
        check_range("p", &p)?;
        check_range("q", &q)?;
        Ok(Params { p, q })
    }

    pub fn from_rationals(p: &BigRational, q: &BigRational) -> Result<Self> {
        if !in_open_range(p) {
            return Err(Error::OutOfRange {
                name: "p",
                value: format_rational(p),
            });
        }
        if !in_open_range(q) {
            return Err(Error::OutOfRange {
                name: "q",
                value: format_rational(q),
            });
        }
        Self::new(S::from_rational(p), S::from_rational(q))
    }

    /// Parses `p` and `q` from `"num/den"` or decimal strings.
    pub fn parse(p: &str, q: &str) -> Result<Self> {
        Self::from_rationals(&parse_rational(p)?, &parse_rational(q)?)
    }

    pub fn p(&self) -> &S {
        &self.p
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    /// `max(p, q)`, the largest contraction ratio of the system.
    pub fn lipschitz(&self) -> S {
        self.p.max_with(&self.q)
    }

    pub fn mode(&self) -> Mode {
        S::MODE
    }

    /// Same pair with `p` and `q` exchanged.
    pub fn swapped(&self) -> Self {
        Params {
            p: self.q.clone(),
            q: self.p.clone(),
        }
    }

    /// Converts to another scalar type through rational enclosures.
    pub fn convert<T: Scalar>(&self) -> Result<Params<T>> {
        Params::new(convert_scalar(&self.p)?, convert_scalar(&self.q)?)
    }
}

fn in_open_range(r: &BigRational) -> bool {
    r.is_positive() && *r <= sixteenth()
}

/// Converts between scalar types. Fails when an enclosure is narrowed into
/// an exact type.
pub fn convert_scalar<S: Scalar, T: Scalar>(x: &S) -> Result<T> {
    T::from_bounds(&x.lower(), &x.upper())
        .ok_or_else(|| Error::Invalid(format!("{:?} has no exact representation", x)))
}

/// `p^m q^n` with the default exponent cap.
pub fn monomial<S: Scalar>(params: &Params<S>, m: u32, n: u32) -> Result<S> {
    monomial_capped(params, m, n, &Caps::default())
}

pub fn monomial_capped<S: Scalar>(params: &Params<S>, m: u32, n: u32, caps: &Caps) -> Result<S> {
    caps.check_exponent(m as u64 + n as u64)?;
    Ok(params.p.powu(m) * params.q.powu(n))
}

/// Enclosure of `log p / log q` with relative width at most `2^(1 - precision)`.
pub fn log_ratio<S: Scalar>(params: &Params<S>, precision: u32) -> Result<Span<BigRational>> {
    if precision < 53 {
        return Err(Error::Precision(precision));
    }
    let lp = log::ln_span(&params.p.lower(), &params.p.upper(), precision + 16);
    let lq = log::ln_span(&params.q.lower(), &params.q.upper(), precision + 16);
    Ok(log::ratio_of_negative(&lp, &lq))
}
