use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, Zero};

use super::{Mode, Scalar};

/// Binary floating type with directed-rounding helpers.
///
/// Rounding direction is emulated with error-free transforms (TwoSum, FMA
/// residuals): the nearest result is computed, its exact error recovered,
/// and the result nudged one ulp when the error points outward.
pub trait RoundingFloat: Float + fmt::Debug + Send + Sync + 'static {
    fn next_up(self) -> Self;
    fn next_down(self) -> Self;
    fn to_rational(self) -> BigRational;
    fn nearest(r: &BigRational) -> Self;

    /// Magnitude below which FMA residuals may be inexact.
    fn tiny() -> Self;

    fn add_down(a: Self, b: Self) -> Self {
        let s = a + b;
        if two_sum_err(a, b, s) < Self::zero() {
            s.next_down()
        } else {
            s
        }
    }

    fn add_up(a: Self, b: Self) -> Self {
        let s = a + b;
        if two_sum_err(a, b, s) > Self::zero() {
            s.next_up()
        } else {
            s
        }
    }

    fn mul_down(a: Self, b: Self) -> Self {
        let p = a * b;
        if a.is_zero() || b.is_zero() {
            return p;
        }
        if p.abs() < Self::tiny() {
            return p.next_down();
        }
        if a.mul_add(b, -p) < Self::zero() {
            p.next_down()
        } else {
            p
        }
    }

    fn mul_up(a: Self, b: Self) -> Self {
        let p = a * b;
        if a.is_zero() || b.is_zero() {
            return p;
        }
        if p.abs() < Self::tiny() {
            return p.next_up();
        }
        if a.mul_add(b, -p) > Self::zero() {
            p.next_up()
        } else {
            p
        }
    }

    fn div_down(a: Self, b: Self) -> Self {
        let q = a / b;
        if a.is_zero() {
            return q;
        }
        if q.abs() < Self::tiny() || !q.is_finite() {
            return q.next_down();
        }
        // a - q*b exactly; the true quotient exceeds q iff residual/b > 0
        let r = (-q).mul_add(b, a);
        if (r < Self::zero()) == (b > Self::zero()) && r != Self::zero() {
            q.next_down()
        } else {
            q
        }
    }

    fn div_up(a: Self, b: Self) -> Self {
        let q = a / b;
        if a.is_zero() {
            return q;
        }
        if q.abs() < Self::tiny() || !q.is_finite() {
            return q.next_up();
        }
        let r = (-q).mul_add(b, a);
        if (r > Self::zero()) == (b > Self::zero()) && r != Self::zero() {
            q.next_up()
        } else {
            q
        }
    }

    /// Largest float `<= r`.
    fn floor_rational(r: &BigRational) -> Self {
        let mut f = Self::nearest(r);
        while f.is_finite() && f.to_rational() > *r {
            f = f.next_down();
        }
        f
    }

    /// Smallest float `>= r`.
    fn ceil_rational(r: &BigRational) -> Self {
        let mut f = Self::nearest(r);
        while f.is_finite() && f.to_rational() < *r {
            f = f.next_up();
        }
        f
    }

    fn down_by(self, ulps: u32) -> Self {
        (0..ulps).fold(self, |x, _| x.next_down())
    }

    fn up_by(self, ulps: u32) -> Self {
        (0..ulps).fold(self, |x, _| x.next_up())
    }
}

fn two_sum_err<F: Float>(a: F, b: F, s: F) -> F {
    let bb = s - a;
    let aa = s - bb;
    (a - aa) + (b - bb)
}

fn float_to_rational<F: Float>(x: F) -> BigRational {
    let (mantissa, exponent, sign) = x.integer_decode();
    let m = BigInt::from(mantissa) * BigInt::from(sign);
    if exponent >= 0 {
        BigRational::from_integer(m << exponent as usize)
    } else {
        BigRational::new(m, BigInt::one() << (-exponent) as usize)
    }
}

impl RoundingFloat for f64 {
    fn next_up(self) -> Self {
        f64::next_up(self)
    }
    fn next_down(self) -> Self {
        f64::next_down(self)
    }
    fn to_rational(self) -> BigRational {
        float_to_rational(self)
    }
    fn nearest(r: &BigRational) -> Self {
        super::rational_to_f64(r)
    }
    fn tiny() -> Self {
        // 2^-960 leaves room for the 53-bit residual above the subnormals
        f64::MIN_POSITIVE * 2f64.powi(62)
    }
}

impl RoundingFloat for f32 {
    fn next_up(self) -> Self {
        f32::next_up(self)
    }
    fn next_down(self) -> Self {
        f32::next_down(self)
    }
    fn to_rational(self) -> BigRational {
        float_to_rational(self)
    }
    fn nearest(r: &BigRational) -> Self {
        super::rational_to_f64(r) as f32
    }
    fn tiny() -> Self {
        f32::MIN_POSITIVE * 2f32.powi(30)
    }
}

/// Closed interval `[lo, hi]` of binary floats with outward rounding.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval<F> {
    pub lo: F,
    pub hi: F,
}

impl<F: fmt::Debug> fmt::Debug for Interval<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl<F: RoundingFloat> Interval<F> {
    pub fn new(lo: F, hi: F) -> Self {
        debug_assert!(!(lo > hi), "inverted interval [{:?}, {:?}]", lo, hi);
        Interval { lo, hi }
    }

    pub fn point(x: F) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> F {
        F::add_up(self.hi, -self.lo)
    }

    pub fn mid(&self) -> F {
        let two = F::one() + F::one();
        self.lo / two + self.hi / two
    }

    pub fn contains_value(&self, x: F) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn hull(&self, other: &Self) -> Self {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// Widens both ends by `ulps` units in the last place.
    pub fn widen(&self, ulps: u32) -> Self {
        Interval::new(self.lo.down_by(ulps), self.hi.up_by(ulps))
    }

    /// `self^exponent` for a positive base, with `ulps` of slack per
    /// library call at each corner.
    pub fn powf(&self, exponent: &Self, ulps: u32) -> Self {
        debug_assert!(self.lo > F::zero());
        let corners = [
            self.lo.powf(exponent.lo),
            self.lo.powf(exponent.hi),
            self.hi.powf(exponent.lo),
            self.hi.powf(exponent.hi),
        ];
        let lo = corners.iter().copied().fold(F::infinity(), F::min);
        let hi = corners.iter().copied().fold(F::neg_infinity(), F::max);
        Interval::new(lo.down_by(ulps).max(F::zero()), hi.up_by(ulps))
    }

    pub fn ln(&self, ulps: u32) -> Self {
        Interval::new(self.lo.ln().down_by(ulps), self.hi.ln().up_by(ulps))
    }

    pub fn exp_m1(&self, ulps: u32) -> Self {
        Interval::new(self.lo.exp_m1().down_by(ulps), self.hi.exp_m1().up_by(ulps))
    }
}

impl<F: RoundingFloat> Add for Interval<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Interval::new(F::add_down(self.lo, rhs.lo), F::add_up(self.hi, rhs.hi))
    }
}

impl<F: RoundingFloat> Sub for Interval<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Interval::new(F::add_down(self.lo, -rhs.hi), F::add_up(self.hi, -rhs.lo))
    }
}

impl<F: RoundingFloat> Neg for Interval<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Interval::new(-self.hi, -self.lo)
    }
}

impl<F: RoundingFloat> Mul for Interval<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let pairs = [
            (self.lo, rhs.lo),
            (self.lo, rhs.hi),
            (self.hi, rhs.lo),
            (self.hi, rhs.hi),
        ];
        let mut lo = F::infinity();
        let mut hi = F::neg_infinity();
        for (a, b) in pairs {
            lo = lo.min(F::mul_down(a, b));
            hi = hi.max(F::mul_up(a, b));
        }
        Interval::new(lo, hi)
    }
}

impl<F: RoundingFloat> Div for Interval<F> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if rhs.lo <= F::zero() && rhs.hi >= F::zero() {
            return Interval::new(F::neg_infinity(), F::infinity());
        }
        let pairs = [
            (self.lo, rhs.lo),
            (self.lo, rhs.hi),
            (self.hi, rhs.lo),
            (self.hi, rhs.hi),
        ];
        let mut lo = F::infinity();
        let mut hi = F::neg_infinity();
        for (a, b) in pairs {
            lo = lo.min(F::div_down(a, b));
            hi = hi.max(F::div_up(a, b));
        }
        Interval::new(lo, hi)
    }
}

impl<F: RoundingFloat> Zero for Interval<F> {
    fn zero() -> Self {
        Interval::point(F::zero())
    }
    fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
}

impl<F: RoundingFloat> One for Interval<F> {
    fn one() -> Self {
        Interval::point(F::one())
    }
}

impl<F: RoundingFloat> Scalar for Interval<F> {
    const MODE: Mode = Mode::RoundedInterval;

    fn from_rational(r: &BigRational) -> Self {
        Interval::new(F::floor_rational(r), F::ceil_rational(r))
    }

    fn from_bounds(lo: &BigRational, hi: &BigRational) -> Option<Self> {
        Some(Interval::new(F::floor_rational(lo), F::ceil_rational(hi)))
    }

    fn lower(&self) -> BigRational {
        self.lo.to_rational()
    }

    fn upper(&self) -> BigRational {
        self.hi.to_rational()
    }

    fn approx(&self) -> f64 {
        self.mid().to_f64().unwrap_or(f64::NAN)
    }

    fn certainly_lt(&self, other: &Self) -> bool {
        self.hi < other.lo
    }

    fn certainly_le(&self, other: &Self) -> bool {
        self.hi <= other.lo
    }

    fn certainly_eq(&self, other: &Self) -> bool {
        self.lo == self.hi && other.lo == other.hi && self.lo == other.lo
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.lo
            .partial_cmp(&other.lo)
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.hi.partial_cmp(&other.hi).unwrap_or(Ordering::Equal))
    }

    fn min_with(&self, other: &Self) -> Self {
        Interval::new(self.lo.min(other.lo), self.hi.min(other.hi))
    }

    fn max_with(&self, other: &Self) -> Self {
        Interval::new(self.lo.max(other.lo), self.hi.max(other.hi))
    }

    fn magnitude(&self) -> Self {
        if self.lo >= F::zero() {
            *self
        } else if self.hi <= F::zero() {
            -*self
        } else {
            Interval::new(F::zero(), self.hi.max(-self.lo))
        }
    }
}
