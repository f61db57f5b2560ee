//! Certified natural logarithms of rationals and exact detection of
//! multiplicative relations `p^m = q^n`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Span;

fn two_pow(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Rounds down (or up) to a multiple of `2^-bits`.
fn dyadic(x: &BigRational, bits: u32, up: bool) -> BigRational {
    let scaled = x * BigRational::from_integer(BigInt::one() << bits as usize);
    let n = if up { scaled.ceil() } else { scaled.floor() };
    BigRational::new(n.to_integer(), BigInt::one() << bits as usize)
}

/// `atanh(z)` for `|z| <= 1/3`, returned as `(approximation, error bound)`.
///
/// Intermediate values are rounded to `2^-(bits+16)`; each rounding adds at
/// most one unit to the sum and, through the power chain (ratio `z^2 <= 1/9`),
/// at most two more.
fn atanh_series(z: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let eps = two_pow(-(bits as i64));
    let fine = bits + 16;
    let unit = two_pow(-(fine as i64));
    let z2 = dyadic(&(z * z), fine + 8, true);
    let one_minus = BigRational::one() - &z2;
    let mut power = dyadic(z, fine, false);
    let mut sum = BigRational::zero();
    let mut rounding = unit.clone();
    let mut j: i64 = 0;
    loop {
        let term = &power / BigRational::from_integer(BigInt::from(2 * j + 1));
        sum = dyadic(&(sum + term), fine, false);
        power = dyadic(&(&power * (z * z)), fine, false);
        rounding += BigRational::from_integer(BigInt::from(3)) * &unit;
        j += 1;
        // |tail| <= |z|^(2j+1) / ((2j+1)(1 - z^2))
        let tail =
            (power.abs() + &unit) / (BigRational::from_integer(BigInt::from(2 * j + 1)) * &one_minus);
        if tail <= eps {
            return (sum, tail + rounding);
        }
    }
}

/// Enclosure of `ln x` for rational `x > 0` with width about `2^-bits`
/// (times `1 + |log2 x|`).
pub fn ln_enclosure(x: &BigRational, bits: u32) -> Span<BigRational> {
    assert!(x.is_positive(), "logarithm of a non-positive number");
    if x.is_one() {
        return Span {
            lo: BigRational::zero(),
            hi: BigRational::zero(),
        };
    }
    let work = bits + 8;
    // x = 2^k y with y in [2/3, 4/3), so |z| <= 1/7
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let lower = BigRational::new(BigInt::from(2), BigInt::from(3));
    let upper = BigRational::new(BigInt::from(4), BigInt::from(3));
    let mut y = x / two_pow(k);
    while y >= upper {
        y /= BigRational::from_integer(BigInt::from(2));
        k += 1;
    }
    while y < lower {
        y *= BigRational::from_integer(BigInt::from(2));
        k -= 1;
    }
    let one = BigRational::one();
    let z = (&y - &one) / (&y + &one);
    let (s, t) = atanh_series(&z, work);
    let two = BigRational::from_integer(BigInt::from(2));
    let mut lo = &two * (&s - &t);
    let mut hi = &two * (&s + &t);
    if k != 0 {
        let (s2, t2) = atanh_series(&BigRational::new(BigInt::one(), BigInt::from(3)), work + 16);
        let ln2_lo = &two * (&s2 - &t2);
        let ln2_hi = &two * (&s2 + &t2);
        let kk = BigRational::from_integer(BigInt::from(k));
        if k > 0 {
            lo += &kk * ln2_lo;
            hi += &kk * ln2_hi;
        } else {
            lo += &kk * ln2_hi;
            hi += &kk * ln2_lo;
        }
    }
    Span {
        lo: dyadic(&lo, work, false),
        hi: dyadic(&hi, work, true),
    }
}

/// Enclosure of `ln` over `[lo, hi]`.
pub fn ln_span(lo: &BigRational, hi: &BigRational, bits: u32) -> Span<BigRational> {
    let a = ln_enclosure(lo, bits);
    if lo == hi {
        return a;
    }
    let b = ln_enclosure(hi, bits);
    Span { lo: a.lo, hi: b.hi }
}

/// Enclosure of `a / b` for enclosures of two negative numbers.
pub fn ratio_of_negative(a: &Span<BigRational>, b: &Span<BigRational>) -> Span<BigRational> {
    assert!(a.hi.is_negative() && b.hi.is_negative());
    // a/b = |a|/|b|; smallest with smallest |a| and largest |b|
    Span {
        lo: (-&a.hi) / (-&b.lo),
        hi: (-&a.lo) / (-&b.hi),
    }
}

/// `x = r^e` with `e` maximal. For `x = 1` returns `(1, 0)`.
pub fn perfect_power(x: &BigUint) -> (BigUint, u64) {
    if x.is_one() {
        return (BigUint::one(), 0);
    }
    let bits = x.bits();
    for e in (2..=bits).rev() {
        let r = x.nth_root(e as u32);
        if r.pow(e as u32) == *x {
            return (r, e);
        }
    }
    (x.clone(), 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Constraint {
    Any,
    Never,
    Ratio(u64, u64),
}

fn integer_relation(a: &BigUint, c: &BigUint) -> Constraint {
    match (a.is_one(), c.is_one()) {
        (true, true) => Constraint::Any,
        (true, false) | (false, true) => Constraint::Never,
        _ => {
            let (ra, ea) = perfect_power(a);
            let (rc, ec) = perfect_power(c);
            if ra != rc {
                return Constraint::Never;
            }
            // a^m = c^n  <=>  ea m = ec n
            let g = ea.gcd(&ec);
            Constraint::Ratio(ec / g, ea / g)
        }
    }
}

/// Smallest `(m, n)` with `m, n >= 1` and `p^m = q^n`, for positive rationals
/// different from one.
pub fn multiplicative_relation(p: &BigRational, q: &BigRational) -> Option<(u64, u64)> {
    assert!(p.is_positive() && q.is_positive());
    if p.is_one() || q.is_one() {
        return None;
    }
    let num = integer_relation(
        &p.numer().magnitude().clone(),
        &q.numer().magnitude().clone(),
    );
    let den = integer_relation(
        &p.denom().magnitude().clone(),
        &q.denom().magnitude().clone(),
    );
    match (num, den) {
        (Constraint::Never, _) | (_, Constraint::Never) => None,
        (Constraint::Any, Constraint::Any) => None,
        (Constraint::Ratio(m, n), Constraint::Any) | (Constraint::Any, Constraint::Ratio(m, n)) => {
            Some((m, n))
        }
        (Constraint::Ratio(m1, n1), Constraint::Ratio(m2, n2)) => {
            (m1 * n2 == m2 * n1).then_some((m1, n1))
        }
    }
}
