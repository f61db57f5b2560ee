//! Continued fractions of exact rationals and of rational enclosures.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Complete continued-fraction expansion of a rational.
pub fn expansion(x: &BigRational) -> Vec<BigInt> {
    let mut out = Vec::new();
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    while !d.is_zero() {
        let (a, r) = n.div_mod_floor(&d);
        out.push(a);
        n = d;
        d = r;
    }
    out
}

/// Partial quotients shared by every real number in `[lo, hi]`.
///
/// Both endpoints have finite expansions; a rational `a` also has the
/// alternative expansion ending in `a_k - 1, 1`, so a quotient is only kept
/// when it is followed by a further agreeing quotient in both expansions.
pub fn common_prefix(lo: &BigRational, hi: &BigRational) -> Vec<BigInt> {
    let a = expansion(lo);
    let b = expansion(hi);
    let mut out = Vec::new();
    for i in 0..a.len().min(b.len()) {
        if a[i] != b[i] {
            break;
        }
        // the last quotient of a finite expansion is ambiguous
        if i + 1 == a.len() || i + 1 == b.len() {
            break;
        }
        out.push(a[i].clone());
    }
    out
}

/// Convergents `h_k / k_k` of a list of partial quotients.
pub fn convergents(terms: &[BigInt]) -> Vec<BigRational> {
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::with_capacity(terms.len());
    for a in terms {
        let h2 = a * &h1 + &h0;
        let k2 = a * &k1 + &k0;
        out.push(BigRational::new(h2.clone(), k2.clone()));
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
    }
    out
}

/// The rational with smallest denominator strictly between `a` and `b`
/// (in either order).
pub fn simplest_between(a: &BigRational, b: &BigRational) -> BigRational {
    assert!(a != b, "empty open interval");
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if lo.is_negative() || hi.is_negative() || lo.is_zero() {
        // shift into the positive half-line where the recursion applies
        let shift = (-lo.floor()) + BigRational::one();
        return simplest_between(&(lo + &shift), &(hi + &shift)) - shift;
    }
    simplest_positive(lo, hi)
}

fn simplest_positive(lo: &BigRational, hi: &BigRational) -> BigRational {
    let fl = lo.floor();
    // an integer strictly inside
    let candidate = &fl + BigRational::one();
    if candidate < *hi {
        return candidate;
    }
    if fl == *lo {
        // lo is an integer and hi <= lo + 1: recurse on (hi - fl)
        let frac_hi = hi - &fl;
        // simplest in (0, frac_hi) is 1/ceil(1/frac_hi + tiny)
        let inv = frac_hi.recip();
        let d = inv.floor() + BigRational::one();
        return fl + d.recip();
    }
    // lo, hi share the integer part; recurse on the reciprocals
    let a = (hi - &fl).recip();
    let b = (lo - &fl).recip();
    fl + simplest_positive(&a, &b).recip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn expands_and_recovers() {
        let x = r(415, 93);
        assert_eq!(expansion(&x), ints(&[4, 2, 6, 7]));
        assert_eq!(convergents(&expansion(&x)).last().unwrap(), &x);
    }

    #[test]
    fn prefix_of_a_narrow_interval() {
        // pi lies in [333/106, 355/113]
        let p = common_prefix(&r(333, 106), &r(355, 113));
        assert_eq!(p, ints(&[3, 7]));
    }

    #[test]
    fn simplest_rationals() {
        assert_eq!(simplest_between(&r(1, 3), &r(1, 2)), r(2, 5));
        assert_eq!(simplest_between(&r(3, 10), &r(4, 10)), r(1, 3));
        assert_eq!(simplest_between(&r(0, 1), &r(1, 5)), r(1, 6));
        assert_eq!(simplest_between(&r(1, 1), &r(3, 1)), r(2, 1));
        assert_eq!(simplest_between(&r(2, 1), &r(3, 1)), r(5, 2));
        assert_eq!(simplest_between(&r(-1, 2), &r(-1, 3)), r(-2, 5));
    }

    #[test]
    fn simplest_is_minimal_by_brute_force() {
        for (an, ad, bn, bd) in [(1, 7, 2, 13), (5, 11, 6, 13), (10, 3, 17, 5), (1, 100, 1, 99)] {
            let (a, b) = (r(an, ad), r(bn, bd));
            let s = simplest_between(&a, &b);
            assert!(a < s && s < b);
            for d in 1..s.denom().to_i64().unwrap() {
                for n in 0..(d * 10) {
                    let c = r(n, d);
                    assert!(!(a < c && c < b), "{c} beats {s}");
                }
            }
        }
    }
}
