use num_rational::BigRational;
use proptest::prelude::*;
use twofold::numeric::{cf, limit_denominator, log, monomial, parse_rational};
use twofold::{Error, ExactParams, Interval32, Interval64, Params, Rational, Scalar};

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..10_000, 1i64..10_000).prop_map(|(n, d)| r(n, d))
}

fn arb_param() -> impl Strategy<Value = Rational> {
    (1i64..=1000, 16i64..=20_000).prop_filter_map("in range", |(n, d)| {
        let x = r(n, d);
        (x <= r(1, 16)).then_some(x)
    })
}

/// `(a b + c) / d - a c`, a mix of every operation.
fn expr<S: Scalar>(a: &S, b: &S, c: &S, d: &S) -> S {
    (a.clone() * b.clone() + c.clone()) / d.clone() - a.clone() * c.clone()
}

fn contains<S: Scalar>(enclosure: &S, exact: &Rational) -> bool {
    &enclosure.lower() <= exact && exact <= &enclosure.upper()
}

proptest! {
    #[test]
    fn interval_results_contain_exact_results(
        a in arb_rational(), b in arb_rational(), c in arb_rational(), d in arb_rational()
    ) {
        prop_assume!(d != Rational::from_integer(0.into()));
        let exact = expr(&a, &b, &c, &d);
        let lift64 = |x: &Rational| Interval64::from_rational(x);
        let lift32 = |x: &Rational| Interval32::from_rational(x);
        prop_assert!(contains(&expr(&lift64(&a), &lift64(&b), &lift64(&c), &lift64(&d)), &exact));
        prop_assert!(contains(&expr(&lift32(&a), &lift32(&b), &lift32(&c), &lift32(&d)), &exact));
    }

    #[test]
    fn powers_contain_exact_powers(a in arb_param(), e in 0u32..40) {
        let exact = num_traits::pow(a.clone(), e as usize);
        prop_assert!(contains(&Interval64::from_rational(&a).powu(e), &exact));
    }

    #[test]
    fn monomials_decrease_in_each_exponent(p in arb_param(), q in arb_param(), m in 0u32..30, n in 0u32..30) {
        let params = ExactParams::from_rationals(&p, &q).unwrap();
        let base = monomial(&params, m, n).unwrap();
        prop_assert!(monomial(&params, m + 1, n).unwrap() < base);
        prop_assert!(monomial(&params, m, n + 1).unwrap() < base);
        let iv = Params::<Interval64>::from_rationals(&p, &q).unwrap();
        prop_assert!(contains(&monomial(&iv, m, n).unwrap(), &base));
    }

    #[test]
    fn log_enclosures_contain_libm(n in 1i64..100_000, d in 1i64..100_000) {
        let x = r(n, d);
        let e = log::ln_enclosure(&x, 80);
        // ln n - ln d avoids the cancellation of ln(n/d) near 1
        let (ln_n, ln_d) = ((n as f64).ln(), (d as f64).ln());
        let f = ln_n - ln_d;
        let tol = 4.0 * f64::EPSILON * (ln_n.abs() + ln_d.abs() + 1.0);
        let lo = twofold::numeric::rational_to_f64(&e.lo);
        let hi = twofold::numeric::rational_to_f64(&e.hi);
        prop_assert!(lo <= f + tol && f - tol <= hi, "{} not in [{}, {}]", f, lo, hi);
    }

    #[test]
    fn simplest_rational_lies_strictly_between(a in arb_rational(), b in arb_rational()) {
        prop_assume!(a != b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let c = cf::simplest_between(&lo, &hi);
        prop_assert!(lo < c && c < hi);
    }

    #[test]
    fn limit_denominator_is_closest(n in 1i64..1_000_000, d in 1i64..1_000_000) {
        let x = r(n, d);
        let max_den = num_bigint::BigInt::from(100);
        let y = limit_denominator(&x, &max_den);
        prop_assert!(y.denom() <= &max_den);
        let err = (&x - &y).abs();
        for den in 1..=100i64 {
            let k = (&x * r(den, 1)).round();
            let z = k / r(den, 1);
            prop_assert!(err <= (&x - &z).abs());
        }
    }
}

trait Abs {
    fn abs(&self) -> Self;
}

impl Abs for BigRational {
    fn abs(&self) -> Self {
        num_traits::Signed::abs(self)
    }
}

#[test]
fn decimals_parse_exactly() {
    assert_eq!(parse_rational("0.05").unwrap(), r(1, 20));
    assert_eq!(parse_rational("0.0625").unwrap(), r(1, 16));
    assert_eq!(parse_rational("3/48").unwrap(), r(1, 16));
    assert_eq!(parse_rational("1e-2").unwrap(), r(1, 100));
    assert!(parse_rational("1/0").is_err());
    assert!(parse_rational("abc").is_err());
}

#[test]
fn parameter_range_is_half_open() {
    assert!(ExactParams::parse("1/16", "1/16").is_ok());
    assert!(ExactParams::parse("1/20", "1/50").is_ok());
    for (p, q) in [("0", "1/20"), ("1/15", "1/20"), ("1/20", "-1/20"), ("1/20", "1")] {
        assert!(
            matches!(ExactParams::parse(p, q), Err(Error::OutOfRange { .. })),
            "({p}, {q})"
        );
    }
}

#[test]
fn exponent_cap_is_enforced() {
    let params = ExactParams::parse("1/20", "1/50").unwrap();
    assert!(matches!(monomial(&params, 4000, 97), Err(Error::ExponentCap { .. })));
    assert!(monomial(&params, 4000, 96).is_ok());
}

#[test]
fn continued_fraction_of_log_ratio() {
    let params = ExactParams::parse("1/20", "1/50").unwrap();
    let x = twofold::numeric::log_ratio(&params, 128).unwrap();
    let terms = cf::common_prefix(&x.lo, &x.hi);
    // ln 20 / ln 50 = [0; 1, 3, 3, ...]
    let f = 20f64.ln() / 50f64.ln();
    assert!(twofold::numeric::rational_to_f64(&x.lo) <= f && f <= twofold::numeric::rational_to_f64(&x.hi) + 1e-15);
    assert_eq!(&terms[..3], &[0.into(), 1.into(), 3.into()]);
}
