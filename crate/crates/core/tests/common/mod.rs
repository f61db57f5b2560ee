//! Samplers and oracles shared by the integration tests and the acceptance
//! binary.
#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use twofold::ifs::{Address, SimilaritySystem, Word};
use twofold::numeric::Span;
use twofold::tfcert::in_window;
use twofold::{ExactParams, Rational};

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Uniform-ish rational in `(0, 1/16]` with a denominator below `2^20`.
pub fn random_param<R: Rng>(rng: &mut R) -> Rational {
    let d: i64 = 1 << 20;
    let n = rng.random_range(1..=d / 16);
    r(n, d)
}

pub fn random_word<R: Rng>(rng: &mut R, len: usize) -> Word {
    Word::new((0..len).map(|_| rng.random_range(1..=4u8)).collect()).unwrap()
}

/// One instance of the two-parameter perturbation inequality: `p`, a pair
/// `(m, n)`, two `q` in the window set `D_mn(p)`, truncated addresses and
/// inner letters `i, j`.
#[derive(Debug, Clone)]
pub struct PerturbationCase {
    pub p: Rational,
    pub q: Rational,
    pub q2: Rational,
    pub m: u32,
    pub n: u32,
    pub i: u8,
    pub j: u8,
    pub sigma: Word,
    pub tau: Word,
}

fn rational_between<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Option<Rational> {
    let x = lo + (hi - lo) * rng.random::<f64>();
    let v = BigRational::from_float(x)?;
    // keep denominators moderate
    let den = num_bigint::BigInt::from(1u64 << 40);
    Some(twofold::numeric::limit_denominator(&v, &den))
}

fn in_d(p: &Rational, q: &Rational, m: u32, n: u32) -> bool {
    q.is_positive()
        && *q < r(1, 16)
        && in_window(&(num_traits::pow(q.clone(), n as usize) / num_traits::pow(p.clone(), m as usize)))
}

pub fn perturbation_case<R: Rng>(rng: &mut R, depth: usize) -> PerturbationCase {
    loop {
        let p = random_param(rng);
        if p >= r(1, 16) {
            continue;
        }
        let m = rng.random_range(1..=6u32);
        let n = rng.random_range(1..=6u32);
        let pf = twofold::numeric::rational_to_f64(&p);
        let lo = (15.0 / 16.0 * pf.powi(m as i32)).powf(1.0 / n as f64);
        let hi = ((16.0 / 15.0) * pf.powi(m as i32)).powf(1.0 / n as f64).min(1.0 / 16.0);
        if !(lo < hi) {
            continue;
        }
        let (Some(q), Some(q2)) = (rational_between(rng, lo, hi), rational_between(rng, lo, hi)) else {
            continue;
        };
        if q == q2 || !in_d(&p, &q, m, n) || !in_d(&p, &q2, m, n) {
            continue;
        }
        return PerturbationCase {
            p,
            q,
            q2,
            m,
            n,
            i: rng.random_range(3..=4),
            j: rng.random_range(3..=4),
            sigma: random_word(rng, depth),
            tau: random_word(rng, depth),
        };
    }
}

fn phi(sys: &SimilaritySystem<Rational>, lead: u8, count: u32, inner: u8, w: &Word) -> Span<Rational> {
    let prefix = Word::repeat(lead, count as usize).unwrap().concat(&Word::new(vec![inner]).unwrap());
    let x = sys.address_point(&Address::truncated(w.clone()).unwrap()).unwrap();
    sys.word_map(&prefix).apply_span(&x)
}

/// Lower bound of `|φ1(q,σ) - φ2(q,τ) - φ1(q',σ) + φ2(q',τ)|` and the
/// right-hand side `11 p^m |q' - q|`.
pub fn perturbation_sides(c: &PerturbationCase) -> (Rational, Rational) {
    let s = SimilaritySystem::new(ExactParams::from_rationals(&c.p, &c.q).unwrap());
    let s2 = SimilaritySystem::new(ExactParams::from_rationals(&c.p, &c.q2).unwrap());
    let a = phi(&s, 1, c.m, c.i, &c.sigma);
    let b = phi(&s, 2, c.n, c.j, &c.tau);
    let a2 = phi(&s2, 1, c.m, c.i, &c.sigma);
    let b2 = phi(&s2, 2, c.n, c.j, &c.tau);
    // interval sum a - b - a2 + b2
    let lo = &a.lo - &b.hi - &a2.hi + &b2.lo;
    let hi = &a.hi - &b.lo - &a2.lo + &b2.hi;
    let lower = if lo.is_positive() {
        lo
    } else if hi.is_negative() {
        -hi
    } else {
        Rational::zero()
    };
    let rhs = r(11, 1) * num_traits::pow(c.p.clone(), c.m as usize) * (&c.q2 - &c.q).abs();
    (lower, rhs)
}

pub fn one() -> Rational {
    Rational::one()
}
