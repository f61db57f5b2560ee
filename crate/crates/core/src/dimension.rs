//! Roots of `p^d + q^d - (pq)^d = 1/2` and of its truncations
//! `2p^x + Σ_{k=1..n} q^{kx} = 1`, bracketed with interval evaluation.

use crate::numeric::{Interval, Params, RoundingFloat, Scalar};
use crate::{Error, Result};

/// Slack, in ulps, granted to each library call (`powf`, `ln`, `exp_m1`).
pub const ULPS: u32 = 4;

/// Default bisection tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimResult<F> {
    /// Midpoint of `bracket`.
    pub d: F,
    /// The root lies in `bracket`.
    pub bracket: Interval<F>,
    /// Encloses the defining function over the whole bracket, so it contains 0.
    pub residual: Interval<F>,
    pub iterations: u32,
    /// False when bisection stopped because interval evaluation could no
    /// longer decide the sign before reaching the tolerance.
    pub converged: bool,
}

fn enclose<S: Scalar, F: RoundingFloat>(x: &S) -> Interval<F> {
    Interval::new(F::floor_rational(&x.lower()), F::ceil_rational(&x.upper()))
}

fn check_tol<F: RoundingFloat>(tol: F) -> Result<()> {
    if tol > F::zero() && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("tolerance {tol:?} must be positive")))
    }
}

fn half<F: RoundingFloat>() -> Interval<F> {
    Interval::point(F::one() / (F::one() + F::one()))
}

/// Bisection for a function that is decreasing on `[lo, hi]`, positive at
/// `lo` and negative at `hi`.
fn bisect<F: RoundingFloat>(
    f: impl Fn(Interval<F>) -> Interval<F>,
    mut lo: F,
    mut hi: F,
    tol: F,
) -> DimResult<F> {
    let zero = F::zero();
    assert!(f(Interval::point(lo)).lo > zero, "no sign change at the left end");
    assert!(f(Interval::point(hi)).hi < zero, "no sign change at the right end");
    let mut iterations = 0;
    let mut converged = false;
    loop {
        let residual = Interval::new(f(Interval::point(hi)).lo, f(Interval::point(lo)).hi);
        let narrow = hi - lo <= tol && residual.lo >= -tol && residual.hi <= tol;
        if narrow {
            converged = true;
        }
        let mid = lo + (hi - lo) / (F::one() + F::one());
        if converged || mid <= lo || mid >= hi {
            let bracket = Interval::new(lo, hi);
            return DimResult {
                d: mid,
                bracket,
                residual,
                iterations,
                converged,
            };
        }
        let v = f(Interval::point(mid));
        iterations += 1;
        if v.lo > zero {
            lo = mid;
        } else if v.hi < zero {
            hi = mid;
        } else {
            let bracket = Interval::new(lo, hi);
            return DimResult {
                d: mid,
                bracket,
                residual,
                iterations,
                converged: false,
            };
        }
    }
}

/// `p^d + q^d - (pq)^d - 1/2`, enclosed.
pub fn dim_function<F: RoundingFloat>(p: Interval<F>, q: Interval<F>, d: Interval<F>) -> Interval<F> {
    let u = p.powf(&d, ULPS);
    let v = q.powf(&d, ULPS);
    u + v - u * v - half()
}

/// Root of the dimension equation, bisected on `[0, 1]` until the bracket
/// and the residual are both within `tol`.
pub fn solve_dim<S: Scalar, F: RoundingFloat>(params: &Params<S>, tol: F) -> Result<DimResult<F>> {
    check_tol(tol)?;
    let p = enclose::<S, F>(params.p());
    let q = enclose::<S, F>(params.q());
    Ok(bisect(|d| dim_function(p, q, d), F::zero(), F::one(), tol))
}

/// `2p^x + Σ_{k=1..n} q^{kx} - 1`, enclosed.
pub fn truncated_function<F: RoundingFloat>(
    p: Interval<F>,
    q: Interval<F>,
    n: u32,
    x: Interval<F>,
) -> Interval<F> {
    let two = Interval::point(F::one() + F::one());
    let qx = q.powf(&x, ULPS);
    let mut term = qx;
    let mut sum = two * p.powf(&x, ULPS);
    for _ in 0..n {
        sum = sum + term;
        term = term * qx;
    }
    sum - Interval::point(F::one())
}

/// Root `d_n` of the truncated equation.
pub fn truncated_dim<S: Scalar, F: RoundingFloat>(
    params: &Params<S>,
    n: u32,
    tol: F,
) -> Result<DimResult<F>> {
    if n == 0 {
        return Err(Error::Invalid("truncation order must be at least 1".into()));
    }
    check_tol(tol)?;
    let p = enclose::<S, F>(params.p());
    let q = enclose::<S, F>(params.q());
    Ok(bisect(|x| truncated_function(p, q, n, x), F::zero(), F::one(), tol))
}

/// Enclosure of `2p^d + Σ_{k=1..terms} q^{kd} + tail - 1` where the tail lies
/// in `[0, q^{(terms+1)d} / (1 - q^d)]`.
pub fn dim_series_residual<S: Scalar, F: RoundingFloat>(
    params: &Params<S>,
    d: Interval<F>,
    terms: u32,
) -> Result<Interval<F>> {
    if !(d.lo > F::zero()) {
        return Err(Error::Invalid(format!("exponent {d:?} must be positive")));
    }
    let p = enclose::<S, F>(params.p());
    let q = enclose::<S, F>(params.q());
    let qd = q.powf(&d, ULPS);
    let partial = truncated_function(p, q, terms, d);
    let tail = qd.powu(terms + 1) / (Interval::point(F::one()) - qd);
    Ok(Interval::new(partial.lo, F::add_up(partial.hi, tail.hi)))
}

/// One rung of the truncation ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rung<F> {
    pub n: u32,
    /// `d - deficit.mid()`; not certified on its own.
    pub d_n: F,
    /// Encloses `d - d_n`.
    pub deficit: Interval<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderResult<F> {
    pub rungs: Vec<Rung<F>>,
    pub d: DimResult<F>,
}

impl<F: RoundingFloat> LadderResult<F> {
    /// `d_1 < d_2 < … < d_N < d`, decided on the deficit enclosures.
    pub fn certified_increasing(&self) -> bool {
        let positive = self.rungs.iter().all(|r| r.deficit.lo > F::zero());
        let strict = self
            .rungs
            .windows(2)
            .all(|w| w[1].deficit.hi < w[0].deficit.lo);
        positive && strict
    }
}

/// `d_n` for `n = 1..=n_max`, each represented by the deficit `ε_n = d - d_n`.
///
/// Subtracting the truncated equation at `d - ε` from the full series at `d`
/// gives `H(ε) = T_n` with
/// `H(ε) = 2p^d expm1(-ε ln p) + Σ_{k≤n} q^{kd} expm1(-kε ln q)` (increasing)
/// and `T_n = q^{(n+1)d} / (1 - q^d)`. Working with `ε` keeps full relative
/// precision after the rungs become indistinguishable as values of `d_n`.
pub fn ladder<S: Scalar, F: RoundingFloat>(
    params: &Params<S>,
    n_max: u32,
    tol: F,
) -> Result<LadderResult<F>> {
    if n_max == 0 {
        return Err(Error::Invalid("ladder needs at least one rung".into()));
    }
    let root = solve_dim::<S, F>(params, tol)?;
    let d = root.bracket;
    let p = enclose::<S, F>(params.p());
    let q = enclose::<S, F>(params.q());
    let one = Interval::point(F::one());
    let two = one + one;
    let pd = p.powf(&d, ULPS);
    let qd = q.powf(&d, ULPS);
    let lnp = p.ln(ULPS);
    let lnq = q.ln(ULPS);
    let mut rungs = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let target = qd.powu(n + 1) / (one - qd);
        let h = |eps: Interval<F>| {
            let mut acc = two * pd * (-(eps * lnp)).exp_m1(ULPS);
            let mut qk = qd;
            for k in 1..=n {
                let kk = Interval::point(F::from(k).expect("small integer"));
                acc = acc + qk * (-(kk * eps * lnq)).exp_m1(ULPS);
                qk = qk * qd;
            }
            acc
        };
        // H(ε) >= 2 p^d ε |ln p|, so the root is below T / (2 p^d |ln p|)
        let mut hi = (target / (two * pd * (-lnp))).hi;
        let mut lo = F::zero();
        let mut eps_lo = F::zero();
        let mut eps_hi = hi;
        for _ in 0..200 {
            let mid = lo + (hi - lo) / (F::one() + F::one());
            if mid <= lo || mid >= hi {
                break;
            }
            let v = h(Interval::point(mid)) - target;
            if v.hi < F::zero() {
                lo = mid;
                eps_lo = mid;
            } else if v.lo > F::zero() {
                hi = mid;
                eps_hi = mid;
            } else {
                break;
            }
        }
        let deficit = Interval::new(eps_lo, eps_hi);
        rungs.push(Rung {
            n,
            d_n: root.d - deficit.mid(),
            deficit,
        });
    }
    Ok(LadderResult { rungs, d: root })
}

/// `ln(1 - √2/2) / ln p`, the root when `p = q`.
pub fn equal_ratio_closed_form(p: f64) -> f64 {
    (1.0 - std::f64::consts::FRAC_1_SQRT_2).ln() / p.ln()
}
