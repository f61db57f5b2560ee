//! Multiplicative density of `{p^m q^n}`: ratio witnesses `p^m / q^n → 1`
//! and the gap functional `Δ_[a,b](X) = d_H(X ∩ [a, b], [a, b])` near points
//! of the attractor.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::ifs::{window_pieces, SetTag, SimilaritySystem, Word};
use crate::numeric::{cf, format_rational, log, rational_to_f64, Params, Scalar, Span};
use crate::{Error, Result};

/// One pair with `p^m / q^n` close to, but different from, 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WspEntry {
    pub m: u64,
    pub n: u64,
    /// Encloses `ln(p^m / q^n) = m ln p - n ln q`; never contains 0.
    pub log_ratio: Span<BigRational>,
}

impl WspEntry {
    /// Nearest `f64` to `p^m / q^n`.
    pub fn ratio(&self) -> f64 {
        rational_to_f64(&self.log_ratio.lo).exp()
    }

    /// Bounds on `|p^m / q^n - 1|`, rounded outward.
    pub fn deviation(&self) -> (f64, f64) {
        let lo = rational_to_f64(&self.log_ratio.lo);
        let hi = rational_to_f64(&self.log_ratio.hi);
        // |e^x - 1| is monotone in x on each side of 0
        let (a, b) = if lo > 0.0 {
            (lo.exp_m1(), hi.exp_m1())
        } else {
            (-hi.exp_m1(), -lo.exp_m1())
        };
        (a.next_down().max(0.0), b.next_up())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WspWitness {
    pub entries: Vec<WspEntry>,
    /// Bits of logarithm precision that certified the list.
    pub precision: u32,
}

/// `count` pairs `(m, n)` with `p^m > q^n` and `|p^m / q^n - 1|` strictly
/// decreasing, from the convergents `m/n` of `ln q / ln p` lying below it,
/// skipping the integer part.
///
/// Precision is doubled from `precision` until the continued-fraction
/// prefix and every separation are certified.
pub fn wsp_witnesses<S: Scalar>(params: &Params<S>, count: usize, precision: u32) -> Result<WspWitness> {
    if count == 0 {
        return Err(Error::Invalid("count must be at least 1".into()));
    }
    if precision < 53 {
        return Err(Error::Precision(precision));
    }
    let (p, q) = (params.p(), params.q());
    let exact = p.lower() == p.upper() && q.lower() == q.upper();
    if exact {
        if let Some((m, n)) = log::multiplicative_relation(&p.lower(), &q.lower()) {
            return Err(Error::DegenerateRatio { m, n });
        }
    }
    let mut bits = precision;
    loop {
        match try_witnesses(params, count, bits) {
            Some(entries) => {
                return Ok(WspWitness {
                    entries,
                    precision: bits,
                })
            }
            None if bits >= 1 << 14 || !exact => return Err(Error::InsufficientPrecision(bits)),
            None => bits *= 2,
        }
    }
}

fn try_witnesses<S: Scalar>(params: &Params<S>, count: usize, bits: u32) -> Option<Vec<WspEntry>> {
    let lp = log::ln_span(&params.p().lower(), &params.p().upper(), bits);
    let lq = log::ln_span(&params.q().lower(), &params.q().upper(), bits);
    let theta = log::ratio_of_negative(&lq, &lp);
    let prefix = cf::common_prefix(&theta.lo, &theta.hi);
    let convergents = cf::convergents(&prefix);
    let mut entries: Vec<WspEntry> = Vec::with_capacity(count);
    for c in convergents.iter().skip(2).step_by(2).take(count) {
        let (m, n) = match (c.numer().to_u64(), c.denom().to_u64()) {
            (Some(m), Some(n)) => (m, n),
            _ => return None,
        };
        let (mi, ni) = (BigRational::from_integer(BigInt::from(m)), BigRational::from_integer(BigInt::from(n)));
        // m ln p - n ln q with both logs negative
        let log_ratio = Span {
            lo: &mi * &lp.lo - &ni * &lq.hi,
            hi: &mi * &lp.hi - &ni * &lq.lo,
        };
        if !(log_ratio.lo.is_positive() || log_ratio.hi.is_negative()) {
            return None;
        }
        if let Some(prev) = entries.last() {
            let (prev_abs_lo, _) = abs_bounds(&prev.log_ratio);
            let (_, abs_hi) = abs_bounds(&log_ratio);
            if abs_hi >= prev_abs_lo {
                return None;
            }
        }
        entries.push(WspEntry { m, n, log_ratio });
    }
    (entries.len() == count).then_some(entries)
}

fn abs_bounds(s: &Span<BigRational>) -> (BigRational, BigRational) {
    if s.lo.is_positive() {
        (s.lo.clone(), s.hi.clone())
    } else {
        (-s.hi.clone(), -s.lo.clone())
    }
}

/// Which side of the anchor the probe window lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

/// A point of the attractor and a side: `S_w(0)` is probed on the right,
/// `S_w(1)` on the left.
#[derive(Debug, Clone, PartialEq)]
pub struct Anchor<S> {
    pub point: S,
    pub side: Side,
}

impl<S: Scalar> Anchor<S> {
    pub fn origin() -> Self {
        Anchor {
            point: S::zero(),
            side: Side::Right,
        }
    }

    /// `S_w(0)`, probed on the right.
    pub fn image_of_zero(sys: &SimilaritySystem<S>, w: &Word) -> Self {
        Anchor {
            point: sys.apply_word(w, &S::zero()),
            side: Side::Right,
        }
    }

    /// `S_w(1)`, probed on the left.
    pub fn image_of_one(sys: &SimilaritySystem<S>, w: &Word) -> Self {
        Anchor {
            point: sys.apply_word(w, &S::one()),
            side: Side::Left,
        }
    }
}

/// Enclosure `[lo, hi]` of `Δ_[0,r](t (X - c))` (or of `Δ_[-r,0]` for a left
/// anchor, reflected to `[0, r]`).
#[derive(Debug, Clone, PartialEq)]
pub struct GapValue {
    pub r: BigRational,
    pub t: BigRational,
    /// From the clipped cover, which contains the set.
    pub lo: BigRational,
    /// From cover endpoints, which are points of the set.
    pub hi: BigRational,
}

/// `Δ_[0,r]` of a sorted union of intervals inside `[0, r]`.
fn delta_of_intervals(ivs: &[(BigRational, BigRational)], r: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut best = ivs[0].0.clone();
    best = best.max(r - &ivs[ivs.len() - 1].1);
    for w in ivs.windows(2) {
        best = best.max((&w[1].0 - &w[0].1) / &two);
    }
    best.max(BigRational::zero())
}

/// `Δ_[0,r]` of the tagged set near `anchor`, scaled by `t`.
///
/// Cylinders meeting the window `[c, c + r/t]` (or `[c - r/t, c]`) are refined
/// to length `(r/t)·max(p, q)^depth`. Depth 0 keeps the single cylinder
/// `[0, 1]`.
pub fn gap_probe<S: Scalar>(
    sys: &SimilaritySystem<S>,
    anchor: &Anchor<S>,
    t: &S,
    r: &S,
    depth: u32,
) -> Result<GapValue> {
    if !(t.lower().is_positive() && r.lower().is_positive()) {
        return Err(Error::Invalid("t and r must be positive".into()));
    }
    let width = r.clone() / t.clone();
    let c = anchor.point.clone();
    let window = match anchor.side {
        Side::Right => Span::new(c.clone(), c.clone() + width.clone()),
        Side::Left => Span::new(c.clone() - width.clone(), c.clone()),
    };
    let pieces = if depth == 0 {
        vec![Span::unit()]
    } else {
        let resolution = width.clone() * sys.lipschitz().powu(depth);
        window_pieces(sys, SetTag::K, &window, &resolution, 64 + depth)
    };

    // offsets from the anchor, scaled; outer bounds for the cover
    let (c_lo, c_hi) = (c.lower(), c.upper());
    let (t_lo, t_hi) = (t.lower(), t.upper());
    let r_q = r.lower();
    let scale_out = |x_lo: BigRational, x_hi: BigRational| -> (BigRational, BigRational) {
        let (d_lo, d_hi) = match anchor.side {
            Side::Right => (x_lo - &c_hi, x_hi - &c_lo),
            Side::Left => (&c_lo - x_hi, &c_hi - x_lo),
        };
        let lo = if d_lo.is_negative() { &d_lo * &t_hi } else { &d_lo * &t_lo };
        let hi = if d_hi.is_negative() { &d_hi * &t_lo } else { &d_hi * &t_hi };
        (lo, hi)
    };

    let mut cover: Vec<(BigRational, BigRational)> = pieces
        .iter()
        .map(|s| scale_out(s.lo.lower(), s.hi.upper()))
        .filter(|(lo, hi)| hi >= &BigRational::zero() && lo <= &r_q)
        .map(|(lo, hi)| (lo.max(BigRational::zero()), hi.min(r_q.clone())))
        .collect();
    if cover.is_empty() {
        return Err(Error::Unresolved);
    }
    cover.sort();
    if cover.iter().any(|(lo, hi)| hi - lo >= r_q) {
        return Err(Error::Unresolved);
    }
    let lo = delta_of_intervals(&cover, &r_q);

    // cylinder endpoints and the anchor are points of the set
    let mut slack = BigRational::zero();
    let mut points: Vec<BigRational> = Vec::new();
    let ends = pieces
        .iter()
        .flat_map(|s| [s.lo.clone(), s.hi.clone()])
        .chain(std::iter::once(c.clone()));
    for x in ends {
        let (a, b) = scale_out(x.lower(), x.upper());
        if !a.is_negative() && b <= r_q {
            slack = slack.max(&b - &a);
            points.push(a);
        }
    }
    points.sort();
    points.dedup();
    let as_ivs: Vec<(BigRational, BigRational)> = points.iter().map(|x| (x.clone(), x.clone())).collect();
    let hi = delta_of_intervals(&as_ivs, &r_q) + slack;
    Ok(GapValue {
        r: r_q,
        t: t.lower(),
        lo,
        hi,
    })
}

/// `Δ_[0,r](t K)` at the origin.
pub fn gap_delta<S: Scalar>(sys: &SimilaritySystem<S>, t: &S, r: &S, depth: u32) -> Result<GapValue> {
    gap_probe(sys, &Anchor::origin(), t, r, depth)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbePoint {
    pub k: u32,
    pub gap: GapValue,
}

/// Gap at `t = (pq)^{-k}` for `k = 0..=k_max`, in ascending `t`.
pub fn limit_probe<S: Scalar>(
    sys: &SimilaritySystem<S>,
    anchor: &Anchor<S>,
    r: &S,
    k_max: u32,
    depth: u32,
) -> Result<Vec<ProbePoint>> {
    let base = S::one() / (sys.params().p().clone() * sys.params().q().clone());
    (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let t = base.powu(k);
            Ok(ProbePoint {
                k,
                gap: gap_probe(sys, anchor, &t, r, depth)?,
            })
        })
        .collect()
}

/// CSV with header `k,t,gap_lo,gap_hi`.
pub fn write_probe_csv<W: std::io::Write>(points: &[ProbePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Invalid(e.to_string());
    w.write_record(["k", "t", "gap_lo", "gap_hi"]).map_err(err)?;
    for pt in points {
        w.write_record([
            pt.k.to_string(),
            format_rational(&pt.gap.t),
            format_rational(&pt.gap.lo),
            format_rational(&pt.gap.hi),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Invalid(e.to_string()))
}

/// `Δ_[0,r]` of any finite point set inside `[0, r]`, exactly.
pub fn delta_of_points(points: &[BigRational], r: &BigRational) -> Option<BigRational> {
    let mut v: Vec<BigRational> = points
        .iter()
        .filter(|x| !x.is_negative() && *x <= r)
        .cloned()
        .collect();
    if v.is_empty() {
        return None;
    }
    v.sort();
    let ivs: Vec<_> = v.into_iter().map(|x| (x.clone(), x)).collect();
    Some(delta_of_intervals(&ivs, r))
}
