//! Bounded certification of the twofold condition.
//!
//! For a pair `(m, n)` the sets `S_1^m(A)` and `S_2^n(A)` are enclosed by
//! cylinder covers that are refined until they separate, an exact common
//! point is found, or the depth budget runs out.
//!
//! Only the reduced condition on `S_1^m(A)` and `S_2^n(A)` is checked.
//! Disjointness of `S_1^{m1} S_2^{n1}(A)` and `S_1^{m2} S_2^{n2}(A)` follows
//! from it: `S_1` and `S_2` are linear and commute, so common leading
//! factors cancel.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::ifs::{Address, Affine, SimilaritySystem, Word};
use crate::numeric::{
    distance_to_merged, first_meeting, format_rational, merge_spans, rational_to_f64, Caps, Mode,
    Params, Scalar, Span,
};
use crate::{Error, Result};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowResult {
    OutsideWindow,
    Candidate,
}

fn window_bounds() -> (BigRational, BigRational) {
    (
        BigRational::new(15.into(), 16.into()),
        BigRational::new(16.into(), 15.into()),
    )
}

fn check_pair(m: u32, n: u32) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::Invalid(format!("pair ({m}, {n}) needs m, n >= 1")));
    }
    Ok(())
}

/// Whether `q^n / p^m` can lie in `[15/16, 16/15]`.
///
/// Exact parameters get a decisive answer. Interval parameters answer
/// `OutsideWindow` only when the enclosure of the ratio misses the window.
pub fn window_test<S: Scalar>(params: &Params<S>, m: u32, n: u32) -> Result<WindowResult> {
    check_pair(m, n)?;
    if S::is_exact() {
        // log-space prefilter; the margin dwarfs every rounding error involved
        let (lp, lq) = (params.p().approx().ln(), params.q().approx().ln());
        let scale = 1.0 + m as f64 * lp.abs() + n as f64 * lq.abs();
        let margin = 1e-9 * scale;
        let x = n as f64 * lq - m as f64 * lp;
        let edge = (16.0f64 / 15.0).ln();
        if x.abs() > edge + margin {
            return Ok(WindowResult::OutsideWindow);
        }
        if x.abs() < edge - margin {
            return Ok(WindowResult::Candidate);
        }
    }
    Caps::default().check_exponent(m as u64 + n as u64)?;
    let ratio = params.q().powu(n) / params.p().powu(m);
    let (lo, hi) = window_bounds();
    let lo = S::from_rational(&lo);
    let hi = S::from_rational(&hi);
    if ratio.certainly_lt(&lo) || hi.certainly_lt(&ratio) {
        Ok(WindowResult::OutsideWindow)
    } else {
        Ok(WindowResult::Candidate)
    }
}

/// Two addresses with the same exact value, one in each set.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapWitness {
    pub u: Address,
    pub v: Address,
    pub value: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairStatus {
    /// `gap` is a positive lower bound on the distance between the sets.
    Disjoint { gap: BigRational, by_window: bool },
    Overlap(OverlapWitness),
    /// Covers at the depth budget still meet; `residual` is the total length
    /// of their intersection.
    Unknown { residual: BigRational },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairVerdict {
    pub m: u32,
    pub n: u32,
    pub status: PairStatus,
}

impl PairVerdict {
    pub fn is_disjoint(&self) -> bool {
        matches!(self.status, PairStatus::Disjoint { .. })
    }

    pub fn is_overlap(&self) -> bool {
        matches!(self.status, PairStatus::Overlap(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self.status, PairStatus::Unknown { .. })
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "m": self.m, "n": self.n });
        let obj = v.as_object_mut().expect("object");
        match &self.status {
            PairStatus::Disjoint { gap, by_window } => {
                obj.insert("status".into(), json!("Disjoint"));
                obj.insert("gap".into(), rational_json(gap));
                obj.insert("by_window".into(), json!(by_window));
            }
            PairStatus::Overlap(w) => {
                obj.insert("status".into(), json!("Overlap"));
                obj.insert(
                    "witness".into(),
                    json!({
                        "u": w.u.to_string(),
                        "v": w.v.to_string(),
                        "value": rational_json(&w.value),
                    }),
                );
            }
            PairStatus::Unknown { residual } => {
                obj.insert("status".into(), json!("Unknown"));
                obj.insert("residual".into(), rational_json(residual));
            }
        }
        v
    }
}

/// `{"rational": "n/d", "decimal": f64}`.
pub fn rational_json(x: &BigRational) -> Value {
    json!({ "rational": format_rational(x), "decimal": rational_to_f64(x) })
}

#[derive(Clone)]
struct Piece<S> {
    word: Word,
    map: Affine<S>,
}

impl<S: Scalar> Piece<S> {
    fn span(&self) -> Span<S> {
        self.map.apply_span(&Span::unit())
    }

    fn children(&self, maps: &[Affine<S>]) -> impl Iterator<Item = Piece<S>> + '_ {
        let maps: Vec<Affine<S>> = maps.to_vec();
        (1..=4u8).zip(maps).map(move |(l, g)| {
            let mut word = self.word.clone();
            word.push(l).expect("letter in range");
            Piece {
                word,
                map: self.map.compose(&g),
            }
        })
    }
}

fn initial_side<S: Scalar>(sys: &SimilaritySystem<S>, lead: u8, power: u32) -> Vec<Piece<S>> {
    [3u8, 4]
        .iter()
        .map(|&i| {
            let mut letters = vec![lead; power as usize];
            letters.push(i);
            let word = Word::new(letters).expect("letters in range");
            let map = sys.word_map(&word);
            Piece { word, map }
        })
        .collect()
}

/// Hulls `[p^m (1 - max), p^m]` and `[q^n (1 - max), q^n]`.
fn hulls<S: Scalar>(params: &Params<S>, m: u32, n: u32) -> (Span<S>, Span<S>) {
    let inner = S::one() - params.lipschitz();
    let a = params.p().powu(m);
    let b = params.q().powu(n);
    (
        Span::new(a.clone() * inner.clone(), a),
        Span::new(b.clone() * inner, b),
    )
}

fn endpoint_address(word: &Word, upper: bool) -> Address {
    let tail = Word::new(vec![if upper { 3 } else { 1 }]).expect("letter");
    Address::periodic(word.clone(), tail).expect("nonempty period")
}

/// Exact common endpoint of a cylinder on each side, if any.
fn shared_endpoint<S: Scalar>(side1: &[Piece<S>], side2: &[Piece<S>]) -> Option<OverlapWitness> {
    let mut ends: HashMap<BigRational, (usize, bool)> = HashMap::new();
    for (i, p) in side1.iter().enumerate() {
        let s = p.span();
        ends.entry(s.lo.lower()).or_insert((i, false));
        ends.entry(s.hi.lower()).or_insert((i, true));
    }
    for p in side2 {
        let s = p.span();
        for (x, upper) in [(s.lo.lower(), false), (s.hi.lower(), true)] {
            if let Some(&(i, up1)) = ends.get(&x) {
                return Some(OverlapWitness {
                    u: endpoint_address(&side1[i].word, up1),
                    v: endpoint_address(&p.word, upper),
                    value: x,
                });
            }
        }
    }
    None
}

/// Total length of the intersection of two merged lists (upper bound).
fn intersection_length<S: Scalar>(a: &[Span<S>], b: &[Span<S>]) -> BigRational {
    let (mut i, mut j) = (0, 0);
    let mut total = BigRational::zero();
    while i < a.len() && j < b.len() {
        let lo = a[i].lo.lower().max(b[j].lo.lower());
        let hi = a[i].hi.upper().min(b[j].hi.upper());
        if hi > lo {
            total += hi - lo;
        }
        if a[i].hi.upper() < b[j].hi.upper() {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}

/// Splits `side` into pieces that may meet `other` and records a distance
/// bound for the rest.
fn prune<S: Scalar>(side: Vec<Piece<S>>, spans: &[Span<S>], other: &[Span<S>], gap: &mut Option<S>) -> Vec<Piece<S>> {
    let mut keep = Vec::new();
    for (piece, span) in side.into_iter().zip(spans) {
        if first_meeting(other, span).is_some() {
            keep.push(piece);
        } else if let Some(d) = distance_to_merged(other, span) {
            *gap = Some(match gap.take() {
                Some(g) => g.min_with(&d),
                None => d,
            });
        }
    }
    keep
}

/// One piece per provably distinct map, keeping the smallest word, so
/// commuting `S_1 S_2 = S_2 S_1` prefixes do not multiply the work.
fn dedup_pieces<S: Scalar>(mut pieces: Vec<Piece<S>>) -> Vec<Piece<S>> {
    pieces.sort_by(|a, b| {
        a.map
            .scale
            .key_cmp(&b.map.scale)
            .then_with(|| a.map.shift.key_cmp(&b.map.shift))
            .then_with(|| a.word.letters().cmp(b.word.letters()))
    });
    pieces.dedup_by(|later, first| {
        later.map.scale.certainly_eq(&first.map.scale) && later.map.shift.certainly_eq(&first.map.shift)
    });
    pieces
}

fn max_width<S: Scalar>(spans: &[Span<S>]) -> Option<S> {
    spans
        .iter()
        .map(Span::width)
        .max_by(|a, b| a.key_cmp(b))
}

/// Decides `S_1^m(A) ∩ S_2^n(A) = ∅` up to `max_depth` letters of refinement
/// past the leading `S_1^m S_i` / `S_2^n S_j` prefix.
///
/// Overlaps are only reported in exact mode, where endpoint equality is
/// decisive.
pub fn certify_pair<S: Scalar>(
    params: &Params<S>,
    m: u32,
    n: u32,
    max_depth: u32,
    caps: &Caps,
) -> Result<PairVerdict> {
    check_pair(m, n)?;
    caps.check_exponent(m as u64 + n as u64 + max_depth as u64)?;
    let verdict = |status| Ok(PairVerdict { m, n, status });

    if window_test(params, m, n)? == WindowResult::OutsideWindow {
        let (h1, h2) = hulls(params, m, n);
        return verdict(PairStatus::Disjoint {
            gap: h1.distance(&h2).lower(),
            by_window: true,
        });
    }

    let sys = SimilaritySystem::new(params.clone());
    if S::is_exact() && params.p().powu(m) == params.q().powu(n) {
        // S_1^m = S_2^n; both sets contain the image of 1
        let one = Word::new(vec![3]).expect("letter");
        return verdict(PairStatus::Overlap(OverlapWitness {
            u: Address::periodic(Word::repeat(1, m as usize)?, one.clone())?,
            v: Address::periodic(Word::repeat(2, n as usize)?, one)?,
            value: params.p().powu(m).lower(),
        }));
    }

    let maps: Vec<Affine<S>> = (1..=4).map(|i| sys.map(i)).collect();
    let mut side1 = initial_side(&sys, 1, m);
    let mut side2 = initial_side(&sys, 2, n);
    let (mut depth1, mut depth2) = (0u32, 0u32);
    let mut gap: Option<S> = None;

    loop {
        if S::is_exact() {
            if let Some(w) = shared_endpoint(&side1, &side2) {
                return verdict(PairStatus::Overlap(w));
            }
        }
        let spans1: Vec<Span<S>> = side1.iter().map(Piece::span).collect();
        let spans2: Vec<Span<S>> = side2.iter().map(Piece::span).collect();
        let merged1 = merge_spans(spans1.clone());
        let merged2 = merge_spans(spans2.clone());
        side1 = prune(side1, &spans1, &merged2, &mut gap);
        side2 = prune(side2, &spans2, &merged1, &mut gap);

        if side1.is_empty() || side2.is_empty() {
            let g = gap.expect("a pruned piece records a distance");
            return verdict(PairStatus::Disjoint {
                gap: g.lower(),
                by_window: false,
            });
        }

        let spans1: Vec<Span<S>> = side1.iter().map(Piece::span).collect();
        let spans2: Vec<Span<S>> = side2.iter().map(Piece::span).collect();
        if depth1 >= max_depth && depth2 >= max_depth {
            let residual = intersection_length(&merge_spans(spans1), &merge_spans(spans2));
            return verdict(PairStatus::Unknown { residual });
        }
        let w1 = max_width(&spans1).expect("nonempty");
        let w2 = max_width(&spans2).expect("nonempty");
        let refine_first = depth2 >= max_depth
            || (depth1 < max_depth && w1.key_cmp(&w2) != std::cmp::Ordering::Less);
        if refine_first {
            side1 = dedup_pieces(side1.iter().flat_map(|p| p.children(&maps)).collect());
            depth1 += 1;
        } else {
            side2 = dedup_pieces(side2.iter().flat_map(|p| p.children(&maps)).collect());
            depth2 += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Summary {
    /// Every pair with `m + n <= max_sum` is Disjoint or Unknown.
    CertifiedUpTo {
        max_sum: u32,
        depth: u32,
        unknowns: Vec<(u32, u32)>,
    },
    /// First Overlap in `(m + n, m)` order.
    FailedAt { m: u32, n: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TfReport {
    pub p: BigRational,
    pub q: BigRational,
    pub mode: Mode,
    pub max_sum: u32,
    pub depth: u32,
    /// Verdicts for window candidates, in `(m + n, m)` order.
    pub verdicts: Vec<PairVerdict>,
    /// Number of pairs settled by the window test alone.
    pub outside_window: usize,
    pub summary: Summary,
}

impl TfReport {
    pub fn unknown_count(&self) -> usize {
        self.verdicts.iter().filter(|v| v.is_unknown()).count()
    }

    pub fn failed_at(&self) -> Option<(u32, u32)> {
        match self.summary {
            Summary::FailedAt { m, n } => Some((m, n)),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let summary = match &self.summary {
            Summary::CertifiedUpTo {
                max_sum,
                depth,
                unknowns,
            } => json!({
                "kind": "CertifiedUpTo",
                "max_sum": max_sum,
                "depth": depth,
                "unknowns": unknowns.iter().map(|(m, n)| json!([m, n])).collect::<Vec<_>>(),
            }),
            Summary::FailedAt { m, n } => json!({ "kind": "FailedAt", "m": m, "n": n }),
        };
        json!({
            "schema_version": SCHEMA_VERSION,
            "p": rational_json(&self.p),
            "q": rational_json(&self.q),
            "mode": self.mode,
            "max_sum": self.max_sum,
            "depth": self.depth,
            "outside_window": self.outside_window,
            "pairs": self.verdicts.iter().map(PairVerdict::to_json).collect::<Vec<_>>(),
            "summary": summary,
        })
    }
}

/// All pairs `m, n >= 1` with `m + n <= max_sum`, in `(m + n, m)` order.
pub fn pairs_up_to(max_sum: u32) -> impl Iterator<Item = (u32, u32)> {
    (2..=max_sum).flat_map(|s| (1..s).map(move |m| (m, s - m)))
}

/// Checks every pair with `m + n <= max_sum`. Candidates are certified in
/// parallel; the report is identical for any thread count.
pub fn check_tf<S: Scalar>(
    params: &Params<S>,
    max_sum: u32,
    max_depth: u32,
    caps: &Caps,
) -> Result<TfReport> {
    let mut candidates = Vec::new();
    let mut outside = 0usize;
    for (m, n) in pairs_up_to(max_sum) {
        match window_test(params, m, n)? {
            WindowResult::OutsideWindow => outside += 1,
            WindowResult::Candidate => candidates.push((m, n)),
        }
    }
    let verdicts: Vec<PairVerdict> = candidates
        .par_iter()
        .map(|&(m, n)| certify_pair(params, m, n, max_depth, caps))
        .collect::<Result<_>>()?;
    let summary = match verdicts.iter().find(|v| v.is_overlap()) {
        Some(v) => Summary::FailedAt { m: v.m, n: v.n },
        None => Summary::CertifiedUpTo {
            max_sum,
            depth: max_depth,
            unknowns: verdicts
                .iter()
                .filter(|v| v.is_unknown())
                .map(|v| (v.m, v.n))
                .collect(),
        },
    };
    Ok(TfReport {
        p: params.p().lower(),
        q: params.q().lower(),
        mode: S::MODE,
        max_sum,
        depth: max_depth,
        verdicts,
        outside_window: outside,
        summary,
    })
}

/// `q^n / p^m` as an `f64`, for diagnostics.
pub fn window_ratio<S: Scalar>(params: &Params<S>, m: u32, n: u32) -> f64 {
    (n as f64 * params.q().approx().ln() - m as f64 * params.p().approx().ln()).exp()
}

/// Whether a rational ratio lies in the closed window.
pub fn in_window(ratio: &BigRational) -> bool {
    let (lo, hi) = window_bounds();
    !ratio.is_negative() && lo <= *ratio && *ratio <= hi
}

/// Convenience for reports: `gap` as an `f64`.
pub fn gap_f64(status: &PairStatus) -> Option<f64> {
    match status {
        PairStatus::Disjoint { gap, .. } => gap.to_f64(),
        PairStatus::Unknown { residual } => residual.to_f64(),
        PairStatus::Overlap(_) => None,
    }
}
