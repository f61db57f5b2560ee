use std::fmt;
use std::io;
use std::str::FromStr;

use crate::numeric::{first_meeting, format_rational, merge_spans, Caps, Scalar, Span};
use crate::{Error, Result};

use super::{Affine, SimilaritySystem};

/// Which set a cover encloses: the attractor `K`, `A = S3(K) ∪ S4(K)` or
/// `B = S1(K) ∪ S2(K)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum SetTag {
    K,
    A,
    B,
}

impl SetTag {
    /// Letters allowed in the first position.
    pub fn first_letters(self) -> &'static [u8] {
        match self {
            SetTag::K => &[1, 2, 3, 4],
            SetTag::A => &[3, 4],
            SetTag::B => &[1, 2],
        }
    }

    pub fn reflected(self) -> SetTag {
        match self {
            SetTag::K => SetTag::K,
            SetTag::A => SetTag::B,
            SetTag::B => SetTag::A,
        }
    }
}

impl fmt::Display for SetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetTag::K => "K",
            SetTag::A => "A",
            SetTag::B => "B",
        })
    }
}

impl FromStr for SetTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "K" | "k" => Ok(SetTag::K),
            "A" | "a" => Ok(SetTag::A),
            "B" | "b" => Ok(SetTag::B),
            other => Err(Error::Invalid(format!("unknown set tag {other:?}"))),
        }
    }
}

/// Sorted, pairwise disjoint closed intervals whose union contains the
/// tagged set at the given depth.
///
/// Every interval contains a point of the set, since the endpoints of every
/// cylinder `S_w([0, 1])` do. Before merging each cylinder has length at
/// most `max(p, q)^depth`; merged intervals may be longer where cylinders
/// overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalCover<S> {
    pub tag: SetTag,
    pub depth: u32,
    pub intervals: Vec<Span<S>>,
}

fn map_all<S: Scalar>(maps: &[Affine<S>], spans: &[Span<S>]) -> Vec<Span<S>> {
    maps.iter()
        .flat_map(|m| spans.iter().map(move |s| m.apply_span(s)))
        .collect()
}

impl<S: Scalar> IntervalCover<S> {
    /// Merged images of `[0, 1]` under all words of length `depth` whose first
    /// letter is allowed by `tag`.
    pub fn build(sys: &SimilaritySystem<S>, tag: SetTag, depth: u32, caps: &Caps) -> Result<Self> {
        if depth > caps.max_cover_depth {
            return Err(Error::DepthCap {
                requested: depth,
                cap: caps.max_cover_depth,
            });
        }
        let all: Vec<Affine<S>> = (1..=4).map(|i| sys.map(i)).collect();
        let mut spans = vec![Span::unit()];
        // a K-cover of depth d - 1 is refined, then the first letter restricted
        for _ in 1..depth {
            spans = merge_spans(map_all(&all, &spans));
        }
        if depth > 0 {
            let first: Vec<Affine<S>> = tag.first_letters().iter().map(|&i| sys.map(i)).collect();
            spans = merge_spans(map_all(&first, &spans));
        }
        Ok(IntervalCover {
            tag,
            depth,
            intervals: spans,
        })
    }

    /// Image under `x ↦ 1 - x`.
    pub fn reflect(&self) -> Self {
        let mut intervals: Vec<Span<S>> = self.intervals.iter().rev().map(Span::reflect).collect();
        intervals.sort_by(|a, b| a.key_cmp(b));
        IntervalCover {
            tag: self.tag.reflected(),
            depth: self.depth,
            intervals,
        }
    }

    /// Image under an increasing affine map.
    pub fn image(&self, map: &Affine<S>) -> Vec<Span<S>> {
        self.intervals.iter().map(|s| map.apply_span(s)).collect()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> S {
        self.intervals
            .iter()
            .fold(S::zero(), |acc, s| acc + s.width())
    }

    /// True when every interval of `self` lies inside some interval of `outer`.
    pub fn nested_in(&self, outer: &IntervalCover<S>) -> bool {
        self.intervals.iter().all(|piece| {
            first_meeting(&outer.intervals, piece)
                .map(|i| piece.certainly_within(&outer.intervals[i]))
                .unwrap_or(false)
        })
    }

    /// CSV with header `depth,tag,lo,hi`; endpoints as exact rational strings
    /// (outer bounds in interval mode).
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io_err = |e: csv::Error| Error::Invalid(e.to_string());
        w.write_record(["depth", "tag", "lo", "hi"]).map_err(io_err)?;
        for s in &self.intervals {
            w.write_record([
                self.depth.to_string(),
                self.tag.to_string(),
                format_rational(&s.lo.lower()),
                format_rational(&s.hi.upper()),
            ])
            .map_err(io_err)?;
        }
        w.flush().map_err(|e| Error::Invalid(e.to_string()))
    }
}

/// Cylinders of the tagged set that meet `window`, refined until each is no
/// longer than `resolution` or `max_depth` letters long. The result is
/// merged; every interval endpoint is a point of the set.
pub fn window_pieces<S: Scalar>(
    sys: &SimilaritySystem<S>,
    tag: SetTag,
    window: &Span<S>,
    resolution: &S,
    max_depth: u32,
) -> Vec<Span<S>> {
    let maps: Vec<Affine<S>> = (1..=4).map(|i| sys.map(i)).collect();
    let mut done = Vec::new();
    let mut frontier: Vec<Affine<S>> = tag
        .first_letters()
        .iter()
        .map(|&i| maps[i as usize - 1].clone())
        .collect();
    let unit = Span::unit();
    for depth in 1..=max_depth.max(1) {
        let mut next = Vec::new();
        for f in frontier {
            let span = f.apply_span(&unit);
            if span.certainly_disjoint(window) {
                continue;
            }
            if span.width().certainly_le(resolution) || depth == max_depth.max(1) {
                done.push(span);
            } else {
                next.extend(maps.iter().map(|m| f.compose(m)));
            }
        }
        frontier = dedup_maps(next);
        if frontier.is_empty() {
            break;
        }
    }
    merge_spans(done)
}

/// Drops maps provably equal to another; `S_1` and `S_2` commute, so words
/// over `{1, 2}` collapse to their letter counts.
fn dedup_maps<S: Scalar>(mut maps: Vec<Affine<S>>) -> Vec<Affine<S>> {
    maps.sort_by(|a, b| a.scale.key_cmp(&b.scale).then_with(|| a.shift.key_cmp(&b.shift)));
    maps.dedup_by(|a, b| a.scale.certainly_eq(&b.scale) && a.shift.certainly_eq(&b.shift));
    maps
}

/// Decides whether the uniform depth-`depth` covers of `S_1^m(A)` and
/// `S_2^n(A)` are disjoint, without materializing them: cylinders already
/// separated from every cylinder of the other side are dropped, because
/// their descendants stay separated.
pub fn covers_disjoint_at_depth<S: Scalar>(
    sys: &SimilaritySystem<S>,
    m: u32,
    n: u32,
    depth: u32,
) -> bool {
    let maps: Vec<Affine<S>> = (1..=4).map(|i| sys.map(i)).collect();
    let lead1 = (0..m).fold(Affine::identity(), |acc, _| acc.compose(&maps[0]));
    let lead2 = (0..n).fold(Affine::identity(), |acc, _| acc.compose(&maps[1]));
    let start = |lead: &Affine<S>| -> Vec<Affine<S>> {
        [2usize, 3].iter().map(|&i| lead.compose(&maps[i])).collect()
    };
    let mut side1 = start(&lead1);
    let mut side2 = start(&lead2);
    let unit = Span::unit();
    for level in 1..=depth.max(1) {
        let spans1: Vec<Span<S>> = side1.iter().map(|f| f.apply_span(&unit)).collect();
        let spans2: Vec<Span<S>> = side2.iter().map(|f| f.apply_span(&unit)).collect();
        let merged1 = merge_spans(spans1.clone());
        let merged2 = merge_spans(spans2.clone());
        let keep1: Vec<Affine<S>> = side1
            .into_iter()
            .zip(&spans1)
            .filter(|(_, s)| first_meeting(&merged2, s).is_some())
            .map(|(f, _)| f)
            .collect();
        let keep2: Vec<Affine<S>> = side2
            .into_iter()
            .zip(&spans2)
            .filter(|(_, s)| first_meeting(&merged1, s).is_some())
            .map(|(f, _)| f)
            .collect();
        if keep1.is_empty() || keep2.is_empty() {
            return true;
        }
        if level == depth.max(1) {
            return false;
        }
        side1 = keep1
            .iter()
            .flat_map(|f| maps.iter().map(move |g| f.compose(g)))
            .collect();
        side2 = keep2
            .iter()
            .flat_map(|f| maps.iter().map(move |g| f.compose(g)))
            .collect();
    }
    unreachable!()
}
