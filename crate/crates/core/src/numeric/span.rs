use std::cmp::Ordering;

use super::Scalar;

/// A closed interval `[lo, hi]` whose endpoints are scalars.
///
/// In exact mode the endpoints are rationals; in interval mode each endpoint
/// is itself an enclosure, and the span means the hull of both.
#[derive(Debug, Clone, PartialEq)]
pub struct Span<S> {
    pub lo: S,
    pub hi: S,
}

impl<S: Scalar> Span<S> {
    pub fn new(lo: S, hi: S) -> Self {
        Span { lo, hi }
    }

    pub fn point(x: S) -> Self {
        Span {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn unit() -> Self {
        Span::new(S::zero(), S::one())
    }

    pub fn width(&self) -> S {
        self.hi.clone() - self.lo.clone()
    }

    pub fn is_point(&self) -> bool {
        self.lo.certainly_eq(&self.hi)
    }

    pub fn certainly_disjoint(&self, other: &Self) -> bool {
        self.hi.certainly_lt(&other.lo) || other.hi.certainly_lt(&self.lo)
    }

    /// `self ⊆ other`, decided conservatively.
    pub fn certainly_within(&self, other: &Self) -> bool {
        other.lo.certainly_le(&self.lo) && self.hi.certainly_le(&other.hi)
    }

    pub fn contains(&self, x: &S) -> bool {
        self.lo.certainly_le(x) && x.certainly_le(&self.hi)
    }

    pub fn hull(&self, other: &Self) -> Self {
        Span::new(self.lo.min_with(&other.lo), self.hi.max_with(&other.hi))
    }

    /// Image under `x ↦ 1 - x`.
    pub fn reflect(&self) -> Self {
        Span::new(S::one() - self.hi.clone(), S::one() - self.lo.clone())
    }

    /// Lower bound of the gap between two disjoint spans (zero if they meet).
    pub fn distance(&self, other: &Self) -> S {
        if self.hi.certainly_lt(&other.lo) {
            other.lo.clone() - self.hi.clone()
        } else if other.hi.certainly_lt(&self.lo) {
            self.lo.clone() - other.hi.clone()
        } else {
            S::zero()
        }
    }

    pub fn key_cmp(&self, other: &Self) -> Ordering {
        self.lo
            .key_cmp(&other.lo)
            .then_with(|| self.hi.key_cmp(&other.hi))
    }
}

/// Sorts spans and merges every pair that is not certainly disjoint.
/// Touching spans (shared endpoint) merge.
pub fn merge_spans<S: Scalar>(mut spans: Vec<Span<S>>) -> Vec<Span<S>> {
    spans.sort_by(|a, b| a.key_cmp(b));
    let mut out: Vec<Span<S>> = Vec::with_capacity(spans.len());
    for s in spans {
        match out.last_mut() {
            Some(last) if !last.hi.certainly_lt(&s.lo) => {
                last.hi = last.hi.max_with(&s.hi);
            }
            _ => out.push(s),
        }
    }
    out
}

/// Index of the first span of a merged list that may meet `piece`, if any.
pub fn first_meeting<S: Scalar>(merged: &[Span<S>], piece: &Span<S>) -> Option<usize> {
    let idx = merged.partition_point(|iv| iv.hi.certainly_lt(&piece.lo));
    match merged.get(idx) {
        Some(iv) if !piece.hi.certainly_lt(&iv.lo) => Some(idx),
        _ => None,
    }
}

/// Lower bound of the distance from `piece` to a merged list it does not meet.
pub fn distance_to_merged<S: Scalar>(merged: &[Span<S>], piece: &Span<S>) -> Option<S> {
    let idx = merged.partition_point(|iv| iv.hi.certainly_lt(&piece.lo));
    let left = idx.checked_sub(1).map(|i| piece.lo.clone() - merged[i].hi.clone());
    let right = merged.get(idx).map(|iv| iv.lo.clone() - piece.hi.clone());
    match (left, right) {
        (Some(a), Some(b)) => Some(a.min_with(&b)),
        (a, b) => a.or(b),
    }
}
