//! Parameter-space scans of the twofold condition and box-counting slopes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::numeric::{cf, format_rational, limit_denominator, rational_to_f64, Caps, Params, Scalar};
use crate::tfcert::{check_tf, PairStatus, Summary};
use crate::{Error, Result};

/// Largest denominator of a rationalized cell center.
pub const CENTER_DENOMINATOR_BITS: u32 = 20;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn upper_bound() -> BigRational {
    ratio(1, 16)
}

/// A rectangle `[p_lo, p_hi] × [q_lo, q_hi]` inside `(0, 1/16]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub p: (BigRational, BigRational),
    pub q: (BigRational, BigRational),
}

impl Domain {
    pub fn full() -> Self {
        Domain {
            p: (BigRational::zero(), upper_bound()),
            q: (BigRational::zero(), upper_bound()),
        }
    }

    pub fn new(p: (BigRational, BigRational), q: (BigRational, BigRational)) -> Result<Self> {
        for (lo, hi) in [&p, &q] {
            if lo.is_negative() || lo >= hi || *hi > upper_bound() {
                return Err(Error::Invalid(format!(
                    "domain side [{}, {}] must satisfy 0 <= lo < hi <= 1/16",
                    format_rational(lo),
                    format_rational(hi)
                )));
            }
        }
        Ok(Domain { p, q })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellStatus {
    CertifiedTf,
    /// First overlapping pair in `(m + n, m)` order.
    Flagged { m: u32, n: u32 },
    Undecided,
}

impl CellStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CellStatus::CertifiedTf => "certified_tf",
            CellStatus::Flagged { .. } => "flagged",
            CellStatus::Undecided => "undecided",
        }
    }

    pub fn is_flagged(&self) -> bool {
        matches!(self, CellStatus::Flagged { .. })
    }
}

/// One sample of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanCell {
    pub p: BigRational,
    pub q: BigRational,
    pub status: CellStatus,
    /// Smallest certified gap for `CertifiedTf`, largest residual for
    /// `Undecided`, absent for `Flagged` or when nothing was refined.
    pub value: Option<BigRational>,
    /// Exponent `s` when the sample was moved onto the curve `q = p^s`.
    pub seeded: Option<u32>,
}

/// Budgets of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanBudget {
    pub max_sum: u32,
    pub depth: u32,
}

/// Evaluates the twofold condition at one parameter pair.
pub fn classify<S: Scalar>(p: &BigRational, q: &BigRational, budget: ScanBudget) -> (CellStatus, Option<BigRational>) {
    let params = match Params::<S>::from_rationals(p, q) {
        Ok(params) => params,
        Err(_) => return (CellStatus::Undecided, None),
    };
    let report = match check_tf(&params, budget.max_sum, budget.depth, &Caps::default()) {
        Ok(r) => r,
        Err(_) => return (CellStatus::Undecided, None),
    };
    match report.summary {
        Summary::FailedAt { m, n } => (CellStatus::Flagged { m, n }, None),
        Summary::CertifiedUpTo { ref unknowns, .. } if !unknowns.is_empty() => {
            let residual = report
                .verdicts
                .iter()
                .filter_map(|v| match &v.status {
                    PairStatus::Unknown { residual } => Some(residual.clone()),
                    _ => None,
                })
                .max();
            (CellStatus::Undecided, residual)
        }
        Summary::CertifiedUpTo { .. } => {
            let gap = report
                .verdicts
                .iter()
                .filter_map(|v| match &v.status {
                    PairStatus::Disjoint { gap, .. } => Some(gap.clone()),
                    _ => None,
                })
                .min();
            (CellStatus::CertifiedTf, gap)
        }
    }
}

/// A rational `p` in `[p_lo, p_hi)` with `p^s` in `[q_lo, q_hi)`, if the
/// curve `q = p^s` visibly crosses the rectangle.
pub fn curve_point(
    s: u32,
    p: &(BigRational, BigRational),
    q: &(BigRational, BigRational),
) -> Option<BigRational> {
    if s == 0 {
        return None;
    }
    let root = |x: &BigRational| rational_to_f64(x).powf(1.0 / s as f64);
    let lo = rational_to_f64(&p.0).max(root(&q.0));
    let hi = rational_to_f64(&p.1).min(root(&q.1));
    if !(lo < hi) {
        return None;
    }
    // inset by a tenth of the span so the f64 roots cannot mislead
    let inset = (hi - lo) / 10.0;
    let a = BigRational::from_float(lo + inset)?;
    let b = BigRational::from_float(hi - inset)?;
    if a >= b {
        return None;
    }
    let x = cf::simplest_between(&a, &b);
    let y = num_traits::pow(x.clone(), s as usize);
    let inside = p.0 <= x && x < p.1 && q.0 <= y && y < q.1 && x.is_positive();
    inside.then_some(x)
}

/// Raster of cell statuses; rows run over `q` (ascending), columns over `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub resolution: usize,
    pub domain: Domain,
    pub budget: ScanBudget,
    /// Row-major: `cells[j * resolution + i]` has `p` in column `i`, `q` in row `j`.
    pub cells: Vec<ScanCell>,
}

impl ScanGrid {
    pub fn cell(&self, i: usize, j: usize) -> &ScanCell {
        &self.cells[j * self.resolution + i]
    }

    /// Corners `(p_lo, p_hi, q_lo, q_hi)` of cell `(i, j)`.
    pub fn cell_bounds(&self, i: usize, j: usize) -> ((BigRational, BigRational), (BigRational, BigRational)) {
        cell_bounds(&self.domain, self.resolution, i, j)
    }

    fn fraction(&self, pred: impl Fn(&CellStatus) -> bool) -> f64 {
        let hits = self.cells.iter().filter(|c| pred(&c.status)).count();
        hits as f64 / self.cells.len() as f64
    }

    pub fn flagged_fraction(&self) -> f64 {
        self.fraction(CellStatus::is_flagged)
    }

    pub fn undecided_fraction(&self) -> f64 {
        self.fraction(|s| *s == CellStatus::Undecided)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        write_cells_csv(&self.cells, out)
    }

    /// One `rect` per cell, `q` increasing upward.
    pub fn to_svg(&self, cell_px: u32) -> String {
        let n = self.resolution as u32;
        let size = n * cell_px;
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\" shape-rendering=\"crispEdges\">\n"
        );
        for (idx, cell) in self.cells.iter().enumerate() {
            let (i, j) = ((idx % self.resolution) as u32, (idx / self.resolution) as u32);
            let color = match cell.status {
                CellStatus::CertifiedTf => "#2b8cbe",
                CellStatus::Flagged { .. } => "#e34a33",
                CellStatus::Undecided => "#bdbdbd",
            };
            let _ = writeln!(
                svg,
                "<rect x=\"{}\" y=\"{}\" width=\"{cell_px}\" height=\"{cell_px}\" fill=\"{color}\"/>",
                i * cell_px,
                (n - 1 - j) * cell_px
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn cell_bounds(
    domain: &Domain,
    resolution: usize,
    i: usize,
    j: usize,
) -> ((BigRational, BigRational), (BigRational, BigRational)) {
    let res = BigRational::from_integer(BigInt::from(resolution));
    let side = |(lo, hi): &(BigRational, BigRational), k: usize| {
        let h = (hi - lo) / &res;
        let a = lo + &h * BigRational::from_integer(BigInt::from(k));
        let b = &a + &h;
        (a, b)
    };
    (side(&domain.p, i), side(&domain.q, j))
}

/// `CSV` rows `p,q,status,m,n,gap_or_residual`.
pub fn write_cells_csv<W: std::io::Write>(cells: &[ScanCell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Invalid(e.to_string());
    w.write_record(["p", "q", "status", "m", "n", "gap_or_residual"])
        .map_err(err)?;
    for c in cells {
        let (m, n) = match c.status {
            CellStatus::Flagged { m, n } => (m.to_string(), n.to_string()),
            _ => (String::new(), String::new()),
        };
        w.write_record([
            format_rational(&c.p),
            format_rational(&c.q),
            c.status.label().to_string(),
            m,
            n,
            c.value.as_ref().map(format_rational).unwrap_or_default(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Invalid(e.to_string()))
}

/// Runs the twofold check at every cell of a `resolution × resolution` grid.
///
/// Each cell is sampled at its center, rounded to denominator at most
/// `2^20`, unless one of the curves `q = p^s` for `s` in `seeds` crosses
/// it, in which case a rational point of the first such curve is used.
pub fn scan_square<S: Scalar>(
    domain: &Domain,
    resolution: usize,
    budget: ScanBudget,
    seeds: &[u32],
) -> Result<ScanGrid> {
    if resolution < 2 {
        return Err(Error::Invalid("resolution must be at least 2".into()));
    }
    let max_den = BigInt::one() << CENTER_DENOMINATOR_BITS as usize;
    let two = ratio(2, 1);
    let cells: Vec<ScanCell> = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % resolution, idx / resolution);
            let (pb, qb) = cell_bounds(domain, resolution, i, j);
            let seeded = seeds
                .iter()
                .find_map(|&s| curve_point(s, &pb, &qb).map(|x| (s, x)));
            let (p, q, seeded) = match seeded {
                Some((s, x)) => {
                    let y = num_traits::pow(x.clone(), s as usize);
                    (x, y, Some(s))
                }
                None => {
                    let pc = limit_denominator(&((&pb.0 + &pb.1) / &two), &max_den);
                    let qc = limit_denominator(&((&qb.0 + &qb.1) / &two), &max_den);
                    (pc, qc, None)
                }
            };
            let (status, value) = classify::<S>(&p, &q, budget);
            ScanCell {
                p,
                q,
                status,
                value,
                seeded,
            }
        })
        .collect();
    Ok(ScanGrid {
        resolution,
        domain: domain.clone(),
        budget,
        cells,
    })
}

/// Statuses along the vertical line through `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceScan {
    pub p: BigRational,
    pub budget: ScanBudget,
    /// Sorted by `q`.
    pub samples: Vec<ScanCell>,
    /// Flagged `q` values keyed by their first overlapping pair.
    pub flagged: BTreeMap<(u32, u32), Vec<BigRational>>,
}

impl SliceScan {
    pub fn flagged_points(&self) -> Vec<f64> {
        let set: BTreeSet<&BigRational> = self.flagged.values().flatten().collect();
        set.into_iter().map(rational_to_f64).collect()
    }
}

/// Samples `q` at the midpoints of `q_samples` equal subintervals of
/// `(0, 1/16]`, plus `q = p^k` for every `k` in `seeds` that lands there.
pub fn slice_scan<S: Scalar>(
    p: &BigRational,
    q_samples: usize,
    budget: ScanBudget,
    seeds: &[u32],
) -> Result<SliceScan> {
    Params::<BigRational>::from_rationals(p, p)?;
    if q_samples == 0 {
        return Err(Error::Invalid("at least one q sample is required".into()));
    }
    let top = upper_bound();
    let mut qs: BTreeSet<BigRational> = (0..q_samples)
        .map(|j| &top * ratio(2 * j as i64 + 1, 2 * q_samples as i64))
        .collect();
    for &k in seeds {
        let q = num_traits::pow(p.clone(), k as usize);
        if k > 0 && q <= top {
            qs.insert(q);
        }
    }
    let samples: Vec<ScanCell> = qs
        .into_par_iter()
        .map(|q| {
            let (status, value) = classify::<S>(p, &q, budget);
            ScanCell {
                p: p.clone(),
                q,
                status,
                value,
                seeded: None,
            }
        })
        .collect();
    let mut flagged: BTreeMap<(u32, u32), Vec<BigRational>> = BTreeMap::new();
    for c in &samples {
        if let CellStatus::Flagged { m, n } = c.status {
            flagged.entry((m, n)).or_default().push(c.q.clone());
        }
    }
    Ok(SliceScan {
        p: p.clone(),
        budget,
        samples,
        flagged,
    })
}

/// Log-log fit of occupied box counts against box size.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDimEstimate {
    /// Strictly decreasing.
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    pub slope: f64,
    pub r2: f64,
    /// Every count equal, so no slope is measurable.
    pub degenerate: bool,
}

/// `2^-3, …, 2^-12`.
pub fn default_scales() -> Vec<f64> {
    (3..=12).map(|k| 2f64.powi(-k)).collect()
}

/// Box counts of `points` on the grid anchored at the smallest point, and
/// the least-squares slope of `ln N` against `-ln s` over scales with at
/// least two occupied boxes.
pub fn box_dim_estimate(points: &[f64], scales: &[f64]) -> Result<BoxDimEstimate> {
    if points.len() < 2 || scales.len() < 2 {
        return Err(Error::Invalid("box counting needs at least two points and two scales".into()));
    }
    if points.iter().any(|x| !x.is_finite()) || scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::Invalid("points and scales must be finite, scales positive".into()));
    }
    let mut scales = scales.to_vec();
    scales.sort_by(|a, b| b.total_cmp(a));
    scales.dedup();
    let origin = points.iter().copied().fold(f64::INFINITY, f64::min);
    let counts: Vec<usize> = scales
        .iter()
        .map(|s| {
            let boxes: BTreeSet<i64> = points.iter().map(|x| ((x - origin) / s).floor() as i64).collect();
            boxes.len()
        })
        .collect();
    let fit: Vec<(f64, f64)> = scales
        .iter()
        .zip(&counts)
        .filter(|(_, &n)| n >= 2)
        .map(|(s, &n)| (-s.ln(), (n as f64).ln()))
        .collect();
    let degenerate = counts.windows(2).all(|w| w[0] == w[1]) || fit.len() < 2;
    let (slope, r2) = if degenerate { (0.0, 0.0) } else { ols(&fit) };
    Ok(BoxDimEstimate {
        scales,
        counts,
        slope,
        r2,
        degenerate,
    })
}

/// Slope and coefficient of determination of `y` on `x`.
fn ols(xy: &[(f64, f64)]) -> (f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, r2)
}

/// Left endpoints of the `2^depth` intervals of the middle-thirds
/// construction.
pub fn middle_thirds(depth: u32) -> Vec<f64> {
    let mut pts = vec![0.0f64];
    let mut len = 1.0;
    for _ in 0..depth {
        len /= 3.0;
        pts = pts.iter().flat_map(|&x| [x, x + 2.0 * len]).collect();
    }
    pts
}

/// `q^n / p^m` for a flagged sample, exactly.
pub fn flagged_ratio(p: &BigRational, q: &BigRational, m: u32, n: u32) -> BigRational {
    num_traits::pow(q.clone(), n as usize) / num_traits::pow(p.clone(), m as usize)
}
