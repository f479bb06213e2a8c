//! Dimension estimation: grid box counting with log-log regression, and the
//! separated-net hierarchy whose per-ball counts `N_j` drive a sufficient
//! condition for an upper dimension bound.
//!
//! Both estimators are finite-sample proxies for Hausdorff dimension. The net
//! checker in particular quantifies over the *built* hierarchy only; how many
//! coarse levels it demands witnesses for is an explicit knob, surfaced in
//! the diagnostics rather than hidden.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point2;

/// A finite, deduplicated, lexicographically sorted point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    points: Vec<Point2>,
    pub label: String,
}

impl PointSet {
    pub fn new(mut points: Vec<Point2>, label: impl Into<String>) -> Self {
        points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        points.dedup_by(|a, b| a.x == b.x && a.y == b.y);
        PointSet {
            points,
            label: label.into(),
        }
    }

    /// Embeds scalars on the horizontal axis.
    pub fn from_scalars(xs: &[f64], label: impl Into<String>) -> Self {
        Self::new(xs.iter().map(|&x| Point2::new(x, 0.0)).collect(), label)
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Greedy maximal `scale`-separated net over the (sorted) point set.
/// Every input point lies strictly within `scale` of some net point.
pub fn separated_net(e: &PointSet, scale: f64) -> Result<PointSet> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "net scale must be positive, got {scale}"
        )));
    }
    let mut kept: Vec<Point2> = Vec::new();
    for &p in e.points() {
        if kept.iter().all(|k| k.dist(p) >= scale) {
            kept.push(p);
        }
    }
    Ok(PointSet {
        points: kept,
        label: format!("{}/net@{scale:.3e}", e.label),
    })
}

/// Maximal separated nets at the geometric scales `ratio^i`,
/// `i = base_level ..= base_level + depth`, with the ball-intersection
/// counts `N_j` for every coarser-ball / finer-level pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetHierarchy {
    pub ratio: f64,
    pub base_level: i32,
    levels: Vec<PointSet>,
    /// `counts[li][k][dj]` = number of level `base+li+dj+1` net balls meeting
    /// ball `k` of level `base+li`.
    counts: Vec<Vec<Vec<u32>>>,
}

impl NetHierarchy {
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, li: usize) -> &PointSet {
        &self.levels[li]
    }

    pub fn scale(&self, li: usize) -> f64 {
        self.ratio.powi(self.base_level + li as i32)
    }

    pub fn counts(&self, li: usize, ball: usize) -> &[u32] {
        &self.counts[li][ball]
    }
}

/// Builds the net hierarchy by greedy extraction per level and exhaustive
/// pairwise ball-intersection tests (`|c1 - c2| < r1 + r2`, open balls).
pub fn build_hierarchy(
    e: &PointSet,
    ratio: f64,
    base_level: i32,
    depth: u32,
) -> Result<NetHierarchy> {
    if e.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "net ratio must lie in (0, 1), got {ratio}"
        )));
    }
    if depth < 2 {
        return Err(Error::InvalidParameter("hierarchy depth must be >= 2".into()));
    }
    let levels: Vec<PointSet> = (0..=depth)
        .map(|d| separated_net(e, ratio.powi(base_level + d as i32)))
        .collect::<Result<_>>()?;
    let mut counts = Vec::with_capacity(levels.len());
    for (li, coarse) in levels.iter().enumerate() {
        let ri = ratio.powi(base_level + li as i32);
        let mut per_ball = Vec::with_capacity(coarse.len());
        for &c in coarse.points() {
            let mut row = Vec::with_capacity(levels.len() - li - 1);
            for (lj, fine) in levels.iter().enumerate().skip(li + 1) {
                let rj = ratio.powi(base_level + lj as i32);
                let reach = ri + rj;
                let n = fine.points().iter().filter(|q| q.dist(c) < reach).count();
                row.push(n as u32);
            }
            per_ball.push(row);
        }
        counts.push(per_ball);
    }
    Ok(NetHierarchy {
        ratio,
        base_level,
        levels,
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Box,
    Net,
}

/// Witness bookkeeping for one checked ball.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NetWitnessRow {
    pub level: i32,
    pub ball: usize,
    /// Level whose count satisfied the bound, if any within the hierarchy.
    pub witness_level: Option<i32>,
    pub count: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Diagnostics {
    Box {
        raw_slope: f64,
        residual_rms: f64,
        counts: Vec<(f64, usize)>,
    },
    Net {
        checked_levels: usize,
        rows: Vec<NetWitnessRow>,
    },
}

/// A dimension estimate with its provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub value: f64,
    pub method: Method,
    /// (finest, coarsest) scale used.
    pub scale_range: (f64, f64),
    pub diagnostics: Diagnostics,
}

/// Smallest grid `s` such that every checked ball has some deeper level `j`
/// with `N_j < ratio^(-(j-i) s)`.
///
/// `checked_levels` limits the quantifier to the coarsest levels of the
/// hierarchy: the sufficient condition asks for witnesses at *every* scale,
/// which a finite hierarchy can only honor where enough deeper levels exist.
/// Balls lacking any witness are reported through the error path.
pub fn net_dimension_bound_checked(
    h: &NetHierarchy,
    s_grid: &[f64],
    checked_levels: usize,
) -> Result<DimensionEstimate> {
    if s_grid.is_empty() || s_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "s grid must be non-empty and ascending".into(),
        ));
    }
    if s_grid[0] < 0.0 || *s_grid.last().unwrap() > 2.0 {
        return Err(Error::InvalidParameter("s grid must lie in [0, 2]".into()));
    }
    let checked = checked_levels.clamp(1, h.level_count().saturating_sub(1));
    let inv_ratio = 1.0 / h.ratio;
    let mut last_violation = (h.base_level, 0usize, 0u32);
    for &s in s_grid {
        let mut rows = Vec::new();
        let mut ok = true;
        'levels: for li in 0..checked {
            for ball in 0..h.level(li).len() {
                let counts = h.counts(li, ball);
                let mut witness = None;
                for (dj, &n) in counts.iter().enumerate() {
                    let m = (dj + 1) as f64;
                    if (n as f64) < inv_ratio.powf(m * s) {
                        witness = Some((li as i32 + h.base_level + dj as i32 + 1, n));
                        break;
                    }
                }
                match witness {
                    Some((wl, n)) => rows.push(NetWitnessRow {
                        level: h.base_level + li as i32,
                        ball,
                        witness_level: Some(wl),
                        count: n,
                    }),
                    None => {
                        let n = counts.iter().copied().min().unwrap_or(0);
                        last_violation = (h.base_level + li as i32, ball, n);
                        ok = false;
                        break 'levels;
                    }
                }
            }
        }
        if ok {
            return Ok(DimensionEstimate {
                value: s,
                method: Method::Net,
                scale_range: (h.scale(h.level_count() - 1), h.scale(0)),
                diagnostics: Diagnostics::Net {
                    checked_levels: checked,
                    rows,
                },
            });
        }
    }
    Err(Error::NoPassingS {
        level: last_violation.0,
        ball: last_violation.1,
        count: last_violation.2,
    })
}

/// [`net_dimension_bound_checked`] with the default policy: witnesses are
/// demanded for the coarsest third of the hierarchy.
pub fn net_dimension_bound(h: &NetHierarchy, s_grid: &[f64]) -> Result<DimensionEstimate> {
    let checked = (h.level_count() / 3).max(1);
    net_dimension_bound_checked(h, s_grid, checked)
}

/// Uniform grid of `s` values over `[lo, hi]` with the given step.
pub fn s_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let n = ((hi - lo) / step).round() as usize;
    for k in 0..=n {
        out.push(lo + k as f64 * step);
    }
    out
}

/// Counts occupied half-open grid boxes of side `scale` per scale and fits
/// `log N` against `log(1/scale)` by least squares.
pub fn box_count(e: &PointSet, scales: &[f64]) -> Result<DimensionEstimate> {
    if e.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if scales.len() < 3 {
        return Err(Error::InvalidParameter(
            "box counting needs at least 3 scales".into(),
        ));
    }
    if scales.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::InvalidParameter("scales must be positive".into()));
    }
    let (min_s, max_s) = scales
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    if max_s / min_s < 4.0 {
        return Err(Error::InvalidParameter(
            "scales must span a ratio of at least 4".into(),
        ));
    }
    let counts: Vec<(f64, usize)> = scales
        .iter()
        .map(|&delta| {
            let mut boxes: HashSet<(i64, i64)> = HashSet::new();
            for p in e.points() {
                boxes.insert(((p.x / delta).floor() as i64, (p.y / delta).floor() as i64));
            }
            (delta, boxes.len())
        })
        .collect();

    let xs: Vec<f64> = counts.iter().map(|(d, _)| (1.0 / d).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|(_, n)| (*n as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if var == 0.0 {
        return Err(Error::DegenerateRegression("all scales identical".into()));
    }
    let cov: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let slope = cov / var;
    let intercept = my - slope * mx;
    let residual_rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DimensionEstimate {
        value: slope.clamp(0.0, 2.0),
        method: Method::Box,
        scale_range: (min_s, max_s),
        diagnostics: Diagnostics::Box {
            raw_slope: slope,
            residual_rms,
            counts,
        },
    })
}

/// CSV of per-scale box counts (`scale,count`).
pub fn box_counts_csv(est: &DimensionEstimate) -> String {
    let mut out = String::from("scale,count\n");
    if let Diagnostics::Box { counts, .. } = &est.diagnostics {
        for (scale, count) in counts {
            out.push_str(&format!("{scale},{count}\n"));
        }
    }
    out
}

/// CSV of per-ball net witnesses (`i,k,j_witness,N_j`).
pub fn net_diagnostics_csv(est: &DimensionEstimate) -> String {
    let mut out = String::from("i,k,j_witness,N_j\n");
    if let Diagnostics::Net { rows, .. } = &est.diagnostics {
        for r in rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.level,
                r.ball,
                r.witness_level.map_or(-1, |l| l),
                r.count
            ));
        }
    }
    out
}
