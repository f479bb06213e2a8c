//! Two-sidedness of boundary points, decided by multiscale flood fill.
//!
//! A boundary point is two-sided when, for every sufficiently small radius,
//! the domain intersected with the ball splits into two components touching
//! the point, and the components at different radii nest into each other.
//! The raster version checks this over a range of dyadic radii: at each scale
//! the in-domain cells are labeled by 4-connected flood fill, "touching the
//! point" is proxied by a small window of cells around the center, and
//! nesting is checked by resampling the finer mask into the coarser grid.
//!
//! Because the removed set pinches to zero width, the positive radius below
//! which the split appears varies with the point (it shrinks near the tent
//! apex). The verdict therefore accepts the longest suffix of the tested
//! scales on which the two-chain condition holds; the certificate records
//! where that suffix starts.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::comb::{CombDomain, RasterBall};
use crate::error::{Error, Result};
use crate::geom::Point2;

/// Cells whose center is within this many cell widths of the ball center
/// count as touching it (the window scales with the grid).
const NEAR_CENTER_CELLS: f64 = 3.0;

/// Connected-component labeling of one rasterized ball.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    pub raster: RasterBall,
    /// Component id per cell, 0 for cells not in the domain or ball.
    pub labels: Vec<u32>,
    pub label_count: u32,
    /// Labels with a cell center strictly inside `B(center, r/2)`.
    pub meeting_half: BTreeSet<u32>,
    /// Labels with a cell in the near-center window.
    pub near_center: BTreeSet<u32>,
}

/// Flood fill over in-domain, in-ball cells; labels are assigned in scanline
/// order so labeling is deterministic.
pub fn components_in_ball(
    domain: &CombDomain,
    center: Point2,
    radius: f64,
    resolution: usize,
) -> Result<ComponentLabeling> {
    if resolution < 64 {
        return Err(Error::InvalidParameter(format!(
            "component labeling needs resolution >= 64, got {resolution}"
        )));
    }
    let raster = domain.raster(center, radius, resolution)?;
    let res = resolution;
    let mut labels = vec![0u32; res * res];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for iy in 0..res {
        for ix in 0..res {
            if !raster.is_in(ix, iy) || labels[iy * res + ix] != 0 {
                continue;
            }
            next += 1;
            labels[iy * res + ix] = next;
            queue.push_back((ix, iy));
            while let Some((cx, cy)) = queue.pop_front() {
                let mut visit = |nx: usize, ny: usize| {
                    let idx = ny * res + nx;
                    if raster.is_in(nx, ny) && labels[idx] == 0 {
                        labels[idx] = next;
                        queue.push_back((nx, ny));
                    }
                };
                if cx > 0 {
                    visit(cx - 1, cy);
                }
                if cx + 1 < res {
                    visit(cx + 1, cy);
                }
                if cy > 0 {
                    visit(cx, cy - 1);
                }
                if cy + 1 < res {
                    visit(cx, cy + 1);
                }
            }
        }
    }
    let mut meeting_half = BTreeSet::new();
    let mut near_center = BTreeSet::new();
    let window = NEAR_CENTER_CELLS * raster.cell;
    for iy in 0..res {
        for ix in 0..res {
            let l = labels[iy * res + ix];
            if l == 0 {
                continue;
            }
            let c = raster.cell_center(ix, iy);
            if c.dist(center) < 0.5 * radius {
                meeting_half.insert(l);
            }
            if (c.x - center.x).abs() <= window && (c.y - center.y).abs() <= window {
                near_center.insert(l);
            }
        }
    }
    Ok(ComponentLabeling {
        raster,
        labels,
        label_count: next,
        meeting_half,
        near_center,
    })
}

/// Number of components meeting the half-radius ball.
pub fn count_meeting_half(
    domain: &CombDomain,
    center: Point2,
    radius: f64,
    resolution: usize,
) -> Result<usize> {
    Ok(components_in_ball(domain, center, radius, resolution)?
        .meeting_half
        .len())
}

/// Audit record for a positive two-sided verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoSidedCertificate {
    pub center: Point2,
    /// Dyadic levels actually certified (the suffix of the tested range).
    pub start_level: u32,
    pub end_level: u32,
    /// Radii of the certified scales, coarse to fine.
    pub scales: Vec<f64>,
    /// Component label pair per certified scale, coarse to fine.
    pub labels: Vec<(u32, u32)>,
    /// Both components touch the near-center window at each scale.
    pub near_center: Vec<(bool, bool)>,
    /// Cells of the finer mask contained in the matched coarser component /
    /// dropped on boundary-blocked coarse cells, per transition and chain.
    pub nesting: Vec<NestingTransition>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NestingTransition {
    pub fine_level: u32,
    pub coarse_level: u32,
    pub contained: [usize; 2],
    pub dropped: [usize; 2],
}

/// Outcome of a two-sidedness test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Verdict {
    TwoSided(TwoSidedCertificate),
    NotTwoSided { reason: String },
    /// Raster artifacts prevented a decision (mask straddling or orphaned
    /// components); distinguished from a negative verdict.
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_two_sided(&self) -> bool {
        matches!(self, Verdict::TwoSided(_))
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Verdict::Inconclusive { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::TwoSided(_) => "two-sided",
            Verdict::NotTwoSided { .. } => "not-two-sided",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parent {
    Of(u32),
    Orphan,
    Straddle,
}

/// Maps each fine component to the coarse component containing its resampled
/// mask. Fine cells landing on boundary-blocked coarse cells are tolerated
/// (the conservative raster thickens the boundary at coarse scales); landing
/// on two distinct coarse components is a straddle.
fn parent_map(fine: &ComponentLabeling, coarse: &ComponentLabeling) -> BTreeMap<u32, Parent> {
    let res = fine.raster.resolution;
    let mut hits: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    let mut any: BTreeSet<u32> = BTreeSet::new();
    for iy in 0..res {
        for ix in 0..res {
            let l = fine.labels[iy * res + ix];
            if l == 0 {
                continue;
            }
            any.insert(l);
            let c = fine.raster.cell_center(ix, iy);
            let jx = ((c.x - (coarse.raster.center.x - coarse.raster.radius))
                / coarse.raster.cell)
                .floor();
            let jy = ((c.y - (coarse.raster.center.y - coarse.raster.radius))
                / coarse.raster.cell)
                .floor();
            if jx < 0.0 || jy < 0.0 {
                continue;
            }
            let (jx, jy) = (jx as usize, jy as usize);
            if jx >= coarse.raster.resolution || jy >= coarse.raster.resolution {
                continue;
            }
            let cl = coarse.labels[jy * coarse.raster.resolution + jx];
            if cl != 0 {
                hits.entry(l).or_default().insert(cl);
            }
        }
    }
    any.into_iter()
        .map(|l| {
            let p = match hits.get(&l) {
                None => Parent::Orphan,
                Some(set) if set.len() == 1 => Parent::Of(*set.iter().next().unwrap()),
                Some(_) => Parent::Straddle,
            };
            (l, p)
        })
        .collect()
}

fn count_contained(fine: &ComponentLabeling, coarse: &ComponentLabeling, label: u32) -> (usize, usize) {
    let res = fine.raster.resolution;
    let mut contained = 0;
    let mut dropped = 0;
    for iy in 0..res {
        for ix in 0..res {
            if fine.labels[iy * res + ix] != label {
                continue;
            }
            let c = fine.raster.cell_center(ix, iy);
            let jx = ((c.x - (coarse.raster.center.x - coarse.raster.radius))
                / coarse.raster.cell)
                .floor() as isize;
            let jy = ((c.y - (coarse.raster.center.y - coarse.raster.radius))
                / coarse.raster.cell)
                .floor() as isize;
            if jx < 0
                || jy < 0
                || jx as usize >= coarse.raster.resolution
                || jy as usize >= coarse.raster.resolution
            {
                dropped += 1;
                continue;
            }
            if coarse.labels[jy as usize * coarse.raster.resolution + jx as usize] != 0 {
                contained += 1;
            } else {
                dropped += 1;
            }
        }
    }
    (contained, dropped)
}

/// Tests two-sidedness of `center` over the dyadic radii
/// `2^-i_min .. 2^-i_max` at the given raster resolution.
///
/// Positive iff some suffix of the scale range shows two distinct near-center
/// components at every scale, with both chains nesting consistently from fine
/// to coarse within the suffix. Ambiguous resampling yields `Inconclusive`.
pub fn detect(
    domain: &CombDomain,
    center: Point2,
    i_min: u32,
    i_max: u32,
    resolution: usize,
) -> Result<Verdict> {
    if i_min >= i_max {
        return Err(Error::InvalidParameter(format!(
            "need i_min < i_max, got {i_min} >= {i_max}"
        )));
    }
    let bd = domain.boundary_distance(center);
    let band = domain.boundary_band().max(2.0 * bd.error);
    if bd.value > band {
        return Err(Error::NotNearBoundary {
            x: center.x,
            y: center.y,
            band,
        });
    }
    let levels: Vec<u32> = (i_min..=i_max).collect();
    let labelings: Vec<ComponentLabeling> = levels
        .par_iter()
        .map(|&i| components_in_ball(domain, center, 0.5f64.powi(i as i32), resolution))
        .collect::<Result<_>>()?;

    // Longest suffix on which two near-center components exist at every scale.
    let mut start_idx = labelings.len();
    while start_idx > 0 && labelings[start_idx - 1].near_center.len() >= 2 {
        start_idx -= 1;
    }
    if start_idx == labelings.len() {
        return Ok(Verdict::NotTwoSided {
            reason: format!(
                "only {} near-center component(s) at the finest scale 2^-{}",
                labelings.last().map_or(0, |l| l.near_center.len()),
                i_max
            ),
        });
    }
    let suffix = &labelings[start_idx..];
    let suffix_levels = &levels[start_idx..];

    // Parent maps between consecutive suffix scales (fine -> coarse).
    let maps: Vec<BTreeMap<u32, Parent>> = (1..suffix.len())
        .map(|k| parent_map(&suffix[k], &suffix[k - 1]))
        .collect();

    // Chase each finest-scale near-center pair up the hierarchy.
    let finest = suffix.last().unwrap();
    let cands: Vec<u32> = finest.near_center.iter().copied().collect();
    let mut saw_ambiguity = false;
    for ai in 0..cands.len() {
        for bi in ai + 1..cands.len() {
            let (mut a, mut b) = (cands[ai], cands[bi]);
            let mut chain = vec![(a, b)];
            let mut ok = true;
            for k in (1..suffix.len()).rev() {
                let map = &maps[k - 1];
                let pa = map.get(&a).copied().unwrap_or(Parent::Orphan);
                let pb = map.get(&b).copied().unwrap_or(Parent::Orphan);
                match (pa, pb) {
                    (Parent::Of(na), Parent::Of(nb)) if na != nb => {
                        a = na;
                        b = nb;
                        chain.push((a, b));
                    }
                    (Parent::Of(_), Parent::Of(_)) => {
                        ok = false; // chains merge
                        break;
                    }
                    _ => {
                        saw_ambiguity = true;
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            // chain is fine -> coarse; flip to coarse -> fine for the record
            chain.reverse();
            // near-center must hold for both chain members at every scale
            let near: Vec<(bool, bool)> = chain
                .iter()
                .zip(suffix.iter())
                .map(|(&(x, y), lab)| (lab.near_center.contains(&x), lab.near_center.contains(&y)))
                .collect();
            if !near.iter().all(|&(x, y)| x && y) {
                continue;
            }
            let nesting: Vec<NestingTransition> = (1..suffix.len())
                .map(|k| {
                    let (c1, d1) = count_contained(&suffix[k], &suffix[k - 1], chain[k].0);
                    let (c2, d2) = count_contained(&suffix[k], &suffix[k - 1], chain[k].1);
                    NestingTransition {
                        fine_level: suffix_levels[k],
                        coarse_level: suffix_levels[k - 1],
                        contained: [c1, c2],
                        dropped: [d1, d2],
                    }
                })
                .collect();
            return Ok(Verdict::TwoSided(TwoSidedCertificate {
                center,
                start_level: suffix_levels[0],
                end_level: *suffix_levels.last().unwrap(),
                scales: suffix_levels.iter().map(|&i| 0.5f64.powi(i as i32)).collect(),
                labels: chain,
                near_center: near,
                nesting,
            }));
        }
    }
    if saw_ambiguity {
        Ok(Verdict::Inconclusive {
            reason: "component resampling straddled or orphaned across scales".into(),
        })
    } else {
        Ok(Verdict::NotTwoSided {
            reason: "near-center component chains merge at coarser scales".into(),
        })
    }
}

/// Runs [`detect`] over a corpus of centers in parallel, preserving order.
pub fn detect_corpus(
    domain: &CombDomain,
    centers: &[Point2],
    i_min: u32,
    i_max: u32,
    resolution: usize,
) -> Result<Vec<Verdict>> {
    centers
        .par_iter()
        .map(|&c| detect(domain, c, i_min, i_max, resolution))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::CantorParams;

    fn third() -> CombDomain {
        CombDomain::new(CantorParams::new(1.0 / 3.0, 40).unwrap(), 14).unwrap()
    }

    #[test]
    fn two_components_at_interior_cantor_point() {
        let d = third();
        let lab = components_in_ball(&d, Point2::new(1.0 / 3.0, 0.0), 1.0 / 9.0, 512).unwrap();
        assert_eq!(lab.meeting_half.len(), 2, "labels: {:?}", lab.meeting_half);
        assert!(lab.near_center.len() >= 2);
    }

    #[test]
    fn one_component_on_flat_wall() {
        let d = third();
        let lab = components_in_ball(&d, Point2::new(-1.0, 0.0), 0.25, 256).unwrap();
        assert_eq!(lab.meeting_half.len(), 1);
    }

    #[test]
    fn one_component_at_tent_apex() {
        let d = third();
        let lab = components_in_ball(&d, Point2::new(0.0, 0.0), 0.25, 512).unwrap();
        assert_eq!(lab.meeting_half.len(), 1);
    }

    #[test]
    fn counts_stable_under_refinement() {
        let d = third();
        for (center, r) in [
            (Point2::new(1.0 / 3.0, 0.0), 1.0 / 9.0),
            (Point2::new(-1.0, 0.0), 0.25),
        ] {
            let coarse = count_meeting_half(&d, center, r, 256).unwrap();
            let fine = count_meeting_half(&d, center, r, 1024).unwrap();
            assert_eq!(coarse, fine);
        }
    }

    #[test]
    fn labeling_is_deterministic() {
        let d = third();
        let a = components_in_ball(&d, Point2::new(1.0 / 3.0, 0.0), 0.125, 256).unwrap();
        let b = components_in_ball(&d, Point2::new(1.0 / 3.0, 0.0), 0.125, 256).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.label_count, b.label_count);
    }

    #[test]
    fn masks_mirror_for_axis_centers() {
        let d = third();
        let lab = components_in_ball(&d, Point2::new(1.0 / 3.0, 0.0), 1.0 / 9.0, 256).unwrap();
        let res = lab.raster.resolution;
        let two: Vec<u32> = lab.meeting_half.iter().copied().collect();
        assert_eq!(two.len(), 2);
        // reflecting rows maps one component mask onto the other
        for iy in 0..res {
            for ix in 0..res {
                let l = lab.labels[iy * res + ix];
                let m = lab.labels[(res - 1 - iy) * res + ix];
                if l == two[0] {
                    assert_eq!(m, two[1]);
                } else if l == two[1] {
                    assert_eq!(m, two[0]);
                }
            }
        }
    }

    #[test]
    fn detect_positive_at_interior_endpoint() {
        let d = third();
        let v = detect(&d, Point2::new(1.0 / 3.0, 0.0), 3, 8, 256).unwrap();
        match &v {
            Verdict::TwoSided(cert) => {
                assert_eq!(cert.start_level, 3, "split visible at every scale");
                assert_eq!(cert.scales.len(), 6);
                for w in cert.labels.iter() {
                    assert_ne!(w.0, w.1);
                }
            }
            other => panic!("expected two-sided, got {other:?}"),
        }
    }

    #[test]
    fn detect_negative_at_origin_and_wall() {
        let d = third();
        for center in [Point2::new(0.0, 0.0), Point2::new(-1.0, 0.0), Point2::new(0.0, 1.0)] {
            let v = detect(&d, center, 3, 8, 256).unwrap();
            assert!(
                matches!(v, Verdict::NotTwoSided { .. }),
                "center ({}, {}): {v:?}",
                center.x,
                center.y
            );
        }
    }

    #[test]
    fn detect_positive_with_short_suffix_near_origin() {
        // 1/243 is an endpoint whose split only fits inside the finest scale.
        let d = third();
        let t = 1.0 / 243.0;
        let v = detect(&d, Point2::new(t, 0.0), 3, 8, 256).unwrap();
        match &v {
            Verdict::TwoSided(cert) => {
                assert!(cert.start_level > 3, "suffix must start below the coarsest scale");
            }
            other => panic!("expected two-sided, got {other:?}"),
        }
    }

    #[test]
    fn detect_rejects_far_centers() {
        let d = third();
        match detect(&d, Point2::new(-0.5, 0.5), 3, 6, 128) {
            Err(Error::NotNearBoundary { .. }) => {}
            other => panic!("expected precondition failure, got {other:?}"),
        }
    }

    #[test]
    fn detect_validates_scale_range() {
        let d = third();
        assert!(detect(&d, Point2::new(1.0 / 3.0, 0.0), 5, 5, 128).is_err());
    }
}
