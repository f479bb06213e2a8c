//! The comb domain: the open square `(-1,1)^2` minus the tent region
//! `{(x, y) : x >= 0, |y| <= d(x, C_lambda)}`.
//!
//! The removed set pinches to zero width at every Cantor point, so the
//! boundary consists of the four square sides plus the two graphs
//! `y = +-d(x, C_lambda)` over `[0, 1]`. Distance queries work against the
//! depth-`n` truncation of those graphs (distance to the endpoint set of the
//! level-`n` closed intervals), which dominates the true profile pointwise and
//! deviates from it by at most `lambda^n / 2`.

use serde::{Deserialize, Serialize};

use crate::cantor::{cantor_distance, CantorParams, CertifiedDist};
use crate::error::{Error, Result};
use crate::geom::{segment_distance, Point2, Polyline};

/// Tent depths above this would materialize unusably large polylines.
pub const TENT_DEPTH_CAP: u32 = 18;

/// Rasters above this cap would not fit the configured memory budget.
pub const RASTER_RESOLUTION_CAP: usize = 4096;

/// Classification of a point relative to the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// Inside the open domain.
    Interior,
    /// Inside the removed tent set (complement within the square).
    Tent,
    /// Outside the open square.
    OutsideSquare,
    /// Within the certified uncertainty band around the boundary.
    BoundaryBand,
}

/// The comb domain for a fixed Cantor parameter set.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CombDomain {
    cantor: CantorParams,
    tent_depth: u32,
}

impl CombDomain {
    /// `tent_depth` controls the truncation of the tent profile used for
    /// distance queries and the boundary polyline. It must not exceed the
    /// Cantor recursion depth.
    pub fn new(cantor: CantorParams, tent_depth: u32) -> Result<Self> {
        if tent_depth == 0 {
            return Err(Error::InvalidParameter("tent_depth must be >= 1".into()));
        }
        if tent_depth > cantor.max_depth() {
            return Err(Error::InvalidParameter(format!(
                "tent_depth {tent_depth} exceeds cantor max_depth {}",
                cantor.max_depth()
            )));
        }
        if tent_depth > TENT_DEPTH_CAP {
            return Err(Error::LevelOutOfRange {
                requested: tent_depth,
                max: TENT_DEPTH_CAP,
            });
        }
        Ok(CombDomain { cantor, tent_depth })
    }

    pub fn cantor(&self) -> &CantorParams {
        &self.cantor
    }

    pub fn lambda(&self) -> f64 {
        self.cantor.lambda()
    }

    pub fn tent_depth(&self) -> u32 {
        self.tent_depth
    }

    /// Width of the band treated as "on the boundary" by callers that need a
    /// near-boundary precondition. Covers both truncation error sources.
    pub fn boundary_band(&self) -> f64 {
        2.0 * self.lambda().powi(self.tent_depth as i32)
    }

    /// Classifies `z` against the square and the removed tent set. The tent
    /// test uses the certified Cantor distance, so points whose membership
    /// cannot be decided at the configured depth land in `BoundaryBand`.
    pub fn contains(&self, z: Point2) -> Region {
        if z.x.abs() >= 1.0 || z.y.abs() >= 1.0 {
            return Region::OutsideSquare;
        }
        if z.x < 0.0 {
            return Region::Interior;
        }
        let d = cantor_distance(z.x, &self.cantor);
        let ay = z.y.abs();
        if ay > d.upper() {
            Region::Interior
        } else if ay <= d.value - d.error {
            Region::Tent
        } else {
            Region::BoundaryBand
        }
    }

    /// True when `z` lies in the closed complement of the domain, with the
    /// uncertainty band counted as complement.
    pub fn in_complement(&self, z: Point2) -> bool {
        self.contains(z) != Region::Interior
    }

    /// Distance from `z` to the boundary, certified to `lambda^tent_depth`.
    ///
    /// Exact for the four square walls; the tent part is the distance to the
    /// depth-`tent_depth` truncated profile, whose graph is within
    /// `lambda^tent_depth / 2` of the true one in Hausdorff distance.
    pub fn boundary_distance(&self, z: Point2) -> CertifiedDist {
        let mut best = wall_distance(z);
        // Both tents are mirror images; for |y| only the upper one can win.
        let q = Point2::new(z.x, z.y.abs());
        tent_distance(self.lambda(), q, 0.0, 1.0, self.tent_depth, &mut best);
        CertifiedDist {
            value: best,
            error: 0.5 * self.lambda().powi(self.tent_depth as i32),
        }
    }

    /// Exact maximum of the truncated tent profile over `[x0, x1]`.
    /// Returns 0 when the window misses `[0, 1]`.
    pub fn max_tent_height(&self, x0: f64, x1: f64) -> f64 {
        let lo = x0.max(0.0);
        let hi = x1.min(1.0);
        if lo > hi {
            return 0.0;
        }
        let mut best = 0.0f64;
        tent_max(self.lambda(), lo, hi, 0.0, 1.0, self.tent_depth, &mut best);
        best
    }

    /// The boundary as polylines: the square loop, then the upper and lower
    /// tent graphs over `[0, 1]` at the requested truncation depth.
    pub fn boundary_polyline_at(&self, depth: u32) -> Result<Vec<Polyline>> {
        if depth == 0 || depth > self.tent_depth {
            return Err(Error::LevelOutOfRange {
                requested: depth,
                max: self.tent_depth,
            });
        }
        let square = Polyline::new(vec![
            Point2::new(-1.0, -1.0),
            Point2::new(1.0, -1.0),
            Point2::new(1.0, 1.0),
            Point2::new(-1.0, 1.0),
            Point2::new(-1.0, -1.0),
        ])?;
        let mut upper = Vec::with_capacity(1 << (depth + 2));
        tent_vertices(self.lambda(), 0.0, 1.0, depth, &mut upper);
        upper.push(Point2::new(1.0, 0.0));
        let lower: Vec<Point2> = upper.iter().map(|p| Point2::new(p.x, -p.y)).collect();
        Ok(vec![square, Polyline::new(upper)?, Polyline::new(lower)?])
    }

    /// Boundary polylines at the domain's own tent depth.
    pub fn boundary_polyline(&self) -> Result<Vec<Polyline>> {
        self.boundary_polyline_at(self.tent_depth)
    }

    /// Rasterizes the ball `B(center, radius)`.
    ///
    /// A cell counts as inside the domain only when the whole cell square
    /// certifiably avoids the removed set and the square boundary; cells are
    /// assigned to the ball by their center. This keeps the zero-width pinch
    /// of the tent visible at every resolution: any cell whose closed square
    /// meets the removed axis segment is excluded, so flood fills cannot
    /// tunnel between the two sides.
    pub fn raster(&self, center: Point2, radius: f64, resolution: usize) -> Result<RasterBall> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {radius}"
            )));
        }
        if resolution < 16 {
            return Err(Error::InvalidParameter(format!(
                "resolution must be >= 16, got {resolution}"
            )));
        }
        if resolution > RASTER_RESOLUTION_CAP {
            return Err(Error::ResolutionCap {
                requested: resolution,
                cap: RASTER_RESOLUTION_CAP,
            });
        }
        let cell = 2.0 * radius / resolution as f64;
        let x_base = center.x - radius;
        let y_base = center.y - radius;

        // The tent test depends on the column only.
        let mut col_max = vec![0.0f64; resolution];
        let mut col_free = vec![false; resolution];
        for ix in 0..resolution {
            let x0 = x_base + ix as f64 * cell;
            let x1 = x0 + cell;
            if x1 < 0.0 {
                col_free[ix] = true;
            } else {
                col_max[ix] = self.max_tent_height(x0, x1);
            }
        }

        let mut occ = vec![Occupancy::OutsideBall; resolution * resolution];
        for iy in 0..resolution {
            let y0 = y_base + iy as f64 * cell;
            let y1 = y0 + cell;
            let cy = y0 + 0.5 * cell;
            let min_abs_y = if y0 > 0.0 {
                y0
            } else if y1 < 0.0 {
                -y1
            } else {
                0.0
            };
            for ix in 0..resolution {
                let x0 = x_base + ix as f64 * cell;
                let x1 = x0 + cell;
                let cx = x0 + 0.5 * cell;
                let dx = cx - center.x;
                let dy = cy - center.y;
                if dx * dx + dy * dy >= radius * radius {
                    continue;
                }
                let in_square = x0 > -1.0 && x1 < 1.0 && y0 > -1.0 && y1 < 1.0;
                let clear_of_tent = col_free[ix] || min_abs_y > col_max[ix];
                occ[iy * resolution + ix] = if in_square && clear_of_tent {
                    Occupancy::InDomain
                } else {
                    Occupancy::NotDomain
                };
            }
        }
        Ok(RasterBall {
            center,
            radius,
            resolution,
            cell,
            occupancy: occ,
        })
    }
}

/// Per-cell raster state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Occupancy {
    InDomain,
    NotDomain,
    OutsideBall,
}

/// A rasterized ball: square grid over `[center - r, center + r]^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterBall {
    pub center: Point2,
    pub radius: f64,
    pub resolution: usize,
    pub cell: f64,
    occupancy: Vec<Occupancy>,
}

impl RasterBall {
    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> Occupancy {
        self.occupancy[iy * self.resolution + ix]
    }

    #[inline]
    pub fn is_in(&self, ix: usize, iy: usize) -> bool {
        self.get(ix, iy) == Occupancy::InDomain
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point2 {
        Point2::new(
            self.center.x - self.radius + (ix as f64 + 0.5) * self.cell,
            self.center.y - self.radius + (iy as f64 + 0.5) * self.cell,
        )
    }

    pub fn occupancy(&self) -> &[Occupancy] {
        &self.occupancy
    }
}

/// Distance to the four sides of the square `[-1, 1]^2`.
fn wall_distance(z: Point2) -> f64 {
    let c = [
        (Point2::new(-1.0, -1.0), Point2::new(1.0, -1.0)),
        (Point2::new(1.0, -1.0), Point2::new(1.0, 1.0)),
        (Point2::new(1.0, 1.0), Point2::new(-1.0, 1.0)),
        (Point2::new(-1.0, 1.0), Point2::new(-1.0, -1.0)),
    ];
    c.iter()
        .map(|&(a, b)| segment_distance(z, a, b))
        .fold(f64::INFINITY, f64::min)
}

#[inline]
fn update_seg(best: &mut f64, q: Point2, a: Point2, b: Point2) {
    let d = segment_distance(q, a, b);
    if d < *best {
        *best = d;
    }
}

/// Distance from `q` (with `q.y >= 0`) to the truncated upper tent graph over
/// the closed interval `[a, b]`, descending nearer children first and pruning
/// subtrees by their bounding boxes.
fn tent_distance(lambda: f64, q: Point2, a: f64, b: f64, depth: u32, best: &mut f64) {
    let half = 0.5 * (b - a);
    let dx = if q.x < a {
        a - q.x
    } else if q.x > b {
        q.x - b
    } else {
        0.0
    };
    let dy = (q.y - half).max(0.0);
    if (dx * dx + dy * dy).sqrt() >= *best {
        return;
    }
    let mid = 0.5 * (a + b);
    if depth == 0 {
        update_seg(best, q, Point2::new(a, 0.0), Point2::new(mid, half));
        update_seg(best, q, Point2::new(mid, half), Point2::new(b, 0.0));
        return;
    }
    let w = b - a;
    let lo = a + lambda * w;
    let hi = b - lambda * w;
    let gm = 0.5 * (lo + hi);
    let gh = 0.5 * (hi - lo);
    update_seg(best, q, Point2::new(lo, 0.0), Point2::new(gm, gh));
    update_seg(best, q, Point2::new(gm, gh), Point2::new(hi, 0.0));
    if q.x <= mid {
        tent_distance(lambda, q, a, lo, depth - 1, best);
        tent_distance(lambda, q, hi, b, depth - 1, best);
    } else {
        tent_distance(lambda, q, hi, b, depth - 1, best);
        tent_distance(lambda, q, a, lo, depth - 1, best);
    }
}

/// Maximum of a unit-slope tent of height `h` over `[lo, lo + 2h] ∩ [x0, x1]`.
fn tent_piece_max(lo: f64, hi: f64, x0: f64, x1: f64) -> f64 {
    let a = x0.max(lo);
    let b = x1.min(hi);
    if a > b {
        return 0.0;
    }
    let mid = 0.5 * (lo + hi);
    let profile = |x: f64| (x - lo).min(hi - x);
    if a <= mid && mid <= b {
        profile(mid)
    } else {
        profile(a).max(profile(b))
    }
}

/// Exact maximum of the truncated profile over `[x0, x1] ∩ [a, b]`.
fn tent_max(lambda: f64, x0: f64, x1: f64, a: f64, b: f64, depth: u32, best: &mut f64) {
    if x1 < a || x0 > b {
        return;
    }
    let w = b - a;
    if depth == 0 {
        let m = tent_piece_max(a, b, x0, x1);
        if m > *best {
            *best = m;
        }
        return;
    }
    if x0 <= a && b <= x1 {
        // Fully contained subtree: the widest gap apex dominates.
        let m = 0.5 * (1.0 - 2.0 * lambda) * w;
        if m > *best {
            *best = m;
        }
        return;
    }
    if 0.5 * w <= *best {
        return;
    }
    let lo = a + lambda * w;
    let hi = b - lambda * w;
    let m = tent_piece_max(lo, hi, x0, x1);
    if m > *best {
        *best = m;
    }
    tent_max(lambda, x0, x1, a, lo, depth - 1, best);
    tent_max(lambda, x0, x1, hi, b, depth - 1, best);
}

/// Emits the upper tent vertices over `[a, b)` in order, excluding the final
/// `(b, 0)` vertex, which the caller appends once at the very end.
fn tent_vertices(lambda: f64, a: f64, b: f64, depth: u32, out: &mut Vec<Point2>) {
    if depth == 0 {
        let half = 0.5 * (b - a);
        out.push(Point2::new(a, 0.0));
        out.push(Point2::new(0.5 * (a + b), half));
        return;
    }
    let w = b - a;
    let lo = a + lambda * w;
    let hi = b - lambda * w;
    tent_vertices(lambda, a, lo, depth - 1, out);
    out.push(Point2::new(lo, 0.0));
    out.push(Point2::new(0.5 * (lo + hi), 0.5 * (hi - lo)));
    tent_vertices(lambda, hi, b, depth - 1, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn domain(lambda: f64, max_depth: u32, tent_depth: u32) -> CombDomain {
        CombDomain::new(CantorParams::new(lambda, max_depth).unwrap(), tent_depth).unwrap()
    }

    fn third() -> CombDomain {
        domain(1.0 / 3.0, 40, 14)
    }

    /// Brute-force oracle: minimum distance over a densely sampled boundary
    /// polyline plus the exact wall distance.
    fn brute_force_boundary_distance(dom: &CombDomain, z: Point2, per_segment: usize) -> f64 {
        let mut best = wall_distance(z);
        for poly in dom.boundary_polyline().unwrap().iter().skip(1) {
            for (a, b) in poly.segments() {
                for k in 0..=per_segment {
                    let t = k as f64 / per_segment as f64;
                    let p = Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
                    best = best.min(z.dist(p));
                }
            }
        }
        best
    }

    #[test]
    fn contains_examples() {
        let d = third();
        assert_eq!(d.contains(Point2::new(-0.5, 0.0)), Region::Interior);
        assert_eq!(d.contains(Point2::new(0.5, 0.1)), Region::Tent);
        assert_eq!(d.contains(Point2::new(1.5, 0.0)), Region::OutsideSquare);
    }

    #[test]
    fn removed_set_contains_axis_segment() {
        let d = third();
        for i in 0..=200 {
            let t = i as f64 / 200.0;
            let region = d.contains(Point2::new(t.min(1.0 - 1e-12), 0.0));
            assert_ne!(region, Region::Interior, "axis point ({t}, 0) must not be interior");
        }
    }

    #[test]
    fn boundary_distance_examples() {
        let d = third();
        let left = d.boundary_distance(Point2::new(-0.5, 0.0));
        assert!((left.value - 0.5).abs() < 1e-12);

        let above_gap = d.boundary_distance(Point2::new(0.5, 0.2));
        assert!(
            (above_gap.value - 1.0 / 30.0).abs() < 1e-12,
            "got {}",
            above_gap.value
        );

        let outside = d.boundary_distance(Point2::new(2.0, 0.0));
        assert!((outside.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_distance_matches_brute_force() {
        let d = domain(1.0 / 3.0, 40, 10);
        let probes = [
            Point2::new(0.5, 0.2),
            Point2::new(0.31, 0.004),
            Point2::new(0.9, -0.3),
            Point2::new(-0.2, 0.7),
            Point2::new(0.12, 0.0),
            Point2::new(1.4, 0.8),
            Point2::new(0.666, 0.001),
        ];
        for z in probes {
            let fast = d.boundary_distance(z).value;
            let brute = brute_force_boundary_distance(&d, z, 400);
            // The oracle samples the same truncated polyline, so it can only
            // overshoot by the sampling pitch.
            assert!(
                fast <= brute + 1e-12 && brute - fast <= 2e-3,
                "z = ({}, {}): fast {fast}, brute {brute}",
                z.x,
                z.y
            );
        }
    }

    #[test]
    fn tent_vertices_level_one() {
        let d = domain(1.0 / 3.0, 8, 1);
        let polys = d.boundary_polyline().unwrap();
        let upper = &polys[1];
        let expect = [
            (0.0, 0.0),
            (1.0 / 6.0, 1.0 / 6.0),
            (1.0 / 3.0, 0.0),
            (0.5, 1.0 / 6.0),
            (2.0 / 3.0, 0.0),
            (5.0 / 6.0, 1.0 / 6.0),
            (1.0, 0.0),
        ];
        assert_eq!(upper.vertices().len(), expect.len());
        for (v, (ex, ey)) in upper.vertices().iter().zip(expect) {
            assert!((v.x - ex).abs() < 1e-15 && (v.y - ey).abs() < 1e-15);
        }
        // lower tent is the mirror image
        for (u, l) in polys[1].vertices().iter().zip(polys[2].vertices()) {
            assert_eq!(u.x, l.x);
            assert_eq!(u.y, -l.y);
        }
    }

    #[test]
    fn tent_apex_height_lambda_04() {
        let d = domain(0.4, 8, 2);
        let polys = d.boundary_polyline().unwrap();
        let apex = polys[1]
            .vertices()
            .iter()
            .cloned()
            .fold(Point2::new(0.0, 0.0), |acc, p| if p.y > acc.y { p } else { acc });
        assert!((apex.y - 0.1).abs() < 1e-15);
        assert!((apex.x - 0.5).abs() < 1e-15);
    }

    #[test]
    fn polyline_dominates_true_profile() {
        // d_n >= d with gap 0 on enumerated gaps and at most lambda^n on leaves.
        let d = domain(0.4, 30, 6);
        let cap = 0.4f64.powi(6);
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let truth = cantor_distance(x, d.cantor());
            // max over the degenerate window [x, x] is the profile value d_n(x)
            let h = d.max_tent_height(x, x);
            assert!(h + 1e-15 >= truth.value - truth.error);
            assert!(h - (truth.value + truth.error) <= cap);
        }
    }

    #[test]
    fn max_tent_height_matches_dense_scan() {
        let d = domain(1.0 / 3.0, 30, 8);
        let windows = [(0.0, 1.0), (0.3, 0.41), (0.332, 0.334), (0.65, 0.7), (-0.2, 0.05)];
        for (x0, x1) in windows {
            let exact = d.max_tent_height(x0, x1);
            let mut scan = 0.0f64;
            for i in 0..=20000 {
                let x = x0 + (x1 - x0) * i as f64 / 20000.0;
                scan = scan.max(d.max_tent_height(x, x));
            }
            assert!(scan <= exact + 1e-12);
            assert!(exact - scan <= 1e-4, "window ({x0},{x1}): exact {exact} scan {scan}");
        }
    }

    #[test]
    fn raster_rejects_bad_inputs() {
        let d = third();
        assert!(d.raster(Point2::new(0.0, 0.0), 0.0, 64).is_err());
        assert!(d.raster(Point2::new(0.0, 0.0), 0.1, 8).is_err());
        match d.raster(Point2::new(0.0, 0.0), 0.1, 100_000) {
            Err(Error::ResolutionCap { .. }) => {}
            other => panic!("expected resolution cap, got {other:?}"),
        }
    }

    #[test]
    fn raster_interior_ball_fully_inside() {
        let d = third();
        let r = d.raster(Point2::new(-0.5, 0.0), 0.25, 64).unwrap();
        for iy in 0..64 {
            for ix in 0..64 {
                assert_ne!(r.get(ix, iy), Occupancy::NotDomain);
            }
        }
    }

    #[test]
    fn raster_is_deterministic() {
        let d = third();
        let a = d.raster(Point2::new(1.0 / 3.0, 0.0), 1.0 / 9.0, 128).unwrap();
        let b = d.raster(Point2::new(1.0 / 3.0, 0.0), 1.0 / 9.0, 128).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn raster_refinement_keeps_in_cells() {
        // A cell certified inside stays inside when split in four.
        let d = third();
        let center = Point2::new(1.0 / 3.0, 0.0);
        let coarse = d.raster(center, 1.0 / 9.0, 128).unwrap();
        let fine = d.raster(center, 1.0 / 9.0, 256).unwrap();
        for iy in 0..128 {
            for ix in 0..128 {
                if coarse.get(ix, iy) != Occupancy::InDomain {
                    continue;
                }
                for (jx, jy) in [
                    (2 * ix, 2 * iy),
                    (2 * ix + 1, 2 * iy),
                    (2 * ix, 2 * iy + 1),
                    (2 * ix + 1, 2 * iy + 1),
                ] {
                    let sub = fine.get(jx, jy);
                    assert_ne!(
                        sub,
                        Occupancy::NotDomain,
                        "coarse in-cell ({ix},{iy}) has excluded child ({jx},{jy})"
                    );
                }
            }
        }
    }

    #[test]
    fn tent_depth_validation() {
        let cp = CantorParams::new(1.0 / 3.0, 8).unwrap();
        assert!(CombDomain::new(cp, 0).is_err());
        assert!(CombDomain::new(cp, 9).is_err());
        let cp_deep = CantorParams::new(1.0 / 3.0, 40).unwrap();
        assert!(CombDomain::new(cp_deep, TENT_DEPTH_CAP + 1).is_err());
    }

    proptest! {
        #[test]
        fn mirror_symmetry_exact(x in -1.5f64..1.5, y in -1.5f64..1.5) {
            let d = domain(1.0 / 3.0, 30, 8);
            let a = d.boundary_distance(Point2::new(x, y));
            let b = d.boundary_distance(Point2::new(x, -y));
            prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
        }

        #[test]
        fn boundary_distance_lipschitz(
            x1 in -1.2f64..1.2, y1 in -1.2f64..1.2,
            x2 in -1.2f64..1.2, y2 in -1.2f64..1.2,
        ) {
            let d = domain(0.4, 30, 8);
            let a = d.boundary_distance(Point2::new(x1, y1));
            let b = d.boundary_distance(Point2::new(x2, y2));
            let sep = Point2::new(x1, y1).dist(Point2::new(x2, y2));
            prop_assert!((a.value - b.value).abs() <= sep + a.error + b.error + 1e-12);
        }

        #[test]
        fn interior_points_have_positive_distance(x in -0.999f64..0.999, y in -0.999f64..0.999) {
            let d = domain(1.0 / 3.0, 30, 10);
            let z = Point2::new(x, y);
            if d.contains(z) == Region::Interior {
                let bd = d.boundary_distance(z);
                prop_assert!(bd.value > -bd.error);
            }
        }
    }
}
