//! Curve-condition machinery: adaptive quadrature of
//! `∫_γ dist(z, ∂Ω)^(1-p) ds`, the closed forms it is checked against, the
//! three-case construction of complement curves, and the empirical estimate
//! of the curve-condition constant.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::cantor_distance;
use crate::comb::{CombDomain, Region};
use crate::error::{Error, Result};
use crate::geom::{Point2, Polyline};

/// A Sobolev exponent restricted to `(1, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p <= 1.0 || p >= 2.0 {
            return Err(Error::InvalidParameter(format!(
                "exponent p must lie in (1, 2), got {p}"
            )));
        }
        Ok(Exponent(p))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Largest exponent for which the full-axis integrals converge:
/// `2 * lambda^(2-p) < 1` iff `p < 2 - log 2 / log(1/lambda)`.
pub fn admissibility_threshold(lambda: f64) -> f64 {
    2.0 - 2.0f64.ln() / (1.0 / lambda).ln()
}

/// Checks `2 * lambda^(2-p) < 1`.
pub fn check_admissible(lambda: f64, p: Exponent) -> Result<()> {
    let value = 2.0 * lambda.powf(2.0 - p.value());
    if value >= 1.0 {
        return Err(Error::Inadmissible {
            lambda,
            p: p.value(),
            value,
            threshold: admissibility_threshold(lambda),
        });
    }
    Ok(())
}

// 15-point Kronrod extension of the 7-point Gauss rule (positive abscissae).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod pass over `[a, b]`: (value, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    (resk * h, ((resk - resg) * h).abs())
}

/// Quadrature outcome with its error estimate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

/// Subdivision budget per integrated segment.
pub const QUAD_BUDGET: usize = 1 << 20;

#[derive(Debug, Clone, Copy)]
struct Piece {
    err: f64,
    a: f64,
    b: f64,
    val: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.a == other.a
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max-heap by error; tie-break by position for determinism
        self.err
            .total_cmp(&other.err)
            .then(other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive bisection driven by the per-interval error estimate.
/// Refinement concentrates on the worst interval, which grades the mesh
/// geometrically into integrable endpoint singularities of type `t^(1-p)`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    budget: usize,
) -> Result<QuadResult> {
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "relative tolerance must be positive, got {rel_tol}"
        )));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            subdivisions: 0,
        });
    }
    let eval = |lo: f64, hi: f64| -> Piece {
        let (val, err) = gk15(&f, lo, hi);
        if val.is_finite() && err.is_finite() {
            Piece {
                err,
                a: lo,
                b: hi,
                val,
            }
        } else {
            Piece {
                err: f64::INFINITY,
                a: lo,
                b: hi,
                val: 0.0,
            }
        }
    };

    let mut heap = std::collections::BinaryHeap::new();
    let first = eval(a, b);
    let mut total_val = first.val;
    let mut total_err = first.err;
    heap.push(first);
    while total_err > rel_tol * total_val.abs() + f64::MIN_POSITIVE {
        if heap.len() >= budget {
            let worst = heap.peek().expect("non-empty heap");
            return Err(Error::QuadratureBudget {
                budget,
                a: worst.a,
                b: worst.b,
                err: worst.err,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval shrunk to machine width and still will not settle.
            return Err(Error::QuadratureBudget {
                budget,
                a: worst.a,
                b: worst.b,
                err: f64::INFINITY,
            });
        }
        let left = eval(worst.a, mid);
        let right = eval(mid, worst.b);
        total_val += left.val + right.val - worst.val;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    // Accumulator drift is irrelevant against the quadrature error itself,
    // but return the freshly summed value.
    let value = heap.iter().map(|p| p.val).sum();
    let abs_error = heap.iter().map(|p| p.err).sum();
    Ok(QuadResult {
        value,
        abs_error,
        subdivisions: heap.len(),
    })
}

/// Integrates `profile(t)^(1-p) dt` over `[0, len]` with the same engine that
/// backs [`polyline_integral`]. `profile` plays the role of the boundary
/// distance along an arc-length parametrized segment.
pub fn profile_integral<F: Fn(f64) -> f64>(
    profile: F,
    len: f64,
    p: Exponent,
    rel_tol: f64,
) -> Result<QuadResult> {
    if !(len >= 0.0) || !len.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "profile length must be >= 0, got {len}"
        )));
    }
    let e = 1.0 - p.value();
    integrate_adaptive(move |t| profile(t).powf(e), 0.0, len, rel_tol, QUAD_BUDGET)
}

const COMPLEMENT_SAMPLES: usize = 32;

/// Adaptive quadrature of `dist(z, ∂Ω)^(1-p)` along a polyline lying in the
/// closed complement of the domain.
///
/// The curve is first checked by sampling: any sample strictly inside the
/// domain rejects the input. Endpoint contact with the boundary is fine; the
/// singularity `t^(1-p)` is integrable and the graded refinement resolves it.
pub fn polyline_integral(
    curve: &Polyline,
    p: Exponent,
    domain: &CombDomain,
    rel_tol: f64,
) -> Result<QuadResult> {
    for (a, b) in curve.segments() {
        for k in 0..=COMPLEMENT_SAMPLES {
            let t = k as f64 / COMPLEMENT_SAMPLES as f64;
            let z = Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
            if domain.contains(z) == Region::Interior {
                return Err(Error::OutsideComplement { x: z.x, y: z.y });
            }
        }
    }
    let e = 1.0 - p.value();
    let mut value = 0.0;
    let mut abs_error = 0.0;
    let mut subdivisions = 0;
    for (a, b) in curve.segments() {
        let len = a.dist(b);
        if len == 0.0 {
            continue;
        }
        let inv = 1.0 / len;
        let f = |t: f64| {
            let z = Point2::new(a.x + t * inv * (b.x - a.x), a.y + t * inv * (b.y - a.y));
            domain.boundary_distance(z).value.powf(e)
        };
        let r = integrate_adaptive(f, 0.0, len, rel_tol, QUAD_BUDGET)?;
        value += r.value;
        abs_error += r.abs_error;
        subdivisions += r.subdivisions;
    }
    Ok(QuadResult {
        value,
        abs_error,
        subdivisions,
    })
}

/// Closed form `2^((1-p)/2) * L^(2-p) / (2-p)` for the profile integral of a
/// unit-slope approach along a diagonal segment of length `L`.
pub fn segment_profile_integral(len: f64, p: Exponent) -> f64 {
    debug_assert!(len >= 0.0);
    if len == 0.0 {
        return 0.0;
    }
    let q = 2.0 - p.value();
    2.0f64.powf((1.0 - p.value()) / 2.0) * len.powf(q) / q
}

/// Closed form of the axis integral across one removed gap of level `j`:
/// `2^(3(p-1)/2) / (2-p) * ((1-2λ) λ^(j-1))^(2-p)`.
pub fn gap_closed_form(j: u32, p: Exponent, lambda: f64) -> f64 {
    debug_assert!(j >= 1);
    let q = 2.0 - p.value();
    let gap_len = (1.0 - 2.0 * lambda) * lambda.powi(j as i32 - 1);
    2.0f64.powf(1.5 * (p.value() - 1.0)) / q * gap_len.powf(q)
}

/// Closed form of the axis integral over a whole level-`j` closed interval:
/// the geometric sum of every gap it contains,
/// `2^(3(p-1)/2)/(2-p) * (1-2λ)^(2-p) * λ^((2-p)j) / (1 - 2λ^(2-p))`.
pub fn interval_series_closed_form(j: u32, p: Exponent, lambda: f64) -> Result<f64> {
    check_admissible(lambda, p)?;
    let q = 2.0 - p.value();
    Ok(2.0f64.powf(1.5 * (p.value() - 1.0)) / q * (1.0 - 2.0 * lambda).powf(q)
        * lambda.powf(q * j as f64)
        / (1.0 - 2.0 * lambda.powf(q)))
}

// ---------------------------------------------------------------------------
// Connecting curves.
//
// In the rotated frame u = x + y, v = x - y the open square becomes the open
// diamond |u| + |v| < 2 and diagonal segments become axis-parallel ones, so
// the outside-the-square case reduces to rectilinear routing around a convex
// obstacle. Paths may touch the closed diamond.
// ---------------------------------------------------------------------------

type Uv = (f64, f64);

fn to_uv(p: Point2) -> Uv {
    (p.x + p.y, p.x - p.y)
}

fn from_uv(q: Uv) -> Point2 {
    Point2::new(0.5 * (q.0 + q.1), 0.5 * (q.0 - q.1))
}

fn sign0(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Does the axis-parallel uv segment avoid the open diamond `|u| + |v| < 2`?
fn seg_avoids_diamond(p: Uv, q: Uv) -> bool {
    let check = |fixed: f64, lo: f64, hi: f64| -> bool {
        if fixed.abs() >= 2.0 {
            return true;
        }
        let w = 2.0 - fixed.abs();
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        !(hi > -w && lo < w)
    };
    if p.0 == q.0 {
        check(p.0, p.1, q.1)
    } else if p.1 == q.1 {
        check(p.1, p.0, q.0)
    } else {
        false
    }
}

#[derive(Clone, Copy, PartialEq)]
enum FrameLine {
    /// Vertical uv line `u = c`.
    U(f64),
    /// Horizontal uv line `v = c`.
    V(f64),
}

/// Frame lines reachable from an outside point by one safe axis move,
/// together with the landing point.
fn frame_exits(p: Uv) -> Vec<(FrameLine, Uv)> {
    let (u, v) = p;
    if u.abs() >= 2.0 {
        vec![
            (FrameLine::U(sign0(u) * 2.0), (sign0(u) * 2.0, v)),
            (FrameLine::V(2.0), (u, 2.0)),
            (FrameLine::V(-2.0), (u, -2.0)),
        ]
    } else if v.abs() >= 2.0 {
        vec![
            (FrameLine::V(sign0(v) * 2.0), (u, sign0(v) * 2.0)),
            (FrameLine::U(2.0), (2.0, v)),
            (FrameLine::U(-2.0), (-2.0, v)),
        ]
    } else {
        vec![
            (FrameLine::U(sign0(u) * 2.0), (sign0(u) * 2.0, v)),
            (FrameLine::V(sign0(v) * 2.0), (u, sign0(v) * 2.0)),
        ]
    }
}

fn path_len(path: &[Uv]) -> f64 {
    path.windows(2)
        .map(|w| (w[0].0 - w[1].0).abs() + (w[0].1 - w[1].1).abs())
        .sum()
}

fn path_valid(path: &[Uv]) -> bool {
    path.windows(2)
        .all(|w| w[0] == w[1] || seg_avoids_diamond(w[0], w[1]))
}

/// Diagonal route between two points of the closed square complement:
/// at most four slope `±1` segments avoiding the open square.
fn diagonal_route(x: Point2, y: Point2) -> Vec<Point2> {
    let p = to_uv(x);
    let q = to_uv(y);
    let mut candidates: Vec<Vec<Uv>> = Vec::new();
    if p.0 == q.0 || p.1 == q.1 {
        candidates.push(vec![p, q]);
    }
    candidates.push(vec![p, (p.0, q.1), q]);
    candidates.push(vec![p, (q.0, p.1), q]);
    for (lp, pe) in frame_exits(p) {
        for (lq, qe) in frame_exits(q) {
            match (lp, lq) {
                (a, b) if a == b => candidates.push(vec![p, pe, qe, q]),
                (FrameLine::U(a), FrameLine::V(b)) => {
                    candidates.push(vec![p, pe, (a, b), qe, q])
                }
                (FrameLine::V(b), FrameLine::U(a)) => {
                    candidates.push(vec![p, pe, (a, b), qe, q])
                }
                _ => {}
            }
        }
    }
    let best = candidates
        .into_iter()
        .filter(|c| path_valid(c))
        .min_by(|a, b| path_len(a).total_cmp(&path_len(b)))
        .expect("a frame route always exists for outside points");
    best.into_iter().map(from_uv).collect()
}

/// Category of a sampled complement pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairCase {
    Interior,
    Outside,
    Mixed,
}

impl PairCase {
    pub fn label(&self) -> &'static str {
        match self {
            PairCase::Interior => "interior",
            PairCase::Outside => "outside",
            PairCase::Mixed => "mixed",
        }
    }
}

fn inside_open_square(z: Point2) -> bool {
    z.x.abs() < 1.0 && z.y.abs() < 1.0
}

/// Builds the complement curve joining `x` to `y`, selecting the construction
/// by the position of the endpoints:
/// both outside the square -> diagonal route; both inside -> vertical drops to
/// the axis joined along it; mixed -> through the hinge point `(1, 0)`.
pub fn connect(x: Point2, y: Point2, domain: &CombDomain) -> Result<Polyline> {
    for z in [x, y] {
        if domain.contains(z) == Region::Interior {
            return Err(Error::OutsideComplement { x: z.x, y: z.y });
        }
    }
    let verts = match (inside_open_square(x), inside_open_square(y)) {
        (false, false) => diagonal_route(x, y),
        (true, true) => vec![x, Point2::new(x.x, 0.0), Point2::new(y.x, 0.0), y],
        (true, false) => inner_to_outer(x, y),
        (false, true) => {
            let mut v = inner_to_outer(y, x);
            v.reverse();
            v
        }
    };
    Polyline::new(verts)
}

fn inner_to_outer(inner: Point2, outer: Point2) -> Vec<Point2> {
    let w = Point2::new(1.0, 0.0);
    let mut verts = vec![inner, Point2::new(inner.x, 0.0), w];
    verts.extend(diagonal_route(w, outer).into_iter().skip(1));
    verts
}

/// Empirical estimate of the curve-condition constant.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CEstimate {
    /// Max over sampled pairs of `integral / |x - y|^(2-p)`.
    pub value: f64,
    pub pair_count: usize,
    pub seed: u64,
    pub worst_pair: (Point2, Point2),
}

/// One sampled pair with its integral and ratio.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PairRecord {
    pub a: Point2,
    pub b: Point2,
    pub integral: f64,
    pub ratio: f64,
    pub case: PairCase,
}

fn stratum(index: usize) -> PairCase {
    // 0.6 / 0.2 / 0.2 split, interleaved so that prefixes are nested.
    match index % 10 {
        0..=5 => PairCase::Interior,
        6 | 7 => PairCase::Outside,
        _ => PairCase::Mixed,
    }
}

fn sample_tent_point<R: Rng>(rng: &mut R, domain: &CombDomain) -> Point2 {
    let x = rng.gen::<f64>();
    let d = cantor_distance(x, domain.cantor());
    let lo = d.lower();
    let y = if lo > 0.0 { rng.gen_range(-lo..=lo) } else { 0.0 };
    Point2::new(x, y)
}

fn sample_outside_point<R: Rng>(rng: &mut R) -> Point2 {
    loop {
        let x: f64 = rng.gen_range(-2.0..2.0);
        let y: f64 = rng.gen_range(-2.0..2.0);
        if x.abs() > 1.0 || y.abs() > 1.0 {
            return Point2::new(x, y);
        }
    }
}

fn sample_pair(domain: &CombDomain, index: usize, seed: u64) -> (Point2, Point2, PairCase) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    let case = stratum(index);
    let (a, b) = match case {
        PairCase::Interior => (
            sample_tent_point(&mut rng, domain),
            sample_tent_point(&mut rng, domain),
        ),
        PairCase::Outside => (
            sample_outside_point(&mut rng),
            sample_outside_point(&mut rng),
        ),
        PairCase::Mixed => (
            sample_tent_point(&mut rng, domain),
            sample_outside_point(&mut rng),
        ),
    };
    (a, b, case)
}

/// Evaluates one deterministic pair of the sampling stream.
pub fn pair_ratio(
    domain: &CombDomain,
    p: Exponent,
    index: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<PairRecord> {
    let (a, b, case) = sample_pair(domain, index, seed);
    let curve = connect(a, b, domain)?;
    let integral = polyline_integral(&curve, p, domain, rel_tol).map_err(|e| {
        Error::PairIntegration {
            x1: a.x,
            y1: a.y,
            x2: b.x,
            y2: b.y,
            source: Box::new(e),
        }
    })?;
    let sep = a.dist(b);
    let ratio = if sep > 0.0 {
        integral.value / sep.powf(2.0 - p.value())
    } else {
        0.0
    };
    Ok(PairRecord {
        a,
        b,
        integral: integral.value,
        ratio,
        case,
    })
}

/// Samples `n_pairs` complement pairs (stratified over the three curve cases),
/// connects each with [`connect`], integrates, and returns the worst ratio.
/// Deterministic for a fixed seed: pair `k` depends only on `(seed, k)`, so
/// results are prefix-nested in `n_pairs` and independent of scheduling.
pub fn estimate_c(
    domain: &CombDomain,
    p: Exponent,
    n_pairs: usize,
    seed: u64,
) -> Result<CEstimate> {
    estimate_c_detailed(domain, p, n_pairs, seed, 1e-4).map(|(est, _)| est)
}

/// As [`estimate_c`] but also returns the per-pair records.
pub fn estimate_c_detailed(
    domain: &CombDomain,
    p: Exponent,
    n_pairs: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<(CEstimate, Vec<PairRecord>)> {
    if n_pairs == 0 {
        return Err(Error::InvalidParameter("n_pairs must be >= 1".into()));
    }
    check_admissible(domain.lambda(), p)?;
    let records: Vec<PairRecord> = (0..n_pairs)
        .into_par_iter()
        .map(|k| pair_ratio(domain, p, k, seed, rel_tol))
        .collect::<Result<_>>()?;
    let worst = records
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.ratio.total_cmp(&b.ratio).then(j.cmp(i)))
        .expect("n_pairs >= 1");
    Ok((
        CEstimate {
            value: worst.1.ratio,
            pair_count: n_pairs,
            seed,
            worst_pair: (worst.1.a, worst.1.b),
        },
        records,
    ))
}

/// CSV dump of per-pair ratios (`x1,y1,x2,y2,integral,ratio,case`).
pub fn pairs_csv(records: &[PairRecord]) -> String {
    let mut out = String::from("x1,y1,x2,y2,integral,ratio,case\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.a.x,
            r.a.y,
            r.b.x,
            r.b.y,
            r.integral,
            r.ratio,
            r.case.label()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::CantorParams;

    fn domain(lambda: f64, tent_depth: u32) -> CombDomain {
        CombDomain::new(CantorParams::new(lambda, 40).unwrap(), tent_depth).unwrap()
    }

    fn p(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn exponent_validation() {
        assert!(Exponent::new(1.0).is_err());
        assert!(Exponent::new(2.0).is_err());
        assert!(Exponent::new(1.5).is_ok());
    }

    #[test]
    fn smooth_segment_matches_antiderivative() {
        // dist = x - 1 along [(2,0), (3,0)]: ∫_1^2 t^(-1/2) dt = 2(√2 - 1).
        let d = domain(1.0 / 3.0, 14);
        let curve = Polyline::new(vec![Point2::new(2.0, 0.0), Point2::new(3.0, 0.0)]).unwrap();
        let r = polyline_integral(&curve, p(1.5), &d, 1e-10).unwrap();
        let expect = (2.0f64.sqrt() - 1.0) / 0.5;
        assert!((r.value - expect).abs() < 1e-8 * expect, "got {}", r.value);
    }

    #[test]
    fn zero_length_curve_integrates_to_zero() {
        let d = domain(1.0 / 3.0, 14);
        let curve = Polyline::new(vec![Point2::new(2.0, 0.0), Point2::new(2.0, 0.0)]).unwrap();
        let r = polyline_integral(&curve, p(1.5), &d, 1e-8).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn interior_curve_is_rejected() {
        let d = domain(1.0 / 3.0, 14);
        let curve = Polyline::new(vec![Point2::new(-0.5, 0.5), Point2::new(-0.2, 0.2)]).unwrap();
        match polyline_integral(&curve, p(1.5), &d, 1e-8) {
            Err(Error::OutsideComplement { .. }) => {}
            other => panic!("expected complement violation, got {other:?}"),
        }
    }

    #[test]
    fn profile_closed_form_examples() {
        assert!((segment_profile_integral(1.0, p(1.5)) - 1.6817928305074290).abs() < 1e-12);
        assert!((segment_profile_integral(2.0, p(1.2)) - 2.0306309908905888).abs() < 1e-12);
        assert_eq!(segment_profile_integral(0.0, p(1.7)), 0.0);
    }

    #[test]
    fn profile_integral_matches_closed_form() {
        // The engine against the pinned closed form on its defining profile.
        for pv in [1.1, 1.3, 1.5, 1.8] {
            for len in [0.5, 1.0, 2.0] {
                let got = profile_integral(|t| 2.0f64.sqrt() * t, len, p(pv), 1e-10).unwrap();
                let want = segment_profile_integral(len, p(pv));
                assert!(
                    (got.value - want).abs() < 1e-7 * want,
                    "p={pv} len={len}: {} vs {want}",
                    got.value
                );
            }
        }
    }

    #[test]
    fn gap_closed_form_examples() {
        let g1 = gap_closed_form(1, p(1.5), 1.0 / 3.0);
        assert!((g1 - 1.9419670868292937).abs() < 1e-12);
        let g2 = gap_closed_form(2, p(1.5), 1.0 / 3.0);
        assert!((g2 - g1 * (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        // lambda -> 1/2 kills the gap length
        assert!(gap_closed_form(3, p(1.3), 0.4999999) < 1e-4);
    }

    #[test]
    fn gap_integral_matches_quadrature_oracle() {
        // Independent route: numerically integrate 2∫_0^{l/2} (t/√2)^{1-p} dt.
        let lambda = 1.0f64 / 3.0;
        for pv in [1.2, 1.5] {
            for j in 1..=3u32 {
                let l = (1.0 - 2.0 * lambda) * lambda.powi(j as i32 - 1);
                let oracle = integrate_adaptive(
                    |t| 2.0 * (t / 2.0f64.sqrt()).powf(1.0 - pv),
                    0.0,
                    0.5 * l,
                    1e-11,
                    QUAD_BUDGET,
                )
                .unwrap();
                let cf = gap_closed_form(j, p(pv), lambda);
                assert!((oracle.value - cf).abs() < 1e-9 * cf);
            }
        }
    }

    #[test]
    fn series_closed_form_matches_partial_sum() {
        let lambda = 1.0 / 3.0;
        let pv = p(1.2);
        let closed = interval_series_closed_form(1, pv, lambda).unwrap();
        assert!((closed - 1.5653906844870806).abs() < 1e-3);
        let mut partial = 0.0;
        for k in 1..=40u32 {
            partial += 2.0f64.powi(k as i32 - 1) * gap_closed_form(k + 1, pv, lambda);
        }
        let x = 2.0 * lambda.powf(0.8);
        let expect_rel_tail = x.powi(40);
        let rel = (closed - partial) / closed;
        assert!(rel > 0.0, "partial sums approach from below");
        assert!((rel - expect_rel_tail).abs() < 1e-9);
    }

    #[test]
    fn series_scaling_in_j() {
        let lambda = 0.3;
        let pv = p(1.3);
        let a = interval_series_closed_form(2, pv, lambda).unwrap();
        let b = interval_series_closed_form(3, pv, lambda).unwrap();
        assert!((b / a - lambda.powf(0.7)).abs() < 1e-12);
    }

    #[test]
    fn series_admissibility_error() {
        match interval_series_closed_form(1, p(1.5), 1.0 / 3.0) {
            Err(Error::Inadmissible { threshold, .. }) => {
                assert!((threshold - (2.0 - 2.0f64.ln() / 3.0f64.ln())).abs() < 1e-12);
            }
            other => panic!("expected admissibility error, got {other:?}"),
        }
    }

    #[test]
    fn connect_interior_case_drops_to_axis() {
        let d = domain(1.0 / 3.0, 14);
        let x = Point2::new(0.4, 0.05);
        let y = Point2::new(0.6, -0.03);
        let curve = connect(x, y, &d).unwrap();
        let expect = [
            Point2::new(0.4, 0.05),
            Point2::new(0.4, 0.0),
            Point2::new(0.6, 0.0),
            Point2::new(0.6, -0.03),
        ];
        assert_eq!(curve.vertices(), &expect);
    }

    #[test]
    fn connect_outside_case_uses_diagonals() {
        let d = domain(1.0 / 3.0, 14);
        let x = Point2::new(2.0, 2.0);
        let y = Point2::new(3.0, 1.0);
        let curve = connect(x, y, &d).unwrap();
        assert!(curve.segment_count() <= 4);
        for (a, b) in curve.segments() {
            let dx = (b.x - a.x).abs();
            let dy = (b.y - a.y).abs();
            assert!((dx - dy).abs() < 1e-12, "segment not diagonal: {a:?} {b:?}");
        }
        // stays outside the open square
        for (a, b) in curve.segments() {
            for k in 0..=32 {
                let t = k as f64 / 32.0;
                let z = Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
                assert!(z.x.abs() >= 1.0 - 1e-12 || z.y.abs() >= 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn connect_outside_far_pairs_stay_bounded() {
        let d = domain(1.0 / 3.0, 14);
        let cases = [
            (Point2::new(3.0, 0.0), Point2::new(-3.0, 0.0)),
            (Point2::new(3.0, 1.0), Point2::new(-3.0, -1.0)),
            (Point2::new(0.0, 1.5), Point2::new(0.0, -1.5)),
            (Point2::new(1.2, 0.9), Point2::new(-1.2, -0.9)),
            (Point2::new(10.0, 10.0), Point2::new(10.1, 10.1)),
        ];
        for (x, y) in cases {
            let curve = connect(x, y, &d).unwrap();
            assert!(curve.segment_count() <= 4, "{x:?} {y:?}: {:?}", curve.vertices());
            assert!(curve.length() <= 20.0 * x.dist(y).max(1.0));
            for (a, b) in curve.segments() {
                assert!(((b.x - a.x).abs() - (b.y - a.y).abs()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn connect_mixed_case_passes_through_hinge() {
        let d = domain(1.0 / 3.0, 14);
        let curve = connect(Point2::new(0.5, 0.1), Point2::new(2.0, 0.0), &d).unwrap();
        assert!(curve
            .vertices()
            .iter()
            .any(|v| *v == Point2::new(1.0, 0.0)));
        // reversed order flips the same construction
        let rev = connect(Point2::new(2.0, 0.0), Point2::new(0.5, 0.1), &d).unwrap();
        let mut verts = rev.vertices().to_vec();
        verts.reverse();
        assert_eq!(curve.vertices(), verts.as_slice());
    }

    #[test]
    fn connect_rejects_interior_endpoint() {
        let d = domain(1.0 / 3.0, 14);
        match connect(Point2::new(-0.5, 0.0), Point2::new(0.5, 0.0), &d) {
            Err(Error::OutsideComplement { .. }) => {}
            other => panic!("expected precondition failure, got {other:?}"),
        }
    }

    #[test]
    fn connect_output_stays_in_complement() {
        // dense sampling with the certified membership test
        let d = domain(0.4, 14);
        let pairs = [
            (Point2::new(0.2, 0.01), Point2::new(0.9, -0.002)),
            (Point2::new(0.5, 0.09), Point2::new(1.5, 1.5)),
            (Point2::new(-1.5, 0.3), Point2::new(0.7, 0.0)),
        ];
        for (x, y) in pairs {
            let curve = connect(x, y, &d).unwrap();
            for (a, b) in curve.segments() {
                for k in 0..=100 {
                    let t = k as f64 / 100.0;
                    let z = Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
                    assert_ne!(d.contains(z), Region::Interior, "{z:?} inside domain");
                }
            }
        }
    }

    #[test]
    fn estimate_single_pair_equals_its_ratio() {
        let d = domain(1.0 / 3.0, 8);
        let pv = p(1.2);
        let est = estimate_c(&d, pv, 1, 7).unwrap();
        let rec = pair_ratio(&d, pv, 0, 7, 1e-4).unwrap();
        assert_eq!(est.value, rec.ratio);
    }

    #[test]
    fn estimate_is_deterministic_and_nested() {
        let d = domain(1.0 / 3.0, 8);
        let pv = p(1.2);
        let a = estimate_c(&d, pv, 40, 11).unwrap();
        let b = estimate_c(&d, pv, 40, 11).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.worst_pair.0, b.worst_pair.0);
        let bigger = estimate_c(&d, pv, 80, 11).unwrap();
        assert!(bigger.value >= a.value);
    }

    #[test]
    fn estimate_rejects_inadmissible_exponent() {
        let d = domain(1.0 / 3.0, 8);
        assert!(matches!(
            estimate_c(&d, p(1.5), 10, 1),
            Err(Error::Inadmissible { .. })
        ));
    }

    #[test]
    fn mirrored_pair_has_identical_ratio() {
        let d = domain(1.0 / 3.0, 8);
        let pv = p(1.2);
        let a = Point2::new(0.41, 0.03);
        let b = Point2::new(0.82, -0.01);
        let eval = |x: Point2, y: Point2| {
            let curve = connect(x, y, &d).unwrap();
            polyline_integral(&curve, pv, &d, 1e-5).unwrap().value
        };
        let plain = eval(a, b);
        let mirrored = eval(
            Point2::new(a.x, -a.y),
            Point2::new(b.x, -b.y),
        );
        assert_eq!(plain.to_bits(), mirrored.to_bits());
    }
}
