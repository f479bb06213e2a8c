//! The standard Cantor set with ratio `lambda`: interval enumeration and
//! distance evaluation with a certified error bound.
//!
//! The set is the attractor of the two-map system `x -> lambda*x` and
//! `x -> lambda*x + 1 - lambda` for `0 < lambda < 1/2`. Level `j` leaves
//! `2^j` closed intervals of length `lambda^j`; the `2^(j-1)` removed open
//! intervals at level `j` have length `(1 - 2*lambda) * lambda^(j-1)`.
//!
//! All interval endpoints are produced by repeated affine subdivision of
//! `[0, 1]`, never by evaluating powers directly, so the enumeration and the
//! distance recursion walk bit-identical coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on materialized interval lists (`2^24` entries).
pub const DEFAULT_ENUM_CAP: u32 = 24;

/// Ratio and truncation depth of a Cantor construction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CantorParams {
    lambda: f64,
    max_depth: u32,
    #[serde(default = "default_enum_cap")]
    enum_cap: u32,
}

fn default_enum_cap() -> u32 {
    DEFAULT_ENUM_CAP
}

impl CantorParams {
    pub fn new(lambda: f64, max_depth: u32) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 || lambda >= 0.5 {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in (0, 1/2), got {lambda}"
            )));
        }
        if max_depth == 0 {
            return Err(Error::InvalidParameter("max_depth must be >= 1".into()));
        }
        Ok(CantorParams {
            lambda,
            max_depth,
            enum_cap: DEFAULT_ENUM_CAP,
        })
    }

    /// Overrides the materialization cap for interval lists.
    pub fn with_enum_cap(mut self, cap: u32) -> Self {
        self.enum_cap = cap;
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    fn check_enum_level(&self, j: u32) -> Result<()> {
        if j > self.max_depth {
            return Err(Error::LevelOutOfRange {
                requested: j,
                max: self.max_depth,
            });
        }
        if j > self.enum_cap {
            return Err(Error::LevelOutOfRange {
                requested: j,
                max: self.enum_cap,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalKind {
    Closed,
    Gap,
}

/// One interval of the construction, closed remainder or removed gap.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LevelInterval {
    pub level: u32,
    /// 1-based position, left to right within the level.
    pub index: u64,
    pub kind: IntervalKind,
    pub left: f64,
    pub right: f64,
}

impl LevelInterval {
    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.left + self.right)
    }
}

/// Splits `[a, b]` into its two children and the removed middle part,
/// with the exact arithmetic shared by every routine in this module.
#[inline]
fn subdivide(lambda: f64, a: f64, b: f64) -> (f64, f64) {
    let w = b - a;
    (a + lambda * w, b - lambda * w)
}

/// The `2^j` closed intervals remaining after `j` subdivision rounds.
pub fn level_intervals(params: &CantorParams, j: u32) -> Result<Vec<LevelInterval>> {
    params.check_enum_level(j)?;
    let mut spans = vec![(0.0f64, 1.0f64)];
    for _ in 0..j {
        let mut next = Vec::with_capacity(spans.len() * 2);
        for &(a, b) in &spans {
            let (lo, hi) = subdivide(params.lambda, a, b);
            next.push((a, lo));
            next.push((hi, b));
        }
        spans = next;
    }
    Ok(spans
        .into_iter()
        .enumerate()
        .map(|(i, (left, right))| LevelInterval {
            level: j,
            index: i as u64 + 1,
            kind: IntervalKind::Closed,
            left,
            right,
        })
        .collect())
}

/// The `2^(j-1)` open intervals removed at round `j`.
pub fn gap_intervals(params: &CantorParams, j: u32) -> Result<Vec<LevelInterval>> {
    if j == 0 {
        return Err(Error::LevelOutOfRange {
            requested: 0,
            max: params.max_depth,
        });
    }
    params.check_enum_level(j)?;
    let parents = level_intervals(params, j - 1)?;
    Ok(parents
        .into_iter()
        .enumerate()
        .map(|(i, parent)| {
            let (lo, hi) = subdivide(params.lambda, parent.left, parent.right);
            LevelInterval {
                level: j,
                index: i as u64 + 1,
                kind: IntervalKind::Gap,
                left: lo,
                right: hi,
            }
        })
        .collect())
}

/// Sorted endpoint coordinates of the level-`j` closed intervals
/// (`2^(j+1)` values).
pub fn endpoints(params: &CantorParams, j: u32) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(1 << (j + 1));
    for iv in level_intervals(params, j)? {
        out.push(iv.left);
        out.push(iv.right);
    }
    Ok(out)
}

/// A distance value together with a certified error bound:
/// the true quantity lies in `[value - error, value + error]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CertifiedDist {
    pub value: f64,
    pub error: f64,
}

impl CertifiedDist {
    pub fn exact(value: f64) -> Self {
        CertifiedDist { value, error: 0.0 }
    }

    /// Certified lower bound, clamped at zero.
    pub fn lower(&self) -> f64 {
        (self.value - self.error).max(0.0)
    }

    /// Certified upper bound.
    pub fn upper(&self) -> f64 {
        self.value + self.error
    }
}

/// Distance from `x` to the Cantor set, with certified error.
///
/// The recursion descends through the closed intervals containing `x`. It
/// terminates exactly (zero error) once `x` is outside `[0, 1]`, inside a
/// removed gap of level `<= max_depth`, or on a subdivision endpoint. If the
/// depth cap is hit inside a closed interval `[a, b]`, the true distance lies
/// in `[0, min(x - a, b - x)]` and the midpoint of that range is reported, so
/// the error never exceeds `lambda^max_depth / 2`.
pub fn cantor_distance(x: f64, params: &CantorParams) -> CertifiedDist {
    if x <= 0.0 {
        return CertifiedDist::exact(-x);
    }
    if x >= 1.0 {
        return CertifiedDist::exact(x - 1.0);
    }
    let (mut a, mut b) = (0.0f64, 1.0f64);
    for _ in 0..params.max_depth {
        let (lo, hi) = subdivide(params.lambda, a, b);
        if x <= lo {
            b = lo;
        } else if x >= hi {
            a = hi;
        } else {
            // Gap interior: both gap endpoints belong to the set.
            return CertifiedDist::exact((x - lo).min(hi - x));
        }
    }
    let cap = (x - a).min(b - x);
    CertifiedDist {
        value: 0.5 * cap,
        error: 0.5 * cap,
    }
}
