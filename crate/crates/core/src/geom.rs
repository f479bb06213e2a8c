//! Planar primitives: points, segment distance, polylines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dist(&self, other: Point2) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let vx = b.x - a.x;
    let vy = b.y - a.y;
    let len_sq = vx * vx + vy * vy;
    if len_sq == 0.0 {
        return p.dist(a);
    }
    let t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / len_sq;
    let t = t.clamp(0.0, 1.0);
    p.dist(Point2::new(a.x + t * vx, a.y + t * vy))
}

/// A rectifiable curve stored as an ordered vertex list.
///
/// Consecutive duplicate vertices are merged on construction, so a degenerate
/// input (all vertices equal) collapses to a single point with zero length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    vertices: Vec<Point2>,
}

impl Polyline {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidParameter(
                "polyline needs at least one vertex".into(),
            ));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "polyline vertex ({}, {}) is not finite",
                p.x, p.y
            )));
        }
        let mut out: Vec<Point2> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
        Ok(Polyline { vertices: out })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    /// Consecutive vertex pairs.
    pub fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    /// Total length as the sum of segment lengths.
    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).sum()
    }

    /// Appends another polyline, merging a shared junction vertex.
    pub fn concat(mut self, other: &Polyline) -> Polyline {
        for &v in other.vertices() {
            if self.vertices.last() != Some(&v) {
                self.vertices.push(v);
            }
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_distance_basics() {
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(1.0, 0.0);
        assert_eq!(segment_distance(Point2::new(0.5, 0.3), a, b), 0.3);
        assert_eq!(segment_distance(Point2::new(-1.0, 0.0), a, b), 1.0);
        let d = segment_distance(Point2::new(2.0, 1.0), a, b);
        assert!((d - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn polyline_dedupes_and_measures() {
        let p = Polyline::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 0.0),
            Point2::new(3.0, 4.0),
        ])
        .unwrap();
        assert_eq!(p.vertices().len(), 2);
        assert!((p.length() - 5.0).abs() < 1e-15);

        let degenerate = Polyline::new(vec![Point2::new(1.0, 1.0), Point2::new(1.0, 1.0)]).unwrap();
        assert_eq!(degenerate.segment_count(), 0);
        assert_eq!(degenerate.length(), 0.0);
    }
}
