//! Static SVG emission of the domain boundary and overlay point sets.

use std::fmt::Write as _;

use crate::comb::CombDomain;
use crate::error::Result;
use crate::geom::{Point2, Polyline};

/// Depth used for rendering; finer tent structure is sub-pixel on the fixed
/// canvas anyway.
const RENDER_TENT_DEPTH: u32 = 10;

/// Renders the boundary polylines plus labeled overlay point sets onto the
/// fixed 1024x1024 canvas with view box `[-1.1, 1.1]^2` (y up).
pub fn domain_svg(domain: &CombDomain, overlays: &[(&str, &[Point2])]) -> Result<String> {
    let depth = RENDER_TENT_DEPTH.min(domain.tent_depth());
    let polys = domain.boundary_polyline_at(depth)?;
    let mut s = String::new();
    s.push_str(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1024\" height=\"1024\" \
         viewBox=\"-1.1 -1.1 2.2 2.2\">\n",
    );
    s.push_str("<rect x=\"-1.1\" y=\"-1.1\" width=\"2.2\" height=\"2.2\" fill=\"white\"/>\n");
    s.push_str("<g transform=\"scale(1,-1)\">\n");
    for (poly, color) in polys.iter().zip(["#303030", "#1f5fbf", "#1f5fbf"]) {
        write_path(&mut s, poly, color);
    }
    for (color, pts) in overlays {
        for p in *pts {
            let _ = write!(
                s,
                "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"0.008\" fill=\"{}\"/>\n",
                p.x, p.y, color
            );
        }
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

fn write_path(out: &mut String, poly: &Polyline, color: &str) {
    let mut verts = poly.vertices().iter();
    let Some(first) = verts.next() else { return };
    let _ = write!(out, "<path d=\"M{:.6} {:.6}", first.x, first.y);
    for v in verts {
        let _ = write!(out, " L{:.6} {:.6}", v.x, v.y);
    }
    let _ = write!(
        out,
        "\" fill=\"none\" stroke=\"{color}\" stroke-width=\"0.004\"/>\n"
    );
}

/// CSV dump of polyline vertices (`x,y`), polylines separated by blank lines.
pub fn polylines_csv(polys: &[Polyline]) -> String {
    let mut out = String::from("x,y\n");
    for (i, poly) in polys.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for v in poly.vertices() {
            out.push_str(&format!("{},{}\n", v.x, v.y));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::CantorParams;

    #[test]
    fn svg_has_expected_frame() {
        let d = CombDomain::new(CantorParams::new(1.0 / 3.0, 12).unwrap(), 6).unwrap();
        let svg = domain_svg(&d, &[("#d02020", &[Point2::new(1.0 / 3.0, 0.0)])]).unwrap();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("viewBox=\"-1.1 -1.1 2.2 2.2\""));
        assert!(svg.contains("width=\"1024\""));
        assert!(svg.matches("<path").count() == 3);
        assert!(svg.contains("<circle"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn csv_lists_vertices() {
        let d = CombDomain::new(CantorParams::new(1.0 / 3.0, 12).unwrap(), 1).unwrap();
        let csv = polylines_csv(&d.boundary_polyline().unwrap());
        assert!(csv.starts_with("x,y\n"));
        assert!(csv.lines().count() > 10);
    }
}
