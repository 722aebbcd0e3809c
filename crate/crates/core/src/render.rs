//! Deterministic SVG drawings: the ideal circle with leaves as chords, and
//! the cylinder over a transversal with fibers cut open at the seam.

use std::fmt::Write;

use crate::einf::Cylinder;
use crate::fiber::{fiber_index, FiberPoint, Section};
use crate::plane::{Complex, Family, IdealIdx, LeafIdx, Sign};
use crate::shadows::ShadowRegion;

pub const STABLE: &str = "#1f4fd8";
pub const UNSTABLE: &str = "#d62728";
pub const SHADOW: &str = "#f2d024";
pub const SEAM: &str = "#f28e1c";

const SIZE: f64 = 640.0;
const RADIUS: f64 = 280.0;

fn header(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\" font-family=\"monospace\" font-size=\"9\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Ideal points are evenly spaced counterclockwise in boundary order.
fn ideal_xy(c: &Complex, p: IdealIdx) -> (f64, f64) {
    let t = std::f64::consts::TAU * c.bpos(p) as f64 / c.boundary_len() as f64;
    (SIZE / 2.0 + RADIUS * t.cos(), SIZE / 2.0 - RADIUS * t.sin())
}

/// The complex on its ideal circle. Linked chords cross exactly where the
/// complex has a crossing, so straight chords suffice.
pub fn render_orbit(c: &Complex, shadows: &[ShadowRegion]) -> String {
    let mut out = header(SIZE, SIZE);
    let _ = writeln!(
        out,
        "<circle cx=\"{0:.2}\" cy=\"{0:.2}\" r=\"{RADIUS:.2}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>",
        SIZE / 2.0
    );
    for sh in shadows {
        let mut pts: Vec<IdealIdx> = vec![c.leaf(sh.base).neg, c.leaf(sh.base).pos];
        for r in &sh.rays {
            let l = c.leaf(r.stable);
            pts.extend([l.neg, l.pos].into_iter().filter(|&p| c.point_side(sh.base, p) == Some(sh.sign)));
        }
        let (start, _) = c.side_arc(sh.base, sh.sign);
        pts.sort_by_key(|&p| c.ccw_distance(start, p));
        pts.dedup();
        let poly: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = ideal_xy(c, p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            out,
            "<polygon points=\"{}\" fill=\"{SHADOW}\" fill-opacity=\"0.4\" stroke=\"none\"><title>shadow {}{}</title></polygon>",
            poly.join(" "),
            escape(c.leaf_id(sh.base)),
            sh.sign.symbol()
        );
    }
    for (i, l) in c.leaves.iter().enumerate() {
        let (x1, y1) = ideal_xy(c, l.neg);
        let (x2, y2) = ideal_xy(c, l.pos);
        let colour = if l.family == Family::Stable { STABLE } else { UNSTABLE };
        let _ = writeln!(
            out,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{colour}\" stroke-width=\"1.5\"><title>{}</title></line>",
            escape(c.leaf_id(i))
        );
    }
    for &p in &c.boundary {
        let (x, y) = ideal_xy(c, p);
        let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2\" fill=\"black\"/>");
        let t = std::f64::consts::TAU * c.bpos(p) as f64 / c.boundary_len() as f64;
        let (lx, ly) = (SIZE / 2.0 + (RADIUS + 14.0) * t.cos(), SIZE / 2.0 - (RADIUS + 14.0) * t.sin());
        let _ = writeln!(
            out,
            "<text x=\"{lx:.2}\" y=\"{ly:.2}\" text-anchor=\"middle\" dominant-baseline=\"middle\">{}</text>",
            escape(c.ideal_id(p))
        );
    }
    out.push_str("</svg>\n");
    out
}

const LEFT: f64 = 90.0;
const WIDTH: f64 = 520.0;
const ROW: f64 = 28.0;

fn point_x(c: &Complex, f: LeafIdx, p: FiberPoint) -> f64 {
    let len = c.leaf(f).crossings.len() as f64;
    match p {
        FiberPoint::Seam => LEFT + WIDTH,
        _ => {
            let i = fiber_index(c, f, p).expect("point on fiber") as f64;
            LEFT + WIDTH * (i + 1.0) / (len + 1.0)
        }
    }
}

/// The cylinder with the first transversal fiber at the bottom. Each fiber
/// is a red segment whose two ends are the seam; traces are blue and an
/// optional section is drawn dashed.
pub fn render_cylinder(c: &Complex, cyl: &Cylinder, sections: &[Section]) -> String {
    let n = cyl.transversal.len();
    let height = ROW * (n as f64 + 1.0);
    let y = |k: usize| height - ROW * (k as f64 + 1.0);
    let mut out = header(LEFT + WIDTH + 40.0, height);
    for x in [LEFT, LEFT + WIDTH] {
        let _ = writeln!(
            out,
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"{SEAM}\" stroke-width=\"3\"/>",
            ROW / 2.0,
            height - ROW / 2.0
        );
    }
    for (k, &f) in cyl.transversal.iter().enumerate() {
        let _ = writeln!(
            out,
            "<line x1=\"{LEFT:.2}\" y1=\"{0:.2}\" x2=\"{1:.2}\" y2=\"{0:.2}\" stroke=\"{UNSTABLE}\" stroke-width=\"1.5\"/>",
            y(k),
            LEFT + WIDTH
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" dominant-baseline=\"middle\">{}</text>",
            LEFT - 8.0,
            y(k),
            escape(c.leaf_id(f))
        );
    }
    for t in &cyl.traces {
        let pts: Vec<String> = t
            .points
            .iter()
            .map(|&(k, p)| format!("{:.2},{:.2}", point_x(c, cyl.transversal[k], p), y(k)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{STABLE}\" stroke-width=\"1.5\"><title>{}</title></polyline>",
            pts.join(" "),
            escape(c.leaf_id(t.stable))
        );
        for &(k, p) in &t.points {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{STABLE}\"/>",
                point_x(c, cyl.transversal[k], p),
                y(k)
            );
        }
    }
    for s in sections {
        let pts: Vec<String> = cyl
            .transversal
            .iter()
            .enumerate()
            .filter_map(|(k, &f)| s.get(f).map(|p| format!("{:.2},{:.2}", point_x(c, f, p), y(k))))
            .collect();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\" stroke-dasharray=\"4 3\"><title>{}</title></polyline>",
            pts.join(" "),
            escape(&s.tag)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Shadow requests written `leafId+` or `leafId-`.
pub fn parse_shadow_request(c: &Complex, s: &str) -> Option<(LeafIdx, Sign)> {
    let (id, sign) = match s.strip_suffix('+') {
        Some(id) => (id, Sign::Pos),
        None => (s.strip_suffix('-')?, Sign::Neg),
    };
    Some((c.leaf_by_id(id)?, sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::triv;
    use crate::einf::build_cylinder;

    #[test]
    fn orbit_draws_every_leaf_once() {
        let c = triv(3, 3);
        let svg = render_orbit(&c, &[]);
        assert_eq!(svg.matches("<line").count(), 6);
        assert_eq!(svg.matches(STABLE).count(), 3);
        assert_eq!(svg.matches(UNSTABLE).count(), 3);
    }

    #[test]
    fn cylinder_draws_fibers_and_traces() {
        let c = triv(2, 3);
        let t = c.unstable_leaves();
        let cyl = build_cylinder(&c, &t).unwrap();
        let svg = render_cylinder(&c, &cyl, &[]);
        assert_eq!(svg.matches("<polyline").count(), cyl.traces.len());
        assert_eq!(svg.matches(SEAM).count(), 2);
        assert_eq!(svg, render_cylinder(&c, &cyl, &[]));
    }
}
