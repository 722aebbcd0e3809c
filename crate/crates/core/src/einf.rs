//! The cylinder of circle fibers over a transversal of unstable leaves,
//! with marker traces and the seam.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::fiber::{fiber_points, FiberPoint};
use crate::plane::{Complex, Family, LeafIdx, LeafSpace};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EinfError {
    #[error("trace of {0} meets the transversal in a non-consecutive set of fibers")]
    NonContiguousTrace(String),
    #[error("trace of {0} spans every fiber")]
    SpanningTrace(String),
    #[error("consecutive transversal leaves {0} and {1} are not adjacent")]
    InvalidTransversal(String, String),
    #[error("leaf {0} is not unstable")]
    NotUnstable(String),
    #[error("no trace for {0}")]
    UnknownTrace(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct Fiber {
    pub leaf: LeafIdx,
    pub points: Vec<FiberPoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trace {
    pub stable: LeafIdx,
    /// Inclusive range of transversal positions.
    pub first: usize,
    pub last: usize,
    pub points: Vec<(usize, FiberPoint)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cylinder {
    pub transversal: Vec<LeafIdx>,
    pub fibers: Vec<Fiber>,
    pub traces: Vec<Trace>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TwistClass {
    LeftUntwisted,
    RightUntwisted,
    TwistedLR,
    TwistedRL,
    Truncated,
    Spanning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TerminalSide {
    Left,
    Right,
}

impl TwistClass {
    /// Named by (bottom end, top end).
    pub fn from_sides(bottom: TerminalSide, top: TerminalSide) -> TwistClass {
        match (bottom, top) {
            (TerminalSide::Left, TerminalSide::Left) => TwistClass::LeftUntwisted,
            (TerminalSide::Right, TerminalSide::Right) => TwistClass::RightUntwisted,
            (TerminalSide::Left, TerminalSide::Right) => TwistClass::TwistedLR,
            (TerminalSide::Right, TerminalSide::Left) => TwistClass::TwistedRL,
        }
    }
}

/// Consecutive transversal leaves must cover one another or be
/// nonseparated partners.
fn adjacent(c: &Complex, ls: &LeafSpace, a: LeafIdx, b: LeafIdx) -> bool {
    ls.up[a].contains(&b) || !c.shared_points(a, b).is_empty()
}

pub fn build_cylinder(c: &Complex, transversal: &[LeafIdx]) -> Result<Cylinder, EinfError> {
    for &l in transversal {
        if c.leaves[l].family != Family::Unstable {
            return Err(EinfError::NotUnstable(c.leaf_id(l).to_string()));
        }
    }
    let ls = LeafSpace::unstable(c);
    for w in transversal.windows(2) {
        if !adjacent(c, &ls, w[0], w[1]) {
            return Err(EinfError::InvalidTransversal(c.leaf_id(w[0]).into(), c.leaf_id(w[1]).into()));
        }
    }
    let fibers: Vec<Fiber> = transversal.iter().map(|&l| Fiber { leaf: l, points: fiber_points(c, l) }).collect();
    let stables: BTreeSet<LeafIdx> = transversal.iter().flat_map(|&l| c.crossed_by(l)).collect();
    let mut traces = Vec::new();
    for s in stables {
        let idx: Vec<usize> = (0..transversal.len()).filter(|&i| c.crosses(s, transversal[i])).collect();
        let (first, last) = (idx[0], *idx.last().expect("trace meets a fiber"));
        if last - first + 1 != idx.len() {
            return Err(EinfError::NonContiguousTrace(c.leaf_id(s).to_string()));
        }
        traces.push(Trace { stable: s, first, last, points: idx.iter().map(|&i| (i, FiberPoint::Crossing(s))).collect() });
    }
    Ok(Cylinder { transversal: transversal.to_vec(), fibers, traces })
}

/// Fibers crossing a stable leaf, bottom to top.
pub fn transversal_of(c: &Complex, stable: LeafIdx) -> Vec<LeafIdx> {
    c.crossed_by(stable)
}

/// Side of the boundary through which `e` leaves the region between two
/// consecutive fibers; `e` is Left iff it lies in the closed ccw arc from
/// the far fiber's negative end to the near fiber's negative end.
fn terminal_side(c: &Complex, e: usize, far: LeafIdx, near: LeafIdx) -> TerminalSide {
    let a = c.leaves[far].neg;
    let b = c.leaves[near].neg;
    if e == a || e == b || c.in_open_arc(a, e, b) {
        TerminalSide::Left
    } else {
        TerminalSide::Right
    }
}

pub fn twist_class(c: &Complex, cyl: &Cylinder, stable: LeafIdx) -> Result<TwistClass, EinfError> {
    let t = cyl
        .traces
        .iter()
        .find(|t| t.stable == stable)
        .ok_or_else(|| EinfError::UnknownTrace(c.leaf_id(stable).to_string()))?;
    let n = cyl.transversal.len();
    if t.first == 0 && t.last + 1 == n {
        return Err(EinfError::SpanningTrace(c.leaf_id(stable).to_string()));
    }
    if t.first == 0 || t.last + 1 == n {
        return Ok(TwistClass::Truncated);
    }
    let s = &c.leaves[stable];
    let top = terminal_side(c, s.pos, cyl.transversal[t.last + 1], cyl.transversal[t.last]);
    let bottom = terminal_side(c, s.neg, cyl.transversal[t.first], cyl.transversal[t.first - 1]);
    Ok(TwistClass::from_sides(bottom, top))
}

/// Twist class of every trace, `Spanning` included.
pub fn twist_classes(c: &Complex, cyl: &Cylinder) -> Vec<(LeafIdx, TwistClass)> {
    cyl.traces
        .iter()
        .map(|t| {
            let k = match twist_class(c, cyl, t.stable) {
                Ok(k) => k,
                Err(_) => TwistClass::Spanning,
            };
            (t.stable, k)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct StitchReport {
    pub points_match_crossings: bool,
    pub traces_match_stables: bool,
    pub fibers_match_transversal: bool,
    pub seam_avoids_traces: bool,
    pub witnesses: Vec<String>,
}

impl StitchReport {
    pub fn ok(&self) -> bool {
        self.points_match_crossings && self.traces_match_stables && self.fibers_match_transversal && self.seam_avoids_traces
    }
}

/// Checks the four bijections between cylinder data and the complex.
pub fn stitching_check_cylinder(c: &Complex, cyl: &Cylinder) -> StitchReport {
    let mut witnesses = Vec::new();

    let mut points_ok = true;
    let mut covered: BTreeSet<(usize, LeafIdx)> = BTreeSet::new();
    for (i, f) in cyl.fibers.iter().enumerate() {
        let seams = f.points.iter().filter(|p| **p == FiberPoint::Seam).count();
        let crossings: Vec<LeafIdx> = f.points.iter().filter_map(|p| p.stable()).collect();
        if seams != 1 || crossings != c.crossed_by(f.leaf) {
            points_ok = false;
            witnesses.push(format!("fiber {}", c.leaf_id(f.leaf)));
        }
        for s in crossings {
            covered.insert((i, s));
        }
    }

    let mut traces_ok = true;
    let mut seam_ok = true;
    let mut seen = BTreeSet::new();
    let mut on_traces: BTreeSet<(usize, LeafIdx)> = BTreeSet::new();
    for t in &cyl.traces {
        if !seen.insert(t.stable) {
            traces_ok = false;
            witnesses.push(format!("duplicate trace {}", c.leaf_id(t.stable)));
        }
        for &(i, p) in &t.points {
            match p {
                FiberPoint::Seam => {
                    seam_ok = false;
                    witnesses.push(format!("trace {} meets the seam", c.leaf_id(t.stable)));
                }
                FiberPoint::Crossing(s) if s != t.stable => {
                    traces_ok = false;
                    witnesses.push(format!("trace {} visits {}", c.leaf_id(t.stable), c.leaf_id(s)));
                }
                FiberPoint::Crossing(s) => {
                    on_traces.insert((i, s));
                }
            }
        }
    }
    let expected: BTreeSet<LeafIdx> = cyl.transversal.iter().flat_map(|&l| c.crossed_by(l)).collect();
    if seen != expected {
        traces_ok = false;
        witnesses.push("trace set differs from stable leaves meeting the transversal".into());
    }
    if on_traces != covered {
        points_ok = false;
        witnesses.push("trace points differ from fiber crossings".into());
    }

    let fibers_ok = cyl.fibers.len() == cyl.transversal.len()
        && cyl.fibers.iter().zip(&cyl.transversal).all(|(f, &l)| f.leaf == l);
    if !fibers_ok {
        witnesses.push("fibers differ from transversal".into());
    }
    StitchReport {
        points_match_crossings: points_ok,
        traces_match_stables: traces_ok,
        fibers_match_transversal: fibers_ok,
        seam_avoids_traces: seam_ok,
        witnesses,
    }
}

pub fn stitching_check(c: &Complex, transversal: &[LeafIdx]) -> Result<StitchReport, EinfError> {
    let cyl = build_cylinder(c, transversal)?;
    Ok(stitching_check_cylinder(c, &cyl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn triv_column_traces_span() {
        let c = corpus::triv(3, 3);
        let cyl = build_cylinder(&c, &c.unstable_leaves()).unwrap();
        assert_eq!(cyl.traces.len(), 3);
        let s0 = c.leaf_by_id("s0").unwrap();
        assert!(matches!(twist_class(&c, &cyl, s0), Err(EinfError::SpanningTrace(_))));
        assert!(stitching_check_cylinder(&c, &cyl).ok());
    }

    #[test]
    fn corrupted_cylinder_fails_seam_clause() {
        let c = corpus::triv(2, 2);
        let mut cyl = build_cylinder(&c, &c.unstable_leaves()).unwrap();
        cyl.traces[0].points[0].1 = FiberPoint::Seam;
        let r = stitching_check_cylinder(&c, &cyl);
        assert!(!r.seam_avoids_traces);
    }

    #[test]
    fn gapped_transversal_is_rejected() {
        let c = corpus::triv(2, 3);
        let t = vec![c.leaf_by_id("u0").unwrap(), c.leaf_by_id("u2").unwrap()];
        assert!(matches!(build_cylinder(&c, &t), Err(EinfError::InvalidTransversal(..))));
    }
}
