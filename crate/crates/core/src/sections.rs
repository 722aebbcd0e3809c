//! Leftmost and rightmost sections, crossing of sections and seam
//! crossings along a transversal.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::fiber::{fiber_index, FiberPoint, Section};
use crate::plane::{Complex, Family, LeafIdx, LeafSpace};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SectionError {
    #[error("basepoint {point} is not on the fiber over {fiber}")]
    BasepointNotOnFiber { fiber: String, point: String },
    #[error("leaf {0} is not unstable")]
    NotUnstable(String),
    #[error("stable leaves shared by {0} and {1} are not consecutive")]
    NonContiguousStrip(String, String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Extremal {
    Leftmost,
    Rightmost,
}

/// Region between two covering fibers: the stable leaves crossing both
/// occupy index ranges `[lo, hi]` on each.
#[derive(Clone, Debug)]
pub struct Strip {
    pub lower: LeafIdx,
    pub upper: LeafIdx,
    pub lower_range: (usize, usize),
    pub upper_range: (usize, usize),
}

pub fn strip(c: &Complex, lower: LeafIdx, upper: LeafIdx) -> Result<Strip, SectionError> {
    let range = |fiber: LeafIdx, other: LeafIdx| -> Result<(usize, usize), SectionError> {
        let idx: Vec<usize> = c
            .crossed_by(fiber)
            .into_iter()
            .enumerate()
            .filter(|(_, s)| c.crosses(*s, other))
            .map(|(i, _)| i)
            .collect();
        match (idx.first(), idx.last()) {
            (Some(&lo), Some(&hi)) if hi - lo + 1 == idx.len() => Ok((lo, hi)),
            _ => Err(SectionError::NonContiguousStrip(c.leaf_id(lower).into(), c.leaf_id(upper).into())),
        }
    };
    Ok(Strip { lower, upper, lower_range: range(lower, upper)?, upper_range: range(upper, lower)? })
}

fn ends_at(c: &Complex, s: LeafIdx, fiber: LeafIdx) -> bool {
    let f = &c.leaves[fiber];
    c.leaves[s].has_end(f.neg) || c.leaves[s].has_end(f.pos)
}

/// Value on `to` given the value on `from`, with `to` the next fiber in
/// the direction of travel and `(lo, hi)` the shared range on `to`.
/// Candidates run from the preferred end of the free arc towards the seam;
/// a marker fitting `from` is skipped unless `from` carries the seam.
fn step(c: &Complex, from: LeafIdx, from_value: FiberPoint, to: LeafIdx, range: (usize, usize), pick_low: bool) -> FiberPoint {
    if let FiberPoint::Crossing(s) = from_value {
        if c.crosses(s, to) {
            return from_value;
        }
        if ends_at(c, s, to) {
            return FiberPoint::Seam;
        }
    }
    let along = c.crossed_by(to);
    let (lo, hi) = range;
    let candidates: Vec<LeafIdx> =
        if pick_low { along[..lo].iter().rev().copied().collect() } else { along[hi + 1..].to_vec() };
    candidates
        .into_iter()
        .find(|&w| from_value == FiberPoint::Seam || !ends_at(c, w, from))
        .map_or(FiberPoint::Seam, FiberPoint::Crossing)
}

pub fn step_up(c: &Complex, st: &Strip, v: FiberPoint, e: Extremal) -> FiberPoint {
    step(c, st.lower, v, st.upper, st.upper_range, e == Extremal::Leftmost)
}

pub fn step_down(c: &Complex, st: &Strip, v: FiberPoint, e: Extremal) -> FiberPoint {
    step(c, st.upper, v, st.lower, st.lower_range, e == Extremal::Rightmost)
}

struct Walker<'a> {
    c: &'a Complex,
    ls: LeafSpace,
    e: Extremal,
    sec: Section,
}

impl Walker<'_> {
    /// Propagates monotonically up and down from `root` into undefined
    /// fibers.
    fn spread(&mut self, root: LeafIdx) -> Result<(), SectionError> {
        for up in [true, false] {
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                let next = if up { self.ls.up[v].clone() } else { self.ls.down[v].clone() };
                for m in next {
                    if self.sec.values.contains_key(&m) {
                        continue;
                    }
                    let val = self.sec.values[&v];
                    let value = if up {
                        step_up(self.c, &strip(self.c, v, m)?, val, self.e)
                    } else {
                        step_down(self.c, &strip(self.c, m, v)?, val, self.e)
                    };
                    self.sec.values.insert(m, value);
                    queue.push_back(m);
                }
            }
        }
        Ok(())
    }

    fn unstable_partners(&self, l: LeafIdx) -> Vec<LeafIdx> {
        let leaf = &self.c.leaves[l];
        let mut out = BTreeSet::new();
        for p in [leaf.neg, leaf.pos] {
            for e in &self.c.ideals[p].ends {
                if e.leaf != l && self.c.leaves[e.leaf].family == Family::Unstable {
                    out.insert(e.leaf);
                }
            }
        }
        out.into_iter().collect()
    }

    fn complete(&mut self) -> Result<(), SectionError> {
        let unstable: Vec<LeafIdx> = self.c.unstable_leaves();
        loop {
            let undefined: Vec<LeafIdx> =
                unstable.iter().copied().filter(|l| !self.sec.values.contains_key(l)).collect();
            let Some(&first) = undefined.first() else { return Ok(()) };
            let defined = |l: &LeafIdx| self.sec.values.contains_key(l);
            let root = undefined
                .iter()
                .copied()
                .find(|&l| self.unstable_partners(l).iter().any(defined))
                .or_else(|| {
                    undefined
                        .iter()
                        .copied()
                        .find(|&l| self.ls.up[l].iter().chain(&self.ls.down[l]).any(defined))
                })
                .unwrap_or(first);
            self.sec.values.insert(root, FiberPoint::Seam);
            self.sec.corners.push(root);
            self.spread(root)?;
        }
    }
}

/// Extremal section through `point` on the fiber over `fiber`.
pub fn extremal_section(
    c: &Complex,
    fiber: LeafIdx,
    point: FiberPoint,
    e: Extremal,
) -> Result<Section, SectionError> {
    if c.leaves[fiber].family != Family::Unstable {
        return Err(SectionError::NotUnstable(c.leaf_id(fiber).to_string()));
    }
    if let FiberPoint::Crossing(s) = point {
        if !c.crosses(s, fiber) {
            return Err(SectionError::BasepointNotOnFiber {
                fiber: c.leaf_id(fiber).to_string(),
                point: c.leaf_id(s).to_string(),
            });
        }
    }
    let tag = format!(
        "{}:{}@{}",
        match e {
            Extremal::Leftmost => "leftmost",
            Extremal::Rightmost => "rightmost",
        },
        point.label(c, fiber),
        c.leaf_id(fiber)
    );
    let mut w = Walker { c, ls: LeafSpace::unstable(c), e, sec: Section::new(tag) };
    w.sec.values.insert(fiber, point);
    w.spread(fiber)?;
    w.complete()?;
    Ok(w.sec)
}

pub fn leftmost_section(c: &Complex, fiber: LeafIdx, point: FiberPoint) -> Result<Section, SectionError> {
    extremal_section(c, fiber, point, Extremal::Leftmost)
}

pub fn rightmost_section(c: &Complex, fiber: LeafIdx, point: FiberPoint) -> Result<Section, SectionError> {
    extremal_section(c, fiber, point, Extremal::Rightmost)
}

/// All distinct extremal sections based at points of the given fibers.
pub fn family(c: &Complex, fibers: &[LeafIdx], e: Extremal) -> Result<Vec<Section>, SectionError> {
    let mut out: Vec<Section> = Vec::new();
    for &f in fibers {
        for p in crate::fiber::fiber_points(c, f) {
            let s = extremal_section(c, f, p, e)?;
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossWitness {
    pub lambda: String,
    pub mu: String,
    pub marker: String,
}

/// Offset of `v` from the marker `m` on `fiber`, counted in increasing
/// index through the seam.
fn offset(c: &Complex, fiber: LeafIdx, v: FiberPoint, m: LeafIdx) -> Option<usize> {
    let len = c.leaves[fiber].crossings.len() + 1;
    let iv = fiber_index(c, fiber, v)?;
    let im = c.index_along(fiber, m)?;
    Some((iv + len - im) % len)
}

/// Two sections cross if, cut at a marker avoided by both on a run of
/// consecutive fibers, their order flips.
pub fn sections_cross(c: &Complex, a: &Section, b: &Section, transversal: &[LeafIdx]) -> Option<CrossWitness> {
    for m in c.leaves_of(Family::Stable) {
        let mut run: Vec<(LeafIdx, std::cmp::Ordering)> = Vec::new();
        let flush = |run: &mut Vec<(LeafIdx, std::cmp::Ordering)>| -> Option<CrossWitness> {
            let first = run.first().copied();
            let flip = run.iter().find(|(_, o)| Some(*o) != first.map(|f| f.1)).copied();
            run.clear();
            match (first, flip) {
                (Some((l, _)), Some((u, _))) => Some(CrossWitness {
                    lambda: c.leaf_id(l).to_string(),
                    mu: c.leaf_id(u).to_string(),
                    marker: c.leaf_id(m).to_string(),
                }),
                _ => None,
            }
        };
        for &f in transversal {
            let va = a.get(f);
            let vb = b.get(f);
            let usable = c.crosses(m, f)
                && va.is_some_and(|v| v != FiberPoint::Crossing(m))
                && vb.is_some_and(|v| v != FiberPoint::Crossing(m));
            if !usable {
                if let Some(w) = flush(&mut run) {
                    return Some(w);
                }
                continue;
            }
            let (Some(oa), Some(ob)) = (offset(c, f, va.unwrap(), m), offset(c, f, vb.unwrap(), m)) else {
                continue;
            };
            if oa != ob {
                run.push((f, oa.cmp(&ob)));
            }
        }
        if let Some(w) = flush(&mut run) {
            return Some(w);
        }
    }
    None
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SetCompare {
    pub common: usize,
    pub only_left: Vec<String>,
    pub only_right: Vec<String>,
}

impl SetCompare {
    pub fn equal(&self) -> bool {
        self.only_left.is_empty() && self.only_right.is_empty()
    }
}

pub fn section_set_compare(a: &[Section], b: &[Section]) -> SetCompare {
    let mut out = SetCompare::default();
    for s in a {
        if b.contains(s) {
            out.common += 1;
        } else {
            out.only_left.push(s.tag.clone());
        }
    }
    for s in b {
        if !a.contains(s) {
            out.only_right.push(s.tag.clone());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeamCrossing {
    pub from: String,
    pub to: String,
    pub marker: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SeamReport {
    pub crossings: Vec<SeamCrossing>,
    /// Consecutive marker values with no avoided marker spanning them.
    pub undetermined: usize,
}

/// Places along the transversal where the section passes from one side of
/// the seam to the other, judged against a marker spanning both values.
pub fn crosses_seam(c: &Complex, s: &Section, transversal: &[LeafIdx]) -> SeamReport {
    let mut out = SeamReport::default();
    let marked: Vec<(usize, LeafIdx)> = transversal
        .iter()
        .enumerate()
        .filter(|(_, f)| matches!(s.get(**f), Some(FiberPoint::Crossing(_))))
        .map(|(i, &f)| (i, f))
        .collect();
    for w in marked.windows(2) {
        let (i, f) = w[0];
        let (j, g) = w[1];
        let span = &transversal[i..=j];
        let marker = c.leaves_of(Family::Stable).find(|&m| {
            span.iter().all(|&h| c.crosses(m, h) && s.get(h) != Some(FiberPoint::Crossing(m)))
        });
        let Some(m) = marker else {
            out.undetermined += 1;
            continue;
        };
        let low = |fib: LeafIdx| {
            let v = s.get(fib).and_then(|v| fiber_index(c, fib, v));
            v < c.index_along(fib, m)
        };
        if low(f) != low(g) {
            out.crossings.push(SeamCrossing {
                from: c.leaf_id(f).to_string(),
                to: c.leaf_id(g).to_string(),
                marker: c.leaf_id(m).to_string(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::shadows::is_admissible;

    #[test]
    fn triv_leftmost_from_marker_follows_it() {
        let c = corpus::triv(3, 3);
        let s1 = c.leaf_by_id("s1").unwrap();
        let u1 = c.leaf_by_id("u1").unwrap();
        let sec = leftmost_section(&c, u1, FiberPoint::Crossing(s1)).unwrap();
        assert!(c.unstable_leaves().iter().all(|&u| sec.get(u) == Some(FiberPoint::Crossing(s1))));
        assert!(is_admissible(&c, &sec));
    }

    #[test]
    fn basepoint_must_lie_on_fiber() {
        let c = corpus::branch1();
        let l1 = c.leaf_by_id("l1").unwrap();
        let w1 = c.leaf_by_id("w1").unwrap();
        assert!(matches!(
            leftmost_section(&c, w1, FiberPoint::Crossing(l1)),
            Err(SectionError::BasepointNotOnFiber { .. })
        ));
    }

    #[test]
    fn branch_leftmost_from_seam_picks_l2_below() {
        let c = corpus::branch1();
        let v1 = c.leaf_by_id("v1").unwrap();
        let w1 = c.leaf_by_id("w1").unwrap();
        let l2 = c.leaf_by_id("l2").unwrap();
        let sec = leftmost_section(&c, v1, FiberPoint::Seam).unwrap();
        assert_eq!(sec.get(w1), Some(FiberPoint::Crossing(l2)));
        assert!(is_admissible(&c, &sec));
    }

    #[test]
    fn identical_sections_do_not_cross() {
        let c = corpus::triv(3, 3);
        let u0 = c.leaf_by_id("u0").unwrap();
        let s = leftmost_section(&c, u0, FiberPoint::Seam).unwrap();
        let t = c.unstable_leaves();
        assert!(sections_cross(&c, &s, &s, &t).is_none());
        assert!(section_set_compare(std::slice::from_ref(&s), std::slice::from_ref(&s)).equal());
    }
}
