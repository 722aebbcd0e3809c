//! Stable shadows of unstable leaves, the gap structure they induce on
//! the ideal boundary, flow sections and admissibility.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::corder::{CircleModel, GapCore, MonotoneMap, OrderError};
use crate::fiber::{FiberPoint, Section};
use crate::plane::{chains, Complex, Family, IdealIdx, LeafIdx, LeafSpace, PlaneError, Sign};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ShadowError {
    #[error(transparent)]
    Plane(#[from] PlaneError),
    #[error("flow section is ambiguous on {leaf}: {stables:?}")]
    AmbiguousSection { leaf: String, stables: Vec<String> },
}

#[derive(Clone, Debug, Serialize)]
pub struct Ray {
    pub stable: LeafIdx,
    /// Unstable leaves crossed beyond the base, nearest first.
    pub beyond: Vec<LeafIdx>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShadowRegion {
    pub base: LeafIdx,
    pub sign: Sign,
    pub rays: Vec<Ray>,
    /// The base leaf followed by stable leaves fitting it on the shadow
    /// side, closed under shared endpoints.
    pub base_chain: Vec<LeafIdx>,
    /// For each ray, stable leaves nonseparated from it at its far end.
    pub frontier_chains: Vec<(LeafIdx, Vec<LeafIdx>)>,
}

fn require_unstable(c: &Complex, l: LeafIdx) -> Result<(), PlaneError> {
    if c.leaves[l].family != Family::Unstable {
        return Err(PlaneError::NotUnstable(c.leaf_id(l).to_string()));
    }
    Ok(())
}

/// Stable leaves reachable from `start` points through shared endpoints,
/// keeping only leaves accepted by `keep`. Returns each leaf with the
/// start point it was reached from.
fn stable_closure(
    c: &Complex,
    start: &[IdealIdx],
    skip: &[LeafIdx],
    keep: &dyn Fn(LeafIdx) -> bool,
) -> Vec<(LeafIdx, IdealIdx)> {
    let mut seen: BTreeSet<LeafIdx> = skip.iter().copied().collect();
    let mut out = Vec::new();
    let mut queue: VecDeque<(IdealIdx, IdealIdx)> = start.iter().map(|&p| (p, p)).collect();
    while let Some((p, root)) = queue.pop_front() {
        for e in &c.ideals[p].ends {
            let t = e.leaf;
            if c.leaves[t].family != Family::Stable || seen.contains(&t) || !keep(t) {
                continue;
            }
            seen.insert(t);
            out.push((t, root));
            queue.push_back((c.leaves[t].end(e.sign.flip()), root));
        }
    }
    out
}

pub fn shadow(c: &Complex, lambda: LeafIdx, sign: Sign) -> Result<ShadowRegion, PlaneError> {
    require_unstable(c, lambda)?;
    let rays = c
        .crossed_by(lambda)
        .into_iter()
        .map(|s| {
            let along = c.crossed_by(s);
            let k = along.iter().position(|&u| u == lambda).expect("crossing lists are symmetric");
            let beyond = match sign {
                Sign::Pos => along[k + 1..].to_vec(),
                Sign::Neg => along[..k].iter().rev().copied().collect(),
            };
            Ray { stable: s, beyond }
        })
        .collect::<Vec<_>>();
    let on_side = |t: LeafIdx| c.leaf_side(lambda, t) == Some(sign);
    let ends = [c.leaves[lambda].neg, c.leaves[lambda].pos];
    let mut base_chain = vec![lambda];
    base_chain.extend(stable_closure(c, &ends, &[], &on_side).into_iter().map(|(t, _)| t));
    let frontier_chains = rays
        .iter()
        .map(|r| {
            let tip = c.leaves[r.stable].end(sign);
            let chain = stable_closure(c, &[tip], &[r.stable], &on_side).into_iter().map(|(t, _)| t).collect();
            (r.stable, chain)
        })
        .collect();
    Ok(ShadowRegion { base: lambda, sign, rays, base_chain, frontier_chains })
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkerGap {
    pub stable: LeafIdx,
    pub points: Vec<IdealIdx>,
    /// Number of stable leaves nonseparated from the marker on the shadow
    /// side; more than one means several candidate spans were unioned.
    pub chain_leaves: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapStructure {
    pub base: LeafIdx,
    pub sign: Sign,
    /// Ideal points collapsed onto the seam, ccw.
    pub nonmarker_gap: Vec<IdealIdx>,
    pub marker_gaps: Vec<MarkerGap>,
    pub injective: Vec<IdealIdx>,
    /// Ideal points claimed by more than one gap.
    pub overlaps: Vec<IdealIdx>,
}

pub fn gap_structure(c: &Complex, lambda: LeafIdx, sign: Sign) -> Result<GapStructure, PlaneError> {
    let sh = shadow(c, lambda, sign)?;
    let (a, b) = c.side_arc(lambda, sign);
    let in_shadow_side = |p: IdealIdx| c.in_open_arc(a, p, b);

    // Extension of the far closed arc into the shadow side by the base chain.
    let on_side = |t: LeafIdx| c.leaf_side(lambda, t) == Some(sign);
    let mut reach_a = 0usize;
    let mut reach_b = 0usize;
    for (t, root) in stable_closure(c, &[a, b], &[], &on_side) {
        for p in [c.leaves[t].neg, c.leaves[t].pos] {
            if !in_shadow_side(p) {
                continue;
            }
            if root == a {
                reach_a = reach_a.max(c.ccw_distance(a, p));
            } else {
                reach_b = reach_b.max(c.ccw_distance(p, b));
            }
        }
    }
    let in_nonmarker = |p: IdealIdx| {
        !in_shadow_side(p) || c.ccw_distance(a, p) <= reach_a || c.ccw_distance(p, b) <= reach_b
    };

    let mut owner: BTreeMap<IdealIdx, usize> = BTreeMap::new();
    let mut overlaps = BTreeSet::new();
    let mut marker_gaps = Vec::new();
    for (k, (s, chain)) in sh.frontier_chains.iter().enumerate() {
        let mut pts = vec![c.leaves[*s].end(sign)];
        for &t in chain {
            pts.extend([c.leaves[t].neg, c.leaves[t].pos].into_iter().filter(|&p| in_shadow_side(p)));
        }
        let lo = pts.iter().map(|&p| c.ccw_distance(a, p)).min().expect("tip is present");
        let hi = pts.iter().map(|&p| c.ccw_distance(a, p)).max().expect("tip is present");
        let points: Vec<IdealIdx> = c
            .boundary
            .iter()
            .copied()
            .filter(|&p| in_shadow_side(p) && (lo..=hi).contains(&c.ccw_distance(a, p)))
            .collect();
        for &p in &points {
            if owner.insert(p, k).is_some() || in_nonmarker(p) {
                overlaps.insert(p);
            }
        }
        marker_gaps.push(MarkerGap { stable: *s, points, chain_leaves: chain.len() });
    }
    let start = c.bpos(b);
    let n = c.boundary_len();
    let ccw_from_b: Vec<IdealIdx> = (0..n).map(|i| c.boundary[(start + i) % n]).collect();
    let nonmarker_gap = ccw_from_b.iter().copied().filter(|&p| in_nonmarker(p)).collect();
    let injective = ccw_from_b.iter().copied().filter(|&p| !in_nonmarker(p) && !owner.contains_key(&p)).collect();
    Ok(GapStructure {
        base: lambda,
        sign,
        nonmarker_gap,
        marker_gaps,
        injective,
        overlaps: overlaps.into_iter().collect(),
    })
}

impl GapStructure {
    /// Image of each ideal point: the seam, a marker, or itself.
    pub fn image_label(&self, c: &Complex, p: IdealIdx) -> String {
        if self.nonmarker_gap.contains(&p) {
            return "seam".to_string();
        }
        for g in &self.marker_gaps {
            if g.points.contains(&p) {
                return format!("marker:{}", c.leaf_id(g.stable));
            }
        }
        format!("point:{}", c.ideal_id(p))
    }

    /// Collapse map from the ideal boundary to the fiber circle extended by
    /// the injective locus.
    pub fn monotone_map(&self, c: &Complex) -> MonotoneMap {
        let labels: Vec<String> = c.boundary.iter().map(|&p| self.image_label(c, p)).collect();
        let mut target: Vec<String> = Vec::new();
        for l in &labels {
            if !target.contains(l) {
                target.push(l.clone());
            }
        }
        let assignment = labels.iter().map(|l| target.iter().position(|t| t == l).expect("label listed")).collect();
        MonotoneMap {
            source: CircleModel::new(c.boundary.iter().map(|&p| c.ideal_id(p).to_string()).collect()),
            target: CircleModel::new(target),
            assignment,
        }
    }

    /// Gaps are disjoint arcs and the collapse is monotone of degree one.
    pub fn check_partition(&self, c: &Complex) -> Result<GapCore, OrderError> {
        if let Some(&p) = self.overlaps.first() {
            return Err(OrderError::NotMonotone(format!("{} lies in two gaps", c.ideal_id(p))));
        }
        self.monotone_map(c).gap_core()
    }
}

/// Flow section of `z`: backwards chains (for `+`) or forwards chains (for
/// `-`) from `z` and from every stable leaf opposite `z`.
pub fn flow_section(c: &Complex, z: IdealIdx, sign: Sign) -> Result<Section, ShadowError> {
    let dir = match sign {
        Sign::Pos => chains::ChainDirection::Backwards,
        Sign::Neg => chains::ChainDirection::Forwards,
    };
    let mut support: BTreeSet<LeafIdx> = BTreeSet::new();
    for ch in chains::chains_from(c, z, dir) {
        support.extend(ch.leaves);
    }
    for l in c.leaves_of(Family::Stable) {
        if c.leaves[l].has_end(z) {
            continue;
        }
        for ch in chains::opposite_chains(c, l, z, dir) {
            support.extend(ch.leaves);
        }
    }
    let mut sec = Section::new(format!("flow{}:{}", sign.symbol(), c.ideal_id(z)));
    for u in c.leaves_of(Family::Unstable) {
        let hits: Vec<LeafIdx> = c.crossed_by(u).into_iter().filter(|s| support.contains(s)).collect();
        let value = match hits.as_slice() {
            [] => FiberPoint::Seam,
            [s] => FiberPoint::Crossing(*s),
            _ => {
                return Err(ShadowError::AmbiguousSection {
                    leaf: c.leaf_id(u).to_string(),
                    stables: hits.iter().map(|&s| c.leaf_id(s).to_string()).collect(),
                })
            }
        };
        sec.values.insert(u, value);
    }
    Ok(sec)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum AdmissibilityFault {
    Missing(String),
    NotOnFiber { fiber: String, stable: String },
    MarkerDropped { stable: String, fiber: String },
    FitNotSeam { stable: String, fiber: String },
}

/// Violations of marker-following: a stable leaf taken somewhere is taken
/// on every fiber it crosses, and fibers it fits see the seam.
pub fn admissibility_faults(c: &Complex, s: &Section) -> Vec<AdmissibilityFault> {
    let mut out = Vec::new();
    let mut taken = BTreeSet::new();
    for u in c.leaves_of(Family::Unstable) {
        match s.get(u) {
            None => out.push(AdmissibilityFault::Missing(c.leaf_id(u).to_string())),
            Some(FiberPoint::Crossing(w)) => {
                if !c.crosses(w, u) {
                    out.push(AdmissibilityFault::NotOnFiber {
                        fiber: c.leaf_id(u).to_string(),
                        stable: c.leaf_id(w).to_string(),
                    });
                }
                taken.insert(w);
            }
            Some(FiberPoint::Seam) => {}
        }
    }
    for w in taken {
        for u in c.crossed_by(w) {
            if s.get(u).is_some_and(|p| p != FiberPoint::Crossing(w)) {
                out.push(AdmissibilityFault::MarkerDropped {
                    stable: c.leaf_id(w).to_string(),
                    fiber: c.leaf_id(u).to_string(),
                });
            }
        }
        for u in c.fitting_leaves(w) {
            if s.get(u).is_some_and(|p| p != FiberPoint::Seam) {
                out.push(AdmissibilityFault::FitNotSeam {
                    stable: c.leaf_id(w).to_string(),
                    fiber: c.leaf_id(u).to_string(),
                });
            }
        }
    }
    out
}

pub fn is_admissible(c: &Complex, s: &Section) -> bool {
    admissibility_faults(c, s).is_empty()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SpecialSupport {
    pub x_lu: BTreeSet<LeafIdx>,
    pub x_ru: BTreeSet<LeafIdx>,
    pub x_ld: BTreeSet<LeafIdx>,
    pub x_rd: BTreeSet<LeafIdx>,
    pub notes: Vec<String>,
}

impl SpecialSupport {
    /// Expected non-seam support of the leftmost section based at the seam.
    pub fn leftmost_support(&self) -> BTreeSet<LeafIdx> {
        self.x_lu.union(&self.x_rd).copied().collect()
    }
}

/// Frontier leaves of the stable saturation of `lambda`, sampled on every
/// comparable fiber: the stable leaf adjacent to the leaves shared with
/// `lambda`, classified by the side it is approached from and by whether
/// the fiber lies above or below `lambda`.
pub fn special_support_oracle(c: &Complex, lambda: LeafIdx) -> Result<SpecialSupport, PlaneError> {
    require_unstable(c, lambda)?;
    let ls = LeafSpace::unstable(c);
    let sat: BTreeSet<LeafIdx> = c.crossed_by(lambda).into_iter().collect();
    let mut out = SpecialSupport::default();
    for (above, fibers) in [(true, ls.above(lambda)), (false, ls.below(lambda))] {
        for mu in fibers {
            let along = c.crossed_by(mu);
            let j: Vec<usize> = (0..along.len()).filter(|&i| sat.contains(&along[i])).collect();
            let (Some(&lo), Some(&hi)) = (j.first(), j.last()) else { continue };
            if hi - lo + 1 != j.len() {
                out.notes.push(format!("shared leaves not contiguous on {}", c.leaf_id(mu)));
            }
            if lo > 0 {
                let f = along[lo - 1];
                if above { out.x_lu.insert(f) } else { out.x_ld.insert(f) };
            }
            if hi + 1 < along.len() {
                let f = along[hi + 1];
                if above { out.x_ru.insert(f) } else { out.x_rd.insert(f) };
            }
        }
    }
    let classes = [&out.x_lu, &out.x_ru, &out.x_ld, &out.x_rd];
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            for f in a.intersection(b) {
                out.notes.push(format!("{} is in two frontier classes", c.leaf_id(*f)));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn triv_shadow_rays_are_columns_above() {
        let c = corpus::triv(3, 3);
        let u1 = c.leaf_by_id("u1").unwrap();
        let sh = shadow(&c, u1, Sign::Pos).unwrap();
        assert_eq!(sh.rays.len(), 3);
        assert!(sh.rays.iter().all(|r| r.beyond == vec![c.leaf_by_id("u2").unwrap()]));
        assert_eq!(sh.base_chain, vec![u1]);
    }

    #[test]
    fn shadow_of_stable_leaf_is_rejected() {
        let c = corpus::triv(2, 2);
        let s0 = c.leaf_by_id("s0").unwrap();
        assert!(matches!(shadow(&c, s0, Sign::Pos), Err(PlaneError::NotUnstable(_))));
    }

    #[test]
    fn triv_gaps_partition_the_boundary() {
        let c = corpus::triv(3, 3);
        for u in c.unstable_leaves() {
            for sign in [Sign::Pos, Sign::Neg] {
                let g = gap_structure(&c, u, sign).unwrap();
                assert_eq!(g.marker_gaps.len(), 3);
                assert!(g.check_partition(&c).is_ok());
                // Ends of the rows on the shadow side are neither seam nor marker.
                let k: usize = c.leaf_id(u)[1..].parse().unwrap();
                let rows_beyond = if sign == Sign::Pos { 2 - k } else { k };
                assert_eq!(g.injective.len(), 2 * rows_beyond);
            }
        }
    }

    #[test]
    fn branch_flow_from_top_of_l1_has_both_leaves() {
        let c = corpus::branch1();
        let l1 = c.leaf_by_id("l1").unwrap();
        let l2 = c.leaf_by_id("l2").unwrap();
        let s = flow_section(&c, c.leaves[l1].pos, Sign::Pos).unwrap();
        let sup = s.support();
        assert!(sup.contains(&l1) && sup.contains(&l2));
        assert!(is_admissible(&c, &s));
    }

    #[test]
    fn jump_across_a_marker_is_inadmissible() {
        let c = corpus::triv(2, 2);
        let (s0, s1) = (c.leaf_by_id("s0").unwrap(), c.leaf_by_id("s1").unwrap());
        let (u0, u1) = (c.leaf_by_id("u0").unwrap(), c.leaf_by_id("u1").unwrap());
        let mut sec = Section::new("manual");
        sec.values.insert(u0, FiberPoint::Crossing(s0));
        sec.values.insert(u1, FiberPoint::Crossing(s1));
        assert!(!is_admissible(&c, &sec));
        sec.values.insert(u1, FiberPoint::Crossing(s0));
        assert!(is_admissible(&c, &sec));
    }
}
