//! Finite samples of a bifoliated plane: leaves, crossings, ideal points
//! and the circular order on the ideal boundary.

mod builder;
pub mod chains;
mod validate;

pub use builder::ChordBuilder;
pub use chains::{
    enumerate_backwards_chains, enumerate_forwards_chains, enumerate_opposite_chains, maximal_oriented_chains,
    regular_leaves, Chain, ChainDirection,
};
pub use validate::{validate_complex, Severity, ValidationReport, Violation, ViolationKind};

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corder::cyclic_sign;

pub type LeafIdx = usize;
pub type IdealIdx = usize;
pub type CrossIdx = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Stable,
    Unstable,
}

impl Family {
    pub fn other(self) -> Family {
        match self {
            Family::Stable => Family::Unstable,
            Family::Unstable => Family::Stable,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Neg,
    Pos,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Pos => Sign::Neg,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Neg => '-',
            Sign::Pos => '+',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    FromAbove,
    FromBelow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Designation {
    Trivial,
    Skew,
    Branching,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EndRef {
    pub leaf: LeafIdx,
    pub sign: Sign,
}

#[derive(Clone, Debug)]
pub struct Leaf {
    pub id: String,
    pub family: Family,
    pub neg: IdealIdx,
    pub pos: IdealIdx,
    /// Crossings ordered from the negative end.
    pub crossings: Vec<CrossIdx>,
}

impl Leaf {
    pub fn end(&self, sign: Sign) -> IdealIdx {
        match sign {
            Sign::Neg => self.neg,
            Sign::Pos => self.pos,
        }
    }

    pub fn has_end(&self, p: IdealIdx) -> bool {
        self.neg == p || self.pos == p
    }
}

#[derive(Clone, Debug)]
pub struct Crossing {
    pub id: String,
    pub stable: LeafIdx,
    pub unstable: LeafIdx,
}

#[derive(Clone, Debug)]
pub struct IdealPoint {
    pub id: String,
    pub ends: Vec<EndRef>,
}

/// Declared nonseparated chain: consecutive leaves share an ideal point.
#[derive(Clone, Debug)]
pub struct NonSepChain {
    pub family: Family,
    pub leaves: Vec<LeafIdx>,
    pub side: Side,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlaneError {
    #[error("unknown identifier {0}")]
    UnknownId(String),
    #[error("duplicate identifier {0}")]
    DuplicateId(String),
    #[error("boundary order must list every ideal point once: {0}")]
    BadBoundary(String),
    #[error("unknown ideal point {0}")]
    UnknownIdealPoint(String),
    #[error("ideal point {0} is an end of leaf {1}")]
    ZOnLeafEnd(String, String),
    #[error("leaf {0} is not unstable")]
    NotUnstable(String),
    #[error("leaf {0} is not stable")]
    NotStable(String),
}

#[derive(Clone, Debug)]
pub struct Complex {
    pub designation: Designation,
    pub leaves: Vec<Leaf>,
    pub crossings: Vec<Crossing>,
    pub ideals: Vec<IdealPoint>,
    /// Ideal points in counterclockwise order.
    pub boundary: Vec<IdealIdx>,
    pub chains: Vec<NonSepChain>,
    position: Vec<usize>,
    leaf_ids: HashMap<String, LeafIdx>,
    ideal_ids: HashMap<String, IdealIdx>,
    crossing_ids: HashMap<String, CrossIdx>,
    by_pair: HashMap<(LeafIdx, LeafIdx), CrossIdx>,
}

/// Identifier-level description of a complex, as stored in scenes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RawLeaf {
    pub id: String,
    pub family: Family,
    pub crossings: Vec<String>,
    pub neg_end: String,
    pub pos_end: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RawCrossing {
    pub id: String,
    pub stable: String,
    pub unstable: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RawIdeal {
    pub id: String,
    /// Ends written as `leafId+` or `leafId-`.
    pub ends: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RawChain {
    pub family: Family,
    pub leaves: Vec<String>,
    pub side: Side,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RawComplex {
    pub designation: Designation,
    pub leaves: Vec<RawLeaf>,
    pub crossings: Vec<RawCrossing>,
    pub ideal_points: Vec<RawIdeal>,
    pub boundary_order: Vec<String>,
    #[serde(default)]
    pub chains: Vec<RawChain>,
}

fn parse_end(s: &str) -> Option<(&str, Sign)> {
    if let Some(id) = s.strip_suffix('+') {
        Some((id, Sign::Pos))
    } else {
        s.strip_suffix('-').map(|id| (id, Sign::Neg))
    }
}

fn index_ids<'a>(ids: impl Iterator<Item = &'a String>) -> Result<HashMap<String, usize>, PlaneError> {
    let mut map = HashMap::new();
    for (i, id) in ids.enumerate() {
        if map.insert(id.clone(), i).is_some() {
            return Err(PlaneError::DuplicateId(id.clone()));
        }
    }
    Ok(map)
}

impl Complex {
    /// Resolves identifiers. Geometric consistency is left to
    /// [`validate_complex`].
    pub fn from_raw(raw: &RawComplex) -> Result<Complex, PlaneError> {
        let leaf_ids = index_ids(raw.leaves.iter().map(|l| &l.id))?;
        let ideal_ids = index_ids(raw.ideal_points.iter().map(|p| &p.id))?;
        let crossing_ids = index_ids(raw.crossings.iter().map(|c| &c.id))?;
        let leaf = |id: &str| leaf_ids.get(id).copied().ok_or_else(|| PlaneError::UnknownId(id.to_string()));
        let ideal = |id: &str| ideal_ids.get(id).copied().ok_or_else(|| PlaneError::UnknownId(id.to_string()));
        let crossing = |id: &str| crossing_ids.get(id).copied().ok_or_else(|| PlaneError::UnknownId(id.to_string()));

        let mut crossings = Vec::new();
        for c in &raw.crossings {
            crossings.push(Crossing { id: c.id.clone(), stable: leaf(&c.stable)?, unstable: leaf(&c.unstable)? });
        }
        let mut leaves = Vec::new();
        for l in &raw.leaves {
            leaves.push(Leaf {
                id: l.id.clone(),
                family: l.family,
                neg: ideal(&l.neg_end)?,
                pos: ideal(&l.pos_end)?,
                crossings: l.crossings.iter().map(|c| crossing(c)).collect::<Result<_, _>>()?,
            });
        }
        let mut ideals = Vec::new();
        for p in &raw.ideal_points {
            let mut ends = Vec::new();
            for e in &p.ends {
                let (id, sign) = parse_end(e).ok_or_else(|| PlaneError::UnknownId(e.clone()))?;
                ends.push(EndRef { leaf: leaf(id)?, sign });
            }
            ideals.push(IdealPoint { id: p.id.clone(), ends });
        }
        let boundary: Vec<IdealIdx> = raw.boundary_order.iter().map(|id| ideal(id)).collect::<Result<_, _>>()?;
        let mut chains = Vec::new();
        for ch in &raw.chains {
            chains.push(NonSepChain {
                family: ch.family,
                leaves: ch.leaves.iter().map(|id| leaf(id)).collect::<Result<_, _>>()?,
                side: ch.side,
            });
        }
        Complex::assemble(raw.designation, leaves, crossings, ideals, boundary, chains)
    }

    pub fn assemble(
        designation: Designation,
        leaves: Vec<Leaf>,
        crossings: Vec<Crossing>,
        ideals: Vec<IdealPoint>,
        boundary: Vec<IdealIdx>,
        chains: Vec<NonSepChain>,
    ) -> Result<Complex, PlaneError> {
        let mut position = vec![usize::MAX; ideals.len()];
        for (i, &p) in boundary.iter().enumerate() {
            if p >= ideals.len() || position[p] != usize::MAX {
                return Err(PlaneError::BadBoundary(format!("position {i}")));
            }
            position[p] = i;
        }
        if let Some(p) = position.iter().position(|&x| x == usize::MAX) {
            return Err(PlaneError::BadBoundary(format!("{} missing", ideals[p].id)));
        }
        let leaf_ids = index_ids(leaves.iter().map(|l| &l.id))?;
        let ideal_ids = index_ids(ideals.iter().map(|p| &p.id))?;
        let crossing_ids = index_ids(crossings.iter().map(|c| &c.id))?;
        let mut by_pair = HashMap::new();
        for (i, c) in crossings.iter().enumerate() {
            by_pair.insert((c.stable, c.unstable), i);
        }
        Ok(Complex {
            designation,
            leaves,
            crossings,
            ideals,
            boundary,
            chains,
            position,
            leaf_ids,
            ideal_ids,
            crossing_ids,
            by_pair,
        })
    }

    pub fn to_raw(&self) -> RawComplex {
        RawComplex {
            designation: self.designation,
            leaves: self
                .leaves
                .iter()
                .map(|l| RawLeaf {
                    id: l.id.clone(),
                    family: l.family,
                    crossings: l.crossings.iter().map(|&c| self.crossings[c].id.clone()).collect(),
                    neg_end: self.ideals[l.neg].id.clone(),
                    pos_end: self.ideals[l.pos].id.clone(),
                })
                .collect(),
            crossings: self
                .crossings
                .iter()
                .map(|c| RawCrossing {
                    id: c.id.clone(),
                    stable: self.leaves[c.stable].id.clone(),
                    unstable: self.leaves[c.unstable].id.clone(),
                })
                .collect(),
            ideal_points: self
                .ideals
                .iter()
                .map(|p| RawIdeal {
                    id: p.id.clone(),
                    ends: p.ends.iter().map(|e| format!("{}{}", self.leaves[e.leaf].id, e.sign.symbol())).collect(),
                })
                .collect(),
            boundary_order: self.boundary.iter().map(|&p| self.ideals[p].id.clone()).collect(),
            chains: self
                .chains
                .iter()
                .map(|ch| RawChain {
                    family: ch.family,
                    leaves: ch.leaves.iter().map(|&l| self.leaves[l].id.clone()).collect(),
                    side: ch.side,
                })
                .collect(),
        }
    }

    pub fn leaf_by_id(&self, id: &str) -> Option<LeafIdx> {
        self.leaf_ids.get(id).copied()
    }

    pub fn ideal_by_id(&self, id: &str) -> Option<IdealIdx> {
        self.ideal_ids.get(id).copied()
    }

    pub fn crossing_by_id(&self, id: &str) -> Option<CrossIdx> {
        self.crossing_ids.get(id).copied()
    }

    pub fn leaf(&self, l: LeafIdx) -> &Leaf {
        &self.leaves[l]
    }

    pub fn leaf_id(&self, l: LeafIdx) -> &str {
        &self.leaves[l].id
    }

    pub fn ideal_id(&self, p: IdealIdx) -> &str {
        &self.ideals[p].id
    }

    pub fn leaves_of(&self, family: Family) -> impl Iterator<Item = LeafIdx> + '_ {
        (0..self.leaves.len()).filter(move |&l| self.leaves[l].family == family)
    }

    pub fn stable_leaves(&self) -> Vec<LeafIdx> {
        self.leaves_of(Family::Stable).collect()
    }

    pub fn unstable_leaves(&self) -> Vec<LeafIdx> {
        self.leaves_of(Family::Unstable).collect()
    }

    /// Position of an ideal point in the counterclockwise boundary order.
    pub fn bpos(&self, p: IdealIdx) -> usize {
        self.position[p]
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary.len()
    }

    pub fn triple(&self, a: IdealIdx, b: IdealIdx, c: IdealIdx) -> i8 {
        cyclic_sign(self.position[a], self.position[b], self.position[c])
    }

    /// Whether `x` lies in the open counterclockwise arc from `a` to `b`.
    pub fn in_open_arc(&self, a: IdealIdx, x: IdealIdx, b: IdealIdx) -> bool {
        if a == b {
            return x != a;
        }
        self.triple(a, x, b) == 1
    }

    /// Counterclockwise distance from `a` to `b` along the boundary.
    pub fn ccw_distance(&self, a: IdealIdx, b: IdealIdx) -> usize {
        let n = self.boundary.len();
        (self.position[b] + n - self.position[a]) % n
    }

    /// Endpoints of the open ccw arc forming the positive side of `l`.
    pub fn positive_arc(&self, l: LeafIdx) -> (IdealIdx, IdealIdx) {
        let leaf = &self.leaves[l];
        match leaf.family {
            Family::Stable => (leaf.neg, leaf.pos),
            Family::Unstable => (leaf.pos, leaf.neg),
        }
    }

    /// Open ccw arc on the `sign` side of `l`.
    pub fn side_arc(&self, l: LeafIdx, sign: Sign) -> (IdealIdx, IdealIdx) {
        let (a, b) = self.positive_arc(l);
        match sign {
            Sign::Pos => (a, b),
            Sign::Neg => (b, a),
        }
    }

    /// Side of `l` containing ideal point `p`; `None` on an end of `l`.
    pub fn point_side(&self, l: LeafIdx, p: IdealIdx) -> Option<Sign> {
        let leaf = &self.leaves[l];
        if leaf.has_end(p) {
            return None;
        }
        let (a, b) = self.positive_arc(l);
        Some(if self.in_open_arc(a, p, b) { Sign::Pos } else { Sign::Neg })
    }

    /// Side of `l` containing the disjoint leaf `m`; `None` if they link.
    pub fn leaf_side(&self, l: LeafIdx, m: LeafIdx) -> Option<Sign> {
        let sides: BTreeSet<Sign> = [self.leaves[m].neg, self.leaves[m].pos]
            .into_iter()
            .filter_map(|p| self.point_side(l, p))
            .collect();
        match sides.len() {
            1 => sides.into_iter().next(),
            _ => None,
        }
    }

    /// Endpoints of the two chords are four distinct, interleaved points.
    pub fn strictly_linked(&self, l: LeafIdx, m: LeafIdx) -> bool {
        let (a, b) = (self.leaves[l].neg, self.leaves[l].pos);
        let (c, d) = (self.leaves[m].neg, self.leaves[m].pos);
        let ends: BTreeSet<IdealIdx> = [a, b, c, d].into_iter().collect();
        if ends.len() < 4 {
            return false;
        }
        self.in_open_arc(a, c, b) != self.in_open_arc(a, d, b)
    }

    pub fn crossing_of(&self, s: LeafIdx, u: LeafIdx) -> Option<CrossIdx> {
        self.by_pair.get(&(s, u)).copied()
    }

    pub fn crosses(&self, s: LeafIdx, u: LeafIdx) -> bool {
        self.by_pair.contains_key(&(s, u)) || self.by_pair.contains_key(&(u, s))
    }

    /// Leaves crossing `l`, in the order of `l`'s crossing list.
    pub fn crossed_by(&self, l: LeafIdx) -> Vec<LeafIdx> {
        self.leaves[l].crossings.iter().map(|&c| self.other_leaf(c, l)).collect()
    }

    pub fn other_leaf(&self, c: CrossIdx, l: LeafIdx) -> LeafIdx {
        let x = &self.crossings[c];
        if x.stable == l {
            x.unstable
        } else {
            x.stable
        }
    }

    /// Index of the crossing with `m` along `l`.
    pub fn index_along(&self, l: LeafIdx, m: LeafIdx) -> Option<usize> {
        self.leaves[l].crossings.iter().position(|&c| self.other_leaf(c, l) == m)
    }

    /// Ideal points shared by two distinct leaves.
    pub fn shared_points(&self, l: LeafIdx, m: LeafIdx) -> Vec<IdealIdx> {
        let a = &self.leaves[l];
        let b = &self.leaves[m];
        let mut out = Vec::new();
        for p in [a.neg, a.pos] {
            if b.has_end(p) && !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    pub fn leaves_at(&self, p: IdealIdx) -> impl Iterator<Item = &EndRef> + '_ {
        self.ideals[p].ends.iter()
    }

    /// Leaves of the other family sharing an ideal point with `l`.
    pub fn fitting_leaves(&self, l: LeafIdx) -> Vec<LeafIdx> {
        let fam = self.leaves[l].family;
        let mut out = Vec::new();
        for p in [self.leaves[l].neg, self.leaves[l].pos] {
            for e in &self.ideals[p].ends {
                if self.leaves[e.leaf].family != fam && !out.contains(&e.leaf) {
                    out.push(e.leaf);
                }
            }
        }
        out
    }

    /// Same-family pairs sharing an ideal point, with their side.
    pub fn nonseparated_pairs(&self) -> Vec<(LeafIdx, LeafIdx, IdealIdx, Option<Side>)> {
        let mut out = Vec::new();
        for (p, ideal) in self.ideals.iter().enumerate() {
            for (i, e) in ideal.ends.iter().enumerate() {
                for f in &ideal.ends[i + 1..] {
                    if e.leaf != f.leaf && self.leaves[e.leaf].family == self.leaves[f.leaf].family {
                        out.push((e.leaf.min(f.leaf), e.leaf.max(f.leaf), p, self.pair_side(e.leaf, f.leaf)));
                    }
                }
            }
        }
        out
    }

    /// FromBelow iff each leaf lies on the other's negative side, FromAbove
    /// iff each lies on the positive side.
    pub fn pair_side(&self, a: LeafIdx, b: LeafIdx) -> Option<Side> {
        match (self.leaf_side(a, b)?, self.leaf_side(b, a)?) {
            (Sign::Neg, Sign::Neg) => Some(Side::FromBelow),
            (Sign::Pos, Sign::Pos) => Some(Side::FromAbove),
            _ => None,
        }
    }

    /// Removes crossings from leaf lists and the pair table, keeping ids.
    pub fn without_crossing(&self, c: CrossIdx) -> Complex {
        let mut out = self.clone();
        let x = out.crossings[c].clone();
        for l in [x.stable, x.unstable] {
            out.leaves[l].crossings.retain(|&k| k != c);
        }
        out.by_pair.remove(&(x.stable, x.unstable));
        out
    }
}

/// Cover relation of the unstable leaf space: consecutive crossings along
/// stable leaves.
#[derive(Clone, Debug)]
pub struct LeafSpace {
    pub up: Vec<Vec<LeafIdx>>,
    pub down: Vec<Vec<LeafIdx>>,
}

impl LeafSpace {
    pub fn unstable(c: &Complex) -> LeafSpace {
        let n = c.leaves.len();
        let mut up: Vec<BTreeSet<LeafIdx>> = vec![BTreeSet::new(); n];
        let mut down: Vec<BTreeSet<LeafIdx>> = vec![BTreeSet::new(); n];
        for s in c.leaves_of(Family::Stable) {
            let fibers = c.crossed_by(s);
            for w in fibers.windows(2) {
                up[w[0]].insert(w[1]);
                down[w[1]].insert(w[0]);
            }
        }
        LeafSpace {
            up: up.into_iter().map(|s| s.into_iter().collect()).collect(),
            down: down.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    fn closure(next: &[Vec<LeafIdx>], l: LeafIdx) -> Vec<LeafIdx> {
        let mut seen = BTreeSet::new();
        let mut stack = next[l].clone();
        while let Some(m) = stack.pop() {
            if seen.insert(m) {
                stack.extend(next[m].iter().copied());
            }
        }
        seen.into_iter().collect()
    }

    pub fn above(&self, l: LeafIdx) -> Vec<LeafIdx> {
        Self::closure(&self.up, l)
    }

    pub fn below(&self, l: LeafIdx) -> Vec<LeafIdx> {
        Self::closure(&self.down, l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn raw_round_trip() {
        let c = corpus::branch1();
        let again = Complex::from_raw(&c.to_raw()).unwrap();
        assert_eq!(again.to_raw(), c.to_raw());
    }

    #[test]
    fn unknown_ids_are_rejected() {
        let mut raw = corpus::triv(2, 2).to_raw();
        raw.leaves[0].neg_end = "nowhere".into();
        assert_eq!(Complex::from_raw(&raw).unwrap_err(), PlaneError::UnknownId("nowhere".into()));
    }

    #[test]
    fn branch_pair_is_from_below() {
        let c = corpus::branch1();
        let l1 = c.leaf_by_id("l1").unwrap();
        let l2 = c.leaf_by_id("l2").unwrap();
        assert_eq!(c.pair_side(l1, l2), Some(Side::FromBelow));
    }

    #[test]
    fn grid_covers_are_consecutive_rows() {
        let c = corpus::triv(3, 4);
        let ls = LeafSpace::unstable(&c);
        let u0 = c.leaf_by_id("u0").unwrap();
        assert_eq!(ls.up[u0], vec![c.leaf_by_id("u1").unwrap()]);
        assert_eq!(ls.above(u0).len(), 3);
    }
}
