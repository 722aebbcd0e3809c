use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::builder::order_along;
use super::{Complex, Designation, Family, Side, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    EndMismatch,
    DegenerateLeaf,
    TooManyEnds,
    Alternation,
    CrossingFamily,
    DuplicateCrossing,
    CrossingList,
    Linking,
    Orientation,
    SameFamilyLinked,
    MissingCrossing,
    OrderMismatch,
    ChainShape,
    ChainSide,
    ChainUnseparated,
    BranchingCoverage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub severity: Severity,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.iter().all(|v| v.severity == Severity::Warning)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Error)
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, severity: Severity, witness: Vec<String>) {
        self.violations.push(Violation { kind, severity, witness });
    }
}

/// Checks the combinatorial axioms of a finite bifoliated sample.
pub fn validate_complex(c: &Complex) -> ValidationReport {
    let mut r = ValidationReport::default();
    let lid = |l: usize| c.leaves[l].id.clone();

    let mut listed: HashSet<(usize, Sign)> = HashSet::new();
    for (p, ideal) in c.ideals.iter().enumerate() {
        for e in &ideal.ends {
            if !listed.insert((e.leaf, e.sign)) || c.leaves[e.leaf].end(e.sign) != p {
                r.push(ViolationKind::EndMismatch, Severity::Error, vec![ideal.id.clone(), lid(e.leaf)]);
            }
        }
        if ideal.ends.len() > 4 {
            r.push(ViolationKind::TooManyEnds, Severity::Warning, vec![ideal.id.clone()]);
        }
        // Ends emanate into the disk in the order of their far endpoints.
        let mut fam: Vec<(usize, Family)> = ideal
            .ends
            .iter()
            .map(|e| {
                let far = c.leaves[e.leaf].end(e.sign.flip());
                (c.ccw_distance(p, far), c.leaves[e.leaf].family)
            })
            .collect();
        fam.sort();
        if fam.windows(2).any(|w| w[0].1 == w[1].1) {
            r.push(ViolationKind::Alternation, Severity::Error, vec![ideal.id.clone()]);
        }
    }
    for (l, leaf) in c.leaves.iter().enumerate() {
        for s in [Sign::Neg, Sign::Pos] {
            if !listed.contains(&(l, s)) {
                r.push(ViolationKind::EndMismatch, Severity::Error, vec![lid(l), s.symbol().to_string()]);
            }
        }
        if leaf.neg == leaf.pos {
            r.push(ViolationKind::DegenerateLeaf, Severity::Error, vec![lid(l)]);
        }
    }

    let mut pairs = HashSet::new();
    for (i, x) in c.crossings.iter().enumerate() {
        let (s, u) = (x.stable, x.unstable);
        if c.leaves[s].family != Family::Stable || c.leaves[u].family != Family::Unstable {
            r.push(ViolationKind::CrossingFamily, Severity::Error, vec![x.id.clone()]);
            continue;
        }
        if !pairs.insert((s, u)) {
            r.push(ViolationKind::DuplicateCrossing, Severity::Error, vec![x.id.clone()]);
        }
        for l in [s, u] {
            if c.leaves[l].crossings.iter().filter(|&&k| k == i).count() != 1 {
                r.push(ViolationKind::CrossingList, Severity::Error, vec![x.id.clone(), lid(l)]);
            }
        }
        if !c.strictly_linked(s, u) {
            r.push(ViolationKind::Linking, Severity::Error, vec![x.id.clone()]);
            continue;
        }
        let (sl, ul) = (&c.leaves[s], &c.leaves[u]);
        let ccw = c.triple(ul.pos, sl.pos, ul.neg) == 1 && c.triple(sl.pos, ul.neg, sl.neg) == 1;
        if !ccw {
            r.push(ViolationKind::Orientation, Severity::Error, vec![x.id.clone()]);
        }
    }
    for (l, leaf) in c.leaves.iter().enumerate() {
        for &k in &leaf.crossings {
            let x = &c.crossings[k];
            if x.stable != l && x.unstable != l {
                r.push(ViolationKind::CrossingList, Severity::Error, vec![x.id.clone(), lid(l)]);
            }
        }
    }

    let n = c.leaves.len();
    for a in 0..n {
        for b in a + 1..n {
            let same = c.leaves[a].family == c.leaves[b].family;
            if !c.strictly_linked(a, b) {
                continue;
            }
            if same {
                r.push(ViolationKind::SameFamilyLinked, Severity::Error, vec![lid(a), lid(b)]);
            } else if !c.crosses(a, b) {
                r.push(ViolationKind::MissingCrossing, Severity::Warning, vec![lid(a), lid(b)]);
            }
        }
    }

    if r.ok() {
        for (l, leaf) in c.leaves.iter().enumerate() {
            let along = c.crossed_by(l);
            let mut sorted = along.clone();
            sorted.sort_by(|&a, &b| order_along(c, a, b));
            if sorted != along {
                r.push(ViolationKind::OrderMismatch, Severity::Error, vec![leaf.id.clone()]);
            }
        }
    }

    for ch in &c.chains {
        let ids: Vec<String> = ch.leaves.iter().map(|&l| lid(l)).collect();
        if ch.leaves.len() < 2 || ch.leaves.iter().any(|&l| c.leaves[l].family != ch.family) {
            r.push(ViolationKind::ChainShape, Severity::Error, ids);
            continue;
        }
        for w in ch.leaves.windows(2) {
            let shared = c.shared_points(w[0], w[1]);
            if shared.len() != 1 {
                r.push(ViolationKind::ChainShape, Severity::Error, vec![lid(w[0]), lid(w[1])]);
                continue;
            }
            if c.pair_side(w[0], w[1]) != Some(ch.side) {
                r.push(ViolationKind::ChainSide, Severity::Error, vec![lid(w[0]), lid(w[1])]);
            }
            let separated = c.ideals[shared[0]].ends.iter().any(|e| c.leaves[e.leaf].family != ch.family);
            if !separated {
                r.push(ViolationKind::ChainUnseparated, Severity::Error, vec![lid(w[0]), lid(w[1])]);
            }
        }
    }

    if c.designation == Designation::Branching {
        let present: BTreeSet<(Family, Side)> = c
            .nonseparated_pairs()
            .into_iter()
            .filter_map(|(a, _, _, side)| side.map(|s| (c.leaves[a].family, s)))
            .collect();
        for fam in [Family::Stable, Family::Unstable] {
            for side in [Side::FromAbove, Side::FromBelow] {
                if !present.contains(&(fam, side)) {
                    r.push(
                        ViolationKind::BranchingCoverage,
                        Severity::Warning,
                        vec![format!("{fam:?}"), format!("{side:?}")],
                    );
                }
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn corpus_validates() {
        for (name, c) in corpus::named_complexes() {
            let r = validate_complex(&c);
            assert!(r.ok(), "{name}: {:?}", r.violations);
        }
    }

    #[test]
    fn swapped_orientation_is_reported() {
        let mut c = corpus::triv(2, 2);
        let s0 = c.leaf_by_id("s0").unwrap();
        let leaf = &mut c.leaves[s0];
        std::mem::swap(&mut leaf.neg, &mut leaf.pos);
        for p in &mut c.ideals {
            for e in &mut p.ends {
                if e.leaf == s0 {
                    e.sign = e.sign.flip();
                }
            }
        }
        let r = validate_complex(&c);
        assert!(r.has(ViolationKind::Orientation));
    }

    #[test]
    fn dropped_crossing_is_a_warning() {
        let c = corpus::triv(2, 2);
        let c = c.without_crossing(0);
        let r = validate_complex(&c);
        assert!(r.has(ViolationKind::MissingCrossing));
    }

    #[test]
    fn triv_has_no_chains_and_no_branching_warning() {
        let r = validate_complex(&corpus::triv(3, 3));
        assert!(r.violations.is_empty());
    }
}
