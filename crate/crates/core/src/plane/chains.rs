use std::collections::BTreeSet;

use serde::Serialize;

use super::{Complex, Family, IdealIdx, LeafIdx, PlaneError, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ChainDirection {
    /// `l_i- = l_{i+1}+`.
    Backwards,
    /// `l_i+ = l_{i+1}-`.
    Forwards,
}

impl ChainDirection {
    /// End of a chain leaf that the next leaf attaches to.
    fn link_end(self) -> Sign {
        match self {
            ChainDirection::Backwards => Sign::Neg,
            ChainDirection::Forwards => Sign::Pos,
        }
    }
}

/// Sequence of stable leaves joined end to end at shared ideal points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Chain {
    pub leaves: Vec<LeafIdx>,
}

impl Chain {
    pub fn ids(&self, c: &Complex) -> Vec<String> {
        self.leaves.iter().map(|&l| c.leaf_id(l).to_string()).collect()
    }
}

/// Stable leaves whose `sign` end is `p`.
fn stables_with_end(c: &Complex, p: IdealIdx, sign: Sign) -> Vec<LeafIdx> {
    c.ideals[p]
        .ends
        .iter()
        .filter(|e| e.sign == sign && c.leaves[e.leaf].family == Family::Stable)
        .map(|e| e.leaf)
        .collect()
}

/// All maximal chains starting at the given leaves, extended while `keep`
/// accepts the next leaf.
fn grow(c: &Complex, starts: Vec<LeafIdx>, dir: ChainDirection, keep: &dyn Fn(LeafIdx) -> bool) -> Vec<Chain> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<Vec<LeafIdx>> = starts.into_iter().filter(|&l| keep(l)).map(|l| vec![l]).collect();
    while let Some(path) = stack.pop() {
        let last = *path.last().expect("paths are nonempty");
        let joint = c.leaves[last].end(dir.link_end());
        let next: Vec<LeafIdx> = stables_with_end(c, joint, dir.link_end().flip())
            .into_iter()
            .filter(|&m| !path.contains(&m) && keep(m))
            .collect();
        if next.is_empty() {
            out.insert(Chain { leaves: path });
        } else {
            for m in next {
                let mut p = path.clone();
                p.push(m);
                stack.push(p);
            }
        }
    }
    out.into_iter().collect()
}

fn resolve_point(c: &Complex, z: &str) -> Result<IdealIdx, PlaneError> {
    c.ideal_by_id(z).ok_or_else(|| PlaneError::UnknownIdealPoint(z.to_string()))
}

/// Maximal backwards chains from `z`: `l_1+ = z` and `l_i- = l_{i+1}+`.
pub fn enumerate_backwards_chains(c: &Complex, z: &str) -> Result<Vec<Chain>, PlaneError> {
    let z = resolve_point(c, z)?;
    Ok(chains_from(c, z, ChainDirection::Backwards))
}

/// Maximal forwards chains from `z`: `l_1- = z` and `l_i+ = l_{i+1}-`.
pub fn enumerate_forwards_chains(c: &Complex, z: &str) -> Result<Vec<Chain>, PlaneError> {
    let z = resolve_point(c, z)?;
    Ok(chains_from(c, z, ChainDirection::Forwards))
}

pub(crate) fn chains_from(c: &Complex, z: IdealIdx, dir: ChainDirection) -> Vec<Chain> {
    let start_end = dir.link_end().flip();
    grow(c, stables_with_end(c, z, start_end), dir, &|_| true)
}

/// Chains from an endpoint of `l` whose leaves, away from `l`'s ends, lie
/// in the component of the boundary minus `l`'s ends not containing `z`.
pub fn enumerate_opposite_chains(
    c: &Complex,
    l: &str,
    z: &str,
    dir: ChainDirection,
) -> Result<Vec<Chain>, PlaneError> {
    let li = c.leaf_by_id(l).ok_or_else(|| PlaneError::UnknownId(l.to_string()))?;
    if c.leaves[li].family != Family::Stable {
        return Err(PlaneError::NotStable(l.to_string()));
    }
    let zi = resolve_point(c, z)?;
    if c.leaves[li].has_end(zi) {
        return Err(PlaneError::ZOnLeafEnd(z.to_string(), l.to_string()));
    }
    Ok(opposite_chains(c, li, zi, dir))
}

pub(crate) fn opposite_chains(c: &Complex, l: LeafIdx, z: IdealIdx, dir: ChainDirection) -> Vec<Chain> {
    let (a, b) = (c.leaves[l].neg, c.leaves[l].pos);
    let z_side = c.in_open_arc(a, z, b);
    let keep = |m: LeafIdx| {
        m != l
            && [c.leaves[m].neg, c.leaves[m].pos]
                .into_iter()
                .filter(|&p| p != a && p != b)
                .all(|p| c.in_open_arc(a, p, b) != z_side)
    };
    let start_end = dir.link_end().flip();
    let mut starts = stables_with_end(c, a, start_end);
    starts.extend(stables_with_end(c, b, start_end));
    starts.retain(|&m| m != l);
    grow(c, starts, dir, &keep)
}

/// Maximal sequences of stable leaves with `l_i+ = l_{i+1}-`; a leaf with
/// no such neighbours is its own chain.
pub fn maximal_oriented_chains(c: &Complex) -> Vec<Chain> {
    let stables: Vec<LeafIdx> = c.leaves_of(Family::Stable).collect();
    let has_pred = |l: LeafIdx| stables_with_end(c, c.leaves[l].neg, Sign::Pos).into_iter().any(|m| m != l);
    let starts: Vec<LeafIdx> = stables.iter().copied().filter(|&l| !has_pred(l)).collect();
    grow(c, starts, ChainDirection::Forwards, &|_| true)
}

/// Leaves sharing no ideal point with another leaf.
pub fn regular_leaves(c: &Complex) -> Vec<LeafIdx> {
    (0..c.leaves.len())
        .filter(|&l| {
            [c.leaves[l].neg, c.leaves[l].pos]
                .into_iter()
                .all(|p| c.ideals[p].ends.iter().all(|e| e.leaf == l))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn ids(c: &Complex, chains: &[Chain]) -> Vec<Vec<String>> {
        chains.iter().map(|ch| ch.ids(c)).collect()
    }

    #[test]
    fn branch_backwards_from_top_of_l1() {
        let c = corpus::branch1();
        let z = c.ideal_id(c.leaves[c.leaf_by_id("l1").unwrap()].pos).to_string();
        let chains = enumerate_backwards_chains(&c, &z).unwrap();
        assert_eq!(ids(&c, &chains), vec![vec!["l1".to_string(), "l2".to_string()]]);
    }

    #[test]
    fn branch_backwards_from_bottom_of_l2_is_empty() {
        let c = corpus::branch1();
        let z = c.ideal_id(c.leaves[c.leaf_by_id("l2").unwrap()].neg).to_string();
        assert!(enumerate_backwards_chains(&c, &z).unwrap().is_empty());
    }

    #[test]
    fn unknown_point_is_an_error() {
        let c = corpus::branch1();
        assert!(matches!(enumerate_backwards_chains(&c, "nope"), Err(PlaneError::UnknownIdealPoint(_))));
    }

    #[test]
    fn opposite_chain_depends_on_side_of_z() {
        let c = corpus::branch1();
        let away = c.ideal_id(c.leaves[c.leaf_by_id("v1").unwrap()].pos).to_string();
        let near = c.ideal_id(c.leaves[c.leaf_by_id("w1").unwrap()].pos).to_string();
        let got = enumerate_opposite_chains(&c, "l1", &away, ChainDirection::Backwards).unwrap();
        assert_eq!(ids(&c, &got), vec![vec!["l2".to_string()]]);
        assert!(enumerate_opposite_chains(&c, "l1", &near, ChainDirection::Backwards).unwrap().is_empty());
        let end = c.ideal_id(c.leaves[c.leaf_by_id("l1").unwrap()].pos).to_string();
        assert!(matches!(
            enumerate_opposite_chains(&c, "l1", &end, ChainDirection::Backwards),
            Err(PlaneError::ZOnLeafEnd(..))
        ));
    }

    #[test]
    fn maximal_chains() {
        let c = corpus::branch1();
        let long: Vec<Vec<String>> =
            ids(&c, &maximal_oriented_chains(&c)).into_iter().filter(|ch| ch.len() > 1).collect();
        assert_eq!(long, vec![vec!["l2".to_string(), "l1".to_string()]]);
        let t = corpus::triv(3, 3);
        let singles = maximal_oriented_chains(&t);
        assert_eq!(singles.len(), 3);
        assert!(singles.iter().all(|ch| ch.leaves.len() == 1));
    }

    #[test]
    fn regular_leaves_exclude_branching_leaves() {
        let c = corpus::branch1();
        let reg: BTreeSet<String> = regular_leaves(&c).into_iter().map(|l| c.leaf_id(l).to_string()).collect();
        for id in ["l1", "l2", "u"] {
            assert!(!reg.contains(id));
        }
        assert_eq!(reg.len(), c.leaves.len() - 3);
        let t = corpus::triv(3, 2);
        assert_eq!(regular_leaves(&t).len(), 5);
    }
}
