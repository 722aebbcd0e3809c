//! Finite circular orders, their completion to circles, monotone maps
//! and conjugacy of finite circle actions.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Largest size for which every quadruple is checked.
pub const EXHAUSTIVE_CUTOFF: usize = 12;
/// Number of random quadruples drawn above the cutoff.
pub const SAMPLED_QUADRUPLES: usize = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrderError {
    #[error("invalid circular order: {0}")]
    InvalidOrder(String),
    #[error("map is not monotone of degree one: {0}")]
    NotMonotone(String),
    #[error("generator labels differ: {0:?} vs {1:?}")]
    MismatchedGenerators(Vec<String>, Vec<String>),
}

/// Dense orientation table `t(a, b, c)` in {-1, 0, 1}.
#[derive(Clone, Debug)]
pub struct CircularOrder {
    elements: Vec<String>,
    table: Vec<i8>,
}

impl CircularOrder {
    pub fn from_fn(elements: Vec<String>, mut f: impl FnMut(usize, usize, usize) -> i8) -> Self {
        let n = elements.len();
        let mut table = vec![0i8; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    table[(a * n + b) * n + c] = f(a, b, c);
                }
            }
        }
        CircularOrder { elements, table }
    }

    /// Orientation induced by listing the elements counterclockwise.
    pub fn from_sequence(elements: Vec<String>) -> Self {
        Self::from_fn(elements, cyclic_sign)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn triple(&self, a: usize, b: usize, c: usize) -> i8 {
        let n = self.len();
        self.table[(a * n + b) * n + c]
    }

    pub fn set_triple(&mut self, a: usize, b: usize, c: usize, v: i8) {
        let n = self.len();
        self.table[(a * n + b) * n + c] = v;
    }
}

/// Sign of the cyclic arrangement of positions `a, b, c` on `0..n`.
pub fn cyclic_sign(a: usize, b: usize, c: usize) -> i8 {
    if a == b || b == c || a == c {
        return 0;
    }
    // (a, b, c) is counterclockwise iff it is a rotation of an increasing triple.
    let ccw = (a < b && b < c) || (b < c && c < a) || (c < a && a < b);
    if ccw {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    Degeneracy,
    Antisymmetry,
    Cocycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderViolation {
    pub axiom: Axiom,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderReport {
    pub exhaustive: bool,
    pub checked_quadruples: usize,
    pub violations: Vec<OrderViolation>,
}

impl OrderReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_triple(o: &CircularOrder, a: usize, b: usize, c: usize, out: &mut BTreeSet<(u8, [usize; 4])>) {
    let distinct = a != b && b != c && a != c;
    let t = o.triple(a, b, c);
    if distinct == (t == 0) {
        out.insert((0, [a, b, c, usize::MAX]));
    }
    if t != -o.triple(b, a, c) || t != o.triple(b, c, a) {
        out.insert((1, [a, b, c, usize::MAX]));
    }
}

fn check_quadruple(o: &CircularOrder, a: usize, b: usize, c: usize, d: usize, out: &mut BTreeSet<(u8, [usize; 4])>) {
    let s = o.triple(b, c, d) - o.triple(a, c, d) + o.triple(a, b, d) - o.triple(a, b, c);
    if s != 0 {
        out.insert((2, [a, b, c, d]));
    }
}

/// Checks degeneracy, antisymmetry and the cocycle identity. Exhaustive up
/// to `cutoff` elements, otherwise on seeded random quadruples.
pub fn validate_order(o: &CircularOrder, cutoff: usize) -> OrderReport {
    let n = o.len();
    let mut found = BTreeSet::new();
    let exhaustive = n <= cutoff;
    let mut checked = 0usize;
    if exhaustive {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    check_triple(o, a, b, c, &mut found);
                    for d in 0..n {
                        check_quadruple(o, a, b, c, d, &mut found);
                        checked += 1;
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..SAMPLED_QUADRUPLES {
            let q: [usize; 4] = [
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
            ];
            check_triple(o, q[0], q[1], q[2], &mut found);
            check_quadruple(o, q[0], q[1], q[2], q[3], &mut found);
            checked += 1;
        }
    }
    let violations = found
        .into_iter()
        .map(|(kind, idx)| OrderViolation {
            axiom: match kind {
                0 => Axiom::Degeneracy,
                1 => Axiom::Antisymmetry,
                _ => Axiom::Cocycle,
            },
            witness: idx
                .iter()
                .filter(|&&i| i != usize::MAX)
                .map(|&i| o.elements[i].clone())
                .collect(),
        })
        .collect();
    OrderReport { exhaustive, checked_quadruples: checked, violations }
}

/// A finite circle: its points listed counterclockwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CircleModel {
    pub points: Vec<String>,
}

impl CircleModel {
    pub fn new(points: Vec<String>) -> Self {
        CircleModel { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, p: &str) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    pub fn successor(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    pub fn to_order(&self) -> CircularOrder {
        CircularOrder::from_sequence(self.points.clone())
    }
}

/// Completes a valid circular order to the circle it orients.
pub fn complete(o: &CircularOrder) -> Result<CircleModel, OrderError> {
    let report = validate_order(o, EXHAUSTIVE_CUTOFF);
    if let Some(v) = report.violations.first() {
        return Err(OrderError::InvalidOrder(format!("{:?} at {:?}", v.axiom, v.witness)));
    }
    let n = o.len();
    if n <= 2 {
        return Ok(CircleModel::new(o.elements.clone()));
    }
    let mut rest: Vec<usize> = (1..n).collect();
    rest.sort_by(|&b, &c| {
        if b == c {
            std::cmp::Ordering::Equal
        } else if o.triple(0, b, c) > 0 {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    let mut seq = vec![0];
    seq.extend(rest);
    // The sorted sequence must reproduce every sampled triple.
    let pos: Vec<usize> = {
        let mut p = vec![0; n];
        for (i, &e) in seq.iter().enumerate() {
            p[e] = i;
        }
        p
    };
    let mismatch = |a: usize, b: usize, c: usize| o.triple(a, b, c) != cyclic_sign(pos[a], pos[b], pos[c]);
    if n <= EXHAUSTIVE_CUTOFF * 4 {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mismatch(a, b, c) {
                        return Err(OrderError::InvalidOrder(format!(
                            "no circle realizes ({}, {}, {})",
                            o.elements[a], o.elements[b], o.elements[c]
                        )));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..SAMPLED_QUADRUPLES {
            let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if mismatch(a, b, c) {
                return Err(OrderError::InvalidOrder("no circle realizes sampled triple".into()));
            }
        }
    }
    Ok(CircleModel::new(seq.into_iter().map(|i| o.elements[i].clone()).collect()))
}

/// Map between finite circles given by `assignment[i]` = target index of
/// source point `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotoneMap {
    pub source: CircleModel,
    pub target: CircleModel,
    pub assignment: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapCore {
    /// Maximal arcs of source indices (ccw) collapsed to one target point.
    pub gaps: Vec<Vec<usize>>,
    /// Source indices mapped injectively.
    pub core: Vec<usize>,
}

impl MonotoneMap {
    /// Runs of the assignment read ccw, starting at a run boundary.
    fn runs(&self) -> Result<Vec<(usize, Vec<usize>)>, OrderError> {
        let n = self.source.len();
        if self.assignment.len() != n {
            return Err(OrderError::NotMonotone("assignment length differs from source".into()));
        }
        if let Some(&bad) = self.assignment.iter().find(|&&t| t >= self.target.len()) {
            return Err(OrderError::NotMonotone(format!("target index {bad} out of range")));
        }
        if n == 0 {
            return Ok(vec![]);
        }
        let start = (0..n)
            .find(|&i| self.assignment[i] != self.assignment[(i + n - 1) % n])
            .unwrap_or(0);
        let mut runs: Vec<(usize, Vec<usize>)> = Vec::new();
        for k in 0..n {
            let i = (start + k) % n;
            let t = self.assignment[i];
            match runs.last_mut() {
                Some((rt, members)) if *rt == t => members.push(i),
                _ => runs.push((t, vec![i])),
            }
        }
        Ok(runs)
    }

    /// Checks that the map is monotone of degree one, and returns its gaps
    /// and injective core.
    pub fn gap_core(&self) -> Result<GapCore, OrderError> {
        let runs = self.runs()?;
        let m = self.target.len();
        if runs.len() != m {
            return Err(OrderError::NotMonotone(format!(
                "{} runs of constant value for {} target points",
                runs.len(),
                m
            )));
        }
        if m > 0 {
            let first = runs[0].0;
            for (k, (t, _)) in runs.iter().enumerate() {
                if *t != (first + k) % m {
                    return Err(OrderError::NotMonotone(format!(
                        "target {} visited out of cyclic order",
                        self.target.points[*t]
                    )));
                }
            }
        }
        let mut gaps = Vec::new();
        let mut core = Vec::new();
        for (_, members) in runs {
            if members.len() >= 2 {
                gaps.push(members);
            } else {
                core.extend(members);
            }
        }
        core.sort_unstable();
        Ok(GapCore { gaps, core })
    }

    pub fn compose(&self, then: &MonotoneMap) -> Result<MonotoneMap, OrderError> {
        if self.target != then.source {
            return Err(OrderError::NotMonotone("composition across different circles".into()));
        }
        Ok(MonotoneMap {
            source: self.source.clone(),
            target: then.target.clone(),
            assignment: self.assignment.iter().map(|&t| then.assignment[t]).collect(),
        })
    }
}

/// A finite circle with named permutations acting on its points.
#[derive(Clone, Debug, Serialize)]
pub struct CircleAction {
    pub circle: CircleModel,
    pub generators: BTreeMap<String, Vec<usize>>,
}

/// Whether two actions are conjugate by an orientation-preserving
/// bijection of the circles.
pub fn is_conjugate(a: &CircleAction, b: &CircleAction) -> Result<bool, OrderError> {
    let ka: Vec<String> = a.generators.keys().cloned().collect();
    let kb: Vec<String> = b.generators.keys().cloned().collect();
    if ka != kb {
        return Err(OrderError::MismatchedGenerators(ka, kb));
    }
    let n = a.circle.len();
    if n != b.circle.len() {
        return Ok(false);
    }
    for act in [a, b] {
        for (name, g) in &act.generators {
            if g.len() != n || !preserves_cyclic_order(g) {
                return Err(OrderError::InvalidOrder(format!("generator {name} is not an orientation-preserving bijection")));
            }
        }
    }
    if n == 0 {
        return Ok(true);
    }
    Ok((0..n).any(|r| {
        a.generators.iter().all(|(name, ga)| {
            let gb = &b.generators[name];
            (0..n).all(|i| (ga[i] + r) % n == gb[(i + r) % n])
        })
    }))
}

/// A permutation of `0..n` preserves cyclic order iff it is a rotation.
fn preserves_cyclic_order(g: &[usize]) -> bool {
    let n = g.len();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    for &x in g {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    let shift = g[0];
    (0..n).all(|i| g[i] == (i + shift) % n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    #[test]
    fn sequence_order_is_valid() {
        let o = CircularOrder::from_sequence(names(7));
        assert!(validate_order(&o, EXHAUSTIVE_CUTOFF).is_valid());
    }

    #[test]
    fn flipped_triple_breaks_cocycle() {
        let mut o = CircularOrder::from_sequence(names(5));
        o.set_triple(0, 1, 2, -1);
        let r = validate_order(&o, EXHAUSTIVE_CUTOFF);
        assert!(r.violations.iter().any(|v| v.axiom == Axiom::Cocycle));
    }

    #[test]
    fn large_orders_are_sampled() {
        let o = CircularOrder::from_sequence(names(20));
        let r = validate_order(&o, EXHAUSTIVE_CUTOFF);
        assert!(!r.exhaustive);
        assert_eq!(r.checked_quadruples, SAMPLED_QUADRUPLES);
        assert!(r.is_valid());
    }

    #[test]
    fn completion_recovers_sequence() {
        let seq = vec!["c".to_string(), "a".into(), "d".into(), "b".into()];
        let circle = complete(&CircularOrder::from_sequence(seq.clone())).unwrap();
        let k = circle.index_of("c").unwrap();
        let rotated: Vec<_> = (0..4).map(|i| circle.points[(k + i) % 4].clone()).collect();
        assert_eq!(rotated, seq);
    }

    #[test]
    fn completion_rejects_invalid() {
        let mut o = CircularOrder::from_sequence(names(4));
        o.set_triple(0, 1, 2, 0);
        assert!(matches!(complete(&o), Err(OrderError::InvalidOrder(_))));
    }

    #[test]
    fn collapse_has_one_gap() {
        let map = MonotoneMap {
            source: CircleModel::new(names(6)),
            target: CircleModel::new(vec!["x".into(), "y".into(), "z".into()]),
            assignment: vec![0, 1, 1, 1, 2, 0],
        };
        let gc = map.gap_core().unwrap();
        assert_eq!(gc.gaps.len(), 2);
        assert!(gc.gaps.contains(&vec![1, 2, 3]));
        assert!(gc.gaps.contains(&vec![5, 0]));
        assert_eq!(gc.core, vec![4]);
    }

    #[test]
    fn reversing_map_is_not_monotone() {
        let map = MonotoneMap {
            source: CircleModel::new(names(3)),
            target: CircleModel::new(names(3)),
            assignment: vec![0, 2, 1],
        };
        assert!(matches!(map.gap_core(), Err(OrderError::NotMonotone(_))));
    }

    #[test]
    fn split_preimage_is_not_monotone() {
        let map = MonotoneMap {
            source: CircleModel::new(names(4)),
            target: CircleModel::new(names(2)),
            assignment: vec![0, 1, 0, 1],
        };
        assert!(map.gap_core().is_err());
    }

    fn rotation(n: usize, k: usize) -> CircleAction {
        CircleAction {
            circle: CircleModel::new(names(n)),
            generators: BTreeMap::from([("g".to_string(), (0..n).map(|i| (i + k) % n).collect())]),
        }
    }

    #[test]
    fn rotations_by_different_steps_are_not_conjugate() {
        assert!(!is_conjugate(&rotation(6, 1), &rotation(6, 2)).unwrap());
        assert!(is_conjugate(&rotation(6, 1), &rotation(6, 1)).unwrap());
    }

    #[test]
    fn mismatched_labels_error() {
        let mut b = rotation(6, 1);
        let g = b.generators.remove("g").unwrap();
        b.generators.insert("h".into(), g);
        assert!(matches!(is_conjugate(&rotation(6, 1), &b), Err(OrderError::MismatchedGenerators(..))));
    }
}
