use std::collections::BTreeMap;

use super::{Complex, Crossing, Designation, EndRef, Family, IdealPoint, Leaf, LeafIdx, NonSepChain, Sign};

/// Boundary position key; ideal points are sorted by it counterclockwise
/// and leaf ends with equal keys share an ideal point.
pub type Key = [i64; 3];

/// Builds a complex from chords with prescribed boundary positions.
/// Crossings and their orders are derived from linking.
#[derive(Clone, Debug, Default)]
pub struct ChordBuilder {
    leaves: Vec<(String, Family, Key, Key)>,
    names: BTreeMap<Key, String>,
    chains: Vec<(Family, Vec<String>, super::Side)>,
}

impl ChordBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(&mut self, id: &str, family: Family, neg: Key, pos: Key) -> &mut Self {
        self.leaves.push((id.to_string(), family, neg, pos));
        self
    }

    /// Stable or unstable chord between two angles in tenths of a degree.
    pub fn angle_leaf(&mut self, id: &str, family: Family, neg: i64, pos: i64) -> &mut Self {
        self.leaf(id, family, [0, neg.rem_euclid(3600), 0], [0, pos.rem_euclid(3600), 0])
    }

    /// Names a boundary position, adding it as a bare ideal point if no
    /// leaf ends there.
    pub fn point(&mut self, key: Key, name: &str) -> &mut Self {
        self.names.insert(key, name.to_string());
        self
    }

    pub fn chain(&mut self, family: Family, leaves: &[&str], side: super::Side) -> &mut Self {
        self.chains.push((family, leaves.iter().map(|s| s.to_string()).collect(), side));
        self
    }

    pub fn build(&self, designation: Designation) -> Complex {
        let mut keys: BTreeMap<Key, Vec<EndRef>> = self.names.keys().map(|k| (*k, Vec::new())).collect();
        for (i, (_, _, neg, pos)) in self.leaves.iter().enumerate() {
            keys.entry(*neg).or_default().push(EndRef { leaf: i, sign: Sign::Neg });
            keys.entry(*pos).or_default().push(EndRef { leaf: i, sign: Sign::Pos });
        }
        let key_list: Vec<Key> = keys.keys().copied().collect();
        let index_of: BTreeMap<Key, usize> = key_list.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let ideals: Vec<IdealPoint> = key_list
            .iter()
            .map(|k| IdealPoint {
                id: self.names.get(k).cloned().unwrap_or_else(|| default_name(k)),
                ends: keys[k].clone(),
            })
            .collect();
        let mut leaves: Vec<Leaf> = self
            .leaves
            .iter()
            .map(|(id, family, neg, pos)| Leaf {
                id: id.clone(),
                family: *family,
                neg: index_of[neg],
                pos: index_of[pos],
                crossings: Vec::new(),
            })
            .collect();
        let boundary: Vec<usize> = (0..ideals.len()).collect();
        let chains = self
            .chains
            .iter()
            .map(|(family, ids, side)| NonSepChain {
                family: *family,
                leaves: ids
                    .iter()
                    .map(|id| self.leaves.iter().position(|l| &l.0 == id).expect("chain leaf declared"))
                    .collect(),
                side: *side,
            })
            .collect();
        let probe = Complex::assemble(designation, leaves.clone(), vec![], ideals.clone(), boundary.clone(), vec![])
            .expect("builder produces consistent identifiers");

        let mut crossings = Vec::new();
        for s in probe.leaves_of(Family::Stable) {
            for u in probe.leaves_of(Family::Unstable) {
                if probe.strictly_linked(s, u) {
                    crossings.push(Crossing {
                        id: format!("{}x{}", leaves[s].id, leaves[u].id),
                        stable: s,
                        unstable: u,
                    });
                }
            }
        }
        for (l, leaf) in leaves.iter_mut().enumerate() {
            let mut mine: Vec<(usize, LeafIdx)> = crossings
                .iter()
                .enumerate()
                .filter(|(_, x)| x.stable == l || x.unstable == l)
                .map(|(i, x)| (i, if x.stable == l { x.unstable } else { x.stable }))
                .collect();
            mine.sort_by(|a, b| order_along(&probe, a.1, b.1));
            leaf.crossings = mine.into_iter().map(|(i, _)| i).collect();
        }
        Complex::assemble(designation, leaves, crossings, ideals, boundary, chains)
            .expect("builder produces consistent identifiers")
    }
}

/// Order of two disjoint leaves crossing a common leaf: `b` comes later
/// iff it lies on the positive side of `a`.
pub(crate) fn order_along(c: &Complex, a: LeafIdx, b: LeafIdx) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    if a == b {
        return Ordering::Equal;
    }
    match c.leaf_side(a, b) {
        Some(Sign::Pos) => Ordering::Less,
        Some(Sign::Neg) => Ordering::Greater,
        None => a.cmp(&b),
    }
}

fn default_name(k: &Key) -> String {
    if k[0] == 0 && k[2] == 0 {
        if k[1] % 10 == 0 {
            format!("a{}", k[1] / 10)
        } else {
            format!("a{}.{}", k[1] / 10, k[1] % 10)
        }
    } else {
        format!("p{}_{}_{}", k[0], k[1], k[2])
    }
}
