//! Points of the circle fibers over unstable leaves and sections choosing
//! one point per fiber.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::plane::{Complex, LeafIdx};

/// A point of the fiber over an unstable leaf: the crossing with a stable
/// leaf, or the seam point where the two ends are glued.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FiberPoint {
    Crossing(LeafIdx),
    Seam,
}

impl FiberPoint {
    pub fn stable(self) -> Option<LeafIdx> {
        match self {
            FiberPoint::Crossing(s) => Some(s),
            FiberPoint::Seam => None,
        }
    }

    pub fn label(self, c: &Complex, fiber: LeafIdx) -> String {
        match self {
            FiberPoint::Seam => "seam".to_string(),
            FiberPoint::Crossing(s) => c
                .crossing_of(s, fiber)
                .map(|x| c.crossings[x].id.clone())
                .unwrap_or_else(|| format!("{}?{}", c.leaf_id(s), c.leaf_id(fiber))),
        }
    }

    /// Parses `"seam"` or a crossing id on the given fiber.
    pub fn parse(c: &Complex, fiber: LeafIdx, s: &str) -> Option<FiberPoint> {
        if s == "seam" {
            return Some(FiberPoint::Seam);
        }
        let x = c.crossing_by_id(s)?;
        let cr = &c.crossings[x];
        (cr.unstable == fiber).then_some(FiberPoint::Crossing(cr.stable))
    }
}

/// Position of a point in the fiber sequence: crossings in order, then
/// the seam.
pub fn fiber_index(c: &Complex, fiber: LeafIdx, p: FiberPoint) -> Option<usize> {
    match p {
        FiberPoint::Seam => Some(c.leaves[fiber].crossings.len()),
        FiberPoint::Crossing(s) => c.index_along(fiber, s),
    }
}

/// All points of a fiber in order.
pub fn fiber_points(c: &Complex, fiber: LeafIdx) -> Vec<FiberPoint> {
    let mut pts: Vec<FiberPoint> = c.crossed_by(fiber).into_iter().map(FiberPoint::Crossing).collect();
    pts.push(FiberPoint::Seam);
    pts
}

#[derive(Clone, Debug)]
pub struct Section {
    pub tag: String,
    pub values: BTreeMap<LeafIdx, FiberPoint>,
    /// Leaves where the value was set by turning a corner.
    pub corners: Vec<LeafIdx>,
}

impl PartialEq for Section {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl Eq for Section {}

impl Section {
    pub fn new(tag: impl Into<String>) -> Self {
        Section { tag: tag.into(), values: BTreeMap::new(), corners: Vec::new() }
    }

    pub fn get(&self, l: LeafIdx) -> Option<FiberPoint> {
        self.values.get(&l).copied()
    }

    pub fn support(&self) -> Vec<LeafIdx> {
        let mut s: Vec<LeafIdx> = self.values.values().filter_map(|p| p.stable()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn to_json(&self, c: &Complex) -> SectionJson {
        SectionJson {
            tag: self.tag.clone(),
            values: self
                .values
                .iter()
                .map(|(&l, &p)| SectionValue { leaf: c.leaf_id(l).to_string(), value: p.label(c, l) })
                .collect(),
        }
    }

    pub fn from_json(c: &Complex, j: &SectionJson) -> Option<Section> {
        let mut s = Section::new(j.tag.clone());
        for v in &j.values {
            let l = c.leaf_by_id(&v.leaf)?;
            s.values.insert(l, FiberPoint::parse(c, l, &v.value)?);
        }
        Some(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionValue {
    pub leaf: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionJson {
    pub tag: String,
    pub values: Vec<SectionValue>,
}
