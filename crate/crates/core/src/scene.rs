//! Versioned JSON scene files: a complex plus the transversals,
//! basepoints, skew parameters, dynamics seed and expectations that the
//! command line needs to run checks on it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checks::Basepoint;
use crate::corpus;
use crate::dynamics::{hyp1_seed, realize, PeriodicComplex};
use crate::plane::{ChordBuilder, Complex, Designation, Family, LeafIdx, RawComplex, RawCrossing};
use crate::skew::skew_complex;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SceneError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
}

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> SceneError {
    SceneError::Schema { pointer: pointer.into(), message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RawBasepoint {
    pub fiber: String,
    /// `"seam"` or the id of a stable leaf crossing the fiber.
    pub point: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SkewParams {
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DynamicsSpec {
    pub seed: PeriodicComplex,
    pub windows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Scene {
    pub schema_version: u32,
    pub name: String,
    pub complex: RawComplex,
    /// Named monotone sequences of unstable leaf ids.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub transversals: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub basepoints: BTreeMap<String, RawBasepoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skew: Option<SkewParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSpec>,
    /// Check name to expected outcome.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expectations: BTreeMap<String, bool>,
}

/// A scene with its identifiers resolved.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub scene: Scene,
    pub complex: Complex,
    pub transversals: BTreeMap<String, Vec<LeafIdx>>,
    pub basepoints: BTreeMap<String, Basepoint>,
}

pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let scene: Scene = serde_json::from_str(text).map_err(|e| {
        if e.is_data() {
            schema(format!("line {}, column {}", e.line(), e.column()), e.to_string())
        } else {
            SceneError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
        }
    })?;
    if scene.schema_version != SCHEMA_VERSION {
        return Err(schema("/schemaVersion", format!("unsupported version {}", scene.schema_version)));
    }
    Ok(scene)
}

pub fn to_json(scene: &Scene) -> String {
    let mut s = serde_json::to_string_pretty(scene).expect("scenes serialize");
    s.push('\n');
    s
}

/// Resolves every identifier the scene refers to.
pub fn load(scene: Scene) -> Result<Loaded, SceneError> {
    let complex = Complex::from_raw(&scene.complex).map_err(|e| schema("/complex", e.to_string()))?;
    let mut transversals = BTreeMap::new();
    for (name, ids) in &scene.transversals {
        let mut t = Vec::new();
        for (i, id) in ids.iter().enumerate() {
            let l = complex
                .leaf_by_id(id)
                .filter(|&l| complex.leaf(l).family == Family::Unstable)
                .ok_or_else(|| schema(format!("/transversals/{name}/{i}"), format!("{id} is not an unstable leaf")))?;
            t.push(l);
        }
        transversals.insert(name.clone(), t);
    }
    let mut basepoints = BTreeMap::new();
    for (name, b) in &scene.basepoints {
        let bp = Basepoint::parse(&complex, &b.fiber, &b.point)
            .ok_or_else(|| schema(format!("/basepoints/{name}"), format!("{} is not a point of {}", b.point, b.fiber)))?;
        basepoints.insert(name.clone(), bp);
    }
    if let Some(sk) = &scene.skew {
        if sk.n < 2 {
            return Err(schema("/skew/n", "needs at least 2"));
        }
        if skew_complex(sk.n).complex.to_raw() != scene.complex {
            return Err(schema("/complex", format!("does not match the skew staircase with n = {}", sk.n)));
        }
    }
    if let Some(d) = &scene.dynamics {
        if d.windows.is_empty() {
            return Err(schema("/dynamics/windows", "no windows"));
        }
    }
    Ok(Loaded { scene, complex, transversals, basepoints })
}

pub fn load_str(text: &str) -> Result<Loaded, SceneError> {
    load(parse_scene(text)?)
}

fn base(fiber: &str, point: &str) -> RawBasepoint {
    RawBasepoint { fiber: fiber.into(), point: point.into() }
}

fn expect(pairs: &[(&str, bool)]) -> BTreeMap<String, bool> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn bare(name: &str, c: &Complex) -> Scene {
    Scene {
        schema_version: SCHEMA_VERSION,
        name: name.into(),
        complex: c.to_raw(),
        transversals: BTreeMap::new(),
        basepoints: BTreeMap::new(),
        skew: None,
        dynamics: None,
        expectations: BTreeMap::new(),
    }
}

pub fn triv_scene(n: usize, m: usize) -> Scene {
    let c = corpus::triv(n, m);
    let mut s = bare(&format!("triv{n}x{m}"), &c);
    s.transversals.insert("main".into(), c.unstable_leaves().iter().map(|&u| c.leaf_id(u).to_string()).collect());
    s.basepoints.insert("leftmostBase".into(), base("u0", "seam"));
    s.expectations = expect(&[("validate", true), ("stitching", true), ("admissibility", true), ("leftmost", true)]);
    s
}

pub fn skew_scene(n: usize) -> Scene {
    let c = skew_complex(n).complex;
    let mut s = bare(&format!("skew{n}"), &c);
    s.skew = Some(SkewParams { n });
    s.transversals.insert("main".into(), c.unstable_leaves().iter().map(|&u| c.leaf_id(u).to_string()).collect());
    s.basepoints.insert("leftmostBase".into(), base("u1", "s1"));
    s.basepoints.insert("rightmostBase".into(), base("u1", "seam"));
    s.expectations = expect(&[
        ("validate", true),
        ("skew-suite", true),
        ("gaps", true),
        ("flow-section", true),
        ("stitching", true),
        ("admissibility", true),
    ]);
    s
}

pub fn branch1_scene() -> Scene {
    let mut s = bare("branch1", &corpus::branch1());
    s.expectations = expect(&[
        ("validate", true),
        ("flow-circles-differ", true),
        ("admissibility", true),
        ("stitching", true),
        ("special-support", true),
    ]);
    s
}

pub fn fig20_scene() -> Scene {
    use corpus::fig20_roles as r;
    let c = corpus::fig20();
    let mut s = bare("fig20", &c);
    let ts = c.leaf_by_id(r::TRANSVERSAL).expect("transversal leaf");
    s.transversals.insert("main".into(), c.crossed_by(ts).iter().map(|&u| c.leaf_id(u).to_string()).collect());
    s.basepoints.insert("leftmostBase".into(), base(r::LEFT_FIBER, r::LEFT_MARKER));
    s.basepoints.insert("rightmostBase".into(), base(r::RIGHT_FIBER, r::RIGHT_MARKER));
    s.expectations = expect(&[
        ("validate", true),
        ("leftmost-crosses-seam", true),
        ("cross", true),
        ("flow-circles-differ", true),
        ("cylinder", true),
        ("admissibility", true),
        ("special-support", true),
    ]);
    s
}

pub fn hyp1_scene(windows: &[usize]) -> Scene {
    let seed = hyp1_seed();
    let depth = windows.iter().copied().max().unwrap_or(4);
    let r = realize(&seed, depth).expect("hyperbolic cross realizes");
    let mut s = bare("hyp1", &r.complex);
    s.dynamics = Some(DynamicsSpec { seed, windows: windows.to_vec() });
    s.basepoints.insert("leftmostBase".into(), base("lu", "ls"));
    s.expectations = expect(&[("validate", true), ("dynamics", true), ("admissibility", true)]);
    s
}

/// A product grid plus a short unstable chord `v` that is declared to cross
/// `s0` although their ends do not link.
pub fn linking_violation_scene() -> Scene {
    let mut b = ChordBuilder::new();
    b.leaf("s0", Family::Stable, [3, 0, 0], [1, 0, 0]).leaf("u0", Family::Unstable, [2, 0, 0], [0, 0, 0]);
    b.leaf("v", Family::Unstable, [0, 1, 0], [0, 2, 0]);
    let mut raw = b.build(Designation::Trivial).to_raw();
    raw.crossings.push(RawCrossing { id: "s0xv".into(), stable: "s0".into(), unstable: "v".into() });
    for l in raw.leaves.iter_mut().filter(|l| l.id == "s0" || l.id == "v") {
        l.crossings.push("s0xv".into());
    }
    let mut s = bare("linking-violation", &Complex::from_raw(&raw).expect("identifiers resolve"));
    s.expectations = expect(&[("validate", false)]);
    s
}

/// The scenes shipped with the crate, by file stem.
pub fn corpus_scenes() -> Vec<(String, Scene)> {
    vec![
        ("triv3".into(), triv_scene(3, 3)),
        ("skew".into(), skew_scene(6)),
        ("branch1".into(), branch1_scene()),
        ("fig20".into(), fig20_scene()),
        ("hyp1".into(), hyp1_scene(&[4, 6])),
        ("linking-violation".into(), linking_violation_scene()),
    ]
}
