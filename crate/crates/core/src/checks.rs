//! Named whole-complex checks shared by the command line and the
//! acceptance suite.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::{json, Value};

use crate::einf::{build_cylinder, stitching_check_cylinder, transversal_of, twist_classes};
use crate::fiber::{fiber_points, FiberPoint, Section};
use crate::plane::{maximal_oriented_chains, Complex, Family, LeafIdx, LeafSpace, Sign};
use crate::sections::{crosses_seam, extremal_section, leftmost_section, rightmost_section, sections_cross, Extremal};
use crate::shadows::{admissibility_faults, flow_section, gap_structure, shadow, special_support_oracle};

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub pass: bool,
    pub witnesses: Vec<String>,
    pub details: Value,
}

impl Outcome {
    fn new(pass: bool, witnesses: Vec<String>, details: Value) -> Self {
        Outcome { pass, witnesses, details }
    }
}

/// A basepoint: a fiber and a point on it.
#[derive(Clone, Copy, Debug)]
pub struct Basepoint {
    pub fiber: LeafIdx,
    pub point: FiberPoint,
}

impl Basepoint {
    pub fn parse(c: &Complex, fiber: &str, point: &str) -> Option<Basepoint> {
        let f = c.leaf_by_id(fiber)?;
        let p = if point == "seam" {
            FiberPoint::Seam
        } else {
            let s = c.leaf_by_id(point)?;
            c.crosses(s, f).then_some(FiberPoint::Crossing(s))?
        };
        Some(Basepoint { fiber: f, point: p })
    }
}

fn section_json(c: &Complex, s: &Section) -> Value {
    serde_json::to_value(s.to_json(c)).expect("sections serialize")
}

/// Some ideal point `x` whose forwards flow section is not the backwards
/// flow section of any ideal point.
pub fn flow_circles_differ(c: &Complex) -> Outcome {
    let mut witnesses = Vec::new();
    let mut plus = Vec::new();
    for z in 0..c.ideals.len() {
        match flow_section(c, z, Sign::Pos) {
            Ok(s) => plus.push(s),
            Err(e) => witnesses.push(format!("sigma+ of {}: {e}", c.ideal_id(z))),
        }
    }
    let mut found = Vec::new();
    for x in 0..c.ideals.len() {
        match flow_section(c, x, Sign::Neg) {
            Ok(s) if !plus.contains(&s) => found.push(c.ideal_id(x).to_string()),
            Ok(_) => {}
            Err(e) => witnesses.push(format!("sigma- of {}: {e}", c.ideal_id(x))),
        }
    }
    let longest = maximal_oriented_chains(c).iter().map(|ch| ch.leaves.len()).max().unwrap_or(0);
    Outcome::new(
        !found.is_empty() && witnesses.is_empty(),
        witnesses,
        json!({ "unmatched": found, "idealPoints": c.ideals.len(), "longestChain": longest }),
    )
}

/// Leftmost section from `left` and rightmost from `right` both cross the
/// seam, cross each other along `transversal`, and are admissible.
pub fn extremal_sections_cross(c: &Complex, left: Basepoint, right: Basepoint, transversal: &[LeafIdx]) -> Outcome {
    let mut witnesses = Vec::new();
    let l = match leftmost_section(c, left.fiber, left.point) {
        Ok(s) => s,
        Err(e) => return Outcome::new(false, vec![e.to_string()], Value::Null),
    };
    let r = match rightmost_section(c, right.fiber, right.point) {
        Ok(s) => s,
        Err(e) => return Outcome::new(false, vec![e.to_string()], Value::Null),
    };
    let ls = crosses_seam(c, &l, transversal);
    let rs = crosses_seam(c, &r, transversal);
    let cross = sections_cross(c, &l, &r, transversal);
    let lf = admissibility_faults(c, &l);
    let rf = admissibility_faults(c, &r);
    if ls.crossings.is_empty() {
        witnesses.push("leftmost section does not cross the seam".into());
    }
    if rs.crossings.is_empty() {
        witnesses.push("rightmost section does not cross the seam".into());
    }
    if cross.is_none() {
        witnesses.push("sections do not cross".into());
    }
    witnesses.extend(lf.iter().chain(&rf).map(|f| format!("{f:?}")));
    Outcome::new(
        witnesses.is_empty(),
        witnesses,
        json!({
            "leftmost": section_json(c, &l),
            "rightmost": section_json(c, &r),
            "leftmostSeam": ls,
            "rightmostSeam": rs,
            "cross": cross,
        }),
    )
}

/// Seam crossings of the leftmost section alone.
pub fn leftmost_crosses_seam(c: &Complex, left: Basepoint, transversal: &[LeafIdx]) -> Outcome {
    match leftmost_section(c, left.fiber, left.point) {
        Ok(s) => {
            let rep = crosses_seam(c, &s, transversal);
            Outcome::new(!rep.crossings.is_empty(), vec![], json!({ "seam": rep, "section": section_json(c, &s) }))
        }
        Err(e) => Outcome::new(false, vec![e.to_string()], Value::Null),
    }
}

/// Every flow section and every extremal section from every basepoint is
/// admissible.
pub fn admissibility(c: &Complex) -> Outcome {
    let mut witnesses = Vec::new();
    let mut examined = 0usize;
    let mut ambiguous = Vec::new();
    for z in 0..c.ideals.len() {
        for sign in [Sign::Pos, Sign::Neg] {
            match flow_section(c, z, sign) {
                Ok(s) => {
                    examined += 1;
                    for f in admissibility_faults(c, &s) {
                        witnesses.push(format!("{}: {f:?}", s.tag));
                    }
                }
                Err(e) => ambiguous.push(e.to_string()),
            }
        }
    }
    for u in c.unstable_leaves() {
        for p in fiber_points(c, u) {
            for e in [Extremal::Leftmost, Extremal::Rightmost] {
                match extremal_section(c, u, p, e) {
                    Ok(s) => {
                        examined += 1;
                        for f in admissibility_faults(c, &s) {
                            witnesses.push(format!("{}: {f:?}", s.tag));
                        }
                    }
                    Err(err) => witnesses.push(err.to_string()),
                }
            }
        }
    }
    witnesses.extend(ambiguous.iter().cloned());
    Outcome::new(witnesses.is_empty(), witnesses, json!({ "examined": examined, "ambiguous": ambiguous.len() }))
}

/// Stitching clauses on the cylinder over every stable leaf's transversal.
pub fn stitching(c: &Complex) -> Outcome {
    let mut witnesses = Vec::new();
    let mut cylinders = 0;
    for s in c.stable_leaves() {
        let t = transversal_of(c, s);
        match build_cylinder(c, &t) {
            Ok(cyl) => {
                cylinders += 1;
                let r = stitching_check_cylinder(c, &cyl);
                if !r.ok() {
                    witnesses.push(format!("cylinder over {}: {:?}", c.leaf_id(s), r.witnesses));
                }
            }
            Err(e) => witnesses.push(format!("cylinder over {}: {e}", c.leaf_id(s))),
        }
    }
    Outcome::new(witnesses.is_empty(), witnesses, json!({ "cylinders": cylinders }))
}

/// Stitching and twist classes on one transversal.
pub fn cylinder(c: &Complex, transversal: &[LeafIdx]) -> Outcome {
    match build_cylinder(c, transversal) {
        Ok(cyl) => {
            let r = stitching_check_cylinder(c, &cyl);
            let twists: Vec<(String, String)> = twist_classes(c, &cyl)
                .into_iter()
                .map(|(s, k)| (c.leaf_id(s).to_string(), format!("{k:?}")))
                .collect();
            Outcome::new(r.ok(), r.witnesses.clone(), json!({ "stitching": r, "twists": twists }))
        }
        Err(e) => Outcome::new(false, vec![e.to_string()], Value::Null),
    }
}

/// The leftmost section based at the seam of `lambda` follows the frontier
/// leaves approached from the left above and from the right below.
pub fn special_support_at(c: &Complex, lambda: LeafIdx) -> Outcome {
    let oracle = match special_support_oracle(c, lambda) {
        Ok(o) => o,
        Err(e) => return Outcome::new(false, vec![e.to_string()], Value::Null),
    };
    let sec = match leftmost_section(c, lambda, FiberPoint::Seam) {
        Ok(s) => s,
        Err(e) => return Outcome::new(false, vec![e.to_string()], Value::Null),
    };
    let expected = oracle.leftmost_support();
    let ls = LeafSpace::unstable(c);
    let comparable: BTreeSet<LeafIdx> = ls.above(lambda).into_iter().chain(ls.below(lambda)).collect();
    let mut witnesses = Vec::new();
    let mut got = BTreeSet::new();
    for &mu in &comparable {
        let v = sec.get(mu);
        if let Some(FiberPoint::Crossing(s)) = v {
            got.insert(s);
        }
        let hits: Vec<LeafIdx> = c.crossed_by(mu).into_iter().filter(|s| expected.contains(s)).collect();
        let want = match hits.as_slice() {
            [] => Some(FiberPoint::Seam),
            [s] => Some(FiberPoint::Crossing(*s)),
            _ => None,
        };
        if want.is_none() || v != want {
            witnesses.push(format!(
                "{}: section {} oracle {}",
                c.leaf_id(mu),
                v.map_or("undefined".into(), |p| p.label(c, mu)),
                want.map_or("ambiguous".into(), |p| p.label(c, mu))
            ));
        }
    }
    if got != expected {
        witnesses.push(format!(
            "support {:?} oracle {:?}",
            got.iter().map(|&s| c.leaf_id(s)).collect::<Vec<_>>(),
            expected.iter().map(|&s| c.leaf_id(s)).collect::<Vec<_>>()
        ));
    }
    let ids = |s: &BTreeSet<LeafIdx>| s.iter().map(|&x| c.leaf_id(x).to_string()).collect::<Vec<_>>();
    Outcome::new(
        witnesses.is_empty(),
        witnesses,
        json!({
            "lambda": c.leaf_id(lambda),
            "xLu": ids(&oracle.x_lu), "xRu": ids(&oracle.x_ru), "xLd": ids(&oracle.x_ld), "xRd": ids(&oracle.x_rd),
            "notes": oracle.notes,
            "comparable": comparable.len(),
        }),
    )
}

/// [`special_support_at`] for every unstable leaf.
pub fn special_support(c: &Complex) -> Outcome {
    let mut witnesses = Vec::new();
    let mut nontrivial = Vec::new();
    for u in c.unstable_leaves() {
        let o = special_support_at(c, u);
        if !o.pass {
            witnesses.extend(o.witnesses.iter().map(|w| format!("lambda {}: {w}", c.leaf_id(u))));
        }
        let both = ["xLu", "xRd"].iter().all(|k| o.details[k].as_array().is_some_and(|a| !a.is_empty()));
        if both {
            nontrivial.push(c.leaf_id(u).to_string());
        }
    }
    Outcome::new(witnesses.is_empty(), witnesses, json!({ "bothClassesNonempty": nontrivial }))
}

/// Shadow ray lengths and gap structure of every unstable leaf.
pub fn shadows_and_gaps(c: &Complex) -> Outcome {
    let mut witnesses = Vec::new();
    let mut rows = Vec::new();
    for u in c.unstable_leaves() {
        for sign in [Sign::Pos, Sign::Neg] {
            match (shadow(c, u, sign), gap_structure(c, u, sign)) {
                (Ok(sh), Ok(g)) => {
                    if let Err(e) = g.check_partition(c) {
                        witnesses.push(format!("{}{}: {e}", c.leaf_id(u), sign.symbol()));
                    }
                    rows.push(json!({
                        "leaf": c.leaf_id(u),
                        "sign": sign.symbol().to_string(),
                        "rays": sh.rays.iter().map(|r| r.beyond.len()).collect::<Vec<_>>(),
                        "nonmarkerGap": g.nonmarker_gap.iter().map(|&p| c.ideal_id(p)).collect::<Vec<_>>(),
                        "markerGaps": g.marker_gaps.len(),
                        "injective": g.injective.len(),
                        "overlaps": g.overlaps.iter().map(|&p| c.ideal_id(p)).collect::<Vec<_>>(),
                    }));
                }
                (Err(e), _) | (_, Err(e)) => witnesses.push(e.to_string()),
            }
        }
    }
    Outcome::new(witnesses.is_empty(), witnesses, Value::Array(rows))
}

/// Flow sections of every ideal point, both signs.
pub fn flow_sections(c: &Complex) -> Outcome {
    let mut witnesses = Vec::new();
    let mut rows = Vec::new();
    for z in 0..c.ideals.len() {
        for sign in [Sign::Pos, Sign::Neg] {
            match flow_section(c, z, sign) {
                Ok(s) => rows.push(json!({
                    "point": c.ideal_id(z),
                    "sign": sign.symbol().to_string(),
                    "support": s.support().iter().map(|&l| c.leaf_id(l)).collect::<Vec<_>>(),
                })),
                Err(e) => witnesses.push(e.to_string()),
            }
        }
    }
    Outcome::new(witnesses.is_empty(), witnesses, Value::Array(rows))
}

/// The extremal section from one basepoint, with its admissibility.
pub fn extremal(c: &Complex, b: Basepoint, e: Extremal) -> Outcome {
    match extremal_section(c, b.fiber, b.point, e) {
        Ok(s) => {
            let faults: Vec<String> = admissibility_faults(c, &s).iter().map(|f| format!("{f:?}")).collect();
            Outcome::new(faults.is_empty(), faults, section_json(c, &s))
        }
        Err(err) => Outcome::new(false, vec![err.to_string()], Value::Null),
    }
}

/// Stable leaves of a family, as ids; used by scene expectations.
pub fn stable_ids(c: &Complex) -> Vec<String> {
    c.leaves_of(Family::Stable).map(|l| c.leaf_id(l).to_string()).collect()
}
