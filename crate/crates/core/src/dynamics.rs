//! Periodic complexes with a structure-preserving relabeling `g`, their
//! windowed realizations, and fixed points of `g` on the ideal boundary and
//! on extremal section families.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corder::{is_conjugate, CircleAction, CircleModel, OrderError};
use crate::einf::{build_cylinder, twist_class, TwistClass};
use crate::fiber::{fiber_index, fiber_points, FiberPoint, Section};
use crate::plane::{validate_complex, ChordBuilder, Complex, Designation, Family, IdealIdx, LeafIdx};
use crate::sections::{extremal_section, Extremal, SectionError};

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("action is inconsistent: {0}")]
    InconsistentAction(String),
    #[error("window too shallow: {0}")]
    WindowTooShallow(String),
    #[error("hypotheses unmet: {0}")]
    HypothesesUnmet(String),
    #[error(transparent)]
    Section(#[from] SectionError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// Ideal point of a template leaf at level `n`: key `[sector, slope*n + offset, 0]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct KeyTemplate {
    pub sector: i64,
    pub slope: i64,
    pub offset: i64,
    pub name: String,
}

impl KeyTemplate {
    pub fn new(sector: i64, slope: i64, offset: i64, name: &str) -> Self {
        KeyTemplate { sector, slope, offset, name: name.to_string() }
    }

    fn key(&self, n: i64) -> [i64; 3] {
        [self.sector, self.slope * n + self.offset, 0]
    }

    fn label(&self, n: i64) -> String {
        if self.slope == 0 {
            self.name.clone()
        } else {
            format!("{}{}", self.name, (self.slope * n + self.offset) * self.slope.signum())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LeafTemplate {
    pub id: String,
    pub family: Family,
    pub neg: KeyTemplate,
    pub pos: KeyTemplate,
    /// Fixed leaves are instantiated once and mapped to themselves.
    #[serde(default = "yes")]
    pub periodic: bool,
}

fn yes() -> bool {
    true
}

/// Seed of a periodic complex: translates `g^n` of the periodic templates
/// for `|n| <= depth`, plus fixed leaves and fixed boundary points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PeriodicComplex {
    pub designation: Designation,
    pub templates: Vec<LeafTemplate>,
    #[serde(default)]
    pub fixed_points: Vec<KeyTemplate>,
    #[serde(default)]
    pub fixed_stable: Option<String>,
    #[serde(default)]
    pub fixed_unstable: Option<String>,
}

/// A windowed realization with the partial action of `g`.
#[derive(Clone, Debug)]
pub struct Realized {
    pub complex: Complex,
    pub depth: usize,
    pub g_leaf: Vec<Option<LeafIdx>>,
    pub g_ideal: Vec<Option<IdealIdx>>,
    /// Translation level of each leaf; `None` for fixed leaves.
    pub level: Vec<Option<i64>>,
    pub fixed_stable: Option<LeafIdx>,
    pub fixed_unstable: Option<LeafIdx>,
    /// Leaves at the window edge, where `g` or its inverse is undefined.
    pub artifacts: Vec<LeafIdx>,
}

fn leaf_name(t: &LeafTemplate, n: i64) -> String {
    if t.periodic {
        format!("{}@{}", t.id, n)
    } else {
        t.id.clone()
    }
}

pub fn realize(pc: &PeriodicComplex, depth: usize) -> Result<Realized, DynamicsError> {
    let d = depth as i64;
    let mut b = ChordBuilder::new();
    for p in &pc.fixed_points {
        b.point(p.key(0), &p.label(0));
    }
    for t in &pc.templates {
        let levels: Vec<i64> = if t.periodic { (-d..=d).collect() } else { vec![0] };
        for n in levels {
            b.leaf(&leaf_name(t, n), t.family, t.neg.key(n), t.pos.key(n));
            b.point(t.neg.key(n), &t.neg.label(n)).point(t.pos.key(n), &t.pos.label(n));
        }
    }
    let complex = b.build(pc.designation);
    let report = validate_complex(&complex);
    if let Some(v) = report.errors().next() {
        return Err(DynamicsError::InconsistentAction(format!("window does not validate: {:?} {:?}", v.kind, v.witness)));
    }

    let nl = complex.leaves.len();
    let mut g_leaf = vec![None; nl];
    let mut level = vec![None; nl];
    let mut artifacts = Vec::new();
    for t in &pc.templates {
        if !t.periodic {
            let l = complex.leaf_by_id(&t.id).expect("fixed leaf instantiated");
            g_leaf[l] = Some(l);
            continue;
        }
        for n in -d..=d {
            let l = complex.leaf_by_id(&leaf_name(t, n)).expect("translate instantiated");
            level[l] = Some(n);
            g_leaf[l] = complex.leaf_by_id(&leaf_name(t, n + 1));
            if n.abs() == d {
                artifacts.push(l);
            }
        }
    }

    let mut g_ideal: Vec<Option<IdealIdx>> = vec![None; complex.ideals.len()];
    for p in &pc.fixed_points {
        let i = complex.ideal_by_id(&p.label(0)).expect("fixed point instantiated");
        g_ideal[i] = Some(i);
    }
    for (l, &gl) in g_leaf.iter().enumerate() {
        let Some(m) = gl else { continue };
        for (a, b) in [(complex.leaves[l].neg, complex.leaves[m].neg), (complex.leaves[l].pos, complex.leaves[m].pos)] {
            match g_ideal[a] {
                Some(prev) if prev != b => {
                    return Err(DynamicsError::InconsistentAction(format!(
                        "ideal point {} maps to both {} and {}",
                        complex.ideal_id(a),
                        complex.ideal_id(prev),
                        complex.ideal_id(b)
                    )))
                }
                _ => g_ideal[a] = Some(b),
            }
        }
    }

    for s in complex.stable_leaves() {
        for u in complex.unstable_leaves() {
            let (Some(gs), Some(gu)) = (g_leaf[s], g_leaf[u]) else { continue };
            if complex.crosses(s, u) != complex.crosses(gs, gu) {
                return Err(DynamicsError::InconsistentAction(format!(
                    "crossing of {} and {} is not preserved",
                    complex.leaf_id(s),
                    complex.leaf_id(u)
                )));
            }
        }
    }
    let mapped: Vec<(IdealIdx, IdealIdx)> =
        g_ideal.iter().enumerate().filter_map(|(p, q)| q.map(|q| (p, q))).collect();
    for (i, &(a, ga)) in mapped.iter().enumerate() {
        for (j, &(b, gb)) in mapped.iter().enumerate().skip(i + 1) {
            for &(c, gc) in &mapped[j + 1..] {
                if complex.triple(a, b, c) != complex.triple(ga, gb, gc) {
                    return Err(DynamicsError::InconsistentAction(format!(
                        "boundary order of {}, {}, {} is not preserved",
                        complex.ideal_id(a),
                        complex.ideal_id(b),
                        complex.ideal_id(c)
                    )));
                }
            }
        }
    }

    let fixed = |id: &Option<String>| id.as_ref().and_then(|s| complex.leaf_by_id(s));
    Ok(Realized {
        fixed_stable: fixed(&pc.fixed_stable),
        fixed_unstable: fixed(&pc.fixed_unstable),
        complex,
        depth,
        g_leaf,
        g_ideal,
        level,
        artifacts,
    })
}

/// The hyperbolic cross `|xy| < 1` with `g = diag(1/2, 2)`: stable leaves
/// `x = +-2^-n` (`sp`, `sn`), unstable leaves `y = +-2^m` (`up`, `un`),
/// and the axes `ls`, `lu` through the fixed crossing.
pub fn hyp1_seed() -> PeriodicComplex {
    let k = KeyTemplate::new;
    let t = |id: &str, family, neg, pos, periodic| LeafTemplate { id: id.into(), family, neg, pos, periodic };
    PeriodicComplex {
        designation: Designation::Trivial,
        templates: vec![
            t("ls", Family::Stable, k(6, 0, 0, "S"), k(2, 0, 0, "N"), false),
            t("lu", Family::Unstable, k(4, 0, 0, "W"), k(0, 0, 0, "E"), false),
            t("sp", Family::Stable, k(7, -1, 0, "QIV"), k(1, 1, 0, "QI"), true),
            t("sn", Family::Stable, k(5, 1, 0, "QIII"), k(3, -1, 0, "QII"), true),
            t("up", Family::Unstable, k(3, -1, 0, "QII"), k(1, 1, 0, "QI"), true),
            t("un", Family::Unstable, k(5, 1, 0, "QIII"), k(7, -1, 0, "QIV"), true),
        ],
        fixed_points: vec![],
        fixed_stable: Some("ls".into()),
        fixed_unstable: Some("lu".into()),
    }
}

pub fn hyp1(depth: usize) -> Realized {
    realize(&hyp1_seed(), depth).expect("hyperbolic cross realizes")
}

/// The skew staircase as a periodic complex: three stable and three
/// unstable templates per step of `f`.
pub fn skew_seed() -> PeriodicComplex {
    let k = KeyTemplate::new;
    let mut templates = Vec::new();
    for r in 0..3 {
        templates.push(LeafTemplate {
            id: format!("s{r}"),
            family: Family::Stable,
            neg: k(0, 3, r - 3, "R"),
            pos: k(2, -3, -r, "L"),
            periodic: true,
        });
        templates.push(LeafTemplate {
            id: format!("u{r}"),
            family: Family::Unstable,
            neg: k(2, -3, 1 - r, "L"),
            pos: k(0, 3, r - 1, "R"),
            periodic: true,
        });
    }
    PeriodicComplex {
        designation: Designation::Skew,
        templates,
        fixed_points: vec![k(1, 0, 0, "zp"), k(3, 0, 0, "zm")],
        fixed_stable: None,
        fixed_unstable: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LocalType {
    Sink,
    Source,
    /// Neighbours are fixed too.
    Neutral,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Drift {
    Toward,
    Away,
    Fixed,
    Unknown,
}

/// Local type of the fixed position `i` on a circle of `n` positions from
/// the one-step displacement of its two neighbours.
fn classify(n: usize, i: usize, fwd: &dyn Fn(usize) -> Option<usize>, back: &dyn Fn(usize) -> Option<usize>) -> LocalType {
    let drifts: Vec<Drift> = [1usize, n - 1]
        .iter()
        .map(|&step| {
            let j = (i + step) % n;
            if j == i {
                return Drift::Fixed;
            }
            let off = |x: usize| if step == 1 { (x + n - i) % n } else { (i + n - x) % n };
            match fwd(j) {
                Some(y) if y == j => Drift::Fixed,
                Some(y) if off(y) > 1 => Drift::Away,
                Some(_) => Drift::Unknown,
                None => match back(j) {
                    Some(y) if off(y) > 1 => Drift::Toward,
                    _ => Drift::Unknown,
                },
            }
        })
        .collect();
    match (drifts[0], drifts[1]) {
        (Drift::Toward, Drift::Toward) => LocalType::Sink,
        (Drift::Away, Drift::Away) => LocalType::Source,
        (Drift::Fixed, Drift::Fixed) => LocalType::Neutral,
        _ => LocalType::Mixed,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPoint {
    pub id: String,
    pub local: LocalType,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedSet {
    /// In cyclic order.
    pub points: Vec<FixedPoint>,
    pub alternating: bool,
    pub degenerate: bool,
}

impl FixedSet {
    fn new(points: Vec<FixedPoint>, circle_len: usize) -> Self {
        let alternating = points.len().is_multiple_of(2)
            && points.iter().zip(points.iter().cycle().skip(1)).all(|(a, b)| {
                matches!((a.local, b.local), (LocalType::Sink, LocalType::Source) | (LocalType::Source, LocalType::Sink))
            });
        let degenerate = points.len() == circle_len;
        FixedSet { points, alternating, degenerate }
    }

    pub fn count(&self, t: LocalType) -> usize {
        self.points.iter().filter(|p| p.local == t).count()
    }
}

fn inverse(map: &[Option<usize>]) -> Vec<Option<usize>> {
    let mut inv = vec![None; map.len()];
    for (a, b) in map.iter().enumerate() {
        if let Some(b) = b {
            inv[*b] = Some(a);
        }
    }
    inv
}

pub fn boundary_fixed_points(r: &Realized) -> FixedSet {
    let c = &r.complex;
    let n = c.boundary.len();
    let at = |pos: usize| c.boundary[pos];
    let inv = inverse(&r.g_ideal);
    let fwd = |pos: usize| r.g_ideal[at(pos)].map(|q| c.bpos(q));
    let back = |pos: usize| inv[at(pos)].map(|q| c.bpos(q));
    let points = (0..n)
        .filter(|&pos| fwd(pos) == Some(pos))
        .map(|pos| FixedPoint { id: c.ideal_id(at(pos)).to_string(), local: classify(n, pos, &fwd, &back) })
        .collect();
    FixedSet::new(points, n)
}

/// Image of a fiber point on `u` under `g`, on the fiber over `g(u)`.
fn push_point(r: &Realized, p: FiberPoint) -> Option<FiberPoint> {
    match p {
        FiberPoint::Seam => Some(FiberPoint::Seam),
        FiberPoint::Crossing(s) => r.g_leaf[s].map(FiberPoint::Crossing),
    }
}

/// `g` applied to a section, on fibers where it is defined.
pub fn push_section(r: &Realized, s: &Section) -> Section {
    let mut out = Section::new(format!("g.{}", s.tag));
    for (&u, &v) in &s.values {
        if let (Some(gu), Some(gv)) = (r.g_leaf[u], push_point(r, v)) {
            out.values.insert(gu, gv);
        }
    }
    out
}

impl Realized {
    /// Leaves strictly inside the window.
    pub fn interior(&self, l: LeafIdx) -> bool {
        self.level[l].is_none_or(|n| n.unsigned_abs() < self.depth as u64)
    }

    pub fn interior_fibers(&self) -> Vec<LeafIdx> {
        self.complex.unstable_leaves().into_iter().filter(|&u| self.interior(u)).collect()
    }

    pub fn fixed_crossings(&self) -> Vec<String> {
        self.complex
            .crossings
            .iter()
            .filter(|x| self.g_leaf[x.stable] == Some(x.stable) && self.g_leaf[x.unstable] == Some(x.unstable))
            .map(|x| x.id.clone())
            .collect()
    }

    /// Whether `s` and `g(s)` agree on interior fibers mapped to interior
    /// fibers.
    pub fn section_fixed(&self, s: &Section) -> bool {
        self.interior_fibers().into_iter().all(|u| match self.g_leaf[u] {
            Some(gu) if self.interior(gu) => {
                let v = s.get(u).and_then(|v| push_point(self, v));
                v.is_some() && v == s.get(gu)
            }
            _ => true,
        })
    }

    /// Unstable leaves not crossing the fixed stable leaf that make a
    /// perfect fit with it.
    pub fn improper_fits(&self) -> Vec<String> {
        let Some(ls) = self.fixed_stable else { return Vec::new() };
        let c = &self.complex;
        c.fitting_leaves(ls)
            .into_iter()
            .filter(|&u| !c.crosses(ls, u))
            .map(|u| c.leaf_id(u).to_string())
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallMarker {
    pub stable: String,
    pub side: String,
    pub twist: Option<TwistClass>,
}

/// Stable leaves crossing only the fixed unstable leaf, on each side of
/// the fixed stable leaf, next to a longer trace on the same side.
pub fn small_markers(r: &Realized) -> Result<Vec<SmallMarker>, DynamicsError> {
    let (Some(ls), Some(lu)) = (r.fixed_stable, r.fixed_unstable) else { return Ok(Vec::new()) };
    let c = &r.complex;
    let mid = c.index_along(lu, ls).ok_or_else(|| DynamicsError::HypothesesUnmet("fixed leaves do not cross".into()))?;
    let cyl = build_cylinder(c, &c.crossed_by(ls)).ok();
    let mut out = Vec::new();
    for (i, s) in c.crossed_by(lu).into_iter().enumerate() {
        if s == ls || c.crossed_by(s) != [lu] {
            continue;
        }
        let twist = cyl.as_ref().and_then(|cyl| twist_class(c, cyl, s).ok());
        let side = if i < mid { "left" } else { "right" };
        out.push(SmallMarker { stable: c.leaf_id(s).to_string(), side: side.into(), twist });
    }
    // A small marker only witnesses shrinking if a larger trace on the same
    // side contains it.
    let along = c.crossed_by(lu);
    out.retain(|m| {
        let s = c.leaf_by_id(&m.stable).expect("marker id");
        let i = along.iter().position(|&t| t == s).expect("marker crosses the fixed leaf");
        along.iter().enumerate().any(|(j, &t)| {
            t != s && t != ls && (j < mid) == (i < mid) && c.crossed_by(t).len() > 1
        })
    });
    for side in ["left", "right"] {
        if !out.iter().any(|m| m.side == side) {
            return Err(DynamicsError::WindowTooShallow(format!("no small marker on the {side} of the fixed stable leaf")));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionFixedPoints {
    pub family: Extremal,
    pub fixed: FixedSet,
    /// Whether `g(s_x) = s_{g(x)}` on interior fibers for every basepoint.
    pub equivariant: bool,
    pub small_markers: Vec<SmallMarker>,
}

/// Fixed points of `g` on the family of extremal sections based at the
/// fiber over the fixed unstable leaf.
pub fn section_fixed_points(r: &Realized, e: Extremal) -> Result<SectionFixedPoints, DynamicsError> {
    let c = &r.complex;
    let base = match r.fixed_unstable {
        Some(lu) => lu,
        None => {
            // Without fixed data the basepoints are the interior fibers
            // mapped to themselves; fall back to every fiber.
            return section_fixed_points_all(r, e);
        }
    };
    let markers = small_markers(r)?;
    let pts = fiber_points(c, base);
    let n = pts.len();
    let secs: Vec<Section> = pts.iter().map(|&p| extremal_section(c, base, p, e)).collect::<Result<_, _>>()?;
    let pos = |p: FiberPoint| fiber_index(c, base, p);
    let fwd = |i: usize| push_point(r, pts[i]).and_then(pos);
    let back = |i: usize| match pts[i] {
        FiberPoint::Seam => Some(n - 1),
        FiberPoint::Crossing(s) => (0..c.leaves.len()).find(|&t| r.g_leaf[t] == Some(s)).and_then(|t| pos(FiberPoint::Crossing(t))),
    };
    let mut equivariant = true;
    for i in 0..n {
        if let Some(j) = fwd(i) {
            let pushed = push_section(r, &secs[i]);
            let ok = r
                .interior_fibers()
                .into_iter()
                .all(|u| !r.interior(u) || pushed.get(u).is_none() || pushed.get(u) == secs[j].get(u));
            equivariant &= ok;
        }
    }
    let points = (0..n)
        .filter(|&i| r.section_fixed(&secs[i]))
        .map(|i| FixedPoint { id: secs[i].tag.clone(), local: classify(n, i, &fwd, &back) })
        .collect();
    Ok(SectionFixedPoints { family: e, fixed: FixedSet::new(points, n), equivariant, small_markers: markers })
}

fn section_fixed_points_all(r: &Realized, e: Extremal) -> Result<SectionFixedPoints, DynamicsError> {
    let c = &r.complex;
    let mut fixed = Vec::new();
    let mut seen: Vec<Section> = Vec::new();
    for u in r.interior_fibers() {
        for p in fiber_points(c, u) {
            let s = extremal_section(c, u, p, e)?;
            if !seen.contains(&s) && r.section_fixed(&s) {
                fixed.push(FixedPoint { id: s.tag.clone(), local: LocalType::Neutral });
            }
            if !seen.contains(&s) {
                seen.push(s);
            }
        }
    }
    let len = seen.len();
    Ok(SectionFixedPoints { family: e, fixed: FixedSet::new(fixed, len), equivariant: true, small_markers: Vec::new() })
}

/// Number of interior fibers where `g^-n(s_x)` differs from the section
/// based at the seam, for `n = 0..=steps` while `g^-n(x)` is in the window.
pub fn convergence_profile(r: &Realized, x: FiberPoint, steps: usize) -> Result<Vec<usize>, DynamicsError> {
    let c = &r.complex;
    let base = r.fixed_unstable.ok_or_else(|| DynamicsError::HypothesesUnmet("no fixed unstable leaf".into()))?;
    let target = extremal_section(c, base, FiberPoint::Seam, Extremal::Leftmost)?;
    let inv = inverse(&r.g_leaf);
    let mut out = Vec::new();
    let mut p = Some(x);
    for _ in 0..=steps {
        let Some(q) = p else { break };
        let s = extremal_section(c, base, q, Extremal::Leftmost)?;
        out.push(r.interior_fibers().into_iter().filter(|&u| s.get(u) != target.get(u)).count());
        p = match q {
            FiberPoint::Seam => Some(FiberPoint::Seam),
            FiberPoint::Crossing(t) => inv[t].map(FiberPoint::Crossing),
        };
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct NonconjugacyReport {
    pub depth: usize,
    pub fixed_crossing: String,
    pub boundary: FixedSet,
    pub leftmost: SectionFixedPoints,
    /// Whether the fixed-point skeletons of the two actions are conjugate.
    pub conjugate: bool,
    pub conclusion: String,
}

/// Circle of fixed points alternating with the arcs between them, on which
/// `g` acts trivially.
fn skeleton(fixed: &FixedSet) -> CircleAction {
    let mut pts = Vec::new();
    for (i, p) in fixed.points.iter().enumerate() {
        pts.push(format!("{}:{:?}", p.id, p.local));
        pts.push(format!("arc{i}"));
    }
    let n = pts.len();
    CircleAction { circle: CircleModel::new(pts), generators: BTreeMap::from([("g".to_string(), (0..n).collect())]) }
}

pub fn nonconjugacy_report(r: &Realized) -> Result<NonconjugacyReport, DynamicsError> {
    let fixed = r.fixed_crossings();
    if fixed.len() != 1 {
        return Err(DynamicsError::HypothesesUnmet(format!("{} fixed crossings in the window", fixed.len())));
    }
    let boundary = boundary_fixed_points(r);
    let leftmost = section_fixed_points(r, Extremal::Leftmost)?;
    let conjugate = is_conjugate(&skeleton(&boundary), &skeleton(&leftmost.fixed))?;
    let conclusion = format!(
        "{} fixed points on the ideal boundary, {} on the leftmost family: {}",
        boundary.points.len(),
        leftmost.fixed.points.len(),
        if conjugate { "conjugate" } else { "not conjugate" }
    );
    Ok(NonconjugacyReport { depth: r.depth, fixed_crossing: fixed[0].clone(), boundary, leftmost, conjugate, conclusion })
}

/// Ideal points moved by `g` whose orbit stays in the window, by id.
pub fn moved_points(r: &Realized) -> BTreeSet<String> {
    (0..r.complex.ideals.len())
        .filter(|&p| r.g_ideal[p].is_some_and(|q| q != p))
        .map(|p| r.complex.ideal_id(p).to_string())
        .collect()
}
