//! The skew strip `{x - 1 < y < x}` with vertical stable and horizontal
//! unstable leaves, truncated to a staircase of perfect fits.
//!
//! Stable leaf `s{i}` is `x = i/3`, unstable leaf `u{k}` is `y = (k-1)/3`.
//! The lower boundary line carries stable bottoms and unstable right ends
//! (`R{m}` at `y = m/3`), the upper line carries stable tops and unstable
//! left ends (`L{m}` at `x = m/3`). The one-step-up map is `a -> a + 1`,
//! i.e. index `+3`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Rational64;
use serde::Serialize;

use crate::fiber::{fiber_points, FiberPoint, Section};
use crate::plane::{ChordBuilder, Complex, Designation, Family, IdealIdx, LeafIdx, Sign};
use crate::sections::{family, leftmost_section, rightmost_section, section_set_compare, Extremal};
use crate::shadows::{flow_section, gap_structure, shadow};

/// Index shift realizing `a -> a + 1` on both leaf parameters.
pub const STEP: i64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StepMap {
    pub shift: i64,
}

impl StepMap {
    pub fn apply(&self, a: Rational64) -> Rational64 {
        a + Rational64::from_integer(self.shift / STEP)
    }

    pub fn apply_index(&self, i: i64) -> i64 {
        i + self.shift
    }
}

#[derive(Clone, Debug)]
pub struct SkewModel {
    pub n: usize,
    pub stable_params: Vec<Rational64>,
    pub unstable_params: Vec<Rational64>,
    pub step: StepMap,
    pub complex: Complex,
}

fn key_r(m: i64) -> [i64; 3] {
    [0, m, 0]
}

fn key_l(m: i64) -> [i64; 3] {
    [2, -m, 0]
}

/// Staircase with `n` stable and `n` unstable leaves. Panics if `n < 2`.
pub fn skew_complex(n: usize) -> SkewModel {
    assert!(n >= 2, "skew staircase needs at least two leaves per family");
    let mut b = ChordBuilder::new();
    b.point([1, 0, 0], "zp").point([3, 0, 0], "zm");
    for i in 0..n as i64 {
        b.leaf(&format!("s{i}"), Family::Stable, key_r(i - STEP), key_l(i));
        b.point(key_r(i - STEP), &format!("R{}", i - STEP)).point(key_l(i), &format!("L{i}"));
    }
    for k in 0..n as i64 {
        b.leaf(&format!("u{k}"), Family::Unstable, key_l(k - 1), key_r(k - 1));
        b.point(key_l(k - 1), &format!("L{}", k - 1)).point(key_r(k - 1), &format!("R{}", k - 1));
    }
    let third = |v: i64| Rational64::new(v, STEP);
    SkewModel {
        n,
        stable_params: (0..n as i64).map(third).collect(),
        unstable_params: (0..n as i64).map(|k| third(k - 1)).collect(),
        step: StepMap { shift: STEP },
        complex: b.build(Designation::Skew),
    }
}

impl SkewModel {
    pub fn stable(&self, i: i64) -> Option<LeafIdx> {
        self.complex.leaf_by_id(&format!("s{i}"))
    }

    pub fn unstable(&self, k: i64) -> Option<LeafIdx> {
        self.complex.leaf_by_id(&format!("u{k}"))
    }

    /// Index of a leaf in its family.
    pub fn index(&self, l: LeafIdx) -> i64 {
        self.complex.leaf_id(l)[1..].parse().expect("skew leaf ids carry an index")
    }

    /// Image of a leaf under the one-step-up map, if inside the window.
    pub fn f_leaf(&self, l: LeafIdx) -> Option<LeafIdx> {
        let j = self.step.apply_index(self.index(l));
        match self.complex.leaves[l].family {
            Family::Stable => self.stable(j),
            Family::Unstable => self.unstable(j),
        }
    }

    /// Fibers crossing two stable leaves, both of which cross two fibers.
    pub fn full_fibers(&self) -> Vec<LeafIdx> {
        (1..self.n as i64 - 1).filter_map(|k| self.unstable(k)).collect()
    }
}

/// Endpoint swap of every leaf in `fam`, fixing `zp` and `zm`; a partial
/// permutation of the window's ideal points.
pub fn involution(model: &SkewModel, fam: Family) -> BTreeMap<IdealIdx, IdealIdx> {
    let c = &model.complex;
    let mut map = BTreeMap::new();
    for z in ["zp", "zm"] {
        let p = c.ideal_by_id(z).expect("skew window has both ends of the strip");
        map.insert(p, p);
    }
    for l in c.leaves_of(fam) {
        let (a, b) = (c.leaves[l].neg, c.leaves[l].pos);
        map.insert(a, b);
        map.insert(b, a);
    }
    map
}

#[derive(Clone, Debug, Serialize)]
pub struct SkewCheck {
    pub name: String,
    pub pass: bool,
    pub examined: usize,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SkewReport {
    pub n: usize,
    pub checks: Vec<SkewCheck>,
}

impl SkewReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&SkewCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Tally {
    name: &'static str,
    examined: usize,
    witnesses: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, examined: 0, witnesses: Vec::new() }
    }

    fn expect(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.examined += 1;
        if !ok {
            self.witnesses.push(witness());
        }
    }

    fn finish(self) -> SkewCheck {
        SkewCheck { name: self.name.into(), pass: self.witnesses.is_empty(), examined: self.examined, witnesses: self.witnesses }
    }
}

/// Section following one marker and the seam elsewhere.
fn marker_section(c: &Complex, s: Option<LeafIdx>) -> BTreeMap<LeafIdx, FiberPoint> {
    c.leaves_of(Family::Unstable)
        .map(|u| match s {
            Some(s) if c.crosses(s, u) => (u, FiberPoint::Crossing(s)),
            _ => (u, FiberPoint::Seam),
        })
        .collect()
}

/// Section following every stable leaf with index `= class (mod 3)`.
fn orbit_section(m: &SkewModel, class: i64) -> BTreeMap<LeafIdx, FiberPoint> {
    let c = &m.complex;
    c.leaves_of(Family::Unstable)
        .map(|u| {
            let hit = c.crossed_by(u).into_iter().find(|&s| (m.index(s) - class).rem_euclid(STEP) == 0);
            (u, hit.map_or(FiberPoint::Seam, FiberPoint::Crossing))
        })
        .collect()
}

fn check_leftmost(m: &SkewModel) -> SkewCheck {
    let c = &m.complex;
    let mut t = Tally::new("leftmost");
    let fibers = c.unstable_leaves();
    for &u in &fibers {
        for p in fiber_points(c, u) {
            let got = leftmost_section(c, u, p);
            let want = marker_section(c, p.stable());
            t.expect(got.as_ref().is_ok_and(|s| s.values == want), || {
                format!("leftmost from {} on {} is not marker plus seam", p.label(c, u), c.leaf_id(u))
            });
        }
    }
    match family(c, &fibers, Extremal::Leftmost) {
        Ok(fam) => {
            t.expect(fam.len() == c.stable_leaves().len() + 1, || {
                format!("leftmost family has {} members", fam.len())
            });
            let seam = marker_section(c, None);
            t.expect(fam.iter().any(|s| s.values == seam), || "seam section missing".into());
            let image: BTreeMap<LeafIdx, FiberPoint> = seam
                .iter()
                .filter_map(|(&u, &v)| Some((m.f_leaf(u)?, v.stable().and_then(|s| m.f_leaf(s)).map_or(FiberPoint::Seam, FiberPoint::Crossing))))
                .collect();
            t.expect(image.iter().all(|(u, v)| seam.get(u) == Some(v)), || "seam section moved by f".into());
        }
        Err(e) => t.expect(false, || e.to_string()),
    }
    t.finish()
}

fn check_rightmost(m: &SkewModel) -> SkewCheck {
    let c = &m.complex;
    let mut t = Tally::new("rightmost");
    let fibers = c.unstable_leaves();
    for &u in &fibers {
        for p in fiber_points(c, u) {
            let class = match p {
                FiberPoint::Crossing(s) => m.index(s),
                FiberPoint::Seam => m.index(u) + 2,
            };
            let got = rightmost_section(c, u, p);
            let want = orbit_section(m, class);
            t.expect(got.as_ref().is_ok_and(|s| s.values == want), || {
                format!("rightmost from {} on {} is not an f-orbit", p.label(c, u), c.leaf_id(u))
            });
        }
    }
    let Ok(fam) = family(c, &fibers, Extremal::Rightmost) else {
        t.expect(false, || "rightmost family failed".into());
        return t.finish();
    };
    // Nonempty supports correspond to f-orbits of stable leaves.
    let orbits: BTreeSet<i64> = c.stable_leaves().iter().map(|&s| m.index(s).rem_euclid(STEP)).collect();
    let supports: Vec<BTreeSet<i64>> = fam
        .iter()
        .map(|s| s.support().iter().map(|&x| m.index(x).rem_euclid(STEP)).collect())
        .filter(|s: &BTreeSet<i64>| !s.is_empty())
        .collect();
    t.expect(supports.iter().all(|s| s.len() == 1), || "a rightmost section meets two f-orbits".into());
    let classes: BTreeSet<i64> = supports.iter().flatten().copied().collect();
    t.expect(classes == orbits && supports.len() == orbits.len(), || {
        format!("{} nonempty rightmost sections for {} f-orbits", supports.len(), orbits.len())
    });
    // Evaluation on fibers with a point for every orbit is a bijection.
    for &u in &fibers {
        let pts = fiber_points(c, u);
        if pts.len() != STEP as usize {
            continue;
        }
        let values: BTreeSet<FiberPoint> = fam.iter().filter_map(|s| s.get(u)).collect();
        t.expect(fam.len() == pts.len() && values.len() == pts.len(), || {
            format!("evaluation on {} is not bijective", c.leaf_id(u))
        });
    }
    // The family is invariant under f.
    for s in &fam {
        let shifted: BTreeMap<LeafIdx, FiberPoint> = s
            .values
            .iter()
            .filter_map(|(&u, &v)| {
                let fv = match v {
                    FiberPoint::Seam => FiberPoint::Seam,
                    FiberPoint::Crossing(x) => FiberPoint::Crossing(m.f_leaf(x)?),
                };
                Some((m.f_leaf(u)?, fv))
            })
            .collect();
        t.expect(fam.iter().any(|o| shifted.iter().all(|(u, v)| o.get(*u) == Some(*v))), || {
            format!("f-image of {} is not rightmost", s.tag)
        });
    }
    t.finish()
}

fn check_flow_sections(m: &SkewModel) -> SkewCheck {
    let c = &m.complex;
    let mut t = Tally::new("flow-sections");
    for z in 0..c.ideals.len() {
        for sign in [Sign::Pos, Sign::Neg] {
            let expected: Vec<LeafIdx> =
                c.leaves_of(Family::Stable).filter(|&s| c.leaves[s].end(sign) == z).collect();
            match flow_section(c, z, sign) {
                Ok(sec) => t.expect(sec.support() == expected && expected.len() <= 1, || {
                    format!("sigma{} of {} has support {:?}", sign.symbol(), c.ideal_id(z), sec.support())
                }),
                Err(e) => t.expect(false, || e.to_string()),
            }
        }
    }
    t.finish()
}

fn check_involution(m: &SkewModel) -> SkewCheck {
    let c = &m.complex;
    let mut t = Tally::new("involution");
    let is = involution(m, Family::Stable);
    for (&x, &y) in &is {
        t.expect(is.get(&y) == Some(&x), || format!("stable involution not involutive at {}", c.ideal_id(x)));
    }
    let iu = involution(m, Family::Unstable);
    for (&x, &y) in &iu {
        let end = c.leaves_at(x).next().is_some();
        t.expect(end != (x == y), || format!("unstable involution fixes {}", c.ideal_id(x)));
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (&x, &y) in &is {
        match (flow_section(c, y, Sign::Pos), flow_section(c, x, Sign::Neg)) {
            (Ok(a), Ok(b)) => {
                t.expect(a == b, || format!("sigma+ of {} differs from sigma- of {}", c.ideal_id(y), c.ideal_id(x)));
                plus.push(a);
                minus.push(b);
            }
            _ => t.expect(false, || format!("flow section failed at {}", c.ideal_id(x))),
        }
    }
    t.expect(section_set_compare(&plus, &minus).equal(), || "families differ as sets".into());
    t.finish()
}

fn check_gaps(m: &SkewModel) -> SkewCheck {
    let c = &m.complex;
    let mut t = Tally::new("gaps");
    let line = |tag: char| -> Vec<IdealIdx> { (0..c.ideals.len()).filter(|&p| c.ideal_id(p).starts_with(tag)).collect() };
    let (right, left) = (line('R'), line('L'));
    for u in c.unstable_leaves() {
        let k = m.index(u);
        for (sign, far, inside) in [(Sign::Pos, &right, k + 2 < m.n as i64), (Sign::Neg, &left, k >= 1)] {
            if !inside {
                continue;
            }
            match gap_structure(c, u, sign) {
                Ok(g) => {
                    t.expect(far.iter().all(|p| g.nonmarker_gap.contains(p)), || {
                        format!("nonmarker gap of {}{} misses far boundary", c.leaf_id(u), sign.symbol())
                    });
                    t.expect(g.check_partition(c).is_ok() && g.overlaps.is_empty(), || {
                        format!("gaps of {}{} do not partition", c.leaf_id(u), sign.symbol())
                    });
                }
                Err(e) => t.expect(false, || e.to_string()),
            }
        }
    }
    t.finish()
}

fn check_triangles(m: &SkewModel) -> SkewCheck {
    let c = &m.complex;
    let mut t = Tally::new("triangles");
    for u in m.full_fibers() {
        for sign in [Sign::Pos, Sign::Neg] {
            let Ok(sh) = shadow(c, u, sign) else {
                t.expect(false, || format!("no shadow for {}", c.leaf_id(u)));
                continue;
            };
            let lens: Vec<usize> = sh.rays.iter().map(|r| r.beyond.len()).collect();
            let monotone = lens.windows(2).all(|w| match sign {
                Sign::Pos => w[0] < w[1],
                Sign::Neg => w[0] > w[1],
            });
            t.expect(monotone, || format!("shadow {}{} ray lengths {:?}", c.leaf_id(u), sign.symbol(), lens));
        }
    }
    t.finish()
}

/// The five skew checks plus the involution check, on window data only.
pub fn skew_universal_circles(model: &SkewModel) -> SkewReport {
    SkewReport {
        n: model.n,
        checks: vec![
            check_leftmost(model),
            check_rightmost(model),
            check_flow_sections(model),
            check_gaps(model),
            check_triangles(model),
            check_involution(model),
        ],
    }
}

/// Basepoint-free description of a section as `leaf -> value label`.
pub fn describe(c: &Complex, s: &Section) -> Vec<(String, String)> {
    s.values.iter().map(|(&u, &v)| (c.leaf_id(u).to_string(), v.label(c, u))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::validate_complex;

    #[test]
    fn crossings_follow_strip_rule() {
        for n in 2..=8 {
            let m = skew_complex(n);
            let c = &m.complex;
            for (i, a) in m.stable_params.iter().enumerate() {
                for (k, b) in m.unstable_params.iter().enumerate() {
                    let want = *a - 1 < *b && *b < *a;
                    let got = c.crosses(m.stable(i as i64).unwrap(), m.unstable(k as i64).unwrap());
                    assert_eq!(got, want, "n={n} s{i} u{k}");
                }
            }
            assert!(validate_complex(c).ok(), "{:?}", validate_complex(c).violations);
        }
    }

    #[test]
    fn step_map_is_unit_translation() {
        let m = skew_complex(6);
        assert_eq!(m.step.apply(m.stable_params[1]), m.stable_params[4]);
        assert_eq!(m.step.apply(m.unstable_params[0]), m.unstable_params[3]);
    }

    #[test]
    fn involutions() {
        let m = skew_complex(5);
        let c = &m.complex;
        let is = involution(&m, Family::Stable);
        assert!(is.iter().all(|(x, y)| is[y] == *x));
        let iu = involution(&m, Family::Unstable);
        let fixed: Vec<&str> = iu.iter().filter(|(x, y)| x == y).map(|(x, _)| c.ideal_id(*x)).collect();
        assert_eq!(fixed, ["zp", "zm"]);
    }

    #[test]
    fn report_passes_for_all_windows() {
        for n in 2..=8 {
            let r = skew_universal_circles(&skew_complex(n));
            assert!(r.pass(), "n={n}: {:?}", r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        }
        let r = skew_universal_circles(&skew_complex(4));
        assert!(r.checks.iter().all(|c| c.examined > 0));
    }

    #[test]
    fn removing_a_crossing_breaks_triangles() {
        let m = skew_complex(4);
        let x = m.complex.crossing_of(m.stable(2).unwrap(), m.unstable(2).unwrap()).unwrap();
        let perturbed = SkewModel { complex: m.complex.without_crossing(x), ..m.clone() };
        let r = skew_universal_circles(&perturbed);
        let tri = r.check("triangles").unwrap();
        assert!(!tri.pass);
        assert!(tri.witnesses.iter().any(|w| w.contains("u1+")));
    }
}
