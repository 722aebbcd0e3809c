//! Hand-designed and generated complexes used by the scene corpus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::plane::{ChordBuilder, Complex, Designation, Family, Side};

/// Product grid: `n` stable columns `s*` and `m` unstable rows `u*`.
pub fn triv(n: usize, m: usize) -> Complex {
    let mut b = ChordBuilder::new();
    let (n_, m_) = (n as i64, m as i64);
    for i in 0..n_ {
        b.leaf(&format!("s{i}"), Family::Stable, [3, i, 0], [1, n_ - 1 - i, 0]);
        b.point([3, i, 0], &format!("b{i}")).point([1, n_ - 1 - i, 0], &format!("t{i}"));
    }
    for j in 0..m_ {
        b.leaf(&format!("u{j}"), Family::Unstable, [2, m_ - 1 - j, 0], [0, j, 0]);
        b.point([2, m_ - 1 - j, 0], &format!("l{j}")).point([0, j, 0], &format!("r{j}"));
    }
    b.build(Designation::Trivial)
}

/// Two stable leaves `l1`, `l2` nonseparated from below at `X = l1- = l2+`,
/// separated by the unstable leaf `u` fitting both, with one approximating
/// stable leaf `tau` and unstable leaves `v1`, `w1` on either side.
pub fn branch1() -> Complex {
    let mut b = ChordBuilder::new();
    b.angle_leaf("l1", Family::Stable, 0, 1100)
        .angle_leaf("l2", Family::Stable, 2500, 0)
        .angle_leaf("tau", Family::Stable, 2400, 1200)
        .angle_leaf("u", Family::Unstable, 1800, 0)
        .angle_leaf("v1", Family::Unstable, 1500, 600)
        .angle_leaf("w1", Family::Unstable, 2100, 3000)
        .point([0, 0, 0], "X")
        .chain(Family::Stable, &["l1", "l2"], Side::FromBelow);
    b.build(Designation::Branching)
}

/// Four translates of a branching configuration stacked along the stable
/// leaf `ts`: regions g1 and h1 carry right-untwisted markers, h2 and g2
/// left-untwisted ones, with two oriented stable chains in between.
pub fn fig20() -> Complex {
    let mut b = ChordBuilder::new();
    let s = Family::Stable;
    let u = Family::Unstable;
    b.angle_leaf("ts", s, 2700, 900)
        .angle_leaf("base0", u, 2500, 2850)
        .angle_leaf("g1A2", u, 2460, 2960)
        .angle_leaf("g1A1", u, 2420, 3000)
        .angle_leaf("g1L1", u, 2380, 3100)
        .angle_leaf("g1L2", u, 3100, 3040)
        .angle_leaf("g1S", s, 2900, 3100)
        .angle_leaf("P1", s, 2400, 2320)
        .angle_leaf("P2", s, 2320, 2260)
        .angle_leaf("w", u, 2320, 3200)
        .angle_leaf("v1", u, 2290, 3250)
        .angle_leaf("h2M1", u, 1980, 2080)
        .angle_leaf("h2M2", u, 2080, 3400)
        .angle_leaf("h2S", s, 2080, 1880)
        .angle_leaf("h2B2", u, 1940, 3420)
        .angle_leaf("h2B1", u, 1920, 3440)
        .angle_leaf("g2A2", u, 1720, 100)
        .angle_leaf("g2A1", u, 1700, 120)
        .angle_leaf("g2L1", u, 1680, 1600)
        .angle_leaf("g2L2", u, 1600, 140)
        .angle_leaf("g2S", s, 1760, 1600)
        .angle_leaf("P3", s, 160, 240)
        .angle_leaf("P4", s, 240, 320)
        .angle_leaf("y1", u, 1550, 200)
        .angle_leaf("z", u, 1500, 240)
        .angle_leaf("y2", u, 1450, 280)
        .angle_leaf("h1M1", u, 1300, 440)
        .angle_leaf("h1M2", u, 440, 520)
        .angle_leaf("h1S", s, 440, 640)
        .angle_leaf("h1B1", u, 1260, 560)
        .angle_leaf("h1B2", u, 1220, 600)
        .angle_leaf("top0", u, 1000, 700)
        .point([0, 3100, 0], "Q1")
        .point([0, 2080, 0], "R2")
        .point([0, 1600, 0], "Q2")
        .point([0, 440, 0], "R1")
        .point([0, 2320, 0], "X")
        .point([0, 240, 0], "Y")
        .chain(s, &["P1", "P2"], Side::FromAbove)
        .chain(s, &["P3", "P4"], Side::FromBelow)
        .chain(u, &["g1L1", "g1L2"], Side::FromBelow)
        .chain(u, &["h2M1", "h2M2"], Side::FromAbove)
        .chain(u, &["g2L1", "g2L2"], Side::FromBelow)
        .chain(u, &["h1M1", "h1M2"], Side::FromAbove);
    b.build(Designation::Branching)
}

/// Named leaves of the FIG20 design used by the seam and crossing checks.
pub mod fig20_roles {
    /// Transversal stable leaf.
    pub const TRANSVERSAL: &str = "ts";
    /// Leftmost basepoint: marker `g1S` on fiber `g1A1`.
    pub const LEFT_MARKER: &str = "g1S";
    pub const LEFT_FIBER: &str = "g1A1";
    /// Rightmost basepoint: marker `g2S` on fiber `g2A1`.
    pub const RIGHT_MARKER: &str = "g2S";
    pub const RIGHT_FIBER: &str = "g2A1";
    /// Unstable leaf whose seam-based leftmost section has both special
    /// frontier classes nonempty.
    pub const SPECIAL_LAMBDA: &str = "h2M2";
}

/// Random parallelogram polyomino: columns are stable leaves, rows are
/// unstable leaves, and some adjacent non-crossing ends are merged into
/// perfect fits.
pub fn random_polyomino(seed: u64) -> Complex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols = rng.gen_range(1..=6usize);
    let mut lo = vec![0i64; cols];
    let mut hi = vec![0i64; cols];
    hi[0] = rng.gen_range(0..=3);
    for i in 1..cols {
        lo[i] = rng.gen_range(lo[i - 1]..=hi[i - 1]);
        hi[i] = rng.gen_range(hi[i - 1].max(lo[i])..=hi[i - 1] + 2);
    }
    let rows: Vec<i64> = (lo[0]..=hi[cols - 1]).collect();
    let span = |j: i64| {
        let cs: Vec<i64> = (0..cols).filter(|&i| lo[i] <= j && j <= hi[i]).map(|i| i as i64).collect();
        (cs[0], *cs.last().expect("rows meet a column"))
    };
    // Ends in doubled coordinates: lower path ascending, upper path descending.
    let mut ends: Vec<(String, Family, [i64; 3], [i64; 3])> = Vec::new();
    for i in 0..cols {
        let x = 2 * i as i64;
        ends.push((format!("c{i}"), Family::Stable, [0, x, 2 * lo[i] - 1], [1, -x, -(2 * hi[i] + 1)]));
    }
    for &j in &rows {
        let (l, r) = span(j);
        ends.push((format!("r{j}"), Family::Unstable, [1, -(2 * l - 1), -2 * j], [0, 2 * r + 1, 2 * j]));
    }
    // Candidate fits: boundary-adjacent stable/unstable ends that do not cross.
    let mut pts: Vec<([i64; 3], usize, bool)> = Vec::new();
    for (k, e) in ends.iter().enumerate() {
        pts.push((e.2, k, false));
        pts.push((e.3, k, true));
    }
    pts.sort();
    // Leaf k < cols is column k; otherwise row rows[k - cols].
    let crosses = |a: usize, b: usize| {
        let (s, u) = if a < cols { (a, b) } else { (b, a) };
        let j = rows[u - cols];
        lo[s] <= j && j <= hi[s]
    };
    let fams: Vec<Family> = ends.iter().map(|e| e.1).collect();
    let mut merged = vec![false; pts.len()];
    for k in 0..pts.len() {
        let next = (k + 1) % pts.len();
        let (a, b) = (pts[k], pts[next]);
        if next == k || merged[k] || merged[next] || fams[a.1] == fams[b.1] || crosses(a.1, b.1) {
            continue;
        }
        if rng.gen_bool(0.5) {
            merged[k] = true;
            merged[next] = true;
            let target = a.0;
            let e = &mut ends[b.1];
            if b.2 {
                e.3 = target;
            } else {
                e.2 = target;
            }
        }
    }
    let mut builder = ChordBuilder::new();
    for (id, fam, neg, pos) in &ends {
        builder.leaf(id, *fam, *neg, *pos);
    }
    builder.build(Designation::Trivial)
}

/// The fixed corpus complexes other than the dynamics seed.
pub fn named_complexes() -> Vec<(String, Complex)> {
    let mut out = vec![
        ("triv3".to_string(), triv(3, 3)),
        ("branch1".to_string(), branch1()),
        ("fig20".to_string(), fig20()),
    ];
    for n in 2..=8 {
        out.push((format!("skew{n}"), crate::skew::skew_complex(n).complex));
    }
    out.push(("hyp1".to_string(), crate::dynamics::hyp1(6).complex));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::validate_complex;

    #[test]
    fn triv_has_grid_crossings() {
        let c = triv(3, 4);
        assert_eq!(c.crossings.len(), 12);
        assert_eq!(c.ideals.len(), 14);
    }

    #[test]
    fn polyomino_crossings_are_cells() {
        for seed in 0..50 {
            let c = random_polyomino(seed);
            let r = validate_complex(&c);
            assert!(r.ok(), "seed {seed}: {:?}", r.violations);
            let cells: usize = c.stable_leaves().iter().map(|&s| c.leaves[s].crossings.len()).sum();
            assert_eq!(cells, c.crossings.len());
        }
    }

    #[test]
    fn fig20_crossings_along_transversal() {
        let c = fig20();
        let ts = c.leaf_by_id("ts").unwrap();
        let order: Vec<&str> = c.crossed_by(ts).into_iter().map(|u| c.leaf_id(u)).collect();
        assert_eq!(
            order,
            [
                "base0", "g1A2", "g1A1", "g1L1", "w", "v1", "h2M2", "h2B2", "h2B1", "g2A2", "g2A1", "g2L2", "y1",
                "z", "y2", "h1M1", "h1B1", "h1B2", "top0"
            ]
        );
    }
}
