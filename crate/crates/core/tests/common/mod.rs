//! Exhaustive oracles shared by the integration and acceptance tests.

#![allow(dead_code)]

use bifol_core::fiber::FiberPoint;
use bifol_core::plane::{Complex, LeafIdx};
use bifol_core::sections::Extremal;

/// Points of a fiber by index: crossings, then the seam.
fn point_at(c: &Complex, f: LeafIdx, i: usize) -> FiberPoint {
    let along = c.crossed_by(f);
    if i == along.len() {
        FiberPoint::Seam
    } else {
        FiberPoint::Crossing(along[i])
    }
}

fn index_of(c: &Complex, f: LeafIdx, p: FiberPoint) -> usize {
    match p {
        FiberPoint::Seam => c.crossed_by(f).len(),
        FiberPoint::Crossing(s) => c.crossed_by(f).iter().position(|&x| x == s).expect("point on fiber"),
    }
}

fn ends_at(c: &Complex, s: LeafIdx, f: LeafIdx) -> bool {
    let fl = c.leaf(f);
    c.leaf(s).has_end(fl.neg) || c.leaf(s).has_end(fl.pos)
}

/// Admissibility restricted to the fibers of `t`, for a partial assignment
/// (`None` = not yet chosen): a taken marker is taken on every fiber of `t`
/// it crosses, and fibers of `t` it ends on carry the seam.
pub fn admissible_partial(c: &Complex, t: &[LeafIdx], vals: &[Option<FiberPoint>]) -> bool {
    for (i, v) in vals.iter().enumerate() {
        let Some(FiberPoint::Crossing(w)) = v else { continue };
        if !c.crosses(*w, t[i]) {
            return false;
        }
        for (j, &g) in t.iter().enumerate() {
            let Some(vj) = vals[j] else { continue };
            if c.crosses(*w, g) && vj != FiberPoint::Crossing(*w) {
                return false;
            }
            if ends_at(c, *w, g) && vj != FiberPoint::Seam {
                return false;
            }
        }
    }
    true
}

/// Every admissible section over `t` with value `base` at position `k`,
/// or `None` if there are more than `limit`.
pub fn enumerate_admissible(
    c: &Complex,
    t: &[LeafIdx],
    k: usize,
    base: FiberPoint,
    limit: usize,
) -> Option<Vec<Vec<FiberPoint>>> {
    let order: Vec<usize> = (k + 1..t.len()).chain((0..k).rev()).collect();
    let mut vals: Vec<Option<FiberPoint>> = vec![None; t.len()];
    vals[k] = Some(base);
    if !admissible_partial(c, t, &vals) {
        return Some(Vec::new());
    }
    let mut out = Vec::new();
    fn go(
        c: &Complex,
        t: &[LeafIdx],
        order: &[usize],
        depth: usize,
        vals: &mut Vec<Option<FiberPoint>>,
        out: &mut Vec<Vec<FiberPoint>>,
        limit: usize,
    ) -> bool {
        if depth == order.len() {
            out.push(vals.iter().map(|v| v.expect("complete")).collect());
            return out.len() <= limit;
        }
        let i = order[depth];
        for p in 0..=c.crossed_by(t[i]).len() {
            vals[i] = Some(point_at(c, t[i], p));
            if admissible_partial(c, t, vals) && !go(c, t, order, depth + 1, vals, out, limit) {
                return false;
            }
        }
        vals[i] = None;
        true
    }
    go(c, t, &order, 0, &mut vals, &mut out, limit).then_some(out)
}

/// Position of `p` on fiber `f` in the arc that starts just past the
/// stable leaves shared with the neighbouring fiber `g`.
fn rank(c: &Complex, f: LeafIdx, g: LeafIdx, p: FiberPoint) -> usize {
    let along = c.crossed_by(f);
    let len = along.len() + 1;
    let hi = along.iter().rposition(|&s| c.crosses(s, g)).expect("consecutive fibers share a stable leaf");
    (index_of(c, f, p) + len - (hi + 1)) % len
}

/// The lexicographically extremal admissible section through `base` at
/// position `k` of a monotone transversal (each fiber covers the previous
/// one), compared fiber by fiber moving up from `k`, then down.
pub fn extremal_oracle(
    c: &Complex,
    t: &[LeafIdx],
    k: usize,
    base: FiberPoint,
    e: Extremal,
    limit: usize,
) -> Option<Option<Vec<FiberPoint>>> {
    let all = enumerate_admissible(c, t, k, base, limit)?;
    let key = |s: &Vec<FiberPoint>| -> Vec<i64> {
        let mut key = Vec::new();
        for i in k + 1..t.len() {
            let r = rank(c, t[i], t[i - 1], s[i]) as i64;
            key.push(if e == Extremal::Leftmost { -r } else { r });
        }
        for i in (0..k).rev() {
            let r = rank(c, t[i], t[i + 1], s[i]) as i64;
            key.push(if e == Extremal::Leftmost { r } else { -r });
        }
        key
    };
    Some(all.into_iter().min_by_key(key))
}
