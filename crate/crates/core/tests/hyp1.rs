use bifol_core::dynamics::{
    boundary_fixed_points, convergence_profile, hyp1, nonconjugacy_report, push_section, section_fixed_points, LocalType,
};
use bifol_core::fiber::FiberPoint;
use bifol_core::sections::{extremal_section, Extremal};

#[test]
fn boundary_fixed_points_are_stable_across_windows() {
    for d in 2..=7 {
        let f = boundary_fixed_points(&hyp1(d));
        let kinds: Vec<(String, LocalType)> = f.points.iter().map(|p| (p.id.clone(), p.local)).collect();
        assert_eq!(
            kinds,
            [("E", LocalType::Source), ("N", LocalType::Sink), ("W", LocalType::Source), ("S", LocalType::Sink)]
                .map(|(a, b)| (a.to_string(), b)),
            "window {d}"
        );
        assert!(f.alternating);
    }
}

#[test]
fn leftmost_family_is_equivariant() {
    for d in 4..=7 {
        let r = hyp1(d);
        let f = section_fixed_points(&r, Extremal::Leftmost).unwrap();
        assert!(f.equivariant, "window {d}");
        assert_eq!(f.fixed.count(LocalType::Sink), 1);
        assert_eq!(f.fixed.count(LocalType::Source), 1);
        assert!(!nonconjugacy_report(&r).unwrap().conjugate);
    }
}

#[test]
fn pushing_the_fixed_sections_returns_them() {
    let r = hyp1(5);
    let c = &r.complex;
    let lu = r.fixed_unstable.unwrap();
    let ls = r.fixed_stable.unwrap();
    for p in [FiberPoint::Seam, FiberPoint::Crossing(ls)] {
        let s = extremal_section(c, lu, p, Extremal::Leftmost).unwrap();
        let g = push_section(&r, &s);
        for u in r.interior_fibers() {
            if let (Some(a), Some(b)) = (g.get(u), s.get(u)) {
                if r.interior(u) {
                    assert_eq!(a, b, "{} at {}", s.tag, c.leaf_id(u));
                }
            }
        }
    }
}

#[test]
fn backward_orbits_approach_the_seam_section() {
    let r = hyp1(6);
    let c = &r.complex;
    let lu = r.fixed_unstable.unwrap();
    let ls = r.fixed_stable.unwrap();
    for s in c.crossed_by(lu).into_iter().filter(|&s| s != ls) {
        let prof = convergence_profile(&r, FiberPoint::Crossing(s), 12).unwrap();
        assert!(prof.windows(2).all(|w| w[1] <= w[0]), "{}: {prof:?}", c.leaf_id(s));
    }
}
