mod common;

use proptest::prelude::*;

use bifol_core::corpus::{random_polyomino, triv};
use bifol_core::einf::{build_cylinder, stitching_check_cylinder, transversal_of};
use bifol_core::fiber::fiber_points;
use bifol_core::plane::{validate_complex, Complex, LeafIdx};
use bifol_core::sections::{extremal_section, Extremal};
use bifol_core::shadows::is_admissible;

fn transversals(c: &Complex) -> Vec<Vec<LeafIdx>> {
    let mut out: Vec<Vec<LeafIdx>> = c.stable_leaves().into_iter().map(|s| transversal_of(c, s)).collect();
    out.push(c.unstable_leaves());
    out
}

fn agrees_with_oracle(c: &Complex, t: &[LeafIdx]) -> Result<(), String> {
    for (k, &f) in t.iter().enumerate() {
        for p in fiber_points(c, f) {
            for e in [Extremal::Leftmost, Extremal::Rightmost] {
                let want = common::extremal_oracle(c, t, k, p, e, 200_000).ok_or("oracle limit")?;
                let got = extremal_section(c, f, p, e).ok().map(|s| t.iter().map(|&u| s.get(u).unwrap()).collect::<Vec<_>>());
                if got != want {
                    return Err(format!("{e:?} from {} on {}", p.label(c, f), c.leaf_id(f)));
                }
            }
        }
    }
    Ok(())
}

#[test]
fn triv_grids_match_the_oracle() {
    for n in 1..=4 {
        for m in 1..=4 {
            let c = triv(n, m);
            for t in transversals(&c) {
                agrees_with_oracle(&c, &t).unwrap();
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_complexes_stitch(seed in 1000u64..100_000) {
        let c = random_polyomino(seed);
        prop_assert!(validate_complex(&c).ok());
        for t in transversals(&c) {
            let cyl = build_cylinder(&c, &t).unwrap();
            let r = stitching_check_cylinder(&c, &cyl);
            prop_assert!(r.ok(), "{:?}", r.witnesses);
        }
    }

    #[test]
    fn random_extremal_sections_match_the_oracle(seed in 1000u64..100_000) {
        let c = random_polyomino(seed);
        for t in transversals(&c).into_iter().filter(|t| t.len() <= 12) {
            prop_assert_eq!(agrees_with_oracle(&c, &t), Ok(()));
        }
    }

    #[test]
    fn random_extremal_sections_are_admissible(seed in 1000u64..100_000) {
        let c = random_polyomino(seed);
        for u in c.unstable_leaves() {
            for p in fiber_points(&c, u) {
                for e in [Extremal::Leftmost, Extremal::Rightmost] {
                    let s = extremal_section(&c, u, p, e).unwrap();
                    prop_assert!(is_admissible(&c, &s), "{}", s.tag);
                }
            }
        }
    }
}
