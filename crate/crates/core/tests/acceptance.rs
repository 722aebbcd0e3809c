//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bifol_core::checks::{self, Basepoint};
use bifol_core::corder::{complete, validate_order, CircularOrder};
use bifol_core::corpus::{self, fig20_roles};
use bifol_core::dynamics::{hyp1, nonconjugacy_report, section_fixed_points, LocalType};
use bifol_core::einf::{build_cylinder, stitching_check_cylinder, transversal_of};
use bifol_core::fiber::fiber_points;
use bifol_core::plane::{validate_complex, Complex, LeafIdx};
use bifol_core::sections::{extremal_section, Extremal};
use bifol_core::skew::{skew_complex, skew_universal_circles};

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    summary: String,
}

fn verdict(pass: bool, summary: impl Into<String>) -> Verdict {
    Verdict { pass, summary: summary.into() }
}

fn circular_orders() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut valid_ok = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=12);
        let mut labels: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        labels.shuffle(&mut rng);
        let o = CircularOrder::from_sequence(labels.clone());
        let rep = validate_order(&o, 12);
        let round_trip = complete(&o).is_ok_and(|m| {
            let back = m.to_order();
            let idx: Vec<usize> = o.elements().iter().map(|e| back.elements().iter().position(|b| b == e).unwrap()).collect();
            (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| o.triple(a, b, c) == back.triple(idx[a], idx[b], idx[c]))))
        });
        if rep.is_valid() && rep.exhaustive && round_trip {
            valid_ok += 1;
        }
    }
    let mut detected = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(4..=12);
        let mut o = CircularOrder::from_sequence((0..n).map(|i| format!("x{i}")).collect());
        let mut pick: Vec<usize> = (0..n).collect();
        pick.shuffle(&mut rng);
        let (a, b, c) = (pick[0], pick[1], pick[2]);
        for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b), (b, a, c), (a, c, b), (c, b, a)] {
            let v = o.triple(x, y, z);
            o.set_triple(x, y, z, -v);
        }
        if !validate_order(&o, 12).is_valid() && complete(&o).is_err() {
            detected += 1;
        }
    }
    verdict(valid_ok == 1000 && detected == 1000, format!("{valid_ok}/1000 valid orders round-trip, {detected}/1000 mutations detected"))
}

fn skew_suite() -> Verdict {
    let mut failed = Vec::new();
    let mut examined = 0;
    for n in 2..=8 {
        let r = skew_universal_circles(&skew_complex(n));
        examined += r.checks.iter().map(|c| c.examined).sum::<usize>();
        for c in r.checks.iter().filter(|c| !c.pass) {
            failed.push(format!("N={n} {}: {:?}", c.name, c.witnesses.first()));
        }
    }
    verdict(failed.is_empty(), format!("N=2..8, {examined} exact comparisons, failures {failed:?}"))
}

fn flow_circles() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, c) in [("branch1", corpus::branch1()), ("fig20", corpus::fig20())] {
        let o = checks::flow_circles_differ(&c);
        pass &= o.pass;
        parts.push(format!("{name}: unmatched {} longest chain {}", o.details["unmatched"], o.details["longestChain"]));
    }
    verdict(pass, parts.join("; "))
}

fn seam_crossings() -> Verdict {
    let c = corpus::fig20();
    let ts = c.leaf_by_id(fig20_roles::TRANSVERSAL).expect("transversal leaf");
    let t = c.crossed_by(ts);
    let l = Basepoint::parse(&c, fig20_roles::LEFT_FIBER, fig20_roles::LEFT_MARKER).expect("left basepoint");
    let r = Basepoint::parse(&c, fig20_roles::RIGHT_FIBER, fig20_roles::RIGHT_MARKER).expect("right basepoint");
    let o = checks::extremal_sections_cross(&c, l, r, &t);
    let summary = format!(
        "leftmost seam crossings {}, rightmost seam crossings {}, cross witness {}; {}",
        o.details["leftmostSeam"]["crossings"].as_array().map_or(0, |a| a.len()),
        o.details["rightmostSeam"]["crossings"].as_array().map_or(0, |a| a.len()),
        o.details["cross"],
        if o.pass { "both sections admissible" } else { "witnesses missing" }
    );
    verdict(o.pass, if o.witnesses.is_empty() { summary } else { format!("{summary} {:?}", o.witnesses) })
}

/// Cylinders over stable transversals, plus the full row transversal of a
/// polyomino.
fn cylinders(c: &Complex, rows: bool) -> Vec<Vec<LeafIdx>> {
    let mut out: Vec<Vec<LeafIdx>> = c.stable_leaves().into_iter().map(|s| transversal_of(c, s)).collect();
    if rows {
        out.push(c.unstable_leaves());
    }
    out
}

fn stitching_suite() -> Verdict {
    let mut corpus_ok = 0;
    let mut failures = Vec::new();
    let named = corpus::named_complexes();
    for (name, c) in &named {
        let o = checks::stitching(c);
        if o.pass {
            corpus_ok += 1;
        } else {
            failures.push(format!("{name}: {:?}", o.witnesses.first()));
        }
    }
    let mut random_ok = 0;
    let mut oracle_cases = 0;
    let mut oracle_skipped = 0;
    let mut complexes: Vec<(String, Complex, bool)> = named.into_iter().map(|(n, c)| (n, c, false)).collect();
    for seed in 0..200 {
        let c = corpus::random_polyomino(seed);
        if !validate_complex(&c).ok() {
            failures.push(format!("random {seed} invalid"));
            continue;
        }
        let all_ok = cylinders(&c, true).iter().all(|t| {
            build_cylinder(&c, t).is_ok_and(|cyl| stitching_check_cylinder(&c, &cyl).ok())
        });
        if all_ok {
            random_ok += 1;
        } else {
            failures.push(format!("random {seed} stitching"));
        }
        complexes.push((format!("random{seed}"), c, true));
    }
    for (name, c, rows) in &complexes {
        for t in cylinders(c, *rows) {
            if t.len() > 12 {
                continue;
            }
            for (k, &f) in t.iter().enumerate() {
                for p in fiber_points(c, f) {
                    for e in [Extremal::Leftmost, Extremal::Rightmost] {
                        let Some(want) = common::extremal_oracle(c, &t, k, p, e, 500_000) else {
                            oracle_skipped += 1;
                            continue;
                        };
                        oracle_cases += 1;
                        let got = extremal_section(c, f, p, e)
                            .ok()
                            .map(|s| t.iter().map(|&u| s.get(u).expect("section defined on every fiber")).collect::<Vec<_>>());
                        if got != want {
                            failures.push(format!("{name}: {e:?} from {} on {}", p.label(c, f), c.leaf_id(f)));
                        }
                    }
                }
            }
        }
    }
    verdict(
        failures.is_empty() && oracle_skipped == 0,
        format!(
            "{corpus_ok} corpus scenes and {random_ok}/200 random complexes stitch; extremal oracle agrees on {oracle_cases} cases ({oracle_skipped} skipped); failures {:?}",
            failures.iter().take(5).collect::<Vec<_>>()
        ),
    )
}

fn admissibility_suite() -> Verdict {
    let mut examined = 0;
    let mut faults = Vec::new();
    for (name, c) in corpus::named_complexes() {
        let o = checks::admissibility(&c);
        examined += o.details["examined"].as_u64().unwrap_or(0);
        faults.extend(o.witnesses.into_iter().map(|w| format!("{name}: {w}")));
    }
    verdict(faults.is_empty(), format!("{examined} sections admissible, violations {:?}", faults.iter().take(5).collect::<Vec<_>>()))
}

fn nonconjugacy() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    for d in [4, 6] {
        let r = hyp1(d);
        let rep = match nonconjugacy_report(&r) {
            Ok(rep) => rep,
            Err(e) => return verdict(false, format!("window {d}: {e}")),
        };
        let left = &rep.leftmost.fixed;
        let ok = rep.boundary.points.len() == 4
            && rep.boundary.alternating
            && left.points.len() == 2
            && left.count(LocalType::Sink) == 1
            && left.count(LocalType::Source) == 1
            && !rep.conjugate;
        let right = section_fixed_points(&r, Extremal::Rightmost).map(|f| f.fixed.points.len()).unwrap_or(0);
        pass &= ok;
        parts.push(format!(
            "N={d}: boundary {:?}, leftmost {:?}, rightmost count {right}, {}",
            rep.boundary.points.iter().map(|p| format!("{}:{:?}", p.id, p.local)).collect::<Vec<_>>(),
            left.points.iter().map(|p| format!("{:?}", p.local)).collect::<Vec<_>>(),
            if rep.conjugate { "conjugate" } else { "not conjugate" }
        ));
    }
    verdict(pass, parts.join("; "))
}

fn special_support() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, c) in [("branch1", corpus::branch1()), ("fig20", corpus::fig20())] {
        let o = checks::special_support(&c);
        pass &= o.pass;
        parts.push(format!(
            "{name}: {} leaves checked, both classes nonempty at {}{}",
            c.unstable_leaves().len(),
            o.details["bothClassesNonempty"],
            if o.pass { String::new() } else { format!(" {:?}", o.witnesses) }
        ));
    }
    verdict(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("circular orders", circular_orders),
        ("skew suite", skew_suite),
        ("flow circles differ", flow_circles),
        ("seam crossings", seam_crossings),
        ("stitching", stitching_suite),
        ("admissibility", admissibility_suite),
        ("nonconjugacy", nonconjugacy),
        ("special section", special_support),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = f();
        all &= v.pass;
        println!(
            "{} criterion {} ({name}): {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.summary,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
