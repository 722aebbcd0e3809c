//! Command surface of the `bifol` binary: scene validation, named checks
//! compared against scene expectations, renders, generators and the
//! dynamics report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::checks::{self, Outcome};
use crate::corpus;
use crate::dynamics::{nonconjugacy_report, realize, section_fixed_points};
use crate::einf::{build_cylinder, transversal_of};
use crate::plane::{validate_complex, LeafIdx, Sign};
use crate::render::{parse_shadow_request, render_cylinder, render_orbit};
use crate::scene::{self, Loaded, Scene, SceneError};
use crate::sections::{extremal_section, Extremal};
use crate::shadows::shadow;
use crate::skew::{skew_complex, skew_universal_circles};

/// Every check `run` accepts.
pub const CHECKS: &[&str] = &[
    "admissibility",
    "cross",
    "cylinder",
    "dynamics",
    "flow-circles-differ",
    "flow-section",
    "gaps",
    "leftmost",
    "leftmost-crosses-seam",
    "rightmost",
    "shadow",
    "skew-suite",
    "special-support",
    "stitching",
    "validate",
];

pub const TARGETS: &[&str] = &["orbit", "cylinder"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("unknown check {0}; known checks: {known}", known = CHECKS.join(", "))]
    UnknownCheck(String),
    #[error("unknown render target {0}; known targets: {known}", known = TARGETS.join(", "))]
    UnknownTarget(String),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("scene {scene} has no {what}")]
    Missing { scene: String, what: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "IoError",
            CliError::Scene(SceneError::Parse { .. }) => "ParseError",
            CliError::Scene(SceneError::Schema { .. }) => "SchemaError",
            CliError::UnknownCheck(_) => "UnknownCheck",
            CliError::UnknownTarget(_) => "UnknownTarget",
            CliError::UnknownGenerator(_) => "UnknownGenerator",
            CliError::Missing { .. } => "SchemaError",
            CliError::Usage(_) => "UsageError",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bifol", version, about = "Check universal-circle constructions on finite bifoliated planes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the complex of a scene.
    Validate {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run named checks and compare them with the scene's expectations.
    Run {
        #[arg(long)]
        scene: PathBuf,
        /// Check names, comma separated or repeated; defaults to the
        /// scene's expectations.
        #[arg(long, value_delimiter = ',')]
        check: Vec<String>,
        /// Overrides the scene's dynamics windows.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a scene as SVG.
    Render {
        #[arg(long)]
        scene: PathBuf,
        /// `orbit` or `cylinder`.
        #[arg(long, default_value = "orbit")]
        target: String,
        /// Named transversal of the scene for cylinder renders.
        #[arg(long)]
        transversal: Option<String>,
        /// Shadow overlays for orbit renders, as `leafId+` or `leafId-`.
        #[arg(long)]
        shadow: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a corpus scene.
    Gen {
        /// triv, skew, branch1, fig20, hyp1, random or linking-violation.
        kind: Option<String>,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long)]
        window: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write every shipped scene into this directory.
        #[arg(long)]
        seed_corpus: Option<PathBuf>,
    },
    /// Fixed points of the periodic action and the nonconjugacy report.
    Dynamics {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub pass: bool,
    pub expected: bool,
    pub met: bool,
    pub witnesses: Vec<String>,
    pub details: Value,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub command: String,
    pub scene: String,
    pub inputs_digest: String,
    pub results: Vec<CheckResult>,
    pub artifacts: Vec<String>,
    pub expectations_met: bool,
    pub failures: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for r in &self.results {
            let verdict = if r.pass { "pass" } else { "fail" };
            let note = if r.met { "" } else { " (unexpected)" };
            s.push_str(&format!("{}: {verdict}{note}\n", r.check));
            for w in r.witnesses.iter().take(3) {
                s.push_str(&format!("  {w}\n"));
            }
        }
        s
    }
}

/// What a command produced: text for stdout, a human summary, and the
/// process exit code.
#[derive(Debug)]
pub struct Output {
    pub stdout: String,
    pub summary: String,
    pub code: i32,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.display().to_string(), message: e.to_string() })?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

pub fn digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

fn missing(l: &Loaded, what: &str) -> CliError {
    CliError::Missing { scene: l.scene.name.clone(), what: what.to_string() }
}

fn basepoint(l: &Loaded, name: &str) -> Result<checks::Basepoint, CliError> {
    l.basepoints.get(name).copied().ok_or_else(|| missing(l, &format!("basepoint {name}")))
}

fn main_transversal(l: &Loaded) -> Result<&Vec<LeafIdx>, CliError> {
    l.transversals.get("main").ok_or_else(|| missing(l, "transversal main"))
}

fn windows(l: &Loaded, window: Option<usize>) -> Result<Vec<usize>, CliError> {
    let d = l.scene.dynamics.as_ref().ok_or_else(|| missing(l, "dynamics seed"))?;
    Ok(window.map_or_else(|| d.windows.clone(), |w| vec![w]))
}

fn shadow_check(l: &Loaded) -> Outcome {
    let c = &l.complex;
    let mut witnesses = Vec::new();
    let mut rows = Vec::new();
    for u in c.unstable_leaves() {
        for sign in [Sign::Pos, Sign::Neg] {
            match shadow(c, u, sign) {
                Ok(sh) => rows.push(json!({
                    "leaf": c.leaf_id(u),
                    "sign": sign.symbol().to_string(),
                    "rays": sh.rays.iter().map(|r| json!({
                        "stable": c.leaf_id(r.stable),
                        "beyond": r.beyond.iter().map(|&b| c.leaf_id(b)).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                })),
                Err(e) => witnesses.push(e.to_string()),
            }
        }
    }
    Outcome { pass: witnesses.is_empty(), witnesses, details: Value::Array(rows) }
}

fn dynamics_check(l: &Loaded, window: Option<usize>) -> Result<Outcome, CliError> {
    let seed = &l.scene.dynamics.as_ref().ok_or_else(|| missing(l, "dynamics seed"))?.seed;
    let mut witnesses = Vec::new();
    let mut reports = Vec::new();
    for w in windows(l, window)? {
        match realize(seed, w).and_then(|r| nonconjugacy_report(&r)) {
            Ok(rep) => {
                if rep.conjugate {
                    witnesses.push(format!("window {w}: {}", rep.conclusion));
                }
                reports.push(serde_json::to_value(&rep).expect("reports serialize"));
            }
            Err(e) => witnesses.push(format!("window {w}: {e}")),
        }
    }
    Ok(Outcome { pass: witnesses.is_empty(), witnesses, details: Value::Array(reports) })
}

/// Runs one named check on a loaded scene.
pub fn run_check(l: &Loaded, name: &str, window: Option<usize>) -> Result<Outcome, CliError> {
    let c = &l.complex;
    Ok(match name {
        "validate" => {
            let r = validate_complex(c);
            let witnesses = r.errors().map(|v| format!("{:?}: {}", v.kind, v.witness.join(" "))).collect();
            Outcome { pass: r.ok(), witnesses, details: serde_json::to_value(&r).expect("reports serialize") }
        }
        "shadow" => shadow_check(l),
        "gaps" => checks::shadows_and_gaps(c),
        "flow-section" => checks::flow_sections(c),
        "flow-circles-differ" => checks::flow_circles_differ(c),
        "stitching" => checks::stitching(c),
        "cylinder" => {
            if l.transversals.is_empty() {
                checks::stitching(c)
            } else {
                let mut all = Outcome { pass: true, witnesses: vec![], details: json!({}) };
                for (tn, t) in &l.transversals {
                    let o = checks::cylinder(c, t);
                    all.pass &= o.pass;
                    all.witnesses.extend(o.witnesses.into_iter().map(|w| format!("{tn}: {w}")));
                    all.details[tn] = o.details;
                }
                all
            }
        }
        "leftmost" => checks::extremal(c, basepoint(l, "leftmostBase")?, Extremal::Leftmost),
        "rightmost" => checks::extremal(c, basepoint(l, "rightmostBase")?, Extremal::Rightmost),
        "leftmost-crosses-seam" => checks::leftmost_crosses_seam(c, basepoint(l, "leftmostBase")?, main_transversal(l)?),
        "cross" => checks::extremal_sections_cross(
            c,
            basepoint(l, "leftmostBase")?,
            basepoint(l, "rightmostBase")?,
            main_transversal(l)?,
        ),
        "admissibility" => checks::admissibility(c),
        "special-support" => checks::special_support(c),
        "skew-suite" => {
            let n = l.scene.skew.as_ref().ok_or_else(|| missing(l, "skew parameters"))?.n;
            let r = skew_universal_circles(&skew_complex(n));
            let witnesses = r
                .checks
                .iter()
                .filter(|k| !k.pass)
                .flat_map(|k| k.witnesses.iter().map(move |w| format!("{}: {w}", k.name)))
                .collect();
            Outcome { pass: r.pass(), witnesses, details: serde_json::to_value(&r).expect("reports serialize") }
        }
        "dynamics" => dynamics_check(l, window)?,
        other => return Err(CliError::UnknownCheck(other.to_string())),
    })
}

fn assemble(command: &str, l: &Loaded, outcomes: Vec<(String, Outcome)>, digest: String, artifacts: Vec<String>) -> Report {
    let mut results: Vec<CheckResult> = outcomes
        .into_iter()
        .map(|(check, o)| {
            let expected = l.scene.expectations.get(&check).copied().unwrap_or(true);
            CheckResult { met: o.pass == expected, pass: o.pass, expected, check, witnesses: o.witnesses, details: o.details }
        })
        .collect();
    results.sort_by(|a, b| a.check.cmp(&b.check));
    let failures: Vec<String> = results.iter().filter(|r| !r.met).map(|r| r.check.clone()).collect();
    Report {
        command: command.to_string(),
        scene: l.scene.name.clone(),
        inputs_digest: digest,
        expectations_met: failures.is_empty(),
        failures,
        results,
        artifacts,
    }
}

/// Runs `names` (or the scene's expected checks) concurrently and
/// assembles a report ordered by check name.
pub fn run_checks(text: &str, names: &[String], window: Option<usize>) -> Result<Report, CliError> {
    let l = scene::load_str(text)?;
    let mut names: Vec<String> =
        if names.is_empty() { l.scene.expectations.keys().cloned().collect() } else { names.to_vec() };
    if names.is_empty() {
        names.push("validate".into());
    }
    names.sort();
    names.dedup();
    if let Some(bad) = names.iter().find(|n| !CHECKS.contains(&n.as_str())) {
        return Err(CliError::UnknownCheck(bad.clone()));
    }
    let outcomes: Vec<Result<Outcome, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = names.iter().map(|n| s.spawn(|| run_check(&l, n, window))).collect();
        handles.into_iter().map(|h| h.join().expect("check thread")).collect()
    });
    let outcomes: Vec<(String, Outcome)> =
        names.iter().cloned().zip(outcomes).map(|(n, o)| o.map(|o| (n, o))).collect::<Result<_, _>>()?;
    let w = window.map(|w| w.to_string()).unwrap_or_default();
    let d = digest(&["run", text, &names.join(","), &w]);
    Ok(assemble("run", &l, outcomes, d, vec![]))
}

pub fn validate_scene(text: &str) -> Result<Report, CliError> {
    let l = scene::load_str(text)?;
    let o = run_check(&l, "validate", None)?;
    Ok(assemble("validate", &l, vec![("validate".into(), o)], digest(&["validate", text]), vec![]))
}

/// SVG for a scene and target.
pub fn render_scene(text: &str, target: &str, transversal: Option<&str>, shadows: &[String]) -> Result<String, CliError> {
    if !TARGETS.contains(&target) {
        return Err(CliError::UnknownTarget(target.to_string()));
    }
    let l = scene::load_str(text)?;
    let c = &l.complex;
    if target == "orbit" {
        let mut regions = Vec::new();
        for s in shadows {
            let (u, sign) = parse_shadow_request(c, s).ok_or_else(|| CliError::Usage(format!("bad shadow request {s}")))?;
            regions.push(shadow(c, u, sign).map_err(|e| CliError::Usage(e.to_string()))?);
        }
        return Ok(render_orbit(c, &regions));
    }
    let t = match transversal {
        Some(name) => l.transversals.get(name).cloned().ok_or_else(|| missing(&l, &format!("transversal {name}")))?,
        None => match l.transversals.get("main") {
            Some(t) => t.clone(),
            None => c.stable_leaves().into_iter().map(|s| transversal_of(c, s)).max_by_key(|t| t.len()).unwrap_or_default(),
        },
    };
    let cyl = build_cylinder(c, &t).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut overlays = Vec::new();
    for (name, e) in [("leftmostBase", Extremal::Leftmost), ("rightmostBase", Extremal::Rightmost)] {
        if let Some(b) = l.basepoints.get(name) {
            if let Ok(s) = extremal_section(c, b.fiber, b.point, e) {
                overlays.push(s);
            }
        }
    }
    Ok(render_cylinder(c, &cyl, &overlays))
}

pub fn generate(kind: &str, n: usize, m: usize, windows: &[usize], seed: u64) -> Result<Scene, CliError> {
    let bad = |msg: &str| CliError::Usage(msg.to_string());
    Ok(match kind {
        "triv" => {
            if n == 0 || m == 0 {
                return Err(bad("triv needs n, m >= 1"));
            }
            scene::triv_scene(n, m)
        }
        "skew" => {
            if n < 2 {
                return Err(bad("skew needs n >= 2"));
            }
            scene::skew_scene(n)
        }
        "branch1" => scene::branch1_scene(),
        "fig20" => scene::fig20_scene(),
        "hyp1" => scene::hyp1_scene(if windows.is_empty() { &[4, 6] } else { windows }),
        "random" => {
            let c = corpus::random_polyomino(seed);
            let mut s = scene::Scene {
                schema_version: scene::SCHEMA_VERSION,
                name: format!("random{seed}"),
                complex: c.to_raw(),
                transversals: BTreeMap::new(),
                basepoints: BTreeMap::new(),
                skew: None,
                dynamics: None,
                expectations: BTreeMap::new(),
            };
            s.transversals.insert("main".into(), c.unstable_leaves().iter().map(|&u| c.leaf_id(u).to_string()).collect());
            for k in ["validate", "stitching", "admissibility"] {
                s.expectations.insert(k.into(), true);
            }
            s
        }
        "linking-violation" => scene::linking_violation_scene(),
        other => return Err(CliError::UnknownGenerator(other.to_string())),
    })
}

/// The dynamics report: fixed points on the boundary and on both extremal
/// families for each window.
pub fn dynamics_report(text: &str, window: Option<usize>) -> Result<Report, CliError> {
    let l = scene::load_str(text)?;
    let seed = &l.scene.dynamics.as_ref().ok_or_else(|| missing(&l, "dynamics seed"))?.seed;
    let mut outcomes = Vec::new();
    for w in windows(&l, window)? {
        let o = match realize(seed, w) {
            Ok(r) => {
                let right = section_fixed_points(&r, Extremal::Rightmost).map_err(|e| e.to_string());
                match nonconjugacy_report(&r) {
                    Ok(rep) => Outcome {
                        pass: !rep.conjugate,
                        witnesses: vec![rep.conclusion.clone()],
                        details: json!({
                            "nonconjugacy": rep,
                            "rightmost": right.map_or_else(Value::String, |f| serde_json::to_value(f).expect("serializes")),
                            "artifacts": r.artifacts.iter().map(|&a| r.complex.leaf_id(a)).collect::<Vec<_>>(),
                        }),
                    },
                    Err(e) => Outcome { pass: false, witnesses: vec![e.to_string()], details: Value::Null },
                }
            }
            Err(e) => Outcome { pass: false, witnesses: vec![e.to_string()], details: Value::Null },
        };
        outcomes.push((format!("dynamics@{w}"), o));
    }
    let mut rep = assemble("dynamics", &l, outcomes, digest(&["dynamics", text, &format!("{window:?}")]), vec![]);
    for r in &mut rep.results {
        r.expected = l.scene.expectations.get("dynamics").copied().unwrap_or(true);
        r.met = r.pass == r.expected;
    }
    rep.failures = rep.results.iter().filter(|r| !r.met).map(|r| r.check.clone()).collect();
    rep.expectations_met = rep.failures.is_empty();
    Ok(rep)
}

fn emit(report: Report, out: Option<&Path>) -> Result<Output, CliError> {
    let json = report.to_json();
    let code = if report.expectations_met { 0 } else { 1 };
    let summary = report.summary();
    match out {
        Some(p) => {
            write(p, &json)?;
            Ok(Output { stdout: String::new(), summary, code })
        }
        None => Ok(Output { stdout: json, summary, code }),
    }
}

pub fn execute(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Validate { scene, out } => emit(validate_scene(&read(&scene)?)?, out.as_deref()),
        Command::Run { scene, check, window, out } => emit(run_checks(&read(&scene)?, &check, window)?, out.as_deref()),
        Command::Dynamics { scene, window, out } => emit(dynamics_report(&read(&scene)?, window)?, out.as_deref()),
        Command::Render { scene, target, transversal, shadow, out } => {
            let text = read(&scene)?;
            let svg = render_scene(&text, &target, transversal.as_deref(), &shadow)?;
            write(&out, &svg)?;
            let name = scene::parse_scene(&text)?.name;
            let mut parts = vec!["render", text.as_str(), target.as_str(), transversal.as_deref().unwrap_or("")];
            parts.extend(shadow.iter().map(String::as_str));
            let report = Report {
                command: "render".into(),
                scene: name,
                inputs_digest: digest(&parts),
                results: vec![],
                artifacts: vec![out.display().to_string()],
                expectations_met: true,
                failures: vec![],
            };
            Ok(Output { stdout: report.to_json(), summary: format!("wrote {}\n", out.display()), code: 0 })
        }
        Command::Gen { kind, n, m, window, seed, out, seed_corpus } => {
            if let Some(dir) = seed_corpus {
                let mut summary = String::new();
                for (name, s) in scene::corpus_scenes() {
                    let p = dir.join(format!("{name}.json"));
                    write(&p, &scene::to_json(&s))?;
                    summary.push_str(&format!("wrote {}\n", p.display()));
                }
                return Ok(Output { stdout: String::new(), summary, code: 0 });
            }
            let kind = kind.ok_or_else(|| CliError::Usage("gen needs a kind or --seed-corpus".into()))?;
            let text = scene::to_json(&generate(&kind, n, m, &window, seed)?);
            match out {
                Some(p) => {
                    write(&p, &text)?;
                    Ok(Output { stdout: String::new(), summary: format!("wrote {}\n", p.display()), code: 0 })
                }
                None => Ok(Output { stdout: text, summary: String::new(), code: 0 }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(s: &Scene) -> String {
        scene::to_json(s)
    }

    #[test]
    fn triv_validates() {
        let r = validate_scene(&text(&scene::triv_scene(3, 3))).unwrap();
        assert!(r.expectations_met && r.results[0].pass);
    }

    #[test]
    fn linking_violation_fails_with_witness() {
        let r = validate_scene(&text(&scene::linking_violation_scene())).unwrap();
        assert!(!r.results[0].pass);
        assert!(!r.results[0].witnesses.is_empty());
        assert!(r.expectations_met);
    }

    #[test]
    fn malformed_scene_is_a_parse_error() {
        let e = validate_scene("{ not json").unwrap_err();
        assert_eq!(e.kind(), "ParseError");
    }

    #[test]
    fn unknown_check_and_target() {
        let t = text(&scene::triv_scene(2, 2));
        assert_eq!(run_checks(&t, &["bogus".into()], None).unwrap_err().kind(), "UnknownCheck");
        assert_eq!(render_scene(&t, "torus", None, &[]).unwrap_err().kind(), "UnknownTarget");
    }

    #[test]
    fn reports_are_deterministic() {
        let t = text(&scene::fig20_scene());
        let a = run_checks(&t, &[], None).unwrap().to_json();
        let b = run_checks(&t, &[], None).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn fig20_leftmost_crosses_seam() {
        let t = text(&scene::fig20_scene());
        let r = run_checks(&t, &["leftmost-crosses-seam".into()], None).unwrap();
        assert!(r.results[0].pass);
    }

    #[test]
    fn missing_basepoint_is_reported() {
        let t = text(&scene::branch1_scene());
        assert!(matches!(run_checks(&t, &["leftmost".into()], None), Err(CliError::Missing { .. })));
    }

    #[test]
    fn shipped_expectations_hold() {
        for (name, s) in scene::corpus_scenes() {
            let r = run_checks(&text(&s), &[], None).unwrap();
            assert!(r.expectations_met, "{name}: {:?}", r.failures);
        }
    }
}
