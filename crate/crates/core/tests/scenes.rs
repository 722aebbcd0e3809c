use std::path::{Path, PathBuf};
use std::process::Command;

use bifol_core::cli::{render_scene, run_checks};
use bifol_core::scene::{corpus_scenes, load_str, parse_scene, to_json};

fn scenes_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenes")
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", p.as_ref().display()))
}

#[test]
fn shipped_scenes_match_their_generators() {
    for (name, s) in corpus_scenes() {
        let on_disk = read(scenes_dir().join(format!("{name}.json")));
        assert_eq!(on_disk, to_json(&s), "{name}.json is stale; regenerate with `bifol gen --seed-corpus`");
    }
}

#[test]
fn scenes_round_trip() {
    for (name, _) in corpus_scenes() {
        let text = read(scenes_dir().join(format!("{name}.json")));
        let a = load_str(&text).unwrap();
        let again = to_json(&parse_scene(&text).unwrap());
        let b = load_str(&again).unwrap();
        assert_eq!(a.complex.to_raw(), b.complex.to_raw(), "{name}");
        assert_eq!(text, again, "{name}");
    }
}

#[test]
fn renders_match_goldens() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let triv = read(scenes_dir().join("triv3.json"));
    assert_eq!(render_scene(&triv, "orbit", None, &[]).unwrap(), read(golden.join("triv3-orbit.svg")));
    let skew = read(scenes_dir().join("skew.json"));
    assert_eq!(render_scene(&skew, "cylinder", None, &[]).unwrap(), read(golden.join("skew-cylinder.svg")));
}

#[test]
fn reports_are_byte_identical() {
    let text = read(scenes_dir().join("skew.json"));
    let a = run_checks(&text, &[], None).unwrap();
    let b = run_checks(&text, &[], None).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.inputs_digest.len(), 64);
}

fn bifol(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bifol")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn binary_exit_codes() {
    for (name, _) in corpus_scenes() {
        let p = scenes_dir().join(format!("{name}.json"));
        let (code, stdout) = bifol(&["run", "--scene", p.to_str().unwrap()]);
        assert_eq!(code, 0, "{name}: {stdout}");
    }
    let fig20 = scenes_dir().join("fig20.json");
    let (code, stdout) = bifol(&["run", "--scene", fig20.to_str().unwrap(), "--check", "nonsense"]);
    assert_eq!(code, 2);
    assert!(stdout.contains("UnknownCheck"));
    // Expecting a failure that does not happen is itself a failure.
    let lv = scenes_dir().join("linking-violation.json");
    let mut s = parse_scene(&read(&lv)).unwrap();
    s.expectations.insert("validate".into(), true);
    let tmp = std::env::temp_dir().join(format!("bifol-flipped-{}.json", std::process::id()));
    std::fs::write(&tmp, to_json(&s)).unwrap();
    let (code, stdout) = bifol(&["validate", "--scene", tmp.to_str().unwrap()]);
    std::fs::remove_file(&tmp).ok();
    assert_eq!(code, 1);
    assert!(stdout.contains("\"failures\": [\n    \"validate\""), "{stdout}");
}

#[test]
fn dynamics_command_reports_both_windows() {
    let p = scenes_dir().join("hyp1.json");
    let (code, stdout) = bifol(&["dynamics", "--scene", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("dynamics@4") && stdout.contains("dynamics@6"));
    assert!(stdout.contains("not conjugate"));
}
