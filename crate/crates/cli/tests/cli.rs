use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_imperfect-crack"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

const ZERO_LOAD: &str = r#"
schema = 1
name = "zero-load"
mode = "iii"

[material_i]
preset = "A"

[material_ii]
preset = "B"

[interface]
kappa_star = 5.0

[grid]
n_neg = 40
n_pos = 40
"#;

const UNBALANCED: &str = r#"
schema = 1
name = "unbalanced"
mode = "iii"

[material_i]
preset = "A"

[material_ii]
preset = "C"

[interface]
kappa = 2.0

[[loading.terms]]
face = "upper"
component = 3
amplitude = -1.0
length = 1.0
power = 0
"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = run(&["run", "fig3-asymmetric", "--n-neg", "60", "--n-pos", "60", "-o", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["fig3-asymmetric.csv", "fig3-asymmetric.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let csv = std::fs::read_to_string(a.join("fig3-asymmetric.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# imperfect-crack profile v1"));
    assert_eq!(lines.next(), Some("x1,jump_u,jump_u_star,traction,t_star,region"));
    assert_eq!(lines.count(), 61 + 61);
}

#[test]
fn parallel_batch_matches_sequential_runs() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("seq");
    let par = dir.path().join("par");
    let names = ["fig2-AA-kappa5", "fig2-AB-kappa5", "fig2-AC-kappa5"];
    let grid = ["--n-neg", "40", "--n-pos", "40"];
    let mut args = vec!["run"];
    args.extend(names);
    args.extend(grid);
    let s = run(&[&args[..], &["--sequential", "-o", seq.to_str().unwrap()]].concat());
    let p = run(&[&args[..], &["--jobs", "3", "-o", par.to_str().unwrap()]].concat());
    assert!(s.status.success() && p.status.success());
    for n in names {
        let f = format!("{n}.csv");
        assert_eq!(std::fs::read(seq.join(&f)).unwrap(), std::fs::read(par.join(&f)).unwrap());
    }
}

#[test]
fn zero_loading_passes_oracle_trivially() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "zero.toml", ZERO_LOAD);
    let out = dir.path().join("out");
    let o = run(&["oracle-check", &file, "--xi-max", "20", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS zero-load"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("zero-load.oracle.json")).unwrap()).unwrap();
    assert_eq!(report["comparison"]["max_relative"], 0.0);
}

#[test]
fn unbalanced_loading_is_refused_before_solving() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "unbalanced.toml", UNBALANCED);
    let out = dir.path().join("out");
    for cmd in ["run", "oracle-check"] {
        let o = run(&[cmd, &file, "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2));
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains("\"class\":\"validation\"") && err.contains("self-balanced"), "{err}");
    }
    assert!(!out.exists());
}

#[test]
fn exit_codes_by_class() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["run", "no-such-scenario", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    let bad_kappa = write(dir.path(), "k.toml", &ZERO_LOAD.replace("kappa_star = 5.0", "kappa = -1.0"));
    let o = run(&["run", &bad_kappa, "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["run", "fig2-AA-kappa5", "--formulation", "nope", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    let o = run(&[
        "oracle-check",
        "fig3-asymmetric",
        "--n-neg",
        "40",
        "--n-pos",
        "40",
        "--xi-max",
        "20",
        "--threshold",
        "1e-9",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("FAIL fig3-asymmetric"));
}

#[test]
fn listing_and_showing() {
    let o = run(&["list-scenarios"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for n in ["fig2-AC-kappa5", "fig3-asymmetric", "fig6-inplane", "table1-AC-kappa5", "table2-inplane"] {
        assert!(text.contains(n), "{n}");
    }
    let o = run(&["show-scenario", "fig6-inplane"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("k11 = 10.0"));
}

#[test]
fn in_plane_table_has_component_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", "table2-inplane", "--n-neg", "40", "--n-pos", "40", "-o", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("table2-inplane.csv")).unwrap();
    assert_eq!(
        csv.lines().nth(1),
        Some("x1,jump_u_1,jump_u_star_1,traction_1,t_star_1,jump_u_2,jump_u_star_2,traction_2,t_star_2,region")
    );
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("table2-inplane.json")).unwrap()).unwrap();
    for k in ["h11", "h22", "beta", "gamma", "delta1", "delta2", "xi1", "xi2", "d0", "d1", "d2"] {
        assert!(meta["constants"][k].is_number(), "{k}");
    }
}
