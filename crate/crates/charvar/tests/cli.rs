use std::path::PathBuf;
use std::process::{Command, Output};

fn charvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charvar"))
        .args(args)
        .env_remove("CHARVAR_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("charvar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn classify_example() {
    let o = charvar(&["classify", "--coords", "[1,1,1,2]", "--signs", "[-1,-1,1,1]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "{\"euler\":0,\"signs\":[1,-1,-1]}\n");
}

#[test]
fn chart_file_is_accepted() {
    let path = scratch("chart.json");
    std::fs::write(&path, r#"{"coords": ["1", "1", "1", "2"], "signs": [-1, -1, 1, 1]}"#).unwrap();
    let o = charvar(&["classify", "--coords", path.to_str().unwrap()]);
    assert_eq!(stdout(&o), "{\"euler\":0,\"signs\":[1,-1,-1]}\n");
}

#[test]
fn switch_involution_suite_passes() {
    let o = charvar(&["verify", "--suite", "switch-involution", "--count", "1000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("\"pass\":true"));
}

#[test]
fn empty_component_is_a_domain_error() {
    let o = charvar(&["sample", "--euler", "0", "--signs", "+++"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty component"));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(charvar(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(charvar(&["classify", "--coords"]).status.code(), Some(64));
    assert_eq!(charvar(&["verify", "--tolerance", "0"]).status.code(), Some(64));
}

#[test]
fn version_and_suite_list() {
    let v = charvar(&["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("schema 1.0"));
    let l = stdout(&charvar(&["verify", "--list"]));
    let names: Vec<&str> = l.lines().collect();
    assert_eq!(
        names,
        [
            "components",
            "switch-involution",
            "invariance",
            "gti-equivalence",
            "reduction-termination",
            "hyperbolicity-scan",
            "e0-dichotomy",
            "domination",
            "omega-dynamics",
            "trace-variety"
        ]
    );
}

#[test]
fn unknown_suite_is_a_domain_error() {
    assert_eq!(charvar(&["verify", "--suite", "nope"]).status.code(), Some(1));
}

#[test]
fn pairing_hook_flips_gti_suite() {
    let printed = charvar(&["verify", "--suite", "gti-equivalence", "--count", "400", "--seed", "1"]);
    let swapped =
        charvar(&["verify", "--suite", "gti-equivalence", "--count", "400", "--seed", "1", "--pairing", "swapped"]);
    assert_eq!(printed.status.code(), Some(2));
    assert_eq!(swapped.status.code(), Some(0), "{}", stdout(&swapped));
}

#[test]
fn identical_config_gives_identical_bytes() {
    for args in [
        &["sample", "--euler", "-1", "--signs", "-++", "--count", "25", "--seed", "11"][..],
        &["verify", "--suite", "invariance", "--count", "60", "--seed", "3"][..],
        &["reduce", "--coords", "[5,2,3,7]", "--signs", "[1,-1,1,-1]"][..],
    ] {
        let a = charvar(args);
        let b = charvar(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn seed_falls_back_to_environment() {
    let flag = charvar(&["sample", "--euler", "0", "--signs", "+--", "--count", "3", "--seed", "42"]);
    let env = Command::new(env!("CARGO_BIN_EXE_charvar"))
        .args(["sample", "--euler", "0", "--signs", "+--", "--count", "3"])
        .env("CHARVAR_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
    let zero = charvar(&["sample", "--euler", "0", "--signs", "+--", "--count", "3"]);
    assert_ne!(flag.stdout, zero.stdout);
}

#[test]
fn exact_backend_prints_rationals() {
    let o = stdout(&charvar(&["sample", "--euler", "1", "--signs", "+++", "--count", "4", "--seed", "5"]));
    assert!(o.contains('/') && !o.contains('.'));
    let f = stdout(&charvar(&["sample", "--euler", "1", "--signs", "+++", "--count", "4", "--seed", "5", "--backend", "float"]));
    assert!(f.contains('.'));
}

#[test]
fn traces_and_switch_examples() {
    let o = stdout(&charvar(&["traces", "--coords", "[1,1,1,2]", "--signs", "[-1,-1,1,1]"]));
    assert!(o.contains("{\"curve\":\"d\",\"pair\":[1,2],\"result\":{\"abs_trace\":\"3/2\",\"kind\":\"elliptic\"}}"), "{o}");
    let o = stdout(&charvar(&["switch", "--coords", "[4,1,1,1]", "--signs", "[1,-1,1,1]", "--along", "t4"]));
    assert_eq!(o, "{\"coords\":[\"16\",\"6\",\"2\",\"48\"],\"signs\":[1,1,-1,1],\"admissible\":true}\n");
}

#[test]
fn reduce_writes_diagnostics_csv() {
    let path = scratch("diag.csv");
    let o = charvar(&[
        "reduce",
        "--coords",
        "[5,2,3,7]",
        "--signs",
        "[1,-1,1,-1]",
        "--diagnostics",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("step,a,b,c,region,u,h,k\n"));
    assert!(stdout(&o).contains("\"outcome\""));
}

#[test]
fn orbit_csv_has_invariant_column() {
    let path = scratch("orbit.csv");
    let o = charvar(&[
        "orbit",
        "--space",
        "omega",
        "--start",
        r#"{"a":"1/3","c":"2/5","d":"1/2"}"#,
        "--steps",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "step,a,c,d,k");
    assert_eq!(lines.len(), 6);
    assert!(lines[1..].iter().all(|l| l.ends_with(",-39/20")));

    let path = scratch("trace.csv");
    charvar(&["orbit", "--space", "trace", "--start", "[0,0,0,4,2,2,2]", "--steps", "3", "--out", path.to_str().unwrap()]);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("step,a,b,c,d,x,y,z,residual\n"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn scan_reports_tree_size() {
    let o = stdout(&charvar(&["scan", "--coords", "[4,1,1,1]", "--signs", "[1,-1,1,1]", "--depth", "3"]));
    assert!(o.contains("\"triangulations\":53"), "{o}");
    assert!(o.contains("\"non_hyperbolic\":[]"));
}
