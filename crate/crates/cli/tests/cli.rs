use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_crystal-zeta"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("crystal-zeta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn preset_list_has_four_models() {
    let out = stdout(&["preset", "list"]);
    let names: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["line", "square", "triangular", "hexagonal"]);
}

#[test]
fn hexagonal_info() {
    let out = stdout(&["lattice", "info", "--preset", "hexagonal"]);
    assert_eq!(out, "name,vertices,oriented_edges,betti,dim,maximal_abelian\nhexagonal,2,6,2,2,true\n");
}

#[test]
fn triangular_info_is_not_maximal() {
    let out = stdout(&["lattice", "info", "--preset", "triangular", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["betti"], 3);
    assert_eq!(v[0]["dim"], 2);
    assert_eq!(v[0]["maximal_abelian"], false);
}

#[test]
fn zero_steps_is_one_row_at_origin() {
    let out = stdout(&["walk", "simulate", "--preset", "square", "--steps", "0", "--paths", "1"]);
    assert_eq!(out, "path,step,vertex,cell0,cell1,x0,x1\n0,0,x,0,0,0.0,0.0\n");
}

#[test]
fn simulation_output_is_reproducible() {
    let a = tmp("a.csv");
    let b = tmp("b.csv");
    let args = |p: &PathBuf, threads: &str| {
        let out = run(&[
            "walk", "simulate", "--preset", "hexagonal", "--steps", "20", "--paths", "50", "--seed", "3",
            "--threads", threads, "--out", p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    };
    args(&a, "1");
    args(&b, "4");
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    assert_eq!(String::from_utf8(x).unwrap().lines().count(), 1 + 50 * 21);
    let other = stdout(&["walk", "simulate", "--preset", "hexagonal", "--steps", "20", "--paths", "50", "--seed", "4"]);
    assert_ne!(other.as_bytes(), std::fs::read(&a).unwrap());
}

#[test]
fn config_file_matches_preset() {
    let path = tmp("square.json");
    let out = run(&["preset", "show", "square", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let from_file = stdout(&["dist", "levy", "--config", path.to_str().unwrap()]);
    let from_preset = stdout(&["dist", "levy", "--preset", "square"]);
    assert_eq!(from_file, from_preset);
}

#[test]
fn triangular_kernel_size_follows_n() {
    for (n, want) in [("1", 7), ("3", 37)] {
        let out = stdout(&["dist", "table", "--preset", "triangular", "--n", n, "--law", "kernel"]);
        assert_eq!(out.lines().count() - 1, want);
    }
}

#[test]
fn square_oracle_mass_at_origin() {
    let out = stdout(&["dist", "table", "--preset", "square", "--radius", "30", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let origin = v.as_array().unwrap().iter().find(|r| r["x0"] == 0.0 && r["x1"] == 0.0).unwrap();
    assert!((origin["mass"].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-12);
}

#[test]
fn zeta_values() {
    let out = stdout(&["zeta", "eval", "--function", "line-poisson", "--s", "2"]);
    let re: f64 = out.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((re - std::f64::consts::E).abs() < 1e-14);
    let out = stdout(&["zeta", "eval", "--function", "riemann", "--s", "2"]);
    let re: f64 = out.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-13);
}

#[test]
fn verify_exit_codes() {
    let ok = run(&["verify", "cf", "--preset", "square", "--paths", "20000", "--seed", "1"]);
    assert_eq!(ok.status.code(), Some(0));
    let strict = run(&["verify", "cf", "--preset", "square", "--paths", "20000", "--seed", "1", "--c", "0.01"]);
    assert_eq!(strict.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("FAIL"));
}

#[test]
fn usage_and_config_errors_exit_2() {
    let cases: [&[&str]; 5] = [
        &["lattice", "info", "--preset", "cubic"],
        &["lattice", "info"],
        &["dist", "levy", "--preset", "hexagonal"],
        &["zeta", "eval", "--preset", "line", "--s", "0"],
        &["no-such-command"],
    ];
    let messages = ["unknown preset", "exactly one of", "no finite Euler product", "pole", "unrecognized"];
    for (args, msg) in cases.iter().zip(messages) {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(msg), "{args:?}: {err}");
    }
}

#[test]
fn degenerate_realization_fails_check() {
    let path = tmp("parallel.json");
    std::fs::write(
        &path,
        r#"{"name": "doubled", "vertices": ["x"], "offsets": [[0, 0]],
            "edges": [{"from": "x", "to": "x", "voltage": [1, 0]},
                      {"from": "x", "to": "x", "voltage": [0, 1]},
                      {"from": "x", "to": "x", "voltage": [1, 0]}]}"#,
    )
    .unwrap();
    let out = run(&["lattice", "check", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("parallel_edges"));
    assert_eq!(run(&["lattice", "check", "--preset", "hexagonal"]).status.code(), Some(0));
}
