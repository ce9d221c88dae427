use std::path::Path;
use std::process::{Command, Output};

fn signorini(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_signorini"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn solve(problem: &str, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "solve",
        "--problem",
        problem,
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    signorini(&args)
}

fn rows(dir: &Path) -> Vec<String> {
    std::fs::read_to_string(dir.join("convergence.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(str::to_string)
        .collect()
}

#[test]
fn ex72_writes_every_level() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve("ex72", dir.path(), &["--levels", "3", "--trace"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(rows(dir.path()).len(), 3);
    for k in 0..3 {
        for name in [
            format!("level_{k}.vtk"),
            format!("density_{k}.csv"),
            format!("pdas_{k}.csv"),
        ] {
            assert!(dir.path().join(&name).exists(), "missing {name}");
        }
    }
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("level")).count(), 3);
    // No exact solution: the error columns stay empty.
    assert!(rows(dir.path()).iter().all(|r| r.contains(",,,")));
}

#[test]
fn ex71_reports_error_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve(
        "ex71",
        dir.path(),
        &["--levels", "2", "--theta", "0.3", "--dump-matrices"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let config: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("config.json")).unwrap())
            .unwrap();
    assert_eq!(config["problem"], "ex71");
    assert_eq!(config["params"]["theta"], 0.3);
    assert_eq!(config["params"]["c0"], 0.45);
    assert!(dir.path().join("matrices_1").join("K.mtx").exists());
    for row in rows(dir.path()) {
        let err: f64 = row.split(',').nth(13).unwrap().parse().unwrap();
        assert!(err > 0.0);
    }
}

#[test]
fn uniform_runs_are_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        assert!(solve("ex71", dir.path(), &["--levels", "3", "--uniform"])
            .status
            .success());
    }
    let strip = |rows: Vec<String>| -> Vec<String> {
        rows.into_iter()
            .map(|r| r.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    let (ra, rb) = (strip(rows(a.path())), strip(rows(b.path())));
    assert_eq!(ra, rb);
    let ndof: Vec<usize> = ra
        .iter()
        .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    // Each level bisects every triangle once; two levels halve h, giving
    // 2(2n+1)² dofs for n = 4 and n = 8.
    assert_eq!(ndof[0], 162);
    assert_eq!(ndof[2], 578);
    assert!(ndof[0] < ndof[1] && ndof[1] < ndof[2]);
}

#[test]
fn problem_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("block.json");
    std::fs::write(
        &file,
        r#"{
            "name": "block",
            "material": {"young": 10.0, "poisson": 0.25},
            "tags": {"bottom": "C", "right": "N", "top": "D", "left": "N"},
            "body_force": [0.0, -1.0],
            "gap": {"constant": 0.001}
        }"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = solve(file.to_str().unwrap(), &out_dir, &["--levels", "2"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(rows(&out_dir).len(), 2);
}

#[test]
fn bad_arguments_fail() {
    let dir = tempfile::tempdir().unwrap();
    for extra in [
        &["--levels", "0"][..],
        &["--theta", "1.5"],
        &["--c0", "-1"],
        &["--n0", "0"],
    ] {
        let out = solve("ex71", dir.path(), extra);
        assert!(!out.status.success(), "{extra:?} accepted");
    }
    let out = solve("no-such-problem.json", dir.path(), &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-problem.json"));
    assert!(!signorini(&["solve"]).status.success());
}
