use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn segregate(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_segregate"));
    cmd.args(args);
    for var in ["SEGREGATE_TOL", "SEGREGATE_MAX_ITER", "SEGREGATE_LIMIT_TOL", "SEGREGATE_SLACK"] {
        cmd.env_remove(var);
    }
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Small 1D scenario so the pipeline tests stay fast.
fn small_line(dir: &Path) -> PathBuf {
    let path = dir.join("line.cfg");
    fs::write(
        &path,
        "[domain]\nshape = \"interval\"\nextent = [0.0, 1.0]\nresolution = 65\n\
         [boundary]\narcs = [[[0.75, 0.25, 1.0]], [[0.25, 0.75, 1.0]]]\n\
         [solver]\nomega = 1.8\nladder = [1e-1, 1e-2, 1e-3, 1e-4]\n",
    )
    .unwrap();
    path
}

fn read_values(path: &Path) -> Vec<(f64, f64)> {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',').map(|v| v.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn decoupled_solve_matches_harmonic_extensions() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenarios().join("1d_two.cfg");
    let out = segregate(
        &["solve-eps", "--epsilon", "1e6", "--config", s(&cfg), "--out", s(tmp.path())],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("eps_1e6");
    for (x, v) in read_values(&dir.join("u1.csv")) {
        assert!((v - (1.0 - x)).abs() < 1e-5, "u1({x}) = {v}");
    }
    for (x, v) in read_values(&dir.join("u2.csv")) {
        assert!((v - x).abs() < 1e-5, "u2({x}) = {v}");
    }
    let report = json(&dir.join("report.json"));
    assert_eq!(report["converged"], Value::Bool(true));
}

#[test]
fn corrupted_field_is_reported_and_fails_class_s() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_line(tmp.path());
    let out_dir = tmp.path().join("out");
    let out = segregate(&["limit", "--method", "two_species", "--config", s(&cfg), "--out", s(&out_dir)], &[]);
    assert_eq!(code(&out), 0);
    let fields = out_dir.join("limit_two_species");
    let u1 = fields.join("u1.csv");
    let mut lines: Vec<String> = fs::read_to_string(&u1).unwrap().lines().map(String::from).collect();
    let x = lines[10].split(',').next().unwrap().to_string();
    lines[10] = format!("{x},-2.5e-1");
    fs::write(&u1, lines.join("\n") + "\n").unwrap();

    let out = segregate(&["verify", s(&fields), "--config", s(&cfg), "--out", s(&out_dir)], &[]);
    assert_eq!(code(&out), 0);
    let cert = json(&out_dir.join("certificate.json"));
    assert_eq!(cert["defect.nonnegativity.u1"].as_f64(), Some(0.25));
    assert_eq!(cert["class_s"], Value::Bool(false));

    let out = segregate(
        &["verify", s(&fields), "--require-class-s", "--config", s(&cfg), "--out", s(&out_dir)],
        &[],
    );
    assert_eq!(code(&out), 4);
}

#[test]
fn comparing_a_tuple_with_itself_gives_zeros() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_line(tmp.path());
    let out_dir = tmp.path().join("out");
    assert_eq!(
        code(&segregate(&["limit", "--method", "two_species", "--config", s(&cfg), "--out", s(&out_dir)], &[])),
        0
    );
    let a = out_dir.join("limit_two_species");
    let out = segregate(&["compare", s(&a), s(&a), "--config", s(&cfg), "--out", s(&out_dir)], &[]);
    assert_eq!(code(&out), 0);
    let doc = json(&out_dir.join("compare.json"));
    for key in ["headline_max_norm", "max_norm.u1", "h1.u2", "pq.P", "pq.Q"] {
        assert_eq!(doc[key].as_f64(), Some(0.0), "{key}");
    }
}

#[test]
fn malformed_config_exits_2_with_location() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "[domain]\nshape = \"interval\"\nextent = [0.0, 1.0\nresolution = 9\n").unwrap();
    let out = segregate(&["continuation", "--config", s(&cfg), "--out", s(tmp.path())], &[]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "{err}");

    fs::write(
        &cfg,
        "[domain]\nshape = \"interval\"\nextent = [0.0, 1.0]\nresolution = 9\n\
         [boundary]\narcs = [[[0.75, 0.25, 1.0]], [[0.2, 0.8, 1.0]]]\n",
    )
    .unwrap();
    let out = segregate(&["continuation", "--config", s(&cfg), "--out", s(tmp.path())], &[]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("overlap"));

    let out = segregate(&["continuation", "--out", s(tmp.path())], &[]);
    assert_eq!(code(&out), 2);
}

#[test]
fn iteration_limit_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_line(tmp.path());
    let out = segregate(
        &["solve-eps", "--epsilon", "1e-3", "--config", s(&cfg), "--out", s(tmp.path())],
        &[("SEGREGATE_MAX_ITER", "5")],
    );
    assert_eq!(code(&out), 3);
    assert!(tmp.path().join("eps_1e-3/u1.csv").is_file());
}

#[test]
fn two_species_method_rejects_three_species() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenarios().join("square_three.cfg");
    let out = segregate(&["limit", "--method", "two_species", "--config", s(&cfg), "--out", s(tmp.path())], &[]);
    assert_eq!(code(&out), 2);
}

#[test]
fn full_pipeline_on_a_small_interval() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_line(tmp.path());
    let out_dir = tmp.path().join("out");
    let run = |args: &[&str]| {
        let mut all = args.to_vec();
        all.extend(["--config", s(&cfg), "--out", s(&out_dir)]);
        let out = segregate(&all, &[]);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        out
    };
    run(&["continuation"]);
    run(&["limit", "--method", "two_species"]);
    run(&["limit", "--method", "direct", "--init", "zero"]);

    let ladder = fs::read_to_string(out_dir.join("ladder.csv")).unwrap();
    let rows: Vec<&str> = ladder.lines().collect();
    assert_eq!(rows[0], "epsilon,iterations,residual,overlap,wall_time");
    assert_eq!(rows.len(), 1 + 4 + 2);
    assert!(rows[5].starts_with("0.0,") && rows[6].starts_with("0.0,"));

    let closed = out_dir.join("limit_two_species");
    let direct = out_dir.join("limit_direct");
    run(&["verify", s(&direct), s(&closed), "--require-class-s"]);
    let cert = json(&out_dir.join("certificate.json"));
    assert_eq!(cert["class_s"], Value::Bool(true));
    assert_eq!(cert["second.class_s"], Value::Bool(true));
    assert!(cert["pq.P"].as_f64().unwrap() < 1e-10);
    assert_eq!(cert["pq.P_node"].as_array().unwrap().len(), 1);

    run(&["rate", s(&out_dir), s(&closed)]);
    let rates = fs::read_to_string(out_dir.join("rates.csv")).unwrap();
    assert_eq!(rates.lines().next(), Some("species,epsilon,h1_distance"));
    assert_eq!(rates.lines().count(), 1 + 2 * 4);
    let fit = json(&out_dir.join("ratefit.json"));
    assert!(fit["u1"]["slope"].as_f64().unwrap() > 0.1);
    assert!(fit["worst"]["r_squared"].as_f64().unwrap() > 0.9);

    let out = run(&["verify", s(&out_dir.join("eps_1e-4"))]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("class F: pass"));
}

#[test]
fn sequential_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_line(tmp.path());
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let dir = tmp.path().join(run);
        let out = segregate(&["solve-eps", "--epsilon", "1e-3", "--seed", "7", "--config", s(&cfg), "--out", s(&dir)], &[]);
        assert_eq!(code(&out), 0);
        outputs.push(fs::read(dir.join("eps_1e-3/u2.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn threaded_solve_agrees_with_sequential() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_line(tmp.path());
    let mut fields = Vec::new();
    for (run, threads) in [("seq", None), ("par", Some("2"))] {
        let dir = tmp.path().join(run);
        let mut args = vec!["solve-eps", "--epsilon", "1e-2", "--config", s(&cfg), "--out", s(&dir)];
        if let Some(t) = threads {
            args.extend(["--threads", t]);
        }
        assert_eq!(code(&segregate(&args, &[])), 0);
        fields.push(read_values(&dir.join("eps_1e-2/u1.csv")));
    }
    for ((_, a), (_, b)) in fields[0].iter().zip(&fields[1]) {
        assert!((a - b).abs() < 1e-9);
    }
}
