mod common;

use std::fs;
use std::path::Path;

use sphere_tikhonov::cli::run_command;
use sphere_tikhonov::io::{load_problem, load_solution};
use sphere_tikhonov::objective_original;
use tempfile::TempDir;

fn run(args: &[&str]) -> i32 {
    run_command(std::iter::once("sphere-tikhonov").chain(args.iter().copied()))
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn simulate_chain(dir: &TempDir, name: &str, seed: &str) -> String {
    let path = p(dir, name);
    let code = run(&["simulate", "--topology", "chain", "--length", "20", "--kappa", "10", "--seed", seed, "-o", &path]);
    assert_eq!(code, 0);
    path
}

fn assert_objective_matches(problem: &Path, solution: &Path) {
    let problem = load_problem(problem).unwrap();
    let file = load_solution(solution).unwrap();
    let x = file.signal_for(&problem).unwrap();
    let recomputed = objective_original(&problem, &x).unwrap();
    let reported = file.objective_original.unwrap();
    assert!((recomputed - reported).abs() <= 1e-10, "{recomputed} vs {reported}");
}

#[test]
fn simulate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = simulate_chain(&dir, "a.json", "7");
    let b = simulate_chain(&dir, "b.json", "7");
    let c = simulate_chain(&dir, "c.json", "8");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
    assert_eq!(load_problem(Path::new(&a)).unwrap().num_nodes(), 20);
}

#[test]
fn smooth_with_each_solver_reports_consistent_objective() {
    let dir = TempDir::new().unwrap();
    let prob = simulate_chain(&dir, "p.json", "3");
    for solver in ["sdp", "baseline", "local"] {
        let out = p(&dir, &format!("{solver}.json"));
        let code = run(&["smooth", "-i", &prob, "-o", &out, "--solver", solver]);
        assert_eq!(code, 0, "solver {solver}");
        assert_objective_matches(Path::new(&prob), Path::new(&out));
        let file = load_solution(Path::new(&out)).unwrap();
        if solver == "sdp" {
            assert!(file.tight);
            assert!(file.objective_relaxed.is_some());
            assert_eq!(file.per_edge.len(), 19);
        } else {
            assert!(!file.tight);
            assert!(file.gap.is_none());
        }
    }
}

#[test]
fn tight_instance_passes_require_tight() {
    let dir = TempDir::new().unwrap();
    let prob = simulate_chain(&dir, "p.json", "11");
    let out = p(&dir, "out.json");
    assert_eq!(run(&["smooth", "-i", &prob, "-o", &out, "--solver", "sdp", "--require-tight"]), 0);
}

#[test]
fn antipodal_instance_fails_require_tight() {
    let dir = TempDir::new().unwrap();
    let prob = p(&dir, "anti.json");
    fs::write(&prob, common::ANTIPODAL_JSON).unwrap();
    let out = p(&dir, "out.json");
    assert_eq!(run(&["smooth", "-i", &prob, "-o", &out, "--require-tight", "--max-iters", "2000"]), 3);
    let file = load_solution(Path::new(&out)).unwrap();
    assert!(!file.tight);
    assert!(file.gap.unwrap().is_finite());
    assert_objective_matches(Path::new(&prob), Path::new(&out));
    // Without the flag the unconverged run still writes results.
    assert_eq!(run(&["smooth", "-i", &prob, "-o", &out, "--max-iters", "50"]), 2);
    assert!(!load_solution(Path::new(&out)).unwrap().converged);
}

#[test]
fn validation_and_parse_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "out.json");
    assert_eq!(run(&["smooth", "-i", &p(&dir, "missing.json"), "-o", &out]), 1);
    assert_eq!(run(&["smooth", "--bogus"]), 1);
    assert_eq!(run(&["frobnicate"]), 1);
    let bad = p(&dir, "bad.json");
    fs::write(&bad, r#"{"nodes":[{"id":"a","y":[1,0],"w":1}],"edges":[]}"#).unwrap();
    assert_eq!(run(&["smooth", "-i", &bad, "-o", &out]), 1);
    // Smoothing data with no fixed node is not an interpolation problem.
    let prob = simulate_chain(&dir, "p.json", "1");
    assert_eq!(run(&["interpolate", "-i", &prob, "-o", &out]), 1);
    assert_eq!(run(&["smooth", "-i", &prob, "-o", &out, "--tol-feas", "-1"]), 1);
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]), 0);
    assert_eq!(run(&["--version"]), 0);
}

#[test]
fn interpolate_with_truth_metrics() {
    let dir = TempDir::new().unwrap();
    let prob = p(&dir, "p.json");
    let truth = p(&dir, "truth.json");
    let code = run(&[
        "simulate", "--topology", "grid2d", "--rows", "3", "--cols", "4", "--fixed-fraction", "0.5",
        "--seed", "5", "-o", &prob, "--truth", &truth,
    ]);
    assert_eq!(code, 0);
    let out = p(&dir, "out.json");
    let metrics = p(&dir, "m.json");
    let code = run(&["interpolate", "-i", &prob, "-o", &out, "--metrics", &metrics, "--truth", &truth]);
    assert_eq!(code, 0);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&metrics).unwrap()).unwrap();
    let mae = m["mean_angular_error_deg"].as_f64().unwrap();
    assert!((0.0..90.0).contains(&mae));
    assert_objective_matches(Path::new(&prob), Path::new(&out));
}

#[test]
fn certify_bounds_a_candidate() {
    let dir = TempDir::new().unwrap();
    let prob = simulate_chain(&dir, "p.json", "2");
    let base = p(&dir, "base.json");
    assert_eq!(run(&["smooth", "-i", &prob, "-o", &base, "--solver", "baseline"]), 0);
    let out = p(&dir, "cert.json");
    assert_eq!(run(&["certify", "-i", &prob, "-o", &out, "--solution", &base, "--require-tight"]), 0);
    let file = load_solution(Path::new(&out)).unwrap();
    assert!(file.tight);
    let line = file.diagnostics.iter().find(|d| d.starts_with("candidate")).unwrap();
    let bound: f64 = line.rsplit("bound=").next().unwrap().parse().unwrap();
    assert!(bound >= -1e-8);
}

#[test]
fn custom_topology_and_bench() {
    let dir = TempDir::new().unwrap();
    let graph = p(&dir, "g.json");
    fs::write(&graph, common::ANTIPODAL_JSON).unwrap();
    let prob = p(&dir, "p.json");
    let code = run(&["simulate", "--topology", "custom-file", "--graph", &graph, "--seed", "4", "-o", &prob]);
    assert_eq!(code, 0);
    assert_eq!(load_problem(Path::new(&prob)).unwrap().num_edges(), 2);
    assert_eq!(run(&["simulate", "--topology", "custom-file", "-o", &prob]), 1);

    let csv = p(&dir, "bench.csv");
    let args = ["bench", "--topology", "chain", "--length", "6", "--instances", "3", "--seed", "9", "-o", &csv];
    assert_eq!(run(&args), 0);
    let first = fs::read_to_string(&csv).unwrap();
    assert_eq!(first.lines().count(), 4);
    assert_eq!(run(&args), 0);
    assert_eq!(first, fs::read_to_string(&csv).unwrap());
}

#[test]
fn binary_reports_errors_on_stderr() {
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_sphere-tikhonov"))
        .args(["smooth", "-i", "/nonexistent/p.json", "-o", "/nonexistent/o.json"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).starts_with("error:"));
}
