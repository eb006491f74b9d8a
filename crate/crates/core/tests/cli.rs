use std::path::Path;
use std::process::{Command, Output};

use contraction_lab::solvers::random_gaussian_system;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_contraction-lab"));
    c.env("RUST_LOG", "info");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_system(dir: &Path, name: &str, m: usize, n: usize, seed: u64) -> String {
    let sys = random_gaussian_system(m, n, seed).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, sys.to_text()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_writes_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let sys = write_system(dir.path(), "s.txt", 30, 10, 1);
    let out = dir.path().join("trace.csv");
    let o = run(&[
        "solve",
        "--method",
        "rk",
        "--system",
        &sys,
        "--steps",
        "1000",
        "--seed",
        "7",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,dist_sq,residual_sq,mnorm_sq");
    assert_eq!(lines.len(), 1002);
    assert!(stdout(&o).contains("final_residual_sq="));
}

#[test]
fn solve_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let sys = write_system(dir.path(), "s.txt", 16, 8, 2);
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("t{k}.csv"));
        let o = run(&[
            "solve",
            "--method",
            "block",
            "--block-size",
            "4",
            "--rht",
            "--system",
            &sys,
            "--steps",
            "200",
            "--seed",
            "5",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let other = dir.path().join("t_other.csv");
    let o = run(&[
        "solve",
        "--method",
        "block",
        "--block-size",
        "4",
        "--rht",
        "--system",
        &sys,
        "--steps",
        "200",
        "--seed",
        "6",
        "--output",
        other.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_ne!(std::fs::read(&other).unwrap(), outputs[0]);
}

#[test]
fn rht_logs_preserved_frobenius_norm() {
    let o = run(&[
        "solve",
        "--method",
        "block",
        "--block-size",
        "8",
        "--rht",
        "--random",
        "24x6",
        "--steps",
        "20",
        "--seed",
        "3",
        "--output",
        "/dev/null",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let log = stderr(&o);
    let line = log
        .lines()
        .find(|l| l.contains("RHT applied"))
        .expect("RHT log line");
    let norms: Vec<f64> = line
        .split(['=', ','])
        .filter_map(|p| p.trim().parse().ok())
        .collect();
    assert_eq!(norms.len(), 2);
    assert!((norms[0] - norms[1]).abs() <= 1e-8 * norms[0]);
}

#[test]
fn missing_x_star_uses_min_norm_solution() {
    let dir = tempfile::tempdir().unwrap();
    // Underdetermined 1x2 system x + y = 2; minimum-norm solution (1, 1).
    let path = dir.path().join("s.txt");
    std::fs::write(&path, "1 2\n1 1\n2\n").unwrap();
    let out = dir.path().join("t.csv");
    let o = run(&[
        "solve",
        "--system",
        path.to_str().unwrap(),
        "--steps",
        "3",
        "--seed",
        "1",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let row0: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row0[1].parse::<f64>().unwrap(), 2.0);
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert!(last[1].parse::<f64>().unwrap() < 1e-20);
}

#[test]
fn solver_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "solve",
        "--system",
        dir.path().join("missing.txt").to_str().unwrap(),
        "--seed",
        "1",
    ]);
    assert_eq!(code(&o), 1);
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "2 1\n1\n1\n1 2\n").unwrap();
    let o = run(&["solve", "--system", bad.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("inconsistent"));
    let o = run(&["solve", "--random", "4x3"]);
    assert_eq!(code(&o), 2, "seed is mandatory");
    let o = run(&[
        "solve",
        "--random",
        "4x3",
        "--seed",
        "1",
        "--method",
        "block",
        "--block-size",
        "9",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn recursion_halves_for_single_eigenvalue() {
    let o = run(&["recursion", "--spectrum", "0.5", "--steps", "10"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mu: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let expected: Vec<f64> = (1..=11).map(|k| 0.5f64.powi(k)).collect();
    assert_eq!(mu, expected);
}

#[test]
fn recursion_fit_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("mu.csv");
    let script = dir.path().join("plot.py");
    let o = run(&[
        "recursion",
        "--spectrum",
        "loglin(50,1,1e-20)",
        "--steps",
        "100000",
        "--fit",
        "1000:100000",
        "--output",
        csv.to_str().unwrap(),
        "--plot-script",
        script.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let slope: f64 = out
        .split("slope=")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .and_then(|s| s.parse().ok())
        .expect("slope reported");
    assert!((-0.80..=-0.72).contains(&slope), "{slope}");
    let py = std::fs::read_to_string(&script).unwrap();
    assert!(py.contains("set_xscale('log')") && py.contains(csv.to_str().unwrap()));

    let fit = run(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--window",
        "1000:100000",
        "--format",
        "json",
    ]);
    assert_eq!(code(&fit), 0, "{}", stderr(&fit));
    let v: serde_json::Value = serde_json::from_str(stdout(&fit).trim()).unwrap();
    assert!((v["slope"].as_f64().unwrap() - slope).abs() < 1e-6);
}

#[test]
fn recursion_rejects_bad_spectrum() {
    assert_eq!(code(&run(&["recursion", "--spectrum", "0.5,1.2"])), 2);
    assert_eq!(code(&run(&["recursion", "--spectrum", "loglin(3,1)"])), 2);
    assert_eq!(code(&run(&["recursion"])), 2);
}

#[test]
fn recursion_lower_bound_family_floor() {
    let o = run(&[
        "recursion",
        "--lower-bound-family",
        "2000",
        "--steps",
        "2000",
        "--output",
        "/dev/null",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let ratio: f64 = stdout(&o)
        .split("ratio=")
        .nth(1)
        .and_then(|s| s.trim().parse().ok())
        .expect("floor ratio reported");
    assert!(ratio >= 0.9);
}

#[test]
fn certify_exit_codes_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = run(&["certify", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("10/10 certificates verified"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let records = v.as_array().unwrap();
    assert_eq!(records.len(), 10);
    assert!(records
        .iter()
        .all(|r| r["verified"] == true && r["name"].is_string()));
    let f300 = records
        .iter()
        .find(|r| r["name"] == "f300-alpha34")
        .unwrap();
    assert_eq!(f300["witness"][0]["value"], "363307/7228832");

    let only = run(&["certify", "--only", "f300", "--format", "json"]);
    assert_eq!(code(&only), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&only)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);

    let tampered = run(&["certify", "--tamper"]);
    assert_eq!(code(&tampered), 3);
    assert!(stdout(&tampered).contains("FAIL f300-alpha34"));

    let inconclusive = run(&["certify", "--one-point", "3/4:3/5"]);
    assert_eq!(code(&inconclusive), 3);
    assert!(stdout(&inconclusive).contains("INCONCLUSIVE"));
    assert_eq!(
        code(&run(&["certify", "--one-point", "751/1000:499/500"])),
        0
    );
    assert_eq!(code(&run(&["certify", "--only", "nope"])), 2);
}

#[test]
fn simulate_reports_and_warns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mc.csv");
    let o = run(&[
        "simulate",
        "--random",
        "40x20",
        "--steps",
        "300",
        "--replicates",
        "50",
        "--seed",
        "4",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("averaged_bound=pass"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 302);

    let single = run(&[
        "simulate",
        "--random",
        "10x5",
        "--steps",
        "5",
        "--replicates",
        "1",
        "--seed",
        "4",
    ]);
    assert_eq!(code(&single), 0);
    assert!(stderr(&single).contains("single replicate"));
    let row = stdout(&single).lines().nth(2).unwrap().to_string();
    assert!(row.ends_with(",,,"), "{row}");

    let fixed = run(&[
        "simulate",
        "--process",
        "fixed",
        "--spectrum",
        "0.5,0.25",
        "--steps",
        "30",
        "--replicates",
        "3",
        "--seed",
        "1",
        "--output",
        "/dev/null",
    ]);
    assert_eq!(code(&fixed), 0);
    let err: f64 = stdout(&fixed)
        .split("closed_form_max_rel_error=")
        .nth(1)
        .and_then(|s| s.trim().parse().ok())
        .unwrap();
    assert!(err < 1e-12);
}

#[test]
fn simulate_is_reproducible_across_thread_counts() {
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let o = bin()
            .env("CONTRACTION_LAB_THREADS", threads)
            .args([
                "simulate",
                "--random",
                "12x6",
                "--steps",
                "50",
                "--replicates",
                "16",
                "--seed",
                "9",
            ])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        outputs.push(o.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(&cfg, "# recorded experiment\nspectrum = 0.5\nsteps = 4\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "recursion"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 6);
    let o = run(&[
        "recursion",
        "--config",
        cfg.to_str().unwrap(),
        "--steps",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 4);
    let missing = run(&[
        "--config",
        dir.path().join("none.cfg").to_str().unwrap(),
        "recursion",
    ]);
    assert_eq!(code(&missing), 1);
}
