//! Black-box tests of the harness binary: artifact layout, exit codes,
//! stdout contracts, and byte-level reproducibility.

mod common;

use common::*;

use std::fs;

use tempfile::tempdir;

/// Small but real optimization: full pipeline, fraction of the default cost.
const SMALL: &str = "swarm_size = 6\ngenerations = 2\nts_iterations = 2\nts_neighborhood = 3\nhorizon = 1.0\n";

fn write_small_config(dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("run.cfg");
    fs::write(&path, SMALL).unwrap();
    path
}

#[test]
fn optimize_writes_all_four_artifacts() {
    let tmp = tempdir().unwrap();
    let cfg = write_small_config(tmp.path());
    let out_dir = tmp.path().join("run");
    let out = run(&[
        "optimize",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));

    for name in ["best_params.txt", "history.csv", "trace_best.csv", "run_meta.txt"] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }

    let history = read(&out_dir.join("history.csv"));
    assert_eq!(
        csv_header(&history),
        ["phase", "generation", "iteration", "evaluations", "best_mse"]
    );
    let rows = csv_rows(&history);
    assert_eq!(rows.len(), 2 + 2 * 2, "one pso row and two ts rows per generation");
    let mses: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(mses.windows(2).all(|w| w[1] <= w[0]), "history not monotone: {mses:?}");
    let evals: Vec<usize> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(evals.windows(2).all(|w| w[0] < w[1]), "evaluations not increasing");

    let stdout_text = stdout(&out);
    assert_eq!(field(&stdout_text, "evaluations"), "24");
    let reported: f64 = field(&stdout_text, "best_mse").parse().unwrap();
    assert_eq!(reported, *mses.last().unwrap());
}

#[test]
fn run_meta_records_seed_source_and_config_echo() {
    let tmp = tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, format!("{SMALL}seed = 11\n")).unwrap();

    let from_config = tmp.path().join("a");
    let out = run(&[
        "optimize",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        from_config.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let meta = read(&from_config.join("run_meta.txt"));
    assert_eq!(field(&meta, "seed"), "11");
    assert_eq!(field(&meta, "seed_source"), "config");
    assert!(meta.contains("prng = "), "missing PRNG id:\n{meta}");
    assert!(meta.contains("[config]"), "missing config echo:\n{meta}");
    assert!(meta.contains("swarm_size = 6"), "echo lost a key:\n{meta}");

    let overridden = tmp.path().join("b");
    let out = run(&[
        "optimize",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "99",
        "--out",
        overridden.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let meta = read(&overridden.join("run_meta.txt"));
    assert_eq!(field(&meta, "seed"), "99");
    assert_eq!(field(&meta, "seed_source"), "cli");
}

#[test]
fn same_seed_runs_are_byte_identical() {
    let tmp = tempdir().unwrap();
    let cfg = write_small_config(tmp.path());
    let dirs = [tmp.path().join("r1"), tmp.path().join("r2")];
    for dir in &dirs {
        let out = run(&[
            "optimize",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "5",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    }
    for name in ["history.csv", "best_params.txt", "trace_best.csv"] {
        assert_eq!(
            fs::read(dirs[0].join(name)).unwrap(),
            fs::read(dirs[1].join(name)).unwrap(),
            "{name} differs between identical runs"
        );
    }
}

#[test]
fn malformed_config_exits_2_with_no_partial_outputs() {
    let tmp = tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "swarm_size = 6\nvmax == 0.4\n").unwrap();
    let out_dir = tmp.path().join("never");
    let out = run(&[
        "optimize",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
    assert!(!out_dir.exists(), "partial outputs written after a config error");
}

#[test]
fn unknown_config_key_exits_2() {
    let tmp = tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "swarm = 6\n").unwrap();
    let out = run(&[
        "optimize",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("unknown key"), "{}", stderr(&out));
}

#[test]
fn missing_config_file_exits_3() {
    let tmp = tempdir().unwrap();
    let out = run(&[
        "optimize",
        "--config",
        tmp.path().join("absent.cfg").to_str().unwrap(),
        "--out",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn optimize_without_any_output_directory_exits_2() {
    let tmp = tempdir().unwrap();
    let cfg = write_small_config(tmp.path());
    let out = run(&["optimize", "--config", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("out"), "{}", stderr(&out));
}

#[test]
fn config_out_dir_is_the_fallback_output_directory() {
    let tmp = tempdir().unwrap();
    let out_dir = tmp.path().join("from_config");
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, format!("{SMALL}out_dir = {}\n", out_dir.display())).unwrap();
    let out = run(&["optimize", "--config", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    assert!(out_dir.join("best_params.txt").exists());
}

fn optimized_params(tmp: &std::path::Path) -> std::path::PathBuf {
    let cfg = write_small_config(tmp);
    let out_dir = tmp.join("opt");
    let out = run(&[
        "optimize",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    out_dir.join("best_params.txt")
}

#[test]
fn simulate_prints_a_settling_time_and_writes_the_trace() {
    let tmp = tempdir().unwrap();
    let params = optimized_params(tmp.path());
    let trace_path = tmp.path().join("trace.csv");
    let out = run(&[
        "simulate",
        "--params",
        params.to_str().unwrap(),
        "--theta0",
        "0.22",
        "--out",
        trace_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let line = stdout(&out).trim().to_string();
    assert!(
        line == "unstable" || line.parse::<f64>().is_ok(),
        "unexpected stdout {line:?}"
    );
    let trace = read(&trace_path);
    assert_eq!(csv_header(&trace), ["t", "theta", "theta_dot", "u", "e"]);
    assert!(!csv_rows(&trace).is_empty());
}

#[test]
fn simulate_from_equilibrium_with_symmetric_params_settles_at_zero() {
    // An odd-symmetric controller commands u = 0 at the origin, so the
    // equilibrium trace never leaves the band.
    let tmp = tempdir().unwrap();
    let params = tmp.path().join("sym.txt");
    fs::write(
        &params,
        "a1 = -0.5\na2 = 0\na3 = 0.5\nb1 = -0.5\nb2 = 0\nb3 = 0.5\n\
         c1 = -0.6\nc2 = 0\nc3 = 0.6\nGe = 1.25\nGde = 0.45\nGu = 45\n",
    )
    .unwrap();
    let out = run(&[
        "simulate",
        "--params",
        params.to_str().unwrap(),
        "--theta0",
        "0",
        "--out",
        tmp.path().join("eq.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn ill_ordered_parameter_file_exits_2() {
    let tmp = tempdir().unwrap();
    let params = optimized_params(tmp.path());
    let mut text = read(&params);
    // Swap the a-triple order so a2 - a1 goes negative.
    let a1 = field(&text, "a1");
    let a2 = field(&text, "a2");
    text = text
        .replace(&format!("a1 = {a1}"), &format!("a1 = {a2}"))
        .replace(&format!("a2 = {a2}"), &format!("a2 = {a1}"));
    let bad = tmp.path().join("bad_params.txt");
    fs::write(&bad, text).unwrap();

    let out = run(&[
        "simulate",
        "--params",
        bad.to_str().unwrap(),
        "--theta0",
        "0.22",
        "--out",
        tmp.path().join("t.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("a2"), "{}", stderr(&out));
}

#[test]
fn sweep_lays_out_a_pinned_endpoint_linspace() {
    let tmp = tempdir().unwrap();
    let params = optimized_params(tmp.path());
    let out_dir = tmp.path().join("sweep");
    let out = run(&[
        "sweep",
        "--params",
        params.to_str().unwrap(),
        "--min",
        "0.22",
        "--max",
        "0.8",
        "--steps",
        "4",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));

    for i in 0..4 {
        assert!(out_dir.join(format!("trace_{i:03}.csv")).exists());
    }
    let summary = read(&out_dir.join("sweep_summary.csv"));
    assert_eq!(
        csv_header(&summary),
        ["theta0", "settled", "settling_time", "final_abs_theta"]
    );
    let rows = csv_rows(&summary);
    assert_eq!(rows.len(), 4);
    let theta0s: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let expected = [0.22, 0.22 + 0.58 / 3.0, 0.22 + 2.0 * 0.58 / 3.0, 0.8];
    for (got, want) in theta0s.iter().zip(expected) {
        assert!((got - want).abs() < 1e-12, "linspace {theta0s:?}");
    }
    assert_eq!(theta0s[3], 0.8, "endpoint must be exact");
    for row in &rows {
        assert!(row[1] == "true" || row[1] == "false");
        assert!(row[3].parse::<f64>().is_ok());
    }
}

#[test]
fn sweep_with_one_step_exits_2() {
    let tmp = tempdir().unwrap();
    let params = optimized_params(tmp.path());
    let out = run(&[
        "sweep",
        "--params",
        params.to_str().unwrap(),
        "--min",
        "0.22",
        "--max",
        "0.8",
        "--steps",
        "1",
        "--out",
        tmp.path().join("s").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn plot_writes_deterministic_svg_with_one_polyline_per_column() {
    let tmp = tempdir().unwrap();
    let params = optimized_params(tmp.path());
    let trace_path = tmp.path().join("trace.csv");
    let out = run(&[
        "simulate",
        "--params",
        params.to_str().unwrap(),
        "--theta0",
        "0.22",
        "--out",
        trace_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));

    let svgs = [tmp.path().join("a.svg"), tmp.path().join("b.svg")];
    for svg in &svgs {
        let out = run(&[
            "plot",
            "--in",
            trace_path.to_str().unwrap(),
            "--x",
            "t",
            "--y",
            "theta,theta_dot",
            "--out",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    }
    let a = fs::read(&svgs[0]).unwrap();
    assert_eq!(a, fs::read(&svgs[1]).unwrap(), "plot is not byte-deterministic");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches("<polyline").count(), 2);
    assert!(text.contains("</svg>"));
}

#[test]
fn history_plot_ordinates_never_rise() {
    let tmp = tempdir().unwrap();
    let cfg = write_small_config(tmp.path());
    let out_dir = tmp.path().join("run");
    let out = run(&[
        "optimize",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));

    let svg_path = tmp.path().join("h.svg");
    let out = run(&[
        "plot",
        "--in",
        out_dir.join("history.csv").to_str().unwrap(),
        "--x",
        "evaluations",
        "--y",
        "best_mse",
        "--out",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));

    let svg = read(&svg_path);
    let points_attr = svg
        .lines()
        .find(|l| l.starts_with("<polyline"))
        .and_then(|l| l.split("points=\"").nth(1))
        .and_then(|l| l.split('"').next())
        .expect("polyline with points");
    // Pixel y grows downward, so a falling mse curve has non-decreasing y.
    let ys: Vec<f64> = points_attr
        .split_whitespace()
        .map(|p| p.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(ys.windows(2).all(|w| w[1] >= w[0]), "ordinates rose: {ys:?}");
}

#[test]
fn plot_with_unknown_column_exits_2() {
    let tmp = tempdir().unwrap();
    let csv = tmp.path().join("d.csv");
    fs::write(&csv, "a,b\n1,2\n3,4\n").unwrap();
    let out = run(&[
        "plot",
        "--in",
        csv.to_str().unwrap(),
        "--x",
        "a",
        "--y",
        "zzz",
        "--out",
        tmp.path().join("p.svg").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("zzz"), "{}", stderr(&out));
}

#[test]
fn unknown_flags_exit_2() {
    let out = run(&["optimize", "--bogus"]);
    assert_eq!(exit_code(&out), 2);
}
