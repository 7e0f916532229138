//! The four subcommands. Configuration and parameter problems surface as
//! [`CliError::Input`] before anything is written, so a failed run leaves no
//! partial artifacts behind.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fuzzy_pendulum::fuzzy::ControllerParams;
use fuzzy_pendulum::hybrid::{self, total_evaluations};
use fuzzy_pendulum::params_file::{self, ParamsFileError};
use fuzzy_pendulum::plant::PlantParams;
use fuzzy_pendulum::rng::PRNG_ID;
use fuzzy_pendulum::sim::{self, settling_band, settling_time, write_trace_csv, SimConfig};

use crate::config::RunConfig;
use crate::plot::{column_index, numeric_column, read_table, render_chart};
use crate::CliError;

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Fs(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Fs(format!("{}: {e}", path.display())))
}

fn load_params(path: &Path) -> Result<ControllerParams, CliError> {
    params_file::load(path).map_err(|e| match e {
        ParamsFileError::Io(io) => CliError::Fs(format!("{}: {io}", path.display())),
        other => CliError::Input(format!("{}: {other}", path.display())),
    })
}

pub fn optimize(
    config_path: &Path,
    seed_override: Option<u64>,
    out_arg: Option<&Path>,
) -> Result<(), CliError> {
    let text = read_text(config_path)?;
    let (mut cfg, explicit_seed) = RunConfig::parse(&text)?;
    let seed_source = match (seed_override, explicit_seed) {
        (Some(s), _) => {
            cfg.seed = s;
            "cli"
        }
        (None, true) => "config",
        (None, false) => "default",
    };
    let out_dir: PathBuf = match (out_arg, &cfg.out_dir) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(d)) => PathBuf::from(d),
        (None, None) => {
            return Err(CliError::Input(
                "no output directory: pass --out or set out_dir in the config".into(),
            ))
        }
    };

    let h = cfg.hybrid();
    let plant = cfg.plant();
    let sim_cfg = cfg.sim();
    let gains = cfg.gains();

    let started = Instant::now();
    let (best, best_mse, history) = hybrid::optimize(&h, &plant, &sim_cfg, gains);
    let wall = started.elapsed().as_secs_f64();
    let evaluations = total_evaluations(&h);

    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Fs(format!("{}: {e}", out_dir.display())))?;

    params_file::save(&out_dir.join("best_params.txt"), &best)
        .map_err(|e| CliError::Fs(format!("best_params.txt: {e}")))?;

    let mut history_csv = Vec::new();
    history
        .write_csv(&mut history_csv)
        .map_err(|e| CliError::Fs(format!("history.csv: {e}")))?;
    write_file(&out_dir.join("history.csv"), &history_csv)?;

    let trace = sim::simulate(&best, &plant, &sim_cfg);
    let mut trace_csv = Vec::new();
    write_trace_csv(&mut trace_csv, &trace)
        .map_err(|e| CliError::Fs(format!("trace_best.csv: {e}")))?;
    write_file(&out_dir.join("trace_best.csv"), &trace_csv)?;

    let mut meta = String::new();
    meta.push_str(&format!("seed = {}\n", cfg.seed));
    meta.push_str(&format!("seed_source = {seed_source}\n"));
    meta.push_str(&format!("prng = {PRNG_ID}\n"));
    meta.push_str(&format!("evaluations = {evaluations}\n"));
    meta.push_str(&format!("best_mse = {best_mse}\n"));
    meta.push_str(&format!("wall_clock_seconds = {wall:.3}\n"));
    meta.push_str("[config]\n");
    meta.push_str(&cfg.normalized());
    write_file(&out_dir.join("run_meta.txt"), meta.as_bytes())?;

    println!("best_mse = {best_mse}");
    println!("evaluations = {evaluations}");
    println!("wall_clock_seconds = {wall:.3}");
    println!("artifacts in {}", out_dir.display());
    Ok(())
}

pub fn simulate(params_path: &Path, theta0: f64, out_csv: &Path) -> Result<(), CliError> {
    if !theta0.is_finite() {
        return Err(CliError::Input(format!("theta0 must be finite, got {theta0}")));
    }
    let params = load_params(params_path)?;
    let plant = PlantParams::default();
    let sim_cfg = SimConfig {
        theta0,
        ..SimConfig::default()
    };
    let trace = sim::simulate(&params, &plant, &sim_cfg);
    let mut csv = Vec::new();
    write_trace_csv(&mut csv, &trace).map_err(|e| CliError::Fs(e.to_string()))?;
    write_file(out_csv, &csv)?;
    match settling_time(&trace, settling_band(theta0)) {
        Some(t) => println!("{t}"),
        None => println!("unstable"),
    }
    Ok(())
}

pub fn sweep(
    params_path: &Path,
    min: f64,
    max: f64,
    steps: usize,
    out_dir: &Path,
) -> Result<(), CliError> {
    if steps < 2 {
        return Err(CliError::Input(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(CliError::Input(format!(
            "need finite min < max, got {min} and {max}"
        )));
    }
    let params = load_params(params_path)?;
    let plant = PlantParams::default();
    fs::create_dir_all(out_dir).map_err(|e| CliError::Fs(format!("{}: {e}", out_dir.display())))?;

    let mut summary = String::from("theta0,settled,settling_time,final_abs_theta\n");
    for i in 0..steps {
        // The last point is pinned to `max` so the endpoint is exact.
        let theta0 = if i == steps - 1 {
            max
        } else {
            min + i as f64 * (max - min) / (steps - 1) as f64
        };
        let sim_cfg = SimConfig {
            theta0,
            ..SimConfig::default()
        };
        let trace = sim::simulate(&params, &plant, &sim_cfg);
        let mut csv = Vec::new();
        write_trace_csv(&mut csv, &trace).map_err(|e| CliError::Fs(e.to_string()))?;
        write_file(&out_dir.join(format!("trace_{i:03}.csv")), &csv)?;

        let st = settling_time(&trace, settling_band(theta0));
        let final_abs = trace
            .samples
            .last()
            .map(|s| s.theta.abs())
            .unwrap_or_else(|| theta0.abs());
        summary.push_str(&format!(
            "{theta0},{},{},{final_abs:.9e}\n",
            st.is_some(),
            st.map(|t| t.to_string()).unwrap_or_else(|| "nan".into()),
        ));
    }
    write_file(&out_dir.join("sweep_summary.csv"), summary.as_bytes())?;
    println!("wrote {steps} traces to {}", out_dir.display());
    Ok(())
}

pub fn plot(input: &Path, x: &str, ys: &[String], out_svg: &Path) -> Result<(), CliError> {
    if ys.is_empty() {
        return Err(CliError::Input("need at least one y column".into()));
    }
    let text = read_text(input)?;
    let (headers, rows) = read_table(&text)?;
    let xi = column_index(&headers, x)?;
    let xs = numeric_column(&rows, xi, x)?;
    let mut series = Vec::new();
    for name in ys {
        let idx = column_index(&headers, name)?;
        series.push((name.clone(), numeric_column(&rows, idx, name)?));
    }
    let svg = render_chart(&xs, &series, x)?;
    write_file(out_svg, svg.as_bytes())
}
