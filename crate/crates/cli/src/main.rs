use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use irs_match::sim::{
    calibrate_noise, emit_csv, metadata_path, parse_sweep_spec, run_point, run_sweep, write_metadata,
    CalibrationOptions, ScenarioConfig,
};
use irs_match::{Algorithm, Error};

#[derive(Parser)]
#[command(
    name = "irs-sim",
    version,
    about = "Monte-Carlo sum-rate simulator for multi-IRS user matching"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run trials, optionally sweeping one parameter, and write a CSV table.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// `axis=v1,v2,...` with axis one of n_elements, total_power_db, k_users, d_r.
        #[arg(long)]
        sweep: Option<String>,
        /// Comma-separated subset of proposed, gs_only, distance, random, exhaustive.
        #[arg(long, value_delimiter = ',')]
        algorithms: Option<Vec<String>>,
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
    },
    /// Find the noise floor at which the proposed matching averages `target` bits/s/Hz.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        target: f64,
        /// File that receives the calibrated noise power in dB.
        #[arg(long)]
        out: PathBuf,
        /// Ring radius to calibrate at; defaults to the config value.
        #[arg(long)]
        d_r: Option<f64>,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_) => 1,
        _ => 2,
    }
}

fn load(
    path: &PathBuf,
    seed: Option<u64>,
    trials: Option<usize>,
    algorithms: Option<Vec<String>>,
) -> Result<ScenarioConfig, Error> {
    let mut cfg = ScenarioConfig::load(path)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(trials) = trials {
        cfg.trials = trials;
    }
    if let Some(names) = algorithms {
        cfg.algorithms = names
            .iter()
            .map(|n| n.trim().parse::<Algorithm>())
            .collect::<Result<_, _>>()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn simulate(
    config: PathBuf,
    seed: Option<u64>,
    trials: Option<usize>,
    sweep: Option<String>,
    algorithms: Option<Vec<String>>,
    out: PathBuf,
) -> Result<(), Error> {
    let cfg = load(&config, seed, trials, algorithms)?;
    let table = match &sweep {
        Some(spec) => {
            let (axis, values) = parse_sweep_spec(spec)?;
            run_sweep(&cfg, axis, &values)?
        }
        None => run_point(&cfg)?,
    };
    emit_csv(&table.rows, &out)?;
    let axis = table.axis.map_or("none".to_string(), |a| a.to_string());
    write_metadata(
        metadata_path(&out),
        &cfg,
        &[
            ("command", "simulate".into()),
            ("sweep_axis", axis),
            ("redraws", table.redraws.to_string()),
        ],
    )?;
    for row in &table.rows {
        let at = row.axis_value.map_or(String::new(), |v| format!("{v:>8} "));
        eprintln!(
            "{at}{:<10} {:>9.4} +- {:.4}  ({} non-converged)",
            row.algorithm.to_string(),
            row.mean_sum_rate,
            row.std_error,
            row.non_converged_count
        );
    }
    Ok(())
}

fn calibrate(config: PathBuf, target: f64, out: PathBuf, d_r: Option<f64>) -> Result<(), Error> {
    let cfg = load(&config, None, None, None)?;
    let d_r = d_r.unwrap_or(cfg.d_r);
    let c = calibrate_noise(&cfg, target, d_r, &CalibrationOptions::default())?;
    std::fs::write(&out, format!("{}\n", c.noise_power_db))?;
    let calibrated = ScenarioConfig {
        noise_power_db: c.noise_power_db,
        ..cfg
    };
    write_metadata(
        metadata_path(&out),
        &calibrated,
        &[
            ("command", "calibrate".into()),
            ("target", target.to_string()),
            ("calibration_d_r", d_r.to_string()),
            ("achieved", c.achieved.to_string()),
            ("std_error", c.std_error.to_string()),
            ("bisection_steps", c.iterations.to_string()),
        ],
    )?;
    eprintln!(
        "noise_power_db = {} (mean proposed sum rate {:.4} +- {:.4})",
        c.noise_power_db, c.achieved, c.std_error
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Simulate {
            config,
            seed,
            trials,
            sweep,
            algorithms,
            out,
        } => simulate(config, seed, trials, sweep, algorithms, out),
        Command::Calibrate {
            config,
            target,
            out,
            d_r,
        } => calibrate(config, target, out, d_r),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
