use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::trial::{run_trial, TrialResult};
use crate::error::{Error, Result};
use crate::rates::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    NElements,
    TotalPowerDb,
    /// Moves `l_irs` along with it.
    KUsers,
    DR,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 4] = [
        SweepAxis::NElements,
        SweepAxis::TotalPowerDb,
        SweepAxis::KUsers,
        SweepAxis::DR,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::NElements => "n_elements",
            SweepAxis::TotalPowerDb => "total_power_db",
            SweepAxis::KUsers => "k_users",
            SweepAxis::DR => "d_r",
        }
    }

    /// Copy of `base` with this parameter set to `value`.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let count = || {
            if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(Error::InvalidConfig(format!(
                    "{} needs a positive integer, got {value}",
                    self.as_str()
                )))
            }
        };
        let mut cfg = base.clone();
        match self {
            SweepAxis::NElements => cfg.n_elements = count()?,
            SweepAxis::TotalPowerDb => cfg.total_power_db = value,
            SweepAxis::KUsers => {
                cfg.k_users = count()?;
                cfg.l_irs = cfg.k_users;
            }
            SweepAxis::DR => cfg.d_r = value,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|a| a.as_str() == s).ok_or_else(|| {
            Error::InvalidConfig(format!(
                "unknown sweep axis `{s}` (expected one of n_elements, total_power_db, k_users, d_r)"
            ))
        })
    }
}

/// Parses `axis=v1,v2,...`.
pub fn parse_sweep_spec(spec: &str) -> Result<(SweepAxis, Vec<f64>)> {
    let (axis, values) = spec
        .split_once('=')
        .ok_or_else(|| Error::InvalidConfig(format!("sweep must look like axis=v1,v2,... (got `{spec}`)")))?;
    let axis: SweepAxis = axis.trim().parse()?;
    let values = values
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("bad sweep value `{v}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one value".into()));
    }
    Ok((axis, values))
}

/// One CSV row: the mean sum rate of one algorithm at one axis value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Empty for a single-point run without a sweep axis.
    pub axis_value: Option<f64>,
    pub algorithm: Algorithm,
    pub mean_sum_rate: f64,
    pub std_error: f64,
    pub trials: usize,
    pub seed: u64,
    pub non_converged_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: Option<SweepAxis>,
    pub rows: Vec<SweepRow>,
    /// Singular drops redrawn across the whole run.
    pub redraws: u64,
}

/// Mean and standard error of the mean (sample standard deviation over `sqrt(n)`).
pub fn mean_and_std_error(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// All trials of `config`, in trial order, computed in parallel.
pub fn run_trials(config: &ScenarioConfig) -> Result<Vec<TrialResult>> {
    config.validate()?;
    (0..config.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect()
}

/// Per-algorithm averages over a set of trials.
pub fn summarize(config: &ScenarioConfig, axis_value: Option<f64>, trials: &[TrialResult]) -> Vec<SweepRow> {
    config
        .algorithms
        .iter()
        .map(|&algorithm| {
            let outcomes: Vec<_> = trials.iter().filter_map(|t| t.outcome(algorithm)).collect();
            let rates: Vec<f64> = outcomes.iter().map(|o| o.sum_rate).collect();
            let (mean, se) = mean_and_std_error(&rates);
            SweepRow {
                axis_value,
                algorithm,
                mean_sum_rate: mean,
                std_error: se,
                trials: rates.len(),
                seed: config.seed,
                non_converged_count: outcomes.iter().filter(|o| !o.converged).count(),
            }
        })
        .collect()
}

/// Runs `base` unchanged as a single point.
pub fn run_point(base: &ScenarioConfig) -> Result<SweepTable> {
    let trials = run_trials(base)?;
    Ok(SweepTable {
        axis: None,
        rows: summarize(base, None, &trials),
        redraws: trials.iter().map(|t| u64::from(t.redraws)).sum(),
    })
}

/// One row per `(value, algorithm)`, values in the given order.
pub fn run_sweep(base: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Result<SweepTable> {
    let configs = values
        .iter()
        .map(|&v| axis.apply(base, v))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(values.len() * base.algorithms.len());
    let mut redraws = 0;
    for (cfg, &v) in configs.iter().zip(values) {
        let trials = run_trials(cfg)?;
        redraws += trials.iter().map(|t| u64::from(t.redraws)).sum::<u64>();
        rows.extend(summarize(cfg, Some(v), &trials));
    }
    Ok(SweepTable {
        axis: Some(axis),
        rows,
        redraws,
    })
}
