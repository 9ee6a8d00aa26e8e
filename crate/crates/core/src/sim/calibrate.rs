use super::config::ScenarioConfig;
use super::sweep::{mean_and_std_error, run_trials};
use crate::error::{Error, Result};
use crate::rates::Algorithm;

/// The averaged sum rate must land within this fraction of the target.
pub const CALIBRATION_RTOL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    /// Noise search interval in dB, low end first.
    pub bracket_db: (f64, f64),
    /// Stop once within this fraction of the target; tighter than
    /// [`CALIBRATION_RTOL`] to leave margin for re-evaluation.
    pub rtol: f64,
    pub max_iterations: usize,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            bracket_db: (-160.0, 0.0),
            rtol: 0.002,
            max_iterations: 80,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub noise_power_db: f64,
    /// Mean proposed sum rate at `noise_power_db`.
    pub achieved: f64,
    pub std_error: f64,
    pub iterations: usize,
}

/// Mean proposed-matching sum rate of `config` at the given noise floor.
pub fn proposed_mean_rate(config: &ScenarioConfig, noise_power_db: f64) -> Result<(f64, f64)> {
    let cfg = ScenarioConfig {
        noise_power_db,
        algorithms: vec![Algorithm::Proposed],
        ..config.clone()
    };
    let trials = run_trials(&cfg)?;
    let rates: Vec<f64> = trials.iter().filter_map(|t| t.sum_rate(Algorithm::Proposed)).collect();
    Ok(mean_and_std_error(&rates))
}

/// Bisects the noise floor until the averaged proposed sum rate at ring radius
/// `d_r` matches `target`. Every evaluation reuses the same seeded trials, so
/// the search runs on a fixed sample.
pub fn calibrate_noise(
    config: &ScenarioConfig,
    target: f64,
    d_r: f64,
    options: &CalibrationOptions,
) -> Result<Calibration> {
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "target sum rate must be positive, got {target}"
        )));
    }
    let (mut lo, mut hi) = options.bracket_db;
    if !(lo < hi) {
        return Err(Error::InvalidConfig("calibration bracket must have low < high".into()));
    }
    let cfg = ScenarioConfig { d_r, ..config.clone() };
    cfg.validate()?;

    let (rate_lo, _) = proposed_mean_rate(&cfg, lo)?;
    let (rate_hi, _) = proposed_mean_rate(&cfg, hi)?;
    if !(rate_lo >= target && target >= rate_hi) {
        return Err(Error::Unreachable {
            target,
            low_noise_db: lo,
            rate_at_low_noise: rate_lo,
            high_noise_db: hi,
            rate_at_high_noise: rate_hi,
        });
    }

    let mut best: Option<Calibration> = None;
    for iteration in 1..=options.max_iterations {
        let mid = 0.5 * (lo + hi);
        let (rate, se) = proposed_mean_rate(&cfg, mid)?;
        let candidate = Calibration {
            noise_power_db: mid,
            achieved: rate,
            std_error: se,
            iterations: iteration,
        };
        let closer = best
            .as_ref()
            .is_none_or(|b| (rate - target).abs() < (b.achieved - target).abs());
        if closer {
            best = Some(candidate);
        }
        if (rate - target).abs() <= options.rtol * target {
            break;
        }
        if rate > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let best = best.expect("at least one iteration");
    if (best.achieved - target).abs() > CALIBRATION_RTOL * target {
        return Err(Error::Unreachable {
            target,
            low_noise_db: lo,
            rate_at_low_noise: rate_lo,
            high_noise_db: hi,
            rate_at_high_noise: rate_hi,
        });
    }
    Ok(best)
}
