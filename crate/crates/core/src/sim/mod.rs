//! Scenario configuration, seeded Monte-Carlo trials, parameter sweeps,
//! noise calibration and CSV output.

mod calibrate;
mod config;
mod output;
mod sweep;
mod trial;

pub use calibrate::{calibrate_noise, proposed_mean_rate, Calibration, CalibrationOptions, CALIBRATION_RTOL};
pub use config::{ScenarioConfig, CALIBRATED_NOISE_DB};
pub use output::{
    emit_csv, load_csv, metadata_path, read_csv, render_metadata, version_string, write_csv, write_metadata, CSV_HEADER,
};
pub use sweep::{
    mean_and_std_error, parse_sweep_spec, run_point, run_sweep, run_trials, summarize, SweepAxis, SweepRow, SweepTable,
};
pub use trial::{run_trial, stream_seed, AlgorithmOutcome, Drop, TrialResult, MAX_REDRAWS};
