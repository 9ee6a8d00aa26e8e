use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::ScenarioConfig;
use crate::beamforming::{PhaseAlphabet, PhaseBook};
use crate::channel::{make_drop, Geometry};
use crate::error::{Error, Result};
use crate::matching::{
    distance_matching, exhaustive_best_matching, proposed_matching, random_matching, ProposedOutcome, StabilizeOptions,
};
use crate::rates::{Algorithm, LinkEvaluator, Matching};

/// Singular-precoder drops are redrawn at most this many times per trial.
pub const MAX_REDRAWS: u32 = 16;

const STREAM_DROP: u64 = 0;
const STREAM_ASSOCIATION: u64 = 1;
const STREAM_RANDOM: u64 = 2;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one random stream, a pure function of its coordinates.
pub fn stream_seed(seed: u64, trial_index: u64, attempt: u32, stream: u64) -> u64 {
    [trial_index, u64::from(attempt), stream]
        .into_iter()
        .fold(splitmix64(seed), |acc, x| splitmix64(acc ^ x))
}

fn stream_rng(seed: u64, trial_index: u64, attempt: u32, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, trial_index, attempt, stream))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmOutcome {
    pub algorithm: Algorithm,
    pub sum_rate: f64,
    pub per_user_rates: Vec<f64>,
    /// IRS index of each user.
    pub matching: Vec<usize>,
    /// Exchange swaps applied; zero for algorithms without a repair stage.
    pub stage2_iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial_index: u64,
    /// Drops discarded because the precoder was singular.
    pub redraws: u32,
    /// In the order of `config.algorithms`.
    pub outcomes: Vec<AlgorithmOutcome>,
}

impl TrialResult {
    pub fn outcome(&self, algorithm: Algorithm) -> Option<&AlgorithmOutcome> {
        self.outcomes.iter().find(|o| o.algorithm == algorithm)
    }

    pub fn sum_rate(&self, algorithm: Algorithm) -> Option<f64> {
        self.outcome(algorithm).map(|o| o.sum_rate)
    }
}

/// One drop of geometry and fading with its phase book and rate evaluator.
pub struct Drop {
    pub geometry: Geometry<f64>,
    pub evaluator: LinkEvaluator<f64>,
}

impl Drop {
    pub fn generate(config: &ScenarioConfig, trial_index: u64, attempt: u32) -> Result<Self> {
        let mut rng = stream_rng(config.seed, trial_index, attempt, STREAM_DROP);
        let geometry = Geometry::deploy(&mut rng, config.k_users, config.l_irs, config.d_r)?;
        let channels = make_drop(&mut rng, &geometry, &config.fading_params(), config.dims())?;
        let book = PhaseBook::build(&channels, &PhaseAlphabet::new(config.b_bits)?)?;
        let evaluator = LinkEvaluator::new(&channels, &book, config.budget())?;
        Ok(Self { geometry, evaluator })
    }
}

fn outcome(
    evaluator: &LinkEvaluator<f64>,
    matching: &Matching,
    algorithm: Algorithm,
    iterations: usize,
    converged: bool,
) -> Result<AlgorithmOutcome> {
    let report = evaluator.evaluate(matching)?;
    Ok(AlgorithmOutcome {
        algorithm,
        sum_rate: report.sum,
        per_user_rates: report.per_user,
        matching: matching.irs_of_user().to_vec(),
        stage2_iterations: iterations,
        converged,
    })
}

fn evaluate_drop(config: &ScenarioConfig, trial_index: u64, attempt: u32) -> Result<Vec<AlgorithmOutcome>> {
    let drop = Drop::generate(config, trial_index, attempt)?;
    let eval = &drop.evaluator;
    let mut proposed: Option<ProposedOutcome> = None;
    let mut out = Vec::with_capacity(config.algorithms.len());
    for &algorithm in &config.algorithms {
        let result = match algorithm {
            Algorithm::Proposed | Algorithm::GsOnly => {
                if proposed.is_none() {
                    let mut rng = stream_rng(config.seed, trial_index, attempt, STREAM_ASSOCIATION);
                    proposed = Some(proposed_matching(eval, &mut rng, &StabilizeOptions::default())?);
                }
                let p = proposed.as_ref().expect("just computed");
                if algorithm == Algorithm::Proposed {
                    outcome(
                        eval,
                        &p.stage2.matching,
                        algorithm,
                        p.stage2.iterations,
                        p.stage2.converged(),
                    )?
                } else {
                    outcome(eval, &p.stage1, algorithm, 0, true)?
                }
            }
            Algorithm::Distance => outcome(eval, &distance_matching(&drop.geometry)?, algorithm, 0, true)?,
            Algorithm::Random => {
                let mut rng = stream_rng(config.seed, trial_index, attempt, STREAM_RANDOM);
                outcome(eval, &random_matching(&mut rng, config.k_users)?, algorithm, 0, true)?
            }
            Algorithm::Exhaustive => outcome(eval, &exhaustive_best_matching(eval)?.0, algorithm, 0, true)?,
        };
        out.push(result);
    }
    Ok(out)
}

/// Runs every configured algorithm on the same drop.
///
/// The drop, the association matrix and the random baseline each use their
/// own stream derived from `(seed, trial_index, attempt)`. A drop whose
/// zero-forcing precoder turns out singular is discarded and redrawn under the
/// next attempt number.
pub fn run_trial(config: &ScenarioConfig, trial_index: u64) -> Result<TrialResult> {
    config.validate()?;
    for attempt in 0..MAX_REDRAWS {
        match evaluate_drop(config, trial_index, attempt) {
            Ok(outcomes) => {
                return Ok(TrialResult {
                    trial_index,
                    redraws: attempt,
                    outcomes,
                })
            }
            Err(Error::Singular { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::TooManyRedraws {
        trial: trial_index,
        attempts: MAX_REDRAWS,
    })
}
