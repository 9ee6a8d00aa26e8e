//! Link-level Monte-Carlo simulator for multi-IRS assisted multiuser MISO downlink.
//!
//! The numeric core ([`linalg`], [`channel`], [`beamforming`], [`rates`]) is
//! generic over the real scalar type through [`Real`]; the aliases below fix it
//! to `f64`, which is what the simulation harness in [`sim`] runs on.
//!
//! A trial draws one channel realization, designs every IRS phase
//! configuration with the greedy discrete-phase search, and compares user-IRS
//! assignments: two-stage stable matching (Gale-Shapley plus exchange repair),
//! Gale-Shapley alone, nearest-distance, random, and an exhaustive optimum.

// `!(x > y)` is used on purpose so NaN lands on the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod beamforming;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod matching;
pub mod rates;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use rates::{Algorithm, Matching};
pub use scalar::Real;

pub type ComplexVector = linalg::Vector<f64>;
pub type ComplexMatrix = linalg::Matrix<f64>;
pub type ChannelSet = channel::ChannelSet<f64>;
pub type Geometry = channel::Geometry<f64>;
pub type FadingParams = channel::FadingParams<f64>;
pub type PhaseAlphabet = beamforming::PhaseAlphabet<f64>;
pub type Precoder = beamforming::Precoder<f64>;
pub type LinkBudget = rates::LinkBudget<f64>;
pub type LinkEvaluator = rates::LinkEvaluator<f64>;
pub type PreferenceList = matching::PreferenceList<f64>;

/// Single-precision variants of the numeric core.
pub mod f32 {
    pub type ComplexVector = crate::linalg::Vector<f32>;
    pub type ComplexMatrix = crate::linalg::Matrix<f32>;
    pub type ChannelSet = crate::channel::ChannelSet<f32>;
    pub type Geometry = crate::channel::Geometry<f32>;
    pub type FadingParams = crate::channel::FadingParams<f32>;
    pub type PhaseAlphabet = crate::beamforming::PhaseAlphabet<f32>;
    pub type LinkBudget = crate::rates::LinkBudget<f32>;
    pub type LinkEvaluator = crate::rates::LinkEvaluator<f32>;
}
