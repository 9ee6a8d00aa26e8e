//! Effective channels, SINR and achievable rates under a user-IRS matching.
//!
//! The free functions evaluate the downlink model straight from a
//! [`ChannelSet`] and [`PhaseBook`]. [`LinkEvaluator`] precomputes every
//! reflected row of a drop once and is what the matching algorithms use, since
//! they evaluate many candidate matchings over the same drop.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::beamforming::{reflected_row, zf_precoder, PhaseBook, PhaseConfig, Precoder};
use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Real;

/// Which procedure produced a matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Gale-Shapley followed by exchange-blocking-pair repair.
    Proposed,
    /// Gale-Shapley alone.
    GsOnly,
    Distance,
    Random,
    Exhaustive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Proposed,
        Algorithm::GsOnly,
        Algorithm::Distance,
        Algorithm::Random,
        Algorithm::Exhaustive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Proposed => "proposed",
            Algorithm::GsOnly => "gs_only",
            Algorithm::Distance => "distance",
            Algorithm::Random => "random",
            Algorithm::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm `{s}`")))
    }
}

/// One-to-one assignment between users and IRSs (`K = L`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    irs_of_user: Vec<usize>,
    user_of_irs: Vec<usize>,
    provenance: Algorithm,
}

impl Matching {
    /// Builds a matching from `irs_of_user[k] = l`, which must be a permutation.
    pub fn from_irs_of_user(irs_of_user: Vec<usize>, provenance: Algorithm) -> Result<Self> {
        let n = irs_of_user.len();
        if n == 0 {
            return Err(Error::invalid("empty matching"));
        }
        let mut user_of_irs = vec![usize::MAX; n];
        for (k, &l) in irs_of_user.iter().enumerate() {
            if l >= n || user_of_irs[l] != usize::MAX {
                return Err(Error::invalid(format!("{irs_of_user:?} is not a permutation")));
            }
            user_of_irs[l] = k;
        }
        Ok(Self {
            irs_of_user,
            user_of_irs,
            provenance,
        })
    }

    pub fn from_user_of_irs(user_of_irs: Vec<usize>, provenance: Algorithm) -> Result<Self> {
        let m = Self::from_irs_of_user(user_of_irs, provenance)?;
        Ok(Self {
            irs_of_user: m.user_of_irs,
            user_of_irs: m.irs_of_user,
            provenance,
        })
    }

    pub fn identity(n: usize, provenance: Algorithm) -> Self {
        Self::from_irs_of_user((0..n).collect(), provenance).expect("identity is a permutation")
    }

    pub fn len(&self) -> usize {
        self.irs_of_user.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irs_of_user.is_empty()
    }

    pub fn irs_of(&self, user: usize) -> usize {
        self.irs_of_user[user]
    }

    pub fn user_of(&self, irs: usize) -> usize {
        self.user_of_irs[irs]
    }

    pub fn irs_of_user(&self) -> &[usize] {
        &self.irs_of_user
    }

    pub fn user_of_irs(&self) -> &[usize] {
        &self.user_of_irs
    }

    pub fn provenance(&self) -> Algorithm {
        self.provenance
    }

    pub fn with_provenance(mut self, provenance: Algorithm) -> Self {
        self.provenance = provenance;
        self
    }

    /// IRSs `a` and `b` trade their users.
    pub fn swap_irs(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        let (ua, ub) = (self.user_of_irs[a], self.user_of_irs[b]);
        out.user_of_irs.swap(a, b);
        out.irs_of_user[ua] = b;
        out.irs_of_user[ub] = a;
        out
    }

    /// Structural check that both maps are mutually inverse permutations.
    pub fn is_consistent(&self) -> bool {
        self.irs_of_user.len() == self.user_of_irs.len()
            && self
                .irs_of_user
                .iter()
                .enumerate()
                .all(|(k, &l)| l < self.user_of_irs.len() && self.user_of_irs[l] == k)
    }
}

/// Transmit powers and the common noise floor, linear scale.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget<T> {
    pub per_user_power: Vec<T>,
    pub noise_power: T,
}

impl<T: Real> LinkBudget<T> {
    /// Total power split equally among `users`.
    pub fn equal_split(total_power: T, users: usize, noise_power: T) -> Self {
        Self {
            per_user_power: vec![total_power / T::lit(users as f64); users],
            noise_power,
        }
    }

    pub fn total_power(&self) -> T {
        self.per_user_power.iter().copied().sum()
    }
}

fn config_for(book: &PhaseBook, user: usize, irs: usize) -> Result<&PhaseConfig> {
    book.get(user, irs)
        .ok_or_else(|| Error::invalid(format!("no phase configuration for user {user} on IRS {irs}")))
}

fn check_matching<T: Real>(matching: &Matching, channels: &ChannelSet<T>) -> Result<()> {
    let dims = channels.dims();
    if matching.len() != dims.users || dims.users != dims.irs {
        return Err(Error::invalid(format!(
            "matching over {} agents does not fit {} users / {} IRSs",
            matching.len(),
            dims.users,
            dims.irs
        )));
    }
    Ok(())
}

/// Desired row channel `h_{d,k}^H + f_{k,l}^H Phi_{k,l} G_l`.
pub fn effective_channel<T: Real>(
    k: usize,
    irs: usize,
    channels: &ChannelSet<T>,
    book: &PhaseBook,
) -> Result<Vector<T>> {
    let config = config_for(book, k, irs)?;
    let mut h = channels.direct[k].conj();
    h.add_assign(&reflected_row(
        &channels.bs_irs[irs],
        &channels.irs_user[k][irs],
        config,
    )?);
    Ok(h)
}

/// Leakage `sum_{l != mu(k)} f_{k,l}^H Phi_l G_l`, each IRS using the design for its own user.
pub fn interference_channel<T: Real>(
    k: usize,
    matching: &Matching,
    channels: &ChannelSet<T>,
    book: &PhaseBook,
) -> Result<Vector<T>> {
    check_matching(matching, channels)?;
    let mut z = Vector::zeros(channels.dims().antennas);
    for l in (0..matching.len()).filter(|&l| l != matching.irs_of(k)) {
        let config = config_for(book, matching.user_of(l), l)?;
        z.add_assign(&reflected_row(&channels.bs_irs[l], &channels.irs_user[k][l], config)?);
    }
    Ok(z)
}

/// ZF precoder built from the desired channels of `matching`.
pub fn matched_precoder<T: Real>(
    matching: &Matching,
    channels: &ChannelSet<T>,
    book: &PhaseBook,
) -> Result<Precoder<T>> {
    check_matching(matching, channels)?;
    let rows = (0..matching.len())
        .map(|k| effective_channel(k, matching.irs_of(k), channels, book))
        .collect::<Result<Vec<_>>>()?;
    zf_precoder(&Matrix::from_rows(&rows)?)
}

fn sinr_from_composite<T: Real>(k: usize, composite: &Vector<T>, precoder: &Precoder<T>, budget: &LinkBudget<T>) -> T {
    let mut signal = T::zero();
    let mut interference = T::zero();
    for (j, w) in precoder.columns().iter().enumerate() {
        let p = budget.per_user_power[j] * composite.dotu(w).norm_sqr();
        if j == k {
            signal = p;
        } else {
            interference = interference + p;
        }
    }
    signal / (interference + budget.noise_power)
}

/// `log2(1 + sinr)`.
#[inline]
pub fn rate_from_sinr<T: Real>(sinr: T) -> T {
    sinr.ln_1p() / T::LN_2()
}

pub fn sinr<T: Real>(
    k: usize,
    matching: &Matching,
    channels: &ChannelSet<T>,
    book: &PhaseBook,
    precoder: &Precoder<T>,
    budget: &LinkBudget<T>,
) -> Result<T> {
    let mut c = effective_channel(k, matching.irs_of(k), channels, book)?;
    c.add_assign(&interference_channel(k, matching, channels, book)?);
    Ok(sinr_from_composite(k, &c, precoder, budget))
}

pub fn user_rate<T: Real>(
    k: usize,
    matching: &Matching,
    channels: &ChannelSet<T>,
    book: &PhaseBook,
    precoder: &Precoder<T>,
    budget: &LinkBudget<T>,
) -> Result<T> {
    Ok(rate_from_sinr(sinr(k, matching, channels, book, precoder, budget)?))
}

/// Sum of user rates, with the precoder rebuilt for `matching`.
pub fn sum_rate<T: Real>(
    matching: &Matching,
    channels: &ChannelSet<T>,
    book: &PhaseBook,
    budget: &LinkBudget<T>,
) -> Result<T> {
    let precoder = matched_precoder(matching, channels, book)?;
    (0..matching.len())
        .map(|k| user_rate(k, matching, channels, book, &precoder, budget))
        .sum()
}

/// Interference-free rate `log2(1 + ||h_{k,l}||^2 / sigma^2)` a user sees from one IRS.
pub fn local_rate<T: Real>(
    k: usize,
    irs: usize,
    channels: &ChannelSet<T>,
    book: &PhaseBook,
    budget: &LinkBudget<T>,
) -> Result<T> {
    let h = effective_channel(k, irs, channels, book)?;
    Ok(rate_from_sinr(h.norm_sqr() / budget.noise_power))
}

/// Per-user rates of one matching.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport<T> {
    pub per_user: Vec<T>,
    pub sum: T,
}

/// Drop-level cache of every reflected row, for fast repeated rate evaluation.
#[derive(Debug, Clone)]
pub struct LinkEvaluator<T> {
    users: usize,
    direct_h: Vec<Vector<T>>,
    /// `f_{k,l}^H Phi_{j,l} G_l`, flattened `[k][l][j]`.
    reflect: Vec<Vector<T>>,
    budget: LinkBudget<T>,
}

impl<T: Real> LinkEvaluator<T> {
    pub fn new(channels: &ChannelSet<T>, book: &PhaseBook, budget: LinkBudget<T>) -> Result<Self> {
        let dims = channels.dims();
        if dims.users != dims.irs {
            return Err(Error::invalid("rate evaluation requires as many users as IRSs"));
        }
        if budget.per_user_power.len() != dims.users {
            return Err(Error::invalid("link budget size does not match the user count"));
        }
        if !(budget.noise_power > T::zero()) {
            return Err(Error::invalid("noise power must be positive"));
        }
        let n = dims.users;
        let mut reflect = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for l in 0..n {
                for j in 0..n {
                    let config = config_for(book, j, l)?;
                    reflect.push(reflected_row(&channels.bs_irs[l], &channels.irs_user[k][l], config)?);
                }
            }
        }
        Ok(Self {
            users: n,
            direct_h: channels.direct.iter().map(Vector::conj).collect(),
            reflect,
            budget,
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn budget(&self) -> &LinkBudget<T> {
        &self.budget
    }

    #[inline]
    fn reflect_row(&self, k: usize, l: usize, j: usize) -> &Vector<T> {
        &self.reflect[(k * self.users + l) * self.users + j]
    }

    /// Desired channel of user `k` when served by IRS `l`.
    pub fn desired(&self, k: usize, l: usize) -> Vector<T> {
        let mut h = self.direct_h[k].clone();
        h.add_assign(self.reflect_row(k, l, k));
        h
    }

    /// Desired plus leakage from every other IRS under `matching`.
    pub fn composite(&self, k: usize, matching: &Matching) -> Vector<T> {
        let mut c = self.direct_h[k].clone();
        for l in 0..self.users {
            c.add_assign(self.reflect_row(k, l, matching.user_of(l)));
        }
        c
    }

    pub fn precoder(&self, matching: &Matching) -> Result<Precoder<T>> {
        let rows: Vec<_> = (0..self.users).map(|k| self.desired(k, matching.irs_of(k))).collect();
        zf_precoder(&Matrix::from_rows(&rows)?)
    }

    pub fn sinrs(&self, matching: &Matching) -> Result<Vec<T>> {
        if matching.len() != self.users {
            return Err(Error::invalid("matching size does not match the drop"));
        }
        let precoder = self.precoder(matching)?;
        Ok((0..self.users)
            .map(|k| sinr_from_composite(k, &self.composite(k, matching), &precoder, &self.budget))
            .collect())
    }

    pub fn evaluate(&self, matching: &Matching) -> Result<RateReport<T>> {
        let per_user: Vec<T> = self.sinrs(matching)?.into_iter().map(rate_from_sinr).collect();
        let sum = per_user.iter().copied().sum();
        Ok(RateReport { per_user, sum })
    }

    pub fn local_rate(&self, k: usize, l: usize) -> T {
        rate_from_sinr(self.desired(k, l).norm_sqr() / self.budget.noise_power)
    }
}

/// `|c w|^2` helper exposed for diagnostics.
pub fn beam_gain<T: Real>(row: &Vector<T>, beam: &Vector<T>) -> T {
    let z: Complex<T> = row.dotu(beam);
    z.norm_sqr()
}
