use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{Dims, FadingParams};
use crate::error::{Error, Result};
use crate::rates::{Algorithm, LinkBudget};
use crate::scalar::db_to_linear;

/// Default noise floor (dB).
///
/// At the [`ScenarioConfig::ring_radius_preset`] operating point the noise-free
/// proposed sum rate at `d_r = 50` saturates near 31.5 bits/s/Hz, so a
/// calibration target of 37.0 cannot be hit. This is instead the level at
/// which the `d_r` sweep over 50..250 rises to a peak at 150 m and falls again.
pub const CALIBRATED_NOISE_DB: f64 = -114.0;

/// Every free parameter of a scenario. Powers and gains are in dB.
///
/// Serialized as a flat TOML document; missing keys take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub k_users: usize,
    pub l_irs: usize,
    pub m_antennas: usize,
    pub n_elements: usize,
    pub b_bits: u32,
    pub total_power_db: f64,
    pub noise_power_db: f64,
    /// IRS ring radius (m).
    pub d_r: f64,
    pub kappa_g_db: f64,
    pub kappa_f_db: f64,
    pub c_nu_db: f64,
    /// Relative reflection gain; `zeta^2 = 10^(zeta_db / 10)`.
    pub zeta_db: f64,
    pub delta_b_db: f64,
    pub delta_u_db: f64,
    pub alpha_direct: f64,
    pub alpha_reflect: f64,
    pub d_over_lambda: f64,
    pub trials: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
}

impl Default for ScenarioConfig {
    /// Desk-scale scenario: `K = L = M = 4`, `N = 16`, 2-bit phases, 200 trials.
    fn default() -> Self {
        Self {
            k_users: 4,
            l_irs: 4,
            m_antennas: 4,
            n_elements: 16,
            b_bits: 2,
            total_power_db: 10.0,
            noise_power_db: CALIBRATED_NOISE_DB,
            d_r: 50.0,
            kappa_g_db: 10.0,
            kappa_f_db: 10.0,
            c_nu_db: -30.0,
            zeta_db: 10.0,
            delta_b_db: 0.0,
            delta_u_db: 0.0,
            alpha_direct: 3.5,
            alpha_reflect: 2.0,
            d_over_lambda: 0.5,
            trials: 200,
            seed: 1,
            algorithms: vec![
                Algorithm::Proposed,
                Algorithm::GsOnly,
                Algorithm::Distance,
                Algorithm::Random,
            ],
        }
    }
}

impl ScenarioConfig {
    /// `K = L = M = 10`, 10 dB total power; sweep `n_elements`.
    pub fn elements_preset() -> Self {
        Self {
            k_users: 10,
            l_irs: 10,
            m_antennas: 10,
            n_elements: 50,
            total_power_db: 10.0,
            ..Self::default()
        }
    }

    /// `K = L = M = 8`, `N = 50`; sweep `total_power_db`.
    pub fn power_preset() -> Self {
        Self {
            k_users: 8,
            l_irs: 8,
            m_antennas: 8,
            n_elements: 50,
            ..Self::default()
        }
    }

    /// Ring-radius table operating point: `K = L = M = 8`, `N = 50`, 9 dB.
    pub fn ring_radius_preset() -> Self {
        Self {
            total_power_db: 9.0,
            ..Self::power_preset()
        }
    }

    /// `N = 20`, 5 dB; sweep `k_users` at the given antenna count.
    pub fn users_preset(m_antennas: usize) -> Self {
        Self {
            k_users: 8,
            l_irs: 8,
            m_antennas,
            n_elements: 20,
            total_power_db: 5.0,
            ..Self::default()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.k_users == 0 {
            return fail("k_users must be at least 1".into());
        }
        if self.k_users != self.l_irs {
            return fail(format!("k_users ({}) must equal l_irs ({})", self.k_users, self.l_irs));
        }
        if self.m_antennas < self.k_users {
            return fail(format!(
                "m_antennas ({}) must be at least k_users ({}) for zero-forcing",
                self.m_antennas, self.k_users
            ));
        }
        if self.n_elements == 0 {
            return fail("n_elements must be at least 1".into());
        }
        if self.b_bits > crate::beamforming::MAX_BITS {
            return fail(format!("b_bits must be at most {}", crate::beamforming::MAX_BITS));
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.algorithms.is_empty() {
            return fail("at least one algorithm must be selected".into());
        }
        if self.algorithms.contains(&Algorithm::Exhaustive) && self.k_users > crate::matching::EXHAUSTIVE_CAP {
            return fail(format!(
                "exhaustive search is limited to k_users <= {}",
                crate::matching::EXHAUSTIVE_CAP
            ));
        }
        if !(self.d_r > 2.0 * crate::channel::MIN_USER_DISTANCE) || !self.d_r.is_finite() {
            return fail(format!("d_r must exceed {} m", 2.0 * crate::channel::MIN_USER_DISTANCE));
        }
        let finite = [
            self.total_power_db,
            self.noise_power_db,
            self.kappa_g_db,
            self.kappa_f_db,
            self.c_nu_db,
            self.zeta_db,
            self.delta_b_db,
            self.delta_u_db,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return fail("dB parameters must be finite".into());
        }
        self.fading_params()
            .validate()
            .map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn dims(&self) -> Dims {
        Dims {
            users: self.k_users,
            irs: self.l_irs,
            antennas: self.m_antennas,
            elements: self.n_elements,
        }
    }

    pub fn fading_params(&self) -> FadingParams<f64> {
        FadingParams {
            kappa_g: db_to_linear(self.kappa_g_db),
            kappa_f: db_to_linear(self.kappa_f_db),
            d_over_lambda: self.d_over_lambda,
            alpha_direct: self.alpha_direct,
            alpha_reflect: self.alpha_reflect,
            c_nu: db_to_linear(self.c_nu_db),
            zeta: db_to_linear(self.zeta_db).sqrt(),
            delta_b: db_to_linear(self.delta_b_db),
            delta_u: db_to_linear(self.delta_u_db),
        }
    }

    /// Equal power split over the users.
    pub fn budget(&self) -> LinkBudget<f64> {
        LinkBudget::equal_split(
            db_to_linear(self.total_power_db),
            self.k_users,
            db_to_linear(self.noise_power_db),
        )
    }
}
