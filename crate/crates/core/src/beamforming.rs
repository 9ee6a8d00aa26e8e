//! Discrete IRS phase design and the zero-forcing precoder at the BS.

use num_complex::Complex;
use num_traits::Zero;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{right_pseudo_inverse, Matrix, Vector};
use crate::scalar::Real;

/// Largest supported number of phase control bits.
pub const MAX_BITS: u32 = 16;

/// Uniform phase set `{-pi + 2 pi i / 2^b : i = 0..2^b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAlphabet<T> {
    bits: u32,
    phases: Vec<T>,
    unit: Vec<Complex<T>>,
}

impl<T: Real> PhaseAlphabet<T> {
    pub fn new(bits: u32) -> Result<Self> {
        if bits > MAX_BITS {
            return Err(Error::invalid(format!(
                "at most {MAX_BITS} phase bits supported, got {bits}"
            )));
        }
        let size = 1usize << bits;
        let phases: Vec<T> = (0..size).map(|i| Self::phase_of(bits, i)).collect();
        let unit = phases.iter().map(|&p| Complex::from_polar(T::one(), p)).collect();
        Ok(Self { bits, phases, unit })
    }

    fn phase_of(bits: u32, index: usize) -> T {
        let step = T::TAU() / T::lit((1u64 << bits) as f64);
        -T::PI() + step * T::lit(index as f64)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn phases(&self) -> &[T] {
        &self.phases
    }

    /// `exp(j phase[index])`.
    pub fn unit(&self, index: usize) -> Complex<T> {
        self.unit[index]
    }
}

/// Per-element phase choice (as alphabet index) and ON/OFF state of one IRS.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhaseConfig {
    bits: u32,
    indices: Vec<u16>,
    on: Vec<bool>,
}

impl PhaseConfig {
    pub fn new(bits: u32, indices: Vec<u16>, on: Vec<bool>) -> Result<Self> {
        if bits > MAX_BITS {
            return Err(Error::invalid(format!("at most {MAX_BITS} phase bits supported")));
        }
        if indices.len() != on.len() || indices.is_empty() {
            return Err(Error::invalid("phase and on-state lengths must match and be positive"));
        }
        let size = 1usize << bits;
        if let Some(bad) = indices.iter().find(|&&i| usize::from(i) >= size) {
            return Err(Error::invalid(format!(
                "phase index {bad} outside a {bits}-bit alphabet"
            )));
        }
        Ok(Self { bits, indices, on })
    }

    /// Every element ON at the given phase indices.
    pub fn all_on(bits: u32, indices: Vec<u16>) -> Result<Self> {
        let on = vec![true; indices.len()];
        Self::new(bits, indices, on)
    }

    /// Every element OFF; reflects nothing.
    pub fn all_off(bits: u32, elements: usize) -> Result<Self> {
        Self::new(bits, vec![0; elements], vec![false; elements])
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[u16] {
        &self.indices
    }

    pub fn on_state(&self) -> &[bool] {
        &self.on
    }

    pub fn phases<T: Real>(&self) -> Vec<T> {
        self.indices
            .iter()
            .map(|&i| PhaseAlphabet::<T>::phase_of(self.bits, usize::from(i)))
            .collect()
    }

    /// Diagonal of `Phi`: `alpha_n exp(j phi_n)`.
    pub fn coefficients<T: Real>(&self) -> Vec<Complex<T>> {
        self.phases::<T>()
            .into_iter()
            .zip(&self.on)
            .map(|(p, &on)| {
                if on {
                    Complex::from_polar(T::one(), p)
                } else {
                    Complex::zero()
                }
            })
            .collect()
    }

    pub fn phi_matrix<T: Real>(&self) -> Matrix<T> {
        Matrix::diag(&self.coefficients())
    }
}

/// Greedy phase design together with its intermediate state.
#[derive(Debug, Clone)]
pub struct GreedyTrace<T> {
    pub config: PhaseConfig,
    /// Column of `G` the design aligns to.
    pub column: usize,
    /// `s_1, ..., s_N`.
    pub partial_sums: Vec<Complex<T>>,
    /// `Gamma_n = |f(n)| |G(n, column)|`.
    pub gains: Vec<T>,
}

fn check_dims<T: Real>(g: &Matrix<T>, f: &Vector<T>) -> Result<()> {
    if g.rows() != f.len() {
        return Err(Error::DimensionMismatch {
            op: "passive_beamform",
            left: g.shape(),
            right: (f.len(), 1),
        });
    }
    Ok(())
}

/// Column of `g` with the largest Euclidean norm; lowest index on ties.
pub fn strongest_column<T: Real>(g: &Matrix<T>) -> usize {
    let mut best = 0;
    let mut best_norm = T::lit(-1.0);
    for m in 0..g.cols() {
        let norm = g.column(m).norm_sqr();
        if norm > best_norm {
            best = m;
            best_norm = norm;
        }
    }
    best
}

/// Element-by-element greedy phase selection over a discrete alphabet.
///
/// Aligns the reflected contributions on the strongest column of `g`. Step `n`
/// picks the alphabet phase maximizing `|s_{n-1} + Gamma_n e^{j psi}|`, with the
/// lowest index winning ties (the first step, where `s_0 = 0`, is always a tie).
pub fn greedy_phase_search<T: Real>(
    g: &Matrix<T>,
    f: &Vector<T>,
    alphabet: &PhaseAlphabet<T>,
) -> Result<GreedyTrace<T>> {
    check_dims(g, f)?;
    let column = strongest_column(g);
    let n_elems = f.len();
    let mut indices = Vec::with_capacity(n_elems);
    let mut partial_sums = Vec::with_capacity(n_elems);
    let mut gains = Vec::with_capacity(n_elems);
    let mut s = Complex::<T>::zero();
    for n in 0..n_elems {
        let gnm = g[(n, column)];
        let gamma = f[n].norm() * gnm.norm();
        let base = Complex::from_polar(T::one(), gnm.arg() - f[n].arg());
        // |s + G e^{jpsi}|^2 = |s|^2 + G^2 + 2 G Re(conj(s) e^{jpsi}); only the last term varies
        let s_conj = s.conj();
        let mut best = 0usize;
        let mut best_val = T::neg_infinity();
        for i in 0..alphabet.len() {
            let val = (s_conj * base * alphabet.unit(i)).re;
            if val > best_val {
                best = i;
                best_val = val;
            }
        }
        s = s + base * alphabet.unit(best) * gamma;
        indices.push(best as u16);
        partial_sums.push(s);
        gains.push(gamma);
    }
    Ok(GreedyTrace {
        config: PhaseConfig::all_on(alphabet.bits(), indices)?,
        column,
        partial_sums,
        gains,
    })
}

pub fn passive_beamform<T: Real>(g: &Matrix<T>, f: &Vector<T>, alphabet: &PhaseAlphabet<T>) -> Result<PhaseConfig> {
    Ok(greedy_phase_search(g, f, alphabet)?.config)
}

/// `f^H Phi G` as a length-`M` row.
pub fn reflected_row<T: Real>(g: &Matrix<T>, f: &Vector<T>, config: &PhaseConfig) -> Result<Vector<T>> {
    check_dims(g, f)?;
    if config.len() != f.len() {
        return Err(Error::DimensionMismatch {
            op: "reflected_row",
            left: (config.len(), 1),
            right: (f.len(), 1),
        });
    }
    let weights: Vec<Complex<T>> = f
        .iter()
        .zip(config.coefficients::<T>())
        .map(|(fi, c)| fi.conj() * c)
        .collect();
    Ok(g.left_mul_row(&weights))
}

/// Reflected-link SNR objective `||f^H Phi G||^2`; the noise normalization is dropped.
pub fn snr_objective<T: Real>(g: &Matrix<T>, f: &Vector<T>, config: &PhaseConfig) -> Result<T> {
    Ok(reflected_row(g, f, config)?.norm_sqr())
}

/// Unit-norm zero-forcing beams, one column per user.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder<T> {
    columns: Vec<Vector<T>>,
}

impl<T: Real> Precoder<T> {
    pub fn columns(&self) -> &[Vector<T>] {
        &self.columns
    }

    pub fn column(&self, k: usize) -> &Vector<T> {
        &self.columns[k]
    }

    pub fn users(&self) -> usize {
        self.columns.len()
    }
}

/// Normalized columns of `H^H (H H^H)^{-1}` for the stacked `K x M` channel.
pub fn zf_precoder<T: Real>(h_eff: &Matrix<T>) -> Result<Precoder<T>> {
    let w = right_pseudo_inverse(h_eff)?;
    let columns = (0..w.cols())
        .map(|k| {
            let col = w.column(k);
            let norm = col.norm();
            col.scale(norm.recip())
        })
        .collect();
    Ok(Precoder { columns })
}

/// Greedy phase configurations for every (user, IRS) pair of a drop.
///
/// A design depends only on `(f_{k,l}, G_l)`, never on the matching, so the
/// whole table is computed once per drop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseBook {
    /// Indexed `[user][irs]`.
    configs: Vec<Vec<PhaseConfig>>,
}

impl PhaseBook {
    pub fn build<T: Real>(channels: &ChannelSet<T>, alphabet: &PhaseAlphabet<T>) -> Result<Self> {
        let configs = channels
            .irs_user
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&channels.bs_irs)
                    .map(|(f, g)| passive_beamform(g, f, alphabet))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { configs })
    }

    pub fn from_configs(configs: Vec<Vec<PhaseConfig>>) -> Self {
        Self { configs }
    }

    /// Configuration IRS `irs` uses when serving `user`.
    pub fn get(&self, user: usize, irs: usize) -> Option<&PhaseConfig> {
        self.configs.get(user).and_then(|row| row.get(irs))
    }

    pub fn users(&self) -> usize {
        self.configs.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::cn01;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, m: usize) -> (Matrix<f64>, Vector<f64>) {
        let g = Matrix::from_fn(n, m, |_, _| cn01(rng));
        let f = Vector::from_fn(n, |_| cn01(rng));
        (g, f)
    }

    #[test]
    fn alphabet_layout() {
        let a = PhaseAlphabet::<f64>::new(2).unwrap();
        assert_eq!(a.len(), 4);
        let expect = [-PI, -PI / 2.0, 0.0, PI / 2.0];
        for (p, e) in a.phases().iter().zip(expect) {
            assert!((p - e).abs() < 1e-15);
        }
        assert_eq!(PhaseAlphabet::<f64>::new(0).unwrap().phases(), &[-PI]);
        assert!(PhaseAlphabet::<f64>::new(17).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(PhaseConfig::all_on(2, vec![0, 3, 1]).is_ok());
        assert!(PhaseConfig::all_on(2, vec![0, 4]).is_err());
        assert!(PhaseConfig::new(2, vec![0, 1], vec![true]).is_err());
        let off = PhaseConfig::all_off(3, 4).unwrap();
        assert!(off.coefficients::<f64>().iter().all(|c| c.is_zero()));
        let on = PhaseConfig::all_on(2, vec![2, 3]).unwrap();
        assert!(on.coefficients::<f64>().iter().all(|c| (c.norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn single_element_takes_first_index() {
        let g = Matrix::new(1, 1, vec![Complex::new(0.3, -0.9)]).unwrap();
        let f = Vector::new(vec![Complex::new(-1.1, 0.2)]).unwrap();
        for bits in 1..5 {
            let alphabet = PhaseAlphabet::new(bits).unwrap();
            let config = passive_beamform(&g, &f, &alphabet).unwrap();
            assert_eq!(config.indices(), &[0]);
        }
    }

    #[test]
    fn zero_channel_is_degenerate_but_valid() {
        let g = Matrix::<f64>::zeros(5, 3);
        let f = Vector::from_fn(5, |i| Complex::new(i as f64, 1.0));
        let config = passive_beamform(&g, &f, &PhaseAlphabet::new(3).unwrap()).unwrap();
        assert_eq!(config.indices(), &[0; 5]);
        assert!(config.on_state().iter().all(|&b| b));
    }

    #[test]
    fn picks_strongest_column() {
        let g = Matrix::from_fn(3, 3, |_, j| Complex::new(if j == 1 { 2.0 } else { 1.0 }, 0.0));
        assert_eq!(strongest_column(&g), 1);
        let tie = Matrix::from_fn(2, 3, |_, _| Complex::new(1.0, 0.0));
        assert_eq!(strongest_column(&tie), 0);
    }

    #[test]
    fn steps_match_exhaustive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let n = rng.random_range(1..=16);
            let m = rng.random_range(1..=4);
            let bits = rng.random_range(1..=3);
            let (g, f) = random_instance(&mut rng, n, m);
            let alphabet = PhaseAlphabet::new(bits).unwrap();
            let trace = greedy_phase_search(&g, &f, &alphabet).unwrap();
            let mut s = Complex::new(0.0, 0.0);
            for step in 0..n {
                let gnm = g[(step, trace.column)];
                let gamma = f[step].norm() * gnm.norm();
                let psi0 = -f[step].arg() + gnm.arg();
                let vals: Vec<f64> = alphabet
                    .phases()
                    .iter()
                    .map(|th| (s + Complex::from_polar(gamma, psi0 + th)).norm())
                    .collect();
                let max = vals.iter().cloned().fold(f64::MIN, f64::max);
                let oracle = vals.iter().position(|&v| v >= max - 1e-12 * (1.0 + max)).unwrap();
                assert_eq!(usize::from(trace.config.indices()[step]), oracle);
                s += Complex::from_polar(gamma, psi0 + alphabet.phases()[oracle]);
            }
        }
    }

    #[test]
    fn fine_quantization_nearly_coherent() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let alphabet = PhaseAlphabet::new(10).unwrap();
        for _ in 0..20 {
            let (g, f) = random_instance(&mut rng, 12, 3);
            let trace = greedy_phase_search(&g, &f, &alphabet).unwrap();
            let total: f64 = trace.gains.iter().sum();
            assert!(trace.partial_sums.last().unwrap().norm() >= 0.99 * total);
        }
    }

    #[test]
    fn partial_sums_nondecreasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for bits in 2..=4 {
            let alphabet = PhaseAlphabet::new(bits).unwrap();
            for _ in 0..50 {
                let (g, f) = random_instance(&mut rng, 16, 2);
                let trace = greedy_phase_search(&g, &f, &alphabet).unwrap();
                for w in trace.partial_sums.windows(2) {
                    assert!(w[1].norm() >= w[0].norm() - 1e-12);
                }
            }
        }
    }

    #[test]
    fn objective_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let (g, f) = random_instance(&mut rng, 6, 3);
        let off = PhaseConfig::all_off(2, 6).unwrap();
        assert_eq!(snr_objective(&g, &f, &off).unwrap(), 0.0);

        let g1 = Matrix::new(1, 1, vec![Complex::from_polar(1.0f64, 0.4)]).unwrap();
        let f1 = Vector::new(vec![Complex::from_polar(1.0, -2.0)]).unwrap();
        for idx in 0..4 {
            let c = PhaseConfig::all_on(2, vec![idx]).unwrap();
            assert!((snr_objective(&g1, &f1, &c).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn reflected_row_matches_matrix_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let (g, f) = random_instance(&mut rng, 5, 3);
        let config = PhaseConfig::new(2, vec![0, 1, 2, 3, 1], vec![true, false, true, true, true]).unwrap();
        let fh = Matrix::from_fn(1, 5, |_, j| f[j].conj());
        let expect = fh.matmul(&config.phi_matrix()).unwrap().matmul(&g).unwrap();
        let row = reflected_row(&g, &f, &config).unwrap();
        for m in 0..3 {
            assert!((row[m] - expect[(0, m)]).norm() < 1e-14);
        }
        assert!(reflected_row(&g, &Vector::zeros(4), &config).is_err());
    }

    #[test]
    fn zf_identity_and_nulling() {
        let p = zf_precoder(&Matrix::<f64>::identity(3)).unwrap();
        for k in 0..3 {
            for j in 0..3 {
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((p.column(k)[j] - Complex::new(expect, 0.0)).norm() < 1e-15);
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let h = Matrix::from_fn(4, 8, |_, _| cn01::<f64, _>(&mut rng));
        let p = zf_precoder(&h).unwrap();
        for k in 0..4 {
            assert!((p.column(k).norm() - 1.0).abs() < 1e-9);
            let hk = Vector::new(h.row(k).to_vec()).unwrap();
            for j in 0..4 {
                if j != k {
                    assert!(hk.dotu(p.column(j)).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn zf_singular_propagates() {
        let h = Matrix::from_fn(2, 3, |_, j| Complex::new(j as f64, 1.0));
        assert!(matches!(zf_precoder(&h), Err(Error::Singular { .. })));
    }

    #[test]
    fn argmax_invariant_under_positive_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let alphabet = PhaseAlphabet::new(3).unwrap();
        for _ in 0..50 {
            let (g, f) = random_instance(&mut rng, 10, 3);
            let a = passive_beamform(&g, &f, &alphabet).unwrap();
            let b = passive_beamform(&g, &f.scale(7.5), &alphabet).unwrap();
            assert_eq!(a.indices(), b.indices());
        }
    }
}
