//! Node geometry, Rician fading channels and distance-dependent path loss.
//!
//! One call to [`make_drop`] realizes every channel of a Monte-Carlo trial:
//! the direct BS-user vectors, the BS-IRS matrices and the IRS-user vectors,
//! each already scaled by the square root of its path loss.
//!
//! The composite reflected loss `C^2 zeta^2 (d_bi d_iu)^-alpha` couples a BS-IRS
//! hop with an IRS-user hop, but `G_l` is shared by every user. It is therefore
//! factored per hop as `C zeta d^-alpha` on each side, which multiplies back to
//! the composite exactly.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Real;

/// Users closer than this to the BS are redrawn (meters).
pub const MIN_USER_DISTANCE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Direction of `other` seen from `self`, in radians.
    pub fn bearing_to(&self, other: &Self) -> T {
        (other.y - self.y).atan2(other.x - self.x)
    }
}

/// Problem sizes of one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub users: usize,
    pub irs: usize,
    pub antennas: usize,
    pub elements: usize,
}

/// BS at the origin, IRSs equispaced on a ring, users inside half the ring radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry<T> {
    pub bs: Point<T>,
    pub irs: Vec<Point<T>>,
    pub users: Vec<Point<T>>,
}

impl<T: Real> Geometry<T> {
    /// `count` IRS positions on a circle of radius `radius` starting at bearing 0.
    pub fn irs_ring(count: usize, radius: T) -> Vec<Point<T>> {
        let step = T::TAU() / T::lit(count as f64);
        (0..count)
            .map(|l| {
                let a = step * T::lit(l as f64);
                Point::new(radius * a.cos(), radius * a.sin())
            })
            .collect()
    }

    /// Area-uniform user draw in the disk of radius `d_r / 2`, redrawing any
    /// user within [`MIN_USER_DISTANCE`] of the BS.
    pub fn sample_users<R: Rng + ?Sized>(rng: &mut R, count: usize, d_r: T) -> Vec<Point<T>> {
        let max_r = d_r / T::lit(2.0);
        let min_r = T::lit(MIN_USER_DISTANCE);
        (0..count)
            .map(|_| loop {
                let r = max_r * T::unit(rng).sqrt();
                let a = T::TAU() * T::unit(rng);
                if r >= min_r {
                    break Point::new(r * a.cos(), r * a.sin());
                }
            })
            .collect()
    }

    pub fn deploy<R: Rng + ?Sized>(rng: &mut R, users: usize, irs: usize, d_r: T) -> Result<Self> {
        if users == 0 || irs == 0 {
            return Err(Error::invalid("need at least one user and one IRS"));
        }
        if !(d_r > T::lit(2.0 * MIN_USER_DISTANCE)) {
            return Err(Error::invalid(format!("ring radius {d_r} too small")));
        }
        Ok(Self {
            bs: Point::origin(),
            irs: Self::irs_ring(irs, d_r),
            users: Self::sample_users(rng, users, d_r),
        })
    }

    pub fn d_bs_irs(&self, l: usize) -> T {
        self.bs.distance(&self.irs[l])
    }

    pub fn d_irs_user(&self, l: usize, k: usize) -> T {
        self.irs[l].distance(&self.users[k])
    }

    pub fn d_bs_user(&self, k: usize) -> T {
        self.bs.distance(&self.users[k])
    }

    /// Departure angle at the BS array towards IRS `l`.
    pub fn aod_bs_irs(&self, l: usize) -> T {
        self.bs.bearing_to(&self.irs[l])
    }

    /// Arrival angle at IRS `l` from the BS.
    pub fn aoa_bs_irs(&self, l: usize) -> T {
        self.irs[l].bearing_to(&self.bs)
    }

    /// Departure angle at IRS `l` towards user `k`.
    pub fn aod_irs_user(&self, l: usize, k: usize) -> T {
        self.irs[l].bearing_to(&self.users[k])
    }
}

/// Linear-scale fading and path-loss constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParams<T> {
    /// Rician factor of the BS-IRS links.
    pub kappa_g: T,
    /// Rician factor of the IRS-user links.
    pub kappa_f: T,
    pub d_over_lambda: T,
    pub alpha_direct: T,
    pub alpha_reflect: T,
    /// Reference path loss at 1 m.
    pub c_nu: T,
    /// Relative reflection gain; the composite loss carries `zeta^2`.
    pub zeta: T,
    pub delta_b: T,
    pub delta_u: T,
}

impl<T: Real> FadingParams<T> {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.kappa_g >= T::zero(), "kappa_g must be >= 0"),
            (self.kappa_f >= T::zero(), "kappa_f must be >= 0"),
            (self.c_nu > T::zero(), "c_nu must be > 0"),
            (self.zeta > T::zero(), "zeta must be > 0"),
            (self.alpha_direct > T::zero(), "alpha_direct must be > 0"),
            (self.alpha_reflect > T::zero(), "alpha_reflect must be > 0"),
            (self.delta_b > T::zero(), "delta_b must be > 0"),
            (self.delta_u > T::zero(), "delta_u must be > 0"),
            (self.d_over_lambda > T::zero(), "d_over_lambda must be > 0"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::invalid(*msg)),
            None => Ok(()),
        }
    }
}

impl Default for FadingParams<f64> {
    fn default() -> Self {
        Self {
            kappa_g: 10.0,
            kappa_f: 10.0,
            d_over_lambda: 0.5,
            alpha_direct: 3.5,
            alpha_reflect: 2.0,
            c_nu: 1e-3,
            zeta: 10f64.sqrt(),
            delta_b: 1.0,
            delta_u: 1.0,
        }
    }
}

/// All channels of one drop, path loss applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet<T> {
    /// `h_{d,k}`, length `M`, per user.
    pub direct: Vec<Vector<T>>,
    /// `G_l`, `N x M`, per IRS.
    pub bs_irs: Vec<Matrix<T>>,
    /// `f_{k,l}`, length `N`, indexed `[user][irs]`.
    pub irs_user: Vec<Vec<Vector<T>>>,
}

impl<T: Real> ChannelSet<T> {
    pub fn dims(&self) -> Dims {
        Dims {
            users: self.direct.len(),
            irs: self.bs_irs.len(),
            antennas: self.direct[0].len(),
            elements: self.bs_irs[0].rows(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.direct.iter().all(Vector::is_finite)
            && self.bs_irs.iter().all(Matrix::is_finite)
            && self.irs_user.iter().flatten().all(Vector::is_finite)
    }
}

/// Uniform linear array response; entry `m` is `exp(j 2 pi m (d/lambda) sin(theta))`.
pub fn steering_vector<T: Real>(n: usize, theta: T, d_over_lambda: T) -> Result<Vector<T>> {
    if n == 0 {
        return Err(Error::invalid("steering vector needs at least one element"));
    }
    let step = T::TAU() * d_over_lambda * theta.sin();
    Ok(Vector::from_fn(n, |m| {
        Complex::from_polar(T::one(), step * T::lit(m as f64))
    }))
}

/// One circularly-symmetric `CN(0, 1)` sample.
pub fn cn01<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let s = T::FRAC_1_SQRT_2();
    let re = T::std_normal(rng);
    let im = T::std_normal(rng);
    Complex::new(re * s, im * s)
}

/// Unit-variance i.i.d. Rayleigh vector, no path loss.
pub fn gen_direct_channel<T: Real, R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vector<T> {
    Vector::from_fn(m, |_| cn01(rng))
}

fn rician_weights<T: Real>(kappa: T) -> (T, T) {
    let denom = kappa + T::one();
    ((kappa / denom).sqrt(), (T::one() / denom).sqrt())
}

/// Rician BS-IRS matrix with rank-one LoS part `a_N(aoa) a_M(aod)^H`.
pub fn gen_bs_irs_channel<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    params: &FadingParams<T>,
    m: usize,
    n: usize,
    theta_aoa: T,
    theta_aod: T,
) -> Result<Matrix<T>> {
    let a_n = steering_vector(n, theta_aoa, params.d_over_lambda)?;
    let a_m = steering_vector(m, theta_aod, params.d_over_lambda)?;
    let (w_los, w_nlos) = rician_weights(params.kappa_g);
    Ok(Matrix::from_fn(n, m, |i, j| {
        a_n[i] * a_m[j].conj() * w_los + cn01::<T, R>(rng) * w_nlos
    }))
}

/// Rician IRS-user vector with LoS part `a_N(theta)`.
pub fn gen_irs_user_channel<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    params: &FadingParams<T>,
    n: usize,
    theta: T,
) -> Result<Vector<T>> {
    let a_n = steering_vector(n, theta, params.d_over_lambda)?;
    let (w_los, w_nlos) = rician_weights(params.kappa_f);
    Ok(Vector::from_fn(n, |i| a_n[i] * w_los + cn01::<T, R>(rng) * w_nlos))
}

fn check_distance<T: Real>(d: T, what: &str) -> Result<()> {
    if d > T::zero() && d.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} distance must be positive, got {d}")))
    }
}

/// Direct BS-user loss `C delta_b delta_u d^-alpha`.
pub fn path_loss_direct<T: Real>(d: T, params: &FadingParams<T>) -> Result<T> {
    check_distance(d, "BS-user")?;
    Ok(params.c_nu * params.delta_b * params.delta_u * d.powf(-params.alpha_direct))
}

/// Reflected composite loss `C^2 zeta^2 (d_bi d_iu)^-alpha`.
pub fn path_loss_composite<T: Real>(d_bi: T, d_iu: T, params: &FadingParams<T>) -> Result<T> {
    check_distance(d_bi, "BS-IRS")?;
    check_distance(d_iu, "IRS-user")?;
    let c = params.c_nu * params.zeta;
    Ok(c * c * (d_bi * d_iu).powf(-params.alpha_reflect))
}

/// One hop of the factored composite loss, `C zeta d^-alpha`.
pub fn path_loss_hop<T: Real>(d: T, params: &FadingParams<T>) -> Result<T> {
    check_distance(d, "reflected hop")?;
    Ok(params.c_nu * params.zeta * d.powf(-params.alpha_reflect))
}

/// Realizes all channels of one drop.
///
/// Draw order is fixed: direct channels by user, then BS-IRS matrices by IRS,
/// then IRS-user vectors user-major.
pub fn make_drop<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    geometry: &Geometry<T>,
    params: &FadingParams<T>,
    dims: Dims,
) -> Result<ChannelSet<T>> {
    if geometry.users.len() != dims.users || geometry.irs.len() != dims.irs {
        return Err(Error::invalid(format!(
            "geometry has {} users / {} IRSs, config expects {} / {}",
            geometry.users.len(),
            geometry.irs.len(),
            dims.users,
            dims.irs
        )));
    }
    if dims.antennas == 0 || dims.elements == 0 {
        return Err(Error::invalid("antenna and element counts must be positive"));
    }
    params.validate()?;

    let direct = (0..dims.users)
        .map(|k| {
            let gain = path_loss_direct(geometry.d_bs_user(k), params)?.sqrt();
            Ok(gen_direct_channel(rng, dims.antennas).scale(gain))
        })
        .collect::<Result<Vec<_>>>()?;

    let bs_irs = (0..dims.irs)
        .map(|l| {
            let gain = path_loss_hop(geometry.d_bs_irs(l), params)?.sqrt();
            let g = gen_bs_irs_channel(
                rng,
                params,
                dims.antennas,
                dims.elements,
                geometry.aoa_bs_irs(l),
                geometry.aod_bs_irs(l),
            )?;
            Ok(g.scale(gain))
        })
        .collect::<Result<Vec<_>>>()?;

    let irs_user = (0..dims.users)
        .map(|k| {
            (0..dims.irs)
                .map(|l| {
                    let gain = path_loss_hop(geometry.d_irs_user(l, k), params)?.sqrt();
                    let f = gen_irs_user_channel(rng, params, dims.elements, geometry.aod_irs_user(l, k))?;
                    Ok(f.scale(gain))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ChannelSet {
        direct,
        bs_irs,
        irs_user,
    })
}
