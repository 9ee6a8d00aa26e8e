//! Real scalar abstraction shared by every numeric module.
//!
//! All channel, beamforming and rate math is written against [`Real`], so the
//! same code runs in `f32` and `f64`. The simulator itself uses `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating point type usable as the real part of channel coefficients.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Default + Debug + Display + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal; every `Real` can represent (a rounding of) any finite `f64`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 literal")
    }

    /// Lossy conversion back to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// One draw from the standard normal distribution.
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from the uniform distribution on `[0, 1)`.
    fn unit<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

macro_rules! impl_real {
    ($($t:ty),*) => {
        $(
            impl Real for $t {
                #[inline]
                fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                    <StandardNormal as Distribution<$t>>::sample(&StandardNormal, rng)
                }

                #[inline]
                fn unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
                    rng.random::<$t>()
                }
            }
        )*
    };
}

impl_real!(f32, f64);

/// Power ratio in dB to linear scale.
#[inline]
pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// Linear power ratio to dB.
#[inline]
pub fn linear_to_db<T: Real>(linear: T) -> T {
    T::lit(10.0) * linear.log10()
}

/// `|x - y| <= atol + rtol * |y|`.
#[inline]
pub fn approx_eq<T: Real>(x: T, y: T, atol: T, rtol: T) -> bool {
    (x - y).abs() <= atol + rtol * y.abs()
}

/// Default absolute tolerance for equality checks.
pub const ATOL: f64 = 1e-12;
/// Default relative tolerance for equality checks.
pub const RTOL: f64 = 1e-9;
