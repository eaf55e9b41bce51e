//! Scalar abstraction: the numeric kernels are generic over the float type.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating-point scalar the library is generic over.
///
/// Bundles the numeric traits the kernels need (transcendentals, FFT
/// compatibility, conversions, formatting) plus the two genuinely
/// type-specific operations: standard-normal sampling and the gamma
/// function.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::NumAssign
    + rustfft::FftNum
    + std::fmt::Display
    + std::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Draw one standard normal variate from `rng`.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Euler gamma function Γ(x).
    fn gamma_fn(self) -> Self;

    /// Conversion from an `f64` literal; every finite `f64` must convert.
    fn cast(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to Scalar")
    }

    /// Conversion from a grid index or count.
    fn cast_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to Scalar")
    }

    /// Lossy view as `f64`, used for error payloads and text output.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn gamma_fn(self) -> Self {
        statrs::function::gamma::gamma(self)
    }
}

impl Scalar for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn gamma_fn(self) -> Self {
        statrs::function::gamma::gamma(f64::from(self)) as f32
    }
}
