//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating point type the complex, operators and spectra are built over.
///
/// Both `f32` and `f64` are supported. Tolerances are always written as `f64`
/// literals and converted with [`Scalar::tol`], which clamps them to the
/// resolution the type can actually deliver.
pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Smallest tolerance that is meaningful for dense solves in this type.
    const NOISE_FLOOR: f64;

    /// Converts an `f64` constant into this type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a tolerance, clamping it to [`Scalar::NOISE_FLOOR`].
    fn tol(x: f64) -> Self {
        Self::lit(x.max(Self::NOISE_FLOOR))
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const NOISE_FLOOR: f64 = 0.0;
}

impl Scalar for f32 {
    const NOISE_FLOOR: f64 = 5e-4;
}

/// Binomial coefficient `C(n, k)` as a scalar; zero when `k > n`.
pub(crate) fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    T::lit(acc.round())
}
