//! Real scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FromPrimitive};

/// Complex number over a [`Real`] field.
pub type C<T> = Complex<T>;

/// Floating-point field the linear algebra is written against: `f32` or `f64`.
///
/// Tolerances are written in `f64` terms; [`Real::tol`] maps them to the
/// scalar's precision by flooring at `TOL_FLOOR`.
pub trait Real:
    Float + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Smallest tolerance that is meaningful at this precision.
    const TOL_FLOOR: f64;

    /// Lossy conversion from an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    /// Converts a tolerance stated for double precision.
    fn tol(x: f64) -> Self {
        Self::of(x.max(Self::TOL_FLOOR))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const TOL_FLOOR: f64 = 0.0;
}

impl Real for f32 {
    const TOL_FLOOR: f64 = 5e-4;
}

#[inline]
pub(crate) fn cr<T: Real>(re: f64) -> C<T> {
    Complex::new(T::of(re), T::zero())
}
