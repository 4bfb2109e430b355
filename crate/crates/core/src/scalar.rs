//! Real scalar abstraction backing every complex matrix in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating point type usable as the real part of a matrix entry.
///
/// Blanket-implemented for `f32` and `f64`. Algorithms that only need
/// rotations, square roots and comparisons (products, partial traces,
/// Jacobi eigen/SVD, norms) are written against this trait; the optimization
/// layers built on top run in `f64`.
pub trait RealScalar:
    Float + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, panicking only for non-representable input.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Default comparison tolerance: `1e-10`, widened to `1e3 * eps` for
    /// low-precision types.
    #[inline]
    fn default_tol() -> Self {
        Self::lit(1e-10).max(Self::epsilon() * Self::lit(1e3))
    }
}

impl<T> RealScalar for T where
    T: Float + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
}
