//! Numerical toolkit for programmable quantum processors: dense complex
//! linear algebra, channels, a semidefinite solver for diamond norms,
//! processor constructions and the Banach-space embedding diagnostics.

pub mod banach;
pub mod distances;
pub mod error;
pub mod linalg;
pub mod processors;
pub mod quantum;
pub mod scalar;
pub mod sdp;

pub use error::{Error, Result};
pub use scalar::RealScalar;

/// Double precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Single precision complex scalar.
pub type C32 = num_complex::Complex<f32>;
/// Double precision dense matrix, the carrier used by every optimization layer.
pub type CMatrix = linalg::ComplexMatrix<f64>;
/// Single precision dense matrix.
pub type CMatrixF32 = linalg::ComplexMatrix<f32>;
