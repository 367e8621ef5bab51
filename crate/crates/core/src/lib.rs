//! Exact and numeric verification of the flat quaternionic skew-Hermitian
//! model `(H^n, Q0, omega0)`, the curvature space of `so*(2n) + sp(1)`, and
//! the exterior calculus on the fiber of the Swann bundle.
//!
//! Linear-algebra modules are generic over [`Scalar`]; the aliases below fix
//! the two arithmetic modes used throughout.

pub mod curvature;
pub mod error;
pub mod forms;
pub mod liealg;
pub mod linalg;
pub mod linmodel;
pub mod matrix;
pub mod quaternion;
pub mod scalar;
pub mod swann;

pub use error::{Error, Result};
pub use scalar::{rat, Rational, Scalar};

/// Exact rational arithmetic.
pub type ExactModel = linmodel::FlatModel<Rational>;
/// Double-precision arithmetic.
pub type FloatModel = linmodel::FlatModel<f64>;
pub type ExactLieBasis = liealg::LieBasis<Rational>;
pub type FloatLieBasis = liealg::LieBasis<f64>;
pub type ExactMat = matrix::Mat<Rational>;
pub type ExactQuaternion = quaternion::Quaternion<Rational>;
