//! Exterior calculus on the 4-dimensional fiber of the Swann bundle.
//!
//! Coefficients are [`ScalarField`] expression trees in `h0..h3`; forms are
//! written either in the coordinate coframe `dh_i` or in the left-invariant
//! coframe `alpha_i`. Identities are decided by [`equal`]: exact comparison
//! after simplification, then evaluation at random points.

pub mod fiber;
pub mod field;
pub mod parse;
pub mod sample;
pub mod vertical;

pub use field::{norm_sq, radius, Func, ScalarField};
pub use parse::parse;
pub use sample::{equal, sample_residual, EqualityReport, SampleReport, Sampler};
pub use vertical::VerticalForm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coframe {
    Dh,
    Alpha,
}
