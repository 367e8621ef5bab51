use thiserror::Error;

use crate::forms::Coframe;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quaternionic dimension n must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected vectors of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quaternion is not a unit: |q|^2 = {norm_sq}")]
    NonUnitQuaternion { norm_sq: String },

    #[error("quaternion must be non-zero")]
    ZeroQuaternion,

    #[error("matrix does not lie in so*(2n) + sp(1): residual norm {residual:e}")]
    NotInAlgebra { residual: f64 },

    #[error("kappa must be non-zero")]
    ZeroKappa,

    #[error("self-check failed: {0}")]
    SelfCheck(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown variable {0:?}; only h0, h1, h2, h3 are allowed")]
    UnknownVariable(String),

    #[error("form is in the {found:?} coframe, expected {expected:?}")]
    CoframeMismatch { expected: Coframe, found: Coframe },

    #[error("degree {0} exceeds the fiber dimension 4")]
    DegreeOverflow(usize),

    #[error("forms of degree {left} and {right} cannot be added")]
    DegreeMismatch { left: usize, right: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("{0} evaluated outside its domain")]
    Domain(&'static str),

    #[error("{0} has no exact rational value here")]
    Inexact(&'static str),

    #[error("solution family requires C11 + C12 != 0")]
    DegenerateFamily,

    #[error("(c1, c2, c3) must not all vanish")]
    DegenerateSymSpace,

    #[error("every sample point was rejected ({attempts} attempts)")]
    AllSamplesRejected { attempts: usize },

    #[error("F is not closed: PDE residual {index} is {value:e} at {point:?}")]
    NotClosed {
        index: usize,
        value: f64,
        point: [f64; 4],
    },

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
