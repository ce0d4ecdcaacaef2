use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A function value or intermediate result was NaN or infinite.
    #[error("non-finite value at node {node:?}: {context}")]
    NumericDomain {
        context: String,
        node: Option<(f64, f64)>,
    },

    #[error("H_{n}({q}) overflows f64; use the normalized eigenfunction u_n instead")]
    Overflow { n: usize, q: f64 },

    #[error(
        "Gaussian integral diverges: real part of the quadratic form is not positive definite"
    )]
    DivergentIntegral,

    #[error("singular quadratic form: pivot {pivot} has modulus {modulus:e}")]
    SingularForm { pivot: usize, modulus: f64 },

    #[error("quadrature window too narrow: half-width {actual} < required {required}")]
    DomainTruncation { required: f64, actual: f64 },

    #[error("ill-conditioned phase fit: only {usable} usable grid points for n = {n}")]
    IllConditionedFit { n: usize, usable: usize },

    #[error("caustic at alpha = {alpha}: |sin(alpha)| below tolerance, nearest n*pi = {nearest}")]
    Caustic { alpha: f64, nearest: f64 },

    #[error(
        "spectral sum on the real time axis does not converge; use the diagnostic entry point"
    )]
    NonConvergent,
}

pub type Result<T> = std::result::Result<T, Error>;
