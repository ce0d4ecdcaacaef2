//! Numerical harmonic-oscillator toolkit.
//!
//! Eigenfunctions, generating functions, Fock-measure Gaussian integrals,
//! momentum-eigenfunction normalization, regularized delta functions and the
//! oscillator propagator, each paired with an independent brute-force check.

pub mod delta_kernel;
pub mod error;
pub mod gaussian_engine;
pub mod generating_function;
pub mod momentum_transform;
pub mod oscillator_basis;
pub mod propagator;
pub mod quadrature;
pub mod summation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
