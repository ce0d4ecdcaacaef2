//! Generating functions of the oscillator basis,
//!
//! ```text
//! G_x(z, q) = sum_n z^n / sqrt(n!) u_n(q) = pi^(-1/4) exp(sqrt(2) q z - q^2/2 - z^2/2)
//! ```
//!
//! and its momentum counterpart `G_p`, plus inner products against the Fock
//! measure.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscillator_basis::{BasisIndex, HermiteFunctions, N_MAX, PI_POW_NEG_QUARTER};
use crate::quadrature::{integrate_fock, TensorRule2D};
use crate::summation::ComplexKahanSum;

/// Phase `alpha` of the momentum basis, `phi_n = alpha^n u_n(t)`.
pub const MOMENTUM_ALPHA: Complex64 = Complex64::new(0.0, -1.0);

/// Largest index accepted by [`fock_inner`].
pub const FOCK_INNER_MAX: usize = 12;

/// Number of retained terms in a truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesTruncation(usize);

impl SeriesTruncation {
    pub fn new(terms: usize) -> Result<Self> {
        if terms == 0 || terms > N_MAX {
            return Err(Error::InvalidArgument(format!(
                "series truncation must be in 1..={N_MAX}, got {terms}"
            )));
        }
        Ok(Self(terms))
    }

    pub fn terms(self) -> usize {
        self.0
    }
}

fn gaussian_generating(w: Complex64, q: f64) -> Complex64 {
    (w * (SQRT_2 * q) - 0.5 * q * q - 0.5 * w * w).exp() * PI_POW_NEG_QUARTER
}

/// Closed form of `G_x(z, q)`.
pub fn gx_closed(z: Complex64, q: f64) -> Complex64 {
    gaussian_generating(z, q)
}

/// `sum_{n < N} z^n / sqrt(n!) u_n(q)`.
pub fn gx_series(z: Complex64, q: f64, trunc: SeriesTruncation) -> Complex64 {
    series_with_ratio(z, q, trunc)
}

fn series_with_ratio(w: Complex64, q: f64, trunc: SeriesTruncation) -> Complex64 {
    let mut acc = ComplexKahanSum::new();
    let mut coeff = Complex64::new(1.0, 0.0);
    for (n, un) in HermiteFunctions::new(q).take(trunc.terms()).enumerate() {
        if n > 0 {
            coeff *= w / (n as f64).sqrt();
        }
        acc.add(coeff * un);
    }
    acc.value()
}

/// Closed form of `G_p(z, t) = sum_n (alpha z)^n / sqrt(n!) u_n(t)` with `alpha = -i`.
pub fn gp_closed(z: Complex64, t: f64) -> Complex64 {
    gaussian_generating(MOMENTUM_ALPHA * z, t)
}

/// `sum_{n < N} z^n / sqrt(n!) (-i)^n u_n(t)`.
pub fn gp_series(z: Complex64, t: f64, trunc: SeriesTruncation) -> Complex64 {
    series_with_ratio(MOMENTUM_ALPHA * z, t, trunc)
}

/// Bound on `|gx_series(z, q, N) - gx_closed(z, q)|` from the term magnitudes
/// `|z|^n / sqrt(n!) |u_n(q)|` with `|u_n| <= 1.0865 pi^(-1/4)` (Cramer).
pub fn gx_tail_bound(z: Complex64, trunc: SeriesTruncation) -> f64 {
    const CRAMER: f64 = 1.086_435;
    let r = z.norm();
    let mut term = 1.0;
    for n in 1..=trunc.terms() {
        term *= r / (n as f64).sqrt();
    }
    // sum_{n >= N} r^n / sqrt(n!), summed until the terms are negligible
    let mut tail = 0.0;
    let mut t = term;
    let mut n = trunc.terms();
    loop {
        tail += t;
        n += 1;
        t *= r / (n as f64).sqrt();
        if t < 1e-30 * tail.max(1e-300) || n > trunc.terms() + 10_000 {
            break;
        }
    }
    CRAMER * PI_POW_NEG_QUARTER * tail
}

/// Taylor coefficient `[z^n] G_x(z, q)` by the trapezoidal rule on the circle
/// `|z| = radius` with `points` nodes.
pub fn gx_taylor_coefficient(n: usize, q: f64, radius: f64, points: usize) -> Complex64 {
    let mut acc = ComplexKahanSum::new();
    for k in 0..points {
        let theta = 2.0 * PI * k as f64 / points as f64;
        let z = Complex64::from_polar(radius, theta);
        let weight = Complex64::from_polar(radius.powi(-(n as i32)), -(n as f64) * theta);
        acc.add(gx_closed(z, q) * weight);
    }
    acc.value() / points as f64
}

/// Fock inner product `<f_m | f_n> = int conj(f_m(z)) f_n(z) dmu(z)`, `f_n = z^n / sqrt(n!)`.
pub fn fock_inner(m: BasisIndex, n: BasisIndex, rule: &TensorRule2D) -> Result<Complex64> {
    let (m, n) = (m.get(), n.get());
    if m > FOCK_INNER_MAX || n > FOCK_INNER_MAX {
        return Err(Error::InvalidArgument(format!(
            "fock_inner supports indices <= {FOCK_INNER_MAX}, got ({m}, {n})"
        )));
    }
    let norm = 1.0
        / (crate::oscillator_basis::sqrt_factorial(m) * crate::oscillator_basis::sqrt_factorial(n));
    integrate_fock(|z| z.conj().powu(m as u32) * z.powu(n as u32) * norm, rule)
}
