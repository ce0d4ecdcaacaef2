//! Hermite polynomials and the normalized oscillator eigenfunctions in the
//! position and momentum representations.
//!
//! Everything is computed in the dimensionless variables
//! `q = sqrt(m w / hbar) x` and `t = p / sqrt(m w hbar)`; [`OscillatorParams`]
//! is only applied at the physical-unit entry points [`psi`] and [`phi`].

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest basis index accepted by [`BasisIndex`].
///
/// The normalized recurrence has no factorials, so the cap only bounds the
/// O(n) cost of a single evaluation.
pub const N_MAX: usize = 1 << 16;

/// `pi^(-1/4)`, the value of `u_0(0)`.
pub const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

/// Below this `q^2/2` the unscaled recurrence cannot underflow to subnormals.
const UNSCALED_LIMIT: f64 = 600.0;
const RESCALE_THRESHOLD: f64 = 1e200;

/// Physical constants `m`, `omega`, `hbar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    mass: f64,
    omega: f64,
    hbar: f64,
}

impl OscillatorParams {
    pub fn new(mass: f64, omega: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("omega", omega), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(Self { mass, omega, hbar })
    }

    /// `m = omega = hbar = 1`.
    pub fn natural() -> Self {
        Self {
            mass: 1.0,
            omega: 1.0,
            hbar: 1.0,
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `m omega / hbar`, the inverse squared oscillator length.
    pub fn inverse_length_sq(&self) -> f64 {
        self.mass * self.omega / self.hbar
    }

    /// Dimensionless coordinate `q = sqrt(m omega / hbar) x`.
    pub fn q_of_x(&self, x: f64) -> f64 {
        self.inverse_length_sq().sqrt() * x
    }

    /// Dimensionless momentum `t = p / sqrt(m omega hbar)`.
    pub fn t_of_p(&self, p: f64) -> f64 {
        p / (self.mass * self.omega * self.hbar).sqrt()
    }
}

impl Default for OscillatorParams {
    fn default() -> Self {
        Self::natural()
    }
}

/// Quantum number `n`, capped at [`N_MAX`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(usize);

impl BasisIndex {
    pub fn new(n: usize) -> Result<Self> {
        if n > N_MAX {
            return Err(Error::InvalidArgument(format!(
                "basis index {n} exceeds N_MAX = {N_MAX}"
            )));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for BasisIndex {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

/// Which representation an eigenfunction value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Position,
    Momentum,
}

/// A tabulated eigenfunction value. Position values are real; momentum
/// values carry the phase `(-i)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EigenfunctionValue {
    Position(f64),
    Momentum(Complex64),
}

impl EigenfunctionValue {
    pub fn representation(&self) -> Representation {
        match self {
            Self::Position(_) => Representation::Position,
            Self::Momentum(_) => Representation::Momentum,
        }
    }

    pub fn as_complex(&self) -> Complex64 {
        match *self {
            Self::Position(v) => Complex64::new(v, 0.0),
            Self::Momentum(v) => v,
        }
    }
}

/// Iterator over `u_0(q), u_1(q), u_2(q), ...`.
///
/// Runs `u_{k+1} = sqrt(2/(k+1)) q u_k - sqrt(k/(k+1)) u_{k-1}`. For large
/// `|q|` the Gaussian factor is carried as a separate logarithm so the seed
/// `u_0` never underflows. The sequence is exactly odd/even under `q -> -q`.
#[derive(Debug, Clone)]
pub struct HermiteFunctions {
    q: f64,
    k: usize,
    prev: f64,
    curr: f64,
    // log of the factor multiplying `curr`; None in the unscaled regime.
    log_factor: Option<f64>,
}

impl HermiteFunctions {
    pub fn new(q: f64) -> Self {
        let half_sq = 0.5 * q * q;
        if half_sq < UNSCALED_LIMIT {
            Self {
                q,
                k: 0,
                prev: 0.0,
                curr: PI_POW_NEG_QUARTER * (-half_sq).exp(),
                log_factor: None,
            }
        } else {
            Self {
                q,
                k: 0,
                prev: 0.0,
                curr: PI_POW_NEG_QUARTER,
                log_factor: Some(-half_sq),
            }
        }
    }

    fn current(&self) -> f64 {
        match self.log_factor {
            None => self.curr,
            Some(lf) => apply_log_factor(self.curr, lf),
        }
    }

    fn advance(&mut self) {
        let k = self.k as f64;
        let a = (2.0 / (k + 1.0)).sqrt();
        let b = (k / (k + 1.0)).sqrt();
        let next = a * self.q * self.curr - b * self.prev;
        self.prev = self.curr;
        self.curr = next;
        self.k += 1;
        if let Some(lf) = self.log_factor.as_mut() {
            if self.curr.abs() > RESCALE_THRESHOLD {
                self.curr /= RESCALE_THRESHOLD;
                self.prev /= RESCALE_THRESHOLD;
                *lf += RESCALE_THRESHOLD.ln();
            }
        }
    }
}

impl Iterator for HermiteFunctions {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let value = self.current();
        self.advance();
        Some(value)
    }
}

/// `x * exp(log_factor)` without underflowing the factor on its own.
fn apply_log_factor(x: f64, log_factor: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let magnitude = (x.abs().ln() + log_factor).exp();
    if x < 0.0 {
        -magnitude
    } else {
        magnitude
    }
}

/// `u_{n-1}(q)` and `u_n(q)` (the first is 0 for n = 0).
pub(crate) fn u_pair(n: usize, q: f64) -> (f64, f64) {
    let mut it = HermiteFunctions::new(q);
    for _ in 0..n {
        it.advance();
    }
    match it.log_factor {
        None => (it.prev, it.curr),
        Some(lf) => (apply_log_factor(it.prev, lf), apply_log_factor(it.curr, lf)),
    }
}

pub(crate) fn u_raw(n: usize, q: f64) -> f64 {
    u_pair(n, q).1
}

/// `u_0(q), ..., u_{len-1}(q)`.
pub fn u_table(len: usize, q: f64) -> Vec<f64> {
    HermiteFunctions::new(q).take(len).collect()
}

/// Physicists' Hermite polynomial `H_n(q)` by the three-term recurrence.
pub fn hermite(n: BasisIndex, q: f64) -> Result<f64> {
    let n = n.get();
    let mut prev = 0.0;
    let mut curr = 1.0;
    for k in 0..n {
        let next = 2.0 * q * curr - 2.0 * k as f64 * prev;
        prev = curr;
        curr = next;
        if !curr.is_finite() {
            return Err(Error::Overflow { n, q });
        }
    }
    Ok(curr)
}

/// Dimensionless normalized eigenfunction `u_n(q) = (2^n n! sqrt(pi))^(-1/2) H_n(q) e^(-q^2/2)`.
pub fn u(n: BasisIndex, q: f64) -> f64 {
    u_raw(n.get(), q)
}

/// Position-space eigenfunction `psi_n(x) = (m w / hbar)^(1/4) u_n(q)`.
pub fn psi(n: BasisIndex, x: f64, params: &OscillatorParams) -> f64 {
    params.inverse_length_sq().powf(0.25) * u(n, params.q_of_x(x))
}

/// `(-i)^n`, exact.
pub fn momentum_phase(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Dimensionless momentum eigenfunction `(-i)^n u_n(t)`.
pub fn phi_dimensionless(n: BasisIndex, t: f64) -> Complex64 {
    momentum_phase(n.get()) * u(n, t)
}

/// Momentum-space eigenfunction `phi_n(p) = (-i)^n (m w hbar)^(-1/4) u_n(t)`.
pub fn phi(n: BasisIndex, p: f64, params: &OscillatorParams) -> Complex64 {
    let scale = (params.mass * params.omega * params.hbar).powf(-0.25);
    phi_dimensionless(n, params.t_of_p(p)) * scale
}

/// `E_n = hbar omega (n + 1/2)`.
pub fn energy(n: BasisIndex, params: &OscillatorParams) -> f64 {
    params.hbar * params.omega * (n.get() as f64 + 0.5)
}

/// Tabulation helper used by the CLI.
pub fn eigenfunction(
    n: BasisIndex,
    coordinate: f64,
    rep: Representation,
    params: &OscillatorParams,
) -> EigenfunctionValue {
    match rep {
        Representation::Position => EigenfunctionValue::Position(psi(n, coordinate, params)),
        Representation::Momentum => EigenfunctionValue::Momentum(phi(n, coordinate, params)),
    }
}

/// `sqrt(n!)` computed as a running product; only used for small `n`.
pub(crate) fn sqrt_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).sqrt()).product()
}
