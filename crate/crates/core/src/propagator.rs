//! Oscillator propagator `K(q, q'; alpha) = <q| exp(-i alpha (N + 1/2)) |q'>`,
//! `alpha = omega (t - t0)`, by three independent routes:
//!
//! * the closed (Mehler) form,
//! * the Fock-measure Gaussian integral of two generating functions,
//! * the truncated spectral sum over the eigenbasis.
//!
//! `alpha` lives in the closed lower half-plane. Real-time values on the
//! real axis are the boundary values of the analytic function defined in the
//! lower half-plane (where the spectral sum converges), so the square root in
//! the prefactor carries the standard `-i pi / 2` jump at each caustic
//! `alpha = n pi`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian_engine::{gaussian_integral, FockGaussianForm, SymmetricComplexMatrix};
use crate::generating_function::SeriesTruncation;
use crate::oscillator_basis::{
    momentum_phase, HermiteFunctions, OscillatorParams, PI_POW_NEG_QUARTER,
};
use crate::quadrature::QuadratureRule;
use crate::summation::ComplexKahanSum;

pub const DEFAULT_CAUSTIC_TOL: f64 = 1e-6;

/// Default number of terms in [`spectral_sum`].
pub const DEFAULT_SPECTRAL_TERMS: usize = 400;

/// Cramer's bound: `|u_n(q)| <= CRAMER * pi^(-1/4)` for all n and real q.
const CRAMER: f64 = 1.086_435;

/// `alpha = omega (t - t0)`, restricted to `Im(alpha) <= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeArgument {
    alpha: Complex64,
    caustic_tol: f64,
}

impl TimeArgument {
    pub fn new(alpha: Complex64) -> Result<Self> {
        Self::with_caustic_tol(alpha, DEFAULT_CAUSTIC_TOL)
    }

    pub fn with_caustic_tol(alpha: Complex64, caustic_tol: f64) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "alpha must be finite, got {alpha}"
            )));
        }
        if alpha.im > 0.0 {
            return Err(Error::InvalidArgument(format!(
                "alpha must satisfy Im(alpha) <= 0, got {alpha}"
            )));
        }
        if !(caustic_tol >= 0.0) {
            return Err(Error::InvalidArgument(
                "caustic tolerance must be >= 0".into(),
            ));
        }
        Ok(Self { alpha, caustic_tol })
    }

    /// Real time `alpha`.
    pub fn real(alpha: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0))
    }

    /// Euclidean time `alpha = -i tau`, `tau > 0`.
    pub fn euclidean(tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Euclidean time must be > 0, got {tau}"
            )));
        }
        Self::new(Complex64::new(0.0, -tau))
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn is_real(&self) -> bool {
        self.alpha.im == 0.0
    }

    /// On the real axis, `|sin alpha|` below the tolerance.
    pub fn is_caustic(&self) -> bool {
        self.is_real() && self.alpha.re.sin().abs() < self.caustic_tol
    }

    /// Nearest multiple of pi to `Re(alpha)`.
    pub fn nearest_caustic(&self) -> f64 {
        (self.alpha.re / PI).round() * PI
    }

    fn check_caustic(&self) -> Result<()> {
        if self.is_caustic() {
            return Err(Error::Caustic {
                alpha: self.alpha.re,
                nearest: self.nearest_caustic(),
            });
        }
        Ok(())
    }

    /// Sum of two time arguments.
    pub fn add(&self, other: &TimeArgument) -> Result<TimeArgument> {
        TimeArgument::with_caustic_tol(
            self.alpha + other.alpha,
            self.caustic_tol.min(other.caustic_tol),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    ClosedForm,
    GeneratingFunction,
    Spectral,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::ClosedForm => "closed_form",
            Route::GeneratingFunction => "generating_function",
            Route::Spectral => "spectral",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorValue {
    pub value: Complex64,
    pub route: Route,
}

/// `1 - exp(w)` without cancellation for small `|w|`.
fn one_minus_exp(w: Complex64) -> Complex64 {
    let (s, c) = w.im.sin_cos();
    let half = (0.5 * w.im).sin();
    // e^{a} cos b - 1 = expm1(a) cos b - 2 sin^2(b/2)
    let re = w.re.exp_m1() * c - 2.0 * half * half;
    let im = w.re.exp() * s;
    -Complex64::new(re, im)
}

/// Closed form of the damped completeness sum
/// `sum_n rho^n u_n(x) u_n(y)` for `|rho| < 1` (Mehler's formula),
/// `pi^(-1/2) (1 - rho^2)^(-1/2) exp[(2 x y rho - (x^2 + y^2) rho^2) / (1 - rho^2) - (x^2 + y^2) / 2]`.
///
/// `Re(1 - rho^2) > 0` for `|rho| < 1`, so the principal square root is the
/// continuation from `rho = 0`.
pub fn mehler_sum(rho: Complex64, x: f64, y: f64) -> Complex64 {
    let one_minus = Complex64::new(1.0, 0.0) - rho * rho;
    let s = x * x + y * y;
    let expo = (2.0 * x * y * rho - s * rho * rho) / one_minus - 0.5 * s;
    expo.exp() / (PI * one_minus).sqrt()
}

/// Closed-form propagator in natural units,
/// `sqrt(1 / (2 pi i sin alpha)) exp[i ((q^2 + q'^2) cos alpha - 2 q q') / (2 sin alpha)]`.
///
/// The prefactor is evaluated as `e^{-i alpha/2} (pi (1 - e^{-2 i alpha}))^{-1/2}`,
/// which selects the branch continuous from the Euclidean axis.
pub fn mehler_kernel(q: f64, qp: f64, a: &TimeArgument) -> Result<PropagatorValue> {
    a.check_caustic()?;
    let alpha = a.alpha();
    let i = Complex64::new(0.0, 1.0);
    let one_minus = one_minus_exp(-2.0 * i * alpha);
    let prefactor = (-0.5 * i * alpha).exp() / (PI * one_minus).sqrt();
    let expo = i * ((q * q + qp * qp) * alpha.cos() - 2.0 * q * qp) / (2.0 * alpha.sin());
    Ok(PropagatorValue {
        value: prefactor * expo.exp(),
        route: Route::ClosedForm,
    })
}

/// Propagator in physical units, `sqrt(m omega / hbar) K(q, q')`, with
/// `alpha = omega (t - t0)`.
pub fn mehler_kernel_physical(
    x: f64,
    xp: f64,
    a: &TimeArgument,
    params: &OscillatorParams,
) -> Result<PropagatorValue> {
    let k = mehler_kernel(params.q_of_x(x), params.q_of_x(xp), a)?;
    Ok(PropagatorValue {
        value: k.value * params.inverse_length_sq().sqrt(),
        ..k
    })
}

/// The spectral sum and, when it converges, a bound on the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralResult {
    pub value: PropagatorValue,
    pub tail_bound: Option<f64>,
}

fn spectral_impl(q: f64, qp: f64, a: &TimeArgument, trunc: SeriesTruncation) -> SpectralResult {
    let alpha = a.alpha();
    let i = Complex64::new(0.0, 1.0);
    let ratio = (-i * alpha).exp();
    let mut phase = (-0.5 * i * alpha).exp();
    let mut acc = ComplexKahanSum::new();
    let terms = HermiteFunctions::new(q)
        .zip(HermiteFunctions::new(qp))
        .take(trunc.terms());
    for (n, (uq, uqp)) in terms.enumerate() {
        if n > 0 {
            phase *= ratio;
        }
        acc.add(phase * (uq * uqp));
    }
    let tail_bound = if alpha.im < 0.0 {
        let decay = alpha.im.exp();
        let bound_sq = CRAMER * CRAMER * PI_POW_NEG_QUARTER * PI_POW_NEG_QUARTER;
        Some((alpha.im * (trunc.terms() as f64 + 0.5)).exp() / (1.0 - decay) * bound_sq)
    } else {
        None
    };
    SpectralResult {
        value: PropagatorValue {
            value: acc.value(),
            route: Route::Spectral,
        },
        tail_bound,
    }
}

/// `sum_{n < N} e^{-i alpha (n + 1/2)} u_n(q) u_n(q')`.
///
/// Requires `Im(alpha) < 0`; on the real axis the sum does not converge
/// pointwise and [`spectral_sum_diagnostic`] must be used instead.
pub fn spectral_sum(
    q: f64,
    qp: f64,
    a: &TimeArgument,
    trunc: SeriesTruncation,
) -> Result<SpectralResult> {
    if a.is_real() {
        return Err(Error::NonConvergent);
    }
    Ok(spectral_impl(q, qp, a, trunc))
}

/// [`spectral_sum`] without the convergence guard; the partial sums on the
/// real axis oscillate and are only meaningful as diagnostics.
pub fn spectral_sum_diagnostic(
    q: f64,
    qp: f64,
    a: &TimeArgument,
    trunc: SeriesTruncation,
) -> SpectralResult {
    spectral_impl(q, qp, a, trunc)
}

/// Quadratic form of `e^{-i alpha/2} int G_x(c z, q) G_x(c conj(z), q') dmu(z)`
/// with `c = e^{-i alpha/2}`, so that `c^2 = rho = e^{-i alpha}`.
///
/// In `z = u + i v` the exponent is
/// `-(1 + rho) u^2 - (1 - rho) v^2 + sqrt2 c ((q + q') u + i (q - q') v)`,
/// i.e. `X = diag(2 (1 + rho), 2 (1 - rho))`.
pub fn propagator_form(q: f64, qp: f64, a: &TimeArgument) -> Result<FockGaussianForm> {
    let i = Complex64::new(0.0, 1.0);
    let alpha = a.alpha();
    let c = (-0.5 * i * alpha).exp();
    let rho = c * c;
    let one_minus_rho = one_minus_exp(-i * alpha);
    let matrix = SymmetricComplexMatrix::diagonal(&[2.0 * (1.0 + rho), 2.0 * one_minus_rho])?;
    let linear = vec![SQRT_2 * c * (q + qp), SQRT_2 * c * i * (q - qp)];
    let prefactor = c * (2.0 / PI.sqrt() * (-0.5 * (q * q + qp * qp)).exp());
    Ok(FockGaussianForm {
        matrix,
        linear,
        prefactor,
    })
}

/// Propagator from the generating-function Gaussian integral.
///
/// The quadratic form has positive definite real part in the open lower
/// half-plane and on the real axis away from caustics; each pivot then lies
/// in the right half-plane and the principal branch is the correct one.
pub fn genfunc_route(q: f64, qp: f64, a: &TimeArgument) -> Result<PropagatorValue> {
    a.check_caustic()?;
    let form = propagator_form(q, qp, a)?;
    let g = gaussian_integral(&form.matrix, &form.linear)?;
    Ok(PropagatorValue {
        value: form.prefactor * g.to_complex(),
        route: Route::GeneratingFunction,
    })
}

/// `int K(q, s; a1) K(s, q'; a2) ds` by quadrature over `rule`.
///
/// Both arguments must be strictly inside the lower half-plane.
pub fn compose(
    a1: &TimeArgument,
    a2: &TimeArgument,
    q: f64,
    qp: f64,
    rule: &QuadratureRule,
) -> Result<PropagatorValue> {
    if a1.alpha().im >= 0.0 || a2.alpha().im >= 0.0 {
        return Err(Error::InvalidArgument(
            "composition requires Im(alpha) < 0 for both factors".into(),
        ));
    }
    let mut acc = ComplexKahanSum::new();
    for (&s, &w) in rule.nodes().iter().zip(rule.lebesgue_weights()) {
        let k1 = mehler_kernel(q, s, a1)?.value;
        let k2 = mehler_kernel(s, qp, a2)?.value;
        acc.add(k1 * k2 * w);
    }
    Ok(PropagatorValue {
        value: acc.value(),
        route: Route::ClosedForm,
    })
}

/// Fraction of the edge of the grid checked for leaked packet mass.
const EDGE_FRACTION: f64 = 0.02;
const EDGE_MASS_TOL: f64 = 1e-10;

/// Evolves `packet`, sampled on the nodes of `rule`, by
/// `psi(q) = int K(q, q'; a) psi(q') dq'`, returning samples on the same nodes.
///
/// At a caustic `alpha = k pi` the kernel is `e^{-i k pi/2} delta(q - (-1)^k q')`
/// and the packet is mapped exactly (the rule must be symmetric about 0).
pub fn evolve(
    packet: &[Complex64],
    a: &TimeArgument,
    rule: &QuadratureRule,
) -> Result<Vec<Complex64>> {
    let nodes = rule.nodes();
    let weights = rule.lebesgue_weights();
    if packet.len() != nodes.len() {
        return Err(Error::InvalidArgument(format!(
            "packet has {} samples but the rule has {} nodes",
            packet.len(),
            nodes.len()
        )));
    }
    check_edge_mass(packet, nodes, weights)?;

    if a.is_caustic() {
        let k = (a.alpha().re / PI).round() as i64;
        let phase = momentum_phase(k.rem_euclid(4) as usize);
        let n = nodes.len();
        let symmetric = (0..n).all(|i| nodes[i] == -nodes[n - 1 - i]);
        if !symmetric {
            return Err(Error::InvalidArgument(
                "caustic evolution needs a grid symmetric about 0".into(),
            ));
        }
        let out = if k.rem_euclid(2) == 0 {
            packet.iter().map(|p| p * phase).collect()
        } else {
            (0..n).map(|i| packet[n - 1 - i] * phase).collect()
        };
        return Ok(out);
    }

    let mut out = Vec::with_capacity(nodes.len());
    for &q in nodes {
        let mut acc = ComplexKahanSum::new();
        for ((&s, &w), &p) in nodes.iter().zip(weights).zip(packet) {
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            acc.add(mehler_kernel(q, s, a)?.value * p * w);
        }
        out.push(acc.value());
    }
    Ok(out)
}

fn check_edge_mass(packet: &[Complex64], nodes: &[f64], weights: &[f64]) -> Result<()> {
    let half_width = nodes.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let cut = (1.0 - EDGE_FRACTION) * half_width;
    let edge: f64 = packet
        .iter()
        .zip(nodes)
        .zip(weights)
        .filter(|((_, x), _)| x.abs() >= cut)
        .map(|((p, _), w)| p.norm_sqr() * w)
        .sum();
    if edge > EDGE_MASS_TOL {
        return Err(Error::DomainTruncation {
            required: half_width + 1.0,
            actual: half_width,
        });
    }
    Ok(())
}

/// `int |psi|^2` and `int q |psi|^2` on the rule.
pub fn packet_moments(packet: &[Complex64], rule: &QuadratureRule) -> (f64, f64) {
    let norm = rule
        .nodes()
        .iter()
        .zip(rule.lebesgue_weights())
        .zip(packet)
        .map(|((_, w), p)| w * p.norm_sqr())
        .collect::<crate::summation::KahanSum>()
        .value();
    let first = rule
        .nodes()
        .iter()
        .zip(rule.lebesgue_weights())
        .zip(packet)
        .map(|((x, w), p)| x * w * p.norm_sqr())
        .collect::<crate::summation::KahanSum>()
        .value();
    (norm, first / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator_basis::{u_raw, u_table};
    use crate::quadrature::truncated_uniform;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn trunc(n: usize) -> SeriesTruncation {
        SeriesTruncation::new(n).unwrap()
    }

    #[test]
    fn time_argument_validation() {
        assert!(TimeArgument::new(c(0.3, 0.1)).is_err());
        assert!(TimeArgument::euclidean(0.0).is_err());
        assert!(TimeArgument::real(PI).unwrap().is_caustic());
        assert!(!TimeArgument::real(1.0).unwrap().is_caustic());
    }

    #[test]
    fn euclidean_origin_value() {
        for tau in [0.05, 0.3, 1.0, 4.0] {
            let k = mehler_kernel(0.0, 0.0, &TimeArgument::euclidean(tau).unwrap())
                .unwrap()
                .value;
            let expected = 1.0 / (2.0 * PI * tau.sinh()).sqrt();
            assert!((k.re - expected).abs() < 1e-14 * expected);
            assert!(k.im.abs() <= 1e-15 * expected);
        }
    }

    #[test]
    fn symmetric_in_arguments() {
        for alpha in [c(0.3, 0.0), c(2.5, 0.0), c(0.0, -1.0), c(1.2, -0.4)] {
            let a = TimeArgument::new(alpha).unwrap();
            for (q, qp) in [(1.0, -0.5), (0.2, 2.2), (-1.7, 0.0)] {
                assert_eq!(
                    mehler_kernel(q, qp, &a).unwrap().value,
                    mehler_kernel(qp, q, &a).unwrap().value
                );
            }
        }
    }

    #[test]
    fn quarter_period() {
        let k = mehler_kernel(1.0, 0.0, &TimeArgument::real(PI / 2.0).unwrap())
            .unwrap()
            .value;
        let expected = (1.0 / (2.0 * PI * c(0.0, 1.0))).sqrt();
        assert!((k - expected).norm() < 1e-15);
        let g = genfunc_route(1.0, 0.0, &TimeArgument::real(PI / 2.0).unwrap())
            .unwrap()
            .value;
        assert!((g - expected).norm() < 1e-14);
    }

    #[test]
    fn principal_branch_literal_form_on_first_half_period() {
        let i = c(0.0, 1.0);
        for alpha in [0.1, 0.7, 1.5, 2.9] {
            let k = mehler_kernel(0.6, -0.3, &TimeArgument::real(alpha).unwrap())
                .unwrap()
                .value;
            let s = alpha.sin();
            let literal = (1.0 / (2.0 * PI * i * s)).sqrt()
                * (i / (2.0 * s) * ((0.36 + 0.09) * alpha.cos() - 2.0 * 0.6 * -0.3)).exp();
            assert!((k - literal).norm() < 1e-13, "alpha={alpha}");
        }
    }

    #[test]
    fn caustics_reported() {
        let err = mehler_kernel(0.0, 0.0, &TimeArgument::real(PI).unwrap()).unwrap_err();
        match err {
            Error::Caustic { nearest, .. } => assert!((nearest - PI).abs() < 1e-15),
            e => panic!("{e:?}"),
        }
        assert!(genfunc_route(0.0, 0.0, &TimeArgument::real(2.0 * PI).unwrap()).is_err());
    }

    #[test]
    fn spectral_examples() {
        let a = TimeArgument::euclidean(1.0).unwrap();
        let s = spectral_sum(0.0, 0.0, &a, trunc(100)).unwrap();
        let expected = 1.0 / (2.0 * PI * 1f64.sinh()).sqrt();
        assert!((s.value.value - expected).norm() < 1e-10);
        assert!(s.tail_bound.unwrap() < 1e-40);

        let a = TimeArgument::new(c(0.7, -0.1)).unwrap();
        let one = spectral_sum(0.3, -1.2, &a, trunc(1)).unwrap().value.value;
        let expected = (-0.5 * c(0.0, 1.0) * a.alpha()).exp() * u_raw(0, 0.3) * u_raw(0, -1.2);
        assert!((one - expected).norm() < 1e-16);

        let a = TimeArgument::euclidean(0.2).unwrap();
        let s = spectral_sum(1.0, -0.5, &a, trunc(400)).unwrap().value.value;
        let m = mehler_kernel(1.0, -0.5, &a).unwrap().value;
        assert!((s - m).norm() / m.norm() < 1e-8);
    }

    #[test]
    fn spectral_refuses_real_axis() {
        let a = TimeArgument::real(0.5).unwrap();
        assert_eq!(
            spectral_sum(0.0, 0.0, &a, trunc(10)).unwrap_err(),
            Error::NonConvergent
        );
        let d = spectral_sum_diagnostic(0.0, 0.0, &a, trunc(10));
        assert!(d.tail_bound.is_none());
    }

    #[test]
    fn tail_bound_covers_truncation() {
        let a = TimeArgument::euclidean(0.3).unwrap();
        let exact = mehler_kernel(0.4, 0.9, &a).unwrap().value;
        for n in [5, 10, 20, 40] {
            let s = spectral_sum(0.4, 0.9, &a, trunc(n)).unwrap();
            assert!((s.value.value - exact).norm() <= s.tail_bound.unwrap());
        }
    }

    #[test]
    fn genfunc_examples() {
        let a = TimeArgument::euclidean(1.0).unwrap();
        let g = genfunc_route(0.0, 0.0, &a).unwrap().value;
        assert!((g - 1.0 / (2.0 * PI * 1f64.sinh()).sqrt()).norm() < 1e-10);
        let a = TimeArgument::real(0.3).unwrap();
        let g = genfunc_route(0.5, 0.5, &a).unwrap().value;
        let m = mehler_kernel(0.5, 0.5, &a).unwrap().value;
        assert!((g - m).norm() < 1e-10);
    }

    #[test]
    fn genfunc_brute_force() {
        use crate::gaussian_engine::brute_force_oracle;
        let a = TimeArgument::real(0.3).unwrap();
        let form = propagator_form(0.5, 0.5, &a).unwrap();
        // weakest direction: Re X_vv = 2 (1 - cos 0.3) ~ 0.089
        let rule = truncated_uniform(40.0, 8001).unwrap();
        let oracle =
            form.prefactor * brute_force_oracle(&form.matrix, &form.linear, &rule).unwrap();
        let m = mehler_kernel(0.5, 0.5, &a).unwrap().value;
        assert!((oracle - m).norm() / m.norm() < 1e-6);
    }

    #[test]
    fn helper_identities() {
        for alpha in [0.2, 1.1, 2.7] {
            let e = Complex64::from_polar(1.0, -alpha);
            let h = Complex64::from_polar(1.0, -alpha / 2.0);
            assert!(((1.0 + e) - 2.0 * h * (alpha / 2.0).cos()).norm() < 1e-15);
            assert!(((1.0 - e) - 2.0 * c(0.0, 1.0) * h * (alpha / 2.0).sin()).norm() < 1e-15);
            assert!((h - e.sqrt()).norm() < 1e-15);
        }
    }

    #[test]
    fn periodicity() {
        for alpha in [0.4, 1.3, 2.5] {
            for (q, qp) in [(0.0, 0.0), (1.0, -2.0)] {
                let k0 = mehler_kernel(q, qp, &TimeArgument::real(alpha).unwrap())
                    .unwrap()
                    .value;
                let k1 = mehler_kernel(q, qp, &TimeArgument::real(alpha + 2.0 * PI).unwrap())
                    .unwrap()
                    .value;
                assert!((k0.norm() - k1.norm()).abs() < 1e-12);
                // boundary values of the spectral sum: K(alpha + 2 pi) = e^{-i pi} K(alpha)
                assert!((k1 + k0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn euclidean_kernel_positive() {
        for tau in [0.05, 0.5, 2.0] {
            let a = TimeArgument::euclidean(tau).unwrap();
            for (q, qp) in [(0.0, 3.0), (-2.0, 2.0), (1.5, 1.4)] {
                let k = mehler_kernel(q, qp, &a).unwrap().value;
                assert!(k.re > 0.0 && k.im.abs() <= 1e-15 * k.re);
            }
        }
    }

    #[test]
    fn composition() {
        let rule = truncated_uniform(12.0, 4801).unwrap();
        let half = TimeArgument::euclidean(0.5).unwrap();
        let one = TimeArgument::euclidean(1.0).unwrap();
        let k = compose(&half, &half, 0.0, 0.0, &rule).unwrap().value;
        assert!((k - mehler_kernel(0.0, 0.0, &one).unwrap().value).norm() < 1e-8);
        let k = compose(
            &TimeArgument::euclidean(0.3).unwrap(),
            &TimeArgument::euclidean(0.7).unwrap(),
            1.0,
            -1.0,
            &rule,
        )
        .unwrap()
        .value;
        assert!((k - mehler_kernel(1.0, -1.0, &one).unwrap().value).norm() < 1e-6);
        assert!(compose(&TimeArgument::real(0.3).unwrap(), &half, 0.0, 0.0, &rule).is_err());
    }

    #[test]
    fn evolve_ground_state_phase() {
        let rule = truncated_uniform(12.0, 2401).unwrap();
        let packet: Vec<Complex64> = rule.nodes().iter().map(|&q| c(u_raw(0, q), 0.0)).collect();
        let a = TimeArgument::real(0.9).unwrap();
        let out = evolve(&packet, &a, &rule).unwrap();
        let phase = Complex64::from_polar(1.0, -0.45);
        for (o, p) in out.iter().zip(&packet) {
            assert!((o - p * phase).norm() < 1e-8);
        }
    }

    #[test]
    fn evolve_at_caustics_is_parity_map() {
        let rule = truncated_uniform(10.0, 401).unwrap();
        let packet: Vec<Complex64> = rule
            .nodes()
            .iter()
            .map(|&q| c(u_raw(0, q - 1.0), 0.0))
            .collect();
        let out = evolve(&packet, &TimeArgument::real(PI).unwrap(), &rule).unwrap();
        let n = packet.len();
        for i in 0..n {
            assert_eq!(out[i], packet[n - 1 - i] * c(0.0, -1.0));
        }
        let out = evolve(&packet, &TimeArgument::real(2.0 * PI).unwrap(), &rule).unwrap();
        for i in 0..n {
            assert_eq!(out[i], -packet[i]);
        }
    }

    #[test]
    fn evolve_rejects_escaped_packet() {
        let rule = truncated_uniform(4.0, 401).unwrap();
        let packet: Vec<Complex64> = rule
            .nodes()
            .iter()
            .map(|&q| c(u_raw(0, q - 3.0), 0.0))
            .collect();
        assert!(matches!(
            evolve(&packet, &TimeArgument::real(0.5).unwrap(), &rule),
            Err(Error::DomainTruncation { .. })
        ));
        let short = vec![c(0.0, 0.0); 3];
        assert!(evolve(&short, &TimeArgument::real(0.5).unwrap(), &rule).is_err());
    }

    #[test]
    fn mehler_sum_matches_series() {
        for rho in [c(0.5, 0.0), c(0.0, 0.9), c(-0.3, 0.4)] {
            let (x, y) = (0.7, -1.1);
            let tx = u_table(300, x);
            let ty = u_table(300, y);
            let mut s = c(0.0, 0.0);
            let mut r = c(1.0, 0.0);
            for n in 0..300 {
                s += r * tx[n] * ty[n];
                r *= rho;
            }
            assert!((s - mehler_sum(rho, x, y)).norm() < 1e-12);
        }
    }

    #[test]
    fn initial_condition_limit() {
        // int K(q, s; -i tau) f(s) ds -> f(q) as tau -> 0
        let f = |s: f64| (0.5 * s).cos() * (-0.1 * s * s).exp();
        let mut errs = vec![];
        for tau in [0.02, 0.01, 0.005] {
            let a = TimeArgument::euclidean(tau).unwrap();
            let fine = truncated_uniform(12.0, 24001).unwrap();
            let v = fine.integrate_lebesgue(|s| mehler_kernel(0.3, s, &a).unwrap().value.re * f(s));
            errs.push((v - f(0.3)).abs());
        }
        assert!(errs[0] < 0.02);
        assert!((errs[0] / errs[1] - 2.0).abs() < 0.1);
        assert!((errs[1] / errs[2] - 2.0).abs() < 0.1);
    }

    #[test]
    fn physical_units_scale() {
        let p = OscillatorParams::new(2.0, 3.0, 1.5).unwrap();
        let a = TimeArgument::real(0.8).unwrap();
        let k = mehler_kernel_physical(0.4, -0.2, &a, &p).unwrap().value;
        let kd = mehler_kernel(p.q_of_x(0.4), p.q_of_x(-0.2), &a)
            .unwrap()
            .value;
        assert!((k - kd * 2.0).norm() < 1e-14);
    }
}
