//! Momentum-space eigenfunctions as Fourier transforms of the position-space
//! ones, the phase `(-i)^n` recovered numerically, and the plane-wave overlap
//! `<q|t> = (2 pi)^(-1/2) e^{i q t}` rebuilt from the basis.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian_engine::{gaussian_integral, momentum_overlap_integrand};
use crate::generating_function::SeriesTruncation;
use crate::oscillator_basis::{u_raw, BasisIndex, HermiteFunctions, OscillatorParams, N_MAX};
use crate::propagator::mehler_sum;
use crate::quadrature::{truncated_uniform_with_spacing, QuadratureRule, DEFAULT_SPACING};
use crate::summation::{ComplexKahanSum, KahanSum};

/// Largest index accepted by the quadrature transforms.
pub const TRANSFORM_MAX_INDEX: usize = 40;

/// Grid used by [`extract_phase`].
pub const PHASE_GRID: (f64, f64, usize) = (0.3, 3.5, 17);

/// Points with `|u_n| < PHASE_MIN_MAGNITUDE` are skipped by the fit.
pub const PHASE_MIN_MAGNITUDE: f64 = 0.05;

/// Abel damping radii used for the extrapolated normalization.
pub const ABEL_RADII: [f64; 3] = [0.9, 0.99, 0.999];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveOverlap {
    pub q: f64,
    pub t: f64,
    pub value: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEstimate {
    pub n: BasisIndex,
    pub phase: Complex64,
    pub residual: f64,
}

/// Half-width a rule must reach to transform `u_n`.
pub fn required_half_width(n: BasisIndex) -> f64 {
    (((2 * n.get() + 1) as f64).sqrt() + 4.0).max(8.0)
}

/// A uniform rule wide enough for `u_n` with `n <= TRANSFORM_MAX_INDEX` and
/// fine enough to resolve `e^{-i q t}` for `|t| <= t_max`.
pub fn transform_rule(t_max: f64) -> Result<QuadratureRule> {
    let half_width = required_half_width(BasisIndex::new(TRANSFORM_MAX_INDEX)?) + 4.0;
    let spacing = DEFAULT_SPACING.min(0.5 / (1.0 + t_max.abs()));
    truncated_uniform_with_spacing(half_width, spacing)
}

fn check_index(n: BasisIndex) -> Result<()> {
    if n.get() > TRANSFORM_MAX_INDEX {
        return Err(Error::InvalidArgument(format!(
            "transform supports n <= {TRANSFORM_MAX_INDEX}, got {}",
            n.get()
        )));
    }
    Ok(())
}

/// `u_n` sampled on a rule with the Lebesgue weights folded in, reusable for
/// many momentum values.
#[derive(Debug, Clone)]
pub struct FourierSampler {
    nodes: Vec<f64>,
    weighted: Vec<f64>,
}

impl FourierSampler {
    pub fn new(n: BasisIndex, rule: &QuadratureRule) -> Result<Self> {
        check_index(n)?;
        rule.require_half_width(required_half_width(n))?;
        let weighted = rule
            .nodes()
            .iter()
            .zip(rule.lebesgue_weights())
            .map(|(&q, &w)| w * u_raw(n.get(), q))
            .collect();
        Ok(Self {
            nodes: rule.nodes().to_vec(),
            weighted,
        })
    }

    /// `(2 pi)^(-1/2) int e^{-i q t} u_n(q) dq`.
    pub fn at(&self, t: f64) -> Complex64 {
        let mut acc = ComplexKahanSum::new();
        for (&q, &w) in self.nodes.iter().zip(&self.weighted) {
            acc.add(Complex64::from_polar(w, -q * t));
        }
        acc.value() / (2.0 * PI).sqrt()
    }
}

/// Dimensionless Fourier transform `(2 pi)^(-1/2) int e^{-i q t} u_n(q) dq`.
pub fn fourier_of_psi(n: BasisIndex, t: f64, rule: &QuadratureRule) -> Result<Complex64> {
    Ok(FourierSampler::new(n, rule)?.at(t))
}

/// Inverse transform `(2 pi)^(-1/2) int e^{i q t} F(t) dt` of the sampled
/// transform, evaluated at each of `qs`. The same rule is used in both
/// directions.
pub fn inverse_of_fourier(n: BasisIndex, qs: &[f64], rule: &QuadratureRule) -> Result<Vec<f64>> {
    let sampler = FourierSampler::new(n, rule)?;
    let transformed: Vec<Complex64> = rule.nodes().iter().map(|&t| sampler.at(t)).collect();
    Ok(qs
        .iter()
        .map(|&q| {
            let mut acc = ComplexKahanSum::new();
            for ((&t, &w), f) in rule
                .nodes()
                .iter()
                .zip(rule.lebesgue_weights())
                .zip(&transformed)
            {
                acc.add(Complex64::from_polar(w, q * t) * f);
            }
            acc.value().re / (2.0 * PI).sqrt()
        })
        .collect())
}

/// `int |F(t)|^2 dt` for the transform of `u_n`.
pub fn momentum_norm(n: BasisIndex, rule: &QuadratureRule) -> Result<f64> {
    let sampler = FourierSampler::new(n, rule)?;
    let mut acc = KahanSum::new();
    for (&t, &w) in rule.nodes().iter().zip(rule.lebesgue_weights()) {
        acc.add(w * sampler.at(t).norm_sqr());
    }
    Ok(acc.value())
}

/// Least-squares fit of `F(t) = c u_n(t)` on the phase grid, normalized to
/// `|c| = 1`. The residual is the relative RMS misfit.
pub fn extract_phase(n: BasisIndex) -> Result<PhaseEstimate> {
    check_index(n)?;
    let (lo, hi, count) = PHASE_GRID;
    let rule = transform_rule(hi)?;
    let sampler = FourierSampler::new(n, &rule)?;
    let samples: Vec<(f64, Complex64)> = (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .map(|t| (u_raw(n.get(), t), t))
        .filter(|(u, _)| u.abs() >= PHASE_MIN_MAGNITUDE)
        .map(|(u, t)| (u, sampler.at(t)))
        .collect();
    if samples.len() < 3 {
        return Err(Error::IllConditionedFit {
            n: n.get(),
            usable: samples.len(),
        });
    }
    let uu: f64 = samples.iter().map(|(u, _)| u * u).sum();
    let fu: Complex64 = samples.iter().map(|(u, f)| f * u).sum();
    let coeff = fu / uu;
    let phase = coeff / coeff.norm();
    let misfit: f64 = samples
        .iter()
        .map(|(u, f)| (f - phase * u).norm_sqr())
        .sum();
    Ok(PhaseEstimate {
        n,
        phase,
        residual: (misfit / uu).sqrt(),
    })
}

/// Abel-damped completeness sum `sum_{n<N} r^n u_n(q) conj((-i)^n u_n(t))`.
///
/// For `r < 1` the series converges absolutely to [`overlap_damped_closed`].
/// With `r = 1` the partial sums oscillate and are only a diagnostic.
pub fn overlap_series(
    q: f64,
    t: f64,
    damping: f64,
    trunc: SeriesTruncation,
) -> Result<PlaneWaveOverlap> {
    if !(0.0..=1.0).contains(&damping) {
        return Err(Error::InvalidArgument(format!(
            "damping must lie in [0, 1], got {damping}"
        )));
    }
    let mut acc = ComplexKahanSum::new();
    let mut factor = Complex64::new(1.0, 0.0);
    let ratio = Complex64::new(0.0, damping);
    let terms = HermiteFunctions::new(q)
        .zip(HermiteFunctions::new(t))
        .take(trunc.terms());
    for (n, (uq, ut)) in terms.enumerate() {
        if n > 0 {
            factor *= ratio;
        }
        acc.add(factor * (uq * ut));
    }
    Ok(PlaneWaveOverlap {
        q,
        t,
        value: acc.value(),
    })
}

/// Closed form of the damped sum: the Mehler sum at `rho = i r`.
pub fn overlap_damped_closed(q: f64, t: f64, damping: f64) -> Complex64 {
    mehler_sum(Complex64::new(0.0, damping), q, t)
}

/// Number of terms after which `r^n` drops below `1e-16`.
pub fn abel_truncation(damping: f64) -> Result<SeriesTruncation> {
    if !(0.0..1.0).contains(&damping) {
        return Err(Error::InvalidArgument(format!(
            "Abel damping must lie in [0, 1), got {damping}"
        )));
    }
    let terms = if damping == 0.0 {
        1
    } else {
        (16.0 * 10f64.ln() / -damping.ln()).ceil() as usize + 1
    };
    if terms > N_MAX {
        return Err(Error::InvalidArgument(format!(
            "damping {damping} needs {terms} terms, above {N_MAX}"
        )));
    }
    SeriesTruncation::new(terms)
}

/// Polynomial extrapolation of `(h_i, y_i)` to `h = 0` (Neville).
pub fn extrapolate_to_zero(points: &[(f64, Complex64)]) -> Result<Complex64> {
    if points.is_empty() {
        return Err(Error::InvalidArgument(
            "extrapolation needs at least one point".into(),
        ));
    }
    let h: Vec<f64> = points.iter().map(|p| p.0).collect();
    let mut p: Vec<Complex64> = points.iter().map(|p| p.1).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (a, b) = (h[i], h[i + level]);
            if a == b {
                return Err(Error::InvalidArgument(
                    "extrapolation abscissae must be distinct".into(),
                ));
            }
            p[i] = (a * p[i + 1] - b * p[i]) / (a - b);
        }
    }
    Ok(p[0])
}

/// The Abel-damped overlaps at each radius and their extrapolation to `r = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelExtrapolation {
    pub q: f64,
    pub t: f64,
    pub partial: Vec<(f64, Complex64)>,
    pub limit: Complex64,
}

impl AbelExtrapolation {
    /// `N_p = limit e^{-i q t}`.
    pub fn normalization(&self) -> Complex64 {
        self.limit * Complex64::from_polar(1.0, -self.q * self.t)
    }
}

/// Sums the damped series at each radius (with enough terms to converge)
/// and extrapolates the values polynomially in `1 - r` to `r = 1`.
pub fn abel_extrapolate(q: f64, t: f64, radii: &[f64]) -> Result<AbelExtrapolation> {
    let mut partial = Vec::with_capacity(radii.len());
    for &r in radii {
        let value = overlap_series(q, t, r, abel_truncation(r)?)?.value;
        partial.push((r, value));
    }
    let shifted: Vec<(f64, Complex64)> = partial.iter().map(|&(r, v)| (1.0 - r, v)).collect();
    let limit = extrapolate_to_zero(&shifted)?;
    Ok(AbelExtrapolation {
        q,
        t,
        partial,
        limit,
    })
}

/// `<q|t>` from the Fock-measure Gaussian integral with `conj(alpha) = i`.
pub fn overlap_gaussian(q: f64, t: f64) -> Result<PlaneWaveOverlap> {
    let form = momentum_overlap_integrand(q, t, Complex64::new(0.0, 1.0))?;
    let g = gaussian_integral(&form.matrix, &form.linear)?;
    Ok(PlaneWaveOverlap {
        q,
        t,
        value: form.prefactor * g.to_complex(),
    })
}

/// Exact dimensionless overlap `(2 pi)^(-1/2) e^{i q t}`.
pub fn overlap_exact(q: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), q * t)
}

/// `<x|p>` in physical units: the dimensionless overlap times `hbar^(-1/2)`.
pub fn plane_wave_physical(x: f64, p: f64, params: &OscillatorParams) -> Result<Complex64> {
    let overlap = overlap_gaussian(params.q_of_x(x), params.t_of_p(p))?;
    Ok(overlap.value / params.hbar().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator_basis::{momentum_phase, u, PI_POW_NEG_QUARTER};

    fn idx(n: usize) -> BasisIndex {
        BasisIndex::new(n).unwrap()
    }

    fn trunc(n: usize) -> SeriesTruncation {
        SeriesTruncation::new(n).unwrap()
    }

    #[test]
    fn ground_state_transform_at_origin() {
        let rule = transform_rule(0.0).unwrap();
        let f = fourier_of_psi(idx(0), 0.0, &rule).unwrap();
        assert!((f - PI_POW_NEG_QUARTER).norm() < 1e-10);
    }

    #[test]
    fn first_excited_state_transform() {
        let rule = transform_rule(2.0).unwrap();
        for t in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let f = fourier_of_psi(idx(1), t, &rule).unwrap();
            assert!(
                (f - Complex64::new(0.0, -u(idx(1), t))).norm() < 1e-9,
                "t={t}"
            );
        }
    }

    #[test]
    fn fourth_state_transform() {
        let rule = transform_rule(1.5).unwrap();
        let f = fourier_of_psi(idx(4), 1.5, &rule).unwrap();
        assert!((f - u(idx(4), 1.5)).norm() < 1e-9);
    }

    #[test]
    fn narrow_rule_rejected() {
        let rule = truncated_uniform_with_spacing(6.0, 0.01).unwrap();
        match fourier_of_psi(idx(10), 0.0, &rule) {
            Err(Error::DomainTruncation { required, .. }) => {
                assert!((required - (21f64.sqrt() + 4.0)).abs() < 1e-12)
            }
            r => panic!("{r:?}"),
        }
        let rule = transform_rule(0.0).unwrap();
        assert!(fourier_of_psi(idx(41), 0.0, &rule).is_err());
    }

    #[test]
    fn phases() {
        for n in [0usize, 2, 7] {
            let est = extract_phase(idx(n)).unwrap();
            assert!((est.phase - momentum_phase(n)).norm() < 1e-8, "n={n}");
            assert!(est.residual <= 1e-8);
            assert!((est.phase.norm() - 1.0).abs() <= 1e-10);
        }
        assert_eq!(momentum_phase(7), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn overlap_examples() {
        let s = overlap_series(0.0, 0.0, 0.9, trunc(200)).unwrap().value;
        assert!((s - overlap_damped_closed(0.0, 0.0, 0.9)).norm() < 1e-10);
        assert!(s.im.abs() < 1e-15);

        let s = overlap_series(0.0, 0.0, 0.0, trunc(1)).unwrap().value;
        assert!((s.re - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert!(overlap_series(0.0, 0.0, 1.5, trunc(1)).is_err());
    }

    #[test]
    fn damped_closed_form_is_mehler_at_lower_half_plane_time() {
        // rho = i r = e^{-i alpha} with alpha = -pi/2 + i ln r
        use crate::propagator::{mehler_kernel, TimeArgument};
        for r in [0.3_f64, 0.9, 0.99] {
            let alpha = Complex64::new(-PI / 2.0, r.ln());
            let k = mehler_kernel(0.8, -0.4, &TimeArgument::new(alpha).unwrap())
                .unwrap()
                .value;
            let expected = k * (Complex64::new(0.0, 0.5) * alpha).exp();
            assert!((overlap_damped_closed(0.8, -0.4, r) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn abel_limit() {
        let ex = abel_extrapolate(1.0, 1.0, &ABEL_RADII).unwrap();
        assert!((ex.limit - overlap_exact(1.0, 1.0)).norm() < 1e-3);
        let np = ex.normalization();
        assert!((np.norm() - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-3);
        assert!(np.arg().abs() < 1e-3);
        for &(r, v) in &ex.partial {
            assert!((v - overlap_damped_closed(1.0, 1.0, r)).norm() < 1e-10);
        }
    }

    #[test]
    fn extrapolation_exact_for_polynomials() {
        let pts: Vec<(f64, Complex64)> = [0.1, 0.01, 0.001]
            .iter()
            .map(|&h| (h, Complex64::new(2.0 + 3.0 * h - h * h, h)))
            .collect();
        assert!((extrapolate_to_zero(&pts).unwrap() - 2.0).norm() < 1e-12);
        assert!(extrapolate_to_zero(&[]).is_err());
    }

    #[test]
    fn gaussian_overlap_is_plane_wave() {
        for (q, t) in [(0.0, 0.0), (1.0, 1.0), (-0.7, 2.3), (3.0, -0.4)] {
            let v = overlap_gaussian(q, t).unwrap().value;
            assert!((v - overlap_exact(q, t)).norm() < 1e-12, "({q}, {t})");
        }
    }

    #[test]
    fn physical_plane_wave() {
        let params = OscillatorParams::new(1.3, 0.7, 0.25).unwrap();
        let (x, p) = (0.9, -1.6);
        let v = plane_wave_physical(x, p, &params).unwrap();
        let expected = Complex64::from_polar(1.0 / (2.0 * PI * 0.25f64).sqrt(), x * p / 0.25);
        assert!((v - expected).norm() < 1e-12);
    }
}
