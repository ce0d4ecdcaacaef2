//! Delta functions from the oscillator basis: the truncated completeness
//! kernel `sum_{n<N} u_n(q') u_n(q)` and the Gaussian mollifier
//! `delta_eps(x) = (4 pi eps)^(-1/2) exp(-x^2 / (4 eps))`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::oscillator_basis::{u_pair, HermiteFunctions, N_MAX};
use crate::quadrature::{
    truncated_uniform_with_spacing, MeasureTag, QuadratureRule, DEFAULT_SPACING,
};
use crate::summation::KahanSum;

/// Below this separation the kernel is summed directly.
pub const DIRECT_SUM_SEPARATION: f64 = 1e-8;

/// Largest admissible mollifier width.
pub const MAX_EPSILON: f64 = 10.0;

/// Rank-`N` projector onto the span of `u_0, ..., u_{N-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompletenessKernel {
    n: usize,
}

impl CompletenessKernel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > N_MAX {
            return Err(Error::InvalidArgument(format!(
                "kernel order must be in 1..={N_MAX}, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// `sum_{n<N} u_n(qp) u_n(q)`.
    pub fn eval(&self, qp: f64, q: f64) -> f64 {
        let n = self.n;
        let diff = qp - q;
        if diff.abs() <= DIRECT_SUM_SEPARATION {
            return HermiteFunctions::new(qp)
                .zip(HermiteFunctions::new(q))
                .take(n)
                .map(|(a, b)| a * b)
                .collect::<KahanSum>()
                .value();
        }
        let (a_prev, a_n) = u_pair(n, qp);
        let (b_prev, b_n) = u_pair(n, q);
        (0.5 * n as f64).sqrt() * (a_n * b_prev - a_prev * b_n) / diff
    }

    /// Half-width beyond which every `u_n`, `n < N`, is negligible.
    pub fn support_half_width(&self) -> f64 {
        ((2 * self.n + 1) as f64).sqrt() + 8.0
    }
}

/// `sum_{n<N} u_n(qp) u_n(q)` (Christoffel-Darboux form away from the diagonal).
pub fn kernel_truncated(n: usize, qp: f64, q: f64) -> Result<f64> {
    Ok(CompletenessKernel::new(n)?.eval(qp, q))
}

/// `int K_N(q, s) K_N(s, q') ds` by quadrature.
pub fn kernel_square(n: usize, q: f64, qp: f64, rule: &QuadratureRule) -> Result<f64> {
    let k = CompletenessKernel::new(n)?;
    Ok(rule.integrate_lebesgue(|s| k.eval(q, s) * k.eval(s, qp)))
}

/// `int K_N(q, q) dq` by quadrature.
pub fn kernel_trace(n: usize, rule: &QuadratureRule) -> Result<f64> {
    let k = CompletenessKernel::new(n)?;
    Ok(rule.integrate_lebesgue(|q| k.eval(q, q)))
}

/// Width parameter of the Gaussian mollifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifiedDelta {
    epsilon: f64,
}

impl MollifiedDelta {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= MAX_EPSILON) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0, {MAX_EPSILON}], got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Standard deviation `sqrt(2 eps)`.
    pub fn sigma(&self) -> f64 {
        (2.0 * self.epsilon).sqrt()
    }
}

/// `(4 pi eps)^(-1/2) exp(-x^2 / (4 eps))`.
pub fn mollified_delta(eps: &MollifiedDelta, x: f64) -> f64 {
    let e = eps.epsilon;
    (-x * x / (4.0 * e)).exp() / (4.0 * PI * e).sqrt()
}

/// `int delta_eps(x) dx`. On a Gauss-Hermite rule the variable is rescaled
/// `x = 2 sqrt(eps) y` so the Gaussian matches the rule's weight.
pub fn unit_integral(eps: &MollifiedDelta, rule: &QuadratureRule) -> f64 {
    match rule.measure() {
        MeasureTag::GaussWeight => {
            let scale = 2.0 * eps.epsilon.sqrt();
            // delta_eps(scale y) scale e^{y^2}, with the exponents cancelled analytically
            rule.integrate(|y| {
                let x = scale * y;
                (-x * x / (4.0 * eps.epsilon) + y * y).exp() * scale
                    / (4.0 * PI * eps.epsilon).sqrt()
            })
        }
        MeasureTag::LebesgueTruncated => rule.integrate_lebesgue(|x| mollified_delta(eps, x)),
    }
}

/// Standard deviations of the mollifier a sifting rule must cover.
const SIFT_SIGMAS: f64 = 9.0;

/// Uniform rule resolving `delta_eps` centered anywhere in `[-center_bound, center_bound]`.
pub fn sift_rule(eps: &MollifiedDelta, center_bound: f64) -> Result<QuadratureRule> {
    let half_width = center_bound.abs() + SIFT_SIGMAS * eps.sigma() + 1.0;
    truncated_uniform_with_spacing(half_width, DEFAULT_SPACING.min(0.25 * eps.sigma()))
}

/// `int delta_eps(q - s) f(s) ds`.
pub fn sift(
    eps: &MollifiedDelta,
    f: impl Fn(f64) -> f64,
    q: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    rule.require_half_width(q.abs() + SIFT_SIGMAS * eps.sigma())?;
    Ok(rule.integrate_lebesgue(|s| mollified_delta(eps, q - s) * f(s)))
}

/// Uniform rule covering the support of `K_N` for every `N <= n_max`.
pub fn weak_convergence_rule(n_max: usize) -> Result<QuadratureRule> {
    truncated_uniform_with_spacing(
        CompletenessKernel::new(n_max)?.support_half_width(),
        DEFAULT_SPACING,
    )
}

/// `[int K_N(q, s) f(s) ds for N in n_list]`.
pub fn kernel_weak_convergence(
    n_list: &[usize],
    f: impl Fn(f64) -> f64,
    q: f64,
    rule: &QuadratureRule,
) -> Result<Vec<f64>> {
    let fs: Vec<f64> = rule.nodes().iter().map(|&s| f(s)).collect();
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let k = CompletenessKernel::new(n)?;
        rule.require_half_width(k.support_half_width().max(q.abs()))?;
        let mut acc = KahanSum::new();
        for ((&s, &w), &fv) in rule.nodes().iter().zip(rule.lebesgue_weights()).zip(&fs) {
            acc.add(w * k.eval(q, s) * fv);
        }
        out.push(acc.value());
    }
    Ok(out)
}
