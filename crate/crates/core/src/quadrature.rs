//! Quadrature rules: Gauss-Hermite for Gaussian-weighted integrals, a
//! truncated uniform (trapezoidal) rule for oscillatory integrals with
//! Gaussian envelopes, and tensor-product rules for the Fock measure
//! `(1/pi) exp(-(u^2 + v^2)) du dv`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscillator_basis::u_pair;
use crate::summation::{ComplexKahanSum, KahanSum};

pub const GAUSS_HERMITE_MAX_ORDER: usize = 512;

/// Spacing used by [`default_oscillatory_rule`].
pub const DEFAULT_SPACING: f64 = 0.01;

/// The measure a rule's weights integrate against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureTag {
    /// Weights absorb `exp(-x^2)`.
    GaussWeight,
    /// Plain `dx` on a finite window.
    LebesgueTruncated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    // weights against dx; equals `weights * exp(nodes^2)` for Gauss rules
    lebesgue_weights: Vec<f64>,
    measure: MeasureTag,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights against the rule's native measure.
    ///
    /// For high Gauss-Hermite orders the outermost weights fall below the
    /// smallest positive `f64` and are stored as zero; [`Self::lebesgue_weights`]
    /// stays positive.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weights against plain `dx`, i.e. `w_i exp(x_i^2)` for Gauss rules.
    pub fn lebesgue_weights(&self) -> &[f64] {
        &self.lebesgue_weights
    }

    pub fn measure(&self) -> MeasureTag {
        self.measure
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Largest `|node|`.
    pub fn half_width(&self) -> f64 {
        self.nodes.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// `sum_i w_i f(x_i)` against the native measure.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = KahanSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(x));
        }
        acc.value()
    }

    /// `int f(x) dx` regardless of the native measure.
    pub fn integrate_lebesgue(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = KahanSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.lebesgue_weights) {
            acc.add(w * f(x));
        }
        acc.value()
    }

    /// Complex version of [`Self::integrate_lebesgue`].
    pub fn integrate_lebesgue_complex(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        let mut acc = ComplexKahanSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.lebesgue_weights) {
            acc.add(f(x) * w);
        }
        acc.value()
    }

    /// Returns an error if the rule does not reach `required` on both sides.
    pub fn require_half_width(&self, required: f64) -> Result<()> {
        let actual = self.half_width();
        if actual < required {
            return Err(Error::DomainTruncation { required, actual });
        }
        Ok(())
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix with zero diagonal and
/// off-diagonal `offdiag`, by implicit QL with Wilkinson shifts.
fn tridiagonal_eigenvalues(offdiag: &[f64]) -> Vec<f64> {
    let n = offdiag.len() + 1;
    let mut d = vec![0.0_f64; n];
    let mut e = offdiag.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 100, "tridiagonal QL failed to converge");

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    d
}

/// Gauss-Hermite rule of the given order against `exp(-x^2)`.
///
/// Nodes are the eigenvalues of the Jacobi matrix (Golub-Welsch), polished by
/// Newton steps on `u_n`, then symmetrized. Weights come from the Christoffel
/// numbers `1 / (n u_{n-1}(x_i)^2)` against `dx`.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    if !(1..=GAUSS_HERMITE_MAX_ORDER).contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "Gauss-Hermite order must be in 1..={GAUSS_HERMITE_MAX_ORDER}, got {order}"
        )));
    }
    let n = order;
    let offdiag: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let mut nodes = tridiagonal_eigenvalues(&offdiag);

    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (um1, un) = u_pair(n, *x);
            let deriv = (2.0 * n as f64).sqrt() * um1 - *x * un;
            if deriv == 0.0 {
                break;
            }
            let step = un / deriv;
            *x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
    }

    for i in 0..n / 2 {
        let j = n - 1 - i;
        let a = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -a;
        nodes[j] = a;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }

    let mut lebesgue_weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let um1 = u_pair(n - 1, x).1;
            1.0 / (n as f64 * um1 * um1)
        })
        .collect();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let w = 0.5 * (lebesgue_weights[i] + lebesgue_weights[j]);
        lebesgue_weights[i] = w;
        lebesgue_weights[j] = w;
    }
    let weights = nodes
        .iter()
        .zip(&lebesgue_weights)
        .map(|(&x, &l)| (l.ln() - x * x).exp())
        .collect();

    Ok(QuadratureRule {
        nodes,
        weights,
        lebesgue_weights,
        measure: MeasureTag::GaussWeight,
    })
}

/// Composite trapezoidal rule on `[-half_width, half_width]` with an odd
/// number of equally spaced points (so 0 is a node).
pub fn truncated_uniform(half_width: f64, points: usize) -> Result<QuadratureRule> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "half_width must be > 0, got {half_width}"
        )));
    }
    if points < 3 || points.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "points must be odd and >= 3, got {points}"
        )));
    }
    let m = (points - 1) / 2;
    let h = half_width / m as f64;
    let nodes: Vec<f64> = (0..points)
        .map(|i| {
            let k = i as i64 - m as i64;
            if k.unsigned_abs() as usize == m {
                half_width.copysign(k as f64)
            } else {
                k as f64 * h
            }
        })
        .collect();
    let weights: Vec<f64> = (0..points)
        .map(|i| {
            if i == 0 || i == points - 1 {
                0.5 * h
            } else {
                h
            }
        })
        .collect();
    Ok(QuadratureRule {
        nodes,
        lebesgue_weights: weights.clone(),
        weights,
        measure: MeasureTag::LebesgueTruncated,
    })
}

/// Truncated uniform rule with spacing at most `spacing` on `[-half_width, half_width]`.
pub fn truncated_uniform_with_spacing(half_width: f64, spacing: f64) -> Result<QuadratureRule> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "spacing must be > 0, got {spacing}"
        )));
    }
    let m = (half_width / spacing).ceil().max(1.0) as usize;
    truncated_uniform(half_width, 2 * m + 1)
}

/// Default rule for Fourier-type integrals of Gaussian-enveloped functions:
/// half-width `10 + 2 max|frequency|`, spacing at most 0.01.
pub fn default_oscillatory_rule(max_frequency: f64) -> Result<QuadratureRule> {
    truncated_uniform_with_spacing(10.0 + 2.0 * max_frequency.abs(), DEFAULT_SPACING)
}

/// Tensor product of two 1-D rules over the `(u, v)` plane, `z = u + i v`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorRule2D {
    pub rule_u: QuadratureRule,
    pub rule_v: QuadratureRule,
}

impl TensorRule2D {
    pub fn new(rule_u: QuadratureRule, rule_v: QuadratureRule) -> Self {
        Self { rule_u, rule_v }
    }

    /// Same Gauss-Hermite rule on both axes.
    pub fn gauss_hermite(order: usize) -> Result<Self> {
        let r = gauss_hermite(order)?;
        Ok(Self {
            rule_u: r.clone(),
            rule_v: r,
        })
    }

    pub fn point_count(&self) -> usize {
        self.rule_u.order() * self.rule_v.order()
    }
}

/// `int f(z) dmu(z)` with `dmu = (1/pi) exp(-(u^2+v^2)) du dv`.
///
/// Gauss-Hermite axes already carry `exp(-x^2)`; Lebesgue axes get it
/// applied explicitly, so the Gaussian weight enters exactly once.
pub fn integrate_fock(
    f: impl Fn(Complex64) -> Complex64,
    rule: &TensorRule2D,
) -> Result<Complex64> {
    let axis = |r: &QuadratureRule| -> Vec<(f64, f64)> {
        r.nodes
            .iter()
            .zip(&r.weights)
            .map(|(&x, &w)| match r.measure {
                MeasureTag::GaussWeight => (x, w),
                MeasureTag::LebesgueTruncated => (x, w * (-x * x).exp()),
            })
            .collect()
    };
    let us = axis(&rule.rule_u);
    let vs = axis(&rule.rule_v);
    let mut acc = ComplexKahanSum::new();
    for &(u, wu) in &us {
        for &(v, wv) in &vs {
            let w = wu * wv;
            if w == 0.0 {
                continue;
            }
            let value = f(Complex64::new(u, v));
            if !(value.re.is_finite() && value.im.is_finite()) {
                return Err(Error::NumericDomain {
                    context: "Fock-measure integrand".into(),
                    node: Some((u, v)),
                });
            }
            acc.add(value * w);
        }
    }
    Ok(acc.value() / PI)
}
