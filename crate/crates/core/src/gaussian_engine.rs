//! Closed-form multivariate Gaussian integrals with complex symmetric
//! quadratic forms,
//!
//! ```text
//! (2 pi)^(-n/2) int exp(-x^T X x / 2 + J^T x) d^n x = det(X)^(-1/2) exp(J^T X^{-1} J / 2),
//! ```
//!
//! valid whenever the real part of `X` is positive definite. `X` is complex
//! symmetric (`X = X^T`), not Hermitian, and is factored as `L D L^T`
//! without pivoting.
//!
//! When `Re X` is positive definite every Schur complement has a positive
//! definite real part as well, so each pivot `D_ii` lies in the open right
//! half-plane. The product of principal square roots of the pivots is then the
//! analytic continuation of `sqrt(det X)` from the real axis; no branch
//! bookkeeping is needed inside the integrable region.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

/// Pivots below `PIVOT_TOLERANCE * ||X||` are treated as singular.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Largest dimension accepted by [`brute_force_oracle`].
pub const ORACLE_MAX_DIM: usize = 3;

const LOG_SCALE_THRESHOLD: f64 = 500.0;

/// Complex symmetric matrix stored as its packed upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricComplexMatrix {
    dim: usize,
    upper: Vec<Complex64>,
}

impl SymmetricComplexMatrix {
    /// Builds the matrix from `f(i, j)` evaluated for `i <= j`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "matrix dimension must be positive".into(),
            ));
        }
        let mut upper = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                upper.push(f(i, j));
            }
        }
        Ok(Self { dim, upper })
    }

    /// Builds the matrix from full rows; rejects anything that is not exactly symmetric.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("matrix rows must be square".into()));
        }
        for i in 0..dim {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidArgument(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn diagonal(diag: &[Complex64]) -> Result<Self> {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                diag[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.dim - i * (i + 1) / 2 + j
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.upper[self.offset(i, j)]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.get(i, j).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// `x^T X y` (no conjugation).
    pub fn bilinear(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += x[i] * self.get(i, j) * y[j];
            }
        }
        s
    }

    /// Whether `Re X` is positive definite, by attempting a real Cholesky factorization.
    pub fn real_part_positive_definite(&self) -> bool {
        let n = self.dim;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = self.get(j, j).re;
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = self.get(i, j).re;
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        true
    }
}

/// `X = L D L^T` with unit lower-triangular `L`.
#[derive(Debug, Clone)]
pub struct LdlFactorization {
    dim: usize,
    lower: Vec<Complex64>,
    pivots: Vec<Complex64>,
    condition_estimate: f64,
}

impl LdlFactorization {
    pub fn new(x: &SymmetricComplexMatrix) -> Result<Self> {
        let n = x.dim();
        let norm = x.norm();
        let mut lower = vec![Complex64::new(0.0, 0.0); n * n];
        let mut pivots = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            let mut d = x.get(j, j);
            for k in 0..j {
                d -= lower[j * n + k] * lower[j * n + k] * pivots[k];
            }
            if !(d.norm() >= PIVOT_TOLERANCE * norm) || norm == 0.0 {
                return Err(Error::SingularForm {
                    pivot: j,
                    modulus: d.norm(),
                });
            }
            pivots[j] = d;
            lower[j * n + j] = Complex64::new(1.0, 0.0);
            for i in j + 1..n {
                let mut s = x.get(i, j);
                for k in 0..j {
                    s -= lower[i * n + k] * lower[j * n + k] * pivots[k];
                }
                lower[i * n + j] = s / d;
            }
        }
        let (lo, hi) = pivots.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), p| {
            (lo.min(p.norm()), hi.max(p.norm()))
        });
        Ok(Self {
            dim: n,
            lower,
            pivots,
            condition_estimate: hi / lo,
        })
    }

    pub fn pivots(&self) -> &[Complex64] {
        &self.pivots
    }

    /// Ratio of the largest to the smallest pivot modulus.
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    /// Solves `X y = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let t = self.lower[i * n + k] * y[k];
                y[i] -= t;
            }
        }
        for i in 0..n {
            y[i] /= self.pivots[i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.lower[k * n + i] * y[k];
                y[i] -= t;
            }
        }
        y
    }

    /// `det X` as the product of pivots.
    pub fn determinant(&self) -> Complex64 {
        self.pivots.iter().product()
    }

    /// `-1/2 sum log D_ii` on the principal branch of each pivot.
    pub fn log_inv_sqrt_det(&self) -> Complex64 {
        -0.5 * self.pivots.iter().map(|d| d.ln()).sum::<Complex64>()
    }

    /// `J^T X^{-1} J / 2`.
    pub fn half_quadratic(&self, j: &[Complex64]) -> Complex64 {
        let y = self.solve(j);
        0.5 * j.iter().zip(&y).map(|(a, b)| a * b).sum::<Complex64>()
    }
}

/// Whether the square root of the determinant was taken on the principal
/// branch of every pivot, or continued along a caller-supplied path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchNote {
    Principal,
    Continued,
}

/// `value * exp(log_scale)`. `log_scale` is nonzero only when the result
/// would leave the comfortable `f64` range, in which case `|value| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianResult {
    pub value: Complex64,
    pub log_scale: f64,
    pub branch: BranchNote,
}

impl GaussianResult {
    fn from_log(log: Complex64, branch: BranchNote) -> Self {
        if log.re.abs() <= LOG_SCALE_THRESHOLD {
            Self {
                value: log.exp(),
                log_scale: 0.0,
                branch,
            }
        } else {
            Self {
                value: Complex64::from_polar(1.0, log.im),
                log_scale: log.re,
                branch,
            }
        }
    }

    /// The result as a plain complex number (may under/overflow).
    pub fn to_complex(&self) -> Complex64 {
        self.value * self.log_scale.exp()
    }

    /// Natural logarithm of the result.
    pub fn ln(&self) -> Complex64 {
        self.value.ln() + self.log_scale
    }
}

fn check_dims(x: &SymmetricComplexMatrix, j: &[Complex64]) -> Result<()> {
    if j.len() != x.dim() {
        return Err(Error::InvalidArgument(format!(
            "J has length {} but X is {}x{}",
            j.len(),
            x.dim(),
            x.dim()
        )));
    }
    Ok(())
}

/// Closed form of the normalized Gaussian integral for `(X, J)`.
pub fn gaussian_integral(x: &SymmetricComplexMatrix, j: &[Complex64]) -> Result<GaussianResult> {
    check_dims(x, j)?;
    if !x.real_part_positive_definite() {
        return Err(Error::DivergentIntegral);
    }
    let ldl = LdlFactorization::new(x)?;
    Ok(GaussianResult::from_log(
        ldl.log_inv_sqrt_det() + ldl.half_quadratic(j),
        BranchNote::Principal,
    ))
}

/// Same as [`gaussian_integral`] but with `sqrt(det X)` continued along
/// `path`, whose last element is the target matrix.
///
/// Each pivot's square root is tracked continuously from the principal value
/// at `path[0]`; the result is flagged [`BranchNote::Continued`] if any pivot
/// crosses the negative real axis. Intermediate matrices only need to be
/// factorable, so this also serves as an analytic continuation tool outside
/// the integrable region.
pub fn gaussian_integral_continued(
    path: &[SymmetricComplexMatrix],
    j: &[Complex64],
) -> Result<GaussianResult> {
    let first = path
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty homotopy path".into()))?;
    check_dims(first, j)?;
    if path.iter().any(|m| m.dim() != first.dim()) {
        return Err(Error::InvalidArgument(
            "homotopy path changes dimension".into(),
        ));
    }
    let mut ldl = LdlFactorization::new(first)?;
    let mut roots: Vec<Complex64> = ldl.pivots().iter().map(|d| d.sqrt()).collect();
    let mut prev: Vec<Complex64> = ldl.pivots().to_vec();
    let mut crossed = false;
    for m in &path[1..] {
        ldl = LdlFactorization::new(m)?;
        for (k, d) in ldl.pivots().iter().enumerate() {
            let p = prev[k];
            if (p.im > 0.0 && d.im <= 0.0 || p.im < 0.0 && d.im >= 0.0) && (p.re + d.re) < 0.0 {
                crossed = true;
            }
            let s = d.sqrt();
            roots[k] = if (s - roots[k]).norm() <= (s + roots[k]).norm() {
                s
            } else {
                -s
            };
            prev[k] = *d;
        }
    }
    let log_inv_sqrt = -roots.iter().map(|r| r.ln()).sum::<Complex64>();
    let branch = if crossed {
        BranchNote::Continued
    } else {
        BranchNote::Principal
    };
    Ok(GaussianResult::from_log(
        log_inv_sqrt + ldl.half_quadratic(j),
        branch,
    ))
}

/// Direct tensor-product quadrature of
/// `(2 pi)^(-n/2) exp(-x^T X x / 2 + J^T x)` over the rule's window.
///
/// The integrand is split into per-axis and per-pair factors so the inner
/// loop is multiplications only; the sum visits nodes in ascending index order.
pub fn brute_force_oracle(
    x: &SymmetricComplexMatrix,
    j: &[Complex64],
    rule: &QuadratureRule,
) -> Result<Complex64> {
    check_dims(x, j)?;
    let n = x.dim();
    if n > ORACLE_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "brute-force oracle supports dim <= {ORACLE_MAX_DIM}, got {n}"
        )));
    }
    if !x.real_part_positive_definite() {
        return Err(Error::DivergentIntegral);
    }
    let nodes = rule.nodes();
    let weights = rule.lebesgue_weights();
    let m = nodes.len();

    let axis: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            nodes
                .iter()
                .zip(weights)
                .map(|(&s, &w)| (-0.5 * x.get(i, i) * s * s + j[i] * s).exp() * w)
                .collect()
        })
        .collect();
    let pair = |a: usize, b: usize| -> Vec<Complex64> {
        let c = x.get(a, b);
        let mut out = Vec::with_capacity(m * m);
        for &s in nodes {
            for &t in nodes {
                out.push((-c * s * t).exp());
            }
        }
        out
    };
    for f in axis.iter().flatten() {
        if !(f.re.is_finite() && f.im.is_finite()) {
            return Err(Error::NumericDomain {
                context: "oracle axis factor".into(),
                node: None,
            });
        }
    }

    let norm = (2.0 * PI).powf(-(n as f64) / 2.0);
    let mut acc = crate::summation::ComplexKahanSum::new();
    match n {
        1 => {
            for v in &axis[0] {
                acc.add(*v);
            }
        }
        2 => {
            let p01 = pair(0, 1);
            for a in 0..m {
                let mut row = crate::summation::ComplexKahanSum::new();
                for b in 0..m {
                    row.add(axis[1][b] * p01[a * m + b]);
                }
                acc.add(axis[0][a] * row.value());
            }
        }
        _ => {
            let p01 = pair(0, 1);
            let p02 = pair(0, 2);
            let p12 = pair(1, 2);
            for a in 0..m {
                let mut plane = crate::summation::ComplexKahanSum::new();
                for b in 0..m {
                    let mut row = crate::summation::ComplexKahanSum::new();
                    let base = axis[1][b] * p01[a * m + b];
                    for c in 0..m {
                        row.add(axis[2][c] * p02[a * m + c] * p12[b * m + c]);
                    }
                    plane.add(base * row.value());
                }
                acc.add(axis[0][a] * plane.value());
            }
        }
    }
    let value = acc.value() * norm;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NumericDomain {
            context: "oracle sum".into(),
            node: None,
        });
    }
    Ok(value)
}

/// Quadratic form, linear term and constant prefactor of a Fock-measure
/// integral written as `prefactor * gaussian_integral(X, J)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockGaussianForm {
    pub matrix: SymmetricComplexMatrix,
    pub linear: Vec<Complex64>,
    pub prefactor: Complex64,
}

impl FockGaussianForm {
    /// `prefactor * gaussian_integral(matrix, linear)`.
    pub fn evaluate(&self) -> Result<Complex64> {
        Ok(self.prefactor * gaussian_integral(&self.matrix, &self.linear)?.to_complex())
    }
}

/// Assembles `int G_x(z, q) G(conj(alpha_bar z), t) dmu(z)` in the variables
/// `z = u + i v`, where `G(w, t) = pi^(-1/4) exp(sqrt2 t w - t^2/2 - w^2/2)`.
///
/// Expanding the exponent gives `-1/2 (u, v) X (u, v)^T + J . (u, v)` with
///
/// ```text
/// X = [[3 + a^2, i - i a^2], [i - i a^2, 1 - a^2]],   a = alpha_bar
/// J = sqrt2 (q + a t, i (q - a t))
/// ```
///
/// and the prefactor collects `pi^(-1/2) e^{-(q^2+t^2)/2}`, the `1/pi` of the
/// measure and the `2 pi` normalization of the two-dimensional integral.
pub fn momentum_overlap_integrand(
    q: f64,
    t: f64,
    alpha_bar: Complex64,
) -> Result<FockGaussianForm> {
    if (alpha_bar.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "|alpha_bar| must be 1, got {}",
            alpha_bar.norm()
        )));
    }
    let i = Complex64::new(0.0, 1.0);
    let a2 = alpha_bar * alpha_bar;
    let off = i - i * a2;
    let matrix = SymmetricComplexMatrix::from_rows(&[vec![3.0 + a2, off], vec![off, 1.0 - a2]])?;
    let linear = vec![
        SQRT_2 * (q + alpha_bar * t),
        SQRT_2 * i * (q - alpha_bar * t),
    ];
    let prefactor = Complex64::new(2.0 / PI.sqrt() * (-0.5 * (q * q + t * t)).exp(), 0.0);
    Ok(FockGaussianForm {
        matrix,
        linear,
        prefactor,
    })
}

/// Draws a random integrable instance `(X, J)` of dimension `dim`.
///
/// `Re X = Q diag(lambda) Q^T` with `lambda` uniform in `[0.5, 4]` and `Q` a
/// random orthogonal matrix; `Im X` has independent entries in `[-1, 1]`;
/// `|J| <= 2`. `uniform` must return samples in `[0, 1)`.
pub fn sample_admissible(
    dim: usize,
    mut uniform: impl FnMut() -> f64,
) -> Result<(SymmetricComplexMatrix, Vec<Complex64>)> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| 2.0 * uniform() - 1.0).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= dot * y;
            }
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-3 {
            basis.push(v.into_iter().map(|x| x / len).collect());
        }
    }
    let lambdas: Vec<f64> = (0..dim).map(|_| 0.5 + 3.5 * uniform()).collect();
    let mut imag = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let v = 2.0 * uniform() - 1.0;
            imag[i * dim + j] = v;
            imag[j * dim + i] = v;
        }
    }
    let matrix = SymmetricComplexMatrix::from_fn(dim, |i, j| {
        let re: f64 = (0..dim)
            .map(|k| basis[k][i] * lambdas[k] * basis[k][j])
            .sum();
        Complex64::new(re, imag[i * dim + j])
    })?;
    let mut linear: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(2.0 * uniform() - 1.0, 2.0 * uniform() - 1.0))
        .collect();
    let len = linear.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = 2.0 * uniform();
    if len > 0.0 {
        for z in linear.iter_mut() {
            *z *= target / len;
        }
    }
    Ok((matrix, linear))
}
