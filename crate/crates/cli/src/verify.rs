//! The `verify` suite: every library invariant as a named check with a
//! measured error and a tolerance.

use std::f64::consts::PI;

use hosc::delta_kernel::{
    kernel_square, kernel_trace, kernel_truncated, kernel_weak_convergence, mollified_delta, sift,
    sift_rule, unit_integral, weak_convergence_rule, MollifiedDelta,
};
use hosc::gaussian_engine::{
    brute_force_oracle, gaussian_integral, momentum_overlap_integrand, sample_admissible,
    LdlFactorization,
};
use hosc::generating_function::{
    fock_inner, gx_closed, gx_series, gx_taylor_coefficient, SeriesTruncation,
};
use hosc::momentum_transform::{
    abel_extrapolate, extract_phase, inverse_of_fourier, momentum_norm, overlap_exact,
    overlap_gaussian, ABEL_RADII,
};
use hosc::oscillator_basis::{energy, hermite, momentum_phase, u_table, BasisIndex};
use hosc::propagator::{
    compose, evolve, genfunc_route, mehler_kernel, packet_moments, spectral_sum, TimeArgument,
};
use hosc::quadrature::{
    gauss_hermite, truncated_uniform, truncated_uniform_with_spacing, TensorRule2D,
};
use hosc::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    /// Short description of the identity being checked.
    pub identity: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn overall_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn to_table(&self) -> Table {
        let mut table = Table::new(
            "verify",
            &[
                "check",
                "identity",
                "max_error",
                "tolerance",
                "pass",
                "note",
            ],
        );
        for r in &self.records {
            table.push(vec![
                r.name.as_str().into(),
                r.identity.as_str().into(),
                r.max_error.into(),
                r.tolerance.into(),
                r.pass.into(),
                r.note.clone().map_or(Cell::Empty, Cell::from),
            ]);
        }
        table.push(vec![
            "overall".into(),
            "all checks pass".into(),
            Cell::Empty,
            Cell::Empty,
            self.overall_pass().into(),
            Cell::Empty,
        ]);
        table
    }
}

struct Runner {
    records: Vec<CheckRecord>,
    tolerance_override: Option<f64>,
}

impl Runner {
    fn check(
        &mut self,
        name: &str,
        identity: &str,
        tolerance: f64,
        f: impl FnOnce() -> hosc::Result<f64>,
    ) {
        let tolerance = self.tolerance_override.unwrap_or(tolerance);
        let (max_error, note) = match f() {
            Ok(e) => (e, None),
            Err(e) => (f64::INFINITY, Some(e.to_string())),
        };
        let pass = max_error <= tolerance;
        self.records.push(CheckRecord {
            name: name.to_string(),
            identity: identity.to_string(),
            max_error,
            tolerance,
            pass,
            note,
        });
    }
}

fn idx(n: usize) -> BasisIndex {
    BasisIndex::new(n).expect("index below cap")
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn bit_mismatch(a: f64, b: f64) -> f64 {
    if a.to_bits() == b.to_bits() {
        0.0
    } else {
        1.0
    }
}

/// Number of checks in a full run.
pub const CHECK_COUNT: usize = 34;

pub fn run_verify(config: &RunConfig) -> VerificationReport {
    let mut r = Runner {
        records: Vec::new(),
        tolerance_override: config.tolerance_override,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let params = config.params();

    basis_checks(&mut r, config, &mut rng, &params);
    generating_checks(&mut r, config);
    gaussian_checks(&mut r, config, &mut rng);
    momentum_checks(&mut r);
    delta_checks(&mut r, config, &mut rng);
    propagator_checks(&mut r);

    VerificationReport { records: r.records }
}

fn basis_checks(
    r: &mut Runner,
    config: &RunConfig,
    rng: &mut ChaCha8Rng,
    params: &hosc::oscillator_basis::OscillatorParams,
) {
    r.check(
        "hermite_low_order",
        "H_0 = 1, H_3(q) = 8q^3 - 12q",
        1e-12,
        || {
            let a = (hermite(idx(0), 0.7)? - 1.0).abs();
            let b = (hermite(idx(3), 1.0)? + 4.0).abs();
            let c = (hermite(idx(3), -1.7)? - (8.0 * -4.913 + 12.0 * 1.7)).abs();
            Ok(a.max(b).max(c))
        },
    );

    let order = config.gauss_order;
    r.check(
        "basis_orthonormality",
        "int u_m u_n = delta_mn",
        1e-10,
        || {
            let rule = gauss_hermite(order)?;
            let n_max = 30.min(order - 1);
            let tables: Vec<Vec<f64>> = rule
                .nodes()
                .iter()
                .map(|&x| u_table(n_max + 1, x))
                .collect();
            let mut worst = 0.0_f64;
            for m in 0..=n_max {
                for n in 0..=m {
                    let s: f64 = tables
                        .iter()
                        .zip(rule.lebesgue_weights())
                        .map(|(t, w)| w * t[m] * t[n])
                        .sum();
                    worst = worst.max((s - if m == n { 1.0 } else { 0.0 }).abs());
                }
            }
            Ok(worst)
        },
    );

    let points: Vec<(usize, f64)> = (0..64)
        .map(|_| (rng.gen_range(0..400), rng.gen_range(-12.0..12.0)))
        .collect();
    r.check(
        "basis_parity",
        "u_n(-q) = (-1)^n u_n(q), bitwise",
        0.0,
        || {
            Ok(points
                .iter()
                .map(|&(n, q)| {
                    let a = u_table(n + 1, q)[n];
                    let b = u_table(n + 1, -q)[n];
                    bit_mismatch(if n % 2 == 0 { a } else { -a }, b)
                })
                .sum())
        },
    );

    r.check(
        "schrodinger_residual",
        "(-1/2 d^2/dq^2 + q^2/2) u_n = (n + 1/2) u_n",
        1e-6,
        || {
            let h = 1e-3;
            let mut worst = 0.0_f64;
            for n in 0..=10 {
                let f = |x: f64| u_table(n + 1, x)[n];
                for x in linspace(-6.0, 6.0, 121) {
                    let d2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h)
                        - f(x - 2.0 * h))
                        / (12.0 * h * h);
                    worst =
                        worst.max((-0.5 * d2 + 0.5 * x * x * f(x) - (n as f64 + 0.5) * f(x)).abs());
                }
            }
            Ok(worst)
        },
    );

    r.check(
        "ladder_relation",
        "sqrt2 q u_n = sqrt(n+1) u_{n+1} + sqrt(n) u_{n-1}",
        1e-12,
        || {
            let mut worst = 0.0_f64;
            for x in [-3.1, -0.4, 0.0, 0.9, 2.2, 5.0] {
                let t = u_table(62, x);
                for n in 0..60 {
                    let lower = if n > 0 {
                        (n as f64).sqrt() * t[n - 1]
                    } else {
                        0.0
                    };
                    let rhs = ((n + 1) as f64).sqrt() * t[n + 1] + lower;
                    worst = worst.max((2f64.sqrt() * x * t[n] - rhs).abs());
                }
            }
            Ok(worst)
        },
    );

    r.check(
        "energy_spacing",
        "E_{n+1} - E_n = hbar omega",
        1e-12,
        || {
            let quantum = params.hbar() * params.omega();
            Ok((0..50)
                .map(|n| {
                    ((energy(idx(n + 1), params) - energy(idx(n), params)) / quantum - 1.0).abs()
                })
                .fold(0.0, f64::max))
        },
    );

    r.check(
        "gauss_hermite_exactness",
        "sum w x^2j = Gamma(j + 1/2) for 2j < 2n",
        1e-12,
        || {
            let n = order.min(40);
            let rule = gauss_hermite(n)?;
            let mut worst = 0.0_f64;
            let mut gamma = PI.sqrt();
            for j in 0..n {
                let s: f64 = rule
                    .nodes()
                    .iter()
                    .zip(rule.weights())
                    .map(|(x, w)| w * x.powi(2 * j as i32))
                    .sum();
                worst = worst.max((s / gamma - 1.0).abs());
                gamma *= j as f64 + 0.5;
            }
            Ok(worst)
        },
    );
}

fn generating_checks(r: &mut Runner, config: &RunConfig) {
    let terms = config.truncation;
    r.check(
        "genfunc_series",
        "sum z^n/sqrt(n!) u_n(q) = pi^(-1/4) exp(sqrt2 qz - q^2/2 - z^2/2)",
        1e-10,
        || {
            let trunc = SeriesTruncation::new(terms)?;
            let mut worst = 0.0_f64;
            for re in linspace(-2.0, 2.0, 11) {
                for im in linspace(-2.0, 2.0, 11) {
                    let z = Complex64::new(re, im);
                    if z.norm() > 2.0 {
                        continue;
                    }
                    for q in linspace(-4.0, 4.0, 9) {
                        worst = worst.max((gx_series(z, q, trunc) - gx_closed(z, q)).norm());
                    }
                }
            }
            Ok(worst)
        },
    );

    r.check(
        "genfunc_taylor",
        "[z^n] G_x(z, q) = u_n(q)/sqrt(n!)",
        1e-9,
        || {
            let mut worst = 0.0_f64;
            for q in [-1.3, 0.6] {
                let t = u_table(16, q);
                let mut fact = 1.0;
                for n in 0..=15 {
                    if n > 0 {
                        fact *= (n as f64).sqrt();
                    }
                    worst = worst.max((gx_taylor_coefficient(n, q, 1.0, 256) - t[n] / fact).norm());
                }
            }
            Ok(worst)
        },
    );

    let order = config.gauss_order;
    r.check(
        "fock_orthonormality",
        "int conj(f_m) f_n dmu = delta_mn",
        1e-8,
        || {
            let rule = TensorRule2D::gauss_hermite(order)?;
            let max = 10.min(order - 1);
            let mut worst = 0.0_f64;
            for m in 0..=max {
                for n in 0..=max {
                    let v = fock_inner(idx(m), idx(n), &rule)?;
                    worst = worst.max((v - if m == n { 1.0 } else { 0.0 }).norm());
                }
            }
            Ok(worst)
        },
    );
}

fn gaussian_checks(r: &mut Runner, config: &RunConfig, rng: &mut ChaCha8Rng) {
    let instances: Vec<_> = (0..config.random_instances)
        .map(|k| sample_admissible(1 + k % 2, || rng.gen::<f64>()))
        .collect();
    r.check(
        "gaussian_oracle",
        "closed-form Gaussian integral vs quadrature, dim 1-2",
        1e-7,
        || {
            let rule = truncated_uniform(12.0, 2401)?;
            let mut worst = 0.0_f64;
            for inst in &instances {
                let (x, j) = inst.as_ref().map_err(Clone::clone)?;
                let closed = gaussian_integral(x, j)?.to_complex();
                let oracle = brute_force_oracle(x, j, &rule)?;
                worst = worst.max((closed - oracle).norm() / oracle.norm());
            }
            Ok(worst)
        },
    );

    let dim3: Vec<_> = (0..config.random_instances.div_ceil(5))
        .map(|_| sample_admissible(3, || rng.gen::<f64>()))
        .collect();
    r.check(
        "gaussian_oracle_dim3",
        "closed-form Gaussian integral vs quadrature, dim 3",
        1e-5,
        || {
            let rule = truncated_uniform(12.0, 201)?;
            let mut worst = 0.0_f64;
            for inst in &dim3 {
                let (x, j) = inst.as_ref().map_err(Clone::clone)?;
                let closed = gaussian_integral(x, j)?.to_complex();
                let oracle = brute_force_oracle(x, j, &rule)?;
                worst = worst.max((closed - oracle).norm() / oracle.norm());
            }
            Ok(worst)
        },
    );

    r.check(
        "overlap_matrix_determinant",
        "det X = 8 for conj(alpha) = i",
        1e-12,
        || {
            let form = momentum_overlap_integrand(0.3, -0.8, Complex64::new(0.0, 1.0))?;
            Ok((LdlFactorization::new(&form.matrix)?.determinant() - 8.0).norm())
        },
    );
}

fn momentum_checks(r: &mut Runner) {
    r.check(
        "plane_wave_overlap",
        "<q|t> = (2 pi)^(-1/2) e^{iqt} via Gaussian integral",
        1e-8,
        || {
            let mut worst = 0.0_f64;
            for q in linspace(-2.0, 2.0, 5) {
                for t in linspace(-2.0, 2.0, 5) {
                    worst = worst.max((overlap_gaussian(q, t)?.value - overlap_exact(q, t)).norm());
                }
            }
            Ok(worst)
        },
    );

    r.check(
        "plane_wave_normalization",
        "Abel limit N_p = (2 pi)^(-1/2), real",
        1e-3,
        || {
            let np = abel_extrapolate(1.0, 1.0, &ABEL_RADII)?.normalization();
            Ok((np.re - 1.0 / (2.0 * PI).sqrt()).abs().max(np.im.abs()))
        },
    );

    r.check("momentum_phase", "F[u_n] = (-i)^n u_n", 1e-8, || {
        let mut worst = 0.0_f64;
        for n in 0..=20 {
            let est = extract_phase(idx(n))?;
            worst = worst
                .max((est.phase - momentum_phase(n)).norm())
                .max(est.residual);
        }
        Ok(worst)
    });

    let rule = truncated_uniform_with_spacing(16.0, 0.05);
    r.check("momentum_parseval", "int |F[u_n]|^2 dt = 1", 1e-8, || {
        let rule = rule.clone()?;
        let mut worst = 0.0_f64;
        for n in 0..=10 {
            worst = worst.max((momentum_norm(idx(n), &rule)? - 1.0).abs());
        }
        Ok(worst)
    });

    r.check("momentum_inverse", "F^-1 F u_n = u_n", 1e-8, || {
        let rule = rule.clone()?;
        let qs = [-2.5, 0.0, 1.1];
        let mut worst = 0.0_f64;
        for n in [0, 3, 7] {
            for (q, v) in qs.iter().zip(inverse_of_fourier(idx(n), &qs, &rule)?) {
                worst = worst.max((v - u_table(n + 1, *q)[n]).abs());
            }
        }
        Ok(worst)
    });
}

fn delta_checks(r: &mut Runner, config: &RunConfig, rng: &mut ChaCha8Rng) {
    let mut widths = vec![0.01, 0.1, 1.0, 5.0];
    widths.extend(&config.epsilon);
    r.check("delta_unit_integral", "int delta_eps = 1", 1e-12, || {
        let gh = gauss_hermite(40)?;
        let mut worst = 0.0_f64;
        for &e in &widths {
            let eps = MollifiedDelta::new(e)?;
            worst = worst.max((unit_integral(&eps, &gh) - 1.0).abs());
            worst = worst.max((unit_integral(&eps, &sift_rule(&eps, 0.0)?) - 1.0).abs());
        }
        Ok(worst)
    });

    r.check(
        "delta_sift_linear",
        "sift error ratio under eps halving = 2",
        0.1,
        || {
            let mut errs = Vec::new();
            for e in [0.1, 0.05, 0.025] {
                let eps = MollifiedDelta::new(e)?;
                errs.push((sift(&eps, f64::cos, 0.0, &sift_rule(&eps, 0.0)?)? - 1.0).abs());
            }
            Ok(errs
                .windows(2)
                .map(|w| (w[0] / w[1] - 2.0).abs())
                .fold(0.0, f64::max))
        },
    );

    let samples: Vec<(f64, f64)> = (0..64)
        .map(|_| (rng.gen_range(0.01..10.0), rng.gen_range(-20.0..20.0)))
        .collect();
    r.check(
        "delta_even",
        "delta_eps(-x) = delta_eps(x), bitwise",
        0.0,
        || {
            let mut count = 0.0;
            for &(e, x) in &samples {
                let eps = MollifiedDelta::new(e)?;
                count += bit_mismatch(mollified_delta(&eps, x), mollified_delta(&eps, -x));
            }
            Ok(count)
        },
    );

    let orders = config.kernel_order.clone();
    r.check("kernel_trace", "int K_N(q, q) dq = N", 1e-8, || {
        let mut worst = 0.0_f64;
        for &n in &orders {
            let rule = gauss_hermite(n.clamp(128, hosc::quadrature::GAUSS_HERMITE_MAX_ORDER))?;
            worst = worst.max((kernel_trace(n, &rule)? - n as f64).abs());
        }
        Ok(worst)
    });

    r.check(
        "kernel_idempotence",
        "int K_N(q, s) K_N(s, q') ds = K_N(q, q')",
        1e-8,
        || {
            let mut worst = 0.0_f64;
            for &n in &orders {
                let rule = gauss_hermite(n.clamp(128, hosc::quadrature::GAUSS_HERMITE_MAX_ORDER))?;
                for (q, qp) in [(0.0, 0.0), (0.5, -1.3)] {
                    worst = worst
                        .max((kernel_square(n, q, qp, &rule)? - kernel_truncated(n, q, qp)?).abs());
                }
            }
            Ok(worst)
        },
    );

    let pairs: Vec<(usize, f64, f64)> = (0..64)
        .map(|_| {
            (
                rng.gen_range(1..300),
                rng.gen_range(-8.0..8.0),
                rng.gen_range(-8.0..8.0),
            )
        })
        .collect();
    r.check(
        "kernel_symmetry",
        "K_N(a, b) = K_N(b, a) = K_N(-a, -b), bitwise",
        0.0,
        || {
            let mut count = 0.0;
            for &(n, a, b) in &pairs {
                let k = kernel_truncated(n, a, b)?;
                count += bit_mismatch(k, kernel_truncated(n, b, a)?)
                    + bit_mismatch(k, kernel_truncated(n, -a, -b)?);
            }
            Ok(count)
        },
    );

    let weak_orders = [30, 40, 60, 80, 100, 150, 200];
    r.check(
        "kernel_weak_convergence",
        "int K_200(0, s) e^{-s^2/2} ds = 1",
        1e-3,
        || {
            let rule = weak_convergence_rule(200)?;
            let table =
                kernel_weak_convergence(&weak_orders, |s| (-0.5 * s * s).exp(), 0.0, &rule)?;
            Ok((table[table.len() - 1] - 1.0).abs())
        },
    );

    r.check(
        "kernel_weak_monotone",
        "weak-limit error non-increasing for N >= 30 (1e-12 floor)",
        0.0,
        || {
            let rule = weak_convergence_rule(200)?;
            let f = |x: f64| x * x * (-x * x / 8.0).exp();
            let mut violation = 0.0_f64;
            for (g, q, target) in [(None, 0.0, 1.0), (Some(f), 1.0, f(1.0))] {
                let table = match g {
                    None => {
                        kernel_weak_convergence(&weak_orders, |s| (-0.5 * s * s).exp(), q, &rule)?
                    }
                    Some(g) => kernel_weak_convergence(&weak_orders, g, q, &rule)?,
                };
                let errs: Vec<f64> = table.iter().map(|v| (v - target).abs()).collect();
                for w in errs.windows(2) {
                    violation = violation.max(w[1] - w[0].max(1e-12));
                }
            }
            Ok(violation.max(0.0))
        },
    );
}

fn propagator_checks(r: &mut Runner) {
    let grid = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let alphas = [
        Complex64::new(0.0, -0.2),
        Complex64::new(0.0, -1.0),
        Complex64::new(0.3, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(2.5, 0.0),
    ];
    r.check(
        "propagator_genfunc_route",
        "Gaussian-integral route = closed form",
        1e-10,
        || {
            let mut worst = 0.0_f64;
            for &alpha in &alphas {
                let a = TimeArgument::new(alpha)?;
                for &q in &grid {
                    for &qp in &grid {
                        worst = worst.max(
                            (genfunc_route(q, qp, &a)?.value - mehler_kernel(q, qp, &a)?.value)
                                .norm(),
                        );
                    }
                }
            }
            Ok(worst)
        },
    );

    r.check(
        "propagator_spectral_route",
        "sum e^{-i alpha (n+1/2)} u_n u_n = closed form (N = 400)",
        1e-8,
        || {
            let trunc = SeriesTruncation::new(400)?;
            let mut worst = 0.0_f64;
            for &alpha in alphas.iter().filter(|a| a.im < 0.0) {
                let a = TimeArgument::new(alpha)?;
                for &q in &grid {
                    for &qp in &grid {
                        let s = spectral_sum(q, qp, &a, trunc)?.value.value;
                        worst = worst.max((s - mehler_kernel(q, qp, &a)?.value).norm());
                    }
                }
            }
            Ok(worst)
        },
    );

    r.check(
        "propagator_semigroup",
        "int K(a1) K(a2) = K(a1 + a2)",
        1e-6,
        || {
            let rule = truncated_uniform(12.0, 4801)?;
            let mut worst = 0.0_f64;
            for (t1, t2, q, qp) in [(0.5, 0.5, 0.0, 0.0), (0.3, 0.7, 1.0, -1.0)] {
                let a1 = TimeArgument::euclidean(t1)?;
                let a2 = TimeArgument::euclidean(t2)?;
                let k = compose(&a1, &a2, q, qp, &rule)?.value;
                worst = worst.max((k - mehler_kernel(q, qp, &a1.add(&a2)?)?.value).norm());
            }
            Ok(worst)
        },
    );

    let rule = truncated_uniform(12.0, 1201);
    r.check(
        "propagator_eigenstate_phase",
        "evolved u_n = e^{-i alpha (n+1/2)} u_n",
        1e-8,
        || {
            let rule = rule.clone()?;
            let mut worst = 0.0_f64;
            for (n, alpha) in [(0usize, 1.7), (3, 0.4)] {
                let packet: Vec<Complex64> = rule
                    .nodes()
                    .iter()
                    .map(|&q| Complex64::new(u_table(n + 1, q)[n], 0.0))
                    .collect();
                let out = evolve(&packet, &TimeArgument::real(alpha)?, &rule)?;
                let phase = Complex64::from_polar(1.0, -alpha * (n as f64 + 0.5));
                for (o, p) in out.iter().zip(&packet) {
                    worst = worst.max((o - p * phase).norm());
                }
            }
            Ok(worst)
        },
    );

    let coherent = |rule: &hosc::quadrature::QuadratureRule| -> Vec<Complex64> {
        rule.nodes()
            .iter()
            .map(|&q| Complex64::new(u_table(1, q - 2.0)[0], 0.0))
            .collect()
    };
    r.check(
        "propagator_coherent_center",
        "<q>(alpha) = 2 cos alpha for a displaced ground state",
        1e-6,
        || {
            let rule = rule.clone()?;
            let packet = coherent(&rule);
            let mut worst = 0.0_f64;
            for alpha in [0.5, 1.0, 2.0] {
                let (_, center) =
                    packet_moments(&evolve(&packet, &TimeArgument::real(alpha)?, &rule)?, &rule);
                worst = worst.max((center - 2.0 * alpha.cos()).abs());
            }
            Ok(worst)
        },
    );

    r.check(
        "propagator_unitarity",
        "int |psi(alpha)|^2 = 1",
        1e-8,
        || {
            let rule = rule.clone()?;
            let packet = coherent(&rule);
            let mut worst = 0.0_f64;
            for alpha in [0.5, 1.5] {
                let (norm, _) =
                    packet_moments(&evolve(&packet, &TimeArgument::real(alpha)?, &rule)?, &rule);
                worst = worst.max((norm - 1.0).abs());
            }
            Ok(worst)
        },
    );

    r.check(
        "propagator_periodicity",
        "|K(alpha + 2 pi)| = |K(alpha)| and K(alpha + 2 pi) = -K(alpha)",
        1e-12,
        || {
            let mut worst = 0.0_f64;
            for alpha in [0.4, 1.3, 2.5] {
                for (q, qp) in [(0.0, 0.0), (1.0, -2.0), (0.5, 0.5)] {
                    let k0 = mehler_kernel(q, qp, &TimeArgument::real(alpha)?)?.value;
                    let k1 = mehler_kernel(q, qp, &TimeArgument::real(alpha + 2.0 * PI)?)?.value;
                    worst = worst
                        .max((k0.norm() - k1.norm()).abs())
                        .max((k0 + k1).norm());
                }
            }
            Ok(worst)
        },
    );

    r.check(
        "propagator_euclidean_positive",
        "K(q, q'; -i tau) real and positive",
        1e-14,
        || {
            let mut worst = 0.0_f64;
            for tau in [0.05, 0.5, 2.0] {
                let a = TimeArgument::euclidean(tau)?;
                for (q, qp) in [(0.0, 3.0), (-2.0, 2.0), (1.5, 1.4)] {
                    let k = mehler_kernel(q, qp, &a)?.value;
                    worst = worst.max(if k.re > 0.0 {
                        k.im.abs() / k.re
                    } else {
                        f64::INFINITY
                    });
                }
            }
            Ok(worst)
        },
    );
}
