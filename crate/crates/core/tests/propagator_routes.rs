use std::f64::consts::PI;

use hosc::generating_function::SeriesTruncation;
use hosc::oscillator_basis::u_table;
use hosc::propagator::{
    compose, evolve, genfunc_route, mehler_kernel, packet_moments, spectral_sum, TimeArgument,
};
use hosc::quadrature::truncated_uniform;
use hosc::Complex64;

const GRID: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

fn alphas() -> Vec<Complex64> {
    vec![
        Complex64::new(0.0, -0.2),
        Complex64::new(0.0, -1.0),
        Complex64::new(0.3, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(2.5, 0.0),
    ]
}

#[test]
fn three_routes_agree() {
    let trunc = SeriesTruncation::new(400).unwrap();
    for alpha in alphas() {
        let a = TimeArgument::new(alpha).unwrap();
        for &q in &GRID {
            for &qp in &GRID {
                let m = mehler_kernel(q, qp, &a).unwrap().value;
                let g = genfunc_route(q, qp, &a).unwrap().value;
                assert!((m - g).norm() <= 1e-10, "genfunc alpha={alpha} ({q}, {qp})");
                if alpha.im < 0.0 {
                    let s = spectral_sum(q, qp, &a, trunc).unwrap().value.value;
                    assert!((m - s).norm() <= 1e-8, "spectral alpha={alpha} ({q}, {qp})");
                }
            }
        }
    }
}

#[test]
fn semigroup_and_short_time_limit() {
    let rule = truncated_uniform(12.0, 24001).unwrap();
    let a1 = TimeArgument::euclidean(0.5).unwrap();
    let tiny = TimeArgument::euclidean(1e-4).unwrap();
    for (q, qp) in [(0.0, 0.0), (0.7, -0.3)] {
        let k = compose(&a1, &tiny, q, qp, &rule).unwrap().value;
        let m = mehler_kernel(q, qp, &a1).unwrap().value;
        assert!((k - m).norm() <= 1e-3);
    }
}

fn packet_of(f: impl Fn(f64) -> f64, nodes: &[f64]) -> Vec<Complex64> {
    nodes.iter().map(|&q| Complex64::new(f(q), 0.0)).collect()
}

#[test]
fn eigenstate_phases() {
    let rule = truncated_uniform(12.0, 1201).unwrap();
    for (n, alpha) in [(0usize, 1.7), (3, 0.4)] {
        let packet = packet_of(|q| u_table(n + 1, q)[n], rule.nodes());
        let out = evolve(&packet, &TimeArgument::real(alpha).unwrap(), &rule).unwrap();
        let phase = Complex64::from_polar(1.0, -alpha * (n as f64 + 0.5));
        for (o, p) in out.iter().zip(&packet) {
            assert!((o - p * phase).norm() <= 1e-8, "n={n}");
        }
    }
}

#[test]
fn coherent_packet_follows_classical_orbit_and_keeps_norm() {
    let rule = truncated_uniform(12.0, 1201).unwrap();
    let packet = packet_of(|q| u_table(1, q - 2.0)[0], rule.nodes());
    for alpha in [0.5, 1.0, 1.5, 2.0] {
        let out = evolve(&packet, &TimeArgument::real(alpha).unwrap(), &rule).unwrap();
        let (norm, center) = packet_moments(&out, &rule);
        assert!((norm - 1.0).abs() <= 1e-8, "alpha={alpha} norm={norm}");
        assert!(
            (center - 2.0 * f64::cos(alpha)).abs() <= 1e-6,
            "alpha={alpha} center={center}"
        );
    }
    let full = evolve(&packet, &TimeArgument::real(2.0 * PI).unwrap(), &rule).unwrap();
    for (o, p) in full.iter().zip(&packet) {
        assert!((o.norm_sqr() - p.norm_sqr()).abs() <= 1e-6);
    }
}
