use std::f64::consts::PI;

use hosc::momentum_transform::{fourier_of_psi, transform_rule};
use hosc::oscillator_basis::{hermite, phi, u, BasisIndex, OscillatorParams};
use hosc::quadrature::gauss_hermite;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

fn idx(n: usize) -> BasisIndex {
    BasisIndex::new(n).unwrap()
}

#[test]
fn orthonormal_up_to_thirty() {
    let rule = gauss_hermite(64).unwrap();
    let tables: Vec<Vec<f64>> = rule
        .nodes()
        .iter()
        .map(|&x| hosc::oscillator_basis::u_table(31, x))
        .collect();
    for m in 0..=30 {
        for n in 0..=m {
            let mut s = 0.0;
            for (t, w) in tables.iter().zip(rule.lebesgue_weights()) {
                s += w * t[m] * t[n];
            }
            let expected = if m == n { 1.0 } else { 0.0 };
            assert!((s - expected).abs() <= 1e-10, "m={m} n={n} got {s}");
        }
    }
}

#[test]
fn parity_is_bit_exact() {
    let rule = gauss_hermite(64).unwrap();
    for &x in rule.nodes() {
        for n in [0, 1, 2, 7, 30, 99, 400] {
            let a = u(idx(n), x);
            let b = u(idx(n), -x);
            let signed = if n % 2 == 0 { a } else { -a };
            assert_eq!(signed.to_bits(), b.to_bits(), "n={n} x={x}");
        }
    }
}

fn second_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
        / (12.0 * h * h)
}

#[test]
fn schrodinger_residual() {
    let h = 1e-3;
    for n in 0..=10 {
        let f = |x: f64| u(idx(n), x);
        let mut worst = 0.0_f64;
        for k in -120..=120 {
            let x = 0.05 * k as f64;
            let lhs = -0.5 * second_difference(f, x, h) + 0.5 * x * x * f(x);
            worst = worst.max((lhs - (n as f64 + 0.5) * f(x)).abs());
        }
        assert!(worst <= 1e-6, "n={n} residual {worst}");
    }
}

#[test]
fn ladder_relation() {
    for n in 0..60 {
        for x in [-3.1, -0.4, 0.0, 0.9, 2.2, 5.0] {
            let lhs = 2f64.sqrt() * x * u(idx(n), x);
            let lower = if n > 0 {
                (n as f64).sqrt() * u(idx(n - 1), x)
            } else {
                0.0
            };
            let rhs = ((n + 1) as f64).sqrt() * u(idx(n + 1), x) + lower;
            assert!((lhs - rhs).abs() <= 1e-12, "n={n} x={x}");
        }
    }
}

#[test]
fn high_order_value_against_exact_integer_recurrence() {
    // G_k = 10^k H_k(13/10) satisfies G_{k+1} = 26 G_k - 200 k G_{k-1} in integers.
    let n = 25usize;
    let mut prev = BigInt::from(1);
    let mut curr = BigInt::from(26);
    for k in 1..n {
        let next = &curr * 26 - &prev * (200 * k as i64);
        prev = curr;
        curr = next;
    }
    let h = curr.to_f64().unwrap() / 1e25;
    let mut norm = BigInt::from(1) << n;
    for k in 1..=n {
        norm *= k;
    }
    let q = 1.3_f64;
    let expected = h / (norm.to_f64().unwrap() * PI.sqrt()).sqrt() * (-0.5 * q * q).exp();
    let got = u(idx(n), q);
    assert!(
        ((got - expected) / expected).abs() <= 1e-12,
        "got {got}, expected {expected}"
    );
    let h_direct = hermite(idx(n), q).unwrap();
    assert!(((h_direct - h) / h).abs() <= 1e-12);
}

#[test]
fn momentum_eigenfunction_matches_transform() {
    let natural = OscillatorParams::natural();
    let rule = transform_rule(0.7).unwrap();
    let f = fourier_of_psi(idx(2), 0.7, &rule).unwrap();
    let p = phi(idx(2), 0.7, &natural);
    assert!((p - f).norm() < 1e-9);
    assert!((p.re + u(idx(2), 0.7)).abs() < 1e-15);
}
