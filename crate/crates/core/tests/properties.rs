use hosc::generating_function::{gp_closed, gp_series, gx_closed, gx_series, SeriesTruncation};
use hosc::oscillator_basis::{u, BasisIndex};
use hosc::propagator::{genfunc_route, mehler_kernel, TimeArgument};
use hosc::Complex64;
use proptest::prelude::*;

proptest! {
    #[test]
    fn parity(n in 0usize..500, q in -30.0f64..30.0) {
        let i = BasisIndex::new(n).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!((sign * u(i, q)).to_bits(), u(i, -q).to_bits());
    }

    #[test]
    fn generating_series_converges(re in -2.0f64..2.0, im in -2.0f64..2.0, q in -4.0f64..4.0) {
        let z = Complex64::new(re, im);
        let trunc = SeriesTruncation::new(80).unwrap();
        prop_assert!((gx_series(z, q, trunc) - gx_closed(z, q)).norm() <= 1e-10);
        prop_assert!((gp_series(z, q, trunc) - gp_closed(z, q)).norm() <= 1e-10);
    }

    #[test]
    fn routes_agree_in_lower_half_plane(re in -4.0f64..4.0, im in -3.0f64..-0.05, q in -3.0f64..3.0, qp in -3.0f64..3.0) {
        let a = TimeArgument::new(Complex64::new(re, im)).unwrap();
        let m = mehler_kernel(q, qp, &a).unwrap().value;
        let g = genfunc_route(q, qp, &a).unwrap().value;
        prop_assert!((m - g).norm() <= 1e-10 * m.norm().max(1.0));
    }

    #[test]
    fn closed_form_symmetric(alpha in 0.01f64..3.1, q in -5.0f64..5.0, qp in -5.0f64..5.0) {
        let a = TimeArgument::real(alpha).unwrap();
        prop_assert_eq!(mehler_kernel(q, qp, &a).unwrap().value, mehler_kernel(qp, q, &a).unwrap().value);
    }
}
