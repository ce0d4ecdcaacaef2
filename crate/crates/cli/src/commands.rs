//! Table-producing subcommands.

use hosc::delta_kernel::{
    kernel_trace, kernel_truncated, kernel_weak_convergence, sift, sift_rule, unit_integral,
    weak_convergence_rule, MollifiedDelta,
};
use hosc::generating_function::{gx_closed, gx_series, gx_tail_bound, SeriesTruncation};
use hosc::momentum_transform::{
    extract_phase, transform_rule, FourierSampler, TRANSFORM_MAX_INDEX,
};
use hosc::oscillator_basis::{eigenfunction, phi_dimensionless, u_table, BasisIndex};
use hosc::propagator::{
    evolve, genfunc_route, mehler_kernel, packet_moments, spectral_sum, PropagatorValue,
    TimeArgument,
};
use hosc::quadrature::{gauss_hermite, truncated_uniform};
use hosc::{Complex64, Error};

use crate::config::{PacketKind, RouteChoice, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

fn index(key: &str, n: usize) -> Result<BasisIndex, CliError> {
    BasisIndex::new(n).map_err(|e| CliError::config(key, e.to_string()))
}

/// Eigenfunctions in physical units on the configured grid (x or p).
pub fn cmd_eigen(config: &RunConfig) -> Result<Table, CliError> {
    let params = config.params();
    let grid = config.grid();
    let mut table = Table::new("eigen", &["n", "coordinate", "re", "im"]);
    for &n in &config.n {
        let idx = index("n", n)?;
        for &x in &grid {
            let v = eigenfunction(idx, x, config.representation, &params).as_complex();
            table.push(vec![n.into(), x.into(), v.re.into(), v.im.into()]);
        }
    }
    Ok(table)
}

/// Closed form against truncated series of `G_x(z, q)` over `z` values and the grid.
pub fn cmd_genfunc(config: &RunConfig) -> Result<Table, CliError> {
    let trunc = SeriesTruncation::new(config.truncation)?;
    let mut table = Table::new(
        "genfunc",
        &[
            "z_re",
            "z_im",
            "q",
            "closed_re",
            "closed_im",
            "series_re",
            "series_im",
            "abs_diff",
            "tail_bound",
        ],
    );
    for &z in &config.z {
        let bound = gx_tail_bound(z, trunc);
        for &q in &config.grid() {
            let closed = gx_closed(z, q);
            let series = gx_series(z, q, trunc);
            table.push(vec![
                z.re.into(),
                z.im.into(),
                q.into(),
                closed.re.into(),
                closed.im.into(),
                series.re.into(),
                series.im.into(),
                (closed - series).norm().into(),
                bound.into(),
            ]);
        }
    }
    Ok(table)
}

/// Dimensionless Fourier transforms of `u_n` against `(-i)^n u_n(t)`, with the fitted phase.
pub fn cmd_transform(config: &RunConfig) -> Result<Table, CliError> {
    let grid = config.grid();
    let t_max = grid.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    let rule = transform_rule(t_max)?;
    let mut table = Table::new(
        "transform",
        &[
            "n",
            "t",
            "fourier_re",
            "fourier_im",
            "phi_re",
            "phi_im",
            "abs_diff",
            "phase_re",
            "phase_im",
            "phase_residual",
        ],
    );
    for &n in &config.n {
        if n > TRANSFORM_MAX_INDEX {
            return Err(CliError::config(
                "n",
                format!("transform supports n <= {TRANSFORM_MAX_INDEX}, got {n}"),
            ));
        }
        let idx = index("n", n)?;
        let sampler = FourierSampler::new(idx, &rule)?;
        let phase = extract_phase(idx)?;
        for &t in &grid {
            let f = sampler.at(t);
            let exact = phi_dimensionless(idx, t);
            table.push(vec![
                n.into(),
                t.into(),
                f.re.into(),
                f.im.into(),
                exact.re.into(),
                exact.im.into(),
                (f - exact).norm().into(),
                phase.phase.re.into(),
                phase.phase.im.into(),
                phase.residual.into(),
            ]);
        }
    }
    Ok(table)
}

/// Delta-function checks and completeness-kernel profiles.
pub fn cmd_delta(config: &RunConfig) -> Result<Table, CliError> {
    let mut table = Table::new(
        "delta",
        &["kind", "parameter", "q", "value", "reference", "abs_error"],
    );
    let mut push = |kind: &str, parameter: f64, q: Cell, value: f64, reference: Option<f64>| {
        let (r, e) = match reference {
            Some(r) => (Cell::from(r), Cell::from((value - r).abs())),
            None => (Cell::Empty, Cell::Empty),
        };
        table.push(vec![kind.into(), parameter.into(), q, value.into(), r, e]);
    };
    let q_bound = config.q.iter().fold(0.0_f64, |m, q| m.max(q.abs()));
    let gh = gauss_hermite(40)?;
    for &e in &config.epsilon {
        let eps = MollifiedDelta::new(e)?;
        push(
            "unit_integral",
            e,
            Cell::Empty,
            unit_integral(&eps, &gh),
            Some(1.0),
        );
        let rule = sift_rule(&eps, q_bound)?;
        for &q in &config.q {
            push(
                "sift_cos",
                e,
                q.into(),
                sift(&eps, f64::cos, q, &rule)?,
                Some(q.cos()),
            );
        }
    }
    let n_max = *config
        .kernel_order
        .iter()
        .max()
        .expect("validated non-empty");
    let weak_rule = weak_convergence_rule(n_max)?;
    let orders = &config.kernel_order;
    for &n in orders {
        let gh = gauss_hermite(n.clamp(128, hosc::quadrature::GAUSS_HERMITE_MAX_ORDER))?;
        push(
            "trace",
            n as f64,
            Cell::Empty,
            kernel_trace(n, &gh)?,
            Some(n as f64),
        );
    }
    for &q in &config.q {
        let table = kernel_weak_convergence(orders, |s| (-0.5 * s * s).exp(), q, &weak_rule)?;
        for (&n, v) in orders.iter().zip(table) {
            push(
                "weak_gaussian",
                n as f64,
                q.into(),
                v,
                Some((-0.5 * q * q).exp()),
            );
        }
    }
    let qp = config.qp[0];
    for &n in orders {
        for &q in &config.grid() {
            push(
                "kernel",
                n as f64,
                q.into(),
                kernel_truncated(n, qp, q)?,
                None,
            );
        }
    }
    Ok(table)
}

fn route_value(
    route: RouteChoice,
    q: f64,
    qp: f64,
    a: &TimeArgument,
    terms: usize,
) -> hosc::Result<PropagatorValue> {
    match route {
        RouteChoice::ClosedForm | RouteChoice::All => mehler_kernel(q, qp, a),
        RouteChoice::GeneratingFunction => genfunc_route(q, qp, a),
        RouteChoice::Spectral => Ok(spectral_sum(q, qp, a, SeriesTruncation::new(terms)?)?.value),
    }
}

fn status_of(err: &Error) -> String {
    match err {
        Error::Caustic { nearest, .. } => format!("caustic(nearest={nearest:.16e})"),
        Error::NonConvergent => "nonconvergent".into(),
        e => format!("error({e})"),
    }
}

/// Propagator `K(x, x'; alpha)` in physical units over `q x qp x alpha`.
/// Caustics and other point failures are reported in the `status` column.
pub fn cmd_propagator(config: &RunConfig) -> Result<Table, CliError> {
    let params = config.params();
    let scale = params.inverse_length_sq().sqrt();
    let routes: Vec<RouteChoice> = match config.route {
        RouteChoice::All => vec![
            RouteChoice::ClosedForm,
            RouteChoice::GeneratingFunction,
            RouteChoice::Spectral,
        ],
        r => vec![r],
    };
    let mut table = Table::new(
        "propagator",
        &[
            "x",
            "xp",
            "alpha_re",
            "alpha_im",
            "route",
            "k_re",
            "k_im",
            "diff_closed",
            "status",
        ],
    );
    for &x in &config.q {
        for &xp in &config.qp {
            for &alpha in &config.alpha {
                let a = TimeArgument::new(alpha)?;
                let (q, qp) = (params.q_of_x(x), params.q_of_x(xp));
                let closed = mehler_kernel(q, qp, &a).ok().map(|k| k.value * scale);
                for &route in &routes {
                    let name = match route {
                        RouteChoice::ClosedForm => "closed_form",
                        RouteChoice::GeneratingFunction => "generating_function",
                        RouteChoice::Spectral => "spectral",
                        RouteChoice::All => unreachable!("expanded above"),
                    };
                    let mut row = vec![
                        x.into(),
                        xp.into(),
                        alpha.re.into(),
                        alpha.im.into(),
                        name.into(),
                    ];
                    match route_value(route, q, qp, &a, config.spectral_terms) {
                        Ok(k) => {
                            let v = k.value * scale;
                            let diff = closed.map_or(Cell::Empty, |c| Cell::from((v - c).norm()));
                            row.extend([v.re.into(), v.im.into(), diff, "ok".into()]);
                        }
                        Err(e) => row.extend([
                            Cell::Empty,
                            Cell::Empty,
                            Cell::Empty,
                            status_of(&e).into(),
                        ]),
                    }
                    table.push(row);
                }
            }
        }
    }
    Ok(table)
}

/// Initial packet on the evolution grid.
pub fn initial_packet(config: &RunConfig, nodes: &[f64]) -> Vec<Complex64> {
    match config.packet {
        PacketKind::Displaced => nodes
            .iter()
            .map(|&q| Complex64::new(u_table(1, q - config.packet_center)[0], 0.0))
            .collect(),
        PacketKind::Basis => {
            let n = config.packet_index;
            nodes
                .iter()
                .map(|&q| Complex64::new(u_table(n + 1, q)[n], 0.0))
                .collect()
        }
    }
}

/// Evolves the configured packet to each `alpha` in dimensionless units.
pub fn cmd_evolve(config: &RunConfig) -> Result<Table, CliError> {
    let rule = truncated_uniform(config.evolve_half_width, config.evolve_points)?;
    let packet = initial_packet(config, rule.nodes());
    let mut table = Table::new(
        "evolve",
        &[
            "alpha_re", "alpha_im", "q", "psi_re", "psi_im", "density", "norm", "mean_q",
        ],
    );
    for &alpha in &config.alpha {
        let a = TimeArgument::new(alpha)?;
        let out = evolve(&packet, &a, &rule)?;
        let (norm, mean) = packet_moments(&out, &rule);
        for (&q, psi) in rule.nodes().iter().zip(&out) {
            table.push(vec![
                alpha.re.into(),
                alpha.im.into(),
                q.into(),
                psi.re.into(),
                psi.im.into(),
                psi.norm_sqr().into(),
                norm.into(),
                mean.into(),
            ]);
        }
    }
    Ok(table)
}
