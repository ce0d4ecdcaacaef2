//! Run configuration: a flat `key = value` file where repeated keys form
//! lists and complex numbers are written `re,im`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use hosc::oscillator_basis::{OscillatorParams, Representation, N_MAX};
use hosc::quadrature::GAUSS_HERMITE_MAX_ORDER;
use hosc::Complex64;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(format!("expected csv or json, got {s:?}")),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteChoice {
    ClosedForm,
    GeneratingFunction,
    Spectral,
    All,
}

impl RouteChoice {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "closed_form" => Ok(Self::ClosedForm),
            "generating_function" => Ok(Self::GeneratingFunction),
            "spectral" => Ok(Self::Spectral),
            "all" => Ok(Self::All),
            _ => Err(format!(
                "expected closed_form, generating_function, spectral or all, got {s:?}"
            )),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Self::ClosedForm => "closed_form",
            Self::GeneratingFunction => "generating_function",
            Self::Spectral => "spectral",
            Self::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketKind {
    /// Ground state displaced to `packet_center`.
    Displaced,
    /// Eigenstate `packet_index`.
    Basis,
}

impl PacketKind {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "displaced" => Ok(Self::Displaced),
            "basis" => Ok(Self::Basis),
            _ => Err(format!("expected displaced or basis, got {s:?}")),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Self::Displaced => "displaced",
            Self::Basis => "basis",
        }
    }
}

fn representation_name(r: Representation) -> &'static str {
    match r {
        Representation::Position => "position",
        Representation::Momentum => "momentum",
    }
}

fn parse_representation(s: &str) -> Result<Representation, String> {
    match s {
        "position" => Ok(Representation::Position),
        "momentum" => Ok(Representation::Momentum),
        _ => Err(format!("expected position or momentum, got {s:?}")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub seed: u64,

    pub n: Vec<usize>,
    pub representation: Representation,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,

    pub z: Vec<Complex64>,
    pub truncation: usize,

    pub epsilon: Vec<f64>,
    pub kernel_order: Vec<usize>,

    pub q: Vec<f64>,
    pub qp: Vec<f64>,
    pub alpha: Vec<Complex64>,
    pub route: RouteChoice,
    pub spectral_terms: usize,

    pub packet: PacketKind,
    pub packet_center: f64,
    pub packet_index: usize,
    pub evolve_half_width: f64,
    pub evolve_points: usize,

    pub gauss_order: usize,
    pub random_instances: usize,
    pub tolerance_override: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            omega: 1.0,
            hbar: 1.0,
            format: OutputFormat::Csv,
            output: None,
            seed: 0,
            n: vec![0, 1, 2, 3],
            representation: Representation::Position,
            grid_min: -5.0,
            grid_max: 5.0,
            grid_points: 101,
            z: vec![Complex64::new(0.5, 0.3), Complex64::new(2.0, 0.0)],
            truncation: 60,
            epsilon: vec![0.1, 0.05, 0.025],
            kernel_order: vec![10, 50, 200],
            q: vec![-1.0, 0.0, 1.0],
            qp: vec![0.0],
            alpha: vec![Complex64::new(0.0, -1.0), Complex64::new(0.3, 0.0)],
            route: RouteChoice::All,
            spectral_terms: 400,
            packet: PacketKind::Displaced,
            packet_center: 2.0,
            packet_index: 0,
            evolve_half_width: 12.0,
            evolve_points: 1201,
            gauss_order: 64,
            random_instances: 10,
            tolerance_override: None,
        }
    }
}

/// Keys accepted in config files and `--set` overrides, in serialization order.
pub const KEYS: &[&str] = &[
    "mass",
    "omega",
    "hbar",
    "format",
    "output",
    "seed",
    "n",
    "representation",
    "grid_min",
    "grid_max",
    "grid_points",
    "z",
    "truncation",
    "epsilon",
    "kernel_order",
    "q",
    "qp",
    "alpha",
    "route",
    "spectral_terms",
    "packet",
    "packet_center",
    "packet_index",
    "evolve_half_width",
    "evolve_points",
    "gauss_order",
    "random_instances",
    "tolerance_override",
];

/// Reals may be written as decimals or as multiples of pi (`pi`, `-pi`, `2pi`, `0.5*pi`).
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = if let Some(prefix) = s.strip_suffix("pi") {
        let prefix = prefix.trim_end_matches('*').trim();
        let factor = match prefix {
            "" | "+" => 1.0,
            "-" => -1.0,
            p => p
                .parse::<f64>()
                .map_err(|_| format!("invalid number {s:?}"))?,
        };
        factor * PI
    } else {
        s.parse::<f64>()
            .map_err(|_| format!("invalid number {s:?}"))?
    };
    if !value.is_finite() {
        return Err(format!("number must be finite, got {s:?}"));
    }
    Ok(value)
}

/// `re,im` or a bare real.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse_real(re)?, parse_real(im)?)),
        None => Ok(Complex64::new(parse_real(s)?, 0.0)),
    }
}

fn parse_usize(s: &str) -> Result<usize, String> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| format!("invalid non-negative integer {s:?}"))
}

fn single<'a>(key: &str, values: &'a [String]) -> Result<&'a str, CliError> {
    match values {
        [v] => Ok(v.as_str()),
        _ => Err(CliError::config(
            key,
            format!("expects exactly one value, got {}", values.len()),
        )),
    }
}

fn field<T>(key: &str, r: Result<T, String>) -> Result<T, CliError> {
    r.map_err(|m| CliError::config(key, m))
}

fn list<T>(
    key: &str,
    values: &[String],
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<Vec<T>, CliError> {
    values.iter().map(|v| field(key, parse(v))).collect()
}

impl RunConfig {
    /// Sets one key from its raw values (several for list keys).
    pub fn apply(&mut self, key: &str, values: &[String]) -> Result<(), CliError> {
        match key {
            "mass" => self.mass = field(key, parse_real(single(key, values)?))?,
            "omega" => self.omega = field(key, parse_real(single(key, values)?))?,
            "hbar" => self.hbar = field(key, parse_real(single(key, values)?))?,
            "format" => self.format = field(key, OutputFormat::parse(single(key, values)?))?,
            "output" => self.output = Some(PathBuf::from(single(key, values)?)),
            "seed" => {
                self.seed = field(
                    key,
                    single(key, values)?
                        .parse::<u64>()
                        .map_err(|e| e.to_string()),
                )?;
            }
            "n" => self.n = list(key, values, parse_usize)?,
            "representation" => {
                self.representation = field(key, parse_representation(single(key, values)?))?
            }
            "grid_min" => self.grid_min = field(key, parse_real(single(key, values)?))?,
            "grid_max" => self.grid_max = field(key, parse_real(single(key, values)?))?,
            "grid_points" => self.grid_points = field(key, parse_usize(single(key, values)?))?,
            "z" => self.z = list(key, values, parse_complex)?,
            "truncation" => self.truncation = field(key, parse_usize(single(key, values)?))?,
            "epsilon" => self.epsilon = list(key, values, parse_real)?,
            "kernel_order" => self.kernel_order = list(key, values, parse_usize)?,
            "q" => self.q = list(key, values, parse_real)?,
            "qp" => self.qp = list(key, values, parse_real)?,
            "alpha" => self.alpha = list(key, values, parse_complex)?,
            "route" => self.route = field(key, RouteChoice::parse(single(key, values)?))?,
            "spectral_terms" => {
                self.spectral_terms = field(key, parse_usize(single(key, values)?))?
            }
            "packet" => self.packet = field(key, PacketKind::parse(single(key, values)?))?,
            "packet_center" => self.packet_center = field(key, parse_real(single(key, values)?))?,
            "packet_index" => self.packet_index = field(key, parse_usize(single(key, values)?))?,
            "evolve_half_width" => {
                self.evolve_half_width = field(key, parse_real(single(key, values)?))?
            }
            "evolve_points" => self.evolve_points = field(key, parse_usize(single(key, values)?))?,
            "gauss_order" => self.gauss_order = field(key, parse_usize(single(key, values)?))?,
            "random_instances" => {
                self.random_instances = field(key, parse_usize(single(key, values)?))?
            }
            "tolerance_override" => {
                self.tolerance_override = Some(field(key, parse_real(single(key, values)?))?)
            }
            _ => return Err(CliError::config(key, "unknown key".into())),
        }
        Ok(())
    }

    /// Parses config text on top of the defaults and validates the result.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut config = Self::default();
        config.apply_all(&collect_pairs(text.lines())?)?;
        config.validate()?;
        Ok(config)
    }

    /// Applies grouped `key -> values` pairs; each key replaces its previous value.
    pub fn apply_all(&mut self, pairs: &BTreeMap<String, Vec<String>>) -> Result<(), CliError> {
        for (key, values) in pairs {
            self.apply(key, values)?;
        }
        Ok(())
    }

    pub fn params(&self) -> OscillatorParams {
        OscillatorParams::new(self.mass, self.omega, self.hbar).expect("validated parameters")
    }

    /// Uniformly spaced coordinate grid.
    pub fn grid(&self) -> Vec<f64> {
        if self.grid_points == 1 {
            return vec![self.grid_min];
        }
        let step = (self.grid_max - self.grid_min) / (self.grid_points - 1) as f64;
        (0..self.grid_points)
            .map(|i| self.grid_min + step * i as f64)
            .collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |key: &str, msg: String| Err(CliError::config(key, msg));
        for (key, v) in [
            ("mass", self.mass),
            ("omega", self.omega),
            ("hbar", self.hbar),
        ] {
            if !(v > 0.0) {
                return bad(key, format!("must be > 0, got {v}"));
            }
        }
        if self.grid_points == 0 || self.grid_points > 1_000_000 {
            return bad(
                "grid_points",
                format!("must be in 1..=1000000, got {}", self.grid_points),
            );
        }
        if self.grid_min > self.grid_max {
            return bad(
                "grid_max",
                format!(
                    "must be >= grid_min ({} < {})",
                    self.grid_max, self.grid_min
                ),
            );
        }
        for (key, values) in [("n", &self.n), ("kernel_order", &self.kernel_order)] {
            if values.is_empty() {
                return bad(key, "list must not be empty".into());
            }
        }
        if let Some(&n) = self.n.iter().find(|&&n| n > N_MAX) {
            return bad("n", format!("must be <= {N_MAX}, got {n}"));
        }
        if let Some(&n) = self.kernel_order.iter().find(|&&n| n == 0 || n > N_MAX) {
            return bad("kernel_order", format!("must be in 1..={N_MAX}, got {n}"));
        }
        for (key, value) in [
            ("truncation", self.truncation),
            ("spectral_terms", self.spectral_terms),
        ] {
            if value == 0 || value > N_MAX {
                return bad(key, format!("must be in 1..={N_MAX}, got {value}"));
            }
        }
        for (key, len) in [
            ("z", self.z.len()),
            ("epsilon", self.epsilon.len()),
            ("q", self.q.len()),
            ("qp", self.qp.len()),
            ("alpha", self.alpha.len()),
        ] {
            if len == 0 {
                return bad(key, "list must not be empty".into());
            }
        }
        if let Some(e) = self
            .epsilon
            .iter()
            .find(|&&e| !(e > 0.0 && e <= hosc::delta_kernel::MAX_EPSILON))
        {
            return bad(
                "epsilon",
                format!(
                    "must lie in (0, {}], got {e}",
                    hosc::delta_kernel::MAX_EPSILON
                ),
            );
        }
        if let Some(a) = self.alpha.iter().find(|a| a.im > 0.0) {
            return bad("alpha", format!("imaginary part must be <= 0, got {a}"));
        }
        if self.packet_index > N_MAX {
            return bad(
                "packet_index",
                format!("must be <= {N_MAX}, got {}", self.packet_index),
            );
        }
        if !(self.evolve_half_width > 0.0) {
            return bad(
                "evolve_half_width",
                format!("must be > 0, got {}", self.evolve_half_width),
            );
        }
        if self.evolve_points < 3 || self.evolve_points.is_multiple_of(2) || self.evolve_points > 20_001 {
            return bad(
                "evolve_points",
                format!("must be odd and in 3..=20001, got {}", self.evolve_points),
            );
        }
        if self.gauss_order == 0 || self.gauss_order > GAUSS_HERMITE_MAX_ORDER {
            return bad(
                "gauss_order",
                format!(
                    "must be in 1..={GAUSS_HERMITE_MAX_ORDER}, got {}",
                    self.gauss_order
                ),
            );
        }
        if self.random_instances > 1000 {
            return bad(
                "random_instances",
                format!("must be <= 1000, got {}", self.random_instances),
            );
        }
        if let Some(t) = self.tolerance_override {
            if !(t > 0.0) {
                return bad("tolerance_override", format!("must be > 0, got {t}"));
            }
        }
        Ok(())
    }

    /// Canonical text form; parsing it gives back an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |key: &str, value: String| {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&value);
            out.push('\n');
        };
        let real = |v: f64| format!("{v:?}");
        let complex = |c: &Complex64| format!("{:?},{:?}", c.re, c.im);
        for &key in KEYS {
            match key {
                "mass" => line(key, real(self.mass)),
                "omega" => line(key, real(self.omega)),
                "hbar" => line(key, real(self.hbar)),
                "format" => line(key, self.format.name().into()),
                "output" => {
                    if let Some(p) = &self.output {
                        line(key, p.display().to_string());
                    }
                }
                "seed" => line(key, self.seed.to_string()),
                "n" => self.n.iter().for_each(|n| line(key, n.to_string())),
                "representation" => line(key, representation_name(self.representation).into()),
                "grid_min" => line(key, real(self.grid_min)),
                "grid_max" => line(key, real(self.grid_max)),
                "grid_points" => line(key, self.grid_points.to_string()),
                "z" => self.z.iter().for_each(|z| line(key, complex(z))),
                "truncation" => line(key, self.truncation.to_string()),
                "epsilon" => self.epsilon.iter().for_each(|&e| line(key, real(e))),
                "kernel_order" => self
                    .kernel_order
                    .iter()
                    .for_each(|n| line(key, n.to_string())),
                "q" => self.q.iter().for_each(|&v| line(key, real(v))),
                "qp" => self.qp.iter().for_each(|&v| line(key, real(v))),
                "alpha" => self.alpha.iter().for_each(|a| line(key, complex(a))),
                "route" => line(key, self.route.name().into()),
                "spectral_terms" => line(key, self.spectral_terms.to_string()),
                "packet" => line(key, self.packet.name().into()),
                "packet_center" => line(key, real(self.packet_center)),
                "packet_index" => line(key, self.packet_index.to_string()),
                "evolve_half_width" => line(key, real(self.evolve_half_width)),
                "evolve_points" => line(key, self.evolve_points.to_string()),
                "gauss_order" => line(key, self.gauss_order.to_string()),
                "random_instances" => line(key, self.random_instances.to_string()),
                "tolerance_override" => {
                    if let Some(t) = self.tolerance_override {
                        line(key, real(t));
                    }
                }
                _ => unreachable!("every key is serialized"),
            }
        }
        out
    }
}

/// Groups `key = value` lines by key, preserving value order. Blank lines
/// and `#` comments are skipped.
pub fn collect_pairs<'a>(
    lines: impl IntoIterator<Item = &'a str>,
) -> Result<BTreeMap<String, Vec<String>>, CliError> {
    let mut pairs: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (lineno, raw) in lines.into_iter().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::config(
                "line",
                format!("{}: expected key = value, got {raw:?}", lineno + 1),
            )
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::config(
                key,
                format!("unknown key on line {}", lineno + 1),
            ));
        }
        pairs
            .entry(key.to_string())
            .or_default()
            .push(value.trim().to_string());
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn lists_and_complex_values() {
        let c = RunConfig::parse("alpha = 0.5,-0.25\nalpha = pi\nn = 4\nn = 7\n").unwrap();
        assert_eq!(
            c.alpha,
            vec![Complex64::new(0.5, -0.25), Complex64::new(PI, 0.0)]
        );
        assert_eq!(c.n, vec![4, 7]);
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn pi_multiples() {
        assert_eq!(parse_real("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_real("-pi").unwrap(), -PI);
        assert_eq!(parse_real("0.5*pi").unwrap(), 0.5 * PI);
        assert!(parse_real("xpi").is_err());
        assert!(parse_real("inf").is_err());
    }

    #[test]
    fn errors_name_the_field() {
        let err = RunConfig::parse("mass = -1").unwrap_err();
        assert!(err.to_string().contains("mass"));
        let err = RunConfig::parse("alpha = 0,1").unwrap_err();
        assert!(err.to_string().contains("alpha"));
        let err = RunConfig::parse("bogus = 1").unwrap_err();
        assert!(err.to_string().contains("bogus"));
        let err = RunConfig::parse("mass = 1\nmass = 2").unwrap_err();
        assert!(err.to_string().contains("mass"));
        assert!(RunConfig::parse("evolve_points = 100").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = RunConfig::parse("# header\n\nseed = 9  # trailing\n").unwrap();
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn single_point_grid() {
        let c = RunConfig::parse("grid_min = 0\ngrid_max = 0\ngrid_points = 1").unwrap();
        assert_eq!(c.grid(), vec![0.0]);
        let c = RunConfig::default();
        let g = c.grid();
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], -5.0);
        assert_eq!(g[100], 5.0);
    }
}
