//! Flat `key = value` run configuration.
//!
//! One setting per line, `#` starts a comment, lists are comma separated.
//! Every key has a default, so an empty file is a valid configuration.
//! Unknown keys and unparseable or invalid values are reported with their
//! line number. [`RunConfig::to_text`] writes the fully resolved
//! configuration in the same format and parses back to an equal value.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::analysis::{ExtractionOptions, SimulationConfig};
use crate::error::{Error, Result};
use crate::scaling::{self, ScaledUnits};
use crate::spectrum::SpectrumModel;

/// Which spectrum feeds the analytic predictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumChoice {
    /// Closed-form triangular well.
    Triangular,
    /// Semiclassical quantization of `x + V₀e^(−κx)`.
    Numeric,
}

impl SpectrumChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumChoice::Triangular => "triangular",
            SpectrumChoice::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spectrum: SpectrumChoice,
    pub kbar: f64,
    pub v0: f64,
    pub kappa: f64,
    /// Mean energy of the packet, which is released at rest at `x0 = E_r`.
    pub energy: f64,
    /// Release height in metres; when set it overrides `E_r` through the
    /// lab units.
    pub z0: Option<f64>,
    pub sigma: Option<f64>,
    pub p0: f64,
    pub lambdas: Vec<f64>,
    pub x_min: f64,
    pub x_max_factor: f64,
    pub n_points: usize,
    pub steps_per_period: f64,
    pub samples_per_period: f64,
    /// Fixed end time for `simulate`; `None` uses `t_end_factor · T_guess`.
    pub t_end: Option<f64>,
    pub t_end_factor: f64,
    pub smoothing_fraction: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    pub noise_floor: f64,
    /// Levels listed on each side of `r` by the spectrum report.
    pub spectrum_span: u32,
    pub mass: f64,
    pub gravity: f64,
    pub omega: f64,
    pub hbar: f64,
    pub workers: usize,
    pub out_dir: String,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            spectrum: SpectrumChoice::Triangular,
            kbar: 1.0,
            v0: 1.0,
            kappa: 1.0,
            energy: 104.1,
            z0: None,
            sigma: None,
            p0: 0.0,
            lambdas: vec![0.0, 0.05, 0.1, 0.15, 0.2, 0.25],
            x_min: -10.0,
            x_max_factor: 4.0,
            n_points: 4096,
            steps_per_period: 2000.0,
            samples_per_period: 20.0,
            t_end: None,
            t_end_factor: 1.45,
            smoothing_fraction: 0.01,
            window_lo: 0.7,
            window_hi: 1.3,
            noise_floor: 2.0,
            spectrum_span: 5,
            mass: scaling::CESIUM_MASS,
            gravity: scaling::STANDARD_GRAVITY,
            omega: 2.0 * PI * 930.0,
            hbar: scaling::HBAR,
            workers: 1,
            out_dir: "out".to_string(),
            seed: 0,
        }
    }
}

const KEYS: &[&str] = &[
    "spectrum",
    "kbar",
    "V0",
    "kappa",
    "E_r",
    "z0",
    "sigma",
    "p0",
    "lambda",
    "x_min",
    "x_max_factor",
    "n_points",
    "steps_per_period",
    "samples_per_period",
    "t_end",
    "t_end_factor",
    "smoothing_fraction",
    "window_lo",
    "window_hi",
    "noise_floor",
    "spectrum_span",
    "mass",
    "gravity",
    "omega",
    "hbar",
    "workers",
    "out_dir",
    "seed",
];

/// Parses configuration text; see the module docs for the format.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut lines: HashMap<&'static str, usize> = HashMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config_at(line_no, format!("expected key = value, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let known = KEYS
            .iter()
            .copied()
            .find(|k| *k == key)
            .ok_or_else(|| Error::config_at(line_no, format!("unknown key {key:?}")))?;
        if lines.insert(known, line_no).is_some() {
            return Err(Error::config_at(line_no, format!("duplicate key {key:?}")));
        }
        cfg.set(known, value).map_err(|m| Error::config_at(line_no, m))?;
    }
    cfg.validate_with(|key| lines.get(key).copied())?;
    Ok(cfg)
}

fn number(value: &str) -> std::result::Result<f64, String> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("cannot parse {value:?} as a number"))
}

fn optional(value: &str) -> std::result::Result<Option<f64>, String> {
    if value == "auto" {
        Ok(None)
    } else {
        number(value).map(Some)
    }
}

fn integer<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String> {
    value
        .parse::<T>()
        .map_err(|_| format!("cannot parse {value:?} as a non-negative integer"))
}

/// Parses a comma-separated λ list; an empty value is an empty list.
pub fn parse_lambda_list(value: &str) -> std::result::Result<Vec<f64>, String> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| number(v.trim())).collect()
}

impl RunConfig {
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "spectrum" => {
                self.spectrum = match value {
                    "triangular" => SpectrumChoice::Triangular,
                    "numeric" => SpectrumChoice::Numeric,
                    _ => return Err(format!("spectrum must be triangular or numeric, got {value:?}")),
                }
            }
            "kbar" => self.kbar = number(value)?,
            "V0" => self.v0 = number(value)?,
            "kappa" => self.kappa = number(value)?,
            "E_r" => self.energy = number(value)?,
            "z0" => self.z0 = optional(value)?,
            "sigma" => self.sigma = optional(value)?,
            "p0" => self.p0 = number(value)?,
            "lambda" => self.lambdas = parse_lambda_list(value)?,
            "x_min" => self.x_min = number(value)?,
            "x_max_factor" => self.x_max_factor = number(value)?,
            "n_points" => self.n_points = integer(value)?,
            "steps_per_period" => self.steps_per_period = number(value)?,
            "samples_per_period" => self.samples_per_period = number(value)?,
            "t_end" => self.t_end = optional(value)?,
            "t_end_factor" => self.t_end_factor = number(value)?,
            "smoothing_fraction" => self.smoothing_fraction = number(value)?,
            "window_lo" => self.window_lo = number(value)?,
            "window_hi" => self.window_hi = number(value)?,
            "noise_floor" => self.noise_floor = number(value)?,
            "spectrum_span" => self.spectrum_span = integer(value)?,
            "mass" => self.mass = number(value)?,
            "gravity" => self.gravity = number(value)?,
            "omega" => self.omega = number(value)?,
            "hbar" => self.hbar = number(value)?,
            "workers" => self.workers = integer(value)?,
            "out_dir" => {
                if value.is_empty() {
                    return Err("out_dir must not be empty".into());
                }
                self.out_dir = value.to_string()
            }
            "seed" => self.seed = integer(value)?,
            _ => unreachable!("key list and setter disagree on {key}"),
        }
        Ok(())
    }

    /// Checks every invariant; errors carry no line number.
    pub fn validate(&self) -> Result<()> {
        self.validate_with(|_| None)
    }

    fn validate_with(&self, line_of: impl Fn(&str) -> Option<usize>) -> Result<()> {
        let fail = |key: &str, message: String| Error::Config {
            line: line_of(key),
            message,
        };
        let positive = [
            ("kbar", self.kbar),
            ("kappa", self.kappa),
            ("E_r", self.energy),
            ("x_max_factor", self.x_max_factor),
            ("steps_per_period", self.steps_per_period),
            ("samples_per_period", self.samples_per_period),
            ("t_end_factor", self.t_end_factor),
            ("smoothing_fraction", self.smoothing_fraction),
            ("window_lo", self.window_lo),
            ("noise_floor", self.noise_floor),
            ("mass", self.mass),
            ("gravity", self.gravity),
            ("omega", self.omega),
            ("hbar", self.hbar),
        ];
        for (key, v) in positive {
            if !(v > 0.0) {
                return Err(fail(key, format!("{key} must be > 0, got {v}")));
            }
        }
        if self.v0 < 0.0 {
            return Err(fail("V0", format!("V0 must be >= 0, got {}", self.v0)));
        }
        for (key, v) in [("z0", self.z0), ("sigma", self.sigma), ("t_end", self.t_end)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(fail(key, format!("{key} must be > 0, got {v}")));
                }
            }
        }
        if let Some(bad) = self.lambdas.iter().find(|l| **l < 0.0) {
            return Err(fail("lambda", format!("lambda must be >= 0, got {bad}")));
        }
        if !(self.window_hi > self.window_lo) {
            return Err(fail("window_hi", "window_hi must exceed window_lo".into()));
        }
        if self.t_end_factor < self.window_hi {
            return Err(fail(
                "t_end_factor",
                format!(
                    "t_end_factor {} does not cover the search window up to {}",
                    self.t_end_factor, self.window_hi
                ),
            ));
        }
        if self.n_points < 256 || !self.n_points.is_power_of_two() {
            return Err(fail(
                "n_points",
                format!("n_points must be a power of two >= 256, got {}", self.n_points),
            ));
        }
        if self.samples_per_period > self.steps_per_period {
            return Err(fail(
                "samples_per_period",
                "samples_per_period must not exceed steps_per_period".into(),
            ));
        }
        if self.workers == 0 {
            return Err(fail("workers", "workers must be >= 1".into()));
        }
        if self.x_min >= self.x_max_factor * self.resolved_energy() {
            return Err(fail("x_min", "x_min must lie below x_max_factor * E_r".into()));
        }
        Ok(())
    }

    pub fn units(&self) -> Result<ScaledUnits> {
        scaling::derive_units_with_hbar(self.mass, self.gravity, self.omega, self.hbar)
    }

    /// `E_r`, or the potential at the release height when `z0` is set.
    pub fn resolved_energy(&self) -> f64 {
        match (self.z0, self.units()) {
            (Some(z0), Ok(units)) => {
                let x0 = units.to_dimensionless_position(z0);
                x0 + self.v0 * (-self.kappa * x0).exp()
            }
            _ => self.energy,
        }
    }

    /// Spectrum model used for the analytic predictions.
    pub fn model(&self) -> Result<SpectrumModel> {
        match self.spectrum {
            SpectrumChoice::Triangular => SpectrumModel::triangular(self.kbar),
            SpectrumChoice::Numeric => SpectrumModel::numeric_action(self.kbar, self.v0, self.kappa),
        }
    }

    pub fn simulation(&self) -> SimulationConfig {
        SimulationConfig {
            v0: self.v0,
            kappa: self.kappa,
            kbar: self.kbar,
            x_min: self.x_min,
            x_max_factor: self.x_max_factor,
            n_points: self.n_points,
            steps_per_period: self.steps_per_period,
            samples_per_period: self.samples_per_period,
            sigma: self.sigma,
            p0: self.p0,
            t_end_factor: self.t_end_factor,
            extraction: ExtractionOptions {
                envelope_width: None,
                smoothing_fraction: self.smoothing_fraction,
                window: (self.window_lo, self.window_hi),
                noise_floor: self.noise_floor,
            },
        }
    }

    /// The resolved configuration in the input format.
    pub fn to_text(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "auto".to_string(), |v| v.to_string());
        let lambdas: Vec<String> = self.lambdas.iter().map(f64::to_string).collect();
        let mut s = String::from("# resolved configuration\n");
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("spectrum", self.spectrum.as_str().to_string());
        put("kbar", self.kbar.to_string());
        put("V0", self.v0.to_string());
        put("kappa", self.kappa.to_string());
        put("E_r", self.energy.to_string());
        put("z0", opt(self.z0));
        put("sigma", opt(self.sigma));
        put("p0", self.p0.to_string());
        put("lambda", lambdas.join(","));
        put("x_min", self.x_min.to_string());
        put("x_max_factor", self.x_max_factor.to_string());
        put("n_points", self.n_points.to_string());
        put("steps_per_period", self.steps_per_period.to_string());
        put("samples_per_period", self.samples_per_period.to_string());
        put("t_end", opt(self.t_end));
        put("t_end_factor", self.t_end_factor.to_string());
        put("smoothing_fraction", self.smoothing_fraction.to_string());
        put("window_lo", self.window_lo.to_string());
        put("window_hi", self.window_hi.to_string());
        put("noise_floor", self.noise_floor.to_string());
        put("spectrum_span", self.spectrum_span.to_string());
        put("mass", format!("{:e}", self.mass));
        put("gravity", self.gravity.to_string());
        put("omega", self.omega.to_string());
        put("hbar", format!("{:e}", self.hbar));
        put("workers", self.workers.to_string());
        put("out_dir", self.out_dir.clone());
        put("seed", self.seed.to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_parameters() {
        let cfg = parse_config(
            "kbar = 1\nV0 = 1\nkappa = 1\nE_r = 104.1\nlambda = 0,0.05,0.1,0.15,0.2,0.25",
        )
        .unwrap();
        assert_eq!(cfg.kbar, 1.0);
        assert_eq!(cfg.energy, 104.1);
        assert_eq!(cfg.lambdas, vec![0.0, 0.05, 0.1, 0.15, 0.2, 0.25]);
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
        assert_eq!(parse_config("# only a comment\n\n   \n").unwrap(), RunConfig::default());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let line = |text: &str| match parse_config(text) {
            Err(Error::Config { line, .. }) => line,
            other => panic!("expected a configuration error, got {other:?}"),
        };
        assert_eq!(line("kbar = -1"), Some(1));
        assert_eq!(line("# c\nkbar = 1\nkbarr = 2"), Some(3));
        assert_eq!(line("E_r = abc"), Some(1));
        assert_eq!(line("\nlambda = 0, -0.1"), Some(2));
        assert_eq!(line("n_points = 1000"), Some(1));
        assert_eq!(line("kbar = 1\nkbar = 2"), Some(2));
        assert_eq!(line("just text"), Some(1));
        assert_eq!(line("window_lo = 0.9\nwindow_hi = 0.8"), Some(2));
    }

    #[test]
    fn comments_and_whitespace() {
        let cfg = parse_config("  E_r=70.28   # low curve\nsigma = 2\nspectrum = numeric").unwrap();
        assert_eq!(cfg.energy, 70.28);
        assert_eq!(cfg.sigma, Some(2.0));
        assert_eq!(cfg.spectrum, SpectrumChoice::Numeric);
        assert_eq!(parse_config("lambda =").unwrap().lambdas, Vec::<f64>::new());
    }

    #[test]
    fn release_height_sets_the_energy() {
        let cfg = parse_config("z0 = 29.8e-6").unwrap();
        assert!((cfg.resolved_energy() - 103.9).abs() < 0.1, "{}", cfg.resolved_energy());
        assert_eq!(RunConfig::default().resolved_energy(), 104.1);
    }

    #[test]
    fn echo_round_trips_defaults() {
        let cfg = RunConfig::default();
        assert_eq!(parse_config(&cfg.to_text()).unwrap(), cfg);
    }

    proptest! {
        #[test]
        fn echo_round_trips(
            kbar in 1e-3f64..10.0,
            energy in 1.0f64..500.0,
            lambdas in proptest::collection::vec(0.0f64..1.0, 0..8),
            sigma in proptest::option::of(0.1f64..10.0),
            exponent in 8u32..14,
            numeric in any::<bool>(),
            workers in 1usize..16,
        ) {
            let cfg = RunConfig {
                kbar,
                energy,
                lambdas,
                sigma,
                n_points: 1 << exponent,
                spectrum: if numeric { SpectrumChoice::Numeric } else { SpectrumChoice::Triangular },
                workers,
                ..RunConfig::default()
            };
            prop_assert_eq!(parse_config(&cfg.to_text()).unwrap(), cfg);
        }
    }
}
