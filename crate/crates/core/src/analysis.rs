//! Classical-period and revival-time extraction from autocorrelation
//! series, λ-sweeps, and the comparison table.
//!
//! The revival envelope is the *upper* envelope of `|A(t)|²`: a sliding
//! maximum over one classical period followed by a moving average. A plain
//! moving average of `|A|²` over one period is flat (it equals `Σ|ξ_n|⁴` up
//! to slowly varying cross terms) and cannot locate revivals.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::resonance::{self, Formula, RevivalPrediction};
use crate::spectrum::SpectrumModel;
use crate::tdse::{self, AutocorrelationSeries, DriveSpec, Grid};

/// Extraction method tag written to run metadata.
pub const METHOD_TAG: &str = "upper-envelope: sliding max over T_cl, moving average, quadratic peak refinement";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalEstimate {
    pub t_rev: f64,
    /// Envelope value of `|A|²` at the revival.
    pub peak_value: f64,
    pub search_window: (f64, f64),
    pub smoothing_width: f64,
    /// Envelope peak divided by the envelope median over the window.
    pub contrast: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionOptions {
    /// Width of the sliding maximum; `None` estimates the classical period
    /// from the series and falls back to one sample when none is found.
    pub envelope_width: Option<f64>,
    /// Moving-average width as a fraction of `T_guess`.
    pub smoothing_fraction: f64,
    /// Search window `[lo, hi]·T_guess`.
    pub window: (f64, f64),
    /// Minimum peak/median ratio of the envelope in the window.
    pub noise_floor: f64,
}

impl Default for ExtractionOptions {
    fn default() -> Self {
        ExtractionOptions {
            envelope_width: None,
            smoothing_fraction: 0.01,
            window: (0.7, 1.3),
            noise_floor: 2.0,
        }
    }
}

/// Revival time nearest `t_guess` with default options.
pub fn extract_revival(series: &AutocorrelationSeries, t_guess: f64) -> Result<RevivalEstimate> {
    extract_revival_with(series, t_guess, &ExtractionOptions::default())
}

pub fn extract_revival_with(
    series: &AutocorrelationSeries,
    t_guess: f64,
    opts: &ExtractionOptions,
) -> Result<RevivalEstimate> {
    if !(t_guess > 0.0) || !t_guess.is_finite() {
        return Err(Error::Domain(format!("T_guess must be > 0, got {t_guess}")));
    }
    let dt = series.sample_interval;
    if !(dt > 0.0) || series.len() < 3 {
        return Err(Error::Detection("series is too short".into()));
    }
    let (w_lo, w_hi) = (opts.window.0 * t_guess, opts.window.1 * t_guess);
    let t0 = series.times[0];
    if series.t_end() < w_hi - 0.5 * dt || t0 > w_lo {
        return Err(Error::Detection(format!(
            "series covers [{t0}, {}] but the search window is [{w_lo}, {w_hi}]",
            series.t_end()
        )));
    }
    let envelope_width = match opts.envelope_width {
        Some(w) => w,
        None => extract_classical_period(series).unwrap_or(dt),
    };
    let intensity = series.intensity();
    let upper = sliding_max(&intensity, half_width(envelope_width, dt));
    let smoothing_width = opts.smoothing_fraction * t_guess;
    let envelope = moving_average(&upper, half_width(smoothing_width, dt));

    let index = |t: f64| ((t - t0) / dt).round().clamp(0.0, (series.len() - 1) as f64) as usize;
    let (i_lo, i_hi) = (index(w_lo).max(1), index(w_hi).min(series.len() - 2));
    if i_hi <= i_lo {
        return Err(Error::Detection("search window holds no samples".into()));
    }
    let window = &envelope[i_lo..=i_hi];
    let (offset, &peak) = window
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty window");
    let mut sorted = window.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let contrast = if median > 0.0 { peak / median } else { f64::INFINITY };
    if !(contrast >= opts.noise_floor) {
        return Err(Error::Detection(format!(
            "no revival above the noise floor in [{w_lo:.1}, {w_hi:.1}]: peak {peak:.4}, median {median:.4}"
        )));
    }
    let i = i_lo + offset;
    let (y0, y1, y2) = (envelope[i - 1], envelope[i], envelope[i + 1]);
    let curvature = y0 - 2.0 * y1 + y2;
    let shift = if curvature < 0.0 {
        (0.5 * (y0 - y2) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let t_rev = (series.times[i] + shift * dt).clamp(w_lo, w_hi);
    Ok(RevivalEstimate {
        t_rev,
        peak_value: peak.min(1.0),
        search_window: (w_lo, w_hi),
        smoothing_width,
        contrast,
    })
}

fn half_width(width: f64, dt: f64) -> usize {
    (0.5 * width / dt).round() as usize
}

/// Centered sliding maximum over `2h + 1` samples (truncated at the ends).
fn sliding_max(x: &[f64], h: usize) -> Vec<f64> {
    if h == 0 {
        return x.to_vec();
    }
    // van Herk / Gil–Werman on a copy padded so every window is full
    let n = x.len();
    let w = 2 * h + 1;
    let mut padded = vec![f64::NEG_INFINITY; h];
    padded.extend_from_slice(x);
    padded.resize(n + 2 * h, f64::NEG_INFINITY);
    let mut prefix = padded.clone();
    let mut suffix = padded;
    let m = prefix.len();
    for i in 1..m {
        if i % w != 0 {
            prefix[i] = prefix[i].max(prefix[i - 1]);
        }
    }
    for i in (0..m - 1).rev() {
        if (i + 1) % w != 0 {
            suffix[i] = suffix[i].max(suffix[i + 1]);
        }
    }
    // window of x[i] is padded[i..i + w]
    (0..n).map(|i| suffix[i].max(prefix[i + w - 1])).collect()
}

/// Centered moving average over `2h + 1` samples (truncated at the ends).
fn moving_average(x: &[f64], h: usize) -> Vec<f64> {
    let n = x.len();
    let mut cumulative = Vec::with_capacity(n + 1);
    cumulative.push(0.0);
    for v in x {
        cumulative.push(cumulative.last().unwrap() + v);
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(h);
            let hi = (i + h).min(n - 1);
            (cumulative[hi + 1] - cumulative[lo]) / (hi + 1 - lo) as f64
        })
        .collect()
}

/// Number of rough periods in the power-spectrum window.
const PERIOD_WINDOW: f64 = 40.0;
const ZERO_PADDING: usize = 8;

/// Classical period from the short-time recurrences of `|A(t)|²`.
///
/// A first-return estimate selects the fundamental; the dominant power
/// spectrum peak within `[0.5, 1.5]` of that frequency over a window of
/// about 40 periods then gives the period, refined by parabolic
/// interpolation of the zero-padded spectrum.
pub fn extract_classical_period(series: &AutocorrelationSeries) -> Result<f64> {
    let dt = series.sample_interval;
    let intensity = series.intensity();
    let rough = first_return(&intensity)
        .ok_or_else(|| Error::Detection("|A|^2 never returns after its first decay".into()))?
        as f64
        * dt;
    let window_len = ((PERIOD_WINDOW * rough / dt).round() as usize).min(intensity.len());
    if (window_len as f64) * dt < 5.0 * rough {
        return Err(Error::Detection(format!(
            "series covers fewer than 5 periods of the rough estimate {rough}"
        )));
    }
    let segment = &intensity[..window_len];
    let mean = segment.iter().sum::<f64>() / window_len as f64;
    let padded = (window_len * ZERO_PADDING).next_power_of_two();
    let mut buffer: Vec<Complex64> = segment
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let hann = 0.5 - 0.5 * (2.0 * PI * j as f64 / (window_len - 1) as f64).cos();
            Complex64::new((v - mean) * hann, 0.0)
        })
        .collect();
    buffer.resize(padded, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(padded).process(&mut buffer);
    let power: Vec<f64> = buffer.iter().map(|c| c.norm_sqr()).collect();
    let df = 1.0 / (padded as f64 * dt);
    let f_rough = 1.0 / rough;
    let lo = ((0.5 * f_rough / df).floor() as usize).max(1);
    let hi = ((1.5 * f_rough / df).ceil() as usize).min(padded / 2 - 1);
    let k = (lo..=hi)
        .max_by(|&a, &b| power[a].total_cmp(&power[b]))
        .ok_or_else(|| Error::Detection("empty frequency band".into()))?;
    if k == lo || k == hi {
        return Err(Error::Detection("no dominant peak inside the frequency band".into()));
    }
    let (p0, p1, p2) = (power[k - 1].ln(), power[k].ln(), power[k + 1].ln());
    let curvature = p0 - 2.0 * p1 + p2;
    let shift = if curvature < 0.0 { 0.5 * (p0 - p2) / curvature } else { 0.0 };
    Ok(1.0 / ((k as f64 + shift) * df))
}

/// Index of the first strong local maximum after `|A|²` has dropped below
/// half its initial value.
fn first_return(intensity: &[f64]) -> Option<usize> {
    let start = intensity[0];
    let drop = intensity.iter().position(|&v| v < 0.5 * start)?;
    // strongest later value within the next stretch sets the threshold
    let horizon = (drop * 40).clamp(drop + 3, intensity.len());
    let tail = &intensity[drop..horizon];
    let top = tail.iter().copied().fold(0.0, f64::max);
    (drop + 1..horizon - 1).find(|&i| {
        intensity[i] >= 0.5 * top && intensity[i] >= intensity[i - 1] && intensity[i] >= intensity[i + 1]
    })
}

/// Numerical settings for the cavity simulations behind a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub v0: f64,
    pub kappa: f64,
    pub kbar: f64,
    /// Grid is `[x_min, x_max_factor·E_r]`.
    pub x_min: f64,
    pub x_max_factor: f64,
    pub n_points: usize,
    /// `dt = T_cl / steps_per_period`.
    pub steps_per_period: f64,
    /// `sample_interval = T_cl / samples_per_period`.
    pub samples_per_period: f64,
    /// Initial width; `None` uses `√(k̄·T_cl/4π)`.
    pub sigma: Option<f64>,
    pub p0: f64,
    /// `t_end = t_end_factor · T_guess`.
    pub t_end_factor: f64,
    pub extraction: ExtractionOptions,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            v0: 1.0,
            kappa: 1.0,
            kbar: 1.0,
            x_min: -10.0,
            x_max_factor: 4.0,
            n_points: 4096,
            steps_per_period: 2000.0,
            samples_per_period: 20.0,
            sigma: None,
            p0: 0.0,
            t_end_factor: 1.45,
            extraction: ExtractionOptions::default(),
        }
    }
}

impl SimulationConfig {
    /// Runs one cavity evolution with the packet released at `x0 = E_r`.
    /// `t_cl` sets the time step, sample interval and default width.
    pub fn run(&self, energy: f64, lambda: f64, t_cl: f64, t_end: f64) -> Result<AutocorrelationSeries> {
        let grid = Grid::new(self.x_min, self.x_max_factor * energy, self.n_points)?;
        let sigma = self
            .sigma
            .unwrap_or_else(|| (self.kbar * t_cl / (4.0 * PI)).sqrt());
        let psi = tdse::init_gaussian(grid, energy, sigma, self.p0, self.kbar)?;
        let drive = DriveSpec::new(lambda, self.v0, self.kappa, self.kbar)?;
        tdse::evolve_and_record(
            &psi,
            t_end,
            t_cl / self.steps_per_period,
            t_cl / self.samples_per_period,
            &drive,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    NoRevival,
    NumericError,
    ConfigError,
    /// The analytic ratio left `(0, 1.2]`, so no search window exists.
    OutOfRange,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::NoRevival => "no_revival",
            RowStatus::NumericError => "numeric_error",
            RowStatus::ConfigError => "config_error",
            RowStatus::OutOfRange => "out_of_range",
        }
    }

    fn from_error(e: &Error) -> Self {
        match e {
            Error::Detection(_) => RowStatus::NoRevival,
            Error::Config { .. } | Error::Domain(_) => RowStatus::ConfigError,
            _ => RowStatus::NumericError,
        }
    }
}

/// Run diagnostics kept alongside each sweep row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RowDiagnostics {
    pub t_guess: f64,
    pub t_end: f64,
    pub classical_period: Option<f64>,
    pub peak_value: Option<f64>,
    pub contrast: Option<f64>,
    pub max_norm_drift: Option<f64>,
    pub energy_drift: Option<f64>,
    pub max_edge_amplitude: Option<f64>,
    pub runtime_seconds: f64,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub t_numeric: Option<f64>,
    pub t_analytic_general: Option<f64>,
    pub t_analytic_simple: Option<f64>,
    pub ratio_numeric: Option<f64>,
    pub ratio_analytic_general: Option<f64>,
    pub ratio_analytic_simple: Option<f64>,
    pub status: RowStatus,
    pub diagnostics: RowDiagnostics,
}

impl SweepRow {
    pub fn deficit_numeric(&self) -> Option<f64> {
        self.ratio_numeric.map(|r| 1.0 - r)
    }
}

/// General and simple predictions for one `λ`; failures become `None`.
pub fn analytic_predictions(
    model: &SpectrumModel,
    energy: f64,
    lambda: f64,
) -> Result<(Option<RevivalPrediction>, Option<RevivalPrediction>)> {
    let ctx = resonance::build_context(model, energy, lambda)?;
    let mut general = None;
    let mut simple = None;
    for (formula, prediction) in resonance::predict_all(model, &ctx, lambda) {
        match formula {
            Formula::General => general = prediction.ok(),
            Formula::BouncerSimple => simple = prediction.ok(),
            Formula::Bouncer => {}
        }
    }
    Ok((general, simple))
}

/// Largest analytic `T_λ/T₀` for which a sweep row searches numerically;
/// beyond it the small-`q` theory has broken down.
pub const MAX_GUESS_RATIO: f64 = 1.2;

/// Runs the λ-sweep at mean energy `energy`.
///
/// `model` supplies the analytic predictions; the simulations use the soft
/// cavity in `sim`. When the sweep contains `λ = 0` that run goes first and
/// its numeric revival time becomes the reference `T_numeric(0)`: later rows
/// search around `ratio_general(λ)·T_numeric(0)` and report
/// `ratio_numeric = T_numeric(λ)/T_numeric(0)`. Without `λ = 0` the analytic
/// `T₀` plays both roles. Remaining rows run on a pool of `workers` threads;
/// a failing row is recorded with its status and never aborts the sweep.
pub fn sweep(
    model: &SpectrumModel,
    energy: f64,
    lambdas: &[f64],
    sim: &SimulationConfig,
    workers: usize,
) -> Result<Vec<SweepRow>> {
    if lambdas.is_empty() {
        return Err(Error::config("lambda list is empty"));
    }
    if let Some(bad) = lambdas.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
        return Err(Error::config(format!("lambda must be >= 0, got {bad}")));
    }
    let mut lambdas = lambdas.to_vec();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();

    let ctx = resonance::build_context(model, energy, 0.0)?;
    let t_cl = resonance::classical_period(&ctx)?;
    let t0_analytic = resonance::t_zero(&ctx)?;

    let predictions: Vec<_> = lambdas
        .iter()
        .map(|&l| analytic_predictions(model, energy, l))
        .collect::<Result<_>>()?;

    let run_row = |lambda: f64, general: Option<RevivalPrediction>, reference: f64| -> (Option<f64>, RowDiagnostics) {
        let started = std::time::Instant::now();
        let mut diag = RowDiagnostics::default();
        let ratio = match general {
            Some(p) => p.ratio,
            None if lambda == 0.0 => 1.0,
            None => f64::NAN,
        };
        diag.t_guess = ratio * reference;
        diag.t_end = sim.t_end_factor * diag.t_guess;
        if !(ratio > 0.0 && ratio <= MAX_GUESS_RATIO) {
            diag.message = Some(format!(
                "out_of_range: analytic ratio {ratio} is outside (0, {MAX_GUESS_RATIO}]"
            ));
            return (None, diag);
        }
        let outcome = (|| -> Result<f64> {
            let series = sim.run(energy, lambda, t_cl, diag.t_end)?;
            diag.max_norm_drift = Some(series.max_norm_drift);
            diag.energy_drift = Some(series.energy_drift());
            diag.max_edge_amplitude = Some(series.max_edge_amplitude);
            let period = extract_classical_period(&series).ok();
            diag.classical_period = period;
            let opts = ExtractionOptions {
                envelope_width: Some(period.unwrap_or(t_cl)),
                ..sim.extraction
            };
            let estimate = extract_revival_with(&series, diag.t_guess, &opts)?;
            diag.peak_value = Some(estimate.peak_value);
            diag.contrast = Some(estimate.contrast);
            Ok(estimate.t_rev)
        })();
        diag.runtime_seconds = started.elapsed().as_secs_f64();
        match outcome {
            Ok(t) => (Some(t), diag),
            Err(e) => {
                diag.message = Some(format!("{}: {e}", RowStatus::from_error(&e).as_str()));
                (None, diag)
            }
        }
    };

    let mut results: Vec<Option<(Option<f64>, RowDiagnostics)>> = vec![None; lambdas.len()];
    let mut reference = t0_analytic;
    let mut numeric_reference = false;
    if lambdas[0] == 0.0 {
        let (t, diag) = run_row(0.0, predictions[0].0, t0_analytic);
        if let Some(t) = t {
            reference = t;
            numeric_reference = true;
        }
        results[0] = Some((t, diag));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Numeric(format!("cannot start worker pool: {e}")))?;
    let pending: Vec<usize> = (0..lambdas.len()).filter(|&i| results[i].is_none()).collect();
    let done: Vec<(usize, (Option<f64>, RowDiagnostics))> = pool.install(|| {
        pending
            .par_iter()
            .map(|&i| (i, run_row(lambdas[i], predictions[i].0, reference)))
            .collect()
    });
    for (i, r) in done {
        results[i] = Some(r);
    }

    let rows = lambdas
        .iter()
        .zip(predictions)
        .zip(results)
        .map(|((&lambda, (general, simple)), result)| {
            let (t_numeric, diagnostics) = result.expect("every row ran");
            let status = match (&t_numeric, &diagnostics.message) {
                (Some(_), _) => RowStatus::Ok,
                (None, Some(m)) if m.starts_with("no_revival") => RowStatus::NoRevival,
                (None, Some(m)) if m.starts_with("config_error") => RowStatus::ConfigError,
                (None, Some(m)) if m.starts_with("out_of_range") => RowStatus::OutOfRange,
                _ => RowStatus::NumericError,
            };
            let ratio_numeric = t_numeric.map(|t| {
                if numeric_reference || lambda != 0.0 {
                    t / reference
                } else {
                    t / t0_analytic
                }
            });
            SweepRow {
                lambda,
                t_numeric,
                t_analytic_general: general.map(|p| p.t_lambda),
                t_analytic_simple: simple.map(|p| p.t_lambda),
                ratio_numeric,
                ratio_analytic_general: general.map(|p| p.ratio),
                ratio_analytic_simple: simple.map(|p| p.ratio),
                status,
                diagnostics,
            }
        })
        .collect();
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFit {
    /// Deficit per `λ²`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares fit of `1 − ratio_numeric` against `λ²` over the rows
/// with a numeric result.
pub fn quadratic_fit(rows: &[SweepRow]) -> Result<QuadraticFit> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.deficit_numeric().map(|d| (r.lambda * r.lambda, d)))
        .collect();
    fit_against_lambda_squared(&points)
}

/// Least-squares line through `(λ², deficit)` pairs.
pub fn fit_against_lambda_squared(points: &[(f64, f64)]) -> Result<QuadraticFit> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 distinct lambda values, got {}",
            xs.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("degenerate design matrix".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(QuadraticFit {
        slope,
        intercept,
        r_squared,
        points: points.len(),
    })
}

pub const SWEEP_CSV_HEADER: &str =
    "lambda,T_numeric,T_analytic_general,T_analytic_simple,ratio_numeric,ratio_analytic_general,ratio_analytic_simple,status";

/// 12 significant digits; missing values as `nan`.
pub fn format_value(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.11e}"),
        _ => "nan".to_string(),
    }
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_value(Some(r.lambda)),
            format_value(r.t_numeric),
            format_value(r.t_analytic_general),
            format_value(r.t_analytic_simple),
            format_value(r.ratio_numeric),
            format_value(r.ratio_analytic_general),
            format_value(r.ratio_analytic_simple),
            r.status.as_str()
        )?;
    }
    Ok(())
}

/// Parses a sweep CSV written by [`write_sweep_csv`]. Diagnostics are not
/// stored in the CSV and come back empty.
pub fn read_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == SWEEP_CSV_HEADER => {}
        _ => return Err(Error::config_at(1, "missing sweep CSV header")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 8 {
            return Err(Error::config_at(i + 1, format!("expected 8 fields, got {}", fields.len())));
        }
        let parse = |s: &str| -> Result<Option<f64>> {
            if s == "nan" {
                return Ok(None);
            }
            s.parse::<f64>()
                .map(Some)
                .map_err(|_| Error::config_at(i + 1, format!("cannot parse number {s:?}")))
        };
        let status = match fields[7] {
            "ok" => RowStatus::Ok,
            "no_revival" => RowStatus::NoRevival,
            "numeric_error" => RowStatus::NumericError,
            "config_error" => RowStatus::ConfigError,
            "out_of_range" => RowStatus::OutOfRange,
            other => return Err(Error::config_at(i + 1, format!("unknown status {other:?}"))),
        };
        rows.push(SweepRow {
            lambda: parse(fields[0])?
                .ok_or_else(|| Error::config_at(i + 1, "lambda is missing"))?,
            t_numeric: parse(fields[1])?,
            t_analytic_general: parse(fields[2])?,
            t_analytic_simple: parse(fields[3])?,
            ratio_numeric: parse(fields[4])?,
            ratio_analytic_general: parse(fields[5])?,
            ratio_analytic_simple: parse(fields[6])?,
            status,
            diagnostics: RowDiagnostics::default(),
        });
    }
    Ok(rows)
}
