//! Command-line driver: lab-unit conversion, spectrum tables, analytic
//! revival predictions, cavity simulations and λ-sweeps.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use revival::analysis::{self, SweepRow};
use revival::config::{self, RunConfig};
use revival::resonance;
use revival::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "revival", version, about = "Quantum revival times near a driven nonlinear resonance")]
struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides out_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (overrides workers).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Comma-separated modulation strengths (overrides lambda).
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Mean packet energy (overrides E_r and z0).
    #[arg(long, global = true, allow_hyphen_values = true)]
    er: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Lab parameters to dimensionless units.
    Units,
    /// Levels, E' and E'' around E_r.
    Spectrum,
    /// Analytic revival predictions for each λ.
    Predict,
    /// One cavity simulation at the first λ; writes the autocorrelation.
    Simulate,
    /// λ-sweep with numeric revival extraction.
    Sweep,
    /// Comparison table and plot files from a finished sweep.
    Compare,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Units => "units",
            Command::Spectrum => "spectrum",
            Command::Predict => "predict",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Compare => "compare",
        }
    }
}

fn config_error(message: impl Into<String>) -> Error {
    Error::Config {
        line: None,
        message: message.into(),
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            config::parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out_dir = out.to_string_lossy().into_owned();
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(list) = &cli.lambda {
        cfg.lambdas = config::parse_lambda_list(list).map_err(|m| config_error(format!("--lambda: {m}")))?;
    }
    if let Some(er) = cli.er {
        cfg.energy = er;
        cfg.z0 = None;
    }
    if cfg.z0.is_some() {
        cfg.energy = cfg.resolved_energy();
        cfg.z0 = None;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fmt(v: f64) -> String {
    analysis::format_value(Some(v))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Sidecar metadata in the configuration's key = value format.
struct Meta {
    text: String,
}

impl Meta {
    fn new(command: Command, cfg: &RunConfig) -> Self {
        let mut m = Meta { text: String::new() };
        m.put("tool", "revival");
        m.put("version", env!("CARGO_PKG_VERSION"));
        m.put("command", command.name());
        m.put("spectrum", cfg.spectrum.as_str());
        m
    }

    fn put(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{key} = {value}");
    }

    fn put_num(&mut self, key: &str, value: f64) {
        let magnitude = value.abs();
        if value == 0.0 || (1e-3..1e7).contains(&magnitude) {
            self.put(key, value);
        } else {
            self.put(key, format!("{value:e}"));
        }
    }

    fn finish(mut self, dir: &Path, command: Command, started: Instant) -> Result<()> {
        self.put("runtime_seconds", format!("{:.3}", started.elapsed().as_secs_f64()));
        write_file(dir, &format!("{}.meta", command.name()), &self.text)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(cli)?;
    let dir = PathBuf::from(&cfg.out_dir);
    fs::create_dir_all(&dir)?;
    write_file(&dir, "config.resolved", &cfg.to_text())?;
    let started = Instant::now();
    let mut meta = Meta::new(cli.command, &cfg);
    let outcome = match cli.command {
        Command::Units => units(&cfg, &mut meta),
        Command::Spectrum => spectrum(&cfg, &dir),
        Command::Predict => predict(&cfg, &dir),
        Command::Simulate => simulate(&cfg, &dir, &mut meta),
        Command::Sweep => sweep(&cfg, &dir, &mut meta),
        Command::Compare => compare(&dir, &mut meta),
    };
    if let Err(e) = &outcome {
        meta.put("error", e);
    }
    meta.finish(&dir, cli.command, started)?;
    outcome
}

fn units(cfg: &RunConfig, meta: &mut Meta) -> Result<()> {
    let u = cfg.units()?;
    println!("mass           {:e} kg", cfg.mass);
    println!("gravity        {} m/s^2", cfg.gravity);
    println!("omega          {} rad/s", cfg.omega);
    println!("length scale   {:e} m", u.length_scale);
    println!("time scale     {:e} s", u.time_scale);
    println!("energy scale   {:e} J", u.energy_scale);
    println!("kbar           {}", u.kbar);
    meta.put_num("kbar", u.kbar);
    meta.put_num("length_scale", u.length_scale);
    Ok(())
}

fn spectrum(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let model = cfg.model()?;
    let r = model.level_from_energy(cfg.energy)?.round().max(1.0);
    let span = cfg.spectrum_span as f64;
    let mut csv = String::from("n,E_n,dE_dn,d2E_dn2\n");
    let mut n = (r - span).max(1.0);
    while n <= r + span {
        let e = model.energy(n)?;
        let (e1, e2) = model.derivatives(n)?;
        let _ = writeln!(csv, "{n},{},{},{}", fmt(e), fmt(e1), fmt(e2));
        n += 1.0;
    }
    print!("{csv}");
    write_file(dir, "spectrum.csv", &csv)
}

fn predict(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let model = cfg.model()?;
    let mut csv = String::from(
        "lambda,N,r,mu,q,T_cl,T0,T_general,ratio_general,T_bouncer,ratio_bouncer,T_simple,ratio_simple\n",
    );
    for &lambda in &cfg.lambdas {
        let ctx = resonance::build_context(&model, cfg.energy, lambda)?;
        let t_cl = resonance::classical_period(&ctx)?;
        let t0 = resonance::t_zero(&ctx)?;
        let _ = write!(
            csv,
            "{},{},{},{},{},{},{}",
            fmt(lambda),
            ctx.order,
            ctx.level,
            fmt(ctx.mu),
            fmt(ctx.q),
            fmt(t_cl),
            fmt(t0)
        );
        for (formula, prediction) in resonance::predict_all(&model, &ctx, lambda) {
            match prediction {
                Ok(p) => {
                    let _ = write!(csv, ",{},{}", fmt(p.t_lambda), fmt(p.ratio));
                    println!(
                        "E_r={} lambda={lambda} N={} {:<15} T={:.1} ratio={:.4}",
                        cfg.energy,
                        ctx.order,
                        formula.name(),
                        p.t_lambda,
                        p.ratio
                    );
                }
                Err(e) => {
                    let _ = write!(csv, ",nan,nan");
                    println!("E_r={} lambda={lambda} {:<15} {e}", cfg.energy, formula.name());
                }
            }
        }
        csv.push('\n');
    }
    write_file(dir, "predict.csv", &csv)
}

fn simulate(cfg: &RunConfig, dir: &Path, meta: &mut Meta) -> Result<()> {
    let lambda = *cfg
        .lambdas
        .first()
        .ok_or_else(|| config_error("simulate needs at least one lambda"))?;
    if cfg.lambdas.len() > 1 {
        eprintln!("note: simulate runs only the first lambda ({lambda})");
    }
    let model = cfg.model()?;
    let ctx = resonance::build_context(&model, cfg.energy, lambda)?;
    let t_cl = resonance::classical_period(&ctx)?;
    let t_guess = resonance::revival_time_general(&ctx, lambda)
        .map(|p| p.t_lambda)
        .or_else(|_| resonance::t_zero(&ctx))?;
    let sim = cfg.simulation();
    let t_end = cfg.t_end.unwrap_or(sim.t_end_factor * t_guess);
    meta.put_num("lambda", lambda);
    meta.put_num("E_r", cfg.energy);
    meta.put_num("t_guess", t_guess);
    meta.put_num("t_end", t_end);
    let series = sim.run(cfg.energy, lambda, t_cl, t_end)?;
    meta.put_num("dt", series.dt);
    meta.put_num("max_norm_drift", series.max_norm_drift);
    meta.put_num("energy_drift", series.energy_drift());
    meta.put_num("max_edge_amplitude", series.max_edge_amplitude);

    let mut out = BufWriter::new(fs::File::create(dir.join("autocorrelation.csv"))?);
    writeln!(out, "t,re_A,im_A,abs_A2")?;
    for (t, a) in series.times.iter().zip(&series.values) {
        writeln!(out, "{},{},{},{}", fmt(*t), fmt(a.re), fmt(a.im), fmt(a.norm_sqr()))?;
    }
    out.flush()?;

    println!("norm drift {:e}, energy drift {:e}", series.max_norm_drift, series.energy_drift());
    let period = analysis::extract_classical_period(&series);
    match &period {
        Ok(p) => {
            println!("classical period {p:.4} (analytic {t_cl:.4})");
            meta.put_num("classical_period", *p);
        }
        Err(e) => println!("classical period: {e}"),
    }
    meta.put("extraction", analysis::METHOD_TAG);
    let opts = analysis::ExtractionOptions {
        envelope_width: Some(*period.as_ref().unwrap_or(&t_cl)),
        ..sim.extraction
    };
    let estimate = analysis::extract_revival_with(&series, t_guess, &opts)?;
    println!(
        "revival time {:.1} (guess {t_guess:.1}), envelope peak {:.4}, contrast {:.2}",
        estimate.t_rev, estimate.peak_value, estimate.contrast
    );
    meta.put_num("t_rev", estimate.t_rev);
    meta.put_num("contrast", estimate.contrast);
    Ok(())
}

fn sweep(cfg: &RunConfig, dir: &Path, meta: &mut Meta) -> Result<()> {
    let model = cfg.model()?;
    let rows = analysis::sweep(&model, cfg.energy, &cfg.lambdas, &cfg.simulation(), cfg.workers)?;
    let mut csv = Vec::new();
    analysis::write_sweep_csv(&rows, &mut csv)?;
    fs::write(dir.join("sweep.csv"), &csv)?;
    meta.put_num("E_r", cfg.energy);
    meta.put("extraction", analysis::METHOD_TAG);
    meta.put(
        "ratio_numeric",
        "T_numeric(lambda)/T_numeric(0) when lambda = 0 is swept, else T_numeric/T0_analytic",
    );
    for (i, row) in rows.iter().enumerate() {
        let d = &row.diagnostics;
        meta.put_num(&format!("row.{i}.lambda"), row.lambda);
        meta.put(&format!("row.{i}.status"), row.status.as_str());
        meta.put_num(&format!("row.{i}.t_guess"), d.t_guess);
        meta.put_num(&format!("row.{i}.t_end"), d.t_end);
        let optional = [
            ("classical_period", d.classical_period),
            ("peak_value", d.peak_value),
            ("contrast", d.contrast),
            ("max_norm_drift", d.max_norm_drift),
            ("energy_drift", d.energy_drift),
            ("max_edge_amplitude", d.max_edge_amplitude),
        ];
        for (key, value) in optional {
            if let Some(v) = value {
                meta.put_num(&format!("row.{i}.{key}"), v);
            }
        }
        meta.put(&format!("row.{i}.runtime_seconds"), format!("{:.3}", d.runtime_seconds));
        if let Some(m) = &d.message {
            meta.put(&format!("row.{i}.message"), m);
        }
    }
    print_rows(&rows);
    if rows.iter().all(|r| r.t_numeric.is_none()) {
        return Err(Error::Detection("no row produced a revival time".into()));
    }
    Ok(())
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.digits$}"))
}

fn print_rows(rows: &[SweepRow]) {
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>8} {:>8} {:>8}  status",
        "lambda", "T_num", "T_general", "T_simple", "r_num", "r_gen", "r_simple"
    );
    for r in rows {
        println!(
            "{:>6.3} {:>10} {:>10} {:>10} {:>8} {:>8} {:>8}  {}",
            r.lambda,
            opt(r.t_numeric, 1),
            opt(r.t_analytic_general, 1),
            opt(r.t_analytic_simple, 1),
            opt(r.ratio_numeric, 4),
            opt(r.ratio_analytic_general, 4),
            opt(r.ratio_analytic_simple, 4),
            r.status.as_str()
        );
    }
}

fn compare(dir: &Path, meta: &mut Meta) -> Result<()> {
    let path = dir.join("sweep.csv");
    let text = fs::read_to_string(&path)
        .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    let rows = analysis::read_sweep_csv(&text)?;
    let mut table = String::new();
    let _ = writeln!(
        table,
        "# lambda  ratio_numeric  ratio_general  ratio_simple  deficit_numeric  deficit_general  deficit_simple"
    );
    for r in &rows {
        let deficit = |v: Option<f64>| v.map(|x| 1.0 - x);
        let _ = writeln!(
            table,
            "{:>8.4}  {:>13}  {:>13}  {:>12}  {:>15}  {:>15}  {:>14}",
            r.lambda,
            opt(r.ratio_numeric, 6),
            opt(r.ratio_analytic_general, 6),
            opt(r.ratio_analytic_simple, 6),
            opt(deficit(r.ratio_numeric), 6),
            opt(deficit(r.ratio_analytic_general), 6),
            opt(deficit(r.ratio_analytic_simple), 6),
        );
    }
    let columns: [(&str, fn(&SweepRow) -> Option<f64>); 3] = [
        ("numeric", |r| r.ratio_numeric),
        ("general", |r| r.ratio_analytic_general),
        ("simple", |r| r.ratio_analytic_simple),
    ];
    for (name, column) in columns {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| column(r).map(|v| (r.lambda, v)))
            .collect();
        let mut dat = format!("# lambda ratio_{name}\n");
        for (l, v) in &points {
            let _ = writeln!(dat, "{} {}", fmt(*l), fmt(*v));
        }
        write_file(dir, &format!("curve_{name}.dat"), &dat)?;
        let squared: Vec<(f64, f64)> = points.iter().map(|(l, v)| (l * l, 1.0 - v)).collect();
        match analysis::fit_against_lambda_squared(&squared) {
            Ok(fit) => {
                let _ = writeln!(
                    table,
                    "# {name}: deficit = {:.6} lambda^2 + {:.2e}, r^2 = {:.6}",
                    fit.slope, fit.intercept, fit.r_squared
                );
                meta.put_num(&format!("fit.{name}.slope"), fit.slope);
                meta.put_num(&format!("fit.{name}.r_squared"), fit.r_squared);
            }
            Err(e) => {
                let _ = writeln!(table, "# {name}: {e}");
            }
        }
    }
    print!("{table}");
    write_file(dir, "compare.txt", &table)?;
    Ok(())
}
