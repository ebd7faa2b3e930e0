//! Resonance-local quantities and the analytic revival-time formulas.
//!
//! Near the `N`-th nonlinear resonance (`E' ≈ k̄/N`) the secular dynamics
//! reduces to a Mathieu equation with
//!
//! ```text
//! a = 8ℰ/(N²E''),   q = 4λV/(N²E''),   ν = 2k/N,
//! ```
//!
//! so Floquet quasi-energies are `ℰ_k = (N²E''/8) a_ν(q)`. Expanding them to
//! second order in the level number gives the classical period
//! `T_cl = 2πk̄/E'` and the revival time `T = 4πk̄/ℰ''`, and the `O(q²)`
//! correction to `ℰ''` gives the driven revival time `T_λ`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mathieu::{self, Method};
use crate::spectrum::{SpectrumKind, SpectrumModel};

/// Relative distance of `μ²` from `N²/4` below which `T_λ` is undefined.
pub const SEPARATRIX_TOLERANCE: f64 = 1e-8;

/// Relative distance of `(1−α)²` from `a²` below which the bouncer formula
/// is undefined.
pub const BOUNCER_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceContext {
    /// Resonance order `N`.
    pub order: u32,
    /// Set when `1/Ω(E_r)` was exactly half-integer and the smaller `N` won.
    pub tie_broken: bool,
    /// Resonant level `r`, the level nearest to `E_r`.
    pub level: u64,
    /// Mean energy `E_r` of the packet.
    pub energy: f64,
    /// `E'` at level `r`.
    pub e1: f64,
    /// `E''` at level `r`.
    pub e2: f64,
    /// Coupling matrix element `V`.
    pub coupling: f64,
    pub kbar: f64,
    pub lambda: f64,
    /// Detuning `μ = (E' − k̄/N)/E''`.
    pub mu: f64,
    /// Mathieu parameter `q = 4λV/(N²E'')`.
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    General,
    Bouncer,
    BouncerSimple,
}

impl Formula {
    pub fn name(self) -> &'static str {
        match self {
            Formula::General => "general",
            Formula::Bouncer => "bouncer",
            Formula::BouncerSimple => "bouncer_simple",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalPrediction {
    /// Undriven revival time (magnitude).
    pub t0: f64,
    pub t_lambda: f64,
    pub ratio: f64,
    pub formula: Formula,
}

impl RevivalPrediction {
    fn from_deficit(t0: f64, deficit: f64, formula: Formula) -> Self {
        let ratio = 1.0 - deficit;
        RevivalPrediction {
            t0,
            t_lambda: t0 * ratio,
            ratio,
            formula,
        }
    }

    pub fn deficit(&self) -> f64 {
        1.0 - self.ratio
    }
}

/// Nearest resonance order `N = round(1/Ω(E_r))`; exact half-integers go to
/// the smaller `N`. Returns the order and whether a tie was broken.
pub fn select_resonance(model: &SpectrumModel, energy: f64) -> Result<(u32, bool)> {
    let inverse = 1.0 / model.angular_frequency(energy)?;
    let floor = inverse.floor();
    let tie = inverse - floor == 0.5;
    let n = if tie { floor } else { inverse.round() };
    if n < 1.0 {
        return Err(Error::NoResonance(n as i64));
    }
    Ok((n as u32, tie))
}

/// Energy `E_N` of the resonance center, where `Ω(E_N) = 1/N`.
pub fn resonance_center(model: &SpectrumModel, order: u32) -> Result<f64> {
    if order == 0 {
        return Err(Error::Domain("resonance order must be >= 1".into()));
    }
    let n = order as f64;
    match model.kind {
        SpectrumKind::NumericAction { v0, .. } if v0 > 0.0 => {
            let target = 1.0 / n;
            let (_, v_min) = model.potential_minimum();
            let span = 1.0_f64.max(v_min.abs());
            let lo = v_min + 0.1 * span;
            let f = |e: f64| model.angular_frequency(e).map(|w| w - target);
            let f_lo = f(lo)?;
            if f_lo < 0.0 {
                return Err(Error::Numeric(format!(
                    "no resonance of order {order}: orbit frequency never reaches 1/{order}"
                )));
            }
            let mut hi = (n * PI).powi(2) / 2.0 + v_min + span;
            let mut guard = 0;
            while f(hi)? > 0.0 {
                hi = v_min + 2.0 * (hi - v_min);
                guard += 1;
                if guard > 200 {
                    return Err(Error::Numeric(format!("cannot bracket resonance {order}")));
                }
            }
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if b - a <= 1e-13 * m.abs().max(1.0) {
                    break;
                }
                if f(m)? > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            Ok(0.5 * (a + b))
        }
        _ => Ok(n * n * PI * PI / 2.0),
    }
}

/// Coupling `V = −2E_m/(N²π²[1 − N/(6m)]²)` of the triangular well.
pub fn coupling(energy: f64, order: u32, level: f64) -> Result<f64> {
    let n = order as f64;
    if !(level > n / 6.0) {
        return Err(Error::Domain(format!(
            "coupling needs m > N/6, got m = {level}, N = {order}"
        )));
    }
    let c = 1.0 - n / (6.0 * level);
    Ok(-2.0 * energy / (n * n * PI * PI * c * c))
}

/// Large-`m` limit `V = −2E_N/(N²π²)`.
pub fn coupling_limit(center_energy: f64, order: u32) -> f64 {
    let n = order as f64;
    -2.0 * center_energy / (n * n * PI * PI)
}

/// Assembles every resonance-local quantity for a packet of mean energy
/// `energy` driven with strength `lambda`.
pub fn build_context(model: &SpectrumModel, energy: f64, lambda: f64) -> Result<ResonanceContext> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be >= 0, got {lambda}")));
    }
    let (order, tie_broken) = select_resonance(model, energy)?;
    let level = model.level_from_energy(energy)?.round().max(1.0);
    let (e1, e2) = model.derivatives(level)?;
    if e2 == 0.0 || !e2.is_finite() {
        return Err(Error::DegenerateSpectrum);
    }
    let center = resonance_center(model, order)?;
    let coupling = coupling_limit(center, order);
    let n = order as f64;
    Ok(ResonanceContext {
        order,
        tie_broken,
        level: level as u64,
        energy,
        e1,
        e2,
        coupling,
        kbar: model.kbar,
        lambda,
        mu: (e1 - model.kbar / n) / e2,
        q: 4.0 * lambda * coupling / (n * n * e2),
    })
}

impl ResonanceContext {
    /// Same context at a different modulation strength.
    pub fn with_lambda(&self, lambda: f64) -> ResonanceContext {
        let n = self.order as f64;
        ResonanceContext {
            lambda,
            q: 4.0 * lambda * self.coupling / (n * n * self.e2),
            ..*self
        }
    }

    /// `ν_n = (2/N)(n − r) + 2μ/N`.
    pub fn nu(&self, n: f64) -> f64 {
        let order = self.order as f64;
        2.0 * (n - self.level as f64) / order + 2.0 * self.mu / order
    }
}

/// `ℰ_k = (N²E''/8) a_ν(q)` with `ν = 2k/N`.
pub fn quasi_energy(ctx: &ResonanceContext, k: i64, method: Method) -> Result<f64> {
    let n = ctx.order as f64;
    let nu = 2.0 * k as f64 / n;
    let a = mathieu::char_value(nu, ctx.q, method)?.a;
    Ok(n * n * ctx.e2 / 8.0 * a)
}

/// Small-`q` quasi-energy of level `n` including the detuning,
/// `(N²E''/8)(ν_n² + q²/(2(ν_n² − 1)))`.
pub fn quasi_energy_series(ctx: &ResonanceContext, n: f64) -> Result<f64> {
    let order = ctx.order as f64;
    let a = mathieu::char_value_series(ctx.nu(n), ctx.q)?;
    Ok(order * order * ctx.e2 / 8.0 * a)
}

/// `T_cl = 2πk̄/E'`.
pub fn classical_period(ctx: &ResonanceContext) -> Result<f64> {
    if !(ctx.e1 > 0.0) {
        return Err(Error::Domain(format!("E' must be > 0, got {}", ctx.e1)));
    }
    Ok(2.0 * PI * ctx.kbar / ctx.e1)
}

/// `T₀ = 4πk̄/|E''|`.
pub fn t_zero(ctx: &ResonanceContext) -> Result<f64> {
    if ctx.e2 == 0.0 || !ctx.e2.is_finite() {
        return Err(Error::DegenerateSpectrum);
    }
    Ok(4.0 * PI * ctx.kbar / ctx.e2.abs())
}

/// `T_λ = T₀[1 − ½(λV/E'')²(3μ² + N²/4)/(μ² − N²/4)³]`.
pub fn revival_time_general(ctx: &ResonanceContext, lambda: f64) -> Result<RevivalPrediction> {
    let t0 = t_zero(ctx)?;
    let quarter_n_sq = (ctx.order as f64).powi(2) / 4.0;
    let mu_sq = ctx.mu * ctx.mu;
    let gap = mu_sq - quarter_n_sq;
    if gap.abs() <= SEPARATRIX_TOLERANCE * quarter_n_sq {
        return Err(Error::ResonanceSingularity(format!(
            "mu^2 = {mu_sq} is too close to N^2/4 = {quarter_n_sq}"
        )));
    }
    let strength = lambda * ctx.coupling / ctx.e2;
    let deficit = 0.5 * strength * strength * (3.0 * mu_sq + quarter_n_sq) / gap.powi(3);
    Ok(RevivalPrediction::from_deficit(t0, deficit, Formula::General))
}

/// Triangular-well `T₀ = 16E²/(πk̄)`.
fn bouncer_t0(energy: f64, kbar: f64) -> f64 {
    16.0 * energy * energy / (PI * kbar)
}

fn check_bouncer_inputs(energy: f64, center: f64, kbar: f64) -> Result<()> {
    if !(energy > 0.0 && center > 0.0 && kbar > 0.0) {
        return Err(Error::Domain(format!(
            "bouncer formula needs E_r, E_N, kbar > 0 (got {energy}, {center}, {kbar})"
        )));
    }
    Ok(())
}

/// `T_λ = T₀{1 − (1/8)(λ/E_r)²(3(1−α)² + a²)/[(1−α)² − a²]³}` with
/// `α = √(E_N/E_r)` and `a = α²k̄/(4E_r)`.
pub fn revival_time_bouncer(energy: f64, center: f64, lambda: f64, kbar: f64) -> Result<RevivalPrediction> {
    check_bouncer_inputs(energy, center, kbar)?;
    let alpha = (center / energy).sqrt();
    let shift = alpha * alpha * kbar / (4.0 * energy);
    let detune = (1.0 - alpha).powi(2);
    let gap = detune - shift * shift;
    if gap.abs() <= BOUNCER_TOLERANCE * detune.max(shift * shift) {
        return Err(Error::ResonanceSingularity(format!(
            "(1 - alpha)^2 = {detune} equals a^2 = {}",
            shift * shift
        )));
    }
    let x = lambda / energy;
    let deficit = x * x / 8.0 * (3.0 * detune + shift * shift) / gap.powi(3);
    Ok(RevivalPrediction::from_deficit(
        bouncer_t0(energy, kbar),
        deficit,
        Formula::Bouncer,
    ))
}

/// `T_λ = T₀[1 − (3/8)(λ/E_r)²/(1−α)⁴]`, the `E_r ≫ 1` limit of
/// [`revival_time_bouncer`].
pub fn revival_time_bouncer_simple(
    energy: f64,
    center: f64,
    lambda: f64,
    kbar: f64,
) -> Result<RevivalPrediction> {
    check_bouncer_inputs(energy, center, kbar)?;
    let alpha = (center / energy).sqrt();
    let detune = (1.0 - alpha).powi(2);
    if detune <= BOUNCER_TOLERANCE {
        return Err(Error::ResonanceSingularity(format!(
            "alpha = {alpha} sits on the resonance center"
        )));
    }
    let x = lambda / energy;
    let deficit = 0.375 * x * x / (detune * detune);
    Ok(RevivalPrediction::from_deficit(
        bouncer_t0(energy, kbar),
        deficit,
        Formula::BouncerSimple,
    ))
}

/// All three predictions for one context; formulas that hit a singularity
/// are reported as errors individually.
pub fn predict_all(
    model: &SpectrumModel,
    ctx: &ResonanceContext,
    lambda: f64,
) -> [(Formula, Result<RevivalPrediction>); 3] {
    let center = resonance_center(model, ctx.order);
    [
        (Formula::General, revival_time_general(ctx, lambda)),
        (
            Formula::Bouncer,
            center
                .as_ref()
                .map_err(clone_err)
                .and_then(|&c| revival_time_bouncer(ctx.energy, c, lambda, ctx.kbar)),
        ),
        (
            Formula::BouncerSimple,
            center.map_err(|e| clone_err(&e)).and_then(|c| {
                revival_time_bouncer_simple(ctx.energy, c, lambda, ctx.kbar)
            }),
        ),
    ]
}

fn clone_err(e: &Error) -> Error {
    Error::Numeric(e.to_string())
}
