//! Split-operator integration of the driven bouncer
//!
//! ```text
//! i k̄ ∂ψ/∂t = [-(k̄²/2) ∂²/∂x² + x + V₀ e^(-κx) + λ x sin t] ψ
//! ```
//!
//! on a uniform periodic grid, recording the autocorrelation
//! `A(t) = <ψ(0)|ψ(t)>` along the way.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Norm drift above which a single step is considered unstable.
pub const STEP_NORM_TOLERANCE: f64 = 1e-6;

/// Steps between two full norm checks in [`evolve_and_record`].
pub const NORM_CHECK_INTERVAL: usize = 1000;

/// Block length used to factor the drive phase `e^{-i s x}`.
const PHASE_BLOCK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::config(format!(
                "grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 256 || !n_points.is_power_of_two() {
            return Err(Error::config(format!(
                "grid size must be a power of two >= 256, got {n_points}"
            )));
        }
        Ok(Grid {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Spectral wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * PI / self.length();
        (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                m * dk
            })
            .collect()
    }

    /// Largest wavenumber representable on the grid.
    pub fn k_max(&self) -> f64 {
        PI / self.dx()
    }
}

/// Modulation strength and static potential parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    pub lambda: f64,
    pub v0: f64,
    pub kappa: f64,
    pub kbar: f64,
}

impl DriveSpec {
    pub fn new(lambda: f64, v0: f64, kappa: f64, kbar: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::config(format!("lambda must be >= 0, got {lambda}")));
        }
        if !(v0 >= 0.0 && v0.is_finite()) {
            return Err(Error::config(format!("V0 must be >= 0, got {v0}")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::config(format!("kappa must be > 0, got {kappa}")));
        }
        if !(kbar > 0.0 && kbar.is_finite()) {
            return Err(Error::config(format!("kbar must be > 0, got {kbar}")));
        }
        Ok(DriveSpec {
            lambda,
            v0,
            kappa,
            kbar,
        })
    }

    pub fn undriven(&self) -> DriveSpec {
        DriveSpec {
            lambda: 0.0,
            ..*self
        }
    }

    /// Time-independent part `x + V₀ e^(-κx)`.
    pub fn static_potential(&self, x: f64) -> f64 {
        x + self.v0 * (-self.kappa * x).exp()
    }
}

/// Full potential `x + V₀e^(-κx) + λ x sin t`.
pub fn potential(x: f64, t: f64, drive: &DriveSpec) -> f64 {
    drive.static_potential(x) + drive.lambda * x * t.sin()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    pub grid: Grid,
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl WavePacket {
    /// `Σ|ψ_j|² dx`
    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn mean_position(&self) -> f64 {
        let dx = self.grid.dx();
        let s: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(j, c)| c.norm_sqr() * self.grid.x(j))
            .sum();
        s * dx / self.norm_sq()
    }

    /// `<self|other> = Σ conj(self_j) other_j dx`
    pub fn overlap(&self, other: &WavePacket) -> Complex64 {
        overlap(&self.amplitudes, &other.amplitudes, self.grid.dx())
    }

    /// Expectation of the undriven Hamiltonian `p²/2 + x + V₀e^(-κx)`.
    pub fn mean_energy(&self, drive: &DriveSpec) -> f64 {
        let n = self.grid.n_points;
        let mut buf = self.amplitudes.clone();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let ks = self.grid.wavenumbers();
        let (mut kin, mut total) = (0.0, 0.0);
        for (c, k) in buf.iter().zip(&ks) {
            let w = c.norm_sqr();
            kin += w * k * k;
            total += w;
        }
        let kinetic = 0.5 * drive.kbar * drive.kbar * kin / total;
        let dx = self.grid.dx();
        let pot: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(j, c)| c.norm_sqr() * drive.static_potential(self.grid.x(j)))
            .sum::<f64>()
            * dx;
        kinetic + pot / self.norm_sq()
    }

    /// Largest amplitude on the two outermost grid points.
    pub fn edge_amplitude(&self) -> f64 {
        let a = &self.amplitudes;
        a[0].norm().max(a[a.len() - 1].norm())
    }
}

fn overlap(a: &[Complex64], b: &[Complex64], dx: f64) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>() * dx
}

/// Normalized Gaussian `∝ exp(-(x-x0)²/(4σ²) + i p0 x / k̄)`.
pub fn init_gaussian(grid: Grid, x0: f64, sigma: f64, p0: f64, kbar: f64) -> Result<WavePacket> {
    if !(sigma > 2.0 * grid.dx()) {
        return Err(Error::config(format!(
            "packet width {sigma} is under-resolved (dx = {})",
            grid.dx()
        )));
    }
    if x0 < grid.x_min + 5.0 * sigma || x0 > grid.x_max - 5.0 * sigma {
        return Err(Error::config(format!(
            "packet center {x0} is within 5 sigma of the grid boundary [{}, {}]",
            grid.x_min, grid.x_max
        )));
    }
    if !(kbar > 0.0) {
        return Err(Error::config(format!("kbar must be > 0, got {kbar}")));
    }
    let mut amplitudes: Vec<Complex64> = (0..grid.n_points)
        .map(|j| {
            let x = grid.x(j);
            let u = x - x0;
            Complex64::from_polar((-u * u / (4.0 * sigma * sigma)).exp(), p0 * x / kbar)
        })
        .collect();
    let norm = (amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dx()).sqrt();
    for c in &mut amplitudes {
        *c /= norm;
    }
    Ok(WavePacket {
        grid,
        amplitudes,
        time: 0.0,
    })
}

/// Cached transforms and phase tables for repeated Strang steps at fixed `dt`.
pub struct Propagator {
    grid: Grid,
    dt: f64,
    drive: DriveSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    /// `e^{-i k̄ k² dt/2} / n`, one full kinetic step including FFT normalization.
    kinetic_full: Vec<Complex64>,
    /// `e^{-i k̄ k² dt/4} / n`
    kinetic_half: Vec<Complex64>,
    /// `e^{-i (x + V₀e^{-κx}) dt / k̄}`
    static_phase: Vec<Complex64>,
    coarse: Vec<Complex64>,
    fine: Vec<Complex64>,
}

impl Propagator {
    pub fn new(grid: Grid, dt: f64, drive: DriveSpec) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::config(format!("time step must be > 0, got {dt}")));
        }
        let n = grid.n_points;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        let inv_n = 1.0 / n as f64;
        let ks = grid.wavenumbers();
        let kinetic = |fraction: f64| -> Vec<Complex64> {
            ks.iter()
                .map(|k| Complex64::from_polar(inv_n, -drive.kbar * k * k * dt * fraction))
                .collect()
        };
        let static_phase = (0..n)
            .map(|j| Complex64::from_polar(1.0, -drive.static_potential(grid.x(j)) * dt / drive.kbar))
            .collect();
        Ok(Propagator {
            grid,
            dt,
            drive,
            forward,
            inverse,
            scratch: vec![Complex64::default(); scratch_len],
            kinetic_full: kinetic(0.5),
            kinetic_half: kinetic(0.25),
            static_phase,
            coarse: vec![Complex64::default(); n.div_ceil(PHASE_BLOCK)],
            fine: vec![Complex64::default(); PHASE_BLOCK.min(n)],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Advances `psi` (position representation) by `steps` Strang steps
    /// starting at time `t`. Interior half kinetic steps are fused.
    pub fn advance(&mut self, psi: &mut [Complex64], t: f64, steps: usize) {
        if steps == 0 {
            return;
        }
        self.kinetic(psi, true);
        for i in 0..steps {
            let t_mid = t + (i as f64 + 0.5) * self.dt;
            self.potential(psi, t_mid);
            self.kinetic(psi, i + 1 == steps);
        }
    }

    fn kinetic(&mut self, psi: &mut [Complex64], half: bool) {
        self.forward.process_with_scratch(psi, &mut self.scratch);
        let factors = if half {
            &self.kinetic_half
        } else {
            &self.kinetic_full
        };
        for (c, f) in psi.iter_mut().zip(factors) {
            *c *= f;
        }
        self.inverse.process_with_scratch(psi, &mut self.scratch);
    }

    fn potential(&mut self, psi: &mut [Complex64], t_mid: f64) {
        let s = self.drive.lambda * t_mid.sin() * self.dt / self.drive.kbar;
        if s == 0.0 {
            for (c, f) in psi.iter_mut().zip(&self.static_phase) {
                *c *= f;
            }
            return;
        }
        // e^{-i s x_j} = e^{-i s (x_min + b B dx)} · e^{-i s c dx}, j = bB + c;
        // both factors are evaluated directly so no phase error accumulates.
        let dx = self.grid.dx();
        let x_min = self.grid.x_min;
        for (b, z) in self.coarse.iter_mut().enumerate() {
            *z = Complex64::from_polar(1.0, -s * (x_min + (b * PHASE_BLOCK) as f64 * dx));
        }
        for (c, z) in self.fine.iter_mut().enumerate() {
            *z = Complex64::from_polar(1.0, -s * c as f64 * dx);
        }
        let block = self.fine.len();
        for ((chunk, stat), coarse) in psi
            .chunks_mut(block)
            .zip(self.static_phase.chunks(block))
            .zip(&self.coarse)
        {
            for ((c, f), fine) in chunk.iter_mut().zip(stat).zip(&self.fine) {
                *c *= f * (coarse * fine);
            }
        }
    }
}

/// One Strang step of length `dt` starting at `psi.time`.
pub fn step(psi: &WavePacket, dt: f64, drive: &DriveSpec) -> Result<WavePacket> {
    let mut prop = Propagator::new(psi.grid, dt, *drive)?;
    let mut out = psi.clone();
    let before = psi.norm_sq();
    prop.advance(&mut out.amplitudes, psi.time, 1);
    out.time = psi.time + dt;
    let drift = (out.norm_sq() - before).abs();
    if drift > STEP_NORM_TOLERANCE || !drift.is_finite() {
        return Err(Error::Unstable {
            time: out.time,
            drift,
            partial: Box::default(),
        });
    }
    Ok(out)
}

/// Sampled `A(t) = <ψ(0)|ψ(t)>` together with run diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AutocorrelationSeries {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub sample_interval: f64,
    /// False when the run stopped before `t_end`.
    pub complete: bool,
    /// Time step actually used (sample interval divided into whole steps).
    pub dt: f64,
    /// Largest `|‖ψ‖² − ‖ψ₀‖²|` seen at samples and norm checks.
    pub max_norm_drift: f64,
    /// Largest `|ψ|` on the outermost grid points at sample times.
    pub max_edge_amplitude: f64,
    /// `<H₀>` at t = 0 and at the last sample.
    pub energy_initial: f64,
    pub energy_final: f64,
}

impl AutocorrelationSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `|A(t)|²` at every sample.
    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn t_end(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Relative drift of `<H₀>` between first and last sample.
    pub fn energy_drift(&self) -> f64 {
        ((self.energy_final - self.energy_initial) / self.energy_initial).abs()
    }
}

/// Propagates a reference packet while sampling its autocorrelation.
///
/// Holds the reference `ψ(0)` separately from the current state so a run
/// can be resumed from a checkpoint.
pub struct Evolution {
    reference: WavePacket,
    state: WavePacket,
    drive: DriveSpec,
    propagator: Propagator,
    steps_per_sample: usize,
    norm0: f64,
    series: AutocorrelationSeries,
}

impl Evolution {
    pub fn new(psi0: WavePacket, dt: f64, sample_interval: f64, drive: DriveSpec) -> Result<Self> {
        let state = psi0.clone();
        Self::resume(psi0, state, dt, sample_interval, drive)
    }

    /// Continues from `state`, correlating against `reference`.
    pub fn resume(
        reference: WavePacket,
        state: WavePacket,
        dt: f64,
        sample_interval: f64,
        drive: DriveSpec,
    ) -> Result<Self> {
        if !(dt > 0.0) || !(sample_interval >= dt) {
            return Err(Error::config(format!(
                "need 0 < dt <= sample_interval, got dt = {dt}, sample_interval = {sample_interval}"
            )));
        }
        if reference.grid != state.grid {
            return Err(Error::config("reference and state live on different grids"));
        }
        let steps_per_sample = (sample_interval / dt - 1e-9).ceil().max(1.0) as usize;
        let dt = sample_interval / steps_per_sample as f64;
        let propagator = Propagator::new(state.grid, dt, drive)?;
        let norm0 = reference.norm_sq();
        let energy = state.mean_energy(&drive);
        let mut series = AutocorrelationSeries {
            sample_interval,
            dt,
            energy_initial: energy,
            energy_final: energy,
            ..Default::default()
        };
        series.times.push(state.time);
        series.values.push(reference.overlap(&state));
        series.max_edge_amplitude = state.edge_amplitude();
        series.max_norm_drift = (state.norm_sq() - norm0).abs();
        Ok(Evolution {
            reference,
            state,
            drive,
            propagator,
            steps_per_sample,
            norm0,
            series,
        })
    }

    pub fn state(&self) -> &WavePacket {
        &self.state
    }

    pub fn series(&self) -> &AutocorrelationSeries {
        &self.series
    }

    /// Runs until the state time reaches `t_end` (to within half a sample).
    pub fn run_until(&mut self, t_end: f64) -> Result<()> {
        let mut since_check = 0;
        while self.state.time + 0.5 * self.series.sample_interval < t_end {
            let steps = self.steps_per_sample;
            let t = self.state.time;
            self.propagator.advance(&mut self.state.amplitudes, t, steps);
            // time from the sample index avoids accumulating dt round-off
            let index = self.series.times.len();
            self.state.time = self.series.times[0] + index as f64 * self.series.sample_interval;
            since_check += steps;

            let drift = (self.state.norm_sq() - self.norm0).abs();
            self.series.max_norm_drift = self.series.max_norm_drift.max(drift);
            if since_check >= NORM_CHECK_INTERVAL {
                since_check = 0;
                if drift > STEP_NORM_TOLERANCE || !drift.is_finite() {
                    self.series.complete = false;
                    return Err(Error::Unstable {
                        time: self.state.time,
                        drift,
                        partial: Box::new(self.series.clone()),
                    });
                }
            }
            self.series.times.push(self.state.time);
            self.series
                .values
                .push(overlap(&self.reference.amplitudes, &self.state.amplitudes, self.state.grid.dx()));
            self.series.max_edge_amplitude =
                self.series.max_edge_amplitude.max(self.state.edge_amplitude());
        }
        self.series.energy_final = self.state.mean_energy(&self.drive);
        self.series.complete = true;
        Ok(())
    }

    pub fn into_series(self) -> AutocorrelationSeries {
        self.series
    }
}

/// Propagates `psi0` from its own time to `t_end` and records `A(t)` every
/// `sample_interval`. `dt` is shrunk if needed so a sample interval holds a
/// whole number of steps.
pub fn evolve_and_record(
    psi0: &WavePacket,
    t_end: f64,
    dt: f64,
    sample_interval: f64,
    drive: &DriveSpec,
) -> Result<AutocorrelationSeries> {
    if !(t_end > 0.0) {
        return Err(Error::config(format!("t_end must be > 0, got {t_end}")));
    }
    let mut evolution = Evolution::new(psi0.clone(), dt, sample_interval, *drive)?;
    evolution.run_until(t_end)?;
    Ok(evolution.into_series())
}

const CHECKPOINT_MAGIC: &[u8; 8] = b"RVLCKPT\0";
const CHECKPOINT_VERSION: u64 = 1;

/// Writes `(grid, amplitudes, time)` in the little-endian checkpoint layout:
/// magic, version, n_points, x_min, x_max, time (8 bytes each), then
/// interleaved re/im pairs.
pub fn write_checkpoint<W: Write>(psi: &WavePacket, mut out: W) -> Result<()> {
    out.write_all(CHECKPOINT_MAGIC)?;
    out.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    out.write_all(&(psi.grid.n_points as u64).to_le_bytes())?;
    out.write_all(&psi.grid.x_min.to_le_bytes())?;
    out.write_all(&psi.grid.x_max.to_le_bytes())?;
    out.write_all(&psi.time.to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * psi.amplitudes.len());
    for c in &psi.amplitudes {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut input: R) -> Result<WavePacket> {
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    if &word != CHECKPOINT_MAGIC {
        return Err(Error::config("not a checkpoint file (bad magic)"));
    }
    let next = |input: &mut R| -> Result<[u8; 8]> {
        let mut w = [0u8; 8];
        input.read_exact(&mut w)?;
        Ok(w)
    };
    let version = u64::from_le_bytes(next(&mut input)?);
    if version != CHECKPOINT_VERSION {
        return Err(Error::config(format!("unsupported checkpoint version {version}")));
    }
    let n_points = u64::from_le_bytes(next(&mut input)?) as usize;
    let x_min = f64::from_le_bytes(next(&mut input)?);
    let x_max = f64::from_le_bytes(next(&mut input)?);
    let time = f64::from_le_bytes(next(&mut input)?);
    let grid = Grid::new(x_min, x_max, n_points)?;
    let mut raw = vec![0u8; 16 * n_points];
    input.read_exact(&mut raw)?;
    let amplitudes = raw
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok(WavePacket {
        grid,
        amplitudes,
        time,
    })
}
