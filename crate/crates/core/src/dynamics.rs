//! Numerical propagation.
//!
//! The Liouville equation `iρ̇ = Hρ − ρH†` for the non-Hermitian Hamiltonian
//! is integrated in the real variables `(ρ₁₁, ρ₂₂, x, y)` with
//! `ρ₁₂ = x + iy`, plus the accumulated sink population `η`:
//!
//! ```text
//!   ρ̇₁₁ = −V y
//!   ρ̇₂₂ =  V y − 2Γρ₂₂
//!   ẋ   =  δ y − Γ x
//!   ẏ   = −δ x − (V/2)(ρ₂₂ − ρ₁₁) − Γ y
//!   η̇   =  2Γρ₂₂
//! ```
//!
//! where `δ = ε + (g₁ − g₂)ξ(t)` is the instantaneous gap. Only the gap
//! enters, so collective noise (`g₁ = g₂`) leaves the step bit-identical to
//! the noiseless one. Classical RK4 preserves the linear invariant
//! `ρ₁₁ + ρ₂₂ + η` to rounding.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{complex_rabi, Complex, DensityMatrix2, SystemParams};
use crate::noise::{sample_trajectory, FluctuatorEnsemble, NoiseCouplings, NoiseTrajectory};
use crate::rng::sub_seed;

/// Steps per period of the fastest frequency for deterministic runs.
pub const DETERMINISTIC_STEPS_PER_PERIOD: f64 = 2000.0;
/// Steps per period for Monte Carlo runs.
pub const MONTE_CARLO_STEPS_PER_PERIOD: f64 = 200.0;
/// Longest default horizon, ps.
pub const MAX_DEFAULT_HORIZON: f64 = 200.0;

// Trajectories per reduction block. Fixed so the reduction tree, and hence
// every rounding, is independent of the thread count.
const BLOCK_SIZE: usize = 8;

/// Uniform grid `t_k = k·dt`, `k = 0..=n_steps`, recorded every `stride` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub n_steps: usize,
    pub stride: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
        }
        if n_steps == 0 {
            return Err(Error::invalid("n_steps", "must be at least 1"));
        }
        Ok(Self {
            dt,
            n_steps,
            stride: 1,
        })
    }

    /// Grid ending exactly at `t_max` with step at most `dt_max`.
    pub fn covering(t_max: f64, dt_max: f64) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::invalid("t_max", format!("must be positive, got {t_max}")));
        }
        if !(dt_max.is_finite() && dt_max > 0.0) {
            return Err(Error::invalid("dt", format!("must be positive, got {dt_max}")));
        }
        let n = ((t_max / dt_max) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Self::new(t_max / n as f64, n)
    }

    /// Records every `stride` steps; `stride` must divide `n_steps`.
    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        if stride == 0 || !self.n_steps.is_multiple_of(stride) {
            return Err(Error::invalid(
                "stride",
                format!("must divide n_steps = {}, got {stride}", self.n_steps),
            ));
        }
        self.stride = stride;
        Ok(self)
    }

    /// Smallest stride dividing `n_steps` that gives at most `max_records + 1` records.
    pub fn with_record_limit(self, max_records: usize) -> Self {
        let wanted = self.n_steps.div_ceil(max_records.max(1)).max(1);
        let stride = (wanted..=self.n_steps)
            .find(|&s| self.n_steps.is_multiple_of(s))
            .unwrap_or(self.n_steps);
        Self { stride, ..self }
    }

    pub fn t_max(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    pub fn n_records(&self) -> usize {
        self.n_steps / self.stride + 1
    }

    pub fn record_time(&self, k: usize) -> f64 {
        (k * self.stride) as f64 * self.dt
    }

    pub fn record_times(&self) -> Vec<f64> {
        (0..self.n_records()).map(|k| self.record_time(k)).collect()
    }

    /// `0.05·min(2π/|Ω|, 1/Γ)`: the largest step accepted for `params`.
    pub fn resolution_limit(params: &SystemParams) -> f64 {
        let omega = complex_rabi(params).omega.norm();
        let mut limit = f64::INFINITY;
        if omega > 0.0 {
            limit = limit.min(2.0 * PI / omega);
        }
        if params.gamma > 0.0 {
            limit = limit.min(1.0 / params.gamma);
        }
        0.05 * limit
    }

    pub fn check_resolution(&self, params: &SystemParams) -> Result<()> {
        let limit = Self::resolution_limit(params);
        if self.dt > limit {
            return Err(Error::StepSize { dt: self.dt, limit });
        }
        Ok(())
    }
}

/// Step giving `steps_per_period` steps per period of the fastest frequency
/// `√(V² + (|ε| + w)²) + Γ`, where `w` is an allowance for noise-driven gap
/// excursions.
pub fn default_dt(params: &SystemParams, noise_width: f64, steps_per_period: f64) -> f64 {
    let fastest = params.v.hypot(params.epsilon.abs() + noise_width.abs()) + params.gamma;
    if fastest > 0.0 {
        2.0 * PI / (fastest * steps_per_period)
    } else {
        1e-2
    }
}

/// `10/min(Γ, 𝓡₂)` over the positive candidates, capped at 200 ps.
pub fn default_horizon(gamma: f64, r2: Option<f64>) -> f64 {
    let slowest = [Some(gamma), r2]
        .into_iter()
        .flatten()
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min);
    if slowest.is_finite() {
        (10.0 / slowest).min(MAX_DEFAULT_HORIZON)
    } else {
        MAX_DEFAULT_HORIZON
    }
}

/// Solver output at the record times of `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub grid: TimeGrid,
    pub states: Vec<DensityMatrix2>,
    pub eta: Vec<f64>,
    /// Standard errors of `(ρ₁₁, ρ₂₂)` for ensemble averages.
    pub std_err: Option<Vec<[f64; 2]>>,
}

impl TimeSeries {
    pub fn new(grid: TimeGrid, states: Vec<DensityMatrix2>, eta: Vec<f64>) -> Self {
        Self {
            grid,
            states,
            eta,
            std_err: None,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.record_times()
    }

    pub fn last(&self) -> &DensityMatrix2 {
        self.states.last().expect("a time series has at least one record")
    }

    /// `max |1 − ρ₁₁ − ρ₂₂ − η|` over the records.
    pub fn max_conservation_error(&self) -> f64 {
        self.states
            .iter()
            .zip(&self.eta)
            .map(|(s, e)| (1.0 - s.trace() - e).abs())
            .fold(0.0, f64::max)
    }

    /// Positivity of the populations (to `1e−9`) and probability conservation (to `tol`).
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        for (k, s) in self.states.iter().enumerate() {
            if s.rho11 < -1e-9 || s.rho22 < -1e-9 || !s.trace().is_finite() {
                return Err(Error::Invariant(format!(
                    "populations ({}, {}) at record {k}",
                    s.rho11, s.rho22
                )));
            }
        }
        let err = self.max_conservation_error();
        if !(err <= tol) {
            return Err(Error::Invariant(format!(
                "probability conservation violated by {err:e} (tolerance {tol:e})"
            )));
        }
        Ok(())
    }

    /// Largest population difference against a series on the same records.
    pub fn max_population_diff(&self, other: &TimeSeries) -> Result<f64> {
        if self.times() != other.times() {
            return Err(Error::GridMismatch("series are recorded at different times".into()));
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| (a.rho11 - b.rho11).abs().max((a.rho22 - b.rho22).abs()))
            .fold(0.0, f64::max))
    }
}

type State = [f64; 5];

fn state_from(rho: &DensityMatrix2) -> State {
    [rho.rho11, rho.rho22, rho.rho12.re, rho.rho12.im, 0.0]
}

fn density_of(s: &State) -> DensityMatrix2 {
    DensityMatrix2::new(s[0], s[1], Complex::new(s[2], s[3]))
}

#[inline]
fn liouville_rhs(s: &State, delta: f64, v: f64, gamma: f64) -> State {
    let [r11, r22, x, y, _] = *s;
    [
        -v * y,
        v * y - 2.0 * gamma * r22,
        delta * y - gamma * x,
        -delta * x - 0.5 * v * (r22 - r11) - gamma * y,
        2.0 * gamma * r22,
    ]
}

#[inline]
fn axpy(s: &State, h: f64, k: &State) -> State {
    [
        s[0] + h * k[0],
        s[1] + h * k[1],
        s[2] + h * k[2],
        s[3] + h * k[3],
        s[4] + h * k[4],
    ]
}

#[inline]
fn rk4_step(s: &State, delta: f64, v: f64, gamma: f64, dt: f64) -> State {
    let k1 = liouville_rhs(s, delta, v, gamma);
    let k2 = liouville_rhs(&axpy(s, 0.5 * dt, &k1), delta, v, gamma);
    let k3 = liouville_rhs(&axpy(s, 0.5 * dt, &k2), delta, v, gamma);
    let k4 = liouville_rhs(&axpy(s, dt, &k3), delta, v, gamma);
    let w = dt / 6.0;
    let mut out = *s;
    for i in 0..5 {
        out[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    }
    out
}

// Runs `n_steps` steps of size `grid.dt`, each split into `substeps` pieces;
// `gap(k)` is the gap on sub-cell `k`. The initial η is taken as 0.
fn integrate_liouville<G: Fn(usize) -> f64>(
    params: &SystemParams,
    init: &DensityMatrix2,
    grid: &TimeGrid,
    substeps: usize,
    gap: G,
) -> TimeSeries {
    let h = grid.dt / substeps as f64;
    let mut s = state_from(init);
    let mut states = Vec::with_capacity(grid.n_records());
    let mut eta = Vec::with_capacity(grid.n_records());
    states.push(density_of(&s));
    eta.push(s[4]);
    for step in 0..grid.n_steps {
        for j in 0..substeps {
            s = rk4_step(&s, gap(step * substeps + j), params.v, params.gamma, h);
        }
        if (step + 1) % grid.stride == 0 {
            states.push(density_of(&s));
            eta.push(s[4]);
        }
    }
    TimeSeries::new(*grid, states, eta)
}

fn check_init(init: &DensityMatrix2) -> Result<()> {
    init.check_physical(1e-9)
        .map_err(|e| Error::invalid("init", e.to_string()))
}

/// Noise-free RK4 propagation of the Liouville equation. `η` starts at 0 and
/// accumulates `2Γ∫ρ₂₂`.
pub fn propagate_liouville(params: &SystemParams, init: &DensityMatrix2, grid: &TimeGrid) -> Result<TimeSeries> {
    params.validate()?;
    check_init(init)?;
    grid.check_resolution(params)?;
    let eps = params.epsilon;
    Ok(integrate_liouville(params, init, grid, 1, |_| eps))
}

/// Propagation with the gap shifted by `(g₁ − g₂)ξ(t)`, `ξ` held constant on
/// each trajectory cell. The trajectory step must divide `grid.dt`; finer
/// trajectories split each propagation step into sub-steps.
pub fn propagate_with_noise(
    params: &SystemParams,
    couplings: &NoiseCouplings,
    trajectory: &NoiseTrajectory,
    init: &DensityMatrix2,
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    params.validate()?;
    check_init(init)?;
    let ratio = grid.dt / trajectory.dt;
    let substeps = ratio.round();
    if !(substeps >= 1.0 && (ratio - substeps).abs() <= 1e-9 * ratio) {
        return Err(Error::GridMismatch(format!(
            "trajectory step {} does not divide the propagation step {}",
            trajectory.dt, grid.dt
        )));
    }
    let substeps = substeps as usize;
    let needed = grid.n_steps * substeps;
    if trajectory.len() < needed {
        return Err(Error::GridMismatch(format!(
            "trajectory has {} samples, propagation needs {needed}",
            trajectory.len()
        )));
    }
    let g = couplings.gap_coupling();
    let max_shift = trajectory.values[..needed].iter().fold(0.0f64, |m, x| m.max(x.abs())) * g.abs();
    let widest = SystemParams {
        epsilon: params.epsilon.abs() + max_shift,
        ..*params
    };
    grid.check_resolution(&widest)?;
    let eps = params.epsilon;
    let values = &trajectory.values;
    Ok(integrate_liouville(params, init, grid, substeps, |k| eps + g * values[k]))
}

// Running mean and sum of squared deviations per record, for
// (ρ₁₁, ρ₂₂, x, y, η).
#[derive(Debug, Clone)]
struct Moments {
    count: f64,
    mean: Vec<State>,
    m2: Vec<State>,
}

impl Moments {
    fn empty(records: usize) -> Self {
        Self {
            count: 0.0,
            mean: vec![[0.0; 5]; records],
            m2: vec![[0.0; 5]; records],
        }
    }

    fn push(&mut self, series: &TimeSeries) {
        self.count += 1.0;
        let n = self.count;
        for (k, (s, e)) in series.states.iter().zip(&series.eta).enumerate() {
            let x = [s.rho11, s.rho22, s.rho12.re, s.rho12.im, *e];
            for ((xi, mean), m2) in x.iter().zip(&mut self.mean[k]).zip(&mut self.m2[k]) {
                let d = xi - *mean;
                *mean += d / n;
                *m2 += d * (xi - *mean);
            }
        }
    }

    // Chan et al. pairwise combination.
    fn merge(&mut self, other: &Moments) {
        if other.count == 0.0 {
            return;
        }
        if self.count == 0.0 {
            *self = other.clone();
            return;
        }
        let n = self.count + other.count;
        for k in 0..self.mean.len() {
            for i in 0..5 {
                let d = other.mean[k][i] - self.mean[k][i];
                self.mean[k][i] += d * other.count / n;
                self.m2[k][i] += other.m2[k][i] + d * d * self.count * other.count / n;
            }
        }
        self.count = n;
    }
}

/// Seeded ensemble average of [`propagate_with_noise`] over `n_traj`
/// trajectories from a donor start.
///
/// Trajectory `i` uses the stream `sub_seed(seed, i)`. Trajectories are
/// reduced in fixed-size blocks that are merged in index order, so the
/// output is bit-identical for any number of worker threads. Standard
/// errors are the per-record sample SD over `√n_traj`.
pub fn monte_carlo_average(
    params: &SystemParams,
    couplings: &NoiseCouplings,
    ensemble: &FluctuatorEnsemble,
    n_traj: usize,
    grid: &TimeGrid,
    seed: u64,
) -> Result<TimeSeries> {
    params.validate()?;
    if n_traj < 2 {
        return Err(Error::invalid("n_trajectories", format!("need at least 2, got {n_traj}")));
    }
    let init = DensityMatrix2::donor();
    let records = grid.n_records();
    let n_blocks = n_traj.div_ceil(BLOCK_SIZE);
    let blocks: Vec<Moments> = (0..n_blocks)
        .into_par_iter()
        .map(|b| -> Result<Moments> {
            let mut m = Moments::empty(records);
            for i in b * BLOCK_SIZE..((b + 1) * BLOCK_SIZE).min(n_traj) {
                let traj = sample_trajectory(ensemble, grid.dt, grid.t_max(), sub_seed(seed, i as u64))?;
                let series = propagate_with_noise(params, couplings, &traj, &init, grid)?;
                m.push(&series);
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let mut total = Moments::empty(records);
    for b in &blocks {
        total.merge(b);
    }
    let n = total.count;
    let states = total.mean.iter().map(density_of).collect();
    let eta = total.mean.iter().map(|m| m[4]).collect();
    let std_err = total
        .m2
        .iter()
        .map(|m| [(m[0] / (n - 1.0) / n).sqrt(), (m[1] / (n - 1.0) / n).sqrt()])
        .collect();
    Ok(TimeSeries {
        grid: *grid,
        states,
        eta,
        std_err: Some(std_err),
    })
}

/// RK4 solution of the averaged rate system with a time-dependent rate,
/// donor start:
///
/// ```text
///   ρ̇₁₁ = −𝕽(t)(ρ₁₁ − ρ₂₂),   ρ̇₂₂ = 𝕽(t)(ρ₁₁ − ρ₂₂) − 2Γρ₂₂,   η̇ = 2Γρ₂₂.
/// ```
///
/// Coherences are not modelled and are reported as zero.
pub fn solve_averaged_master<F: Fn(f64) -> f64>(params: &SystemParams, rate_fn: F, grid: &TimeGrid) -> Result<TimeSeries> {
    params.validate()?;
    let g2 = 2.0 * params.gamma;
    let rhs = |s: &[f64; 3], r: f64| -> [f64; 3] {
        let flow = r * (s[0] - s[1]);
        [-flow, flow - g2 * s[1], g2 * s[1]]
    };
    let rate = |t: f64| -> Result<f64> {
        let r = rate_fn(t);
        if r.is_finite() {
            Ok(r)
        } else {
            Err(Error::Invariant(format!("rate function returned {r} at t = {t}")))
        }
    };
    let dt = grid.dt;
    let mut s = [1.0, 0.0, 0.0];
    let to_rho = |s: &[f64; 3]| DensityMatrix2::new(s[0], s[1], Complex::new(0.0, 0.0));
    let mut states = vec![to_rho(&s)];
    let mut eta = vec![0.0];
    let mut r0 = rate(0.0)?;
    for step in 0..grid.n_steps {
        let t = step as f64 * dt;
        let rm = rate(t + 0.5 * dt)?;
        let r1 = rate(t + dt)?;
        let k1 = rhs(&s, r0);
        let k2 = rhs(&[s[0] + 0.5 * dt * k1[0], s[1] + 0.5 * dt * k1[1], s[2] + 0.5 * dt * k1[2]], rm);
        let k3 = rhs(&[s[0] + 0.5 * dt * k2[0], s[1] + 0.5 * dt * k2[1], s[2] + 0.5 * dt * k2[2]], rm);
        let k4 = rhs(&[s[0] + dt * k3[0], s[1] + dt * k3[1], s[2] + dt * k3[2]], r1);
        for i in 0..3 {
            s[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
        r0 = r1;
        if (step + 1) % grid.stride == 0 {
            states.push(to_rho(&s));
            eta.push(s[2]);
        }
    }
    Ok(TimeSeries::new(*grid, states, eta))
}

/// `η(t) = 2Γ∫₀ᵗ ρ₂₂` by the cumulative trapezoidal rule over the records.
pub fn efficiency_numeric(series: &TimeSeries, gamma: f64) -> Vec<f64> {
    let times = series.times();
    let mut out = Vec::with_capacity(series.len());
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..series.len() {
        let h = times[k] - times[k - 1];
        acc += 0.5 * h * (series.states[k - 1].rho22 + series.states[k].rho22);
        out.push(2.0 * gamma * acc);
    }
    out
}

impl TimeSeries {
    /// Replaces the efficiency column with [`efficiency_numeric`].
    pub fn with_numeric_efficiency(mut self, gamma: f64) -> Self {
        self.eta = efficiency_numeric(&self, gamma);
        self
    }
}

/// Pairwise discrepancies between the three noisy-dynamics descriptions:
/// Monte Carlo average, averaged master equation with `𝕽(t)`, and the
/// constant-rate equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderReport {
    pub mc_vs_master: f64,
    pub master_vs_rate_eq: f64,
    pub mc_vs_rate_eq: f64,
    pub max_mc_std_err: f64,
}

pub fn ladder_report(mc: &TimeSeries, master: &TimeSeries, rate_eq: &TimeSeries) -> Result<LadderReport> {
    let max_mc_std_err = mc
        .std_err
        .as_ref()
        .map(|se| se.iter().flat_map(|s| s.iter().copied()).fold(0.0, f64::max))
        .unwrap_or(0.0);
    Ok(LadderReport {
        mc_vs_master: mc.max_population_diff(master)?,
        master_vs_rate_eq: master.max_population_diff(rate_eq)?,
        mc_vs_rate_eq: mc.max_population_diff(rate_eq)?,
        max_mc_std_err,
    })
}
