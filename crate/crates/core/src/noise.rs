//! Spin-fluctuator noise.
//!
//! `ξ(t) = Σᵢ aᵢ sᵢ(t)` where each `sᵢ ∈ {−1, +1}` is a symmetric random
//! telegraph process flipping at rate `γᵢ`, so `⟨sᵢ(0)sᵢ(τ)⟩ = e^{−2γᵢτ}`.
//! With rates distributed as `P(γ) = A/γ` on `[γ_m, γ_c]`, `A = 1/ln(γ_c/γ_m)`,
//! and equal amplitudes `aᵢ = σ/√𝒩`, the ensemble-averaged correlation is
//!
//! ```text
//!   χ(τ) = σ²A [E1(2γ_m τ) − E1(2γ_c τ)],
//! ```
//!
//! and its cosine transform `S(ω) = (1/π)∫₀^∞ χ(τ) cos ωτ dτ` is
//!
//! ```text
//!   S(ω) = σ²A/(πω) [arctan(ω/2γ_m) − arctan(ω/2γ_c)],
//! ```
//!
//! white below `ω ≈ πγ_m`, `1/f`-like in the middle band and Lorentzian above
//! `ω ≈ 4(γ_c − γ_m)/π` (the crossings of the three asymptotes).

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rustfft::num_complex::Complex as FftComplex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::specfun::e1_difference;

/// Analytic description of the fluctuator band: rate bounds and total RMS amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluctuatorBand {
    pub gamma_m: f64,
    pub gamma_c: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpectralRegime {
    White,
    OneOverF,
    Lorentzian,
}

impl FluctuatorBand {
    pub fn new(gamma_m: f64, gamma_c: f64, sigma: f64) -> Result<Self> {
        if !(gamma_m.is_finite() && gamma_m > 0.0) {
            return Err(Error::invalid("gamma_m", format!("must be positive, got {gamma_m}")));
        }
        if !(gamma_c.is_finite() && gamma_c > gamma_m) {
            return Err(Error::invalid(
                "gamma_c",
                format!("must exceed gamma_m = {gamma_m}, got {gamma_c}"),
            ));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::invalid("sigma", format!("must be >= 0, got {sigma}")));
        }
        Ok(Self {
            gamma_m,
            gamma_c,
            sigma,
        })
    }

    /// `ln(γ_c/γ_m) = 1/A`.
    pub fn log_ratio(&self) -> f64 {
        (self.gamma_c / self.gamma_m).ln()
    }

    /// `χ(τ)`; `χ(0) = σ²`. Even in `τ`.
    pub fn correlation(&self, tau: f64) -> f64 {
        let tau = tau.abs();
        let s2 = self.sigma * self.sigma;
        if tau == 0.0 {
            return s2;
        }
        match e1_difference(2.0 * self.gamma_m * tau, 2.0 * self.gamma_c * tau) {
            Ok(d) => s2 * d / self.log_ratio(),
            // Only reachable for τ = ∞.
            Err(_) => 0.0,
        }
    }

    /// `S(ω)`; even in `ω`, with the white-noise plateau as the `ω = 0` value.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        let w = omega.abs();
        let s2 = self.sigma * self.sigma;
        let a = w / (2.0 * self.gamma_m);
        let b = w / (2.0 * self.gamma_c);
        // arctan a − arctan b = arctan((a − b)/(1 + ab)) since ab ≥ 0.
        let u = (a - b) / (1.0 + a * b);
        // arctan(u)/ω with u = ω·(1/2γ_m − 1/2γ_c)/(1 + ab).
        let ratio = if u < 1e-4 {
            let k = (0.5 / self.gamma_m - 0.5 / self.gamma_c) / (1.0 + a * b);
            k * (1.0 - u * u / 3.0)
        } else {
            u.atan() / w
        };
        s2 * ratio / (PI * self.log_ratio())
    }

    /// `S(0) = σ²(1 − γ_m/γ_c)/(2πγ_m ln(γ_c/γ_m))`.
    pub fn white_plateau(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        s2 * (1.0 - self.gamma_m / self.gamma_c) / (2.0 * PI * self.gamma_m * self.log_ratio())
    }

    /// `1/f` asymptote `σ²A/(2ω)`.
    pub fn one_over_f_asymptote(&self, omega: f64) -> f64 {
        self.sigma * self.sigma / (2.0 * omega.abs() * self.log_ratio())
    }

    /// Lorentzian tail `2σ²A(γ_c − γ_m)/(πω²)`.
    pub fn lorentzian_asymptote(&self, omega: f64) -> f64 {
        2.0 * self.sigma * self.sigma * (self.gamma_c - self.gamma_m) / (PI * omega * omega * self.log_ratio())
    }

    /// Asymptotic branch containing `ω` and its value. Branch boundaries are
    /// where neighbouring asymptotes cross: `πγ_m` (approximately) and
    /// `4(γ_c − γ_m)/π`.
    pub fn spectral_asymptotics(&self, omega: f64) -> (SpectralRegime, f64) {
        let w = omega.abs();
        let white_edge = PI * self.gamma_m / (1.0 - self.gamma_m / self.gamma_c);
        let lorentz_edge = 4.0 * (self.gamma_c - self.gamma_m) / PI;
        if w < white_edge {
            (SpectralRegime::White, self.white_plateau())
        } else if w > lorentz_edge {
            (SpectralRegime::Lorentzian, self.lorentzian_asymptote(w))
        } else {
            (SpectralRegime::OneOverF, self.one_over_f_asymptote(w))
        }
    }
}

/// A concrete set of `𝒩` fluctuators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctuatorEnsemble {
    pub n_fluctuators: usize,
    pub gamma_m: f64,
    pub gamma_c: f64,
    pub sigma: f64,
    pub rates: Vec<f64>,
    pub amplitude_per_fluctuator: f64,
}

impl FluctuatorEnsemble {
    /// Draws `n` switching rates log-uniformly on `[γ_m, γ_c]` (density ∝ 1/γ)
    /// and assigns each the amplitude `σ/√n`.
    pub fn build(n: usize, gamma_m: f64, gamma_c: f64, sigma: f64, seed: u64) -> Result<Self> {
        let band = FluctuatorBand::new(gamma_m, gamma_c, sigma)?;
        if n == 0 {
            return Err(Error::invalid("n_fluctuators", "must be at least 1"));
        }
        let mut rng = rng_from_seed(seed);
        let log_ratio = band.log_ratio();
        let rates = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                (gamma_m * (u * log_ratio).exp()).clamp(gamma_m, gamma_c)
            })
            .collect();
        Ok(Self {
            n_fluctuators: n,
            gamma_m,
            gamma_c,
            sigma,
            rates,
            amplitude_per_fluctuator: sigma / (n as f64).sqrt(),
        })
    }

    pub fn band(&self) -> FluctuatorBand {
        FluctuatorBand {
            gamma_m: self.gamma_m,
            gamma_c: self.gamma_c,
            sigma: self.sigma,
        }
    }

    /// Correlation of this particular realisation, `a² Σᵢ e^{−2γᵢτ}`.
    pub fn realised_correlation(&self, tau: f64) -> f64 {
        let a2 = self.amplitude_per_fluctuator * self.amplitude_per_fluctuator;
        a2 * self.rates.iter().map(|g| (-2.0 * g * tau.abs()).exp()).sum::<f64>()
    }
}

pub fn build_ensemble(n: usize, gamma_m: f64, gamma_c: f64, sigma: f64, seed: u64) -> Result<FluctuatorEnsemble> {
    FluctuatorEnsemble::build(n, gamma_m, gamma_c, sigma, seed)
}

pub fn correlation_analytic(ensemble: &FluctuatorEnsemble, tau: f64) -> f64 {
    ensemble.band().correlation(tau)
}

pub fn spectral_density(ensemble: &FluctuatorEnsemble, omega: f64) -> f64 {
    ensemble.band().spectral_density(omega)
}

pub fn spectral_asymptotics(ensemble: &FluctuatorEnsemble, omega: f64) -> (SpectralRegime, f64) {
    ensemble.band().spectral_asymptotics(omega)
}

/// Diagonal couplings `λ₁ = g₁ξ`, `λ₂ = g₂ξ`; only `D = |g₁ − g₂|` affects populations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseCouplings {
    pub g1: f64,
    pub g2: f64,
}

impl NoiseCouplings {
    pub fn new(g1: f64, g2: f64) -> Result<Self> {
        if !(g1.is_finite() && g2.is_finite()) {
            return Err(Error::invalid("couplings", format!("non-finite g1 = {g1}, g2 = {g2}")));
        }
        Ok(Self { g1, g2 })
    }

    /// Anti-correlated couplings `g₁ = −g₂ = D/2`.
    pub fn from_d(d: f64) -> Self {
        Self { g1: 0.5 * d, g2: -0.5 * d }
    }

    pub fn d(&self) -> f64 {
        (self.g1 - self.g2).abs()
    }

    /// Signed `g₁ − g₂`, the factor multiplying `ξ` in the gap.
    pub fn gap_coupling(&self) -> f64 {
        self.g1 - self.g2
    }
}

/// One realisation of `ξ` at `t_k = k·dt`, `k = 0, …, values.len() − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTrajectory {
    pub dt: f64,
    pub values: Vec<f64>,
    pub seed: u64,
}

impl NoiseTrajectory {
    pub fn zeros(dt: f64, len: usize) -> Self {
        Self {
            dt,
            values: vec![0.0; len],
            seed: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Samples `ξ` on `t_k = k·dt`, `k = 0, …, n` with `n = ⌈t_max/dt⌉`.
///
/// Each fluctuator starts in an equiprobable state (stationary start) and
/// switches after exponential waiting times of mean `1/γᵢ`; a switch at time
/// `s` shows from grid point `⌈s/dt⌉` on, so `values[k] = ξ(t_k)` exactly.
/// The sum of signs is accumulated in integers, so the only rounding is the
/// final multiplication by the amplitude.
pub fn sample_trajectory(ensemble: &FluctuatorEnsemble, dt: f64, t_max: f64, seed: u64) -> Result<NoiseTrajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
    }
    if !(t_max.is_finite() && t_max > dt) {
        return Err(Error::invalid("t_max", format!("must exceed dt = {dt}, got {t_max}")));
    }
    let n = ((t_max / dt) * (1.0 - 1e-12)).ceil() as usize;
    let horizon = n as f64 * dt;
    let mut rng = rng_from_seed(seed);
    let mut jumps = vec![0i64; n + 1];
    let mut initial: i64 = 0;
    for &gamma in &ensemble.rates {
        let mut sign: i64 = if rng.random::<bool>() { 1 } else { -1 };
        initial += sign;
        let mut t = 0.0;
        loop {
            let wait: f64 = Exp1.sample(&mut rng);
            t += wait / gamma;
            if t > horizon {
                break;
            }
            let k = ((t / dt).ceil() as usize).min(n);
            sign = -sign;
            jumps[k] += 2 * sign;
        }
    }
    let a = ensemble.amplitude_per_fluctuator;
    let mut total = initial;
    let values = jumps
        .iter()
        .map(|&j| {
            total += j;
            a * total as f64
        })
        .collect();
    Ok(NoiseTrajectory { dt, values, seed })
}

/// Lag-resolved correlation estimate with per-lag standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationEstimate {
    pub dt: f64,
    pub values: Vec<f64>,
    pub std_err: Vec<f64>,
}

impl CorrelationEstimate {
    pub fn tau(&self, lag: usize) -> f64 {
        lag as f64 * self.dt
    }
}

/// Estimates `⟨ξ(t)ξ(t+τ)⟩` for lags `0..=max_lag`.
///
/// Each trajectory contributes its unbiased lag average
/// `c(ℓ) = Σₖ ξₖξₖ₊ℓ / (n − ℓ)` (computed by FFT); the estimate is the mean
/// over trajectories and the standard error is their sample SD over `√n_traj`.
pub fn empirical_correlation(trajectories: &[NoiseTrajectory], max_lag: usize) -> Result<CorrelationEstimate> {
    if trajectories.len() < 2 {
        return Err(Error::invalid("trajectories", "need at least two"));
    }
    let first = &trajectories[0];
    let n = first.len();
    for (i, tr) in trajectories.iter().enumerate() {
        if tr.dt != first.dt || tr.len() != n {
            return Err(Error::GridMismatch(format!(
                "trajectory {i} has (dt = {}, len = {}), expected (dt = {}, len = {n})",
                tr.dt,
                tr.len(),
                first.dt
            )));
        }
    }
    if max_lag >= n {
        return Err(Error::invalid("max_lag", format!("must be below the trajectory length {n}")));
    }

    let size = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    let mut buffer = vec![FftComplex::new(0.0, 0.0); size];

    let lags = max_lag + 1;
    let mut mean = vec![0.0; lags];
    let mut m2 = vec![0.0; lags];
    for (count, tr) in trajectories.iter().enumerate() {
        for (b, &x) in buffer.iter_mut().zip(&tr.values) {
            *b = FftComplex::new(x, 0.0);
        }
        for b in buffer.iter_mut().skip(n) {
            *b = FftComplex::new(0.0, 0.0);
        }
        forward.process(&mut buffer);
        for b in buffer.iter_mut() {
            *b = FftComplex::new(b.norm_sqr(), 0.0);
        }
        inverse.process(&mut buffer);
        let k = (count + 1) as f64;
        for lag in 0..lags {
            let c = buffer[lag].re / (size as f64 * (n - lag) as f64);
            let delta = c - mean[lag];
            mean[lag] += delta / k;
            m2[lag] += delta * (c - mean[lag]);
        }
    }
    let n_traj = trajectories.len() as f64;
    let std_err = m2.iter().map(|&s| (s / (n_traj - 1.0) / n_traj).sqrt()).collect();
    Ok(CorrelationEstimate {
        dt: first.dt,
        values: mean,
        std_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_band() -> FluctuatorBand {
        FluctuatorBand::new(5e-5, 0.5, 1.0).unwrap()
    }

    #[test]
    fn correlation_at_zero_is_variance() {
        let b = FluctuatorBand::new(5e-5, 0.5, 1.7).unwrap();
        assert_eq!(b.correlation(0.0), 1.7 * 1.7);
        assert!((b.correlation(1e-12) - 1.7 * 1.7).abs() < 1e-9);
    }

    #[test]
    fn correlation_decreases() {
        let b = default_band();
        let mut prev = b.correlation(0.0);
        for k in 1..200 {
            let c = b.correlation(1e-3 * 1.1f64.powi(k));
            assert!(c < prev);
            prev = c;
        }
    }

    #[test]
    fn plateau_value() {
        let b = default_band();
        assert!((b.white_plateau() - 345.57).abs() < 0.01);
        assert!((b.spectral_density(0.0) / b.white_plateau() - 1.0).abs() < 1e-15);
        assert!((b.spectral_density(1e-9) / b.white_plateau() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn spectral_density_is_even_and_continuous_at_series_switch() {
        let b = default_band();
        assert_eq!(b.spectral_density(0.3), b.spectral_density(-0.3));
        // u = 1e-4 around ω ≈ 1e-8.
        let w = 1e-4 / (0.5 / b.gamma_m - 0.5 / b.gamma_c);
        let lo = b.spectral_density(w * (1.0 - 1e-9));
        let hi = b.spectral_density(w * (1.0 + 1e-9));
        assert!((lo / hi - 1.0).abs() < 1e-8);
    }

    #[test]
    fn asymptotic_branches() {
        let b = default_band();
        let (r, s) = b.spectral_asymptotics(2.0 * b.gamma_m / 100.0);
        assert_eq!(r, SpectralRegime::White);
        assert!((s / b.spectral_density(2.0 * b.gamma_m / 100.0) - 1.0).abs() < 0.01);
        let w = (4.0 * b.gamma_m * b.gamma_c).sqrt();
        let (r, s) = b.spectral_asymptotics(w);
        assert_eq!(r, SpectralRegime::OneOverF);
        assert!((s / b.spectral_density(w) - 1.0).abs() < 0.1);
        let w = 200.0 * b.gamma_c;
        let (r, s) = b.spectral_asymptotics(w);
        assert_eq!(r, SpectralRegime::Lorentzian);
        assert!((s / b.spectral_density(w) - 1.0).abs() < 0.02);
    }

    #[test]
    fn band_validation() {
        assert!(FluctuatorBand::new(0.5, 0.5, 1.0).is_err());
        assert!(FluctuatorBand::new(0.0, 0.5, 1.0).is_err());
        assert!(FluctuatorBand::new(1e-3, 0.5, -1.0).is_err());
        assert!(FluctuatorEnsemble::build(0, 1e-3, 0.5, 1.0, 1).is_err());
    }

    #[test]
    fn ensemble_normalisation() {
        let e = FluctuatorEnsemble::build(1000, 5e-5, 0.5, 2.0, 7).unwrap();
        assert_eq!(e.rates.len(), 1000);
        assert!(e.rates.iter().all(|&g| (5e-5..=0.5).contains(&g)));
        let total = e.n_fluctuators as f64 * e.amplitude_per_fluctuator.powi(2);
        assert!((total - 4.0).abs() < 1e-12);
        let single = FluctuatorEnsemble::build(1, 5e-5, 0.5, 2.0, 7).unwrap();
        assert_eq!(single.amplitude_per_fluctuator, 2.0);
        assert_eq!(e, FluctuatorEnsemble::build(1000, 5e-5, 0.5, 2.0, 7).unwrap());
    }

    #[test]
    fn trajectory_is_deterministic_and_on_lattice() {
        let e = FluctuatorEnsemble::build(50, 1e-2, 5.0, 1.0, 3).unwrap();
        let a = sample_trajectory(&e, 0.01, 5.0, 11).unwrap();
        let b = sample_trajectory(&e, 0.01, 5.0, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 501);
        // ξ/a is an integer with the parity of 𝒩.
        for &x in &a.values {
            let k = x / e.amplitude_per_fluctuator;
            assert!((k - k.round()).abs() < 1e-9);
            assert_eq!((k.round() as i64).rem_euclid(2), 0);
        }
        assert_ne!(a.values, sample_trajectory(&e, 0.01, 5.0, 12).unwrap().values);
    }

    #[test]
    fn empirical_correlation_validation_and_zero_input() {
        let z = vec![NoiseTrajectory::zeros(0.1, 64), NoiseTrajectory::zeros(0.1, 64)];
        let est = empirical_correlation(&z, 10).unwrap();
        assert!(est.values.iter().all(|&v| v == 0.0));
        assert!(est.std_err.iter().all(|&v| v == 0.0));
        assert!(empirical_correlation(&z[..1], 10).is_err());
        let mixed = vec![NoiseTrajectory::zeros(0.1, 64), NoiseTrajectory::zeros(0.2, 64)];
        assert!(matches!(empirical_correlation(&mixed, 10), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn empirical_correlation_matches_direct_sum() {
        let a = NoiseTrajectory {
            dt: 1.0,
            values: vec![1.0, -2.0, 0.5, 3.0, -1.0],
            seed: 0,
        };
        let b = NoiseTrajectory {
            dt: 1.0,
            values: vec![0.0, 1.0, 1.0, -1.0, 2.0],
            seed: 0,
        };
        let est = empirical_correlation(&[a.clone(), b.clone()], 3).unwrap();
        for lag in 0..=3 {
            let direct = |t: &NoiseTrajectory| {
                (0..5 - lag).map(|k| t.values[k] * t.values[k + lag]).sum::<f64>() / (5 - lag) as f64
            };
            let expect = 0.5 * (direct(&a) + direct(&b));
            assert!((est.values[lag] - expect).abs() < 1e-12);
        }
    }
}
