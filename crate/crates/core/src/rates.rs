//! Cumulant rate theory.
//!
//! To second order in `V` the averaged populations obey
//!
//! ```text
//!   d⟨ρ₁₁⟩/dt = −𝕽(t)(⟨ρ₁₁⟩ − ⟨ρ₂₂⟩)
//!   d⟨ρ₂₂⟩/dt = +𝕽(t)(⟨ρ₁₁⟩ − ⟨ρ₂₂⟩) − 2Γ⟨ρ₂₂⟩
//! ```
//!
//! with `𝕽(t) = (V²/2)∫₀ᵗ e^{−Γτ} cos(ετ) e^{−Θ(τ)} dτ` and
//! `Θ(t) = D²∫₀ᵗ(t − s)χ(s) ds` the Gaussian phase variance. Because
//! `Θ` depends only on `|τ|`, the integrand is even and this equals
//! `(V²/4)∫₋ₜᵗ …`.
//!
//! Two kernels are available: the stationary one built from the exact
//! `χ(τ)`, and the short-time Gaussian one `Θ = (Dστ)²/2` (`χ ≈ χ(0)`) that
//! leads to the closed-form Marcus-type rates.

use std::f64::consts::PI;

use crate::dynamics::{TimeGrid, TimeSeries};
use crate::error::{Error, Result};
use crate::model::{Complex, DensityMatrix2, SystemParams};
use crate::noise::{FluctuatorBand, NoiseCouplings};
use crate::quadrature::integrate;
use crate::specfun::{e1_difference, erfcx_complex};

// Envelope level below which the rest of the rate integral is dropped.
const TAIL_CUTOFF: f64 = 1e-17;

/// `h(x) = 1 − (1 + x)e^{−x}`, accurate for small `x`.
fn one_minus_poly_exp(x: f64) -> f64 {
    if x < 0.5 {
        // Σ_{k≥2} (−1)^k (k − 1) x^k / k!
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..40 {
            term *= x / k as f64;
            if k >= 2 {
                let c = if k % 2 == 0 { 1.0 } else { -1.0 } * (k - 1) as f64 * term;
                sum += c;
                if c.abs() < 1e-18 * sum.abs() {
                    break;
                }
            }
        }
        sum
    } else {
        1.0 - (1.0 + x) * (-x).exp()
    }
}

// Finite part of the antiderivative pieces: (1 − e^{−x})/x − h(x)/(2x²).
fn theta_regular_part(x: f64) -> f64 {
    if x == 0.0 {
        return 0.75;
    }
    -(-x).exp_m1() / x - one_minus_poly_exp(x) / (2.0 * x * x)
}

/// `Θ(t) = D²∫₀ᵗ(t − s)χ(s) ds` for the log-uniform fluctuator band.
///
/// Averaging `∫₀ᵗ(t − s)e^{−2γs}ds` over `P(γ) = A/γ` and substituting
/// `x = 2γt` gives `Θ = D²σ²A t² [g(2γ_m t) − g(2γ_c t)]` with
/// `g(x) = E1(x)/2 + (1 − e^{−x})/x − (1 − (1 + x)e^{−x})/(2x²)`.
pub fn theta(t: f64, d: f64, band: &FluctuatorBand) -> f64 {
    let t = t.abs();
    if t == 0.0 || d == 0.0 || band.sigma == 0.0 {
        return 0.0;
    }
    let xm = 2.0 * band.gamma_m * t;
    let xc = 2.0 * band.gamma_c * t;
    let e1_part = if xm.is_finite() && xm > 0.0 {
        0.5 * e1_difference(xm, xc).unwrap_or(0.0)
    } else {
        0.0
    };
    let bracket = e1_part + theta_regular_part(xm) - theta_regular_part(xc);
    let s = d * band.sigma * t;
    s * s * bracket / band.log_ratio()
}

/// Gaussian-kernel phase variance `(Dσt)²/2`.
pub fn theta_gaussian(t: f64, d_sigma: f64) -> f64 {
    let s = d_sigma * t;
    0.5 * s * s
}

/// `⟨e^{iκ(t)}⟩ ≈ e^{−Θ(t)}` (second-order cumulant).
pub fn generating_functional(t: f64, d: f64, band: &FluctuatorBand) -> f64 {
    (-theta(t, d, band)).exp()
}

/// Phase-variance kernel entering `𝕽(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// Exact stationary correlation of the fluctuator band.
    Stationary { band: FluctuatorBand, d: f64 },
    /// Short-time approximation `χ(τ) ≈ χ(0)` with amplitude `Dσ`.
    Gaussian { d_sigma: f64 },
}

impl Kernel {
    pub fn stationary(couplings: &NoiseCouplings, band: &FluctuatorBand) -> Self {
        Kernel::Stationary {
            band: *band,
            d: couplings.d(),
        }
    }

    pub fn theta(&self, t: f64) -> f64 {
        match self {
            Kernel::Stationary { band, d } => theta(t, *d, band),
            Kernel::Gaussian { d_sigma } => theta_gaussian(t, *d_sigma),
        }
    }

    fn d_sigma(&self) -> f64 {
        match self {
            Kernel::Stationary { band, d } => d * band.sigma,
            Kernel::Gaussian { d_sigma } => d_sigma.abs(),
        }
    }
}

// e^{−Γτ} cos(ετ) e^{−Θ(τ)} and its envelope.
fn rate_integrand(params: &SystemParams, kernel: &Kernel, tau: f64) -> f64 {
    (-params.gamma * tau - kernel.theta(tau)).exp() * (params.epsilon * tau).cos()
}

fn envelope(params: &SystemParams, kernel: &Kernel, tau: f64) -> f64 {
    (-params.gamma * tau - kernel.theta(tau)).exp()
}

// Panel length: a fraction of the fastest oscillation or decay scale.
fn panel_length(params: &SystemParams, kernel: &Kernel) -> f64 {
    let fastest = params.epsilon.abs().max(kernel.d_sigma()).max(params.gamma);
    if fastest > 0.0 {
        2.0 * PI / fastest
    } else {
        f64::INFINITY
    }
}

/// `∫_a^b e^{−Γτ}cos(ετ)e^{−Θ(τ)}dτ` on panels of the oscillation length,
/// stopping once the envelope makes the remainder negligible.
fn rate_integral(params: &SystemParams, kernel: &Kernel, a: f64, b: f64) -> Result<f64> {
    let panel = panel_length(params, kernel);
    let mut sum = 0.0;
    let mut x0 = a;
    while x0 < b {
        if envelope(params, kernel, x0) * (b - x0) < TAIL_CUTOFF {
            break;
        }
        let x1 = (x0 + panel).min(b);
        sum += integrate(|tau| rate_integrand(params, kernel, tau), x0, x1, 1e-13, 1e-13)?.value;
        x0 = x1;
    }
    Ok(sum)
}

/// `𝕽(t)` for an arbitrary kernel.
pub fn rate_r_of_t_kernel(params: &SystemParams, kernel: &Kernel, t: f64) -> Result<f64> {
    params.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    Ok(0.5 * params.v * params.v * rate_integral(params, kernel, 0.0, t)?)
}

/// Time-dependent transfer rate `𝕽(t)` with the exact stationary kernel.
pub fn rate_r_of_t(params: &SystemParams, couplings: &NoiseCouplings, band: &FluctuatorBand, t: f64) -> Result<f64> {
    rate_r_of_t_kernel(params, &Kernel::stationary(couplings, band), t)
}

/// `𝕽(t)` tabulated on a uniform grid and interpolated by cubic Hermite
/// segments using the exact derivative `(V²/2)e^{−Γt}cos(εt)e^{−Θ(t)}`.
#[derive(Debug, Clone)]
pub struct RateCurve {
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl RateCurve {
    pub fn tabulate(params: &SystemParams, kernel: &Kernel, t_max: f64, step: f64) -> Result<Self> {
        params.validate()?;
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::invalid("t_max", format!("must be positive, got {t_max}")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::invalid("step", format!("must be positive, got {step}")));
        }
        let n = (t_max / step).ceil() as usize;
        let pref = 0.5 * params.v * params.v;
        let mut values = Vec::with_capacity(n + 1);
        let mut slopes = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        let mut settled = false;
        for k in 0..=n {
            let t = k as f64 * step;
            if k > 0 && !settled {
                let t0 = (k - 1) as f64 * step;
                if envelope(params, kernel, t0) * step < TAIL_CUTOFF {
                    settled = true;
                } else {
                    acc += pref * rate_integral(params, kernel, t0, t)?;
                }
            }
            values.push(acc);
            slopes.push(if settled { 0.0 } else { pref * rate_integrand(params, kernel, t) });
        }
        Ok(Self { step, values, slopes })
    }

    /// Step that resolves the integrand: 1/32 of the shortest scale.
    pub fn default_step(params: &SystemParams, kernel: &Kernel) -> f64 {
        let p = panel_length(params, kernel);
        if p.is_finite() {
            p / 32.0
        } else {
            0.01
        }
    }

    pub fn t_max(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.step
    }

    /// Interpolated `𝕽(t)`; held constant beyond the tabulated range.
    pub fn eval(&self, t: f64) -> f64 {
        let last = self.values.len() - 1;
        if t <= 0.0 {
            return self.values[0];
        }
        let x = t / self.step;
        if x >= last as f64 {
            return self.values[last];
        }
        let k = x.floor() as usize;
        let s = x - k as f64;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k] * self.step, self.slopes[k + 1] * self.step);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1
    }
}

fn check_d_sigma(d: f64, sigma: f64, function: &'static str) -> Result<f64> {
    let ds = (d * sigma).abs();
    if !(ds > 0.0 && ds.is_finite()) {
        return Err(Error::Domain {
            function,
            detail: format!("D·σ must be positive and finite (division by zero), got {ds}"),
        });
    }
    Ok(ds)
}

/// Marcus-type asymptotic rate at `Γ = 0`: `(V²/4)√(2π)/(Dσ) · e^{−ε²/(2D²σ²)}`.
pub fn marcus_rate(v: f64, epsilon: f64, d: f64, sigma: f64) -> Result<f64> {
    let ds = check_d_sigma(d, sigma, "marcus_rate")?;
    let x = epsilon / ds;
    Ok(0.25 * v * v * (2.0 * PI).sqrt() / ds * (-0.5 * x * x).exp())
}

/// Marcus formula in reorganisation-energy form:
/// `|V₁₂|²√(π/(λkT)) · exp(−(E₁ − E₂)²/(4λkT))`.
pub fn marcus_rate_physical(v12: f64, e1_minus_e2: f64, lambda_reorg: f64, kt: f64) -> Result<f64> {
    let lkt = lambda_reorg * kt;
    if !(lambda_reorg > 0.0 && kt > 0.0 && lkt.is_finite()) {
        return Err(Error::Domain {
            function: "marcus_rate_physical",
            detail: format!("need lambda > 0 and kT > 0, got {lambda_reorg} and {kt}"),
        });
    }
    Ok(v12 * v12 * (PI / lkt).sqrt() * (-e1_minus_e2 * e1_minus_e2 / (4.0 * lkt)).exp())
}

/// Asymptotic rate with sink coupling, Gaussian kernel:
///
/// ```text
///   𝓡_Γ = (V²/2)∫₀^∞ e^{−Γτ} cos(ετ) e^{−(Dστ)²/2} dτ
///       = V²√(2π)/(8Dσ) · [erfcx(z) + erfcx(z̄)],   z = (Γ − iε)/(√2 Dσ),
/// ```
///
/// where `erfcx(z) = e^{z²}erfc(z)`. The imaginary parts of the pair cancel;
/// a residual above `1e−12` of the real part is reported as an invariant error.
pub fn marcus_rate_gamma(v: f64, epsilon: f64, d: f64, sigma: f64, gamma: f64) -> Result<f64> {
    let ds = check_d_sigma(d, sigma, "marcus_rate_gamma")?;
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::invalid("gamma", format!("must be >= 0, got {gamma}")));
    }
    let scale = 1.0 / (2.0f64.sqrt() * ds);
    let z = Complex::new(gamma * scale, -epsilon * scale);
    let pair = erfcx_complex(z)? + erfcx_complex(z.conj())?;
    if pair.im.abs() > 1e-12 * pair.re.abs() {
        return Err(Error::Invariant(format!(
            "erfc pair has imaginary residual {} against real part {}",
            pair.im, pair.re
        )));
    }
    Ok(v * v * (2.0 * PI).sqrt() / (8.0 * ds) * pair.re)
}

/// Decay rates of the constant-rate system, `𝓡₁,₂ = 𝓡_Γ + Γ ± √(𝓡_Γ² + Γ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub r_gamma: f64,
    pub r1: f64,
    pub r2: f64,
}

pub fn rate_eigenvalues(r_gamma: f64, gamma: f64) -> Result<RatePair> {
    check_rates(r_gamma, gamma)?;
    let s = r_gamma.hypot(gamma);
    let r1 = r_gamma + gamma + s;
    // Vieta: r1·r2 = 2𝓡_ΓΓ, avoiding the cancellation in r_gamma + gamma − s.
    let r2 = if r1 > 0.0 { 2.0 * r_gamma * gamma / r1 } else { 0.0 };
    Ok(RatePair { r_gamma, r1, r2 })
}

fn check_rates(r_gamma: f64, gamma: f64) -> Result<()> {
    if !(r_gamma.is_finite() && r_gamma >= 0.0) {
        return Err(Error::invalid("r_gamma", format!("must be >= 0, got {r_gamma}")));
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::invalid("gamma", format!("must be >= 0, got {gamma}")));
    }
    Ok(())
}

/// Exact solution of the constant-rate system from a donor start:
///
/// ```text
///   ρ₁₁ = (s − Γ)/(2s) e^{−𝓡₁t} + (1/2 + Γ/(2s)) e^{−𝓡₂t}
///   ρ₂₂ = 𝓡_Γ/(2s) (e^{−𝓡₂t} − e^{−𝓡₁t}),         s = √(𝓡_Γ² + Γ²)
/// ```
pub fn populations_rate_eq(r_gamma: f64, gamma: f64, t: f64) -> Result<(f64, f64)> {
    let pair = rate_eigenvalues(r_gamma, gamma)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    let s = r_gamma.hypot(gamma);
    if s == 0.0 {
        return Ok((1.0, 0.0));
    }
    let e1 = (-pair.r1 * t).exp();
    let e2 = (-pair.r2 * t).exp();
    // s − Γ = 𝓡_Γ²/(s + Γ)
    let rho11 = r_gamma * r_gamma / (s + gamma) / (2.0 * s) * e1 + (0.5 + gamma / (2.0 * s)) * e2;
    let rho22 = r_gamma / (2.0 * s) * e2 * (-(-(pair.r1 - pair.r2) * t).exp_m1());
    Ok((rho11, rho22))
}

/// `η = 1 − (1 + k)/2 · e^{−𝓡₂t} − (1 − k)/2 · e^{−𝓡₁t}`, `k = (𝓡_Γ + Γ)/s`.
pub fn efficiency_noise(r_gamma: f64, gamma: f64, t: f64) -> Result<f64> {
    let pair = rate_eigenvalues(r_gamma, gamma)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    let s = r_gamma.hypot(gamma);
    if s == 0.0 {
        return Ok(0.0);
    }
    let k = (r_gamma + gamma) / s;
    // 1 − e^{−𝓡₂t} − (k − 1)/2·(e^{−𝓡₂t} − e^{−𝓡₁t}), kept accurate at small t.
    let one_minus_e2 = -(-pair.r2 * t).exp_m1();
    let diff = (-pair.r2 * t).exp() * (-(-(pair.r1 - pair.r2) * t).exp_m1());
    Ok((one_minus_e2 - 0.5 * (k - 1.0) * diff).clamp(0.0, 1.0))
}

/// Large-time form `1 − 𝓡₁/(𝓡₁ − 𝓡₂) · e^{−𝓡₂t}`.
pub fn efficiency_noise_asymptotic(r_gamma: f64, gamma: f64, t: f64) -> Result<f64> {
    let pair = rate_eigenvalues(r_gamma, gamma)?;
    if pair.r1 == pair.r2 {
        return Ok(0.0);
    }
    Ok(1.0 - pair.r1 / (pair.r1 - pair.r2) * (-pair.r2 * t).exp())
}

/// `Γ = 0`, collective noise (`g₁ = g₂`), to second order in `V`:
/// `ρ₁₁ = 1/2 + (1/2)exp(−2(V²/ε²) sin²(εt/2))`, `ρ₂₂ = 1 − ρ₁₁`.
pub fn populations_gamma0_collective(params: &SystemParams, couplings: &NoiseCouplings, t: f64) -> Result<(f64, f64)> {
    params.validate()?;
    if params.epsilon == 0.0 {
        return Err(Error::Domain {
            function: "populations_gamma0_collective",
            detail: "requires epsilon != 0".into(),
        });
    }
    if params.gamma != 0.0 {
        return Err(Error::Domain {
            function: "populations_gamma0_collective",
            detail: format!("requires gamma = 0, got {}", params.gamma),
        });
    }
    if couplings.g1 != couplings.g2 {
        return Err(Error::Domain {
            function: "populations_gamma0_collective",
            detail: format!("requires g1 = g2, got {} and {}", couplings.g1, couplings.g2),
        });
    }
    let x = params.v / params.epsilon;
    let s = (0.5 * params.epsilon * t).sin();
    let rho11 = 0.5 + 0.5 * (-2.0 * x * x * s * s).exp();
    Ok((rho11, 1.0 - rho11))
}

/// Rate-equation populations and efficiency sampled on the record times of `grid`.
pub fn rate_equation_series(r_gamma: f64, gamma: f64, grid: &TimeGrid) -> Result<TimeSeries> {
    let times = grid.record_times();
    let mut states = Vec::with_capacity(times.len());
    let mut eta = Vec::with_capacity(times.len());
    for &t in &times {
        let (r11, r22) = populations_rate_eq(r_gamma, gamma, t)?;
        states.push(DensityMatrix2::new(r11, r22, Complex::new(0.0, 0.0)));
        eta.push(efficiency_noise(r_gamma, gamma, t)?);
    }
    Ok(TimeSeries::new(*grid, states, eta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn band() -> FluctuatorBand {
        FluctuatorBand::new(5e-5, 0.5, 1.0).unwrap()
    }

    #[test]
    fn theta_limits() {
        let b = band();
        assert_eq!(theta(0.0, 60.0, &b), 0.0);
        assert_eq!(theta(3.0, 0.0, &b), 0.0);
        // Short times: (Dσt)²/2.
        let t = 1e-4;
        let ratio = theta(t, 2.0, &b) / theta_gaussian(t, 2.0);
        assert!((ratio - 1.0).abs() < 1e-4);
    }

    #[test]
    fn theta_is_nondecreasing() {
        let b = band();
        let mut prev = 0.0;
        for k in 1..400 {
            let th = theta(1e-3 * 1.05f64.powi(k), 1.0, &b);
            assert!(th >= prev);
            prev = th;
        }
    }

    #[test]
    fn small_x_series_matches_direct() {
        for &x in &[0.3f64, 0.49] {
            let direct = 1.0 - (1.0 + x) * (-x).exp();
            assert!((one_minus_poly_exp(x) - direct).abs() < 1e-16);
        }
        assert!((one_minus_poly_exp(1e-8) - 0.5e-16).abs() < 1e-24);
    }

    #[test]
    fn marcus_example_and_errors() {
        let r = marcus_rate(20.0, 60.0, 1.0, 60.0).unwrap();
        let expected = 100.0 * (2.0 * PI).sqrt() / 60.0 * (-0.5f64).exp();
        assert!((r - expected).abs() < 1e-12);
        assert!((r - 2.534).abs() < 1e-3);
        assert!(marcus_rate(20.0, 60.0, 0.0, 60.0).is_err());
        assert!(marcus_rate_gamma(20.0, 60.0, 1.0, 0.0, 1.0).is_err());
        assert_eq!(marcus_rate(20.0, 60.0, 1.0, 60.0).unwrap(), marcus_rate(20.0, -60.0, 1.0, 60.0).unwrap());
    }

    #[test]
    fn marcus_gamma_reduces_at_zero_gamma() {
        for &(e, ds) in &[(60.0, 60.0), (0.0, 30.0), (100.0, 15.0), (-40.0, 120.0)] {
            let a = marcus_rate_gamma(20.0, e, 1.0, ds, 0.0).unwrap();
            let b = marcus_rate(20.0, e, 1.0, ds).unwrap();
            assert!((a - b).abs() <= 1e-10 * b.max(1e-300), "ε={e} Dσ={ds}: {a} vs {b}");
        }
    }

    #[test]
    fn physical_form_is_a_reparameterisation() {
        let (v, e, d, sigma) = (20.0, 60.0, 3.0, 20.0);
        let p0 = 2.5;
        let kt = sigma * sigma / p0;
        let lambda = d * d * p0 / 2.0;
        let a = marcus_rate_physical(v / 2.0, e, lambda, kt).unwrap();
        let b = marcus_rate(v, e, d, sigma).unwrap();
        assert!((a / b - 1.0).abs() < 1e-12);
        assert!(marcus_rate_physical(1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn eigenvalues() {
        let p = rate_eigenvalues(0.0, 3.0).unwrap();
        assert_eq!((p.r1, p.r2), (6.0, 0.0));
        let p = rate_eigenvalues(2.0, 2.0).unwrap();
        assert!((p.r1 - 2.0 * (2.0 + 2f64.sqrt())).abs() < 1e-14);
        assert!((p.r2 - 2.0 * (2.0 - 2f64.sqrt())).abs() < 1e-14);
        let p = rate_eigenvalues(2.5186, 1.0).unwrap();
        assert!((p.r1 * p.r2 - 2.0 * 2.5186).abs() < 1e-13);
        assert!((p.r1 + p.r2 - 2.0 * 3.5186).abs() < 1e-13);
        assert!(rate_eigenvalues(-1.0, 1.0).is_err());
    }

    #[test]
    fn rate_populations_boundaries() {
        assert_eq!(populations_rate_eq(2.0, 1.0, 0.0).unwrap(), (1.0, 0.0));
        assert_eq!(efficiency_noise(2.0, 1.0, 0.0).unwrap(), 0.0);
        let (a, b) = populations_rate_eq(2.0, 0.0, 50.0).unwrap();
        assert!((a - 0.5).abs() < 1e-12 && (b - 0.5).abs() < 1e-12);
        assert_eq!(populations_rate_eq(0.0, 0.0, 5.0).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn collective_closed_form_example() {
        let p = SystemParams::new(60.0, 20.0, 0.0).unwrap();
        let c = NoiseCouplings::new(1.0, 1.0).unwrap();
        let t = PI / 60.0;
        let (r11, r22) = populations_gamma0_collective(&p, &c, t).unwrap();
        assert!((r11 - (0.5 + 0.5 * (-2.0f64 / 9.0).exp())).abs() < 1e-15);
        assert!((r11 - 0.90037).abs() < 1e-5);
        assert!((r11 + r22 - 1.0).abs() < 1e-15);
        assert_eq!(populations_gamma0_collective(&p, &c, 0.0).unwrap(), (1.0, 0.0));
        let flat = SystemParams::new(0.0, 20.0, 0.0).unwrap();
        assert!(populations_gamma0_collective(&flat, &c, t).is_err());
        assert!(populations_gamma0_collective(&p, &NoiseCouplings::new(1.0, 0.0).unwrap(), t).is_err());
    }

    #[test]
    fn rate_curve_interpolates_direct_values() {
        let p = SystemParams::new(60.0, 20.0, 1.0).unwrap();
        let kernel = Kernel::Stationary { band: band(), d: 60.0 };
        let curve = RateCurve::tabulate(&p, &kernel, 1.0, RateCurve::default_step(&p, &kernel)).unwrap();
        for &t in &[0.013, 0.05, 0.0777, 0.4] {
            let direct = rate_r_of_t(&p, &NoiseCouplings::from_d(60.0), &band(), t).unwrap();
            assert!((curve.eval(t) - direct).abs() < 1e-6 * direct.abs().max(1.0), "t={t}");
        }
        assert_eq!(curve.eval(0.0), 0.0);
    }
}
