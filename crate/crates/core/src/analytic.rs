//! Closed-form noise-free dynamics.
//!
//! With the mean energy removed the effective Hamiltonian is
//! `M = ½[[ε+iΓ, V], [V, −(ε+iΓ)]] − (iΓ/2)·1`, and `M₀² = (Ω/2)²·1`, so
//!
//! ```text
//!   e^{−iHt} ∝ e^{−Γt/2} [ cos(Ωt/2) − i (2 sin(Ωt/2)/Ω) M₀ ].
//! ```
//!
//! Every expression here is even in `Ω`, which makes the choice of square-root
//! branch irrelevant. Near the exceptional point (`Ω → 0`) the removable
//! singularities are handled with `sin(x)/x`-type helpers; large `Ω₂t` is
//! handled by grouping `e^{−Γt}` with the growing hyperbolic terms, which is
//! always bounded because `|Ω₂| ≤ Γ`.

use crate::dynamics::{TimeGrid, TimeSeries};
use crate::error::{Error, Result};
use crate::model::{
    classify_regime, complex_rabi, Complex, DensityMatrix2, RabiDecomposition, Regime, SystemParams,
};
use crate::specfun::{sinc, sinc_complex, sinhc};

/// Below `|Ω|²/scale²` of this, the efficiency is taken from the populations
/// instead of the closed form with its `1/|Ω|²` prefactor.
const EP_ROUTING: f64 = 1e-4;

/// Initial state amplitudes, `ρ(0) = ψψ†` with `ψ = (c1, c2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialAmplitudes {
    pub c1: Complex,
    pub c2: Complex,
}

impl InitialAmplitudes {
    pub fn new(c1: Complex, c2: Complex) -> Result<Self> {
        let norm = c1.norm_sqr() + c2.norm_sqr();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(Error::invalid(
                "initial amplitudes",
                format!("|c1|² + |c2|² = {norm}, expected 1"),
            ));
        }
        Ok(Self { c1, c2 })
    }

    pub fn donor() -> Self {
        Self {
            c1: Complex::new(1.0, 0.0),
            c2: Complex::new(0.0, 0.0),
        }
    }

    pub fn acceptor() -> Self {
        Self {
            c1: Complex::new(0.0, 0.0),
            c2: Complex::new(1.0, 0.0),
        }
    }

    pub fn density(&self) -> DensityMatrix2 {
        DensityMatrix2::from_amplitudes(self.c1, self.c2)
    }

    fn is_donor(&self) -> bool {
        self.c2 == Complex::new(0.0, 0.0)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("t", format!("must be finite and >= 0, got {t}")))
    }
}

fn check_flat(params: &SystemParams, function: &'static str) -> Result<()> {
    if params.is_flat() {
        Ok(())
    } else {
        Err(Error::Domain {
            function,
            detail: format!("requires a flat potential (epsilon = 0), got {}", params.epsilon),
        })
    }
}

// e^{−Γt/2}·cos(Ωt/2) and e^{−Γt/2}·sin(Ωt/2)/Ω.
fn damped_cos_sin(gamma: f64, omega: Complex, t: f64) -> (Complex, Complex) {
    let half = 0.5 * t;
    let z = omega * half;
    let damp = -gamma * half;
    if z.norm() < 1.0 {
        let d = damp.exp();
        (z.cos() * d, sinc_complex(z) * (half * d))
    } else {
        let iz = Complex::i() * z;
        let ep = (iz + damp).exp();
        let em = (-iz + damp).exp();
        ((ep + em) * 0.5, (ep - em) / (2.0 * Complex::i() * omega))
    }
}

/// Density matrix at time `t` from arbitrary initial amplitudes.
pub fn rho_closed_form(params: &SystemParams, init: &InitialAmplitudes, t: f64) -> Result<DensityMatrix2> {
    params.validate()?;
    check_time(t)?;
    Ok(rho_on_branch(params, &complex_rabi(params), init, t))
}

/// As [`rho_closed_form`] with an explicit choice of `Ω` (either root).
pub fn rho_on_branch(
    params: &SystemParams,
    rabi: &RabiDecomposition,
    init: &InitialAmplitudes,
    t: f64,
) -> DensityMatrix2 {
    let (c, s) = damped_cos_sin(params.gamma, rabi.omega, t);
    let i = Complex::i();
    let a = Complex::new(params.epsilon, params.gamma) * s;
    let b = s * params.v;
    let psi1 = (c - i * a) * init.c1 - i * b * init.c2;
    let psi2 = (c + i * a) * init.c2 - i * b * init.c1;
    DensityMatrix2::from_amplitudes(psi1, psi2)
}

/// Acceptor population for a donor start,
/// `ρ₂₂ = V² e^{−Γt} (cosh Ω₂t − cos Ω₁t) / (2(Ω₁² + Ω₂²))`.
pub fn rho22_spectral_form(params: &SystemParams, t: f64) -> Result<f64> {
    params.validate()?;
    check_time(t)?;
    Ok(rho22_spectral_on_branch(params, &complex_rabi(params), t))
}

pub fn rho22_spectral_on_branch(params: &SystemParams, rabi: &RabiDecomposition, t: f64) -> f64 {
    let g = params.gamma;
    let v2 = params.v * params.v;
    let w1 = rabi.omega1.abs();
    let w2 = rabi.omega2.abs();
    let m2 = w1 * w1 + w2 * w2;
    if m2.sqrt() * t < 1e-3 {
        return v2 * (-g * t).exp() * 0.25 * t * t * (1.0 + (w2 * w2 - w1 * w1) * t * t / 12.0);
    }
    // cosh x − cos y = 2 sinh²(x/2) + 2 sin²(y/2), and
    // e^{−Γt} sinh²(Ω₂t/2) = ((1 − e^{−Ω₂t})/2)² e^{(Ω₂−Γ)t}.
    let sh = -0.5 * (-w2 * t).exp_m1();
    let hyper = sh * sh * ((w2 - g) * t).exp();
    let trig = (0.5 * w1 * t).sin().powi(2) * (-g * t).exp();
    v2 * (hyper + trig) / m2
}

/// Transfer efficiency `η(t) = 2Γ∫₀ᵗ ρ₂₂` for a donor start:
///
/// ```text
///   1 − η = e^{−Γt} / (Γ(Ω₁² + Ω₂²)) · [ (Γ² + Ω₁²)(Γ cosh Ω₂t + Ω₂ sinh Ω₂t)
///                                       − (Γ² − Ω₂²)(Γ cos Ω₁t − Ω₁ sin Ω₁t) ]
/// ```
///
/// Returns 0 for `Γ = 0`. Clamped to `[0, 1]` against rounding.
pub fn efficiency_closed_form(params: &SystemParams, t: f64) -> Result<f64> {
    params.validate()?;
    check_time(t)?;
    Ok(efficiency_on_branch(params, &complex_rabi(params), t))
}

pub fn efficiency_on_branch(params: &SystemParams, rabi: &RabiDecomposition, t: f64) -> f64 {
    let g = params.gamma;
    if g == 0.0 {
        return 0.0;
    }
    let w1 = rabi.omega1.abs();
    let w2 = rabi.omega2.abs();
    let m2 = w1 * w1 + w2 * w2;
    let scale = params.scale();
    if m2 < EP_ROUTING * scale * scale {
        let rho = rho_on_branch(params, rabi, &InitialAmplitudes::donor(), t);
        return (1.0 - rho.trace()).clamp(0.0, 1.0);
    }
    let (ecosh, esinh) = damped_hyperbolic(w2, g, t);
    let slow = (g * g + w1 * w1) * (g * ecosh + w2 * esinh);
    let fast = (g * g - w2 * w2) * (g * (w1 * t).cos() - w1 * (w1 * t).sin()) * (-g * t).exp();
    (1.0 - (slow - fast) / (g * m2)).clamp(0.0, 1.0)
}

// (e^{−Γt} cosh wt, e^{−Γt} sinh wt) for 0 ≤ w ≤ Γ, without overflow.
fn damped_hyperbolic(w: f64, g: f64, t: f64) -> (f64, f64) {
    let grow = ((w - g) * t).exp();
    let decay = (-(w + g) * t).exp();
    (0.5 * (grow + decay), 0.5 * (grow - decay))
}

/// Flat-potential efficiency in the three regimes `|V| > Γ`, `|V| = Γ`, `|V| < Γ`.
pub fn efficiency_flat(params: &SystemParams, t: f64) -> Result<f64> {
    params.validate()?;
    check_time(t)?;
    check_flat(params, "efficiency_flat")?;
    let g = params.gamma;
    let v = params.v.abs();
    let gt = g * t;
    let remaining = match classify_regime(params) {
        Regime::ExceptionalPoint => (1.0 + gt + 0.5 * gt * gt) * (-gt).exp(),
        Regime::Coherent => {
            let w = ((v - g) * (v + g)).sqrt();
            let s = sinc(0.5 * w * t);
            (-gt).exp() * (1.0 + 0.5 * gt * gt * s * s + gt * sinc(w * t))
        }
        Regime::Incoherent => {
            let w = ((g - v) * (g + v)).sqrt();
            if w * t < 1.0 {
                let s = sinhc(0.5 * w * t);
                (-gt).exp() * (1.0 + 0.5 * gt * gt * s * s + gt * sinhc(w * t))
            } else {
                // e^{−Γt}[1 + Γ²(cosh wt − 1)/w² + Γ sinh(wt)/w]
                let (ecosh, esinh) = damped_hyperbolic(w, g, t);
                let r = g / w;
                (-gt).exp() * (1.0 - r * r) + r * r * ecosh + r * esinh
            }
        }
        Regime::Generic => unreachable!("flatness checked above"),
    };
    Ok((1.0 - remaining).clamp(0.0, 1.0))
}

/// Large-time efficiency: the closed form with its oscillating
/// `cos Ω₁t, sin Ω₁t` part dropped, leaving
/// `1 − e^{−Γt}(Γ² + Ω₁²)(Γ cosh Ω₂t + Ω₂ sinh Ω₂t)/(Γ(Ω₁² + Ω₂²))`.
///
/// For `ε = 0` this gives `1 − e^{−Γt}(Γ² + Ω₁²)/Ω₁²` when `|V| > Γ` and a
/// slow `e^{−(Γ−Ω₂)t}` tail when `|V| < Γ`. At the exceptional point the
/// leading term `1 − (Γt)²e^{−Γt}/2` is returned. Meaningful for `Γt ≫ 1`.
pub fn efficiency_asymptotic(params: &SystemParams, t: f64) -> Result<f64> {
    params.validate()?;
    check_time(t)?;
    let g = params.gamma;
    if g == 0.0 {
        return Ok(0.0);
    }
    let rabi = complex_rabi(params);
    let w1 = rabi.omega1.abs();
    let w2 = rabi.omega2.abs();
    let m2 = w1 * w1 + w2 * w2;
    if classify_regime(params) == Regime::ExceptionalPoint || m2 == 0.0 {
        let gt = g * t;
        return Ok(1.0 - 0.5 * gt * gt * (-gt).exp());
    }
    let (ecosh, esinh) = damped_hyperbolic(w2, g, t);
    Ok(1.0 - (g * g + w1 * w1) * (g * ecosh + w2 * esinh) / (g * m2))
}

/// Donor and acceptor populations at the exceptional point (donor start):
/// `ρ₁₁ = e^{−Γt}(1 + Γt/2)²`, `ρ₂₂ = e^{−Γt}(Γt/2)²`.
pub fn ep_populations(gamma: f64, t: f64) -> Result<(f64, f64)> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::invalid("gamma", format!("must be positive, got {gamma}")));
    }
    check_time(t)?;
    let x = 0.5 * gamma * t;
    let e = (-gamma * t).exp();
    Ok((e * (1.0 + x) * (1.0 + x), e * x * x))
}

/// Flat-potential populations (donor start) with `Ω₀ = |V² − Γ²|^{1/2}`:
/// trigonometric for `|V| > Γ`, hyperbolic for `|V| < Γ`. Continuous through
/// `|V| = Γ`, where it reduces to [`ep_populations`].
pub fn coherent_incoherent_populations(params: &SystemParams, t: f64) -> Result<(f64, f64)> {
    params.validate()?;
    check_time(t)?;
    check_flat(params, "coherent_incoherent_populations")?;
    let g = params.gamma;
    let v = params.v.abs();
    let half = 0.5 * t;
    let et2 = (-g * half).exp();
    let (amp1, amp2) = if v >= g {
        let w = ((v - g) * (v + g)).sqrt();
        let x = w * half;
        let s = half * sinc(x);
        (et2 * (x.cos() + g * s), et2 * v * s)
    } else {
        let w = ((g - v) * (g + v)).sqrt();
        let x = w * half;
        if x < 1.0 {
            let s = half * sinhc(x);
            (et2 * (x.cosh() + g * s), et2 * v * s)
        } else {
            let (ecosh, esinh) = damped_hyperbolic(w, g, half);
            (ecosh + g / w * esinh, v / w * esinh)
        }
    };
    Ok((amp1 * amp1, amp2 * amp2))
}

/// Closed-form trajectory sampled at the record times of `grid`. The
/// efficiency column is `1 − tr ρ`, which the closed form conserves exactly
/// (the donor-start case uses [`efficiency_closed_form`]).
pub fn closed_form_series(params: &SystemParams, init: &InitialAmplitudes, grid: &TimeGrid) -> Result<TimeSeries> {
    params.validate()?;
    let rabi = complex_rabi(params);
    let times = grid.record_times();
    let mut states = Vec::with_capacity(times.len());
    let mut eta = Vec::with_capacity(times.len());
    for &t in &times {
        let rho = rho_on_branch(params, &rabi, init, t);
        eta.push(if init.is_donor() {
            efficiency_on_branch(params, &rabi, t)
        } else {
            1.0 - rho.trace()
        });
        states.push(rho);
    }
    Ok(TimeSeries::new(*grid, states, eta))
}
