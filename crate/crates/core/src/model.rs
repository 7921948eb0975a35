//! Shared domain types: system parameters, the projected density matrix and
//! the complex Rabi frequency.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

/// Relative tolerance used to recognise `ε = 0` and `|V| = Γ`.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Builds a complex number, rejecting NaN and infinite components.
pub fn checked_complex(re: f64, im: f64) -> Result<Complex> {
    if re.is_finite() && im.is_finite() {
        Ok(Complex::new(re, im))
    } else {
        Err(Error::invalid("complex", format!("non-finite component ({re}, {im})")))
    }
}

/// Dressed donor–acceptor gap `ε = ε₁ − ε₂`, coupling `V` and acceptor–sink
/// half-rate `Γ`, all in ps⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub epsilon: f64,
    pub v: f64,
    pub gamma: f64,
}

impl SystemParams {
    pub fn new(epsilon: f64, v: f64, gamma: f64) -> Result<Self> {
        let p = Self { epsilon, v, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_finite() {
            return Err(Error::invalid("epsilon", "must be finite"));
        }
        if !self.v.is_finite() {
            return Err(Error::invalid("v", "must be finite"));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::invalid("gamma", format!("must be finite and >= 0, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Largest of `|ε|`, `|V|`, `Γ`; the natural frequency scale of the problem.
    pub fn scale(&self) -> f64 {
        self.epsilon.abs().max(self.v.abs()).max(self.gamma)
    }

    pub fn is_flat(&self) -> bool {
        self.epsilon.abs() <= DEGENERACY_TOL * self.v.abs().max(self.gamma)
            || self.epsilon == 0.0
    }
}

/// Projected 2×2 density matrix; `ρ₂₁ = conj(ρ₁₂)` is implied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    pub rho11: f64,
    pub rho22: f64,
    pub rho12: Complex,
}

impl DensityMatrix2 {
    pub fn new(rho11: f64, rho22: f64, rho12: Complex) -> Self {
        Self { rho11, rho22, rho12 }
    }

    /// Electron on the donor.
    pub fn donor() -> Self {
        Self::new(1.0, 0.0, Complex::new(0.0, 0.0))
    }

    /// Electron on the acceptor.
    pub fn acceptor() -> Self {
        Self::new(0.0, 1.0, Complex::new(0.0, 0.0))
    }

    /// Pure state `ψ = (c1, c2)`: `ρ = ψψ†`, so `ρ₁₂ = c1·conj(c2)`.
    pub fn from_amplitudes(c1: Complex, c2: Complex) -> Self {
        Self::new(c1.norm_sqr(), c2.norm_sqr(), c1 * c2.conj())
    }

    pub fn rho21(&self) -> Complex {
        self.rho12.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho22
    }

    /// Checks non-negative populations, trace ≤ 1 and positive semidefiniteness,
    /// each to absolute tolerance `tol`.
    pub fn check_physical(&self, tol: f64) -> Result<()> {
        let finite = self.rho11.is_finite() && self.rho22.is_finite() && self.rho12.is_finite();
        if !finite {
            return Err(Error::Invariant(format!("non-finite density matrix {self:?}")));
        }
        if self.rho11 < -tol || self.rho22 < -tol {
            return Err(Error::Invariant(format!(
                "negative population: rho11 = {}, rho22 = {}",
                self.rho11, self.rho22
            )));
        }
        if self.trace() > 1.0 + tol {
            return Err(Error::Invariant(format!("trace {} exceeds 1", self.trace())));
        }
        let det = self.rho11 * self.rho22 - self.rho12.norm_sqr();
        if det < -tol {
            return Err(Error::Invariant(format!("not positive semidefinite: det = {det}")));
        }
        Ok(())
    }

    /// Largest absolute difference over the four real components.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.rho11 - other.rho11)
            .abs()
            .max((self.rho22 - other.rho22).abs())
            .max((self.rho12.re - other.rho12.re).abs())
            .max((self.rho12.im - other.rho12.im).abs())
    }
}

/// `Ω = Ω₁ + iΩ₂ = sqrt(V² + (ε + iΓ)²)` with `Ω² = p + iq`,
/// `p = V² + ε² − Γ²`, `q = 2εΓ`.
///
/// The decomposition satisfies `Ω₁² − Ω₂² = p` and `Ω₁Ω₂ = q/2 = εΓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiDecomposition {
    pub omega: Complex,
    pub omega1: f64,
    pub omega2: f64,
    pub p: f64,
    pub q: f64,
}

impl RabiDecomposition {
    fn from_omega(omega: Complex, p: f64, q: f64) -> Self {
        Self {
            omega,
            omega1: omega.re,
            omega2: omega.im,
            p,
            q,
        }
    }

    /// The other square-root branch, `−Ω`.
    pub fn negated(&self) -> Self {
        Self::from_omega(-self.omega, self.p, self.q)
    }

    /// `|Ω|² = Ω₁² + Ω₂² = sqrt(p² + q²)`.
    pub fn modulus_sqr(&self) -> f64 {
        self.omega.norm_sqr()
    }
}

/// Principal-branch complex Rabi frequency.
pub fn complex_rabi(params: &SystemParams) -> RabiDecomposition {
    let SystemParams { epsilon, v, gamma } = *params;
    let p = v * v + epsilon * epsilon - gamma * gamma;
    let q = 2.0 * epsilon * gamma;
    let omega = omega_principal(p, q);
    RabiDecomposition::from_omega(omega, p, q)
}

// sqrt(p + iq) without cancellation in whichever component is small:
// the large component comes from sqrt((|w| + |p|)/2), the other from q/(2·large).
fn omega_principal(p: f64, q: f64) -> Complex {
    if p == 0.0 && q == 0.0 {
        return Complex::new(0.0, 0.0);
    }
    let modulus = p.hypot(q);
    let big = (0.5 * (modulus + p.abs())).sqrt();
    let small = 0.5 * q / big;
    if p >= 0.0 {
        Complex::new(big, small)
    } else {
        // Principal branch keeps Re Ω ≥ 0.
        Complex::new(small.abs(), if q >= 0.0 { big } else { -big })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Coherent,
    Incoherent,
    ExceptionalPoint,
    Generic,
}

/// Flat potential (`ε = 0`) splits into coherent `|V| > Γ`, incoherent
/// `|V| < Γ` and the exceptional point `|V| = Γ`; everything else is generic.
/// Both equalities are tested to relative tolerance [`DEGENERACY_TOL`].
pub fn classify_regime(params: &SystemParams) -> Regime {
    if !params.is_flat() {
        return Regime::Generic;
    }
    let v = params.v.abs();
    let g = params.gamma;
    if (v - g).abs() <= DEGENERACY_TOL * v.max(g) {
        Regime::ExceptionalPoint
    } else if v > g {
        Regime::Coherent
    } else {
        Regime::Incoherent
    }
}
