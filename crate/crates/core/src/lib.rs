//! Quantum electron transfer in a donor–acceptor pair coupled to a sink.
//!
//! The donor–acceptor subsystem evolves under the effective non-Hermitian
//! Hamiltonian
//!
//! ```text
//!   H = ε₁|1⟩⟨1| + ε₂|2⟩⟨2| + (V/2)(|1⟩⟨2| + |2⟩⟨1|) − iΓ|2⟩⟨2|
//! ```
//!
//! so probability leaks out of the acceptor into the sink at rate 2Γ. The
//! crate layers several independent descriptions of that dynamics, each
//! checkable against the others:
//!
//! * [`analytic`]: closed-form density matrix and transfer efficiency,
//!   including the exceptional point `ε = 0, V = Γ`.
//! * [`noise`]: an ensemble of random-telegraph fluctuators with
//!   log-uniform switching rates, its correlation function and spectral
//!   density (white / 1/f / Lorentzian).
//! * [`rates`]: cumulant (Gaussian) rate theory, Marcus-type asymptotic
//!   rates and the two-exponential rate-equation solution.
//! * [`dynamics`]: fixed-step RK4 propagation, noisy trajectories and
//!   seeded Monte Carlo averaging.
//!
//! Units: rates and energies in ps⁻¹, times in ps, ħ = 1.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod model;
pub mod noise;
pub mod quadrature;
pub mod rates;
pub mod rng;
pub mod specfun;

pub use error::{Error, Result};
pub use model::{
    classify_regime, complex_rabi, Complex, DensityMatrix2, RabiDecomposition, Regime,
    SystemParams,
};
pub use noise::{FluctuatorBand, FluctuatorEnsemble, NoiseCouplings, NoiseTrajectory};
pub use rates::RatePair;
pub use dynamics::{TimeGrid, TimeSeries};
