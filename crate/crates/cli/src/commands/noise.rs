use std::f64::consts::PI;

use etsim_core::noise::{empirical_correlation, sample_trajectory};
use etsim_core::rng::sub_seed;
use etsim_core::{FluctuatorBand, NoiseTrajectory};
use rayon::prelude::*;

use super::Context;
use crate::error::CliError;
use crate::output::logspace;

pub const RECIPES: &[&str] = &["fig6"];

fn spectrum(ctx: &mut Context, name: &str, band: &FluctuatorBand) -> Result<(), CliError> {
    let rows: Vec<[f64; 5]> = logspace(band.gamma_m / 10.0 / PI, 100.0 * band.gamma_c / PI, 400)
        .into_iter()
        .map(|f| {
            let omega = 2.0 * PI * f;
            let s = band.spectral_density(omega);
            [f, omega, s, band.one_over_f_asymptote(omega), s.ln()]
        })
        .collect();
    ctx.out.table(name, &["f", "omega", "S", "S_one_over_f", "ln_S"], rows)
}

fn empirical(ctx: &mut Context, n_traj: usize) -> Result<(), CliError> {
    if n_traj < 2 {
        return Err(CliError::Config(format!("--empirical needs at least 2 trajectories, got {n_traj}")));
    }
    let ensemble = ctx.config.ensemble(ctx.seed)?;
    let dt = 0.1 / ensemble.gamma_c;
    let max_tau = (0.5 / ensemble.gamma_m).min(5e3 * dt);
    let t_max = 2.0 * max_tau;
    let trajectories = (0..n_traj)
        .into_par_iter()
        .map(|i| sample_trajectory(&ensemble, dt, t_max, sub_seed(ctx.seed, i as u64)))
        .collect::<Result<Vec<NoiseTrajectory>, _>>()?;
    let max_lag = (max_tau / dt).round() as usize;
    let est = empirical_correlation(&trajectories, max_lag)?;
    let mut lags: Vec<usize> = std::iter::once(0)
        .chain(logspace(1.0, max_lag as f64, 120).into_iter().map(|l| l.round() as usize))
        .collect();
    lags.dedup();
    let band = ensemble.band();
    let rows = lags.into_iter().map(|l| {
        let tau = est.tau(l);
        [tau, est.values[l], est.std_err[l], band.correlation(tau), ensemble.realised_correlation(tau)]
    });
    ctx.out.table(
        "chi_empirical.csv",
        &["tau", "chi_empirical", "std_err", "chi_analytic", "chi_realised"],
        rows,
    )
}

pub fn run(ctx: &mut Context, recipe: Option<&str>, empirical_traj: Option<usize>) -> Result<(), CliError> {
    match recipe {
        None => {
            let band = ctx.config.band();
            spectrum(ctx, "spectral_density.csv", &band)?;
        }
        Some("fig6") => {
            let band = FluctuatorBand::new(5e-5, 0.5, 1.0)?;
            spectrum(ctx, "fig6_spectral_density.csv", &band)?;
        }
        Some(other) => return Err(super::unknown_recipe("noise", other, RECIPES)),
    }
    if let Some(n) = empirical_traj {
        empirical(ctx, n)?;
    }
    Ok(())
}
