use etsim_core::dynamics::solve_averaged_master;
use etsim_core::rates::{marcus_rate, marcus_rate_gamma, Kernel, RateCurve};
use etsim_core::{FluctuatorBand, NoiseCouplings, SystemParams, TimeGrid};
use rayon::prelude::*;

use super::Context;
use crate::error::CliError;
use crate::output::linspace;

pub const RECIPES: &[&str] = &["fig5", "fig7"];

fn rate_curve(p: &SystemParams, d: f64, band: &FluctuatorBand, t_max: f64) -> Result<RateCurve, CliError> {
    let kernel = Kernel::stationary(&NoiseCouplings::from_d(d), band);
    Ok(RateCurve::tabulate(p, &kernel, t_max, RateCurve::default_step(p, &kernel))?)
}

fn fig5(ctx: &mut Context) -> Result<(), CliError> {
    let p = SystemParams::new(60.0, 20.0, 0.0)?;
    let d = 60.0;
    let band = FluctuatorBand::new(5e-5, 0.5, 1.0)?;
    // 2γ_m = 1 s⁻¹.
    let slow_band = FluctuatorBand::new(0.5e-12, 0.5, 1.0)?;
    let t_max = 0.25;
    let fast = rate_curve(&p, d, &band, t_max)?;
    let slow = rate_curve(&p, d, &slow_band, t_max)?;
    let marcus = marcus_rate(p.v, p.epsilon, d, band.sigma)?;
    let rows = linspace(0.0, t_max, 501)
        .into_iter()
        .map(|t| [t, fast.eval(t), slow.eval(t), marcus]);
    ctx.out.table("fig5_rate.csv", &["t", "rate", "rate_slow_gamma_m", "marcus"], rows)?;

    let grid = TimeGrid::covering(2.0, 1e-4)?.with_record_limit(1000);
    let master = solve_averaged_master(&p, |t| fast.eval(t), &grid)?;
    master.check_invariants(1e-4)?;
    let rows = master
        .times()
        .into_iter()
        .zip(&master.states)
        .map(|(t, s)| [t, s.rho11, s.rho22]);
    ctx.out.table("fig5_populations.csv", &["t", "rho11", "rho22"], rows)
}

pub const FIG7_GAMMAS: [f64; 4] = [0.0, 1.0, 5.0, 10.0];

fn fig7(ctx: &mut Context) -> Result<(), CliError> {
    let rows = linspace(1.0, 250.0, 500)
        .into_par_iter()
        .map(|ds| -> Result<[f64; 5], etsim_core::Error> {
            let mut row = [ds, 0.0, 0.0, 0.0, 0.0];
            for (k, g) in FIG7_GAMMAS.iter().enumerate() {
                row[k + 1] = marcus_rate_gamma(20.0, 60.0, ds, 1.0, *g)?;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    ctx.out.table(
        "fig7_rate_gamma.csv",
        &["d_sigma", "rate_gamma0", "rate_gamma1", "rate_gamma5", "rate_gamma10"],
        rows,
    )
}

pub fn run(ctx: &mut Context, recipe: Option<&str>) -> Result<(), CliError> {
    match recipe {
        None => {
            let c = &ctx.config;
            let p = c.system;
            let d = c.couplings().d();
            let band = c.band();
            let t_max = c.run.t_max;
            let curve = rate_curve(&p, d, &band, t_max)?;
            let plateau = if c.d_sigma() > 0.0 {
                marcus_rate_gamma(p.v, p.epsilon, d, band.sigma, p.gamma)?
            } else {
                0.0
            };
            let rows = linspace(0.0, t_max, 1001)
                .into_iter()
                .map(|t| [t, curve.eval(t), plateau]);
            ctx.out.table("rates.csv", &["t", "rate", "rate_gamma"], rows)
        }
        Some("fig5") => fig5(ctx),
        Some("fig7") => fig7(ctx),
        Some(other) => Err(super::unknown_recipe("rates", other, RECIPES)),
    }
}
