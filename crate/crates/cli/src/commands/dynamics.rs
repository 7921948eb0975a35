use etsim_core::dynamics::{
    default_dt, ladder_report, monte_carlo_average, solve_averaged_master, MONTE_CARLO_STEPS_PER_PERIOD,
};
use etsim_core::noise::build_ensemble;
use etsim_core::rates::{marcus_rate_gamma, rate_equation_series, Kernel, RateCurve};
use etsim_core::rng::sub_seed;
use etsim_core::{FluctuatorBand, FluctuatorEnsemble, NoiseCouplings, SystemParams, TimeGrid, TimeSeries};
use serde_json::json;

use super::Context;
use crate::error::CliError;
use crate::output::label;

pub const RECIPES: &[&str] = &["fig8"];

/// Conservation tolerance on every emitted series.
pub const CONSERVATION_TOL: f64 = 1e-4;

const HEADER: [&str; 16] = [
    "t",
    "rho11_mc",
    "rho22_mc",
    "re_rho12_mc",
    "im_rho12_mc",
    "eta_mc",
    "se_rho11",
    "se_rho22",
    "rho11_master",
    "rho22_master",
    "eta_master",
    "rho11_rate",
    "rho22_rate",
    "eta_rate",
    "conservation_mc",
    "conservation_master",
];

struct Case<'a> {
    params: SystemParams,
    couplings: NoiseCouplings,
    ensemble: &'a FluctuatorEnsemble,
    grid: TimeGrid,
    n_traj: usize,
    seed: u64,
}

fn run_case(ctx: &mut Context, name: &str, case: &Case) -> Result<serde_json::Value, CliError> {
    let p = &case.params;
    let band = case.ensemble.band();
    let mc = monte_carlo_average(p, &case.couplings, case.ensemble, case.n_traj, &case.grid, case.seed)?;
    let kernel = Kernel::stationary(&case.couplings, &band);
    let curve = RateCurve::tabulate(p, &kernel, case.grid.t_max(), RateCurve::default_step(p, &kernel))?;
    let master = solve_averaged_master(p, |t| curve.eval(t), &case.grid)?;
    let d = case.couplings.d();
    let rate = if d * band.sigma > 0.0 {
        marcus_rate_gamma(p.v, p.epsilon, d, band.sigma, p.gamma)?
    } else {
        0.0
    };
    let rate_eq = rate_equation_series(rate, p.gamma, &case.grid)?;
    mc.check_invariants(CONSERVATION_TOL)?;
    master.check_invariants(CONSERVATION_TOL)?;
    let report = ladder_report(&mc, &master, &rate_eq)?;

    ctx.out.table(name, &HEADER, rows(&mc, &master, &rate_eq))?;
    Ok(json!({
        "file": name,
        "system": p,
        "couplings": case.couplings,
        "noise": band,
        "n_fluctuators": case.ensemble.n_fluctuators,
        "n_trajectories": case.n_traj,
        "seed": case.seed,
        "dt": case.grid.dt,
        "t_max": case.grid.t_max(),
        "rate_gamma": rate,
        "ladder": report,
        "max_conservation_error": {
            "mc": mc.max_conservation_error(),
            "master": master.max_conservation_error(),
        },
    }))
}

fn rows<'a>(mc: &'a TimeSeries, master: &'a TimeSeries, rate_eq: &'a TimeSeries) -> impl Iterator<Item = Vec<f64>> + 'a {
    let se = mc.std_err.as_deref().unwrap_or_default();
    mc.times().into_iter().enumerate().map(move |(k, t)| {
        let (a, b, r) = (&mc.states[k], &master.states[k], &rate_eq.states[k]);
        let s = se.get(k).copied().unwrap_or([0.0; 2]);
        vec![
            t,
            a.rho11,
            a.rho22,
            a.rho12.re,
            a.rho12.im,
            mc.eta[k],
            s[0],
            s[1],
            b.rho11,
            b.rho22,
            master.eta[k],
            r.rho11,
            r.rho22,
            rate_eq.eta[k],
            (1.0 - a.trace() - mc.eta[k]).abs(),
            (1.0 - b.trace() - master.eta[k]).abs(),
        ]
    })
}

/// Fig. 8 curves as (V, Dσ).
pub const FIG8_CURVES: [(f64, f64); 5] = [(20.0, 30.0), (20.0, 60.0), (20.0, 120.0), (10.0, 60.0), (40.0, 60.0)];

pub fn run(ctx: &mut Context, recipe: Option<&str>) -> Result<(), CliError> {
    let cases = match recipe {
        None => {
            let c = &ctx.config;
            let ensemble = c.ensemble(ctx.seed)?;
            let grid = TimeGrid::covering(c.run.t_max, c.run.dt)?.with_record_limit(1000);
            let case = Case {
                params: c.system,
                couplings: c.couplings(),
                ensemble: &ensemble,
                grid,
                n_traj: c.run.n_trajectories,
                seed: sub_seed(ctx.seed, 1),
            };
            vec![run_case(ctx, "dynamics.csv", &case)?]
        }
        Some("fig8") => {
            let band = FluctuatorBand::new(5e-5, 0.5, 1.0)?;
            let ensemble = build_ensemble(ctx.config.noise.n_fluctuators, band.gamma_m, band.gamma_c, band.sigma, ctx.seed)?;
            let mut meta = Vec::new();
            for (k, (v, ds)) in FIG8_CURVES.into_iter().enumerate() {
                let params = SystemParams::new(60.0, v, 1.0)?;
                let dt = default_dt(&params, 5.0 * ds, MONTE_CARLO_STEPS_PER_PERIOD);
                let case = Case {
                    params,
                    couplings: NoiseCouplings::from_d(ds / band.sigma),
                    ensemble: &ensemble,
                    grid: TimeGrid::covering(6.0, dt)?.with_record_limit(600),
                    n_traj: ctx.config.run.n_trajectories,
                    seed: sub_seed(ctx.seed, k as u64 + 1),
                };
                meta.push(run_case(ctx, &format!("fig8_v{}_dsigma{}.csv", label(v), label(ds)), &case)?);
            }
            meta
        }
        Some(other) => return Err(super::unknown_recipe("dynamics", other, RECIPES)),
    };
    let name = match recipe {
        None => "dynamics_meta.json".to_string(),
        Some(r) => format!("{r}_meta.json"),
    };
    ctx.out.json(&name, &json!({ "ensemble_seed": ctx.seed, "cases": cases }))
}
