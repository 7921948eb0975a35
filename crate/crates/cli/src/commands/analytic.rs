use etsim_core::analytic::{closed_form_series, efficiency_closed_form, InitialAmplitudes};
use etsim_core::{SystemParams, TimeGrid};

use super::Context;
use crate::error::CliError;
use crate::output::{label, linspace};

pub const RECIPES: &[&str] = &["fig2", "fig3", "fig4"];

const RECORDS: usize = 1000;

fn populations(ctx: &mut Context, name: &str, p: &SystemParams, t_max: f64) -> Result<(), CliError> {
    let grid = TimeGrid::new(t_max / RECORDS as f64, RECORDS)?;
    let series = closed_form_series(p, &InitialAmplitudes::donor(), &grid)?;
    series.check_invariants(1e-10)?;
    ctx.out.series(name, &series)
}

fn efficiency(ctx: &mut Context, name: &str, p: &SystemParams, t_max: f64) -> Result<(), CliError> {
    let rows = linspace(0.0, t_max, RECORDS + 1)
        .into_iter()
        .map(|t| Ok([t, efficiency_closed_form(p, t)?]))
        .collect::<Result<Vec<_>, etsim_core::Error>>()?;
    ctx.out.table(name, &["t", "eta"], rows)
}

pub fn run(ctx: &mut Context, recipe: Option<&str>) -> Result<(), CliError> {
    match recipe {
        None => {
            let p = ctx.config.system;
            let grid = TimeGrid::covering(ctx.config.run.t_max, ctx.config.run.dt)?.with_record_limit(2000);
            let series = closed_form_series(&p, &InitialAmplitudes::donor(), &grid)?;
            series.check_invariants(1e-10)?;
            ctx.out.series("analytic.csv", &series)
        }
        Some("fig2") => {
            for gamma in [1.0, 5.0] {
                for v in [10.0, 20.0] {
                    let p = SystemParams::new(60.0, v, gamma)?;
                    let tag = format!("gamma{}_v{}", label(gamma), label(v));
                    populations(ctx, &format!("fig2_populations_{tag}.csv"), &p, 20.0)?;
                    efficiency(ctx, &format!("fig2_efficiency_{tag}.csv"), &p, 150.0)?;
                }
            }
            Ok(())
        }
        Some("fig3") => {
            for (gamma, v) in [(1.0, 5.0), (1.0, 10.0), (5.0, 10.0), (5.0, 5.0)] {
                let p = SystemParams::new(0.0, v, gamma)?;
                let ep = if gamma == v { "_ep" } else { "" };
                populations(ctx, &format!("fig3_gamma{}_v{}{ep}.csv", label(gamma), label(v)), &p, 5.0)?;
            }
            Ok(())
        }
        Some("fig4") => {
            for (v, eps) in [(20.0, 0.0), (10.0, 0.0), (5.0, 0.0), (2.5, 20.0), (2.5, 0.0), (2.5, 10.0)] {
                let p = SystemParams::new(eps, v, 5.0)?;
                efficiency(ctx, &format!("fig4_v{}_eps{}.csv", label(v), label(eps)), &p, 10.0)?;
            }
            Ok(())
        }
        Some(other) => Err(super::unknown_recipe("analytic", other, RECIPES)),
    }
}
