pub mod analytic;
pub mod dynamics;
pub mod noise;
pub mod rates;
pub mod sweep;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Output;

pub struct Context {
    pub config: RunConfig,
    pub seed: u64,
    pub out: Output,
}

pub fn unknown_recipe(command: &str, recipe: &str, known: &[&str]) -> CliError {
    CliError::Config(format!(
        "unknown recipe `{recipe}` for `{command}` (available: {})",
        known.join(", ")
    ))
}

/// Every figure recipe, in figure order.
pub const FIGURES: &[&str] = &["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

pub fn figure(ctx: &mut Context, recipe: Option<&str>) -> Result<(), CliError> {
    let selected: Vec<&str> = match recipe {
        None => FIGURES.to_vec(),
        Some(r) if FIGURES.contains(&r) => vec![r],
        Some(r) => return Err(unknown_recipe("figure", r, FIGURES)),
    };
    for r in selected {
        match r {
            "fig2" | "fig3" | "fig4" => analytic::run(ctx, Some(r))?,
            "fig5" | "fig7" => rates::run(ctx, Some(r))?,
            "fig6" => noise::run(ctx, Some(r), None)?,
            _ => dynamics::run(ctx, Some(r))?,
        }
    }
    Ok(())
}
