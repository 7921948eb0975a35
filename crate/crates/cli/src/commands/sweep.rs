use std::str::FromStr;

use etsim_core::analytic::efficiency_closed_form;
use etsim_core::rates::{efficiency_noise, marcus_rate_gamma};
use etsim_core::SystemParams;
use rayon::prelude::*;

use super::Context;
use crate::error::CliError;
use crate::output::linspace;

pub const MAX_POINTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisName {
    Epsilon,
    V,
    Gamma,
    DSigma,
}

impl AxisName {
    fn as_str(self) -> &'static str {
        match self {
            AxisName::Epsilon => "epsilon",
            AxisName::V => "v",
            AxisName::Gamma => "gamma",
            AxisName::DSigma => "d_sigma",
        }
    }
}

/// `NAME:START:STOP:N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, start, stop, n] = parts[..] else {
            return Err(format!("axis `{s}` is not of the form NAME:START:STOP:N"));
        };
        let name = match name {
            "epsilon" => AxisName::Epsilon,
            "v" => AxisName::V,
            "gamma" => AxisName::Gamma,
            "d_sigma" => AxisName::DSigma,
            other => return Err(format!("unknown axis `{other}` (expected epsilon, v, gamma or d_sigma)")),
        };
        let number = |x: &str| x.parse::<f64>().ok().filter(|v| v.is_finite());
        let (Some(start), Some(stop)) = (number(start), number(stop)) else {
            return Err(format!("axis `{s}` has a non-numeric bound"));
        };
        let n: usize = n.parse().map_err(|_| format!("axis `{s}` has an invalid point count"))?;
        if n == 0 {
            return Err(format!("axis `{s}` needs at least one point"));
        }
        Ok(Axis { name, start, stop, n })
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    params: SystemParams,
    d_sigma: f64,
}

impl Point {
    fn set(mut self, name: AxisName, x: f64) -> Self {
        match name {
            AxisName::Epsilon => self.params.epsilon = x,
            AxisName::V => self.params.v = x,
            AxisName::Gamma => self.params.gamma = x,
            AxisName::DSigma => self.d_sigma = x,
        }
        self
    }
}

pub fn run(ctx: &mut Context, axes: &[Axis]) -> Result<(), CliError> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(CliError::Config(format!("sweep takes one or two --axis options, got {}", axes.len())));
    }
    if axes.len() == 2 && axes[0].name == axes[1].name {
        return Err(CliError::Config(format!("axis `{}` given twice", axes[0].name.as_str())));
    }
    let total = axes.iter().map(|a| a.n).try_fold(1usize, |acc, n| acc.checked_mul(n));
    match total {
        Some(t) if t <= MAX_POINTS => {}
        _ => {
            return Err(CliError::Config(format!(
                "sweep grid has more than {MAX_POINTS} points"
            )))
        }
    }
    let base = Point {
        params: ctx.config.system,
        d_sigma: ctx.config.d_sigma(),
    };
    let mut points = vec![(Vec::new(), base)];
    for axis in axes {
        let values = linspace(axis.start, axis.stop, axis.n);
        points = points
            .into_iter()
            .flat_map(|(coords, p)| {
                values.iter().map(move |&x| {
                    let mut c: Vec<f64> = coords.clone();
                    c.push(x);
                    (c, p.set(axis.name, x))
                })
            })
            .collect();
    }
    for (_, p) in &points {
        p.params.validate()?;
        if p.d_sigma.is_nan() || p.d_sigma <= 0.0 {
            return Err(CliError::Config(format!("d_sigma must be positive, got {}", p.d_sigma)));
        }
    }
    let t = ctx.config.run.t_max;
    let rows = points
        .into_par_iter()
        .map(|(mut coords, p)| -> Result<Vec<f64>, etsim_core::Error> {
            let SystemParams { epsilon, v, gamma } = p.params;
            let rate = marcus_rate_gamma(v, epsilon, p.d_sigma, 1.0, gamma)?;
            let eta_noise = if gamma > 0.0 { efficiency_noise(rate, gamma, t)? } else { 0.0 };
            coords.extend([efficiency_closed_form(&p.params, t)?, rate, eta_noise]);
            Ok(coords)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut header: Vec<&str> = axes.iter().map(|a| a.name.as_str()).collect();
    header.extend(["eta_coherent", "rate_gamma", "eta_noise"]);
    ctx.out.table("sweep.csv", &header, rows)
}
