//! Textual model specifications shared by the command line and the benchmark.
//!
//! ```text
//! jumps: none | cp-two:λ:a:p | cp-gauss:λ:μ:sd | stable:β:γ
//! rate:  constant | sine:a:m
//! noise: none | gauss:σ | rademacher:σ
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{
    GridPath, ItoModel, JumpSize, JumpSpec, LevyTriplet, NoiseSpec, ObservationSeries, RateSpec,
    TimeChangedModel,
};

/// Grid resolution of the volatility path in the semimartingale variant.
const ITO_GRID: usize = 4097;

fn fields<'a>(spec: &'a str, what: &str, arity: usize) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != arity + 1 {
        return Err(Error::config(format!(
            "{what} spec '{spec}' expects {arity} parameter(s)"
        )));
    }
    Ok(parts[1..].to_vec())
}

fn num(raw: &str, spec: &str) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::config(format!("bad number '{raw}' in '{spec}'")))
}

pub fn parse_jumps(spec: &str) -> Result<JumpSpec> {
    let kind = spec.split(':').next().unwrap_or("");
    let jumps = match kind {
        "none" => {
            fields(spec, "jump", 0)?;
            JumpSpec::None
        }
        "cp-two" => {
            let f = fields(spec, "jump", 3)?;
            JumpSpec::CompoundPoisson {
                intensity: num(f[0], spec)?,
                size: JumpSize::TwoPoint {
                    a: num(f[1], spec)?,
                    p: num(f[2], spec)?,
                },
            }
        }
        "cp-gauss" => {
            let f = fields(spec, "jump", 3)?;
            JumpSpec::CompoundPoisson {
                intensity: num(f[0], spec)?,
                size: JumpSize::Gaussian {
                    mean: num(f[1], spec)?,
                    sd: num(f[2], spec)?,
                },
            }
        }
        "stable" => {
            let f = fields(spec, "jump", 2)?;
            JumpSpec::SymmetricStable {
                index: num(f[0], spec)?,
                scale: num(f[1], spec)?,
            }
        }
        _ => return Err(Error::config(format!("unknown jump spec '{spec}'"))),
    };
    jumps.validate()?;
    Ok(jumps)
}

pub fn parse_rate(spec: &str) -> Result<RateSpec> {
    let rate = match spec.split(':').next().unwrap_or("") {
        "constant" => {
            fields(spec, "rate", 0)?;
            RateSpec::Constant
        }
        "sine" => {
            let f = fields(spec, "rate", 2)?;
            let m = f[1].trim().parse::<u32>().map_err(|_| {
                Error::config(format!(
                    "sine frequency in '{spec}' must be a positive integer"
                ))
            })?;
            RateSpec::sine(num(f[0], spec)?, m)
        }
        _ => return Err(Error::config(format!("unknown rate spec '{spec}'"))),
    };
    rate.validate()?;
    Ok(rate)
}

pub fn parse_noise(spec: &str) -> Result<NoiseSpec> {
    let noise = match spec.split(':').next().unwrap_or("") {
        "none" => {
            fields(spec, "noise", 0)?;
            NoiseSpec::none()
        }
        "gauss" => NoiseSpec::gaussian(num(fields(spec, "noise", 1)?[0], spec)?),
        "rademacher" => NoiseSpec::rademacher(num(fields(spec, "noise", 1)?[0], spec)?),
        _ => return Err(Error::config(format!("unknown noise spec '{spec}'"))),
    };
    noise.validate()?;
    Ok(noise)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    TimeChanged(TimeChangedModel),
    Ito(ItoModel),
}

impl Model {
    /// Time-changed model, or with `ito` an Itô semimartingale whose
    /// volatility path is `vol·r_t` and whose jumps run in calendar time.
    pub fn build(
        ito: bool,
        vol: f64,
        rate: RateSpec,
        jumps: JumpSpec,
        noise: NoiseSpec,
    ) -> Result<Self> {
        let model = if ito {
            let path = GridPath::from_fn(ITO_GRID, |t| vol * rate.rate(t));
            Model::Ito(ItoModel::new(GridPath::constant(0.0), path, jumps, noise))
        } else {
            Model::TimeChanged(TimeChangedModel::new(
                LevyTriplet::new(0.0, vol, jumps),
                rate,
                noise,
            ))
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Model::TimeChanged(m) => m.validate(),
            Model::Ito(m) => m.validate(),
        }
    }

    pub fn simulate(&self, n: usize, seed: u64) -> Result<ObservationSeries> {
        match self {
            Model::TimeChanged(m) => m.simulate(n, seed),
            Model::Ito(m) => m.simulate(n, seed),
        }
    }
}
