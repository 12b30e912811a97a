//! Parameter selection by generalised cross-validation over `(u, h1, h2, h)`.
//!
//! The score compares the smoothed rate at the design points `l/n2` with the
//! normalised local estimates `r̂_l` and divides by a function of the mean
//! self-weight `W_l(l/n2)`. Any stage error turns into a `+∞` score.

use std::cmp::Ordering;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfn::{spot_vol, DEFAULT_FLOOR};
use crate::error::{Error, Result};
use crate::preaverage::{make_layout, preaverage};
use crate::sim::ObservationSeries;
use crate::smoothing::{normalised_local, Smoother, SmoothingConfig};

/// Denominator of the criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GcvForm {
    /// `(mean W_ll)²`.
    #[default]
    SelfWeight,
    /// `(1 - mean W_ll)²`, the textbook form.
    Classical,
}

impl FromStr for GcvForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "self-weight" | "self_weight" => Ok(GcvForm::SelfWeight),
            "classical" => Ok(GcvForm::Classical),
            other => Err(Error::config(format!("unknown GCV form '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuneParams {
    pub u: f64,
    pub h1: f64,
    pub h2: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneGrid {
    pub u_candidates: Vec<f64>,
    pub h1_candidates: Vec<f64>,
    pub h2_candidates: Vec<f64>,
    pub h_candidates: Vec<f64>,
}

impl TuneGrid {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("u", &self.u_candidates),
            ("h1", &self.h1_candidates),
            ("h2", &self.h2_candidates),
            ("h", &self.h_candidates),
        ] {
            if v.is_empty() {
                return Err(Error::config(format!("{name} candidate list is empty")));
            }
            if let Some(x) = v.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
                return Err(Error::config(format!(
                    "{name} candidate {x} is not positive"
                )));
            }
        }
        Ok(())
    }

    /// Cartesian product in `(u, h1, h2, h)` order.
    pub fn points(&self) -> Vec<TuneParams> {
        let mut out = Vec::new();
        for &u in &self.u_candidates {
            for &h1 in &self.h1_candidates {
                for &h2 in &self.h2_candidates {
                    for &h in &self.h_candidates {
                        out.push(TuneParams { u, h1, h2, h });
                    }
                }
            }
        }
        out
    }

    /// Frequencies `{0.5, 1, 2, 4}` over the robust scale of `X̂` on the
    /// unit layout, `h ∈ {0.05, 0.1, 0.2, 0.4}` and `h1 = h2 ∈ {0.5, 1, 2}`
    /// crossed independently.
    pub fn default_for(series: &ObservationSeries) -> Result<Self> {
        let scale = robust_scale(series)?;
        let bins = vec![0.5, 1.0, 2.0];
        Ok(Self {
            u_candidates: [0.5, 1.0, 2.0, 4.0].iter().map(|m| m / scale).collect(),
            h1_candidates: bins.clone(),
            h2_candidates: bins,
            h_candidates: vec![0.05, 0.1, 0.2, 0.4],
        })
    }
}

/// `median|X̂_k| / 0.6745` on the `h1 = h2 = 1` layout.
pub fn robust_scale(series: &ObservationSeries) -> Result<f64> {
    let layout = make_layout(series.n(), 1.0, 1.0)?;
    let pre = preaverage(series, &layout)?;
    let mut abs: Vec<f64> = pre.xhat.iter().map(|x| x.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let m = abs.len();
    let median = if m % 2 == 1 {
        abs[m / 2]
    } else {
        0.5 * (abs[m / 2 - 1] + abs[m / 2])
    };
    let scale = median / 0.6745;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Domain(
            "pre-averaged increments have zero robust scale".into(),
        ));
    }
    Ok(scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuneOptions {
    pub floor: f64,
    pub form: GcvForm,
}

impl Default for TuneOptions {
    fn default() -> Self {
        Self {
            floor: DEFAULT_FLOOR,
            form: GcvForm::SelfWeight,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuneEntry {
    pub params: TuneParams,
    /// `f64::INFINITY` for infeasible points.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub best: TuneParams,
    pub score: f64,
    pub table: Vec<TuneEntry>,
}

fn try_gcv(
    series: &ObservationSeries,
    p: &TuneParams,
    cfg: &SmoothingConfig,
    opts: &TuneOptions,
) -> Result<f64> {
    let layout = make_layout(series.n(), p.h1, p.h2)?;
    let pre = preaverage(series, &layout)?;
    let local = spot_vol(&pre, p.u, opts.floor)?;
    let (_, rhat) = normalised_local(&local.chat)?;

    let n2 = layout.n2;
    let design: Vec<f64> = (0..n2).map(|l| l as f64 / n2 as f64).collect();
    let smoother = Smoother::new(&design, n2, &cfg.with_bandwidth(p.h))?;
    let fitted = smoother.apply(&rhat);

    let rss = fitted
        .iter()
        .zip(&rhat)
        .map(|(f, r)| (f - r) * (f - r))
        .sum::<f64>()
        / n2 as f64;
    let self_weight = (0..n2).map(|l| smoother.rows[l][l]).sum::<f64>() / n2 as f64;
    let denom = match opts.form {
        GcvForm::SelfWeight => self_weight * self_weight,
        GcvForm::Classical => (1.0 - self_weight) * (1.0 - self_weight),
    };
    if rss == 0.0 && denom > 0.0 {
        return Ok(0.0);
    }
    let score = rss / denom;
    Ok(if score.is_finite() {
        score
    } else {
        f64::INFINITY
    })
}

/// The criterion at one parameter point; `+∞` whenever a stage fails.
pub fn gcv_score(
    series: &ObservationSeries,
    params: &TuneParams,
    cfg: &SmoothingConfig,
    opts: &TuneOptions,
) -> f64 {
    try_gcv(series, params, cfg, opts).unwrap_or(f64::INFINITY)
}

fn rank(a: &TuneEntry, b: &TuneEntry) -> Ordering {
    a.score
        .total_cmp(&b.score)
        .then(a.params.h.total_cmp(&b.params.h))
        .then(a.params.u.total_cmp(&b.params.u))
        .then(a.params.h1.total_cmp(&b.params.h1))
        .then(a.params.h2.total_cmp(&b.params.h2))
}

/// Exhaustive search; ties go to smaller `h`, then `u`, `h1`, `h2`.
pub fn tune(
    series: &ObservationSeries,
    grid: &TuneGrid,
    cfg: &SmoothingConfig,
    opts: &TuneOptions,
) -> Result<TuneResult> {
    grid.validate()?;
    let table: Vec<TuneEntry> = grid
        .points()
        .into_par_iter()
        .map(|params| TuneEntry {
            params,
            score: gcv_score(series, &params, cfg, opts),
        })
        .collect();
    let best = table
        .iter()
        .filter(|e| e.score.is_finite())
        .min_by(|a, b| rank(a, b))
        .ok_or(Error::NoFeasibleTuningPoint)?;
    Ok(TuneResult {
        best: best.params,
        score: best.score,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{LevyTriplet, NoiseSpec, RateSpec, TimeChangedModel};
    use crate::smoothing::Kernel;
    use approx::assert_relative_eq;

    fn path(n: usize, seed: u64) -> ObservationSeries {
        TimeChangedModel::new(
            LevyTriplet::brownian(1.0),
            RateSpec::sine(0.5, 1),
            NoiseSpec::gaussian(0.005),
        )
        .simulate(n, seed)
        .unwrap()
    }

    fn smoothing(kernel: Kernel) -> SmoothingConfig {
        SmoothingConfig {
            kernel,
            order: 1,
            bandwidth: 0.1,
            ridge: 0.0,
        }
    }

    fn point(h: f64) -> TuneParams {
        TuneParams {
            u: 0.5,
            h1: 0.125,
            h2: 1.0,
            h,
        }
    }

    #[test]
    fn interpolating_weights_score_zero() {
        let series = path(1 << 14, 1);
        let n2 = make_layout(series.n(), 0.125, 1.0).unwrap().n2;
        // the window holds only the design point itself
        let h = 0.5 / n2 as f64;
        let s = gcv_score(
            &series,
            &point(h),
            &smoothing(Kernel::Uniform),
            &TuneOptions::default(),
        );
        assert_eq!(s, 0.0);
    }

    #[test]
    fn flat_weights_match_hand_evaluation() {
        let series = path(1 << 14, 2);
        let p = point(1.0);
        let opts = TuneOptions::default();
        let s = gcv_score(&series, &p, &smoothing(Kernel::Uniform), &opts);

        let layout = make_layout(series.n(), p.h1, p.h2).unwrap();
        let pre = preaverage(&series, &layout).unwrap();
        let chat = spot_vol(&pre, p.u, opts.floor).unwrap().chat;
        let n2 = chat.len() as f64;
        let mean = chat.iter().sum::<f64>() / n2;
        let rhat: Vec<f64> = chat.iter().map(|c| c / mean).collect();
        // h = 1 covers every design point, so the fit is the mean of r̂, which is 1
        let var = rhat.iter().map(|r| (r - 1.0).powi(2)).sum::<f64>() / n2;
        assert_relative_eq!(s, n2 * n2 * var, max_relative = 1e-10);
    }

    #[test]
    fn infeasible_point_is_infinite() {
        let series = path(64, 3);
        let p = TuneParams {
            u: 1.0,
            h1: 0.01,
            h2: 1.0,
            h: 0.2,
        };
        let s = gcv_score(
            &series,
            &p,
            &smoothing(Kernel::Epanechnikov),
            &TuneOptions::default(),
        );
        assert_eq!(s, f64::INFINITY);
    }

    #[test]
    fn feasible_point_wins_over_infeasible() {
        let series = path(1 << 12, 4);
        let grid = TuneGrid {
            u_candidates: vec![0.5],
            h1_candidates: vec![0.001, 0.125],
            h2_candidates: vec![1.0],
            h_candidates: vec![0.2],
        };
        let res = tune(
            &series,
            &grid,
            &smoothing(Kernel::Epanechnikov),
            &TuneOptions::default(),
        )
        .unwrap();
        assert_eq!(res.best.h1, 0.125);
        assert_eq!(res.table.len(), 2);
        assert_eq!(res.table[0].score, f64::INFINITY);
        assert_eq!(res.score, res.table[1].score);
    }

    #[test]
    fn single_candidate_grid() {
        let series = path(1 << 12, 5);
        let grid = TuneGrid {
            u_candidates: vec![0.5],
            h1_candidates: vec![0.125],
            h2_candidates: vec![1.0],
            h_candidates: vec![0.3],
        };
        let res = tune(
            &series,
            &grid,
            &smoothing(Kernel::Biweight),
            &TuneOptions::default(),
        )
        .unwrap();
        assert_eq!(res.best, point(0.3));
    }

    #[test]
    fn all_infeasible_is_an_error() {
        let series = path(64, 6);
        let grid = TuneGrid {
            u_candidates: vec![1.0],
            h1_candidates: vec![0.01],
            h2_candidates: vec![0.01],
            h_candidates: vec![0.2],
        };
        let err = tune(
            &series,
            &grid,
            &smoothing(Kernel::Uniform),
            &TuneOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoFeasibleTuningPoint));
    }

    #[test]
    fn ties_prefer_smaller_bandwidth() {
        // h = 1 and h = 2 both cover every design point with flat weights
        let series = path(1 << 12, 7);
        let grid = TuneGrid {
            u_candidates: vec![0.5],
            h1_candidates: vec![0.125],
            h2_candidates: vec![1.0],
            h_candidates: vec![1.0, 0.99999],
        };
        let cfg = smoothing(Kernel::Uniform);
        let res = tune(&series, &grid, &cfg, &TuneOptions::default()).unwrap();
        assert_eq!(res.table[0].score, res.table[1].score);
        assert_eq!(res.best.h, 0.99999);
    }

    #[test]
    fn tuning_is_deterministic_and_translation_invariant() {
        let series = path(1 << 12, 8);
        let snap = |v: f64| (v * (1u64 << 30) as f64).round() / (1u64 << 30) as f64;
        let series = ObservationSeries::new(series.y.iter().map(|v| snap(*v)).collect()).unwrap();
        let shifted = ObservationSeries::new(series.y.iter().map(|v| v + 2.0).collect()).unwrap();
        let grid = TuneGrid::default_for(&series).unwrap();
        assert_eq!(grid.points().len(), 4 * 3 * 3 * 4);
        let cfg = smoothing(Kernel::Epanechnikov);
        let opts = TuneOptions::default();
        let a = tune(&series, &grid, &cfg, &opts).unwrap();
        let b = tune(&series, &grid, &cfg, &opts).unwrap();
        let c = tune(&shifted, &grid, &cfg, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn robust_scale_follows_price_scale() {
        let series = path(1 << 12, 9);
        let doubled = ObservationSeries::new(series.y.iter().map(|v| 2.0 * v).collect()).unwrap();
        let a = robust_scale(&series).unwrap();
        let b = robust_scale(&doubled).unwrap();
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-12);
        assert!(robust_scale(&ObservationSeries::new(vec![0.0; 64]).unwrap()).is_err());
    }

    #[test]
    fn empty_grid_is_rejected() {
        let grid = TuneGrid {
            u_candidates: vec![],
            h1_candidates: vec![1.0],
            h2_candidates: vec![1.0],
            h_candidates: vec![0.1],
        };
        assert!(grid.validate().is_err());
    }
}
