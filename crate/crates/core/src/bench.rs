//! Monte Carlo convergence benchmark.
//!
//! For every `n` in the ladder, `R` paths are simulated with seeds
//! `base_seed + i`, estimated with the bandwidth schedule
//! `h = h0·n^{-1/(2(2α+1))}` (or per-replicate GCV), and compared with the
//! ground truth at the coarse-bin midpoints.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfn::DEFAULT_FLOOR;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::oracle::cu_adjust;
use crate::pipeline::{estimate, EstimateParams};
use crate::preaverage::make_layout;
use crate::smoothing::{Kernel, SmoothingConfig};
use crate::tuning::{tune, GcvForm, TuneGrid, TuneOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BandwidthRule {
    Schedule {
        h0: f64,
        alpha: f64,
    },
    /// GCV over `candidates` for each replicate, `u`, `h1`, `h2` held fixed.
    Gcv {
        candidates: Vec<f64>,
        form: GcvForm,
    },
}

impl BandwidthRule {
    pub fn scheduled(&self, n: usize) -> Option<f64> {
        match self {
            BandwidthRule::Schedule { h0, alpha } => {
                Some((h0 * (n as f64).powf(-1.0 / (2.0 * (2.0 * alpha + 1.0)))).min(1.0))
            }
            BandwidthRule::Gcv { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub model: Model,
    pub ladder: Vec<usize>,
    pub replicates: usize,
    pub base_seed: u64,
    pub u: f64,
    pub h1: f64,
    pub h2: f64,
    pub floor: f64,
    pub kernel: Kernel,
    pub order: usize,
    pub bandwidth: BandwidthRule,
}

impl BenchConfig {
    /// Defaults used by the convergence benchmark: `u = 0.5`, `h1 = 1/8`,
    /// `h2 = 1`, Epanechnikov Nadaraya–Watson, `h = n^{-1/4}`.
    pub fn new(model: Model, ladder: Vec<usize>, replicates: usize, base_seed: u64) -> Self {
        Self {
            model,
            ladder,
            replicates,
            base_seed,
            u: 0.5,
            h1: 0.125,
            h2: 1.0,
            floor: DEFAULT_FLOOR,
            kernel: Kernel::Epanechnikov,
            order: 1,
            bandwidth: BandwidthRule::Schedule {
                h0: 1.0,
                alpha: 0.5,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ladder.is_empty() {
            return Err(Error::config("benchmark ladder is empty"));
        }
        if self.replicates == 0 {
            return Err(Error::config("need at least one replicate"));
        }
        self.model.validate()?;
        match &self.bandwidth {
            BandwidthRule::Schedule { h0, alpha } => {
                if !(*h0 > 0.0 && *alpha > 0.0) {
                    return Err(Error::config(
                        "bandwidth schedule needs h0 > 0 and alpha > 0",
                    ));
                }
            }
            BandwidthRule::Gcv { candidates, .. } => {
                if candidates.is_empty() || candidates.iter().any(|h| !(*h > 0.0 && *h <= 1.0)) {
                    return Err(Error::config("GCV bandwidth candidates must lie in (0, 1]"));
                }
            }
        }
        for &n in &self.ladder {
            make_layout(n, self.h1, self.h2).map_err(|e| {
                Error::config(format!("ladder point n = {n} has no feasible layout: {e}"))
            })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchPoint {
    pub n: usize,
    /// Bandwidth used, or the mean selected bandwidth under GCV.
    pub h: f64,
    pub n2: usize,
    pub rmse_r: f64,
    pub rmse_c: f64,
    pub replicates: usize,
    /// Replicates whose normalisation was degenerate; excluded from `rmse_r`.
    pub degenerate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub points: Vec<BenchPoint>,
    /// Least-squares slope of `ln rmse_r` on `ln n`; present with three or
    /// more ladder points.
    pub slope: Option<f64>,
    pub replicates: usize,
    pub seeds: Vec<u64>,
    pub wall_clock_secs: f64,
}

struct Replicate {
    sq_r: Option<f64>,
    sq_c: f64,
    h: f64,
}

fn run_replicate(cfg: &BenchConfig, n: usize, seed: u64, jump_adjust: f64) -> Result<Replicate> {
    let series = cfg.model.simulate(n, seed)?;
    let truth = series
        .truth
        .as_ref()
        .ok_or_else(|| Error::Internal("simulated path lacks ground truth".into()))?;
    let mut smoothing = SmoothingConfig {
        kernel: cfg.kernel,
        order: cfg.order,
        bandwidth: 1.0,
        ridge: 0.0,
    };
    let h = match &cfg.bandwidth {
        BandwidthRule::Schedule { .. } => cfg.bandwidth.scheduled(n).unwrap_or(1.0),
        BandwidthRule::Gcv { candidates, form } => {
            let grid = TuneGrid {
                u_candidates: vec![cfg.u],
                h1_candidates: vec![cfg.h1],
                h2_candidates: vec![cfg.h2],
                h_candidates: candidates.clone(),
            };
            let opts = TuneOptions {
                floor: cfg.floor,
                form: *form,
            };
            tune(&series, &grid, &smoothing, &opts)?.best.h
        }
    };
    smoothing.bandwidth = h;
    let params = EstimateParams {
        u: cfg.u,
        h1: cfg.h1,
        h2: cfg.h2,
        floor: cfg.floor,
        smoothing,
    };
    let n2 = make_layout(n, cfg.h1, cfg.h2)?.n2;
    let mids: Vec<f64> = (0..n2).map(|l| (l as f64 + 0.5) / n2 as f64).collect();
    let est = estimate(&series, &params, Some(&mids))?;

    let sq_c = mids
        .iter()
        .zip(&est.c_tilde)
        .map(|(t, c)| {
            let target = truth.vol_at(*t) + truth.jump_scale_at(*t) * jump_adjust;
            (c - target).powi(2)
        })
        .sum::<f64>()
        / n2 as f64;
    let sq_r = est.r_tilde.as_ref().map(|r| {
        mids.iter()
            .zip(r)
            .map(|(t, r)| (r - truth.rate_at(*t)).powi(2))
            .sum::<f64>()
            / n2 as f64
    });
    Ok(Replicate { sq_r, sq_c, h })
}

fn jumps_of(model: &Model) -> crate::sim::JumpSpec {
    match model {
        Model::TimeChanged(m) => m.triplet.jumps,
        Model::Ito(m) => m.jumps,
    }
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let start = Instant::now();
    let seeds: Vec<u64> = (0..cfg.replicates as u64)
        .map(|i| cfg.base_seed.wrapping_add(i))
        .collect();
    let jumps = jumps_of(&cfg.model);

    let mut points = Vec::with_capacity(cfg.ladder.len());
    for &n in &cfg.ladder {
        let layout = make_layout(n, cfg.h1, cfg.h2)?;
        let jump_adjust = cu_adjust(cfg.u, &jumps, layout.n0)?;
        let reps: Vec<Replicate> = seeds
            .par_iter()
            .map(|&seed| run_replicate(cfg, n, seed, jump_adjust))
            .collect::<Result<_>>()?;

        let ok: Vec<f64> = reps.iter().filter_map(|r| r.sq_r).collect();
        let rmse_r = if ok.is_empty() {
            f64::NAN
        } else {
            (ok.iter().sum::<f64>() / ok.len() as f64).sqrt()
        };
        let rmse_c = (reps.iter().map(|r| r.sq_c).sum::<f64>() / reps.len() as f64).sqrt();
        points.push(BenchPoint {
            n,
            h: reps.iter().map(|r| r.h).sum::<f64>() / reps.len() as f64,
            n2: layout.n2,
            rmse_r,
            rmse_c,
            replicates: reps.len(),
            degenerate: reps.len() - ok.len(),
        });
    }

    let slope = (points.len() >= 3 && points.iter().all(|p| p.rmse_r.is_finite())).then(|| {
        let x: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
        let y: Vec<f64> = points.iter().map(|p| p.rmse_r.ln()).collect();
        ols_slope(&x, &y)
    });

    Ok(BenchReport {
        points,
        slope,
        replicates: cfg.replicates,
        seeds,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{JumpSpec, NoiseSpec, RateSpec};

    fn model() -> Model {
        Model::build(
            false,
            1.0,
            RateSpec::sine(0.5, 1),
            JumpSpec::None,
            NoiseSpec::gaussian(0.005),
        )
        .unwrap()
    }

    #[test]
    fn single_point_has_no_slope() {
        let report = run_bench(&BenchConfig::new(model(), vec![1 << 12], 1, 9)).unwrap();
        assert_eq!(report.points.len(), 1);
        assert!(report.slope.is_none());
        assert!(report.points[0].rmse_r >= 0.0);
        assert_eq!(report.seeds, vec![9]);
    }

    #[test]
    fn infeasible_ladder_fails_up_front() {
        let err = run_bench(&BenchConfig::new(model(), vec![16, 1 << 12], 1, 0)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn bench_is_deterministic() {
        let cfg = BenchConfig::new(model(), vec![1 << 12, 1 << 13, 1 << 14], 2, 5);
        let a = run_bench(&cfg).unwrap();
        let b = run_bench(&cfg).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.slope, b.slope);
        assert!(a.slope.is_some());
        assert!(a.points.iter().all(|p| p.degenerate == 0));
    }

    #[test]
    fn schedule_follows_smoothness() {
        let rule = BandwidthRule::Schedule {
            h0: 1.0,
            alpha: 0.5,
        };
        assert!((rule.scheduled(1 << 16).unwrap() - 0.0625).abs() < 1e-15);
        assert_eq!(rule.scheduled(1).unwrap(), 1.0);
    }

    #[test]
    fn slope_of_power_law() {
        let x: Vec<f64> = [10.0f64, 100.0, 1000.0].iter().map(|v| v.ln()).collect();
        let y: Vec<f64> = x.iter().map(|v| -0.5 * v + 2.0).collect();
        assert!((ols_slope(&x, &y) + 0.5).abs() < 1e-12);
    }
}
