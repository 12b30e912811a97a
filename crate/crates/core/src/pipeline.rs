//! End-to-end estimation: pre-averaging, local estimates, smoothing and
//! normalisation, with errors tagged by the stage that raised them.

use serde::{Deserialize, Serialize};

use crate::charfn::{spot_vol, LocalEstimates, DEFAULT_FLOOR};
use crate::error::{Error, Result};
use crate::preaverage::{make_layout, preaverage, BinLayout};
use crate::sim::ObservationSeries;
use crate::smoothing::{default_grid, normalised_local, Smoother, SmoothingConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateParams {
    pub u: f64,
    pub h1: f64,
    pub h2: f64,
    pub floor: f64,
    pub smoothing: SmoothingConfig,
}

impl Default for EstimateParams {
    fn default() -> Self {
        Self {
            u: 1.0,
            h1: 1.0,
            h2: 1.0,
            floor: DEFAULT_FLOOR,
            smoothing: SmoothingConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub layout: BinLayout,
    pub local: LocalEstimates,
    pub grid: Vec<f64>,
    pub c_tilde: Vec<f64>,
    /// `None` when the normalising mean is not positive.
    pub r_tilde: Option<Vec<f64>>,
    pub rhat: Option<Vec<f64>>,
    pub denom: f64,
    /// Share of kernel-weighted bins whose guard failed, per grid point.
    pub guard_fraction: Vec<f64>,
    pub ridged: Vec<bool>,
}

impl Estimate {
    pub fn is_degenerate(&self) -> bool {
        self.r_tilde.is_none()
    }

    pub fn rate(&self) -> Result<&[f64]> {
        self.r_tilde
            .as_deref()
            .ok_or(Error::DegenerateNormalisation { denom: self.denom })
    }
}

/// Runs the estimator on `grid`, or on the default grid of bin midpoints and
/// endpoints. A degenerate normalisation is reported through
/// [`Estimate::is_degenerate`] rather than as an error so that `c̃` survives.
pub fn estimate(
    series: &ObservationSeries,
    params: &EstimateParams,
    grid: Option<&[f64]>,
) -> Result<Estimate> {
    let layout = make_layout(series.n(), params.h1, params.h2).map_err(|e| e.at_stage("layout"))?;
    let pre = preaverage(series, &layout).map_err(|e| e.at_stage("preaverage"))?;
    let local =
        spot_vol(&pre, params.u, params.floor).map_err(|e| e.at_stage("local estimates"))?;

    let grid = grid.map_or_else(|| default_grid(layout.n2), <[f64]>::to_vec);
    let smoother =
        Smoother::new(&grid, layout.n2, &params.smoothing).map_err(|e| e.at_stage("smoothing"))?;
    let c_tilde = smoother.apply(&local.chat);

    let (r_tilde, rhat, denom) = match normalised_local(&local.chat) {
        Ok((denom, rhat)) => (
            Some(c_tilde.iter().map(|c| c / denom).collect()),
            Some(rhat),
            denom,
        ),
        Err(Error::DegenerateNormalisation { denom }) => (None, None, denom),
        Err(e) => return Err(e.at_stage("normalisation")),
    };

    let guard_fraction = smoother
        .rows
        .iter()
        .map(|row| {
            let (used, failed) = row
                .iter()
                .zip(&local.guard_ok)
                .filter(|(w, _)| **w != 0.0)
                .fold((0usize, 0usize), |(u, f), (_, ok)| {
                    (u + 1, f + usize::from(!ok))
                });
            if used == 0 {
                0.0
            } else {
                failed as f64 / used as f64
            }
        })
        .collect();

    Ok(Estimate {
        layout,
        local,
        grid,
        c_tilde,
        r_tilde,
        rhat,
        denom,
        guard_fraction,
        ridged: smoother.ridged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{LevyTriplet, NoiseSpec, RateSpec, TimeChangedModel};
    use crate::smoothing::Kernel;

    fn params() -> EstimateParams {
        EstimateParams {
            u: 0.5,
            h1: 0.125,
            h2: 1.0,
            floor: DEFAULT_FLOOR,
            smoothing: SmoothingConfig {
                kernel: Kernel::Epanechnikov,
                order: 1,
                bandwidth: 0.2,
                ridge: 0.0,
            },
        }
    }

    #[test]
    fn constant_series_is_degenerate() {
        let series = ObservationSeries::new(vec![1.25; 4096]).unwrap();
        let est = estimate(&series, &params(), None).unwrap();
        assert!(est.local.phi.iter().all(|p| *p == 1.0));
        assert!(est.local.psi.iter().all(|p| *p == 1.0));
        assert!(est.c_tilde.iter().all(|c| *c == 0.0));
        assert!(est.is_degenerate());
        assert!(matches!(
            est.rate(),
            Err(Error::DegenerateNormalisation { .. })
        ));
    }

    #[test]
    fn constant_rate_path_gives_flat_rate() {
        let model = TimeChangedModel::new(
            LevyTriplet::brownian(1.0),
            RateSpec::Constant,
            NoiseSpec::gaussian(0.005),
        );
        let series = model.simulate(1 << 16, 11).unwrap();
        let est = estimate(&series, &params(), None).unwrap();
        for r in est.rate().unwrap() {
            assert!((0.8..=1.2).contains(r), "{r}");
        }
        assert_eq!(est.grid.len(), est.layout.n2 + 2);
        assert!(est.guard_fraction.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn translation_invariance_is_exact() {
        let model = TimeChangedModel::new(
            LevyTriplet::brownian(1.0),
            RateSpec::sine(0.5, 1),
            NoiseSpec::gaussian(0.005),
        );
        let raw = model.simulate(1 << 12, 2).unwrap();
        // dyadic rounding makes the shifted increments bit-identical
        let snap = |v: f64| (v * (1u64 << 30) as f64).round() / (1u64 << 30) as f64;
        let series = ObservationSeries::new(raw.y.iter().map(|v| snap(*v)).collect()).unwrap();
        let shifted = ObservationSeries::new(series.y.iter().map(|v| v + 4.0).collect()).unwrap();
        let a = estimate(&series, &params(), None).unwrap();
        let b = estimate(&shifted, &params(), None).unwrap();
        assert_eq!(a.c_tilde, b.c_tilde);
        assert_eq!(a.r_tilde, b.r_tilde);
    }

    #[test]
    fn layout_errors_carry_the_stage() {
        let series = ObservationSeries::new(vec![0.0; 16]).unwrap();
        let mut p = params();
        p.h1 = 0.01;
        let err = estimate(&series, &p, None).unwrap_err();
        assert!(err.to_string().starts_with("layout:"));
        assert_eq!(err.exit_code(), 2);
    }
}
