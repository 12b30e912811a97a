//! Local-polynomial smoothing of the spot estimates `ĉ_l(u)` and
//! normalisation into the rate estimate `r̃_t(u)`.
//!
//! Design points are the left bin edges `l/n2`. The weights are
//!
//! ```text
//! W_l(t) = K(λ_l) U(0)ᵀ V(t)⁻¹ U(λ_l) / (n2 h),   λ_l = (t - l/n2)/h,
//! U(λ)   = (1, λ, λ²/2!, …, λ^{N-1}/(N-1)!)ᵀ,
//! V(t)   = Σ_l K(λ_l) U(λ_l) U(λ_l)ᵀ / (n2 h),
//! ```
//!
//! so `N = 1` is the Nadaraya–Watson estimator.

use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::charfn::LocalEstimates;
use crate::error::{Error, Result};

/// Condition number above which the ridge fallback kicks in.
const MAX_CONDITION: f64 = 1e12;
const FALLBACK_RIDGE: f64 = 1e-10;

/// Beta(k, k) densities rescaled to `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Uniform,
    Epanechnikov,
    Biweight,
}

impl Kernel {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if x.abs() > 1.0 {
            return 0.0;
        }
        let s = 1.0 - x * x;
        match self {
            Kernel::Uniform => 0.5,
            Kernel::Epanechnikov => 0.75 * s,
            Kernel::Biweight => 15.0 / 16.0 * s * s,
        }
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Kernel::Uniform),
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            "biweight" => Ok(Kernel::Biweight),
            other => Err(Error::config(format!("unknown kernel '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    pub kernel: Kernel,
    /// Number of polynomial coefficients `N`; the fitted degree is `N - 1`.
    pub order: usize,
    pub bandwidth: f64,
    /// Ridge added to `V(t)` at every evaluation.
    #[serde(default)]
    pub ridge: f64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            kernel: Kernel::Epanechnikov,
            order: 1,
            bandwidth: 0.1,
            ridge: 0.0,
        }
    }
}

impl SmoothingConfig {
    pub fn with_bandwidth(mut self, h: f64) -> Self {
        self.bandwidth = h;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::config("polynomial order N must be at least 1"));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth <= 1.0) {
            return Err(Error::config(format!(
                "bandwidth must lie in (0, 1], got {}",
                self.bandwidth
            )));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::config("ridge must be finite and nonnegative"));
        }
        Ok(())
    }
}

/// Weight vector `W_l(t)`, `l = 0..n2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub values: Vec<f64>,
    /// Set when `V(t)` was ill-conditioned and the fallback ridge was added.
    pub ridged: bool,
}

pub fn lp_weights(t: f64, n2: usize, cfg: &SmoothingConfig) -> Result<Weights> {
    cfg.validate()?;
    let order = cfg.order;
    let h = cfg.bandwidth;
    let n2f = n2 as f64;
    let scale = 1.0 / (n2f * h);

    let lo = ((t - h) * n2f).ceil().max(0.0) as usize;
    let hi = (((t + h) * n2f).floor().min(n2f - 1.0)).max(-1.0);
    let window: Vec<(usize, f64, f64)> = if hi < lo as f64 {
        Vec::new()
    } else {
        (lo..=hi as usize)
            .filter_map(|l| {
                let lam = (t - l as f64 / n2f) / h;
                let k = cfg.kernel.eval(lam);
                (k > 0.0).then_some((l, lam, k))
            })
            .collect()
    };
    if window.len() < order {
        return Err(Error::BandwidthTooSmall {
            t,
            found: window.len(),
            needed: order,
        });
    }

    let basis = |lam: f64| -> DVector<f64> {
        let mut v = DVector::zeros(order);
        let mut term = 1.0;
        for p in 0..order {
            if p > 0 {
                term *= lam / p as f64;
            }
            v[p] = term;
        }
        v
    };

    let mut v = DMatrix::<f64>::zeros(order, order);
    for &(_, lam, k) in &window {
        let u = basis(lam);
        v += (&u * u.transpose()) * (k * scale);
    }
    for i in 0..order {
        v[(i, i)] += cfg.ridge;
    }

    let mut ridged = false;
    let eig = v.clone().symmetric_eigen();
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if !(min > 0.0) || max / min > MAX_CONDITION {
        let bump = FALLBACK_RIDGE * v.trace() / order as f64;
        for i in 0..order {
            v[(i, i)] += bump;
        }
        ridged = true;
    }

    let mut e1 = DVector::zeros(order);
    e1[0] = 1.0;
    let coef = match v.clone().cholesky() {
        Some(chol) => chol.solve(&e1),
        None => v
            .lu()
            .solve(&e1)
            .ok_or_else(|| Error::Internal(format!("singular local design at t = {t}")))?,
    };

    let mut values = vec![0.0; n2];
    for &(l, lam, k) in &window {
        values[l] = scale * k * coef.dot(&basis(lam));
    }
    Ok(Weights { values, ridged })
}

/// The `n2` design midpoints together with both endpoints.
pub fn default_grid(n2: usize) -> Vec<f64> {
    let mut grid = Vec::with_capacity(n2 + 2);
    grid.push(0.0);
    grid.extend((0..n2).map(|l| (l as f64 + 0.5) / n2 as f64));
    grid.push(1.0);
    grid
}

/// Row-per-query-point smoother matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Smoother {
    pub grid: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub ridged: Vec<bool>,
}

impl Smoother {
    pub fn new(grid: &[f64], n2: usize, cfg: &SmoothingConfig) -> Result<Self> {
        if let Some(t) = grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::config(format!("query time {t} lies outside [0, 1]")));
        }
        let mut rows = Vec::with_capacity(grid.len());
        let mut ridged = Vec::with_capacity(grid.len());
        for &t in grid {
            let w = lp_weights(t, n2, cfg)?;
            rows.push(w.values);
            ridged.push(w.ridged);
        }
        Ok(Self {
            grid: grid.to_vec(),
            rows,
            ridged,
        })
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(values).map(|(w, v)| w * v).sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveEstimate {
    pub grid: Vec<f64>,
    pub c_tilde: Vec<f64>,
    pub r_tilde: Option<Vec<f64>>,
    /// `(1/n2) Σ_m ĉ_m(u)`.
    pub denom: Option<f64>,
    /// Normalised local estimates `r̂_l = ĉ_l / denom`.
    pub rhat: Option<Vec<f64>>,
    pub ridged: Vec<bool>,
}

pub fn smooth_curve(
    local: &LocalEstimates,
    cfg: &SmoothingConfig,
    grid: &[f64],
) -> Result<CurveEstimate> {
    let smoother = Smoother::new(grid, local.n2(), cfg)?;
    Ok(CurveEstimate {
        grid: grid.to_vec(),
        c_tilde: smoother.apply(&local.chat),
        r_tilde: None,
        denom: None,
        rhat: None,
        ridged: smoother.ridged,
    })
}

/// `r̂_l = ĉ_l / ((1/n2) Σ_m ĉ_m)`.
pub fn normalised_local(chat: &[f64]) -> Result<(f64, Vec<f64>)> {
    let denom = chat.iter().sum::<f64>() / chat.len() as f64;
    if !(denom > 0.0 && denom.is_finite()) {
        return Err(Error::DegenerateNormalisation { denom });
    }
    Ok((denom, chat.iter().map(|c| c / denom).collect()))
}

pub fn normalise_rate(
    local: &LocalEstimates,
    cfg: &SmoothingConfig,
    grid: &[f64],
) -> Result<CurveEstimate> {
    let (denom, rhat) = normalised_local(&local.chat)?;
    let mut curve = smooth_curve(local, cfg, grid)?;
    curve.r_tilde = Some(curve.c_tilde.iter().map(|c| c / denom).collect());
    curve.denom = Some(denom);
    curve.rhat = Some(rhat);
    Ok(curve)
}
