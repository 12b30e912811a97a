//! Bin layout, sine-weighted pre-averaged increments and local noise levels.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::ObservationSeries;

/// Bin counts for the two-level partition of `[0, 1]`.
///
/// `n0 = n1·n2` pre-averaging bins of `n/n0` observations each are grouped
/// into `n2` coarse bins of `n1` pre-averaging bins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinLayout {
    pub n: usize,
    pub h1: f64,
    pub h2: f64,
    pub n1: usize,
    pub n2: usize,
    pub n0: usize,
    pub kappa: f64,
}

impl BinLayout {
    /// `n1 = max(1, round(n^{1/8}/h1))`, `n2 = max(1, round(n^{3/8}/h2))`.
    pub fn new(n: usize, h1: f64, h2: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::config(format!(
                "need at least 4 observations for a bin layout, got {n}"
            )));
        }
        for (name, h) in [("h1", h1), ("h2", h2)] {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::config(format!("{name} must be positive, got {h}")));
            }
        }
        let nf = n as f64;
        let n1 = bin_count(nf.powf(0.125) / h1);
        let n2 = bin_count(nf.powf(0.375) / h2);
        let n0 = n1.saturating_mul(n2);
        if n0 > n / 2 {
            return Err(Error::BinsTooFine { n, h1, h2, n0 });
        }
        let n0f = n0 as f64;
        Ok(Self {
            n,
            h1,
            h2,
            n1,
            n2,
            n0,
            kappa: 4.0 * PI * PI * n0f * n0f / nf,
        })
    }

    /// Pre-averaging bin containing observation index `j`.
    #[inline]
    pub fn fine_bin(&self, j: usize) -> usize {
        // j ∈ J_k  ⇔  k·n ≤ j·n0 < (k+1)·n
        ((j as u128 * self.n0 as u128) / self.n as u128) as usize
    }

    /// Range of observation indices in `J_k`.
    pub fn fine_bin_range(&self, k: usize) -> std::ops::Range<usize> {
        let start = (k as u128 * self.n as u128).div_ceil(self.n0 as u128) as usize;
        let end = ((k as u128 + 1) * self.n as u128).div_ceil(self.n0 as u128) as usize;
        start..end.min(self.n)
    }

    /// Coarse bin `K_l` as a range of pre-averaging bin indices.
    pub fn coarse_bin_range(&self, l: usize) -> std::ops::Range<usize> {
        l * self.n1..(l + 1) * self.n1
    }
}

fn bin_count(x: f64) -> usize {
    let r = x.round();
    if r >= usize::MAX as f64 {
        usize::MAX
    } else {
        (r as usize).max(1)
    }
}

pub fn make_layout(n: usize, h1: f64, h2: f64) -> Result<BinLayout> {
    BinLayout::new(n, h1, h2)
}

/// Weight `p_j = √n0 · 2 sin(2π n0 j / n)` applied to the increment `Y_{j+1} - Y_j`.
pub fn scaling_weight(j: usize, layout: &BinLayout) -> f64 {
    debug_assert!(j < layout.n);
    // reduce the phase modulo one full period before scaling
    let phase = ((j as u128 * layout.n0 as u128) % layout.n as u128) as f64 / layout.n as f64;
    (layout.n0 as f64).sqrt() * 2.0 * (2.0 * PI * phase).sin()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreAveraged {
    pub xhat: Vec<f64>,
    pub sigma2hat: Vec<f64>,
    pub layout: BinLayout,
}

/// Computes `X̂_k` and `σ̂²_k` over each pre-averaging bin, using only index
/// pairs `(j, j+1)` that both fall in `J_k`.
pub fn preaverage(series: &ObservationSeries, layout: &BinLayout) -> Result<PreAveraged> {
    let y = &series.y;
    if y.len() != layout.n {
        return Err(Error::config(format!(
            "layout built for n = {} but series has {} observations",
            layout.n,
            y.len()
        )));
    }
    let noise_scale = layout.n0 as f64 / (2.0 * layout.n as f64);
    let mut xhat = Vec::with_capacity(layout.n0);
    let mut sigma2hat = Vec::with_capacity(layout.n0);
    for k in 0..layout.n0 {
        let range = layout.fine_bin_range(k);
        if range.len() < 2 {
            return Err(Error::Internal(format!(
                "pre-averaging bin {k} holds no increment pair"
            )));
        }
        let mut xs = 0.0;
        let mut qv = 0.0;
        for j in range.start..range.end - 1 {
            let d = y[j + 1] - y[j];
            xs += scaling_weight(j, layout) * d;
            qv += d * d;
        }
        xhat.push(xs);
        sigma2hat.push(noise_scale * qv);
    }
    Ok(PreAveraged {
        xhat,
        sigma2hat,
        layout: *layout,
    })
}
