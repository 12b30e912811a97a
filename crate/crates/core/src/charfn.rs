//! Per-coarse-bin characteristic-function estimates and bias-corrected spot
//! volatilities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::LocalCharacteristics;
use crate::preaverage::{BinLayout, PreAveraged};
use crate::sim::GroundTruth;

pub const DEFAULT_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalEstimates {
    pub u: f64,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub phi2u: Vec<f64>,
    pub tau2: Vec<f64>,
    pub chat: Vec<f64>,
    /// `φ̂_l(u) ≥ floor` and `ψ̂_l(u) ≥ floor`.
    pub guard_ok: Vec<bool>,
    pub floor: f64,
    pub layout: BinLayout,
}

impl LocalEstimates {
    pub fn n2(&self) -> usize {
        self.chat.len()
    }

    pub fn guard_failures(&self) -> usize {
        self.guard_ok.iter().filter(|ok| !**ok).count()
    }
}

/// `(1/n1) Σ_{k ∈ K_l} cos(u X̂_k)` at `u` and at `2u`.
pub fn local_charfn(pre: &PreAveraged, u: f64) -> (Vec<f64>, Vec<f64>) {
    let layout = &pre.layout;
    let inv = 1.0 / layout.n1 as f64;
    let mut phi = Vec::with_capacity(layout.n2);
    let mut phi2u = Vec::with_capacity(layout.n2);
    for l in 0..layout.n2 {
        let bin = &pre.xhat[layout.coarse_bin_range(l)];
        phi.push(inv * bin.iter().map(|x| (u * x).cos()).sum::<f64>());
        phi2u.push(inv * bin.iter().map(|x| (2.0 * u * x).cos()).sum::<f64>());
    }
    (phi, phi2u)
}

/// `(1/n1) Σ_{k ∈ K_l} exp(-κ u² σ̂²_k)`.
pub fn local_noise_cf(pre: &PreAveraged, u: f64) -> Vec<f64> {
    let layout = &pre.layout;
    let inv = 1.0 / layout.n1 as f64;
    let rate = layout.kappa * (u * u);
    (0..layout.n2)
        .map(|l| {
            let bin = &pre.sigma2hat[layout.coarse_bin_range(l)];
            inv * bin.iter().map(|s| (-rate * s).exp()).sum::<f64>()
        })
        .collect()
}

/// `τ̂² = (1/n1)((1 + φ̂(2u))/(2 φ̂(u)²) - 1)`; `phi_l` must already be clamped.
pub fn bias_correction(phi_l: f64, phi2u_l: f64, n1: usize) -> f64 {
    ((1.0 + phi2u_l) / (2.0 * phi_l * phi_l) - 1.0) / n1 as f64
}

/// `ĉ_l(u) = -(log|φ̂_l(u)/ψ̂_l(u)| + τ̂²_l(u)/2)/u²`, with `φ̂` and `ψ̂`
/// clamped from below at `floor` before they are logged or inverted.
pub fn spot_vol(pre: &PreAveraged, u: f64, floor: f64) -> Result<LocalEstimates> {
    if u == 0.0 || !u.is_finite() {
        return Err(Error::Domain(format!(
            "frequency must be nonzero and finite, got {u}"
        )));
    }
    if !(floor > 0.0 && floor < 1.0) {
        return Err(Error::config(format!(
            "guard floor must lie in (0, 1), got {floor}"
        )));
    }
    let (phi, phi2u) = local_charfn(pre, u);
    let psi = local_noise_cf(pre, u);
    let n1 = pre.layout.n1;
    let u2 = u * u;

    let mut tau2 = Vec::with_capacity(phi.len());
    let mut chat = Vec::with_capacity(phi.len());
    let mut guard_ok = Vec::with_capacity(phi.len());
    for l in 0..phi.len() {
        guard_ok.push(phi[l] >= floor && psi[l] >= floor);
        // a negative φ̂ below -floor keeps its magnitude, as in |φ̂/ψ̂|
        let phi_c = if phi[l].abs() >= floor { phi[l] } else { floor };
        let psi_c = psi[l].max(floor);
        let t2 = bias_correction(phi_c, phi2u[l], n1);
        tau2.push(t2);
        chat.push(-((phi_c / psi_c).abs().ln() + 0.5 * t2) / u2);
    }
    Ok(LocalEstimates {
        u,
        phi,
        psi,
        phi2u,
        tau2,
        chat,
        guard_ok,
        floor,
        layout: pre.layout,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjustedVolPoint {
    pub t: f64,
    pub value: f64,
}

/// Ground-truth `c_t(u)` for a simulated path; not used by the estimator.
pub fn adjusted_vol_target(
    truth: &GroundTruth,
    u: f64,
    layout: &BinLayout,
    t: f64,
) -> Result<AdjustedVolPoint> {
    let value = LocalCharacteristics::at(truth, t).adjusted_vol(u, layout.n0)?;
    Ok(AdjustedVolPoint { t, value })
}
