//! Population quantities targeted by the estimator, by closed form and by
//! quadrature.
//!
//! Stable jumps use the convention of [`JumpSpec::SymmetricStable`]: the jump
//! part over unit time has characteristic function `exp(-(γ|u|)^β)`, which
//! corresponds to the Lévy density
//!
//! ```text
//! ν(dx) = C |x|^{-1-β} dx,   C = γ^β / (2 I_β),
//! I_β = ∫_0^∞ (1 - cos y) y^{-1-β} dy = Γ(2-β) cos(πβ/2) / (β(1-β))   (β ≠ 1),
//! I_1 = π/2.
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::preaverage::BinLayout;
use crate::quad::{adaptive_simpson, GaussLegendre};
use crate::sim::{GroundTruth, JumpSize, JumpSpec, LevyTriplet};

const W_PANELS: usize = 256;
const W_ORDER: usize = 8;
const X_TOL: f64 = 1e-12;
/// Gaussian jump densities are integrated over `mean ± GAUSS_SPAN·sd`.
const GAUSS_SPAN: f64 = 12.0;

/// Spot characteristic exponent
/// `θ(u) = ibu - cu²/2 + ∫ (e^{iux} - 1 - iux 1(|x| < 1)) ν(dx)`, closed form.
pub fn theta(u: f64, triplet: &LevyTriplet) -> Result<Complex64> {
    triplet.validate()?;
    let diffusion = Complex64::new(-0.5 * triplet.vol * u * u, triplet.drift * u);
    Ok(diffusion + theta_jump(u, &triplet.jumps))
}

/// Jump part of [`theta`], closed form.
pub fn theta_jump(u: f64, jumps: &JumpSpec) -> Complex64 {
    let i = Complex64::i();
    match *jumps {
        JumpSpec::None => Complex64::new(0.0, 0.0),
        JumpSpec::CompoundPoisson { intensity, size } => {
            let cf = match size {
                JumpSize::TwoPoint { a, p } => {
                    (i * u * a).exp() * p + (-i * u * a).exp() * (1.0 - p)
                }
                JumpSize::Gaussian { mean, sd } => {
                    Complex64::new(-0.5 * sd * sd * u * u, u * mean).exp()
                }
            };
            (cf - 1.0) * intensity - i * u * jumps.small_jump_mean()
        }
        JumpSpec::SymmetricStable { index, scale } => {
            Complex64::new(-(scale * u.abs()).powf(index), 0.0)
        }
    }
}

/// Jump part of [`theta`], integrating against the Lévy measure numerically.
pub fn theta_jump_quadrature(u: f64, jumps: &JumpSpec) -> Complex64 {
    let integrand = |x: f64| {
        let comp = if x.abs() < 1.0 { u * x } else { 0.0 };
        Complex64::new((u * x).cos() - 1.0, (u * x).sin() - comp)
    };
    match *jumps {
        JumpSpec::None => Complex64::new(0.0, 0.0),
        JumpSpec::CompoundPoisson { intensity, size } => match size {
            JumpSize::TwoPoint { a, p } => {
                (integrand(a) * p + integrand(-a) * (1.0 - p)) * intensity
            }
            JumpSize::Gaussian { mean, sd } => {
                if sd == 0.0 {
                    return integrand(mean) * intensity;
                }
                let density =
                    |x: f64| (-0.5 * ((x - mean) / sd).powi(2)).exp() / (sd * (2.0 * PI).sqrt());
                let re = gaussian_integral(mean, sd, |x| integrand(x).re * density(x));
                let im = gaussian_integral(mean, sd, |x| integrand(x).im * density(x));
                Complex64::new(re, im) * intensity
            }
        },
        JumpSpec::SymmetricStable { index, scale } => {
            // odd parts cancel against the symmetric density
            let c = stable_density_constant(index, scale);
            Complex64::new(-2.0 * c * one_minus_cos_power_integral(u, index), 0.0)
        }
    }
}

/// Integral over `mean ± GAUSS_SPAN·sd`, split where the truncation indicator jumps.
fn gaussian_integral(mean: f64, sd: f64, f: impl Fn(f64) -> f64) -> f64 {
    let lo = mean - GAUSS_SPAN * sd;
    let hi = mean + GAUSS_SPAN * sd;
    let mut cuts = vec![lo];
    cuts.extend([-1.0, 1.0].into_iter().filter(|c| *c > lo && *c < hi));
    cuts.push(hi);
    cuts.windows(2)
        .map(|w| adaptive_simpson(w[0], w[1], X_TOL, &f))
        .sum()
}

/// `C` in `ν(dx) = C |x|^{-1-β} dx` for the stable convention documented above.
pub fn stable_density_constant(index: f64, scale: f64) -> f64 {
    scale.powf(index) / (2.0 * one_minus_cos_moment(index))
}

/// `I_β = ∫_0^∞ (1 - cos y) y^{-1-β} dy`.
pub fn one_minus_cos_moment(index: f64) -> f64 {
    if (index - 1.0).abs() < 1e-12 {
        return 0.5 * PI;
    }
    gamma(2.0 - index) * (0.5 * PI * index).cos() / (index * (1.0 - index))
}

/// `∫_0^∞ (1 - cos(ux)) x^{-1-β} dx` by quadrature.
///
/// Near zero the substitution `x = s^{1/(2-β)}` removes the power singularity;
/// the oscillatory body is integrated half-period by half-period up to a point
/// where `ux` is a multiple of `2π`, and the remaining tail is taken from its
/// two-term asymptotic expansion.
pub fn one_minus_cos_power_integral(u: f64, index: f64) -> f64 {
    let u = u.abs();
    if u == 0.0 {
        return 0.0;
    }
    let beta = index;
    let x1 = (1.0 / u).min(1.0);

    // [0, x1] with x = s^q, dx = q s^{q-1} ds
    let q = 1.0 / (2.0 - beta);
    let s1 = x1.powf(2.0 - beta);
    let head = adaptive_simpson(0.0, s1, 1e-14, |s| {
        if s == 0.0 {
            return 0.5 * q * u * u;
        }
        let x = s.powf(q);
        let half = (0.5 * u * x).sin();
        2.0 * half * half * q * s.powf(q - 1.0) * x.powf(-1.0 - beta)
    });

    let f = |x: f64| {
        let half = (0.5 * u * x).sin();
        2.0 * half * half * x.powf(-1.0 - beta)
    };
    let rule = GaussLegendre::new(16);
    let half_period = PI / u;
    let first_cut = (u * x1 / PI).ceil() * half_period;
    // this stretch can span many units when u is small, so refine adaptively
    let mut body = if first_cut > x1 {
        adaptive_simpson(x1, first_cut, 1e-15, f)
    } else {
        0.0
    };
    let periods = 4000usize;
    let mut a = first_cut;
    // end at a full period so sin(uX) = 0 and cos(uX) = 1
    let mut steps = 2 * periods;
    if ((first_cut / half_period).round() as i64) % 2 == 1 {
        steps += 1;
    }
    for _ in 0..steps {
        let b = a + half_period;
        body += rule.integrate(a, b, f);
        a = b;
    }
    let end = a;
    // ∫_X^∞ x^{-1-β} dx - ∫_X^∞ cos(ux) x^{-1-β} dx
    let tail = end.powf(-beta) / beta - (1.0 + beta) * end.powf(-2.0 - beta) / (u * u);
    head + body + tail
}

/// Inner jump integral `∫ (1 - cos(kx)) ν(dx)` in closed form.
fn one_minus_cos_closed(k: f64, jumps: &JumpSpec) -> f64 {
    match *jumps {
        JumpSpec::None => 0.0,
        JumpSpec::CompoundPoisson { intensity, size } => {
            intensity
                * match size {
                    JumpSize::TwoPoint { a, .. } => 1.0 - (k * a).cos(),
                    JumpSize::Gaussian { mean, sd } => {
                        1.0 - (k * mean).cos() * (-0.5 * sd * sd * k * k).exp()
                    }
                }
        }
        JumpSpec::SymmetricStable { index, scale } => (scale * k.abs()).powf(index),
    }
}

/// Inner jump integral `∫ (1 - cos(kx)) ν(dx)` by quadrature against `ν`.
fn one_minus_cos_numeric(k: f64, jumps: &JumpSpec, stable_unit: Option<f64>) -> f64 {
    match *jumps {
        JumpSpec::None => 0.0,
        JumpSpec::CompoundPoisson { intensity, size } => match size {
            JumpSize::TwoPoint { a, p } => {
                intensity * (p * (1.0 - (k * a).cos()) + (1.0 - p) * (1.0 - (-k * a).cos()))
            }
            JumpSize::Gaussian { mean, sd } => {
                if sd == 0.0 {
                    return intensity * (1.0 - (k * mean).cos());
                }
                let density =
                    |x: f64| (-0.5 * ((x - mean) / sd).powi(2)).exp() / (sd * (2.0 * PI).sqrt());
                // panels no wider than half an oscillation
                let lo = mean - GAUSS_SPAN * sd;
                let hi = mean + GAUSS_SPAN * sd;
                let panels = ((k.abs() * (hi - lo) / PI).ceil() as usize).max(32);
                intensity
                    * GaussLegendre::new(16)
                        .integrate_composite(lo, hi, panels, |x| (1.0 - (k * x).cos()) * density(x))
            }
        },
        JumpSpec::SymmetricStable { index, .. } => {
            // homogeneity: ∫(1 - cos(kx))ν(dx) = |k|^β ∫(1 - cos x)ν(dx)
            stable_unit.expect("unit stable integral precomputed") * k.abs().powf(index)
        }
    }
}

fn check_frequency(u: f64) -> Result<()> {
    if u == 0.0 || !u.is_finite() {
        return Err(Error::Domain(format!(
            "frequency must be nonzero and finite, got {u}"
        )));
    }
    Ok(())
}

/// Jump adjustment `(1/(n0 u²)) ∫_0^1 ∫ (1 - cos(√n0 Φ(w) u x)) ν(dx) dw`
/// with `Φ(w) = 2 sin(2πw)`: inner integral in closed form, outer by
/// composite Gauss–Legendre (256 panels of 8 nodes).
pub fn cu_adjust(u: f64, jumps: &JumpSpec, n0: usize) -> Result<f64> {
    check_frequency(u)?;
    jumps.validate()?;
    if matches!(jumps, JumpSpec::None) {
        return Ok(0.0);
    }
    Ok(outer_w_integral(u, n0, |k| one_minus_cos_closed(k, jumps)))
}

/// Same quantity as [`cu_adjust`], with the inner integral done numerically
/// against the Lévy measure.
pub fn cu_adjust_nested(u: f64, jumps: &JumpSpec, n0: usize) -> Result<f64> {
    check_frequency(u)?;
    jumps.validate()?;
    let stable_unit = match *jumps {
        JumpSpec::SymmetricStable { index, scale } => Some(
            2.0 * stable_density_constant(index, scale) * one_minus_cos_power_integral(1.0, index),
        ),
        _ => None,
    };
    Ok(outer_w_integral(u, n0, |k| {
        one_minus_cos_numeric(k, jumps, stable_unit)
    }))
}

fn outer_w_integral(u: f64, n0: usize, inner: impl Fn(f64) -> f64) -> f64 {
    let root = (n0 as f64).sqrt();
    let rule = GaussLegendre::new(W_ORDER);
    let integral = rule.integrate_composite(0.0, 1.0, W_PANELS, |w| {
        inner(root * 2.0 * (2.0 * PI * w).sin() * u)
    });
    integral / (n0 as f64 * u * u)
}

/// `∫_0^{1/n0} θ(Φ_n(w) u) dw` over one pre-averaging bin, with
/// `Φ_n(w) = √n0 · 2 sin(2π n0 w)`; composite Gauss–Legendre with 512 nodes.
pub fn bin_exponent_integral(u: f64, triplet: &LevyTriplet, n0: usize) -> Result<Complex64> {
    triplet.validate()?;
    let rule = GaussLegendre::new(8);
    let root = (n0 as f64).sqrt();
    let width = 1.0 / n0 as f64;
    let panels = 64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let a = p as f64 * width / panels as f64;
        let b = (p + 1) as f64 * width / panels as f64;
        let re = rule.integrate(a, b, |w| {
            let v = root * 2.0 * (2.0 * PI * n0 as f64 * w).sin() * u;
            theta(v, triplet).map(|z| z.re).unwrap_or(f64::NAN)
        });
        let im = rule.integrate(a, b, |w| {
            let v = root * 2.0 * (2.0 * PI * n0 as f64 * w).sin() * u;
            theta(v, triplet).map(|z| z.im).unwrap_or(f64::NAN)
        });
        acc += Complex64::new(re, im);
    }
    Ok(acc)
}

/// Local characteristics `(c_t, σ²_t, ν_t = m_t·ν)` at a fixed time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalCharacteristics {
    pub vol: f64,
    pub noise_var: f64,
    pub jumps: JumpSpec,
    pub jump_scale: f64,
}

impl LocalCharacteristics {
    pub fn at(truth: &GroundTruth, t: f64) -> Self {
        Self {
            vol: truth.vol_at(t),
            noise_var: truth.noise_var_at(t),
            jumps: truth.jumps,
            jump_scale: truth.jump_scale_at(t),
        }
    }

    /// Adjusted volatility `c_t(u) = c_t + m_t·cu_adjust(u)`.
    pub fn adjusted_vol(&self, u: f64, n0: usize) -> Result<f64> {
        if u == 0.0 {
            return Ok(self.vol);
        }
        Ok(self.vol + self.jump_scale * cu_adjust(u, &self.jumps, n0)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationPoint {
    pub u: f64,
    /// `c_t(u)`; at `u = 0` this is the diffusive part `c_t` alone.
    pub adjusted_vol: f64,
    pub phi: f64,
    pub psi: f64,
    pub rho2: f64,
    pub tau2: f64,
}

/// `φ_t(u) = exp(-c_t(u)u²)ψ_t(u)`, `ψ_t(u) = exp(-κσ²_t u²)`,
/// `ρ²_t(u) = (1 + φ_t(2u))/2 - φ_t(u)²`, `τ²_t(u) = ρ²_t(u)/(n1 φ_t(u)²)`.
pub fn population(
    chars: &LocalCharacteristics,
    u: f64,
    layout: &BinLayout,
) -> Result<PopulationPoint> {
    if !u.is_finite() {
        return Err(Error::Domain(format!("frequency must be finite, got {u}")));
    }
    if u == 0.0 {
        return Ok(PopulationPoint {
            u,
            adjusted_vol: chars.vol,
            phi: 1.0,
            psi: 1.0,
            rho2: 0.0,
            tau2: 0.0,
        });
    }
    let phi_at = |v: f64| -> Result<(f64, f64, f64)> {
        let cu = chars.adjusted_vol(v, layout.n0)?;
        let psi = (-layout.kappa * chars.noise_var * v * v).exp();
        Ok(((-cu * v * v).exp() * psi, psi, cu))
    };
    let (phi, psi, adjusted_vol) = phi_at(u)?;
    let (phi2, _, _) = phi_at(2.0 * u)?;
    let rho2 = 0.5 * (1.0 + phi2) - phi * phi;
    Ok(PopulationPoint {
        u,
        adjusted_vol,
        phi,
        psi,
        rho2,
        tau2: rho2 / (layout.n1 as f64 * phi * phi),
    })
}

/// [`population`] at time `t` of a simulated path.
pub fn population_at(
    truth: &GroundTruth,
    t: f64,
    u: f64,
    layout: &BinLayout,
) -> Result<PopulationPoint> {
    population(&LocalCharacteristics::at(truth, t), u, layout)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateExponents {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub alpha4: f64,
}

/// Convergence exponents for smoothness `alpha ≥ 1/2` and jump activity
/// `beta ∈ [0, 2]`.
pub fn rate_exponents(alpha: f64, beta: f64) -> Result<RateExponents> {
    if !(alpha >= 0.5 && alpha.is_finite()) {
        return Err(Error::config(format!(
            "smoothness must be at least 1/2, got {alpha}"
        )));
    }
    if !(0.0..=2.0).contains(&beta) {
        return Err(Error::config(format!(
            "jump activity must lie in [0, 2], got {beta}"
        )));
    }
    let alpha1 = f64::min(0.25, 3.0 * alpha / 8.0);
    let alpha3 = alpha / (2.0 * (2.0 * alpha + 1.0));
    Ok(RateExponents {
        alpha1,
        alpha2: alpha1 / 2.0 + 1.0 / 16.0,
        alpha3,
        alpha4: f64::min(alpha3, (2.0 - beta) / 4.0),
    })
}
