//! Synthetic noisy price paths.
//!
//! Two generators are provided:
//!
//! - [`TimeChangedModel`]: `X_t = L_{R_t}` for a Lévy process `L` run on the
//!   clock `R_t = ∫_0^t r_s ds`. Increments over `[R_{j/n}, R_{(j+1)/n}]` are
//!   drawn exactly from the infinitely divisible law of `L` over `ΔR`.
//! - [`ItoModel`]: a semimartingale whose volatility path is given on a grid and
//!   whose jumps arrive at a constant calendar-time rate, independently of the
//!   volatility.
//!
//! Every step consumes random numbers in a fixed order, from a single
//! `ChaCha8Rng` seeded with `seed`:
//!
//! 1. one standard normal (Brownian part, always drawn);
//! 2. compound Poisson only: a Poisson count (skipped when the mean is zero),
//!    then per jump one `U[0,1)` (two-point sizes) or one standard normal
//!    (Gaussian sizes);
//! 3. symmetric stable only: `V` from the open unit interval mapped to
//!    `(-π/2, π/2)`, then `W ~ Exp(1)`.
//!
//! After all `n - 1` path steps, one noise draw per observation follows
//! (a standard normal, or a `U[0,1)` for Rademacher noise).

use std::f64::consts::PI;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Lévy triplet `(b, c, ν)` with `ν` described by a [`JumpSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    pub drift: f64,
    pub vol: f64,
    pub jumps: JumpSpec,
}

impl LevyTriplet {
    pub fn new(drift: f64, vol: f64, jumps: JumpSpec) -> Self {
        Self { drift, vol, jumps }
    }

    pub fn brownian(vol: f64) -> Self {
        Self::new(0.0, vol, JumpSpec::None)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.drift.is_finite() {
            return Err(Error::config("drift must be finite"));
        }
        if !(self.vol >= 0.0 && self.vol.is_finite()) {
            return Err(Error::config(format!(
                "volatility must be finite and nonnegative, got {}",
                self.vol
            )));
        }
        self.jumps.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpSize {
    /// `+a` with probability `p`, `-a` otherwise.
    TwoPoint {
        a: f64,
        p: f64,
    },
    Gaussian {
        mean: f64,
        sd: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpSpec {
    None,
    CompoundPoisson {
        intensity: f64,
        size: JumpSize,
    },
    /// Symmetric `index`-stable jumps. Over a unit of (business) time the jump
    /// part has characteristic function `exp(-(scale·|u|)^index)`.
    SymmetricStable {
        index: f64,
        scale: f64,
    },
}

impl JumpSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            JumpSpec::None => Ok(()),
            JumpSpec::CompoundPoisson { intensity, size } => {
                if !(intensity >= 0.0 && intensity.is_finite()) {
                    return Err(Error::config(format!(
                        "jump intensity must be finite and nonnegative, got {intensity}"
                    )));
                }
                match size {
                    JumpSize::TwoPoint { a, p } => {
                        if !a.is_finite() || !(0.0..=1.0).contains(&p) {
                            return Err(Error::config(format!(
                                "two-point jumps need finite a and p in [0, 1], got a = {a}, p = {p}"
                            )));
                        }
                    }
                    JumpSize::Gaussian { mean, sd } => {
                        if !mean.is_finite() || !(sd >= 0.0 && sd.is_finite()) {
                            return Err(Error::config(format!(
                                "Gaussian jumps need finite mean and sd >= 0, got mean = {mean}, sd = {sd}"
                            )));
                        }
                    }
                }
                Ok(())
            }
            JumpSpec::SymmetricStable { index, scale } => {
                if !(index > 0.0 && index < 2.0) {
                    return Err(Error::config(format!(
                        "stable index must lie in (0, 2), got {index}"
                    )));
                }
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(Error::config(format!(
                        "stable scale must be positive, got {scale}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// `∫ x 1(|x| < 1) ν(dx)`, the compensated small-jump drift per unit time.
    pub fn small_jump_mean(&self) -> f64 {
        match *self {
            JumpSpec::None | JumpSpec::SymmetricStable { .. } => 0.0,
            JumpSpec::CompoundPoisson { intensity, size } => {
                intensity
                    * match size {
                        JumpSize::TwoPoint { a, p } => {
                            if a.abs() < 1.0 {
                                a * (2.0 * p - 1.0)
                            } else {
                                0.0
                            }
                        }
                        JumpSize::Gaussian { mean, sd } => truncated_gaussian_mean(mean, sd),
                    }
            }
        }
    }

    /// Draws the jump contribution over a stretch of business time `dt`.
    fn sample<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        match *self {
            JumpSpec::None => 0.0,
            JumpSpec::CompoundPoisson { intensity, size } => {
                let mean = intensity * dt;
                if mean <= 0.0 {
                    return 0.0;
                }
                let count: f64 = Poisson::new(mean)
                    .expect("Poisson mean is positive and finite")
                    .sample(rng);
                let mut total = 0.0;
                for _ in 0..count as u64 {
                    total += match size {
                        JumpSize::TwoPoint { a, p } => {
                            let draw: f64 = rng.random();
                            if draw < p {
                                a
                            } else {
                                -a
                            }
                        }
                        JumpSize::Gaussian { mean, sd } => {
                            let z: f64 = rng.sample(StandardNormal);
                            mean + sd * z
                        }
                    };
                }
                total
            }
            JumpSpec::SymmetricStable { index, scale } => {
                scale * dt.powf(1.0 / index) * StableSampler::new(index).sample(rng)
            }
        }
    }
}

/// `E[X 1(|X| < 1)]` for `X ~ N(mean, sd²)`.
fn truncated_gaussian_mean(mean: f64, sd: f64) -> f64 {
    if sd == 0.0 {
        return if mean.abs() < 1.0 { mean } else { 0.0 };
    }
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    let lo = (-1.0 - mean) / sd;
    let hi = (1.0 - mean) / sd;
    mean * (std.cdf(hi) - std.cdf(lo)) + sd * (std.pdf(lo) - std.pdf(hi))
}

/// Chambers–Mallows–Stuck sampler for the symmetric stable law with
/// characteristic function `exp(-|u|^index)`.
#[derive(Debug, Clone, Copy)]
pub struct StableSampler {
    index: f64,
}

impl StableSampler {
    pub fn new(index: f64) -> Self {
        debug_assert!(index > 0.0 && index <= 2.0);
        Self { index }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let open: f64 = rng.sample(Open01);
        let v = PI * (open - 0.5);
        let w: f64 = rng.sample(Exp1);
        let a = self.index;
        if a == 1.0 {
            return v.tan();
        }
        (a * v).sin() / v.cos().powf(1.0 / a) * (((1.0 - a) * v).cos() / w).powf((1.0 - a) / a)
    }
}

/// Normalised activity rate `r_t` on `[0, 1]` with `∫ r = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateSpec {
    Constant,
    /// `1 + amplitude·sin(2π·frequency·t)`.
    Sine {
        amplitude: f64,
        frequency: u32,
    },
    /// Raised-cosine interpolation between positive `values` at `knots`
    /// (`knots[0] = 0`, last knot `= 1`), rescaled to integrate to one.
    PiecewiseSmooth {
        knots: Vec<f64>,
        values: Vec<f64>,
    },
}

impl RateSpec {
    pub fn sine(amplitude: f64, frequency: u32) -> Self {
        RateSpec::Sine {
            amplitude,
            frequency,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RateSpec::Constant => Ok(()),
            RateSpec::Sine {
                amplitude,
                frequency,
            } => {
                if !(0.0..1.0).contains(amplitude) {
                    return Err(Error::config(format!(
                        "sine rate amplitude must lie in [0, 1), got {amplitude}"
                    )));
                }
                if *frequency == 0 {
                    return Err(Error::config("sine rate frequency must be positive"));
                }
                Ok(())
            }
            RateSpec::PiecewiseSmooth { knots, values } => {
                if knots.len() < 2 || knots.len() != values.len() {
                    return Err(Error::config(
                        "piecewise rate needs at least two knots and one value per knot",
                    ));
                }
                if knots[0] != 0.0 || *knots.last().unwrap() != 1.0 {
                    return Err(Error::config("piecewise rate knots must span [0, 1]"));
                }
                if knots.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::config("piecewise rate knots must be increasing"));
                }
                if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err(Error::config("piecewise rate values must be positive"));
                }
                Ok(())
            }
        }
    }

    pub fn rate(&self, t: f64) -> f64 {
        match self {
            RateSpec::Constant => 1.0,
            RateSpec::Sine {
                amplitude,
                frequency,
            } => 1.0 + amplitude * (2.0 * PI * f64::from(*frequency) * t).sin(),
            RateSpec::PiecewiseSmooth { knots, values } => {
                let (i, s) = locate(knots, t);
                let ramp = 0.5 * (1.0 - (PI * s).cos());
                (values[i] + (values[i + 1] - values[i]) * ramp) / piecewise_mass(knots, values)
            }
        }
    }

    /// `R_t = ∫_0^t r_s ds`, in closed form.
    pub fn cumulative(&self, t: f64) -> f64 {
        match self {
            RateSpec::Constant => t,
            RateSpec::Sine {
                amplitude,
                frequency,
            } => {
                let w = 2.0 * PI * f64::from(*frequency);
                t + amplitude * (1.0 - (w * t).cos()) / w
            }
            RateSpec::PiecewiseSmooth { knots, values } => {
                let (i, s) = locate(knots, t);
                let mut acc = 0.0;
                for k in 0..i {
                    acc += 0.5 * (values[k] + values[k + 1]) * (knots[k + 1] - knots[k]);
                }
                let width = knots[i + 1] - knots[i];
                // ∫_0^s (1 - cos πx)/2 dx = s/2 - sin(πs)/(2π)
                let ramp_area = 0.5 * s - (PI * s).sin() / (2.0 * PI);
                acc += width * (values[i] * s + (values[i + 1] - values[i]) * ramp_area);
                acc / piecewise_mass(knots, values)
            }
        }
    }
}

fn piecewise_mass(knots: &[f64], values: &[f64]) -> f64 {
    knots
        .windows(2)
        .zip(values.windows(2))
        .map(|(k, v)| 0.5 * (v[0] + v[1]) * (k[1] - k[0]))
        .sum()
}

/// Segment index and relative position of `t` within it.
fn locate(knots: &[f64], t: f64) -> (usize, f64) {
    let t = t.clamp(0.0, 1.0);
    let last = knots.len() - 2;
    let i = knots[1..]
        .iter()
        .position(|&k| t < k)
        .unwrap_or(last)
        .min(last);
    (i, (t - knots[i]) / (knots[i + 1] - knots[i]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    Gaussian { sigma: f64 },
    Rademacher { sigma: f64 },
}

/// I.i.d. observation noise, optionally modulated in time: `σ_t = σ·m(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulation: Option<RateSpec>,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            modulation: None,
        }
    }

    pub fn gaussian(sigma: f64) -> Self {
        Self {
            kind: NoiseKind::Gaussian { sigma },
            modulation: None,
        }
    }

    pub fn rademacher(sigma: f64) -> Self {
        Self {
            kind: NoiseKind::Rademacher { sigma },
            modulation: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            NoiseKind::None => {}
            NoiseKind::Gaussian { sigma } | NoiseKind::Rademacher { sigma } => {
                if !(sigma >= 0.0 && sigma.is_finite()) {
                    return Err(Error::config(format!(
                        "noise level must be finite and nonnegative, got {sigma}"
                    )));
                }
            }
        }
        if let Some(m) = &self.modulation {
            m.validate()?;
        }
        Ok(())
    }

    /// Noise standard deviation at time `t`.
    pub fn sd_at(&self, t: f64) -> f64 {
        let base = match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::Gaussian { sigma } | NoiseKind::Rademacher { sigma } => sigma,
        };
        match &self.modulation {
            Some(m) => base * m.rate(t),
            None => base,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::Gaussian { .. } => {
                let z: f64 = rng.sample(StandardNormal);
                self.sd_at(t) * z
            }
            NoiseKind::Rademacher { .. } => {
                let draw: f64 = rng.random();
                let sign = if draw < 0.5 { -1.0 } else { 1.0 };
                sign * self.sd_at(t)
            }
        }
    }
}

/// Values on the uniform grid `i/(len-1)`, `i = 0..len`, linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPath(pub Vec<f64>);

impl GridPath {
    pub fn from_fn(points: usize, f: impl Fn(f64) -> f64) -> Self {
        assert!(points >= 2);
        let last = (points - 1) as f64;
        GridPath((0..points).map(|i| f(i as f64 / last)).collect())
    }

    pub fn constant(value: f64) -> Self {
        GridPath(vec![value, value])
    }

    pub fn at(&self, t: f64) -> f64 {
        interpolate(&self.0, t)
    }

    /// Trapezoid integral over `[a, b]`, exact for the interpolant.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let v = &self.0;
        let m = (v.len() - 1) as f64;
        let ia = ((a * m).floor() as usize).min(v.len() - 2);
        let ib = ((b * m).ceil() as usize).clamp(1, v.len() - 1);
        let mut acc = 0.0;
        for i in ia..ib {
            let lo = (i as f64 / m).max(a);
            let hi = ((i + 1) as f64 / m).min(b);
            if hi > lo {
                acc += 0.5 * (self.at(lo) + self.at(hi)) * (hi - lo);
            }
        }
        acc
    }
}

fn interpolate(v: &[f64], t: f64) -> f64 {
    let m = (v.len() - 1) as f64;
    let x = (t.clamp(0.0, 1.0)) * m;
    let i = (x.floor() as usize).min(v.len() - 2);
    let frac = x - i as f64;
    v[i] + (v[i + 1] - v[i]) * frac
}

/// Ground truth recorded alongside simulated observations, on the grid `j/n`,
/// `j = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub rate: Vec<f64>,
    pub vol: Vec<f64>,
    pub noise_var: Vec<f64>,
    /// Efficient price `X_{j/n}`, `j = 0..n`.
    pub x: Vec<f64>,
    pub jumps: JumpSpec,
    /// Whether the jump measure at time `t` is `r_t·ν` (time-changed model)
    /// or `ν` (idiosyncratic jumps).
    pub jumps_time_changed: bool,
}

impl GroundTruth {
    pub fn rate_at(&self, t: f64) -> f64 {
        interpolate(&self.rate, t)
    }

    pub fn vol_at(&self, t: f64) -> f64 {
        interpolate(&self.vol, t)
    }

    pub fn noise_var_at(&self, t: f64) -> f64 {
        interpolate(&self.noise_var, t)
    }

    /// Multiplier `m_t` in `ν_t = m_t·ν`.
    pub fn jump_scale_at(&self, t: f64) -> f64 {
        if self.jumps_time_changed {
            self.rate_at(t)
        } else {
            1.0
        }
    }

    /// `r` at the coarse-bin midpoints `(l + 1/2)/n2`.
    pub fn rate_at_midpoints(&self, n2: usize) -> Vec<f64> {
        (0..n2)
            .map(|l| self.rate_at((l as f64 + 0.5) / n2 as f64))
            .collect()
    }
}

/// Observations `Y_j`, `j = 0..n`, on the uniform grid `j/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSeries {
    pub y: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<GroundTruth>,
}

impl ObservationSeries {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::config("observation series is empty"));
        }
        if let Some(j) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::config(format!("observation {j} is not finite")));
        }
        Ok(Self { y, truth: None })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }
}

/// Time-changed Lévy model `X_t = X_0 + L_{R_t}` observed under noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeChangedModel {
    pub triplet: LevyTriplet,
    pub rate: RateSpec,
    pub noise: NoiseSpec,
    #[serde(default)]
    pub x0: f64,
}

impl TimeChangedModel {
    pub fn new(triplet: LevyTriplet, rate: RateSpec, noise: NoiseSpec) -> Self {
        Self {
            triplet,
            rate,
            noise,
            x0: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.triplet.validate()?;
        self.rate.validate()?;
        self.noise.validate()?;
        if !self.x0.is_finite() {
            return Err(Error::config("initial price must be finite"));
        }
        Ok(())
    }

    pub fn simulate(&self, n: usize, seed: u64) -> Result<ObservationSeries> {
        self.validate()?;
        check_len(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let LevyTriplet { drift, vol, jumps } = self.triplet;
        let compensator = jumps.small_jump_mean();
        let inv_n = 1.0 / n as f64;

        let mut x = Vec::with_capacity(n);
        x.push(self.x0);
        let mut level = self.x0;
        let mut prev = self.rate.cumulative(0.0);
        for j in 1..n {
            let next = self.rate.cumulative(j as f64 * inv_n);
            let dt = next - prev;
            prev = next;
            let z: f64 = rng.sample(StandardNormal);
            level += (drift - compensator) * dt + (vol * dt).sqrt() * z;
            level += jumps.sample(dt, &mut rng);
            x.push(level);
        }

        let rate: Vec<f64> = (0..=n).map(|j| self.rate.rate(j as f64 * inv_n)).collect();
        let truth = GroundTruth {
            vol: rate.iter().map(|r| vol * r).collect(),
            noise_var: (0..=n)
                .map(|j| self.noise.sd_at(j as f64 * inv_n).powi(2))
                .collect(),
            rate,
            x: x.clone(),
            jumps,
            jumps_time_changed: true,
        };
        Ok(observe(x, &self.noise, &mut rng, truth))
    }
}

/// Convenience wrapper around [`TimeChangedModel::simulate`] with `X_0 = 0`.
pub fn simulate_tc_levy(
    triplet: LevyTriplet,
    rate: RateSpec,
    noise: NoiseSpec,
    n: usize,
    seed: u64,
) -> Result<ObservationSeries> {
    TimeChangedModel::new(triplet, rate, noise).simulate(n, seed)
}

/// Semimartingale with a gridded volatility path and calendar-time jumps that
/// do not follow the volatility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItoModel {
    pub drift: GridPath,
    pub vol: GridPath,
    pub jumps: JumpSpec,
    pub noise: NoiseSpec,
    #[serde(default)]
    pub x0: f64,
}

impl ItoModel {
    pub fn new(drift: GridPath, vol: GridPath, jumps: JumpSpec, noise: NoiseSpec) -> Self {
        Self {
            drift,
            vol,
            jumps,
            noise,
            x0: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.vol.0.len() < 2 || self.drift.0.len() < 2 {
            return Err(Error::config(
                "drift and volatility paths need at least two grid points",
            ));
        }
        if let Some(i) = self.vol.0.iter().position(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(Error::config(format!(
                "volatility path must be strictly positive, got {} at grid point {i}",
                self.vol.0[i]
            )));
        }
        if self.drift.0.iter().any(|b| !b.is_finite()) {
            return Err(Error::config("drift path must be finite"));
        }
        self.jumps.validate()?;
        self.noise.validate()?;
        if !self.x0.is_finite() {
            return Err(Error::config("initial price must be finite"));
        }
        Ok(())
    }

    pub fn simulate(&self, n: usize, seed: u64) -> Result<ObservationSeries> {
        self.validate()?;
        check_len(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let compensator = self.jumps.small_jump_mean();
        let inv_n = 1.0 / n as f64;

        let mut x = Vec::with_capacity(n);
        x.push(self.x0);
        let mut level = self.x0;
        for j in 1..n {
            let (a, b) = ((j - 1) as f64 * inv_n, j as f64 * inv_n);
            let var = 0.5 * (self.vol.at(a) + self.vol.at(b)) * inv_n;
            let mean = 0.5 * (self.drift.at(a) + self.drift.at(b)) * inv_n;
            let z: f64 = rng.sample(StandardNormal);
            level += mean - compensator * inv_n + var.sqrt() * z;
            level += self.jumps.sample(inv_n, &mut rng);
            x.push(level);
        }

        let total = self.vol.integral(0.0, 1.0);
        let vol: Vec<f64> = (0..=n).map(|j| self.vol.at(j as f64 * inv_n)).collect();
        let truth = GroundTruth {
            rate: vol.iter().map(|c| c / total).collect(),
            vol,
            noise_var: (0..=n)
                .map(|j| self.noise.sd_at(j as f64 * inv_n).powi(2))
                .collect(),
            x: x.clone(),
            jumps: self.jumps,
            jumps_time_changed: false,
        };
        Ok(observe(x, &self.noise, &mut rng, truth))
    }
}

/// Convenience wrapper around [`ItoModel::simulate`].
pub fn simulate_ito_sm(model: &ItoModel, n: usize, seed: u64) -> Result<ObservationSeries> {
    model.simulate(n, seed)
}

fn check_len(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::config(format!(
            "need at least 2 observations, got {n}"
        )));
    }
    Ok(())
}

fn observe(
    x: Vec<f64>,
    noise: &NoiseSpec,
    rng: &mut ChaCha8Rng,
    truth: GroundTruth,
) -> ObservationSeries {
    let n = x.len() as f64;
    let y = x
        .iter()
        .enumerate()
        .map(|(j, xj)| xj + noise.sample(j as f64 / n, rng))
        .collect();
    ObservationSeries {
        y,
        truth: Some(truth),
    }
}
