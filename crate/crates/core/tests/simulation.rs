//! Cross-checks of the path generators against independent reimplementations
//! and Monte Carlo invariants.

use std::f64::consts::PI;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

use spotvol::sim::{JumpSpec, LevyTriplet, NoiseSpec, RateSpec, TimeChangedModel};

/// Symmetric stable draw written in the Weron form
/// `sin(αV)/cos(V)^{1/α}·(cos((1-α)V)/W)^{(1-α)/α}` via logarithms.
fn weron(alpha: f64, v: f64, w: f64) -> f64 {
    let log_mag = (alpha * v).sin().abs().ln() - v.cos().ln() / alpha
        + (1.0 - alpha) / alpha * (((1.0 - alpha) * v).cos().ln() - w.ln());
    (alpha * v).sin().signum() * log_mag.exp()
}

#[test]
fn stable_increments_follow_the_documented_stream() {
    let (n, beta, gamma, seed) = (4096usize, 1.5, 0.5, 17u64);
    let series = TimeChangedModel::new(
        LevyTriplet::new(
            0.0,
            0.0,
            JumpSpec::SymmetricStable {
                index: beta,
                scale: gamma,
            },
        ),
        RateSpec::Constant,
        NoiseSpec::none(),
    )
    .simulate(n, seed)
    .unwrap();
    let x = &series.truth.as_ref().unwrap().x;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for j in 1..n {
        let dt = j as f64 / n as f64 - (j - 1) as f64 / n as f64;
        let _brownian: f64 = rng.sample(StandardNormal);
        let open: f64 = rng.sample(Open01);
        let w: f64 = rng.sample(Exp1);
        let want = gamma * dt.powf(1.0 / beta) * weron(beta, PI * (open - 0.5), w);
        let got = x[j] - x[j - 1];
        worst = worst.max((got - want).abs() / (1e-300 + want.abs()).max(1e-8));
    }
    assert!(worst < 1e-9, "max relative increment mismatch {worst:e}");
}

#[test]
fn stable_increments_have_the_stated_characteristic_function() {
    let (n, beta, gamma) = (1usize << 16, 1.5, 0.5);
    let series = TimeChangedModel::new(
        LevyTriplet::new(
            0.0,
            0.0,
            JumpSpec::SymmetricStable {
                index: beta,
                scale: gamma,
            },
        ),
        RateSpec::Constant,
        NoiseSpec::none(),
    )
    .simulate(n, 5)
    .unwrap();
    let x = &series.truth.as_ref().unwrap().x;
    let dt = 1.0 / n as f64;
    let m = (n - 1) as f64;
    for k in [0.5, 1.0, 2.0] {
        // frequency scaled so the target characteristic function sits near exp(-k^β)
        let v = k / (gamma * dt.powf(1.0 / beta));
        let ecf = x.windows(2).map(|p| (v * (p[1] - p[0])).cos()).sum::<f64>() / m;
        let want = (-dt * (gamma * v).powf(beta)).exp();
        // the cosine average has standard deviation at most 1/√m
        assert!(
            (ecf - want).abs() < 5.0 / m.sqrt(),
            "k = {k}: {ecf} vs {want}"
        );
    }
}

#[test]
fn realised_variance_tracks_integrated_volatility() {
    let n = 1usize << 16;
    let vol = 0.8;
    let model = TimeChangedModel::new(
        LevyTriplet::brownian(vol),
        RateSpec::sine(0.5, 1),
        NoiseSpec::gaussian(0.01),
    );
    let close: usize = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let s = model.simulate(n, seed).unwrap();
            let x = &s.truth.as_ref().unwrap().x;
            let rv: f64 = x.windows(2).map(|p| (p[1] - p[0]).powi(2)).sum();
            // the path stops at (n-1)/n, so the clock covers R((n-1)/n)
            let target = vol * RateSpec::sine(0.5, 1).cumulative((n - 1) as f64 / n as f64);
            usize::from(((rv - target) / target).abs() < 0.05)
        })
        .sum();
    assert!(close >= 190, "{close} of 200 seeds within 5%");
}

#[test]
fn noise_is_added_on_top_of_the_efficient_price() {
    let s = TimeChangedModel::new(
        LevyTriplet::brownian(1.0),
        RateSpec::Constant,
        NoiseSpec::rademacher(0.01),
    )
    .simulate(1024, 3)
    .unwrap();
    let x = &s.truth.as_ref().unwrap().x;
    for (y, x) in s.y.iter().zip(x) {
        assert!(((y - x).abs() - 0.01).abs() < 1e-15);
    }
}
