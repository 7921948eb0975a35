mod common;

use etsim_core::noise::{
    build_ensemble, correlation_analytic, empirical_correlation, sample_trajectory, spectral_asymptotics,
    spectral_density, FluctuatorBand, NoiseTrajectory, SpectralRegime,
};
use etsim_core::rng::sub_seed;
use etsim_core::Error;
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use common::{chi_oracle, log_grid, log_log_slope};

// 2γ_m = 1e−4, 2γ_c = 1 ps⁻¹.
const GAMMA_M: f64 = 5e-5;
const GAMMA_C: f64 = 0.5;

// σ²(1 − γ_m/γ_c)/(2πγ_m ln(γ_c/γ_m)) at σ = 1.
const PLATEAU: f64 = 345.566_007_705_404_85;

fn band(sigma: f64) -> FluctuatorBand {
    FluctuatorBand::new(GAMMA_M, GAMMA_C, sigma).unwrap()
}

#[test]
fn ensemble_rates_follow_the_inverse_law() {
    let ens = build_ensemble(1000, GAMMA_M, GAMMA_C, 1.0, 42).unwrap();
    assert_eq!(ens.rates.len(), 1000);
    assert!(ens.rates.iter().all(|&g| (GAMMA_M..=GAMMA_C).contains(&g)));
    // Under P(γ) ∝ 1/γ equal-width bins in ln γ are equally likely.
    let bins = 20;
    let width = (GAMMA_C / GAMMA_M).ln() / bins as f64;
    let mut counts = vec![0usize; bins];
    for &g in &ens.rates {
        counts[(((g / GAMMA_M).ln() / width) as usize).min(bins - 1)] += 1;
    }
    let expected = 1000.0 / bins as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(0.999);
    assert!(chi2 < critical, "χ² = {chi2} against {critical}");
    // Density per unit γ on the log histogram has slope −1.
    let points: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let lo = GAMMA_M * (i as f64 * width).exp();
            let hi = lo * width.exp();
            ((lo * hi).sqrt(), c as f64 / (hi - lo))
        })
        .collect();
    let slope = log_log_slope(&points);
    assert!((slope + 1.0).abs() < 0.05, "slope {slope}");
}

#[test]
fn ensemble_construction_details() {
    let one = build_ensemble(1, GAMMA_M, GAMMA_C, 1.7, 3).unwrap();
    assert_eq!(one.rates.len(), 1);
    assert_eq!(one.amplitude_per_fluctuator, 1.7);
    let a = build_ensemble(500, GAMMA_M, GAMMA_C, 2.0, 9).unwrap();
    let b = build_ensemble(500, GAMMA_M, GAMMA_C, 2.0, 9).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.rates, build_ensemble(500, GAMMA_M, GAMMA_C, 2.0, 10).unwrap().rates);
    assert!((a.n_fluctuators as f64 * a.amplitude_per_fluctuator.powi(2) - 4.0).abs() < 1e-12);
    assert!(matches!(build_ensemble(10, 0.5, 0.5, 1.0, 0), Err(Error::InvalidParameter { .. })));
    assert!(build_ensemble(10, -1.0, 0.5, 1.0, 0).is_err());
    assert!(build_ensemble(0, GAMMA_M, GAMMA_C, 1.0, 0).is_err());
}

#[test]
fn trajectory_moments_match_the_ensemble() {
    let ens = build_ensemble(1000, GAMMA_M, GAMMA_C, 1.0, 1).unwrap();
    let n = 4000;
    let mut xs = Vec::with_capacity(n);
    for i in 0..n {
        let tr = sample_trajectory(&ens, 0.1, 5.0, sub_seed(77, i as u64)).unwrap();
        xs.push(tr.values[tr.len() / 2]);
    }
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let var = sq.iter().sum::<f64>() / nf;
    let sd = |v: &[f64], m: f64| (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    let se_mean = sd(&xs, mean) / nf.sqrt();
    let se_var = sd(&sq, var) / nf.sqrt();
    assert!(mean.abs() < 3.0 * se_mean, "mean {mean} ± {se_mean}");
    assert!((var - 1.0).abs() < 3.0 * se_var, "variance {var} ± {se_var}");
}

#[test]
fn trajectories_are_reproducible() {
    let ens = build_ensemble(200, GAMMA_M, GAMMA_C, 1.0, 5).unwrap();
    let a = sample_trajectory(&ens, 0.01, 3.0, 1234).unwrap();
    let b = sample_trajectory(&ens, 0.01, 3.0, 1234).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 301);
    assert_ne!(a.values, sample_trajectory(&ens, 0.01, 3.0, 1235).unwrap().values);
    assert!(sample_trajectory(&ens, 0.0, 3.0, 1).is_err());
    assert!(sample_trajectory(&ens, 0.1, 0.05, 1).is_err());
}

#[test]
fn correlation_reference_values() {
    let ens = build_ensemble(10, GAMMA_M, GAMMA_C, 1.3, 0).unwrap();
    assert_eq!(correlation_analytic(&ens, 0.0), 1.3 * 1.3);
    // Frozen from the log-rate quadrature oracle.
    let at_one = 0.913_521_154_525_356_6;
    assert!((chi_oracle(GAMMA_M, GAMMA_C, 1.0, 1.0) - at_one).abs() < 1e-13);
    assert!((band(1.0).correlation(1.0) - at_one).abs() < 1e-10);
}

#[test]
fn correlation_is_the_ensemble_average_of_telegraph_correlations() {
    let b = band(1.0);
    for tau in log_grid(1e-4, 1e5, 60) {
        let want = chi_oracle(GAMMA_M, GAMMA_C, 1.0, tau);
        assert!((b.correlation(tau) - want).abs() < 1e-10, "τ = {tau}");
    }
}

#[test]
fn correlation_decreases() {
    let b = band(1.0);
    let mut last = b.correlation(0.0);
    for tau in log_grid(1e-6, 1e6, 400) {
        let c = b.correlation(tau);
        assert!(c < last, "τ = {tau}");
        last = c;
    }
    assert_eq!(b.correlation(-2.0), b.correlation(2.0));
}

#[test]
fn spectral_plateau_value() {
    let b = band(1.0);
    let formula = (1.0 - GAMMA_M / GAMMA_C) / (2.0 * std::f64::consts::PI * GAMMA_M * (GAMMA_C / GAMMA_M).ln());
    assert!((formula - PLATEAU).abs() < 1e-9);
    assert!((b.white_plateau() - PLATEAU).abs() < 1e-9);
    assert!((b.spectral_density(0.0) / PLATEAU - 1.0).abs() < 1e-12);
    assert!((b.spectral_density(1e-9) / PLATEAU - 1.0).abs() < 1e-6);
}

#[test]
fn spectral_density_is_the_cosine_transform_of_the_correlation() {
    // S(ω) = (1/π)∫₀^∞ χ(τ) cos ωτ dτ, with panels no wider than half a
    // period and growing with τ where χ varies slowly.
    let b = band(1.0);
    let t_end = 24.0 / (2.0 * GAMMA_M);
    for omega in log_grid(1e-3, 3.0, 10) {
        let mut total = 0.0;
        let mut a = 0.0;
        while a < t_end {
            let h = (std::f64::consts::PI / omega).min(0.5 + 0.25 * a).min(t_end - a);
            total += common::integrate(|t| b.correlation(t) * (omega * t).cos(), a, a + h, 1);
            a += h;
        }
        let numeric = total / std::f64::consts::PI;
        let exact = b.spectral_density(omega);
        assert!((numeric / exact - 1.0).abs() < 1e-6, "ω = {omega}: {numeric} vs {exact}");
    }
}

#[test]
fn spectral_slopes() {
    let b = band(1.0);
    let mid: Vec<(f64, f64)> = log_grid(20.0 * GAMMA_M, 0.1 * 2.0 * GAMMA_C, 50)
        .into_iter()
        .map(|w| (w, b.spectral_density(w)))
        .collect();
    let slope = log_log_slope(&mid);
    assert!((slope + 1.0).abs() < 0.05, "mid-band slope {slope}");
    let tail: Vec<(f64, f64)> = log_grid(20.0 * 2.0 * GAMMA_C, 1e4, 50)
        .into_iter()
        .map(|w| (w, b.spectral_density(w)))
        .collect();
    let slope = log_log_slope(&tail);
    assert!((slope + 2.0).abs() < 0.05, "tail slope {slope}");
}

#[test]
fn asymptotic_branches_match_the_exact_density() {
    let ens = build_ensemble(10, GAMMA_M, GAMMA_C, 1.0, 0).unwrap();
    let cases = [
        (2.0 * GAMMA_M / 100.0, SpectralRegime::White, 0.01),
        ((4.0 * GAMMA_M * GAMMA_C).sqrt(), SpectralRegime::OneOverF, 0.10),
        (200.0 * GAMMA_C, SpectralRegime::Lorentzian, 0.02),
    ];
    for (omega, regime, tol) in cases {
        let (r, approx) = spectral_asymptotics(&ens, omega);
        assert_eq!(r, regime);
        let exact = spectral_density(&ens, omega);
        assert!((approx / exact - 1.0).abs() < tol, "ω = {omega}: {approx} vs {exact}");
    }
}

#[test]
fn spectral_density_scales_with_variance() {
    for w in log_grid(1e-5, 100.0, 30) {
        assert_eq!(band(2.0).spectral_density(w), 4.0 * band(1.0).spectral_density(w));
    }
}

#[test]
fn lowering_the_slow_cutoff_only_renormalises_the_mid_band() {
    // S ∝ 1/ln(γ_c/γ_m): the raw density drops by the log ratio, the
    // log-normalised density is unchanged to within 20%.
    let wide = FluctuatorBand::new(5e-13, GAMMA_C, 1.0).unwrap();
    let b = band(1.0);
    for w in log_grid(1e-3, 10.0, 20) {
        let (s0, s1) = (b.spectral_density(w), wide.spectral_density(w));
        let normalised = (s1 * wide.log_ratio()) / (s0 * b.log_ratio());
        assert!((normalised - 1.0).abs() < 0.2, "ω = {w}: {normalised}");
        assert!((s0 / s1 - wide.log_ratio() / b.log_ratio()).abs() < 0.2 * s0 / s1);
    }
}

#[test]
fn empirical_correlation_converges_to_the_analytic_one() {
    let ens = build_ensemble(1000, GAMMA_M, GAMMA_C, 1.0, 2024).unwrap();
    let dt = 0.5;
    let t_max = 2.0 / (2.0 * GAMMA_M);
    let trajectories: Vec<NoiseTrajectory> = (0..200)
        .map(|i| sample_trajectory(&ens, dt, t_max, sub_seed(99, i)).unwrap())
        .collect();
    let max_lag = (1.0 / (2.0 * GAMMA_M) / dt).round() as usize;
    let est = empirical_correlation(&trajectories, max_lag).unwrap();
    assert!((est.values[0] - 1.0).abs() < 3.0 * est.std_err[0]);
    let mut lags: Vec<usize> = log_grid(1.0, max_lag as f64, 80).iter().map(|l| l.round() as usize).collect();
    lags.dedup();
    for lag in lags {
        let want = ens.band().correlation(est.tau(lag));
        let (got, se) = (est.values[lag], est.std_err[lag]);
        assert!((got - want).abs() < 3.0 * se, "τ = {}: {got} ± {se} vs {want}", est.tau(lag));
    }
}

#[test]
fn empirical_correlation_edge_cases() {
    let zeros = vec![NoiseTrajectory::zeros(0.1, 50); 3];
    let est = empirical_correlation(&zeros, 10).unwrap();
    assert!(est.values.iter().chain(&est.std_err).all(|&x| x == 0.0));
    let mismatched = vec![NoiseTrajectory::zeros(0.1, 50), NoiseTrajectory::zeros(0.2, 50)];
    assert!(matches!(empirical_correlation(&mismatched, 10), Err(Error::GridMismatch(_))));
    let short = vec![NoiseTrajectory::zeros(0.1, 50), NoiseTrajectory::zeros(0.1, 40)];
    assert!(matches!(empirical_correlation(&short, 10), Err(Error::GridMismatch(_))));
    assert!(empirical_correlation(&zeros[..1], 10).is_err());
    assert!(empirical_correlation(&zeros, 50).is_err());
}

proptest! {
    #[test]
    fn spectral_density_is_even_and_nonnegative(w in -1e4f64..1e4, gm in 1e-8f64..1e-2, span in 1.5f64..1e6) {
        let b = FluctuatorBand::new(gm, gm * span, 1.0).unwrap();
        let s = b.spectral_density(w);
        prop_assert!(s >= 0.0);
        prop_assert_eq!(s, b.spectral_density(-w));
    }
}
