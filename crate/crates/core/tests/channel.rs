//! Samplers against their distributions and the composite-gain CDF against
//! a direct sum.

mod common;

use covert_relay::channel::{
    sample_exp1, sample_noise_power, sample_tas_mrc_gain, tas_mrc_gain_cdf, tas_mrc_gain_pdf, RngSpec,
};
use covert_relay::model::{AntennaConfig, SystemParams};
use proptest::prelude::*;

use common::tas_mrc_cdf_oracle;

const KS_SAMPLES: usize = 20_000;
// Kolmogorov-Smirnov critical value at the 0.1% level
const KS_CRITICAL: f64 = 1.95;

fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

fn ks_passes(d: f64) -> bool {
    d * (KS_SAMPLES as f64).sqrt() < KS_CRITICAL
}

#[test]
fn exp1_sampler_passes_ks() {
    let mut rng = RngSpec::new(42, 0).generator();
    let xs = (0..KS_SAMPLES).map(|_| sample_exp1(&mut rng)).collect();
    assert!(ks_passes(ks_statistic(xs, |x| -(-x).exp_m1())));
}

#[test]
fn noise_sampler_is_log_uniform() {
    let sp = SystemParams::from_dbm(1.0, 1.0, -5.0, 2.0, AntennaConfig::single()).unwrap();
    let (mu1, mu2) = sp.noise_bounds();
    let mut rng = RngSpec::new(42, 1).generator();
    let xs = (0..KS_SAMPLES).map(|_| sample_noise_power(&sp, &mut rng)).collect();
    let cdf = |x: f64| ((x / mu1).ln() / (mu2 / mu1).ln()).clamp(0.0, 1.0);
    assert!(ks_passes(ks_statistic(xs, cdf)));
}

#[test]
fn tas_mrc_sampler_passes_ks() {
    for (i, &(n_t, n_r)) in [(1u32, 1u32), (2, 2), (2, 8), (4, 4)].iter().enumerate() {
        let mut rng = RngSpec::new(42, 10 + i as u64).generator();
        let xs = (0..KS_SAMPLES)
            .map(|_| sample_tas_mrc_gain(n_t, n_r, &mut rng))
            .collect();
        let d = ks_statistic(xs, |x| tas_mrc_gain_cdf(n_t, n_r, x).unwrap());
        assert!(ks_passes(d), "({n_t}, {n_r}): D = {d}");
    }
}

#[test]
fn identical_specs_give_identical_draws() {
    let draw = |spec: RngSpec| {
        let mut rng = spec.generator();
        (0..100)
            .map(|_| sample_tas_mrc_gain(2, 3, &mut rng))
            .collect::<Vec<_>>()
    };
    assert_eq!(draw(RngSpec::new(7, 3)), draw(RngSpec::new(7, 3)));
    assert_ne!(draw(RngSpec::new(7, 3)), draw(RngSpec::new(7, 4)));
}

proptest! {
    #[test]
    fn cdf_matches_direct_sum(n_t in 1u32..=4, n_r in 1u32..=8, x in 0.0f64..40.0) {
        let v = tas_mrc_gain_cdf(n_t, n_r, x).unwrap();
        prop_assert!((v - tas_mrc_cdf_oracle(n_t, n_r, x)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn more_antennas_never_raise_the_cdf(n_t in 1u32..=4, n_r in 1u32..=8, x in 0.01f64..30.0) {
        let base = tas_mrc_gain_cdf(n_t, n_r, x).unwrap();
        prop_assert!(tas_mrc_gain_cdf(n_t + 1, n_r, x).unwrap() <= base + 1e-15);
        prop_assert!(tas_mrc_gain_cdf(n_t, n_r + 1, x).unwrap() <= base + 1e-15);
    }

    #[test]
    fn pdf_is_the_cdf_derivative(n_t in 1u32..=4, n_r in 1u32..=8, x in 0.05f64..20.0) {
        let h = 1e-5 * x;
        let fd = (tas_mrc_gain_cdf(n_t, n_r, x + h).unwrap() - tas_mrc_gain_cdf(n_t, n_r, x - h).unwrap()) / (2.0 * h);
        let pdf = tas_mrc_gain_pdf(n_t, n_r, x).unwrap();
        prop_assert!((pdf - fd).abs() <= 1e-6 * pdf.abs().max(1e-6), "pdf {pdf} fd {fd}");
    }

    #[test]
    fn noise_draws_stay_in_support(seed in any::<u64>(), rho in 1.01f64..5.0, sigma_dbm in -30.0f64..10.0) {
        let sp = SystemParams::from_dbm(1.0, 1.0, sigma_dbm, rho, AntennaConfig::single()).unwrap();
        let (mu1, mu2) = sp.noise_bounds();
        let mut rng = RngSpec::new(seed, 0).generator();
        for _ in 0..100 {
            let s = sample_noise_power(&sp, &mut rng);
            prop_assert!(s >= mu1 * (1.0 - 1e-12) && s <= mu2 * (1.0 + 1e-12));
        }
    }
}
