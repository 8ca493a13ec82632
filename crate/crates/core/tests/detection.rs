//! Detection error probability against a direct integration of the
//! radiometer decision, and its shape in threshold, power and uncertainty.

mod common;

use covert_relay::channel::RngSpec;
use covert_relay::detection::{
    dep_slot, dep_slot_reference, mc_dep_slot, min_dep_slot, min_dep_two_hop, optimal_threshold,
};
use covert_relay::model::{AntennaConfig, SystemParams};
use proptest::prelude::*;

use common::dep_slot_oracle;

fn params(p_s: f64, p_r: f64, sigma_dbm: f64, rho: f64) -> SystemParams {
    SystemParams::from_dbm(p_s, p_r, sigma_dbm, rho, AntennaConfig::single()).unwrap()
}

fn argmin_offset(p: f64, sp: &SystemParams) -> f64 {
    let (mu1, mu2) = sp.noise_bounds();
    let (lo, hi) = (0.5 * mu1, 4.0 * mu2);
    let step = (hi - lo) / 999.0;
    let best = (0..1000)
        .map(|i| lo + step * i as f64)
        .map(|tau| (dep_slot_reference(p, tau, sp).unwrap(), tau))
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });
    (best.1 - optimal_threshold(sp)).abs() / step
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn reference_matches_direct_integration(
        log_p in -4.0f64..1.0,
        sigma_dbm in -10.0f64..3.0,
        rho in 1.05f64..3.0,
        frac in 0.0f64..1.0,
    ) {
        let p = 10f64.powf(log_p);
        let sp = params(p, p, sigma_dbm, rho);
        let (mu1, mu2) = sp.noise_bounds();
        let tau = 0.5 * mu1 + frac * (4.0 * mu2 - 0.5 * mu1);
        let reference = dep_slot_reference(p, tau, &sp).unwrap();
        let oracle = dep_slot_oracle(p, tau, sp.sigma_n2(), rho);
        prop_assert!((reference - oracle).abs() < 1e-9, "tau {tau}: {reference} vs {oracle}");
        prop_assert!((0.0..=1.0).contains(&reference));
        prop_assert!((dep_slot(p, tau, &sp).unwrap() - reference).abs() < 1e-9);
    }

    #[test]
    fn minimum_is_reference_at_optimal_threshold(
        log_p in -4.0f64..1.0,
        sigma_dbm in -10.0f64..3.0,
        rho in 1.05f64..3.0,
    ) {
        let p = 10f64.powf(log_p);
        let sp = params(p, p, sigma_dbm, rho);
        let at_tau = dep_slot_reference(p, optimal_threshold(&sp), &sp).unwrap();
        prop_assert!((min_dep_slot(p, &sp).unwrap() - at_tau).abs() < 1e-9);
    }

    // Holds once the received signal is comparable to the upper noise bound.
    #[test]
    fn optimal_threshold_is_grid_minimizer_at_moderate_snr(
        snr in 1.0f64..1e4,
        sigma_dbm in -10.0f64..3.0,
        rho in 1.01f64..3.0,
    ) {
        let sp = params(1.0, 1.0, sigma_dbm, rho);
        let p = snr * sp.sigma_n2() * rho;
        prop_assert!(argmin_offset(p, &sp.with_powers(p, p).unwrap()) <= 1.0);
    }

    #[test]
    fn two_hop_minimum_is_symmetric_and_combines_slots(
        a in -4.0f64..1.0,
        b in -4.0f64..1.0,
        sigma_dbm in -10.0f64..3.0,
    ) {
        let (p_s, p_r) = (10f64.powf(a), 10f64.powf(b));
        let xi = min_dep_two_hop(&params(p_s, p_r, sigma_dbm, 1.5)).unwrap();
        prop_assert_eq!(xi, min_dep_two_hop(&params(p_r, p_s, sigma_dbm, 1.5)).unwrap());
        let sp = params(p_s, p_r, sigma_dbm, 1.5);
        let (e1, e2) = (min_dep_slot(p_s, &sp).unwrap(), min_dep_slot(p_r, &sp).unwrap());
        prop_assert!((xi - (1.0 - (1.0 - e1) * (1.0 - e2))).abs() < 1e-15);
    }

    #[test]
    fn more_power_is_easier_to_detect(log_p in -5.0f64..1.0, factor in 1.01f64..10.0, sigma_dbm in -10.0f64..3.0) {
        let p = 10f64.powf(log_p);
        let sp = params(p, p, sigma_dbm, 1.5);
        prop_assert!(min_dep_slot(p * factor, &sp).unwrap() <= min_dep_slot(p, &sp).unwrap() + 1e-12);
    }

    #[test]
    fn more_uncertainty_helps_the_transmitter(rho in 1.01f64..3.0, step in 0.01f64..1.0, sigma_dbm in -10.0f64..3.0) {
        let sp = params(3.0, 3.0, sigma_dbm, rho);
        let wider = sp.with_rho(rho + step).unwrap();
        prop_assert!(min_dep_two_hop(&wider).unwrap() >= min_dep_two_hop(&sp).unwrap() - 1e-12);
    }
}

#[test]
fn low_snr_minimum_sits_below_the_upper_noise_bound() {
    // With the signal well under the noise floor the error curve turns
    // upward before μ₂, so ρσ² is no longer the minimizer.
    let sp = params(1.0, 1.0, -5.0, 2.5);
    let p = 0.01 * sp.sigma_n2();
    let (mu1, mu2) = sp.noise_bounds();
    let mid = 0.5 * (mu1 + mu2);
    assert!(dep_slot_reference(p, mid, &sp).unwrap() < dep_slot_reference(p, mu2, &sp).unwrap());
    assert!(argmin_offset(p, &sp.with_powers(p, p).unwrap()) > 1.0);
}

#[test]
fn simulated_false_alarm_and_miss_never_exceed_one() {
    let sp = params(3.0, 3.0, -5.0, 1.5);
    let (mu1, mu2) = sp.noise_bounds();
    for (i, tau) in [mu1 * 1.1, 0.5 * (mu1 + mu2), mu2, 2.0 * mu2].into_iter().enumerate() {
        let est = mc_dep_slot(3.0 * 1e-4, tau, &sp, 200_000, RngSpec::new(42, i as u64), 2).unwrap();
        assert!(est.mean <= 1.0 + 3.0 * est.stderr, "tau {tau}: {est:?}");
    }
}

#[test]
fn slot_minimum_matches_simulation() {
    for (i, sigma) in [-10.0, -5.0, 3.0].into_iter().enumerate() {
        let sp = params(3.0, 3.0, sigma, 1.5);
        let est = mc_dep_slot(
            3.0,
            optimal_threshold(&sp),
            &sp,
            2_000_000,
            RngSpec::new(42, i as u64),
            4,
        )
        .unwrap();
        let analytic = min_dep_slot(3.0, &sp).unwrap();
        assert!(est.agrees_with(analytic, 3.0), "{sigma} dBm: {analytic} vs {est:?}");
    }
}
