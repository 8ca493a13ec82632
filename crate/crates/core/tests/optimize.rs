//! Optimizer results against brute force and the constraint set.

use covert_relay::detection::min_dep_two_hop;
use covert_relay::model::{AntennaConfig, ConstraintSet, SystemParams};
use covert_relay::optimize::{
    evaluate_point, optimize_multi_traced, optimize_single_report, rate_at_outage, symmetric_covert_power,
    violated_constraints, MultiSearch, SingleOptions,
};
use covert_relay::throughput::{throughput, Scenario};
use covert_relay::Error;
use proptest::prelude::*;

fn params(sigma_dbm: f64) -> SystemParams {
    SystemParams::from_dbm(1.0, 1.0, sigma_dbm, 1.5, AntennaConfig::single()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rate_at_outage_hits_delta(log_p in -4.0f64..0.5, delta in 0.01f64..0.5, multi in any::<bool>()) {
        let p = 10f64.powf(log_p);
        let (scenario, ant) = if multi {
            (Scenario::Multi, AntennaConfig::symmetric(2, 4).unwrap())
        } else {
            (Scenario::Single, AntennaConfig::single())
        };
        let sp = params(-5.0).with_antennas(ant);
        let t = rate_at_outage(p, delta, scenario, &sp).unwrap();
        let out = throughput(&sp.with_powers(p, p).unwrap(), covert_relay::model::RateParams::new(t).unwrap(), scenario).unwrap();
        prop_assert!((out.p_out - delta).abs() < 1e-9);
    }

    #[test]
    fn symmetric_boundary_meets_covertness(epsilon in 0.02f64..0.5, sigma_dbm in -10.0f64..3.0) {
        let c = ConstraintSet::new(epsilon, 0.1, 5.0).unwrap();
        let sp = params(sigma_dbm);
        let p = symmetric_covert_power(&c, &sp, 5.0).unwrap().expect("boundary below P_max");
        prop_assert!(min_dep_two_hop(&sp.with_powers(p, p).unwrap()).unwrap() >= 1.0 - epsilon);
        let above = p * (1.0 + 1e-9);
        prop_assert!(min_dep_two_hop(&sp.with_powers(above, above).unwrap()).unwrap() < 1.0 - epsilon + 1e-9);
    }

    #[test]
    fn single_optimum_is_feasible_and_beats_the_grid(
        epsilon in 0.05f64..0.5,
        delta in 0.02f64..0.3,
        sigma_dbm in -10.0f64..3.0,
    ) {
        let c = ConstraintSet::new(epsilon, delta, 5.0).unwrap();
        let sp = params(sigma_dbm);
        let options = SingleOptions { dense: 40, ..SingleOptions::default() };
        let report = optimize_single_report(&c, &sp, &options).unwrap();
        let o = &report.optimum;
        let ev = evaluate_point(o.p_s, o.p_r, o.t, Scenario::Single, &sp).unwrap();
        prop_assert!(violated_constraints(o.p_s, o.p_r, &ev, &c).is_empty());
        prop_assert!((ev.eta - o.eta).abs() < 1e-12);
        let best = report.dense.best.unwrap();
        prop_assert!(o.eta >= best.eta - report.dense.cell_variation);
    }
}

#[test]
fn multi_optimum_dominates_its_trace_and_respects_the_budget() {
    let c = ConstraintSet::new(0.15, 0.1, 5.0).unwrap();
    let sp = params(-5.0).with_antennas(AntennaConfig::symmetric(2, 8).unwrap());
    let mut search = MultiSearch::default_for(&c, &sp).unwrap();
    search.h1 = search.p_s_upper / 20.0;
    search.h2 = search.p_r_upper / 20.0;
    let full = optimize_multi_traced(&c, &sp, &search).unwrap();
    let o = &full.optimum;
    let ev = evaluate_point(o.p_s, o.p_r, o.t, Scenario::Multi, &sp).unwrap();
    assert!(violated_constraints(o.p_s, o.p_r, &ev, &c).is_empty());
    assert!(full.trace.iter().all(|g| g.eta <= o.eta));
    assert_eq!(full.evaluations, full.trace.len() as u64);

    search.v_max = 50;
    let capped = optimize_multi_traced(&c, &sp, &search).unwrap();
    assert!(capped.evaluations <= 50);
    assert!(capped.optimum.eta <= o.eta);
}

#[test]
fn unreachable_rate_step_is_infeasible() {
    let c = ConstraintSet::new(0.15, 0.1, 5.0).unwrap();
    let sp = params(-5.0).with_antennas(AntennaConfig::symmetric(2, 2).unwrap());
    let mut search = MultiSearch::default_for(&c, &sp).unwrap();
    search.h3 = 20.0;
    assert!(matches!(
        optimize_multi_traced(&c, &sp, &search),
        Err(Error::Infeasible(_))
    ));
}
