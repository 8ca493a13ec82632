use log::warn;
use rayon::prelude::*;

use super::{constraint_slack, evaluate_point, power_scan_limit, Constraint, Method, Optimum};
use crate::detection::{combine_slots, min_dep_slot};
use crate::error::{Error, Result};
use crate::model::{ConstraintSet, RateParams, SystemParams};
use crate::throughput::{outage_hop_multi_reference, outage_hop_single, Scenario};

/// A point of a rectangular search grid with its throughput.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub p_s: f64,
    pub p_r: f64,
    pub t: f64,
    pub eta: f64,
}

/// Result of an exhaustive single-antenna grid scan.
#[derive(Debug, Clone, PartialEq)]
pub struct GridScan {
    pub n: usize,
    pub p_upper: f64,
    pub t_upper: f64,
    /// Feasible point of largest η, lowest index on ties.
    pub best: Option<GridPoint>,
    /// Largest |Δη| between the best point and its axis neighbours.
    pub cell_variation: f64,
    pub feasible: usize,
}

/// Scans `p_s, p_r ∈ {p_upper·i/n}` and `T ∈ {t_upper·k/n}`, `i, j, k = 1..=n`,
/// for the feasible single-antenna point of largest throughput.
pub fn dense_grid_single(
    constraints: &ConstraintSet,
    params: &SystemParams,
    n: usize,
    p_upper: f64,
    t_upper: f64,
) -> Result<GridScan> {
    if n < 2 {
        return Err(Error::domain(format!("grid needs at least 2 points per axis, got {n}")));
    }
    if !(p_upper > 0.0 && t_upper > 0.0) {
        return Err(Error::domain(format!(
            "grid bounds must be positive, got ({p_upper}, {t_upper})"
        )));
    }
    let powers: Vec<f64> = (1..=n).map(|i| p_upper * i as f64 / n as f64).collect();
    let rates: Vec<f64> = (1..=n).map(|k| t_upper * k as f64 / n as f64).collect();
    let rows: Vec<(f64, Vec<f64>)> = powers
        .par_iter()
        .map(|&p| -> Result<(f64, Vec<f64>)> {
            let pe = min_dep_slot(p, params)?;
            let outages = rates
                .iter()
                .map(|&t| outage_hop_single(p, RateParams::new(t)?, params))
                .collect::<Result<Vec<_>>>()?;
            Ok((pe, outages))
        })
        .collect::<Result<_>>()?;

    let eta_at = |i: usize, j: usize, k: usize| -> (f64, f64, f64) {
        let xi = combine_slots(rows[i].0, rows[j].0);
        let p_out = 1.0 - (1.0 - rows[i].1[k]) * (1.0 - rows[j].1[k]);
        (xi, p_out, rates[k] * (1.0 - p_out))
    };

    let mut best: Option<GridPoint> = None;
    let mut feasible = 0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (xi, p_out, eta) = eta_at(i, j, k);
                if xi < constraints.min_dep()
                    || p_out > constraints.delta()
                    || powers[i] > constraints.p_max()
                    || powers[j] > constraints.p_max()
                {
                    continue;
                }
                feasible += 1;
                if best.is_none_or(|b| eta > b.eta) {
                    best = Some(GridPoint {
                        i,
                        j,
                        k,
                        p_s: powers[i],
                        p_r: powers[j],
                        t: rates[k],
                        eta,
                    });
                }
            }
        }
    }

    let mut cell_variation: f64 = 0.0;
    if let Some(b) = best {
        let idx = [b.i as isize, b.j as isize, b.k as isize];
        for axis in 0..3 {
            for step in [-1isize, 1] {
                let mut nb = idx;
                nb[axis] += step;
                if nb.iter().all(|&x| x >= 0 && (x as usize) < n) {
                    let (_, _, eta) = eta_at(nb[0] as usize, nb[1] as usize, nb[2] as usize);
                    cell_variation = cell_variation.max((eta - b.eta).abs());
                }
            }
        }
    }

    Ok(GridScan {
        n,
        p_upper,
        t_upper,
        best,
        cell_variation,
        feasible,
    })
}

/// Parameters of the multi-antenna grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiSearch {
    /// Source power step.
    pub h1: f64,
    /// Relay power step.
    pub h2: f64,
    /// Rate step.
    pub h3: f64,
    /// The rate loop stops once η comes within `phi` of the best value so far.
    pub phi: f64,
    /// Cap on the number of evaluated points.
    pub v_max: u64,
    /// Largest source power scanned.
    pub p_s_upper: f64,
    /// Largest relay power scanned.
    pub p_r_upper: f64,
}

impl MultiSearch {
    /// Explicit steps; powers are scanned up to `P_max`.
    pub fn new(constraints: &ConstraintSet, h1: f64, h2: f64, h3: f64, phi: f64, v_max: u64) -> Result<Self> {
        let s = Self {
            h1,
            h2,
            h3,
            phi,
            v_max,
            p_s_upper: constraints.p_max(),
            p_r_upper: constraints.p_max(),
        };
        s.validate(constraints)?;
        Ok(s)
    }

    /// Default search: 100 power steps up to `min(P_max, 4 p_sym)` where
    /// `p_sym` is the equal-power covertness boundary, rate step 0.01,
    /// `phi = 1e-6`, `v_max = 1e6`.
    pub fn default_for(constraints: &ConstraintSet, params: &SystemParams) -> Result<Self> {
        let upper = power_scan_limit(constraints, params)?;
        let s = Self {
            h1: upper / 100.0,
            h2: upper / 100.0,
            h3: 0.01,
            phi: 1e-6,
            v_max: 1_000_000,
            p_s_upper: upper,
            p_r_upper: upper,
        };
        s.validate(constraints)?;
        Ok(s)
    }

    /// Checks steps, budget and scan bounds against `constraints`.
    pub fn validate(&self, constraints: &ConstraintSet) -> Result<()> {
        for (name, v) in [("h1", self.h1), ("h2", self.h2), ("h3", self.h3), ("phi", self.phi)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.v_max == 0 {
            return Err(Error::domain("v_max must be at least 1"));
        }
        for (name, v) in [("p_s_upper", self.p_s_upper), ("p_r_upper", self.p_r_upper)] {
            if !(v > 0.0 && v <= constraints.p_max() * (1.0 + 1e-12)) {
                return Err(Error::domain(format!("{name} must lie in (0, P_max], got {v}")));
            }
        }
        Ok(())
    }

    fn axis(upper: f64, h: f64) -> Vec<f64> {
        let count = (upper / h * (1.0 + 1e-12)).floor() as usize;
        (1..=count).map(|i| i as f64 * h).collect()
    }
}

/// Result of [`optimize_multi_traced`].
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSearchOutcome {
    pub optimum: Optimum,
    pub evaluations: u64,
    /// Every evaluated feasible point in visiting order.
    pub trace: Vec<GridPoint>,
}

// Hop outages at T = h3, 2h3, ... up to and including the first value above δ.
fn outage_rows(
    powers: &[f64],
    n_t: u32,
    n_r: u32,
    h3: f64,
    delta: f64,
    params: &SystemParams,
) -> Result<Vec<Vec<f64>>> {
    powers
        .par_iter()
        .map(|&p| {
            let mut row = Vec::new();
            let mut k = 1usize;
            loop {
                let v = outage_hop_multi_reference(p, RateParams::new(k as f64 * h3)?, params, n_t, n_r)?;
                row.push(v);
                if v > delta || k >= 1_000_000 {
                    break;
                }
                k += 1;
            }
            Ok(row)
        })
        .collect()
}

/// Multi-antenna throughput maximization by grid search. See
/// [`optimize_multi_traced`].
pub fn optimize_multi(constraints: &ConstraintSet, params: &SystemParams, search: &MultiSearch) -> Result<Optimum> {
    Ok(optimize_multi_impl(constraints, params, search, false)?.optimum)
}

/// Multi-antenna throughput maximization, returning every evaluated point.
///
/// Visits `p_s = i·h1`, `p_r = j·h2` in lexicographic order. Pairs failing
/// the covertness constraint are skipped. For each remaining pair the
/// rate `T = k·h3`, `k = 1, 2, ...`, increases while the end-to-end outage
/// stays within `δ`. After each evaluation the best point is updated
/// (strict improvement, so ties keep the lowest index), and the rate loop
/// ends early when η lies within `phi` of the previous best. The whole
/// search stops after `v_max` evaluations.
pub fn optimize_multi_traced(
    constraints: &ConstraintSet,
    params: &SystemParams,
    search: &MultiSearch,
) -> Result<MultiSearchOutcome> {
    optimize_multi_impl(constraints, params, search, true)
}

fn optimize_multi_impl(
    constraints: &ConstraintSet,
    params: &SystemParams,
    search: &MultiSearch,
    keep_trace: bool,
) -> Result<MultiSearchOutcome> {
    search.validate(constraints)?;
    let ps_axis = MultiSearch::axis(search.p_s_upper, search.h1);
    let pr_axis = MultiSearch::axis(search.p_r_upper, search.h2);
    if ps_axis.is_empty() || pr_axis.is_empty() {
        return Err(Error::domain("power step exceeds the scanned power range"));
    }
    let pe_s: Vec<f64> = ps_axis
        .par_iter()
        .map(|&p| min_dep_slot(p, params))
        .collect::<Result<_>>()?;
    let pe_r: Vec<f64> = pr_axis
        .par_iter()
        .map(|&p| min_dep_slot(p, params))
        .collect::<Result<_>>()?;
    let ant = params.antennas();
    let (t1, r1) = ant.hop1();
    let (t2, r2) = ant.hop2();
    let delta = constraints.delta();
    let rows1 = outage_rows(&ps_axis, t1, r1, search.h3, delta, params)?;
    let rows2 = outage_rows(&pr_axis, t2, r2, search.h3, delta, params)?;

    let mut best: Option<GridPoint> = None;
    let mut trace = Vec::new();
    let mut v: u64 = 0;
    let mut any_covert = false;
    'scan: for (i, &p_s) in ps_axis.iter().enumerate() {
        for (j, &p_r) in pr_axis.iter().enumerate() {
            if combine_slots(pe_s[i], pe_r[j]) < constraints.min_dep() {
                continue;
            }
            any_covert = true;
            for k in 0.. {
                let (Some(&a), Some(&b)) = (rows1[i].get(k), rows2[j].get(k)) else {
                    break;
                };
                let p_out = 1.0 - (1.0 - a) * (1.0 - b);
                if p_out > delta {
                    break;
                }
                v += 1;
                let t = (k + 1) as f64 * search.h3;
                let point = GridPoint {
                    i,
                    j,
                    k,
                    p_s,
                    p_r,
                    t,
                    eta: t * (1.0 - p_out),
                };
                if keep_trace {
                    trace.push(point);
                }
                let previous = best.map(|b| b.eta);
                if previous.is_none_or(|e| point.eta > e) {
                    best = Some(point);
                }
                if v >= search.v_max {
                    warn!(
                        "multi-antenna search stopped after v_max = {} evaluations",
                        search.v_max
                    );
                    break 'scan;
                }
                if previous.is_some_and(|e| (e - point.eta).abs() <= search.phi) {
                    break;
                }
            }
        }
    }

    let Some(b) = best else {
        return Err(if any_covert {
            Error::Infeasible(format!(
                "reliability: end-to-end outage exceeds delta = {delta} already at T = {} for every covert power pair",
                search.h3
            ))
        } else {
            Error::Infeasible(format!(
                "covertness: no scanned power pair reaches xi* >= {}",
                constraints.min_dep()
            ))
        });
    };

    let ev = evaluate_point(b.p_s, b.p_r, b.t, Scenario::Multi, params)?;
    let active = Constraint::ALL
        .into_iter()
        .filter(|&c| constraint_slack(c, b.p_s, b.p_r, &ev, constraints).abs() <= 1e-6)
        .collect();
    let optimum = Optimum::new(
        b.p_s,
        b.p_r,
        b.t,
        Scenario::Multi,
        constraints,
        params,
        active,
        Method::Grid,
        None,
    )?;
    Ok(MultiSearchOutcome {
        optimum,
        evaluations: v,
        trace,
    })
}
