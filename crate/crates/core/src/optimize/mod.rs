//! Covert-throughput maximization under covertness, reliability and power
//! constraints.
//!
//! ```text
//! max  η = T (1 - p_out)
//! s.t. ξ* >= 1 - ε,  p_out <= δ,  P_S <= P_max,  P_R <= P_max
//! ```
//!
//! The single-antenna problem is solved from its KKT conditions
//! ([`optimize_single`]); the multi-antenna problem by a feasibility-filtered
//! grid search ([`optimize_multi`]).

mod grid;
mod kkt;

use std::fmt;

use crate::detection::{min_dep_slot, min_dep_slot_derivative, min_dep_two_hop};
use crate::error::{Error, Result};
use crate::model::{ConstraintSet, RateParams, SystemParams};
use crate::throughput::{outage_hop_single, success_hop_single_gradient, throughput, Scenario};

pub use grid::{
    dense_grid_single, optimize_multi, optimize_multi_traced, GridPoint, GridScan, MultiSearch, MultiSearchOutcome,
};
pub use kkt::{optimize_single, optimize_single_report, SingleOptions, SingleReport};

/// Slack used when verifying feasibility of a returned point.
pub const FEASIBILITY_SLACK: f64 = 1e-9;

/// One of the four inequality constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    Covertness,
    Reliability,
    PowerS,
    PowerR,
}

impl Constraint {
    pub const ALL: [Constraint; 4] = [
        Constraint::Covertness,
        Constraint::Reliability,
        Constraint::PowerS,
        Constraint::PowerR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Constraint::Covertness => "covertness",
            Constraint::Reliability => "reliability",
            Constraint::PowerS => "power_s",
            Constraint::PowerR => "power_r",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How an optimum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Kkt,
    Grid,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Kkt => "kkt",
            Method::Grid => "grid",
        }
    }
}

/// Lagrange multipliers of the four constraints.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Multipliers {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

/// A converged KKT point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktPoint {
    pub p_s: f64,
    pub p_r: f64,
    pub t: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub residual_norm: f64,
}

/// Constraint values at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEval {
    pub xi: f64,
    pub p_out: f64,
    pub eta: f64,
}

/// Evaluates ξ*, p_out and η at `(p_s, p_r, t)`.
pub fn evaluate_point(p_s: f64, p_r: f64, t: f64, scenario: Scenario, params: &SystemParams) -> Result<PointEval> {
    let sp = params.with_powers(p_s, p_r)?;
    let xi = min_dep_two_hop(&sp)?;
    let out = throughput(&sp, RateParams::new(t)?, scenario)?;
    Ok(PointEval {
        xi,
        p_out: out.p_out,
        eta: out.eta,
    })
}

/// A feasible maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub p_s: f64,
    pub p_r: f64,
    pub t: f64,
    pub eta: f64,
    pub active_constraints: Vec<Constraint>,
    pub method: Method,
    pub kkt: Option<KktPoint>,
}

impl Optimum {
    /// Builds an optimum, re-evaluating η and checking feasibility with
    /// [`FEASIBILITY_SLACK`].
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p_s: f64,
        p_r: f64,
        t: f64,
        scenario: Scenario,
        constraints: &ConstraintSet,
        params: &SystemParams,
        active_constraints: Vec<Constraint>,
        method: Method,
        kkt: Option<KktPoint>,
    ) -> Result<Self> {
        let ev = evaluate_point(p_s, p_r, t, scenario, params)?;
        let violations = violated_constraints(p_s, p_r, &ev, constraints);
        if let Some(c) = violations.first() {
            return Err(Error::numeric(format!(
                "candidate ({p_s}, {p_r}, {t}) violates the {c} constraint (xi = {}, p_out = {})",
                ev.xi, ev.p_out
            )));
        }
        let mut active_constraints = active_constraints;
        active_constraints.sort();
        active_constraints.dedup();
        Ok(Self {
            p_s,
            p_r,
            t,
            eta: ev.eta,
            active_constraints,
            method,
            kkt,
        })
    }

    pub fn is_active(&self, c: Constraint) -> bool {
        self.active_constraints.contains(&c)
    }
}

/// Constraints violated beyond [`FEASIBILITY_SLACK`], in declaration order.
pub fn violated_constraints(p_s: f64, p_r: f64, ev: &PointEval, constraints: &ConstraintSet) -> Vec<Constraint> {
    let mut out = Vec::new();
    if ev.xi < constraints.min_dep() - FEASIBILITY_SLACK {
        out.push(Constraint::Covertness);
    }
    if ev.p_out > constraints.delta() + FEASIBILITY_SLACK {
        out.push(Constraint::Reliability);
    }
    if p_s > constraints.p_max() * (1.0 + FEASIBILITY_SLACK) {
        out.push(Constraint::PowerS);
    }
    if p_r > constraints.p_max() * (1.0 + FEASIBILITY_SLACK) {
        out.push(Constraint::PowerR);
    }
    out
}

/// Relative slack of each constraint at a point; zero means equality.
pub fn constraint_slack(c: Constraint, p_s: f64, p_r: f64, ev: &PointEval, constraints: &ConstraintSet) -> f64 {
    match c {
        Constraint::Covertness => (ev.xi - constraints.min_dep()) / constraints.min_dep(),
        Constraint::Reliability => (constraints.delta() - ev.p_out) / constraints.delta(),
        Constraint::PowerS => (constraints.p_max() - p_s) / constraints.p_max(),
        Constraint::PowerR => (constraints.p_max() - p_r) / constraints.p_max(),
    }
}

/// Hop-level derivatives feeding the Lagrangian gradient.
struct HopTerms {
    q1: f64,
    q2: f64,
    dq1_dp: f64,
    dq2_dp: f64,
    dq1_dt: f64,
    dq2_dt: f64,
    d1: f64,
    d2: f64,
    dpe1_dp: f64,
    dpe2_dp: f64,
}

fn hop_terms(p_s: f64, p_r: f64, t: f64, params: &SystemParams) -> Result<HopTerms> {
    let rate = RateParams::new(t)?;
    let q1 = 1.0 - outage_hop_single(p_s, rate, params)?;
    let q2 = 1.0 - outage_hop_single(p_r, rate, params)?;
    let (dq1_dp, dq1_dt) = success_hop_single_gradient(p_s, t, params)?;
    let (dq2_dp, dq2_dt) = success_hop_single_gradient(p_r, t, params)?;
    Ok(HopTerms {
        q1,
        q2,
        dq1_dp,
        dq2_dp,
        dq1_dt,
        dq2_dt,
        d1: 1.0 - min_dep_slot(p_s, params)?,
        d2: 1.0 - min_dep_slot(p_r, params)?,
        dpe1_dp: min_dep_slot_derivative(p_s, params)?,
        dpe2_dp: min_dep_slot_derivative(p_r, params)?,
    })
}

#[cfg(debug_assertions)]
fn cross_check_hop_derivatives(p_s: f64, p_r: f64, t: f64, params: &SystemParams, h: &HopTerms) -> Result<()> {
    let check = |what: &str, analytic: f64, f: &dyn Fn(f64) -> Result<f64>, x: f64, scale: f64| -> Result<()> {
        let step = 1e-6 * scale;
        let fd = (f(x + step)? - f(x - step)?) / (2.0 * step);
        let tol = 1e-4 * analytic.abs().max(fd.abs()) + 1e-7 * (f(x)?.abs() / scale).max(f64::MIN_POSITIVE);
        if (fd - analytic).abs() > tol {
            return Err(Error::numeric(format!(
                "{what}: analytic derivative {analytic:e} disagrees with finite difference {fd:e}"
            )));
        }
        Ok(())
    };
    let pout = |p: f64, tt: f64| outage_hop_single(p, RateParams::new(tt)?, params);
    for (label, p, dq_dp, dq_dt, dpe) in [
        ("hop 1", p_s, h.dq1_dp, h.dq1_dt, h.dpe1_dp),
        ("hop 2", p_r, h.dq2_dp, h.dq2_dt, h.dpe2_dp),
    ] {
        check(&format!("{label} dP_e/dp"), dpe, &|x| min_dep_slot(x, params), p, p)?;
        check(&format!("{label} dp_out/dp"), -dq_dp, &|x| pout(x, t), p, p)?;
        if t > 0.0 {
            check(&format!("{label} dp_out/dT"), -dq_dt, &|x| pout(p, x), t, t)?;
        }
    }
    Ok(())
}

/// Partial derivatives `(∂L/∂P_S, ∂L/∂P_R, ∂L/∂T)` of the single-antenna
/// Lagrangian
///
/// ```text
/// L = -T(1 - p_out) + K₁(1 - ε - ξ*) + K₂(p_out - δ) + K₃(P_S - P_max) + K₄(P_R - P_max)
/// ```
///
/// In debug builds each hop-level derivative is compared with a central
/// finite difference (step `1e-6` times the variable) and a mismatch beyond
/// `1e-4` relative is reported as a numeric error.
pub fn lagrangian_gradient(
    p_s: f64,
    p_r: f64,
    t: f64,
    multipliers: &Multipliers,
    constraints: &ConstraintSet,
    params: &SystemParams,
) -> Result<[f64; 3]> {
    let _ = constraints;
    if !(p_s > 0.0 && p_r > 0.0 && t >= 0.0) {
        return Err(Error::domain(format!(
            "Lagrangian gradient needs p_s, p_r > 0 and T >= 0, got ({p_s}, {p_r}, {t})"
        )));
    }
    let h = hop_terms(p_s, p_r, t, params)?;
    #[cfg(debug_assertions)]
    cross_check_hop_derivatives(p_s, p_r, t, params, &h)?;
    let Multipliers { k1, k2, k3, k4 } = *multipliers;
    let gain = t + k2;
    let dl_dps = -gain * h.q2 * h.dq1_dp - k1 * h.d2 * h.dpe1_dp + k3;
    let dl_dpr = -gain * h.q1 * h.dq2_dp - k1 * h.d1 * h.dpe2_dp + k4;
    let dl_dt = -h.q1 * h.q2 - gain * (h.q2 * h.dq1_dt + h.q1 * h.dq2_dt);
    Ok([dl_dps, dl_dpr, dl_dt])
}

/// Largest equal power `p` with `ξ*(p, p) >= 1 - ε`, or `None` when every
/// power up to `limit` is covert.
pub fn symmetric_covert_power(constraints: &ConstraintSet, params: &SystemParams, limit: f64) -> Result<Option<f64>> {
    let target = constraints.min_dep();
    let xi = |p: f64| -> Result<f64> { min_dep_two_hop(&params.with_powers(p, p)?) };
    if xi(limit)? >= target {
        return Ok(None);
    }
    let mut lo = params.sigma_n2() * 1e-9;
    if xi(lo)? < target {
        return Err(Error::Infeasible(format!(
            "covertness constraint xi* >= {target} fails even at power {lo:e} W"
        )));
    }
    let mut hi = limit;
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if xi(mid)? >= target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-14 {
            break;
        }
    }
    Ok(Some(lo))
}

/// Upper end of the power scan: `min(P_max, 4 p_sym)`.
///
/// Beyond four times the symmetric covertness boundary the partner hop
/// must drop so far below the boundary that throughput collapses, so the
/// scan concentrates its resolution where feasible optima live.
pub fn power_scan_limit(constraints: &ConstraintSet, params: &SystemParams) -> Result<f64> {
    Ok(
        match symmetric_covert_power(constraints, params, constraints.p_max())? {
            Some(p) => (4.0 * p).min(constraints.p_max()),
            None => constraints.p_max(),
        },
    )
}

/// Rate at which the end-to-end outage at equal powers `p` reaches `δ`.
pub fn rate_at_outage(p: f64, delta: f64, scenario: Scenario, params: &SystemParams) -> Result<f64> {
    let sp = params.with_powers(p, p)?;
    let pout = |t: f64| -> Result<f64> { Ok(throughput(&sp, RateParams::new(t)?, scenario)?.p_out) };
    let mut hi = 1.0;
    while pout(hi)? < delta {
        hi *= 2.0;
        if hi > 1024.0 {
            return Ok(hi);
        }
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if pout(mid)? <= delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
