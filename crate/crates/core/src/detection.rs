//! Warden-side detection error probability (DEP).
//!
//! The warden runs a radiometer with threshold `τ` in each slot. Its noise
//! power is log-uniform on `[μ₁, μ₂]` and the received signal power is
//! `p |h|²` with `|h|² ~ Exp(1)`. For one slot
//!
//! ```text
//! P_e(τ) = P_FA + P_MD = 1 - F_σ(τ) + E[F_σ(τ - p|h|²)]
//! ```
//!
//! Three evaluators are provided: an adaptive-quadrature reference
//! ([`dep_slot_reference`]), a closed form in exponential integrals
//! ([`dep_slot`]), and the printed closed form
//! ([`dep_slot_paper`]), kept only for the discrepancy report.

use rand::Rng;

use crate::channel::{sample_exp1, sample_noise_power, RngSpec};
use crate::discrepancy::PaperValue;
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::montecarlo::{estimate_sum_of_means, McEstimate};
use crate::quad::{gauss_legendre, integrate_with_breaks, QuadTol};
use crate::specfun::{ei_window_scaled, expint_ei};

/// Slack allowed before an out-of-range probability is treated as a bug.
pub const CLAMP_SLACK: f64 = 1e-9;

/// Threshold, per-slot DEPs and two-hop DEP of one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionOutcome {
    pub tau: f64,
    pub pe1: f64,
    pub pe2: f64,
    pub xi: f64,
}

impl DetectionOutcome {
    pub fn new(tau: f64, pe1: f64, pe2: f64) -> Result<Self> {
        for (name, v) in [("pe1", pe1), ("pe2", pe2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::domain(format!("{name} = {v} is not a probability")));
            }
        }
        Ok(Self {
            tau,
            pe1,
            pe2,
            xi: combine_slots(pe1, pe2),
        })
    }
}

/// `1 - (1 - a)(1 - b)`, symmetric bit-for-bit in its arguments.
pub fn combine_slots(a: f64, b: f64) -> f64 {
    1.0 - (1.0 - a) * (1.0 - b)
}

/// Clamps `v` into `[0, 1]`, failing if it lies outside by more than
/// [`CLAMP_SLACK`].
pub fn clamp_probability(v: f64, what: &str) -> Result<f64> {
    if !v.is_finite() || !(-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&v) {
        return Err(Error::numeric(format!("{what} evaluated to {v}, outside [0, 1]")));
    }
    Ok(v.clamp(0.0, 1.0))
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

/// CDF of the log-uniform noise power.
pub fn noise_cdf(x: f64, params: &SystemParams) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let rho_ln = params.rho().ln();
    ((x * params.rho() / params.sigma_n2()).ln() / (2.0 * rho_ln)).clamp(0.0, 1.0)
}

/// `τ* = ρ σ_n²`, the upper edge of the noise support.
pub fn optimal_threshold(params: &SystemParams) -> f64 {
    params.rho() * params.sigma_n2()
}

/// Semi-analytic per-slot DEP by adaptive quadrature over the signal power.
pub fn dep_slot_reference(p: f64, tau: f64, params: &SystemParams) -> Result<f64> {
    check_positive("p", p)?;
    check_positive("tau", tau)?;
    let (mu1, _) = params.noise_bounds();
    if tau <= mu1 {
        return Ok(1.0);
    }
    let pfa = 1.0 - noise_cdf(tau, params);
    // F_σ(τ - y) vanishes for y >= τ - μ₁ and has a kink at y = τ - μ₂.
    let upper = tau - mu1;
    let kink = tau - optimal_threshold(params);
    let tol = QuadTol::new(1e-13, 1e-12);
    let pmd = integrate_with_breaks(
        |y| noise_cdf(tau - y, params) * (-y / p).exp() / p,
        0.0,
        upper,
        &[kink],
        tol,
    )
    .map_err(|e| Error::numeric(format!("DEP reference at p = {p}, tau = {tau}: {e}")))?;
    clamp_probability(pfa + pmd.value, "reference DEP")
}

/// `∫_a^b (1 - e^{(x-c)/p}) / x dx` for `0 < a < b <= c`.
fn damped_log_integral(a: f64, b: f64, c: f64, p: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    if p >= 0.25 * c {
        // integrand is smooth on the log scale; composite Gauss–Legendre
        let (lo, hi) = (a.ln(), b.ln());
        let panels = ((hi - lo) / 0.5).ceil().max(1.0) as usize;
        let width = (hi - lo) / panels as f64;
        Ok((0..panels)
            .map(|k| {
                let u0 = lo + k as f64 * width;
                gauss_legendre(|u| -((u.exp() - c) / p).exp_m1(), u0, u0 + width)
            })
            .sum())
    } else {
        let window = ei_window_scaled(a / p, b / p)?;
        Ok((b / a).ln() - ((b - c) / p).exp() * window)
    }
}

/// Closed-form per-slot DEP.
///
/// - `τ <= μ₁`: 1
/// - `μ₁ < τ <= μ₂`: `1 - e^{-τ/p}[Ei(τ/p) - Ei(μ₁/p)] / (2 ln ρ)`
/// - `τ > μ₂`: `1 - e^{-τ/p}[Ei(μ₂/p) - Ei(μ₁/p)] / (2 ln ρ)`
///
/// evaluated in a cancellation-free arrangement.
pub fn dep_slot(p: f64, tau: f64, params: &SystemParams) -> Result<f64> {
    check_positive("p", p)?;
    check_positive("tau", tau)?;
    let (mu1, mu2) = params.noise_bounds();
    let two_ln_rho = 2.0 * params.rho().ln();
    let value = if tau <= mu1 {
        1.0
    } else if tau <= mu2 {
        ((mu2 / tau).ln() + damped_log_integral(mu1, tau, tau, p)?) / two_ln_rho
    } else {
        damped_log_integral(mu1, mu2, tau, p)? / two_ln_rho
    };
    clamp_probability(value, "closed-form DEP")
}

/// Minimum per-slot DEP, attained at `τ*`.
pub fn min_dep_slot(p: f64, params: &SystemParams) -> Result<f64> {
    dep_slot(p, optimal_threshold(params), params)
}

/// `∂P_e*/∂p` of [`min_dep_slot`].
pub fn min_dep_slot_derivative(p: f64, params: &SystemParams) -> Result<f64> {
    let (mu1, mu2) = params.noise_bounds();
    let two_ln_rho = 2.0 * params.rho().ln();
    let d = 1.0 - min_dep_slot(p, params)?;
    let spread = -(-(mu2 - mu1) / p).exp_m1();
    Ok(-(mu2 * d / (p * p) - spread / (p * two_ln_rho)))
}

/// Minimum two-hop DEP `ξ* = 1 - (1 - P_e1*)(1 - P_e2*)`.
pub fn min_dep_two_hop(params: &SystemParams) -> Result<f64> {
    Ok(min_detection(params)?.xi)
}

/// Full detection outcome at the optimal threshold.
pub fn min_detection(params: &SystemParams) -> Result<DetectionOutcome> {
    let pe1 = min_dep_slot(params.p_s(), params)?;
    let pe2 = min_dep_slot(params.p_r(), params)?;
    DetectionOutcome::new(optimal_threshold(params), pe1, pe2)
}

/// Detection outcome at an arbitrary threshold.
pub fn detection_at(tau: f64, params: &SystemParams) -> Result<DetectionOutcome> {
    let pe1 = dep_slot(params.p_s(), tau, params)?;
    let pe2 = dep_slot(params.p_r(), tau, params)?;
    DetectionOutcome::new(tau, pe1, pe2)
}

fn finite_or_violation(v: f64, what: &str) -> PaperValue {
    if v.is_finite() {
        PaperValue::Value(v)
    } else {
        PaperValue::Violation(format!("{what} is not finite"))
    }
}

fn ei_or_violation(x: f64) -> std::result::Result<f64, PaperValue> {
    expint_ei(x).map_err(|e| PaperValue::Violation(format!("Ei({x:e}): {e}")))
}

/// Per-slot DEP evaluated from the printed closed form as written, including
/// its `ln(μ₂ - τ)` term in the middle case and its bracketing in the
/// upper case. Not a correct DEP; used only for discrepancy reporting.
pub fn dep_slot_paper(p: f64, tau: f64, params: &SystemParams) -> Result<PaperValue> {
    check_positive("p", p)?;
    check_positive("tau", tau)?;
    let (mu1, mu2) = params.noise_bounds();
    let two_ln_rho = 2.0 * params.rho().ln();
    if tau <= mu1 {
        return Ok(PaperValue::Value(1.0));
    }
    let eval = || -> std::result::Result<PaperValue, PaperValue> {
        if tau <= mu2 {
            let gap = mu2 - tau;
            if gap <= 0.0 {
                return Err(PaperValue::Violation("ln(mu2 - tau) at tau = mu2".into()));
            }
            let bracket = gap.ln()
                + (-tau / p).exp() * (ei_or_violation(mu1 / p)? - ei_or_violation(tau / p)?) * (tau / mu1).ln();
            Ok(finite_or_violation(1.0 - bracket / two_ln_rho, "case II"))
        } else {
            let inner = ei_or_violation(mu1 / p)? + ei_or_violation(mu2 / p)? - (mu1 / p).exp() * mu1.ln()
                + (mu2 / p).exp() * mu2.ln();
            let bracket = (-tau / p).exp() * inner + 1.0;
            Ok(finite_or_violation(1.0 - bracket / two_ln_rho, "case III"))
        }
    };
    Ok(eval().unwrap_or_else(|v| v))
}

/// Minimum per-slot DEP exactly as printed (note the extra `ln(μ₂/μ₁)`
/// factor and reversed Ei difference). Used only for discrepancy reporting.
pub fn min_dep_slot_paper(p: f64, params: &SystemParams) -> Result<PaperValue> {
    check_positive("p", p)?;
    let (mu1, mu2) = params.noise_bounds();
    let two_ln_rho = 2.0 * params.rho().ln();
    let eval = || -> std::result::Result<PaperValue, PaperValue> {
        let diff = ei_or_violation(mu1 / p)? - ei_or_violation(mu2 / p)?;
        let v = 1.0 - (-mu2 / p).exp() * diff * (mu2 / mu1).ln() / two_ln_rho;
        Ok(finite_or_violation(v, "minimum DEP"))
    };
    Ok(eval().unwrap_or_else(|v| v))
}

/// Monte-Carlo per-slot DEP: `mean(FA) + mean(MD)` from independent draws.
pub fn mc_dep_slot(p: f64, tau: f64, params: &SystemParams, n: u64, rng: RngSpec, workers: u32) -> Result<McEstimate> {
    check_positive("p", p)?;
    check_positive("tau", tau)?;
    estimate_sum_of_means(n, rng, workers, |r| {
        let fa = sample_noise_power(params, r) > tau;
        let md = p * sample_exp1(r) + sample_noise_power(params, r) <= tau;
        [f64::from(u8::from(fa)), f64::from(u8::from(md))]
    })
}

/// Monte-Carlo two-hop DEP at threshold `τ`.
///
/// Each slot is tested with fresh noise and fading. The warden declares a
/// transmission only when both slot tests exceed `τ`; a false alarm thus
/// needs both slots to fire under silence, and a miss occurs when either
/// slot stays below `τ` during transmission.
pub fn mc_dep_two_hop(tau: f64, params: &SystemParams, n: u64, rng: RngSpec, workers: u32) -> Result<McEstimate> {
    check_positive("tau", tau)?;
    let (ps, pr) = (params.p_s(), params.p_r());
    estimate_sum_of_means(n, rng, workers, |r| {
        let fa = sample_noise_power(params, r) > tau && sample_noise_power(params, r) > tau;
        let d1 = ps * sample_exp1(r) + sample_noise_power(params, r) > tau;
        let d2 = pr * sample_exp1(r) + sample_noise_power(params, r) > tau;
        [f64::from(u8::from(fa)), f64::from(u8::from(!(d1 && d2)))]
    })
}

/// Draws one slot's received power under transmission.
pub fn sample_received_power<R: Rng + ?Sized>(p: f64, params: &SystemParams, rng: &mut R) -> f64 {
    p * sample_exp1(rng) + sample_noise_power(params, rng)
}
