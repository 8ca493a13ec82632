//! Outage probability and covert throughput of the two-hop link.
//!
//! Each hop fails when `½ log₂(1 + p g / σ²) < T`, i.e. when
//! `g < κ σ² / p` with `κ = 2^{2T} - 1`. The noise power `σ²` at the relay
//! and destination is log-uniform on `[μ₁, μ₂]`, the same law as at the
//! warden. End-to-end success needs both hops, so
//! `p_out = 1 - (1 - p₁)(1 - p₂)` and `η = T (1 - p_out)`.

use crate::channel::{sample_exp1, sample_noise_power, sample_tas_mrc_gain, tas_mrc_gain_cdf, RngSpec};
use crate::detection::clamp_probability;
use crate::discrepancy::PaperValue;
use crate::error::{Error, Result};
use crate::model::{RateParams, SystemParams};
use crate::montecarlo::{estimate_mean, McEstimate};
use crate::quad::{gauss_legendre, integrate, QuadTol};
use crate::specfun::{binomial, ei_diff, factorial, upper_gamma, upper_gamma_entire};

/// Per-hop and end-to-end outage with the resulting throughput.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputOutcome {
    pub p_out_hop1: f64,
    pub p_out_hop2: f64,
    pub p_out: f64,
    pub eta: f64,
}

impl ThroughputOutcome {
    /// Assembles the outcome from per-hop outages and the target rate.
    pub fn new(p_out_hop1: f64, p_out_hop2: f64, t: f64) -> Result<Self> {
        for (name, v) in [("p_out_hop1", p_out_hop1), ("p_out_hop2", p_out_hop2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::domain(format!("{name} = {v} is not a probability")));
            }
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::domain(format!("target rate must be >= 0, got {t}")));
        }
        let p_out = 1.0 - (1.0 - p_out_hop1) * (1.0 - p_out_hop2);
        Ok(Self {
            p_out_hop1,
            p_out_hop2,
            p_out,
            eta: t * (1.0 - p_out),
        })
    }
}

/// Antenna scenario of a throughput evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Single,
    Multi,
}

/// `½ log₂(1 + p·gain/σ²)`.
pub fn capacity_hop(p: f64, gain: f64, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(Error::domain(format!("noise power must be positive, got {sigma2}")));
    }
    if !(p >= 0.0 && gain >= 0.0) {
        return Err(Error::domain(format!("power and gain must be >= 0, got ({p}, {gain})")));
    }
    Ok((p * gain / sigma2).ln_1p() / (2.0 * std::f64::consts::LN_2))
}

fn check_power(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("transmit power must be positive, got {p}")))
    }
}

/// Single-antenna hop outage,
/// `1 - [Ei(-κμ₂/p) - Ei(-κμ₁/p)] / (2 ln ρ)`.
pub fn outage_hop_single(p: f64, rate: RateParams, params: &SystemParams) -> Result<f64> {
    check_power(p)?;
    let kappa = rate.kappa();
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let (mu1, mu2) = params.noise_bounds();
    let two_ln_rho = 2.0 * params.rho().ln();
    let s = kappa / p;
    let value = if s * mu2 <= 4.0 {
        // (1/(2 ln ρ)) ∫ (1 - e^{-s x}) / x dx on the log scale
        let (lo, hi) = (mu1.ln(), mu2.ln());
        let panels = ((hi - lo) / 0.5).ceil().max(1.0) as usize;
        let width = (hi - lo) / panels as f64;
        (0..panels)
            .map(|k| {
                let u0 = lo + k as f64 * width;
                gauss_legendre(|u| -(-s * u.exp()).exp_m1(), u0, u0 + width)
            })
            .sum::<f64>()
            / two_ln_rho
    } else {
        1.0 - ei_diff(s * mu2, s * mu1)? / two_ln_rho
    };
    clamp_probability(value, "single-antenna outage")
}

/// Partial derivatives `(∂q/∂p, ∂q/∂T)` of the hop success probability
/// `q = 1 - outage_hop_single`.
pub fn success_hop_single_gradient(p: f64, t: f64, params: &SystemParams) -> Result<(f64, f64)> {
    check_power(p)?;
    let rate = RateParams::new(t)?;
    let kappa = rate.kappa();
    let (mu1, mu2) = params.noise_bounds();
    let two_ln_rho = 2.0 * params.rho().ln();
    let (a1, a2) = (kappa * mu1 / p, kappa * mu2 / p);
    let dq_dp = ((-a1).exp() - (-a2).exp()) / (p * two_ln_rho);
    // (e^{-a₂} - e^{-a₁}) / κ, finite as κ → 0
    let ratio = if kappa == 0.0 {
        -(mu2 - mu1) / p
    } else {
        (-a1).exp() * (-(kappa * (mu2 - mu1) / p)).exp_m1() / kappa
    };
    let dkappa_dt = 2.0 * std::f64::consts::LN_2 * (2.0 * t * std::f64::consts::LN_2).exp();
    Ok((dq_dp, dkappa_dt * ratio / two_ln_rho))
}

/// Single-antenna throughput.
pub fn throughput_single(params: &SystemParams, rate: RateParams) -> Result<ThroughputOutcome> {
    let p1 = outage_hop_single(params.p_s(), rate, params)?;
    let p2 = outage_hop_single(params.p_r(), rate, params)?;
    ThroughputOutcome::new(p1, p2, rate.t())
}

/// Single-antenna throughput as the product
/// `T · Ei(κμ₂/P_S, κμ₁/P_S) · Ei(κμ₂/P_R, κμ₁/P_R) / (4 ln²ρ)`.
pub fn eta_single_product_form(params: &SystemParams, rate: RateParams) -> Result<f64> {
    let kappa = rate.kappa();
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let (mu1, mu2) = params.noise_bounds();
    let ln_rho = params.rho().ln();
    let hop = |p: f64| ei_diff(kappa * mu2 / p, kappa * mu1 / p);
    Ok(rate.t() * hop(params.p_s())? * hop(params.p_r())? / (4.0 * ln_rho * ln_rho))
}

/// Multi-antenna hop outage: the gain CDF averaged over the noise law by
/// adaptive quadrature.
pub fn outage_hop_multi_reference(p: f64, rate: RateParams, params: &SystemParams, n_t: u32, n_r: u32) -> Result<f64> {
    check_power(p)?;
    tas_mrc_gain_cdf(n_t, n_r, 0.0)?;
    let kappa = rate.kappa();
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let (mu1, mu2) = params.noise_bounds();
    let two_ln_rho = 2.0 * params.rho().ln();
    let s = kappa / p;
    // density 1/(2x ln ρ) becomes uniform in u = ln x
    let r = integrate(
        |u| tas_mrc_gain_cdf(n_t, n_r, s * u.exp()).unwrap_or(f64::NAN),
        mu1.ln(),
        mu2.ln(),
        QuadTol::new(1e-13, 1e-12),
    )
    .map_err(|e| Error::numeric(format!("multi-antenna outage at p = {p}, T = {}: {e}", rate.t())))?;
    clamp_probability(r.value / two_ln_rho, "multi-antenna outage")
}

/// Multi-antenna throughput with hop 1 using `(n_s, n_rr)` and hop 2
/// using `(n_rt, n_d)`.
pub fn throughput_multi(params: &SystemParams, rate: RateParams) -> Result<ThroughputOutcome> {
    let ant = params.antennas();
    let (t1, r1) = ant.hop1();
    let (t2, r2) = ant.hop2();
    let p1 = outage_hop_multi_reference(params.p_s(), rate, params, t1, r1)?;
    let p2 = outage_hop_multi_reference(params.p_r(), rate, params, t2, r2)?;
    ThroughputOutcome::new(p1, p2, rate.t())
}

/// Throughput for the given scenario.
pub fn throughput(params: &SystemParams, rate: RateParams, scenario: Scenario) -> Result<ThroughputOutcome> {
    match scenario {
        Scenario::Single => throughput_single(params, rate),
        Scenario::Multi => throughput_multi(params, rate),
    }
}

/// Reading of the ambiguous `ln ρ²` term in the printed multi-antenna
/// outage expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LnRhoSquared {
    /// `ln(ρ²)`
    LogOfSquare,
    /// `(ln ρ)²`
    SquareOfLog,
}

impl LnRhoSquared {
    pub fn eval(self, rho: f64) -> f64 {
        match self {
            LnRhoSquared::LogOfSquare => (rho * rho).ln(),
            LnRhoSquared::SquareOfLog => rho.ln().powi(2),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LnRhoSquared::LogOfSquare => "ln(rho^2)",
            LnRhoSquared::SquareOfLog => "(ln rho)^2",
        }
    }
}

/// How the printed expression's incomplete-gamma terms are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaDomain {
    /// Negative arguments are a domain violation.
    Strict,
    /// Negative arguments use the analytic continuation of the finite sum.
    Continuation,
}

impl GammaDomain {
    pub fn label(self) -> &'static str {
        match self {
            GammaDomain::Strict => "strict",
            GammaDomain::Continuation => "continuation",
        }
    }
}

/// The printed combinatorial multi-antenna hop outage, evaluated term by
/// term as written. Returns a violation where a sub-expression is
/// undefined; never panics.
pub fn outage_hop_multi_paper(
    p: f64,
    rate: RateParams,
    params: &SystemParams,
    n_t: u32,
    n_r: u32,
    ln_rho_sq: LnRhoSquared,
    domain: GammaDomain,
) -> Result<PaperValue> {
    check_power(p)?;
    tas_mrc_gain_cdf(n_t, n_r, 0.0)?;
    if n_r < 2 {
        return Ok(PaperValue::Violation(format!(
            "incomplete gamma of order {} is outside the integer-order domain",
            i64::from(n_r) - 1
        )));
    }
    let (mu1, mu2) = params.noise_bounds();
    let rho = params.rho();
    let kappa = rate.kappa();
    let s = kappa / p;
    let order = n_r - 1;
    let log_term = ln_rho_sq.eval(rho);
    let gamma = |x: f64| -> std::result::Result<f64, String> {
        match domain {
            GammaDomain::Strict => {
                upper_gamma(order, x).map_err(|_| format!("incomplete gamma at negative argument {x:e}"))
            }
            GammaDomain::Continuation => upper_gamma_entire(order, x).map_err(|e| e.to_string()),
        }
    };

    let mut total = 0.0;
    for si in 0..n_t {
        let sign = if si % 2 == 0 { 1.0 } else { -1.0 };
        let outer = sign * binomial(n_t - 1, si);
        let base = f64::from(si + 1);
        for k in 0..=si * (n_t - 1) {
            let omega = k + n_r - 1;
            let mut inner = 0.0;
            for j in 0..=omega {
                let jm1 = f64::from(j) - 1.0;
                let coef = factorial(j) * binomial(omega, j) / base.powi(j as i32 + 1)
                    * s.powi((omega - j) as i32)
                    * s.powi(-(order as i32));
                let g2 = match gamma(jm1 * s * mu2) {
                    Ok(v) => v,
                    Err(msg) => return Ok(PaperValue::Violation(format!("j = {j}: {msg}"))),
                };
                let g1 = match gamma(jm1 * s * mu1) {
                    Ok(v) => v,
                    Err(msg) => return Ok(PaperValue::Violation(format!("j = {j}: {msg}"))),
                };
                inner += coef * jm1 * (g2 - g1);
            }
            inner += f64::from(omega) * log_term / base.powi((n_r + k) as i32);
            total += outer * inner;
        }
    }
    let value = f64::from(n_t) / factorial(n_r - 1) * total / (2.0 * rho.ln());
    if value.is_finite() {
        Ok(PaperValue::Value(value))
    } else {
        Ok(PaperValue::Violation(format!("non-finite value {value}")))
    }
}

/// Monte-Carlo hop outage: fraction of trials with capacity below `T`.
/// Uses the Rayleigh sampler for `(1, 1)` and the selection/combining
/// sampler otherwise.
#[allow(clippy::too_many_arguments)]
pub fn mc_outage_hop(
    p: f64,
    rate: RateParams,
    params: &SystemParams,
    n_t: u32,
    n_r: u32,
    n: u64,
    rng: RngSpec,
    workers: u32,
) -> Result<McEstimate> {
    check_power(p)?;
    tas_mrc_gain_cdf(n_t, n_r, 0.0)?;
    let t = rate.t();
    let sigma_floor = params.noise_bounds().0;
    capacity_hop(p, 0.0, sigma_floor)?;
    estimate_mean(n, rng, workers, |r| {
        let gain = if n_t == 1 && n_r == 1 {
            sample_exp1(r)
        } else {
            sample_tas_mrc_gain(n_t, n_r, r)
        };
        let sigma2 = sample_noise_power(params, r);
        let c = (p * gain / sigma2).ln_1p() / (2.0 * std::f64::consts::LN_2);
        f64::from(u8::from(c < t))
    })
}

/// Monte-Carlo throughput: `T` times the fraction of trials in which both
/// hops reach the target rate.
pub fn mc_throughput(
    params: &SystemParams,
    rate: RateParams,
    scenario: Scenario,
    n: u64,
    rng: RngSpec,
    workers: u32,
) -> Result<McEstimate> {
    let t = rate.t();
    let ant = params.antennas();
    let ((t1, r1), (t2, r2)) = match scenario {
        Scenario::Single => ((1, 1), (1, 1)),
        Scenario::Multi => (ant.hop1(), ant.hop2()),
    };
    let (ps, pr) = (params.p_s(), params.p_r());
    let draw = move |nt: u32, nr: u32, r: &mut rand_chacha::ChaCha8Rng| {
        if nt == 1 && nr == 1 {
            sample_exp1(r)
        } else {
            sample_tas_mrc_gain(nt, nr, r)
        }
    };
    let inv = 1.0 / (2.0 * std::f64::consts::LN_2);
    let est = estimate_mean(n, rng, workers, |r| {
        let c1 = (ps * draw(t1, r1, r) / sample_noise_power(params, r)).ln_1p() * inv;
        let c2 = (pr * draw(t2, r2, r) / sample_noise_power(params, r)).ln_1p() * inv;
        f64::from(u8::from(c1 >= t && c2 >= t))
    })?;
    Ok(McEstimate {
        mean: t * est.mean,
        stderr: t * est.stderr,
        ..est
    })
}
