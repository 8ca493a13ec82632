//! Independent oracles for the integration tests.
//!
//! Double-exponential quadrature written from scratch here so that no
//! check depends on the crate's own integrator.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Tanh-sinh quadrature of `f` on `[a, b]`, refined until two levels agree
/// to `rel` (relative to the running estimate).
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel: f64) -> f64 {
    let d = 0.5 * (b - a);
    let node = |t: f64| -> f64 {
        let s = FRAC_PI_2 * t.sinh();
        let ch = s.cosh();
        let x = s.tanh();
        let w = FRAC_PI_2 * t.cosh() / (ch * ch);
        // distance to the nearest endpoint, computed without cancellation
        let gap = d / (s.abs().exp() * ch);
        let xv = if x >= 0.0 { b - gap } else { a + gap };
        if xv <= a || xv >= b {
            0.0
        } else {
            d * w * f(xv)
        }
    };
    let t_max = 3.5;
    let mut h = 0.5;
    let mut sum = node(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += node(t) + node(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            sum += node(t) + node(-t);
            k += 2;
        }
        let next = sum * h;
        if (next - estimate).abs() <= rel * next.abs() {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Exp-sinh quadrature of `f` on `[a, ∞)` for integrands decaying at
/// least exponentially.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, rel: f64) -> f64 {
    let node = |t: f64| -> f64 {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        let x = a + e;
        let w = FRAC_PI_2 * t.cosh() * e;
        let v = f(x) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let (t_lo, t_hi) = (-4.5, 4.0);
    let mut h = 0.5;
    let mut sum = 0.0;
    let mut t = t_lo;
    while t <= t_hi {
        sum += node(t);
        t += h;
    }
    let mut estimate = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let mut t = t_lo + h;
        while t <= t_hi {
            sum += node(t);
            t += 2.0 * h;
        }
        let next = sum * h;
        if (next - estimate).abs() <= rel * next.abs() {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// `Ei(x)` by quadrature: `γ + ln x + ∫₀ˣ (eᵗ - 1)/t dt` for `x > 0` and
/// `-E₁(-x)` with `E₁(y) = e^{-y} ∫₀^∞ e^{-s}/(y + s) ds` for `x < 0`.
pub fn ei_oracle(x: f64) -> f64 {
    if x > 0.0 {
        let integral = tanh_sinh(|t| if t == 0.0 { 1.0 } else { t.exp_m1() / t }, 0.0, x, 1e-15);
        EULER_GAMMA + x.ln() + integral
    } else {
        let y = -x;
        -(-y).exp() * exp_sinh(|s| (-s).exp() / (y + s), 0.0, 1e-15)
    }
}

/// `Γ(s, x) = e^{-x} ∫₀^∞ (x + u)^{s-1} e^{-u} du` by quadrature.
pub fn upper_gamma_oracle(s: u32, x: f64) -> f64 {
    let m = f64::from(s) - 1.0;
    (-x).exp() * exp_sinh(|u| (x + u).powf(m) * (-u).exp(), 0.0, 1e-15)
}

/// Per-slot DEP by direct two-dimensional reasoning: the false-alarm term
/// plus the miss term `E_g[F(τ - p g)]`, integrated over the fading gain.
pub fn dep_slot_oracle(p: f64, tau: f64, sigma2: f64, rho: f64) -> f64 {
    let (mu1, mu2) = (sigma2 / rho, sigma2 * rho);
    let two_ln = 2.0 * rho.ln();
    let cdf = |x: f64| ((x * rho / sigma2).ln() / two_ln).clamp(0.0, 1.0);
    let fa = if tau <= mu1 { 1.0 } else { 1.0 - cdf(tau) };
    if tau <= mu1 {
        return fa;
    }
    // miss: noise + p g <= tau, g ~ Exp(1); integrate over g in [0, (τ-μ₁)/p]
    let g_hi = (tau - mu1) / p;
    let g_mid = ((tau - mu2) / p).max(0.0);
    let f = |g: f64| (-g).exp() * cdf(tau - p * g);
    let md = if g_mid > 0.0 {
        tanh_sinh(f, 0.0, g_mid, 1e-14) + tanh_sinh(f, g_mid, g_hi, 1e-14)
    } else {
        tanh_sinh(f, 0.0, g_hi, 1e-14)
    };
    fa + md
}

/// Single-antenna hop outage `P(g < κσ²/p)` averaged over the log-uniform
/// noise in `u = ln σ²`.
pub fn outage_single_oracle(p: f64, t: f64, sigma2: f64, rho: f64) -> f64 {
    let kappa = (2.0 * t * std::f64::consts::LN_2).exp_m1();
    let (lo, hi) = ((sigma2 / rho).ln(), (sigma2 * rho).ln());
    tanh_sinh(|u| -(-kappa * u.exp() / p).exp_m1(), lo, hi, 1e-14) / (hi - lo)
}

/// Composite-gain CDF `[1 - e^{-x} Σ_{j<n_r} x^j/j!]^{n_t}` summed directly.
pub fn tas_mrc_cdf_oracle(n_t: u32, n_r: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..n_r {
        term *= x / f64::from(j);
        sum += term;
    }
    (1.0 - (-x).exp() * sum).max(0.0).powi(n_t as i32)
}

/// Relative difference with an absolute floor.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
