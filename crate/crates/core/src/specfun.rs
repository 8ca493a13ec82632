//! Exponential integrals and the integer-order upper incomplete gamma
//! function.
//!
//! `Ei(x)` is the Cauchy principal value of `-∫_{-x}^∞ e^{-t}/t dt`.
//! For negative arguments it equals `-E1(-x)`.
//!
//! Algorithms:
//! - `E1(x)`, `x <= 1`: power series; `x > 1`: modified-Lentz continued fraction.
//! - `Ei(x)`, `0 < x <= 40`: power series (all terms positive, no cancellation);
//!   `x > 40`: asymptotic expansion truncated at its smallest term.

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_LIMIT: f64 = 40.0;

/// Convergence controls for the series and continued-fraction evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(rel_tol: f64, abs_tol: f64, max_iter: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::domain(format!("rel_tol must be positive, got {rel_tol}")));
        }
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::domain(format!("abs_tol must be positive, got {abs_tol}")));
        }
        if max_iter == 0 {
            return Err(Error::domain("max_iter must be at least 1"));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_iter,
        })
    }

    // Iterations stop well below the advertised accuracy so that the
    // result carries rel_tol after rounding.
    fn stop(&self) -> f64 {
        (self.rel_tol * 1e-4).max(0.5 * f64::EPSILON)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_iter: 1000,
        }
    }
}

fn check_finite(x: f64, name: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name}: non-finite argument {x}")))
    }
}

/// `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn expint_e1(x: f64) -> Result<f64> {
    expint_e1_with(x, &Tolerance::default())
}

pub fn expint_e1_with(x: f64, tol: &Tolerance) -> Result<f64> {
    check_finite(x, "E1")?;
    if x <= 0.0 {
        return Err(Error::domain(format!("E1 requires x > 0, got {x}")));
    }
    if x <= 1.0 {
        e1_series(x, tol)
    } else {
        Ok(e1_scaled_cf(x, tol)? * (-x).exp())
    }
}

fn e1_series(x: f64, tol: &Tolerance) -> Result<f64> {
    // E1(x) = -γ - ln x - Σ_{k>=1} (-x)^k / (k k!)
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..=tol.max_iter {
        let kf = k as f64;
        term *= -x / kf;
        let contrib = term / kf;
        sum += contrib;
        if contrib.abs() <= tol.stop() * sum.abs().max(tol.abs_tol) {
            return Ok(-EULER_GAMMA - x.ln() - sum);
        }
    }
    Err(Error::numeric(format!("E1 series did not converge at x = {x}")))
}

// e^x E1(x) by the continued fraction 1/(x+1- 1/(x+3- 4/(x+5- ...))).
fn e1_scaled_cf(x: f64, tol: &Tolerance) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=tol.max_iter {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= tol.stop() {
            return Ok(h);
        }
    }
    Err(Error::numeric(format!(
        "E1 continued fraction did not converge at x = {x}"
    )))
}

// Σ_{k>=1} x^k / (k k!) for x > 0.
fn ei_positive_series(x: f64, tol: &Tolerance) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..=tol.max_iter {
        let kf = k as f64;
        term *= x / kf;
        let contrib = term / kf;
        sum += contrib;
        if contrib <= tol.stop() * sum {
            return Ok(sum);
        }
    }
    Err(Error::numeric(format!("Ei series did not converge at x = {x}")))
}

// x e^{-x} Ei(x) ~ Σ k!/x^k, truncated at the smallest term.
fn ei_asymptotic_scaled(x: f64, tol: &Tolerance) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=tol.max_iter {
        let next = term * k as f64 / x;
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term <= tol.stop() * sum {
            return Ok(sum);
        }
    }
    if term <= tol.rel_tol * sum {
        Ok(sum)
    } else {
        Err(Error::numeric(format!(
            "Ei asymptotic expansion not accurate enough at x = {x}"
        )))
    }
}

/// Exponential integral `Ei(x)` for real `x != 0`.
pub fn expint_ei(x: f64) -> Result<f64> {
    expint_ei_with(x, &Tolerance::default())
}

pub fn expint_ei_with(x: f64, tol: &Tolerance) -> Result<f64> {
    check_finite(x, "Ei")?;
    if x == 0.0 {
        return Err(Error::domain("Ei has a logarithmic singularity at x = 0"));
    }
    if x < 0.0 {
        return Ok(-expint_e1_with(-x, tol)?);
    }
    let value = if x <= SERIES_LIMIT {
        EULER_GAMMA + x.ln() + ei_positive_series(x, tol)?
    } else {
        x.exp() / x * ei_asymptotic_scaled(x, tol)?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::domain(format!("Ei({x}) overflows f64")))
    }
}

/// `e^{-x} Ei(x)` for `x > 0`; finite for arbitrarily large `x`.
pub fn expint_ei_scaled(x: f64) -> Result<f64> {
    let tol = Tolerance::default();
    check_finite(x, "scaled Ei")?;
    if x <= 0.0 {
        return Err(Error::domain(format!("scaled Ei requires x > 0, got {x}")));
    }
    if x <= SERIES_LIMIT {
        Ok((-x).exp() * (EULER_GAMMA + x.ln() + ei_positive_series(x, &tol)?))
    } else {
        Ok(ei_asymptotic_scaled(x, &tol)? / x)
    }
}

// Arguments closer than this (relative and absolute) take the direct
// quadrature path; the 24-point rule is then exact to rounding.
fn is_close_pair(lo: f64, hi: f64) -> bool {
    let gap = hi - lo;
    gap <= 0.5 * lo && gap <= 4.0
}

/// Two-argument difference `Ei(-x) - Ei(-y) = E1(y) - E1(x)` for `x, y > 0`.
///
/// Positive whenever `x > y`. Exactly antisymmetric in its arguments.
pub fn ei_diff(x: f64, y: f64) -> Result<f64> {
    check_finite(x, "ei_diff")?;
    check_finite(y, "ei_diff")?;
    if x <= 0.0 || y <= 0.0 {
        return Err(Error::domain(format!(
            "ei_diff requires positive arguments, got ({x}, {y})"
        )));
    }
    if x == y {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if x < y { (x, y, -1.0) } else { (y, x, 1.0) };
    // Ei(-hi) - Ei(-lo) = ∫_lo^hi e^{-t}/t dt > 0
    let magnitude = if is_close_pair(lo, hi) {
        gauss_legendre(|t| (-t).exp() / t, lo, hi)
    } else {
        expint_e1(lo)? - expint_e1(hi)?
    };
    Ok(sign * magnitude)
}

/// `e^{-b} [Ei(b) - Ei(a)] = ∫_a^b e^{t-b}/t dt` for `0 < a <= b`.
///
/// Stays finite where `Ei(b)` alone would overflow.
pub fn ei_window_scaled(a: f64, b: f64) -> Result<f64> {
    check_finite(a, "ei_window_scaled")?;
    check_finite(b, "ei_window_scaled")?;
    if !(a > 0.0 && b >= a) {
        return Err(Error::domain(format!(
            "ei_window_scaled requires 0 < a <= b, got ({a}, {b})"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    if is_close_pair(a, b) {
        Ok(gauss_legendre(|t| (t - b).exp() / t, a, b))
    } else {
        Ok(expint_ei_scaled(b)? - (a - b).exp() * expint_ei_scaled(a)?)
    }
}

/// Upper incomplete gamma `Γ(s, x)` for integer `s >= 1` and `x >= 0`,
/// via `Γ(s, x) = (s-1)! e^{-x} Σ_{k<s} x^k/k!`.
pub fn upper_gamma(s: u32, x: f64) -> Result<f64> {
    check_finite(x, "upper_gamma")?;
    if s == 0 {
        return Err(Error::domain("upper_gamma requires integer order s >= 1"));
    }
    if x < 0.0 {
        return Err(Error::domain(format!("upper_gamma requires x >= 0, got {x}")));
    }
    Ok(upper_gamma_finite_sum(s, x))
}

/// The same finite sum evaluated for any real `x`. For integer `s >= 1`
/// this is the analytic continuation of `Γ(s, x)` to negative `x`.
pub fn upper_gamma_entire(s: u32, x: f64) -> Result<f64> {
    check_finite(x, "upper_gamma_entire")?;
    if s == 0 {
        return Err(Error::domain("upper_gamma_entire requires integer order s >= 1"));
    }
    Ok(upper_gamma_finite_sum(s, x))
}

fn upper_gamma_finite_sum(s: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut factorial = 1.0;
    for k in 1..s {
        let kf = k as f64;
        term *= x / kf;
        sum += term;
        factorial *= kf;
    }
    factorial * (-x).exp() * sum
}

/// `n!` as a float.
pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Binomial coefficient `C(n, k)` as a float.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ei_reference_values() {
        assert_relative_eq!(expint_ei(1.0).unwrap(), 1.895_117_816_355_936_8, max_relative = 1e-14);
        assert_relative_eq!(
            expint_ei(-1.0).unwrap(),
            -0.219_383_934_395_520_27,
            max_relative = 1e-14
        );
    }

    #[test]
    fn ei_small_negative_argument() {
        let x = 1e-12;
        let v = expint_ei(-x).unwrap();
        assert!((v - (EULER_GAMMA + x.ln())).abs() < 1e-9);
    }

    #[test]
    fn ei_rejects_zero_and_non_finite() {
        assert!(matches!(expint_ei(0.0), Err(Error::Domain(_))));
        assert!(matches!(expint_ei(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(expint_ei(f64::INFINITY), Err(Error::Domain(_))));
        assert!(matches!(expint_ei(800.0), Err(Error::Domain(_))));
    }

    #[test]
    fn ei_branches_join_smoothly() {
        let below = expint_ei(SERIES_LIMIT).unwrap();
        let above = expint_ei(SERIES_LIMIT * (1.0 + 1e-12)).unwrap();
        assert_relative_eq!(below, above, max_relative = 1e-10);
        assert_relative_eq!(
            expint_e1(1.0).unwrap(),
            expint_e1(1.0 + 1e-13).unwrap(),
            max_relative = 1e-11
        );
    }

    #[test]
    fn scaled_ei_matches_unscaled() {
        for &x in &[0.01f64, 0.5, 3.0, 20.0, 39.9, 45.0, 120.0] {
            let direct = (-x).exp() * expint_ei(x).unwrap();
            assert_relative_eq!(expint_ei_scaled(x).unwrap(), direct, max_relative = 1e-13);
        }
        assert!(expint_ei_scaled(5000.0).unwrap().is_finite());
    }

    #[test]
    fn ei_diff_values() {
        assert_eq!(ei_diff(2.0, 2.0).unwrap(), 0.0);
        assert_relative_eq!(
            ei_diff(1.0, 3.0).unwrap(),
            -0.206_335_553_301_323_24,
            max_relative = 1e-13
        );
        let a = 1e-8;
        let rho: f64 = 1.5;
        assert!((ei_diff(a * rho * rho, a).unwrap() - 2.0 * rho.ln()).abs() < 1e-7);
    }

    #[test]
    fn ei_diff_close_path_agrees_with_e1_difference() {
        for &(x, y) in &[(1.0, 1.1), (10.0, 12.0), (0.3, 0.4)] {
            let fast = ei_diff(y, x).unwrap();
            let slow = expint_e1(x).unwrap() - expint_e1(y).unwrap();
            assert_relative_eq!(fast, slow, max_relative = 1e-11);
        }
    }

    #[test]
    fn ei_diff_rejects_non_positive() {
        assert!(ei_diff(0.0, 1.0).is_err());
        assert!(ei_diff(1.0, -2.0).is_err());
    }

    #[test]
    fn ei_window_matches_definition() {
        for &(a, b) in &[(0.1f64, 0.3f64), (1.0, 1.2), (2.0, 30.0), (0.5, 0.5)] {
            let direct = (-b).exp() * (expint_ei(b).unwrap() - expint_ei(a).unwrap());
            assert!((ei_window_scaled(a, b).unwrap() - direct).abs() <= 1e-13 * direct.abs().max(1e-3));
        }
    }

    #[test]
    fn upper_gamma_values() {
        for &x in &[0.0, 1.0, 5.0] {
            assert_relative_eq!(upper_gamma(1, x).unwrap(), (-x).exp(), max_relative = 1e-15);
        }
        assert_eq!(upper_gamma(3, 0.0).unwrap(), 2.0);
        assert_relative_eq!(
            upper_gamma(3, 1.0).unwrap(),
            5.0 / std::f64::consts::E,
            max_relative = 1e-15
        );
    }

    #[test]
    fn upper_gamma_domain() {
        assert!(upper_gamma(0, 1.0).is_err());
        assert!(upper_gamma(2, -1.0).is_err());
        // continuation: Γ(2, -1) = e (1 - 1) = 0
        assert!(upper_gamma_entire(2, -1.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 1e-10, 10).is_err());
        assert!(Tolerance::new(1e-10, -1.0, 10).is_err());
        assert!(Tolerance::new(1e-10, 1e-10, 0).is_err());
        let loose = Tolerance::new(1e-6, 1e-300, 1000).unwrap();
        assert_relative_eq!(
            expint_ei_with(2.0, &loose).unwrap(),
            expint_ei(2.0).unwrap(),
            max_relative = 1e-6
        );
    }

    #[test]
    fn combinatorics() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(5), 120.0);
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}
