//! Channel and noise samplers, plus the exact distribution of the
//! antenna-selection / maximal-ratio-combining gain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::specfun::factorial;

/// Seed and substream index of a reproducible generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub const fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// A ChaCha8 generator positioned at the start of this stream.
    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Spec for worker `index` of a sharded run. Distinct workers of
    /// distinct base streams never share a stream.
    pub fn worker(&self, index: u32) -> Self {
        Self {
            seed: self.seed,
            stream: (self.stream << 32) | u64::from(index),
        }
    }
}

/// Exp(1) by inversion: `-ln(1 - U)`.
pub fn sample_exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    -(-u).ln_1p()
}

/// Log-uniform noise power `σ_n² ρ^U`, `U ~ U[-1, 1]`.
pub fn sample_noise_power<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    params.sigma_n2() * (params.rho().ln() * (2.0 * u - 1.0)).exp()
}

/// Rayleigh power gain `|h|² ~ Exp(1)`.
pub fn sample_rayleigh_gain<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    sample_exp1(rng)
}

/// Largest of `n_t` independent sums of `n_r` Exp(1) gains.
pub fn sample_tas_mrc_gain<R: Rng + ?Sized>(n_t: u32, n_r: u32, rng: &mut R) -> f64 {
    (0..n_t)
        .map(|_| (0..n_r).map(|_| sample_exp1(rng)).sum::<f64>())
        .fold(0.0, f64::max)
}

fn check_gain_args(n_t: u32, n_r: u32, x: f64) -> Result<()> {
    if n_t == 0 || n_r == 0 {
        return Err(Error::domain(format!(
            "antenna counts must be >= 1, got ({n_t}, {n_r})"
        )));
    }
    if !(x >= 0.0) || x.is_nan() {
        return Err(Error::domain(format!("gain must be >= 0, got {x}")));
    }
    Ok(())
}

/// CDF of a Gamma(n, 1) variable at `x >= 0`.
pub(crate) fn gamma_cdf(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    let nf = f64::from(n);
    if x < nf + 1.0 {
        // e^{-x} Σ_{j>=n} x^j/j!: every term positive
        let mut term = (-x + nf * x.ln() - ln_factorial(n)).exp();
        let mut sum = term;
        let mut j = nf;
        loop {
            j += 1.0;
            term *= x / j;
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
        }
        sum.min(1.0)
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..n {
            term *= x / f64::from(j);
            sum += term;
        }
        (1.0 - (-x).exp() * sum).max(0.0)
    }
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

/// Exact CDF of [`sample_tas_mrc_gain`]:
/// `[1 - e^{-x} Σ_{j<n_r} x^j/j!]^{n_t}`.
pub fn tas_mrc_gain_cdf(n_t: u32, n_r: u32, x: f64) -> Result<f64> {
    check_gain_args(n_t, n_r, x)?;
    Ok(gamma_cdf(n_r, x).powi(n_t as i32))
}

/// Density of the selected-antenna gain:
/// `n_t F^{n_t-1}(x) x^{n_r-1} e^{-x} / (n_r-1)!`.
pub fn tas_mrc_gain_pdf(n_t: u32, n_r: u32, x: f64) -> Result<f64> {
    check_gain_args(n_t, n_r, x)?;
    let branch = x.powi(n_r as i32 - 1) * (-x).exp() / factorial(n_r - 1);
    Ok(f64::from(n_t) * gamma_cdf(n_r, x).powi(n_t as i32 - 1) * branch)
}
