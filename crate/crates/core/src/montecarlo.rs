//! Sharded, reproducible Monte-Carlo engine.
//!
//! A run of `n` trials is split into `workers` contiguous shards. Shard `i`
//! draws from `RngSpec::worker(i)`, and shard results are merged in index
//! order, so the estimate depends only on `(seed, stream, n, workers)` and
//! not on thread scheduling.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::RngSpec;
use crate::error::{Error, Result};

/// Smallest accepted sample count.
pub const MIN_SAMPLES: u64 = 1000;

/// A Monte-Carlo estimate with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
    pub workers: u32,
}

impl McEstimate {
    /// True when `value` lies within `k` standard errors of the mean.
    ///
    /// The standard error used is the larger of the sample standard error
    /// and the binomial error `sqrt(v(1-v)/n)` implied by `value` itself, so
    /// that a run observing no events is still judged against the spread a
    /// probability `value` would produce.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.tolerance_scale(value)
    }

    pub fn tolerance_scale(&self, value: f64) -> f64 {
        let v = value.clamp(0.0, 1.0);
        let binomial = (v * (1.0 - v) / self.n as f64).sqrt();
        self.stderr.max(binomial)
    }

    /// Distance to `value` in units of [`McEstimate::tolerance_scale`].
    pub fn z_score(&self, value: f64) -> f64 {
        let scale = self.tolerance_scale(value);
        if scale == 0.0 {
            if self.mean == value {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - value).abs() / scale
        }
    }
}

/// Running first and second moments of one indicator or statistic.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub sum: f64,
    pub sum_sq: f64,
    pub n: u64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
        self.n += 1;
    }

    fn merge(&mut self, other: &Moments) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.n += other.n;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let mean = self.sum / n;
        ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Validates a sample count and worker count.
pub fn check_run(n: u64, workers: u32) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::domain(format!(
            "Monte-Carlo sample count must be at least {MIN_SAMPLES}, got {n}"
        )));
    }
    if workers == 0 {
        return Err(Error::domain("worker count must be at least 1"));
    }
    Ok(())
}

/// Runs `n` trials of `trial`, each producing `K` statistics.
pub fn run_sharded<const K: usize, F>(n: u64, spec: RngSpec, workers: u32, trial: F) -> Result<[Moments; K]>
where
    F: Fn(&mut ChaCha8Rng) -> [f64; K] + Sync,
{
    check_run(n, workers)?;
    let w = u64::from(workers);
    let shards: Vec<[Moments; K]> = (0..workers)
        .into_par_iter()
        .map(|i| {
            let count = n / w + u64::from(u64::from(i) < n % w);
            let mut rng = spec.worker(i).generator();
            let mut acc = [Moments::default(); K];
            for _ in 0..count {
                let xs = trial(&mut rng);
                for (a, x) in acc.iter_mut().zip(xs) {
                    a.push(x);
                }
            }
            acc
        })
        .collect();
    let mut total = [Moments::default(); K];
    for shard in &shards {
        for (t, s) in total.iter_mut().zip(shard) {
            t.merge(s);
        }
    }
    Ok(total)
}

/// Estimates the mean of a single per-trial statistic.
pub fn estimate_mean<F>(n: u64, spec: RngSpec, workers: u32, trial: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let [m] = run_sharded(n, spec, workers, |rng| [trial(rng)])?;
    Ok(McEstimate {
        mean: m.mean(),
        stderr: m.stderr(),
        n,
        seed: spec.seed,
        workers,
    })
}

/// Sum of two means estimated from the same trials, with the standard
/// error `sqrt(var_a/n + var_b/n)`.
pub fn estimate_sum_of_means<F>(n: u64, spec: RngSpec, workers: u32, trial: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> [f64; 2] + Sync,
{
    let [a, b] = run_sharded(n, spec, workers, trial)?;
    let nf = n as f64;
    Ok(McEstimate {
        mean: a.mean() + b.mean(),
        stderr: ((a.variance() + b.variance()) / nf).sqrt(),
        n,
        seed: spec.seed,
        workers,
    })
}

/// Default worker count: the number of rayon threads.
pub fn default_workers() -> u32 {
    rayon::current_num_threads().max(1) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_exp1;
    use rand::Rng;

    #[test]
    fn rejects_small_runs() {
        let spec = RngSpec::new(1, 0);
        assert!(estimate_mean(999, spec, 1, |_| 0.0).is_err());
        assert!(estimate_mean(1000, spec, 0, |_| 0.0).is_err());
    }

    #[test]
    fn deterministic_for_fixed_workers() {
        let spec = RngSpec::new(42, 0);
        let a = estimate_mean(10_000, spec, 4, |r| r.gen::<f64>()).unwrap();
        let b = estimate_mean(10_000, spec, 4, |r| r.gen::<f64>()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n, 10_000);
        assert_eq!(a.workers, 4);
    }

    #[test]
    fn uneven_shards_cover_all_trials() {
        let [m] = run_sharded(1003, RngSpec::new(0, 0), 7, |_| [1.0]).unwrap();
        assert_eq!(m.n, 1003);
        assert_eq!(m.sum, 1003.0);
    }

    #[test]
    fn exponential_mean() {
        let e = estimate_mean(200_000, RngSpec::new(9, 1), 4, sample_exp1).unwrap();
        assert!(e.agrees_with(1.0, 4.0), "{e:?}");
    }

    #[test]
    fn zero_event_run_uses_binomial_scale() {
        let e = McEstimate {
            mean: 0.0,
            stderr: 0.0,
            n: 1_000_000,
            seed: 0,
            workers: 1,
        };
        assert!(e.agrees_with(1e-7, 3.0));
        assert!(!e.agrees_with(1e-3, 3.0));
        assert_eq!(e.z_score(0.0), 0.0);
    }
}
