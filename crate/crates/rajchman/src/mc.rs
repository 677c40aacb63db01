//! Deterministic, batched Monte Carlo plumbing.
//!
//! Work is split into fixed-size batches; batch `i` draws from an independent
//! ChaCha stream `(seed, i)` and batch results are reduced in index order.
//! The worker count therefore only decides scheduling: results are
//! byte-identical for any number of threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::numeric::KahanSum;

/// Trajectories per RNG stream. Fixed so the stream layout never depends on
/// worker count.
pub const BATCH_SIZE: u64 = 1 << 14;

/// The counter-based stream splitting rule: one master seed, one stream index.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Run `f` inside a dedicated thread pool of `workers` threads
/// (`0` = the global default pool).
pub fn with_pool<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool")
            .install(f)
    }
}

/// Split `total` items into fixed batches, run `job(batch_index, count, rng)`
/// in parallel, and return per-batch results in batch order.
pub fn run_batched<T, F>(total: u64, seed: u64, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64, &mut ChaCha8Rng) -> T + Sync,
{
    let batches: Vec<(u64, u64)> = (0..total.div_ceil(BATCH_SIZE))
        .map(|i| (i, BATCH_SIZE.min(total - i * BATCH_SIZE)))
        .collect();
    with_pool(workers, || {
        batches
            .into_par_iter()
            .map(|(i, count)| {
                let mut rng = stream_rng(seed, i);
                job(i, count, &mut rng)
            })
            .collect()
    })
}

/// Running first and second moments of a scalar sample.
#[derive(Debug, Clone, Copy, Default)]
pub struct Tally {
    n: u64,
    sum: KahanSum,
    sum_sq: KahanSum,
}

impl Tally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        self.n += 1;
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }

    /// Merge in batch order; merging is associative up to rounding, so the
    /// caller must keep the order fixed (as [`run_batched`] output does).
    pub fn merge(mut self, other: &Tally) -> Tally {
        self.n += other.n;
        self.sum.add(other.sum.value());
        self.sum_sq.add(other.sum_sq.value());
        self
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.sum.value() / self.n as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let centered = self.sum_sq.value() - self.sum.value() * self.sum.value() / n;
        (centered / (n - 1.0)).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }

    pub fn estimate(&self) -> McEstimate {
        McEstimate {
            value: self.mean(),
            std_error: self.std_error(),
            n: self.n,
        }
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n: u64,
}

/// Convenience: batched mean/standard error of `sample(rng)` over `total` draws.
pub fn monte_carlo_mean<F>(total: u64, seed: u64, workers: usize, sample: F) -> McEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let parts = run_batched(total, seed, workers, |_, count, rng| {
        let mut tally = Tally::new();
        for _ in 0..count {
            tally.add(sample(rng));
        }
        tally
    });
    parts
        .iter()
        .fold(Tally::new(), |acc, part| acc.merge(part))
        .estimate()
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
/// Sorts the sample in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    assert!(!samples.is_empty());
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i as f64 + 1.0) / n - f);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn batching_is_worker_independent() {
        let job = |_: u64, count: u64, rng: &mut ChaCha8Rng| {
            let mut t = Tally::new();
            for _ in 0..count {
                t.add(rng.gen::<f64>());
            }
            t
        };
        let one = run_batched(100_000, 9, 1, job)
            .iter()
            .fold(Tally::new(), |a, p| a.merge(p))
            .estimate();
        let four = run_batched(100_000, 9, 4, job)
            .iter()
            .fold(Tally::new(), |a, p| a.merge(p))
            .estimate();
        assert_eq!(one.value.to_bits(), four.value.to_bits());
        assert_eq!(one.std_error.to_bits(), four.std_error.to_bits());
    }

    #[test]
    fn tally_of_constants_has_zero_variance() {
        let mut t = Tally::new();
        for _ in 0..1000 {
            t.add(1.0);
        }
        assert_eq!(t.mean(), 1.0);
        assert_eq!(t.variance(), 0.0);
        assert_eq!(t.std_error(), 0.0);
    }

    #[test]
    fn ks_of_uniform_sample_is_small() {
        let mut rng = stream_rng(3, 0);
        let mut xs: Vec<f64> = (0..200_000).map(|_| rng.gen::<f64>()).collect();
        let d = ks_statistic(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!(d < 0.005, "d = {d}");
    }
}
