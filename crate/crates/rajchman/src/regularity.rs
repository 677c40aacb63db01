//! Empirical regularity of the self-similar measure: sampling, the
//! correlation-exponent fit for ball masses, and the pair mass of the
//! diagonal strip `{|x - y| <= delta}`.

use rayon::prelude::*;

use crate::ifs::IfsSpec;
use crate::mc::{self, McEstimate, Tally};
use crate::numeric::fit_line;
use crate::spectral::{depth_for_bias, sample_point};

/// Points drawn from the measure by fixed-depth random compositions.
#[derive(Debug, Clone)]
pub struct MeasureSample {
    pub points: Vec<f64>,
    pub depth: u32,
    pub seed: u64,
}

/// Sample `n` points, each a `depth`-fold random composition applied to the
/// hull midpoint; the sampling bias is at most `r_max^depth` in Kolmogorov
/// distance.
pub fn sample_measure(spec: &IfsSpec, n: u64, depth: u32, seed: u64, workers: usize) -> MeasureSample {
    let parts = mc::run_batched(n, seed, workers, |_, count, rng| {
        (0..count)
            .map(|_| sample_point(spec, depth, rng))
            .collect::<Vec<f64>>()
    });
    MeasureSample {
        points: parts.concat(),
        depth,
        seed,
    }
}

/// Fitted correlation exponent: pair mass `P(|X - Y| <= r) ~ C * r^alpha`.
///
/// This is the correlation version of ball-mass regularity, a companion lower
/// bound to the uniform one; under heavy overlaps it is far less noisy than
/// estimating `sup_x mu(B(x, r))` directly, which is why the fit reports this
/// exponent and says so.
#[derive(Debug, Clone)]
pub struct HolderFit {
    pub alpha: f64,
    pub c_constant: f64,
    pub radii: Vec<f64>,
    pub residual: f64,
}

/// Estimate the pair mass at each radius by a U-statistic over all sample
/// pairs and fit `ln mass` against `ln r`.
pub fn holder_exponent_fit(
    spec: &IfsSpec,
    radii: &[f64],
    n: u64,
    seed: u64,
    workers: usize,
) -> HolderFit {
    assert!(radii.len() >= 2, "need at least two radii to fit a slope");
    let depth = depth_for_bias(spec, 1e-10);
    let mut points = sample_measure(spec, n, depth, seed, workers).points;
    points.sort_unstable_by(f64::total_cmp);
    let masses: Vec<f64> = mc::with_pool(workers, || {
        radii
            .par_iter()
            .map(|&r| pair_fraction(&points, r))
            .collect()
    });
    let xs: Vec<f64> = radii.iter().map(|&r| r.ln()).collect();
    let ys: Vec<f64> = masses.iter().map(|&m| m.max(f64::MIN_POSITIVE).ln()).collect();
    let fit = fit_line(&xs, &ys);
    HolderFit {
        alpha: fit.slope,
        c_constant: fit.intercept.exp(),
        radii: radii.to_vec(),
        residual: fit.rms,
    }
}

/// One row of the pair-mass curve.
#[derive(Debug, Clone, Copy)]
pub struct MassPoint {
    pub radius: f64,
    pub mass_estimate: f64,
    /// Spread of block-wise estimates; pairs within one sample are dependent,
    /// so the binomial formula would understate the error.
    pub se: f64,
}

const MASS_CURVE_BLOCKS: usize = 8;

/// Pair mass at each radius with a block-resampled standard error: the sample
/// splits into disjoint blocks, each giving an independent pair fraction.
pub fn holder_mass_curve(
    spec: &IfsSpec,
    radii: &[f64],
    n: u64,
    seed: u64,
    workers: usize,
) -> Vec<MassPoint> {
    let depth = depth_for_bias(spec, 1e-10);
    let points = sample_measure(spec, n, depth, seed, workers).points;
    let block_len = points.len() / MASS_CURVE_BLOCKS;
    let mut blocks: Vec<Vec<f64>> = (0..MASS_CURVE_BLOCKS)
        .map(|b| points[b * block_len..(b + 1) * block_len].to_vec())
        .collect();
    for block in &mut blocks {
        block.sort_unstable_by(f64::total_cmp);
    }
    let mut sorted = points;
    sorted.sort_unstable_by(f64::total_cmp);
    radii
        .iter()
        .map(|&r| {
            let mass_estimate = pair_fraction(&sorted, r);
            let mut spread = Tally::new();
            for block in &blocks {
                spread.add(pair_fraction(block, r));
            }
            MassPoint {
                radius: r,
                mass_estimate,
                se: spread.std_error(),
            }
        })
        .collect()
}

/// Fraction of unordered sample pairs within `r`, via a two-pointer sweep
/// over the sorted points (linear after the sort).
fn pair_fraction(sorted: &[f64], r: f64) -> f64 {
    let n = sorted.len();
    let mut close_pairs = 0u64;
    let mut left = 0usize;
    for (i, &x) in sorted.iter().enumerate() {
        while x - sorted[left] > r {
            left += 1;
        }
        close_pairs += (i - left) as u64;
    }
    2.0 * close_pairs as f64 / (n as f64 * (n as f64 - 1.0))
}

/// Fraction of independent pairs with `|x - y| <= delta`, with standard error.
pub fn correlation_mass(
    spec: &IfsSpec,
    delta: f64,
    n_pairs: u64,
    seed: u64,
    workers: usize,
) -> McEstimate {
    assert!(delta > 0.0);
    let depth = depth_for_bias(spec, 1e-10);
    let parts = mc::run_batched(n_pairs, seed, workers, |_, count, rng| {
        let mut tally = Tally::new();
        for _ in 0..count {
            let x = sample_point(spec, depth, rng);
            let y = sample_point(spec, depth, rng);
            tally.add(if (x - y).abs() <= delta { 1.0 } else { 0.0 });
        }
        tally
    });
    parts
        .iter()
        .fold(Tally::new(), |acc, p| acc.merge(p))
        .estimate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::ks_statistic;

    #[test]
    fn uniform_sample_tracks_lebesgue() {
        let spec = IfsSpec::uniform_halves();
        let depth = depth_for_bias(&spec, 1e-10);
        let mut points = sample_measure(&spec, 200_000, depth, 5, 0).points;
        let d = ks_statistic(&mut points, |x| x.clamp(0.0, 1.0));
        assert!(d < 0.005, "KS = {d}");
    }

    #[test]
    fn cantor_sample_avoids_the_middle_gap() {
        let spec = IfsSpec::cantor_middle_thirds();
        let depth = depth_for_bias(&spec, 1e-10);
        let points = sample_measure(&spec, 50_000, depth, 6, 0).points;
        let gap = (1.0 / 3.0 + 1e-9, 2.0 / 3.0 - 1e-9);
        assert!(points.iter().all(|&x| x <= gap.0 || x >= gap.1));
        assert!(points.iter().all(|&x| (-1e-10..=1.0 + 1e-10).contains(&x)));
    }

    #[test]
    fn sample_mean_matches_first_moment() {
        let spec = IfsSpec::half_third();
        let depth = depth_for_bias(&spec, 1e-10);
        let points = sample_measure(&spec, 100_000, depth, 7, 0).points;
        let mut tally = Tally::new();
        for &x in &points {
            tally.add(x);
        }
        let est = tally.estimate();
        let m1 = spec.moments(1).values[1];
        assert!(
            (est.value - m1).abs() <= 4.0 * est.std_error,
            "{} vs {m1} (se {})",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn whole_hull_pair_mass_is_one() {
        let spec = IfsSpec::uniform_halves();
        let est = correlation_mass(&spec, 1.5, 10_000, 1, 0);
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn lebesgue_pair_mass_quick_check() {
        // exact pair integral: P(|x-y| <= d) = 2d - d^2
        let spec = IfsSpec::uniform_halves();
        let est = correlation_mass(&spec, 0.1, 150_000, 2, 0);
        assert!(
            (est.value - 0.19).abs() <= 4.0 * est.std_error,
            "{} (se {})",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn pair_mass_is_monotone_in_delta() {
        let spec = IfsSpec::cantor_middle_thirds();
        let deltas = [0.05, 0.1, 0.2, 0.4, 0.8];
        let estimates: Vec<McEstimate> = deltas
            .iter()
            .map(|&d| correlation_mass(&spec, d, 60_000, 3, 0))
            .collect();
        for pair in estimates.windows(2) {
            assert!(
                pair[1].value + 2.0 * (pair[0].std_error + pair[1].std_error) >= pair[0].value
            );
        }
    }

    #[test]
    fn correlation_exponents_of_the_fixtures() {
        let radii: Vec<f64> = (1..=5).map(|k| 3.0f64.powi(-k)).collect();
        let fit = holder_exponent_fit(&IfsSpec::uniform_halves(), &radii, 60_000, 4, 0);
        assert!((0.9..=1.05).contains(&fit.alpha), "alpha = {}", fit.alpha);
        let fit = holder_exponent_fit(&IfsSpec::cantor_middle_thirds(), &radii, 60_000, 4, 0);
        assert!((0.55..=0.7).contains(&fit.alpha), "alpha = {}", fit.alpha);
    }

    #[test]
    fn pair_fraction_agrees_with_brute_force() {
        let mut points = vec![0.1, 0.15, 0.4, 0.42, 0.9];
        points.sort_unstable_by(f64::total_cmp);
        let r = 0.06;
        let brute = {
            let mut count = 0;
            for i in 0..points.len() {
                for j in (i + 1)..points.len() {
                    if (points[i] - points[j]).abs() <= r {
                        count += 1;
                    }
                }
            }
            2.0 * count as f64 / (points.len() as f64 * (points.len() as f64 - 1.0))
        };
        assert_eq!(pair_fraction(&points, r), brute);
    }
}
