//! Fourier-side evaluation: the transform of a self-similar measure with a
//! certified truncation bound, two independent oracles (an infinite-product
//! form for equal-ratio systems and plain Monte Carlo), frequency-band decay
//! scans with a logarithmic-rate fit, the phase-sum identity linking stopping
//! words to walk coordinates, the Cauchy-Schwarz double-sum bound, and the
//! high-frequency oscillation integral of the overshoot limit law.
//!
//! The transform convention is `∫ exp(-2*pi*i*xi*x) dμ(x)`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::ifs::{IfsError, IfsSpec, DEFAULT_WORD_CAP};
use crate::mc::{self, Tally};
use crate::numeric::{fit_line, oscillatory_complex, KahanComplex};
use crate::walk::StepDistribution;

/// Frequencies at or below this magnitude are evaluated by the moment series
/// alone; above it, the word tree is expanded until every tail argument falls
/// to the cutoff.
pub const CUTOFF_FREQUENCY: f64 = 0.25;
/// Hard ceiling on the series degree before the requested tolerance is
/// declared unreachable.
pub const MAX_SERIES_DEGREE: usize = 60;
/// Scans drop bands below `exp(2)` before fitting the logarithmic rate.
pub const FIT_MIN_FREQUENCY: f64 = 7.389_056_098_930_65;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("spec must be normalized (support in [0,1]) for certified evaluation")]
    NotNormalized,
    #[error("tolerance {tol:e} needs series degree past {MAX_SERIES_DEGREE}")]
    Tolerance { tol: f64 },
    #[error("the product oracle needs all contraction ratios equal")]
    UnequalRatio,
    #[error("need at least {needed} bands at or above exp(2), found {found}")]
    InsufficientBands { needed: usize, found: usize },
    #[error(transparent)]
    Ifs(#[from] IfsError),
}

/// A transform value with a certified truncation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierEvaluation {
    pub frequency: f64,
    pub value: Complex64,
    /// Bound on the series truncation error; the value is exact up to this
    /// plus floating-point rounding.
    pub error_bound: f64,
}

/// Geometric-majorant bound on the series tail past degree `k`:
/// `sum_{j>k} y^j / j! <= y^{k+1}/(k+1)! * 1/(1 - y/(k+2))`.
fn series_tail_bound(y: f64, k: usize) -> f64 {
    let mut lead = 1.0;
    for j in 1..=(k + 1) {
        lead *= y / j as f64;
    }
    let ratio = y / (k + 2) as f64;
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    lead / (1.0 - ratio)
}

/// Smallest degree whose tail bound at the cutoff argument meets `tol`.
fn series_degree(tol: f64) -> Result<usize, SpectralError> {
    if !(tol > 0.0) {
        return Err(SpectralError::Tolerance { tol });
    }
    let y = 2.0 * std::f64::consts::PI * CUTOFF_FREQUENCY;
    (0..=MAX_SERIES_DEGREE)
        .find(|&k| series_tail_bound(y, k) <= tol)
        .ok_or(SpectralError::Tolerance { tol })
}

/// Degree-`k` moment series coefficients `(-2*pi*i)^k m_k / k!`.
fn series_coefficients(spec: &IfsSpec, degree: usize) -> Vec<Complex64> {
    let moments = spec.moments(degree);
    let step = Complex64::new(0.0, -2.0 * std::f64::consts::PI);
    let mut base = Complex64::new(1.0, 0.0);
    let mut coefficients = Vec::with_capacity(degree + 1);
    for (k, &m) in moments.values.iter().enumerate() {
        coefficients.push(base * m);
        base *= step / (k as f64 + 1.0);
    }
    coefficients
}

fn horner(coefficients: &[Complex64], x: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coefficients.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Evaluate the transform with a certified truncation bound.
///
/// The measure is expanded over the stopping set at `t = max(0, ln(|xi| /
/// cutoff))`, which shrinks every tail argument `r_w * xi` to the cutoff
/// frequency or below; each tail is then the moment series, whose remainder
/// is bounded by the factorial majorant because the support lies in `[0,1]`.
pub fn fourier_recursive(
    spec: &IfsSpec,
    xi: f64,
    tol: f64,
) -> Result<FourierEvaluation, SpectralError> {
    fourier_recursive_capped(spec, xi, tol, DEFAULT_WORD_CAP)
}

pub fn fourier_recursive_capped(
    spec: &IfsSpec,
    xi: f64,
    tol: f64,
    word_cap: f64,
) -> Result<FourierEvaluation, SpectralError> {
    if !spec.is_normalized() {
        return Err(SpectralError::NotNormalized);
    }
    let degree = series_degree(tol)?;
    let coefficients = series_coefficients(spec, degree);
    let two_pi = 2.0 * std::f64::consts::PI;
    let t = (xi.abs() / CUTOFF_FREQUENCY).ln().max(0.0);
    let mut acc = KahanComplex::new();
    let mut tail_arg_max = 0.0f64;
    spec.for_each_stopping_leaf(t, word_cap, |leaf| {
        let tail_arg = leaf.ratio * xi;
        tail_arg_max = tail_arg_max.max(tail_arg.abs());
        let phase = Complex64::from_polar(1.0, -two_pi * xi * leaf.translation);
        acc.add(leaf.weight * phase * horner(&coefficients, tail_arg));
    })?;
    Ok(FourierEvaluation {
        frequency: xi,
        value: acc.value(),
        error_bound: series_tail_bound(two_pi * tail_arg_max, degree),
    })
}

/// Independent oracle for equal-ratio systems: one-step self-similarity gives
/// `transform(xi) = phi(xi) * transform(r * xi)` with
/// `phi(xi) = sum_j p_j exp(-2*pi*i*xi*b_j)`, so the transform is the infinite
/// product of `phi` down the geometric frequency ladder. The returned finite
/// product misses a factor `1 + O(2*pi*r^depth*|xi|*m_1)`.
pub fn fourier_product_equal_ratio(
    spec: &IfsSpec,
    xi: f64,
    depth: usize,
) -> Result<Complex64, SpectralError> {
    let ratio = spec.maps()[0].ratio;
    if spec.maps().iter().any(|m| m.ratio != ratio) {
        return Err(SpectralError::UnequalRatio);
    }
    assert!(depth >= 1);
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut product = Complex64::new(1.0, 0.0);
    let mut freq = xi;
    for _ in 0..depth {
        let mut factor = Complex64::new(0.0, 0.0);
        for m in spec.maps() {
            factor += m.weight * Complex64::from_polar(1.0, -two_pi * freq * m.translation);
        }
        product *= factor;
        freq *= ratio;
    }
    Ok(product)
}

/// Second independent oracle: sample the measure by random `depth`-fold
/// compositions of the hull midpoint and average the phases. Returns the
/// estimate and a combined (real+imaginary) standard error.
pub fn fourier_mc(
    spec: &IfsSpec,
    xi: f64,
    n: u64,
    depth: u32,
    seed: u64,
    workers: usize,
) -> (Complex64, f64) {
    let two_pi = 2.0 * std::f64::consts::PI;
    let parts = mc::run_batched(n, seed, workers, |_, count, rng| {
        let mut re = Tally::new();
        let mut im = Tally::new();
        for _ in 0..count {
            let x = sample_point(spec, depth, rng);
            let z = Complex64::from_polar(1.0, -two_pi * xi * x);
            re.add(z.re);
            im.add(z.im);
        }
        (re, im)
    });
    let (re, im) = parts.iter().fold(
        (Tally::new(), Tally::new()),
        |(ar, ai), (br, bi)| (ar.merge(br), ai.merge(bi)),
    );
    let value = Complex64::new(re.mean(), im.mean());
    let se = (re.std_error().powi(2) + im.std_error().powi(2)).sqrt();
    (value, se)
}

pub(crate) fn sample_point(spec: &IfsSpec, depth: u32, rng: &mut ChaCha8Rng) -> f64 {
    let (lo, hi) = spec.hull();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..depth {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = spec.maps().len() - 1;
        for (j, m) in spec.maps().iter().enumerate() {
            acc += m.weight;
            if u < acc {
                chosen = j;
                break;
            }
        }
        let m = spec.maps()[chosen];
        x = m.ratio * x + m.translation;
    }
    x
}

/// Composition depth at which the sampling bias `r_max^depth` drops under `bias`.
pub fn depth_for_bias(spec: &IfsSpec, bias: f64) -> u32 {
    assert!(bias > 0.0 && bias < 1.0);
    (bias.ln() / spec.r_max().ln()).ceil() as u32
}

/// One frequency band of a scan with the sampled supremum of `|transform|`.
#[derive(Debug, Clone, Copy)]
pub struct ScanBand {
    pub xi_low: f64,
    pub xi_high: f64,
    /// Largest sampled `|transform|`; a lower bound on the band supremum.
    pub sup_abs: f64,
    pub samples: u32,
}

#[derive(Debug, Clone)]
pub struct SpectrumScan {
    pub bands: Vec<ScanBand>,
}

#[derive(Debug, Clone)]
pub struct ScanParams {
    /// Lower edge of the first band; clamped to at least 1.
    pub xi_min: f64,
    pub xi_max: f64,
    /// Number of geometrically equal bands between the edges.
    pub band_count: usize,
    /// Deterministic log-spaced points per band; the same number of jittered
    /// points is added on top.
    pub samples_per_band: usize,
    pub tol: f64,
    pub seed: u64,
}

impl ScanParams {
    pub fn new(xi_max: f64) -> ScanParams {
        ScanParams {
            xi_min: 1.0,
            xi_max,
            band_count: 24,
            samples_per_band: 8,
            tol: 1e-8,
            seed: 0,
        }
    }
}

/// Scan `|transform|` over geometric frequency bands.
///
/// Each band evaluates `samples_per_band` deterministic log-spaced points
/// plus as many jittered points drawn from the stream `(seed, band index)`,
/// and records the sampled supremum.
pub fn spectrum_scan(
    spec: &IfsSpec,
    params: &ScanParams,
    workers: usize,
) -> Result<SpectrumScan, SpectralError> {
    let lo = params.xi_min.max(1.0);
    assert!(params.xi_max > lo && params.band_count > 0 && params.samples_per_band > 0);
    let step = (params.xi_max / lo).powf(1.0 / params.band_count as f64);
    let edges: Vec<f64> = (0..=params.band_count)
        .map(|k| {
            if k == params.band_count {
                params.xi_max
            } else {
                lo * step.powi(k as i32)
            }
        })
        .collect();
    let bands: Result<Vec<ScanBand>, SpectralError> = mc::with_pool(workers, || {
        (0..params.band_count)
            .into_par_iter()
            .map(|band| {
                let (xi_low, xi_high) = (edges[band], edges[band + 1]);
                let ratio = xi_high / xi_low;
                let spb = params.samples_per_band;
                let mut rng = mc::stream_rng(params.seed, band as u64);
                let mut sup = 0.0f64;
                let mut samples = 0u32;
                for i in 0..2 * spb {
                    let position = if i < spb {
                        (i as f64 + 0.5) / spb as f64
                    } else {
                        rng.gen::<f64>()
                    };
                    let xi = xi_low * ratio.powf(position);
                    let eval = fourier_recursive(spec, xi, params.tol)?;
                    sup = sup.max(eval.value.norm());
                    samples += 1;
                }
                Ok(ScanBand {
                    xi_low,
                    xi_high,
                    sup_abs: sup,
                    samples,
                })
            })
            .collect()
    });
    Ok(SpectrumScan { bands: bands? })
}

/// Fitted logarithmic decay rate: `sup |transform| ~ C * (ln xi)^(-beta)`.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    pub beta: f64,
    pub intercept: f64,
    /// RMS residual of the underlying line fit.
    pub residual: f64,
}

/// Least squares of `ln sup` against `ln ln xi_mid` over bands with
/// `xi_low >= exp(2)`; `beta` is the negated slope.
pub fn fit_log_decay(scan: &SpectrumScan) -> Result<DecayFit, SpectralError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for band in &scan.bands {
        if band.xi_low < FIT_MIN_FREQUENCY || !(band.sup_abs > 0.0) {
            continue;
        }
        let mid = (band.xi_low * band.xi_high).sqrt();
        xs.push(mid.ln().ln());
        ys.push(band.sup_abs.ln());
    }
    if xs.len() < 5 {
        return Err(SpectralError::InsufficientBands {
            needed: 5,
            found: xs.len(),
        });
    }
    let fit = fit_line(&xs, &ys);
    Ok(DecayFit {
        beta: -fit.slope,
        intercept: fit.intercept,
        residual: fit.rms,
    })
}

/// Both sides of the stopping-set phase identity at scale `s` and level `t`.
///
/// The left side sums the phases of the composed-map differences
/// `f_w(x) - f_w(y) = r_w (x - y)`; the right side evaluates the walk-coordinate
/// kernel `g(r) = exp(-2*pi*i*c*exp(-r))` at the stopped walk positions
/// `-ln r_w - t` with `c = s (x - y)`. The two routes agree exactly; the
/// residual measures only rounding.
#[derive(Debug, Clone, Copy)]
pub struct IdentityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

pub fn stopping_sum_identity(
    spec: &IfsSpec,
    s: f64,
    t: f64,
    x: f64,
    y: f64,
) -> Result<IdentityCheck, SpectralError> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let scale = s * t.exp();
    let dxy = x - y;
    let mut lhs = KahanComplex::new();
    let mut rhs = KahanComplex::new();
    spec.for_each_stopping_leaf(t, DEFAULT_WORD_CAP, |leaf| {
        lhs.add(leaf.weight * Complex64::from_polar(1.0, -two_pi * scale * (leaf.ratio * dxy)));
        let walk_position = -leaf.ratio.ln() - t;
        rhs.add(leaf.weight * Complex64::from_polar(1.0, -two_pi * s * dxy * (-walk_position).exp()));
    })?;
    let (lhs, rhs) = (lhs.value(), rhs.value());
    Ok(IdentityCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
    })
}

/// Monte Carlo of the pair-averaged stopping-word phase sum
/// `E_{x,y} sum_w p_w exp(-2*pi*i*xi*(f_w(x) - f_w(y)))`.
///
/// By Cauchy-Schwarz its real part dominates `|transform(xi)|^2`; the
/// imaginary part vanishes by the symmetry of the double integral and is
/// reported so sampling bugs surface instead of cancelling silently.
#[derive(Debug, Clone, Copy)]
pub struct DoubleSumEstimate {
    pub real: f64,
    pub real_se: f64,
    pub imag: f64,
    pub imag_se: f64,
    pub pairs: u64,
}

pub fn double_sum_bound(
    spec: &IfsSpec,
    xi: f64,
    t: f64,
    n_pairs: u64,
    seed: u64,
    workers: usize,
) -> Result<DoubleSumEstimate, SpectralError> {
    let mut leaves: Vec<(f64, f64)> = Vec::new();
    spec.for_each_stopping_leaf(t, DEFAULT_WORD_CAP, |leaf| {
        leaves.push((leaf.ratio, leaf.weight));
    })?;
    let depth = depth_for_bias(spec, 1e-10);
    let two_pi = 2.0 * std::f64::consts::PI;
    let parts = mc::run_batched(n_pairs, seed, workers, |_, count, rng| {
        let mut re = Tally::new();
        let mut im = Tally::new();
        for _ in 0..count {
            let x = sample_point(spec, depth, rng);
            let y = sample_point(spec, depth, rng);
            let dxy = x - y;
            let mut inner = Complex64::new(0.0, 0.0);
            for &(ratio, weight) in &leaves {
                inner += weight * Complex64::from_polar(1.0, -two_pi * xi * ratio * dxy);
            }
            re.add(inner.re);
            im.add(inner.im);
        }
        (re, im)
    });
    let (re, im) = parts.iter().fold(
        (Tally::new(), Tally::new()),
        |(ar, ai), (br, bi)| (ar.merge(br), ai.merge(bi)),
    );
    Ok(DoubleSumEstimate {
        real: re.mean(),
        real_se: re.std_error(),
        imag: im.mean(),
        imag_se: im.std_error(),
        pairs: n_pairs,
    })
}

/// The oscillation integral of the overshoot limit law,
/// `(1/sigma) * ∫_0^∞ exp(-2*pi*i*s*exp(-r)) p(r) dr`.
///
/// Substituting `u = exp(-r)` turns each constant-tail piece into
/// `∫ exp(-2*pi*i*s*u) / u du` between consecutive breakpoint images, which is
/// evaluated by oscillation-aware adaptive quadrature to 1e-10.
pub fn oscillation_integral(dist: &StepDistribution, s: f64) -> Complex64 {
    let omega = 2.0 * std::f64::consts::PI * s;
    let mut acc = KahanComplex::new();
    let mut tail = 1.0;
    let mut upper = 1.0; // exp(-0)
    let quad_tol = 1e-10;
    for atom in dist.atoms() {
        let lower = (-atom.log_step).exp();
        let piece = oscillatory_complex(
            &|u: f64| Complex64::from_polar(1.0, -omega * u) / u,
            lower,
            upper,
            omega,
            quad_tol,
        );
        acc.add(tail * piece);
        tail -= atom.weight;
        upper = lower;
    }
    acc.value() / dist.mean()
}

/// Sup of `|transform|` sampled at the integer powers `base^k`, `k` in the
/// given range. On a lattice system these values are constant in `k`.
pub fn power_ladder(
    spec: &IfsSpec,
    base: f64,
    k_range: std::ops::RangeInclusive<u32>,
    tol: f64,
) -> Result<Vec<(f64, f64)>, SpectralError> {
    k_range
        .map(|k| {
            let xi = base.powi(k as i32);
            fourier_recursive(spec, xi, tol).map(|e| (xi, e.value.norm()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_frequency_is_total_mass() {
        let spec = IfsSpec::cantor_middle_thirds();
        let eval = fourier_recursive(&spec, 0.0, 1e-10).unwrap();
        assert!((eval.value - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(eval.error_bound, 0.0);
    }

    #[test]
    fn requires_normalized_spec() {
        let wide = IfsSpec::validate(&[(0.5, 0.0, 0.5), (0.5, 5.0, 0.5)]).unwrap();
        assert!(matches!(
            fourier_recursive(&wide, 1.0, 1e-8),
            Err(SpectralError::NotNormalized)
        ));
        assert!(fourier_recursive(&wide.normalize_to_unit(), 1.0, 1e-8).is_ok());
    }

    #[test]
    fn unreachable_tolerance_errors() {
        let spec = IfsSpec::cantor_middle_thirds();
        assert!(matches!(
            fourier_recursive(&spec, 1.0, 1e-200),
            Err(SpectralError::Tolerance { .. })
        ));
        assert!(matches!(
            fourier_recursive(&spec, 1e30, 1e-8),
            Err(SpectralError::Ifs(IfsError::Explosion { .. }))
        ));
    }

    #[test]
    fn lebesgue_transform_is_sinc() {
        let spec = IfsSpec::uniform_halves();
        // exact transform: exp(-pi*i*xi) sin(pi*xi)/(pi*xi); zero at integers
        let eval = fourier_recursive(&spec, 5.0, 1e-10).unwrap();
        assert!(eval.value.norm() <= eval.error_bound + 1e-12);
        let eval = fourier_recursive(&spec, 2.5, 1e-10).unwrap();
        let exact = Complex64::from_polar(1.0, -PI * 2.5) * (PI * 2.5).sin() / (PI * 2.5);
        assert!((eval.value - exact).norm() < 1e-9);
    }

    #[test]
    fn recursive_matches_product_oracle_on_cantor() {
        let spec = IfsSpec::cantor_middle_thirds();
        for &xi in &[1.0, 7.0, 100.0, 381.5] {
            let eval = fourier_recursive(&spec, xi, 1e-10).unwrap();
            let product = fourier_product_equal_ratio(&spec, xi, 40).unwrap();
            assert!(
                (eval.value - product).norm() < 1e-8,
                "xi = {xi}: {} vs {}",
                eval.value,
                product
            );
        }
    }

    #[test]
    fn product_oracle_matches_hand_infinite_product() {
        // the one-step factor for the Cantor system telescopes into
        // exp(-pi*i) * prod_{k>=1} cos(2*pi/3^k) at frequency 1
        let spec = IfsSpec::cantor_middle_thirds();
        let got = fourier_product_equal_ratio(&spec, 1.0, 40).unwrap();
        let mut expected = Complex64::from_polar(1.0, -PI);
        for k in 1..=40 {
            expected *= (2.0 * PI / 3.0f64.powi(k)).cos();
        }
        assert!((got - expected).norm() < 1e-12);
        assert_eq!(
            fourier_product_equal_ratio(&spec, 0.0, 10).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert!(matches!(
            fourier_product_equal_ratio(&IfsSpec::half_third(), 1.0, 10),
            Err(SpectralError::UnequalRatio)
        ));
    }

    #[test]
    fn one_step_functional_equation() {
        let spec = IfsSpec::half_third();
        let two_pi = 2.0 * PI;
        for &xi in &[3.7, 41.0, 257.3] {
            let whole = fourier_recursive(&spec, xi, 1e-11).unwrap();
            let mut assembled = Complex64::new(0.0, 0.0);
            let mut budget = whole.error_bound;
            for m in spec.maps() {
                let part = fourier_recursive(&spec, m.ratio * xi, 1e-11).unwrap();
                assembled +=
                    m.weight * Complex64::from_polar(1.0, -two_pi * xi * m.translation) * part.value;
                budget += m.weight * part.error_bound;
            }
            assert!(
                (whole.value - assembled).norm() <= budget + 1e-12,
                "xi = {xi}"
            );
        }
    }

    #[test]
    fn monte_carlo_oracle_agrees() {
        let spec = IfsSpec::cantor_middle_thirds();
        let depth = depth_for_bias(&spec, 1e-12);
        let (mc_value, se) = fourier_mc(&spec, 7.0, 200_000, depth, 42, 0);
        let eval = fourier_recursive(&spec, 7.0, 1e-10).unwrap();
        assert!(
            (mc_value - eval.value).norm() <= 4.0 * se + eval.error_bound,
            "{mc_value} vs {} (se {se})",
            eval.value
        );
    }

    #[test]
    fn scan_and_fit_recover_planted_exponent() {
        let bands: Vec<ScanBand> = (0..12)
            .map(|k| {
                let xi_low = 8.0 * 2.0f64.powi(k);
                let xi_high = 2.0 * xi_low;
                let mid = (xi_low * xi_high).sqrt();
                ScanBand {
                    xi_low,
                    xi_high,
                    sup_abs: mid.ln().powi(-2),
                    samples: 1,
                }
            })
            .collect();
        let fit = fit_log_decay(&SpectrumScan { bands }).unwrap();
        assert!((fit.beta - 2.0).abs() < 1e-6, "beta = {}", fit.beta);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn flat_scan_fits_zero() {
        let bands: Vec<ScanBand> = (0..10)
            .map(|k| ScanBand {
                xi_low: 10.0 * 2.0f64.powi(k),
                xi_high: 20.0 * 2.0f64.powi(k),
                sup_abs: 0.4,
                samples: 1,
            })
            .collect();
        let fit = fit_log_decay(&SpectrumScan { bands }).unwrap();
        assert!(fit.beta.abs() < 1e-9);
    }

    #[test]
    fn fit_needs_five_high_bands() {
        let bands = vec![
            ScanBand {
                xi_low: 1.0,
                xi_high: 2.0,
                sup_abs: 0.5,
                samples: 1,
            };
            6
        ];
        assert!(matches!(
            fit_log_decay(&SpectrumScan { bands }),
            Err(SpectralError::InsufficientBands { found: 0, .. })
        ));
    }

    #[test]
    fn scan_excludes_low_frequencies_and_bounds_sup() {
        let spec = IfsSpec::cantor_middle_thirds();
        let params = ScanParams {
            xi_min: 0.01,
            xi_max: 64.0,
            band_count: 6,
            samples_per_band: 4,
            tol: 1e-8,
            seed: 1,
        };
        let scan = spectrum_scan(&spec, &params, 0).unwrap();
        assert!(scan.bands[0].xi_low >= 1.0);
        assert!(scan
            .bands
            .iter()
            .all(|b| b.sup_abs <= 1.0 + 1e-8 && b.samples == 8));
    }

    #[test]
    fn identity_is_exact_at_equal_points() {
        let spec = IfsSpec::half_third();
        let check = stopping_sum_identity(&spec, 3.0, 4.0, 0.5, 0.5).unwrap();
        assert_eq!(check.residual, 0.0);
        assert!((check.lhs - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn identity_residual_is_rounding_noise() {
        let spec = IfsSpec::half_third();
        let check = stopping_sum_identity(&spec, 3.7, 8.0, 0.2, 0.9).unwrap();
        assert!(check.residual <= 1e-12, "residual {:e}", check.residual);
        let spec = IfsSpec::cantor_middle_thirds();
        let check = stopping_sum_identity(&spec, 1.0, 5.0, 0.0, 1.0).unwrap();
        assert!(check.residual <= 1e-12, "residual {:e}", check.residual);
    }

    #[test]
    fn double_sum_at_zero_frequency_is_mass() {
        let spec = IfsSpec::half_third();
        let est = double_sum_bound(&spec, 0.0, 4.0, 500, 3, 0).unwrap();
        assert!((est.real - 1.0).abs() <= 1e-12);
        assert!(est.imag.abs() <= 1e-12);
    }

    #[test]
    fn double_sum_dominates_squared_transform() {
        let spec = IfsSpec::half_third();
        let xi = 50.0;
        let est = double_sum_bound(&spec, xi, 6.0, 20_000, 7, 0).unwrap();
        let eval = fourier_recursive(&spec, xi, 1e-10).unwrap();
        assert!(
            eval.value.norm_sqr() <= est.real + 3.0 * est.real_se,
            "{} vs {} + 3*{}",
            eval.value.norm_sqr(),
            est.real,
            est.real_se
        );
        assert!(est.imag.abs() <= 4.0 * est.imag_se + 1e-12);
    }

    #[test]
    fn oscillation_integral_is_bounded_and_matches_single_atom_form() {
        let dist = crate::walk::ln2_ln3_law();
        for &s in &[0.0, 0.7, 13.0, 400.0] {
            assert!(oscillation_integral(&dist, s).norm() <= 1.0 + 1e-9);
        }
        // single atom: the integral reduces to one log-kernel piece on [1/2, 1]
        let single = StepDistribution::from_atoms(&[(std::f64::consts::LN_2, 1.0)]).unwrap();
        let s = 1.7;
        let got = oscillation_integral(&single, s);
        let omega = 2.0 * PI * s;
        let series = log_kernel_series(omega, 0.5, 1.0);
        assert!(
            (got - series / std::f64::consts::LN_2).norm() < 1e-9,
            "{got} vs {series}"
        );
        let s = 250.0;
        let got = oscillation_integral(&single, s);
        let omega = 2.0 * PI * s;
        let asymptotic = log_kernel_asymptotic(omega, 0.5, 1.0);
        assert!((got - asymptotic / std::f64::consts::LN_2).norm() < 1e-9);
    }

    /// Series oracle for `∫_a^b exp(-i*omega*u)/u du`, valid for small `omega*b`:
    /// `ln(b/a) + sum_{n>=1} (-i*omega)^n (b^n - a^n) / (n * n!)`.
    fn log_kernel_series(omega: f64, a: f64, b: f64) -> Complex64 {
        let mut acc = Complex64::new((b / a).ln(), 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        for n in 1..60 {
            pow *= Complex64::new(0.0, -omega) / n as f64;
            acc += pow * (b.powi(n) - a.powi(n)) / n as f64;
        }
        acc
    }

    /// Asymptotic oracle for the same integral, valid for large `omega*a`:
    /// integration by parts gives `sum_k (k!/(-i*omega)^{k+1}) e^{-i*omega*u}/u^{k+1}`
    /// evaluated between the endpoints.
    fn log_kernel_asymptotic(omega: f64, a: f64, b: f64) -> Complex64 {
        let endpoint = |u: f64| -> Complex64 {
            let phase = Complex64::from_polar(1.0, -omega * u);
            let mut term = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..10u32 {
                term /= Complex64::new(0.0, -omega) * u;
                acc += phase * term * factorial(k);
            }
            acc
        };
        endpoint(b) - endpoint(a)
    }

    fn factorial(k: u32) -> f64 {
        (1..=k).map(|j| j as f64).product()
    }

    #[test]
    fn power_ladder_is_flat_on_lattice() {
        let spec = IfsSpec::cantor_middle_thirds();
        let ladder = power_ladder(&spec, 3.0, 2..=6, 1e-10).unwrap();
        let values: Vec<f64> = ladder.iter().map(|&(_, v)| v).collect();
        let spread = values.iter().cloned().fold(f64::MIN, f64::max)
            - values.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-7, "{values:?}");
        assert!(values[0] > 0.05);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn hermitian_symmetry(xi in -200.0f64..200.0) {
            let spec = IfsSpec::half_third();
            let plus = fourier_recursive(&spec, xi, 1e-10).unwrap().value;
            let minus = fourier_recursive(&spec, -xi, 1e-10).unwrap().value;
            prop_assert!((plus - minus.conj()).norm() <= 1e-12);
        }

        #[test]
        fn modulus_never_exceeds_mass(xi in -5000.0f64..5000.0) {
            let spec = IfsSpec::cantor_middle_thirds();
            let eval = fourier_recursive(&spec, xi, 1e-9).unwrap();
            prop_assert!(eval.value.norm() <= 1.0 + eval.error_bound);
            prop_assert!(eval.error_bound <= 1e-9);
        }
    }
}
