//! Arithmetic classification of contraction ratios: continued fractions of
//! log-ratio quotients, lattice versus dense subgroup detection, numerical
//! diophantine-exponent estimates, and Pisot tests for contrast systems.
//!
//! Everything here runs at working precision. A double is a rational number,
//! so the Euclidean algorithm runs exactly on the value the double represents;
//! what is undecidable is whether that value stands in for an irrational. The
//! verdicts are therefore qualified by a convergent-denominator cap and an
//! explicit `Undetermined` escape.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::ifs::IfsSpec;
use crate::walk::StepDistribution;

/// Convergent denominators beyond this cannot be distinguished from
/// irrational behaviour in double precision.
pub const RATIONALITY_DENOMINATOR_CAP: i64 = 1_000_000;
/// `|x - p/q| <=` this flags `x` as rational at working precision.
pub const RATIONALITY_TOL: f64 = 1e-12;
/// Every convergent obeys `|x - p/q| < 1/q^2`; a rational hit must also beat
/// that generic law by this factor, otherwise the deep convergents of any
/// irrational would eventually clear an absolute tolerance on their own.
pub const RATIONALITY_SHARPNESS: f64 = 1e-3;
/// Lattice witnesses must reproduce every atom this closely.
pub const GENERATOR_TOL: f64 = 1e-10;
/// Reliability horizon for partial quotients extracted from a double.
pub const MAX_CF_TERMS: usize = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiophError {
    #[error("input is rational at working precision; no diophantine exponent")]
    RationalInput,
    #[error("polynomial must be monic with integer coefficients")]
    NonMonic,
    #[error("polynomial must have degree at least one")]
    DegreeZero,
}

/// Partial quotients and convergents of a positive real.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuedFractionExpansion {
    pub value: f64,
    /// Integer part `a_0 >= 0`.
    pub integer_part: i64,
    /// Partial quotients `a_1, a_2, ...`.
    pub quotients: Vec<i64>,
    /// Convergents `p_k / q_k` matching `quotients` term for term.
    pub convergents: Vec<(i64, i64)>,
    /// True when the expansion ended because the remainder dropped under
    /// [`RATIONALITY_TOL`]: rational at working precision.
    pub terminated: bool,
}

/// Exact Euclidean algorithm on the rational value the double represents.
///
/// Stops at `max_terms` (clamped to [`MAX_CF_TERMS`]), when the remainder
/// becomes negligible, or when convergents would overflow `i64`.
pub fn continued_fraction(x: f64, max_terms: usize) -> ContinuedFractionExpansion {
    assert!(x > 0.0 && x.is_finite(), "continued fractions need x > 0");
    let max_terms = max_terms.min(MAX_CF_TERMS);
    let (mut num, mut den) = dyadic_decompose(x);
    let integer_part = (num / den) as i64;
    num -= (integer_part as i128) * den;

    let mut quotients = Vec::new();
    let mut convergents = Vec::new();
    // p_{-1}/q_{-1} = 1/0, p_0/q_0 = a_0/1
    let (mut p_prev, mut q_prev): (i128, i128) = (1, 0);
    let (mut p_cur, mut q_cur): (i128, i128) = (integer_part as i128, 1);
    let mut terminated = num == 0;

    while quotients.len() < max_terms && num != 0 {
        if (num as f64) < RATIONALITY_TOL * den as f64 {
            terminated = true;
            break;
        }
        let a = den / num;
        let rem = den - a * num;
        den = num;
        num = rem;
        let p_next = a * p_cur + p_prev;
        let q_next = a * q_cur + q_prev;
        if p_next > i64::MAX as i128 || q_next > i64::MAX as i128 {
            break;
        }
        quotients.push(a as i64);
        convergents.push((p_next as i64, q_next as i64));
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        if num == 0 {
            terminated = true;
        }
    }
    ContinuedFractionExpansion {
        value: x,
        integer_part,
        quotients,
        convergents,
        terminated,
    }
}

/// Split a positive double into exact numerator/denominator with a power-of-two
/// denominator.
fn dyadic_decompose(x: f64) -> (i128, i128) {
    let mut y = x;
    let mut shift = 0u32;
    while y.fract() != 0.0 && shift < 120 {
        y *= 2.0;
        shift += 1;
    }
    (y as i128, 1i128 << shift)
}

/// Exact `|x - p/q|` using the dyadic representation of `x`.
fn exact_approx_error(x: f64, p: i64, q: i64) -> f64 {
    let (num, den) = dyadic_decompose(x);
    let lhs = num * q as i128;
    let rhs = p as i128 * den;
    (lhs - rhs).unsigned_abs() as f64 / (den as f64 * q as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupVerdict {
    Lattice,
    NonLattice,
    Undetermined,
}

/// Outcome of the lattice test on the additive group spanned by the step atoms.
#[derive(Debug, Clone, Serialize)]
pub struct GroupClassification {
    pub verdict: GroupVerdict,
    /// For a lattice verdict: a generator reproducing every atom within
    /// [`GENERATOR_TOL`].
    pub generator: Option<f64>,
    /// For a non-lattice verdict: indices (into the merged, sorted atoms) of
    /// a pair whose ratio resisted rational approximation through the tested
    /// depth.
    pub witness_pair: Option<(usize, usize)>,
}

/// Classify the subgroup generated by the log-contractions of a spec.
pub fn classify_group(spec: &IfsSpec, depth: usize) -> GroupClassification {
    classify_atoms(&StepDistribution::from_spec(spec), depth)
}

pub fn classify_atoms(dist: &StepDistribution, depth: usize) -> GroupClassification {
    let atoms: Vec<f64> = dist.atoms().iter().map(|a| a.log_step).collect();
    if atoms.len() == 1 {
        return GroupClassification {
            verdict: GroupVerdict::Lattice,
            generator: Some(atoms[0]),
            witness_pair: None,
        };
    }
    let mut all_rational = true;
    let mut undetermined = false;
    // ratios against the smallest atom are enough to build a generator, but
    // every pair is examined so a witness is the first genuinely resistant one
    for i in 0..atoms.len() {
        for j in (i + 1)..atoms.len() {
            match pair_status(atoms[j] / atoms[i], depth) {
                PairStatus::Rational(_) => {}
                PairStatus::Resistant => {
                    return GroupClassification {
                        verdict: GroupVerdict::NonLattice,
                        generator: None,
                        witness_pair: Some((i, j)),
                    };
                }
                PairStatus::Exhausted => {
                    all_rational = false;
                    undetermined = true;
                }
            }
        }
    }
    if all_rational {
        if let Some(g) = lattice_generator(&atoms, depth) {
            return GroupClassification {
                verdict: GroupVerdict::Lattice,
                generator: Some(g),
                witness_pair: None,
            };
        }
        undetermined = true;
    }
    debug_assert!(undetermined);
    GroupClassification {
        verdict: GroupVerdict::Undetermined,
        generator: None,
        witness_pair: None,
    }
}

enum PairStatus {
    /// Some convergent `p/q`, `q <=` cap, reproduces the ratio within tolerance.
    Rational((i64, i64)),
    /// Convergents passed the denominator cap without ever matching.
    Resistant,
    /// Expansion ran out of terms below the cap: precision exhausted.
    Exhausted,
}

fn pair_status(ratio: f64, depth: usize) -> PairStatus {
    let cf = continued_fraction(ratio, depth);
    // integer ratios have no convergents beyond a_0
    if cf.terminated && cf.quotients.is_empty() {
        return PairStatus::Rational((cf.integer_part, 1));
    }
    let mut passed_cap = false;
    for &(p, q) in &cf.convergents {
        if q > RATIONALITY_DENOMINATOR_CAP {
            passed_cap = true;
            break;
        }
        let err = exact_approx_error(ratio, p, q);
        if err <= RATIONALITY_TOL && err * (q as f64) * (q as f64) <= RATIONALITY_SHARPNESS {
            return PairStatus::Rational((p, q));
        }
    }
    if passed_cap {
        PairStatus::Resistant
    } else {
        PairStatus::Exhausted
    }
}

/// Build the lattice generator: write each atom as `n_k * g` for integers
/// `n_k`, refine by their gcd, and verify the witness reproduces every atom.
fn lattice_generator(atoms: &[f64], depth: usize) -> Option<f64> {
    let base = atoms[0];
    let mut denominators: Vec<i64> = vec![1];
    let mut numerators: Vec<i64> = vec![1];
    for &a in &atoms[1..] {
        match pair_status(a / base, depth) {
            PairStatus::Rational((p, q)) => {
                numerators.push(p);
                denominators.push(q);
            }
            _ => return None,
        }
    }
    let mut lcm: i128 = 1;
    for &q in &denominators {
        lcm = lcm / gcd(lcm, q as i128) * q as i128;
        if lcm > 1_000_000_000_000 {
            return None;
        }
    }
    let multiples: Vec<i128> = numerators
        .iter()
        .zip(&denominators)
        .map(|(&p, &q)| p as i128 * (lcm / q as i128))
        .collect();
    let g_count = multiples.iter().fold(0i128, |acc, &n| gcd(acc, n));
    let generator = base / lcm as f64 * g_count as f64;
    let fits = atoms.iter().all(|&a| {
        let n = (a / generator).round();
        (a - n * generator).abs() <= GENERATOR_TOL
    });
    fits.then_some(generator)
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Per-convergent approximation exponents of an irrational.
#[derive(Debug, Clone, Serialize)]
pub struct DiophExponentEstimate {
    /// Largest local exponent seen: a lower bound on the diophantine type,
    /// never a certificate.
    pub l_estimate: f64,
    /// `log(1 / |x - p_k/q_k|) / log q_k` per convergent with `q_k >= 2`.
    pub local_exponents: Vec<f64>,
}

pub fn diophantine_exponent_estimate(
    x: f64,
    depth: usize,
) -> Result<DiophExponentEstimate, DiophError> {
    let cf = continued_fraction(x, depth);
    if cf.terminated {
        return Err(DiophError::RationalInput);
    }
    let mut local_exponents = Vec::new();
    for &(p, q) in &cf.convergents {
        if q < 2 {
            continue;
        }
        let err = exact_approx_error(x, p, q);
        if err <= 0.0 {
            continue;
        }
        local_exponents.push(-err.ln() / (q as f64).ln());
    }
    if local_exponents.is_empty() {
        return Err(DiophError::RationalInput);
    }
    let l_estimate = local_exponents.iter().copied().fold(f64::MIN, f64::max);
    Ok(DiophExponentEstimate {
        l_estimate,
        local_exponents,
    })
}

/// Numerical Pisot test via companion-matrix eigenvalues.
#[derive(Debug, Clone)]
pub struct PisotReport {
    pub is_pisot: bool,
    /// All roots, sorted by decreasing modulus then real part.
    pub roots: Vec<Complex64>,
    /// The single real root `> 1`, when the verdict is positive.
    pub dominant: Option<f64>,
    /// Largest modulus among the non-dominant roots (0 for degree one).
    pub max_conjugate_modulus: f64,
}

/// Decide whether the monic integer polynomial (coefficients ascending,
/// constant term first, leading 1 last) has exactly one real root `> 1` with
/// all other roots of modulus `< 1 - tol`.
pub fn pisot_check(coefficients: &[i64], tol: f64) -> Result<PisotReport, DiophError> {
    if coefficients.len() < 2 {
        return Err(DiophError::DegreeZero);
    }
    if *coefficients.last().unwrap() != 1 {
        return Err(DiophError::NonMonic);
    }
    let degree = coefficients.len() - 1;
    let mut roots: Vec<Complex64> = if degree == 1 {
        vec![Complex64::new(-coefficients[0] as f64, 0.0)]
    } else {
        let companion = DMatrix::<f64>::from_fn(degree, degree, |r, c| {
            if c == degree - 1 {
                -(coefficients[r] as f64)
            } else if r == c + 1 {
                1.0
            } else {
                0.0
            }
        });
        companion.complex_eigenvalues().iter().copied().collect()
    };
    roots.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(b.re.total_cmp(&a.re))
            .then(a.im.total_cmp(&b.im))
    });
    let real_above_one: Vec<f64> = roots
        .iter()
        .filter(|z| z.im.abs() <= tol && z.re > 1.0)
        .map(|z| z.re)
        .collect();
    let dominant = (real_above_one.len() == 1).then(|| real_above_one[0]);
    let max_conjugate_modulus = match dominant {
        Some(d) => roots
            .iter()
            .filter(|z| !(z.im.abs() <= tol && (z.re - d).abs() <= tol))
            .map(|z| z.norm())
            .fold(0.0, f64::max),
        None => roots.iter().map(|z| z.norm()).fold(0.0, f64::max),
    };
    let is_pisot = dominant.is_some() && max_conjugate_modulus < 1.0 - tol;
    Ok(PisotReport {
        is_pisot,
        roots,
        dominant,
        max_conjugate_modulus,
    })
}
