//! Iterated function systems of contracting similitudes on the real line.
//!
//! An [`IfsSpec`] is a validated list of maps `f_j(x) = r_j x + b_j` with
//! probability weights `p_j`. It carries the word calculus used everywhere
//! else in the crate: composing words into affine maps, enumerating the
//! prefix-free stopping set `W_t` of shortest words whose contraction falls
//! to `exp(-t)` or below, and the exact moment recursion of the associated
//! self-similar measure.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::KahanSum;

/// Absolute tolerance for weight-sum and mass-conservation checks.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Absolute tolerance under which all map fixed points count as one point.
pub const SINGLETON_TOL: f64 = 1e-12;
/// Default ceiling on the estimated stopping-word count before enumeration
/// refuses to run. `W_t` grows exponentially in `t`; the cap keeps the bound
/// exact instead of silently truncating.
pub const DEFAULT_WORD_CAP: f64 = 5e7;

const HULL_MAX_ITERS: usize = 50;
const HULL_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IfsError {
    #[error("an iterated function system needs at least two maps, got {0}")]
    TooFewMaps(usize),
    #[error("map {index}: contraction ratio {ratio} is outside (0, 1)")]
    RatioRange { index: usize, ratio: f64 },
    #[error("map {index}: weight {weight} is outside (0, 1)")]
    WeightRange { index: usize, weight: f64 },
    #[error("weights sum to {sum}, expected 1 within {WEIGHT_SUM_TOL:e}")]
    WeightSum { sum: f64 },
    #[error("all fixed points coincide; the attractor would be a single point")]
    Singleton,
    #[error("map {index}: non-finite coefficient")]
    NonFinite { index: usize },
    #[error("the empty word does not define a composite map")]
    EmptyWord,
    #[error("letter {letter} out of range for an alphabet of {alphabet} maps")]
    LetterOutOfRange { letter: usize, alphabet: usize },
    #[error("estimated stopping-word count {estimated:.3e} exceeds the cap {cap:.3e}")]
    Explosion { estimated: f64, cap: f64 },
}

/// One similitude `x -> ratio * x + translation` with a probability weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilitudeMap {
    pub ratio: f64,
    pub translation: f64,
    pub weight: f64,
}

impl SimilitudeMap {
    pub fn apply(&self, x: f64) -> f64 {
        self.ratio * x + self.translation
    }

    /// The unique fixed point `translation / (1 - ratio)`.
    pub fn fixed_point(&self) -> f64 {
        self.translation / (1.0 - self.ratio)
    }
}

/// A finite word over the map alphabet, stored as map indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_proper_prefix_of(&self, other: &Word) -> bool {
        self.len() < other.len() && other.0[..self.len()] == self.0[..]
    }
}

/// The affine data of a composed word: `f_w(x) = ratio * x + translation`,
/// with `weight` the product of the letter weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeMap {
    pub ratio: f64,
    pub translation: f64,
    pub weight: f64,
}

impl CompositeMap {
    pub const IDENTITY: CompositeMap = CompositeMap {
        ratio: 1.0,
        translation: 0.0,
        weight: 1.0,
    };

    pub fn apply(&self, x: f64) -> f64 {
        self.ratio * x + self.translation
    }

    /// Extend on the right: `self . f` represents `f_self ∘ f`.
    pub fn then(&self, f: &SimilitudeMap) -> CompositeMap {
        CompositeMap {
            ratio: self.ratio * f.ratio,
            translation: self.ratio * f.translation + self.translation,
            weight: self.weight * f.weight,
        }
    }

    /// Composition of two already-composed words: `self ∘ other`.
    pub fn compose(&self, other: &CompositeMap) -> CompositeMap {
        CompositeMap {
            ratio: self.ratio * other.ratio,
            translation: self.ratio * other.translation + self.translation,
            weight: self.weight * other.weight,
        }
    }
}

/// The prefix-free set `W_t`: shortest words whose contraction is `<= exp(-t)`.
#[derive(Debug, Clone)]
pub struct StoppingWordSet {
    pub threshold: f64,
    pub entries: Vec<(Word, CompositeMap)>,
}

impl StoppingWordSet {
    /// Compensated sum of the entry weights; must be 1 within [`WEIGHT_SUM_TOL`].
    pub fn total_weight(&self) -> f64 {
        let mut acc = KahanSum::new();
        for (_, c) in &self.entries {
            acc.add(c.weight);
        }
        acc.value()
    }

    /// Exact prefix-freeness check.
    ///
    /// Depth-first enumeration emits words in lexicographic order, and in
    /// that order a prefix violation must appear between neighbours, so the
    /// adjacent scan is complete (a quadratic pairwise check agrees on small
    /// sets; see the tests).
    pub fn is_prefix_free(&self) -> bool {
        self.entries
            .windows(2)
            .all(|pair| !pair[0].0.is_proper_prefix_of(&pair[1].0))
    }

    /// True when every ratio sits in `(r_min * exp(-t), exp(-t)]`.
    pub fn ratios_bracketed(&self, r_min: f64) -> bool {
        let hi = (-self.threshold).exp();
        let lo = r_min * hi;
        self.entries
            .iter()
            .all(|(_, c)| c.ratio > lo && c.ratio <= hi)
    }
}

/// Moments `m_k` of the self-similar measure, `values[k] = ∫ x^k dμ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub values: Vec<f64>,
}

/// A validated iterated function system.
///
/// Construction goes through [`IfsSpec::validate`], so every instance has at
/// least two maps, ratios and weights in `(0, 1)`, weights summing to one,
/// and a non-degenerate attractor. Instances are immutable and cheap to
/// clone; all operations are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsSpec {
    maps: Vec<SimilitudeMap>,
    normalized: bool,
    hull: (f64, f64),
}

impl IfsSpec {
    /// Validate raw `(ratio, translation, weight)` triples into a spec.
    ///
    /// Does not normalize; the `normalized` flag records whether the
    /// attractor hull already sits inside `[0, 1]`.
    pub fn validate(raw: &[(f64, f64, f64)]) -> Result<IfsSpec, IfsError> {
        if raw.len() < 2 {
            return Err(IfsError::TooFewMaps(raw.len()));
        }
        for (index, &(r, b, p)) in raw.iter().enumerate() {
            if !(r.is_finite() && b.is_finite() && p.is_finite()) {
                return Err(IfsError::NonFinite { index });
            }
            if !(r > 0.0 && r < 1.0) {
                return Err(IfsError::RatioRange { index, ratio: r });
            }
            if !(p > 0.0 && p < 1.0) {
                return Err(IfsError::WeightRange { index, weight: p });
            }
        }
        let mut sum = KahanSum::new();
        for &(_, _, p) in raw {
            sum.add(p);
        }
        let sum = sum.value();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(IfsError::WeightSum { sum });
        }
        let maps: Vec<SimilitudeMap> = raw
            .iter()
            .map(|&(ratio, translation, weight)| SimilitudeMap {
                ratio,
                translation,
                weight,
            })
            .collect();
        let fixed: Vec<f64> = maps.iter().map(SimilitudeMap::fixed_point).collect();
        let spread = fixed.iter().fold(f64::NEG_INFINITY, |a, &x| a.max(x))
            - fixed.iter().fold(f64::INFINITY, |a, &x| a.min(x));
        if spread <= SINGLETON_TOL {
            return Err(IfsError::Singleton);
        }
        let hull = attractor_hull(&maps);
        let normalized = hull.0 >= -WEIGHT_SUM_TOL && hull.1 <= 1.0 + WEIGHT_SUM_TOL;
        Ok(IfsSpec {
            maps,
            normalized,
            hull,
        })
    }

    /// Affinely conjugate the system so its attractor hull lands in `[0, 1]`.
    /// Ratios and weights are unchanged; only translations move. A spec whose
    /// hull already sits inside the unit interval is returned as-is.
    pub fn normalize_to_unit(&self) -> IfsSpec {
        if self.normalized {
            return self.clone();
        }
        let (a, b) = self.hull;
        let width = b - a;
        let maps: Vec<SimilitudeMap> = self
            .maps
            .iter()
            .map(|m| SimilitudeMap {
                ratio: m.ratio,
                translation: (m.ratio * a + m.translation - a) / width,
                weight: m.weight,
            })
            .collect();
        let hull = attractor_hull(&maps);
        IfsSpec {
            maps,
            normalized: true,
            hull,
        }
    }

    pub fn maps(&self) -> &[SimilitudeMap] {
        &self.maps
    }

    pub fn alphabet_len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Attractor hull `[min, max]` (the extreme map fixed points, polished by
    /// iterating the endpoint maps).
    pub fn hull(&self) -> (f64, f64) {
        self.hull
    }

    pub fn hull_width(&self) -> f64 {
        self.hull.1 - self.hull.0
    }

    pub fn r_min(&self) -> f64 {
        self.maps.iter().map(|m| m.ratio).fold(f64::INFINITY, f64::min)
    }

    pub fn r_max(&self) -> f64 {
        self.maps
            .iter()
            .map(|m| m.ratio)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Left-to-right composition of a word: appending a letter `j` maps
    /// `(r, b) -> (r * r_j, r * b_j + b)`.
    pub fn compose(&self, word: &Word) -> Result<CompositeMap, IfsError> {
        if word.is_empty() {
            return Err(IfsError::EmptyWord);
        }
        let mut acc = CompositeMap::IDENTITY;
        for &letter in word.letters() {
            let map = self
                .maps
                .get(letter)
                .ok_or(IfsError::LetterOutOfRange {
                    letter,
                    alphabet: self.maps.len(),
                })?;
            acc = acc.then(map);
        }
        Ok(acc)
    }

    /// The exponent `s` solving `sum_j r_j^s = 1` (similarity dimension of
    /// the ratio list, ignoring overlaps). Used only to bound word counts.
    pub fn similarity_dimension(&self) -> f64 {
        let total = |s: f64| -> f64 { self.maps.iter().map(|m| m.ratio.powf(s)).sum() };
        let mut lo = 0.0;
        let mut hi = 1.0;
        while total(hi) > 1.0 {
            hi *= 2.0;
            if hi > 1e6 {
                return hi;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Upper bound on `|W_t|`: the leaf weights `r_w^s` sum to one over any
    /// prefix-free cut, and every leaf ratio exceeds `r_min * exp(-t)`.
    pub fn estimated_stopping_count(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.maps.len() as f64;
        }
        let s = self.similarity_dimension();
        ((t - self.r_min().ln()) * s).exp()
    }

    /// Stream the leaves of `W_t` without materializing words.
    ///
    /// The walk stops a branch at the first word with `r_w <= exp(-t)`
    /// (ties stop); the root itself never stops, so for `t <= 0` every
    /// single-letter word is a leaf.
    pub fn for_each_stopping_leaf<F>(&self, t: f64, cap: f64, mut leaf: F) -> Result<(), IfsError>
    where
        F: FnMut(&CompositeMap),
    {
        let estimated = self.estimated_stopping_count(t);
        if estimated > cap {
            return Err(IfsError::Explosion { estimated, cap });
        }
        let threshold = (-t).exp();
        self.walk_leaves(&CompositeMap::IDENTITY, threshold, &mut |_, c| leaf(c), &mut Vec::new());
        Ok(())
    }

    fn walk_leaves<F>(
        &self,
        node: &CompositeMap,
        threshold: f64,
        leaf: &mut F,
        letters: &mut Vec<usize>,
    ) where
        F: FnMut(&[usize], &CompositeMap),
    {
        for (j, map) in self.maps.iter().enumerate() {
            let child = node.then(map);
            letters.push(j);
            if child.ratio <= threshold {
                leaf(letters, &child);
            } else {
                self.walk_leaves(&child, threshold, leaf, letters);
            }
            letters.pop();
        }
    }

    /// Enumerate the stopping set `W_t` depth-first in letter order.
    pub fn stopping_words(&self, t: f64) -> Result<StoppingWordSet, IfsError> {
        self.stopping_words_capped(t, DEFAULT_WORD_CAP)
    }

    pub fn stopping_words_capped(&self, t: f64, cap: f64) -> Result<StoppingWordSet, IfsError> {
        let estimated = self.estimated_stopping_count(t);
        if estimated > cap {
            return Err(IfsError::Explosion { estimated, cap });
        }
        let threshold = (-t).exp();
        let mut entries = Vec::new();
        self.walk_leaves(
            &CompositeMap::IDENTITY,
            threshold,
            &mut |letters, composite| entries.push((Word(letters.to_vec()), *composite)),
            &mut Vec::new(),
        );
        Ok(StoppingWordSet {
            threshold: t,
            entries,
        })
    }

    /// Moments of the self-similar measure via the self-similarity recursion
    ///
    /// `m_k (1 - sum_j p_j r_j^k) = sum_j p_j sum_{i<k} C(k,i) r_j^i b_j^{k-i} m_i`
    ///
    /// The denominator is at least `1 - r_max > 0` for `k >= 1`. Bounds like
    /// `0 <= m_k <= 1` hold once the spec is normalized.
    pub fn moments(&self, k_max: usize) -> MomentVector {
        let mut values = Vec::with_capacity(k_max + 1);
        values.push(1.0);
        // Pascal's triangle row, rebuilt in place per k.
        let mut binom = vec![1.0f64];
        for k in 1..=k_max {
            binom.push(1.0);
            for i in (1..k).rev() {
                binom[i] += binom[i - 1];
            }
            let mut rhs = KahanSum::new();
            for m in &self.maps {
                let mut r_pow = 1.0;
                for (i, value) in values.iter().enumerate().take(k) {
                    rhs.add(m.weight * binom[i] * r_pow * m.translation.powi((k - i) as i32) * value);
                    r_pow *= m.ratio;
                }
            }
            let denom: f64 = 1.0 - self.maps.iter().map(|m| m.weight * m.ratio.powi(k as i32)).sum::<f64>();
            values.push(rhs.value() / denom);
        }
        MomentVector { values }
    }

    // ---- canonical fixture systems -------------------------------------

    /// Middle-thirds Cantor measure: `{(1/3, 0), (1/3, 2/3)}`, equal weights.
    pub fn cantor_middle_thirds() -> IfsSpec {
        IfsSpec::validate(&[(1.0 / 3.0, 0.0, 0.5), (1.0 / 3.0, 2.0 / 3.0, 0.5)])
            .expect("fixture is valid")
    }

    /// `{(1/2, 0), (1/2, 1/2)}` with equal weights: Lebesgue measure on `[0,1]`.
    pub fn uniform_halves() -> IfsSpec {
        IfsSpec::validate(&[(0.5, 0.0, 0.5), (0.5, 0.5, 0.5)]).expect("fixture is valid")
    }

    /// The two-ratio system `{(1/2, 0), (1/3, 2/3)}` with equal weights.
    /// Its log-contractions `ln 2`, `ln 3` generate a dense subgroup.
    pub fn half_third() -> IfsSpec {
        IfsSpec::validate(&[(0.5, 0.0, 0.5), (1.0 / 3.0, 2.0 / 3.0, 0.5)])
            .expect("fixture is valid")
    }

    // ---- JSON spec files -------------------------------------------------

    pub fn from_json_str(text: &str) -> Result<IfsSpec, SpecFileError> {
        let file: SpecFile = serde_json::from_str(text)?;
        let raw: Vec<(f64, f64, f64)> = file.maps.iter().map(|m| (m.r, m.b, m.p)).collect();
        Ok(IfsSpec::validate(&raw)?)
    }

    pub fn to_json_string(&self) -> String {
        let file = SpecFile {
            maps: self
                .maps
                .iter()
                .map(|m| SpecFileMap {
                    r: m.ratio,
                    b: m.translation,
                    p: m.weight,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("spec serializes")
    }
}

/// Wire schema for spec files: `{"maps": [{"r": .., "b": .., "p": ..}, ..]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct SpecFile {
    pub maps: Vec<SpecFileMap>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpecFileMap {
    pub r: f64,
    pub b: f64,
    pub p: f64,
}

#[derive(Debug, Error)]
pub enum SpecFileError {
    #[error("spec file is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] IfsError),
}

/// Hull endpoints of the attractor.
///
/// The minimum solves `A = min_j f_j(A)` and the maximum `B = max_j f_j(B)`;
/// both are fixed points of single maps, so the extreme map fixed points are
/// the exact answer. They seed the contraction iteration, which then merely
/// polishes to tolerance regardless of how close `r_max` is to one.
fn attractor_hull(maps: &[SimilitudeMap]) -> (f64, f64) {
    let mut a = maps
        .iter()
        .map(SimilitudeMap::fixed_point)
        .fold(f64::INFINITY, f64::min);
    let mut b = maps
        .iter()
        .map(SimilitudeMap::fixed_point)
        .fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..HULL_MAX_ITERS {
        let next_a = maps.iter().map(|m| m.apply(a)).fold(f64::INFINITY, f64::min);
        let next_b = maps
            .iter()
            .map(|m| m.apply(b))
            .fold(f64::NEG_INFINITY, f64::max);
        let moved = (next_a - a).abs().max((next_b - b).abs());
        a = next_a;
        b = next_b;
        if moved <= HULL_TOL {
            break;
        }
    }
    (a, b)
}
