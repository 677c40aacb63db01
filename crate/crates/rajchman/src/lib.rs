//! A numerical laboratory for the Fourier side of self-similar measures.
//!
//! The crate builds self-similar measures from iterated-function-system
//! specifications, evaluates their Fourier transforms at high frequency with
//! certified truncation bounds, and verifies the renewal-theoretic mechanism
//! behind the decay: prefix-free stopping word sets, overshoot limit laws of
//! the associated positive random walk, and diophantine diagnostics of the
//! log-contraction ratios. Exact small-scale oracles back every Monte Carlo
//! estimator.
//!
//! ## Modules
//!
//! - [`ifs`] — validated systems of similitudes, word composition, the
//!   stopping sets `W_t`, exact moments, JSON spec files.
//! - [`walk`] — the step law `sum_j p_j δ(-ln r_j)`, stopped trajectories,
//!   overshoot limit laws (with an exact finite-level oracle), renewal and
//!   cutoff operators, Laplace-transform diagnostics.
//! - [`spectral`] — certified transform evaluation, product and Monte Carlo
//!   oracles, frequency-band decay scans with a logarithmic-rate fit, the
//!   stopping-set phase identity, the pair-averaged phase-sum bound, and the
//!   oscillation integral.
//! - [`dioph`] — continued fractions, lattice/non-lattice classification,
//!   approximation exponents, Pisot tests.
//! - [`regularity`] — measure sampling, correlation-exponent fits, pair
//!   masses of diagonal strips.
//! - [`cli`] — the `rajchman` binary: `validate` and `run {moments, fourier,
//!   scan, fit, renewal, identity, dioph, holder, corr}` with reproducible
//!   manifests.
//! - [`mc`], [`numeric`] — deterministic batched Monte Carlo and shared
//!   numerics (compensated sums, quadrature, line fits).
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --example validate_ifs        # spec validation and normalization
//! cargo run --example stopping_words      # the prefix-free sets W_t
//! cargo run --example certified_fourier   # transform values with error bounds
//! cargo run --example decay_scan          # lattice non-decay vs slow decay
//! cargo run --example overshoot_limit_law # stopped-walk overshoots vs limit
//! cargo run --example renewal_operator    # renewal/cutoff operators + oracles
//! cargo run --example dioph_diagnostics   # group classification, Pisot tests
//! cargo run --example holder_regularity   # correlation exponents, pair masses
//! cargo run --example oscillation_decay   # the 1/s oscillation mechanism
//! cargo run --example phase_sum_bound     # pair-averaged phase-sum bound
//! ```
//!
//! ## Determinism
//!
//! Every randomized routine takes a master seed and a worker count. Work is
//! split into fixed-size batches, each on its own counter-derived ChaCha
//! stream, and reduced in batch order, so results are byte-identical for any
//! worker count.

pub mod cli;
pub mod dioph;
pub mod ifs;
pub mod mc;
pub mod numeric;
pub mod regularity;
pub mod spectral;
pub mod walk;

pub use ifs::{CompositeMap, IfsSpec, MomentVector, SimilitudeMap, StoppingWordSet, Word};
pub use spectral::{DecayFit, FourierEvaluation, SpectrumScan};
pub use walk::{LimitOvershootLaw, ResidueSample, StepDistribution};
