//! Shared support for the integration suites: seeded random fixture systems
//! and a one-line-per-criterion reporter.

use rajchman::ifs::IfsSpec;
use rajchman::mc::stream_rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random valid system with 2 or 3 maps.
///
/// Ratios stay small enough that the similarity dimension is below ~0.95,
/// keeping stopping sets at level 10 around 1e5 words.
pub fn random_spec(rng: &mut ChaCha8Rng) -> IfsSpec {
    loop {
        let m = if rng.gen::<bool>() { 2 } else { 3 };
        let hi = match m {
            2 => 0.465,
            _ => 0.31,
        };
        let raw_weights: Vec<f64> = (0..m).map(|_| rng.gen_range(0.2..1.0)).collect();
        let total: f64 = raw_weights.iter().sum();
        let raw: Vec<(f64, f64, f64)> = raw_weights
            .iter()
            .map(|&w| {
                (
                    rng.gen_range(0.15..hi),
                    rng.gen_range(0.0..1.0),
                    w / total,
                )
            })
            .collect();
        if let Ok(spec) = IfsSpec::validate(&raw) {
            if spec.hull_width() > 1e-3 {
                return spec;
            }
        }
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, 0)
}

/// Collects named clause results for one acceptance criterion and prints a
/// single PASS/FAIL line before asserting them all.
pub struct Criterion {
    name: &'static str,
    failures: Vec<String>,
    clauses: usize,
}

impl Criterion {
    pub fn new(name: &'static str) -> Criterion {
        Criterion {
            name,
            failures: Vec::new(),
            clauses: 0,
        }
    }

    pub fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.clauses += 1;
        if !ok {
            self.failures.push(label.into());
        }
    }

    pub fn finish(self) {
        if self.failures.is_empty() {
            println!("acceptance {}: PASS ({} clauses)", self.name, self.clauses);
        } else {
            println!(
                "acceptance {}: FAIL ({}/{} clauses failed)",
                self.name,
                self.failures.len(),
                self.clauses
            );
            for f in &self.failures {
                println!("    failed: {f}");
            }
            panic!(
                "criterion {} failed clauses: {:?}",
                self.name, self.failures
            );
        }
    }
}
