//! Arithmetic diagnostics: lattice vs dense log-ratio groups, continued
//! fractions and approximation exponents, the weighted Laplace-defect scan,
//! and Pisot classification of polynomials.
//!
//! Run with: `cargo run --example dioph_diagnostics`

use rajchman::dioph::{
    classify_group, continued_fraction, diophantine_exponent_estimate, pisot_check,
};
use rajchman::ifs::IfsSpec;
use rajchman::walk::{weakly_dioph_scan, StepDistribution};

fn main() {
    println!("== group classification of log-contraction ratios ==");
    let systems = [
        ("cantor {1/3, 1/3}", IfsSpec::cantor_middle_thirds()),
        ("lattice {1/2, 1/4}", IfsSpec::validate(&[(0.5, 0.0, 0.5), (0.25, 0.5, 0.5)]).unwrap()),
        ("half/third {1/2, 1/3}", IfsSpec::half_third()),
    ];
    for (name, spec) in &systems {
        let got = classify_group(spec, 30);
        println!(
            "  {name:24} -> {:?}  generator {:?}  witness {:?}",
            got.verdict, got.generator, got.witness_pair
        );
    }

    println!("\n== continued fraction of ln 2 / ln 3 ==");
    let x = std::f64::consts::LN_2 / 3.0f64.ln();
    let cf = continued_fraction(x, 14);
    println!("  quotients: {:?}", cf.quotients);
    println!("  convergents:");
    for &(p, q) in cf.convergents.iter().take(8) {
        println!("    {p:>6}/{q:<6} error {:.3e}", (x - p as f64 / q as f64).abs());
    }
    let est = diophantine_exponent_estimate(x, 20).unwrap();
    println!("  local approximation exponents: {:?}", &est.local_exponents[..6]);
    println!("  type lower bound (working precision): {:.3}", est.l_estimate);

    println!("\n== weighted Laplace defect b^l |1 - L(ib)|, b in [1, 10], l = 1 ==");
    for (name, spec) in &systems {
        let dist = StepDistribution::from_spec(spec);
        let scan = weakly_dioph_scan(&dist, 1.0, 10.0, 1e-3);
        println!("  {name:24} min {:.3e} at b = {:.6}", scan.minimum, scan.argmin);
    }
    println!("  (a vanishing minimum is a lattice resonance; 2 pi / ln 2 = {:.6})",
        2.0 * std::f64::consts::PI / std::f64::consts::LN_2);

    println!("\n== Pisot tests (coefficients ascending, monic) ==");
    let polys: Vec<(&str, Vec<i64>)> = vec![
        ("x^2 - x - 1 (golden ratio)", vec![-1, -1, 1]),
        ("x - 3", vec![-3, 1]),
        ("x^2 - 3x + 1", vec![1, -3, 1]),
        ("x^2 - x - 3", vec![-3, -1, 1]),
        ("x^3 - x - 1 (plastic ratio)", vec![-1, -1, 0, 1]),
    ];
    for (name, coeffs) in polys {
        let report = pisot_check(&coeffs, 1e-9).unwrap();
        println!(
            "  {name:28} pisot: {:5}  dominant {:?}  max conjugate modulus {:.4}",
            report.is_pisot, report.dominant, report.max_conjugate_modulus
        );
    }
}
