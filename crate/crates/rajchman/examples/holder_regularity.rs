//! Regularity of the measure: correlation-exponent fits for ball masses and
//! the pair mass of the diagonal strip.
//!
//! Run with: `cargo run --example holder_regularity`

use rajchman::ifs::IfsSpec;
use rajchman::regularity::{correlation_mass, holder_exponent_fit, holder_mass_curve};

fn main() {
    let radii: Vec<f64> = (1..=6).map(|k| 3.0f64.powi(-k)).collect();

    for (name, spec, reference) in [
        ("Lebesgue on [0,1]", IfsSpec::uniform_halves(), 1.0),
        ("middle-thirds Cantor", IfsSpec::cantor_middle_thirds(), std::f64::consts::LN_2 / 3.0f64.ln()),
    ] {
        println!("== {name} ==");
        let curve = holder_mass_curve(&spec, &radii, 200_000, 4, 0);
        println!("  {:>12} {:>14} {:>12}", "radius", "pair mass", "block se");
        for p in &curve {
            println!("  {:>12.6} {:>14.6e} {:>12.2e}", p.radius, p.mass_estimate, p.se);
        }
        let fit = holder_exponent_fit(&spec, &radii, 200_000, 4, 0);
        println!(
            "  correlation exponent alpha = {:.4} (reference {reference:.4}), C = {:.3}, residual {:.3}",
            fit.alpha, fit.c_constant, fit.residual
        );
    }

    println!("== diagonal strip mass ==");
    let uniform = IfsSpec::uniform_halves();
    println!("  Lebesgue: P(|x - y| <= d) = 2d - d^2 exactly");
    for &delta in &[0.05, 0.1, 0.2] {
        let est = correlation_mass(&uniform, delta, 400_000, 9, 0);
        let exact = 2.0 * delta - delta * delta;
        println!(
            "  delta = {delta:>4}: estimate {:.5} +- {:.5}, exact {exact:.5}",
            est.value, est.std_error
        );
    }
    let cantor = IfsSpec::cantor_middle_thirds();
    let est = correlation_mass(&cantor, 0.4, 400_000, 9, 0);
    println!(
        "  Cantor, delta = 0.4: estimate {:.5} +- {:.5} (strictly below 1: the gap)",
        est.value, est.std_error
    );
}
