//! The oscillation integral of the overshoot limit law and its 1/s decay:
//! the high-frequency mechanism behind the transform's logarithmic decay.
//!
//! Run with: `cargo run --example oscillation_decay`

use rajchman::numeric::fit_line;
use rajchman::spectral::{oscillation_integral, stopping_sum_identity};
use rajchman::walk::ln2_ln3_law;

fn main() {
    let dist = ln2_ln3_law();

    println!("|oscillation integral(s)| for the ln2/ln3 step law:");
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    println!("  {:>10} {:>16}", "s", "|I(s)|");
    for &s in &[1.0, 10.0, 100.0, 1000.0, 10_000.0] {
        let v = oscillation_integral(&dist, s).norm();
        println!("  {s:>10} {v:>16.10}");
        if s >= 100.0 {
            xs.push(s.ln());
            ys.push(v.ln());
        }
    }
    let fit = fit_line(&xs, &ys);
    println!("  log-log slope over s >= 100: {:.5} (oscillation gives 1/s)", fit.slope);

    println!("\nstopping-set phase identity (two evaluation routes, one number):");
    let spec = rajchman::ifs::IfsSpec::half_third();
    for (s, t, x, y) in [(3.7, 8.0, 0.2, 0.9), (1.0, 5.0, 0.0, 1.0), (-6.2, 10.0, 0.33, 0.87)] {
        let check = stopping_sum_identity(&spec, s, t, x, y).unwrap();
        println!(
            "  s = {s:>5}, t = {t:>4}, (x, y) = ({x}, {y}): residual {:.3e}",
            check.residual
        );
    }
    println!("  (the identity rewrites the phase sum in walk coordinates; the");
    println!("   residual is pure floating-point rounding)");
}
