//! The renewal operator, the crossing cutoff, and the joint residue law:
//! Monte Carlo against exact enumeration at small levels, and the drift
//! toward the renewal limits at large levels.
//!
//! Run with: `cargo run --example renewal_operator`

use rajchman::walk::{
    cutoff_mass, joint_residue_check, joint_residue_exact, ln2_ln3_law, renewal_operator_exact,
    renewal_operator_mc, renewal_window_exact,
};

fn window(x: f64) -> f64 {
    f64::from(u8::from((0.0..=1.0).contains(&x)))
}

fn main() {
    let dist = ln2_ln3_law();
    let sigma = dist.mean();

    println!("R(1_[0,1])(t): Monte Carlo vs exact path enumeration (small t):");
    println!("  {:>5} {:>12} {:>12} {:>10}", "t", "exact", "mc (1e5)", "|diff|/se");
    for &t in &[-0.5, 1.0, 3.0, 6.0] {
        let exact = renewal_operator_exact(&dist, window, (0.0, 1.0), t, 1 << 22).unwrap();
        let mc = renewal_operator_mc(&dist, window, (0.0, 1.0), t, 100_000, 5, 0);
        println!(
            "  {:>5} {:>12.6} {:>12.6} {:>10.2}",
            t,
            exact,
            mc.value,
            (mc.value - exact).abs() / mc.std_error.max(1e-12)
        );
    }

    println!("\napproach to the key renewal limit 1/sigma = {:.6}:", 1.0 / sigma);
    println!("  {:>6} {:>14} {:>12}", "t", "exact window", "gap");
    for &t in &[10.0, 40.0, 160.0, 640.0, 2560.0] {
        let exact = renewal_window_exact(&dist, 1.0, t, 1 << 28).unwrap();
        println!("  {t:>6} {exact:>14.6} {:>12.2e}", (exact - 1.0 / sigma).abs());
    }

    println!("\ncrossing cutoff mass (one crossing per trajectory, so exactly 1):");
    for &t in &[1.0, 5.0, 30.0] {
        let est = cutoff_mass(&dist, t, 100_000, 2, 0);
        println!(
            "  t = {t:>4}: mean {} with standard error {}",
            est.value, est.std_error
        );
    }

    println!("\njoint law of (crossing step, position before): t = 12, N = 2e5");
    let ln3 = 3.0f64.ln();
    let functionals: Vec<(&str, Box<dyn Fn(f64, f64) -> f64 + Sync>)> = vec![
        ("total mass", Box::new(|_, _| 1.0)),
        ("crossing step is ln 3", Box::new(move |y, _| f64::from(u8::from(y == ln3)))),
        ("overshoot y + x", Box::new(|y, x| y + x)),
    ];
    println!("  {:>22} {:>11} {:>11} {:>11}", "functional", "mc", "exact", "limit");
    for (name, f) in functionals {
        let check = joint_residue_check(&dist, &f, 12.0, 200_000, 11, 0);
        let exact = joint_residue_exact(&dist, 12.0, 1 << 24, &f).unwrap();
        println!(
            "  {:>22} {:>11.6} {:>11.6} {:>11.6}",
            name, check.estimate.value, exact, check.limit
        );
    }
    println!("  (the size-biased crossing step: longer steps cross more often)");
}
