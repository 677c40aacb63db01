//! Transform evaluation with certified truncation bounds, cross-checked
//! against two independent oracles: the infinite-product form (equal-ratio
//! systems) and plain Monte Carlo sampling.
//!
//! Run with: `cargo run --example certified_fourier`

use rajchman::ifs::IfsSpec;
use rajchman::spectral::{
    depth_for_bias, fourier_mc, fourier_product_equal_ratio, fourier_recursive,
};

fn main() {
    let cantor = IfsSpec::cantor_middle_thirds();
    let uniform = IfsSpec::uniform_halves();

    println!("middle-thirds Cantor measure:");
    println!(
        "  {:>8} {:>24} {:>12} {:>14} {:>12}",
        "xi", "value", "|value|", "certified err", "vs product"
    );
    for &xi in &[0.0, 1.0, 10.0, 100.0, 1000.0] {
        let eval = fourier_recursive(&cantor, xi, 1e-10).unwrap();
        let product = fourier_product_equal_ratio(&cantor, xi, 48).unwrap();
        println!(
            "  {:>8} {:>24} {:>12.6} {:>14.2e} {:>12.2e}",
            xi,
            format!("{:.6}{:+.6}i", eval.value.re, eval.value.im),
            eval.value.norm(),
            eval.error_bound,
            (eval.value - product).norm()
        );
    }

    println!("\nLebesgue measure on [0,1] (transform is e^(-pi i xi) sinc(pi xi)):");
    for &xi in &[0.5, 1.0, 2.5, 5.0] {
        let eval = fourier_recursive(&uniform, xi, 1e-12).unwrap();
        let exact = if xi == 0.0 {
            1.0
        } else {
            ((std::f64::consts::PI * xi).sin() / (std::f64::consts::PI * xi)).abs()
        };
        println!(
            "  xi = {xi:>4}: |value| = {:.10}  exact {:.10}  diff {:.2e}",
            eval.value.norm(),
            exact,
            (eval.value.norm() - exact).abs()
        );
    }

    println!("\nMonte Carlo cross-check (N = 200k):");
    for (name, spec) in [("cantor", &cantor), ("uniform", &uniform)] {
        let xi = 7.0;
        let depth = depth_for_bias(spec, 1e-12);
        let (mc, se) = fourier_mc(spec, xi, 200_000, depth, 42, 0);
        let eval = fourier_recursive(spec, xi, 1e-10).unwrap();
        println!(
            "  {name:8} xi = {xi}: |mc - certified| = {:.2e}  ({:.1} standard errors)",
            (mc - eval.value).norm(),
            (mc - eval.value).norm() / se
        );
    }
}
