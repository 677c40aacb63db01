//! High-frequency decay scans: a system with incommensurable log-ratios
//! decays (logarithmically slowly), while the lattice Cantor system does not
//! decay at all along its resonant frequency ladder.
//!
//! Run with: `cargo run --example decay_scan`

use rajchman::ifs::IfsSpec;
use rajchman::spectral::{fit_log_decay, power_ladder, spectrum_scan, ScanParams};

fn main() {
    println!("== non-decay on the lattice: Cantor at xi = 3^k ==");
    let cantor = IfsSpec::cantor_middle_thirds();
    let ladder = power_ladder(&cantor, 3.0, 1..=12, 1e-10).unwrap();
    for &(xi, v) in &ladder {
        println!("  |transform({xi:>9})| = {v:.12}");
    }
    println!("  (constant by the exact functional equation: no decay)");

    println!("\n== octave-band scan for the half/third system ==");
    let spec = IfsSpec::half_third();
    let params = ScanParams {
        xi_min: 16.0,
        xi_max: (1u64 << 21) as f64,
        band_count: 17,
        samples_per_band: 8,
        tol: 1e-8,
        seed: 0,
    };
    let scan = spectrum_scan(&spec, &params, 0).unwrap();
    println!("  {:>10} {:>10} {:>14} {:>8}", "xi_low", "xi_high", "sup |T|", "samples");
    for band in &scan.bands {
        println!(
            "  {:>10.0} {:>10.0} {:>14.8} {:>8}",
            band.xi_low, band.xi_high, band.sup_abs, band.samples
        );
    }
    let fit = fit_log_decay(&scan).unwrap();
    println!(
        "\n  fitted sup |T| ~ C (ln xi)^(-beta):  beta = {:.4}, residual {:.3}",
        fit.beta, fit.residual
    );
    println!(
        "  last band sup / first band sup = {:.4}",
        scan.bands.last().unwrap().sup_abs / scan.bands.first().unwrap().sup_abs
    );
}
