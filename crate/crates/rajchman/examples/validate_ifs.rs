//! Validating and normalizing iterated function systems.
//!
//! Run with: `cargo run --example validate_ifs`

use rajchman::ifs::IfsSpec;

fn main() {
    println!("== well-formed systems ==");
    for (name, raw) in [
        ("middle-thirds Cantor", vec![(1.0 / 3.0, 0.0, 0.5), (1.0 / 3.0, 2.0 / 3.0, 0.5)]),
        ("half/third", vec![(0.5, 0.0, 0.5), (1.0 / 3.0, 2.0 / 3.0, 0.5)]),
        ("wide two-map", vec![(0.5, 0.0, 0.5), (0.5, 5.0, 0.5)]),
        ("off-center symmetric", vec![(1.0 / 3.0, -1.0, 0.5), (1.0 / 3.0, 1.0, 0.5)]),
    ] {
        let spec = IfsSpec::validate(&raw).expect(name);
        let (lo, hi) = spec.hull();
        println!("{name:24} hull [{lo:.4}, {hi:.4}]  normalized: {}", spec.is_normalized());
        if !spec.is_normalized() {
            let norm = spec.normalize_to_unit();
            let translations: Vec<f64> = norm.maps().iter().map(|m| m.translation).collect();
            println!("{:24} conjugated translations: {translations:?}", "");
        }
    }

    println!("\n== rejected systems ==");
    let rejects: Vec<(&str, Vec<(f64, f64, f64)>)> = vec![
        ("identical fixed points", vec![(0.5, 0.0, 0.5), (0.5, 0.0, 0.5)]),
        ("weights sum to 1.2", vec![(0.5, 0.0, 0.6), (1.0 / 3.0, 2.0 / 3.0, 0.6)]),
        ("expanding map", vec![(1.5, 0.0, 0.5), (0.5, 1.0, 0.5)]),
        ("single map", vec![(0.5, 0.0, 1.0)]),
    ];
    for (name, raw) in rejects {
        let err = IfsSpec::validate(&raw).unwrap_err();
        println!("{name:24} -> {err}");
    }

    println!("\n== spec file round trip ==");
    let spec = IfsSpec::half_third();
    let text = spec.to_json_string();
    println!("{text}");
    let back = IfsSpec::from_json_str(&text).expect("round trip");
    assert_eq!(spec.maps(), back.maps());
    println!("round trip ok");
}
