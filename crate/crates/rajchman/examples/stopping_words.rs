//! The prefix-free stopping word sets `W_t`: shortest words whose composed
//! contraction falls to `exp(-t)` or below.
//!
//! Run with: `cargo run --example stopping_words`

use rajchman::ifs::IfsSpec;

fn main() {
    let spec = IfsSpec::half_third();

    println!("small threshold, every word listed (t = 2):");
    let set = spec.stopping_words(2.0).unwrap();
    for (word, composite) in &set.entries {
        println!(
            "  {:?}  ratio {:.5}  weight {:.5}",
            word.letters(),
            composite.ratio,
            composite.weight
        );
    }
    println!(
        "  {} words, total weight {:.15}, prefix-free: {}",
        set.entries.len(),
        set.total_weight(),
        set.is_prefix_free()
    );

    println!("\ngrowth of |W_t| (the count is capped by (e^t / r_min)^s):");
    println!("  {:>4} {:>9} {:>12} {:>22} {:>8}", "t", "|W_t|", "estimate", "mass defect", "bracket");
    for t in [2.0, 4.0, 6.0, 8.0, 10.0, 12.0] {
        let set = spec.stopping_words(t).unwrap();
        println!(
            "  {:>4} {:>9} {:>12.0} {:>22.3e} {:>8}",
            t,
            set.entries.len(),
            spec.estimated_stopping_count(t),
            (set.total_weight() - 1.0).abs(),
            set.ratios_bracketed(spec.r_min())
        );
    }

    println!("\nthe cap in action:");
    match spec.stopping_words_capped(40.0, 1e6) {
        Err(err) => println!("  t = 40 with cap 1e6 -> {err}"),
        Ok(_) => unreachable!(),
    }

    println!("\nword calculus:");
    let word = rajchman::ifs::Word(vec![0, 1, 0]);
    let c = spec.compose(&word).unwrap();
    println!(
        "  compose {:?}: f(x) = {:.6} x + {:.6}, weight {:.6}",
        word.letters(),
        c.ratio,
        c.translation,
        c.weight
    );
}
