//! Rank feature sets by the fraction of 1-bit macro-variance they explain.
//!
//! ```bash
//! cargo run --example rank_feature_sets
//! ```

use leptovar::{lepto, report, samples};

fn main() {
    let panel = samples::eight_day_panel();
    let y = panel.column("y").unwrap();

    let sets = vec![
        vec!["f1".to_string()],
        vec!["f2".to_string()],
        vec!["t".to_string()],
        vec!["f1".to_string(), "f2".to_string()],
    ];
    let profile = lepto::decompose(y, 1).unwrap();
    let mut results = lepto::feature_set_analysis(&panel, "y", &sets, 1).unwrap();
    results.sort_by(|a, b| {
        b.macro_fraction_explained
            .partial_cmp(&a.macro_fraction_explained)
            .unwrap()
    });

    print!("{}", report::analysis_to_text(&profile, &results));

    let best = &results[0];
    println!(
        "\nbest single-bit explainer: {} ({:.2}% of the explainable variance)",
        best.feature_names.join(","),
        100.0 * best.macro_fraction_explained
    );
}
