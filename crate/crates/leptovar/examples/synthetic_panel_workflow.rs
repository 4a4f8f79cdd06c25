//! Full workflow on the bundled synthetic 1259-row factor panel: write CSV,
//! reload it, describe, decompose and rank — the same path you would run on a
//! real three-factor panel.
//!
//! ```bash
//! cargo run --example synthetic_panel_workflow
//! ```

use leptovar::dataset::{CsvOptions, Dataset};
use leptovar::{lepto, report, samples};

fn main() {
    let panel = samples::synthetic_factor_panel(20150501);

    let dir = std::env::temp_dir();
    let path = dir.join("leptovar_synthetic_panel.csv");
    panel.write_csv(&path).expect("writable temp dir");
    let reloaded = Dataset::load_csv(&path, &CsvOptions::default()).expect("round trip");
    assert_eq!(panel, reloaded);
    println!("wrote and reloaded {} ({} rows)\n", path.display(), reloaded.n_rows());

    println!("column means and stds:");
    for (name, stats) in reloaded.describe() {
        println!("  {:<5} mean {:+.4}  std {:.4}", name, stats.mean, stats.std);
    }

    let corr = reloaded.correlations().unwrap();
    println!("\ncorr(MEx, IBM) = {:.4}\n", corr.get(0, 3));

    let y = reloaded.column("IBM").unwrap();
    let profile = lepto::decompose(y, 2).unwrap();
    let sets = vec![
        vec!["MEx".to_string(), "SMB".to_string(), "HML".to_string()],
        vec!["SMB".to_string(), "HML".to_string()],
        vec!["SMB".to_string()],
    ];
    let mut results = lepto::feature_set_analysis(&reloaded, "IBM", &sets, 1).unwrap();
    results.sort_by(|a, b| {
        b.macro_fraction_explained
            .partial_cmp(&a.macro_fraction_explained)
            .unwrap()
    });
    print!("{}", report::analysis_to_text(&profile, &results));

    println!("\nswap in your own panel with the same schema to analyze real returns:");
    println!("  leptovar lepto --input panel.csv --target IBM --depth 2");
    println!("  leptovar rank --input panel.csv --target IBM --sets \"MEx,SMB,HML;SMB,HML;SMB\" --depth 1");
}
