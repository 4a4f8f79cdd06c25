//! Descriptive statistics and correlations of the bundled 8-day panel.
//!
//! ```bash
//! cargo run --example describe_panel
//! ```

use leptovar::samples;

fn main() {
    let panel = samples::eight_day_panel();
    println!(
        "panel: {} rows, columns {:?}\n",
        panel.n_rows(),
        panel.names()
    );

    println!("{:<8}{:>10}{:>10}{:>10}{:>10}{:>10}", "column", "mean", "std", "min", "median", "max");
    for (name, stats) in panel.describe() {
        println!(
            "{:<8}{:>10.4}{:>10.4}{:>10.4}{:>10.4}{:>10.4}",
            name, stats.mean, stats.std, stats.min, stats.median, stats.max
        );
    }

    let corr = panel.correlations().expect("no constant columns");
    println!("\ncorrelations");
    print!("{:<8}", "");
    for name in &corr.names {
        print!("{name:>10}");
    }
    println!();
    for (i, name) in corr.names.iter().enumerate() {
        print!("{name:<8}");
        for j in 0..corr.names.len() {
            print!("{:>10.4}", corr.get(i, j));
        }
        println!();
    }
}
