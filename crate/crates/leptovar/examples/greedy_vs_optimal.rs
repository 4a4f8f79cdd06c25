//! Compare the greedy engine against the brute-force oracles.
//!
//! Shows the split-scan/enumeration agreement, the sorted-partition dominance
//! over all 127 bipartitions of the 8-day series, and the four-value series
//! where greedy isolates the extreme too early and pays for it at depth 2.
//!
//! ```bash
//! cargo run --example greedy_vs_optimal
//! ```

use leptovar::{oracle, samples, tree};

fn main() {
    let panel = samples::eight_day_panel();
    let y = panel.column("y").unwrap();

    println!("exhaustive candidates for the self split of y:");
    for c in oracle::enumerate_splits(y, y).unwrap() {
        println!(
            "  threshold {:>5}  weighted mse {:.6}",
            c.threshold, c.weighted_children_mse
        );
    }
    let fast = tree::best_split_for_feature(y, y).unwrap().unwrap();
    println!(
        "scan picks threshold {} with weighted mse {:.6}\n",
        fast.threshold, fast.weighted_children_mse
    );

    let best = oracle::best_partition_brute(y).unwrap();
    println!(
        "best of all 127 bipartitions: weighted mse {:.6}, sorted = {}",
        best.weighted_mse, best.is_sorted
    );
    println!("(equals the self split: sorted splits are unbeatable)\n");

    let quad = samples::GREEDY_SUBOPTIMAL_SERIES;
    let greedy = tree::fit_self(&quad, 2).unwrap();
    let optimal = oracle::optimal_tree_brute(&quad, 2).unwrap();
    println!(
        "series {:?}: greedy residual {:.3} at average depth {}, optimal residual {:.3}",
        quad,
        greedy.residual_mse(),
        greedy.average_leaf_depth(),
        optimal.residual_mse
    );

    let report = oracle::check_conjecture(&quad, 2).unwrap();
    println!(
        "at its own average depth greedy is unbeaten: min rss {:.3} vs greedy rss {:.3} (holds = {})",
        report.min_rss_at_same_avg_depth, report.greedy_rss, report.holds
    );

    let sweep = oracle::conjecture_sweep(8, 2, 200, 42).unwrap();
    println!(
        "\nsweep over 200 random integer series (n <= 8): {} counterexamples",
        sweep.counterexamples
    );
    if let Some(case) = sweep.cases.first() {
        println!(
            "  e.g. y = {:?}: greedy rss {:.3}, a tree of equal average depth reaches {:.3}",
            case.y, case.greedy_rss, case.min_rss_at_same_avg_depth
        );
    }
}
