//! Fit a depth-2 regression tree on both factors and render it three ways.
//!
//! ```bash
//! cargo run --example fit_tree
//! ```

use leptovar::{report, samples, tree};

fn main() {
    let panel = samples::eight_day_panel();
    let fitted = tree::fit(&panel, "y", &["f1", "f2"], 2, 1).expect("valid columns");

    println!(
        "residual mse {:.6} of total {:.6} (average leaf depth {:.2})\n",
        fitted.residual_mse(),
        fitted.total_mse(),
        fitted.average_leaf_depth()
    );

    println!("nodes:");
    for node in fitted.nodes() {
        let role = match &node.split {
            Some(split) => format!(
                "splits {} < {}",
                fitted.feature_names()[split.feature_index],
                split.threshold
            ),
            None => "leaf".to_string(),
        };
        println!(
            "  #{} depth {} n={} mean={:+.4} mse={:.4} {}",
            node.id,
            node.depth,
            node.n_samples(),
            node.mean,
            node.mse,
            role
        );
    }

    println!("\nprediction for (f1, f2) = (3.0, 5.0): {:+.4}", fitted.predict(&[3.0, 5.0]).unwrap());

    println!("\nDOT (pipe into `dot -Tpng`):\n{}", report::tree_to_dot(&fitted));
    println!("JSON:\n{}", report::tree_to_json(&fitted));
}
