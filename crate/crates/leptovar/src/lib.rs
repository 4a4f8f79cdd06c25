//! Regression-tree variance decomposition for numeric series.
//!
//! A depth-k regression tree of a series on *itself* is the best any depth-k
//! tree can do on any feature set, because the best binary split of a sample
//! is always a sorted split and the target generates all sorted splits of
//! itself. The residual MSE of that self-tree is the series' k-bit
//! *lepto-variance*: structure too fine for depth-k trees to resolve. Its
//! complement, the k-bit *macro-variance*, is the most variance any feature
//! set can explain at that depth, which makes it the natural yardstick for
//! ranking feature sets.
//!
//! The crate provides:
//!
//! * [`dataset`] — CSV ingestion, validation, descriptive statistics;
//! * [`tree`] — exact greedy least-squares trees with deterministic
//!   tie-breaking;
//! * [`lepto`] — lepto/macro decomposition profiles and feature-set ranking;
//! * [`oracle`] — brute-force references: exhaustive split enumeration,
//!   exhaustive bipartitions, optimal trees by dynamic programming, and an
//!   exhaustive checker for the greedy-vs-average-depth claim;
//! * [`report`] — text, JSON and DOT rendering;
//! * [`samples`] — bundled panels for demos and tests;
//! * [`cli`] — the command-line front end used by the `leptovar` binary.
//!
//! # Quick start
//!
//! ```
//! use leptovar::{lepto, samples};
//!
//! let panel = samples::eight_day_panel();
//! let y = panel.column("y").unwrap();
//! let profile = lepto::decompose(y, 2).unwrap();
//! // No feature set can explain more than ~70.94% of this series with one bit.
//! assert!((profile.rows[1].macro_fraction - 0.7094).abs() < 1e-4);
//! ```
//!
//! Runnable walkthroughs live in `examples/`:
//!
//! ```bash
//! cargo run --example describe_panel
//! cargo run --example fit_tree
//! cargo run --example decompose_series
//! cargo run --example rank_feature_sets
//! cargo run --example greedy_vs_optimal
//! cargo run --example synthetic_panel_workflow
//! ```

pub mod cli;
pub mod dataset;
pub mod lepto;
pub mod oracle;
pub mod report;
pub mod samples;
pub mod tree;

pub use dataset::{ColumnStats, CorrelationMatrix, CsvOptions, DataError, Dataset, FeatureView};
pub use lepto::{DecompositionProfile, DepthRow, FeatureSetResult, LeptoError};
pub use oracle::{ConjectureReport, OptimalTree, OracleError, PartitionResult, SweepReport};
pub use report::{NodeExport, TreeExport};
pub use tree::{Node, SplitCandidate, Tree, TreeError};

pub(crate) mod numfmt {
    /// Format with 17 significant digits, enough to reproduce any `f64`
    /// exactly when parsed back.
    pub fn exact(v: f64) -> String {
        format!("{v:.16e}")
    }

    #[cfg(test)]
    mod tests {
        #[test]
        fn exact_round_trips() {
            for v in [
                0.0,
                -0.0,
                1.0,
                0.1,
                -2.5e-300,
                3.171875,
                std::f64::consts::PI,
                f64::MAX,
                f64::MIN_POSITIVE,
            ] {
                let parsed: f64 = super::exact(v).parse().unwrap();
                assert_eq!(parsed.to_bits(), v.to_bits());
            }
        }
    }
}
