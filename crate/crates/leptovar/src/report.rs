//! Rendering of trees and analyses as text, JSON and DOT.
//!
//! JSON output is deterministic: stable key order, every key always present,
//! floats written with 17 significant digits so parsing the text reproduces
//! the export exactly.

use serde::{Deserialize, Serialize};

use crate::lepto::{DecompositionProfile, FeatureSetResult};
use crate::numfmt;
use crate::tree::Tree;

/// Flat, serializable snapshot of a fitted tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeExport {
    pub nodes: Vec<NodeExport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeExport {
    pub id: usize,
    pub depth: usize,
    pub n_samples: usize,
    pub sample_fraction: f64,
    pub mean: f64,
    pub mse: f64,
    pub split_feature: Option<String>,
    pub threshold: Option<f64>,
    pub left_id: Option<usize>,
    pub right_id: Option<usize>,
}

/// Snapshot a tree into its export form, nodes in id order.
pub fn tree_export(tree: &Tree) -> TreeExport {
    let n = tree.n_samples() as f64;
    let nodes = tree
        .nodes()
        .iter()
        .map(|node| NodeExport {
            id: node.id,
            depth: node.depth,
            n_samples: node.n_samples(),
            sample_fraction: node.n_samples() as f64 / n,
            mean: node.mean,
            mse: node.mse,
            split_feature: node
                .split
                .as_ref()
                .map(|s| tree.feature_names()[s.feature_index].clone()),
            threshold: node.split.as_ref().map(|s| s.threshold),
            left_id: node.left,
            right_id: node.right,
        })
        .collect();
    TreeExport { nodes }
}

/// Deterministic JSON for a fitted tree; identical trees produce byte-identical
/// output and parsing it back yields the same [`TreeExport`].
pub fn tree_to_json(tree: &Tree) -> String {
    let export = tree_export(tree);
    let mut out = String::from("{\n  \"nodes\": [\n");
    for (i, node) in export.nodes.iter().enumerate() {
        out.push_str("    {");
        out.push_str(&format!("\"id\": {}, ", node.id));
        out.push_str(&format!("\"depth\": {}, ", node.depth));
        out.push_str(&format!("\"n_samples\": {}, ", node.n_samples));
        out.push_str(&format!(
            "\"sample_fraction\": {}, ",
            numfmt::exact(node.sample_fraction)
        ));
        out.push_str(&format!("\"mean\": {}, ", numfmt::exact(node.mean)));
        out.push_str(&format!("\"mse\": {}, ", numfmt::exact(node.mse)));
        match &node.split_feature {
            Some(name) => out.push_str(&format!(
                "\"split_feature\": {}, ",
                serde_json::to_string(name).expect("string serializes")
            )),
            None => out.push_str("\"split_feature\": null, "),
        }
        match node.threshold {
            Some(t) => out.push_str(&format!("\"threshold\": {}, ", numfmt::exact(t))),
            None => out.push_str("\"threshold\": null, "),
        }
        match node.left_id {
            Some(l) => out.push_str(&format!("\"left_id\": {}, ", l)),
            None => out.push_str("\"left_id\": null, "),
        }
        match node.right_id {
            Some(r) => out.push_str(&format!("\"right_id\": {}", r)),
            None => out.push_str("\"right_id\": null"),
        }
        out.push('}');
        if i + 1 < export.nodes.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT graph of a fitted tree: one box per node labeled with the split rule
/// (internal nodes), sample count, MSE and mean; the left edge is labeled
/// "true".
pub fn tree_to_dot(tree: &Tree) -> String {
    let mut out = String::from("digraph tree {\n    node [shape=box];\n");
    for node in tree.nodes() {
        let mut label = String::new();
        if let Some(split) = &node.split {
            let feature = &tree.feature_names()[split.feature_index];
            label.push_str(&format!("{} < {}\\n", dot_escape(feature), split.threshold));
        }
        label.push_str(&format!(
            "n={}\\nmse={:.3}\\nmean={:.3}",
            node.n_samples(),
            node.mse,
            node.mean
        ));
        out.push_str(&format!("    n{} [label=\"{}\"];\n", node.id, label));
    }
    for node in tree.nodes() {
        if let (Some(left), Some(right)) = (node.left, node.right) {
            out.push_str(&format!(
                "    n{} -> n{} [label=\"true\"];\n",
                node.id, left
            ));
            out.push_str(&format!(
                "    n{} -> n{} [label=\"false\"];\n",
                node.id, right
            ));
        }
    }
    out.push_str("}\n");
    out
}

fn pct(fraction: f64) -> String {
    format!("{:.2}%", fraction * 100.0)
}

/// Plain-text table of a decomposition profile and optional feature-set
/// results. Percentages use two decimals; other values six.
pub fn analysis_to_text(profile: &DecompositionProfile, results: &[FeatureSetResult]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "total variance: {:.6}\n\n",
        profile.total_variance
    ));
    out.push_str("depth  lepto       macro       macro%    avg_leaf_depth\n");
    for row in &profile.rows {
        out.push_str(&format!(
            "{:<6} {:<11.6} {:<11.6} {:>8}  {:.6}\n",
            row.depth,
            row.lepto,
            row.macro_variance,
            pct(row.macro_fraction),
            row.avg_leaf_depth,
        ));
    }
    if !results.is_empty() {
        out.push('\n');
        out.push_str("feature set            depth  residual    explained   macro%\n");
        for r in results {
            let names = r.feature_names.join(",");
            let flag = if r.exceeds_macro_bound { " *" } else { "" };
            out.push_str(&format!(
                "{:<22} {:<6} {:<11.6} {:<11.6} {:>8}{}\n",
                names,
                r.depth,
                r.residual_mse,
                r.explained,
                pct(r.macro_fraction_explained),
                flag,
            ));
        }
        if results.iter().any(|r| r.exceeds_macro_bound) {
            out.push_str("\n* explained more than the self-tree bound at this depth\n");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lepto::{decompose, feature_set_analysis};
    use crate::samples;
    use crate::tree::{fit, fit_self};

    #[test]
    fn single_leaf_tree_exports_one_node_without_split_fields() {
        let tree = fit_self(&[3.0, 3.0], 1).unwrap();
        let export = tree_export(&tree);
        assert_eq!(export.nodes.len(), 1);
        let node = &export.nodes[0];
        assert_eq!(node.split_feature, None);
        assert_eq!(node.threshold, None);
        assert_eq!(node.left_id, None);
        assert_eq!(node.right_id, None);
        assert_eq!(node.sample_fraction, 1.0);
    }

    #[test]
    fn depth1_self_tree_export_matches_published_node_stats() {
        let ds = samples::eight_day_panel();
        let tree = fit_self(ds.column("y").unwrap(), 1).unwrap();
        let export = tree_export(&tree);
        assert_eq!(export.nodes.len(), 3);
        let root = &export.nodes[0];
        assert_eq!(root.n_samples, 8);
        assert_eq!(root.mse, 3.171875);
        let left = &export.nodes[1];
        let right = &export.nodes[2];
        assert_eq!(left.n_samples, 4);
        assert_eq!(left.mse, 0.546875);
        assert_eq!(right.n_samples, 4);
        assert_eq!(right.mse, 1.296875);
    }

    #[test]
    fn json_round_trips_exactly() {
        let ds = samples::eight_day_panel();
        let tree = fit(&ds, "y", &["f1", "f2"], 2, 1).unwrap();
        let json = tree_to_json(&tree);
        let parsed: TreeExport = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, tree_export(&tree));
    }

    #[test]
    fn json_is_deterministic() {
        let ds = samples::eight_day_panel();
        let a = tree_to_json(&fit(&ds, "y", &["f1", "f2"], 2, 1).unwrap());
        let b = tree_to_json(&fit(&ds, "y", &["f1", "f2"], 2, 1).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn leaf_fractions_recover_counts() {
        let ds = samples::eight_day_panel();
        let tree = fit(&ds, "y", &["f1", "f2"], 2, 1).unwrap();
        let export = tree_export(&tree);
        let n = tree.n_samples() as f64;
        let mut fraction_sum = 0.0;
        for node in &export.nodes {
            if node.left_id.is_none() {
                fraction_sum += node.sample_fraction;
                assert_eq!(node.sample_fraction * n, node.n_samples as f64);
            }
        }
        assert!((fraction_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dot_labels_the_published_root_split() {
        let ds = samples::eight_day_panel();
        let tree = fit(&ds, "y", &["f1"], 1, 1).unwrap();
        let dot = tree_to_dot(&tree);
        assert!(dot.contains("f1 < 4.9"));
        assert!(dot.contains("[label=\"true\"]"));
    }

    #[test]
    fn dot_of_single_leaf_has_no_edges() {
        let tree = fit_self(&[1.0], 1).unwrap();
        let dot = tree_to_dot(&tree);
        assert!(!dot.contains("->"));
        assert!(dot.contains("n0"));
    }

    #[test]
    fn dot_of_free_depth2_tree_shows_the_internal_splits() {
        // Root on f1; the left child strictly prefers f2. The right child has
        // an exact cost tie between f1 at 5.5 and f2 at 2.9, which resolves to
        // the lower feature index, f1.
        let ds = samples::eight_day_panel();
        let tree = fit(&ds, "y", &["f1", "f2"], 2, 1).unwrap();
        let dot = tree_to_dot(&tree);
        assert!(dot.contains("f1 < 4.9"));
        assert!(dot.contains("f2 < 3.5"));
        assert!(dot.contains("f1 < 5.5"));
    }

    #[test]
    fn analysis_text_contains_published_percentages() {
        let ds = samples::eight_day_panel();
        let y = ds.column("y").unwrap();
        let profile = decompose(y, 2).unwrap();
        let results =
            feature_set_analysis(&ds, "y", &[vec!["f1".to_string()]], 1).unwrap();
        let text = analysis_to_text(&profile, &results);
        assert!(text.contains("70.94%"), "missing info gain line:\n{text}");
        assert!(text.contains("1.42"), "missing f1 residual line:\n{text}");
        assert!(text.contains("3.171875"));
    }

    #[test]
    fn analysis_text_without_results_is_profile_only() {
        let ds = samples::eight_day_panel();
        let profile = decompose(ds.column("y").unwrap(), 1).unwrap();
        let text = analysis_to_text(&profile, &[]);
        assert!(text.contains("total variance"));
        assert!(!text.contains("feature set"));
    }
}
