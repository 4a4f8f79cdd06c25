//! Exact greedy least-squares regression trees.
//!
//! Each node's best split is found by sorting the node's samples on one
//! feature and scanning every boundary between adjacent distinct feature
//! values with prefix sums of the target and its square, so the scan is exact
//! over the at most `q - 1` admissible candidates for `q` distinct values.
//! The split threshold is the midpoint of the two adjacent distinct values and
//! rows with `feature < threshold` go to the left child.
//!
//! Determinism rules, chosen so that fitting is reproducible and invariant to
//! row order:
//!
//! * samples are sorted by `(feature value, target value)`, which makes the
//!   prefix sums independent of the original row order;
//! * candidates are compared on raw summed SSE with exact floating-point
//!   comparison; ties go to the lower feature index, then the lower threshold;
//! * node statistics are computed over the node's values in ascending order.
//!
//! Node MSE uses the population denominator (`n`), not the sample one.
//! Feature scans within a node may run in parallel; the argmin reduction is a
//! sequential fold over per-feature results, so the outcome is bit-identical
//! to a sequential scan.

use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::{DataError, Dataset, FeatureView};

#[derive(Debug, Error)]
pub enum TreeError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("length mismatch: feature has {x_len} values, target has {y_len}")]
    LengthMismatch { x_len: usize, y_len: usize },
    #[error("empty sample")]
    EmptySample,
    #[error("empty target")]
    EmptyTarget,
    #[error("depth must be >= 1 (got {0})")]
    InvalidDepth(usize),
    #[error("min_leaf must be >= 1 (got {0})")]
    InvalidMinLeaf(usize),
    #[error("sample index {index} out of range for {len} rows")]
    SampleIndexOutOfRange { index: usize, len: usize },
    #[error("row has {found} feature values, tree uses {expected}")]
    FeatureCountMismatch { expected: usize, found: usize },
    #[error("non-finite feature value at position {0}")]
    NonFiniteFeature(usize),
    #[error("non-finite target value at position {0}")]
    NonFiniteTarget(usize),
}

/// A candidate `(feature, threshold)` split with its exact cost.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitCandidate {
    /// Index into the fitted tree's feature list.
    pub feature_index: usize,
    /// Midpoint between two adjacent distinct sorted feature values.
    pub threshold: f64,
    /// Number of samples with `feature < threshold`.
    pub left_count: usize,
    /// Sample-weighted MSE of the two children.
    pub weighted_children_mse: f64,
    /// Parent MSE minus `weighted_children_mse`, clamped at zero.
    pub mse_drop: f64,
}

/// One node of a fitted tree. Nodes are stored in an arena in breadth-first
/// order, so a node's `id` is also its index in [`Tree::nodes`].
#[derive(Debug, Clone)]
pub struct Node {
    pub id: usize,
    pub depth: usize,
    /// Row indices of the samples in this node, in dataset order.
    pub sample_indices: Vec<usize>,
    pub mean: f64,
    /// Population MSE of the node's target values.
    pub mse: f64,
    pub split: Option<SplitCandidate>,
    pub left: Option<usize>,
    pub right: Option<usize>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }

    pub fn n_samples(&self) -> usize {
        self.sample_indices.len()
    }
}

/// A fitted greedy regression tree.
#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<Node>,
    max_depth: usize,
    feature_names: Vec<String>,
    residual_mse: f64,
    average_leaf_depth: f64,
    total_mse: f64,
    n_samples: usize,
}

impl Tree {
    /// All nodes in breadth-first id order.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Sample-weighted mean MSE over the leaves.
    pub fn residual_mse(&self) -> f64 {
        self.residual_mse
    }

    /// Sample-weighted mean leaf depth, in bits.
    pub fn average_leaf_depth(&self) -> f64 {
        self.average_leaf_depth
    }

    /// Root MSE (population variance of the target).
    pub fn total_mse(&self) -> f64 {
        self.total_mse
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// Predict the leaf mean for one row of feature values, ordered as
    /// [`Tree::feature_names`]. Routing is `feature < threshold` to the left.
    pub fn predict(&self, row: &[f64]) -> Result<f64, TreeError> {
        if row.len() != self.feature_names.len() {
            return Err(TreeError::FeatureCountMismatch {
                expected: self.feature_names.len(),
                found: row.len(),
            });
        }
        if let Some(pos) = row.iter().position(|v| !v.is_finite()) {
            return Err(TreeError::NonFiniteFeature(pos));
        }
        let mut node = &self.nodes[0];
        while let Some(split) = &node.split {
            let next = if row[split.feature_index] < split.threshold {
                node.left.expect("internal node has children")
            } else {
                node.right.expect("internal node has children")
            };
            node = &self.nodes[next];
        }
        Ok(node.mean)
    }
}

/// Mean and population MSE of a non-empty sequence.
pub fn node_stats(values: &[f64]) -> Result<(f64, f64), TreeError> {
    if values.is_empty() {
        return Err(TreeError::EmptySample);
    }
    let (mean, sse) = mean_and_sse(values);
    Ok((mean, sse / values.len() as f64))
}

/// Two-pass mean and sum of squared deviations. An all-equal sequence returns
/// its value and exactly zero, so constant leaves terminate growth cleanly.
fn mean_and_sse(values: &[f64]) -> (f64, f64) {
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return (first, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let sse = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, sse)
}

/// Canonical (order-independent) node statistics: values are summed in
/// ascending order so results do not depend on row order.
fn canonical_stats(values: &mut [f64]) -> (f64, f64) {
    values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
    mean_and_sse(values)
}

/// Best boundary of one sorted feature, as raw summed SSE.
struct ScanBest {
    threshold: f64,
    left_count: usize,
    children_sse: f64,
}

/// Scan all admissible boundaries of `pairs`, which are sorted by
/// `(feature, target)`. Returns `None` when all feature values are equal.
fn scan_sorted_pairs(pairs: &[(f64, f64)]) -> Option<ScanBest> {
    let n = pairs.len();
    if n < 2 {
        return None;
    }
    let total_sum: f64 = pairs.iter().map(|p| p.1).sum();
    let total_sq: f64 = pairs.iter().map(|p| p.1 * p.1).sum();
    let sse_scale = total_sq.abs().max(1.0);

    let mut best: Option<ScanBest> = None;
    let mut acc_sum = 0.0;
    let mut acc_sq = 0.0;
    for i in 1..n {
        let y_prev = pairs[i - 1].1;
        acc_sum += y_prev;
        acc_sq += y_prev * y_prev;
        let (x_prev, x_here) = (pairs[i - 1].0, pairs[i].0);
        if x_prev >= x_here {
            continue;
        }
        let threshold = 0.5 * (x_prev + x_here);
        // The midpoint of two adjacent representable floats can collapse onto
        // one of them; such a boundary cannot route correctly, skip it.
        if !(x_prev < threshold && threshold < x_here) {
            continue;
        }
        let left = clamp_sse(acc_sq - acc_sum * acc_sum / i as f64, sse_scale);
        let m = (n - i) as f64;
        let rest_sum = total_sum - acc_sum;
        let rest_sq = total_sq - acc_sq;
        let right = clamp_sse(rest_sq - rest_sum * rest_sum / m, sse_scale);
        let children_sse = left + right;
        // Strict comparison keeps the first (lowest-threshold) candidate on
        // exact ties.
        if best.as_ref().is_none_or(|b| children_sse < b.children_sse) {
            best = Some(ScanBest {
                threshold,
                left_count: i,
                children_sse,
            });
        }
    }
    best
}

/// Mean square of a sequence: the natural error scale for prefix-sum SSE,
/// whose round-off is proportional to the summed squares rather than to the
/// variance.
pub(crate) fn mean_square(values: &[f64]) -> f64 {
    values.iter().map(|&v| v * v).sum::<f64>() / values.len() as f64
}

/// Prefix-sum SSE can round to a tiny negative for near-constant blocks;
/// values within `-1e-9 * scale` of zero clamp to exactly zero.
fn clamp_sse(sse: f64, scale: f64) -> f64 {
    if sse < 0.0 {
        debug_assert!(sse >= -1e-9 * scale, "sse {sse} below clamp guard");
        0.0
    } else {
        sse
    }
}

fn check_finite(x: &[f64], y: &[f64]) -> Result<(), TreeError> {
    if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
        return Err(TreeError::NonFiniteFeature(pos));
    }
    if let Some(pos) = y.iter().position(|v| !v.is_finite()) {
        return Err(TreeError::NonFiniteTarget(pos));
    }
    Ok(())
}

/// Optimal depth-1 split of target `y` on a single feature `x`.
///
/// Returns `None` when no admissible boundary exists (all `x` equal or fewer
/// than two samples). The returned candidate has `feature_index` 0.
pub fn best_split_for_feature(x: &[f64], y: &[f64]) -> Result<Option<SplitCandidate>, TreeError> {
    if x.len() != y.len() {
        return Err(TreeError::LengthMismatch {
            x_len: x.len(),
            y_len: y.len(),
        });
    }
    if y.is_empty() {
        return Err(TreeError::EmptySample);
    }
    check_finite(x, y)?;
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    sort_pairs(&mut pairs);
    let n = y.len();
    let (_, node_mse) = node_stats(y)?;
    Ok(scan_sorted_pairs(&pairs).map(|b| candidate_from_scan(0, b, n, node_mse)))
}

fn sort_pairs(pairs: &mut [(f64, f64)]) {
    pairs.sort_unstable_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite values")
            .then(a.1.partial_cmp(&b.1).expect("finite values"))
    });
}

fn candidate_from_scan(feature_index: usize, best: ScanBest, n: usize, node_mse: f64) -> SplitCandidate {
    let weighted = best.children_sse / n as f64;
    SplitCandidate {
        feature_index,
        threshold: best.threshold,
        left_count: best.left_count,
        weighted_children_mse: weighted,
        mse_drop: (node_mse - weighted).max(0.0),
    }
}

/// Best split over all features of a view, restricted to the given sample
/// indices. Ties break to the lower weighted children SSE, then the lower
/// feature index, then the lower threshold.
pub fn best_split(
    samples: &[usize],
    features: &FeatureView<'_>,
    y: &[f64],
) -> Result<Option<SplitCandidate>, TreeError> {
    if samples.len() < 2 {
        return Ok(None);
    }
    for &i in samples {
        if i >= y.len() {
            return Err(TreeError::SampleIndexOutOfRange {
                index: i,
                len: y.len(),
            });
        }
    }
    let node_values: Vec<f64> = samples.iter().map(|&i| y[i]).collect();
    let (_, node_mse) = node_stats(&node_values)?;
    Ok(scan_all_features(samples, features.columns(), y)
        .map(|(feature_index, b)| candidate_from_scan(feature_index, b, samples.len(), node_mse)))
}

fn scan_all_features(
    samples: &[usize],
    columns: &[&[f64]],
    y: &[f64],
) -> Option<(usize, ScanBest)> {
    let per_feature: Vec<Option<ScanBest>> = columns
        .par_iter()
        .map(|col| {
            let mut pairs: Vec<(f64, f64)> =
                samples.iter().map(|&i| (col[i], y[i])).collect();
            sort_pairs(&mut pairs);
            scan_sorted_pairs(&pairs)
        })
        .collect();
    let mut best: Option<(usize, ScanBest)> = None;
    for (index, scan) in per_feature.into_iter().enumerate() {
        let Some(scan) = scan else { continue };
        let better = match &best {
            None => true,
            // Feature order is ascending, so on an exact SSE tie the earlier
            // feature index wins by keeping the current best.
            Some((_, b)) => scan.children_sse < b.children_sse,
        };
        if better {
            best = Some((index, scan));
        }
    }
    best
}

/// Fit a greedy regression tree of `target` on `features`.
///
/// A node becomes a leaf when it reaches `max_depth`, its MSE is zero, no
/// admissible split exists, or the best split would leave a child with fewer
/// than `min_leaf` samples. Node ids are assigned in breadth-first order from
/// zero.
pub fn fit(
    ds: &Dataset,
    target: &str,
    features: &[&str],
    max_depth: usize,
    min_leaf: usize,
) -> Result<Tree, TreeError> {
    let (y, view) = ds.select(target, features)?;
    grow(view.columns(), view.names().to_vec(), y, max_depth, min_leaf)
}

/// Fit a tree of the target on itself: the single feature is the target.
pub fn fit_self(y: &[f64], max_depth: usize) -> Result<Tree, TreeError> {
    if y.is_empty() {
        return Err(TreeError::EmptyTarget);
    }
    check_finite(&[], y)?;
    grow(&[y], vec!["self".to_string()], y, max_depth, 1)
}

fn grow(
    columns: &[&[f64]],
    feature_names: Vec<String>,
    y: &[f64],
    max_depth: usize,
    min_leaf: usize,
) -> Result<Tree, TreeError> {
    if max_depth < 1 {
        return Err(TreeError::InvalidDepth(max_depth));
    }
    if min_leaf < 1 {
        return Err(TreeError::InvalidMinLeaf(min_leaf));
    }
    if y.is_empty() {
        return Err(TreeError::EmptyTarget);
    }
    let n = y.len();

    let mut nodes: Vec<Node> = Vec::new();
    let mut values: Vec<f64> = y.to_vec();
    let (mean, root_sse) = canonical_stats(&mut values);
    let total_mse = root_sse / n as f64;
    nodes.push(Node {
        id: 0,
        depth: 0,
        sample_indices: (0..n).collect(),
        mean,
        mse: total_mse,
        split: None,
        left: None,
        right: None,
    });

    let mut residual_sse = 0.0;
    let mut depth_weight: usize = 0; // sum over leaves of n_leaf * depth

    // Breadth-first growth; children are appended when their parent is
    // popped, so vector index equals breadth-first id.
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let depth = nodes[id].depth;
        let node_mse = nodes[id].mse;
        let m = nodes[id].sample_indices.len();

        let split = if depth >= max_depth || node_mse == 0.0 {
            None
        } else {
            let samples = &nodes[id].sample_indices;
            scan_all_features(samples, columns, y)
                .map(|(feature_index, b)| candidate_from_scan(feature_index, b, m, node_mse))
                // The best split may still violate the leaf-size floor.
                .filter(|c| c.left_count >= min_leaf && m - c.left_count >= min_leaf)
        };

        match split {
            None => {
                let sse = nodes[id].mse * m as f64;
                // Recompute exactly for leaves: mse * m can round, the
                // canonical SSE does not.
                let mut leaf_values: Vec<f64> =
                    nodes[id].sample_indices.iter().map(|&i| y[i]).collect();
                let (_, exact_sse) = canonical_stats(&mut leaf_values);
                debug_assert!((sse - exact_sse).abs() <= 1e-9 * exact_sse.abs().max(1.0));
                residual_sse += exact_sse;
                depth_weight += m * depth;
            }
            Some(candidate) => {
                let threshold = candidate.threshold;
                let feature = columns[candidate.feature_index];
                let (mut left_idx, mut right_idx) = (Vec::new(), Vec::new());
                for &i in &nodes[id].sample_indices {
                    if feature[i] < threshold {
                        left_idx.push(i);
                    } else {
                        right_idx.push(i);
                    }
                }
                debug_assert_eq!(left_idx.len(), candidate.left_count);

                let left_id = nodes.len();
                let right_id = left_id + 1;
                for (child_id, idx) in [(left_id, left_idx), (right_id, right_idx)] {
                    let mut vals: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
                    let (child_mean, child_sse) = canonical_stats(&mut vals);
                    nodes.push(Node {
                        id: child_id,
                        depth: depth + 1,
                        sample_indices: idx,
                        mean: child_mean,
                        mse: child_sse / vals.len() as f64,
                        split: None,
                        left: None,
                        right: None,
                    });
                }
                nodes[id].split = Some(candidate);
                nodes[id].left = Some(left_id);
                nodes[id].right = Some(right_id);
                queue.push_back(left_id);
                queue.push_back(right_id);
            }
        }
    }

    Ok(Tree {
        max_depth,
        feature_names,
        residual_mse: residual_sse / n as f64,
        average_leaf_depth: depth_weight as f64 / n as f64,
        total_mse,
        n_samples: n,
        nodes,
    })
}
