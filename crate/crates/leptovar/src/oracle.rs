//! Brute-force reference implementations.
//!
//! These validate the greedy engine from the outside: exhaustive candidate
//! enumeration with direct (non-prefix-sum) summation, exhaustive search over
//! all binary partitions, optimal depth-k trees over the sorted target by
//! dynamic programming, and an exhaustive checker for the claim that the
//! greedy self-tree attains minimal RSS among trees of the same average depth.

use serde::Serialize;
use thiserror::Error;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::tree::{self, SplitCandidate};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("length mismatch: feature has {x_len} values, target has {y_len}")]
    LengthMismatch { x_len: usize, y_len: usize },
    #[error("sample size {n} outside supported range {min}..={max}")]
    SampleSizeOutOfRange { n: usize, min: usize, max: usize },
    #[error("depth {k} exceeds supported maximum {max}")]
    DepthOutOfRange { k: usize, max: usize },
    #[error("left side must be a non-empty proper subset")]
    InvalidPartition,
    #[error("partition index {index} out of range for {len} rows")]
    IndexOutOfRange { index: usize, len: usize },
}

/// One bipartition of a target sample with its exact cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionResult {
    /// Indices of the left side, ascending. The left side is the one with the
    /// smaller mean.
    pub left_indices: Vec<usize>,
    pub weighted_mse: f64,
    /// True when every left target value is strictly smaller than every right
    /// target value.
    pub is_sorted: bool,
}

fn direct_mean_sse(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let sse = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, sse)
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Every admissible split of `y` on feature `x`, by direct summation.
///
/// Candidates sit at each boundary between adjacent distinct sorted `x`
/// values and are returned in ascending threshold order.
pub fn enumerate_splits(x: &[f64], y: &[f64]) -> Result<Vec<SplitCandidate>, OracleError> {
    if x.len() != y.len() {
        return Err(OracleError::LengthMismatch {
            x_len: x.len(),
            y_len: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Ok(Vec::new());
    }
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_unstable_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite values")
            .then(a.1.partial_cmp(&b.1).expect("finite values"))
    });
    let sorted_y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (_, node_sse) = direct_mean_sse(&sorted_y);
    let node_mse = node_sse / n as f64;

    let mut out = Vec::new();
    for i in 1..n {
        let (lo, hi) = (pairs[i - 1].0, pairs[i].0);
        if lo >= hi {
            continue;
        }
        let threshold = 0.5 * (lo + hi);
        if !(lo < threshold && threshold < hi) {
            continue;
        }
        let (_, left_sse) = direct_mean_sse(&sorted_y[..i]);
        let (_, right_sse) = direct_mean_sse(&sorted_y[i..]);
        let weighted = (left_sse + right_sse) / n as f64;
        out.push(SplitCandidate {
            feature_index: 0,
            threshold,
            left_count: i,
            weighted_children_mse: weighted,
            mse_drop: (node_mse - weighted).max(0.0),
        });
    }
    Ok(out)
}

/// Evaluate one explicit bipartition of `y`, given the left-side indices.
pub fn partition_stats(y: &[f64], left_indices: &[usize]) -> Result<PartitionResult, OracleError> {
    let n = y.len();
    if left_indices.is_empty() || left_indices.len() >= n {
        return Err(OracleError::InvalidPartition);
    }
    let mut in_left = vec![false; n];
    for &i in left_indices {
        if i >= n {
            return Err(OracleError::IndexOutOfRange { index: i, len: n });
        }
        if in_left[i] {
            return Err(OracleError::InvalidPartition);
        }
        in_left[i] = true;
    }
    let left: Vec<f64> = (0..n).filter(|&i| in_left[i]).map(|i| y[i]).collect();
    let right: Vec<f64> = (0..n).filter(|&i| !in_left[i]).map(|i| y[i]).collect();
    let (left_mean, left_sse) = direct_mean_sse(&left);
    let (right_mean, right_sse) = direct_mean_sse(&right);
    let weighted_mse = (left_sse + right_sse) / n as f64;

    // Orient so the left side holds the smaller mean, matching the sorted
    // convention; on equal means keep the side list with smaller indices.
    let mut left_sorted: Vec<usize> = (0..n).filter(|&i| in_left[i]).collect();
    let mut right_sorted: Vec<usize> = (0..n).filter(|&i| !in_left[i]).collect();
    let swap = left_mean > right_mean || (left_mean == right_mean && right_sorted < left_sorted);
    if swap {
        std::mem::swap(&mut left_sorted, &mut right_sorted);
    }
    let (lo_vals, hi_vals) = if swap { (right, left) } else { (left, right) };
    let is_sorted = max_of(&lo_vals) < min_of(&hi_vals);
    Ok(PartitionResult {
        left_indices: left_sorted,
        weighted_mse,
        is_sorted,
    })
}

/// Exhaustive minimum-cost bipartition over all `2^(n-1) - 1` splits.
///
/// Ties break to the lexicographically smaller left index list. Supported for
/// `2 <= n <= 20`.
pub fn best_partition_brute(y: &[f64]) -> Result<PartitionResult, OracleError> {
    let n = y.len();
    if !(2..=20).contains(&n) {
        return Err(OracleError::SampleSizeOutOfRange { n, min: 2, max: 20 });
    }
    let mut best: Option<PartitionResult> = None;
    // Masks with bit 0 set enumerate each unordered bipartition once.
    for mask in (1u32..(1 << n)).step_by(2) {
        if mask == (1 << n) - 1 {
            continue;
        }
        let side: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let candidate = partition_stats(y, &side)?;
        let better = match &best {
            None => true,
            Some(b) => {
                candidate.weighted_mse < b.weighted_mse
                    || (candidate.weighted_mse == b.weighted_mse
                        && candidate.left_indices < b.left_indices)
            }
        };
        if better {
            best = Some(candidate);
        }
    }
    Ok(best.expect("n >= 2 guarantees at least one bipartition"))
}

/// Optimal depth-bounded tree found by dynamic programming.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalTree {
    pub residual_mse: f64,
    /// Leaf segments as `[start, end)` ranges over the sorted target.
    pub leaf_spans: Vec<(usize, usize)>,
}

/// Minimal residual MSE over all depth-`<= k` hierarchical contiguous
/// partitions of the sorted target.
///
/// Contiguity over the sorted order is justified by sorted-split dominance
/// applied recursively; [`best_partition_brute`] re-verifies that premise
/// independently. Supported for `n <= 500`, `k <= 4`.
pub fn optimal_tree_brute(y: &[f64], k: usize) -> Result<OptimalTree, OracleError> {
    let n = y.len();
    if n == 0 || n > 500 {
        return Err(OracleError::SampleSizeOutOfRange { n, min: 1, max: 500 });
    }
    if k > 4 {
        return Err(OracleError::DepthOutOfRange { k, max: 4 });
    }
    let mut sorted = y.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));

    // Segment SSE via prefix sums for the search itself.
    let mut prefix = vec![0.0f64; n + 1];
    let mut prefix_sq = vec![0.0f64; n + 1];
    for (i, &v) in sorted.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
        prefix_sq[i + 1] = prefix_sq[i] + v * v;
    }
    let seg_sse = |i: usize, j: usize| -> f64 {
        let m = (j - i) as f64;
        let s = prefix[j] - prefix[i];
        let sq = prefix_sq[j] - prefix_sq[i];
        (sq - s * s / m).max(0.0)
    };

    // opt[d][i][j] = cheapest SSE for segment [i, j) with depth budget d;
    // cut[d][i][j] = chosen cut, or None for a leaf.
    let idx = |i: usize, j: usize| i * (n + 1) + j;
    let mut opt = vec![vec![0.0f64; (n + 1) * (n + 1)]; k + 1];
    let mut cut = vec![vec![None::<usize>; (n + 1) * (n + 1)]; k + 1];
    for i in 0..n {
        for j in (i + 1)..=n {
            opt[0][idx(i, j)] = seg_sse(i, j);
        }
    }
    for d in 1..=k {
        for i in 0..n {
            for j in (i + 1)..=n {
                let mut best = seg_sse(i, j);
                let mut best_cut = None;
                for m in (i + 1)..j {
                    let cost = opt[d - 1][idx(i, m)] + opt[d - 1][idx(m, j)];
                    if cost < best {
                        best = cost;
                        best_cut = Some(m);
                    }
                }
                opt[d][idx(i, j)] = best;
                cut[d][idx(i, j)] = best_cut;
            }
        }
    }

    // Reconstruct leaf spans, then recompute the final cost by direct
    // summation so the reported value does not depend on the prefix route.
    let mut leaf_spans = Vec::new();
    let mut stack = vec![(0usize, n, k)];
    while let Some((i, j, d)) = stack.pop() {
        match if d == 0 { None } else { cut[d][idx(i, j)] } {
            None => leaf_spans.push((i, j)),
            Some(m) => {
                stack.push((m, j, d - 1));
                stack.push((i, m, d - 1));
            }
        }
    }
    leaf_spans.sort_unstable();
    let residual_sse: f64 = leaf_spans
        .iter()
        .map(|&(i, j)| direct_mean_sse(&sorted[i..j]).1)
        .sum();
    Ok(OptimalTree {
        residual_mse: residual_sse / n as f64,
        leaf_spans,
    })
}

/// Outcome of checking the greedy self-tree against every contiguous
/// hierarchical tree of bounded depth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub n: usize,
    pub depth: usize,
    /// Residual sum of squares of the greedy self-tree.
    pub greedy_rss: f64,
    pub greedy_avg_depth: f64,
    /// Lowest RSS among enumerated trees whose average leaf depth does not
    /// exceed the greedy tree's.
    pub min_rss_at_same_avg_depth: f64,
    /// True when no such tree has strictly lower RSS (beyond round-off).
    pub holds: bool,
    /// Leaf spans over the sorted target of a strictly better tree, when one
    /// exists.
    pub witness_spans: Option<Vec<(usize, usize)>>,
}

/// Exhaustively test whether the greedy self-tree attains the lowest RSS among
/// all contiguous hierarchical trees with average leaf depth at most its own.
///
/// Enumerates every tree of max depth `<= k`, including cuts between equal
/// sorted values, and filters by average depth. Supported for `n <= 16`,
/// `k <= 3`.
pub fn check_conjecture(y: &[f64], k: usize) -> Result<ConjectureReport, OracleError> {
    let n = y.len();
    if n == 0 || n > 16 {
        return Err(OracleError::SampleSizeOutOfRange { n, min: 1, max: 16 });
    }
    if k > 3 {
        return Err(OracleError::DepthOutOfRange { k, max: 3 });
    }
    if k == 0 {
        // Only the bare leaf exists at depth zero.
        let rss = direct_mean_sse(y).1;
        return Ok(ConjectureReport {
            n,
            depth: 0,
            greedy_rss: rss,
            greedy_avg_depth: 0.0,
            min_rss_at_same_avg_depth: rss,
            holds: true,
            witness_spans: None,
        });
    }
    let greedy = tree::fit_self(y, k).expect("validated input");
    // Integer depth weight: sum over leaves of n_leaf * depth. Comparing the
    // integer weights avoids float equality on average depths.
    let greedy_weight: usize = greedy
        .leaves()
        .map(|l| l.n_samples() * l.depth)
        .sum();
    let greedy_rss: f64 = greedy.residual_mse() * n as f64;

    let mut sorted = y.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));

    // Enumerate (rss, depth_weight, leaf spans) of every tree on [i, j).
    type EnumeratedTree = (f64, usize, Vec<(usize, usize)>);
    fn enum_trees(
        sorted: &[f64],
        i: usize,
        j: usize,
        budget: usize,
        out: &mut Vec<EnumeratedTree>,
    ) {
        let seg_sse = direct_mean_sse(&sorted[i..j]).1;
        out.push((seg_sse, 0, vec![(i, j)]));
        if budget == 0 || j - i < 2 {
            return;
        }
        for m in (i + 1)..j {
            let mut lefts = Vec::new();
            enum_trees(sorted, i, m, budget - 1, &mut lefts);
            let mut rights = Vec::new();
            enum_trees(sorted, m, j, budget - 1, &mut rights);
            for (lsse, lw, lspans) in &lefts {
                for (rsse, rw, rspans) in &rights {
                    let mut spans = lspans.clone();
                    spans.extend_from_slice(rspans);
                    out.push((lsse + rsse, (j - i) + lw + rw, spans));
                }
            }
        }
    }
    let mut trees = Vec::new();
    enum_trees(&sorted, 0, n, k, &mut trees);

    let scale = direct_mean_sse(&sorted).1.max(1.0);
    let tol = 1e-9 * scale;
    let mut min_rss = f64::INFINITY;
    let mut witness: Option<Vec<(usize, usize)>> = None;
    for (rss, weight, spans) in trees {
        if weight <= greedy_weight && rss < min_rss {
            min_rss = rss;
            if rss < greedy_rss - tol {
                witness = Some(spans);
            }
        }
    }
    let holds = min_rss >= greedy_rss - tol;
    Ok(ConjectureReport {
        n,
        depth: k,
        greedy_rss,
        greedy_avg_depth: greedy_weight as f64 / n as f64,
        min_rss_at_same_avg_depth: min_rss,
        holds,
        witness_spans: if holds { None } else { witness },
    })
}

/// One counterexample record from a conjecture sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCase {
    pub y: Vec<f64>,
    pub greedy_rss: f64,
    pub greedy_avg_depth: f64,
    pub min_rss_at_same_avg_depth: f64,
    pub witness_spans: Option<Vec<(usize, usize)>>,
}

/// Machine-readable result of a seeded conjecture sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub n_max: usize,
    pub depth: usize,
    pub trials: usize,
    pub seed: u64,
    pub counterexamples: usize,
    pub holds_all: bool,
    /// At most the first ten counterexamples, for inspection.
    pub cases: Vec<SweepCase>,
}

/// Run `trials` seeded conjecture checks over random integer-valued series
/// with `2 <= n <= n_max` and values in `{-2, ..., 4}`.
pub fn conjecture_sweep(
    n_max: usize,
    depth: usize,
    trials: usize,
    seed: u64,
) -> Result<SweepReport, OracleError> {
    if !(2..=16).contains(&n_max) {
        return Err(OracleError::SampleSizeOutOfRange {
            n: n_max,
            min: 2,
            max: 16,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counterexamples = 0;
    let mut cases = Vec::new();
    for _ in 0..trials {
        let n = rng.random_range(2..=n_max);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-2i32..=4) as f64).collect();
        let report = check_conjecture(&y, depth)?;
        if !report.holds {
            counterexamples += 1;
            if cases.len() < 10 {
                cases.push(SweepCase {
                    y,
                    greedy_rss: report.greedy_rss,
                    greedy_avg_depth: report.greedy_avg_depth,
                    min_rss_at_same_avg_depth: report.min_rss_at_same_avg_depth,
                    witness_spans: report.witness_spans,
                });
            }
        }
    }
    Ok(SweepReport {
        n_max,
        depth,
        trials,
        seed,
        counterexamples,
        holds_all: counterexamples == 0,
        cases,
    })
}
