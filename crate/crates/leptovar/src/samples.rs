//! Bundled datasets: a small worked-example panel and a synthetic factor
//! panel for end-to-end runs without external data.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;

/// Eight days of hypothetical percent returns for two factors and one stock,
/// with an outlier return at t = 3. Columns `t`, `f1`, `f2`, `y`.
pub fn eight_day_panel() -> Dataset {
    Dataset::from_columns(vec![
        ("t", vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]),
        ("f1", vec![2.0, 1.8, 5.0, 7.0, 6.0, 4.8, 2.2, 1.0]),
        ("f2", vec![2.0, 6.2, 1.8, 4.0, 6.0, 5.8, 5.0, 1.0]),
        ("y", vec![1.5, -1.0, 4.0, 2.0, 1.0, -0.5, -2.0, 0.0]),
    ])
    .expect("static panel is valid")
}

/// Four-value series whose greedy self-tree isolates the extreme value 4 on
/// the first cut and therefore cannot reach the zero-residual depth-2 tree.
pub const GREEDY_SUBOPTIMAL_SERIES: [f64; 4] = [0.0, -2.0, 4.0, 1.0];

/// Deterministic synthetic daily-returns panel with the schema of a
/// three-factor stock analysis: columns `MEx`, `SMB`, `HML`, `IBM`,
/// 1259 rows, values in percent.
///
/// The generator ties the stock to the market factor so correlations are
/// realistic, but the numbers are synthetic; supply a real panel to reproduce
/// published figures.
pub fn synthetic_factor_panel(seed: u64) -> Dataset {
    const ROWS: usize = 1259;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mex = Vec::with_capacity(ROWS);
    let mut smb = Vec::with_capacity(ROWS);
    let mut hml = Vec::with_capacity(ROWS);
    let mut ibm = Vec::with_capacity(ROWS);
    for _ in 0..ROWS {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let z3: f64 = rng.sample(StandardNormal);
        let z4: f64 = rng.sample(StandardNormal);
        mex.push(0.037 + 1.20 * z1);
        smb.push(-0.018 + 0.59 * (0.15 * z1 + 0.99 * z2));
        hml.push(-0.035 + 0.67 * (0.14 * z1 + 0.21 * z2 + 0.97 * z3));
        ibm.push(0.005 + 1.56 * (0.73 * z1 + 0.05 * z2 + 0.10 * z3 + 0.67 * z4));
    }
    Dataset::from_columns(vec![
        ("MEx", mex),
        ("SMB", smb),
        ("HML", hml),
        ("IBM", ibm),
    ])
    .expect("synthetic panel is valid")
}
