//! Numeric panel ingestion and descriptive statistics.
//!
//! A [`Dataset`] is an immutable collection of equally sized, finite `f64`
//! columns, loaded from delimited text or built in memory. Summary statistics
//! follow the conventions of pandas-style `describe` output: sample standard
//! deviation (`n - 1` denominator) and linearly interpolated quartiles.
//! Tree fitting elsewhere in this crate uses the population (`n`) denominator;
//! the two conventions coexist deliberately.

use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

/// Errors raised while building or querying a [`Dataset`].
#[derive(Debug, Error)]
pub enum DataError {
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("csv parse error: {0}")]
    Csv(#[from] csv::Error),
    #[error(r#"non-numeric cell "{value}" at row {row}, column "{column}""#)]
    NonNumericCell {
        value: String,
        row: usize,
        column: String,
    },
    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error(r#"duplicate column name "{0}""#)]
    DuplicateColumn(String),
    #[error("empty column name")]
    EmptyColumnName,
    #[error("empty dataset")]
    EmptyDataset,
    #[error(r#"column "{column}" has {found} values, expected {expected}"#)]
    ColumnLengthMismatch {
        column: String,
        expected: usize,
        found: usize,
    },
    #[error(r#"non-finite value at row {row}, column "{column}""#)]
    NonFinite { row: usize, column: String },
    #[error(r#"unknown column "{0}""#)]
    UnknownColumn(String),
    #[error(r#"target "{0}" also listed as a feature"#)]
    TargetInFeatures(String),
    #[error(r#"column "{0}" has zero variance"#)]
    ZeroVariance(String),
}

/// Options for [`Dataset::load_csv`].
#[derive(Debug, Clone)]
pub struct CsvOptions {
    /// Field delimiter, comma by default.
    pub delimiter: u8,
    /// Whether the first record is a header row. Defaults to `true`.
    pub has_header: bool,
    /// Name of a column to exclude from the numeric panel (a date or index
    /// column). Matched by name only, never inferred.
    pub index_column: Option<String>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            has_header: true,
            index_column: None,
        }
    }
}

/// Per-column summary statistics in the units of the column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnStats {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for a single value.
    pub std: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

/// Pearson correlation matrix over the columns of a dataset.
///
/// Symmetric with an exact unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }
}

/// Read-only view of a subset of dataset columns, used as the feature matrix
/// for tree fitting.
#[derive(Debug, Clone)]
pub struct FeatureView<'a> {
    names: Vec<String>,
    columns: Vec<&'a [f64]>,
}

impl<'a> FeatureView<'a> {
    /// Build a view over raw column slices. All slices must have equal length.
    pub fn new(names: Vec<String>, columns: Vec<&'a [f64]>) -> Self {
        debug_assert_eq!(names.len(), columns.len());
        if let Some(first) = columns.first() {
            debug_assert!(columns.iter().all(|c| c.len() == first.len()));
        }
        FeatureView { names, columns }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[&'a [f64]] {
        &self.columns
    }

    /// Number of feature columns (possibly zero).
    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

/// An immutable panel of named numeric columns of equal length.
///
/// Invariants enforced at construction: at least one row and one column, all
/// columns equally long, unique non-empty names, every value finite. The
/// struct is immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    n_rows: usize,
}

impl Dataset {
    /// Build a dataset from `(name, values)` pairs, validating all invariants.
    pub fn from_columns<S: Into<String>>(
        pairs: Vec<(S, Vec<f64>)>,
    ) -> Result<Dataset, DataError> {
        let mut names = Vec::with_capacity(pairs.len());
        let mut columns = Vec::with_capacity(pairs.len());
        for (name, values) in pairs {
            names.push(name.into());
            columns.push(values);
        }
        if columns.is_empty() || columns[0].is_empty() {
            return Err(DataError::EmptyDataset);
        }
        let n_rows = columns[0].len();
        for (name, col) in names.iter().zip(&columns) {
            if name.is_empty() {
                return Err(DataError::EmptyColumnName);
            }
            if col.len() != n_rows {
                return Err(DataError::ColumnLengthMismatch {
                    column: name.clone(),
                    expected: n_rows,
                    found: col.len(),
                });
            }
            for (row, v) in col.iter().enumerate() {
                if !v.is_finite() {
                    return Err(DataError::NonFinite {
                        row: row + 1,
                        column: name.clone(),
                    });
                }
            }
        }
        for i in 0..names.len() {
            if names[i + 1..].contains(&names[i]) {
                return Err(DataError::DuplicateColumn(names[i].clone()));
            }
        }
        Ok(Dataset {
            names,
            columns,
            n_rows,
        })
    }

    /// Load a delimited text file into a dataset.
    ///
    /// Every selected cell must parse as a finite 64-bit float; the optional
    /// index column is excluded from the numeric panel. Errors name the
    /// offending cell by 1-based data row and column name.
    pub fn load_csv<P: AsRef<Path>>(path: P, options: &CsvOptions) -> Result<Dataset, DataError> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(DataError::FileNotFound(path.display().to_string()));
        }
        let file = std::fs::File::open(path).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(options.delimiter)
            .has_headers(options.has_header)
            .flexible(true)
            .from_reader(file);

        let names: Vec<String> = if options.has_header {
            let headers = reader.headers()?;
            headers.iter().map(|h| h.trim().to_string()).collect()
        } else {
            Vec::new()
        };

        let mut names = names;
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        let mut row = 0usize;
        for record in reader.records() {
            let record = record?;
            row += 1;
            if names.is_empty() {
                // Headerless input; synthesize c0, c1, ...
                names = (0..record.len()).map(|i| format!("c{i}")).collect();
                columns = vec![Vec::new(); names.len()];
            }
            if record.len() != names.len() {
                return Err(DataError::RaggedRow {
                    row,
                    expected: names.len(),
                    found: record.len(),
                });
            }
            for (j, field) in record.iter().enumerate() {
                let trimmed = field.trim();
                let value: f64 = trimmed.parse().map_err(|_| DataError::NonNumericCell {
                    value: trimmed.to_string(),
                    row,
                    column: names[j].clone(),
                })?;
                if !value.is_finite() {
                    return Err(DataError::NonFinite {
                        row,
                        column: names[j].clone(),
                    });
                }
                columns[j].push(value);
            }
        }
        if row == 0 || names.is_empty() {
            return Err(DataError::EmptyDataset);
        }
        let mut pairs: Vec<(String, Vec<f64>)> = Vec::new();
        for (name, col) in names.into_iter().zip(columns) {
            if options.index_column.as_deref() == Some(name.as_str()) {
                continue;
            }
            pairs.push((name, col));
        }
        Dataset::from_columns(pairs)
    }

    /// Write the dataset as CSV with 17 significant digits per value, which
    /// round-trips every `f64` exactly through [`Dataset::load_csv`].
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<(), DataError> {
        let path = path.as_ref();
        let mut file = std::fs::File::create(path).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut out = String::new();
        out.push_str(&self.names.join(","));
        out.push('\n');
        for row in 0..self.n_rows {
            for (j, col) in self.columns.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&crate::numfmt::exact(col[row]));
            }
            out.push('\n');
        }
        file.write_all(out.as_bytes()).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Column values by name.
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    /// Iterate `(name, values)` pairs in file order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.names
            .iter()
            .map(String::as_str)
            .zip(self.columns.iter().map(Vec::as_slice))
    }

    /// Per-column summary statistics, in column order.
    pub fn describe(&self) -> Vec<(String, ColumnStats)> {
        self.iter()
            .map(|(name, col)| (name.to_string(), column_stats(col)))
            .collect()
    }

    /// Pearson correlation matrix over all columns.
    ///
    /// Fails if any column has zero variance (all values equal).
    pub fn correlations(&self) -> Result<CorrelationMatrix, DataError> {
        for (name, col) in self.iter() {
            let (min, max) = min_max(col);
            if min == max {
                return Err(DataError::ZeroVariance(name.to_string()));
            }
        }
        let k = self.columns.len();
        let means: Vec<f64> = self
            .columns
            .iter()
            .map(|c| c.iter().sum::<f64>() / c.len() as f64)
            .collect();
        let mut values = vec![vec![0.0; k]; k];
        for i in 0..k {
            values[i][i] = 1.0;
            for j in (i + 1)..k {
                let (ci, cj) = (&self.columns[i], &self.columns[j]);
                let mut sxy = 0.0;
                let mut sxx = 0.0;
                let mut syy = 0.0;
                for r in 0..self.n_rows {
                    let dx = ci[r] - means[i];
                    let dy = cj[r] - means[j];
                    sxy += dx * dy;
                    sxx += dx * dx;
                    syy += dy * dy;
                }
                let corr = sxy / (sxx * syy).sqrt();
                values[i][j] = corr;
                values[j][i] = corr;
            }
        }
        Ok(CorrelationMatrix {
            names: self.names.clone(),
            values,
        })
    }

    /// Borrow the target column and a read-only view over feature columns.
    ///
    /// The target may not appear among the features; an empty feature list is
    /// legal (self-regression supplies its own feature).
    pub fn select<'a>(
        &'a self,
        target: &str,
        features: &[&str],
    ) -> Result<(&'a [f64], FeatureView<'a>), DataError> {
        let y = self
            .column(target)
            .ok_or_else(|| DataError::UnknownColumn(target.to_string()))?;
        if features.contains(&target) {
            return Err(DataError::TargetInFeatures(target.to_string()));
        }
        let mut names = Vec::with_capacity(features.len());
        let mut columns = Vec::with_capacity(features.len());
        for &f in features {
            let col = self
                .column(f)
                .ok_or_else(|| DataError::UnknownColumn(f.to_string()))?;
            names.push(f.to_string());
            columns.push(col);
        }
        Ok((y, FeatureView::new(names, columns)))
    }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    let mut min = values[0];
    let mut max = values[0];
    for &v in &values[1..] {
        if v < min {
            min = v;
        }
        if v > max {
            max = v;
        }
    }
    (min, max)
}

fn column_stats(values: &[f64]) -> ColumnStats {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let (min, max) = min_max(values);
    // A constant column has exactly zero spread; skip the two-pass sum so the
    // reported std is 0.0 rather than rounding noise.
    let std = if n < 2 || min == max {
        0.0
    } else {
        let sse = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
        (sse / (n - 1) as f64).sqrt()
    };
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
    ColumnStats {
        count: n,
        mean,
        std,
        min,
        q25: quantile_linear(&sorted, 0.25),
        median: quantile_linear(&sorted, 0.5),
        q75: quantile_linear(&sorted, 0.75),
        max,
    }
}

/// Quantile with linear interpolation between order statistics (the R-7
/// convention used by pandas and numpy defaults).
fn quantile_linear(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use proptest::prelude::*;

    fn write_fixture(dir: &tempfile::TempDir, name: &str, content: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        std::fs::write(&path, content).unwrap();
        path
    }

    const TABLE1_CSV: &str = "\
t,f1,f2,y
1,2.0,2.0,1.5
2,1.8,6.2,-1.0
3,5.0,1.8,4.0
4,7.0,4.0,2.0
5,6.0,6.0,1.0
6,4.8,5.8,-0.5
7,2.2,5.0,-2.0
8,1.0,1.0,0.0
";

    #[test]
    fn load_csv_reads_the_eight_day_panel() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_fixture(&dir, "table1.csv", TABLE1_CSV);
        let ds = Dataset::load_csv(&path, &CsvOptions::default()).unwrap();
        assert_eq!(ds.n_rows(), 8);
        assert_eq!(ds.n_columns(), 4);
        assert_eq!(ds.names(), ["t", "f1", "f2", "y"]);
        assert_eq!(ds, samples::eight_day_panel());
    }

    #[test]
    fn load_csv_skips_a_named_index_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_fixture(&dir, "table1.csv", TABLE1_CSV);
        let options = CsvOptions {
            index_column: Some("t".to_string()),
            ..CsvOptions::default()
        };
        let ds = Dataset::load_csv(&path, &options).unwrap();
        assert_eq!(ds.names(), ["f1", "f2", "y"]);
        assert_eq!(ds.n_rows(), 8);
    }

    #[test]
    fn load_csv_rejects_header_only_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_fixture(&dir, "empty.csv", "a,b,c\n");
        let err = Dataset::load_csv(&path, &CsvOptions::default()).unwrap_err();
        assert!(matches!(err, DataError::EmptyDataset));
        assert_eq!(err.to_string(), "empty dataset");
    }

    #[test]
    fn load_csv_rejects_fully_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_fixture(&dir, "empty.csv", "");
        let err = Dataset::load_csv(&path, &CsvOptions::default()).unwrap_err();
        assert!(matches!(err, DataError::EmptyDataset));
    }

    #[test]
    fn load_csv_names_the_non_numeric_cell() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_fixture(
            &dir,
            "bad.csv",
            "MEx,SMB\n0.1,0.2\n0.3,0.4\n0.5,n/a\n0.7,0.8\n",
        );
        let err = Dataset::load_csv(&path, &CsvOptions::default()).unwrap_err();
        match err {
            DataError::NonNumericCell { row, column, value } => {
                assert_eq!(row, 3);
                assert_eq!(column, "SMB");
                assert_eq!(value, "n/a");
            }
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn load_csv_rejects_ragged_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_fixture(&dir, "ragged.csv", "a,b\n1,2\n3\n");
        let err = Dataset::load_csv(&path, &CsvOptions::default()).unwrap_err();
        match err {
            DataError::RaggedRow {
                row,
                expected,
                found,
            } => {
                assert_eq!((row, expected, found), (2, 2, 1));
            }
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn load_csv_rejects_duplicate_column_names() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_fixture(&dir, "dup.csv", "a,a\n1,2\n");
        let err = Dataset::load_csv(&path, &CsvOptions::default()).unwrap_err();
        assert!(matches!(err, DataError::DuplicateColumn(name) if name == "a"));
    }

    #[test]
    fn load_csv_rejects_missing_file() {
        let err = Dataset::load_csv("/no/such/file.csv", &CsvOptions::default()).unwrap_err();
        assert!(err.to_string().contains("file not found"));
    }

    #[test]
    fn describe_matches_hand_computed_stats_for_y() {
        let ds = samples::eight_day_panel();
        let stats = ds.describe();
        let (name, y) = &stats[3];
        assert_eq!(name, "y");
        assert_eq!(y.count, 8);
        // Hand sum: (1.5 - 1 + 4 + 2 + 1 - 0.5 - 2 + 0) / 8 = 5 / 8.
        assert_eq!(y.mean, 0.625);
        // Sample std over SSE 25.375 with n - 1 = 7.
        assert!((y.std - (25.375f64 / 7.0).sqrt()).abs() < 1e-15);
        assert_eq!(y.min, -2.0);
        assert_eq!(y.max, 4.0);
        // R-7 interpolated quartiles of [-2, -1, -0.5, 0, 1, 1.5, 2, 4].
        assert!((y.q25 - (-0.625)).abs() < 1e-15);
        assert!((y.median - 0.5).abs() < 1e-15);
        assert!((y.q75 - 1.625).abs() < 1e-15);
    }

    #[test]
    fn describe_handles_a_constant_column() {
        let ds = Dataset::from_columns(vec![("c", vec![5.0, 5.0, 5.0, 5.0])]).unwrap();
        let stats = &ds.describe()[0].1;
        assert_eq!(stats.mean, 5.0);
        assert_eq!(stats.std, 0.0);
        assert_eq!(stats.min, 5.0);
        assert_eq!(stats.max, 5.0);
        assert_eq!(stats.median, 5.0);
    }

    #[test]
    fn describe_is_pure() {
        let ds = samples::eight_day_panel();
        assert_eq!(ds.describe(), ds.describe());
    }

    #[test]
    fn correlations_have_exact_unit_diagonal_and_symmetry() {
        let ds = samples::eight_day_panel();
        let corr = ds.correlations().unwrap();
        for i in 0..4 {
            assert_eq!(corr.get(i, i), 1.0);
            for j in 0..4 {
                assert!((corr.get(i, j) - corr.get(j, i)).abs() < 1e-12);
                assert!(corr.get(i, j).abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn correlation_of_affine_columns_is_one() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.5];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        let ds = Dataset::from_columns(vec![("x", x), ("y", y)]).unwrap();
        let corr = ds.correlations().unwrap();
        assert!((corr.get(0, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlations_reject_zero_variance_column() {
        let ds =
            Dataset::from_columns(vec![("a", vec![1.0, 2.0]), ("flat", vec![3.0, 3.0])]).unwrap();
        let err = ds.correlations().unwrap_err();
        assert!(matches!(err, DataError::ZeroVariance(name) if name == "flat"));
    }

    #[test]
    fn select_returns_target_and_feature_view() {
        let ds = samples::eight_day_panel();
        let (y, view) = ds.select("y", &["f1", "f2"]).unwrap();
        assert_eq!(y.len(), 8);
        assert_eq!(view.n_features(), 2);
        assert_eq!(view.names(), ["f1", "f2"]);
    }

    #[test]
    fn select_with_empty_features_is_legal() {
        let ds = samples::eight_day_panel();
        let (y, view) = ds.select("y", &[]).unwrap();
        assert_eq!(y.len(), 8);
        assert!(view.is_empty());
    }

    #[test]
    fn select_rejects_target_among_features() {
        let ds = samples::eight_day_panel();
        let err = ds.select("y", &["y"]).unwrap_err();
        assert!(matches!(err, DataError::TargetInFeatures(name) if name == "y"));
    }

    #[test]
    fn select_rejects_unknown_names() {
        let ds = samples::eight_day_panel();
        assert!(matches!(
            ds.select("nope", &[]).unwrap_err(),
            DataError::UnknownColumn(name) if name == "nope"
        ));
        assert!(matches!(
            ds.select("y", &["nope"]).unwrap_err(),
            DataError::UnknownColumn(name) if name == "nope"
        ));
    }

    #[test]
    fn from_columns_rejects_non_finite_values() {
        let err = Dataset::from_columns(vec![("a", vec![1.0, f64::NAN])]).unwrap_err();
        assert!(matches!(err, DataError::NonFinite { row: 2, .. }));
    }

    #[test]
    fn csv_round_trip_is_exact_for_the_panel() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("panel.csv");
        let ds = samples::eight_day_panel();
        ds.write_csv(&path).unwrap();
        let back = Dataset::load_csv(&path, &CsvOptions::default()).unwrap();
        assert_eq!(ds, back);
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact_for_random_values(
            values in proptest::collection::vec(-1e12f64..1e12, 1..40),
        ) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("roundtrip.csv");
            let ds = Dataset::from_columns(vec![("v", values)]).unwrap();
            ds.write_csv(&path).unwrap();
            let back = Dataset::load_csv(&path, &CsvOptions::default()).unwrap();
            prop_assert_eq!(ds, back);
        }
    }
}
