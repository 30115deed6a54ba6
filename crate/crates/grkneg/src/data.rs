//! Dataset ingestion and the one-class task protocol: delimited-text
//! loading, seeded stratified 70/30 splits, negative-pool subsampling, and
//! standardization referenced to the positive training block.
//!
//! Split seeds derive from SHA-256 over `(dataset, target class, repeat,
//! user seed)`, so every method and every negative budget sees the same
//! split, and negative budgets are nested prefixes of one shuffled pool.

use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::matrix::{Matrix, MatrixError};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown class {0:?}")]
    UnknownClass(String),
    #[error("class {class:?} has {count} samples; need at least 2")]
    TooFewSamples { class: String, count: usize },
    #[error("repeat index {0} out of range (0..5)")]
    BadRepeat(u32),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Which column of a delimited row carries the class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelColumn {
    First,
    Last,
    Index(usize),
}

/// A labeled dataset; `features` is `D x N_tot` with samples as columns.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub features: Matrix,
    /// Dense class index per sample, in first-appearance order of the labels.
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn num_samples(&self) -> usize {
        self.features.cols()
    }

    pub fn dims(&self) -> usize {
        self.features.rows()
    }

    pub fn class_index(&self, name: &str) -> Result<usize, DataError> {
        self.class_names
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| DataError::UnknownClass(name.to_string()))
    }

    pub fn class_count(&self, class: usize) -> usize {
        self.labels.iter().filter(|&&l| l == class).count()
    }
}

/// Load a delimited numeric file with one label column. Commas win if the
/// line contains any; otherwise whitespace splits. No header row and no
/// missing values are accepted.
pub fn load_csv(path: &Path, name: &str, label_col: LabelColumn) -> Result<Dataset, DataError> {
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    let mut ncols = None;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = if line.contains(',') {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        let width = tokens.len();
        if width < 2 {
            return Err(DataError::Parse {
                line: line_no,
                msg: "need at least one feature and a label".into(),
            });
        }
        match ncols {
            None => ncols = Some(width),
            Some(w) if w != width => {
                return Err(DataError::Parse {
                    line: line_no,
                    msg: format!("expected {w} columns, found {width}"),
                })
            }
            _ => {}
        }
        let label_at = match label_col {
            LabelColumn::First => 0,
            LabelColumn::Last => width - 1,
            LabelColumn::Index(i) => {
                if i >= width {
                    return Err(DataError::Parse {
                        line: line_no,
                        msg: format!("label column {i} out of range for {width} columns"),
                    });
                }
                i
            }
        };

        let mut feats = Vec::with_capacity(width - 1);
        for (col, tok) in tokens.iter().enumerate() {
            if col == label_at {
                continue;
            }
            if tok.is_empty() {
                return Err(DataError::Parse {
                    line: line_no,
                    msg: format!("missing value in column {}", col + 1),
                });
            }
            let v: f64 = tok.parse().map_err(|_| DataError::Parse {
                line: line_no,
                msg: format!("non-numeric feature {tok:?} in column {}", col + 1),
            })?;
            if !v.is_finite() {
                return Err(DataError::Parse {
                    line: line_no,
                    msg: format!("non-finite feature in column {}", col + 1),
                });
            }
            feats.push(v);
        }
        let label_tok = tokens[label_at];
        if label_tok.is_empty() {
            return Err(DataError::Parse {
                line: line_no,
                msg: "empty label".into(),
            });
        }
        let class = match class_names.iter().position(|c| c == label_tok) {
            Some(i) => i,
            None => {
                class_names.push(label_tok.to_string());
                class_names.len() - 1
            }
        };
        labels.push(class);
        rows.push(feats);
    }

    if rows.is_empty() {
        return Err(DataError::Invalid(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    let d = rows[0].len();
    let n = rows.len();
    let features = Matrix::from_fn(d, n, |dim, j| rows[j][dim])?;
    Ok(Dataset {
        name: name.to_string(),
        features,
        labels,
        class_names,
    })
}

/// Load a delimited file of numeric features with no label column.
/// Same delimiter rules as [`load_csv`]; returns `D x N` with samples as
/// columns.
pub fn load_features(path: &Path) -> Result<Matrix, DataError> {
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = if line.contains(',') {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        let mut feats = Vec::with_capacity(tokens.len());
        for (col, tok) in tokens.iter().enumerate() {
            let v: f64 = tok.parse().map_err(|_| DataError::Parse {
                line: line_no,
                msg: format!("non-numeric feature {tok:?} in column {}", col + 1),
            })?;
            feats.push(v);
        }
        if let Some(first) = rows.first() {
            if feats.len() != first.len() {
                return Err(DataError::Parse {
                    line: line_no,
                    msg: format!("expected {} columns, found {}", first.len(), feats.len()),
                });
            }
        }
        rows.push(feats);
    }
    if rows.is_empty() {
        return Err(DataError::Invalid(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(Matrix::from_fn(rows[0].len(), rows.len(), |d, j| {
        rows[j][d]
    })?)
}

/// Per-dimension affine transform fitted on the positive training block.
/// Zero standard deviations are replaced by 1 before use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Fit mean and sample standard deviation (denominator N-1) per dimension.
pub fn fit_standardizer(x: &Matrix) -> Standardizer {
    let d = x.rows();
    let n = x.cols();
    let mut mean = vec![0.0; d];
    let mut std = vec![1.0; d];
    for dim in 0..d {
        let m: f64 = (0..n).map(|j| x.get(dim, j)).sum::<f64>() / n as f64;
        mean[dim] = m;
        if n > 1 {
            let ss: f64 = (0..n).map(|j| (x.get(dim, j) - m).powi(2)).sum();
            let s = (ss / (n - 1) as f64).sqrt();
            std[dim] = if s > 0.0 { s } else { 1.0 };
        }
    }
    Standardizer { mean, std }
}

/// Apply `(x - mean) / std` columnwise.
pub fn standardize(x: &Matrix, st: &Standardizer) -> Result<Matrix, DataError> {
    if x.rows() != st.mean.len() {
        return Err(DataError::Matrix(MatrixError::DimensionMismatch {
            expected: format!("{} rows", st.mean.len()),
            got: format!("{} rows", x.rows()),
        }));
    }
    Ok(Matrix::from_fn(x.rows(), x.cols(), |d, j| {
        (x.get(d, j) - st.mean[d]) / st.std[d]
    })?)
}

/// How many negative training samples a subtask may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NegBudget {
    N5,
    N10,
    N20,
    N30,
    All,
}

impl NegBudget {
    pub const ALL_BUDGETS: [NegBudget; 5] = [
        NegBudget::N5,
        NegBudget::N10,
        NegBudget::N20,
        NegBudget::N30,
        NegBudget::All,
    ];

    pub fn limit(self) -> Option<usize> {
        match self {
            NegBudget::N5 => Some(5),
            NegBudget::N10 => Some(10),
            NegBudget::N20 => Some(20),
            NegBudget::N30 => Some(30),
            NegBudget::All => None,
        }
    }
}

impl fmt::Display for NegBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegBudget::All => write!(f, "all"),
            other => write!(f, "{}", other.limit().unwrap()),
        }
    }
}

impl std::str::FromStr for NegBudget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "5" => Ok(NegBudget::N5),
            "10" => Ok(NegBudget::N10),
            "20" => Ok(NegBudget::N20),
            "30" => Ok(NegBudget::N30),
            "all" => Ok(NegBudget::All),
            other => Err(format!(
                "invalid negative budget {other:?} (expected 5|10|20|30|all)"
            )),
        }
    }
}

/// One train/test split of a one-class task, already standardized by the
/// positive-training statistics.
#[derive(Debug, Clone)]
pub struct SplitData {
    pub pos_train: Matrix,
    pub neg_train: Matrix,
    pub pos_test: Matrix,
    pub neg_test: Matrix,
    pub standardizer: Standardizer,
}

/// SHA-256 of the `|`-joined parts, truncated to a little-endian u64.
pub fn derive_seed(parts: &[&str]) -> u64 {
    let joined = parts.join("|");
    let digest = Sha256::digest(joined.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

/// Build the split for `(dataset, target class, repeat)`: per-class shuffled
/// 70/30 partition, one shuffled negative pool shared by every budget (the
/// budget takes a prefix, so budgets are nested), and standardization fitted
/// on the raw positive training columns.
pub fn make_split(
    dataset: &Dataset,
    target_class: usize,
    repeat: u32,
    budget: NegBudget,
    user_seed: u64,
) -> Result<SplitData, DataError> {
    if target_class >= dataset.num_classes() {
        return Err(DataError::UnknownClass(format!(
            "class index {target_class}"
        )));
    }
    if repeat >= 5 {
        return Err(DataError::BadRepeat(repeat));
    }
    for (c, name) in dataset.class_names.iter().enumerate() {
        let count = dataset.class_count(c);
        if count < 2 {
            return Err(DataError::TooFewSamples {
                class: name.clone(),
                count,
            });
        }
    }

    let seed = derive_seed(&[
        "split",
        &dataset.name,
        &dataset.class_names[target_class],
        &repeat.to_string(),
        &user_seed.to_string(),
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut train_by_class: Vec<Vec<usize>> = Vec::with_capacity(dataset.num_classes());
    let mut test_by_class: Vec<Vec<usize>> = Vec::with_capacity(dataset.num_classes());
    for c in 0..dataset.num_classes() {
        let mut idx: Vec<usize> = (0..dataset.num_samples())
            .filter(|&j| dataset.labels[j] == c)
            .collect();
        idx.shuffle(&mut rng);
        let n_train = (idx.len() as f64 * 0.7).floor() as usize;
        train_by_class.push(idx[..n_train].to_vec());
        test_by_class.push(idx[n_train..].to_vec());
    }

    let mut neg_pool: Vec<usize> = Vec::new();
    for (c, train) in train_by_class.iter().enumerate() {
        if c != target_class {
            neg_pool.extend_from_slice(train);
        }
    }
    neg_pool.shuffle(&mut rng);
    let n_neg = budget
        .limit()
        .map_or(neg_pool.len(), |b| b.min(neg_pool.len()));

    let neg_test_idx: Vec<usize> = (0..dataset.num_classes())
        .filter(|&c| c != target_class)
        .flat_map(|c| test_by_class[c].iter().copied())
        .collect();

    let pos_train_raw = dataset
        .features
        .select_columns(&train_by_class[target_class]);
    let standardizer = fit_standardizer(&pos_train_raw);

    let take = |idx: &[usize]| -> Result<Matrix, DataError> {
        standardize(&dataset.features.select_columns(idx), &standardizer)
    };

    Ok(SplitData {
        pos_train: take(&train_by_class[target_class])?,
        neg_train: take(&neg_pool[..n_neg])?,
        pos_test: take(&test_by_class[target_class])?,
        neg_test: take(&neg_test_idx)?,
        standardizer,
    })
}

/// Manifest entry for one bundled benchmark file.
#[derive(Debug, Clone, Copy)]
pub struct DatasetSpec {
    pub name: &'static str,
    pub file: &'static str,
    pub label_col: LabelColumn,
    pub classes: &'static [&'static str],
}

/// One of the bundled one-class tasks.
#[derive(Debug, Clone, Copy)]
pub struct TaskSpec {
    pub id: &'static str,
    pub dataset: &'static str,
    pub target_class: &'static str,
}

/// The six bundled datasets, label-column positions, and class rosters.
pub const BUNDLED_DATASETS: &[DatasetSpec] = &[
    DatasetSpec {
        name: "iris",
        file: "iris.csv",
        label_col: LabelColumn::Last,
        classes: &["Setosa", "Versicolor", "Virginica"],
    },
    DatasetSpec {
        name: "seeds",
        file: "seeds.csv",
        label_col: LabelColumn::Last,
        classes: &["Kama", "Rosa", "Canadian"],
    },
    DatasetSpec {
        name: "ionosphere",
        file: "ionosphere.csv",
        label_col: LabelColumn::Last,
        classes: &["Good", "Bad"],
    },
    DatasetSpec {
        name: "sonar",
        file: "sonar.csv",
        label_col: LabelColumn::Last,
        classes: &["Rock", "Mines"],
    },
    DatasetSpec {
        name: "bankruptcy",
        file: "bankruptcy.csv",
        label_col: LabelColumn::Last,
        classes: &["NoBankruptcy", "Bankruptcy"],
    },
    DatasetSpec {
        name: "happiness",
        file: "happiness.csv",
        label_col: LabelColumn::First,
        classes: &["Unhappy", "Happy"],
    },
];

/// The fourteen bundled one-class tasks (each class of each dataset as the
/// positive class).
pub const BUNDLED_TASKS: &[TaskSpec] = &[
    TaskSpec {
        id: "Iris1",
        dataset: "iris",
        target_class: "Setosa",
    },
    TaskSpec {
        id: "Iris2",
        dataset: "iris",
        target_class: "Versicolor",
    },
    TaskSpec {
        id: "Iris3",
        dataset: "iris",
        target_class: "Virginica",
    },
    TaskSpec {
        id: "Seed1",
        dataset: "seeds",
        target_class: "Kama",
    },
    TaskSpec {
        id: "Seed2",
        dataset: "seeds",
        target_class: "Rosa",
    },
    TaskSpec {
        id: "Seed3",
        dataset: "seeds",
        target_class: "Canadian",
    },
    TaskSpec {
        id: "Ion1",
        dataset: "ionosphere",
        target_class: "Good",
    },
    TaskSpec {
        id: "Ion2",
        dataset: "ionosphere",
        target_class: "Bad",
    },
    TaskSpec {
        id: "Son1",
        dataset: "sonar",
        target_class: "Rock",
    },
    TaskSpec {
        id: "Son2",
        dataset: "sonar",
        target_class: "Mines",
    },
    TaskSpec {
        id: "Bank1",
        dataset: "bankruptcy",
        target_class: "NoBankruptcy",
    },
    TaskSpec {
        id: "Bank2",
        dataset: "bankruptcy",
        target_class: "Bankruptcy",
    },
    TaskSpec {
        id: "Happ1",
        dataset: "happiness",
        target_class: "Unhappy",
    },
    TaskSpec {
        id: "Happ2",
        dataset: "happiness",
        target_class: "Happy",
    },
];

pub fn dataset_spec(name: &str) -> Option<&'static DatasetSpec> {
    BUNDLED_DATASETS.iter().find(|d| d.name == name)
}

pub fn task_spec(id: &str) -> Option<&'static TaskSpec> {
    BUNDLED_TASKS.iter().find(|t| t.id == id)
}

/// Load a bundled dataset from `data_dir` and check its class roster against
/// the manifest.
pub fn load_bundled(data_dir: &Path, spec: &DatasetSpec) -> Result<Dataset, DataError> {
    let ds = load_csv(&data_dir.join(spec.file), spec.name, spec.label_col)?;
    for class in spec.classes {
        ds.class_index(class)?;
    }
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;
    use std::path::PathBuf;

    fn bundled_dir() -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn two_row_csv_round_trips() {
        let f = write_temp("1.5,2.5,a\n-3.0,4.0,b\n");
        let ds = load_csv(f.path(), "toy", LabelColumn::Last).unwrap();
        assert_eq!(ds.dims(), 2);
        assert_eq!(ds.num_samples(), 2);
        assert_eq!(ds.features.col(0), vec![1.5, 2.5]);
        assert_eq!(ds.features.col(1), vec![-3.0, 4.0]);
        assert_eq!(ds.class_names, vec!["a", "b"]);
        assert_eq!(ds.labels, vec![0, 1]);
    }

    #[test]
    fn whitespace_delimited_and_first_label_column() {
        let f = write_temp("x 1 2\ny 3 4\nx 5 6\n");
        let ds = load_csv(f.path(), "toy", LabelColumn::First).unwrap();
        assert_eq!(ds.dims(), 2);
        assert_eq!(ds.labels, vec![0, 1, 0]);
        assert_eq!(ds.features.col(2), vec![5.0, 6.0]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let f = write_temp("1,2,a\n1,x,b\n");
        match load_csv(f.path(), "toy", LabelColumn::Last) {
            Err(DataError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let f = write_temp("1,2,a\n1,2,3,b\n");
        match load_csv(f.path(), "toy", LabelColumn::Last) {
            Err(DataError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bundled_iris_shape() {
        let ds = load_bundled(&bundled_dir(), dataset_spec("iris").unwrap()).unwrap();
        assert_eq!(ds.num_samples(), 150);
        assert_eq!(ds.dims(), 4);
        assert_eq!(ds.num_classes(), 3);
    }

    #[test]
    fn bundled_sonar_shape() {
        let ds = load_bundled(&bundled_dir(), dataset_spec("sonar").unwrap()).unwrap();
        assert_eq!(ds.num_samples(), 208);
        assert_eq!(ds.dims(), 60);
    }

    #[test]
    fn bundled_shapes_match_manifest_table() {
        // (dataset, classes, samples, dims) then per-task positive train counts
        let shapes = [
            ("iris", 3, 150, 4),
            ("seeds", 3, 210, 7),
            ("ionosphere", 2, 351, 32),
            ("sonar", 2, 208, 60),
            ("bankruptcy", 2, 250, 6),
            ("happiness", 2, 143, 6),
        ];
        for (name, c, n, d) in shapes {
            let ds = load_bundled(&bundled_dir(), dataset_spec(name).unwrap()).unwrap();
            assert_eq!(ds.num_classes(), c, "{name} classes");
            assert_eq!(ds.num_samples(), n, "{name} samples");
            assert_eq!(ds.dims(), d, "{name} dims");
        }

        let expected_p = [
            ("Iris1", 35),
            ("Iris2", 35),
            ("Iris3", 35),
            ("Seed1", 49),
            ("Seed2", 49),
            ("Seed3", 49),
            ("Ion1", 157),
            ("Ion2", 88),
            ("Son1", 67),
            ("Son2", 77),
            ("Bank1", 100),
            ("Bank2", 74),
            ("Happ1", 46),
            ("Happ2", 53),
        ];
        for (id, p) in expected_p {
            let task = task_spec(id).unwrap();
            let spec = dataset_spec(task.dataset).unwrap();
            let ds = load_bundled(&bundled_dir(), spec).unwrap();
            let split = make_split(
                &ds,
                ds.class_index(task.target_class).unwrap(),
                0,
                NegBudget::N5,
                0,
            )
            .unwrap();
            assert_eq!(split.pos_train.cols(), p, "{id}");
            assert_eq!(split.neg_train.cols(), 5, "{id}");
        }
    }

    #[test]
    fn split_is_deterministic_and_respects_budget_nesting() {
        let ds = load_bundled(&bundled_dir(), dataset_spec("iris").unwrap()).unwrap();
        let a = make_split(&ds, 0, 2, NegBudget::N10, 0).unwrap();
        let b = make_split(&ds, 0, 2, NegBudget::N10, 0).unwrap();
        assert_eq!(a.pos_train, b.pos_train);
        assert_eq!(a.neg_train, b.neg_train);
        assert_eq!(a.pos_test, b.pos_test);
        assert_eq!(a.neg_test, b.neg_test);

        // budgets are prefixes of one pool
        let small = make_split(&ds, 0, 2, NegBudget::N5, 0).unwrap();
        let all = make_split(&ds, 0, 2, NegBudget::All, 0).unwrap();
        assert_eq!(
            small.neg_train,
            a.neg_train.select_columns(&[0, 1, 2, 3, 4])
        );
        let prefix: Vec<usize> = (0..10).collect();
        assert_eq!(a.neg_train, all.neg_train.select_columns(&prefix));
        assert_eq!(all.neg_train.cols(), 70);
    }

    #[test]
    fn split_partitions_each_class() {
        let ds = load_bundled(&bundled_dir(), dataset_spec("seeds").unwrap()).unwrap();
        let split = make_split(&ds, 1, 4, NegBudget::All, 0).unwrap();
        assert_eq!(split.pos_train.cols(), 49);
        assert_eq!(split.pos_test.cols(), 21);
        assert_eq!(split.neg_train.cols(), 98);
        assert_eq!(split.neg_test.cols(), 42);
    }

    #[test]
    fn standardizer_centers_positive_block() {
        let ds = load_bundled(&bundled_dir(), dataset_spec("iris").unwrap()).unwrap();
        let split = make_split(&ds, 0, 0, NegBudget::N5, 0).unwrap();
        let p = split.pos_train.cols();
        for dim in 0..split.pos_train.rows() {
            let mean: f64 = (0..p).map(|j| split.pos_train.get(dim, j)).sum::<f64>() / p as f64;
            assert!(mean.abs() < 1e-10, "dim {dim} mean {mean}");
            let var: f64 = (0..p)
                .map(|j| (split.pos_train.get(dim, j) - mean).powi(2))
                .sum::<f64>()
                / (p - 1) as f64;
            assert!(
                (var.sqrt() - 1.0).abs() < 1e-10,
                "dim {dim} std {}",
                var.sqrt()
            );
        }
    }

    #[test]
    fn standardize_matches_two_pass_oracle() {
        let x = Matrix::from_rows(&[&[1.0, 2.0, 3.0, 10.0], &[4.0, 4.0, 4.0, 4.0]]).unwrap();
        let st = fit_standardizer(&x);
        let z = standardize(&x, &st).unwrap();
        // explicit two-pass loops
        for dim in 0..2 {
            let vals: Vec<f64> = (0..4).map(|j| x.get(dim, j)).collect();
            let m = vals.iter().sum::<f64>() / 4.0;
            let mut ss = 0.0;
            for v in &vals {
                ss += (v - m) * (v - m);
            }
            let s = (ss / 3.0).sqrt();
            let s = if s > 0.0 { s } else { 1.0 };
            for j in 0..4 {
                assert!((z.get(dim, j) - (vals[j] - m) / s).abs() < 1e-12);
            }
        }
        // constant dimension passes through shifted by its mean
        assert_eq!(z.get(1, 0), 0.0);
        assert_eq!(st.std[1], 1.0);
    }

    #[test]
    fn standardize_rejects_dimension_mismatch() {
        let st = Standardizer {
            mean: vec![0.0; 3],
            std: vec![1.0; 3],
        };
        assert!(standardize(&Matrix::zeros(2, 4), &st).is_err());
    }

    #[test]
    fn make_split_rejects_bad_inputs() {
        let ds = load_bundled(&bundled_dir(), dataset_spec("iris").unwrap()).unwrap();
        assert!(matches!(
            make_split(&ds, 0, 5, NegBudget::N5, 0),
            Err(DataError::BadRepeat(5))
        ));
        assert!(matches!(
            make_split(&ds, 9, 0, NegBudget::N5, 0),
            Err(DataError::UnknownClass(_))
        ));

        let tiny = Dataset {
            name: "tiny".into(),
            features: Matrix::from_rows(&[&[1.0, 2.0, 3.0]]).unwrap(),
            labels: vec![0, 0, 1],
            class_names: vec!["a".into(), "b".into()],
        };
        assert!(matches!(
            make_split(&tiny, 0, 0, NegBudget::N5, 0),
            Err(DataError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn budget_parsing_round_trips() {
        for b in NegBudget::ALL_BUDGETS {
            let s = b.to_string();
            assert_eq!(s.parse::<NegBudget>().unwrap(), b);
        }
        assert!("7".parse::<NegBudget>().is_err());
    }

    #[test]
    fn derive_seed_is_stable_and_distinct() {
        let a = derive_seed(&["split", "iris", "Setosa", "0", "0"]);
        let b = derive_seed(&["split", "iris", "Setosa", "0", "0"]);
        let c = derive_seed(&["split", "iris", "Setosa", "1", "0"]);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
