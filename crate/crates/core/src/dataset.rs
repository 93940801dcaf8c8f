//! Loaders for the UCI benchmark files and seeded train/test splitting.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Mt19937;
use crate::Label;

/// On-disk layouts understood by [`load_dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataFormat {
    /// `haberman.data`: 3 integer attributes, class in {1, 2}.
    Haberman,
    /// `data_banknote_authentication.txt`: 4 reals, class in {0, 1}.
    Banknote,
    /// `iris.data`: 4 reals, class name string.
    Iris,
    /// `seeds_dataset.txt`: whitespace separated, 7 reals, class in {1, 2, 3}.
    Seeds,
    /// Comma separated, last column is the label, optional header row.
    GenericCsv,
}

impl DataFormat {
    pub fn name(self) -> &'static str {
        match self {
            DataFormat::Haberman => "haberman",
            DataFormat::Banknote => "banknote",
            DataFormat::Iris => "iris",
            DataFormat::Seeds => "seeds",
            DataFormat::GenericCsv => "generic-csv",
        }
    }

    fn feature_count(self) -> Option<usize> {
        match self {
            DataFormat::Haberman => Some(3),
            DataFormat::Banknote | DataFormat::Iris => Some(4),
            DataFormat::Seeds => Some(7),
            DataFormat::GenericCsv => None,
        }
    }

    /// Class tokens accepted for the integer-labelled formats, in label order.
    fn integer_classes(self) -> Option<&'static [&'static str]> {
        match self {
            DataFormat::Haberman => Some(&["1", "2"]),
            DataFormat::Banknote => Some(&["0", "1"]),
            DataFormat::Seeds => Some(&["1", "2", "3"]),
            _ => None,
        }
    }
}

impl FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haberman" => Ok(DataFormat::Haberman),
            "banknote" => Ok(DataFormat::Banknote),
            "iris" => Ok(DataFormat::Iris),
            "seeds" => Ok(DataFormat::Seeds),
            "generic-csv" | "csv" => Ok(DataFormat::GenericCsv),
            other => Err(Error::InvalidArgument(format!(
                "unknown dataset format `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
    pub label_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, checking row count, dimensionality and label range.
    pub fn new(
        name: impl Into<String>,
        features: Vec<Vec<f64>>,
        labels: Vec<Label>,
        label_names: Vec<String>,
    ) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if let Some(first) = features.first() {
            let dim = first.len();
            if dim == 0 {
                return Err(Error::InvalidArgument(
                    "instances have no attributes".into(),
                ));
            }
            for row in &features {
                if row.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: row.len(),
                    });
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite);
                }
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= label_names.len()) {
            return Err(Error::InvalidArgument(format!(
                "label {bad} out of range for {} classes",
                label_names.len()
            )));
        }
        Ok(Self {
            name: name.into(),
            features,
            labels,
            label_names,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn n_classes(&self) -> usize {
        self.label_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at `indices`, in that order, keeping the class table.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            label_names: self.label_names.clone(),
        }
    }
}

pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let rows = match format {
        DataFormat::Seeds => text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| (i + 1, l.split_whitespace().map(str::to_owned).collect()))
            .collect(),
        _ => read_csv_rows(path, &text)?,
    };
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let dataset_name = match format {
        DataFormat::GenericCsv => name,
        other => other.name().to_owned(),
    };
    parse_rows(path, format, dataset_name, rows)
}

fn read_csv_rows(path: &Path, text: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push((line, record.iter().map(str::to_owned).collect()));
    }
    Ok(rows)
}

fn parse_rows(
    path: &Path,
    format: DataFormat,
    name: String,
    mut rows: Vec<(usize, Vec<String>)>,
) -> Result<Dataset> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    if format == DataFormat::GenericCsv {
        if let Some((_, first)) = rows.first() {
            let numeric = first.len() > 1
                && first[..first.len() - 1]
                    .iter()
                    .all(|f| f.parse::<f64>().is_ok());
            if !numeric {
                rows.remove(0);
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::NoInstances(path.to_path_buf()));
    }

    let width = match format.feature_count() {
        Some(n) => n + 1,
        None => rows[0].1.len(),
    };
    if width < 2 {
        return Err(parse_err(
            rows[0].0,
            "need at least one feature and a label".into(),
        ));
    }

    let mut features = Vec::with_capacity(rows.len());
    let mut tokens = Vec::with_capacity(rows.len());
    for (line, fields) in &rows {
        if fields.len() != width {
            return Err(parse_err(
                *line,
                format!("expected {width} columns, found {}", fields.len()),
            ));
        }
        let row = fields[..width - 1]
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(*line, format!("non-numeric feature `{f}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        features.push(row);
        tokens.push((*line, fields[width - 1].clone()));
    }

    let (labels, label_names) = match format.integer_classes() {
        Some(classes) => {
            let labels = tokens
                .iter()
                .map(|(line, t)| {
                    classes
                        .iter()
                        .position(|c| c == t)
                        .ok_or_else(|| parse_err(*line, format!("unknown class `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            (labels, classes.iter().map(|c| (*c).to_owned()).collect())
        }
        None => encode_labels(tokens.iter().map(|(_, t)| t.as_str())),
    };
    Dataset::new(name, features, labels, label_names)
}

/// Integer labels are ranked ascending; anything else gets first-appearance order.
fn encode_labels<'a>(tokens: impl Iterator<Item = &'a str> + Clone) -> (Vec<Label>, Vec<String>) {
    let all_integer = tokens.clone().all(|t| t.parse::<i64>().is_ok());
    let mut names: Vec<String> = Vec::new();
    if all_integer {
        let mut values: Vec<i64> = tokens.clone().map(|t| t.parse().unwrap()).collect();
        values.sort_unstable();
        values.dedup();
        names = values.iter().map(i64::to_string).collect();
        let index: HashMap<i64, Label> = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        let labels = tokens.map(|t| index[&t.parse::<i64>().unwrap()]).collect();
        return (labels, names);
    }
    let mut index: HashMap<&str, Label> = HashMap::new();
    let labels = tokens
        .map(|t| {
            *index.entry(t).or_insert_with(|| {
                names.push(t.to_owned());
                names.len() - 1
            })
        })
        .collect();
    (labels, names)
}

/// A train/test partition together with the source row indices it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: u32,
    pub test_fraction: f64,
    pub stratified: bool,
}

/// Seeded train/test split.
///
/// One shuffle of all row indices fixes the order of both halves. In
/// stratified mode each class sends `round(test_fraction * class_size)` of
/// its rows to the test side (the earliest ones in shuffled order); otherwise
/// the first `round(test_fraction * len)` shuffled rows are held out.
pub fn split(ds: &Dataset, test_fraction: f64, seed: u32, stratified: bool) -> Result<Split> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidSplit(format!(
            "test fraction {test_fraction} must lie in (0, 1)"
        )));
    }
    let counts = ds.class_counts();
    if let Some(empty) = counts.iter().position(|&c| c == 0) {
        return Err(Error::InvalidSplit(format!(
            "class `{}` has no instances",
            ds.label_names[empty]
        )));
    }

    let mut order: Vec<usize> = (0..ds.len()).collect();
    Mt19937::new(seed).shuffle(&mut order);

    let mut in_test = vec![false; ds.len()];
    if stratified {
        let quota: Vec<usize> = counts
            .iter()
            .map(|&c| (test_fraction * c as f64).round() as usize)
            .collect();
        if let Some(c) = (0..counts.len()).find(|&c| quota[c] >= counts[c]) {
            return Err(Error::InvalidSplit(format!(
                "test fraction {test_fraction} leaves class `{}` without training rows",
                ds.label_names[c]
            )));
        }
        let mut taken = vec![0usize; counts.len()];
        for &row in &order {
            let class = ds.labels[row];
            if taken[class] < quota[class] {
                taken[class] += 1;
                in_test[row] = true;
            }
        }
    } else {
        let n_test = (test_fraction * ds.len() as f64).round() as usize;
        for &row in order.iter().take(n_test) {
            in_test[row] = true;
        }
    }

    let (test_indices, train_indices): (Vec<usize>, Vec<usize>) =
        order.into_iter().partition(|&row| in_test[row]);
    if test_indices.is_empty() {
        return Err(Error::InvalidSplit(format!(
            "test fraction {test_fraction} yields an empty test set"
        )));
    }
    if train_indices.is_empty() {
        return Err(Error::InvalidSplit(format!(
            "test fraction {test_fraction} yields an empty training set"
        )));
    }
    Ok(Split {
        train: ds.subset(&train_indices),
        test: ds.subset(&test_indices),
        train_indices,
        test_indices,
        seed,
        test_fraction,
        stratified,
    })
}

/// Per-feature min-max scaling fitted on one dataset and applied to others.
/// Constant features map to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxScaler {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(ds: &Dataset) -> Self {
        let dim = ds.dim();
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for row in &ds.features {
            for (j, &v) in row.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Self { min, max }
    }

    pub fn transform(&self, ds: &Dataset) -> Dataset {
        let features = ds
            .features
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let span = self.max[j] - self.min[j];
                        if span > 0.0 {
                            (v - self.min[j]) / span
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        Dataset {
            features,
            ..ds.clone()
        }
    }
}
