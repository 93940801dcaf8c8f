//! Accuracy bookkeeping, k/threshold tuning and seeded multi-trial benchmarks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{self, Dataset, MinMaxScaler};
use crate::error::{Error, Result};
use crate::knn::{HullParams, KnnConfig, KnnMode, KnnModel};
use crate::rng::child_seed;
use crate::svm::{self, SvmParams};
use crate::Label;

/// Fraction of matching labels.
pub fn accuracy(predicted: &[Label], truth: &[Label]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::InvalidArgument(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::InvalidArgument("accuracy of an empty set".into()));
    }
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// `confusion[truth][predicted]` counts.
pub fn confusion_matrix(predicted: &[Label], truth: &[Label], n_classes: usize) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0; n_classes]; n_classes];
    for (&p, &t) in predicted.iter().zip(truth) {
        m[t][p] += 1;
    }
    m
}

/// A classifier to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "algo")]
pub enum ClassifierSpec {
    /// `base_seed` of the config is replaced per trial in benchmarks.
    Knn(KnnConfig),
    Svm(SvmParams),
}

impl ClassifierSpec {
    pub fn id(&self) -> &'static str {
        match self {
            ClassifierSpec::Knn(KnnConfig {
                mode: KnnMode::Hull(_),
                ..
            }) => "hull-knn",
            ClassifierSpec::Knn(_) => "knn",
            ClassifierSpec::Svm(_) => "svm",
        }
    }

    pub fn params(&self) -> Params {
        match self {
            ClassifierSpec::Knn(cfg) => Params {
                k: Some(cfg.k),
                threshold: match cfg.mode {
                    KnnMode::Hull(p) => Some(p.threshold),
                    KnnMode::Classic => None,
                },
                point_count: match cfg.mode {
                    KnnMode::Hull(p) => p.point_count,
                    KnnMode::Classic => None,
                },
                gamma: None,
                c: None,
            },
            ClassifierSpec::Svm(p) => Params {
                k: None,
                threshold: None,
                point_count: None,
                gamma: Some(p.gamma),
                c: Some(p.c),
            },
        }
    }

    fn with_seed(self, seed: u32) -> Self {
        match self {
            ClassifierSpec::Knn(cfg) => ClassifierSpec::Knn(KnnConfig {
                base_seed: seed,
                ..cfg
            }),
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub k: Option<usize>,
    pub threshold: Option<f64>,
    pub point_count: Option<usize>,
    pub gamma: Option<f64>,
    pub c: Option<f64>,
}

/// One fitted-and-scored run of a classifier on a fixed train/test pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub predicted: Vec<Label>,
    /// Fraction of test instances with fewer than `k` training points in their hull.
    pub deficit: Option<f64>,
}

pub fn fit_predict(spec: &ClassifierSpec, train: &Dataset, test: &Dataset) -> Result<Outcome> {
    if train.dim() != test.dim() && !test.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            found: test.dim(),
        });
    }
    match spec {
        ClassifierSpec::Knn(cfg) => {
            let model = KnnModel::fit(train.clone(), *cfg)?;
            let pred = model.predict_detailed(&test.features)?;
            let deficit = pred.in_hull.as_ref().map(|counts| {
                let short = counts.iter().filter(|&&c| c < cfg.k).count();
                if counts.is_empty() {
                    0.0
                } else {
                    short as f64 / counts.len() as f64
                }
            });
            Ok(Outcome {
                predicted: pred.labels,
                deficit,
            })
        }
        ClassifierSpec::Svm(params) => {
            let model = svm::train_svm(train, *params)?;
            Ok(Outcome {
                predicted: model.predict(&test.features)?,
                deficit: None,
            })
        }
    }
}

/// `(1 - accuracy on train, 1 - accuracy on validation)` for a model fit on `train`.
pub fn error_rates(
    spec: &ClassifierSpec,
    train: &Dataset,
    validation: &Dataset,
) -> Result<(f64, f64)> {
    if train.is_empty() || validation.is_empty() {
        return Err(Error::InvalidArgument(
            "error rates need non-empty sets".into(),
        ));
    }
    let on_train = fit_predict(spec, train, train)?;
    let on_val = fit_predict(spec, train, validation)?;
    Ok((
        1.0 - accuracy(&on_train.predicted, &train.labels)?,
        1.0 - accuracy(&on_val.predicted, &validation.labels)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub k: usize,
    pub threshold: f64,
    pub seed: u32,
    pub train_error: f64,
    pub validation_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub grid: Vec<GridCell>,
    pub best: (usize, f64),
}

/// Seed of grid cell `(ki, ti)`: substream `ki * |t_grid| + ti` of `base_seed`.
pub fn cell_seed(base_seed: u32, ki: usize, ti: usize, t_len: usize) -> u32 {
    child_seed(base_seed, (ki * t_len + ti) as u64)
}

/// Evaluates hull k-NN on every `(k, threshold)` pair. The best cell has the
/// lowest validation error; ties go to the smaller `k`, then the smaller threshold.
pub fn grid_search(
    train: &Dataset,
    validation: &Dataset,
    k_grid: &[usize],
    t_grid: &[f64],
    template: &HullParams,
    base_seed: u32,
) -> Result<GridResult> {
    if k_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::InvalidArgument(
            "grid search needs non-empty k and threshold grids".into(),
        ));
    }
    let cells: Vec<(usize, usize)> = (0..k_grid.len())
        .flat_map(|ki| (0..t_grid.len()).map(move |ti| (ki, ti)))
        .collect();
    let grid = cells
        .par_iter()
        .map(|&(ki, ti)| {
            let seed = cell_seed(base_seed, ki, ti, t_grid.len());
            let params = HullParams {
                threshold: t_grid[ti],
                ..*template
            };
            let spec = ClassifierSpec::Knn(KnnConfig::hull(k_grid[ki], params, seed));
            let (train_error, validation_error) = error_rates(&spec, train, validation)?;
            Ok(GridCell {
                k: k_grid[ki],
                threshold: t_grid[ti],
                seed,
                train_error,
                validation_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = best_cell(&grid).expect("non-empty grid");
    Ok(GridResult {
        best: (best.k, best.threshold),
        grid,
    })
}

fn best_cell(grid: &[GridCell]) -> Option<&GridCell> {
    grid.iter().min_by(|a, b| {
        a.validation_error
            .total_cmp(&b.validation_error)
            .then(a.k.cmp(&b.k))
            .then(a.threshold.total_cmp(&b.threshold))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl TrialStats {
    pub fn from_accuracies(accuracies: Vec<f64>) -> Self {
        let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
        let min = accuracies.iter().copied().fold(f64::INFINITY, f64::min);
        let max = accuracies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            accuracies,
            mean,
            min,
            max,
        }
    }
}

/// Aggregate result for one classifier over all trials.
///
/// `confusion` and `test_size` pool every trial, so
/// `accuracy == trace(confusion) / test_size`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier_id: String,
    pub params: Params,
    pub accuracy: f64,
    pub confusion: Vec<Vec<usize>>,
    pub test_size: usize,
    pub seed: u32,
    pub trials: TrialStats,
    /// Mean over trials of the fraction of test instances with fewer than `k`
    /// in-hull training points (hull k-NN only).
    pub in_hull_neighbor_deficit: Option<f64>,
    /// Per-trial deficit fractions (hull k-NN only).
    pub trial_deficits: Option<Vec<f64>>,
}

impl EvalReport {
    pub fn confusion_accuracy(&self) -> f64 {
        let trace: usize = (0..self.confusion.len())
            .map(|i| self.confusion[i][i])
            .sum();
        trace as f64 / self.test_size as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkPlan {
    pub trials: usize,
    pub test_fraction: f64,
    pub base_seed: u32,
    pub stratified: bool,
    /// Min-max scale features using training-split statistics.
    pub scale: bool,
}

impl BenchmarkPlan {
    pub fn new(trials: usize, test_fraction: f64, base_seed: u32) -> Self {
        Self {
            trials,
            test_fraction,
            base_seed,
            stratified: true,
            scale: false,
        }
    }

    /// Split seed of trial `t`; hull k-NN in that trial uses the same value as its base seed.
    pub fn trial_seed(&self, t: usize) -> u32 {
        child_seed(self.base_seed, t as u64)
    }
}

/// Runs every classifier on `plan.trials` seeded splits. All classifiers in a
/// trial see the same split. Trials run in parallel; results do not depend
/// on scheduling.
pub fn run_benchmark(
    ds: &Dataset,
    classifiers: &[ClassifierSpec],
    plan: &BenchmarkPlan,
) -> Result<Vec<EvalReport>> {
    if plan.trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    if classifiers.is_empty() {
        return Err(Error::InvalidArgument("no classifiers to benchmark".into()));
    }
    let per_trial: Vec<Vec<(Outcome, Vec<Label>)>> = (0..plan.trials)
        .into_par_iter()
        .map(|t| {
            let seed = plan.trial_seed(t);
            let split = dataset::split(ds, plan.test_fraction, seed, plan.stratified)?;
            let (train, test) = if plan.scale {
                let scaler = MinMaxScaler::fit(&split.train);
                (
                    scaler.transform(&split.train),
                    scaler.transform(&split.test),
                )
            } else {
                (split.train, split.test)
            };
            classifiers
                .iter()
                .map(|spec| {
                    Ok((
                        fit_predict(&spec.with_seed(seed), &train, &test)?,
                        test.labels.clone(),
                    ))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let n_classes = ds.n_classes();
    let reports = classifiers
        .iter()
        .enumerate()
        .map(|(ci, spec)| {
            let mut confusion = vec![vec![0; n_classes]; n_classes];
            let mut test_size = 0;
            let mut accuracies = Vec::with_capacity(plan.trials);
            let mut deficits = Vec::new();
            for trial in &per_trial {
                let (outcome, truth) = &trial[ci];
                let m = confusion_matrix(&outcome.predicted, truth, n_classes);
                for (row, add) in confusion.iter_mut().zip(m) {
                    for (cell, v) in row.iter_mut().zip(add) {
                        *cell += v;
                    }
                }
                test_size += truth.len();
                accuracies.push(accuracy(&outcome.predicted, truth)?);
                if let Some(d) = outcome.deficit {
                    deficits.push(d);
                }
            }
            let trace: usize = (0..n_classes).map(|i| confusion[i][i]).sum();
            let has_deficit = !deficits.is_empty();
            Ok(EvalReport {
                classifier_id: spec.id().to_owned(),
                params: spec.params(),
                accuracy: trace as f64 / test_size as f64,
                confusion,
                test_size,
                seed: plan.base_seed,
                trials: TrialStats::from_accuracies(accuracies),
                in_hull_neighbor_deficit: has_deficit
                    .then(|| deficits.iter().sum::<f64>() / deficits.len() as f64),
                trial_deficits: has_deficit.then_some(deficits),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reports)
}
