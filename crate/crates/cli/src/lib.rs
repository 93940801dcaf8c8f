//! Command-line benchmark harness.
//!
//! `run` parses flags, loads a dataset, evaluates the requested classifiers over
//! seeded splits and writes a markdown, csv or json report.

pub mod preset;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use hullknn::dataset::{load_dataset, split};
use hullknn::eval::{grid_search, run_benchmark};
use hullknn::rng::child_seed;
use hullknn::{
    BenchmarkPlan, BoxMode, ClassifierSpec, DataFormat, Dataset, Error, GateSource, HullParams,
    KnnConfig, SvmParams, VotePolicy,
};

use crate::report::{
    emit_grid, emit_table, Artifact, DatasetInfo, GridArtifact, Metadata, OutputFormat,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    HullKnn,
    Knn,
    Svm,
}

#[derive(Debug, Parser)]
#[command(
    name = "hullknn",
    version,
    about = "Benchmark hull-gated k-NN against classic k-NN and an RBF SVM"
)]
pub struct Args {
    /// Dataset file. Defaults to the preset's file under --data-dir.
    #[arg(long, value_name = "PATH")]
    pub dataset: Option<PathBuf>,
    /// haberman, banknote, iris, seeds or generic-csv. Inferred from the file name when omitted.
    #[arg(long, value_name = "NAME")]
    pub format: Option<String>,
    #[arg(long, value_enum, value_delimiter = ',', value_name = "LIST")]
    pub algo: Vec<Algo>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// SVM box constraint.
    #[arg(long = "c", default_value_t = 1.0)]
    pub c: f64,
    /// Hull points per test instance (default 4n-1).
    #[arg(long = "points")]
    pub points: Option<usize>,
    #[arg(long, default_value_t = 5489)]
    pub seed: u32,
    #[arg(long, default_value_t = 0.1)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Resample each hyperstructure until its hull contains the test instance.
    #[arg(long)]
    pub ensure_enclosure: bool,
    /// Only in-hull neighbors vote.
    #[arg(long)]
    pub hull_only: bool,
    /// Min-max scale features with training-split statistics.
    #[arg(long)]
    pub scale: bool,
    /// Random split instead of a stratified one.
    #[arg(long)]
    pub unstratified: bool,
    /// Sample each coordinate within its own expanded interval.
    #[arg(long)]
    pub per_dimension_box: bool,
    /// Gate with a hull enclosing the whole training set.
    #[arg(long)]
    pub enclosing_hull: bool,
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Run a k/threshold grid search instead of a benchmark.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub grid_k: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub grid_threshold: Vec<f64>,
    /// Share of the training split held out for grid validation.
    #[arg(long, default_value_t = 0.2)]
    pub validation_fraction: f64,
    #[arg(long, default_value = "data", value_name = "DIR")]
    pub data_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Markdown)]
    pub output: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::NoInstances(_)
            | Error::InvalidSplit(_) => Failure::Data(e.to_string()),
            Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

/// Fully resolved run: every preset default applied and every flag checked.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub path: PathBuf,
    pub format: DataFormat,
    pub preset: Option<String>,
    pub classifiers: Vec<ClassifierSpec>,
    pub hull: Option<HullParams>,
    pub k: Option<usize>,
    pub plan: BenchmarkPlan,
    pub grid: Option<(Vec<usize>, Vec<f64>)>,
}

fn infer_format(path: &Path) -> DataFormat {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().to_lowercase())
        .unwrap_or_default();
    if name.starts_with("haberman") {
        DataFormat::Haberman
    } else if name.contains("banknote") {
        DataFormat::Banknote
    } else if name.starts_with("iris") {
        DataFormat::Iris
    } else if name.starts_with("seeds") {
        DataFormat::Seeds
    } else {
        DataFormat::GenericCsv
    }
}

pub fn resolve(args: &Args) -> Result<RunConfig, Failure> {
    let preset = match &args.preset {
        Some(name) => Some(preset::find(name).ok_or_else(|| {
            Failure::Usage(format!(
                "unknown preset `{name}` (expected one of {})",
                preset::names().join(", ")
            ))
        })?),
        None => None,
    };
    let path = match (&args.dataset, preset) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => args.data_dir.join(p.file),
        (None, None) => {
            return Err(Failure::Usage(
                "either --dataset or --preset is required".into(),
            ))
        }
    };
    let format = match (&args.format, preset) {
        (Some(f), _) => f
            .parse::<DataFormat>()
            .map_err(|e| Failure::Data(e.to_string()))?,
        (None, Some(p)) if args.dataset.is_none() => p.format,
        _ => infer_format(&path),
    };

    let k = args.k.or(preset.map(|p| p.k));
    let threshold = args.threshold.or(preset.map(|p| p.threshold));
    let gamma = args.gamma.or(preset.map(|p| p.gamma));

    let mut algos: Vec<Algo> = Vec::new();
    let requested = if args.algo.is_empty() {
        vec![Algo::HullKnn, Algo::Knn, Algo::Svm]
    } else {
        args.algo.clone()
    };
    for a in requested {
        if !algos.contains(&a) {
            algos.push(a);
        }
    }

    let grid = match (args.grid_k.is_empty(), args.grid_threshold.is_empty()) {
        (true, true) => None,
        (false, false) => Some((args.grid_k.clone(), args.grid_threshold.clone())),
        _ => {
            return Err(Failure::Usage(
                "--grid-k and --grid-threshold must be given together".into(),
            ))
        }
    };

    let hull_wanted = algos.contains(&Algo::HullKnn) || grid.is_some();
    let hull = if hull_wanted {
        let t = match (threshold, &grid) {
            (Some(t), _) => t,
            (None, Some((_, ts))) => ts[0],
            (None, None) => return Err(Failure::Usage("hull-knn requires --threshold".into())),
        };
        if !(t.is_finite() && t >= 0.0) {
            return Err(Failure::Usage(format!(
                "--threshold must be a finite non-negative number, got {t}"
            )));
        }
        Some(HullParams {
            point_count: args.points,
            box_mode: if args.per_dimension_box {
                BoxMode::PerDimension
            } else {
                BoxMode::Shared
            },
            ensure_enclosure: args.ensure_enclosure,
            vote: if args.hull_only {
                VotePolicy::HullOnly
            } else {
                VotePolicy::Literal
            },
            gate: if args.enclosing_hull {
                GateSource::Enclosing
            } else {
                GateSource::Random
            },
            ..HullParams::new(t)
        })
    } else {
        None
    };
    if args.points == Some(0) {
        return Err(Failure::Usage("--points must be positive".into()));
    }

    let mut classifiers = Vec::new();
    if grid.is_none() {
        for a in &algos {
            let spec = match a {
                Algo::HullKnn | Algo::Knn => {
                    let k =
                        k.ok_or_else(|| Failure::Usage(format!("{} requires --k", algo_name(*a))))?;
                    if k == 0 {
                        return Err(Failure::Usage("--k must be positive".into()));
                    }
                    if *a == Algo::Knn {
                        ClassifierSpec::Knn(KnnConfig::classic(k))
                    } else {
                        ClassifierSpec::Knn(KnnConfig::hull(
                            k,
                            hull.expect("resolved above"),
                            args.seed,
                        ))
                    }
                }
                Algo::Svm => {
                    let gamma =
                        gamma.ok_or_else(|| Failure::Usage("svm requires --gamma".into()))?;
                    if !(gamma.is_finite() && gamma > 0.0) {
                        return Err(Failure::Usage(format!(
                            "--gamma must be positive, got {gamma}"
                        )));
                    }
                    if !(args.c.is_finite() && args.c > 0.0) {
                        return Err(Failure::Usage(format!(
                            "--c must be positive, got {}",
                            args.c
                        )));
                    }
                    ClassifierSpec::Svm(SvmParams {
                        c: args.c,
                        ..SvmParams::new(gamma)
                    })
                }
            };
            classifiers.push(spec);
        }
    }

    if args.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    if !(args.test_fraction > 0.0 && args.test_fraction < 1.0) {
        return Err(Failure::Usage(format!(
            "--test-fraction must lie in (0, 1), got {}",
            args.test_fraction
        )));
    }
    if !(args.validation_fraction > 0.0 && args.validation_fraction < 1.0) {
        return Err(Failure::Usage(format!(
            "--validation-fraction must lie in (0, 1), got {}",
            args.validation_fraction
        )));
    }
    let plan = BenchmarkPlan {
        stratified: !args.unstratified,
        scale: args.scale,
        ..BenchmarkPlan::new(args.trials, args.test_fraction, args.seed)
    };

    Ok(RunConfig {
        path,
        format,
        preset: preset.map(|p| p.name.to_string()),
        classifiers,
        hull,
        k,
        plan,
        grid,
    })
}

fn algo_name(a: Algo) -> &'static str {
    match a {
        Algo::HullKnn => "hull-knn",
        Algo::Knn => "knn",
        Algo::Svm => "svm",
    }
}

fn metadata(args: &Args, cfg: &RunConfig, ds: &Dataset) -> Metadata {
    let mut assumptions = Vec::new();
    for spec in &cfg.classifiers {
        if let ClassifierSpec::Svm(p) = spec {
            assumptions.push(format!(
                "svm: RBF kernel exp(-gamma*|a-b|^2), C={}, SMO tol={}, at most {} iterations per training point, one-vs-one voting",
                p.c, p.tol, p.max_passes
            ));
        }
    }
    if cfg.hull.is_some() {
        assumptions.push(
            "hull-knn: hyperstructure seed of trial t equals that trial's split seed; instance i uses substream i".into(),
        );
    }
    assumptions.push("split seed of trial t: substream t of the base seed".into());
    Metadata {
        dataset: DatasetInfo {
            name: ds.name.clone(),
            path: cfg.path.display().to_string(),
            format: cfg.format.name().to_string(),
            instances: ds.len(),
            features: ds.dim(),
            classes: ds.n_classes(),
        },
        preset: cfg.preset.clone(),
        seed: cfg.plan.base_seed,
        test_fraction: cfg.plan.test_fraction,
        trials: cfg.plan.trials,
        stratified: cfg.plan.stratified,
        scale: cfg.plan.scale,
        point_count: args.points,
        ensure_enclosure: args.ensure_enclosure,
        hull_only: args.hull_only,
        per_dimension_box: args.per_dimension_box,
        enclosing_hull: args.enclosing_hull,
        assumptions,
    }
}

fn execute(args: &Args) -> Result<String, Failure> {
    let cfg = resolve(args)?;
    if !cfg.path.exists() {
        return Err(Failure::Data(format!(
            "dataset file not found: {}",
            cfg.path.display()
        )));
    }
    let ds = load_dataset(&cfg.path, cfg.format)?;
    let meta = metadata(args, &cfg, &ds);

    if let Some((k_grid, t_grid)) = &cfg.grid {
        let outer = split(
            &ds,
            cfg.plan.test_fraction,
            cfg.plan.trial_seed(0),
            cfg.plan.stratified,
        )?;
        let inner = split(
            &outer.train,
            args.validation_fraction,
            child_seed(cfg.plan.trial_seed(0), 1),
            cfg.plan.stratified,
        )?;
        let (train, val) = if cfg.plan.scale {
            let s = hullknn::MinMaxScaler::fit(&inner.train);
            (s.transform(&inner.train), s.transform(&inner.test))
        } else {
            (inner.train, inner.test)
        };
        let template = cfg.hull.expect("grid implies hull params");
        let result = grid_search(&train, &val, k_grid, t_grid, &template, cfg.plan.base_seed)?;
        let artifact = GridArtifact {
            metadata: meta,
            validation_fraction: args.validation_fraction,
            train_size: train.len(),
            validation_size: val.len(),
            result,
        };
        return Ok(emit_grid(&artifact, args.output));
    }

    let reports = run_benchmark(&ds, &cfg.classifiers, &cfg.plan)?;
    Ok(emit_table(
        &Artifact {
            metadata: meta,
            reports,
        },
        args.output,
    ))
}

fn write_output(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            Failure::Runtime(format!("cannot write report to {}: {e}", path.display()))
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Runtime(format!("cannot write report: {e}")))
        }
    }
}

/// Entry point shared by the binary and the tests. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&args).and_then(|text| write_output(&text, args.out.as_deref())) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("hullknn: {}", f.message());
            f.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(extra: &[&str]) -> Args {
        Args::try_parse_from(std::iter::once("hullknn").chain(extra.iter().copied())).unwrap()
    }

    #[test]
    fn preset_resolves_table_values() {
        let cfg = resolve(&parse(&["--preset", "haberman-optimal"])).unwrap();
        assert_eq!(cfg.format, DataFormat::Haberman);
        assert_eq!(cfg.path, PathBuf::from("data/haberman.data"));
        let params: Vec<_> = cfg.classifiers.iter().map(|c| c.params()).collect();
        assert_eq!(params[0].k, Some(15));
        assert_eq!(params[0].threshold, Some(1.75));
        assert_eq!(params[1].threshold, None);
        assert_eq!(params[2].gamma, Some(1e-3));
    }

    #[test]
    fn explicit_flags_override_preset() {
        let cfg = resolve(&parse(&[
            "--preset",
            "iris-poor",
            "--k",
            "3",
            "--algo",
            "hull-knn",
        ]))
        .unwrap();
        assert_eq!(cfg.classifiers.len(), 1);
        assert_eq!(cfg.classifiers[0].params().k, Some(3));
        assert_eq!(cfg.classifiers[0].params().threshold, Some(15.0));
    }

    #[test]
    fn missing_parameters_are_usage_errors() {
        let err = resolve(&parse(&[
            "--dataset",
            "x.csv",
            "--algo",
            "hull-knn",
            "--k",
            "3",
        ]))
        .unwrap_err();
        assert_eq!(err.code(), EXIT_USAGE);
        let err = resolve(&parse(&["--dataset", "x.csv", "--algo", "svm"])).unwrap_err();
        assert_eq!(err.code(), EXIT_USAGE);
        let err = resolve(&parse(&["--dataset", "x.csv", "--grid-k", "1,3"])).unwrap_err();
        assert_eq!(err.code(), EXIT_USAGE);
        assert!(resolve(&parse(&["--dataset", "x.csv", "--algo", "knn", "--k", "3"])).is_ok());
    }

    #[test]
    fn unknown_format_is_data_error() {
        let err = resolve(&parse(&[
            "--dataset",
            "x",
            "--format",
            "arff",
            "--algo",
            "knn",
            "--k",
            "1",
        ]))
        .unwrap_err();
        assert_eq!(err.code(), EXIT_DATA);
    }

    #[test]
    fn format_inferred_from_file_name() {
        assert_eq!(
            infer_format(Path::new("a/seeds_dataset.txt")),
            DataFormat::Seeds
        );
        assert_eq!(
            infer_format(Path::new("data_banknote_authentication.txt")),
            DataFormat::Banknote
        );
        assert_eq!(infer_format(Path::new("other.csv")), DataFormat::GenericCsv);
    }
}
