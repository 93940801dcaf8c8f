//! Acceptance suite. Runs without the libtest harness so every criterion prints
//! exactly one PASS/FAIL line; the process exits nonzero if any criterion fails.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use hullknn::dataset::{load_dataset, split};
use hullknn::eval::{fit_predict, run_benchmark};
use hullknn::geometry::{collinear3, orientation_det, slope_difference};
use hullknn::lp::{feasible_convex_combination, BOUNDARY_FACTOR, EPS_ALPHA, EPS_GEO};
use hullknn::svm::train_svm;
use hullknn::{
    BenchmarkPlan, ClassifierSpec, Dataset, GateSource, HullParams, KnnConfig, Mt19937, SvmParams,
};
use hullknn_cli::preset;

const TRIALS: usize = 30;
const BASE_SEED: u32 = 20240601;

type Outcome = Result<String, String>;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn load(name: &str) -> (Dataset, &'static preset::Preset) {
    let p = preset::find(&format!("{name}-optimal")).unwrap();
    (load_dataset(data_dir().join(p.file), p.format).unwrap(), p)
}

fn within(limit: Duration, elapsed: Duration) -> Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn mt19937_fidelity() -> Outcome {
    let start = Instant::now();
    let fixture = include_str!("../../core/tests/fixtures/mt19937_seed_5489.txt");
    let expected: Vec<u32> = fixture.lines().map(|l| l.trim().parse().unwrap()).collect();
    let mut rng = Mt19937::new(5489);
    let got: Vec<u32> = (0..1000).map(|_| rng.next_u32()).collect();
    within(Duration::from_secs(1), start.elapsed())?;
    if expected.len() != 1000 {
        return Err(format!("fixture has {} values", expected.len()));
    }
    match (0..1000).find(|&i| got[i] != expected[i]) {
        None => Ok("1000/1000 outputs match".into()),
        Some(i) => Err(format!("draw {i}: {} != {}", got[i], expected[i])),
    }
}

struct MembershipAudit {
    compared: usize,
    mismatches: usize,
    band_skipped: usize,
    inside: usize,
    worst_reconstruction: f64,
    worst_alpha: f64,
    elapsed: Duration,
}

fn membership_audit() -> MembershipAudit {
    let start = Instant::now();
    let mut rng = Mt19937::new(BASE_SEED);
    let mut audit = MembershipAudit {
        compared: 0,
        mismatches: 0,
        band_skipped: 0,
        inside: 0,
        worst_reconstruction: 0.0,
        worst_alpha: 0.0,
        elapsed: Duration::ZERO,
    };
    for _ in 0..1000 {
        let pts: Vec<Vec<f64>> = (0..7)
            .map(|_| {
                vec![
                    rng.uniform(-1.0, 1.0).unwrap(),
                    rng.uniform(-1.0, 1.0).unwrap(),
                ]
            })
            .collect();
        let q = [
            rng.uniform(-1.2, 1.2).unwrap(),
            rng.uniform(-1.2, 1.2).unwrap(),
        ];
        let res = feasible_convex_combination(&pts, &q, EPS_GEO).unwrap();
        let cut = BOUNDARY_FACTOR * EPS_GEO * res.scale;
        if res.residual >= cut / 2.0 && res.residual <= cut * 2.0 {
            audit.band_skipped += 1;
            continue;
        }
        let poly = oracle::convex_hull(&pts.iter().map(|p| [p[0], p[1]]).collect::<Vec<_>>());
        audit.compared += 1;
        if oracle::in_convex_polygon(&poly, q) != res.inside {
            audit.mismatches += 1;
        }
        if res.inside {
            audit.inside += 1;
            let alpha = res.alpha.as_ref().unwrap();
            let neg = alpha.iter().fold(0.0f64, |m, &a| m.max(-a));
            let sum = (alpha.iter().sum::<f64>() - 1.0).abs();
            audit.worst_alpha = audit.worst_alpha.max(neg).max(sum);
            let rel = res.reconstruction_error(&pts, &q).unwrap() / res.scale;
            audit.worst_reconstruction = audit.worst_reconstruction.max(rel);
        }
    }
    audit.elapsed = start.elapsed();
    audit
}

fn hull_soundness(a: &MembershipAudit) -> Outcome {
    within(Duration::from_secs(5), a.elapsed)?;
    if a.mismatches > 0 {
        return Err(format!(
            "{} of {} verdicts disagree with the polygon oracle",
            a.mismatches, a.compared
        ));
    }
    Ok(format!(
        "{}/{} agree, {} in boundary band",
        a.compared, a.compared, a.band_skipped
    ))
}

fn certificate_audit(a: &MembershipAudit) -> Outcome {
    if a.inside == 0 {
        return Err("no inside verdicts to audit".into());
    }
    if a.worst_reconstruction > EPS_GEO {
        return Err(format!(
            "reconstruction error {:e} exceeds 1e-9",
            a.worst_reconstruction
        ));
    }
    if a.worst_alpha > EPS_ALPHA {
        return Err(format!("alpha constraint violated by {:e}", a.worst_alpha));
    }
    Ok(format!(
        "{} certificates, worst relative residual {:e}, worst alpha violation {:e}",
        a.inside, a.worst_reconstruction, a.worst_alpha
    ))
}

fn gate_superset() -> Outcome {
    let start = Instant::now();
    let mut summary = Vec::new();
    for name in ["haberman", "banknote", "iris", "seeds"] {
        let (ds, p) = load(name);
        let s = split(&ds, 0.1, BASE_SEED, true).unwrap();
        let classic = fit_predict(
            &ClassifierSpec::Knn(KnnConfig::classic(p.k)),
            &s.train,
            &s.test,
        )
        .unwrap();
        let params = HullParams {
            gate: GateSource::Enclosing,
            ..HullParams::new(p.threshold)
        };
        let hull = fit_predict(
            &ClassifierSpec::Knn(KnnConfig::hull(p.k, params, BASE_SEED)),
            &s.train,
            &s.test,
        )
        .unwrap();
        if classic.predicted != hull.predicted {
            return Err(format!("{name}: predictions differ"));
        }
        summary.push(format!("{name} {}", s.test.len()));
    }
    within(Duration::from_secs(30), start.elapsed())?;
    Ok(format!("identical predictions ({})", summary.join(", ")))
}

fn optimal_reports(name: &str) -> Vec<hullknn::EvalReport> {
    let (ds, p) = load(name);
    let specs = [
        ClassifierSpec::Knn(KnnConfig::hull(
            p.k,
            HullParams::new(p.threshold),
            BASE_SEED,
        )),
        ClassifierSpec::Knn(KnnConfig::classic(p.k)),
    ];
    run_benchmark(&ds, &specs, &BenchmarkPlan::new(TRIALS, 0.1, BASE_SEED)).unwrap()
}

fn benchmark_sanity() -> Outcome {
    let start = Instant::now();
    let reference_classic = [
        ("haberman", 0.8095),
        ("banknote", 1.0),
        ("iris", 1.0),
        ("seeds", 0.8889),
    ];
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for (name, reference) in reference_classic {
        let reports = optimal_reports(name);
        let (hull, classic) = (reports[0].trials.mean, reports[1].trials.mean);
        lines.push(format!(
            "{name} classic {:.2}% hull {:.2}%",
            100.0 * classic,
            100.0 * hull
        ));
        if (classic - reference).abs() > 0.10 {
            failures.push(format!(
                "{name} classic {:.2}% vs {:.2}%",
                100.0 * classic,
                100.0 * reference
            ));
        }
        if matches!(name, "iris" | "banknote") && (hull - classic).abs() > 0.10 {
            failures.push(format!(
                "{name} hull {:.2}% vs classic {:.2}%",
                100.0 * hull,
                100.0 * classic
            ));
        }
    }
    within(Duration::from_secs(300), start.elapsed())?;
    if failures.is_empty() {
        Ok(lines.join("; "))
    } else {
        Err(failures.join("; "))
    }
}

fn mean_deficit(ds: &Dataset, k: usize, threshold: f64) -> (f64, f64) {
    let spec = ClassifierSpec::Knn(KnnConfig::hull(k, HullParams::new(threshold), BASE_SEED));
    let r = run_benchmark(ds, &[spec], &BenchmarkPlan::new(TRIALS, 0.1, BASE_SEED)).unwrap();
    (r[0].in_hull_neighbor_deficit.unwrap(), r[0].trials.mean)
}

fn threshold_deficit(name: &str) -> Outcome {
    let start = Instant::now();
    let (ds, good) = load(name);
    let poor = preset::find(&format!("{name}-poor")).unwrap();
    let (d_good, a_good) = mean_deficit(&ds, good.k, good.threshold);
    let (d_poor, a_poor) = mean_deficit(&ds, poor.k, poor.threshold);
    within(Duration::from_secs(180), start.elapsed())?;
    let detail = format!(
        "{name} k={} deficit {:.3}% at t={} vs {:.3}% at t={} (accuracy {:.2}% vs {:.2}%)",
        good.k,
        100.0 * d_poor,
        poor.threshold,
        100.0 * d_good,
        good.threshold,
        100.0 * a_poor,
        100.0 * a_good
    );
    if d_poor > d_good {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn collinearity() -> Outcome {
    let start = Instant::now();
    let mut rng = Mt19937::new(BASE_SEED);
    let pt = |rng: &mut Mt19937| {
        [
            rng.uniform(-100.0, 100.0).unwrap(),
            rng.uniform(-100.0, 100.0).unwrap(),
        ]
    };
    let mut worst = 0.0f64;
    for _ in 0..100_000 {
        let (a, b, c) = (pt(&mut rng), pt(&mut rng), pt(&mut rng));
        let det = orientation_det(a, b, c);
        let slope = slope_difference(a, b, c);
        worst = worst.max((det + slope).abs() / (1.0 + det.abs()));
    }
    let mut missed = 0;
    for _ in 0..1000 {
        let (a, d) = (pt(&mut rng), pt(&mut rng));
        let (s, t) = (
            rng.uniform(-3.0, 3.0).unwrap(),
            rng.uniform(-3.0, 3.0).unwrap(),
        );
        let b = [a[0] + s * d[0], a[1] + s * d[1]];
        let c = [a[0] + t * d[0], a[1] + t * d[1]];
        if !collinear3(a, b, c, 1e-12) {
            missed += 1;
        }
    }
    within(Duration::from_secs(1), start.elapsed())?;
    if worst > 1e-9 {
        return Err(format!("forms disagree by {worst:e}"));
    }
    if missed > 0 {
        return Err(format!("{missed} constructed collinear triples rejected"));
    }
    Ok(format!(
        "1e5 triples agree (worst relative gap {worst:e}); 1000/1000 collinear"
    ))
}

fn svm_health() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for name in ["haberman", "banknote", "iris", "seeds"] {
        let (ds, p) = load(name);
        let model = train_svm(&ds, SvmParams::new(p.gamma)).map_err(|e| e.to_string())?;
        let v = model.kkt_violations(&ds, 1e-3);
        if !v.is_empty() {
            return Err(format!(
                "{name}: {} KKT violations, first {:?}",
                v.len(),
                v[0]
            ));
        }
        notes.push(name);
    }

    let mut rng = Mt19937::new(BASE_SEED);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (label, c) in [(0usize, -4.0), (1, 4.0)] {
        for _ in 0..50 {
            features.push(vec![
                c + rng.uniform(-1.0, 1.0).unwrap(),
                c + rng.uniform(-1.0, 1.0).unwrap(),
            ]);
            labels.push(label);
        }
    }
    let blobs = Dataset::new("blobs", features, labels, vec!["a".into(), "b".into()]).unwrap();
    let model = train_svm(&blobs, SvmParams::new(0.1)).unwrap();
    if model.predict(&blobs.features).unwrap() != blobs.labels {
        return Err("separable blobs not fit perfectly".into());
    }

    let xor = Dataset::new(
        "xor",
        vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
        ],
        vec![0, 0, 1, 1],
        vec!["even".into(), "odd".into()],
    )
    .unwrap();
    let model = train_svm(
        &xor,
        SvmParams {
            c: 10.0,
            ..SvmParams::new(1.0)
        },
    )
    .unwrap();
    if model.predict(&xor.features).unwrap() != xor.labels {
        return Err("XOR misclassified".into());
    }
    within(Duration::from_secs(60), start.elapsed())?;
    Ok(format!(
        "KKT clean on {}; blobs 100%; XOR correct",
        notes.join(", ")
    ))
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_hullknn");
    let dir = std::env::temp_dir().join(format!("hullknn-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut artifacts = Vec::new();
    for (i, threads) in ["1", "4"].iter().enumerate() {
        let out = dir.join(format!("run{i}.json"));
        let status = Command::new(exe)
            .args([
                "--preset",
                "seeds-optimal",
                "--trials",
                "30",
                "--output",
                "json",
                "--seed",
            ])
            .arg(BASE_SEED.to_string())
            .arg("--data-dir")
            .arg(data_dir())
            .arg("--out")
            .arg(&out)
            .env("RAYON_NUM_THREADS", threads)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("run {i} exited with {status}"));
        }
        artifacts.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    if artifacts[0] == artifacts[1] {
        Ok(format!(
            "{} identical bytes across 1 and 4 worker threads",
            artifacts[0].len()
        ))
    } else {
        Err("artifacts differ".into())
    }
}

fn main() {
    let audit = membership_audit();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 mt19937 fidelity", Box::new(mt19937_fidelity)),
        (
            "2 hull membership soundness",
            Box::new(|| hull_soundness(&audit)),
        ),
        (
            "3 certificate audit",
            Box::new(|| certificate_audit(&audit)),
        ),
        ("4 gate superset equivalence", Box::new(gate_superset)),
        ("5 benchmark sanity", Box::new(benchmark_sanity)),
        (
            "6a threshold deficit (banknote)",
            Box::new(|| threshold_deficit("banknote")),
        ),
        (
            "6b threshold deficit (seeds)",
            Box::new(|| threshold_deficit("seeds")),
        ),
        ("7 collinearity equivalence", Box::new(collinearity)),
        ("8 svm baseline health", Box::new(svm_health)),
        ("9 determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{:.2?}]", start.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail} [{:.2?}]", start.elapsed());
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
