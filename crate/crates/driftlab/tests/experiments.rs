use driftlab::emit::rows_csv;
use driftlab::experiments::{cell_seed, cmd_composed, cmd_drift_types, cmd_stream_demo, cmd_usage_metric, Condition};
use driftlab::theory::{run_random_suite, verify};
use driftlab::{Experiment, ExperimentConfig};
use driftlab_core::oracle::{Arrow, ImplicationParams};

fn config(experiment: Experiment, datasets: &str, models: &str, reps: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(experiment);
    c.set("datasets", datasets).unwrap();
    c.set("models", models).unwrap();
    c.repetitions = reps;
    c.pool = 4000;
    c.seed = 5;
    c
}

#[test]
fn none_condition_is_ordinary_holdout() {
    let t = cmd_drift_types(&config(Experiment::DriftTypes, "sea", "dt", 10)).unwrap();
    // noise-free SEA has Bayes error 0
    assert!(t.get("sea", "DT", "none").unwrap().mean >= 0.95);
    assert_eq!(t.conditions(), ["none", "real", "virtual", "both"]);
    assert_eq!(t.rows.len(), 40);
    assert_eq!(t.tests.len(), 3);
}

#[test]
fn label_switch_complements_accuracy() {
    let t = cmd_drift_types(&config(Experiment::DriftTypes, "sea sine", "dt gnb", 20)).unwrap();
    for d in ["sea", "sine"] {
        for m in ["DT", "NB"] {
            let none = t.get(d, m, "none").unwrap().mean;
            let real = t.get(d, m, "real").unwrap().mean;
            assert!((real - (1.0 - none)).abs() < 0.02, "{d}/{m}: {none} vs {real}");
        }
    }
}

#[test]
fn runs_are_reproducible_across_thread_counts() {
    let cfg = config(Experiment::Composed, "sea stagger", "knn dt", 6);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| rows_csv(&cmd_composed(&cfg).unwrap()).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(1));
    let mut other = cfg.clone();
    other.seed = 6;
    assert_ne!(one, rows_csv(&cmd_composed(&other).unwrap()).unwrap());
}

#[test]
fn seeds_fan_out() {
    let base = cell_seed(1, 0, "test:D00", 0);
    assert_eq!(base, cell_seed(1, 0, "test:D00", 0));
    for other in [
        cell_seed(2, 0, "test:D00", 0),
        cell_seed(1, 1, "test:D00", 0),
        cell_seed(1, 0, "test:D01", 0),
        cell_seed(1, 0, "test:D00", 1),
    ] {
        assert_ne!(base, other);
    }
}

#[test]
fn conditions_name_their_cells() {
    assert_eq!(Condition::Virtual.test(), (1, 0));
    assert_eq!(Condition::ComposedReal.train(), &[(0, 0), (0, 1)]);
    assert_eq!(Condition::ComposedVirtual.test(), (0, 0));
    assert_eq!(Condition::OtherVirtual.train(), &[(1, 0)]);
}

#[test]
fn composed_windows_and_usage_metric() {
    let t = cmd_usage_metric(&config(Experiment::UsageMetric, "sea", "knn gnb", 8)).unwrap();
    assert_eq!(t.experiment, "usage-metric");
    let none = t.get("sea", "kNN", "none").unwrap().mean;
    let cr = t.get("sea", "kNN", "composed-real").unwrap().mean;
    let cv = t.get("sea", "kNN", "composed-virtual").unwrap().mean;
    assert!(cr < none - 0.2, "{cr} vs {none}");
    assert!((cv - none).abs() < 0.03, "{cv} vs {none}");
    assert!(t.test("sea", "kNN", "composed-real", "other-real").unwrap().mean_a > 0.3);
    assert_eq!(t.metrics.len(), 2);
    assert!(t.metric("sea", "kNN", "usage").is_some());
}

#[test]
fn failed_datasets_are_reported_and_skipped() {
    let cfg = config(Experiment::DriftTypes, "csv:/nonexistent/data.csv sea", "gnb", 3);
    let t = cmd_drift_types(&cfg).unwrap();
    assert_eq!(t.failures.len(), 1);
    assert_eq!(t.failures[0].0, "data");
    assert_eq!(t.datasets(), ["sea"]);
}

#[test]
fn csv_datasets_run_through_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    let mut text = String::from("a,b,class\n");
    for i in 0..400 {
        let a = (i % 20) as f64 / 2.0;
        let b = (i / 20) as f64;
        text.push_str(&format!("{a},{b},{}\n", if a + b > 10.0 { "hi" } else { "lo" }));
    }
    std::fs::write(&data, text).unwrap();
    std::fs::write(dir.path().join("toy.schema"), "col,a,numeric\ncol,b,numeric\ncol,class,label\n").unwrap();
    let spec = format!("csv:{}", data.display());
    let t = cmd_drift_types(&config(Experiment::DriftTypes, &spec, "dt", 4)).unwrap();
    assert!(t.failures.is_empty(), "{:?}", t.failures);
    assert!(t.get("toy", "DT", "none").unwrap().mean > 0.9);
}

#[test]
fn stream_demo_scores_policies() {
    let mut cfg = config(Experiment::StreamDemo, "sea:noise=0.1", "gnb", 2);
    cfg.stream_len = 1200;
    let (t, logs) = cmd_stream_demo(&cfg).unwrap();
    assert_eq!(t.conditions(), ["passive", "active", "hybrid"]);
    assert_eq!(logs.len(), 3);
    let active = t.get("sea:noise=0.1", "NB", "active").unwrap().mean;
    let passive = t.get("sea:noise=0.1", "NB", "passive").unwrap().mean;
    // incremental NB unlearns a label switch slowly without a reset
    assert!(active > passive, "{active} vs {passive}");
    cfg.stream_len = 300;
    assert!(cmd_stream_demo(&cfg).is_err());
}

#[test]
fn theory_suites() {
    let report = verify(true, None, &ImplicationParams::default()).unwrap();
    assert!(report.passed(), "{}", report.summary());
    assert!(report.csv_rows().iter().all(|r| r[1] == "fixture" && r[4] == "pass"));

    let params = ImplicationParams {
        monte_carlo: false,
        ..ImplicationParams::default()
    };
    let suite = run_random_suite(60, 3, &params).unwrap();
    assert_eq!(suite.exact_violations(), 0);
    assert!(suite.failures(Arrow::DiscrepancyBound).is_empty());
    assert_eq!(suite.statistical_agreement(true).total, 0);
    let ids: Vec<String> = suite.csv_rows().into_iter().map(|r| r[0].clone()).collect();
    assert!(ids.iter().all(|i| i.starts_with("random-3-")));
}
