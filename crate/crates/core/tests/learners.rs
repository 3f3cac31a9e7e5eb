use driftlab_core::learners::{self, Classifier, ErmFinite, GaussianNb, Knn, LearnerKind, LearnerSpec, Perceptron};
use driftlab_core::oracle::FiniteHypothesisClass;
use driftlab_core::*;
use rand::Rng;

fn pt(v: &[f64], y: u8) -> (Instance, Label) {
    (Instance::numeric(v.to_vec()).unwrap(), Label::new(y).unwrap())
}

fn sample(points: Vec<(Instance, Label)>) -> Sample {
    Sample::new(points, Provenance::default()).unwrap()
}

/// Two noisy gaussian-ish blobs in the plane plus one categorical feature.
fn blobs(n: usize, seed: u64) -> Sample {
    let mut r = rng::rng(seed);
    let points = (0..n)
        .map(|_| {
            let y = r.random_bool(0.5);
            let c = if y { 1.0 } else { -1.0 };
            let x = Instance::new(
                vec![c + r.random_range(-1.5..1.5), c + r.random_range(-1.5..1.5)],
                vec![r.random_range(0..3)],
            )
            .unwrap();
            (x, Label::from_bool(y))
        })
        .collect();
    sample(points)
}

fn probe() -> Vec<Instance> {
    (0..15)
        .flat_map(|i| {
            (0..15).map(move |j| {
                Instance::new(vec![-3.0 + 0.4 * i as f64, -3.0 + 0.4 * j as f64], vec![(i + j) as u32 % 3]).unwrap()
            })
        })
        .collect()
}

fn predictions(m: &dyn Classifier, xs: &[Instance]) -> Vec<Label> {
    xs.iter().map(|x| m.predict(x).unwrap()).collect()
}

fn spec(s: &str) -> LearnerSpec {
    s.parse().unwrap()
}

fn all_specs() -> Vec<LearnerSpec> {
    LearnerKind::BENCHMARK
        .iter()
        .map(|k| LearnerSpec::new(*k).with_seed(17))
        .collect()
}

#[test]
fn fits_are_deterministic() {
    let s = blobs(300, 1);
    let xs = probe();
    for sp in all_specs() {
        let a = learners::fit(&sp, &s).unwrap();
        let b = learners::fit(&sp, &s).unwrap();
        assert_eq!(predictions(a.as_ref(), &xs), predictions(b.as_ref(), &xs), "{sp}");
        for x in &xs {
            assert_eq!(a.score(x).unwrap(), b.score(x).unwrap(), "{sp}");
        }
    }
}

#[test]
fn benchmark_learners_beat_chance_and_score_in_range() {
    let train = blobs(600, 2);
    let test = blobs(600, 3);
    for sp in all_specs() {
        let m = learners::fit(&sp, &train).unwrap();
        let acc = learners::accuracy(m.as_ref(), &test).unwrap();
        assert!(acc > 0.75, "{sp}: {acc}");
        for x in probe() {
            let s = m.score(&x).unwrap();
            assert!((0.0..=1.0).contains(&s), "{sp}: {s}");
        }
    }
}

#[test]
fn size_one_ensembles_reduce_to_trees() {
    let s = blobs(400, 4);
    let xs = probe();
    let dt = learners::fit(&spec("dt"), &s).unwrap();
    let want = predictions(dt.as_ref(), &xs);
    for e in ["bagging:trees=1,bootstrap=false", "rf:trees=1,bootstrap=false,max_features=all"] {
        let m = learners::fit(&spec(e), &s).unwrap();
        assert_eq!(predictions(m.as_ref(), &xs), want, "{e}");
    }
    let stump = learners::fit(&spec("dt:depth=1"), &s).unwrap();
    let ada = learners::fit(&spec("adaboost:rounds=1"), &s).unwrap();
    assert_eq!(predictions(ada.as_ref(), &xs), predictions(stump.as_ref(), &xs));
}

#[test]
fn unanimous_adaboost_scores_are_crisp() {
    // separable on one axis: every stump agrees with the first
    let s = sample((0..20).map(|i| pt(&[i as f64], (i >= 10) as u8)).collect());
    let m = learners::fit(&spec("adaboost:rounds=5"), &s).unwrap();
    for i in 0..20 {
        let x = Instance::numeric(vec![i as f64]).unwrap();
        let sc = m.score(&x).unwrap();
        assert!(sc == 0.0 || sc == 1.0, "{sc}");
        assert_eq!(m.predict(&x).unwrap().value(), (i >= 10) as u8);
    }
}

#[test]
fn tree_and_one_nn_recall_training_points() {
    let s = blobs(200, 5);
    let dt = learners::fit(&spec("dt:depth=30,min_leaf=1"), &s).unwrap();
    let nn = learners::fit(&spec("knn:k=1"), &s).unwrap();
    for (x, y) in s.iter() {
        // blobs have no duplicate instances, so leaves can be pure
        assert_eq!(dt.predict(x).unwrap(), *y);
        assert_eq!(nn.predict(x).unwrap(), *y);
    }
}

#[test]
fn knn_buffer_is_fifo() {
    let mut m = Knn::from_spec(&spec("knn:k=1,window=100")).unwrap();
    m.fit(&sample(vec![pt(&[-1.0], 0)])).unwrap();
    for i in 0..101 {
        m.update(&Instance::numeric(vec![i as f64]).unwrap(), Label::ONE).unwrap();
    }
    assert_eq!(m.buffer_len(), 100);
    let first: Vec<f64> = m.buffered().take(2).map(|(x, _)| x.numeric[0]).collect();
    // the fitted point and the first update are gone
    assert_eq!(first, vec![1.0, 2.0]);
}

#[test]
fn gnb_update_at_mean_keeps_mean() {
    let s = sample(vec![pt(&[1.0, 4.0], 1), pt(&[3.0, 8.0], 1), pt(&[0.0, 0.0], 0), pt(&[-2.0, 1.0], 0)]);
    let mut m = GaussianNb::from_spec(&spec("gnb")).unwrap();
    m.fit(&s).unwrap();
    let mean = [m.class_mean(Label::ONE, 0).unwrap(), m.class_mean(Label::ONE, 1).unwrap()];
    assert_eq!(mean, [2.0, 6.0]);
    m.update(&Instance::numeric(mean.to_vec()).unwrap(), Label::ONE).unwrap();
    assert_eq!(m.class_mean(Label::ONE, 0), Some(2.0));
    assert_eq!(m.class_mean(Label::ONE, 1), Some(6.0));
}

#[test]
fn perceptron_separates_two_atoms_and_ignores_correct_points() {
    let s = sample(vec![pt(&[-1.0, 0.0], 0), pt(&[1.0, 0.0], 1)]);
    let mut m = Perceptron::from_spec(&spec("perceptron")).unwrap();
    m.fit(&s).unwrap();
    assert_eq!(learners::accuracy(&m, &s).unwrap(), 1.0);
    let before = m.weights().to_vec();
    m.update(&Instance::numeric(vec![5.0, 0.0]).unwrap(), Label::ONE).unwrap();
    assert_eq!(m.weights(), before.as_slice());
}

#[test]
fn constant_learner_ignores_data() {
    let m = learners::fit(&spec("constant:label=1"), &blobs(50, 6)).unwrap();
    assert!(probe().iter().all(|x| m.predict(x).unwrap().is_one()));
    let m = learners::fit(&spec("constant"), &blobs(50, 7)).unwrap();
    assert!(probe().iter().all(|x| !m.predict(x).unwrap().is_one()));
}

#[test]
fn single_class_samples_predict_that_class() {
    let s = sample((0..30).map(|i| pt(&[i as f64, (i % 7) as f64], 1)).collect());
    for sp in all_specs() {
        let m = learners::fit(&sp, &s).unwrap();
        for i in 0..30 {
            let x = Instance::numeric(vec![i as f64 + 0.5, 3.0]).unwrap();
            assert!(m.predict(&x).unwrap().is_one(), "{sp}");
        }
    }
}

#[test]
fn contract_errors() {
    let s = blobs(40, 8);
    for sp in all_specs() {
        let mut m = learners::build(&sp).unwrap();
        let x = &s.points[0].0;
        assert!(matches!(m.predict(x), Err(Error::NotFitted)), "{sp}");
        assert!(matches!(m.fit(&Sample::default()), Err(Error::EmptySample)), "{sp}");
        m.fit(&s).unwrap();
        assert!(m.is_fitted());
        let wrong = Instance::numeric(vec![0.0]).unwrap();
        assert!(m.predict(&wrong).is_err(), "{sp}");
        let upd = m.update(x, Label::ONE);
        if sp.kind.is_incremental() {
            assert!(upd.is_ok(), "{sp}");
        } else {
            assert!(matches!(upd, Err(Error::Unsupported(_))), "{sp}");
        }
        m.reset();
        assert!(!m.is_fitted());
        assert!(matches!(m.predict(x), Err(Error::NotFitted)), "{sp}");
    }
}

#[test]
fn specs_parse_and_validate() {
    let s = spec("rf:trees=10,depth=10");
    assert_eq!(s.kind, LearnerKind::Rf);
    assert_eq!(s.to_string().parse::<LearnerSpec>().unwrap(), s);
    assert!("knn:k=0".parse::<LearnerSpec>().is_err());
    assert!("knn:depth=3".parse::<LearnerSpec>().is_err());
    assert!("forest".parse::<LearnerSpec>().is_err());
    assert_eq!(spec("knn:k=7,seed=3").seed, 3);
}

fn ce2_d1() -> FiniteDistribution {
    let x = |v: f64| Instance::numeric(vec![v]).unwrap();
    FiniteDistribution::uniform(vec![(x(-1.0), Label::ZERO), (x(0.0), Label::ZERO), (x(1.0), Label::ONE)]).unwrap()
}

#[test]
fn erm_lands_in_the_optimal_cell() {
    let class = FiniteHypothesisClass::thresholds(0, &[-1.0, -0.5, 0.0, 0.5]).unwrap();
    // Only a sample without any x=0 lets θ=−1 tie at zero loss and win on
    // index; that has probability (2/3)^2000.
    let p_cell = 1.0 - (2.0f64 / 3.0).powi(2000);
    assert!(p_cell >= 0.99);
    let d = ce2_d1();
    let hits = (0..200)
        .filter(|&s| {
            let mut m = ErmFinite::with_class(class.clone(), LossFunction::ZeroOne);
            m.fit(&draw_sample(&d, 2000, s).unwrap()).unwrap();
            matches!(m.chosen(), Some((2, _)))
        })
        .count();
    assert_eq!(hits, 200);
}

#[test]
fn erm_excess_loss_shrinks() {
    let x = |v: f64| Instance::numeric(vec![v]).unwrap();
    // posterior rises with x; the best threshold sits between 4 and 5
    let atoms: Vec<Atom> = (0..10)
        .flat_map(|i| {
            let p1 = 0.1 + 0.08 * i as f64;
            [Atom::new(0.1 * (1.0 - p1), x(i as f64), Label::ZERO), Atom::new(0.1 * p1, x(i as f64), Label::ONE)]
        })
        .collect();
    let d = FiniteDistribution::new(atoms).unwrap();
    let class = FiniteHypothesisClass::threshold_grid(0, &[&d]).unwrap();
    let best = class
        .hypotheses()
        .iter()
        .map(|h| expected_loss(h, &d, LossFunction::ZeroOne).unwrap())
        .fold(f64::INFINITY, f64::min);
    let median_excess = |n: usize| {
        let mut e: Vec<f64> = (0..50)
            .map(|s| {
                let mut m = ErmFinite::with_class(class.clone(), LossFunction::ZeroOne);
                m.fit(&draw_sample(&d, n, 1000 + s).unwrap()).unwrap();
                expected_loss(m.chosen().unwrap().1, &d, LossFunction::ZeroOne).unwrap() - best
            })
            .collect();
        e.sort_by(f64::total_cmp);
        (e[24] + e[25]) / 2.0
    };
    let ex: Vec<f64> = [100, 1000, 10_000].into_iter().map(median_excess).collect();
    assert!(ex[2] < 0.01, "{ex:?}");
    assert!(ex[0] >= ex[2], "{ex:?}");
}

#[test]
fn erm_picks_lowest_index_on_ties() {
    let class = FiniteHypothesisClass::thresholds(0, &[0.0, 0.5, 0.9]).unwrap();
    let mut m = ErmFinite::with_class(class, LossFunction::ZeroOne);
    m.fit(&sample(vec![pt(&[-1.0], 0), pt(&[1.0], 1)])).unwrap();
    assert_eq!(m.chosen().unwrap().0, 0);
}
