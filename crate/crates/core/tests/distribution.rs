use approx::assert_abs_diff_eq;
use driftlab_core::oracle::Hypothesis;
use driftlab_core::process::TimePoint;
use driftlab_core::types::FnPredictor;
use driftlab_core::*;
use proptest::prelude::*;

fn x(v: f64) -> Instance {
    Instance::numeric(vec![v]).unwrap()
}

fn y(v: u8) -> Label {
    Label::new(v).unwrap()
}

fn dirac(v: f64, l: u8) -> FiniteDistribution {
    FiniteDistribution::dirac(x(v), y(l))
}

fn dist(spec: &[(f64, f64, u8)]) -> FiniteDistribution {
    FiniteDistribution::normalized(spec.iter().map(|&(w, v, l)| Atom::new(w, x(v), y(l))).collect()).unwrap()
}

fn ce2_d2() -> FiniteDistribution {
    dist(&[(1.0, -1.0, 0), (1.0, 0.0, 1), (1.0, 1.0, 1)])
}

#[test]
fn mean_distribution_examples() {
    let single = DriftProcess::uniform(vec![ce2_d2()]).unwrap();
    let m = mean_distribution(&single, &TimeWindow::single(0)).unwrap();
    assert!(m.total_variation(&ce2_d2()) < 1e-12);

    let p = DriftProcess::new(vec![
        TimePoint {
            probability: 0.25,
            dist: dirac(0.0, 0),
        },
        TimePoint {
            probability: 0.75,
            dist: dirac(1.0, 1),
        },
    ])
    .unwrap();
    let m = mean_distribution(&p, &TimeWindow::new([0, 1]).unwrap()).unwrap();
    let want = dist(&[(0.25, 0.0, 0), (0.75, 1.0, 1)]);
    assert!(m.total_variation(&want) < 1e-12);
    let sum: f64 = m.atoms().iter().map(|a| a.weight).sum();
    assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);

    assert!(matches!(
        mean_distribution(&p, &TimeWindow::single(2)),
        Err(Error::Domain(_))
    ));
}

#[test]
fn expected_loss_examples() {
    let d = dist(&[(1.0, 0.0, 0), (1.0, 1.0, 1)]);
    let perfect = Hypothesis::greater(0.5);
    assert_eq!(expected_loss(&perfect, &d, LossFunction::ZeroOne).unwrap(), 0.0);
    let zero = Hypothesis::Constant(0.0);
    assert_abs_diff_eq!(expected_loss(&zero, &d, LossFunction::ZeroOne).unwrap(), 0.5, epsilon = 1e-12);
    let lin = Hypothesis::Linear {
        weights: vec![1.0, 1.0],
        bias: 0.0,
    };
    assert!(expected_loss(&lin, &d, LossFunction::ZeroOne).is_err());
}

#[test]
fn empirical_loss_examples() {
    let s = Sample::new(vec![(x(0.0), y(0)); 7], Provenance::default()).unwrap();
    assert_eq!(empirical_loss(&Hypothesis::Constant(0.0), &s, LossFunction::ZeroOne).unwrap(), 0.0);
    let s = Sample::new(vec![(x(0.0), y(0)), (x(0.0), y(1))], Provenance::default()).unwrap();
    assert_eq!(empirical_loss(&Hypothesis::Constant(0.0), &s, LossFunction::ZeroOne).unwrap(), 0.5);
    let empty = Sample::default();
    assert!(empirical_loss(&Hypothesis::Constant(0.0), &empty, LossFunction::ZeroOne).is_err());

    let big = draw_sample(&ce2_d2(), 100_000, 5).unwrap();
    let l = empirical_loss(&Hypothesis::greater(0.5), &big, LossFunction::ZeroOne).unwrap();
    assert!((l - 1.0 / 3.0).abs() < 0.01, "{l}");
}

#[test]
fn draw_sample_examples() {
    let s = draw_sample(&dirac(2.0, 1), 50, 1).unwrap();
    assert_eq!(s.len(), 50);
    assert!(s.iter().all(|(xi, yi)| xi.same_point(&x(2.0)) && yi.is_one()));

    let d = dist(&[(1.0, 0.0, 0), (1.0, 1.0, 1)]);
    let s = draw_sample(&d, 100_000, 9).unwrap();
    let ones = s.iter().filter(|(_, l)| l.is_one()).count() as f64 / 1e5;
    assert!((ones - 0.5).abs() < 0.01, "{ones}");
    assert_eq!(s, draw_sample(&d, 100_000, 9).unwrap());
    assert!(draw_sample(&d, 0, 9).is_err());
}

#[test]
fn distribution_drift_examples() {
    let same = DriftProcess::uniform(vec![ce2_d2(), ce2_d2()]).unwrap();
    assert!(!has_distribution_drift(&same, 1e-9));
    let d1 = dist(&[(1.0, -1.0, 0), (1.0, 0.0, 0), (1.0, 1.0, 1)]);
    assert!(has_distribution_drift(&DriftProcess::uniform(vec![d1, ce2_d2()]).unwrap(), 1e-9));
    let reordered = dist(&[(1.0, 1.0, 1), (0.5, 0.0, 1), (1.0, -1.0, 0), (0.5, 0.0, 1)]);
    assert!(!has_distribution_drift(&DriftProcess::uniform(vec![ce2_d2(), reordered]).unwrap(), 1e-9));
}

#[test]
fn process_text_round_trip() {
    let p = DriftProcess::uniform(vec![ce2_d2(), dirac(0.5, 0)]).unwrap();
    let back = DriftProcess::from_text(&p.to_text()).unwrap();
    for t in 0..2 {
        let a = mean_distribution(&p, &TimeWindow::single(t)).unwrap();
        let b = mean_distribution(&back, &TimeWindow::single(t)).unwrap();
        assert!(a.total_variation(&b) < 1e-12);
    }
    assert!(DriftProcess::from_text("t=0 p_t=1 w=1 x=0 y=2").is_err());
}

#[test]
fn empirical_loss_converges_in_median() {
    let d = ce2_d2();
    let h = Hypothesis::greater(0.5);
    let truth = expected_loss(&h, &d, LossFunction::ZeroOne).unwrap();
    let median_err = |n: usize| {
        let mut e: Vec<f64> = (0..50)
            .map(|s| (empirical_loss(&h, &draw_sample(&d, n, s).unwrap(), LossFunction::ZeroOne).unwrap() - truth).abs())
            .collect();
        e.sort_by(f64::total_cmp);
        (e[24] + e[25]) / 2.0
    };
    let errs: Vec<f64> = [100, 1000, 10_000].into_iter().map(median_err).collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

fn arb_dist() -> impl Strategy<Value = FiniteDistribution> {
    prop::collection::vec((1u32..24, 0u8..10, any::<bool>()), 1..7).prop_map(|atoms| {
        FiniteDistribution::normalized(
            atoms
                .into_iter()
                .map(|(w, v, l)| Atom::new(w as f64, x(v as f64), Label::from_bool(l)))
                .collect(),
        )
        .unwrap()
    })
}

fn arb_process() -> impl Strategy<Value = DriftProcess> {
    prop::collection::vec((1u32..24, arb_dist()), 1..5).prop_map(|tps| {
        let total: f64 = tps.iter().map(|t| t.0 as f64).sum();
        DriftProcess::new(
            tps.into_iter()
                .map(|(p, dist)| TimePoint {
                    probability: p as f64 / total,
                    dist,
                })
                .collect(),
        )
        .unwrap()
    })
}

fn arb_predictor() -> impl Strategy<Value = Hypothesis> {
    prop_oneof![
        (0u8..10).prop_map(|t| Hypothesis::greater(t as f64 + 0.5)),
        (0u8..10).prop_map(|v| Hypothesis::indicator(vec![x(v as f64)])),
        (0u8..=4).prop_map(|c| Hypothesis::Constant(c as f64 / 4.0)),
    ]
}

fn arb_loss() -> impl Strategy<Value = LossFunction> {
    prop_oneof![Just(LossFunction::ZeroOne), Just(LossFunction::Mse)]
}

proptest! {
    #[test]
    fn expected_loss_is_affine(a in arb_dist(), b in arb_dist(), alpha in 0.0f64..=1.0, h in arb_predictor(), loss in arb_loss()) {
        let m = FiniteDistribution::mixture(&[(alpha, &a), (1.0 - alpha, &b)]).unwrap();
        let lm = expected_loss(&h, &m, loss).unwrap();
        let want = alpha * expected_loss(&h, &a, loss).unwrap() + (1.0 - alpha) * expected_loss(&h, &b, loss).unwrap();
        prop_assert!((lm - want).abs() <= 1e-12);
    }

    #[test]
    fn tower_property(p in arb_process(), mask in 1u32..16, h in arb_predictor(), loss in arb_loss()) {
        let idx: Vec<usize> = (0..p.len()).filter(|t| mask & (1 << t) != 0).collect();
        prop_assume!(!idx.is_empty());
        let w = TimeWindow::new(idx).unwrap();
        let lw = expected_loss(&h, &mean_distribution(&p, &w).unwrap(), loss).unwrap();
        let parts: f64 = w
            .conditional_weights(&p)
            .unwrap()
            .into_iter()
            .map(|(t, pt)| pt * expected_loss(&h, &p.timepoints()[t].dist, loss).unwrap())
            .sum();
        prop_assert!((lw - parts).abs() <= 1e-12);
    }

    #[test]
    fn singleton_window_is_member(p in arb_process(), t in 0usize..4) {
        prop_assume!(t < p.len());
        let m = mean_distribution(&p, &TimeWindow::single(t)).unwrap();
        prop_assert!(m.total_variation(&p.timepoints()[t].dist.merged()) <= 1e-12);
    }

    #[test]
    fn merging_keeps_losses(d in arb_dist(), h in arb_predictor(), loss in arb_loss()) {
        let a = expected_loss(&h, &d, loss).unwrap();
        let b = expected_loss(&h, &d.merged(), loss).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
        let sum: f64 = d.merged().atoms().iter().map(|a| a.weight).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn losses_stay_in_range(p in 0.0f64..=1.0, l in any::<bool>()) {
        let label = Label::from_bool(l);
        let mse = LossFunction::Mse.eval(p, label);
        prop_assert!((0.0..=1.0).contains(&mse));
        let z = LossFunction::ZeroOne.eval(p, label);
        prop_assert!(z == 0.0 || z == 1.0);
        let f = FnPredictor(|_: &Instance| p);
        prop_assert_eq!(f.output(&x(0.0)), p);
    }
}
