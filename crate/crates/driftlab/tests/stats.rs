use approx::assert_abs_diff_eq;
use driftlab::stats::{t_two_sided, welch_t_test};
use driftlab::Error;
use proptest::prelude::*;
use statrs::function::beta::beta_reg;

// Reference values from a 50-digit incomplete-beta evaluation, frozen here
// so the suite does not depend on an external oracle at test time.
const WELCH_ORACLE: [(&[f64], &[f64], f64, f64, f64); 3] = [
    (
        &[2.1, 2.5, 2.3, 2.2],
        &[1.1, 1.4, 1.2, 1.3],
        9.575_537_013_186_736_6,
        5.584_615_384_615_384_4,
        0.000_113_037_309_909_608_999,
    ),
    (
        &[0.81, 0.79, 0.83, 0.80, 0.78],
        &[0.80, 0.77, 0.79, 0.81, 0.76, 0.78],
        1.477_795_348_889_348_7,
        8.544_345_657_595_150_4,
        0.175_349_095_090_112_09,
    ),
    (
        &[1.0, 2.0, 3.0, 4.0, 5.0],
        &[2.0, 4.0, 6.0, 8.0, 10.0, 12.0],
        -2.376_354_103_144_018_3,
        6.972_255_729_794_933_7,
        0.049_284_338_206_730_521,
    ),
];

#[test]
fn welch_matches_high_precision_reference() {
    for (a, b, t, dof, p) in WELCH_ORACLE {
        let w = welch_t_test(a, b).unwrap();
        assert_abs_diff_eq!(w.t, t, epsilon = 1e-6);
        assert_abs_diff_eq!(w.dof, dof, epsilon = 1e-6);
        assert_abs_diff_eq!(w.p, p, epsilon = 1e-8);
    }
}

#[test]
fn incomplete_beta_matches_reference() {
    for (x, a, b, want) in [
        (0.3, 2.5, 0.5, 0.018_927_124_071_945_651_653),
        (0.9, 10.0, 3.0, 0.889_130_022_255_000_056_78),
        (0.1, 0.5, 0.5, 0.204_832_764_699_133_457_54),
    ] {
        assert_abs_diff_eq!(beta_reg(a, b, x), want, epsilon = 1e-12);
    }
    // one degree of freedom is Cauchy: P(|T| >= 1) = 1/2
    assert_abs_diff_eq!(t_two_sided(1.0, 1.0), 0.5, epsilon = 1e-12);
}

#[test]
fn identical_lists_give_unit_p() {
    let a = [0.71, 0.74, 0.69, 0.75];
    let w = welch_t_test(&a, &a).unwrap();
    assert_eq!(w.t, 0.0);
    assert_abs_diff_eq!(w.p, 1.0, epsilon = 1e-12);
}

#[test]
fn separated_samples_are_significant() {
    let a = [1.0, 1.0 + 1e-9, 1.0 - 1e-9];
    let b = [0.0, 1e-9, -1e-9];
    let w = welch_t_test(&a, &b).unwrap();
    assert!(w.p < 1e-6, "{w:?}");
    assert!(w.significant(1e-3));
}

#[test]
fn degenerate_inputs() {
    assert!(matches!(welch_t_test(&[1.0], &[1.0, 2.0]), Err(Error::Degenerate(_))));
    assert!(welch_t_test(&[1.0, f64::NAN], &[1.0, 2.0]).is_err());
    let same = welch_t_test(&[0.5, 0.5], &[0.5, 0.5, 0.5]).unwrap();
    assert_eq!((same.t, same.p), (0.0, 1.0));
    let apart = welch_t_test(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
    assert_eq!(apart.p, 0.0);
    assert_eq!(apart.t, f64::INFINITY);
    // one constant side still has a proper standard error
    let one = welch_t_test(&[1.0, 1.0, 1.0], &[0.2, 0.4, 0.3]).unwrap();
    assert!(one.t.is_finite() && one.p > 0.0 && one.p < 0.01);
}

proptest! {
    #[test]
    fn swapping_negates_t_and_keeps_p(
        a in prop::collection::vec(0.0f64..1.0, 2..30),
        b in prop::collection::vec(0.0f64..1.0, 2..30),
    ) {
        let ab = welch_t_test(&a, &b).unwrap();
        let ba = welch_t_test(&b, &a).unwrap();
        prop_assert!((ab.t + ba.t).abs() <= 1e-9 * ab.t.abs().max(1.0));
        prop_assert!((ab.p - ba.p).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab.p));
    }

    #[test]
    fn shifting_both_sides_keeps_the_test(
        a in prop::collection::vec(0.0f64..1.0, 2..20),
        b in prop::collection::vec(0.0f64..1.0, 2..20),
        c in -5.0f64..5.0,
    ) {
        let base = welch_t_test(&a, &b).unwrap();
        let sa: Vec<f64> = a.iter().map(|x| x + c).collect();
        let sb: Vec<f64> = b.iter().map(|x| x + c).collect();
        let shifted = welch_t_test(&sa, &sb).unwrap();
        prop_assume!(base.t.is_finite());
        prop_assert!((base.p - shifted.p).abs() <= 1e-6);
    }
}
