use driftlab::emit::{emit, map_point, render_scatter, rows_csv, Format};
use driftlab::results::{usage_metric, ResultRow, ResultTable};
use driftlab::Error;
use proptest::prelude::*;

fn row(dataset: &str, model: &str, condition: &str, repetition: usize, accuracy: f64) -> ResultRow {
    ResultRow {
        dataset: dataset.into(),
        model: model.into(),
        condition: condition.into(),
        repetition,
        accuracy,
    }
}

fn small_table() -> ResultTable {
    let mut t = ResultTable::new("demo");
    for (r, (a, b)) in [(0.9, 0.2), (0.8, 0.3), (0.85, 0.1)].into_iter().enumerate() {
        t.push(row("sea", "DT", "none", r, a)).unwrap();
        t.push(row("sea", "DT", "real", r, b)).unwrap();
    }
    t.aggregate();
    t
}

#[test]
fn aggregates_follow_rows() {
    let mut t = small_table();
    let none = t.get("sea", "DT", "none").unwrap();
    assert_eq!(none.n, 3);
    assert!((none.mean - 0.85).abs() < 1e-12);
    assert!((none.std - 0.05).abs() < 1e-12);
    t.check_aggregates().unwrap();

    t.aggregates[0].mean += 0.01;
    assert!(matches!(t.check_aggregates(), Err(Error::Inconsistent(_))));
    assert!(emit(&t, &Format::Csv, &tempfile::tempdir().unwrap().path()).is_err());
}

#[test]
fn rejects_accuracy_outside_unit_interval() {
    let mut t = ResultTable::new("demo");
    assert!(t.push(row("a", "b", "c", 0, 1.2)).is_err());
    assert!(t.push(row("a", "b", "c", 0, 1.0)).is_ok());
}

#[test]
fn tests_are_recorded() {
    let mut t = small_table();
    let res = t.add_test("sea", "DT", "none", "real", 1e-3).unwrap();
    assert!(res.t > 0.0 && res.mean_a > res.mean_b);
    assert_eq!(t.test("sea", "DT", "none", "real"), Some(&res));
}

#[test]
fn usage_metric_examples() {
    assert_eq!(usage_metric(0.9, 0.7, 0.7), Some(0.0));
    assert_eq!(usage_metric(0.9, 0.7, 0.9), None);
    let near_full = usage_metric(0.9, 0.7, 0.899).unwrap();
    let half = usage_metric(0.9, 0.7, 0.8).unwrap();
    assert!((half - 1.0).abs() < 1e-12);
    assert!(near_full > 100.0 * half);
}

#[test]
fn empty_table_is_not_emitted() {
    let dir = tempfile::tempdir().unwrap();
    let t = ResultTable::new("empty");
    assert!(matches!(emit(&t, &Format::Csv, dir.path()), Err(Error::Empty(_))));
    let svg = Format::SvgScatter(vec![("x".into(), "y".into())]);
    assert!(matches!(emit(&t, &svg, dir.path()), Err(Error::Empty(_))));
}

#[test]
fn single_point_lands_on_its_mapped_coordinate() {
    let mut t = ResultTable::new("one");
    t.push(row("d", "m", "x", 0, 0.5)).unwrap();
    t.push(row("d", "m", "y", 0, 0.5)).unwrap();
    t.aggregate();
    let svg = render_scatter(&t, &[("x".into(), "y".into())]).unwrap();
    let (px, py) = map_point(0, 0.5, 0.5);
    let at = format!(r#"<g class="point" transform="translate({px:.2} {py:.2})">"#);
    assert_eq!(svg.matches(r#"class="point""#).count(), 1);
    assert!(svg.contains(&at), "{svg}");
    assert!(svg.contains("accuracy (x)") && svg.contains("accuracy (y)"));
}

#[test]
fn svg_is_deterministic_and_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let t = small_table();
    let panels = Format::SvgScatter(vec![("none".into(), "real".into())]);
    let first = emit(&t, &panels, dir.path()).unwrap();
    let a = std::fs::read(&first[0]).unwrap();
    emit(&t, &panels, dir.path()).unwrap();
    assert_eq!(a, std::fs::read(&first[0]).unwrap());
    assert!(first[0].ends_with("demo.svg"));

    let paths = emit(&t, &Format::Csv, dir.path()).unwrap();
    let names: Vec<String> = paths
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names, ["demo.csv", "demo-summary.csv"]);
    let mut rd = csv::Reader::from_path(&paths[0]).unwrap();
    assert_eq!(rd.headers().unwrap(), vec!["dataset", "model", "condition", "repetition", "accuracy"]);
    let back: Vec<f64> = rd.records().map(|r| r.unwrap()[4].parse().unwrap()).collect();
    let want: Vec<f64> = t.rows.iter().map(|r| r.accuracy).collect();
    assert_eq!(back, want);
}

#[test]
fn unwritable_output_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let err = emit(&small_table(), &Format::Csv, &blocker.join("sub")).unwrap_err();
    assert!(matches!(err, Error::Write { .. }), "{err}");
}

#[test]
fn csv_quotes_awkward_names() {
    let mut t = ResultTable::new("q");
    t.push(row("knn:k=3,window=5", "m\"x", "none", 0, 0.5)).unwrap();
    t.aggregate();
    let bytes = rows_csv(&t).unwrap();
    let mut rd = csv::Reader::from_reader(bytes.as_slice());
    let rec = rd.records().next().unwrap().unwrap();
    assert_eq!(&rec[0], "knn:k=3,window=5");
    assert_eq!(&rec[1], "m\"x");
}

proptest! {
    #[test]
    fn aggregates_do_not_depend_on_row_order(
        acc in prop::collection::vec((0usize..3, 0.0f64..=1.0), 2..40),
        seed in any::<u64>(),
    ) {
        let build = |order: &[(usize, f64)]| {
            let mut t = ResultTable::new("p");
            for (i, &(c, a)) in order.iter().enumerate() {
                t.push(row("d", "m", &format!("c{c}"), i, a)).unwrap();
            }
            t.aggregate();
            t
        };
        let mut shuffled = acc.clone();
        let k = (seed as usize) % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let (a, b) = (build(&acc), build(&shuffled));
        for agg in &a.aggregates {
            let other = b.get(&agg.dataset, &agg.model, &agg.condition).unwrap();
            prop_assert_eq!(agg.n, other.n);
            prop_assert!((agg.mean - other.mean).abs() <= 1e-12);
            prop_assert!((agg.std - other.std).abs() <= 1e-12);
        }
    }
}
