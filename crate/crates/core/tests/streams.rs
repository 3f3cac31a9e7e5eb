use std::collections::BTreeMap;
use std::io::Write;

use driftlab_core::oracle::has_real_drift;
use driftlab_core::streams::generators::{agrawal_label, sea_label, stagger_label, LED_SEGMENTS};
use driftlab_core::streams::*;
use driftlab_core::*;
use proptest::prelude::*;

fn cfg(s: &str) -> GeneratorConfig {
    s.parse().unwrap()
}

fn table_1d(values: &[(f64, u32)]) -> DatasetTable {
    DatasetTable::new(
        "t",
        vec!["x".into()],
        vec![],
        values.iter().map(|&(v, y)| (Instance::numeric(vec![v]).unwrap(), y)).collect(),
    )
    .unwrap()
}

fn multiset(t: &DatasetTable) -> BTreeMap<(Vec<u64>, Vec<u32>, u32), usize> {
    let mut m = BTreeMap::new();
    for (x, y) in &t.rows {
        let key = (x.numeric.iter().map(|v| v.to_bits()).collect(), x.categorical.clone(), *y);
        *m.entry(key).or_insert(0) += 1;
    }
    m
}

#[test]
fn sea_rule_and_rows() {
    assert!(sea_label(3.0, 4.0, 8.0));
    assert!(!sea_label(5.0, 4.0, 8.0));
    let t = generate(&cfg("sea:concept=1,seed=3"), 500).unwrap();
    assert_eq!(t.len(), 500);
    for (x, y) in &t.rows {
        assert!(x.numeric.iter().all(|v| (0.0..10.0).contains(v)));
        assert_eq!(*y == 1, x.numeric[0] + x.numeric[1] <= 8.0);
    }
    assert_eq!(t, generate(&cfg("sea:concept=1,seed=3"), 500).unwrap());
    assert_ne!(t, generate(&cfg("sea:concept=1,seed=4"), 500).unwrap());
}

#[test]
fn sine_and_stagger_rules() {
    let t = generate(&cfg("sine:seed=1"), 300).unwrap();
    for (x, y) in &t.rows {
        assert_eq!(*y == 1, x.numeric[1] < (x.numeric[0] * std::f64::consts::PI).sin());
    }
    let t = generate(&cfg("stagger:seed=2"), 300).unwrap();
    for (x, y) in &t.rows {
        let c = &x.categorical;
        assert_eq!(*y == 1, stagger_label(2, c[0], c[1], c[2]));
    }
    assert!(t.label_counts().len() == 2);
}

#[test]
fn led_without_noise_encodes_digits() {
    let t = generate(&cfg("led:noise=0,seed=5"), 400).unwrap();
    assert_eq!(t.schema().numeric, 24);
    for (x, y) in &t.rows {
        let seg: Vec<u8> = x.numeric[..7].iter().map(|v| *v as u8).collect();
        assert_eq!(seg, LED_SEGMENTS[*y as usize].to_vec());
    }
    // digits are distinguishable from their segments
    for a in 0..10 {
        for b in a + 1..10 {
            assert_ne!(LED_SEGMENTS[a], LED_SEGMENTS[b]);
        }
    }
}

#[test]
fn agrawal_functions() {
    for f in 1..=3 {
        let t = generate(&cfg(&format!("agrawal:function={f},seed=9")), 500).unwrap();
        assert!(t.label_counts().len() == 2, "function {f}");
        for (x, y) in &t.rows {
            assert_eq!(*y == 1, agrawal_label(f, x));
        }
    }
    assert!(matches!(generate(&cfg("agrawal:function=7"), 10), Err(Error::Unsupported(_))));
}

#[test]
fn mixed_rbf_and_tree() {
    let t = generate(&cfg("mixed:seed=1"), 200).unwrap();
    assert_eq!((t.schema().numeric, t.schema().categorical), (2, 2));
    let t = generate(&cfg("random-rbf:centroids=5,classes=3,seed=2"), 300).unwrap();
    assert!(t.rows.iter().all(|(_, y)| *y < 3));
    let c = cfg("random-tree:depth=4,seed=3");
    let concept = random_tree_concept(&c).unwrap();
    let t = generate(&c, 500).unwrap();
    assert!(t.rows.iter().all(|(x, y)| concept.label(x) == (*y == 1)));
    assert!(t.label_counts().len() == 2);
}

#[test]
fn generator_configs_validate() {
    assert!("sea:concept=5".parse::<GeneratorConfig>().is_ok_and(|c| generate(&c, 1).is_err()));
    assert!("sea:colour=1".parse::<GeneratorConfig>().is_err());
    assert!("nope".parse::<GeneratorConfig>().is_err());
    assert!(generate(&cfg("sea"), 0).is_err());
    let c = cfg("sea:concept=2,noise=0.1,seed=7");
    assert_eq!(c.to_string().parse::<GeneratorConfig>().unwrap(), c);
}

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.path().join(name);
    std::fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
    p
}

#[test]
fn csv_round_trip_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let desc = SchemaDescriptor::parse("col,temp,numeric\ncol,day,categorical\n# note\ncol,class,label\n").unwrap();
    let p = write(&dir, "ok.csv", "temp,day,class,ignored\n1.5,mon,0,x\n-2,tue,1,y\n3.25,mon,1,z\n");
    let t = load_csv(&p, &desc).unwrap();
    assert_eq!(t.len(), 3);
    let vals: Vec<f64> = t.rows.iter().map(|(x, _)| x.numeric[0]).collect();
    assert_eq!(vals, vec![1.5, -2.0, 3.25]);
    let days: Vec<u32> = t.rows.iter().map(|(x, _)| x.categorical[0]).collect();
    assert_eq!(days, vec![0, 1, 0]);
    let labels: Vec<u32> = t.rows.iter().map(|(_, y)| *y).collect();
    assert_eq!(labels, vec![0, 1, 1]);

    let p = write(&dir, "empty.csv", "temp,day,class\n");
    assert!(matches!(load_csv(&p, &desc), Err(Error::Degenerate(_))));

    let p = write(&dir, "bad.csv", "temp,day,class\n1,mon,0\nwarm,tue,1\n");
    match load_csv(&p, &desc) {
        Err(Error::Csv { row, column, .. }) => {
            assert_eq!(row, 3);
            assert_eq!(column, "temp");
        }
        other => panic!("expected a csv error, got {other:?}"),
    }
    let p = write(&dir, "missing.csv", "temp,class\n1,0\n");
    assert!(load_csv(&p, &desc).is_err());
    assert!(SchemaDescriptor::parse("col,a,numeric\n").is_err());
    assert!(SchemaDescriptor::parse("col,a,float\ncol,b,label\n").is_err());
}

#[test]
fn csv_text_labels_are_indexed() {
    let dir = tempfile::tempdir().unwrap();
    let desc = SchemaDescriptor::parse("col,x,numeric\ncol,y,label\n").unwrap();
    let p = write(&dir, "t.csv", "x,y\n1,UP\n2,DOWN\n3,UP\n");
    let t = load_csv(&p, &desc).unwrap();
    let labels: Vec<u32> = t.rows.iter().map(|(_, y)| *y).collect();
    assert_eq!(labels, vec![1, 0, 1]);
}

#[test]
fn permute_examples() {
    let one = table_1d(&[(1.0, 0)]);
    assert_eq!(permute(&one, 3), one);
    let t = generate(&cfg("sea:seed=1"), 50).unwrap();
    assert_eq!(permute(&t, 8), permute(&t, 8));
    assert_ne!(permute(&t, 8).rows, t.rows);
}

#[test]
fn binarize_examples() {
    let equal = table_1d(&[(0.0, 0), (1.0, 1), (2.0, 0), (3.0, 1)]);
    let (b, info) = binarize(&equal, 1).unwrap();
    assert_eq!(info.groups, [vec![0], vec![1]]);
    assert_eq!(info.minority_share, 0.5);
    assert_eq!(b.len(), 4);

    let mut rows = vec![];
    rows.extend((0..50).map(|i| (i as f64, 0)));
    rows.extend((0..30).map(|i| (i as f64, 1)));
    rows.extend((0..20).map(|i| (i as f64, 2)));
    let (_, info) = binarize(&table_1d(&rows), 1).unwrap();
    assert_eq!(info.groups, [vec![0], vec![1, 2]]);
    assert_eq!(info.minority_share, 0.5);
    assert_eq!(info.dropped, 0);

    let mut rows = vec![];
    rows.extend((0..90).map(|i| (i as f64, 0)));
    rows.extend((0..10).map(|i| (i as f64, 1)));
    let (b, info) = binarize(&table_1d(&rows), 1).unwrap();
    // 10 minority rows allow at most 30 majority rows
    assert_eq!(info.dropped, 60);
    assert_eq!(b.len(), 40);
    assert_eq!(info.minority_share, 0.25);

    assert!(matches!(binarize(&table_1d(&[(0.0, 3), (1.0, 3)]), 1), Err(Error::Degenerate(_))));
}

#[test]
fn label_injection() {
    let s = generate(&cfg("sea:seed=2"), 200).unwrap().to_sample().unwrap();
    assert_eq!(inject_real(&s, false), s);
    assert_eq!(inject_real(&inject_real(&s, true), true).points, s.points);
    let perfect = |x: &Instance| Label::from_bool(sea_label(x.numeric[0], x.numeric[1], 8.0));
    let switched = inject_real(&s, true);
    assert!(switched.iter().all(|(x, y)| perfect(x) != *y));
    let noisy = inject_label_noise(&s, 0.3, 4).unwrap();
    let flips = noisy.iter().zip(s.iter()).filter(|(a, b)| a.1 != b.1).count();
    assert!((30..=90).contains(&flips), "{flips}");
    assert!(inject_label_noise(&s, 1.5, 4).is_err());
}

#[test]
fn segmentation_on_a_line() {
    let t = table_1d(&(0..100).map(|i| (i as f64, (i % 2) as u32)).collect::<Vec<_>>());
    let seg = tree_segment(&t, 1, 5).unwrap();
    let SegmentTree { tests, .. } = &seg.tree;
    let inject::SegmentTest::Numeric { threshold, .. } = tests[0] else {
        panic!("numeric data gives numeric splits");
    };
    for (side, part) in seg.parts.iter().enumerate() {
        for &i in part {
            let left = t.rows[i].0.numeric[0] <= threshold;
            assert_eq!(side, usize::from(!left));
        }
    }
    let mut all: Vec<usize> = seg.parts.concat();
    all.sort_unstable();
    assert_eq!(all, (0..100).collect::<Vec<_>>());
    assert!(tree_segment(&t, 0, 5).is_err());
    // identical rows cannot be split apart
    let flat = table_1d(&[(1.0, 0), (1.0, 1), (1.0, 0)]);
    assert!(matches!(tree_segment(&flat, 2, 1), Err(Error::Degenerate(_))));
}

fn scenario(seed: u64) -> DriftScenario {
    let t = generate(&cfg(&format!("sea:seed={seed}")), 400).unwrap();
    build_2x2(&permute(&t, seed), DEFAULT_SEGMENT_DEPTH, seed).unwrap()
}

#[test]
fn scenario_cells() {
    let sc = scenario(3);
    let s00 = sample_window(&sc, 0, 0, 300, 9).unwrap();
    let s01 = sample_window(&sc, 0, 1, 300, 9).unwrap();
    for ((x0, y0), (x1, y1)) in s00.iter().zip(s01.iter()) {
        assert!(x0.same_point(x1));
        assert_ne!(y0, y1);
        assert_eq!(sc.segmentation.tree.side_of(x0), 0);
    }
    assert_eq!(sample_window(&sc, 1, 0, 1, 2).unwrap().len(), 1);
    assert_eq!(sample_window(&sc, 1, 1, 50, 2).unwrap(), sample_window(&sc, 1, 1, 50, 2).unwrap());
    assert!(sample_window(&sc, 2, 0, 5, 1).is_err());
    assert!(sample_window(&sc, 0, 0, 0, 1).is_err());

    let big = sample_window(&sc, 1, 1, 40_000, 11).unwrap();
    let share = big.iter().filter(|(_, y)| y.is_one()).count() as f64 / big.len() as f64;
    let part = &sc.partitions[1];
    let exact = part.iter().filter(|(_, y)| !y.is_one()).count() as f64 / part.len() as f64;
    assert!((share - exact).abs() < 0.02, "{share} vs {exact}");
}

#[test]
fn scenario_has_real_drift_only_across_posteriors() {
    let sc = scenario(4);
    let cells: Vec<FiniteDistribution> = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .iter()
        .map(|&(i, j)| sc.cell_distribution(i, j).unwrap())
        .collect();
    let p = DriftProcess::uniform(cells).unwrap();
    let w = TimeWindow::single;
    assert!(has_real_drift(&p, &w(0), &w(1), 1e-9).unwrap());
    assert!(has_real_drift(&p, &w(2), &w(3), 1e-9).unwrap());
    assert!(!has_real_drift(&p, &w(0), &w(2), 1e-9).unwrap());
    assert!(!has_real_drift(&p, &w(1), &w(3), 1e-9).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn permute_keeps_rows(seed in any::<u64>(), n in 1usize..80) {
        let t = generate(&cfg("stagger:seed=1"), n).unwrap();
        prop_assert_eq!(multiset(&permute(&t, seed)), multiset(&t));
    }

    #[test]
    fn binarize_meets_share(counts in prop::collection::vec(1usize..60, 2..6), seed in any::<u64>()) {
        let rows: Vec<(f64, u32)> = counts
            .iter()
            .enumerate()
            .flat_map(|(c, &k)| (0..k).map(move |i| (i as f64, c as u32)))
            .collect();
        let (b, info) = binarize(&table_1d(&rows), seed).unwrap();
        let ones = b.rows.iter().filter(|(_, y)| *y == 1).count();
        let minority = ones.min(b.len() - ones) as f64 / b.len() as f64;
        prop_assert!(minority >= 0.25);
        prop_assert_eq!(minority, info.minority_share);
        prop_assert_eq!(b.len() + info.dropped, rows.len());
    }

    #[test]
    fn scenario_factorizes(seed in 0u64..200, draw in any::<u64>()) {
        let t = generate(&cfg(&format!("sine:seed={seed}")), 120).unwrap();
        let sc = build_2x2(&t, 2, seed).unwrap();
        for i in 0..2 {
            let a = sample_window(&sc, i, 0, 40, draw).unwrap();
            let b = sample_window(&sc, i, 1, 40, draw).unwrap();
            for ((xa, ya), (xb, yb)) in a.iter().zip(b.iter()) {
                prop_assert!(xa.same_point(xb));
                prop_assert_eq!(ya.flipped(), *yb);
            }
        }
        // posterior map per instance is the same in both partitions' cells
        let orig: Vec<(Instance, Label)> = t.to_sample().unwrap().points;
        for j in 0..2 {
            for i in 0..2 {
                for (x, y) in &sc.partitions[i] {
                    let want = orig.iter().find(|(o, _)| o.same_point(x)).unwrap().1;
                    let got = if j == 1 { y.flipped() } else { *y };
                    prop_assert_eq!(if j == 1 { want.flipped() } else { want }, got);
                }
            }
        }
    }
}
