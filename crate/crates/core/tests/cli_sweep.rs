use sppm::cli::run_with;

// Weak-Pareto set of quad-seg is [-1, 1]; a weak proximal term lets each
// weight land near its weighted-sum minimizer 2t - 1.
#[test]
fn quad_seg_sweep_spans_the_segment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let argv = [
        "sppm", "sweep", "--problem", "quad-seg", "--grid", "10", "--alpha", "1e-3", "--exp-transform", "off", "--x0",
        "3", "--output",
    ]
    .iter()
    .map(|s| s.to_string())
    .chain(std::iter::once(path.display().to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(run_with(argv, &mut out, &mut err), 0, "{}", String::from_utf8_lossy(&err));

    let mut reader = csv::Reader::from_path(&path).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (x_col, flag_col) = (col("x_1"), col("nondominated"));
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 11);

    let xs: Vec<f64> = rows.iter().map(|r| r[x_col].parse().unwrap()).collect();
    for x in &xs {
        assert!(x.abs() <= 1.0 + 1e-2, "final {x} off the segment");
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!((lo + 1.0).abs() <= 1e-2 && (hi - 1.0).abs() <= 1e-2, "hull [{lo}, {hi}]");
    assert!(rows.iter().all(|r| &r[flag_col] == "true"));
}
