use wham::eval::{precision_at_k, run_benchmark, BenchConfig, Method, TruthSource};
use wham::fixtures::mih_adversarial;
use wham::{linear_scan_topk, mih_weighted_topk, CodeId, MultiIndex};

fn ids(v: &[wham::Neighbor]) -> Vec<CodeId> {
    v.iter().map(|n| n.id).collect()
}

#[test]
fn miwq_precision_dominates_mih_on_the_adversarial_instance() {
    for k in [1, 3, 5] {
        let (codes, q, w) = mih_adversarial(16, 10).unwrap();
        let truth = ids(&linear_scan_topk(&codes, &q, &w, k).unwrap());
        let ix = MultiIndex::build(codes, 2).unwrap();
        let miwq = precision_at_k(&ids(&ix.query(&q, &w, k).unwrap()), &truth, k).unwrap();
        let mih =
            precision_at_k(&ids(&mih_weighted_topk(&ix, &q, &w, k).unwrap()), &truth, k).unwrap();
        assert_eq!(miwq, 1.0);
        assert!(mih < miwq, "K={k}: mih {mih}");
    }
}

#[test]
fn gaussian_data_with_euclidean_truth() {
    let config = BenchConfig::from_toml_str(
        r#"
        seed = 11
        methods = ["linear", "miwq", "mih"]
        bits = [16, 24]
        k = [5]
        weights = "uniform-asym"
        warmup = 0
        [data]
        kind = "gaussian"
        n = 1500
        queries = 12
        d = 16
        [truth]
        kind = "euclidean"
        depth = 50
        "#,
    )
    .unwrap();
    let report = run_benchmark(&config).unwrap();
    assert_eq!(report.records.len(), 6);
    for pair in report.records.chunks(3) {
        let p = pair[0].precision.unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert_eq!(pair[0].precision, pair[1].precision);
        assert_eq!(pair[1].method, Method::Miwq);
    }
    // Deterministic result sets: a second run reproduces every precision.
    let again = run_benchmark(&config).unwrap();
    let p1: Vec<_> = report.records.iter().map(|r| r.precision).collect();
    let p2: Vec<_> = again.records.iter().map(|r| r.precision).collect();
    assert_eq!(p1, p2);
}

#[test]
fn label_truth_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let base: String = (0..400).map(|i| format!("{}\n", i % 3)).collect();
    std::fs::write(dir.path().join("base.txt"), base).unwrap();
    std::fs::write(dir.path().join("q.txt"), "0\n1\n2\n0\n").unwrap();
    let toml = r#"
        seed = 2
        methods = ["miwq", "linear"]
        bits = [12]
        k = [10]
        weights = "unit"
        [data]
        kind = "planted"
        n = 400
        queries = 4
        cluster = 20
        [truth]
        kind = "labels"
        base = "base.txt"
        queries = "q.txt"
    "#;
    let path = dir.path().join("labels.toml");
    std::fs::write(&path, toml).unwrap();
    let config = BenchConfig::load(&path).unwrap();
    assert!(matches!(config.truth, TruthSource::Labels { .. }));
    let report = run_benchmark(&config).unwrap();
    assert_eq!(report.records[0].precision, report.records[1].precision);
}

#[test]
fn fvecs_source_reads_files_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    wham::io::write_fvecs(
        dir.path().join("b.fvecs"),
        &wham::fixtures::gaussian_vectors(300, 8, 1),
    )
    .unwrap();
    wham::io::write_fvecs(
        dir.path().join("q.fvecs"),
        &wham::fixtures::gaussian_vectors(5, 8, 2),
    )
    .unwrap();
    let path = dir.path().join("f.toml");
    std::fs::write(
        &path,
        r#"
        seed = 1
        methods = ["miwq"]
        bits = [10]
        k = [3]
        weights = "uniform-asym"
        [data]
        kind = "fvecs"
        base = "b.fvecs"
        queries = "q.fvecs"
        limit = 200
        [truth]
        kind = "euclidean"
        depth = 20
        "#,
    )
    .unwrap();
    let report = run_benchmark(&BenchConfig::load(&path).unwrap()).unwrap();
    assert_eq!(report.records.len(), 1);
    assert!(report.records[0].precision.is_some());
}
