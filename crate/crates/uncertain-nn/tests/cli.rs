//! Black-box tests of the `unn` binary: exit codes, output schemas,
//! determinism, and the benchmark table.

use std::path::Path;
use std::process::{Command, Output};
use uncertain_nn::geom::Point2;
use uncertain_nn::io::{FeaturesFile, InstanceFile, NnFile, ResultFile};
use uncertain_nn::model::{UncertainPoint, UncertainSet};

fn unn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = unn(args);
    assert!(
        out.status.success(),
        "unn {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn exit_code(args: &[&str]) -> i32 {
    unn(args).status.code().expect("no signal")
}

fn write_instance(dir: &Path, name: &str, set: &UncertainSet) -> String {
    let path = dir.join(name);
    let file = InstanceFile::from_set(set, None);
    std::fs::write(&path, uncertain_nn::io::to_json(&file).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

/// Two interleaved two-location points: first wins exactly when its near
/// location comes up, so both probabilities are one half.
fn interleaved_pair(dir: &Path) -> String {
    let set = UncertainSet::new(vec![
        UncertainPoint::discrete(
            vec![Point2::new(1.0, 0.0), Point2::new(4.0, 0.0)],
            vec![0.5, 0.5],
        )
        .unwrap(),
        UncertainPoint::discrete(
            vec![Point2::new(2.0, 0.0), Point2::new(3.0, 0.0)],
            vec![0.5, 0.5],
        )
        .unwrap(),
    ])
    .unwrap();
    write_instance(dir, "pair.json", &set)
}

#[test]
fn gen_is_deterministic_and_parses() {
    let args = ["gen", "random", "--variant", "discrete", "--n", "5", "--k", "3", "--seed", "7"];
    let first = stdout_of(&args);
    let second = stdout_of(&args);
    assert_eq!(first, second, "same seed must give identical bytes");
    let parsed: InstanceFile = serde_json::from_str(&first).unwrap();
    assert_eq!(parsed.version, 1);
    assert_eq!(parsed.points.len(), 5);
    assert_eq!(parsed.to_set().unwrap().max_locations_per_point(), 3);
}

#[test]
fn gen_writes_expected_family_shapes() {
    let quad = stdout_of(&["gen", "lb-quadratic", "--m", "2"]);
    let parsed: InstanceFile = serde_json::from_str(&quad).unwrap();
    assert_eq!(parsed.variant, "disk");
    assert_eq!(parsed.points.len(), 4);

    let with_stats = stdout_of(&["gen", "pvd", "--n", "4", "--seed", "3", "--stats"]);
    let parsed: InstanceFile = serde_json::from_str(&with_stats).unwrap();
    let stats = parsed.stats.expect("--stats embeds the block");
    assert_eq!(stats.n, 4);
    assert_eq!(stats.k_max, 2);
    assert_eq!(stats.rho, Some(1.0));
}

#[test]
fn usage_and_failure_exit_codes() {
    assert_eq!(exit_code(&["gen", "lb-cubic", "--m", "0"]), 2);
    assert_eq!(exit_code(&["gen", "lb-cubic"]), 2, "missing required flag");
    assert_eq!(exit_code(&["gen", "pvd", "--n", "1", "--seed", "0"]), 2);
    assert_eq!(exit_code(&["nosuchcommand"]), 2);
    // random requires a seed
    assert_eq!(exit_code(&["gen", "random", "--variant", "disk", "--n", "2"]), 2);
    // degenerate radius range cannot be generated
    assert_eq!(
        exit_code(&[
            "gen", "random", "--variant", "disk", "--n", "1", "--seed", "0", "--r-min", "2.0",
            "--r-max", "1.0",
        ]),
        2
    );
}

#[test]
fn non_finite_query_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let instance = interleaved_pair(dir.path());
    assert_eq!(
        exit_code(&["query", "--instance", &instance, "--q", "NaN", "0", "--method", "exact"]),
        2
    );
    assert_eq!(exit_code(&["nn", "--instance", &instance, "--q", "inf", "0"]), 2);
}

#[test]
fn variant_mismatch_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let discrete = interleaved_pair(dir.path());
    let disk = dir.path().join("disk.json");
    let disk = disk.to_str().unwrap();
    let out = unn(&["gen", "lb-quadratic", "--m", "1", "--out", disk]);
    assert!(out.status.success());

    assert_eq!(
        exit_code(&["query", "--instance", &discrete, "--q", "0", "0", "--method", "quadrature"]),
        4
    );
    assert_eq!(
        exit_code(&["query", "--instance", disk, "--q", "0", "0", "--method", "exact"]),
        4
    );
    assert_eq!(
        exit_code(&[
            "query", "--instance", disk, "--q", "0", "0", "--method", "spiral", "--epsilon", "0.1",
        ]),
        4
    );
    assert_eq!(exit_code(&["features", "--instance", &discrete]), 4);
}

#[test]
fn query_exact_reports_half_half() {
    let dir = tempfile::tempdir().unwrap();
    let instance = interleaved_pair(dir.path());
    let text = stdout_of(&["query", "--instance", &instance, "--q", "0", "0", "--method", "exact"]);
    let result: ResultFile = serde_json::from_str(&text).unwrap();
    assert_eq!(result.version, 1);
    assert_eq!(result.method, "exact");
    assert_eq!(result.entries.len(), 2);
    for e in &result.entries {
        assert_eq!(e.probability, 0.5, "entry {}", e.index);
    }
    assert!(result.entries.windows(2).all(|w| w[0].index < w[1].index));
    assert!(result.timing_us.is_some());
}

#[test]
fn query_missing_method_params_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let instance = interleaved_pair(dir.path());
    assert_eq!(
        exit_code(&["query", "--instance", &instance, "--q", "0", "0", "--method", "mc"]),
        2
    );
    assert_eq!(
        exit_code(&[
            "query", "--instance", &instance, "--q", "0", "0", "--method", "mc", "--epsilon",
            "0.1", "--delta", "0.05",
        ]),
        2,
        "mc still needs --seed"
    );
    assert_eq!(
        exit_code(&["query", "--instance", &instance, "--q", "0", "0", "--method", "spiral"]),
        2
    );
}

#[test]
fn query_mc_deterministic_modulo_timing() {
    let dir = tempfile::tempdir().unwrap();
    let instance = interleaved_pair(dir.path());
    let args = [
        "query", "--instance", &instance, "--q", "0.3", "0.1", "--method", "mc", "--epsilon",
        "0.1", "--delta", "0.05", "--seed", "11",
    ];
    let mut first: ResultFile = serde_json::from_str(&stdout_of(&args)).unwrap();
    let mut second: ResultFile = serde_json::from_str(&stdout_of(&args)).unwrap();
    assert!(first.timing_us.is_some());
    first.timing_us = None;
    second.timing_us = None;
    assert_eq!(first, second);
    assert_eq!(first.seed, Some(11));
    assert!(first.rounds.is_some());
}

#[test]
fn query_spiral_underestimates_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = unn(&[
        "gen", "random", "--variant", "discrete", "--n", "12", "--k", "4", "--seed", "5", "--out",
        dir.path().join("r.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let instance = dir.path().join("r.json");
    let instance = instance.to_str().unwrap();
    let exact: ResultFile = serde_json::from_str(&stdout_of(&[
        "query", "--instance", instance, "--q", "1", "2", "--method", "exact",
    ]))
    .unwrap();
    let spiral: ResultFile = serde_json::from_str(&stdout_of(&[
        "query", "--instance", instance, "--q", "1", "2", "--method", "spiral", "--epsilon",
        "0.9999",
    ]))
    .unwrap();
    let exact_of = |i: usize| {
        exact
            .entries
            .iter()
            .find(|e| e.index == i)
            .map_or(0.0, |e| e.probability)
    };
    assert!(!spiral.entries.is_empty());
    for e in &spiral.entries {
        assert!(
            e.probability <= exact_of(e.index),
            "index {}: {} above exact {}",
            e.index,
            e.probability,
            exact_of(e.index)
        );
    }
    assert_eq!(spiral.error_bound, Some(0.9999));
    assert!(spiral.prefix.is_some());
}

#[test]
fn features_match_known_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let quad = dir.path().join("quad.json");
    let quad = quad.to_str().unwrap();
    assert!(unn(&["gen", "lb-quadratic", "--m", "2", "--out", quad]).status.success());
    let file: FeaturesFile =
        serde_json::from_str(&stdout_of(&["features", "--instance", quad])).unwrap();
    assert_eq!(file.version, 1);
    assert_eq!(file.mu, file.vertices.len());
    let has = |x: f64, y: f64| {
        file.vertices
            .iter()
            .any(|v| (v.location[0] - x).hypot(v.location[1] - y) <= 1e-6)
    };
    assert!(has(-2.0, 3.0), "missing (-2, 3)");
    assert!(has(0.0, 45.0f64.sqrt()), "missing (0, 3*sqrt(5))");
    let crossing_total: usize = file.pair_crossings.iter().map(|p| p.count).sum();
    assert!(crossing_total >= 6);

    // deterministic ordering: triple-lexicographic, then coordinates
    let mut sorted = file.vertices.clone();
    sorted.sort_by(|a, b| {
        a.triple
            .cmp(&b.triple)
            .then(a.kind.cmp(&b.kind))
            .then(a.location[0].total_cmp(&b.location[0]))
            .then(a.location[1].total_cmp(&b.location[1]))
    });
    for (got, want) in file.vertices.iter().zip(&sorted) {
        assert_eq!(got.triple, want.triple);
        assert_eq!(got.location, want.location);
    }

    let single = dir.path().join("one.json");
    let single = single.to_str().unwrap();
    assert!(unn(&[
        "gen", "random", "--variant", "disk", "--n", "1", "--seed", "2", "--out", single,
    ])
    .status
    .success());
    let file: FeaturesFile =
        serde_json::from_str(&stdout_of(&["features", "--instance", single])).unwrap();
    assert_eq!(file.mu, 0);
    assert!(file.vertices.is_empty());

    let cubic = dir.path().join("cubic.json");
    let cubic = cubic.to_str().unwrap();
    assert!(unn(&["gen", "lb-cubic", "--m", "1", "--out", cubic]).status.success());
    let file: FeaturesFile =
        serde_json::from_str(&stdout_of(&["features", "--instance", cubic])).unwrap();
    let pattern = file
        .vertices
        .iter()
        .filter(|v| {
            matches!(v.kind, uncertain_nn::nonzero::VertexKind::Crossing)
                && v.triple[0] == 0
                && v.triple[1] == 1
                && v.triple[2] >= 2
        })
        .count();
    assert!(pattern >= 4, "only {pattern} flank-flank-ladder crossings");
}

#[test]
fn nn_lists_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let instance = interleaved_pair(dir.path());
    let file: NnFile = serde_json::from_str(&stdout_of(&[
        "nn", "--instance", &instance, "--q", "-1.5", "2.0",
    ]))
    .unwrap();
    assert_eq!(file.version, 1);
    assert_eq!(file.query, [-1.5, 2.0]);
    assert_eq!(file.indices, vec![0, 1]);
}

#[test]
fn bench_emits_strict_csv() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("r.json");
    let instance = instance.to_str().unwrap();
    assert!(unn(&[
        "gen", "random", "--variant", "discrete", "--n", "10", "--k", "3", "--seed", "4", "--out",
        instance,
    ])
    .status
    .success());
    let text = stdout_of(&[
        "bench", "--instance", instance, "--seed", "8", "--queries", "5", "--methods",
        "exact,mc,spiral", "--epsilon", "0.2", "--epsilon", "0.05",
    ]);
    let mut reader = csv::ReaderBuilder::new()
        .flexible(false)
        .from_reader(text.as_bytes());
    assert_eq!(
        reader.headers().unwrap(),
        &csv::StringRecord::from(vec!["method", "n", "k", "param", "mean", "p95"])
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    // one row for exact, one per epsilon for mc and spiral
    assert_eq!(rows.len(), 5);
    for row in &rows {
        assert_eq!(row[1].parse::<usize>().unwrap(), 10);
        assert_eq!(row[2].parse::<usize>().unwrap(), 3);
        row[3].parse::<usize>().unwrap();
        let mean: f64 = row[4].parse().unwrap();
        let p95: f64 = row[5].parse().unwrap();
        assert!(mean >= 0.0 && p95 >= 0.0);
    }
    assert_eq!(&rows[0][0], "exact");
    assert_eq!(&rows[1][0], "mc");
    assert_eq!(&rows[3][0], "spiral");
    // a tighter epsilon cannot shrink the mc round count
    let s_loose: usize = rows[1][3].parse().unwrap();
    let s_tight: usize = rows[2][3].parse().unwrap();
    assert!(s_tight >= s_loose);
}

#[test]
fn bench_spiral_time_tracks_prefix_length() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("big.json");
    let instance = instance.to_str().unwrap();
    assert!(unn(&[
        "gen", "random", "--variant", "discrete", "--n", "400", "--k", "4", "--seed", "12",
        "--out", instance,
    ])
    .status
    .success());
    // statistical check: retry a few times before declaring failure
    let mut last = None;
    for _ in 0..3 {
        let text = stdout_of(&[
            "bench", "--instance", instance, "--seed", "13", "--queries", "60", "--methods",
            "spiral", "--epsilon", "0.5", "--epsilon", "1e-9",
        ]);
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 2);
        let m_small: usize = rows[0][3].parse().unwrap();
        let m_large: usize = rows[1][3].parse().unwrap();
        assert!(m_small < m_large, "sweep must vary the prefix length");
        let mean_small: f64 = rows[0][4].parse().unwrap();
        let mean_large: f64 = rows[1][4].parse().unwrap();
        last = Some((mean_small, mean_large));
        if mean_small <= mean_large {
            return;
        }
    }
    panic!("longer prefixes never cost more: {last:?}");
}
