//! End-to-end tests against the built binary: schema stability, numeric
//! agreement with the library, determinism, and exit codes.

use std::process::{Command, Output};

use qwalk::collapsed::collapsed_run;
use qwalk::thresholds::frozen_row;
use qwalk::walk::optimal_steps;

fn qwalk_cmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = qwalk_cmd(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

/// Parses CSV rows of the distribution dump into (vertex, weight, probability).
fn parse_distribution(csv: &str) -> Vec<(u64, u32, f64)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("vertex,hamming_weight,probability"));
    lines
        .map(|line| {
            let mut cells = line.split(',');
            (
                cells.next().unwrap().parse().unwrap(),
                cells.next().unwrap().parse().unwrap(),
                cells.next().unwrap().parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn distribution_at_zero_steps_is_uniform() {
    let csv = stdout_of(&["distribution", "--n", "3", "--steps", "0"]);
    let rows = parse_distribution(&csv);
    assert_eq!(rows.len(), 8);
    for (vertex, weight, p) in rows {
        assert_eq!(weight, vertex.count_ones());
        assert_eq!(p, 0.125, "vertex {vertex}");
    }
}

#[test]
fn distribution_peaks_on_the_target_at_auto_steps() {
    let csv = stdout_of(&["distribution", "--n", "5", "--targets", "0"]);
    let rows = parse_distribution(&csv);
    assert_eq!(rows.len(), 32);
    let (argmax, _, p_max) = rows
        .iter()
        .copied()
        .max_by(|a, b| a.2.total_cmp(&b.2))
        .unwrap();
    assert_eq!(argmax, 0);
    let frozen = frozen_row(5).unwrap().target_probability;
    assert!((p_max - frozen).abs() < 1e-11);
}

#[test]
fn distribution_shells_aggregate_to_collapsed_walk() {
    let n = 6u32;
    let t_f = optimal_steps(n).unwrap();
    let csv = stdout_of(&["distribution", "--n", "6", "--targets", "0"]);
    let mut shells = vec![0.0f64; n as usize + 1];
    for (_, weight, p) in parse_distribution(&csv) {
        shells[weight as usize] += p;
    }
    let collapsed = collapsed_run(n, t_f).unwrap().shell_distribution();
    for (x, &p) in shells.iter().enumerate() {
        // The CSV cells carry 12 significant digits.
        assert!(
            (p - collapsed.probability(x as u32)).abs() < 1e-10,
            "shell {x}: csv {p} vs collapsed {}",
            collapsed.probability(x as u32)
        );
    }
}

#[test]
fn extended_dump_has_doubled_rows_and_split_pairs() {
    let csv = stdout_of(&[
        "distribution",
        "--algorithm",
        "optimal",
        "--n",
        "4",
        "--targets",
        "11",
    ]);
    let rows = parse_distribution(&csv);
    assert_eq!(rows.len(), 32, "doubled cube dumps 2^(n+1) rows");
    for pair in rows.chunks_exact(2) {
        assert!(
            (pair[0].2 - pair[1].2).abs() < 1e-12,
            "vertices {} and {} should carry equal mass",
            pair[0].0,
            pair[1].0
        );
    }
}

#[test]
fn reduced_dump_matches_protocol_success() {
    let csv = stdout_of(&[
        "distribution",
        "--algorithm",
        "optimal-reduced",
        "--n",
        "8",
        "--targets",
        "0",
    ]);
    let rows = parse_distribution(&csv);
    assert_eq!(rows.len(), 256);
    let frozen = frozen_row(8).unwrap().optimal_success;
    assert!((rows[0].2 - frozen).abs() < 1e-11);
}

#[test]
fn protocol_exact_json_carries_the_query_count() {
    let json = stdout_of(&[
        "protocol",
        "--algorithm",
        "optimal",
        "--n",
        "9",
        "--targets",
        "13",
    ]);
    let report: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(report["walk_queries_per_run"], 18);
    let success = report["success_probability"].as_f64().unwrap();
    assert!((success - frozen_row(9).unwrap().optimal_success).abs() < 1e-12);
}

#[test]
fn protocol_sampling_is_byte_deterministic() {
    let args = [
        "protocol",
        "--algorithm",
        "coin-measure",
        "--n",
        "7",
        "--targets",
        "5",
        "--mode",
        "sample",
        "--trials",
        "2000",
        "--seed",
        "71",
    ];
    let first = stdout_of(&args);
    let second = stdout_of(&args);
    assert_eq!(first, second);
    assert!(first.contains("\"success_rate\""));
    assert!(first.contains("\"success_ci95\""));
}

#[test]
fn random_targets_resolve_deterministically_from_the_seed() {
    let args = [
        "distribution",
        "--n",
        "6",
        "--targets",
        "random:2",
        "--seed",
        "3",
    ];
    assert_eq!(stdout_of(&args), stdout_of(&args));
}

#[test]
fn sweep_headers_are_stable_and_empty_ranges_are_fine() {
    let csv = stdout_of(&["sweep", "--n", "9..5"]);
    assert_eq!(csv, "n,t_f,p0,p1,p_c,optimal_queries,query_ratio,optimal_success\n");
}

#[test]
fn sweep_rows_match_the_frozen_baselines() {
    let csv = stdout_of(&["sweep", "--n", "5..6"]);
    let mut lines = csv.lines();
    lines.next();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let n: u32 = cells[0].parse().unwrap();
        let p0: f64 = cells[2].parse().unwrap();
        let p_c: f64 = cells[4].parse().unwrap();
        let frozen = frozen_row(n).unwrap();
        assert!((p0 - frozen.target_probability).abs() < 1e-11);
        assert!((p_c - frozen.coin_measure_success).abs() < 1e-11);
    }
}

#[test]
fn verify_suites_pass_and_set_exit_codes() {
    let out = qwalk_cmd(&["verify", "all", "--n", "6"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0 failed"), "{text}");

    // Unknown suite names are usage errors.
    let out = qwalk_cmd(&["verify", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_specs_exit_with_usage_errors() {
    // Malformed target list.
    let out = qwalk_cmd(&["distribution", "--n", "3", "--targets", "xyz"]);
    assert_eq!(out.status.code(), Some(2));

    // Target outside the cube.
    let out = qwalk_cmd(&["distribution", "--n", "3", "--targets", "99"]);
    assert_eq!(out.status.code(), Some(2));

    // Dimension too small for a walk.
    let out = qwalk_cmd(&["distribution", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
