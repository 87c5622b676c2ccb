//! Acceptance suite: one test per headline claim, each printing a PASS line
//! with its measured numbers (run with `-- --nocapture` to see them).
//! Tolerances are pinned here and never loosened to make a run green; the
//! frozen baselines in `qwalk::thresholds` come from the exact pre-build
//! sweep committed alongside the code (`examples/threshold_sweep.rs`).

use qwalk::collapsed::collapsed_run;
use qwalk::optimal::{
    alternating_run, check_x_symmetry, embed, extended_perturbed_run, fold_last_bit,
    optimal_query_count, selfloop_run, ExtendedConfig, SelfLoopConfig, StartState,
};
use qwalk::parity::{
    check_subspace_swap, factor_two_even_start, parity_initial, shell_inequalities, Parity,
    ParityProjector,
};
use qwalk::protocol::{exact_report, run_trials, ProtocolKind, ProtocolSpec};
use qwalk::thresholds::frozen_row;
use qwalk::walk::{optimal_steps, run, QueryLedger, WalkConfig};
use qwalk::SeededRng;

const TRIALS: u64 = 10_000;

/// 4-sigma binomial band around an exact success probability.
fn binomial_band(p: f64, trials: u64) -> f64 {
    4.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

#[test]
fn criterion_1_peak_at_target_after_optimal_steps() {
    let n = 5u32;
    let cfg = WalkConfig::new(n, vec![0]).unwrap();
    let t_f = optimal_steps(n).unwrap();
    assert_eq!(t_f, 6);

    let mut ledger = QueryLedger::new();
    let dist = run(&cfg, t_f, &mut ledger)
        .unwrap()
        .vertex_distribution()
        .unwrap();
    let p0 = dist.probability(0);
    let shells = dist.shell_sums(n);

    assert_eq!(dist.argmax(), 0, "marked vertex must carry the peak");
    assert!(
        (0.3..=0.6).contains(&p0),
        "target probability {p0} outside [0.3, 0.6]"
    );
    assert!(
        shells[1] >= p0,
        "weight-1 shell {} fell below target probability {p0}",
        shells[1]
    );
    println!("criterion 1 (target peak, n=5, t=6): PASS  p0={p0:.9} shell1={:.9}", shells[1]);
}

#[test]
fn criterion_2_shell_inequalities_across_dimensions() {
    let mut worst = 0.0f64;
    for n in 3..=10u32 {
        let t_max = 2 * optimal_steps(n).unwrap();
        let report = shell_inequalities(n, t_max).unwrap();
        assert!(
            report.checks.passed(),
            "n={n}: {:?}",
            report.checks.failures().collect::<Vec<_>>()
        );
        worst = worst.max(report.checks.worst_residual());
    }
    println!("criterion 2 (shell inequalities, n=3..10): PASS  worst residual {worst:.3e}");
}

#[test]
fn criterion_3_collapsed_walk_lifts_onto_full_walk() {
    let mut worst = 0.0f64;
    for n in 2..=8u32 {
        let cfg = WalkConfig::new(n, vec![0]).unwrap();
        let t_max = 2 * optimal_steps(n).unwrap();
        let mut ledger = QueryLedger::new();
        for t in 0..=t_max {
            let full = run(&cfg, t, &mut ledger).unwrap();
            let lifted = collapsed_run(n, t).unwrap().lift().unwrap();
            let diff = full.max_abs_diff(&lifted).unwrap();
            assert!(diff < 1e-10, "n={n} t={t}: lift deviates by {diff:e}");
            worst = worst.max(diff);
        }
    }
    println!("criterion 3 (collapsed-walk lift, n=2..8): PASS  worst residual {worst:.3e}");
}

#[test]
fn criterion_4_parity_identities_and_factor_two() {
    let mut rng = SeededRng::new(41);

    // Projector algebra: complementary projectors split the space exactly.
    for (n, reference) in [(4u32, 5u64), (6, 0), (8, 129)] {
        let probe = qwalk::WalkState::random_normalized(n as usize, n, &mut rng).unwrap();
        let even = ParityProjector::new(Parity::Even, reference).project(&probe);
        let odd = ParityProjector::new(Parity::Odd, reference).project(&probe);
        let mut sum = even.clone();
        for (a, b) in sum.amplitudes_mut().iter_mut().zip(odd.amplitudes()) {
            *a += b;
        }
        assert_eq!(sum.max_abs_diff(&probe).unwrap(), 0.0);
        assert_eq!(even.inner(&odd).unwrap().norm(), 0.0);
        let twice = ParityProjector::new(Parity::Even, reference).project(&even);
        assert_eq!(twice.max_abs_diff(&even).unwrap(), 0.0);
    }

    // One perturbed step maps the odd-parity start onto the even one.
    for (n, target) in [(2u32, 0u64), (4, 5), (6, 37), (8, 255)] {
        let cfg = WalkConfig::new(n, vec![target]).unwrap();
        let mut ledger = QueryLedger::new();
        let mut s = parity_initial(&cfg, Parity::Odd).unwrap();
        qwalk::walk::step(&mut s, &cfg, &mut ledger).unwrap();
        let even = parity_initial(&cfg, Parity::Even).unwrap();
        let diff = s.max_abs_diff(&even).unwrap();
        assert!(diff < 1e-12, "n={n}: odd start stepped {diff:e} from even start");
    }

    // Each step swaps the even and odd subspaces.
    for (n, target) in [(4u32, 3u64), (6, 37), (8, 200)] {
        let cfg = WalkConfig::new(n, vec![target]).unwrap();
        let report = check_subspace_swap(&cfg, 6, &mut rng).unwrap();
        assert!(
            report.passed(),
            "n={n}: {:?}",
            report.failures().collect::<Vec<_>>()
        );
    }

    // Even-parity start doubles the target probability, exactly.
    let mut worst = 0.0f64;
    for n in [4u32, 6, 8] {
        let report = factor_two_even_start(n).unwrap();
        assert!(
            report.checks.passed(),
            "n={n}: {:?}",
            report.checks.failures().collect::<Vec<_>>()
        );
        worst = worst.max(report.checks.worst_residual());
    }
    println!("criterion 4 (parity identities, n<=8): PASS  worst factor-2 residual {worst:.3e}");
}

#[test]
fn criterion_5_two_coin_walk_identities() {
    let mut rng = SeededRng::new(57);
    let mut worst = 0.0f64;

    for (n, target) in [(3u32, 6u64), (4, 11), (5, 0), (6, 37)] {
        let cfg = ExtendedConfig::new(n, vec![target]).unwrap();

        // Alternating perturbed/free pairs equal the plain perturbed walk
        // run for twice as many steps, on even-parity starts.
        for pairs in [1u64, optimal_query_count(n).unwrap()] {
            let mut ledger = QueryLedger::new();
            let plain =
                extended_perturbed_run(&cfg, 2 * pairs, StartState::EvenProjected, &mut ledger)
                    .unwrap();
            let alternating =
                alternating_run(&cfg, pairs, StartState::EvenProjected, &mut ledger).unwrap();
            let diff = plain.max_abs_diff(&alternating).unwrap();
            assert!(diff < 1e-12, "n={n} pairs={pairs}: alternation deviates {diff:e}");
            worst = worst.max(diff);
        }

        // Bit-flip symmetry: commutes with both steps, fixes the uniform
        // start, exchanges the parity-projected starts.
        let report = check_x_symmetry(&cfg, 5, &mut rng).unwrap();
        assert!(
            report.passed(),
            "n={n}: {:?}",
            report.failures().collect::<Vec<_>>()
        );

        // From the uniform start, the alternating walk commutes with the
        // pair bit flip, so image and partner vertices share their mass
        // equally.
        let image = embed(target, n).unwrap();
        let mut ledger = QueryLedger::new();
        let dist = alternating_run(
            &cfg,
            optimal_query_count(n).unwrap(),
            StartState::Uniform,
            &mut ledger,
        )
        .unwrap()
        .vertex_distribution()
        .unwrap();
        let split = (dist.probability(image) - dist.probability(image ^ 1)).abs();
        assert!(split < 1e-12, "n={n}: image/partner split differs by {split:e}");
        worst = worst.max(split);

        // The self-loop walk is the extended walk with the pair bit traced
        // out: marginals agree at every pair count.
        let loop_cfg = SelfLoopConfig::new(n, vec![target]).unwrap();
        for pairs in [1u64, 2, optimal_query_count(n).unwrap()] {
            let mut ledger = QueryLedger::new();
            let folded = fold_last_bit(
                extended_perturbed_run(&cfg, 2 * pairs, StartState::EvenProjected, &mut ledger)
                    .unwrap()
                    .vertex_distribution()
                    .unwrap()
                    .per_vertex(),
            );
            let reduced = selfloop_run(&loop_cfg, pairs, &mut ledger)
                .unwrap()
                .vertex_distribution()
                .unwrap();
            for (x, &p) in folded.iter().enumerate() {
                let diff = (p - reduced.probability(x as u64)).abs();
                assert!(diff < 1e-12, "n={n} pairs={pairs} x={x}: marginals differ {diff:e}");
                worst = worst.max(diff);
            }
        }
    }
    println!("criterion 5 (two-coin identities, extended dim <= 7): PASS  worst residual {worst:.3e}");
}

#[test]
fn criterion_6_query_reduction_holds_with_frozen_success() {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for n in 8..=12u32 {
        let queries = optimal_query_count(n).unwrap();
        assert_eq!(queries, optimal_steps(n + 1).unwrap() / 2);

        let spec = ProtocolSpec::new(ProtocolKind::Optimal, n, vec![0]).unwrap();
        let exact = exact_report(&spec).unwrap();
        assert_eq!(exact.walk_queries_per_run, queries);

        // A fresh ledger-driven run must book exactly the claimed count.
        let cfg = SelfLoopConfig::new(n, vec![0]).unwrap();
        let mut ledger = QueryLedger::new();
        selfloop_run(&cfg, queries, &mut ledger).unwrap();
        assert_eq!(ledger.walk_queries(), queries);

        let frozen = frozen_row(n).expect("sweep covers n=8..12").optimal_success;
        assert!(
            exact.success_probability >= frozen - 1e-12,
            "n={n}: success {} fell below frozen baseline {frozen}",
            exact.success_probability
        );

        let ratio = queries as f64 / optimal_steps(n).unwrap() as f64;
        if n == 12 {
            assert!(
                (ratio - inv_sqrt2).abs() < 0.1,
                "n=12: query ratio {ratio} not within 0.1 of 1/sqrt(2)"
            );
            println!(
                "criterion 6 (query reduction, n=8..12): PASS  n=12 ratio {ratio:.5} vs {:.5}, success {:.9}",
                inv_sqrt2, exact.success_probability
            );
        }
    }
}

#[test]
fn criterion_7_monte_carlo_agrees_with_exact_probabilities() {
    let n = 9u32;
    let target = 13u64;
    let specs = [
        (
            "skw, single run",
            ProtocolSpec::new(ProtocolKind::Skw, n, vec![target])
                .unwrap()
                .with_max_runs(1),
            11u64,
        ),
        (
            "skw, repeated",
            ProtocolSpec::new(ProtocolKind::Skw, n, vec![target]).unwrap(),
            11,
        ),
        (
            "neighbour",
            ProtocolSpec::new(ProtocolKind::Neighbour, n, vec![target]).unwrap(),
            12,
        ),
        (
            "coin-measure",
            ProtocolSpec::new(ProtocolKind::CoinMeasure, n, vec![target]).unwrap(),
            13,
        ),
        (
            "optimal",
            ProtocolSpec::new(ProtocolKind::Optimal, n, vec![target]).unwrap(),
            14,
        ),
    ];

    let mut neighbour_report = None;
    for (label, spec, seed) in specs {
        let exact = exact_report(&spec).unwrap();
        let batch = run_trials(&spec, TRIALS, seed).unwrap();
        let band = binomial_band(exact.success_probability, TRIALS);
        let gap = (batch.success_rate - exact.success_probability).abs();
        assert!(
            gap <= band,
            "{label}: sampled rate {} vs exact {} (4-sigma band {band})",
            batch.success_rate,
            exact.success_probability
        );
        // Restart counts must track their expectation as well.
        let runs_gap = (batch.mean_runs - exact.expected_runs).abs();
        let runs_band = 4.0 * (exact.expected_runs / TRIALS as f64).sqrt().max(1e-4);
        assert!(
            runs_gap <= runs_band.max(0.1),
            "{label}: mean runs {} vs expected {}",
            batch.mean_runs,
            exact.expected_runs
        );
        println!(
            "criterion 7 ({label}): PASS  sampled {:.4} exact {:.4} band {:.4}",
            batch.success_rate, exact.success_probability, band
        );
        if spec.kind == ProtocolKind::Neighbour {
            neighbour_report = Some(batch);
        }
    }

    // A miss adjacent to the target scans directions until it hits, so the
    // scan length is uniform on 1..=n with mean (n+1)/2.
    let stats = neighbour_report
        .unwrap()
        .neighbour_stats
        .expect("neighbour batch carries scan statistics");
    assert!(stats.adjacent_misses > 1_000, "too few adjacent misses to test");
    let expected = (n as f64 + 1.0) / 2.0;
    let sigma = ((n as f64 * n as f64 - 1.0) / 12.0).sqrt();
    let band = 4.0 * sigma / (stats.adjacent_misses as f64).sqrt();
    let gap = (stats.mean_scan_queries_adjacent_miss - expected).abs();
    assert!(
        gap <= band,
        "adjacent-miss scan mean {} vs {expected} (band {band})",
        stats.mean_scan_queries_adjacent_miss
    );
    println!(
        "criterion 7 (neighbour scan mean): PASS  {:.3} vs {expected} over {} misses",
        stats.mean_scan_queries_adjacent_miss, stats.adjacent_misses
    );

    // On identical seeds the neighbour protocol draws the same measurement
    // as a single-run repeat protocol, so it can only do better.
    let skw_once = run_trials(
        &ProtocolSpec::new(ProtocolKind::Skw, n, vec![target])
            .unwrap()
            .with_max_runs(1),
        TRIALS,
        12,
    )
    .unwrap();
    let neighbour = run_trials(
        &ProtocolSpec::new(ProtocolKind::Neighbour, n, vec![target]).unwrap(),
        TRIALS,
        12,
    )
    .unwrap();
    assert!(
        neighbour.successes >= skw_once.successes,
        "neighbour protocol lost to plain measurement on equal seeds"
    );
}

#[test]
fn criterion_8_even_start_doubles_multi_target_mass() {
    let n = 10u32;
    let targets = vec![13u64, 900];
    let cfg = ExtendedConfig::new(n, targets.clone()).unwrap();
    let images: Vec<u64> = targets.iter().map(|&x| embed(x, n).unwrap()).collect();

    let mut worst = 0.0f64;
    for steps in [10u64, 2 * optimal_query_count(n).unwrap()] {
        let mut ledger = QueryLedger::new();
        let uniform = extended_perturbed_run(&cfg, steps, StartState::Uniform, &mut ledger)
            .unwrap()
            .vertex_distribution()
            .unwrap();
        let even = extended_perturbed_run(&cfg, steps, StartState::EvenProjected, &mut ledger)
            .unwrap()
            .vertex_distribution()
            .unwrap();
        let mass = |dist: &qwalk::Distribution| -> f64 {
            images.iter().map(|&img| dist.probability(img)).sum()
        };
        let residual = (mass(&even) - 2.0 * mass(&uniform)).abs();
        assert!(
            residual < 1e-12,
            "steps={steps}: even-start mass differs from twice uniform by {residual:e}"
        );
        worst = worst.max(residual);
    }
    println!("criterion 8 (multi-target factor 2, n=10 m=2): PASS  worst residual {worst:.3e}");

    // Report-only: success of the self-loop protocol for small target sets.
    for marked in [vec![13u64, 900], vec![13, 900, 77], vec![13, 900, 77, 512]] {
        let spec = ProtocolSpec::new(ProtocolKind::Multi, n, marked.clone()).unwrap();
        let exact = exact_report(&spec).unwrap();
        println!(
            "criterion 8 (report only): m={} success {:.9} with {} queries",
            marked.len(),
            exact.success_probability,
            exact.walk_queries_per_run
        );
    }
}
