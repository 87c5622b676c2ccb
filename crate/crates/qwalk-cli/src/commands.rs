//! Implementations behind the subcommands. Everything here is plumbing:
//! argument resolution, engine selection, and CSV/JSON emission; the
//! numerics all live in the library crate.

use std::error::Error;
use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use serde::Serialize;

use qwalk::optimal::{
    alternating_run, check_x_symmetry, extended_perturbed_run, fold_last_bit,
    optimal_query_count, selfloop_run, ExtendedConfig, SelfLoopConfig, StartState,
};
use qwalk::parity::{check_subspace_swap, factor_two_even_start, parity_initial, Parity};
use qwalk::protocol::{
    exact_report, odd_stopping_time, run_trials, ProtocolKind, ProtocolSpec,
};
use qwalk::report::{Check, CheckReport};
use qwalk::walk::{optimal_steps, run, QueryLedger, WalkConfig};
use qwalk::SeededRng;

use crate::{Algorithm, DistributionArgs, Format, Mode, ProtocolArgs, Suite, SweepArgs, VerifyArgs};

pub type CommandResult = Result<ExitCode, Box<dyn Error>>;

/// RNG stream reserved for drawing random target sets; trial substreams
/// never reach it.
const TARGET_STREAM: u64 = 1 << 63;

/// Floats destined for CSV cells: 12 significant digits, enough to diff
/// against exact values.
fn float_cell(value: f64) -> String {
    format!("{value:.11e}")
}

fn algorithm_name(algorithm: Algorithm) -> &'static str {
    match algorithm {
        Algorithm::Skw => "skw",
        Algorithm::Neighbour => "neighbour",
        Algorithm::CoinMeasure => "coin-measure",
        Algorithm::Optimal => "optimal",
        Algorithm::OptimalReduced => "optimal-reduced",
        Algorithm::Multi => "multi",
    }
}

fn join_targets(targets: &[u64]) -> String {
    targets
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_targets(spec: &str, n: u32, seed: u64) -> Result<Vec<u64>, Box<dyn Error>> {
    if let Some(count) = spec.strip_prefix("random:") {
        let m: u64 = count
            .parse()
            .map_err(|_| format!("invalid random target count {count:?}"))?;
        let vertices = 1u64
            .checked_shl(n)
            .filter(|_| n < 64)
            .ok_or("dimension too large for target sampling")?;
        if m == 0 || m > vertices {
            return Err(format!("random target count {m} outside 1..={vertices}").into());
        }
        let mut rng = SeededRng::substream(seed, TARGET_STREAM);
        let mut picked: Vec<u64> = Vec::with_capacity(m as usize);
        while (picked.len() as u64) < m {
            let vertex = rng.below(vertices);
            if !picked.contains(&vertex) {
                picked.push(vertex);
            }
        }
        picked.sort_unstable();
        Ok(picked)
    } else {
        spec.split(',')
            .map(|part| {
                part.trim()
                    .parse::<u64>()
                    .map_err(|_| format!("invalid vertex label {part:?}").into())
            })
            .collect()
    }
}

/// "auto" resolves to the stopping time the algorithm is designed around.
fn auto_steps(algorithm: Algorithm, n: u32) -> qwalk::Result<u64> {
    match algorithm {
        Algorithm::Skw | Algorithm::Neighbour => optimal_steps(n),
        Algorithm::CoinMeasure => odd_stopping_time(n),
        Algorithm::Optimal | Algorithm::OptimalReduced | Algorithm::Multi => {
            optimal_query_count(n)
        }
    }
}

fn resolve_steps(requested: &str, algorithm: Algorithm, n: u32) -> Result<u64, Box<dyn Error>> {
    if requested == "auto" {
        Ok(auto_steps(algorithm, n)?)
    } else {
        Ok(requested
            .parse::<u64>()
            .map_err(|_| format!("invalid step count {requested:?} (integer or \"auto\")"))?)
    }
}

fn open_output(path: &str) -> io::Result<Box<dyn Write>> {
    if path == "-" {
        Ok(Box::new(io::stdout()))
    } else {
        Ok(Box::new(File::create(path)?))
    }
}

#[derive(Serialize)]
struct DistributionDump<'a> {
    algorithm: &'static str,
    n: u32,
    targets: &'a [u64],
    steps: u64,
    probabilities: &'a [f64],
}

pub fn distribution(args: &DistributionArgs) -> CommandResult {
    let targets = parse_targets(&args.targets, args.n, args.seed)?;
    let steps = resolve_steps(&args.steps, args.algorithm, args.n)?;

    let mut ledger = QueryLedger::new();
    let per_vertex: Vec<f64> = match args.algorithm {
        Algorithm::Skw | Algorithm::Neighbour | Algorithm::CoinMeasure => {
            let cfg = WalkConfig::new(args.n, targets.clone())?;
            run(&cfg, steps, &mut ledger)?
                .vertex_distribution()?
                .per_vertex()
                .to_vec()
        }
        // The doubled cube carries one extra vertex bit, so this dump has
        // 2^(n+1) rows.
        Algorithm::Optimal => {
            let cfg = ExtendedConfig::new(args.n, targets.clone())?;
            alternating_run(&cfg, steps, StartState::Uniform, &mut ledger)?
                .vertex_distribution()?
                .per_vertex()
                .to_vec()
        }
        Algorithm::OptimalReduced | Algorithm::Multi => {
            let cfg = SelfLoopConfig::new(args.n, targets.clone())?;
            selfloop_run(&cfg, steps, &mut ledger)?
                .vertex_distribution()?
                .per_vertex()
                .to_vec()
        }
    };

    let mut out = open_output(&args.output)?;
    match args.format {
        Format::Csv => {
            writeln!(out, "vertex,hamming_weight,probability")?;
            for (vertex, p) in per_vertex.iter().enumerate() {
                writeln!(
                    out,
                    "{vertex},{},{}",
                    (vertex as u64).count_ones(),
                    float_cell(*p)
                )?;
            }
        }
        Format::Json => {
            let dump = DistributionDump {
                algorithm: algorithm_name(args.algorithm),
                n: args.n,
                targets: &targets,
                steps,
                probabilities: &per_vertex,
            };
            serde_json::to_writer_pretty(&mut out, &dump)?;
            writeln!(out)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn protocol(args: &ProtocolArgs) -> CommandResult {
    let targets = parse_targets(&args.targets, args.n, args.seed)?;
    let kind = match args.algorithm {
        Algorithm::Skw => ProtocolKind::Skw,
        Algorithm::Neighbour => ProtocolKind::Neighbour,
        Algorithm::CoinMeasure => ProtocolKind::CoinMeasure,
        // Both names run the self-loop engine; "optimal" is the claim,
        // "optimal-reduced" the storage layout.
        Algorithm::Optimal | Algorithm::OptimalReduced => ProtocolKind::Optimal,
        Algorithm::Multi => ProtocolKind::Multi,
    };
    let spec = ProtocolSpec::new(kind, args.n, targets)?.with_max_runs(args.max_runs);

    let mut out = open_output(&args.output)?;
    match args.mode {
        Mode::Exact => {
            let report = exact_report(&spec)?;
            match args.format {
                Format::Json => {
                    serde_json::to_writer_pretty(&mut out, &report)?;
                    writeln!(out)?;
                }
                Format::Csv => {
                    writeln!(
                        out,
                        "algorithm,n,targets,max_runs,walk_queries_per_run,single_run_success,success_probability,expected_runs,expected_walk_queries,expected_verify_queries"
                    )?;
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{}",
                        algorithm_name(args.algorithm),
                        args.n,
                        join_targets(&report.spec.marked),
                        report.spec.max_runs,
                        report.walk_queries_per_run,
                        float_cell(report.single_run_success),
                        float_cell(report.success_probability),
                        float_cell(report.expected_runs),
                        float_cell(report.expected_walk_queries),
                        float_cell(report.expected_verify_queries),
                    )?;
                }
            }
        }
        Mode::Sample => {
            let report = run_trials(&spec, args.trials, args.seed)?;
            match args.format {
                Format::Json => {
                    serde_json::to_writer_pretty(&mut out, &report)?;
                    writeln!(out)?;
                }
                // Fixed columns; the neighbour scan statistics are
                // JSON-only so the schema stays stable across algorithms.
                Format::Csv => {
                    writeln!(
                        out,
                        "algorithm,n,targets,max_runs,trials,seed,successes,success_rate,success_ci95,mean_runs,mean_walk_queries,mean_verify_queries"
                    )?;
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{},{},{}",
                        algorithm_name(args.algorithm),
                        args.n,
                        join_targets(&report.spec.marked),
                        report.spec.max_runs,
                        report.trials,
                        report.seed,
                        report.successes,
                        float_cell(report.success_rate),
                        float_cell(report.success_ci95),
                        float_cell(report.mean_runs),
                        float_cell(report.mean_walk_queries),
                        float_cell(report.mean_verify_queries),
                    )?;
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Inclusive "a..b", or a single value. a > b is an empty range.
fn parse_range(spec: &str) -> Result<Vec<u32>, Box<dyn Error>> {
    let parsed = if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u32 = lo.trim().parse()?;
        let hi: u32 = hi.trim().parse()?;
        (lo..=hi).collect()
    } else {
        vec![spec.trim().parse()?]
    };
    Ok(parsed)
}

pub fn sweep(args: &SweepArgs) -> CommandResult {
    let range =
        parse_range(&args.n).map_err(|e| format!("invalid range {:?}: {e}", args.n))?;
    let mut out = open_output(&args.output)?;
    writeln!(
        out,
        "n,t_f,p0,p1,p_c,optimal_queries,query_ratio,optimal_success"
    )?;
    for n in range {
        let t_f = optimal_steps(n)?;
        let cfg = WalkConfig::new(n, vec![0])?;
        let mut ledger = QueryLedger::new();
        let dist = run(&cfg, t_f, &mut ledger)?.vertex_distribution()?;
        let p0 = dist.probability(0);
        let p1 = dist.shell_sums(n)[1];
        let p_c = exact_report(&ProtocolSpec::new(ProtocolKind::CoinMeasure, n, vec![0])?)?
            .success_probability;
        let optimal = exact_report(&ProtocolSpec::new(ProtocolKind::Optimal, n, vec![0])?)?;
        let queries = optimal.walk_queries_per_run;
        writeln!(
            out,
            "{n},{t_f},{},{},{},{queries},{},{}",
            float_cell(p0),
            float_cell(p1),
            float_cell(p_c),
            float_cell(queries as f64 / t_f as f64),
            float_cell(optimal.success_probability),
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

fn shell_suite(max_n: u32, reports: &mut Vec<CheckReport>) -> qwalk::Result<()> {
    for n in 3..=max_n.max(3) {
        let t_max = 2 * optimal_steps(n)?;
        reports.push(qwalk::parity::shell_inequalities(n, t_max)?.checks);
    }
    Ok(())
}

fn parity_suite(n: u32, rng: &mut SeededRng, reports: &mut Vec<CheckReport>) -> qwalk::Result<()> {
    let far_corner = (1u64 << n) - 1;
    for target in [0, far_corner] {
        let cfg = WalkConfig::new(n, vec![target])?;
        reports.push(check_subspace_swap(&cfg, 6, rng)?);
    }

    let mut start_identity = CheckReport::new(format!("odd start steps onto even start, n = {n}"));
    for target in [0, far_corner / 3] {
        let cfg = WalkConfig::new(n, vec![target])?;
        let mut ledger = QueryLedger::new();
        let mut odd = parity_initial(&cfg, Parity::Odd)?;
        qwalk::walk::step(&mut odd, &cfg, &mut ledger)?;
        let even = parity_initial(&cfg, Parity::Even)?;
        start_identity.push(Check::residual(
            format!("target {target}"),
            odd.max_abs_diff(&even)?,
            1e-12,
        ));
    }
    reports.push(start_identity);

    reports.push(factor_two_even_start(n)?.checks);
    Ok(())
}

fn two_coin_suite(n: u32, rng: &mut SeededRng, reports: &mut Vec<CheckReport>) -> qwalk::Result<()> {
    let far_corner = (1u64 << n) - 1;
    for target in [0, far_corner] {
        let cfg = ExtendedConfig::new(n, vec![target])?;
        reports.push(check_x_symmetry(&cfg, 5, rng)?);
    }

    let target = far_corner / 3;
    let cfg = ExtendedConfig::new(n, vec![target])?;
    let loop_cfg = SelfLoopConfig::new(n, vec![target])?;
    let image = qwalk::optimal::embed(target, n)?;
    let mut report = CheckReport::new(format!("alternation and reduction, n = {n}, target {target}"));

    for pairs in [1, optimal_query_count(n)?] {
        let mut ledger = QueryLedger::new();
        let plain = extended_perturbed_run(&cfg, 2 * pairs, StartState::EvenProjected, &mut ledger)?;
        let alternating = alternating_run(&cfg, pairs, StartState::EvenProjected, &mut ledger)?;
        report.push(Check::residual(
            format!("alternation equals doubled plain walk, {pairs} pairs"),
            plain.max_abs_diff(&alternating)?,
            1e-12,
        ));

        let folded = fold_last_bit(
            extended_perturbed_run(&cfg, 2 * pairs, StartState::EvenProjected, &mut ledger)?
                .vertex_distribution()?
                .per_vertex(),
        );
        let reduced = selfloop_run(&loop_cfg, pairs, &mut ledger)?.vertex_distribution()?;
        let worst = folded
            .iter()
            .enumerate()
            .map(|(x, &p)| (p - reduced.probability(x as u64)).abs())
            .fold(0.0, f64::max);
        report.push(Check::residual(
            format!("self-loop marginal matches doubled cube, {pairs} pairs"),
            worst,
            1e-12,
        ));
    }

    let mut ledger = QueryLedger::new();
    let dist = alternating_run(&cfg, optimal_query_count(n)?, StartState::Uniform, &mut ledger)?
        .vertex_distribution()?;
    report.push(Check::residual(
        "uniform start splits image and partner equally",
        (dist.probability(image) - dist.probability(image ^ 1)).abs(),
        1e-12,
    ));

    reports.push(report);
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> CommandResult {
    let mut rng = SeededRng::new(args.seed);
    let mut reports: Vec<CheckReport> = Vec::new();
    match args.suite {
        Suite::ShellInequalities => shell_suite(args.n.unwrap_or(8), &mut reports)?,
        Suite::Parity => parity_suite(args.n.unwrap_or(8), &mut rng, &mut reports)?,
        Suite::TwoCoinIdentities => two_coin_suite(args.n.unwrap_or(6), &mut rng, &mut reports)?,
        Suite::All => {
            shell_suite(args.n.unwrap_or(8), &mut reports)?;
            parity_suite(args.n.unwrap_or(8), &mut rng, &mut reports)?;
            two_coin_suite(args.n.unwrap_or(6), &mut rng, &mut reports)?;
        }
    }

    let mut total = 0usize;
    let mut failed = 0usize;
    for report in &reports {
        println!("[{}]", report.label);
        for check in &report.checks {
            total += 1;
            let verdict = if check.passed {
                "PASS"
            } else {
                failed += 1;
                "FAIL"
            };
            println!(
                "  {}: {:.3e} (bound {:.1e}) {verdict}",
                check.name, check.residual, check.tolerance
            );
        }
    }
    println!("{total} checks, {failed} failed");
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
