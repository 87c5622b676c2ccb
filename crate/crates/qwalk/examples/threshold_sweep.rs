//! Regenerates the frozen baseline table in `src/thresholds.rs`.
//!
//! Run with `cargo run --release --example threshold_sweep`; paste the
//! printed `FROZEN` array over the one in the source when walk definitions
//! change. Target 0 is canonical: success probabilities are invariant under
//! the vertex relabeling that maps any single target to 0.

use qwalk::protocol::{exact_report, even_stopping_time, odd_stopping_time, ProtocolKind, ProtocolSpec};
use qwalk::walk::optimal_steps;

fn main() {
    let mut rows = Vec::new();
    println!(
        "{:>3} {:>4} {:>5} {:>5} {:>12} {:>12} {:>12} {:>12} {:>7} {:>12} {:>8}",
        "n", "t_f", "t_fo", "t_fe", "p_target", "p_neighbour", "p_coin", "p_even", "queries", "p_optimal", "ratio"
    );
    for n in 5..=12u32 {
        let t_f = optimal_steps(n).unwrap();
        let t_fo = odd_stopping_time(n).unwrap();
        let t_fe = even_stopping_time(n).unwrap();

        let skw = exact_report(
            &ProtocolSpec::new(ProtocolKind::Skw, n, vec![0])
                .unwrap()
                .with_max_runs(1),
        )
        .unwrap();
        let neighbour =
            exact_report(&ProtocolSpec::new(ProtocolKind::Neighbour, n, vec![0]).unwrap()).unwrap();
        let coin =
            exact_report(&ProtocolSpec::new(ProtocolKind::CoinMeasure, n, vec![0]).unwrap())
                .unwrap();
        let even_odd =
            exact_report(&ProtocolSpec::new(ProtocolKind::EvenOdd, n, vec![0]).unwrap()).unwrap();
        let optimal =
            exact_report(&ProtocolSpec::new(ProtocolKind::Optimal, n, vec![0]).unwrap()).unwrap();

        let queries = optimal.walk_queries_per_run;
        let ratio = queries as f64 / t_f as f64;
        println!(
            "{:>3} {:>4} {:>5} {:>5} {:>12.9} {:>12.9} {:>12.9} {:>12.9} {:>7} {:>12.9} {:>8.5}",
            n,
            t_f,
            t_fo,
            t_fe,
            skw.success_probability,
            neighbour.success_probability,
            coin.success_probability,
            even_odd.single_run_success,
            queries,
            optimal.success_probability,
            ratio
        );
        rows.push((
            n,
            skw.success_probability,
            neighbour.success_probability,
            coin.success_probability,
            even_odd.single_run_success,
            optimal.success_probability,
        ));
    }

    println!("\npub const FROZEN: [FrozenRow; {}] = [", rows.len());
    for (n, p0, pn, pc, pe, po) in rows {
        println!("    FrozenRow {{");
        println!("        n: {n},");
        println!("        target_probability: {p0:.15},");
        println!("        neighbour_success: {pn:.15},");
        println!("        coin_measure_success: {pc:.15},");
        println!("        even_start_probability: {pe:.15},");
        println!("        optimal_success: {po:.15},");
        println!("    }},");
    }
    println!("];");
}
