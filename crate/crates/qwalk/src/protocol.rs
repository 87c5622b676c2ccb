//! Classical search protocols wrapped around the walks, with strict oracle
//! accounting.
//!
//! Protocols see the marked set only through an [`Oracle`]: classical
//! membership tests and in-superposition perturbed-coin applications, each
//! booked in a [`QueryLedger`]. The Monte-Carlo batch runner exploits that
//! every run of a given walk is the same deterministic state, so it
//! evaluates the final distribution once and then samples trials from it;
//! query counts follow the same rules as the oracle-driven functions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimal::{optimal_query_count, selfloop_pair, SelfLoopConfig};
use crate::parity::{uniform_parity_state, Parity};
use crate::state::{Distribution, SeededRng, WalkState};
use crate::walk::{
    apply_shift, marked_coin_kernel, optimal_steps, validate_marked, QueryLedger, WalkConfig,
};

/// Default cap on restarts of the repeat-until-success protocol.
pub const DEFAULT_MAX_RUNS: u64 = 32;

/// Search oracle holding the hidden marked set.
///
/// The set itself is private: protocols can only test membership through
/// [`Oracle::verify`] or perturb a coin through the `apply_perturbed_*`
/// methods, and every access increments the ledger.
#[derive(Clone, Debug)]
pub struct Oracle {
    n: u32,
    marked: Vec<u64>,
    ledger: QueryLedger,
}

impl Oracle {
    pub fn new(n: u32, marked: impl Into<Vec<u64>>) -> Result<Self> {
        let mut marked = marked.into();
        validate_marked(n, &mut marked)?;
        Ok(Self {
            n,
            marked,
            ledger: QueryLedger::new(),
        })
    }

    /// Dimension of the hypercube the hidden set lives in.
    pub fn dimension(&self) -> u32 {
        self.n
    }

    pub fn marked_count(&self) -> usize {
        self.marked.len()
    }

    pub fn ledger(&self) -> QueryLedger {
        self.ledger
    }

    /// Classical membership query.
    pub fn verify(&mut self, x: u64) -> bool {
        self.ledger.record_verify_query();
        self.marked.binary_search(&x).is_ok()
    }

    /// One in-superposition query: the perturbed coin of the hypercube walk.
    pub fn apply_perturbed_coin(&mut self, s: &mut WalkState) -> Result<()> {
        self.check_shape(s, self.n as usize)?;
        marked_coin_kernel(s, &self.marked);
        self.ledger.record_walk_query();
        Ok(())
    }

    /// One in-superposition query: one alternating pair of the self-loop
    /// walk (perturbed coin, shift, free coin, shift).
    pub fn apply_selfloop_pair(&mut self, s: &mut WalkState) -> Result<()> {
        self.check_shape(s, self.n as usize + 1)?;
        selfloop_pair(s, &self.marked, &mut self.ledger)
    }

    /// Ground-truth membership for outcome reporting; bypasses the ledger
    /// and must never steer a protocol.
    pub fn ground_truth_contains(&self, x: u64) -> bool {
        self.marked.binary_search(&x).is_ok()
    }

    fn check_shape(&self, s: &WalkState, coins: usize) -> Result<()> {
        if s.coins() != coins || s.vertex_bits() != self.n {
            return Err(Error::ShapeMismatch {
                left_coins: s.coins(),
                left_bits: s.vertex_bits(),
                right_coins: coins,
                right_bits: self.n,
            });
        }
        Ok(())
    }
}

/// Result of one protocol execution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProtocolOutcome {
    /// Vertex the protocol positively verified, if any.
    pub found: Option<u64>,
    /// Ground-truth confirmation of `found`; reporting only.
    pub success: bool,
    pub walk_queries: u64,
    pub verify_queries: u64,
    pub runs_used: u64,
}

fn outcome(oracle: &Oracle, at_entry: QueryLedger, found: Option<u64>, runs: u64) -> ProtocolOutcome {
    let used = oracle.ledger().since(at_entry);
    ProtocolOutcome {
        found,
        success: found.is_some_and(|x| oracle.ground_truth_contains(x)),
        walk_queries: used.walk_queries(),
        verify_queries: used.verify_queries(),
        runs_used: runs,
    }
}

fn searched_walk(oracle: &mut Oracle, steps: u64, start: WalkState) -> Result<WalkState> {
    let mut s = start;
    for _ in 0..steps {
        oracle.apply_perturbed_coin(&mut s)?;
        apply_shift(&mut s)?;
    }
    Ok(s)
}

/// Repeat-until-success search: run the walk to its stopping time, measure,
/// verify; restart on a miss, up to `max_runs` times.
pub fn protocol_skw(
    oracle: &mut Oracle,
    rng: &mut SeededRng,
    max_runs: u64,
) -> Result<ProtocolOutcome> {
    let n = oracle.dimension();
    let steps = optimal_steps(n)?;
    let at_entry = oracle.ledger();
    for run in 1..=max_runs {
        let s = searched_walk(oracle, steps, WalkState::uniform(n as usize, n)?)?;
        let x = s.vertex_distribution()?.sample(rng).vertex;
        if oracle.verify(x) {
            return Ok(outcome(oracle, at_entry, Some(x), run));
        }
    }
    Ok(outcome(oracle, at_entry, None, max_runs))
}

/// Single-run search that widens acceptance to the measured vertex's
/// neighbourhood: verify the measurement, then each neighbour in ascending
/// direction order until a hit.
pub fn protocol_neighbour(oracle: &mut Oracle, rng: &mut SeededRng) -> Result<ProtocolOutcome> {
    let n = oracle.dimension();
    let steps = optimal_steps(n)?;
    let at_entry = oracle.ledger();
    let s = searched_walk(oracle, steps, WalkState::uniform(n as usize, n)?)?;
    let x = s.vertex_distribution()?.sample(rng).vertex;
    if oracle.verify(x) {
        return Ok(outcome(oracle, at_entry, Some(x), 1));
    }
    for d in 0..n {
        let neighbour = x ^ (1 << d);
        if oracle.verify(neighbour) {
            return Ok(outcome(oracle, at_entry, Some(neighbour), 1));
        }
    }
    Ok(outcome(oracle, at_entry, None, 1))
}

/// Single-run search that measures the coin along with the vertex after an
/// odd stopping time: on a miss, the coin points back at the target, so only
/// the one indicated neighbour is verified. At most two verifications.
pub fn protocol_coin_measure(oracle: &mut Oracle, rng: &mut SeededRng) -> Result<ProtocolOutcome> {
    let n = oracle.dimension();
    let steps = odd_stopping_time(n)?;
    let at_entry = oracle.ledger();
    let s = searched_walk(oracle, steps, WalkState::uniform(n as usize, n)?)?;
    let sample = s.joint_distribution()?.sample(rng);
    let x = sample.vertex;
    if oracle.verify(x) {
        return Ok(outcome(oracle, at_entry, Some(x), 1));
    }
    let indicated = x ^ (1 << sample.coin.expect("joint sample carries the coin"));
    if oracle.verify(indicated) {
        return Ok(outcome(oracle, at_entry, Some(indicated), 1));
    }
    Ok(outcome(oracle, at_entry, None, 1))
}

/// Query-optimal search: the self-loop two-coin walk with one oracle query
/// per alternating pair, one measurement, one verification.
pub fn protocol_optimal(oracle: &mut Oracle, rng: &mut SeededRng) -> Result<ProtocolOutcome> {
    let n = oracle.dimension();
    let pairs = optimal_query_count(n)?;
    let at_entry = oracle.ledger();
    let mut s = WalkState::uniform(n as usize + 1, n)?;
    for _ in 0..pairs {
        oracle.apply_selfloop_pair(&mut s)?;
    }
    let x = s.vertex_distribution()?.sample(rng).vertex;
    let found = oracle.verify(x).then_some(x);
    Ok(outcome(oracle, at_entry, found, 1))
}

/// Multi-target form of [`protocol_optimal`]; identical evolution with the
/// oracle marking every hidden target.
pub fn protocol_multi(oracle: &mut Oracle, rng: &mut SeededRng) -> Result<ProtocolOutcome> {
    protocol_optimal(oracle, rng)
}

/// Two-run parity variant: run the walk from both absolute-parity starts to
/// the even stopping time and verify both measurements. One of the starts is
/// the even-parity state relative to the target, which doubles its hit rate.
pub fn protocol_even_odd(oracle: &mut Oracle, rng: &mut SeededRng) -> Result<ProtocolOutcome> {
    let n = oracle.dimension();
    let steps = even_stopping_time(n)?;
    let at_entry = oracle.ledger();
    let mut candidates = [0u64; 2];
    for (slot, parity) in [Parity::Even, Parity::Odd].into_iter().enumerate() {
        let start = uniform_parity_state(n as usize, n, parity, 0)?;
        let s = searched_walk(oracle, steps, start)?;
        candidates[slot] = s.vertex_distribution()?.sample(rng).vertex;
    }
    for x in candidates {
        if oracle.verify(x) {
            return Ok(outcome(oracle, at_entry, Some(x), 2));
        }
    }
    Ok(outcome(oracle, at_entry, None, 2))
}

/// Even stopping time `2·⌊t_f/2⌋`.
pub fn even_stopping_time(n: u32) -> Result<u64> {
    Ok(2 * (optimal_steps(n)? / 2))
}

/// Odd stopping time `2·⌊t_f/2⌋ + 1`.
pub fn odd_stopping_time(n: u32) -> Result<u64> {
    Ok(2 * (optimal_steps(n)? / 2) + 1)
}

/// Protocol selector for exact evaluation and batch sampling.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    Skw,
    Neighbour,
    CoinMeasure,
    Optimal,
    Multi,
    EvenOdd,
}

/// A fully specified protocol experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    pub n: u32,
    pub marked: Vec<u64>,
    /// Restart cap; only the repeat-until-success protocol uses it.
    pub max_runs: u64,
}

impl ProtocolSpec {
    pub fn new(kind: ProtocolKind, n: u32, marked: impl Into<Vec<u64>>) -> Result<Self> {
        let mut marked = marked.into();
        validate_marked(n, &mut marked)?;
        if matches!(kind, ProtocolKind::Optimal | ProtocolKind::Multi) && n + 1 > crate::walk::MAX_DIMENSION {
            return Err(Error::DimensionTooLarge(n + 1, crate::walk::MAX_DIMENSION));
        }
        Ok(Self {
            kind,
            n,
            marked,
            max_runs: DEFAULT_MAX_RUNS,
        })
    }

    pub fn with_max_runs(mut self, max_runs: u64) -> Self {
        self.max_runs = max_runs;
        self
    }

    fn is_hit(&self, x: u64) -> bool {
        self.marked.binary_search(&x).is_ok()
    }

    /// Walk queries booked by a single run.
    pub fn walk_queries_per_run(&self) -> Result<u64> {
        Ok(match self.kind {
            ProtocolKind::Skw | ProtocolKind::Neighbour => optimal_steps(self.n)?,
            ProtocolKind::CoinMeasure => odd_stopping_time(self.n)?,
            ProtocolKind::Optimal | ProtocolKind::Multi => optimal_query_count(self.n)?,
            ProtocolKind::EvenOdd => even_stopping_time(self.n)?,
        })
    }

    /// Final measurement distribution(s) of one run, in sampling order.
    fn run_distributions(&self) -> Result<Vec<Distribution>> {
        match self.kind {
            ProtocolKind::Skw | ProtocolKind::Neighbour => {
                let cfg = WalkConfig::new(self.n, self.marked.clone())?;
                let mut ledger = QueryLedger::new();
                let s = crate::walk::run(&cfg, optimal_steps(self.n)?, &mut ledger)?;
                Ok(vec![s.vertex_distribution()?])
            }
            ProtocolKind::CoinMeasure => {
                let cfg = WalkConfig::new(self.n, self.marked.clone())?;
                let mut ledger = QueryLedger::new();
                let s = crate::walk::run(&cfg, odd_stopping_time(self.n)?, &mut ledger)?;
                Ok(vec![s.joint_distribution()?])
            }
            ProtocolKind::Optimal | ProtocolKind::Multi => {
                let cfg = SelfLoopConfig::new(self.n, self.marked.clone())?;
                let mut ledger = QueryLedger::new();
                let s = crate::optimal::selfloop_run(&cfg, optimal_query_count(self.n)?, &mut ledger)?;
                Ok(vec![s.vertex_distribution()?])
            }
            ProtocolKind::EvenOdd => {
                let cfg = WalkConfig::new(self.n, self.marked.clone())?;
                let steps = even_stopping_time(self.n)?;
                let mut ledger = QueryLedger::new();
                let mut dists = Vec::with_capacity(2);
                for parity in [Parity::Even, Parity::Odd] {
                    let mut s = uniform_parity_state(self.n as usize, self.n, parity, 0)?;
                    for _ in 0..steps {
                        crate::walk::step(&mut s, &cfg, &mut ledger)?;
                    }
                    dists.push(s.vertex_distribution()?);
                }
                Ok(dists)
            }
        }
    }
}

/// Exact (sampling-free) evaluation of a protocol.
#[derive(Clone, Debug, Serialize)]
pub struct ExactReport {
    pub spec: ProtocolSpec,
    pub walk_queries_per_run: u64,
    pub success_probability: f64,
    /// Probability that a single run's measurement lands in the acceptance set.
    pub single_run_success: f64,
    pub expected_runs: f64,
    pub expected_walk_queries: f64,
    pub expected_verify_queries: f64,
}

/// Computes the exact success probability and query expectations from the
/// final distributions, without sampling.
pub fn exact_report(spec: &ProtocolSpec) -> Result<ExactReport> {
    let dists = spec.run_distributions()?;
    let per_run = spec.walk_queries_per_run()?;

    let (single, success, runs, verifies) = match spec.kind {
        ProtocolKind::Skw => {
            let p: f64 = spec.marked.iter().map(|&x| dists[0].probability(x)).sum();
            let miss = 1.0 - p;
            let miss_all = miss.powf(spec.max_runs as f64);
            // E[runs] with a cap: sum over k of P(still running after k-1).
            let expected_runs = if p > 0.0 {
                (1.0 - miss_all) / p
            } else {
                spec.max_runs as f64
            };
            let success = 1.0 - miss_all;
            (p, success, expected_runs, expected_runs)
        }
        ProtocolKind::Neighbour => {
            let dist = &dists[0];
            let mut success = 0.0;
            let mut verifies = 0.0;
            for x in 0..(1u64 << spec.n) {
                let p = dist.probability(x);
                if spec.is_hit(x) {
                    success += p;
                    verifies += p * 1.0;
                    continue;
                }
                let scan = (0..spec.n).find(|&d| spec.is_hit(x ^ (1 << d)));
                match scan {
                    Some(d) => {
                        success += p;
                        verifies += p * (2.0 + d as f64);
                    }
                    None => verifies += p * (1.0 + spec.n as f64),
                }
            }
            (success, success, 1.0, verifies)
        }
        ProtocolKind::CoinMeasure => {
            let dist = &dists[0];
            let joint = dist.per_coin_vertex().expect("joint distribution");
            let v = 1usize << spec.n;
            let mut success = 0.0;
            let mut verifies = 0.0;
            for (i, &p) in joint.iter().enumerate() {
                let (d, x) = (i / v, (i % v) as u64);
                if spec.is_hit(x) {
                    success += p;
                    verifies += p * 1.0;
                } else {
                    verifies += p * 2.0;
                    if spec.is_hit(x ^ (1 << d)) {
                        success += p;
                    }
                }
            }
            (success, success, 1.0, verifies)
        }
        ProtocolKind::Optimal | ProtocolKind::Multi => {
            let p: f64 = spec.marked.iter().map(|&x| dists[0].probability(x)).sum();
            (p, p, 1.0, 1.0)
        }
        ProtocolKind::EvenOdd => {
            let p_first: f64 = spec.marked.iter().map(|&x| dists[0].probability(x)).sum();
            let p_second: f64 = spec.marked.iter().map(|&x| dists[1].probability(x)).sum();
            let success = 1.0 - (1.0 - p_first) * (1.0 - p_second);
            let verifies = p_first + 2.0 * (1.0 - p_first);
            (p_first, success, 2.0, verifies)
        }
    };

    Ok(ExactReport {
        spec: spec.clone(),
        walk_queries_per_run: per_run,
        success_probability: success,
        single_run_success: single,
        expected_runs: runs,
        expected_walk_queries: per_run as f64 * runs,
        expected_verify_queries: verifies,
    })
}

/// Extra statistics collected for the neighbour protocol.
#[derive(Clone, Debug, Serialize)]
pub struct NeighbourStats {
    /// Trials whose measurement missed every target but landed adjacent to one.
    pub adjacent_misses: u64,
    /// Mean neighbour-scan verifications over those trials.
    pub mean_scan_queries_adjacent_miss: f64,
    /// Mean neighbour-scan verifications over all trials.
    pub mean_scan_queries: f64,
}

/// Monte-Carlo aggregate over independently seeded trials.
#[derive(Clone, Debug, Serialize)]
pub struct BatchReport {
    pub spec: ProtocolSpec,
    pub trials: u64,
    pub seed: u64,
    pub successes: u64,
    pub success_rate: f64,
    /// Half-width of the 95% normal-approximation binomial interval.
    pub success_ci95: f64,
    pub mean_runs: f64,
    pub mean_walk_queries: f64,
    pub mean_verify_queries: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neighbour_stats: Option<NeighbourStats>,
}

/// Runs `trials` protocol executions, trial `i` drawing from substream `i`
/// of `seed`.
///
/// The quantum evolution of every run is identical, so the final
/// distributions are computed once and each trial only samples and verifies;
/// query counts follow the oracle-driven protocol functions exactly.
pub fn run_trials(spec: &ProtocolSpec, trials: u64, seed: u64) -> Result<BatchReport> {
    let dists = spec.run_distributions()?;
    let per_run = spec.walk_queries_per_run()?;

    let mut successes = 0u64;
    let mut total_runs = 0u64;
    let mut total_walk = 0u64;
    let mut total_verify = 0u64;
    let mut adjacent_misses = 0u64;
    let mut scan_adjacent = 0u64;
    let mut scan_total = 0u64;

    for trial in 0..trials {
        let mut rng = SeededRng::substream(seed, trial);
        match spec.kind {
            ProtocolKind::Skw => {
                for run in 1..=spec.max_runs {
                    let x = dists[0].sample(&mut rng).vertex;
                    total_walk += per_run;
                    total_verify += 1;
                    if spec.is_hit(x) {
                        successes += 1;
                        total_runs += run;
                        break;
                    }
                    if run == spec.max_runs {
                        total_runs += run;
                    }
                }
            }
            ProtocolKind::Neighbour => {
                let x = dists[0].sample(&mut rng).vertex;
                total_walk += per_run;
                total_verify += 1;
                total_runs += 1;
                if spec.is_hit(x) {
                    successes += 1;
                } else {
                    let mut scans = 0u64;
                    let mut hit = false;
                    for d in 0..spec.n {
                        scans += 1;
                        if spec.is_hit(x ^ (1 << d)) {
                            hit = true;
                            break;
                        }
                    }
                    total_verify += scans;
                    scan_total += scans;
                    if hit {
                        successes += 1;
                        adjacent_misses += 1;
                        scan_adjacent += scans;
                    }
                }
            }
            ProtocolKind::CoinMeasure => {
                let sample = dists[0].sample(&mut rng);
                total_walk += per_run;
                total_runs += 1;
                if spec.is_hit(sample.vertex) {
                    total_verify += 1;
                    successes += 1;
                } else {
                    total_verify += 2;
                    let d = sample.coin.expect("joint distribution sample");
                    if spec.is_hit(sample.vertex ^ (1 << d)) {
                        successes += 1;
                    }
                }
            }
            ProtocolKind::Optimal | ProtocolKind::Multi => {
                let x = dists[0].sample(&mut rng).vertex;
                total_walk += per_run;
                total_verify += 1;
                total_runs += 1;
                if spec.is_hit(x) {
                    successes += 1;
                }
            }
            ProtocolKind::EvenOdd => {
                let first = dists[0].sample(&mut rng).vertex;
                let second = dists[1].sample(&mut rng).vertex;
                total_walk += 2 * per_run;
                total_runs += 2;
                if spec.is_hit(first) {
                    total_verify += 1;
                    successes += 1;
                } else {
                    total_verify += 2;
                    if spec.is_hit(second) {
                        successes += 1;
                    }
                }
            }
        }
    }

    let mean = |total: u64| {
        if trials == 0 {
            0.0
        } else {
            total as f64 / trials as f64
        }
    };
    let neighbour_stats = (spec.kind == ProtocolKind::Neighbour).then(|| NeighbourStats {
        adjacent_misses,
        mean_scan_queries_adjacent_miss: if adjacent_misses == 0 {
            0.0
        } else {
            scan_adjacent as f64 / adjacent_misses as f64
        },
        mean_scan_queries: mean(scan_total),
    });

    let success_rate = mean(successes);
    let success_ci95 = if trials == 0 {
        0.0
    } else {
        1.96 * (success_rate * (1.0 - success_rate) / trials as f64).sqrt()
    };
    Ok(BatchReport {
        spec: spec.clone(),
        trials,
        seed,
        successes,
        success_rate,
        success_ci95,
        mean_runs: mean(total_runs),
        mean_walk_queries: mean(total_walk),
        mean_verify_queries: mean(total_verify),
        neighbour_stats,
    })
}
