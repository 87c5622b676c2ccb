//! The coined search walk on the n-dimensional hypercube.
//!
//! One step is a coin operation followed by the XOR shift. The unperturbed
//! coin is the Grover diffusion on the coin register; the perturbed coin
//! additionally negates the coin block of every marked vertex, which is the
//! only place the oracle enters the walk. Each perturbed-coin application
//! therefore books exactly one oracle query.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::WalkState;

/// Walks need at least two directions per vertex.
pub const MIN_DIMENSION: u32 = 2;

/// Largest hypercube dimension the simulator accepts (memory-bound).
pub const MAX_DIMENSION: u32 = 24;

/// Coin operator applied to the coin block of a vertex class.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CoinKind {
    /// Grover diffusion `2|s⟩⟨s| − 1` on the coin register.
    Grover,
    /// Negation of the whole block (`−1`).
    Negate,
}

/// Dimension, marked set and coin choice for a search walk.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkConfig {
    n: u32,
    marked: Vec<u64>,
    unmarked_coin: CoinKind,
    marked_coin: CoinKind,
}

/// Validates a marked set against dimension `n`: non-empty, in range, distinct.
pub(crate) fn validate_marked(n: u32, marked: &mut [u64]) -> Result<()> {
    if n < MIN_DIMENSION {
        return Err(Error::DimensionTooSmall(n));
    }
    if n > MAX_DIMENSION {
        return Err(Error::DimensionTooLarge(n, MAX_DIMENSION));
    }
    if marked.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    let limit = 1u64 << n;
    for &x in marked.iter() {
        if x >= limit {
            return Err(Error::MarkedOutOfRange { vertex: x, n });
        }
    }
    marked.sort_unstable();
    for pair in marked.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::DuplicateMarked(pair[0]));
        }
    }
    Ok(())
}

impl WalkConfig {
    /// Grover coin on unmarked vertices, negation on marked ones.
    pub fn new(n: u32, marked: impl Into<Vec<u64>>) -> Result<Self> {
        let mut marked = marked.into();
        validate_marked(n, &mut marked)?;
        Ok(Self {
            n,
            marked,
            unmarked_coin: CoinKind::Grover,
            marked_coin: CoinKind::Negate,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertex_count(&self) -> u64 {
        1 << self.n
    }

    /// Marked vertices in ascending order.
    pub fn marked(&self) -> &[u64] {
        &self.marked
    }

    pub fn is_marked(&self, x: u64) -> bool {
        self.marked.binary_search(&x).is_ok()
    }

    pub fn unmarked_coin(&self) -> CoinKind {
        self.unmarked_coin
    }

    pub fn marked_coin(&self) -> CoinKind {
        self.marked_coin
    }

    /// The one marked vertex, or an error when several are marked.
    pub fn single_target(&self) -> Result<u64> {
        match self.marked.as_slice() {
            [x] => Ok(*x),
            m => Err(Error::SingleTargetRequired(m.len())),
        }
    }
}

/// Running count of oracle uses, split by access mode.
///
/// Counters only ever increase; one perturbed-coin application is one walk
/// query, one classical membership test is one verification query.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QueryLedger {
    walk_queries: u64,
    verify_queries: u64,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn walk_queries(&self) -> u64 {
        self.walk_queries
    }

    pub fn verify_queries(&self) -> u64 {
        self.verify_queries
    }

    pub fn total(&self) -> u64 {
        self.walk_queries + self.verify_queries
    }

    pub fn record_walk_query(&mut self) {
        self.walk_queries += 1;
    }

    pub fn record_verify_query(&mut self) {
        self.verify_queries += 1;
    }

    /// Queries booked since `earlier` was captured.
    pub fn since(&self, earlier: QueryLedger) -> QueryLedger {
        QueryLedger {
            walk_queries: self.walk_queries - earlier.walk_queries,
            verify_queries: self.verify_queries - earlier.verify_queries,
        }
    }
}

/// Number of steps that maximizes the target probability:
/// `(π/2)·√(2^(n−1))` rounded half-up.
pub fn optimal_steps(n: u32) -> Result<u64> {
    if n < MIN_DIMENSION {
        return Err(Error::DimensionTooSmall(n));
    }
    let half_period = std::f64::consts::FRAC_PI_2 * ((1u128 << (n - 1)) as f64).sqrt();
    Ok((half_period + 0.5).floor() as u64)
}

/// Uniform superposition over all coin directions and vertices.
pub fn initial_state(cfg: &WalkConfig) -> WalkState {
    WalkState::uniform(cfg.n as usize, cfg.n).expect("validated dimension fits")
}

/// Flip-shift: moves direction-`d` amplitude from `x` to `x ⊕ 2^d`.
///
/// Requires as many coin directions as vertex bits. Involution.
pub fn apply_shift(s: &mut WalkState) -> Result<()> {
    let (coins, bits) = (s.coins(), s.vertex_bits());
    if coins != bits as usize {
        return Err(Error::ShiftShape { coins, bits });
    }
    shift_rows(s, coins);
    Ok(())
}

/// Self-loop shift: directions below `bits` flip their bit, the extra final
/// direction stays in place. Requires `coins == bits + 1`. Involution.
pub fn apply_selfloop_shift(s: &mut WalkState) -> Result<()> {
    let (coins, bits) = (s.coins(), s.vertex_bits());
    if coins != bits as usize + 1 {
        return Err(Error::SelfLoopShiftShape { coins, bits });
    }
    shift_rows(s, coins - 1);
    Ok(())
}

fn shift_rows(s: &mut WalkState, moving: usize) {
    let v = s.vertex_count();
    let amps = s.amplitudes_mut();
    for d in 0..moving {
        let bit = 1usize << d;
        let row = &mut amps[d * v..(d + 1) * v];
        for x in 0..v {
            if x & bit == 0 {
                row.swap(x, x | bit);
            }
        }
    }
}

/// Grover diffusion on every coin block: `a ↦ (2/k)·Σa − a` per vertex,
/// where `k` is the coin dimension.
pub fn grover_coin_kernel(s: &mut WalkState) {
    let (k, v) = (s.coins(), s.vertex_count());
    let scale = 2.0 / k as f64;
    let mut sums = vec![Complex64::new(0.0, 0.0); v];
    let amps = s.amplitudes_mut();
    for d in 0..k {
        for (sum, a) in sums.iter_mut().zip(&amps[d * v..(d + 1) * v]) {
            *sum += a;
        }
    }
    for d in 0..k {
        for (a, sum) in amps[d * v..(d + 1) * v].iter_mut().zip(&sums) {
            *a = scale * sum - *a;
        }
    }
}

/// Grover diffusion on unmarked vertices, exact negation on marked ones.
///
/// Pure kernel: no query bookkeeping. Callers that model oracle access
/// must record one walk query per application.
pub fn marked_coin_kernel(s: &mut WalkState, marked: &[u64]) {
    let k = s.coins();
    let saved: Vec<Vec<Complex64>> = marked
        .iter()
        .map(|&x| (0..k).map(|d| s.amp(d, x)).collect())
        .collect();
    grover_coin_kernel(s);
    for (&x, col) in marked.iter().zip(&saved) {
        for (d, &a) in col.iter().enumerate() {
            *s.amp_mut(d, x) = -a;
        }
    }
}

fn check_walk_shape(s: &WalkState, cfg: &WalkConfig) -> Result<()> {
    if s.coins() != cfg.n as usize || s.vertex_bits() != cfg.n {
        return Err(Error::ShapeMismatch {
            left_coins: s.coins(),
            left_bits: s.vertex_bits(),
            right_coins: cfg.n as usize,
            right_bits: cfg.n,
        });
    }
    Ok(())
}

/// Coin operation of the walk. A perturbed application consults the oracle
/// once, so it books one walk query in `ledger`.
pub fn apply_coin(
    s: &mut WalkState,
    cfg: &WalkConfig,
    perturbed: bool,
    ledger: &mut QueryLedger,
) -> Result<()> {
    check_walk_shape(s, cfg)?;
    match (perturbed, cfg.unmarked_coin, cfg.marked_coin) {
        (false, CoinKind::Grover, _) => grover_coin_kernel(s),
        (false, CoinKind::Negate, _) => negate_all(s),
        (true, CoinKind::Grover, CoinKind::Negate) => {
            marked_coin_kernel(s, cfg.marked());
            ledger.record_walk_query();
        }
        (true, unmarked, marked) => {
            per_class_coin(s, cfg, unmarked, marked);
            ledger.record_walk_query();
        }
    }
    Ok(())
}

fn negate_all(s: &mut WalkState) {
    for a in s.amplitudes_mut() {
        *a = -*a;
    }
}

fn per_class_coin(s: &mut WalkState, cfg: &WalkConfig, unmarked: CoinKind, marked: CoinKind) {
    let k = s.coins();
    let v = s.vertex_count() as u64;
    let mut block = vec![Complex64::new(0.0, 0.0); k];
    for x in 0..v {
        for (d, b) in block.iter_mut().enumerate() {
            *b = s.amp(d, x);
        }
        let kind = if cfg.is_marked(x) { marked } else { unmarked };
        match kind {
            CoinKind::Grover => {
                let sum: Complex64 = block.iter().sum();
                let scale = 2.0 / k as f64;
                for (d, &b) in block.iter().enumerate() {
                    *s.amp_mut(d, x) = scale * sum - b;
                }
            }
            CoinKind::Negate => {
                for (d, &b) in block.iter().enumerate() {
                    *s.amp_mut(d, x) = -b;
                }
            }
        }
    }
}

/// One perturbed walk step: oracle coin, then shift.
pub fn step(s: &mut WalkState, cfg: &WalkConfig, ledger: &mut QueryLedger) -> Result<()> {
    apply_coin(s, cfg, true, ledger)?;
    apply_shift(s)
}

/// Runs `steps` perturbed steps from the uniform initial state.
pub fn run(cfg: &WalkConfig, steps: u64, ledger: &mut QueryLedger) -> Result<WalkState> {
    let mut s = initial_state(cfg);
    for _ in 0..steps {
        step(&mut s, cfg, ledger)?;
    }
    Ok(s)
}
