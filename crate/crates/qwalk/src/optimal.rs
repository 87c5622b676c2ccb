//! The query-optimal two-coin construction.
//!
//! Labels of the n-dimensional hypercube are embedded into the even-parity
//! vertices of an (n+1)-dimensional one by appending a parity bit in bit 0.
//! There the search walk only needs a perturbed coin on every second step:
//! alternating one oracle step with one free step costs half the queries of
//! the plain walk at the same stopping time. Marking both the image and its
//! odd partner makes the whole walk commute with the last-bit flip `X`, and
//! folding that symmetry away yields an equivalent walk on the original
//! vertex set with one extra self-loop coin direction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::parity::{uniform_parity_state, Parity};
use crate::report::{Check, CheckReport};
use crate::state::{apply_vertex_xor, SeededRng, WalkState};
use crate::walk::{
    apply_selfloop_shift, apply_shift, grover_coin_kernel, marked_coin_kernel, optimal_steps,
    validate_marked, QueryLedger, MAX_DIMENSION,
};

/// Image of label `x` in the extended hypercube: `2x` plus a parity bit in
/// bit 0, so every image has even Hamming weight.
pub fn embed(x: u64, n: u32) -> Result<u64> {
    if n + 1 > MAX_DIMENSION {
        return Err(Error::DimensionTooLarge(n + 1, MAX_DIMENSION));
    }
    if x >= 1 << n {
        return Err(Error::MarkedOutOfRange { vertex: x, n });
    }
    Ok(2 * x + (x.count_ones() as u64 & 1))
}

/// Inverse of [`embed`] on even-parity labels; odd-parity labels are not
/// images and yield `None`.
pub fn unembed(extended: u64, n: u32) -> Option<u64> {
    debug_assert!(extended < 1 << (n + 1));
    if extended.count_ones().is_multiple_of(2) {
        Some(extended >> 1)
    } else {
        None
    }
}

/// Search walk on the extended hypercube; marked labels live in the
/// original vertex set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtendedConfig {
    n: u32,
    marked: Vec<u64>,
}

impl ExtendedConfig {
    pub fn new(n: u32, marked: impl Into<Vec<u64>>) -> Result<Self> {
        if n + 1 > MAX_DIMENSION {
            return Err(Error::DimensionTooLarge(n + 1, MAX_DIMENSION));
        }
        let mut marked = marked.into();
        validate_marked(n, &mut marked)?;
        Ok(Self { n, marked })
    }

    /// Dimension of the original hypercube.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Dimension of the extended hypercube.
    pub fn extended_dimension(&self) -> u32 {
        self.n + 1
    }

    pub fn marked_original(&self) -> &[u64] {
        &self.marked
    }

    /// Even-parity images of the marked labels.
    pub fn marked_images(&self) -> Vec<u64> {
        self.marked
            .iter()
            .map(|&x| embed(x, self.n).expect("validated label embeds"))
            .collect()
    }

    /// Images together with their odd partners: `{2x, 2x+1}` per label.
    /// This is the marking of the relaxed coin, invariant under `X`.
    pub fn marked_image_pairs(&self) -> Vec<u64> {
        let mut pairs: Vec<u64> = self
            .marked
            .iter()
            .flat_map(|&x| [2 * x, 2 * x + 1])
            .collect();
        pairs.sort_unstable();
        pairs
    }
}

/// Initial state selection for extended-walk runs.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StartState {
    /// Uniform over all coin directions and extended vertices.
    Uniform,
    /// Uniform over the even-parity extended vertices (`√2·P_e·ψ0`).
    EvenProjected,
}

fn extended_initial(cfg: &ExtendedConfig, start: StartState) -> Result<WalkState> {
    let dim = cfg.extended_dimension();
    match start {
        StartState::Uniform => WalkState::uniform(dim as usize, dim),
        StartState::EvenProjected => {
            uniform_parity_state(dim as usize, dim, Parity::Even, 0)
        }
    }
}

/// Plain perturbed walk on the extended hypercube, marking the images only.
/// Each step consults the oracle, so `steps` walk queries are booked.
pub fn extended_perturbed_run(
    cfg: &ExtendedConfig,
    steps: u64,
    start: StartState,
    ledger: &mut QueryLedger,
) -> Result<WalkState> {
    let images = cfg.marked_images();
    let mut s = extended_initial(cfg, start)?;
    for _ in 0..steps {
        marked_coin_kernel(&mut s, &images);
        ledger.record_walk_query();
        apply_shift(&mut s)?;
    }
    Ok(s)
}

/// Alternating walk on the extended hypercube: each pair is one perturbed
/// step with the pair-marked coin followed by one unperturbed step, so one
/// oracle query buys two propagation steps.
pub fn alternating_run(
    cfg: &ExtendedConfig,
    pairs: u64,
    start: StartState,
    ledger: &mut QueryLedger,
) -> Result<WalkState> {
    let marked_pairs = cfg.marked_image_pairs();
    let mut s = extended_initial(cfg, start)?;
    for _ in 0..pairs {
        marked_coin_kernel(&mut s, &marked_pairs);
        ledger.record_walk_query();
        apply_shift(&mut s)?;
        grover_coin_kernel(&mut s);
        apply_shift(&mut s)?;
    }
    Ok(s)
}

/// Residuals of the last-bit-flip symmetry: `X` commutes with both steps of
/// the alternating walk, fixes the uniform state, and swaps the parity
/// projections of the uniform state.
pub fn check_x_symmetry(
    cfg: &ExtendedConfig,
    trials: u32,
    rng: &mut SeededRng,
) -> Result<CheckReport> {
    const TOLERANCE: f64 = 1e-10;
    let dim = cfg.extended_dimension();
    let marked_pairs = cfg.marked_image_pairs();
    let mut report = CheckReport::new(format!(
        "last-bit-flip symmetry, n = {}, targets {:?}",
        cfg.n, cfg.marked
    ));

    let mut worst_free = 0.0f64;
    let mut worst_marked = 0.0f64;
    for _ in 0..trials {
        let r = WalkState::random_normalized(dim as usize, dim, rng)?;

        let mut step_then_flip = r.clone();
        grover_coin_kernel(&mut step_then_flip);
        apply_shift(&mut step_then_flip)?;
        apply_vertex_xor(&mut step_then_flip, 1);
        let mut flip_then_step = r.clone();
        apply_vertex_xor(&mut flip_then_step, 1);
        grover_coin_kernel(&mut flip_then_step);
        apply_shift(&mut flip_then_step)?;
        worst_free = worst_free.max(step_then_flip.max_abs_diff(&flip_then_step)?);

        let mut step_then_flip = r.clone();
        marked_coin_kernel(&mut step_then_flip, &marked_pairs);
        apply_shift(&mut step_then_flip)?;
        apply_vertex_xor(&mut step_then_flip, 1);
        let mut flip_then_step = r;
        apply_vertex_xor(&mut flip_then_step, 1);
        marked_coin_kernel(&mut flip_then_step, &marked_pairs);
        apply_shift(&mut flip_then_step)?;
        worst_marked = worst_marked.max(step_then_flip.max_abs_diff(&flip_then_step)?);
    }
    report.push(Check::residual(
        "flip commutes with the free step",
        worst_free,
        TOLERANCE,
    ));
    report.push(Check::residual(
        "flip commutes with the pair-marked step",
        worst_marked,
        TOLERANCE,
    ));

    let uniform = extended_initial(cfg, StartState::Uniform)?;
    let mut flipped = uniform.clone();
    apply_vertex_xor(&mut flipped, 1);
    report.push(Check::residual(
        "flip fixes the uniform state (exact)",
        if flipped == uniform { 0.0 } else { f64::INFINITY },
        0.0,
    ));

    let even = extended_initial(cfg, StartState::EvenProjected)?;
    let odd = uniform_parity_state(dim as usize, dim, Parity::Odd, 0)?;
    let mut even_flipped = even;
    apply_vertex_xor(&mut even_flipped, 1);
    report.push(Check::residual(
        "flip swaps the parity-projected starts",
        even_flipped.max_abs_diff(&odd)?,
        1e-12,
    ));

    Ok(report)
}

/// Self-loop form of the alternating walk: original vertex set, one extra
/// coin direction that stays in place.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfLoopConfig {
    n: u32,
    marked: Vec<u64>,
}

impl SelfLoopConfig {
    pub fn new(n: u32, marked: impl Into<Vec<u64>>) -> Result<Self> {
        if n + 1 > MAX_DIMENSION {
            return Err(Error::DimensionTooLarge(n + 1, MAX_DIMENSION));
        }
        let mut marked = marked.into();
        validate_marked(n, &mut marked)?;
        Ok(Self { n, marked })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Coin directions: one per hypercube edge plus the self-loop.
    pub fn coin_dimension(&self) -> usize {
        self.n as usize + 1
    }

    pub fn marked(&self) -> &[u64] {
        &self.marked
    }
}

/// Uniform initial state of the self-loop walk.
pub fn selfloop_initial(cfg: &SelfLoopConfig) -> Result<WalkState> {
    WalkState::uniform(cfg.coin_dimension(), cfg.n())
}

/// Runs `pairs` alternating self-loop steps (perturbed, then free). One
/// oracle query per pair.
pub fn selfloop_run(
    cfg: &SelfLoopConfig,
    pairs: u64,
    ledger: &mut QueryLedger,
) -> Result<WalkState> {
    let mut s = selfloop_initial(cfg)?;
    for _ in 0..pairs {
        selfloop_pair(&mut s, cfg.marked(), ledger)?;
    }
    Ok(s)
}

/// One alternating pair of the self-loop walk on an existing state.
pub fn selfloop_pair(
    s: &mut WalkState,
    marked: &[u64],
    ledger: &mut QueryLedger,
) -> Result<()> {
    marked_coin_kernel(s, marked);
    ledger.record_walk_query();
    apply_selfloop_shift(s)?;
    grover_coin_kernel(s);
    apply_selfloop_shift(s)
}

/// Oracle queries of the alternating walk run to its stopping time:
/// `⌊t_f(n+1)/2⌋`, which approaches `(π/4)·√(2^n)`.
pub fn optimal_query_count(n: u32) -> Result<u64> {
    Ok(optimal_steps(n + 1)? / 2)
}

/// Folds the appended bit out of an extended-walk vertex distribution:
/// entry `x` collects extended labels `2x` and `2x+1`.
pub fn fold_last_bit(per_vertex_extended: &[f64]) -> Vec<f64> {
    per_vertex_extended
        .chunks_exact(2)
        .map(|pair| pair[0] + pair[1])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{apply_coin, WalkConfig};

    #[test]
    fn embedding_reference_values() {
        assert_eq!(embed(0, 4).unwrap(), 0);
        assert_eq!(embed(1, 4).unwrap(), 3);
        assert_eq!(embed(6, 4).unwrap(), 12);
        assert_eq!(unembed(12, 4), Some(6));
        assert_eq!(unembed(3, 4), Some(1));
        assert_eq!(unembed(1, 4), None);
        assert!(matches!(
            embed(16, 4),
            Err(Error::MarkedOutOfRange { vertex: 16, n: 4 })
        ));
    }

    #[test]
    fn embedding_roundtrips_and_has_even_parity() {
        let n = 16;
        for x in 0..(1u64 << n) {
            let image = embed(x, n).unwrap();
            assert_eq!(image.count_ones() % 2, 0);
            assert_eq!(unembed(image, n), Some(x));
        }
    }

    #[test]
    fn query_count_reference_values() {
        assert_eq!(optimal_query_count(4).unwrap(), 3);
        assert_eq!(optimal_query_count(9).unwrap(), 18);
        for n in 2..=16u32 {
            let queries = optimal_query_count(n).unwrap();
            let asymptotic =
                (std::f64::consts::FRAC_PI_4 * ((1u64 << n) as f64).sqrt() + 0.5).floor() as i64;
            assert!(
                (queries as i64 - asymptotic).abs() <= 1,
                "n = {n}: {queries} vs {asymptotic}"
            );
        }
    }

    #[test]
    fn query_ratio_approaches_inverse_sqrt_two() {
        for n in 10..=14u32 {
            let ratio = optimal_query_count(n).unwrap() as f64 / optimal_steps(n).unwrap() as f64;
            assert!(
                (ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.1,
                "n = {n}: ratio = {ratio}"
            );
        }
    }

    #[test]
    fn alternation_matches_plain_even_step_walk_from_even_start() {
        // On even-parity starts, 2r plain perturbed steps equal r
        // perturbed/free pairs with the pair-marked coin.
        for (n, target) in [(4, 11), (5, 0), (6, 37)] {
            let cfg = ExtendedConfig::new(n, vec![target]).unwrap();
            let mut ledger = QueryLedger::new();
            for r in [1u64, 3, 7] {
                let plain = extended_perturbed_run(
                    &cfg,
                    2 * r,
                    StartState::EvenProjected,
                    &mut ledger,
                )
                .unwrap();
                let alternating =
                    alternating_run(&cfg, r, StartState::EvenProjected, &mut ledger).unwrap();
                let diff = plain.max_abs_diff(&alternating).unwrap();
                assert!(diff < 1e-12, "n = {n}, r = {r}: {diff}");
            }
        }
    }

    #[test]
    fn pair_marking_equals_image_marking_on_even_states() {
        // The odd partner only differs on odd-parity vertices, which the
        // even projection zeroes.
        let mut rng = SeededRng::new(77);
        for n in [4u32, 5, 6] {
            let cfg = ExtendedConfig::new(n, vec![3]).unwrap();
            let dim = cfg.extended_dimension();
            let image_cfg = WalkConfig::new(dim, cfg.marked_images()).unwrap();
            let pair_cfg = WalkConfig::new(dim, cfg.marked_image_pairs()).unwrap();
            let even = crate::parity::ParityProjector::new(Parity::Even, 0);
            let mut scratch = QueryLedger::new();
            for _ in 0..20 {
                let r = WalkState::random_normalized(dim as usize, dim, &mut rng).unwrap();
                let projected = even.project(&r);
                let mut with_image = projected.clone();
                apply_coin(&mut with_image, &image_cfg, true, &mut scratch).unwrap();
                let mut with_pair = projected;
                apply_coin(&mut with_pair, &pair_cfg, true, &mut scratch).unwrap();
                assert!(with_image.max_abs_diff(&with_pair).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn uniform_start_splits_evenly_between_image_and_partner() {
        let cfg = ExtendedConfig::new(5, vec![19]).unwrap();
        let r = optimal_query_count(5).unwrap();
        let mut ledger = QueryLedger::new();
        let from_uniform =
            alternating_run(&cfg, r, StartState::Uniform, &mut ledger).unwrap();
        let from_even =
            alternating_run(&cfg, r, StartState::EvenProjected, &mut ledger).unwrap();
        let image = cfg.marked_images()[0];
        let partner = image ^ 1;

        let dist_uniform = from_uniform.vertex_distribution().unwrap();
        let dist_even = from_even.vertex_distribution().unwrap();
        let (pi, pp) = (dist_uniform.probability(image), dist_uniform.probability(partner));
        assert!((pi - pp).abs() < 1e-12, "split {pi} vs {pp}");
        assert!((pi + pp - dist_even.probability(image)).abs() < 1e-12);
        // The even start keeps odd vertices empty at even times.
        assert!(dist_even.probability(partner) < 1e-20);
    }

    #[test]
    fn x_symmetry_report_passes() {
        let mut rng = SeededRng::new(13);
        let cfg = ExtendedConfig::new(4, vec![9]).unwrap();
        let report = check_x_symmetry(&cfg, 50, &mut rng).unwrap();
        assert!(
            report.passed(),
            "failures: {:?}",
            report.failures().collect::<Vec<_>>()
        );
    }

    #[test]
    fn selfloop_walk_matches_extended_walk_marginal() {
        for n in [3u32, 4, 5] {
            let extended = ExtendedConfig::new(n, vec![5]).unwrap();
            let selfloop = SelfLoopConfig::new(n, vec![5]).unwrap();
            for r in 0..=(2 * optimal_query_count(n).unwrap()) {
                let mut ledger = QueryLedger::new();
                let ext = alternating_run(&extended, r, StartState::Uniform, &mut ledger).unwrap();
                let red = selfloop_run(&selfloop, r, &mut ledger).unwrap();
                let folded = fold_last_bit(ext.vertex_distribution().unwrap().per_vertex());
                let reduced = red.vertex_distribution().unwrap();
                for (x, (&a, &b)) in folded.iter().zip(reduced.per_vertex()).enumerate() {
                    let diff = (a - b).abs();
                    assert!(diff < 1e-12, "n = {n}, r = {r}, x = {x}: {diff}");
                }
            }
        }
    }

    #[test]
    fn selfloop_walk_is_unitary_and_counts_queries() {
        let cfg = SelfLoopConfig::new(6, vec![0, 63]).unwrap();
        let mut ledger = QueryLedger::new();
        let s = selfloop_run(&cfg, 9, &mut ledger).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        assert_eq!(ledger.walk_queries(), 9);

        let s0 = selfloop_run(&cfg, 0, &mut ledger).unwrap();
        assert_eq!(s0, selfloop_initial(&cfg).unwrap());
    }
}
