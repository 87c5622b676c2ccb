//! Vertex-parity machinery for the search walk.
//!
//! Parity is the Hamming weight of `x ⊕ reference` mod 2. Because every
//! shift moves amplitude across exactly one edge, a walk step swaps the even
//! and odd vertex subspaces, and the coin never mixes them. Everything here
//! builds on that: parity projectors, parity-restricted initial states,
//! the subspace-swap identities, the per-shell probability inequalities of
//! the collapsed walk, and the exact factor-two gain of even-parity starts.

use serde::Serialize;

use crate::collapsed::{collapsed_coin, collapsed_initial, collapsed_step, CollapsedState};
use crate::error::Result;
use crate::report::{Check, CheckReport};
use crate::state::{SeededRng, WalkState};
use crate::walk::{apply_coin, apply_shift, initial_state, optimal_steps, QueryLedger, WalkConfig};

/// Vertex parity relative to a reference label.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(x: u64) -> Parity {
        if x.count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flipped(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Projector onto vertices of fixed parity relative to `reference`.
#[derive(Copy, Clone, Debug)]
pub struct ParityProjector {
    parity: Parity,
    reference: u64,
}

impl ParityProjector {
    pub fn new(parity: Parity, reference: u64) -> Self {
        Self { parity, reference }
    }

    pub fn keeps(&self, x: u64) -> bool {
        Parity::of(x ^ self.reference) == self.parity
    }

    /// Zeroes amplitudes on wrong-parity vertices. Not renormalized.
    pub fn project(&self, s: &WalkState) -> WalkState {
        let mut out = s.clone();
        for x in 0..s.vertex_count() as u64 {
            if !self.keeps(x) {
                for d in 0..s.coins() {
                    *out.amp_mut(d, x) = num_complex::Complex64::new(0.0, 0.0);
                }
            }
        }
        out
    }
}

/// Normalized uniform state restricted to one parity class:
/// `√2 · P · ψ0`, built directly so kept amplitudes are exactly uniform.
pub fn uniform_parity_state(
    coins: usize,
    bits: u32,
    parity: Parity,
    reference: u64,
) -> Result<WalkState> {
    let projector = ParityProjector::new(parity, reference);
    WalkState::uniform_where(coins, bits, |x| projector.keeps(x))
}

/// Parity-restricted initial state of a single-target walk, parity measured
/// relative to the target.
pub fn parity_initial(cfg: &WalkConfig, parity: Parity) -> Result<WalkState> {
    let target = cfg.single_target()?;
    uniform_parity_state(cfg.n() as usize, cfg.n(), parity, target)
}

/// Residuals of the subspace-swap identities on random states:
/// a walk step maps even onto odd and vice versa, perturbed or not.
pub fn check_subspace_swap(
    cfg: &WalkConfig,
    trials: u32,
    rng: &mut SeededRng,
) -> Result<CheckReport> {
    const TOLERANCE: f64 = 1e-10;
    let target = cfg.single_target()?;
    let even = ParityProjector::new(Parity::Even, target);
    let odd = ParityProjector::new(Parity::Odd, target);

    let mut report = CheckReport::new(format!("subspace swap, n = {}, target {target}", cfg.n()));
    let mut scratch = QueryLedger::new();
    let mut worst = [0.0f64; 4];
    for _ in 0..trials {
        let r = WalkState::random_normalized(cfg.n() as usize, cfg.n(), rng)?;
        for (i, &perturbed) in [true, false].iter().enumerate() {
            let mut stepped = r.clone();
            apply_coin(&mut stepped, cfg, perturbed, &mut scratch)?;
            apply_shift(&mut stepped)?;

            let mut from_even = even.project(&r);
            apply_coin(&mut from_even, cfg, perturbed, &mut scratch)?;
            apply_shift(&mut from_even)?;
            let res = odd.project(&stepped).max_abs_diff(&from_even)?;
            worst[2 * i] = worst[2 * i].max(res);

            let mut from_odd = odd.project(&r);
            apply_coin(&mut from_odd, cfg, perturbed, &mut scratch)?;
            apply_shift(&mut from_odd)?;
            let res = even.project(&stepped).max_abs_diff(&from_odd)?;
            worst[2 * i + 1] = worst[2 * i + 1].max(res);
        }
    }
    for (i, label) in [
        "perturbed step maps even part onto odd part",
        "perturbed step maps odd part onto even part",
        "unperturbed step maps even part onto odd part",
        "unperturbed step maps odd part onto even part",
    ]
    .iter()
    .enumerate()
    {
        report.push(Check::residual(*label, worst[i], TOLERANCE));
    }
    Ok(report)
}

/// Shell-probability table of the collapsed walk plus the invariants it
/// must satisfy.
#[derive(Clone, Debug, Serialize)]
pub struct ShellReport {
    pub n: u32,
    /// `probabilities[t][x]` is the shell-`x` probability after `t` steps.
    pub probabilities: Vec<Vec<f64>>,
    pub checks: CheckReport,
}

/// Runs the collapsed walk for `t_max` steps and checks the per-shell
/// probability inequalities, the even/odd step equalities, and the
/// post-coin bookkeeping at the target shell.
pub fn shell_inequalities(n: u32, t_max: u64) -> Result<ShellReport> {
    const TOLERANCE: f64 = 1e-12;
    let mut s = collapsed_initial(n)?;
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(t_max as usize + 1);
    let mut checks = CheckReport::new(format!("shell inequalities, n = {n}"));

    // Worst residual and where it occurred, per check family.
    let mut families: Vec<(&str, f64, i64)> = vec![
        ("first shell dominates target shell: P1(t) >= P0(t)", 0.0, -1),
        ("next-step target bound: P0(t+1) <= P1(t)", 0.0, -1),
        ("previous-step target bound: P0(t-1) <= P1(t)", 0.0, -1),
        ("even shells frozen across the odd step", 0.0, -1),
        ("odd shells frozen across the even step", 0.0, -1),
        ("coin preserves target magnitude: |beta_R0| = |alpha_R0|", 0.0, -1),
        ("coin leaves no back-mover on the target shell (exact)", 0.0, -1),
        ("shift moves beta_R0 into alpha_L1", 0.0, -1),
        ("shift moves beta_L1 into alpha_R0", 0.0, -1),
    ];
    let bump = |family: usize, residual: f64, t: u64, families: &mut Vec<(&str, f64, i64)>| {
        if residual > families[family].1 {
            families[family].1 = residual;
            families[family].2 = t as i64;
        }
    };

    table.push((0..=n).map(|x| s.shell_probability(x)).collect());
    for t in 0..t_max {
        // Post-coin snapshot feeds the target-shell bookkeeping checks.
        let mut post_coin = s.clone();
        collapsed_coin(&mut post_coin, true);
        let alpha_r0 = s.right(0);
        collapsed_step(&mut s, true);

        bump(
            5,
            (post_coin.right(0).norm_sqr() - alpha_r0.norm_sqr()).abs(),
            t,
            &mut families,
        );
        bump(6, post_coin.left(0).norm(), t, &mut families);
        bump(7, (s.left(1) - post_coin.right(0)).norm(), t, &mut families);
        bump(8, (s.right(0) - post_coin.left(1)).norm(), t, &mut families);

        table.push((0..=n).map(|x| s.shell_probability(x)).collect());
    }

    for t in 1..=t_max as usize {
        let p0 = table[t][0];
        let p1 = table[t][1];
        bump(0, (p0 - p1).max(0.0), t as u64, &mut families);
        if t + 1 < table.len() {
            bump(1, (table[t + 1][0] - p1).max(0.0), t as u64, &mut families);
        }
        bump(2, (table[t - 1][0] - p1).max(0.0), t as u64, &mut families);
    }
    for t in (0..table.len()).step_by(2) {
        for x in (0..=n as usize).step_by(2) {
            if t + 1 < table.len() {
                bump(3, (table[t][x] - table[t + 1][x]).abs(), t as u64, &mut families);
            }
        }
        for x in (1..=n as usize).step_by(2) {
            if t > 0 {
                bump(4, (table[t][x] - table[t - 1][x]).abs(), t as u64, &mut families);
            }
        }
    }

    for (name, residual, at) in families {
        let tolerance = if name.ends_with("(exact)") { 0.0 } else { TOLERANCE };
        let label = if at >= 0 {
            format!("{name} [worst at t = {at}]")
        } else {
            name.to_string()
        };
        checks.push(Check::residual(label, residual, tolerance));
    }

    Ok(ShellReport {
        n,
        probabilities: table,
        checks,
    })
}

/// Exact factor-two gain of the even-parity start at the even stopping time.
#[derive(Clone, Debug, Serialize)]
pub struct FactorTwoReport {
    pub n: u32,
    pub even_stopping_time: u64,
    pub uniform_target_probability: f64,
    pub even_start_target_probability: f64,
    pub checks: CheckReport,
}

/// Compares the target probability of the walk started from the even-parity
/// state against twice the uniform-start value at `t_fe = 2·⌊t_f/2⌋`, and
/// confirms the odd start leaves the target empty at every even time.
pub fn factor_two_even_start(n: u32) -> Result<FactorTwoReport> {
    const TOLERANCE: f64 = 1e-12;
    let cfg = WalkConfig::new(n, vec![0])?;
    let t_fe = 2 * (optimal_steps(n)? / 2);
    let mut ledger = QueryLedger::new();

    let mut uniform = initial_state(&cfg);
    let mut even = parity_initial(&cfg, Parity::Even)?;
    let mut odd = parity_initial(&cfg, Parity::Odd)?;
    let mut odd_start_worst = 0.0f64;
    for t in 0..t_fe {
        if t % 2 == 0 {
            let p = odd.vertex_distribution()?.probability(0);
            odd_start_worst = odd_start_worst.max(p);
        }
        crate::walk::step(&mut uniform, &cfg, &mut ledger)?;
        crate::walk::step(&mut even, &cfg, &mut ledger)?;
        crate::walk::step(&mut odd, &cfg, &mut ledger)?;
    }
    let p_uniform = uniform.vertex_distribution()?.probability(0);
    let p_even = even.vertex_distribution()?.probability(0);
    if t_fe % 2 == 0 {
        odd_start_worst = odd_start_worst.max(odd.vertex_distribution()?.probability(0));
    }

    let mut checks = CheckReport::new(format!("even-parity start, n = {n}"));
    checks.push(Check::residual(
        "even start doubles the target probability",
        (p_even - 2.0 * p_uniform).abs(),
        TOLERANCE,
    ));
    checks.push(Check::residual(
        "odd start leaves the target empty at even times (exact)",
        odd_start_worst,
        0.0,
    ));

    Ok(FactorTwoReport {
        n,
        even_stopping_time: t_fe,
        uniform_target_probability: p_uniform,
        even_start_target_probability: p_even,
        checks,
    })
}

/// Collapsed-walk state after the coin of step `t+1`, exposed for tests that
/// follow the post-coin amplitudes directly.
pub fn collapsed_post_coin(s: &CollapsedState) -> CollapsedState {
    let mut post = s.clone();
    collapsed_coin(&mut post, true);
    post
}
