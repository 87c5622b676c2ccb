//! Collapse of the single-target walk onto the Hamming-weight line.
//!
//! With one marked vertex the walk never leaves the subspace spanned by the
//! per-shell right- and left-mover states, so an n-dimensional hypercube
//! reduces to `2n` real degrees of freedom: amplitudes `right[x]` for the
//! directions pointing away from the target on shell `x` and `left[x]` for
//! those pointing back. `right[n]` and `left[0]` do not exist and are kept
//! as explicit zeros so the shift can stay a plain swap.
//!
//! Shell labels are Hamming distances from the target; the reduction itself
//! is target-independent because marking `y` only relabels vertices by XOR.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::WalkState;
use crate::walk::MIN_DIMENSION;

/// Binomial coefficients stay exact in 128-bit integers up to this dimension.
pub const MAX_COLLAPSED_DIMENSION: u32 = 64;

/// Exact binomial coefficient; requires `n ≤ 64`.
pub fn binomial(n: u32, k: u32) -> u128 {
    debug_assert!(n <= MAX_COLLAPSED_DIMENSION);
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        // Division is exact: c already holds i-1 consecutive factors.
        c = c * (n as u128 - k as u128 + i) / i;
    }
    c
}

/// Right/left-mover amplitudes per Hamming shell.
#[derive(Clone, Debug, PartialEq)]
pub struct CollapsedState {
    n: u32,
    right: Vec<Complex64>,
    left: Vec<Complex64>,
}

impl CollapsedState {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Away-moving amplitude on shell `x`; `right[n]` is always zero.
    pub fn right(&self, x: u32) -> Complex64 {
        self.right[x as usize]
    }

    /// Back-moving amplitude on shell `x`; `left[0]` is always zero.
    pub fn left(&self, x: u32) -> Complex64 {
        self.left[x as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.right
            .iter()
            .chain(&self.left)
            .map(|a| a.norm_sqr())
            .sum()
    }

    /// Probability of measuring a vertex on shell `x`.
    pub fn shell_probability(&self, x: u32) -> f64 {
        self.right[x as usize].norm_sqr() + self.left[x as usize].norm_sqr()
    }

    /// All shell probabilities, index = Hamming distance from the target.
    pub fn shell_distribution(&self) -> ShellDistribution {
        ShellDistribution {
            probabilities: (0..=self.n).map(|x| self.shell_probability(x)).collect(),
        }
    }

    /// Expands the collapsed state back to the full coin ⊗ vertex space,
    /// target at vertex 0.
    ///
    /// On shell `x` each away direction carries `right[x]/√((n−x)·C(n,x))`
    /// and each back direction `left[x]/√(x·C(n,x))`.
    pub fn lift(&self) -> Result<WalkState> {
        let n = self.n;
        let mut s = WalkState::zeroed(n as usize, n)?;
        let mut away = vec![Complex64::new(0.0, 0.0); n as usize + 1];
        let mut back = vec![Complex64::new(0.0, 0.0); n as usize + 1];
        for x in 0..=n {
            let shell = binomial(n, x) as f64;
            if x < n {
                away[x as usize] = self.right[x as usize] / ((n - x) as f64 * shell).sqrt();
            }
            if x > 0 {
                back[x as usize] = self.left[x as usize] / (x as f64 * shell).sqrt();
            }
        }
        for v in 0..(1u64 << n) {
            let x = v.count_ones() as usize;
            for d in 0..n as usize {
                *s.amp_mut(d, v) = if v >> d & 1 == 0 { away[x] } else { back[x] };
            }
        }
        Ok(s)
    }
}

/// Shell-measurement probabilities of a collapsed state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellDistribution {
    probabilities: Vec<f64>,
}

impl ShellDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, x: u32) -> f64 {
        self.probabilities[x as usize]
    }
}

/// Collapse of the uniform initial state:
/// `right[x] = √((n−x)·C(n,x)/(n·2^n))`, `left[x] = √(x·C(n,x)/(n·2^n))`.
pub fn collapsed_initial(n: u32) -> Result<CollapsedState> {
    if n < MIN_DIMENSION {
        return Err(Error::DimensionTooSmall(n));
    }
    if n > MAX_COLLAPSED_DIMENSION {
        return Err(Error::DimensionTooLarge(n, MAX_COLLAPSED_DIMENSION));
    }
    let total = ((n as u128) << n) as f64;
    let mut right = vec![Complex64::new(0.0, 0.0); n as usize + 1];
    let mut left = vec![Complex64::new(0.0, 0.0); n as usize + 1];
    for x in 0..=n {
        let shell = binomial(n, x) as f64;
        right[x as usize] = Complex64::new(((n - x) as f64 * shell / total).sqrt(), 0.0);
        left[x as usize] = Complex64::new((x as f64 * shell / total).sqrt(), 0.0);
    }
    Ok(CollapsedState { n, right, left })
}

/// Per-shell coin rotation; the perturbed form negates `right[0]` afterwards,
/// which is the collapsed image of negating the target's coin block.
///
/// On shell `x` the coin is `[[cos ω, sin ω], [sin ω, −cos ω]]` acting on
/// `(right, left)` with `cos ω = 1 − 2x/n` and `sin ω = (2/n)·√(x(n−x))`.
pub fn collapsed_coin(s: &mut CollapsedState, perturbed: bool) {
    let n = s.n as f64;
    for x in 0..=s.n {
        let xf = x as f64;
        let cos = 1.0 - 2.0 * xf / n;
        let sin = 2.0 / n * (xf * (n - xf)).sqrt();
        let (r, l) = (s.right[x as usize], s.left[x as usize]);
        s.right[x as usize] = cos * r + sin * l;
        s.left[x as usize] = sin * r - cos * l;
    }
    if perturbed {
        s.right[0] = -s.right[0];
    }
}

/// Collapsed shift: swaps `right[x]` with `left[x+1]` for every shell edge.
pub fn collapsed_shift(s: &mut CollapsedState) {
    for x in 0..s.n as usize {
        std::mem::swap(&mut s.right[x], &mut s.left[x + 1]);
    }
}

/// One collapsed walk step: coin, then shift.
pub fn collapsed_step(s: &mut CollapsedState, perturbed: bool) {
    collapsed_coin(s, perturbed);
    collapsed_shift(s);
}

/// Runs `steps` perturbed collapsed steps from the collapsed initial state.
pub fn collapsed_run(n: u32, steps: u64) -> Result<CollapsedState> {
    let mut s = collapsed_initial(n)?;
    for _ in 0..steps {
        collapsed_step(&mut s, true);
    }
    Ok(s)
}
