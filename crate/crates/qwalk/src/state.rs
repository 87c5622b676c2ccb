//! State vectors over a coin register tensored with a hypercube vertex
//! register, measurement distributions, and deterministic sampling.
//!
//! Amplitudes are stored coin-major: the flat index of coin direction `d`
//! at vertex `x` is `d * 2^bits + x`, so vertex-register operations act on
//! contiguous rows and bitwise vertex kernels stay branch-free.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Hard cap on amplitudes per state; keeps allocation failures explicit.
pub const MAX_AMPLITUDES: usize = 1 << 28;

/// Squared-norm tolerance accepted by measurement operations.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Deterministic random source used wherever sampling occurs.
///
/// ChaCha8 keyed from a `u64`. Independent substreams give reproducible
/// per-trial generators no matter how trials are scheduled.
#[derive(Clone, Debug)]
pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Generator for substream `stream` of `seed`; distinct streams never overlap.
    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    /// Uniform draw from [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.0.gen()
    }

    /// Uniform draw from [0, bound).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.0.gen_range(0..bound)
    }
}

/// Complex state vector on `coins ⊗ 2^bits`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState {
    coins: usize,
    bits: u32,
    amps: Vec<Complex64>,
}

impl WalkState {
    /// All-zero state with `coins` coin directions over a `bits`-bit vertex register.
    pub fn zeroed(coins: usize, bits: u32) -> Result<Self> {
        if coins == 0 {
            return Err(Error::EmptyCoin);
        }
        let vertices = 1usize
            .checked_shl(bits)
            .ok_or(Error::CapacityExceeded { coins, bits })?;
        let len = coins
            .checked_mul(vertices)
            .filter(|&l| l <= MAX_AMPLITUDES)
            .ok_or(Error::CapacityExceeded { coins, bits })?;
        Ok(Self {
            coins,
            bits,
            amps: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    /// Uniform superposition over every coin direction and vertex.
    pub fn uniform(coins: usize, bits: u32) -> Result<Self> {
        let mut s = Self::zeroed(coins, bits)?;
        let a = Complex64::new(1.0 / (s.amps.len() as f64).sqrt(), 0.0);
        s.amps.fill(a);
        Ok(s)
    }

    /// Normalized state with uniform real amplitudes on the vertices selected
    /// by `keep`, zero elsewhere.
    pub fn uniform_where(coins: usize, bits: u32, keep: impl Fn(u64) -> bool) -> Result<Self> {
        let mut s = Self::zeroed(coins, bits)?;
        let kept = (0..s.vertex_count() as u64).filter(|&x| keep(x)).count();
        if kept == 0 {
            return Err(Error::EmptyMarkedSet);
        }
        let a = Complex64::new(1.0 / ((coins * kept) as f64).sqrt(), 0.0);
        for d in 0..coins {
            for x in 0..s.vertex_count() as u64 {
                if keep(x) {
                    *s.amp_mut(d, x) = a;
                }
            }
        }
        Ok(s)
    }

    /// Haar-agnostic random normalized state; adequate for identity checks.
    pub fn random_normalized(coins: usize, bits: u32, rng: &mut SeededRng) -> Result<Self> {
        let mut s = Self::zeroed(coins, bits)?;
        for a in &mut s.amps {
            *a = Complex64::new(rng.uniform() - 0.5, rng.uniform() - 0.5);
        }
        let norm = s.norm_sqr().sqrt();
        for a in &mut s.amps {
            *a /= norm;
        }
        Ok(s)
    }

    pub fn coins(&self) -> usize {
        self.coins
    }

    pub fn vertex_bits(&self) -> u32 {
        self.bits
    }

    pub fn vertex_count(&self) -> usize {
        1 << self.bits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of coin `d` at vertex `x` (coin-major layout).
    #[inline]
    pub fn index_of(&self, d: usize, x: u64) -> usize {
        debug_assert!(d < self.coins && (x as usize) < self.vertex_count());
        d * self.vertex_count() + x as usize
    }

    #[inline]
    pub fn amp(&self, d: usize, x: u64) -> Complex64 {
        self.amps[self.index_of(d, x)]
    }

    #[inline]
    pub fn amp_mut(&mut self, d: usize, x: u64) -> &mut Complex64 {
        let i = self.index_of(d, x);
        &mut self.amps[i]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Hermitian inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_shape(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest elementwise amplitude difference against `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.coins != other.coins || self.bits != other.bits {
            return Err(Error::ShapeMismatch {
                left_coins: self.coins,
                left_bits: self.bits,
                right_coins: other.coins,
                right_bits: other.bits,
            });
        }
        Ok(())
    }

    fn check_normalized(&self) -> Result<()> {
        let dev = (self.norm_sqr() - 1.0).abs();
        if dev > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized(dev));
        }
        Ok(())
    }

    /// Vertex-measurement probabilities, coin register traced out.
    pub fn vertex_distribution(&self) -> Result<Distribution> {
        self.check_normalized()?;
        let v = self.vertex_count();
        let mut per_vertex = vec![0.0; v];
        for d in 0..self.coins {
            let row = &self.amps[d * v..(d + 1) * v];
            for (p, a) in per_vertex.iter_mut().zip(row) {
                *p += a.norm_sqr();
            }
        }
        Ok(Distribution {
            coins: self.coins,
            per_vertex,
            per_coin_vertex: None,
        })
    }

    /// Joint coin-and-vertex measurement probabilities.
    pub fn joint_distribution(&self) -> Result<Distribution> {
        let mut dist = self.vertex_distribution()?;
        dist.per_coin_vertex = Some(self.amps.iter().map(|a| a.norm_sqr()).collect());
        Ok(dist)
    }
}

/// Relabels vertices by XOR with `mask`, permuting amplitude columns in place.
pub fn apply_vertex_xor(s: &mut WalkState, mask: u64) {
    let v = s.vertex_count() as u64;
    debug_assert!(mask < v);
    if mask == 0 {
        return;
    }
    for d in 0..s.coins() {
        for x in 0..v {
            let y = x ^ mask;
            if x < y {
                let (i, j) = (s.index_of(d, x), s.index_of(d, y));
                s.amplitudes_mut().swap(i, j);
            }
        }
    }
}

/// One measurement draw; `coin` is present only for joint measurements.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub coin: Option<usize>,
    pub vertex: u64,
}

/// Measurement probabilities extracted from a state.
#[derive(Clone, Debug, Serialize)]
pub struct Distribution {
    coins: usize,
    per_vertex: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_coin_vertex: Option<Vec<f64>>,
}

impl Distribution {
    pub fn per_vertex(&self) -> &[f64] {
        &self.per_vertex
    }

    pub fn per_coin_vertex(&self) -> Option<&[f64]> {
        self.per_coin_vertex.as_deref()
    }

    pub fn probability(&self, vertex: u64) -> f64 {
        self.per_vertex[vertex as usize]
    }

    /// Vertex of highest probability (lowest label on ties).
    pub fn argmax(&self) -> u64 {
        let mut best = 0usize;
        for (i, &p) in self.per_vertex.iter().enumerate() {
            if p > self.per_vertex[best] {
                best = i;
            }
        }
        best as u64
    }

    /// Probabilities summed by Hamming weight of the vertex label.
    pub fn shell_sums(&self, bits: u32) -> Vec<f64> {
        let mut shells = vec![0.0; bits as usize + 1];
        for (x, &p) in self.per_vertex.iter().enumerate() {
            shells[x.count_ones() as usize] += p;
        }
        shells
    }

    /// Inverse-CDF draw. Joint distributions yield the coin as well.
    ///
    /// Guards against accumulated rounding by falling back to the last
    /// positive-probability entry when the draw exceeds the running total.
    pub fn sample(&self, rng: &mut SeededRng) -> Sample {
        let u = rng.uniform();
        match &self.per_coin_vertex {
            Some(joint) => {
                let v = self.per_vertex.len();
                let i = Self::pick(joint, u);
                Sample {
                    coin: Some(i / v),
                    vertex: (i % v) as u64,
                }
            }
            None => Sample {
                coin: None,
                vertex: Self::pick(&self.per_vertex, u) as u64,
            },
        }
    }

    fn pick(weights: &[f64], u: f64) -> usize {
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                last_positive = i;
            }
            acc += w;
            if u < acc {
                return i;
            }
        }
        last_positive
    }
}
