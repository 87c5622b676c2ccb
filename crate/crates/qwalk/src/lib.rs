//! Exact state-vector simulation of discrete-time quantum-walk search on
//! hypercubes, with the classical protocols that turn walk measurements into
//! found vertices and an oracle-query ledger for comparing them.
//!
//! The crate covers the SKW search walk (Grover coin, XOR shift, oracle
//! perturbation), its collapse to the Hamming-weight line for single
//! targets, vertex-parity analysis, the two-coin construction on an
//! extended hypercube together with its storage-reduced self-loop form,
//! and end-to-end search protocols with exact and sampled evaluation.

pub mod collapsed;
pub mod error;
pub mod optimal;
pub mod parity;
pub mod protocol;
pub mod report;
pub mod state;
pub mod thresholds;
pub mod walk;

pub use error::{Error, Result};
pub use state::{Distribution, Sample, SeededRng, WalkState};
pub use walk::{QueryLedger, WalkConfig};
