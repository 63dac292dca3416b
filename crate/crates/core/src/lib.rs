//! Encoding and maximum-likelihood decoding of binary k-partial simplex
//! convolutional codes.
//!
//! The crate is organised bottom-up:
//!
//! * [`f2`]: packed GF(2) vectors and matrices plus their bipolar (±1) image.
//! * [`block`]: Reed-Muller, simplex and k-partial simplex generator matrices
//!   and the canonical codeword enumeration.
//! * [`hadamard`]: Sylvester Hadamard matrices, the fast Walsh-Hadamard
//!   transform and the per-step branch distance profile.
//! * [`conv`]: polynomial generator matrices, zero-tail encoding and
//!   brute-force column/free distance oracles.
//! * [`trellis`]: the classic Viterbi decoder and the transform-based
//!   decoder that shares its add-compare-select core.
//! * [`channel`]: binary symmetric channel, error injection and instrumented
//!   benchmarks.
//! * [`io`]: the plain-text block file format.

pub mod block;
pub mod channel;
pub mod conv;
pub mod error;
pub mod f2;
pub mod hadamard;
pub mod io;
pub mod ops;
pub mod trellis;

pub use error::{Error, Result};

/// Largest `δ + k` accepted when materialising generator matrices.
pub const MAX_CODE_DIM: usize = 20;

/// Largest `δ + k` accepted by the decoders (they tabulate every branch
/// codeword, `2^(δ+k)` words of `n` bits).
pub const MAX_TRELLIS_DIM: usize = 14;
