//! Large-deviation machinery for lacunary trigonometric sums
//! `S_n(w) = sum_{k<=n} cos(2 pi a_k w)` on `[0,1]`.
//!
//! The crate is organized around the objects that appear in the analysis:
//!
//! - [`sequences`]: the integer sequences `(a_k)` themselves — geometric
//!   progressions, super-exponential gap sequences, interleaved power
//!   blocks, and randomized perturbations of `(2^k)`.
//! - [`diophantine`]: exact counts of signed representations of zero by
//!   sequence terms, the combinatorial quantity behind every moment, with
//!   three independent engines and closed-form polynomial synthesis.
//! - [`moments`]: exact rational moments and cumulants of the sums, and
//!   the cosine-expansion coefficients of exponential Taylor polynomials.
//! - [`series`]: truncated formal power series over exact rationals, with
//!   composition and reversion.
//! - [`spectral`]: the scaled cumulant generating function `Lambda_q` as
//!   the log of the leading eigenvalue of a weighted transfer operator,
//!   and its independent-case analogue `Lambda~` from the Bessel series.
//! - [`ratefn`]: Legendre–Fenchel transforms, numeric and as exact Taylor
//!   series.
//! - [`empirical`]: exact-grid integration of moment generating functions
//!   and level-set probabilities at finite `n`.
//!
//! Exact arithmetic (big integers, big rationals) is used everywhere a
//! printed table or series coefficient is reproduced; floating point
//! enters only in the spectral, rate-function and grid-integration layers.

pub mod diophantine;
pub mod empirical;
pub mod error;
pub mod moments;
pub mod ratefn;
pub mod sequences;
pub mod series;
pub mod spectral;

pub use error::{Error, Result};
pub use sequences::LacunarySequence;

/// Deterministic pairwise summation: fixed association order independent
/// of chunking or thread count.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
