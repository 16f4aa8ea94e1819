//! Integer sequence constructors: geometric progressions, super-exponential
//! gap sequences, interleaved power blocks, and randomized perturbations of
//! the dyadic sequence.
//!
//! Everything in this module is exact: terms are arbitrary-precision
//! integers, gap ratios are exact rationals, and no floating point is used
//! anywhere.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a sequence was constructed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "params")]
pub enum SequenceKind {
    /// Terms `q, q^2, ..., q^n`.
    Geometric { q: u64, n: usize },
    /// Terms `2^(k(k+1)/2)`, so consecutive ratios `2^(k+1)` diverge.
    LargeGap { n: usize },
    /// Blocks of consecutive powers of 2 and 3; see [`interleaved`].
    Interleaved { schedule: Vec<(u64, usize)> },
    /// `2^k` plus a seeded random multiple of `2^ceil(k^(2/3))`.
    Perturbed {
        n: usize,
        seed: u64,
        /// Smallest index from which the gap-ratio bounds
        /// `2/(1+2^-k^(1/3)) <= a_{k+1}/a_k <= 2(1+2^-(k+1)^(1/3))`
        /// are guaranteed for every possible draw.
        ratio_bound_from: usize,
    },
    /// Caller-supplied terms.
    Custom,
}

/// A finite strictly increasing sequence of positive integers together with
/// its construction provenance.
///
/// Perturbed sequences may violate monotonicity on a short prefix; the
/// guaranteed-ratio threshold is recorded in
/// [`SequenceKind::Perturbed::ratio_bound_from`] and consumers that need
/// monotonicity can drop the prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LacunarySequence {
    terms: Vec<BigUint>,
    kind: SequenceKind,
}

impl LacunarySequence {
    /// Wrap caller-supplied terms. All terms must be positive.
    pub fn custom(terms: Vec<BigUint>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("empty term list".into()));
        }
        if terms.iter().any(|t| t.is_zero()) {
            return Err(Error::InvalidArgument("terms must be positive".into()));
        }
        Ok(LacunarySequence {
            terms,
            kind: SequenceKind::Custom,
        })
    }

    pub fn terms(&self) -> &[BigUint] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    /// New sequence holding `terms[lo..hi]` (0-based, half-open), kind `Custom`.
    pub fn slice(&self, lo: usize, hi: usize) -> Result<Self> {
        if lo >= hi || hi > self.terms.len() {
            return Err(Error::InvalidArgument(format!(
                "slice [{lo}, {hi}) out of range for length {}",
                self.terms.len()
            )));
        }
        LacunarySequence::custom(self.terms[lo..hi].to_vec())
    }

    /// Exact consecutive ratios `a_{k+1}/a_k`.
    pub fn gap_ratios(&self) -> Result<Vec<BigRational>> {
        if self.terms.len() < 2 {
            return Err(Error::InvalidArgument(
                "gap ratios need at least two terms".into(),
            ));
        }
        Ok(self
            .terms
            .windows(2)
            .map(|w| {
                BigRational::new(
                    BigInt::from(w[1].clone()),
                    BigInt::from(w[0].clone()),
                )
            })
            .collect())
    }

    /// True iff every consecutive ratio is `>= q`.
    pub fn hadamard_check(&self, q: &BigRational) -> Result<bool> {
        Ok(self.gap_ratios()?.iter().all(|r| r >= q))
    }

    /// JSON with terms as decimal strings, preserving exactness.
    pub fn to_json(&self) -> String {
        let repr = SequenceJson {
            kind: self.kind.clone(),
            terms: self.terms.iter().map(|t| t.to_str_radix(10)).collect(),
        };
        serde_json::to_string(&repr).expect("sequence serialization cannot fail")
    }

    /// Parse the JSON produced by [`to_json`].
    pub fn from_json(s: &str) -> Result<Self> {
        let repr: SequenceJson = serde_json::from_str(s)
            .map_err(|e| Error::InvalidArgument(format!("bad sequence JSON: {e}")))?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in &repr.terms {
            let v = BigUint::parse_bytes(t.as_bytes(), 10)
                .ok_or_else(|| Error::InvalidArgument(format!("bad term {t:?}")))?;
            if v.is_zero() {
                return Err(Error::InvalidArgument("terms must be positive".into()));
            }
            terms.push(v);
        }
        if terms.is_empty() {
            return Err(Error::InvalidArgument("empty term list".into()));
        }
        Ok(LacunarySequence {
            terms,
            kind: repr.kind,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceJson {
    #[serde(flatten)]
    kind: SequenceKind,
    terms: Vec<String>,
}

/// The geometric progression `q, q^2, ..., q^n` as exact big integers.
pub fn geometric(q: u64, n: usize) -> Result<LacunarySequence> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q must be >= 2, got {q}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let q_big = BigUint::from(q);
    let mut terms = Vec::with_capacity(n);
    let mut t = q_big.clone();
    for _ in 0..n {
        terms.push(t.clone());
        t *= &q_big;
    }
    Ok(LacunarySequence {
        terms,
        kind: SequenceKind::Geometric { q, n },
    })
}

/// Terms `2^(k(k+1)/2)` for `k = 1..=n`, so `a_{k+1}/a_k = 2^(k+1)`.
///
/// Any super-exponential exponent schedule would do; this one keeps
/// desk-scale terms small.
pub fn large_gap(n: usize) -> Result<LacunarySequence> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let terms = (1..=n)
        .map(|k| BigUint::one() << (k * (k + 1) / 2))
        .collect();
    Ok(LacunarySequence {
        terms,
        kind: SequenceKind::LargeGap { n },
    })
}

/// Blocks of consecutive powers of the scheduled bases.
///
/// Each block of `(base, len)` emits `len` consecutive powers of `base`,
/// starting at the smallest power strictly greater than twice the last
/// emitted term, which enforces the Hadamard condition across block
/// boundaries. The first block starts at `base^1`.
pub fn interleaved(schedule: &[(u64, usize)]) -> Result<LacunarySequence> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty schedule".into()));
    }
    for &(base, len) in schedule {
        if base != 2 && base != 3 {
            return Err(Error::InvalidArgument(format!(
                "block base must be 2 or 3, got {base}"
            )));
        }
        if len == 0 {
            return Err(Error::InvalidArgument("block length must be >= 1".into()));
        }
    }
    let mut terms: Vec<BigUint> = Vec::new();
    for &(base, len) in schedule {
        let b = BigUint::from(base);
        let mut p = b.clone();
        if let Some(last) = terms.last() {
            let threshold = last << 1;
            while p <= threshold {
                p *= &b;
            }
        }
        for _ in 0..len {
            terms.push(p.clone());
            p *= &b;
        }
    }
    Ok(LacunarySequence {
        terms,
        kind: SequenceKind::Interleaved {
            schedule: schedule.to_vec(),
        },
    })
}

/// Terms `2^k + Y_k` where `Y_k` is drawn uniformly from
/// `{h * 2^j : 0 <= h <= 2^j}` with `j = ceil(k^(2/3))`.
///
/// Draws come from one SplitMix64 stream per index `k`, keyed by
/// `(seed, k)`, so extending `n` never changes earlier terms and equal
/// seeds reproduce identical sequences.
pub fn perturbed(n: usize, seed: u64) -> Result<LacunarySequence> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let mut terms = Vec::with_capacity(n);
    for k in 1..=n {
        let j = ceil_two_thirds_power(k);
        // h uniform on 0..=2^j, then Y_k = h * 2^j.
        let h = SplitMix64::stream(seed, k as u64).uniform_inclusive(1u64 << j);
        let y = BigUint::from(h) << j;
        terms.push((BigUint::one() << k) + y);
    }
    let ratio_bound_from = perturbed_ratio_bound_from(n);
    Ok(LacunarySequence {
        terms,
        kind: SequenceKind::Perturbed {
            n,
            seed,
            ratio_bound_from,
        },
    })
}

/// `ceil(k^(2/3))`, exactly: the smallest `j >= 1` with `j^3 >= k^2`.
pub fn ceil_two_thirds_power(k: usize) -> u32 {
    assert!(k >= 1);
    let k2 = (k as u128) * (k as u128);
    let mut j: u32 = 1;
    while (j as u128).pow(3) < k2 {
        j += 1;
    }
    j
}

/// Smallest index `k0 <= n` such that for every `k >= k0` (up to `n`) the
/// gap-ratio bounds hold for *all* possible draws.
///
/// The lower bound holds for every realization iff `(k - 2 j_k)^3 >= k`
/// with `j_k = ceil(k^(2/3))`; the upper bound iff
/// `(k+1 - 2 j_{k+1})^3 >= k+1`. Both conditions are checked with exact
/// integer arithmetic.
fn perturbed_ratio_bound_from(n: usize) -> usize {
    let holds_at = |k: usize| -> bool {
        let lower = {
            let j = ceil_two_thirds_power(k) as i128;
            let d = k as i128 - 2 * j;
            d >= 0 && d * d * d >= k as i128
        };
        let upper = {
            let j = ceil_two_thirds_power(k + 1) as i128;
            let d = (k + 1) as i128 - 2 * j;
            d >= 0 && d * d * d >= (k + 1) as i128
        };
        lower && upper
    };
    // Scan down from n: the conditions are eventually always true, so the
    // first failure from above marks the threshold.
    let mut k0 = n;
    for k in (1..n).rev() {
        if holds_at(k) {
            k0 = k;
        } else {
            break;
        }
    }
    k0
}

/// SplitMix64, the mixing function from Steele, Lea & Flood's
/// "Fast splittable pseudorandom number generators" (OOPSLA 2014).
///
/// Counter-based: output `i` of a stream is a pure function of
/// `(key, i)`, so streams can be evaluated independently and out of
/// order. Stream keys are derived from `(seed, k)` by one mixing round.
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    /// Stream keyed by `(seed, stream_id)`.
    pub fn stream(seed: u64, stream_id: u64) -> Self {
        SplitMix64 {
            state: mix64(seed ^ mix64(stream_id.wrapping_mul(GOLDEN_GAMMA))),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform draw from `0..=max` by rejection, bias-free.
    pub fn uniform_inclusive(&mut self, max: u64) -> u64 {
        let range = (max as u128) + 1;
        let zone = ((1u128 << 64) / range) * range;
        loop {
            let r = self.next_u64() as u128;
            if r < zone {
                return (r % range) as u64;
            }
        }
    }
}
