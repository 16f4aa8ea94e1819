//! Exact-grid integration of moment generating functions and level-set
//! probabilities of lacunary sums at finite `n`.
//!
//! Quadrature is a plain Riemann sum on a dyadic grid of `M = 2^j`
//! points. The cosine arguments are folded exactly: `a_k i mod M` is
//! computed with big integers once per term and stepped with machine
//! words, so no precision is lost even for terms near `2^64`. Accuracy of
//! the sum itself is controlled empirically by a grid-doubling check;
//! every probability is reported together with its grid size and
//! doubling delta, and nothing downstream should be asserted tighter
//! than that delta.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::HashMap;

use crate::diophantine::WorkBounds;
use crate::error::{Error, Result};
use crate::moments::taylor_poly_cos_coeffs;
use crate::pairwise_sum;
use crate::sequences::LacunarySequence;

const CHUNK: usize = 1 << 14;

/// Partial sums `S_n` sampled on a dyadic grid, built one term at a time
/// with exact modular frequency folding.
pub struct FoldedEvaluation {
    m: usize,
    s: Vec<f64>,
    terms_folded: usize,
}

impl FoldedEvaluation {
    /// Empty evaluation (`S_0 = 0`) on a grid of `2^m_log2` points.
    pub fn new(m_log2: u32) -> Result<Self> {
        if !(10..=26).contains(&m_log2) {
            return Err(Error::InvalidArgument(format!(
                "grid exponent must be in 10..=26, got {m_log2}"
            )));
        }
        let m = 1usize << m_log2;
        Ok(FoldedEvaluation {
            m,
            s: vec![0.0; m],
            terms_folded: 0,
        })
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    pub fn terms_folded(&self) -> usize {
        self.terms_folded
    }

    /// Exact residue `a mod M` (low bits, since `M` is a power of two).
    pub fn fold_term(&self, a: &BigUint) -> u64 {
        (a % BigUint::from(self.m)).to_u64().expect("residue < M")
    }

    /// Add `cos(2 pi a w_i)` to every grid value, using the exact
    /// residues `a i mod M`; the cosine argument always lies in
    /// `[0, 2 pi)`.
    pub fn push_term(&mut self, a: &BigUint) {
        let step = self.fold_term(a);
        let m = self.m as u64;
        let mask = m - 1;
        let scale = std::f64::consts::TAU / m as f64;
        self.s
            .par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(ci, chunk)| {
                let base = (ci * CHUNK) as u64;
                let mut r = ((step as u128 * base as u128) % m as u128) as u64;
                for v in chunk.iter_mut() {
                    *v += (r as f64 * scale).cos();
                    r = (r + step) & mask;
                }
            });
        self.terms_folded += 1;
    }

    pub fn s_values(&self) -> &[f64] {
        &self.s
    }

    /// `(1/M) sum_i exp(theta S_n(w_i))`, fixed-order pairwise reduction.
    pub fn mgf(&self, theta: f64) -> f64 {
        let partial: Vec<f64> = self
            .s
            .par_chunks(CHUNK)
            .map(|chunk| pairwise_map_sum(chunk, &|s| (theta * s).exp()))
            .collect();
        pairwise_sum(&partial) / self.m as f64
    }

    /// Fraction of grid points with `S_n(w_i) >= threshold`.
    pub fn level_fraction(&self, threshold: f64) -> f64 {
        let count: u64 = self
            .s
            .par_chunks(CHUNK)
            .map(|chunk| chunk.iter().filter(|&&s| s >= threshold).count() as u64)
            .sum();
        count as f64 / self.m as f64
    }
}

fn pairwise_map_sum(xs: &[f64], f: &dyn Fn(f64) -> f64) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().map(|&x| f(x)).sum();
    }
    let mid = xs.len() / 2;
    pairwise_map_sum(&xs[..mid], f) + pairwise_map_sum(&xs[mid..], f)
}

/// A grid-integration result together with its accuracy evidence.
#[derive(Debug, Clone, Copy)]
pub struct GridValue {
    pub value: f64,
    /// log2 of the finest grid actually used.
    pub grid_log2: u32,
    /// Relative disagreement between the two finest grids.
    pub doubling_delta: f64,
    /// True when the base doubling check failed and the grid was
    /// escalated once.
    pub escalated: bool,
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Doubling tolerance for smooth integrands (mgf).
const MGF_DOUBLING_TOL: f64 = 1e-6;
/// Doubling tolerance for indicator integrands, whose grid values are
/// quantized in units of 1/M by the level-set boundary.
const LEVELSET_DOUBLING_TOL: f64 = 1e-3;

fn doubling_check<F>(compute: F, base_log2: u32, tol: f64) -> Result<GridValue>
where
    F: Fn(u32) -> Result<f64>,
{
    let coarse = compute(base_log2)?;
    let fine = compute(base_log2 + 1)?;
    let delta = rel_diff(coarse, fine);
    if delta <= tol {
        return Ok(GridValue {
            value: fine,
            grid_log2: base_log2 + 1,
            doubling_delta: delta,
            escalated: false,
        });
    }
    let finest = compute(base_log2 + 2)?;
    let delta2 = rel_diff(fine, finest);
    if delta2 <= tol {
        return Ok(GridValue {
            value: finest,
            grid_log2: base_log2 + 2,
            doubling_delta: delta2,
            escalated: true,
        });
    }
    Err(Error::Accuracy {
        coarse: fine,
        fine: finest,
    })
}

fn validate_prefix(seq: &LacunarySequence, n: usize) -> Result<()> {
    if n == 0 || n > seq.len() {
        return Err(Error::InvalidArgument(format!(
            "prefix length {n} out of range 1..={}",
            seq.len()
        )));
    }
    Ok(())
}

fn validate_mgf_grid(m_log2: u32) -> Result<()> {
    if !(16..=24).contains(&m_log2) {
        return Err(Error::InvalidArgument(format!(
            "grid exponent must be in 16..=24 (so the doubling check stays <= 2^26), got {m_log2}"
        )));
    }
    Ok(())
}

/// Riemann-sum `E[exp(theta S_n)]` over `2^m_log2` points with a
/// grid-doubling check at `1e-6` relative tolerance (escalated once on
/// failure, error if still disagreeing).
pub fn mgf_grid(
    seq: &LacunarySequence,
    n: usize,
    theta: f64,
    m_log2: u32,
) -> Result<GridValue> {
    validate_prefix(seq, n)?;
    validate_mgf_grid(m_log2)?;
    if !theta.is_finite() {
        return Err(Error::Numeric("theta must be finite".into()));
    }
    doubling_check(
        |lg| {
            let mut fe = FoldedEvaluation::new(lg)?;
            for a in &seq.terms()[..n] {
                fe.push_term(a);
            }
            let v = fe.mgf(theta);
            if !v.is_finite() {
                return Err(Error::Numeric(format!("mgf overflow at theta {theta}")));
            }
            Ok(v)
        },
        m_log2,
        MGF_DOUBLING_TOL,
    )
}

/// One mgf increment `log mgf(n+1) - log mgf(n)`.
#[derive(Debug, Clone, Copy)]
pub struct Increment {
    pub n: usize,
    pub delta: f64,
}

/// The sequence of log-mgf increments for `n = 1..=n_max`, which for
/// geometric sequences converge to `Lambda_q(theta)` geometrically.
///
/// The whole sweep is evaluated on the base grid and its double with the
/// same per-value check as [`mgf_grid`]; the entire run escalates once if
/// any value disagrees.
pub fn ldp_increment(
    seq: &LacunarySequence,
    theta: f64,
    n_max: usize,
    m_log2: u32,
) -> Result<Vec<Increment>> {
    if n_max == 0 || n_max + 1 > seq.len() {
        return Err(Error::InvalidArgument(format!(
            "n_max must satisfy 1 <= n_max <= len - 1 = {}",
            seq.len().saturating_sub(1)
        )));
    }
    validate_mgf_grid(m_log2)?;
    let sweep = |lg: u32| -> Result<Vec<f64>> {
        let mut fe = FoldedEvaluation::new(lg)?;
        let mut vals = Vec::with_capacity(n_max + 1);
        for a in &seq.terms()[..=n_max] {
            fe.push_term(a);
            let v = fe.mgf(theta);
            if !v.is_finite() {
                return Err(Error::Numeric(format!("mgf overflow at theta {theta}")));
            }
            vals.push(v);
        }
        Ok(vals)
    };
    let agree = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| rel_diff(x, y))
            .fold(0.0, f64::max)
    };
    let coarse = sweep(m_log2)?;
    let fine = sweep(m_log2 + 1)?;
    let chosen = if agree(&coarse, &fine) <= MGF_DOUBLING_TOL {
        fine
    } else {
        let finest = sweep(m_log2 + 2)?;
        let d = agree(&fine, &finest);
        if d > MGF_DOUBLING_TOL {
            return Err(Error::Accuracy {
                coarse: fine[fine.len() - 1],
                fine: finest[finest.len() - 1],
            });
        }
        finest
    };
    Ok((1..=n_max)
        .map(|n| Increment {
            n,
            delta: chosen[n].ln() - chosen[n - 1].ln(),
        })
        .collect())
}

/// `P(S_n >= n x)` as the fraction of grid points above the level, with
/// the doubling protocol of [`mgf_grid`] at the indicator tolerance.
pub fn levelset_prob(
    seq: &LacunarySequence,
    n: usize,
    x: f64,
    m_log2: u32,
) -> Result<GridValue> {
    validate_prefix(seq, n)?;
    validate_mgf_grid(m_log2)?;
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!(
            "level x must lie in [-1, 1], got {x}"
        )));
    }
    doubling_check(
        |lg| {
            let mut fe = FoldedEvaluation::new(lg)?;
            for a in &seq.terms()[..n] {
                fe.push_term(a);
            }
            Ok(fe.level_fraction(n as f64 * x))
        },
        m_log2,
        LEVELSET_DOUBLING_TOL,
    )
}

/// `-(1/n) log P(S_n >= z n)` for the sub-lacunary sequence `a_k = k`,
/// for `n = 1..=n_max`. The values decay toward zero; only the trend is
/// meaningful at desk scale.
pub fn sublacunary_demo(n_max: usize, z: f64, m_log2: u32) -> Result<Vec<(usize, f64)>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    if !(0.0 < z && z < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "z must lie in (0, 1), got {z}"
        )));
    }
    validate_mgf_grid(m_log2)?;
    let sweep = |lg: u32| -> Result<Vec<f64>> {
        let mut fe = FoldedEvaluation::new(lg)?;
        let mut ps = Vec::with_capacity(n_max);
        for k in 1..=n_max {
            fe.push_term(&BigUint::from(k));
            let p = fe.level_fraction(z * k as f64);
            if p <= 0.0 {
                return Err(Error::Numeric(format!(
                    "empty level set at n = {k} on 2^{lg} points"
                )));
            }
            ps.push(p);
        }
        Ok(ps)
    };
    let coarse = sweep(m_log2)?;
    let fine = sweep(m_log2 + 1)?;
    let max_delta = coarse
        .iter()
        .zip(&fine)
        .map(|(&a, &b)| rel_diff(a, b))
        .fold(0.0, f64::max);
    let chosen = if max_delta <= LEVELSET_DOUBLING_TOL {
        fine
    } else {
        let finest = sweep(m_log2 + 2)?;
        let d = fine
            .iter()
            .zip(&finest)
            .map(|(&a, &b)| rel_diff(a, b))
            .fold(0.0, f64::max);
        if d > LEVELSET_DOUBLING_TOL {
            return Err(Error::Accuracy {
                coarse: *fine.last().unwrap(),
                fine: *finest.last().unwrap(),
            });
        }
        finest
    };
    Ok(chosen
        .iter()
        .enumerate()
        .map(|(i, &p)| (i + 1, -p.ln() / (i + 1) as f64))
        .collect())
}

/// Exact value of `int prod_{k<=n} p_d(theta cos(2 pi a_k w)) dw` by
/// meet-in-the-middle enumeration of zero-total-frequency picks.
///
/// Each factor contributes either the constant `b_0` or a signed
/// frequency `+-j a_k` with weight `b_j/2` (the two complex-exponential
/// halves of `cos`), so the integral is the sum of weight products over
/// selections whose frequencies cancel exactly. All arithmetic is in
/// exact rationals; `theta` is converted exactly from its binary
/// representation.
pub fn mgf_poly_exact(
    seq: &LacunarySequence,
    n: usize,
    theta: f64,
    d: usize,
    bounds: &WorkBounds,
) -> Result<BigRational> {
    validate_prefix(seq, n)?;
    if !theta.is_finite() {
        return Err(Error::Numeric("theta must be finite".into()));
    }
    let theta_rat = BigRational::from_float(theta)
        .ok_or_else(|| Error::Numeric("theta must be finite".into()))?;
    let b: Vec<BigRational> = taylor_poly_cos_coeffs(d)
        .iter()
        .map(|p| p.eval_rational(&theta_rat))
        .collect();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));

    // Options per factor: frequency shift and weight.
    let options: Vec<Vec<(BigInt, BigRational)>> = seq.terms()[..n]
        .iter()
        .map(|a| {
            let a = BigInt::from(a.clone());
            let mut opts = vec![(BigInt::zero(), b[0].clone())];
            for (j, bj) in b.iter().enumerate().skip(1) {
                if bj.is_zero() {
                    continue;
                }
                let w = bj * &half;
                let f = &a * BigInt::from(j);
                opts.push((f.clone(), w.clone()));
                opts.push((-f, w));
            }
            opts
        })
        .collect();

    let split = n.div_ceil(2);
    let max_opts = options.iter().map(|o| o.len() as u128).max().unwrap_or(1);
    let half_size = max_opts.saturating_pow(split as u32);
    if half_size > bounds.mitm_half_size {
        return Err(Error::ResourceLimit {
            what: format!("meet-in-the-middle half enumeration {max_opts}^{split}"),
            requested: half_size,
            bound: bounds.mitm_half_size,
        });
    }

    fn enumerate(
        options: &[Vec<(BigInt, BigRational)>],
        map: &mut HashMap<BigInt, BigRational>,
        freq: BigInt,
        weight: BigRational,
    ) {
        match options.split_first() {
            None => {
                *map.entry(freq).or_insert_with(BigRational::zero) += weight;
            }
            Some((first, rest)) => {
                for (f, w) in first {
                    enumerate(rest, map, &freq + f, &weight * w);
                }
            }
        }
    }

    let mut left = HashMap::new();
    enumerate(
        &options[..split],
        &mut left,
        BigInt::zero(),
        BigRational::one(),
    );
    let mut right = HashMap::new();
    enumerate(
        &options[split..],
        &mut right,
        BigInt::zero(),
        BigRational::one(),
    );

    let mut total = BigRational::zero();
    // Deterministic join order keyed by frequency.
    let mut keys: Vec<&BigInt> = left.keys().collect();
    keys.sort();
    for f in keys {
        if let Some(rw) = right.get(&(-f)) {
            total += &left[f] * rw;
        }
    }
    Ok(total)
}
