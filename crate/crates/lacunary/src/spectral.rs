//! The scaled cumulant generating function `Lambda_q` as the log of the
//! Perron–Frobenius eigenvalue of the weighted transfer operator of the
//! map `w -> q w (mod 1)`, and the independent-case analogue
//! `Lambda~ = log I0` from the modified Bessel series.
//!
//! Functions on `[0,1)` are carried on a uniform grid of `M` points with
//! periodic linear interpolation. The operator is smoothing, so low-order
//! interpolation suffices; correctness is policed by a grid-doubling
//! check in [`lambda_spec`] and, in the tests, by the exact Taylor data
//! of `Lambda_q` at small `theta`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pairwise_sum;

/// A periodic function sampled at `w_i = i/M`.
#[derive(Debug, Clone)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite grid value".into()));
        }
        Ok(GridFunction { values })
    }

    pub fn constant(m: usize, c: f64) -> Result<Self> {
        GridFunction::new(vec![c; m])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mean over the grid, which is the trapezoid rule for a periodic
    /// function. Fixed-order pairwise reduction, thread-count independent.
    pub fn integral(&self) -> f64 {
        chunked_pairwise(&self.values) / self.values.len() as f64
    }
}

const CHUNK: usize = 1 << 14;

fn chunked_pairwise(xs: &[f64]) -> f64 {
    let partial: Vec<f64> = xs.par_chunks(CHUNK).map(pairwise_sum).collect();
    pairwise_sum(&partial)
}

/// Apply the weighted transfer operator:
/// `(Phi g)(w) = e^(theta cos(2 pi w)) * (1/q) * sum_j g((w + j)/q)`.
///
/// The weight uses the identity `cos(2 pi q (w+j)/q) = cos(2 pi w)`, so a
/// single weight factor multiplies the preimage average. Off-grid values
/// of `g` are obtained by periodic linear interpolation.
pub fn transfer_apply(theta: f64, q: u64, g: &GridFunction) -> Result<GridFunction> {
    if !theta.is_finite() {
        return Err(Error::Numeric("theta must be finite".into()));
    }
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q must be >= 2, got {q}")));
    }
    let m = g.len();
    let weights: Vec<f64> = (0..m)
        .map(|i| (theta * (std::f64::consts::TAU * i as f64 / m as f64).cos()).exp())
        .collect();
    let out = apply_with_weights(&weights, q, g.values());
    GridFunction::new(out)
}

fn apply_with_weights(weights: &[f64], q: u64, g: &[f64]) -> Vec<f64> {
    let m = g.len();
    let q = q as usize;
    let inv_q = 1.0 / q as f64;
    let mut out = vec![0.0; m];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
        let base = ci * CHUNK;
        for (off, slot) in chunk.iter_mut().enumerate() {
            let i = base + off;
            let mut acc = 0.0;
            for j in 0..q {
                let p = i + j * m;
                let idx = p / q;
                let rem = p % q;
                if rem == 0 {
                    acc += g[idx];
                } else {
                    let frac = rem as f64 * inv_q;
                    let hi = if idx + 1 == m { 0 } else { idx + 1 };
                    acc += g[idx] * (1.0 - frac) + g[hi] * frac;
                }
            }
            *slot = weights[i] * acc * inv_q;
        }
    });
    out
}

/// Output of the power iteration.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    /// Leading eigenvalue, positive.
    pub lambda: f64,
    /// Eigenfunction normalized to unit integral, strictly positive.
    pub eigenfunction: GridFunction,
    pub iterations: usize,
    /// Final relative change of the eigenvalue estimate.
    pub residual: f64,
}

const MAX_POWER_ITERATIONS: usize = 20_000;

/// Leading eigenvalue and eigenfunction of the weighted transfer
/// operator by power iteration from `g = 1`.
///
/// The eigenvalue estimate is the ratio of grid integrals before and
/// after one application (the iterate is kept at unit integral), which is
/// less sensitive to interpolation error than a sup-norm ratio.
/// Convergence requires the relative eigenvalue change to stay below
/// `tol` on two consecutive iterations.
pub fn leading_eigen(theta: f64, q: u64, m: usize, tol: f64) -> Result<SpectralResult> {
    if m < 1024 {
        return Err(Error::InvalidArgument(format!(
            "grid size must be >= 1024, got {m}"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    if !theta.is_finite() {
        return Err(Error::Numeric("theta must be finite".into()));
    }
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q must be >= 2, got {q}")));
    }
    let weights: Vec<f64> = (0..m)
        .map(|i| (theta * (std::f64::consts::TAU * i as f64 / m as f64).cos()).exp())
        .collect();
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Numeric(format!(
            "operator weight overflow at theta = {theta}"
        )));
    }

    let mut g = vec![1.0; m];
    let mut lambda = 1.0f64;
    let mut residual = f64::INFINITY;
    let mut steady = 0usize;
    for it in 1..=MAX_POWER_ITERATIONS {
        let h = apply_with_weights(&weights, q, &g);
        let integral = chunked_pairwise(&h) / m as f64;
        if !integral.is_finite() || integral <= 0.0 {
            return Err(Error::Numeric(format!(
                "power iteration degenerated at step {it} (integral {integral})"
            )));
        }
        // g has unit integral, so the new integral is the Rayleigh-type
        // eigenvalue estimate.
        let new_lambda = integral;
        residual = (new_lambda - lambda).abs() / new_lambda.abs();
        lambda = new_lambda;
        let inv = 1.0 / integral;
        g = h;
        g.par_chunks_mut(CHUNK).for_each(|c| {
            for v in c {
                *v *= inv;
            }
        });
        if residual < tol {
            steady += 1;
            if steady >= 2 {
                let eigenfunction = GridFunction::new(g)?;
                return Ok(SpectralResult {
                    lambda,
                    eigenfunction,
                    iterations: it,
                    residual,
                });
            }
        } else {
            steady = 0;
        }
    }
    Err(Error::Convergence {
        iterations: MAX_POWER_ITERATIONS,
        residual,
    })
}

/// Default grid size for [`lambda_spec`].
pub const DEFAULT_GRID: usize = 1 << 16;
/// Default eigenvalue tolerance for [`lambda_spec`].
pub const DEFAULT_TOL: f64 = 1e-12;

/// `Lambda_q(theta) = log` of the leading transfer-operator eigenvalue,
/// with a grid-doubling consistency check: the values at `M` and `2M`
/// must agree within `10 * tol`, otherwise the grid is escalated once
/// more and the finest value returned.
pub fn lambda_spec(theta: f64, q: u64) -> Result<f64> {
    lambda_spec_at(theta, q, DEFAULT_GRID, DEFAULT_TOL)
}

/// [`lambda_spec`] with explicit base grid size and tolerance.
pub fn lambda_spec_at(theta: f64, q: u64, m: usize, tol: f64) -> Result<f64> {
    let coarse = leading_eigen(theta, q, m, tol)?.lambda.ln();
    let fine = leading_eigen(theta, q, 2 * m, tol)?.lambda.ln();
    if (coarse - fine).abs() <= 10.0 * tol {
        return Ok(fine);
    }
    Ok(leading_eigen(theta, q, 4 * m, tol)?.lambda.ln())
}

/// Largest `|theta|` before `e^theta` (and the Bessel series) overflows.
const THETA_OVERFLOW: f64 = 700.0;

/// Modified Bessel series `I0(theta) = sum (theta^2/4)^m / (m!)^2`,
/// summed until the next term drops below `1e-18` of the running sum.
pub fn bessel_i0(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::Numeric("theta must be finite".into()));
    }
    if theta.abs() > THETA_OVERFLOW {
        return Err(Error::Range(format!(
            "bessel_i0 overflows for |theta| = {} > {THETA_OVERFLOW}",
            theta.abs()
        )));
    }
    let z = theta * theta / 4.0;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut m = 1u32;
    loop {
        term *= z / ((m as f64) * (m as f64));
        sum += term;
        if term < 1e-18 * sum {
            return Ok(sum);
        }
        m += 1;
    }
}

/// Derivative series `I1(theta) = (theta/2) sum (theta^2/4)^m / (m! (m+1)!)`.
pub fn bessel_i1(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::Numeric("theta must be finite".into()));
    }
    if theta.abs() > THETA_OVERFLOW {
        return Err(Error::Range(format!(
            "bessel_i1 overflows for |theta| = {} > {THETA_OVERFLOW}",
            theta.abs()
        )));
    }
    let z = theta * theta / 4.0;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut m = 1u32;
    loop {
        term *= z / ((m as f64) * (m as f64 + 1.0));
        sum += term;
        if term < 1e-18 * sum {
            return Ok(theta / 2.0 * sum);
        }
        m += 1;
    }
}

/// `Lambda~(theta) = log I0(theta)`, the scaled cumulant generating
/// function of i.i.d. arcsine summands.
pub fn lambda_tilde(theta: f64) -> Result<f64> {
    Ok(bessel_i0(theta)?.ln())
}
