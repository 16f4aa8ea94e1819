//! Exact rational moments and cumulants of the lacunary sums and their
//! independent-case counterparts, Taylor data of the scaled cumulant
//! generating functions at zero, and cosine-basis expansions of powers
//! and of exponential Taylor polynomials.
//!
//! Everything here is exact: moments are `A_m(n)/2^m` and `B_m(n)/2^m`
//! with big-integer counts, cumulants come from the exact
//! moment-to-cumulant recursion, and the affine dependence of cumulants
//! on `n` is fitted from two samples and verified at a third.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::diophantine::{bridge_count, count_geometric_dp};
use crate::error::{Error, Result};
use crate::series::PowerSeries;

/// `E[S_n^m] = A_m(n) / 2^m`, exactly, via the DP counter.
pub fn moment(q: u64, m: usize, n: usize) -> Result<BigRational> {
    let a = count_geometric_dp(q, m, n)?;
    Ok(BigRational::new(
        BigInt::from(a.0),
        BigInt::one() << m,
    ))
}

/// `E[S~_n^m] = B_m(n) / 2^m` for i.i.d. arcsine summands.
pub fn independent_moment(m: usize, n: usize) -> Result<BigRational> {
    let b = bridge_count(m, n)?;
    Ok(BigRational::new(
        BigInt::from(b.0),
        BigInt::one() << m,
    ))
}

/// Moments of a single arcsine variable `cos(2 pi U)`:
/// `E[X^(2j)] = C(2j, j) / 4^j` and odd moments vanish.
pub fn arcsine_moment(m: usize) -> BigRational {
    if m % 2 == 1 {
        return BigRational::zero();
    }
    let j = m / 2;
    BigRational::new(central_binomial(j), BigInt::one() << m)
}

fn central_binomial(j: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..j {
        num *= 2 * j - i;
        den *= i + 1;
    }
    num / den
}

fn factorial(m: usize) -> BigInt {
    let mut f = BigInt::one();
    for i in 1..=m {
        f *= i;
    }
    f
}

fn binom_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k.min(n - k) {
        num *= n - i;
        den *= i + 1;
    }
    num / den
}

/// Convert raw moments (index 0 holds order 1) to cumulants via
/// `k_m = mu_m - sum_{j=1}^{m-1} C(m-1, j-1) k_j mu_{m-j}`.
pub fn moments_to_cumulants(moments: &[BigRational]) -> Result<Vec<BigRational>> {
    if moments.is_empty() {
        return Err(Error::InvalidArgument("empty moment list".into()));
    }
    let mut cumulants: Vec<BigRational> = Vec::with_capacity(moments.len());
    for m in 1..=moments.len() {
        let mut k = moments[m - 1].clone();
        for j in 1..m {
            let c = BigRational::from_integer(binom_big(m - 1, j - 1));
            k -= c * &cumulants[j - 1] * &moments[m - j - 1];
        }
        cumulants.push(k);
    }
    Ok(cumulants)
}

/// The affine dependence `k_m(S_n) = slope * n + intercept`, valid for
/// all `n >= valid_from`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CumulantAffine {
    pub slope: BigRational,
    pub intercept: BigRational,
    pub order: usize,
    pub valid_from: usize,
}

impl CumulantAffine {
    pub fn eval(&self, n: usize) -> BigRational {
        &self.slope * BigRational::from_integer(BigInt::from(n)) + &self.intercept
    }
}

/// Exact `m`-th cumulant of `S_n` from the first `m` moments.
pub fn cumulant_of_sum(q: u64, m: usize, n: usize) -> Result<BigRational> {
    let moments: Vec<BigRational> = (1..=m)
        .map(|j| moment(q, j, n))
        .collect::<Result<_>>()?;
    Ok(moments_to_cumulants(&moments)?.pop().unwrap())
}

/// Fit `k_m(S_n)` as an affine function of `n`.
///
/// Cumulants of `S_n` are degree-1 polynomials in `n` on the range where
/// the counts `A_j(n)` follow their closed forms; we sample inside that
/// range at `valid_from + 2` and `valid_from + 5` and verify the fit at
/// `valid_from + 9`, erring out on mismatch.
pub fn cumulant_affine(q: u64, m: usize) -> Result<CumulantAffine> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be >= 1".into()));
    }
    let valid_from = if m >= 3 { m - 2 } else { 1 };
    let n1 = valid_from + 2;
    let n2 = valid_from + 5;
    let n3 = valid_from + 9;
    let k1 = cumulant_of_sum(q, m, n1)?;
    let k2 = cumulant_of_sum(q, m, n2)?;
    let slope = (&k2 - &k1) / BigRational::from_integer(BigInt::from(n2 - n1));
    let intercept = k1 - &slope * BigRational::from_integer(BigInt::from(n1));
    let fit = CumulantAffine {
        slope,
        intercept,
        order: m,
        valid_from,
    };
    let probe = cumulant_of_sum(q, m, n3)?;
    if fit.eval(n3) != probe {
        return Err(Error::InternalConsistency(format!(
            "cumulant k_{m}(S_n) for q={q} is not affine: fit gives {} at n={n3}, \
             direct evaluation gives {probe}",
            fit.eval(n3)
        )));
    }
    Ok(fit)
}

/// Taylor series of `Lambda_q` at 0 up to `theta^order`: the coefficient
/// of `theta^m` is `slope(k_m(S_n)) / m!` and the constant and linear
/// coefficients vanish.
pub fn lambda_taylor(q: u64, order: usize) -> Result<PowerSeries> {
    if order < 2 {
        return Err(Error::InvalidArgument("order must be >= 2".into()));
    }
    let mut coeffs = vec![BigRational::zero(); order + 1];
    for (m, c) in coeffs.iter_mut().enumerate().take(order + 1).skip(2) {
        let affine = cumulant_affine(q, m)?;
        *c = affine.slope / BigRational::from_integer(factorial(m));
    }
    Ok(PowerSeries::new(coeffs))
}

/// Taylor series of `Lambda~ = log sum theta^(2m) / (4^m (m!)^2)` up to
/// `theta^order`, by formal log of the Bessel-type series.
pub fn tilde_lambda_taylor(order: usize) -> Result<PowerSeries> {
    if order < 2 {
        return Err(Error::InvalidArgument("order must be >= 2".into()));
    }
    Ok(bessel_series(order).log().expect("constant term is 1"))
}

/// The even series `sum_m theta^(2m) / (2^(2m) (m!)^2)` truncated at
/// `theta^order` (the moment generating function of the arcsine law).
pub fn bessel_series(order: usize) -> PowerSeries {
    let mut coeffs = vec![BigRational::zero(); order + 1];
    let mut m = 0usize;
    loop {
        let e = 2 * m;
        if e > order {
            break;
        }
        let f = factorial(m);
        coeffs[e] = BigRational::new(BigInt::one(), (BigInt::one() << e) * &f * &f);
        m += 1;
    }
    PowerSeries::new(coeffs)
}

/// Coefficients of `1, cos x, ..., cos(mx)` in `(cos x)^m`, all exact and
/// non-negative. The constant term is `C(m, m/2)/2^m` for even `m` and
/// zero for odd `m`.
pub fn cos_power_expand(m: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); m + 1];
    if m.is_multiple_of(2) {
        let t = m / 2;
        out[0] = BigRational::new(binom_big(m, t), BigInt::one() << m);
        for l in 0..t {
            out[2 * (t - l)] =
                BigRational::new(binom_big(m, l), BigInt::one() << (m - 1));
        }
    } else {
        let t = (m - 1) / 2;
        for l in 0..=t {
            out[m - 2 * l] =
                BigRational::new(binom_big(m, l), BigInt::one() << (m - 1));
        }
    }
    out
}

/// A polynomial in `theta` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaPolynomial {
    /// Ascending powers of `theta`.
    pub coeffs: Vec<BigRational>,
}

impl ThetaPolynomial {
    pub fn zero(degree: usize) -> Self {
        ThetaPolynomial {
            coeffs: vec![BigRational::zero(); degree + 1],
        }
    }

    pub fn eval_rational(&self, theta: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * theta + c;
        }
        acc
    }

    pub fn eval_f64(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * theta + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn add(&self, other: &ThetaPolynomial) -> ThetaPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        ThetaPolynomial { coeffs }
    }
}

/// Cosine-basis coefficients `b_0..b_d` of the exponential Taylor
/// polynomial: `p_d(theta cos x) = sum_j b_j(theta) cos(jx)` with
/// `p_d(y) = sum_{m<=d} y^m/m!`.
///
/// All coefficients of every `b_j` are non-negative, so `b_j(theta) >= 0`
/// for `theta > 0`, and
/// `b_0(theta) = sum_{m <= d/2} theta^(2m)/(2^(2m) (m!)^2)`.
pub fn taylor_poly_cos_coeffs(d: usize) -> Vec<ThetaPolynomial> {
    let mut out = vec![ThetaPolynomial::zero(d); d + 1];
    for m in 0..=d {
        let inv_fact = BigRational::new(BigInt::one(), factorial(m));
        for (j, c) in cos_power_expand(m).into_iter().enumerate() {
            if !c.is_zero() {
                out[j].coeffs[m] = c * &inv_fact;
            }
        }
    }
    out
}
