//! Truncated formal power series over exact rationals.
//!
//! A series carries its truncation order explicitly: `coeffs[k]` is the
//! coefficient of `x^k` and everything beyond `coeffs.len() - 1` is
//! unknown. Arithmetic is closed under addition, multiplication,
//! composition and reversion up to the truncation order, with no rounding
//! anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<BigRational>,
}

impl PowerSeries {
    /// Series from ascending coefficients; the truncation order is
    /// `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least a constant term");
        PowerSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    /// The monomial `x`, truncated at `order`.
    pub fn identity(order: usize) -> Self {
        let mut s = PowerSeries::zero(order);
        if order >= 1 {
            s.coeffs[1] = BigRational::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `x^k` (zero beyond the stored range is *not*
    /// implied; requesting it is a caller bug).
    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn truncated(&self, order: usize) -> PowerSeries {
        let mut c = self.coeffs.clone();
        c.truncate(order + 1);
        c.resize(order + 1, BigRational::zero());
        PowerSeries { coeffs: c }
    }

    pub fn add(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| &self.coeffs[k] + &other.coeffs[k])
            .collect();
        PowerSeries { coeffs }
    }

    pub fn sub(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| &self.coeffs[k] - &other.coeffs[k])
            .collect();
        PowerSeries { coeffs }
    }

    pub fn scale(&self, c: &BigRational) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.order().min(other.order());
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        PowerSeries { coeffs }
    }

    /// Termwise derivative; the result is known one order less far.
    pub fn derivative(&self) -> PowerSeries {
        if self.order() == 0 {
            return PowerSeries::zero(0);
        }
        let coeffs = (1..=self.order())
            .map(|k| &self.coeffs[k] * BigRational::from_integer(BigInt::from(k)))
            .collect();
        PowerSeries { coeffs }
    }

    /// `self(inner)` for `inner` with zero constant term, by Horner
    /// evaluation truncated at the smaller order.
    pub fn compose(&self, inner: &PowerSeries) -> PowerSeries {
        assert!(
            inner.coeffs[0].is_zero(),
            "composition needs a zero constant term"
        );
        let n = self.order().min(inner.order());
        let inner = inner.truncated(n);
        let mut acc = PowerSeries::zero(n);
        for k in (0..=self.order().min(n)).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] += &self.coeffs[k];
        }
        // Horner above drops self's coefficients beyond n, which are
        // unknowable at this truncation anyway.
        acc
    }

    /// Compositional inverse: for `self = f` with `f(0) = 0` and
    /// `f'(0) != 0`, the series `g` with `f(g(x)) = x` up to the
    /// truncation order.
    ///
    /// Solved triangularly: the coefficient of `x^j` in `f(g)` depends on
    /// `g_j` only through the linear term `f_1 g_j`, so each order is
    /// fixed by one division.
    pub fn revert(&self) -> Result<PowerSeries> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::InvalidArgument(
                "reversion needs a zero constant term".into(),
            ));
        }
        let n = self.order();
        if n == 0 || self.coeffs[1].is_zero() {
            return Err(Error::InvalidArgument(
                "reversion needs a nonzero linear term".into(),
            ));
        }
        let f1 = self.coeffs[1].clone();
        let mut g = PowerSeries::zero(n);
        for j in 1..=n {
            let probe = self.compose(&g);
            let target = if j == 1 {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            g.coeffs[j] = (target - &probe.coeffs[j]) / &f1;
        }
        debug_assert_eq!(self.compose(&g), PowerSeries::identity(n));
        Ok(g)
    }

    /// `log(self)` for a series with constant term 1, via
    /// `log(1+u) = sum (-1)^(j+1) u^j / j`.
    pub fn log(&self) -> Result<PowerSeries> {
        if !self.coeffs[0].is_one() {
            return Err(Error::InvalidArgument(
                "series log needs constant term 1".into(),
            ));
        }
        let n = self.order();
        let mut u = self.clone();
        u.coeffs[0] = BigRational::zero();
        let mut result = PowerSeries::zero(n);
        let mut power = PowerSeries::identity(n);
        power.coeffs[1] = BigRational::zero();
        power.coeffs[0] = BigRational::one(); // u^0
        for j in 1..=n {
            power = power.mul(&u);
            let sign = if j % 2 == 1 {
                BigRational::one()
            } else {
                -BigRational::one()
            };
            let term = power.scale(&(sign / BigRational::from_integer(BigInt::from(j))));
            result = result.add(&term);
        }
        Ok(result)
    }

    /// Horner evaluation in double precision.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

impl std::fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({c})x^{k}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(x^{})", self.order() + 1)
    }
}

/// Convenience constructor from integer pairs, handy in tests and golden
/// tables: `series![(num, den), ...]`.
pub fn from_fracs(pairs: &[(i64, i64)]) -> PowerSeries {
    PowerSeries::new(
        pairs
            .iter()
            .map(|&(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn mul_truncates_exactly() {
        // (1 + x)^2 = 1 + 2x + x^2
        let f = from_fracs(&[(1, 1), (1, 1), (0, 1)]);
        let p = f.mul(&f);
        assert_eq!(p.coeffs(), &[r(1, 1), r(2, 1), r(1, 1)]);
    }

    #[test]
    fn compose_geometric_identity() {
        // f = x + x^2, g = x: f(g) = f.
        let f = from_fracs(&[(0, 1), (1, 1), (1, 1), (0, 1)]);
        let g = PowerSeries::identity(3);
        assert_eq!(f.compose(&g), f);
    }

    #[test]
    fn revert_recovers_known_inverse() {
        // f(x) = x/(1-x) = x + x^2 + x^3 + ...; inverse is x/(1+x)
        // = x - x^2 + x^3 - ...
        let n = 8;
        let f = PowerSeries::new(
            (0..=n)
                .map(|k| if k == 0 { r(0, 1) } else { r(1, 1) })
                .collect(),
        );
        let g = f.revert().unwrap();
        for k in 1..=n {
            let expect = if k % 2 == 1 { r(1, 1) } else { r(-1, 1) };
            assert_eq!(*g.coeff(k), expect, "coefficient of x^{k}");
        }
    }

    #[test]
    fn revert_requires_invertible_jet() {
        assert!(from_fracs(&[(1, 1), (1, 1)]).revert().is_err());
        assert!(from_fracs(&[(0, 1), (0, 1), (1, 1)]).revert().is_err());
    }

    #[test]
    fn log_of_exp_series() {
        // exp(x) truncated, then log, recovers x.
        let n = 7;
        let mut fact = BigInt::one();
        let mut coeffs = vec![BigRational::one()];
        for k in 1..=n {
            fact *= k;
            coeffs.push(BigRational::new(BigInt::one(), fact.clone()));
        }
        let e = PowerSeries::new(coeffs);
        let l = e.log().unwrap();
        assert_eq!(l, PowerSeries::identity(n));
    }

    #[test]
    fn eval_f64_horner() {
        let f = from_fracs(&[(1, 1), (0, 1), (1, 4)]);
        assert!((f.eval_f64(2.0) - 2.0).abs() < 1e-15);
    }
}
