//! Rate functions: Legendre–Fenchel transforms of the scaled cumulant
//! generating functions, numerically by monotone root finding on the
//! derivative, and exactly as formal Taylor series by reversion.
//!
//! Values outside `[-1, 1]` are a tagged infinity sentinel, never a
//! floating-point infinity inside arithmetic. Near the endpoints the
//! transform may saturate at the bracket cap `theta_max = 64`; such
//! values are flagged as lower bounds rather than silently returned as
//! accurate.

use std::cell::RefCell;
use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::series::PowerSeries;
use crate::spectral::{lambda_spec, lambda_tilde};

/// Bracket cap for the derivative inversion.
pub const THETA_MAX: f64 = 64.0;
/// Step for central-difference derivatives of the cgf.
const DERIV_STEP: f64 = 1e-5;
/// Bisection stops when the bracket is this narrow; the transform value
/// is second-order insensitive to the remaining theta error.
const BRACKET_TOL: f64 = 1e-9;

/// One finite Legendre transform evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreResult {
    /// `theta_x x - Lambda(theta_x)`.
    pub value: f64,
    /// The maximizing tilt `theta_x`.
    pub theta: f64,
    /// True when the bracket cap was hit; the value is then only a
    /// lower bound for the supremum.
    pub saturated: bool,
}

/// A rate-function value: finite with its maximizer, or the +infinity
/// sentinel outside `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateValue {
    Finite(LegendreResult),
    Infinite,
}

impl RateValue {
    /// Finite value, panicking on the sentinel — for callers that have
    /// already checked `|x| <= 1`.
    pub fn finite(&self) -> f64 {
        match self {
            RateValue::Finite(r) => r.value,
            RateValue::Infinite => panic!("rate value is the +infinity sentinel"),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, RateValue::Infinite)
    }
}

/// Sampled rate curve.
#[derive(Debug, Clone)]
pub struct RateCurve {
    pub samples: Vec<(f64, RateValue)>,
}

/// `sup_theta [theta x - Lambda(theta)]` for a convex differentiable
/// `Lambda` with `Lambda(0) = 0`, `Lambda'(0) = 0`, by solving
/// `Lambda'(theta) = x` with bisection.
///
/// The bracket grows geometrically from `[0, +-1]` up to `|theta| <=`
/// [`THETA_MAX`]; if the cap cannot bracket the root the capped value is
/// returned flagged as a lower bound.
pub fn legendre_numeric<F>(lambda: F, x: f64) -> Result<LegendreResult>
where
    F: Fn(f64) -> Result<f64>,
{
    if !x.is_finite() || x.abs() > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "legendre_numeric expects |x| <= 1, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(LegendreResult {
            value: 0.0,
            theta: 0.0,
            saturated: false,
        });
    }
    let eval = |t: f64| -> Result<f64> {
        let v = lambda(t)?;
        if !v.is_finite() {
            return Err(Error::Numeric(format!("Lambda({t}) is not finite")));
        }
        Ok(v)
    };
    let deriv = |t: f64| -> Result<f64> {
        Ok((eval(t + DERIV_STEP)? - eval(t - DERIV_STEP)?) / (2.0 * DERIV_STEP))
    };

    let sign = x.signum();
    // Grow the bracket until the derivative passes x (in magnitude).
    let mut hi = 1.0f64;
    loop {
        let d = deriv(sign * hi)?;
        if sign * d >= sign * x {
            break;
        }
        if hi >= THETA_MAX {
            let theta = sign * THETA_MAX;
            return Ok(LegendreResult {
                value: theta * x - eval(theta)?,
                theta,
                saturated: true,
            });
        }
        hi = (hi * 2.0).min(THETA_MAX);
    }
    let mut lo = 0.0f64;
    while hi - lo > BRACKET_TOL * (1.0 + hi) {
        let mid = 0.5 * (lo + hi);
        if sign * deriv(sign * mid)? < sign * x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = sign * 0.5 * (lo + hi);
    Ok(LegendreResult {
        value: theta * x - eval(theta)?,
        theta,
        saturated: false,
    })
}

/// Taylor series of the rate function from the Taylor series of
/// `Lambda`:
/// revert `Lambda'` formally to get `theta(x)`, then compose
/// `I(x) = x theta(x) - Lambda(theta(x))`, all in exact rationals.
pub fn rate_taylor(lambda_series: &PowerSeries) -> Result<PowerSeries> {
    let n = lambda_series.order();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "lambda series must carry at least order 2".into(),
        ));
    }
    if !lambda_series.coeff(0).is_zero() || !lambda_series.coeff(1).is_zero() {
        return Err(Error::InvalidArgument(
            "lambda series must have zero constant and linear terms".into(),
        ));
    }
    if *lambda_series.coeff(2) <= num_rational::BigRational::zero() {
        return Err(Error::InvalidArgument(
            "lambda series must have positive quadratic coefficient".into(),
        ));
    }
    // theta(x) from Lambda'(theta) = x, known to order n-1, padded with a
    // zero at order n: the x^n coefficients of x*theta and
    // Lambda(theta(x)) do not depend on theta_n because Lambda'(0) = 0.
    let deriv = lambda_series.derivative();
    let theta = deriv.revert()?;
    let theta = theta.truncated(n);
    let mut x_theta_coeffs = vec![num_rational::BigRational::zero()];
    x_theta_coeffs.extend(theta.coeffs()[..n].iter().cloned());
    let x_theta = PowerSeries::new(x_theta_coeffs);
    Ok(x_theta.sub(&lambda_series.compose(&theta)))
}

/// Memoizing wrapper around `theta -> Lambda_q(theta)` evaluations; the
/// spectral computation is expensive and bisection revisits bracket
/// endpoints.
pub struct LambdaCache {
    q: u64,
    memo: RefCell<HashMap<u64, f64>>,
}

impl LambdaCache {
    pub fn new(q: u64) -> Self {
        LambdaCache {
            q,
            memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn eval(&self, theta: f64) -> Result<f64> {
        let key = theta.to_bits();
        if let Some(v) = self.memo.borrow().get(&key) {
            return Ok(*v);
        }
        let v = lambda_spec(theta, self.q)?;
        self.memo.borrow_mut().insert(key, v);
        Ok(v)
    }
}

/// `I_q(x)`: +infinity sentinel for `|x| > 1`, otherwise the numeric
/// Legendre transform of the spectral cgf.
pub fn rate_q(q: u64, x: f64) -> Result<RateValue> {
    let cache = LambdaCache::new(q);
    rate_q_cached(&cache, x)
}

/// [`rate_q`] with a shared evaluation cache (for curve sampling).
pub fn rate_q_cached(cache: &LambdaCache, x: f64) -> Result<RateValue> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument("x must be finite".into()));
    }
    if x.abs() > 1.0 {
        return Ok(RateValue::Infinite);
    }
    Ok(RateValue::Finite(legendre_numeric(
        |t| cache.eval(t),
        x,
    )?))
}

/// `I~(x)`: +infinity sentinel for `|x| > 1`, otherwise the numeric
/// Legendre transform of `log I0`.
pub fn rate_tilde(x: f64) -> Result<RateValue> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument("x must be finite".into()));
    }
    if x.abs() > 1.0 {
        return Ok(RateValue::Infinite);
    }
    Ok(RateValue::Finite(legendre_numeric(lambda_tilde, x)?))
}

/// Evaluate `I_q` close to the right endpoint and check the
/// `I_q(1) <= log q` bound with slack 0.05 at eps in {0.05, 0.02, 0.01};
/// returns the eps = 0.01 value.
pub fn rate_at_one_bound(q: u64) -> Result<f64> {
    let cache = LambdaCache::new(q);
    let budget = (q as f64).ln() + 0.05;
    let mut last = f64::NAN;
    for eps in [0.05, 0.02, 0.01] {
        let v = match rate_q_cached(&cache, 1.0 - eps)? {
            RateValue::Finite(r) => r.value,
            RateValue::Infinite => unreachable!("|x| < 1"),
        };
        if v > budget {
            return Err(Error::InvariantViolation(format!(
                "I_{q}(1 - {eps}) = {v} exceeds log {q} + 0.05 = {budget}"
            )));
        }
        last = v;
    }
    Ok(last)
}

/// The four sampled curves behind the rate-function figure, in the order
/// independent-case, q = 2, 3, 4.
pub struct Figure1 {
    pub x_grid: Vec<f64>,
    pub tilde: RateCurve,
    pub q_curves: [(u64, RateCurve); 3],
}

/// Sample `I~, I_2, I_3, I_4` on a grid inside `(-1, 1)`.
pub fn figure1_curves(x_grid: &[f64]) -> Result<Figure1> {
    if x_grid.iter().any(|x| !x.is_finite() || x.abs() >= 1.0) {
        return Err(Error::InvalidArgument(
            "figure grid must lie inside (-1, 1)".into(),
        ));
    }
    let tilde = RateCurve {
        samples: x_grid
            .iter()
            .map(|&x| Ok((x, rate_tilde(x)?)))
            .collect::<Result<_>>()?,
    };
    let mut q_curves = Vec::new();
    for q in [2u64, 3, 4] {
        let cache = LambdaCache::new(q);
        let samples = x_grid
            .iter()
            .map(|&x| Ok((x, rate_q_cached(&cache, x)?)))
            .collect::<Result<_>>()?;
        q_curves.push((q, RateCurve { samples }));
    }
    Ok(Figure1 {
        x_grid: x_grid.to_vec(),
        tilde,
        q_curves: q_curves.try_into().map_err(|_| ()).expect("three curves"),
    })
}

fn rate_str(v: &RateValue) -> String {
    match v {
        RateValue::Finite(r) => format!("{:.9}", r.value),
        RateValue::Infinite => "inf".into(),
    }
}

/// CSV with columns `x, I_tilde, I_2, I_3, I_4` and an `inf` sentinel.
pub fn figure1_csv(fig: &Figure1) -> String {
    let mut out = String::from("x,I_tilde,I_2,I_3,I_4\n");
    for (i, &x) in fig.x_grid.iter().enumerate() {
        out.push_str(&format!(
            "{x},{},{},{},{}\n",
            rate_str(&fig.tilde.samples[i].1),
            rate_str(&fig.q_curves[0].1.samples[i].1),
            rate_str(&fig.q_curves[1].1.samples[i].1),
            rate_str(&fig.q_curves[2].1.samples[i].1),
        ));
    }
    out
}

/// Self-contained SVG rendering with fixed viewport and the conventional
/// color assignment: independent case green, then blue, red, orange for
/// q = 2, 3, 4.
pub fn figure1_svg(fig: &Figure1) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const PAD: f64 = 50.0;
    let xs = &fig.x_grid;
    let x_min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut y_max: f64 = 0.0;
    let mut collect = |c: &RateCurve| {
        for (_, v) in &c.samples {
            if let RateValue::Finite(r) = v {
                y_max = y_max.max(r.value);
            }
        }
    };
    collect(&fig.tilde);
    for (_, c) in &fig.q_curves {
        collect(c);
    }
    if y_max <= 0.0 {
        y_max = 1.0;
    }
    let sx = |x: f64| PAD + (x - x_min) / (x_max - x_min) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y / y_max) * (H - 2.0 * PAD);

    let polyline = |curve: &RateCurve, color: &str, label: &str| -> String {
        let pts: Vec<String> = curve
            .samples
            .iter()
            .filter_map(|(x, v)| match v {
                RateValue::Finite(r) => Some(format!("{:.2},{:.2}", sx(*x), sy(r.value))),
                RateValue::Infinite => None,
            })
            .collect();
        format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\" \
             points=\"{}\"><title>{label}</title></polyline>\n",
            pts.join(" ")
        )
    };

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" \
         width=\"{W}\" height=\"{H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <line x1=\"{PAD}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{}\" y1=\"{PAD}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - PAD,
        W - PAD,
        H - PAD,
        sx(0.0),
        sx(0.0),
        H - PAD,
    );
    svg.push_str(&polyline(&fig.tilde, "green", "I_tilde"));
    let colors = ["blue", "red", "orange"];
    for ((q, c), color) in fig.q_curves.iter().zip(colors) {
        svg.push_str(&polyline(c, color, &format!("I_{q}")));
    }
    let legend = [
        ("green", "I~ (independent)"),
        ("blue", "I_2"),
        ("red", "I_3"),
        ("orange", "I_4"),
    ];
    for (i, (color, label)) in legend.iter().enumerate() {
        let y = PAD + 18.0 * i as f64;
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"3\" fill=\"{color}\"/>\n\
             <text x=\"{}\" y=\"{}\" font-size=\"12\" font-family=\"sans-serif\">{label}</text>\n",
            PAD + 6.0,
            y,
            PAD + 24.0,
            y + 5.0,
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{lambda_taylor, tilde_lambda_taylor};
    use crate::series::from_fracs;

    #[test]
    fn legendre_at_zero_is_zero() {
        let r = legendre_numeric(lambda_tilde, 0.0).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.theta, 0.0);
    }

    #[test]
    fn legendre_tilde_half_matches_grid_supremum() {
        // Independent oracle: dense theta-grid supremum at step 1e-4.
        let x = 0.5;
        let mut best = 0.0f64;
        let mut t = 0.0;
        while t <= 8.0 {
            best = best.max(t * x - lambda_tilde(t).unwrap());
            t += 1e-4;
        }
        assert!((best - 0.26828).abs() < 5e-4, "grid oracle {best}");
        let r = legendre_numeric(lambda_tilde, x).unwrap();
        assert!((r.value - best).abs() < 5e-4, "{} vs {best}", r.value);
        assert!(!r.saturated);
    }

    #[test]
    fn legendre_tilde_is_even() {
        let a = legendre_numeric(lambda_tilde, 0.3).unwrap();
        let b = legendre_numeric(lambda_tilde, -0.3).unwrap();
        assert!((a.value - b.value).abs() < 1e-10);
        assert!((a.theta + b.theta).abs() < 1e-7);
    }

    #[test]
    fn legendre_saturates_near_one() {
        // Lambda~'(theta) = I1/I0 < 1, and at theta = 64 it is still
        // about 1 - 1/128, so x = 0.9999 cannot be bracketed.
        let r = legendre_numeric(lambda_tilde, 0.9999).unwrap();
        assert!(r.saturated);
        assert_eq!(r.theta, THETA_MAX);
    }

    #[test]
    fn rate_taylor_reproduces_tilde_expansion() {
        let i = rate_taylor(&tilde_lambda_taylor(12).unwrap()).unwrap();
        let expect = from_fracs(&[
            (0, 1),
            (0, 1),
            (1, 1),
            (0, 1),
            (1, 4),
            (0, 1),
            (5, 36),
            (0, 1),
            (19, 192),
            (0, 1),
            (143, 1800),
            (0, 1),
            (1769, 25920),
        ]);
        assert_eq!(i.coeffs()[..13], expect.coeffs()[..13]);
    }

    #[test]
    fn rate_taylor_reproduces_i2_expansion() {
        let i = rate_taylor(&lambda_taylor(2, 11).unwrap()).unwrap();
        let expect = from_fracs(&[
            (0, 1),
            (0, 1),
            (1, 1),
            (-1, 1),
            (3, 2),
            (-13, 6),
            (29, 9),
            (-23, 5),
            (1127, 180),
            (-29083, 3780),
            (12077, 1575),
        ]);
        assert_eq!(i.coeffs()[..11], expect.coeffs()[..11]);
    }

    #[test]
    fn rate_taylor_reproduces_i4_expansion() {
        let i = rate_taylor(&lambda_taylor(4, 6).unwrap()).unwrap();
        let expect = from_fracs(&[
            (0, 1),
            (0, 1),
            (1, 1),
            (0, 1),
            (1, 4),
            (-1, 12),
            (5, 36),
        ]);
        assert_eq!(i.coeffs()[..7], expect.coeffs()[..7]);
    }

    #[test]
    fn rate_taylor_rejects_bad_series() {
        assert!(rate_taylor(&from_fracs(&[(1, 1), (0, 1), (1, 4)])).is_err());
        assert!(rate_taylor(&from_fracs(&[(0, 1), (0, 1), (-1, 4)])).is_err());
        assert!(rate_taylor(&from_fracs(&[(0, 1), (0, 1)])).is_err());
    }

    #[test]
    fn rate_sentinels_outside_unit_interval() {
        assert!(rate_tilde(1.5).unwrap().is_infinite());
        assert!(rate_q(2, -1.01).unwrap().is_infinite());
        assert!(!rate_tilde(0.99).unwrap().is_infinite());
    }

    #[test]
    fn tilde_rate_grows_toward_endpoint() {
        // I~(1 - eps) grows without bound as eps -> 0.
        let vals: Vec<f64> = [0.05f64, 0.02, 0.01]
            .iter()
            .map(|&e| rate_tilde(1.0 - e).unwrap().finite())
            .collect();
        assert!(vals[0] < vals[1] && vals[1] < vals[2], "{vals:?}");
    }

    #[test]
    fn numeric_matches_exact_taylor_for_small_x() {
        let taylor = rate_taylor(&lambda_taylor(2, 11).unwrap()).unwrap();
        for x in [-0.3f64, -0.15, 0.1, 0.25, 0.3] {
            let numeric = rate_q(2, x).unwrap().finite();
            let exact = taylor.eval_f64(x);
            assert!(
                (numeric - exact).abs() < 2e-3,
                "x={x}: numeric {numeric} vs taylor {exact}"
            );
        }
    }
}
