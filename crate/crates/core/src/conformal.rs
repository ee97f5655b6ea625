//! Conformal factors Omega(x) multiplying the (t, x) block of the metric.
//!
//! Two analytic families are supported, `x^{2n}` polynomials and powers of
//! `cosh`, plus a tabulated factor interpolated by a natural cubic spline.
//! Every factor is validated at construction to be strictly positive.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Relative tolerance of every adaptive quadrature in this module.
pub const QUAD_RTOL: f64 = 1e-12;

/// Required agreement between quadrature and a known closed form of the
/// reciprocal integral.
pub const CLOSED_FORM_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Omega = omega * x^{2n} + c
    PolynomialEven { omega: f64, c: f64, n: u32 },
    /// Omega = cosh^n(alpha * x)
    CoshPower { alpha: f64, n: u32 },
    /// Samples of Omega on a strictly increasing grid.
    Tabulated { x: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Family", into = "Family")]
pub struct ConformalFactor {
    family: Family,
    spline: Option<Spline>,
}

impl TryFrom<Family> for ConformalFactor {
    type Error = Error;

    fn try_from(family: Family) -> Result<Self> {
        ConformalFactor::new(family)
    }
}

impl From<ConformalFactor> for Family {
    fn from(value: ConformalFactor) -> Self {
        value.family
    }
}

impl ConformalFactor {
    pub fn new(family: Family) -> Result<Self> {
        let spline = match &family {
            Family::PolynomialEven { omega, c, n } => {
                if !(omega.is_finite() && *omega > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "polynomial_even requires omega > 0, got {omega}"
                    )));
                }
                if !c.is_finite() {
                    return Err(Error::InvalidParameter(format!("c must be finite, got {c}")));
                }
                if *c <= 0.0 {
                    // the minimum of omega x^{2n} + c sits at x = 0
                    return Err(Error::NotNodeless { x: 0.0, value: *c });
                }
                if *n == 0 {
                    return Err(Error::InvalidParameter("n must be a positive integer".into()));
                }
                None
            }
            Family::CoshPower { alpha, n } => {
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "cosh_power requires alpha > 0, got {alpha}"
                    )));
                }
                if *n == 0 {
                    return Err(Error::InvalidParameter("n must be a positive integer".into()));
                }
                None
            }
            Family::Tabulated { x, values } => Some(Spline::new(x, values)?),
        };
        Ok(Self { family, spline })
    }

    pub fn polynomial_even(omega: f64, c: f64, n: u32) -> Result<Self> {
        Self::new(Family::PolynomialEven { omega, c, n })
    }

    pub fn cosh_power(alpha: f64, n: u32) -> Result<Self> {
        Self::new(Family::CoshPower { alpha, n })
    }

    pub fn tabulated(x: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(Family::Tabulated { x, values })
    }

    /// A constant factor Omega = `value` tabulated on `[lo, hi]`.
    pub fn constant(value: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::tabulated(vec![lo, 0.5 * (lo + hi), hi], vec![value; 3])
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self.family, Family::Tabulated { .. })
    }

    /// Interval on which the factor can be evaluated.
    pub fn domain(&self) -> (f64, f64) {
        match &self.spline {
            Some(s) => (s.x[0], s.x[s.x.len() - 1]),
            None => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn label(&self) -> String {
        match &self.family {
            Family::PolynomialEven { omega, c, n } => {
                format!("{omega}*x^{}+{c}", 2 * n)
            }
            Family::CoshPower { alpha, n } => format!("cosh^{n}({alpha}*x)"),
            Family::Tabulated { x, .. } => format!("tabulated[{} samples]", x.len()),
        }
    }

    /// Returns `(Omega(x), Omega'(x))`.
    pub fn evaluate(&self, x: f64) -> Result<(f64, f64)> {
        match &self.family {
            Family::PolynomialEven { omega, c, n } => {
                let n = *n as i32;
                let odd = x.powi(2 * n - 1);
                Ok((omega * odd * x + c, 2.0 * n as f64 * omega * odd))
            }
            Family::CoshPower { alpha, n } => {
                let ax = alpha * x;
                let ch = ax.cosh();
                let base = ch.powi(*n as i32 - 1);
                Ok((base * ch, *n as f64 * alpha * base * ax.sinh()))
            }
            Family::Tabulated { .. } => {
                let spline = self.spline.as_ref().expect("tabulated factor carries a spline");
                spline.evaluate(x)
            }
        }
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.evaluate(x).map(|(v, _)| v)
    }

    /// W(x) = integral of Omega from 0 to x.
    pub fn antiderivative(&self, x: f64) -> Result<f64> {
        match &self.family {
            Family::PolynomialEven { omega, c, n } => {
                let p = 2 * *n as i32 + 1;
                Ok(omega * x.powi(p) / p as f64 + c * x)
            }
            Family::CoshPower { alpha, n } => Ok(cosh_power_integral(*alpha, *n, x)),
            Family::Tabulated { .. } => {
                let (lo, hi) = self.domain();
                if x < lo || x > hi || 0.0 < lo || 0.0 > hi {
                    return Err(Error::OutOfHull { x, lo, hi });
                }
                let spline = self.spline.as_ref().expect("tabulated factor carries a spline");
                let est = quadrature::integrate(
                    |t| spline.evaluate(t).map(|(v, _)| v).unwrap_or(f64::NAN),
                    0.0,
                    x,
                    0.0,
                    QUAD_RTOL,
                )?;
                Ok(est.value)
            }
        }
    }

    /// Analytic value of the reciprocal integral over the real line, when known.
    pub fn closed_form_reciprocal_integral(&self) -> Option<f64> {
        match &self.family {
            Family::PolynomialEven { omega, c, n } => {
                // substitute x = a u with a^{2n} = c / omega
                let m = 2.0 * *n as f64;
                let a = (c / omega).powf(1.0 / m);
                let unit = (PI / *n as f64) / (PI / m).sin();
                Some(a / c * unit)
            }
            Family::CoshPower { alpha, n } => Some(sech_power_integral(*n) / alpha),
            Family::Tabulated { .. } => None,
        }
    }

    /// I = integral over the real line of dx / Omega(x), computed by adaptive
    /// quadrature. When a closed form is known the two must agree to
    /// [`CLOSED_FORM_RTOL`].
    pub fn reciprocal_integral(&self) -> Result<f64> {
        if !self.is_analytic() {
            let (lo, hi) = self.domain();
            return Err(Error::DivergentIntegral(format!(
                "tabulated factor is only known on [{lo}, {hi}]; its tails cannot be bounded"
            )));
        }
        let est = quadrature::integrate_real_line(
            |x| match self.value(x) {
                Ok(v) if v.is_infinite() => 0.0,
                Ok(v) => 1.0 / v,
                Err(_) => f64::NAN,
            },
            QUAD_RTOL,
        )
        .map_err(|e| match e {
            Error::QuadratureNonConvergence { .. } => Error::DivergentIntegral(e.to_string()),
            other => other,
        })?;
        if let Some(exact) = self.closed_form_reciprocal_integral() {
            let relative = (est.value - exact).abs() / exact.abs();
            if !(relative <= CLOSED_FORM_RTOL) {
                return Err(Error::QuadratureMismatch {
                    quadrature: est.value,
                    closed_form: exact,
                    relative,
                });
            }
        }
        Ok(est.value)
    }
}

/// The six factors whose normalization constants have simple closed
/// forms: `x^{2n} + 1` and `cosh^n x` for `n = 1, 2, 3`.
pub fn registry() -> Vec<ConformalFactor> {
    let mut out = Vec::with_capacity(6);
    for n in 1..=3 {
        out.push(ConformalFactor::polynomial_even(1.0, 1.0, n).expect("valid registry entry"));
    }
    for n in 1..=3 {
        out.push(ConformalFactor::cosh_power(1.0, n).expect("valid registry entry"));
    }
    out
}

// integral_0^x cosh^n(alpha t) dt via the reduction
// I_n = cosh^{n-1} sinh / (n alpha) + (n-1)/n I_{n-2}
fn cosh_power_integral(alpha: f64, n: u32, x: f64) -> f64 {
    let ax = alpha * x;
    let (ch, sh) = (ax.cosh(), ax.sinh());
    let (mut acc, start) = if n % 2 == 0 { (x, 2) } else { (sh / alpha, 3) };
    let mut k = start;
    while k <= n {
        let kf = k as f64;
        acc = ch.powi(k as i32 - 1) * sh / (kf * alpha) + (kf - 1.0) / kf * acc;
        k += 2;
    }
    acc
}

// integral over the real line of sech^n(t) dt: B_1 = pi, B_2 = 2,
// B_n = (n-2)/(n-1) B_{n-2}
fn sech_power_integral(n: u32) -> f64 {
    let (mut acc, start) = if n % 2 == 0 { (2.0, 4) } else { (PI, 3) };
    let mut k = start;
    while k <= n {
        let kf = k as f64;
        acc *= (kf - 2.0) / (kf - 1.0);
        k += 2;
    }
    acc
}

/// Natural cubic spline through strictly positive samples.
#[derive(Debug, Clone, PartialEq)]
struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
}

impl Spline {
    fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidParameter(format!(
                "tabulated factor has {} abscissae but {} values",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 3 {
            return Err(Error::InvalidParameter(
                "tabulated factor needs at least 3 samples".into(),
            ));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("tabulated samples must be finite".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "tabulated abscissae must be strictly increasing".into(),
            ));
        }
        if let Some(i) = y.iter().position(|&v| v <= 0.0) {
            return Err(Error::NotNodeless { x: x[i], value: y[i] });
        }

        // tridiagonal system for interior second derivatives (Thomas algorithm)
        let n = x.len();
        let mut m = vec![0.0; n];
        let mut c_prime = vec![0.0; n];
        let mut d_prime = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let a = h0;
            let b = 2.0 * (h0 + h1);
            let c = h1;
            let d = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            let denom = b - a * c_prime[i - 1];
            c_prime[i] = c / denom;
            d_prime[i] = (d - a * d_prime[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = d_prime[i] - c_prime[i] * m[i + 1];
        }
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    fn evaluate(&self, t: f64) -> Result<(f64, f64)> {
        let n = self.x.len();
        let (lo, hi) = (self.x[0], self.x[n - 1]);
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfHull { x: t, lo, hi });
        }
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let value = a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let deriv = (self.y[i + 1] - self.y[i]) / h
            + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        Ok((value, deriv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn poly(n: u32) -> ConformalFactor {
        ConformalFactor::polynomial_even(1.0, 1.0, n).unwrap()
    }

    fn cosh(n: u32) -> ConformalFactor {
        ConformalFactor::cosh_power(1.0, n).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(poly(1).evaluate(2.0).unwrap(), (5.0, 4.0));
        assert_eq!(cosh(3).evaluate(0.0).unwrap(), (1.0, 0.0));
        assert_eq!(poly(3).evaluate(1.0).unwrap(), (2.0, 6.0));
    }

    #[test]
    fn antiderivative_examples() {
        assert!((poly(1).antiderivative(1.0).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((cosh(1).antiderivative(1.0).unwrap() - 1f64.sinh()).abs() < 1e-15);
        for f in registry() {
            assert_eq!(f.antiderivative(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn cosh_antiderivative_matches_quadrature_for_higher_powers() {
        for n in 1..=7 {
            let f = ConformalFactor::cosh_power(0.7, n).unwrap();
            for &x in &[-2.5, 0.3, 1.9] {
                let q = quadrature::integrate(|t| f.value(t).unwrap(), 0.0, x, 0.0, 1e-12)
                    .unwrap()
                    .value;
                let w = f.antiderivative(x).unwrap();
                assert!((w - q).abs() < 1e-11 * q.abs().max(1.0), "n={n} x={x}: {w} vs {q}");
            }
        }
    }

    #[test]
    fn reciprocal_integral_examples() {
        let cases = [
            (poly(1), PI),
            (poly(2), PI / 2f64.sqrt()),
            (poly(3), 2.0 * PI / 3.0),
            (cosh(1), PI),
            (cosh(2), 2.0),
            (cosh(3), PI / 2.0),
        ];
        for (f, exact) in cases {
            let i = f.reciprocal_integral().unwrap();
            assert!((i - exact).abs() < 1e-10 * exact, "{}: {i} vs {exact}", f.label());
        }
    }

    #[test]
    fn scaled_families_match_closed_form() {
        let f = ConformalFactor::polynomial_even(2.5, 0.4, 2).unwrap();
        assert!(f.reciprocal_integral().is_ok());
        let f = ConformalFactor::cosh_power(1.7, 5).unwrap();
        assert!(f.reciprocal_integral().is_ok());
    }

    #[test]
    fn node_is_rejected() {
        assert!(matches!(
            ConformalFactor::polynomial_even(1.0, 0.0, 1),
            Err(Error::NotNodeless { .. })
        ));
        assert!(ConformalFactor::tabulated(vec![0.0, 1.0, 2.0], vec![1.0, -0.5, 1.0]).is_err());
        assert!(ConformalFactor::cosh_power(0.0, 1).is_err());
        assert!(ConformalFactor::polynomial_even(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn tabulated_out_of_hull_and_divergent() {
        let f = ConformalFactor::tabulated(vec![-1.0, 0.0, 1.0], vec![2.0, 1.0, 2.0]).unwrap();
        assert!(matches!(f.evaluate(1.5), Err(Error::OutOfHull { .. })));
        assert!(matches!(f.reciprocal_integral(), Err(Error::DivergentIntegral(_))));
    }

    #[test]
    fn spline_reproduces_smooth_factor() {
        let exact = poly(1);
        let xs: Vec<f64> = (0..=400).map(|i| -4.0 + 0.02 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| exact.value(x).unwrap()).collect();
        let tab = ConformalFactor::tabulated(xs, ys).unwrap();
        for &x in &[-3.3, -0.01, 0.0, 1.234, 3.9] {
            let (v, d) = tab.evaluate(x).unwrap();
            let (ve, de) = exact.evaluate(x).unwrap();
            assert!((v - ve).abs() < 1e-6);
            assert!((d - de).abs() < 1e-3);
        }
        let w = tab.antiderivative(1.0).unwrap();
        assert!((w - 4.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn constant_factor() {
        let f = ConformalFactor::constant(1.0, -3.0, 3.0).unwrap();
        let (v, d) = f.evaluate(0.7).unwrap();
        assert!((v - 1.0).abs() < 1e-15 && d.abs() < 1e-15);
    }

    #[test]
    fn antiderivative_derivative_is_omega() {
        let mut rng = StdRng::seed_from_u64(7);
        for f in registry() {
            for _ in 0..100 {
                let x: f64 = rng.random_range(-3.0..3.0);
                let h = 1e-5;
                let d = (f.antiderivative(x + h).unwrap() - f.antiderivative(x - h).unwrap())
                    / (2.0 * h);
                let v = f.value(x).unwrap();
                assert!((d - v).abs() < 1e-8 * v, "{} x={x}", f.label());
            }
        }
    }

    #[test]
    fn antiderivative_is_odd_and_increasing() {
        for f in registry() {
            let mut prev = f64::NEG_INFINITY;
            for i in -40..=40 {
                let x = i as f64 * 0.1;
                let w = f.antiderivative(x).unwrap();
                assert!(w > prev);
                prev = w;
                assert!((w + f.antiderivative(-x).unwrap()).abs() <= 1e-15 * w.abs().max(1.0));
            }
        }
    }

    #[test]
    fn serde_family_round_trip() {
        let f = ConformalFactor::cosh_power(1.0, 2).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"family":"cosh_power","alpha":1.0,"n":2}"#);
        let back: ConformalFactor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let bad = r#"{"family":"polynomial_even","omega":1.0,"c":0.0,"n":1}"#;
        assert!(serde_json::from_str::<ConformalFactor>(bad).is_err());
    }
}
