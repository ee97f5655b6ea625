//! Analytic zero-energy states.
//!
//! With `V(x) = k_v Omega(x)` and `E = 0` the reduced spinor obeys
//! `psi' = -A Omega psi` with `A = sigma_3 k_y + sigma_2 M + i sigma_1 k_v`, so
//! `psi = chi exp(-lambda W(x))` for every eigenpair `A chi = lambda chi`.
//! The full state is `Psi = N Omega^{-1/2} e^{i k_y y} chi phi(x)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::ConformalFactor;
use crate::error::{Error, Result};
use crate::geometry::{sigma1, sigma2, sigma3, Mat2c};

/// Relative slack used to decide that `k_v^2 - k_y^2 - M^2` vanishes.
/// Values this close to the boundary are treated as lying on it.
pub const BOUNDARY_RTOL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl TryFrom<i8> for Branch {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Branch::Plus),
            -1 => Ok(Branch::Minus),
            other => Err(format!("sigma must be +1 or -1, got {other}")),
        }
    }
}

impl From<Branch> for i8 {
    fn from(b: Branch) -> i8 {
        match b {
            Branch::Plus => 1,
            Branch::Minus => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Mass M >= 0.
    pub mass: f64,
    /// Scalar coupling, V(x) = kv * Omega(x).
    pub kv: f64,
    /// Transverse momentum.
    pub ky: f64,
    /// Strip length in y.
    pub length: f64,
    pub sigma: Branch,
}

impl PhysicalParams {
    pub fn new(mass: f64, kv: f64, ky: f64, length: f64, sigma: Branch) -> Result<Self> {
        let p = Self {
            mass,
            kv,
            ky,
            length,
            sigma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass", self.mass),
            ("kv", self.kv),
            ("ky", self.ky),
            ("length", self.length),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        if self.mass < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mass must be non-negative, got {}",
                self.mass
            )));
        }
        if self.length <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "length must be positive, got {}",
                self.length
            )));
        }
        Ok(())
    }

    pub fn with_ky(self, ky: f64) -> Self {
        Self { ky, ..self }
    }

    pub fn with_sigma(self, sigma: Branch) -> Self {
        Self { sigma, ..self }
    }

    /// `k_v^2 - k_y^2 - M^2`, snapped to zero within [`BOUNDARY_RTOL`].
    pub fn discriminant(&self) -> f64 {
        let (kv2, ky2, m2) = (self.kv * self.kv, self.ky * self.ky, self.mass * self.mass);
        let d = kv2 - ky2 - m2;
        if d.abs() <= BOUNDARY_RTOL * (kv2 + ky2 + m2) {
            0.0
        } else {
            d
        }
    }
}

/// `A = sigma_3 k_y + sigma_2 M + i sigma_1 k_v`.
pub fn spinor_matrix(params: &PhysicalParams) -> Mat2c {
    sigma3() * Complex64::from(params.ky)
        + sigma2() * Complex64::from(params.mass)
        + sigma1() * (I * params.kv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiForm {
    /// `chi = (1, i (lambda - k_y) / (M - k_v))`
    Standard,
    /// `chi = (1, i (M + k_v) / (lambda + k_y))`, from the second row of
    /// `A - lambda`; required when `M = k_v`.
    SecondRow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorEigenpair {
    pub lambda: Complex64,
    pub chi: [Complex64; 2],
    pub form: ChiForm,
}

/// `lambda_sigma = sigma * sqrt(k_y^2 + M^2 - k_v^2)` on the principal branch,
/// so admissible parameters give `lambda_sigma = i sigma sqrt(k_v^2 - k_y^2 - M^2)`.
pub fn eigenvalue(params: &PhysicalParams) -> Complex64 {
    let d = params.discriminant();
    let s = if d >= 0.0 {
        Complex64::new(0.0, d.sqrt())
    } else {
        Complex64::new((-d).sqrt(), 0.0)
    };
    s * params.sigma.sign()
}

/// Eigenvector with `chi_1 = 1`, read off the row of `A - lambda` with the
/// larger norm. The two rows give the same `chi_2` algebraically, but the
/// first cancels when `lambda ~ k_y` and the second when `lambda ~ -k_y`.
pub fn spinor_eigenpair(params: &PhysicalParams) -> Result<SpinorEigenpair> {
    let lambda = eigenvalue(params);
    let (m, kv, ky) = (params.mass, params.kv, params.ky);
    let first = (lambda - ky).norm_sqr() + (kv - m) * (kv - m);
    let second = (lambda + ky).norm_sqr() + (m + kv) * (m + kv);
    // first row: (k_y - lambda) chi_1 + i (k_v - M) chi_2 = 0
    let standard = || SpinorEigenpair {
        lambda,
        chi: [Complex64::from(1.0), I * (lambda - ky) / (m - kv)],
        form: ChiForm::Standard,
    };
    // second row: i (M + k_v) chi_1 - (k_y + lambda) chi_2 = 0
    let top = lambda + ky;
    let second_row = || SpinorEigenpair {
        lambda,
        chi: [Complex64::from(1.0), I * (m + kv) / top],
        form: ChiForm::SecondRow,
    };
    let standard_ok = m != kv;
    let second_ok = top.norm() != 0.0;
    match (standard_ok, second_ok) {
        (true, true) if first >= second => Ok(standard()),
        (_, true) => Ok(second_row()),
        (true, false) => Ok(standard()),
        (false, false) => Err(Error::Degenerate(format!(
            "both eigenvector forms are singular at M = k_v = {m}, k_y = {ky}"
        ))),
    }
}

/// `||A chi - lambda chi||_inf`.
pub fn eigen_residual(params: &PhysicalParams, pair: &SpinorEigenpair) -> f64 {
    let a = spinor_matrix(params);
    let chi = nalgebra::Vector2::new(pair.chi[0], pair.chi[1]);
    (a * chi - chi * pair.lambda)
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
}

/// Zero modes exist iff `k_v^2 >= k_y^2 + M^2` (boundary included).
pub fn admissible(params: &PhysicalParams) -> bool {
    params.discriminant() >= 0.0
}

fn admissible_or_err(params: &PhysicalParams) -> Result<()> {
    if admissible(params) {
        Ok(())
    } else {
        Err(Error::Inadmissible {
            kv2: params.kv * params.kv,
            rhs: params.ky * params.ky + params.mass * params.mass,
        })
    }
}

/// `sqrt(k_v^2 - M^2)`, or `None` when negative.
fn ky_bound(params: &PhysicalParams) -> Option<f64> {
    let (kv2, m2) = (params.kv * params.kv, params.mass * params.mass);
    let d = kv2 - m2;
    if d.abs() <= BOUNDARY_RTOL * (kv2 + m2) {
        Some(0.0)
    } else if d > 0.0 {
        Some(d.sqrt())
    } else {
        None
    }
}

/// Closed interval of transverse momenta admitting zero modes.
pub fn ky_range(params: &PhysicalParams) -> Result<(f64, f64)> {
    match ky_bound(params) {
        Some(b) => Ok((-b, b)),
        None => Err(Error::EmptyRange {
            kv2: params.kv * params.kv,
            m2: params.mass * params.mass,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Degeneracy {
    pub count: u64,
    /// Set when `k_v^2 < M^2`, in which case `count` is zero.
    pub empty_range: bool,
}

/// `2 floor(L sqrt(k_v^2 - M^2) / 2 pi) + 1` under periodic boundary
/// conditions in y.
pub fn degeneracy(params: &PhysicalParams) -> Degeneracy {
    let Some(bound) = ky_bound(params) else {
        return Degeneracy {
            count: 0,
            empty_range: true,
        };
    };
    let ratio = params.length * bound / (2.0 * PI);
    let nearest = ratio.round();
    // an exactly integral ratio may land one ulp below the integer
    let m_max = if (ratio - nearest).abs() <= 4.0 * f64::EPSILON * nearest.max(1.0) {
        nearest
    } else {
        ratio.floor()
    };
    Degeneracy {
        count: 2 * m_max as u64 + 1,
        empty_range: false,
    }
}

/// `|chi|^2 = 2 k_v / (k_v - M)` for admissible parameters.
pub fn chi_norm_sq(params: &PhysicalParams) -> Result<f64> {
    if params.kv <= params.mass {
        return Err(Error::Degenerate(format!(
            "normalization requires k_v > M, got k_v = {}, M = {}",
            params.kv, params.mass
        )));
    }
    Ok(2.0 * params.kv / (params.kv - params.mass))
}

/// `N = [|chi|^2 L I]^{-1/2}` where I is the quadrature value of the integral
/// of `1/Omega`. This enforces unit norm under the measure `dx dy Omega(x)`
/// with density `Omega^{-1} Psi^dagger Psi`.
pub fn normalize(params: &PhysicalParams, omega: &ConformalFactor) -> Result<f64> {
    params.validate()?;
    admissible_or_err(params)?;
    let chi2 = chi_norm_sq(params)?;
    let integral = omega.reciprocal_integral()?;
    Ok((chi2 * params.length * integral).powf(-0.5))
}

/// `P(x) = [Omega(x) I]^{-1}`, the scaled density that integrates to one over x.
pub fn probability_density(
    params: &PhysicalParams,
    omega: &ConformalFactor,
    x: f64,
) -> Result<f64> {
    params.validate()?;
    admissible_or_err(params)?;
    chi_norm_sq(params)?;
    let integral = omega.reciprocal_integral()?;
    Ok(1.0 / (omega.value(x)? * integral))
}

/// Formal solution `chi exp(-lambda W(x))` of the reduced equation. It
/// satisfies the ODE for any parameters; only admissible ones normalize.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorSolution {
    pub params: PhysicalParams,
    pub omega: ConformalFactor,
    pub lambda: Complex64,
    pub chi: [Complex64; 2],
}

impl SpinorSolution {
    pub fn new(params: PhysicalParams, omega: ConformalFactor) -> Result<Self> {
        params.validate()?;
        let pair = spinor_eigenpair(&params)?;
        Ok(Self {
            params,
            omega,
            lambda: pair.lambda,
            chi: pair.chi,
        })
    }

    /// `phi(x) = exp(-lambda W(x))` with `W(0) = 0`.
    pub fn phase(&self, x: f64) -> Result<Complex64> {
        let w = self.omega.antiderivative(x)?;
        Ok((-self.lambda * w).exp())
    }

    /// Reduced spinor `psi(x) = chi phi(x)`.
    pub fn reduced(&self, x: f64) -> Result<[Complex64; 2]> {
        let p = self.phase(x)?;
        Ok([self.chi[0] * p, self.chi[1] * p])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMode {
    solution: SpinorSolution,
    norm_constant: f64,
    reciprocal_integral: f64,
}

impl ZeroMode {
    pub fn solution(&self) -> &SpinorSolution {
        &self.solution
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.solution.params
    }

    pub fn omega(&self) -> &ConformalFactor {
        &self.solution.omega
    }

    pub fn lambda(&self) -> Complex64 {
        self.solution.lambda
    }

    pub fn chi(&self) -> [Complex64; 2] {
        self.solution.chi
    }

    pub fn norm_constant(&self) -> f64 {
        self.norm_constant
    }

    pub fn reciprocal_integral(&self) -> f64 {
        self.reciprocal_integral
    }

    pub fn phase(&self, x: f64) -> Result<Complex64> {
        self.solution.phase(x)
    }

    /// `Psi(x, y) = N Omega^{-1/2} e^{i k_y y} chi phi(x)` (time factor is 1 at E = 0).
    pub fn psi(&self, x: f64, y: f64) -> Result<[Complex64; 2]> {
        let w = self.solution.omega.value(x)?;
        let scale = Complex64::from_polar(self.norm_constant / w.sqrt(), self.params().ky * y);
        let r = self.solution.reduced(x)?;
        Ok([r[0] * scale, r[1] * scale])
    }

    /// `P(x) = [Omega(x) I]^{-1}`.
    pub fn density(&self, x: f64) -> Result<f64> {
        Ok(1.0 / (self.solution.omega.value(x)? * self.reciprocal_integral))
    }
}

pub fn build_zero_mode(params: &PhysicalParams, omega: &ConformalFactor) -> Result<ZeroMode> {
    params.validate()?;
    admissible_or_err(params)?;
    let solution = SpinorSolution::new(*params, omega.clone())?;
    let chi2 = chi_norm_sq(params)?;
    let integral = omega.reciprocal_integral()?;
    Ok(ZeroMode {
        solution,
        norm_constant: (chi2 * params.length * integral).powf(-0.5),
        reciprocal_integral: integral,
    })
}
