//! Frame fields, connections and gamma matrices for the line element
//! `ds^2 = Omega^2(x) (dt^2 - dx^2) - dy^2`.
//!
//! Coordinates are ordered `(t, x, y) = (0, 1, 2)`. Rank-3 arrays are stored
//! as `[upper][lower1][lower2]`, so `christoffels.get(0, 0, 1)` is
//! `Gamma^0_{01}` and `spin_connection.get(0, 1, 0)` is `omega^0_{1 0}`.
//!
//! The Clifford algebra is taken as `{gamma^mu, gamma^nu} = 2 g^{mu nu}`, the
//! normalization under which `gamma^mu = gamma_bar^a E_a^mu` holds with flat
//! matrices obeying `{gamma_bar^a, gamma_bar^b} = 2 eta^{ab}`.

use nalgebra::{Matrix2, Matrix3};
use num_complex::Complex64;

use crate::conformal::ConformalFactor;
use crate::error::{Error, Result};

pub type Mat2c = Matrix2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity2() -> Mat2c {
    Mat2c::identity()
}

pub fn sigma1() -> Mat2c {
    Mat2c::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma2() -> Mat2c {
    Mat2c::new(ZERO, -I, I, ZERO)
}

pub fn sigma3() -> Mat2c {
    Mat2c::new(ONE, ZERO, ZERO, -ONE)
}

/// Flat gamma matrices `(sigma_3, i sigma_2, i sigma_1)`.
pub fn flat_gammas() -> [Mat2c; 3] {
    [sigma3(), sigma2() * I, sigma1() * I]
}

/// Minkowski metric `eta = diag(1, -1, -1)`.
pub fn eta() -> Matrix3<f64> {
    Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, -1.0, -1.0))
}

pub fn anticommutator(a: &Mat2c, b: &Mat2c) -> Mat2c {
    a * b + b * a
}

pub fn commutator(a: &Mat2c, b: &Mat2c) -> Mat2c {
    a * b - b * a
}

/// Real rank-3 array indexed `[upper][lower1][lower2]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Rank3 {
    data: [[[f64; 3]; 3]; 3],
}

impl Rank3 {
    pub fn zeros() -> Self {
        Self::default()
    }

    pub fn get(&self, upper: usize, lower1: usize, lower2: usize) -> f64 {
        self.data[upper][lower1][lower2]
    }

    pub fn set(&mut self, upper: usize, lower1: usize, lower2: usize, value: f64) {
        self.data[upper][lower1][lower2] = value;
    }

    pub fn max_abs_diff(&self, other: &Rank3) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    worst = worst.max((self.data[a][b][c] - other.data[a][b][c]).abs());
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Rank3::zeros())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryBundle {
    pub x: f64,
    pub omega: f64,
    pub omega_prime: f64,
    /// `g_{mu nu}`
    pub metric: Matrix3<f64>,
    /// `e^a_mu`, row a, column mu
    pub vielbein: Matrix3<f64>,
    /// `E_a^mu`, row a, column mu
    pub inverse_vielbein: Matrix3<f64>,
    /// `Gamma^nu_{sigma mu}`
    pub christoffels: Rank3,
    /// `omega^a_{b mu}`
    pub spin_connection: Rank3,
    pub gamma_flat: [Mat2c; 3],
    pub gamma_curved: [Mat2c; 3],
    /// `Gamma_mu`
    pub spinor_connection: [Mat2c; 3],
}

fn checked_omega(omega: &ConformalFactor, x: f64) -> Result<(f64, f64)> {
    let (v, d) = omega.evaluate(x)?;
    if !v.is_finite() || !d.is_finite() {
        return Err(Error::NonFinite { x });
    }
    if v == 0.0 {
        return Err(Error::DegenerateMetric { x, value: v });
    }
    Ok((v, d))
}

pub fn metric(omega_value: f64) -> Matrix3<f64> {
    let o2 = omega_value * omega_value;
    Matrix3::from_diagonal(&nalgebra::Vector3::new(o2, -o2, -1.0))
}

/// Populates every geometric object at `x` from the closed forms.
pub fn build_geometry(omega: &ConformalFactor, x: f64) -> Result<GeometryBundle> {
    let (w, dw) = checked_omega(omega, x)?;
    let ratio = dw / w;

    let vielbein = Matrix3::from_diagonal(&nalgebra::Vector3::new(w, w, 1.0));
    let inverse_vielbein = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0 / w, 1.0 / w, 1.0));

    let mut christoffels = Rank3::zeros();
    christoffels.set(0, 0, 1, ratio);
    christoffels.set(0, 1, 0, ratio);
    christoffels.set(1, 0, 0, ratio);
    christoffels.set(1, 1, 1, ratio);

    let mut spin_connection = Rank3::zeros();
    spin_connection.set(0, 1, 0, ratio);
    spin_connection.set(1, 0, 0, ratio);

    let gamma_flat = flat_gammas();
    let gamma_curved = [
        gamma_flat[0] / Complex64::from(w),
        gamma_flat[1] / Complex64::from(w),
        gamma_flat[2],
    ];
    let gamma0 = commutator(&gamma_flat[0], &gamma_flat[1]) * Complex64::from(0.25 * ratio);
    let spinor_connection = [gamma0, Mat2c::zeros(), Mat2c::zeros()];

    Ok(GeometryBundle {
        x,
        omega: w,
        omega_prime: dw,
        metric: metric(w),
        vielbein,
        inverse_vielbein,
        christoffels,
        spin_connection,
        gamma_flat,
        gamma_curved,
        spinor_connection,
    })
}

/// Default step for the finite-difference oracles.
pub fn default_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

/// Christoffel symbols from central differences of the metric,
/// `Gamma^nu_{sigma mu} = 1/2 g^{nu rho} (d_sigma g_{rho mu} + d_mu g_{rho sigma} - d_rho g_{sigma mu})`.
/// Only `x` derivatives are nonzero for this metric.
pub fn christoffel_oracle(omega: &ConformalFactor, x: f64, h: f64) -> Result<Rank3> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let (w0, _) = checked_omega(omega, x)?;
    let (wp, _) = checked_omega(omega, x + h)?;
    let (wm, _) = checked_omega(omega, x - h)?;
    let g = metric(w0);
    let g_inv = g
        .try_inverse()
        .ok_or(Error::DegenerateMetric { x, value: w0 })?;
    let dg_dx = (metric(wp) - metric(wm)) / (2.0 * h);
    let dg = |coord: usize| -> Matrix3<f64> {
        if coord == 1 {
            dg_dx
        } else {
            Matrix3::zeros()
        }
    };

    let mut out = Rank3::zeros();
    for nu in 0..3 {
        for s in 0..3 {
            for mu in 0..3 {
                let mut acc = 0.0;
                for rho in 0..3 {
                    let term = dg(s)[(rho, mu)] + dg(mu)[(rho, s)] - dg(rho)[(s, mu)];
                    acc += 0.5 * g_inv[(nu, rho)] * term;
                }
                out.set(nu, s, mu, acc);
            }
        }
    }
    Ok(out)
}

/// Spin connection `omega^a_{b mu} = e^a_nu (d_mu E_b^nu + Gamma^nu_{sigma mu} E_b^sigma)`
/// with the inverse-vielbein derivative by central differences and the
/// Christoffels from [`christoffel_oracle`].
pub fn spin_connection_oracle(omega: &ConformalFactor, x: f64, h: f64) -> Result<Rank3> {
    let christoffels = christoffel_oracle(omega, x, h)?;
    let (w0, _) = checked_omega(omega, x)?;
    let (wp, _) = checked_omega(omega, x + h)?;
    let (wm, _) = checked_omega(omega, x - h)?;
    let inv = |w: f64| Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0 / w, 1.0 / w, 1.0));
    let e = Matrix3::from_diagonal(&nalgebra::Vector3::new(w0, w0, 1.0));
    let e_inv = inv(w0);
    let de_inv_dx = (inv(wp) - inv(wm)) / (2.0 * h);

    let mut out = Rank3::zeros();
    for a in 0..3 {
        for b in 0..3 {
            for mu in 0..3 {
                let mut acc = 0.0;
                for nu in 0..3 {
                    let mut cov = if mu == 1 { de_inv_dx[(b, nu)] } else { 0.0 };
                    for s in 0..3 {
                        cov += christoffels.get(nu, s, mu) * e_inv[(b, s)];
                    }
                    acc += e[(a, nu)] * cov;
                }
                out.set(a, b, mu, acc);
            }
        }
    }
    Ok(out)
}

/// Lowers the first index of `omega^a_{b mu}` with eta.
pub fn lowered_spin_connection(spin: &Rank3) -> Rank3 {
    let eta = eta();
    let mut out = Rank3::zeros();
    for a in 0..3 {
        for b in 0..3 {
            for mu in 0..3 {
                let v: f64 = (0..3).map(|c| eta[(a, c)] * spin.get(c, b, mu)).sum();
                out.set(a, b, mu, v);
            }
        }
    }
    out
}

/// `Gamma_mu = 1/8 omega_{ab mu} [gamma_bar^a, gamma_bar^b]`.
pub fn spinor_connection_general(spin: &Rank3) -> [Mat2c; 3] {
    let lowered = lowered_spin_connection(spin);
    let flat = flat_gammas();
    let mut out = [Mat2c::zeros(); 3];
    for (mu, slot) in out.iter_mut().enumerate() {
        for a in 0..3 {
            for b in 0..3 {
                let coeff = Complex64::from(0.125 * lowered.get(a, b, mu));
                *slot += commutator(&flat[a], &flat[b]) * coeff;
            }
        }
    }
    out
}

/// Maximum entrywise violation of `{gamma^mu, gamma^nu} = 2 g^{mu nu} I`.
pub fn verify_clifford(bundle: &GeometryBundle) -> f64 {
    let g_inv = match bundle.metric.try_inverse() {
        Some(m) => m,
        None => return f64::INFINITY,
    };
    clifford_violation(&bundle.gamma_curved, &g_inv)
}

/// Maximum entrywise violation of `{gamma^a, gamma^b} = 2 m^{ab} I` for an
/// arbitrary target matrix.
pub fn clifford_violation(gammas: &[Mat2c; 3], target: &Matrix3<f64>) -> f64 {
    let mut worst = 0.0f64;
    for mu in 0..3 {
        for nu in 0..3 {
            let diff = anticommutator(&gammas[mu], &gammas[nu])
                - identity2() * Complex64::from(2.0 * target[(mu, nu)]);
            for v in diff.iter() {
                worst = worst.max(v.norm());
            }
        }
    }
    worst
}

/// Largest deviation of `e^a_mu e^b_nu eta_ab` from `g_{mu nu}` and of
/// `E_a^mu E_b^nu g_{mu nu}` from `eta_ab`.
pub fn frame_violation(bundle: &GeometryBundle) -> f64 {
    let eta = eta();
    let rebuilt = bundle.vielbein.transpose() * eta * bundle.vielbein;
    let projected = bundle.inverse_vielbein * bundle.metric * bundle.inverse_vielbein.transpose();
    let a = (rebuilt - bundle.metric).abs().max();
    let b = (projected - eta).abs().max();
    a.max(b)
}

pub fn max_entry_diff(a: &Mat2c, b: &Mat2c) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}
