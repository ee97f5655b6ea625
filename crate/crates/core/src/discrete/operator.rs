use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::ConformalFactor;
use crate::error::{Error, Result};
use crate::geometry::{identity2, sigma1, sigma2, sigma3, Mat2c};
use crate::zeromode::{PhysicalParams, SpinorSolution};

use super::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Spinor fixed to zero at both end nodes; their rows are zero.
    Dirichlet,
    /// Wraparound stencil, node `n - 1` neighbours node `0`.
    Periodic,
}

/// Central-difference discretization of
/// `H = -i sigma_1 d/dx - sigma_2 k_y Omega + sigma_3 M Omega + k_v Omega`
/// on interleaved spinor samples (node-major, component-minor).
#[derive(Debug, Clone)]
pub struct DiracMatrix {
    grid: Grid,
    bc: Boundary,
    onsite: Vec<Mat2c>,
    // -i sigma_1 / (2h); the left neighbour carries the opposite sign
    hop: Mat2c,
}

pub fn assemble(
    params: &PhysicalParams,
    omega: &ConformalFactor,
    grid: &Grid,
    bc: Boundary,
) -> Result<DiracMatrix> {
    let local = sigma2() * Complex64::from(-params.ky)
        + sigma3() * Complex64::from(params.mass)
        + identity2() * Complex64::from(params.kv);
    let n = grid.n_points();
    let mut onsite = Vec::with_capacity(n);
    for i in 0..n {
        let w = omega.value(grid.node(i))?;
        if !w.is_finite() {
            return Err(Error::NonFinite { x: grid.node(i) });
        }
        onsite.push(local * Complex64::from(w));
    }
    let hop = sigma1() * Complex64::new(0.0, -1.0 / (2.0 * grid.spacing()));
    Ok(DiracMatrix {
        grid: *grid,
        bc,
        onsite,
        hop,
    })
}

impl DiracMatrix {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn boundary(&self) -> Boundary {
        self.bc
    }

    pub fn dim(&self) -> usize {
        2 * self.grid.n_points()
    }

    fn is_constrained(&self, node: usize) -> bool {
        self.bc == Boundary::Dirichlet && (node == 0 || node + 1 == self.grid.n_points())
    }

    /// Node indices that carry unknowns: all nodes for periodic, the interior
    /// for Dirichlet.
    pub fn free_nodes(&self) -> std::ops::Range<usize> {
        match self.bc {
            Boundary::Dirichlet => 1..self.grid.n_points() - 1,
            Boundary::Periodic => 0..self.grid.n_points(),
        }
    }

    /// Nonzero 2x2 blocks of row `node` as `(column node, block)` pairs.
    pub fn row_blocks(&self, node: usize) -> Vec<(usize, Mat2c)> {
        let n = self.grid.n_points();
        if self.is_constrained(node) {
            return Vec::new();
        }
        let mut out = vec![(node, self.onsite[node])];
        let right = if node + 1 < n {
            Some(node + 1)
        } else if self.bc == Boundary::Periodic {
            Some(0)
        } else {
            None
        };
        let left = if node > 0 {
            Some(node - 1)
        } else if self.bc == Boundary::Periodic {
            Some(n - 1)
        } else {
            None
        };
        if let Some(r) = right {
            out.push((r, self.hop));
        }
        if let Some(l) = left {
            out.push((l, -self.hop));
        }
        out
    }

    /// Matrix-free product `H v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim(), "vector length must match the operator");
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for node in 0..self.grid.n_points() {
            let mut acc = [Complex64::new(0.0, 0.0); 2];
            for (col, block) in self.row_blocks(node) {
                let (a, b) = (v[2 * col], v[2 * col + 1]);
                acc[0] += block[(0, 0)] * a + block[(0, 1)] * b;
                acc[1] += block[(1, 0)] * a + block[(1, 1)] * b;
            }
            out[2 * node] = acc[0];
            out[2 * node + 1] = acc[1];
        }
        out
    }

    pub fn to_dense(&self) -> Mat<Complex64> {
        let mut m = Mat::<Complex64>::zeros(self.dim(), self.dim());
        for node in 0..self.grid.n_points() {
            for (col, block) in self.row_blocks(node) {
                for r in 0..2 {
                    for c in 0..2 {
                        m[(2 * node + r, 2 * col + c)] += block[(r, c)];
                    }
                }
            }
        }
        m
    }

    /// Dense matrix restricted to the unknowns of [`Self::free_nodes`].
    pub fn free_block(&self) -> Mat<Complex64> {
        let full = self.to_dense();
        let nodes = self.free_nodes();
        let offset = 2 * nodes.start;
        let size = 2 * nodes.len();
        Mat::from_fn(size, size, |i, j| full[(offset + i, offset + j)])
    }
}

/// Relative interior residual of a sampled solution of the zero-energy
/// equation: `max_i |(H psi)_i| / max_i |psi_i|` over interior nodes `i`.
///
/// The grid must resolve the phase, `h |lambda| max Omega <= 0.5`.
pub fn residual(
    params: &PhysicalParams,
    omega: &ConformalFactor,
    grid: &Grid,
    mode: &SpinorSolution,
) -> Result<f64> {
    residual_with_boundary(params, omega, grid, mode, Boundary::Dirichlet)
}

pub fn residual_with_boundary(
    params: &PhysicalParams,
    omega: &ConformalFactor,
    grid: &Grid,
    mode: &SpinorSolution,
    bc: Boundary,
) -> Result<f64> {
    let resolution = grid.spacing() * mode.lambda.norm() * grid.max_omega(omega)?;
    if resolution > 0.5 {
        return Err(Error::UnderResolved(resolution));
    }
    let h = assemble(params, omega, grid, bc)?;
    let n = grid.n_points();
    let mut psi = Vec::with_capacity(2 * n);
    for x in grid.nodes() {
        let s = mode.reduced(x)?;
        psi.extend_from_slice(&s);
    }
    let out = h.apply(&psi);
    let pointwise = |v: &[Complex64], i: usize| (v[2 * i].norm_sqr() + v[2 * i + 1].norm_sqr()).sqrt();
    let num = (1..n - 1).map(|i| pointwise(&out, i)).fold(0.0, f64::max);
    let den = (0..n).map(|i| pointwise(&psi, i)).fold(0.0, f64::max);
    Ok(num / den)
}
