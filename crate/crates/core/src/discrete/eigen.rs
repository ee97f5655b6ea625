//! Smallest-modulus eigenvalues of the discretized operator.
//!
//! Small problems go through a dense Schur decomposition. Larger ones use
//! shift-invert Arnoldi: the operator is block tridiagonal (plus two corner
//! blocks when periodic), so after a folding permutation it is banded and
//! `(H - s)^{-1}` is applied through a banded LU factorization in O(n).

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::operator::{Boundary, DiracMatrix};

/// Largest free dimension handled by the dense path.
pub const DENSE_LIMIT: usize = 400;

const RITZ_RTOL: f64 = 1e-10;
const MAX_KRYLOV: usize = 800;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// All eigenvalues of the free block, by dense decomposition.
pub fn dense_eigenvalues(matrix: &DiracMatrix) -> Result<Vec<Complex64>> {
    let block = matrix.free_block();
    block
        .eigenvalues()
        .map_err(|e| Error::EigenNonConvergence(format!("{e:?}")))
}

/// The `k` eigenvalues of smallest modulus of the operator restricted to its
/// free unknowns (the interior nodes under Dirichlet conditions), sorted by
/// increasing modulus.
pub fn near_zero_eigen(matrix: &DiracMatrix, k: usize) -> Result<Vec<Complex64>> {
    let free = 2 * matrix.free_nodes().len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let k = k.min(free);
    let mut values = if free <= DENSE_LIMIT {
        dense_eigenvalues(matrix)?
    } else {
        shift_invert(matrix, k)?
    };
    values.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    values.truncate(k);
    Ok(values)
}

/// Position of every free node in the banded ordering. Periodic grids are
/// folded as `0, n-1, 1, n-2, ...` so that wraparound neighbours stay close.
fn banded_order(matrix: &DiracMatrix) -> Vec<usize> {
    let nodes = matrix.free_nodes();
    let n = matrix.grid().n_points();
    let mut position = vec![usize::MAX; n];
    match matrix.boundary() {
        Boundary::Dirichlet => {
            for (p, node) in nodes.enumerate() {
                position[node] = p;
            }
        }
        Boundary::Periodic => {
            let mut p = 0;
            let (mut lo, mut hi) = (0usize, n - 1);
            while lo <= hi {
                position[lo] = p;
                p += 1;
                if hi != lo {
                    position[hi] = p;
                    p += 1;
                }
                lo += 1;
                if hi == 0 {
                    break;
                }
                hi -= 1;
            }
        }
    }
    position
}

/// Banded LU factorization with partial pivoting. Row slot `r` stores
/// columns `r - kl ..= r + kl + ku`; row interchanges and the unit lower
/// multipliers are kept per elimination step.
struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex64>,
    lower: Vec<Complex64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![zero(); n * width],
            lower: vec![zero(); n * kl.max(1)],
            pivots: vec![0; n],
        }
    }

    fn idx(&self, r: usize, c: usize) -> usize {
        debug_assert!(c + self.kl >= r && c <= r + self.kl + self.ku);
        r * self.width + (c + self.kl - r)
    }

    fn add(&mut self, r: usize, c: usize, v: Complex64) {
        let i = self.idx(r, c);
        self.data[i] += v;
    }

    fn factor(&mut self) -> Result<()> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for j in 0..n {
            let last = (j + kl).min(n - 1);
            let right = (j + kl + ku).min(n - 1);
            let mut p = j;
            let mut best = self.data[self.idx(j, j)].norm();
            for i in j + 1..=last {
                let v = self.data[self.idx(i, j)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::EigenNonConvergence(format!(
                    "shifted operator is singular at pivot {j}"
                )));
            }
            self.pivots[j] = p;
            if p != j {
                for c in j..=right {
                    let (a, b) = (self.idx(j, c), self.idx(p, c));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.idx(j, j)];
            for i in j + 1..=last {
                let ij = self.idx(i, j);
                let l = self.data[ij] / pivot;
                self.data[ij] = zero();
                self.lower[j * kl + (i - j - 1)] = l;
                if l == zero() {
                    continue;
                }
                for c in j + 1..=right {
                    let u = self.data[self.idx(j, c)];
                    let ic = self.idx(i, c);
                    self.data[ic] -= l * u;
                }
            }
        }
        Ok(())
    }

    fn solve_in_place(&self, b: &mut [Complex64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for j in 0..n {
            b.swap(j, self.pivots[j]);
            let bj = b[j];
            for i in j + 1..=(j + kl).min(n - 1) {
                b[i] -= self.lower[j * kl + (i - j - 1)] * bj;
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for c in i + 1..=(i + kl + ku).min(n - 1) {
                acc -= self.data[self.idx(i, c)] * b[c];
            }
            b[i] = acc / self.data[self.idx(i, i)];
        }
    }
}

fn factor_shifted(matrix: &DiracMatrix, shift: Complex64) -> Result<(BandedLu, Vec<usize>)> {
    let position = banded_order(matrix);
    let mut entries = Vec::new();
    let mut band = 0usize;
    for node in matrix.free_nodes() {
        for (col, block) in matrix.row_blocks(node) {
            let pc = position[col];
            if pc == usize::MAX {
                // Dirichlet boundary value, fixed to zero
                continue;
            }
            let pr = position[node];
            for r in 0..2 {
                for c in 0..2 {
                    let (i, j) = (2 * pr + r, 2 * pc + c);
                    band = band.max(i.abs_diff(j));
                    entries.push((i, j, block[(r, c)]));
                }
            }
        }
    }
    let dim = 2 * matrix.free_nodes().len();
    let mut lu = BandedLu::new(dim, band, band);
    for (i, j, v) in entries {
        lu.add(i, j, v);
    }
    for i in 0..dim {
        lu.add(i, i, -shift);
    }
    lu.factor()?;
    Ok((lu, position))
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn shift_invert(matrix: &DiracMatrix, k: usize) -> Result<Vec<Complex64>> {
    // an off-axis shift never coincides with a real (or exactly zero) eigenvalue
    let scale = 1.0 / matrix.grid().spacing();
    let shift = Complex64::from_polar(1e-9 * scale, 0.3);
    let (lu, _) = factor_shifted(matrix, shift)?;
    let dim = lu.n;

    // deterministic, non-symmetric start vector
    let mut v0: Vec<Complex64> = (0..dim)
        .map(|i| {
            let t = i as f64;
            Complex64::new(1.0 + 0.5 * (0.7 * t).sin(), 0.25 * (1.3 * t).cos())
        })
        .collect();
    let n0 = norm(&v0);
    v0.iter_mut().for_each(|v| *v /= n0);

    let max_m = MAX_KRYLOV.min(dim);
    let mut basis: Vec<Vec<Complex64>> = vec![v0];
    // column-major upper Hessenberg entries, h[j] has length j + 2
    let mut hess: Vec<Vec<Complex64>> = Vec::new();
    let mut checkpoint = (2 * k + 20).min(max_m);

    loop {
        let j = hess.len();
        let mut w = basis[j].clone();
        lu.solve_in_place(&mut w);
        let mut col = vec![zero(); j + 2];
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            for (i, q) in basis.iter().enumerate() {
                let c = dot(q, &w);
                col[i] += c;
                for (wv, qv) in w.iter_mut().zip(q) {
                    *wv -= c * qv;
                }
            }
        }
        let beta = norm(&w);
        col[j + 1] = Complex64::from(beta);
        hess.push(col);
        let m = j + 1;
        let breakdown = beta <= 1e-14 * hess[j][..=j].iter().map(|c| c.norm()).fold(0.0, f64::max);

        if m == checkpoint || breakdown || m == max_m {
            let h = Mat::from_fn(m, m, |r, c| if r <= c + 1 { hess[c][r] } else { zero() });
            let evd = h
                .eigen()
                .map_err(|e| Error::EigenNonConvergence(format!("{e:?}")))?;
            let s = evd.S();
            let u = evd.U();
            let mut ritz: Vec<(Complex64, f64)> = (0..m)
                .map(|i| {
                    let theta = s[i];
                    let ynorm = (0..m).map(|r| u[(r, i)].norm_sqr()).sum::<f64>().sqrt();
                    let res = beta * u[(m - 1, i)].norm() / ynorm;
                    (theta, res)
                })
                .collect();
            ritz.sort_by(|a, b| b.0.norm().total_cmp(&a.0.norm()));
            let wanted = k.min(m);
            let converged = breakdown
                || ritz[..wanted]
                    .iter()
                    .all(|(theta, res)| *res <= RITZ_RTOL * theta.norm());
            if converged {
                return Ok(ritz[..wanted]
                    .iter()
                    .map(|(theta, _)| shift + theta.inv())
                    .collect());
            }
            if m == max_m {
                return Err(Error::EigenNonConvergence(format!(
                    "{wanted} Ritz values not converged after {m} Arnoldi steps"
                )));
            }
            checkpoint = (2 * checkpoint).min(max_m);
        }
        let inv = 1.0 / beta;
        basis.push(w.into_iter().map(|v| v * inv).collect());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::ConformalFactor;
    use crate::discrete::{assemble, Grid};
    use crate::zeromode::{Branch, PhysicalParams};

    fn params(mass: f64, kv: f64, ky: f64) -> PhysicalParams {
        PhysicalParams::new(mass, kv, ky, 1.0, Branch::Plus).unwrap()
    }

    #[test]
    fn banded_lu_solves_random_system() {
        let n = 40;
        let (kl, ku) = (3, 2);
        let mut lu = BandedLu::new(n, kl, ku);
        let mut dense = vec![vec![zero(); n]; n];
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                // weak diagonal forces pivoting
                let v = Complex64::new(((i * 7 + j * 3) as f64).sin(), ((i + 2 * j) as f64).cos());
                let v = if i == j { v * 0.01 } else { v };
                lu.add(i, j, v);
                dense[i][j] = v;
            }
        }
        lu.factor().unwrap();
        let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let mut b: Vec<Complex64> = (0..n)
            .map(|i| (0..n).map(|j| dense[i][j] * x[j]).sum())
            .collect();
        lu.solve_in_place(&mut b);
        for i in 0..n {
            assert!((b[i] - x[i]).norm() < 1e-9, "{i}: {} vs {}", b[i], x[i]);
        }
    }

    #[test]
    fn periodic_folding_is_a_permutation() {
        let omega = ConformalFactor::constant(1.0, -1.0, 1.0).unwrap();
        for n in [3, 5, 9, 11] {
            let g = Grid::symmetric(1.0, n).unwrap();
            let h = assemble(&params(0.0, 0.0, 0.0), &omega, &g, Boundary::Periodic).unwrap();
            let mut pos = banded_order(&h);
            pos.sort_unstable();
            assert_eq!(pos, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn flat_free_periodic_has_exact_zero() {
        let omega = ConformalFactor::constant(1.0, -4.0, 4.0).unwrap();
        for n in [41, 601] {
            let g = Grid::symmetric(4.0, n).unwrap();
            let h = assemble(&params(0.0, 0.0, 0.0), &omega, &g, Boundary::Periodic).unwrap();
            let ev = near_zero_eigen(&h, 2).unwrap();
            assert!(ev[0].norm() < 1e-10, "n={n}: {}", ev[0]);
        }
    }

    #[test]
    fn shift_invert_agrees_with_dense() {
        let omega = ConformalFactor::cosh_power(1.0, 1).unwrap();
        for bc in [Boundary::Dirichlet, Boundary::Periodic] {
            let g = Grid::symmetric(3.0, 161).unwrap();
            let h = assemble(&params(1.5, 2.5, 0.3), &omega, &g, bc).unwrap();
            let mut dense = dense_eigenvalues(&h).unwrap();
            dense.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
            let si = shift_invert(&h, 5).unwrap();
            let mut si_sorted = si.clone();
            si_sorted.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
            for (a, b) in si_sorted.iter().zip(&dense) {
                assert!((a - b).norm() < 1e-8 * b.norm().max(1.0), "{bc:?}: {a} vs {b}");
            }
        }
    }
}
