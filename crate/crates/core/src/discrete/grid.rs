use serde::{Deserialize, Serialize};

use crate::conformal::ConformalFactor;
use crate::error::{Error, Result};

/// Uniform grid with an odd number of nodes, so that `x = 0` is a node of
/// any symmetric domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;

    fn try_from(s: GridSpec) -> Result<Self> {
        Grid::new(s.x_min, s.x_max, s.n_points)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec {
            x_min: g.x_min,
            x_max: g.x_max,
            n_points: g.n_points,
        }
    }
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 points, got {n_points}")));
        }
        if n_points % 2 == 0 {
            return Err(Error::InvalidGrid(format!(
                "number of points must be odd, got {n_points}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    /// Symmetric grid starting from `[-8, 8]`, shrunk until
    /// `h * |lambda| * Omega(x_max) <= 0.5`.
    pub fn resolved(omega: &ConformalFactor, lambda_abs: f64, n_points: usize) -> Result<Self> {
        let half = 8.0f64;
        let fits = |w: f64| -> Result<bool> {
            let g = Grid::symmetric(w, n_points)?;
            Ok(g.spacing() * lambda_abs * g.max_omega(omega)? <= 0.5)
        };
        if fits(half)? {
            return Grid::symmetric(half, n_points);
        }
        let (mut lo, mut hi) = (0.0, half);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if fits(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if lo == 0.0 {
            return Err(Error::InvalidGrid(format!(
                "{n_points} points cannot resolve |lambda| = {lambda_abs}"
            )));
        }
        Grid::symmetric(lo, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_points - 1 {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// Grid with the spacing halved; every node of `self` is a node of the result.
    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * self.n_points - 1,
            ..*self
        }
    }

    pub fn max_omega(&self, omega: &ConformalFactor) -> Result<f64> {
        let mut worst = 0.0f64;
        for x in self.nodes() {
            worst = worst.max(omega.value(x)?);
        }
        Ok(worst)
    }
}
