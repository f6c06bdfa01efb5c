//! Uniform grid on `(0, π)` with homogeneous Neumann boundary handling.
//!
//! Nodes are the interior points `z_i = i h`, `i = 1..=n`, `h = π / (n + 1)`.
//! The boundary values at `z = 0` and `z = π` are not stored; wherever an
//! operator needs them they are reconstructed from the no-flux condition
//! with the second-order one-sided closure `f(0) ≈ (4 f_1 - f_2) / 3`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n: usize,
    h: f64,
}

impl Grid1D {
    pub fn new(n_interior: usize) -> Result<Self> {
        if n_interior < 3 {
            return Err(Error::GridTooCoarse(n_interior));
        }
        Ok(Grid1D {
            n: n_interior,
            h: PI / (n_interior + 1) as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Coordinate of node `i` (zero-based).
    pub fn node(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.node(i))
    }

    /// Samples `f` at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: *self,
            values: self.nodes().map(f).collect(),
        }
    }

    pub fn constant(&self, value: f64) -> Field {
        Field {
            grid: *self,
            values: alloc::vec![value; self.n],
        }
    }

    /// Boundary values implied by zero normal derivative.
    pub fn boundary_values(values: &[f64]) -> (f64, f64) {
        let n = values.len();
        (
            values[0] + (values[0] - values[1]) / 3.0,
            values[n - 1] + (values[n - 1] - values[n - 2]) / 3.0,
        )
    }

    /// Writes the Neumann Laplacian of `values` into `out`.
    pub fn laplacian_into(&self, values: &[f64], out: &mut [f64]) {
        let n = self.n;
        let inv_h2 = 1.0 / (self.h * self.h);
        let (left, right) = Self::boundary_values(values);
        out[0] = (left - 2.0 * values[0] + values[1]) * inv_h2;
        for i in 1..n - 1 {
            out[i] = (values[i - 1] - 2.0 * values[i] + values[i + 1]) * inv_h2;
        }
        out[n - 1] = (values[n - 2] - 2.0 * values[n - 1] + right) * inv_h2;
    }

    /// The Laplacian as a tridiagonal matrix `(sub, diag, sup)` acting on
    /// node values, boundary closure folded into the first and last rows.
    pub fn laplacian_tridiagonal(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.n;
        let inv_h2 = 1.0 / (self.h * self.h);
        let mut sub = alloc::vec![inv_h2; n - 1];
        let mut diag = alloc::vec![-2.0 * inv_h2; n];
        let mut sup = alloc::vec![inv_h2; n - 1];
        diag[0] = -2.0 / 3.0 * inv_h2;
        sup[0] = 2.0 / 3.0 * inv_h2;
        diag[n - 1] = -2.0 / 3.0 * inv_h2;
        sub[n - 2] = 2.0 / 3.0 * inv_h2;
        (sub, diag, sup)
    }

    /// Composite trapezoid rule on `[0, π]` given node values and explicit
    /// boundary values.
    pub fn trapezoid(&self, values: &[f64], left: f64, right: f64) -> f64 {
        self.h * (0.5 * (left + right) + values.iter().sum::<f64>())
    }

    /// Central-difference derivative at the nodes, using the reconstructed
    /// boundary values for the outermost nodes.
    pub fn gradient(&self, values: &[f64]) -> Vec<f64> {
        let n = self.n;
        let (left, right) = Self::boundary_values(values);
        let inv_2h = 0.5 / self.h;
        (0..n)
            .map(|i| {
                let lo = if i == 0 { left } else { values[i - 1] };
                let hi = if i + 1 == n { right } else { values[i + 1] };
                (hi - lo) * inv_2h
            })
            .collect()
    }
}

/// One scalar quantity sampled on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Field {
    pub fn from_values(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::WrongLength {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("field values must be finite"));
        }
        Ok(Field { grid, values })
    }

    pub(crate) fn from_values_unchecked(grid: Grid1D, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field { grid, values }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Node values mirrored about `z = π/2`.
    pub fn mirrored(&self) -> Field {
        let mut values = self.values.clone();
        values.reverse();
        Field {
            grid: self.grid,
            values,
        }
    }

    pub fn laplacian(&self) -> Field {
        let mut out = alloc::vec![0.0; self.values.len()];
        self.grid.laplacian_into(&self.values, &mut out);
        Field {
            grid: self.grid,
            values: out,
        }
    }

    /// `∫_0^π f dz` by the trapezoid rule with Neumann-reconstructed ends.
    pub fn integrate(&self) -> f64 {
        let (left, right) = Grid1D::boundary_values(&self.values);
        self.grid.trapezoid(&self.values, left, right)
    }

    /// Value at an arbitrary `z ∈ [0, π]` by linear interpolation, using the
    /// reconstructed boundary values at the ends.
    pub fn interpolate(&self, z: f64) -> f64 {
        let h = self.grid.spacing();
        let n = self.values.len();
        let (left, right) = Grid1D::boundary_values(&self.values);
        let at = |k: usize| -> f64 {
            if k == 0 {
                left
            } else if k == n + 1 {
                right
            } else {
                self.values[k - 1]
            }
        };
        let s = (z / h).clamp(0.0, (n + 1) as f64);
        let k = (libm::floor(s) as usize).min(n);
        let w = s - k as f64;
        if w == 0.0 {
            at(k)
        } else {
            (1.0 - w) * at(k) + w * at(k + 1)
        }
    }
}

/// Builds a grid; alias kept for symmetry with the other constructors.
pub fn build_grid(n_interior: usize) -> Result<Grid1D> {
    Grid1D::new(n_interior)
}

/// Neumann Laplacian eigenpair `μ_n = n²`, `φ_n = √(2/π) cos(n z)`;
/// `φ_0` is the unit-norm constant `1/√π`.
pub fn eigenpair(n: usize, grid: &Grid1D) -> (f64, Field) {
    let mu = (n * n) as f64;
    let phi = if n == 0 {
        grid.constant(1.0 / libm::sqrt(PI))
    } else {
        let amp = libm::sqrt(2.0 / PI);
        grid.sample(|z| amp * libm::cos(n as f64 * z))
    };
    (mu, phi)
}
