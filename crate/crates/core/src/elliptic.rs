//! Steady human distribution: `0 = x3'' + r x3 (1 - x3)` on `(0, π)` with
//! zero-flux ends.
//!
//! The constants 0 and 1 are always roots. On an interval every other root
//! of the no-flux problem changes sign, so a Newton solve seeded from the
//! sech² approximation lands on a constant or on an inadmissible root; the
//! solver reports which, and never pushes iterates into `[0, 1]` by force.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::grid::{Field, Grid1D};
use crate::linalg::solve_tridiagonal;
use crate::{Error, Result};

/// Default max-norm residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default Newton iteration cap.
pub const DEFAULT_MAX_ITERS: usize = 50;
const MAX_HALVINGS: usize = 20;
const NONCONSTANT_SPREAD: f64 = 1e-3;

/// Approximate nontrivial profile `1 - (3/4) sech²(√r z / 2)`.
pub fn sech2_profile(r: f64, grid: &Grid1D) -> Field {
    let k = 0.5 * libm::sqrt(r);
    grid.sample(|z| sech2_value(k * z))
}

fn sech2_value(s: f64) -> f64 {
    let sech = 1.0 / libm::cosh(s);
    1.0 - 0.75 * sech * sech
}

/// Which root the Newton iteration reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Zero,
    One,
    /// Constant but neither 0 nor 1 (cannot be a root; kept for reporting).
    OtherConstant,
    Nonconstant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticSolution {
    pub profile: Field,
    pub r: f64,
    pub residual_norm: f64,
    pub newton_iters: usize,
}

impl EllipticSolution {
    pub fn branch(&self) -> Branch {
        let lo = self.profile.min();
        let hi = self.profile.max();
        if hi - lo > NONCONSTANT_SPREAD {
            Branch::Nonconstant
        } else if hi.abs() <= NONCONSTANT_SPREAD {
            Branch::Zero
        } else if (lo - 1.0).abs() <= NONCONSTANT_SPREAD {
            Branch::One
        } else {
            Branch::OtherConstant
        }
    }

    pub fn is_nontrivial(&self) -> bool {
        self.branch() == Branch::Nonconstant
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

/// Discrete residual `L x + r x (1 - x)`.
pub fn residual(r: f64, x: &Field) -> Field {
    let lap = x.laplacian();
    lap.zip_with(x, |l, v| l + r * v * (1.0 - v))
        .expect("laplacian shares the grid")
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, a| m.max(a.abs()))
}

/// Damped Newton iteration for the steady logistic problem.
///
/// Each full step is halved (up to 20 times) while it fails to reduce the
/// max-norm residual. A converged root outside `[-tol, 1 + tol]` is
/// returned as [`Error::InadmissibleRoot`].
pub fn solve_fisher_steady(
    r: f64,
    grid: &Grid1D,
    initial_guess: &Field,
    opts: NewtonOptions,
) -> Result<EllipticSolution> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "must be positive",
        });
    }
    if initial_guess.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if initial_guess.min() < 0.0 || initial_guess.max() > 1.0 {
        return Err(Error::InvalidInput("initial guess must lie in [0, 1]"));
    }
    let (sub, lap_diag, sup) = grid.laplacian_tridiagonal();
    let mut x = initial_guess.clone();
    let mut f = residual(r, &x);
    let mut fnorm = max_norm(f.values());

    for iter in 0..=opts.max_iters {
        if fnorm <= opts.tol {
            let (min, max) = (x.min(), x.max());
            if min < -opts.tol || max > 1.0 + opts.tol {
                return Err(Error::InadmissibleRoot {
                    min,
                    max,
                    residual: fnorm,
                });
            }
            return Ok(EllipticSolution {
                profile: x,
                r,
                residual_norm: fnorm,
                newton_iters: iter,
            });
        }
        if iter == opts.max_iters {
            break;
        }
        let diag: Vec<f64> = lap_diag
            .iter()
            .zip(x.values())
            .map(|(l, v)| l + r * (1.0 - 2.0 * v))
            .collect();
        let rhs: Vec<f64> = f.values().iter().map(|v| -v).collect();
        let step = solve_tridiagonal(&sub, &diag, &sup, &rhs).ok_or(Error::SingularJacobian(iter))?;

        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = Field::from_values_unchecked(
                *grid,
                x.values()
                    .iter()
                    .zip(&step)
                    .map(|(v, s)| v + lambda * s)
                    .collect(),
            );
            let ft = residual(r, &trial);
            let norm = max_norm(ft.values());
            if norm.is_finite() && norm < fnorm {
                accepted = Some((trial, ft, norm));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, ft, norm)) => {
                x = trial;
                f = ft;
                fnorm = norm;
            }
            None => {
                return Err(Error::NoConvergence {
                    iters: iter + 1,
                    residual: fnorm,
                })
            }
        }
    }
    Err(Error::NoConvergence {
        iters: opts.max_iters,
        residual: fnorm,
    })
}

/// Checks `∫ x3 ≤ (r - λ1) |Ω|` up to a quadrature allowance of `h²` per
/// unit length. Requires `r > λ1`.
pub fn check_integral_bound(sol: &EllipticSolution, lambda1: f64) -> Result<bool> {
    if !(sol.r > lambda1) {
        return Err(Error::Hypothesis("r must exceed the first positive eigenvalue"));
    }
    let h = sol.profile.grid().spacing();
    let total = sol.profile.integrate();
    Ok(total <= (sol.r - lambda1) * PI + PI * h * h)
}
