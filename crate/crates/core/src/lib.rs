//! Numerical core for the boyciana–fish–human reaction–diffusion model.
//!
//! The model couples two ratio-dependent predator–prey equations for fish
//! (`x1`) and boyciana (`x2`) to a stationary logistic equation for the
//! human distribution (`x3`), all on the interval `(0, π)` with no-flux
//! boundaries:
//!
//! ```text
//! ∂x1/∂t = d1 Δx1 + x1 (1 - x1 - c x2 / (x1 + α x2) - h1 x3)
//! ∂x2/∂t = d2 Δx2 + x2 (-d + m x1 / (x1 + α x2) - h2 x3)
//!      0 =    Δx3 + r x3 (1 - x3)
//! ```
//!
//! The crate is `no_std` (it needs `alloc`). File formats, scenario
//! orchestration and the command line live in the `wetland` crate.
//!
//! Modules map onto the analysis pipeline:
//!
//! * [`grid`]: uniform grid, Neumann Laplacian, quadrature, eigenpairs
//! * [`params`]: model parameters and positivity/persistence conditions
//! * [`elliptic`]: steady human distribution (Newton) and its sech² approximation
//! * [`dynamics`]: method-of-lines RK4 integration of the two species
//! * [`equilibria`]: constant equilibria, Jacobians, mode matrices, stability
//! * [`attractor`]: absorbing rectangle and trajectory containment
//! * [`energy`]: gradient energy and its exponential decay bound
//! * [`fitting`]: observation sets, relative-error objective, simplex fit
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN takes the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod attractor;
pub mod dynamics;
pub mod elliptic;
pub mod energy;
pub mod equilibria;
mod error;
pub mod fitting;
pub mod grid;
pub mod linalg;
pub mod optimize;
pub mod params;

pub use error::{Error, Result};
pub use grid::{Field, Grid1D};
pub use params::ModelParams;

/// Threshold below which `x1 + α x2` is treated as the origin of the
/// ratio-dependent response.
pub const EPS_RATIO: f64 = 1e-12;
