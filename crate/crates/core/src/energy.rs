//! Gradient energy `E(t) = ½∫(|∇x1|² + |∇x2|²)` and the exponential decay
//! bound `E(t) ≤ (E(0) − q) e^{−δt} + q`.

use alloc::vec::Vec;

use crate::dynamics::{StateP, Trajectory};
use crate::grid::Field;
use crate::params::ModelParams;
use crate::{Error, Result};

/// Relative slack allowed when testing the bound on discrete data.
pub const BOUND_SLACK: f64 = 0.05;

/// `∫ g²` where `g` is the nodal central-difference derivative and the
/// boundary derivative is zero.
pub fn gradient_norm_sq(f: &Field) -> f64 {
    let grid = f.grid();
    let g: Vec<f64> = grid.gradient(f.values()).into_iter().map(|x| x * x).collect();
    grid.trapezoid(&g, 0.0, 0.0)
}

pub fn energy_of_state(s: &StateP) -> f64 {
    0.5 * (gradient_norm_sq(&s.x1) + gradient_norm_sq(&s.x2))
}

/// `∫ ‖x − x_M‖ dz` with `x_M` the spatial mean and `‖·‖` Euclidean.
pub fn spatial_avg_dev(s: &StateP) -> f64 {
    let m1 = s.x1.integrate() / core::f64::consts::PI;
    let m2 = s.x2.integrate() / core::f64::consts::PI;
    let dev: Vec<f64> = s
        .x1
        .values()
        .iter()
        .zip(s.x2.values())
        .map(|(a, b)| libm::hypot(a - m1, b - m2))
        .collect();
    Field::from_values_unchecked(*s.grid(), dev).integrate()
}

/// `∫|∇f|² / ∫(f − f̄)²`; the discrete counterpart of the Neumann
/// Poincaré constant `μ₁`. `None` for a constant field.
pub fn poincare_ratio(f: &Field) -> Option<f64> {
    let mean = f.integrate() / core::f64::consts::PI;
    let var = f.map(|v| (v - mean) * (v - mean)).integrate();
    if var <= 0.0 {
        return None;
    }
    Some(gradient_norm_sq(f) / var)
}

/// `δ = min(d1, d2)·μ₁ − (ρ + max(h1, h2))` and
/// `q = r(h1 + h2)∫x3²(1 − x3) / δ`.
pub fn decay_constants(p: &ModelParams, rho: f64, mu1: f64, x3: &Field) -> Result<(f64, f64)> {
    let delta = p.d1.min(p.d2) * mu1 - (rho + p.h1.max(p.h2));
    if !(delta > 0.0) {
        return Err(Error::DecayHypothesisFailed(delta));
    }
    let w = x3.map(|v| v * v * (1.0 - v)).integrate();
    Ok((delta, p.r * (p.h1 + p.h2) * w / delta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub spatial_avg_dev: Vec<f64>,
    pub delta: f64,
    pub q: f64,
}

impl EnergySeries {
    pub fn from_trajectory(traj: &Trajectory, delta: f64, q: f64) -> Self {
        let snaps = &traj.snapshots;
        EnergySeries {
            times: snaps.iter().map(|s| s.t).collect(),
            energy: snaps.iter().map(energy_of_state).collect(),
            spatial_avg_dev: snaps.iter().map(spatial_avg_dev).collect(),
            delta,
            q,
        }
    }

    /// `(E(0) − q) e^{−δt} + q` at each time.
    pub fn bound(&self) -> Vec<f64> {
        let e0 = self.energy.first().copied().unwrap_or(0.0);
        self.times
            .iter()
            .map(|&t| (e0 - self.q) * libm::exp(-self.delta * t) + self.q)
            .collect()
    }

    /// Least-squares slope of `ln E` over the last `fraction` of samples
    /// with `E > floor`. `None` with fewer than 3 usable samples.
    pub fn tail_log_slope(&self, fraction: f64, floor: f64) -> Option<f64> {
        let n = self.times.len();
        let keep = (libm::ceil(fraction * n as f64) as usize).clamp(1, n);
        let pts: Vec<(f64, f64)> = self.times[n - keep..]
            .iter()
            .zip(&self.energy[n - keep..])
            .filter(|(_, &e)| e > floor)
            .map(|(&t, &e)| (t, libm::log(e)))
            .collect();
        if pts.len() < 3 {
            return None;
        }
        let k = pts.len() as f64;
        let tm = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let ym = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - tm) * (p.0 - tm)).sum();
        Some(sxy / sxx)
    }
}

/// Checks `E(tᵢ) ≤ (1 + 5%)·bound(tᵢ)` at every snapshot; returns the
/// verdict and `bound − E` per snapshot.
pub fn verify_energy_bound(traj: &Trajectory, delta: f64, q: f64) -> Result<(bool, Vec<f64>)> {
    if !(delta > 0.0) {
        return Err(Error::DecayHypothesisFailed(delta));
    }
    let series = EnergySeries::from_trajectory(traj, delta, q);
    Ok(check_series(&series))
}

pub fn check_series(series: &EnergySeries) -> (bool, Vec<f64>) {
    let bound = series.bound();
    let margins: Vec<f64> = bound.iter().zip(&series.energy).map(|(b, e)| b - e).collect();
    let holds = bound
        .iter()
        .zip(&series.energy)
        .all(|(b, e)| *e <= (1.0 + BOUND_SLACK) * b + 1e-15);
    (holds, margins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use core::f64::consts::PI;

    fn params() -> ModelParams {
        ModelParams { d1: 1.0, d2: 1.0, c: 1.0, alpha: 0.5, m: 1.0, d: 0.9, h1: 0.1, h2: 0.05, r: 6.0 }
    }

    #[test]
    fn energy_examples() {
        let g = Grid1D::new(200).unwrap();
        let c = StateP::perturbed_constant(&g, 0.3, 0.7, 0.0, 1);
        assert_eq!(energy_of_state(&c), 0.0);
        let s = StateP::new(0.0, g.sample(libm::cos), g.constant(0.0)).unwrap();
        assert!((energy_of_state(&s) - PI / 4.0).abs() < 1e-3);
        let f = g.sample(|z| libm::cos(2.0 * z));
        let s = StateP::new(0.0, f.clone(), f).unwrap();
        assert!((energy_of_state(&s) - 2.0 * PI).abs() < 1e-2);
    }

    #[test]
    fn energy_converges_at_second_order() {
        let err = |n: usize| {
            let g = Grid1D::new(n).unwrap();
            let s = StateP::new(0.0, g.sample(libm::cos), g.constant(0.0)).unwrap();
            (energy_of_state(&s) - PI / 4.0).abs()
        };
        let (a, b, c) = (err(39), err(79), err(159));
        for o in [libm::log2(a / b), libm::log2(b / c)] {
            assert!((1.8..=2.2).contains(&o), "order {o}");
        }
    }

    #[test]
    fn decay_constants_examples() {
        let g = Grid1D::new(50).unwrap();
        let p = params();
        let (d, q) = decay_constants(&p.with_interference(0.1, 0.1), 0.3, 1.0, &g.constant(0.0)).unwrap();
        assert!((d - 0.6).abs() < 1e-15 && q == 0.0);
        let (_, q) = decay_constants(&p, 0.3, 1.0, &g.constant(1.0)).unwrap();
        assert_eq!(q, 0.0);
        let (_, q) = decay_constants(&p, 0.3, 1.0, &crate::elliptic::sech2_profile(6.0, &g)).unwrap();
        assert!(q > 0.0);
        assert!(matches!(
            decay_constants(&p.with_diffusion(0.1, 0.1), 0.3, 1.0, &g.constant(0.0)),
            Err(Error::DecayHypothesisFailed(_))
        ));
    }

    #[test]
    fn poincare_on_eigenfunctions() {
        let g = Grid1D::new(100).unwrap();
        let r = poincare_ratio(&g.sample(libm::cos)).unwrap();
        assert!((r - 1.0).abs() < 1e-2);
        assert!(poincare_ratio(&g.constant(2.0)).is_none());
    }

    #[test]
    fn bound_holds_trivially_at_rest() {
        let g = Grid1D::new(20).unwrap();
        let s = StateP::perturbed_constant(&g, 0.8, 0.2, 0.0, 1);
        let traj = Trajectory {
            snapshots: alloc::vec![s.clone(), StateP { t: 1.0, ..s }],
            params: params(),
            x3_profile: g.constant(0.0),
            record_dt: 1.0,
        };
        let (ok, m) = verify_energy_bound(&traj, 0.5, 0.0).unwrap();
        assert!(ok && m.iter().all(|&x| x == 0.0));
        assert!(verify_energy_bound(&traj, 0.0, 0.0).is_err());
    }
}
