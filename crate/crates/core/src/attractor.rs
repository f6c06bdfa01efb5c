//! Absorbing rectangle for `(x1, x2)` and tail containment checks.

use crate::dynamics::Trajectory;
use crate::params::ModelParams;

/// Inflation applied to the region when testing containment.
pub const ABSORPTION_SLACK: f64 = 1e-2;
/// Default share of snapshots treated as the long-time tail.
pub const DEFAULT_TAIL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorbingRegion {
    pub x1_lo: f64,
    pub x1_hi: f64,
    pub x2_lo: f64,
    pub x2_hi: f64,
    /// Both raw lower bounds were positive; when false they are floored at 0.
    pub persistence: bool,
    /// `m ≤ d`: the boyciana upper bound collapses to 0.
    pub extinction: bool,
}

impl AbsorbingRegion {
    pub fn contains(&self, x1: f64, x2: f64, slack: f64) -> bool {
        x1 >= self.x1_lo - slack && x1 <= self.x1_hi + slack && x2 >= self.x2_lo - slack && x2 <= self.x2_hi + slack
    }
}

pub fn absorbing_region(p: &ModelParams) -> AbsorbingRegion {
    let extinction = p.m <= p.d;
    let x2_hi = if extinction { 0.0 } else { (p.m - p.d) / (p.d * p.alpha) };
    let x1_lo = 1.0 - p.h1 - p.c / p.alpha;
    let x2_lo = (p.m - p.d - p.h2) / ((p.d + p.h2) * p.alpha) * x1_lo;
    let persistence = p.check_persistence_condition();
    AbsorbingRegion {
        x1_lo: if persistence { x1_lo } else { x1_lo.max(0.0) },
        x1_hi: 1.0,
        x2_lo: if persistence { x2_lo } else { x2_lo.max(0.0).min(x2_hi) },
        x2_hi,
        persistence,
        extinction,
    }
}

/// All nodal values over the last `tail_fraction` of snapshots lie in the
/// region inflated by [`ABSORPTION_SLACK`].
pub fn check_absorption(traj: &Trajectory, region: &AbsorbingRegion, tail_fraction: f64) -> bool {
    tail_all(traj, tail_fraction, |a, b| region.contains(a, b, ABSORPTION_SLACK))
}

/// Like [`check_absorption`] but only against the upper bounds.
pub fn check_upper_absorption(traj: &Trajectory, region: &AbsorbingRegion, tail_fraction: f64) -> bool {
    tail_all(traj, tail_fraction, |a, b| {
        a <= region.x1_hi + ABSORPTION_SLACK && b <= region.x2_hi + ABSORPTION_SLACK
    })
}

fn tail_all(traj: &Trajectory, tail_fraction: f64, ok: impl Fn(f64, f64) -> bool) -> bool {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return false;
    }
    traj.tail(tail_fraction)
        .iter()
        .all(|s| s.x1.values().iter().zip(s.x2.values()).all(|(&a, &b)| ok(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::StateP;
    use crate::equilibria::equilibrium_e2;
    use crate::grid::Grid1D;
    use alloc::vec;

    fn params(c: f64, alpha: f64, h1: f64, h2: f64, d: f64, m: f64) -> ModelParams {
        ModelParams { d1: 1.0, d2: 1.0, c, alpha, m, d, h1, h2, r: 1.0 }
    }

    #[test]
    fn worked_example() {
        let r = absorbing_region(&params(0.4, 1.0, 0.1, 0.1, 0.3, 1.0));
        assert!((r.x1_lo - 0.5).abs() < 1e-12);
        assert_eq!(r.x1_hi, 1.0);
        assert!((r.x2_lo - 0.75).abs() < 1e-12);
        assert!((r.x2_hi - 7.0 / 3.0).abs() < 1e-12);
        assert!(r.persistence && !r.extinction);
    }

    #[test]
    fn degenerate_cases() {
        let r = absorbing_region(&params(0.5, 0.5, 0.0, 0.0, 0.3, 1.0));
        assert_eq!(r.x1_lo, 0.0);
        let r = absorbing_region(&params(1.0, 0.5, 0.0, 0.0, 0.9, 1.0));
        assert!(!r.persistence && r.x1_lo == 0.0 && r.x2_lo == 0.0);
        let r = absorbing_region(&params(1.0, 0.5, 0.0, 0.0, 1.2, 1.0));
        assert!(r.extinction && r.x2_hi == 0.0);
    }

    #[test]
    fn e2_inside_when_persistent() {
        let p = params(0.4, 1.0, 0.1, 0.1, 0.3, 1.0);
        let e = equilibrium_e2(&p).unwrap();
        let r = absorbing_region(&p);
        assert!(r.contains(e.u(), e.v(), 0.0));
        let g = Grid1D::new(10).unwrap();
        let s = StateP::perturbed_constant(&g, e.u(), e.v(), 0.0, 1);
        let traj = Trajectory { snapshots: vec![s.clone(), s], params: p, x3_profile: g.constant(1.0), record_dt: 1.0 };
        assert!(check_absorption(&traj, &r, 0.1));
        assert!(!check_absorption(&traj, &r, 0.0));
    }

    #[test]
    fn non_finite_is_rejected() {
        let p = params(0.4, 1.0, 0.1, 0.1, 0.3, 1.0);
        let g = Grid1D::new(10).unwrap();
        let s = StateP::perturbed_constant(&g, f64::NAN, 0.5, 0.0, 1);
        let traj = Trajectory { snapshots: vec![s], params: p, x3_profile: g.constant(1.0), record_dt: 1.0 };
        assert!(!check_absorption(&traj, &absorbing_region(&p), 1.0));
    }
}
