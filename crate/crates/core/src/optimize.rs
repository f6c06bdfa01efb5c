//! Nelder–Mead simplex minimization with dimension-adaptive coefficients
//! and restarts around the incumbent.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Maximum number of objective evaluations.
    pub budget: usize,
    /// Initial simplex edge along each coordinate.
    pub step: f64,
    /// Stop when the spread of simplex values falls below this.
    pub ftol: f64,
    /// ... and the simplex diameter falls below this.
    pub xtol: f64,
    pub max_restarts: usize,
    /// Restart once this many iterations pass without the best value
    /// dropping by a relative `stall_rel` (0 disables).
    pub stall_iters: usize,
    pub stall_rel: f64,
    /// Keep restarting after a restart that found nothing better.
    pub persist: bool,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { budget: 5000, step: 0.5, ftol: 1e-14, xtol: 1e-10, max_restarts: 8, stall_iters: 0, stall_rel: 1e-3, persist: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub iterations: usize,
    /// Best value after each iteration.
    pub trace: Vec<f64>,
    pub budget_exhausted: bool,
}

struct Counter<F> {
    f: F,
    evals: usize,
    budget: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counter<F> {
    fn call(&mut self, x: &[f64]) -> Option<f64> {
        if self.evals >= self.budget {
            return None;
        }
        self.evals += 1;
        let v = (self.f)(x);
        Some(if v.is_nan() { f64::INFINITY } else { v })
    }
}

pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(f: F, x0: &[f64], opts: NelderMeadOptions) -> Minimum {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, shrink) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let mut obj = Counter { f, evals: 0, budget: opts.budget.max(1) };
    let mut trace = Vec::new();
    let mut iterations = 0;

    let Some(f0) = obj.call(x0) else { unreachable!() };
    let mut best_x = x0.to_vec();
    let mut best_f = f0;
    let mut exhausted = false;

    'restarts: for restart in 0..=opts.max_restarts {
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((best_x.clone(), best_f));
        for i in 0..n {
            let mut x = best_x.clone();
            x[i] += opts.step;
            match obj.call(&x) {
                Some(v) => simplex.push((x, v)),
                None => {
                    exhausted = true;
                    break 'restarts;
                }
            }
        }
        let start_f = best_f;
        let mut mark = (iterations, best_f);

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[0].1 < best_f {
                best_f = simplex[0].1;
                best_x.clone_from(&simplex[0].0);
            }
            iterations += 1;
            trace.push(best_f);

            let spread = simplex[n].1 - simplex[0].1;
            let diam = simplex[1..]
                .iter()
                .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread <= opts.ftol * (1.0 + simplex[0].1.abs()) && diam <= opts.xtol {
                break;
            }
            if best_f < mark.1 * (1.0 - opts.stall_rel) {
                mark = (iterations, best_f);
            } else if opts.stall_iters > 0 && iterations - mark.0 >= opts.stall_iters {
                break;
            }

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let worst = simplex[n].clone();
            let toward = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect()
            };

            let xr = toward(alpha);
            let Some(fr) = obj.call(&xr) else {
                exhausted = true;
                break 'restarts;
            };
            if fr < simplex[0].1 {
                let xe = toward(alpha * beta);
                let Some(fe) = obj.call(&xe) else {
                    simplex[n] = (xr, fr);
                    exhausted = true;
                    break;
                };
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, outside) = if fr < worst.1 { (toward(alpha * gamma), true) } else { (toward(-gamma), false) };
            let Some(fc) = obj.call(&xc) else {
                exhausted = true;
                break 'restarts;
            };
            if (outside && fc <= fr) || (!outside && fc < worst.1) {
                simplex[n] = (xc, fc);
                continue;
            }
            let x_best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = x_best.iter().zip(&vertex.0).map(|(b, v)| b + shrink * (v - b)).collect();
                let Some(v) = obj.call(&x) else {
                    exhausted = true;
                    break 'restarts;
                };
                *vertex = (x, v);
            }
        }

        if simplex[0].1 < best_f {
            best_f = simplex[0].1;
            best_x.clone_from(&simplex[0].0);
        }
        if exhausted {
            break;
        }
        // a restart that found nothing new ends the search
        if restart > 0 && best_f >= start_f && !opts.persist {
            break;
        }
    }

    if trace.last() != Some(&best_f) {
        trace.push(best_f);
    }
    Minimum { x: best_x, f: best_f, evaluations: obj.evals, iterations, trace, budget_exhausted: exhausted }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        x.windows(2).map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2)).sum()
    }

    #[test]
    fn minimizes_rosenbrock() {
        let m = nelder_mead(rosenbrock, &[-1.2, 1.0], NelderMeadOptions { budget: 2000, step: 0.5, ..Default::default() });
        assert!(m.f < 1e-10, "{}", m.f);
        assert!((m.x[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn minimizes_quadratic_in_nine_dims() {
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * (v - 0.1 * i as f64).powi(2)).sum();
        let m = nelder_mead(f, &[1.0; 9], NelderMeadOptions { budget: 20000, ..Default::default() });
        assert!(m.f < 1e-10, "{}", m.f);
    }

    #[test]
    fn respects_budget_and_trace_is_monotone() {
        let mut calls = 0;
        let m = nelder_mead(
            |x| {
                calls += 1;
                rosenbrock(x)
            },
            &[-1.2, 1.0, 0.5],
            NelderMeadOptions { budget: 100, ..Default::default() },
        );
        assert_eq!(calls, 100);
        assert_eq!(m.evaluations, 100);
        assert!(m.budget_exhausted);
        assert!(m.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(m.f < rosenbrock(&[-1.2, 1.0, 0.5]));
    }

    #[test]
    fn nan_is_treated_as_worst() {
        let f = |x: &[f64]| if x[0] > 2.0 { f64::NAN } else { (x[0] - 1.0).powi(2) };
        let m = nelder_mead(f, &[0.0], NelderMeadOptions { budget: 500, ..Default::default() });
        assert!((m.x[0] - 1.0).abs() < 1e-4);
    }
}
