//! Constant equilibria, their linearization per Neumann mode, and the
//! stability taxonomy.

use alloc::vec::Vec;

use crate::linalg::Matrix2;
use crate::params::ModelParams;
use crate::{Error, Result, EPS_RATIO};

/// Modes scanned by default (the report extends this when the provable
/// cutoff is larger).
pub const DEFAULT_N_MAX: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    /// Human-free equilibrium, `x3 ≡ 0`.
    E1,
    /// Equilibrium under saturated human presence, `x3 ≡ 1`.
    E2,
}

/// A positive constant equilibrium. Only constructed through
/// [`equilibrium_e1`] / [`equilibrium_e2`], so `u, v > 0` always holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    u: f64,
    v: f64,
    kind: EquilibriumKind,
}

impl Equilibrium {
    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn kind(&self) -> EquilibriumKind {
        self.kind
    }

    /// The human density the equilibrium belongs to.
    pub fn x3(&self) -> f64 {
        match self.kind {
            EquilibriumKind::E1 => 0.0,
            EquilibriumKind::E2 => 1.0,
        }
    }
}

pub fn equilibrium_e1(p: &ModelParams) -> Result<Equilibrium> {
    p.validate()?;
    if !p.check_e1_condition() {
        return Err(Error::ConditionViolated("1 - alpha/c < d/m < 1"));
    }
    let u = 1.0 - p.c / p.alpha * (1.0 - p.d / p.m);
    let v = (p.m / p.d - 1.0) * u / p.alpha;
    Ok(Equilibrium { u, v, kind: EquilibriumKind::E1 })
}

pub fn equilibrium_e2(p: &ModelParams) -> Result<Equilibrium> {
    p.validate()?;
    if !p.check_e2_condition() {
        return Err(Error::ConditionViolated("1 - h1 - (c/alpha)(1 - (d+h2)/m) > 0 and d + h2 < m"));
    }
    let dh = p.d + p.h2;
    let u = 1.0 - p.h1 - p.c / p.alpha * (1.0 - dh / p.m);
    let v = (p.m / dh - 1.0) * u / p.alpha;
    Ok(Equilibrium { u, v, kind: EquilibriumKind::E2 })
}

/// Jacobian of the reaction terms with respect to `(x1, x2)`.
pub fn reaction_jacobian(u: f64, v: f64, x3: f64, p: &ModelParams) -> Result<Matrix2> {
    let s = u + p.alpha * v;
    if !(s > EPS_RATIO) {
        return Err(Error::RatioSingular(s));
    }
    Ok(jacobian_unchecked(u, v, x3, p))
}

fn jacobian_unchecked(u: f64, v: f64, x3: f64, p: &ModelParams) -> Matrix2 {
    let s = u + p.alpha * v;
    let a = u / s;
    let b = v / s;
    Matrix2::new(
        1.0 - 2.0 * u - p.c * p.alpha * b * b - p.h1 * x3,
        -p.c * a * a,
        p.m * p.alpha * b * b,
        p.m * a * a - p.d - p.h2 * x3,
    )
}

/// `J - n² diag(d1, d2)` with `J` taken at `(eq, x3_const)`.
pub fn mode_matrix(n: usize, eq: &Equilibrium, x3_const: f64, p: &ModelParams) -> Matrix2 {
    let lam = (n * n) as f64;
    jacobian_unchecked(eq.u, eq.v, x3_const, p).sub(&Matrix2::diag(p.d1 * lam, p.d2 * lam))
}

/// Smallest mode index beyond which every mode matrix is Hurwitz for sure:
/// `ℒₙ` is stable once `n² min(d1, d2)` exceeds the logarithmic norm of `J`.
pub fn provable_cutoff(j: &Matrix2, p: &ModelParams) -> usize {
    let mu = j.log_norm().max(0.0);
    let dmin = p.d1.min(p.d2);
    (libm::floor(libm::sqrt(mu / dmin)) as usize + 1).max(1)
}

/// `(n, max Re σ(ℒₙ))` for `n = 0..=n_max`.
pub fn turing_scan(eq: &Equilibrium, x3_const: f64, p: &ModelParams, n_max: usize) -> Result<Vec<(usize, f64)>> {
    if n_max < 1 {
        return Err(Error::InvalidInput("n_max must be at least 1"));
    }
    Ok((0..=n_max)
        .map(|n| (n, mode_matrix(n, eq, x3_const, p).eigenvalues().max_re()))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
        }
    }
}

/// Which clause of the stability theorems applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `c ≤ α`: stable for any diffusion.
    I,
    /// `c > α` and the diffusion margin is nonnegative.
    II,
    /// `c > α` and the diffusion margin is negative.
    III,
    /// `e2`, `c ≤ α`.
    S3,
    /// `e2`, `c > α` with positive diffusion margin.
    S4,
    /// `e2`, neither sufficient condition fires.
    Undetermined,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
            Region::S3 => "S3-stable",
            Region::S4 => "S4-stable",
            Region::Undetermined => "undetermined",
        }
    }

    /// Verdict claimed by the theorem clause, if it makes one.
    pub fn claimed_verdict(self) -> Option<Verdict> {
        match self {
            Region::I | Region::II | Region::S3 | Region::S4 => Some(Verdict::Stable),
            Region::III => Some(Verdict::Unstable),
            Region::Undetermined => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRow {
    pub n: usize,
    pub lambda: f64,
    /// Real parts, larger first.
    pub re: [f64; 2],
    /// Imaginary part magnitude (0 for a real pair).
    pub im: f64,
    pub det: f64,
    pub trace: f64,
}

/// The closed-form determinant/trace expressions for `e1` evaluated next
/// to the numerically assembled ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormCheck {
    pub max_det_residual: f64,
    pub max_trace_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub equilibrium: Equilibrium,
    pub region: Region,
    pub margin: f64,
    pub modes: Vec<ModeRow>,
    /// From the mode scan: unstable iff some listed mode has a positive
    /// real part.
    pub verdict: Verdict,
    /// What the applicable theorem clause claims (`None` when it is silent).
    pub clause_verdict: Option<Verdict>,
    /// Modes at or above this index are provably stable.
    pub provable_cutoff: usize,
    pub closed_form: Option<ClosedFormCheck>,
}

impl StabilityReport {
    /// First mode with a positive real part.
    pub fn first_unstable_mode(&self) -> Option<usize> {
        self.modes.iter().find(|m| m.re[0] > 0.0).map(|m| m.n)
    }

    /// Whether the theorem clause and the mode scan disagree.
    pub fn clause_conflicts(&self) -> bool {
        matches!(self.clause_verdict, Some(v) if v != self.verdict)
    }
}

fn scan_modes(eq: &Equilibrium, p: &ModelParams, n_max: usize) -> (Vec<ModeRow>, usize) {
    let j = jacobian_unchecked(eq.u, eq.v, eq.x3(), p);
    let cutoff = provable_cutoff(&j, p);
    let top = n_max.max(cutoff);
    let rows = (0..=top)
        .map(|n| {
            let l = mode_matrix(n, eq, eq.x3(), p);
            let e = l.eigenvalues();
            ModeRow {
                n,
                lambda: (n * n) as f64,
                re: e.re,
                im: e.im[0].abs(),
                det: l.det(),
                trace: l.trace(),
            }
        })
        .collect();
    (rows, cutoff)
}

fn verdict_of(modes: &[ModeRow]) -> Verdict {
    if modes.iter().any(|m| m.re[0] > 0.0) {
        Verdict::Unstable
    } else {
        Verdict::Stable
    }
}

/// Printed determinant of the `e1` mode matrix (the `λ` and `λₙ` of the
/// printed expression are both read as `λₙ`).
pub fn closed_form_det_e1(p: &ModelParams, lambda_n: f64) -> f64 {
    let (m, d, c, a, d1, d2, l) = (p.m, p.d, p.c, p.alpha, p.d1, p.d2, lambda_n);
    let m2a = m * m * a;
    (m * m * d * a - c * d * d * d - m * d * d * a - m * m * d * c + 2.0 * m * d * d * c) / m2a
        + (l * d * d * c * d2 + l * m * m * a * d2 - l * m * m * c * d2 + l * l * m * m * a * d1 * d2 + l * m * m * a * d1 * d
            - l * m * d * d * a * d1)
            / m2a
}

/// Printed trace of the `e1` mode matrix. It lacks the `-d + d²/m`
/// contribution of the second diagonal entry, which shows up as a constant
/// residual against the assembled trace.
pub fn closed_form_trace_e1(p: &ModelParams, lambda_n: f64) -> f64 {
    let (m, d, c, a) = (p.m, p.d, p.c, p.alpha);
    -(m * m * a * lambda_n * (p.d1 + p.d2) + m * m * a + d * d * c - m * m * c) / (m * m * a)
}

pub fn classify_e1(p: &ModelParams, lambda1: f64) -> Result<StabilityReport> {
    classify_e1_with(p, lambda1, DEFAULT_N_MAX)
}

pub fn classify_e1_with(p: &ModelParams, lambda1: f64, n_max: usize) -> Result<StabilityReport> {
    let eq = equilibrium_e1(p)?;
    let margin = p.diffusion_margin(lambda1);
    let region = if p.c <= p.alpha {
        Region::I
    } else if margin >= 0.0 {
        Region::II
    } else {
        Region::III
    };
    let (modes, cutoff) = scan_modes(&eq, p, n_max);
    let mut check = ClosedFormCheck { max_det_residual: 0.0, max_trace_residual: 0.0 };
    for row in &modes {
        check.max_det_residual = check.max_det_residual.max((closed_form_det_e1(p, row.lambda) - row.det).abs());
        check.max_trace_residual = check.max_trace_residual.max((closed_form_trace_e1(p, row.lambda) - row.trace).abs());
    }
    Ok(StabilityReport {
        equilibrium: eq,
        region,
        margin,
        verdict: verdict_of(&modes),
        clause_verdict: region.claimed_verdict(),
        modes,
        provable_cutoff: cutoff,
        closed_form: Some(check),
    })
}

pub fn classify_e2(p: &ModelParams, lambda1: f64) -> Result<StabilityReport> {
    classify_e2_with(p, lambda1, DEFAULT_N_MAX)
}

pub fn classify_e2_with(p: &ModelParams, lambda1: f64, n_max: usize) -> Result<StabilityReport> {
    let eq = equilibrium_e2(p)?;
    let margin = p.diffusion_margin(lambda1);
    let region = if p.c <= p.alpha {
        Region::S3
    } else if margin > 0.0 {
        Region::S4
    } else {
        Region::Undetermined
    };
    let (modes, cutoff) = scan_modes(&eq, p, n_max);
    Ok(StabilityReport {
        equilibrium: eq,
        region,
        margin,
        verdict: verdict_of(&modes),
        clause_verdict: region.claimed_verdict(),
        modes,
        provable_cutoff: cutoff,
        closed_form: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::reaction_terms;

    fn human_free(d: f64) -> ModelParams {
        ModelParams { d1: d, d2: d, c: 1.0, alpha: 0.5, m: 1.0, d: 0.9, h1: 0.0, h2: 0.0, r: 1.0 }
    }

    fn overdev(d: f64) -> ModelParams {
        human_free(d).with_interference(0.1, 0.01)
    }

    fn fd_jacobian(u: f64, v: f64, x3: f64, p: &ModelParams) -> Matrix2 {
        let h = 1e-6;
        let f = |a: f64, b: f64| reaction_terms(a, b, x3, p);
        let (a1, a2) = f(u + h, v);
        let (b1, b2) = f(u - h, v);
        let (c1, c2) = f(u, v + h);
        let (e1, e2) = f(u, v - h);
        Matrix2::new((a1 - b1) / (2.0 * h), (c1 - e1) / (2.0 * h), (a2 - b2) / (2.0 * h), (c2 - e2) / (2.0 * h))
    }

    #[test]
    fn e1_examples() {
        let e = equilibrium_e1(&human_free(1.0)).unwrap();
        assert!((e.u() - 0.8).abs() < 1e-4 && (e.v() - 0.1778).abs() < 1e-4);
        let mut p = human_free(1.0);
        p.c = 0.5;
        p.d = 0.5;
        let e = equilibrium_e1(&p).unwrap();
        assert!((e.u() - 0.5).abs() < 1e-15 && (e.v() - 1.0).abs() < 1e-15);
        p.d = 1.0 - 1e-9;
        let e = equilibrium_e1(&p).unwrap();
        assert!(e.v() > 0.0 && e.v() < 1e-8 && e.u() < 1.0 && e.u() > 1.0 - 1e-8);
        p.d = 1.2;
        assert!(matches!(equilibrium_e1(&p), Err(Error::ConditionViolated(_))));
    }

    #[test]
    fn e2_examples() {
        let e = equilibrium_e2(&overdev(1.0)).unwrap();
        assert!((e.u() - 0.72).abs() < 1e-3 && (e.v() - 0.1424).abs() < 1e-3);
        assert_eq!(equilibrium_e2(&human_free(1.0)).unwrap().u(), equilibrium_e1(&human_free(1.0)).unwrap().u());
        assert_eq!(equilibrium_e2(&human_free(1.0)).unwrap().v(), equilibrium_e1(&human_free(1.0)).unwrap().v());
        let p = ModelParams { d1: 1.0, d2: 1.0, c: 1.0, alpha: 0.5, m: 1.0, d: 0.8, h1: 0.2, h2: 0.05, r: 1.0 };
        let e = equilibrium_e2(&p).unwrap();
        let (f1, f2) = reaction_terms(e.u(), e.v(), 1.0, &p);
        assert!(f1.abs() <= 1e-12 && f2.abs() <= 1e-12);
    }

    #[test]
    fn equilibria_are_roots() {
        let e = equilibrium_e1(&human_free(1.0)).unwrap();
        let (f1, f2) = reaction_terms(e.u(), e.v(), 0.0, &human_free(1.0));
        assert!(f1.abs() <= 1e-12 && f2.abs() <= 1e-12);
        let e = equilibrium_e2(&overdev(1.0)).unwrap();
        let (f1, f2) = reaction_terms(e.u(), e.v(), 1.0, &overdev(1.0));
        assert!(f1.abs() <= 1e-12 && f2.abs() <= 1e-12);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = human_free(1.0);
        let e = equilibrium_e1(&p).unwrap();
        let j = reaction_jacobian(e.u(), e.v(), 0.0, &p).unwrap();
        assert!(j.sub(&fd_jacobian(e.u(), e.v(), 0.0, &p)).max_abs() <= 1e-6);
        assert!(j.get(0, 1) < 0.0 && j.get(1, 0) > 0.0);
        let q = p.with_interference(0.3, 0.2);
        let diff = reaction_jacobian(0.4, 0.3, 1.0, &q).unwrap().sub(&reaction_jacobian(0.4, 0.3, 1.0, &p).unwrap());
        assert!(diff.sub(&Matrix2::diag(-0.3, -0.2)).max_abs() < 1e-15);
        assert!(matches!(reaction_jacobian(0.0, 0.0, 0.0, &p), Err(Error::RatioSingular(_))));
    }

    #[test]
    fn mode_matrix_structure() {
        let p = human_free(1.0);
        let e = equilibrium_e1(&p).unwrap();
        let j = reaction_jacobian(e.u(), e.v(), 0.0, &p).unwrap();
        assert_eq!(mode_matrix(0, &e, 0.0, &p), j);
        let l1 = mode_matrix(1, &e, 0.0, &p);
        assert!((l1.trace() - (j.trace() - 2.0)).abs() < 1e-14);
        let d = mode_matrix(5, &e, 0.0, &p).sub(&mode_matrix(3, &e, 0.0, &p));
        assert!(d.sub(&Matrix2::diag(-16.0, -16.0)).max_abs() < 1e-12);
    }

    #[test]
    fn closed_form_determinant_agrees() {
        for d in [1.0, 0.01, 0.3] {
            let p = human_free(d);
            let rep = classify_e1(&p, 1.0).unwrap();
            let cf = rep.closed_form.unwrap();
            assert!(cf.max_det_residual < 1e-9 * (1.0 + rep.modes.last().unwrap().det.abs()));
            // the trace expression is off by the missing -d + d²/m
            assert!((cf.max_trace_residual - (p.d - p.d * p.d / p.m)).abs() < 1e-12);
        }
    }

    #[test]
    fn classify_e1_margins() {
        let rep = classify_e1(&human_free(1.0), 1.0).unwrap();
        assert!((rep.margin - 1.82).abs() < 1e-3);
        assert_eq!(rep.region, Region::II);
        assert_eq!(rep.verdict, Verdict::Stable);
        let rep = classify_e1(&human_free(0.01), 1.0).unwrap();
        assert!((rep.margin + 0.16).abs() < 1e-3);
        assert_eq!(rep.region, Region::III);
        assert_eq!(rep.clause_verdict, Some(Verdict::Unstable));
        // both diagonal entries of J are negative here, so no mode can grow
        assert_eq!(rep.verdict, Verdict::Stable);
        assert!(rep.clause_conflicts());

        let mut p = human_free(0.05);
        p.c = 0.4;
        let rep = classify_e1(&p, 1.0).unwrap();
        assert_eq!(rep.region, Region::I);
        assert_eq!(rep.verdict, Verdict::Stable);
    }

    #[test]
    fn verdict_matches_mode_scan() {
        // an activator-inhibitor style set with a genuine Turing band
        let p = ModelParams { d1: 0.001, d2: 1.0, c: 1.2, alpha: 1.0, m: 1.0, d: 0.4, h1: 0.0, h2: 0.0, r: 1.0 };
        if let Ok(rep) = classify_e1(&p, 1.0) {
            let any = rep.modes.iter().any(|m| m.re[0] > 0.0);
            assert_eq!(any, rep.verdict == Verdict::Unstable);
            assert!(rep.modes.len() > rep.provable_cutoff);
        }
    }

    #[test]
    fn classify_e2_clauses() {
        let rep = classify_e2(&overdev(1.0), 1.0).unwrap();
        assert_eq!(rep.region, Region::S4);
        assert_eq!(rep.verdict, Verdict::Stable);
        let rep = classify_e2(&overdev(0.001), 1.0).unwrap();
        assert_eq!(rep.region, Region::Undetermined);
        assert_eq!(rep.clause_verdict, None);
        assert_eq!(rep.verdict, Verdict::Stable);

        let a = classify_e1(&human_free(0.2), 1.0).unwrap();
        let b = classify_e2(&human_free(0.2), 1.0).unwrap();
        assert_eq!(a.modes, b.modes);
        assert_eq!(a.margin, b.margin);
        assert_eq!(a.verdict, b.verdict);
    }

    #[test]
    fn turing_scan_examples() {
        let p = human_free(1.0);
        let e = equilibrium_e1(&p).unwrap();
        let scan = turing_scan(&e, 0.0, &p, 20).unwrap();
        assert_eq!(scan.len(), 21);
        assert!(scan.iter().all(|&(_, re)| re < 0.0));
        let tiny = human_free(1e-12);
        let j0 = turing_scan(&e, 0.0, &tiny, 1).unwrap()[0].1;
        for (_, re) in turing_scan(&e, 0.0, &tiny, 10).unwrap() {
            assert!((re - j0).abs() < 1e-9);
        }
        assert!(turing_scan(&e, 0.0, &p, 0).is_err());
    }

    #[test]
    fn provable_cutoff_is_sound() {
        let p = human_free(0.01);
        let e = equilibrium_e1(&p).unwrap();
        let j = reaction_jacobian(e.u(), e.v(), 0.0, &p).unwrap();
        let k = provable_cutoff(&j, &p);
        for n in k..k + 50 {
            assert!(mode_matrix(n, &e, 0.0, &p).eigenvalues().max_re() < 0.0);
        }
    }
}
