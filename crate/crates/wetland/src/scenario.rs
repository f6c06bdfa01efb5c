//! Scenario definitions, the builtin set, and the runner that ties the
//! core modules together.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use wetland_core::attractor::{absorbing_region, check_absorption, AbsorbingRegion, DEFAULT_TAIL};
use wetland_core::dynamics::{integrate, max_stable_dt, IntegrateOptions, StateP, Trajectory};
use wetland_core::elliptic::{sech2_profile, solve_fisher_steady, NewtonOptions};
use wetland_core::energy::{check_series, decay_constants, EnergySeries};
use wetland_core::equilibria::{classify_e1, classify_e2, Equilibrium, StabilityReport, Verdict};
use wetland_core::grid::{Field, Grid1D};
use wetland_core::ModelParams;

use crate::io;
use std::io as stdio;

/// Final deviation counted as a return to equilibrium.
pub const RETURN_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum X3Mode {
    Zero,
    One,
    /// Newton solution of the steady human equation seeded with sech².
    Profile,
    Sech2,
}

impl X3Mode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "zero" => Some(X3Mode::Zero),
            "one" => Some(X3Mode::One),
            "profile" => Some(X3Mode::Profile),
            "sech2" => Some(X3Mode::Sech2),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            X3Mode::Zero => "zero",
            X3Mode::One => "one",
            X3Mode::Profile => "profile",
            X3Mode::Sech2 => "sech2",
        }
    }
}

/// Equilibrium the run is perturbed from and measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    E1,
    E2,
}

impl Reference {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "e1" => Some(Reference::E1),
            "e2" => Some(Reference::E2),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Artifact {
    Trajectory,
    Stability,
    Energy,
    Plot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: ModelParams,
    pub x3_mode: X3Mode,
    pub reference: Reference,
    /// Initial condition: reference equilibrium + `amplitude · cos(mode z)`.
    pub amplitude: f64,
    pub mode: usize,
    pub t_end: f64,
    /// `None` uses the explicit stability limit.
    pub dt: Option<f64>,
    pub record_dt: f64,
    pub grid_n: usize,
    pub outputs: Vec<Artifact>,
}

impl Scenario {
    pub fn new(name: &str, params: ModelParams, x3_mode: X3Mode, reference: Reference) -> Self {
        Scenario {
            name: name.to_string(),
            params,
            x3_mode,
            reference,
            amplitude: 0.05,
            mode: 1,
            t_end: 200.0,
            dt: None,
            record_dt: 1.0,
            grid_n: 200,
            outputs: vec![Artifact::Trajectory, Artifact::Stability, Artifact::Energy, Artifact::Plot],
        }
    }
}

pub const BUILTIN_NAMES: [&str; 6] = [
    "human-free-stable",
    "human-free-unstable",
    "overdev-stable",
    "overdev-unstable",
    "coexist-stable",
    "coexist-unstable",
];

fn human_free(d: f64) -> ModelParams {
    ModelParams { d1: d, d2: d, c: 1.0, alpha: 0.5, m: 1.0, d: 0.9, h1: 0.0, h2: 0.0, r: 1.0 }
}

fn coexist(r: f64) -> ModelParams {
    ModelParams { d1: 0.01, d2: 0.01, c: 1.0, alpha: 0.5, m: 1.0, d: 0.3, h1: 0.01, h2: 0.3, r }
}

pub fn builtin(name: &str) -> Option<Scenario> {
    let s = match name {
        "human-free-stable" => Scenario::new(name, human_free(1.0), X3Mode::Zero, Reference::E1),
        "human-free-unstable" => Scenario::new(name, human_free(0.01), X3Mode::Zero, Reference::E1),
        "overdev-stable" => Scenario::new(name, human_free(1.0).with_interference(0.1, 0.01), X3Mode::One, Reference::E2),
        "overdev-unstable" => Scenario::new(name, human_free(0.001).with_interference(0.1, 0.01), X3Mode::One, Reference::E2),
        "coexist-stable" => Scenario::new(name, coexist(1.001), X3Mode::Sech2, Reference::E2),
        "coexist-unstable" => Scenario::new(name, coexist(100.0), X3Mode::Sech2, Reference::E2),
        _ => return None,
    };
    Some(s)
}

pub fn builtins() -> Vec<Scenario> {
    BUILTIN_NAMES.iter().map(|n| builtin(n).expect("listed")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Final deviation from the reference at most [`RETURN_TOL`].
    Returned,
    /// Final deviation above the initial perturbation amplitude.
    Departed,
    Inconclusive,
}

impl Outcome {
    pub fn classify(final_dev: f64, amplitude: f64) -> Self {
        if final_dev <= RETURN_TOL {
            Outcome::Returned
        } else if final_dev > amplitude {
            Outcome::Departed
        } else {
            Outcome::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Returned => "returned",
            Outcome::Departed => "departed",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario {name}: {source}")]
    Model { name: String, source: wetland_core::Error },
    #[error("scenario {name}: writing {path}: {source}")]
    Io { name: String, path: PathBuf, source: stdio::Error },
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub scenario: Scenario,
    pub grid: Grid1D,
    pub dt: f64,
    pub x3: Field,
    pub equilibrium: Equilibrium,
    pub stability: StabilityReport,
    pub region: AbsorbingRegion,
    /// `None` when integration aborted; see the `integration` check.
    pub trajectory: Option<Trajectory>,
    pub energy: Option<EnergySeries>,
    /// `(δ, q)` when the decay hypothesis holds.
    pub decay: Option<(f64, f64)>,
    pub final_deviation: Option<f64>,
    pub outcome: Option<Outcome>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ScenarioRun {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn human_profile(s: &Scenario, grid: &Grid1D, notes: &mut Vec<String>) -> Result<Field, wetland_core::Error> {
    Ok(match s.x3_mode {
        X3Mode::Zero => grid.constant(0.0),
        X3Mode::One => grid.constant(1.0),
        X3Mode::Sech2 => sech2_profile(s.params.r, grid),
        X3Mode::Profile => {
            let seed = sech2_profile(s.params.r, grid);
            let sol = solve_fisher_steady(s.params.r, grid, &seed, NewtonOptions::default())?;
            notes.push(format!(
                "human profile: Newton reached the {:?} branch in {} iterations (residual {:.2e})",
                sol.branch(),
                sol.newton_iters,
                sol.residual_norm
            ));
            if !sol.is_nontrivial() {
                notes.push("human profile: nonconstant branch unavailable at this r and grid".into());
            }
            sol.profile
        }
    })
}

/// Runs a scenario in memory. Model errors that make the run meaningless
/// (invalid parameters, missing reference equilibrium) are returned as
/// errors; failures during the run are recorded as failed checks.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioRun, ScenarioError> {
    let wrap = |source| ScenarioError::Model { name: s.name.clone(), source };
    let p = &s.params;
    p.validate().map_err(wrap)?;
    let grid = Grid1D::new(s.grid_n).map_err(wrap)?;
    let mut notes = Vec::new();
    let x3 = human_profile(s, &grid, &mut notes).map_err(wrap)?;

    let stability = match s.reference {
        Reference::E1 => classify_e1(p, 1.0),
        Reference::E2 => classify_e2(p, 1.0),
    }
    .map_err(wrap)?;
    let eq = stability.equilibrium;
    let region = absorbing_region(p);
    let dt = s.dt.unwrap_or_else(|| max_stable_dt(&grid, p));
    let ic = StateP::perturbed_constant(&grid, eq.u(), eq.v(), s.amplitude, s.mode);
    let mut checks = Vec::new();

    let x3_matches_reference =
        matches!((s.reference, s.x3_mode), (Reference::E1, X3Mode::Zero) | (Reference::E2, X3Mode::One));
    if !x3_matches_reference {
        notes.push(format!(
            "the reference equilibrium belongs to x3 = {}; with x3 mode {} it is not a steady state, so the linear verdict is informational",
            eq.x3(),
            s.x3_mode.as_str()
        ));
    }

    let traj = match integrate(&ic, &x3, p, IntegrateOptions { t_end: s.t_end, dt, record_dt: s.record_dt }) {
        Ok(t) => {
            checks.push(Check { name: "integration", passed: true, detail: format!("{} snapshots", t.snapshots.len()) });
            Some(t)
        }
        Err(e) => {
            checks.push(Check { name: "integration", passed: false, detail: e.to_string() });
            None
        }
    };

    let rho = wetland_core::equilibria::reaction_jacobian(eq.u(), eq.v(), eq.x3(), p).map_err(wrap)?.spectral_radius();
    let decay = match decay_constants(p, rho, 1.0, &x3) {
        Ok(dq) => Some(dq),
        Err(e) => {
            notes.push(format!("energy bound not applicable: {e} (rho = {rho:.4} at the reference equilibrium)"));
            None
        }
    };

    let (mut energy, mut final_deviation, mut outcome) = (None, None, None);
    if let Some(t) = &traj {
        let min = t.snapshots.iter().map(StateP::min_value).fold(f64::INFINITY, f64::min);
        checks.push(Check {
            name: "nonnegative",
            passed: min >= -wetland_core::dynamics::NEGATIVITY_TOL,
            detail: format!("min density {min:.3e}"),
        });
        let absorbed = check_absorption(t, &region, DEFAULT_TAIL);
        checks.push(Check {
            name: "absorbing-region",
            passed: absorbed,
            detail: format!(
                "tail {:.0}% within [{:.4}, {:.4}] x [{:.4}, {:.4}] + {}",
                100.0 * DEFAULT_TAIL,
                region.x1_lo,
                region.x1_hi,
                region.x2_lo,
                region.x2_hi,
                wetland_core::attractor::ABSORPTION_SLACK
            ),
        });

        let dev = t.last().max_deviation(eq.u(), eq.v());
        let o = Outcome::classify(dev, s.amplitude);
        final_deviation = Some(dev);
        outcome = Some(o);
        if x3_matches_reference {
            let consistent = matches!((stability.verdict, o), (Verdict::Stable, Outcome::Returned) | (Verdict::Unstable, Outcome::Departed));
            checks.push(Check {
                name: "linear-consistency",
                passed: consistent,
                detail: format!("linear verdict {}, trajectory {} (final deviation {dev:.3e})", stability.verdict.as_str(), o.as_str()),
            });
        }

        let (delta, q) = decay.unwrap_or((0.0, 0.0));
        let series = EnergySeries::from_trajectory(t, delta, q);
        if decay.is_some() {
            let (holds, margins) = check_series(&series);
            let worst = margins.iter().cloned().fold(f64::INFINITY, f64::min);
            checks.push(Check {
                name: "energy-bound",
                passed: holds,
                detail: format!("delta {delta:.4}, q {q:.3e}, smallest margin {worst:.3e}"),
            });
        }
        energy = Some(series);
    }

    Ok(ScenarioRun {
        scenario: s.clone(),
        grid,
        dt,
        x3,
        equilibrium: eq,
        stability,
        region,
        trajectory: traj,
        energy,
        decay,
        final_deviation,
        outcome,
        checks,
        notes,
    })
}

pub fn summary_text(run: &ScenarioRun) -> String {
    let s = &run.scenario;
    let mut out = String::new();
    let _ = writeln!(out, "scenario         {}", s.name);
    let _ = writeln!(out, "parameters       {}", s.params.entries().iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" "));
    let _ = writeln!(out, "grid             n = {} (h = {:.6}), dt = {:.6e}, t_end = {}, record_dt = {}", s.grid_n, run.grid.spacing(), run.dt, s.t_end, s.record_dt);
    let _ = writeln!(out, "human density    {} (min {:.4}, max {:.4})", s.x3_mode.as_str(), run.x3.min(), run.x3.max());
    let _ = writeln!(out, "initial state    reference + {} cos({} z)", s.amplitude, s.mode);
    let _ = writeln!(out);
    let _ = writeln!(out, "[stability]");
    out.push_str(&io::stability_summary(&run.stability));
    let _ = writeln!(out);
    let _ = writeln!(out, "[absorbing region]");
    let r = &run.region;
    let _ = writeln!(out, "x1 in [{:.6}, {:.6}], x2 in [{:.6}, {:.6}]", r.x1_lo, r.x1_hi, r.x2_lo, r.x2_hi);
    let _ = writeln!(out, "persistence {}, extinction {}", r.persistence, r.extinction);
    let _ = writeln!(out);
    let _ = writeln!(out, "[dynamics]");
    match (run.outcome, run.final_deviation) {
        (Some(o), Some(d)) => {
            let _ = writeln!(out, "outcome          {} (final max deviation {:.3e})", o.as_str(), d);
        }
        _ => {
            let _ = writeln!(out, "outcome          not available");
        }
    }
    if let Some((d, q)) = run.decay {
        let _ = writeln!(out, "energy decay     delta = {d:.6}, q = {q:.6e}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[checks]");
    for c in &run.checks {
        let _ = writeln!(out, "{:<5} {:<20} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if !run.notes.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "[notes]");
        for n in &run.notes {
            let _ = writeln!(out, "- {n}");
        }
    }
    out
}

fn create(run: &ScenarioRun, path: PathBuf) -> Result<BufWriter<File>, ScenarioError> {
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|source| ScenarioError::Io { name: run.scenario.name.clone(), path, source })
}

/// Writes `<dir>/{trajectory.csv, stability.csv, energy.csv, summary.txt}`
/// plus the plot files when requested.
pub fn write_artifacts(run: &ScenarioRun, dir: &Path) -> Result<(), ScenarioError> {
    let io_err = |path: PathBuf| {
        let name = run.scenario.name.clone();
        move |source| ScenarioError::Io { name, path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir.to_path_buf()))?;
    let outputs = &run.scenario.outputs;
    if let Some(t) = &run.trajectory {
        if outputs.contains(&Artifact::Trajectory) {
            let p = dir.join("trajectory.csv");
            io::write_trajectory_csv(create(run, p.clone())?, t).map_err(io_err(p))?;
        }
        if outputs.contains(&Artifact::Plot) {
            let p = dir.join("snapshots.dat");
            io::write_gnuplot_blocks(create(run, p.clone())?, t).map_err(io_err(p))?;
            let p = dir.join("plot.gp");
            fs::write(&p, io::plot_script(&run.scenario.name, t.snapshots.len())).map_err(io_err(p))?;
        }
    }
    if outputs.contains(&Artifact::Stability) {
        let p = dir.join("stability.csv");
        io::write_stability_csv(create(run, p.clone())?, &run.stability).map_err(io_err(p))?;
    }
    if let (Some(e), true) = (&run.energy, outputs.contains(&Artifact::Energy)) {
        let p = dir.join("energy.csv");
        io::write_energy_csv(create(run, p.clone())?, e, run.decay.is_some()).map_err(io_err(p))?;
    }
    if matches!(run.scenario.x3_mode, X3Mode::Profile | X3Mode::Sech2) {
        let p = dir.join("profile.csv");
        io::write_profile_csv(create(run, p.clone())?, &run.x3).map_err(io_err(p))?;
    }
    let p = dir.join("summary.txt");
    fs::write(&p, summary_text(run)).map_err(io_err(p))?;
    Ok(())
}

/// Runs and writes each scenario under `<out>/<name>/`, concurrently when
/// `parallel` is set. Results keep the input order.
pub fn run_all(scenarios: &[Scenario], out: &Path, parallel: bool) -> Vec<Result<ScenarioRun, ScenarioError>> {
    let one = |s: &Scenario| {
        let run = run_scenario(s)?;
        write_artifacts(&run, &out.join(&s.name))?;
        Ok(run)
    };
    if parallel {
        scenarios.par_iter().map(one).collect()
    } else {
        scenarios.iter().map(one).collect()
    }
}
