//! CSV and plain-text artifact formats.

use std::fmt::Write as _;
use std::io::{self, Write};

use wetland_core::dynamics::Trajectory;
use wetland_core::energy::EnergySeries;
use wetland_core::equilibria::StabilityReport;
use wetland_core::fitting::{FitResult, ObservationSet, N_LOCATIONS};
use wetland_core::grid::Field;

/// `t,z,x1,x2`, one row per snapshot and node.
pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &Trajectory) -> io::Result<()> {
    writeln!(w, "t,z,x1,x2")?;
    for s in &traj.snapshots {
        for ((z, a), b) in s.grid().nodes().zip(s.x1.values()).zip(s.x2.values()) {
            writeln!(w, "{},{},{},{}", s.t, z, a, b)?;
        }
    }
    Ok(())
}

/// Whitespace-separated `z x1 x2` blocks, one per snapshot, separated by
/// two blank lines (gnuplot `index`).
pub fn write_gnuplot_blocks<W: Write>(mut w: W, traj: &Trajectory) -> io::Result<()> {
    for (k, s) in traj.snapshots.iter().enumerate() {
        if k > 0 {
            writeln!(w, "\n")?;
        }
        writeln!(w, "# t = {}", s.t)?;
        for ((z, a), b) in s.grid().nodes().zip(s.x1.values()).zip(s.x2.values()) {
            writeln!(w, "{z} {a} {b}")?;
        }
    }
    Ok(())
}

/// Gnuplot script for the files written by [`write_gnuplot_blocks`] and
/// [`write_energy_csv`].
pub fn plot_script(title: &str, n_blocks: usize) -> String {
    let last = n_blocks.saturating_sub(1);
    format!(
        "set datafile separator whitespace\n\
         set xlabel 'z'\n\
         set title '{title}: final snapshot'\n\
         plot 'snapshots.dat' index {last} using 1:2 with lines title 'x1', \\\n\
         \x20    'snapshots.dat' index {last} using 1:3 with lines title 'x2'\n\
         pause -1\n\
         set datafile separator ','\n\
         set xlabel 't'\n\
         set logscale y\n\
         set title '{title}: energy'\n\
         plot 'energy.csv' using 1:2 every ::1 with lines title 'E', \\\n\
         \x20    'energy.csv' using 1:3 every ::1 with lines title 'bound'\n\
         pause -1\n"
    )
}

/// `n,lambda,re1,re2,im,det,trace`.
pub fn write_stability_csv<W: Write>(mut w: W, rep: &StabilityReport) -> io::Result<()> {
    writeln!(w, "n,lambda,re1,re2,im,det,trace")?;
    for m in &rep.modes {
        writeln!(w, "{},{},{},{},{},{},{}", m.n, m.lambda, m.re[0], m.re[1], m.im, m.det, m.trace)?;
    }
    Ok(())
}

pub fn stability_summary(rep: &StabilityReport) -> String {
    let e = &rep.equilibrium;
    let mut s = String::new();
    let _ = writeln!(s, "equilibrium      {:?} u = {:.6} v = {:.6}", e.kind(), e.u(), e.v());
    let _ = writeln!(s, "region           {}", rep.region.as_str());
    let _ = writeln!(s, "margin           {:.6}", rep.margin);
    let _ = writeln!(s, "mode scan        {} (modes 0..={})", rep.verdict.as_str(), rep.modes.len() - 1);
    let _ = writeln!(s, "provably stable  n >= {}", rep.provable_cutoff);
    match rep.clause_verdict {
        Some(v) => {
            let _ = writeln!(s, "clause claims    {}", v.as_str());
        }
        None => {
            let _ = writeln!(s, "clause claims    nothing (sufficient condition not met)");
        }
    }
    if rep.clause_conflicts() {
        let _ = writeln!(s, "note             clause and mode scan disagree; the mode scan is authoritative");
    }
    if let Some(m) = rep.first_unstable_mode() {
        let _ = writeln!(s, "first unstable   n = {m}");
    }
    if let Some(cf) = rep.closed_form {
        let _ = writeln!(
            s,
            "closed form      max |det residual| = {:.3e}, max |trace residual| = {:.3e}",
            cf.max_det_residual, cf.max_trace_residual
        );
    }
    s
}

/// `t,E,bound,avg_dev`. The bound column is empty when the decay
/// hypothesis fails.
pub fn write_energy_csv<W: Write>(mut w: W, series: &EnergySeries, with_bound: bool) -> io::Result<()> {
    writeln!(w, "t,E,bound,avg_dev")?;
    let bound = series.bound();
    for i in 0..series.times.len() {
        if with_bound {
            writeln!(w, "{},{},{},{}", series.times[i], series.energy[i], bound[i], series.spatial_avg_dev[i])?;
        } else {
            writeln!(w, "{},{},,{}", series.times[i], series.energy[i], series.spatial_avg_dev[i])?;
        }
    }
    Ok(())
}

/// `z,x3`.
pub fn write_profile_csv<W: Write>(mut w: W, profile: &Field) -> io::Result<()> {
    writeln!(w, "z,x3")?;
    for (z, v) in profile.grid().nodes().zip(profile.values()) {
        writeln!(w, "{z},{v}")?;
    }
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum ObservationError {
    #[error("empty observation file")]
    Empty,
    #[error("bad header {0:?}; expected year,z1,z2,z3,z4,z5,z6")]
    Header(String),
    #[error("line {line}: expected 7 columns, found {found}")]
    Columns { line: usize, found: usize },
    #[error("line {line}: cannot parse {text:?}")]
    Number { line: usize, text: String },
    #[error("line {line}: negative density")]
    Negative { line: usize },
    #[error("line {line}: years must increase")]
    Order { line: usize },
}

/// One species table: header `year,z1,...,z6`, then one row per year.
pub fn parse_observation_csv(text: &str) -> Result<(Vec<f64>, Vec<[f64; N_LOCATIONS]>), ObservationError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(ObservationError::Empty)?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let expected = ["year", "z1", "z2", "z3", "z4", "z5", "z6"];
    if cols != expected {
        return Err(ObservationError::Header(header.to_string()));
    }
    let mut years = Vec::new();
    let mut rows = Vec::new();
    for (i, l) in lines {
        let line = i + 1;
        let cells: Vec<&str> = l.split(',').map(str::trim).collect();
        if cells.len() != N_LOCATIONS + 1 {
            return Err(ObservationError::Columns { line, found: cells.len() });
        }
        let num = |t: &str| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or(ObservationError::Number { line, text: t.to_string() });
        let year = num(cells[0])?;
        if years.last().is_some_and(|&y| year <= y) {
            return Err(ObservationError::Order { line });
        }
        let mut row = [0.0; N_LOCATIONS];
        for (slot, cell) in row.iter_mut().zip(&cells[1..]) {
            *slot = num(cell)?;
            if *slot < 0.0 {
                return Err(ObservationError::Negative { line });
            }
        }
        years.push(year);
        rows.push(row);
    }
    if years.is_empty() {
        return Err(ObservationError::Empty);
    }
    Ok((years, rows))
}

pub fn write_observation_csv<W: Write>(mut w: W, years: &[f64], rows: &[[f64; N_LOCATIONS]]) -> io::Result<()> {
    writeln!(w, "year,z1,z2,z3,z4,z5,z6")?;
    for (y, r) in years.iter().zip(rows) {
        write!(w, "{y}")?;
        for v in r {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_observation_pair<W: Write>(fish: W, boyciana: W, obs: &ObservationSet) -> io::Result<()> {
    write_observation_csv(fish, obs.years(), obs.fish())?;
    write_observation_csv(boyciana, obs.years(), obs.boyciana())
}

/// `iteration,objective`.
pub fn write_fit_trace<W: Write>(mut w: W, fit: &FitResult) -> io::Result<()> {
    writeln!(w, "iteration,objective")?;
    for (i, v) in fit.trace.iter().enumerate() {
        writeln!(w, "{i},{v}")?;
    }
    Ok(())
}

pub fn fit_summary(fit: &FitResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "initial objective  {:.6e}", fit.initial_objective);
    let _ = writeln!(s, "final objective    {:.6e}", fit.objective);
    let _ = writeln!(s, "accuracy           {:.3}%", fit.accuracy);
    let _ = writeln!(s, "iterations         {}", fit.iterations);
    let _ = writeln!(s, "evaluations        {}", fit.evaluations);
    if fit.budget_exhausted {
        let _ = writeln!(s, "status             budget exhausted (best point so far)");
    }
    let _ = writeln!(s, "parameters:");
    for (k, v) in fit.params.entries() {
        let _ = writeln!(s, "  {k:<6} = {v:.6}");
    }
    s
}
