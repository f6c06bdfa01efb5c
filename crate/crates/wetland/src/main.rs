use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use wetland::config::{parse_params, parse_scenario, read_to_string};
use wetland::io;
use wetland::scenario::{self, Reference, Scenario, ScenarioRun, X3Mode, BUILTIN_NAMES};
use wetland_core::elliptic::{check_integral_bound, sech2_profile, solve_fisher_steady, NewtonOptions};
use wetland_core::fitting::{fit, reference_initial_params, ObservationSet, SimConfig};
use wetland_core::grid::Grid1D;

#[derive(Parser)]
#[command(name = "wetland", version, about = "Fish/boyciana/human reaction-diffusion model runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Parameter or scenario file (`name = value` per line)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Interior grid nodes
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Final time
    #[arg(long, global = true)]
    t_end: Option<f64>,
    /// Time step (default: the explicit stability limit)
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Run independent scenarios concurrently
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the configured scenario and write trajectory and plot files
    Simulate,
    /// Linear stability report for the configured parameters
    Stability,
    /// Energy series and decay bound for the configured scenario
    Energy,
    /// Fit parameters to observation tables
    Fit {
        /// Fish table (`year,z1,...,z6`)
        #[arg(long)]
        fish: PathBuf,
        /// Boyciana table (`year,z1,...,z6`)
        #[arg(long)]
        boyciana: PathBuf,
        /// Objective evaluation budget
        #[arg(long, default_value_t = 5000)]
        budget: usize,
    },
    /// Solve the steady human equation and write the profile
    Profile {
        /// Logistic growth rate (default: `r` from --config)
        #[arg(long)]
        r: Option<f64>,
    },
    /// Run a builtin scenario by name, or `all`
    Scenario { name: String },
    /// List builtin scenarios
    ListScenarios,
}

impl Cli {
    fn apply_overrides(&self, s: &mut Scenario) {
        if let Some(n) = self.grid_n {
            s.grid_n = n;
        }
        if let Some(t) = self.t_end {
            s.t_end = t;
        }
        if self.dt.is_some() {
            s.dt = self.dt;
        }
    }

    fn configured_scenario(&self) -> Result<Scenario> {
        let path = self.config.as_ref().ok_or_else(|| anyhow!("--config is required for this command"))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("custom").to_string();
        let text = read_to_string(path)?;
        let defaults = Scenario::new(&name, wetland_core::fitting::reference_initial_params(), X3Mode::Zero, Reference::E1);
        let mut s = parse_scenario(&name, &text, &defaults).with_context(|| format!("parsing {}", path.display()))?;
        self.apply_overrides(&mut s);
        Ok(s)
    }
}

fn report(run: &ScenarioRun, dir: &Path) -> bool {
    for c in &run.checks {
        println!("{:<5} {:<20} {:<20} {}", if c.passed { "PASS" } else { "FAIL" }, run.scenario.name, c.name, c.detail);
    }
    if let Some(c) = run.first_failure() {
        eprintln!("scenario {} failed check {}; see {}", run.scenario.name, c.name, dir.join("summary.txt").display());
        false
    } else {
        true
    }
}

fn run_scenarios(cli: &Cli, list: Vec<Scenario>) -> Result<bool> {
    let mut names: Vec<&str> = list.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        bail!("scenario names must be unique");
    }
    let mut ok = true;
    for (s, r) in list.iter().zip(scenario::run_all(&list, &cli.out, cli.parallel)) {
        let run = r?;
        ok &= report(&run, &cli.out.join(&s.name));
    }
    Ok(ok)
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::ListScenarios => {
            for n in BUILTIN_NAMES {
                let s = scenario::builtin(n).expect("listed");
                println!("{n:<22} x3={:<7} {}", s.x3_mode.as_str(), wetland::config::format_params(&s.params).replace('\n', " ").trim_end());
            }
            Ok(true)
        }
        Command::Scenario { name } => {
            let mut list = if name == "all" {
                scenario::builtins()
            } else {
                vec![scenario::builtin(name).ok_or_else(|| anyhow!("unknown scenario {name:?}; try list-scenarios"))?]
            };
            for s in &mut list {
                cli.apply_overrides(s);
            }
            run_scenarios(cli, list)
        }
        Command::Simulate | Command::Energy => {
            let mut s = cli.configured_scenario()?;
            s.outputs = match cli.command {
                Command::Simulate => vec![scenario::Artifact::Trajectory, scenario::Artifact::Plot],
                _ => vec![scenario::Artifact::Energy],
            };
            run_scenarios(cli, vec![s])
        }
        Command::Stability => {
            let s = cli.configured_scenario()?;
            let rep = match s.reference {
                Reference::E1 => wetland_core::equilibria::classify_e1(&s.params, 1.0),
                Reference::E2 => wetland_core::equilibria::classify_e2(&s.params, 1.0),
            }?;
            let dir = cli.out.join(&s.name);
            fs::create_dir_all(&dir)?;
            io::write_stability_csv(BufWriter::new(File::create(dir.join("stability.csv"))?), &rep)?;
            let text = io::stability_summary(&rep);
            fs::write(dir.join("summary.txt"), &text)?;
            print!("{text}");
            Ok(true)
        }
        Command::Profile { r } => {
            let r = match (r, &cli.config) {
                (Some(r), _) => *r,
                (None, Some(path)) => parse_params(&read_to_string(path)?)?.r,
                (None, None) => bail!("give --r or --config"),
            };
            let grid = Grid1D::new(cli.grid_n.unwrap_or(200))?;
            let seed = sech2_profile(r, &grid);
            fs::create_dir_all(&cli.out)?;
            io::write_profile_csv(BufWriter::new(File::create(cli.out.join("sech2.csv"))?), &seed)?;
            match solve_fisher_steady(r, &grid, &seed, NewtonOptions::default()) {
                Ok(sol) => {
                    io::write_profile_csv(BufWriter::new(File::create(cli.out.join("profile.csv"))?), &sol.profile)?;
                    println!("branch {:?}, {} Newton iterations, residual {:.3e}", sol.branch(), sol.newton_iters, sol.residual_norm);
                    if r > 1.0 {
                        println!("integral bound holds: {}", check_integral_bound(&sol, 1.0)?);
                    }
                }
                Err(e) => println!("Newton from the sech2 seed: {e}"),
            }
            Ok(true)
        }
        Command::Fit { fish, boyciana, budget } => {
            let load = |p: &PathBuf| -> Result<_> {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                io::parse_observation_csv(&text).with_context(|| format!("parsing {}", p.display()))
            };
            let (y1, f) = load(fish)?;
            let (y2, b) = load(boyciana)?;
            if y1 != y2 {
                bail!("fish and boyciana tables list different years");
            }
            let obs = ObservationSet::new(y1, f, b)?;
            let initial = match &cli.config {
                Some(p) => parse_params(&read_to_string(p)?)?,
                None => reference_initial_params(),
            };
            let cfg = SimConfig { grid_n: cli.grid_n.unwrap_or(SimConfig::default().grid_n), ..SimConfig::default() };
            let result = fit(&obs, &initial, *budget, &cfg)?;
            fs::create_dir_all(&cli.out)?;
            io::write_fit_trace(BufWriter::new(File::create(cli.out.join("fit_trace.csv"))?), &result)?;
            let text = io::fit_summary(&result);
            fs::write(cli.out.join("fit_summary.txt"), &text)?;
            fs::write(cli.out.join("fitted.conf"), wetland::config::format_params(&result.params))?;
            print!("{text}");
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
