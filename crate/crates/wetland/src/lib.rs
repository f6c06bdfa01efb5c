//! File formats, scenario runner and command-line front end for
//! [`wetland_core`].

pub mod config;
pub mod io;
pub mod scenario;

pub use scenario::{builtin, builtins, run_all, run_scenario, Scenario, ScenarioRun};
