//! Regenerates the observation tables under `data/`.
//!
//! `cargo run --release -p wetland --example synthetic_data [dir]`

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use wetland::io::write_observation_csv;
use wetland_core::fitting::{synthetic_reference, SimConfig};

fn main() -> anyhow::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("data"));
    std::fs::create_dir_all(&dir)?;
    let obs = synthetic_reference(&SimConfig::default())?;
    write_observation_csv(BufWriter::new(File::create(dir.join("synthetic_fish.csv"))?), obs.years(), obs.fish())?;
    write_observation_csv(BufWriter::new(File::create(dir.join("synthetic_boyciana.csv"))?), obs.years(), obs.boyciana())?;
    println!("wrote {} epochs to {}", obs.len(), dir.display());
    Ok(())
}
