//! Writes every figure preset as CSV into a directory (default `figures/`).
//!
//! `cargo run --release --example figure_tables -- out_dir`

use std::fs::{self, File};
use std::path::PathBuf;

use ptcmm::sweep::{figure_preset, run_sweep, Figure};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    fs::create_dir_all(&dir)?;
    for fig in Figure::ALL {
        let result = run_sweep(&figure_preset(fig.name())?, 0)?;
        let path = dir.join(format!("{}.csv", fig.name()));
        result.table().write_csv(File::create(&path)?)?;
        println!("{} rows -> {}", result.rows(), path.display());
    }
    Ok(())
}
