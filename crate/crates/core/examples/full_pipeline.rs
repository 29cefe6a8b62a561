//! Runs every command-line stage in a scratch directory: simulate a panel
//! and quotes, extract surprises, calibrate, sweep, fit, report and describe.
//!
//! cargo run --release --example full_pipeline -- [output_dir]

use std::path::PathBuf;

use clap::Parser;
use mpesg::cli::{execute, Cli};

fn run(args: &[&str]) -> mpesg::Result<()> {
    println!("mpesg {}", args.join(" "));
    execute(&Cli::parse_from(std::iter::once("mpesg").chain(args.iter().copied())))
}

fn main() -> mpesg::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("mpesg_pipeline"));
    std::fs::create_dir_all(&dir).map_err(|source| mpesg::Error::Io { path: dir.clone(), source })?;
    let path = |name: &str| dir.join(name).to_string_lossy().into_owned();

    run(&["simulate-panel", "--out", &path("panel.csv"), "--quotes-out", &path("quotes.csv")])?;
    run(&["extract-surprises", "--quotes", &path("quotes.csv"), "--out", &path("surprises.csv")])?;
    run(&["calibrate", "--out", &path("calibration.csv")])?;
    run(&["sweep", "--vary", "mu", "--grid", "0.1:0.5:9", "--out", &path("sweep_mu.csv")])?;
    run(&[
        "fit",
        "--panel",
        &path("panel.csv"),
        "--surprises",
        &path("panel_surprises.csv"),
        "--spec",
        "baseline,esg_only,full,industry_event_fe",
        "--out",
        &path("fits.csv"),
    ])?;
    run(&["report", "--fits", &path("fits.csv"), "--style", "table13", "--out", &path("table.md")])?;
    run(&[
        "describe",
        "--panel",
        &path("panel.csv"),
        "--surprises",
        &path("panel_surprises.csv"),
        "--out",
        &path("describe.csv"),
    ])?;

    let table = dir.join("table.md");
    let text = std::fs::read_to_string(&table).map_err(|source| mpesg::Error::Io { path: table, source })?;
    println!("\n{text}");
    println!("outputs in {}", dir.display());
    Ok(())
}
