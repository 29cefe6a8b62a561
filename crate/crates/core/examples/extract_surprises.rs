//! Builds synthetic futures and Treasury quotes from known target and path
//! surprises, then recovers the two factors from the quotes alone.
//!
//! cargo run --example extract_surprises

use mpesg::data::{generate_quotes, generate_surprises, DgpConfig, QuoteOptions};
use mpesg::surprise::{extract_surprises, PcaOptions, LATE_MONTH_THRESHOLD};

fn corr(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

fn main() -> mpesg::Result<()> {
    let truth = generate_surprises(&DgpConfig::default())?;
    let quotes = generate_quotes(&truth, QuoteOptions::default());
    let ex = extract_surprises(&quotes, LATE_MONTH_THRESHOLD, PcaOptions::default())?;

    println!("{} events, {} rejected", ex.assembly.panel.len(), ex.assembly.rejected.len());
    println!("eigenvalues: {:?}", ex.decomposition.eigenvalues.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());
    println!("{:<6}{:>10}{:>10}{:>8}", "", "target", "path", "R2");
    for l in &ex.surprises.loadings {
        println!("{:<6}{:>10.3}{:>10.3}{:>8.3}", l.instrument, l.target, l.path, l.r2);
    }

    let ts: Vec<f64> = truth.iter().map(|e| e.ts_bp).collect();
    let ps: Vec<f64> = truth.iter().map(|e| e.ps_bp).collect();
    println!("corr(true TS, recovered TS) = {:.5}", corr(&ts, &ex.surprises.ts));
    println!("corr(true PS, recovered PS) = {:.5}", corr(&ps, &ex.surprises.ps));
    println!("corr(recovered TS, PS)      = {:.2e}", corr(&ex.surprises.ts, &ex.surprises.ps));
    Ok(())
}
