//! Repeatedly simulates a panel with known coefficients, refits the matching
//! specification and reports interval coverage per term.
//!
//! cargo run --release --example monte_carlo_recovery -- [replications]

use std::time::Instant;

use mpesg::data::{run_monte_carlo, DgpConfig};
use mpesg::econometrics::SpecName;

fn main() -> mpesg::Result<()> {
    let reps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let studies = [
        ("ESG interactions", DgpConfig::esg_interaction_truth(), SpecName::EsgOnly),
        ("regime shift", DgpConfig::regime_shift_truth(), SpecName::ParisFe),
        ("null", DgpConfig::null(), SpecName::EsgOnly),
    ];
    for (title, cfg, spec) in studies {
        let start = Instant::now();
        let mc = run_monte_carlo(&cfg, spec, reps)?;
        println!("{title}: {spec}, {reps} replications, {:.1?}", start.elapsed());
        println!("{:<22}{:>10}{:>10}{:>10}{:>10}{:>10}", "term", "truth", "mean", "sd", "mean se", "coverage");
        for t in &mc.terms {
            println!(
                "{:<22}{:>10.3}{:>10.3}{:>10.3}{:>10.3}{:>10.2}",
                t.term, t.truth, t.mean_estimate, t.sd_estimate, t.mean_se, t.coverage
            );
        }
        if let Some(r) = mc.pooled_null_rejection {
            println!("pooled 5% rejection rate over zero-truth terms: {r:.3}");
        }
        println!();
    }
    Ok(())
}
