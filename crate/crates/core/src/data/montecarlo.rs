use rand::RngCore;
use rayon::prelude::*;

use super::dgp::{generate_panel, rng_for, DgpConfig};
use crate::econometrics::{run_specification, SpecName};
use crate::error::Result;

/// Two-sided 95% normal critical value.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
pub struct TermRecovery {
    pub term: String,
    pub truth: f64,
    pub mean_estimate: f64,
    pub sd_estimate: f64,
    pub mean_se: f64,
    /// Share of replications whose 95% interval covers the truth.
    pub coverage: f64,
    /// Share of replications rejecting a zero coefficient at 5%.
    pub rejection_rate: f64,
    pub replications: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub spec: SpecName,
    pub replications: usize,
    pub terms: Vec<TermRecovery>,
    /// Rejection rate pooled over terms whose true coefficient is zero.
    pub pooled_null_rejection: Option<f64>,
}

impl MonteCarloSummary {
    pub fn term(&self, name: &str) -> Option<&TermRecovery> {
        self.terms.iter().find(|t| t.term == name)
    }
}

/// Seed of replication `rep` derived from `master`.
pub fn replication_seed(master: u64, rep: usize) -> u64 {
    rng_for(master, rep as u64).next_u64()
}

/// Simulates `replications` panels from `cfg` (seeds derived from
/// `cfg.seed`), fits `spec` on each and summarizes recovery of the
/// estimable terms.
pub fn run_monte_carlo(cfg: &DgpConfig, spec: SpecName, replications: usize) -> Result<MonteCarloSummary> {
    cfg.validate()?;
    let fits = (0..replications)
        .into_par_iter()
        .map(|rep| {
            let c = DgpConfig {
                seed: replication_seed(cfg.seed, rep),
                ..cfg.clone()
            };
            run_specification(spec, &generate_panel(&c)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let Some(first) = fits.first() else {
        return Ok(MonteCarloSummary {
            spec,
            replications,
            terms: vec![],
            pooled_null_rejection: None,
        });
    };
    let mut terms = Vec::new();
    let (mut null_tests, mut null_rejections) = (0usize, 0usize);
    for est in first.estimates.iter().filter(|e| !e.is_absorbed()) {
        let truth = cfg.coefficients.get(&est.name).copied().unwrap_or(0.0);
        let draws: Vec<(f64, f64)> = fits
            .iter()
            .filter_map(|f| {
                let e = f.get(&est.name)?;
                Some((e.coef?, e.se?))
            })
            .collect();
        let n = draws.len() as f64;
        let mean = draws.iter().map(|d| d.0).sum::<f64>() / n;
        let sd = (draws.iter().map(|d| (d.0 - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
        let covered = draws.iter().filter(|(b, s)| (b - truth).abs() <= Z95 * s).count();
        let rejected = draws.iter().filter(|(b, s)| b.abs() > Z95 * s).count();
        if truth == 0.0 {
            null_tests += draws.len();
            null_rejections += rejected;
        }
        terms.push(TermRecovery {
            term: est.name.clone(),
            truth,
            mean_estimate: mean,
            sd_estimate: sd,
            mean_se: draws.iter().map(|d| d.1).sum::<f64>() / n,
            coverage: covered as f64 / n,
            rejection_rate: rejected as f64 / n,
            replications: draws.len(),
        });
    }
    Ok(MonteCarloSummary {
        spec,
        replications,
        terms,
        pooled_null_rejection: (null_tests > 0).then(|| null_rejections as f64 / null_tests as f64),
    })
}
