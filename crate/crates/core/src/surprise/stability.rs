use chrono::NaiveDate;

use super::panel::{InstrumentPanel, MIN_EVENTS};
use super::pca::{pca_decompose, PcaOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SubperiodRow {
    pub label: String,
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    pub n_events: usize,
    pub first_eigenvalue: f64,
    pub second_eigenvalue: f64,
    /// Share of total variance explained by the first two components.
    pub cumulative_share: f64,
}

/// Re-runs the decomposition on each window delimited by `period_breaks`
/// (`[start, b1)`, `[b1, b2)`, ..., `[bk, end]`).
pub fn subperiod_stability(
    panel: &InstrumentPanel,
    period_breaks: &[NaiveDate],
    options: PcaOptions,
) -> Result<Vec<SubperiodRow>> {
    let mut breaks = period_breaks.to_vec();
    breaks.sort();
    breaks.dedup();
    let mut bounds: Vec<Option<NaiveDate>> = vec![None];
    bounds.extend(breaks.iter().copied().map(Some));
    bounds.push(None);

    bounds
        .windows(2)
        .map(|w| {
            let (start, end) = (w[0], w[1]);
            let sub = panel.subset(start, end);
            if sub.len() < MIN_EVENTS {
                return Err(Error::InsufficientData(format!(
                    "period {} has {} events (need at least {MIN_EVENTS})",
                    period_label(start, end),
                    sub.len()
                )));
            }
            let dec = pca_decompose(&sub, options)?;
            Ok(SubperiodRow {
                label: match (sub.events.first(), sub.events.last()) {
                    (Some(a), Some(b)) => format!("{}-{}", a.date.format("%Y"), b.date.format("%Y")),
                    _ => period_label(start, end),
                },
                start,
                end,
                n_events: sub.len(),
                first_eigenvalue: dec.eigenvalues[0],
                second_eigenvalue: dec.eigenvalues[1],
                cumulative_share: dec.variance_shares[0] + dec.variance_shares[1],
            })
        })
        .collect()
}

fn period_label(start: Option<NaiveDate>, end: Option<NaiveDate>) -> String {
    let fmt = |d: Option<NaiveDate>| d.map(|d| d.to_string()).unwrap_or_else(|| "..".into());
    format!("[{}, {})", fmt(start), fmt(end))
}
