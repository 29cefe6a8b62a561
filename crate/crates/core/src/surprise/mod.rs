//! Target and path monetary-policy surprises from intraday futures quotes.
//!
//! Pipeline: day-count-scaled raw surprises ([`compute_raw`]) per event, a
//! `T x 5` instrument panel ([`assemble_panel`]), principal components
//! ([`pca_decompose`]) and an identifying rotation
//! ([`rotate_to_target_path`]). All surprises are in basis points.

mod panel;
mod pca;
mod raw;
mod rotation;
mod stability;
mod summary;

pub use panel::{assemble_panel, EventMeta, InstrumentPanel, PanelAssembly, Rejection, INSTRUMENTS, MIN_EVENTS};
pub use pca::{moment_matrix, pca_decompose, FactorDecomposition, PcaBasis, PcaOptions, RETAINED_FACTORS};
pub use raw::{compute_mp1, compute_mp2, compute_raw, EventQuoteSet, RawSurprises, ScaledSurprise, LATE_MONTH_THRESHOLD};
pub use rotation::{rotate_to_target_path, MaturityLoading, PolicySurprises};
pub use stability::{subperiod_stability, SubperiodRow};
pub use summary::{surprise_summary, SeriesStats, SeriesSummary, SurpriseSummary};

use crate::error::Result;

/// Everything produced by one extraction run.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub assembly: PanelAssembly,
    pub decomposition: FactorDecomposition,
    pub surprises: PolicySurprises,
}

/// Quotes to rotated surprises in one call.
pub fn extract_surprises(events: &[EventQuoteSet], late_month_threshold: u32, options: PcaOptions) -> Result<Extraction> {
    let assembly = assemble_panel(events, late_month_threshold)?;
    let decomposition = pca_decompose(&assembly.panel, options)?;
    let surprises = rotate_to_target_path(&decomposition, &assembly.panel)?;
    Ok(Extraction {
        assembly,
        decomposition,
        surprises,
    })
}
