//! Event returns, CSV ingestion and output, and the synthetic data
//! generator used for verification and Monte Carlo studies.

pub mod dgp;
pub mod io;
pub mod montecarlo;
pub mod quotes;
pub mod returns;

pub use dgp::{default_industries, event_calendar, generate_panel, generate_surprises, panel_events, DgpConfig, EventSurprise, IndustryProfile};
pub use montecarlo::{replication_seed, run_monte_carlo, MonteCarloSummary, TermRecovery};
pub use quotes::{generate_quotes, QuoteOptions, PATH_LOADINGS, TARGET_LOADINGS};
pub use returns::{event_return, PricePair};
