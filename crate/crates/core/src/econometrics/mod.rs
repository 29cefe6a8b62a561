//! Fixed-effects panel regressions of event returns on policy surprises,
//! their interactions with ESG scores and firm controls, and event-clustered
//! standard errors.

pub mod covariance;
pub mod data;
pub mod descriptive;
pub mod design;
pub mod fe;
pub mod ols;
pub mod prep;
pub mod specs;

pub use covariance::{cluster_covariance, crv1_factor, hc1_covariance};
pub use data::{FirmEventRecord, PanelDataset};
pub use descriptive::{correlation_matrix, esg_by_industry, summary_statistics, CorrelationMatrix, IndustryRow, SummaryRow};
pub use design::{build_design, default_break_date, Design, Factor, FixedEffects, Grouping, RegressionSpec, SampleFilter, Term};
pub use fe::{absorb_fixed_effects, AbsorbOptions, Absorption};
pub use ols::{ols_fit, OlsFit, PivotedQr};
pub use prep::{
    assign_quintiles, prepare_panel, quintile_characteristics, standardize_esg_by_year, winsorize, Field,
    PrepareOptions, QuintileRow, StandardizationReport,
};
pub use specs::{fit_specification, run_specification, Estimate, FitResult, SpecName};
