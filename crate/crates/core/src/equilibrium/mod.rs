//! Two-period economy with traditional and ESG-conscious mean-variance
//! investors: demands, market clearing, responses to target and path
//! shocks, and calibration reports.

mod params;
mod pricing;
mod reports;
mod sensitivity;

pub use params::{FirmProfile, Investor, ModelParams, PricingRule, Shock, PARAM_NAMES};
pub use pricing::{
    clear_market, closed_form_clearing_price, dividend, equilibrium_price_as_stated, optimal_demand, price,
    EquilibriumOutcome,
};
pub use reports::{
    calibration_report, differential_report, impact_pct, parse_grid, sensitivity_sweep, CalibrationRow,
    DifferentialReport, Sweep, SweepRow, THETA_HIGH, THETA_LOW, THETA_MID,
};
pub use sensitivity::{
    asymmetry_condition, cross_partials, numeric_sensitivity, path_sensitivity, target_sensitivity,
    theta_derivative, AsymmetryCheck, CrossPartials, FiniteDifference, NumericSensitivity, FD_REL_TOL, FD_STEP,
};
