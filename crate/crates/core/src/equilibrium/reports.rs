use log::warn;
use rayon::prelude::*;

use super::params::{FirmProfile, ModelParams, PricingRule};
use super::pricing::price;
use super::sensitivity::{cross_partials, path_sensitivity, target_sensitivity, FD_STEP};
use crate::error::{Error, Result};

/// ESG scores compared in differential reports and sweeps.
pub const THETA_LOW: f64 = 0.1;
pub const THETA_HIGH: f64 = 0.9;
/// Point at which cross-partials are reported.
pub const THETA_MID: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationRow {
    pub theta: f64,
    pub price: f64,
    pub target_sensitivity: f64,
    pub path_sensitivity: f64,
    /// `P(theta) / P(0) - 1`.
    pub premium: f64,
}

pub fn calibration_report(p: &ModelParams, thetas: &[f64], rule: PricingRule) -> Result<Vec<CalibrationRow>> {
    p.validate()?;
    let base = price(p, FirmProfile { theta: 0.0 }, rule)?;
    thetas
        .iter()
        .map(|&theta| {
            let f = FirmProfile::new(theta)?;
            let px = price(p, f, rule)?;
            Ok(CalibrationRow {
                theta,
                price: px,
                target_sensitivity: target_sensitivity(p, f, rule)?,
                path_sensitivity: path_sensitivity(p, f, rule)?,
                premium: px / base - 1.0,
            })
        })
        .collect()
}

/// Percent price impact of a surprise of `surprise_bp` basis points given a
/// return sensitivity per unit (decimal) surprise.
pub fn impact_pct(sensitivity: f64, surprise_bp: f64) -> f64 {
    sensitivity * surprise_bp / 100.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferentialReport {
    pub theta_low: f64,
    pub theta_high: f64,
    pub surprise_bp: f64,
    pub target_low: f64,
    pub target_high: f64,
    pub path_low: f64,
    pub path_high: f64,
    pub target_differential: f64,
    pub path_differential: f64,
    /// Path differential over target differential; `None` when the target
    /// differential is zero.
    pub asymmetry_ratio: Option<f64>,
    pub target_impact_low_pct: f64,
    pub target_impact_high_pct: f64,
    pub path_impact_low_pct: f64,
    pub path_impact_high_pct: f64,
    pub target_impact_differential_bp: f64,
    pub path_impact_differential_bp: f64,
    pub cross_partial_theta: f64,
    pub cross_partial_target: f64,
    pub cross_partial_path: f64,
}

pub fn differential_report(
    p: &ModelParams,
    theta_low: f64,
    theta_high: f64,
    surprise_bp: f64,
    rule: PricingRule,
) -> Result<DifferentialReport> {
    p.validate()?;
    if theta_low > theta_high {
        return Err(Error::InvalidArgument(format!(
            "theta_low ({theta_low}) exceeds theta_high ({theta_high})"
        )));
    }
    let (lo, hi) = (FirmProfile::new(theta_low)?, FirmProfile::new(theta_high)?);
    let target_low = target_sensitivity(p, lo, rule)?;
    let target_high = target_sensitivity(p, hi, rule)?;
    let path_low = path_sensitivity(p, lo, rule)?;
    let path_high = path_sensitivity(p, hi, rule)?;
    let target_differential = target_high - target_low;
    let path_differential = path_high - path_low;
    let cross = cross_partials(p, FirmProfile { theta: THETA_MID }, rule, FD_STEP)?;
    let impact = |s: f64| impact_pct(s, surprise_bp);
    Ok(DifferentialReport {
        theta_low,
        theta_high,
        surprise_bp,
        target_low,
        target_high,
        path_low,
        path_high,
        target_differential,
        path_differential,
        asymmetry_ratio: (target_differential != 0.0).then(|| path_differential / target_differential),
        target_impact_low_pct: impact(target_low),
        target_impact_high_pct: impact(target_high),
        path_impact_low_pct: impact(path_low),
        path_impact_high_pct: impact(path_high),
        target_impact_differential_bp: 100.0 * impact(target_differential),
        path_impact_differential_bp: 100.0 * impact(path_differential),
        cross_partial_theta: THETA_MID,
        cross_partial_target: cross.target.value,
        cross_partial_path: cross.path.value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// High-minus-low ESG target sensitivity.
    pub target_differential: f64,
    pub path_differential: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
    /// Grid points that violated a parameter invariant, with the reason.
    pub skipped: Vec<(f64, String)>,
}

/// Varies one parameter over `grid`, reporting high-minus-low ESG
/// differentials. Grid points are evaluated in parallel and kept in order.
pub fn sensitivity_sweep(p: &ModelParams, name: &str, grid: &[f64], rule: PricingRule) -> Result<Sweep> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty sweep grid".into()));
    }
    p.get(name)?;
    let results: Vec<(f64, Result<SweepRow>)> = grid
        .par_iter()
        .map(|&value| {
            let row = p.with(name, value).and_then(|q| {
                q.validate()?;
                let (lo, hi) = (FirmProfile { theta: THETA_LOW }, FirmProfile { theta: THETA_HIGH });
                Ok(SweepRow {
                    value,
                    target_differential: target_sensitivity(&q, hi, rule)? - target_sensitivity(&q, lo, rule)?,
                    path_differential: path_sensitivity(&q, hi, rule)? - path_sensitivity(&q, lo, rule)?,
                })
            });
            (value, row)
        })
        .collect();

    let mut sweep = Sweep {
        parameter: name.to_string(),
        rows: Vec::new(),
        skipped: Vec::new(),
    };
    for (value, row) in results {
        match row {
            Ok(r) => sweep.rows.push(r),
            Err(e) => {
                warn!("sweep {name}={value} skipped: {e}");
                sweep.skipped.push((value, e.to_string()));
            }
        }
    }
    Ok(sweep)
}

/// `start:end:count` (inclusive, evenly spaced) or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("bad grid {spec:?}; use start:end:count or a,b,c"));
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(Error::InvalidArgument("empty sweep grid".into()));
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let end: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        return match count {
            0 => Err(Error::InvalidArgument("empty sweep grid".into())),
            1 => Ok(vec![start]),
            n => Ok((0..n)
                .map(|i| if i + 1 == n { end } else { start + (end - start) * i as f64 / (n - 1) as f64 })
                .collect()),
        };
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}
