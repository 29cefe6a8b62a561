use std::collections::BTreeMap;

use chrono::Datelike;
use log::warn;

use super::data::{FirmEventRecord, PanelDataset};
use crate::error::{Error, Result};

/// Numeric record fields that can be winsorized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Ret,
    EsgRaw,
    Size,
    Leverage,
    Profitability,
}

impl Field {
    fn slot(self, r: &mut FirmEventRecord) -> &mut Option<f64> {
        match self {
            Field::Ret => &mut r.ret,
            Field::EsgRaw => &mut r.esg_raw,
            Field::Size => &mut r.size,
            Field::Leverage => &mut r.leverage,
            Field::Profitability => &mut r.profitability,
        }
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ret" => Field::Ret,
            "esg_raw" => Field::EsgRaw,
            "size" => Field::Size,
            "leverage" => Field::Leverage,
            "profitability" => Field::Profitability,
            other => return Err(Error::InvalidArgument(format!("unknown field {other:?}"))),
        })
    }
}

/// Nearest-rank bounds taken symmetrically: the lower bound is the
/// `ceil(lo * n)`-th smallest value, the upper bound the `ceil((1 - hi) * n)`-th
/// largest.
pub fn nearest_rank_bounds(sorted: &[f64], lo: f64, hi: f64) -> Option<(f64, f64)> {
    let n = sorted.len();
    if n == 0 {
        return None;
    }
    // Shave rounding noise so that e.g. 0.01 * 100 ranks as exactly 1.
    let rank = |q: f64| (((q * n as f64) - 1e-9).ceil() as usize).clamp(1, n);
    let (lo_rank, hi_rank) = (rank(lo), rank(1.0 - hi));
    Some((sorted[lo_rank - 1], sorted[n - hi_rank]))
}

/// Clamps `field` to its `[lo, hi]` empirical quantiles (fractions, e.g.
/// 0.01 and 0.99).
pub fn winsorize(data: &mut PanelDataset, field: Field, lo: f64, hi: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(Error::InvalidArgument(format!("bad winsorization quantiles [{lo}, {hi}]")));
    }
    let mut values: Vec<f64> = data
        .records_mut()
        .iter_mut()
        .filter_map(|r| *field.slot(r))
        .collect();
    if values.len() < 100 {
        warn!("winsorizing {field:?} with only {} values", values.len());
    }
    values.sort_by(f64::total_cmp);
    let Some((low, high)) = nearest_rank_bounds(&values, lo, hi) else {
        return Ok(());
    };
    for r in data.records_mut() {
        if let Some(v) = field.slot(r) {
            *v = v.clamp(low, high);
        }
    }
    Ok(())
}

/// Years whose scores could not be standardized.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StandardizationReport {
    pub skipped_years: Vec<(i32, String)>,
}

/// Standardizes `esg_raw` within each calendar year (over firm-event rows)
/// to mean 0 and sample standard deviation 1. Years with fewer than two
/// scores or no variation leave `esg_std` missing.
pub fn standardize_esg_by_year(data: &mut PanelDataset) -> StandardizationReport {
    let mut by_year: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, r) in data.records().iter().enumerate() {
        if r.esg_raw.is_some() {
            by_year.entry(r.event_date.year()).or_default().push(i);
        }
    }
    let mut report = StandardizationReport::default();
    let records = data.records_mut();
    for r in records.iter_mut() {
        r.esg_std = None;
    }
    for (year, rows) in by_year {
        let values: Vec<f64> = rows.iter().map(|&i| records[i].esg_raw.unwrap()).collect();
        let n = values.len();
        if n < 2 {
            warn!("year {year}: a single ESG score; left unstandardized");
            report.skipped_years.push((year, "fewer than two scores".into()));
            continue;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        if !(sd > 0.0) {
            warn!("year {year}: ESG scores have no variation; left unstandardized");
            report.skipped_years.push((year, "zero variance".into()));
            continue;
        }
        for (&i, v) in rows.iter().zip(values) {
            records[i].esg_std = Some((v - mean) / sd);
        }
    }
    report
}

/// Minimum firms with a score on a date for quintiles to be formed.
pub const MIN_QUINTILE_FIRMS: usize = 5;

/// Ranks firms by standardized score on each event date (ties by firm id)
/// and labels quintiles 1 (lowest) to 5.
pub fn assign_quintiles(data: &mut PanelDataset) {
    let events = data.event_rows();
    let mut labels: Vec<Option<u8>> = vec![None; data.len()];
    let records = data.records();
    let mut events: Vec<(&str, Vec<usize>)> = events.into_iter().collect();
    events.sort_by(|a, b| a.0.cmp(b.0));
    for (event, rows) in events {
        let mut scored: Vec<usize> = rows.into_iter().filter(|&i| records[i].esg_std.is_some()).collect();
        let n = scored.len();
        if n < MIN_QUINTILE_FIRMS {
            if n > 0 {
                warn!("event {event}: {n} firms with ESG scores; quintiles left missing");
            }
            continue;
        }
        scored.sort_by(|&a, &b| {
            let (ra, rb) = (&records[a], &records[b]);
            ra.esg_std.unwrap().total_cmp(&rb.esg_std.unwrap()).then_with(|| ra.firm_id.cmp(&rb.firm_id))
        });
        for (rank, i) in scored.into_iter().enumerate() {
            labels[i] = Some((5 * rank / n) as u8 + 1);
        }
    }
    for (r, q) in data.records_mut().iter_mut().zip(labels) {
        r.quintile = q;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepareOptions {
    pub winsor_lo: f64,
    pub winsor_hi: f64,
}

impl Default for PrepareOptions {
    fn default() -> Self {
        Self {
            winsor_lo: 0.01,
            winsor_hi: 0.99,
        }
    }
}

/// Winsorizes profitability, then standardizes scores and assigns quintiles.
pub fn prepare_panel(data: &mut PanelDataset, opts: PrepareOptions) -> Result<StandardizationReport> {
    winsorize(data, Field::Profitability, opts.winsor_lo, opts.winsor_hi)?;
    let report = standardize_esg_by_year(data);
    assign_quintiles(data);
    Ok(report)
}

/// Mean characteristics per ESG quintile, plus a row for firms without scores.
#[derive(Debug, Clone, PartialEq)]
pub struct QuintileRow {
    /// `Some(q)` for quintile `q`, `None` for the no-score group.
    pub quintile: Option<u8>,
    pub avg_return: f64,
    pub size: f64,
    pub leverage: f64,
    pub profitability: f64,
    pub n: usize,
}

pub fn quintile_characteristics(data: &PanelDataset) -> Vec<QuintileRow> {
    let mean = |v: &[f64]| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
    let mut groups: Vec<Option<u8>> = (1..=5).map(Some).collect();
    groups.push(None);
    groups
        .into_iter()
        .map(|q| {
            let rows: Vec<&FirmEventRecord> = data
                .records()
                .iter()
                .filter(|r| if q.is_some() { r.quintile == q } else { r.esg_std.is_none() })
                .collect();
            let pick = |f: fn(&FirmEventRecord) -> Option<f64>| rows.iter().filter_map(|r| f(r)).collect::<Vec<_>>();
            QuintileRow {
                quintile: q,
                avg_return: mean(&pick(|r| r.ret)),
                size: mean(&pick(|r| r.size)),
                leverage: mean(&pick(|r| r.leverage)),
                profitability: mean(&pick(|r| r.profitability)),
                n: rows.len(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econometrics::data::tests::record;

    fn dataset(records: Vec<FirmEventRecord>) -> PanelDataset {
        PanelDataset::new(records).unwrap()
    }

    #[test]
    fn two_point_year_standardizes_symmetrically() {
        let mut a = record("a", "e1", 3);
        let mut b = record("b", "e1", 3);
        a.esg_raw = Some(40.0);
        b.esg_raw = Some(60.0);
        let mut d = dataset(vec![a, b]);
        standardize_esg_by_year(&mut d);
        assert!((d.records()[0].esg_std.unwrap() + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((d.records()[1].esg_std.unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn constant_year_left_missing() {
        let mut d = dataset(vec![record("a", "e1", 3), record("b", "e1", 3), record("c", "e1", 3)]);
        let rep = standardize_esg_by_year(&mut d);
        assert!(d.records().iter().all(|r| r.esg_std.is_none()));
        assert_eq!(rep.skipped_years.len(), 1);
    }

    #[test]
    fn single_firm_year_left_missing() {
        let mut d = dataset(vec![record("a", "e1", 3)]);
        standardize_esg_by_year(&mut d);
        assert!(d.records()[0].esg_std.is_none());
    }

    #[test]
    fn standardized_moments() {
        let recs: Vec<_> = (0..37)
            .map(|i| {
                let mut r = record(&format!("f{i}"), "e1", 5);
                r.esg_raw = Some(((i * 7919) % 101) as f64);
                r
            })
            .collect();
        let mut d = dataset(recs);
        standardize_esg_by_year(&mut d);
        let v: Vec<f64> = d.records().iter().map(|r| r.esg_std.unwrap()).collect();
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!(mean.abs() < 1e-12);
        assert!((sd - 1.0).abs() < 1e-12);
    }

    fn profit_panel(values: &[f64]) -> PanelDataset {
        dataset(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let mut r = record(&format!("f{i}"), "e1", 1);
                    r.profitability = Some(v);
                    r
                })
                .collect(),
        )
    }

    #[test]
    fn winsorize_leaves_one_to_hundred_unchanged() {
        let vals: Vec<f64> = (1..=100).map(f64::from).collect();
        let mut d = profit_panel(&vals);
        winsorize(&mut d, Field::Profitability, 0.01, 0.99).unwrap();
        let got: Vec<f64> = d.records().iter().map(|r| r.profitability.unwrap()).collect();
        assert_eq!(got, vals);
    }

    #[test]
    fn winsorize_clamps_outlier_and_is_idempotent() {
        let mut vals: Vec<f64> = (0..999).map(|i| (i as f64 * 0.37).sin()).collect();
        vals.push(1e6);
        let mut d = profit_panel(&vals);
        winsorize(&mut d, Field::Profitability, 0.01, 0.99).unwrap();
        let mut sorted = vals.clone();
        sorted.sort_by(f64::total_cmp);
        let p99 = sorted[1000 - 10];
        let top = d.records().last().unwrap().profitability.unwrap();
        assert_eq!(top, p99);
        let once: Vec<_> = d.records().iter().map(|r| r.profitability).collect();
        winsorize(&mut d, Field::Profitability, 0.01, 0.99).unwrap();
        let twice: Vec<_> = d.records().iter().map(|r| r.profitability).collect();
        assert_eq!(once, twice);
    }

    fn scored(firms: usize, score: impl Fn(usize) -> f64) -> PanelDataset {
        dataset(
            (0..firms)
                .map(|i| {
                    let mut r = record(&format!("f{i:02}"), "e1", 1);
                    r.esg_std = Some(score(i));
                    r
                })
                .collect(),
        )
    }

    #[test]
    fn ten_distinct_scores_two_per_quintile() {
        let mut d = scored(10, |i| ((i * 7) % 10) as f64);
        assign_quintiles(&mut d);
        for q in 1..=5u8 {
            assert_eq!(d.records().iter().filter(|r| r.quintile == Some(q)).count(), 2);
        }
        let lowest = d.records().iter().find(|r| r.esg_std == Some(0.0)).unwrap();
        assert_eq!(lowest.quintile, Some(1));
    }

    #[test]
    fn ties_split_by_firm_id() {
        let mut d = scored(10, |_| 0.5);
        assign_quintiles(&mut d);
        let q: Vec<u8> = d.records().iter().map(|r| r.quintile.unwrap()).collect();
        assert_eq!(q, vec![1, 1, 2, 2, 3, 3, 4, 4, 5, 5]);
    }

    #[test]
    fn too_few_firms_leave_quintiles_missing() {
        let mut d = scored(4, |i| i as f64);
        assign_quintiles(&mut d);
        assert!(d.records().iter().all(|r| r.quintile.is_none()));
    }

    #[test]
    fn characteristics_by_quintile() {
        let mut d = scored(10, |i| i as f64);
        for (i, r) in d.records_mut().iter_mut().enumerate() {
            r.size = Some(i as f64);
        }
        assign_quintiles(&mut d);
        let rows = quintile_characteristics(&d);
        assert_eq!(rows.len(), 6);
        assert!((rows[0].size - 0.5).abs() < 1e-12);
        assert!((rows[4].size - 8.5).abs() < 1e-12);
        assert_eq!(rows[5].n, 0);
    }
}
