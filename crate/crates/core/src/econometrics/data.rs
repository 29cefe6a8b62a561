use std::collections::HashMap;

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// One firm's return around one announcement, with characteristics and the
/// event's surprises.
#[derive(Debug, Clone, PartialEq)]
pub struct FirmEventRecord {
    pub firm_id: String,
    pub event_id: String,
    pub event_date: NaiveDate,
    pub industry: String,
    /// Percent return over the event window.
    pub ret: Option<f64>,
    /// Raw 0-100 score.
    pub esg_raw: Option<f64>,
    /// Score standardized within calendar year; set by preparation.
    pub esg_std: Option<f64>,
    /// Log total assets.
    pub size: Option<f64>,
    pub leverage: Option<f64>,
    pub profitability: Option<f64>,
    pub non_div: Option<bool>,
    pub ts_bp: f64,
    pub ps_bp: f64,
    /// ESG quintile on the event date (1 = lowest); set by preparation.
    pub quintile: Option<u8>,
}

/// Rectangular firm-event panel with unique `(firm_id, event_id)` keys and one
/// surprise pair per event.
#[derive(Debug, Clone, Default)]
pub struct PanelDataset {
    records: Vec<FirmEventRecord>,
}

impl PanelDataset {
    pub fn new(records: Vec<FirmEventRecord>) -> Result<Self> {
        let mut keys: HashMap<(&str, &str), usize> = HashMap::with_capacity(records.len());
        let mut surprises: HashMap<&str, (f64, f64, NaiveDate)> = HashMap::new();
        for (i, r) in records.iter().enumerate() {
            if let Some(prev) = keys.insert((&r.firm_id, &r.event_id), i) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate firm-event ({}, {}) at rows {prev} and {i}",
                    r.firm_id, r.event_id
                )));
            }
            if let Some(v) = r.ret {
                if !v.is_finite() {
                    return Err(Error::InvalidArgument(format!("row {i}: non-finite return")));
                }
            }
            if !r.ts_bp.is_finite() || !r.ps_bp.is_finite() {
                return Err(Error::InvalidArgument(format!("row {i}: non-finite surprise")));
            }
            let entry = surprises.entry(&r.event_id).or_insert((r.ts_bp, r.ps_bp, r.event_date));
            if entry.0 != r.ts_bp || entry.1 != r.ps_bp || entry.2 != r.event_date {
                return Err(Error::InvalidArgument(format!(
                    "event {} carries inconsistent surprises or dates",
                    r.event_id
                )));
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[FirmEventRecord] {
        &self.records
    }

    pub(crate) fn records_mut(&mut self) -> &mut [FirmEventRecord] {
        &mut self.records
    }

    pub fn into_records(self) -> Vec<FirmEventRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn firm_rows(&self) -> HashMap<&str, Vec<usize>> {
        group_rows(self.records.iter().map(|r| r.firm_id.as_str()))
    }

    pub fn event_rows(&self) -> HashMap<&str, Vec<usize>> {
        group_rows(self.records.iter().map(|r| r.event_id.as_str()))
    }

    pub fn industry_event_rows(&self) -> HashMap<(&str, &str), Vec<usize>> {
        group_rows(self.records.iter().map(|r| (r.industry.as_str(), r.event_id.as_str())))
    }

    /// Distinct industries, sorted.
    pub fn industries(&self) -> Vec<String> {
        let mut seen = Vec::<String>::new();
        for r in &self.records {
            if !seen.contains(&r.industry) {
                seen.push(r.industry.clone());
            }
        }
        seen.sort();
        seen
    }
}

fn group_rows<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> HashMap<K, Vec<usize>> {
    let mut map: HashMap<K, Vec<usize>> = HashMap::new();
    for (i, k) in keys.enumerate() {
        map.entry(k).or_default().push(i);
    }
    map
}

/// Dense `0..n` codes for arbitrary labels, assigned in first-appearance order.
pub(crate) fn encode<K: std::hash::Hash + Eq>(labels: impl Iterator<Item = K>) -> (Vec<usize>, usize) {
    let mut map: HashMap<K, usize> = HashMap::new();
    let codes = labels
        .map(|k| {
            let next = map.len();
            *map.entry(k).or_insert(next)
        })
        .collect();
    (codes, map.len())
}
