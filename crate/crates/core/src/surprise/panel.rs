use chrono::NaiveDate;
use log::warn;
use nalgebra::DMatrix;

use super::raw::{compute_raw, EventQuoteSet, RawSurprises};
use crate::error::{Error, Result};

pub const INSTRUMENTS: [&str; 5] = ["mp1", "mp2", "2y", "5y", "10y"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventMeta {
    pub event_id: String,
    pub date: NaiveDate,
}

/// `T x 5` matrix of per-event changes `[mp1, mp2, 2y, 5y, 10y]` in basis points.
#[derive(Debug, Clone)]
pub struct InstrumentPanel {
    pub events: Vec<EventMeta>,
    pub x: DMatrix<f64>,
}

impl InstrumentPanel {
    pub fn new(events: Vec<EventMeta>, x: DMatrix<f64>) -> Result<Self> {
        if x.ncols() != INSTRUMENTS.len() {
            return Err(Error::InvalidArgument(format!(
                "instrument panel needs {} columns, got {}",
                INSTRUMENTS.len(),
                x.ncols()
            )));
        }
        if x.nrows() != events.len() {
            return Err(Error::InvalidArgument(format!(
                "{} events but {} panel rows",
                events.len(),
                x.nrows()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("instrument panel has non-finite cells".into()));
        }
        Ok(Self { events, x })
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Rows whose dates fall in `[start, end)`; open bounds when `None`.
    pub fn subset(&self, start: Option<NaiveDate>, end: Option<NaiveDate>) -> InstrumentPanel {
        let rows: Vec<usize> = self
            .events
            .iter()
            .enumerate()
            .filter(|(_, e)| start.is_none_or(|s| e.date >= s) && end.is_none_or(|t| e.date < t))
            .map(|(i, _)| i)
            .collect();
        InstrumentPanel {
            events: rows.iter().map(|&i| self.events[i].clone()).collect(),
            x: self.x.select_rows(rows.iter()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub event_id: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct PanelAssembly {
    pub panel: InstrumentPanel,
    pub raw: Vec<RawSurprises>,
    pub rejected: Vec<Rejection>,
}

/// Minimum usable events for a factor decomposition.
pub const MIN_EVENTS: usize = 3;

/// Builds the instrument panel in input order. Events that fail validation or
/// lack any instrument are dropped and listed in `rejected`.
pub fn assemble_panel(events: &[EventQuoteSet], late_month_threshold: u32) -> Result<PanelAssembly> {
    let mut metas = Vec::with_capacity(events.len());
    let mut raws = Vec::with_capacity(events.len());
    let mut cells = Vec::with_capacity(events.len() * 5);
    let mut rejected = Vec::new();

    for q in events {
        let row = compute_raw(q, late_month_threshold).and_then(|raw| {
            let treasury = [("d2y", q.d2y), ("d5y", q.d5y), ("d10y", q.d10y)];
            let mut row = vec![raw.mp1, raw.mp2];
            for (name, v) in treasury {
                match v {
                    Some(v) => row.push(100.0 * v),
                    None => {
                        return Err(Error::InvalidEvent {
                            event_id: q.event_id.clone(),
                            message: format!("missing {name}"),
                        })
                    }
                }
            }
            Ok((raw, row))
        });
        match row {
            Ok((raw, row)) => {
                metas.push(EventMeta {
                    event_id: q.event_id.clone(),
                    date: q.announce_date,
                });
                raws.push(raw);
                cells.extend(row);
            }
            Err(e) => {
                warn!("dropping event {}: {e}", q.event_id);
                rejected.push(Rejection {
                    event_id: q.event_id.clone(),
                    reason: e.to_string(),
                });
            }
        }
    }

    if metas.len() < MIN_EVENTS {
        return Err(Error::InsufficientData(format!(
            "{} usable events (need at least {MIN_EVENTS}); {} rejected",
            metas.len(),
            rejected.len()
        )));
    }
    let x = DMatrix::from_row_slice(metas.len(), 5, &cells);
    Ok(PanelAssembly {
        panel: InstrumentPanel::new(metas, x)?,
        raw: raws,
        rejected,
    })
}
