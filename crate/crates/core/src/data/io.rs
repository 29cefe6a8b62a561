//! CSV readers and writers. Empty cells are missing values; floats are
//! written in shortest round-trip form so save-after-load is byte-stable.
//! Every writer goes through a temporary file that is renamed into place.

use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use log::warn;

use super::dgp::EventSurprise;
use crate::econometrics::{FirmEventRecord, FitResult, PanelDataset};
use crate::error::{Error, Result};
use crate::surprise::{EventQuoteSet, PolicySurprises};

pub const QUOTE_COLUMNS: [&str; 15] = [
    "event_id",
    "announce_date",
    "d",
    "Ds",
    "d2",
    "D2",
    "ff1_pre",
    "ff1_post",
    "ff1n_pre",
    "ff1n_post",
    "ff2_pre",
    "ff2_post",
    "d2y",
    "d5y",
    "d10y",
];
pub const SURPRISE_COLUMNS: [&str; 4] = ["event_id", "announce_date", "ts_bp", "ps_bp"];
pub const PANEL_COLUMNS: [&str; 10] = [
    "firm_id",
    "event_id",
    "event_date",
    "industry",
    "ret",
    "esg_raw",
    "size",
    "leverage",
    "profitability",
    "non_div",
];
pub const FIT_COLUMNS: [&str; 9] = ["term", "coef", "se", "stars", "spec", "N", "r2", "clusters", "r2_within"];
pub const DIAGNOSTIC_COLUMNS: [&str; 4] = ["table", "row", "column", "value"];

/// Writes `contents` to `path` via a sibling temporary file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn csv_bytes(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e.into_error(),
    })
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    write_atomic(path, &csv_bytes(path, header, rows)?)
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// A parsed CSV file with named-column access and row diagnostics.
struct Table {
    path: PathBuf,
    index: HashMap<String, usize>,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    fn read(path: &Path, required: &[&str], optional: &[&str]) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let schema = |message: String| Error::Schema {
            path: path.to_path_buf(),
            message,
        };
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
        let headers = reader
            .headers()
            .map_err(|source| Error::Csv {
                path: path.to_path_buf(),
                source,
            })?
            .clone();
        if headers.is_empty() || headers.iter().all(str::is_empty) {
            return Err(schema("empty file".into()));
        }
        let mut index = HashMap::new();
        for (i, h) in headers.iter().enumerate() {
            if !required.contains(&h) && !optional.contains(&h) {
                return Err(schema(format!("unknown column {h:?}")));
            }
            if index.insert(h.to_string(), i).is_some() {
                return Err(schema(format!("duplicate column {h:?}")));
            }
        }
        if let Some(missing) = required.iter().find(|c| !index.contains_key(**c)) {
            return Err(schema(format!("missing column {missing:?}")));
        }
        let rows = reader
            .records()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|source| Error::Csv {
                path: path.to_path_buf(),
                source,
            })?;
        if rows.is_empty() {
            return Err(schema("no data rows".into()));
        }
        Ok(Self {
            path: path.to_path_buf(),
            index,
            rows,
        })
    }

    fn err(&self, row: usize, column: &str, message: impl std::fmt::Display) -> Error {
        Error::Schema {
            path: self.path.clone(),
            message: format!("line {}, column {column:?}: {message}", row + 2),
        }
    }

    fn str(&self, row: usize, column: &str) -> &str {
        self.index.get(column).and_then(|&i| self.rows[row].get(i)).unwrap_or("")
    }

    fn text(&self, row: usize, column: &str) -> Result<String> {
        match self.str(row, column) {
            "" => Err(self.err(row, column, "empty value")),
            s => Ok(s.to_string()),
        }
    }

    fn opt_f64(&self, row: usize, column: &str) -> Result<Option<f64>> {
        match self.str(row, column) {
            "" => Ok(None),
            s => {
                let v: f64 = s.parse().map_err(|_| self.err(row, column, format!("not a number: {s:?}")))?;
                if !v.is_finite() {
                    return Err(self.err(row, column, "non-finite value"));
                }
                Ok(Some(v))
            }
        }
    }

    fn f64(&self, row: usize, column: &str) -> Result<f64> {
        self.opt_f64(row, column)?.ok_or_else(|| self.err(row, column, "empty value"))
    }

    fn u32(&self, row: usize, column: &str) -> Result<u32> {
        let s = self.str(row, column);
        s.parse().map_err(|_| self.err(row, column, format!("not a non-negative integer: {s:?}")))
    }

    fn date(&self, row: usize, column: &str) -> Result<NaiveDate> {
        let s = self.str(row, column);
        NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| self.err(row, column, format!("not a YYYY-MM-DD date: {s:?}")))
    }

    fn opt_bool(&self, row: usize, column: &str) -> Result<Option<bool>> {
        match self.str(row, column) {
            "" => Ok(None),
            "0" => Ok(Some(false)),
            "1" => Ok(Some(true)),
            s => Err(self.err(row, column, format!("expected 0 or 1, got {s:?}"))),
        }
    }
}

pub fn load_quotes(path: &Path) -> Result<Vec<EventQuoteSet>> {
    let t = Table::read(path, &QUOTE_COLUMNS, &[])?;
    (0..t.rows.len())
        .map(|i| {
            Ok(EventQuoteSet {
                event_id: t.text(i, "event_id")?,
                announce_date: t.date(i, "announce_date")?,
                day: t.u32(i, "d")?,
                days_in_month: t.u32(i, "Ds")?,
                second_day: t.u32(i, "d2")?,
                second_days_in_month: t.u32(i, "D2")?,
                ff1_pre: t.opt_f64(i, "ff1_pre")?,
                ff1_post: t.opt_f64(i, "ff1_post")?,
                ff1_next_pre: t.opt_f64(i, "ff1n_pre")?,
                ff1_next_post: t.opt_f64(i, "ff1n_post")?,
                ff2_pre: t.opt_f64(i, "ff2_pre")?,
                ff2_post: t.opt_f64(i, "ff2_post")?,
                d2y: t.opt_f64(i, "d2y")?,
                d5y: t.opt_f64(i, "d5y")?,
                d10y: t.opt_f64(i, "d10y")?,
            })
        })
        .collect()
}

pub fn save_quotes(path: &Path, quotes: &[EventQuoteSet]) -> Result<()> {
    write_csv(
        path,
        &QUOTE_COLUMNS,
        quotes.iter().map(|q| {
            vec![
                q.event_id.clone(),
                q.announce_date.to_string(),
                q.day.to_string(),
                q.days_in_month.to_string(),
                q.second_day.to_string(),
                q.second_days_in_month.to_string(),
                fmt_opt(q.ff1_pre),
                fmt_opt(q.ff1_post),
                fmt_opt(q.ff1_next_pre),
                fmt_opt(q.ff1_next_post),
                fmt_opt(q.ff2_pre),
                fmt_opt(q.ff2_post),
                fmt_opt(q.d2y),
                fmt_opt(q.d5y),
                fmt_opt(q.d10y),
            ]
        }),
    )
}

/// Per-event surprises of an extraction.
pub fn surprise_rows(s: &PolicySurprises) -> Vec<EventSurprise> {
    s.events
        .iter()
        .zip(s.ts.iter().zip(&s.ps))
        .map(|(e, (&ts_bp, &ps_bp))| EventSurprise {
            event_id: e.event_id.clone(),
            date: e.date,
            ts_bp,
            ps_bp,
        })
        .collect()
}

pub fn save_surprises(path: &Path, events: &[EventSurprise]) -> Result<()> {
    write_csv(
        path,
        &SURPRISE_COLUMNS,
        events
            .iter()
            .map(|e| vec![e.event_id.clone(), e.date.to_string(), fmt_f64(e.ts_bp), fmt_f64(e.ps_bp)]),
    )
}

pub fn load_surprises(path: &Path) -> Result<Vec<EventSurprise>> {
    let t = Table::read(path, &SURPRISE_COLUMNS, &[])?;
    let mut seen = std::collections::HashSet::new();
    (0..t.rows.len())
        .map(|i| {
            let event_id = t.text(i, "event_id")?;
            if !seen.insert(event_id.clone()) {
                return Err(t.err(i, "event_id", format!("duplicate event {event_id}")));
            }
            Ok(EventSurprise {
                event_id,
                date: t.date(i, "announce_date")?,
                ts_bp: t.f64(i, "ts_bp")?,
                ps_bp: t.f64(i, "ps_bp")?,
            })
        })
        .collect()
}

/// Reads a firm-event panel and attaches each row's event surprises. Rows
/// whose event has no surprise are dropped with a warning; a date that
/// disagrees with the surprise file is an error. The result is unprepared.
pub fn load_panel(panel_path: &Path, surprises: &[EventSurprise]) -> Result<PanelDataset> {
    let t = Table::read(panel_path, &PANEL_COLUMNS, &[])?;
    let by_event: HashMap<&str, &EventSurprise> = surprises.iter().map(|e| (e.event_id.as_str(), e)).collect();
    let mut records = Vec::with_capacity(t.rows.len());
    let mut unmatched = 0usize;
    for i in 0..t.rows.len() {
        let event_id = t.text(i, "event_id")?;
        let Some(s) = by_event.get(event_id.as_str()) else {
            unmatched += 1;
            continue;
        };
        let event_date = t.date(i, "event_date")?;
        if event_date != s.date {
            return Err(t.err(i, "event_date", format!("{event_date} disagrees with surprise date {}", s.date)));
        }
        records.push(FirmEventRecord {
            firm_id: t.text(i, "firm_id")?,
            event_id,
            event_date,
            industry: t.text(i, "industry")?,
            ret: t.opt_f64(i, "ret")?,
            esg_raw: t.opt_f64(i, "esg_raw")?,
            esg_std: None,
            size: t.opt_f64(i, "size")?,
            leverage: t.opt_f64(i, "leverage")?,
            profitability: t.opt_f64(i, "profitability")?,
            non_div: t.opt_bool(i, "non_div")?,
            ts_bp: s.ts_bp,
            ps_bp: s.ps_bp,
            quintile: None,
        });
    }
    if unmatched > 0 {
        warn!("{}: dropped {unmatched} rows whose event has no surprise", panel_path.display());
    }
    if records.is_empty() {
        return Err(Error::Schema {
            path: panel_path.to_path_buf(),
            message: "no rows match the surprise file".into(),
        });
    }
    PanelDataset::new(records)
}

pub fn save_panel(path: &Path, panel: &PanelDataset) -> Result<()> {
    write_csv(
        path,
        &PANEL_COLUMNS,
        panel.records().iter().map(|r| {
            vec![
                r.firm_id.clone(),
                r.event_id.clone(),
                r.event_date.to_string(),
                r.industry.clone(),
                fmt_opt(r.ret),
                fmt_opt(r.esg_raw),
                fmt_opt(r.size),
                fmt_opt(r.leverage),
                fmt_opt(r.profitability),
                r.non_div.map(|b| if b { "1" } else { "0" }.to_string()).unwrap_or_default(),
            ]
        }),
    )
}

/// Significance marks from normal critical values at 1%, 5% and 10%.
pub fn significance_stars(t: f64) -> &'static str {
    let a = t.abs();
    if a >= 2.576 {
        "***"
    } else if a >= 1.960 {
        "**"
    } else if a >= 1.645 {
        "*"
    } else {
        ""
    }
}

pub const ABSORBED: &str = "absorbed";

/// One coefficient line of a fit file.
#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub term: String,
    pub coef: Option<f64>,
    pub se: Option<f64>,
    pub stars: String,
}

/// A fitted specification as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct FitTable {
    pub spec: String,
    pub n: usize,
    pub r2: f64,
    pub r2_within: Option<f64>,
    pub clusters: usize,
    pub rows: Vec<FitRow>,
}

impl From<&FitResult> for FitTable {
    fn from(f: &FitResult) -> Self {
        Self {
            spec: f.spec.clone(),
            n: f.n,
            r2: f.r2,
            r2_within: Some(f.r2_within),
            clusters: f.clusters,
            rows: f
                .estimates
                .iter()
                .map(|e| FitRow {
                    term: e.name.clone(),
                    coef: e.coef,
                    se: e.se,
                    stars: match e.t_stat() {
                        Some(t) => significance_stars(t).to_string(),
                        None => ABSORBED.to_string(),
                    },
                })
                .collect(),
        }
    }
}

pub fn save_fits(path: &Path, fits: &[FitTable]) -> Result<()> {
    let rows = fits.iter().flat_map(|f| {
        f.rows.iter().map(move |r| {
            vec![
                r.term.clone(),
                fmt_opt(r.coef),
                fmt_opt(r.se),
                r.stars.clone(),
                f.spec.clone(),
                f.n.to_string(),
                fmt_f64(f.r2),
                f.clusters.to_string(),
                fmt_opt(f.r2_within),
            ]
        })
    });
    write_csv(path, &FIT_COLUMNS, rows)
}

/// Reads a fit file; consecutive rows sharing a `spec` form one table.
/// The `r2_within` column is optional.
pub fn load_fits(path: &Path) -> Result<Vec<FitTable>> {
    let t = Table::read(path, &FIT_COLUMNS[..8], &FIT_COLUMNS[8..])?;
    let mut out: Vec<FitTable> = Vec::new();
    for i in 0..t.rows.len() {
        let spec = t.text(i, "spec")?;
        let n: usize = t.str(i, "N").parse().map_err(|_| t.err(i, "N", "not a count"))?;
        let clusters: usize = t.str(i, "clusters").parse().map_err(|_| t.err(i, "clusters", "not a count"))?;
        let r2 = t.f64(i, "r2")?;
        let r2_within = t.opt_f64(i, "r2_within")?;
        let row = FitRow {
            term: t.text(i, "term")?,
            coef: t.opt_f64(i, "coef")?,
            se: t.opt_f64(i, "se")?,
            stars: t.str(i, "stars").to_string(),
        };
        match out.last_mut() {
            Some(f) if f.spec == spec => {
                if f.n != n || f.clusters != clusters || f.r2 != r2 {
                    return Err(t.err(i, "spec", "fit statistics differ within one specification"));
                }
                f.rows.push(row);
            }
            _ => out.push(FitTable {
                spec,
                n,
                r2,
                r2_within,
                clusters,
                rows: vec![row],
            }),
        }
    }
    Ok(out)
}

/// One long-format diagnostic value.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub table: String,
    pub row: String,
    pub column: String,
    pub value: f64,
}

impl Diagnostic {
    pub fn new(table: &str, row: impl Into<String>, column: &str, value: f64) -> Self {
        Self {
            table: table.into(),
            row: row.into(),
            column: column.into(),
            value,
        }
    }
}

pub fn save_diagnostics(path: &Path, rows: &[Diagnostic]) -> Result<()> {
    write_csv(
        path,
        &DIAGNOSTIC_COLUMNS,
        rows.iter()
            .map(|d| vec![d.table.clone(), d.row.clone(), d.column.clone(), fmt_f64(d.value)]),
    )
}

pub fn load_diagnostics(path: &Path) -> Result<Vec<Diagnostic>> {
    let t = Table::read(path, &DIAGNOSTIC_COLUMNS, &[])?;
    (0..t.rows.len())
        .map(|i| {
            Ok(Diagnostic {
                table: t.text(i, "table")?,
                row: t.str(i, "row").to_string(),
                column: t.str(i, "column").to_string(),
                value: t.opt_f64(i, "value")?.unwrap_or(f64::NAN),
            })
        })
        .collect()
}

/// Writes arbitrary rows under `header`, atomically.
pub fn save_table(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    write_csv(path, header, rows)
}
