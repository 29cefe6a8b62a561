use std::fmt;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};

use super::data::{encode, FirmEventRecord, PanelDataset};
use crate::error::{Error, Result};

/// First event date in the post-agreement regime (inclusive).
pub fn default_break_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2015, 12, 15).expect("valid date")
}

/// A single regressor ingredient. Terms are products of factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Factor {
    Target,
    Path,
    Esg,
    Size,
    Leverage,
    Profitability,
    NonDividend,
    Post,
    Green,
    Brown,
    /// Indicator for ESG quintile 2..=5.
    Quintile(u8),
    /// Indicator for membership of the named industry.
    Industry(String),
}

impl Factor {
    pub fn name(&self) -> String {
        match self {
            Factor::Target => "ts".into(),
            Factor::Path => "ps".into(),
            Factor::Esg => "esg".into(),
            Factor::Size => "size".into(),
            Factor::Leverage => "leverage".into(),
            Factor::Profitability => "profitability".into(),
            Factor::NonDividend => "non_div".into(),
            Factor::Post => "post".into(),
            Factor::Green => "green".into(),
            Factor::Brown => "brown".into(),
            Factor::Quintile(q) => format!("q{q}"),
            Factor::Industry(s) => format!("ind[{s}]"),
        }
    }

    fn long_label(&self) -> String {
        match self {
            Factor::Target => "Target Surprise".into(),
            Factor::Path => "Path Surprise".into(),
            Factor::Esg => "ESG Score (Std.)".into(),
            Factor::Size => "Log(Assets)".into(),
            Factor::Leverage => "Book Leverage".into(),
            Factor::Profitability => "Profitability".into(),
            Factor::NonDividend => "Non-Dividend Payer".into(),
            Factor::Post => "Post-Paris".into(),
            Factor::Green => "Green".into(),
            Factor::Brown => "Brown".into(),
            Factor::Quintile(q) => format!("Quintile {q}"),
            Factor::Industry(s) => s.clone(),
        }
    }

    fn short_label(&self) -> String {
        match self {
            Factor::Target => "TS".into(),
            Factor::Path => "PS".into(),
            Factor::Esg => "ESG".into(),
            Factor::Size => "Size".into(),
            Factor::Leverage => "Leverage".into(),
            Factor::Profitability => "Profitability".into(),
            Factor::NonDividend => "Non-Div".into(),
            Factor::Post => "Post-Paris".into(),
            Factor::Green => "Green".into(),
            Factor::Brown => "Brown".into(),
            Factor::Quintile(q) => format!("Q{q}"),
            Factor::Industry(s) => s.clone(),
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ts" => Factor::Target,
            "ps" => Factor::Path,
            "esg" => Factor::Esg,
            "size" => Factor::Size,
            "leverage" => Factor::Leverage,
            "profitability" => Factor::Profitability,
            "non_div" => Factor::NonDividend,
            "post" => Factor::Post,
            "green" => Factor::Green,
            "brown" => Factor::Brown,
            _ => {
                if let Some(q) = s.strip_prefix('q').and_then(|d| d.parse::<u8>().ok()) {
                    if (2..=5).contains(&q) {
                        return Some(Factor::Quintile(q));
                    }
                    return None;
                }
                let inner = s.strip_prefix("ind[")?.strip_suffix(']')?;
                Factor::Industry(inner.to_string())
            }
        })
    }

    /// Value on one record. Surprises enter in percentage points.
    pub fn value(&self, r: &FirmEventRecord, break_date: NaiveDate) -> Option<f64> {
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        match self {
            Factor::Target => Some(r.ts_bp / 100.0),
            Factor::Path => Some(r.ps_bp / 100.0),
            Factor::Esg => r.esg_std,
            Factor::Size => r.size,
            Factor::Leverage => r.leverage,
            Factor::Profitability => r.profitability,
            Factor::NonDividend => r.non_div.map(flag),
            Factor::Post => Some(flag(r.event_date >= break_date)),
            Factor::Green => Some(flag(r.quintile == Some(5))),
            Factor::Brown => Some(flag(r.quintile == Some(1))),
            Factor::Quintile(q) => Some(flag(r.quintile == Some(*q))),
            Factor::Industry(s) => Some(flag(&r.industry == s)),
        }
    }
}

/// Product of one or more factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term(pub Vec<Factor>);

pub const TERM_SEPARATOR: &str = "_x_";

impl Term {
    pub fn main(f: Factor) -> Self {
        Term(vec![f])
    }

    pub fn of(factors: &[Factor]) -> Self {
        Term(factors.to_vec())
    }

    pub fn name(&self) -> String {
        self.0.iter().map(Factor::name).collect::<Vec<_>>().join(TERM_SEPARATOR)
    }

    pub fn label(&self) -> String {
        match self.0.as_slice() {
            [f] => f.long_label(),
            fs => fs.iter().map(Factor::short_label).collect::<Vec<_>>().join(" × "),
        }
    }

    pub fn value(&self, r: &FirmEventRecord, break_date: NaiveDate) -> Option<f64> {
        self.0.iter().try_fold(1.0, |acc, f| Some(acc * f.value(r, break_date)?))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl std::str::FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors: Option<Vec<Factor>> = s.split(TERM_SEPARATOR).map(Factor::parse).collect();
        match factors {
            Some(f) if !f.is_empty() => Ok(Term(f)),
            _ => Err(Error::InvalidArgument(format!("unknown term {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FixedEffects {
    /// Pooled regression with an intercept.
    None,
    #[default]
    Firm,
    FirmAndIndustryEvent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleFilter {
    #[default]
    All,
    /// Keep only rows with a standardized ESG score.
    RequireEsg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSpec {
    pub name: String,
    pub terms: Vec<Term>,
    pub fixed_effects: FixedEffects,
    pub sample: SampleFilter,
    pub break_date: NaiveDate,
}

impl RegressionSpec {
    pub fn new(name: impl Into<String>, terms: Vec<Term>, fixed_effects: FixedEffects, sample: SampleFilter) -> Self {
        Self {
            name: name.into(),
            terms,
            fixed_effects,
            sample,
            break_date: default_break_date(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::InvalidArgument(format!("specification {} has no terms", self.name)));
        }
        for (i, t) in self.terms.iter().enumerate() {
            if t.0.is_empty() {
                return Err(Error::InvalidArgument("empty term".into()));
            }
            if self.terms[..i].contains(t) {
                return Err(Error::InvalidArgument(format!("duplicate term {t}")));
            }
        }
        Ok(())
    }
}

/// Fixed-effect group codes for one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Grouping {
    pub codes: Vec<usize>,
    pub n_groups: usize,
}

impl Grouping {
    pub fn from_labels<K: std::hash::Hash + Eq>(labels: impl Iterator<Item = K>) -> Self {
        let (codes, n_groups) = encode(labels);
        Self { codes, n_groups }
    }
}

/// Estimation-ready arrays for one specification.
#[derive(Debug, Clone)]
pub struct Design {
    pub names: Vec<String>,
    pub labels: Vec<String>,
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub clusters: Grouping,
    pub fixed_effects: Vec<Grouping>,
    /// Dataset row of each design row.
    pub rows: Vec<usize>,
    /// Rows removed by the sample filter or missing values.
    pub dropped_rows: usize,
    /// True when an intercept column was appended (no fixed effects).
    pub intercept: bool,
}

impl Design {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }
}

pub const INTERCEPT: &str = "intercept";

pub fn build_design(spec: &RegressionSpec, data: &PanelDataset) -> Result<Design> {
    spec.validate()?;
    let records = data.records();
    let mut rows = Vec::with_capacity(records.len());
    let mut values: Vec<f64> = Vec::with_capacity(records.len() * spec.terms.len());
    let mut y = Vec::with_capacity(records.len());
    'rows: for (i, r) in records.iter().enumerate() {
        if spec.sample == SampleFilter::RequireEsg && r.esg_std.is_none() {
            continue;
        }
        let Some(ret) = r.ret else { continue };
        let start = values.len();
        for t in &spec.terms {
            match t.value(r, spec.break_date) {
                Some(v) => values.push(v),
                None => {
                    values.truncate(start);
                    continue 'rows;
                }
            }
        }
        rows.push(i);
        y.push(ret);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::InsufficientData(format!("specification {} has no complete rows", spec.name)));
    }
    let k = spec.terms.len();
    let intercept = spec.fixed_effects == FixedEffects::None;
    let x = DMatrix::<f64>::from_fn(n, k + intercept as usize, |i, j| if j < k { values[i * k + j] } else { 1.0 });
    let mut names: Vec<String> = spec.terms.iter().map(Term::name).collect();
    let mut labels: Vec<String> = spec.terms.iter().map(Term::label).collect();
    if intercept {
        names.push(INTERCEPT.into());
        labels.push("Constant".into());
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite regressor value".into()));
    }
    let pick = |f: fn(&FirmEventRecord) -> &str| rows.iter().map(move |&i| f(&records[i]));
    let clusters = Grouping::from_labels(pick(|r| &r.event_id));
    let fixed_effects = match spec.fixed_effects {
        FixedEffects::None => vec![],
        FixedEffects::Firm => vec![Grouping::from_labels(pick(|r| &r.firm_id))],
        FixedEffects::FirmAndIndustryEvent => vec![
            Grouping::from_labels(pick(|r| &r.firm_id)),
            Grouping::from_labels(rows.iter().map(|&i| (&records[i].industry, &records[i].event_id))),
        ],
    };
    Ok(Design {
        names,
        labels,
        x,
        y: DVector::from_vec(y),
        clusters,
        fixed_effects,
        dropped_rows: records.len() - n,
        rows,
        intercept,
    })
}
