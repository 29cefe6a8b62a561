use std::collections::BTreeMap;
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate};
use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::econometrics::{default_break_date, prepare_panel, FirmEventRecord, PanelDataset, PrepareOptions, Term};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndustryProfile {
    pub name: String,
    /// Relative share of firms.
    pub weight: f64,
    /// Mean standardized ESG score of the industry's firms.
    pub esg_offset: f64,
}

fn industry(name: &str, weight: f64, esg_offset: f64) -> IndustryProfile {
    IndustryProfile {
        name: name.into(),
        weight,
        esg_offset,
    }
}

/// Firm counts and mean standardized scores of an S&P 500 style universe.
pub fn default_industries() -> Vec<IndustryProfile> {
    vec![
        industry("Utilities", 30.0, 0.179),
        industry("Consumer Non-Cyclicals", 43.0, 0.341),
        industry("Financials", 73.0, -0.042),
        industry("Real Estate", 33.0, -0.034),
        industry("Industrials", 75.0, -0.120),
        industry("Technology", 101.0, -0.019),
        industry("Healthcare", 67.0, 0.120),
        industry("Basic Materials", 27.0, 0.263),
        industry("Energy", 32.0, 0.082),
        industry("Consumer Cyclicals", 93.0, -0.132),
    ]
}

/// Synthetic firm-event panel settings. Read from a TOML `dgp.cfg`; missing
/// keys take defaults and unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DgpConfig {
    pub n_firms: usize,
    pub n_events: usize,
    /// Target surprise SD in basis points.
    pub ts_sd: f64,
    /// Path surprise SD in basis points.
    pub ps_sd: f64,
    /// Idiosyncratic return noise SD in percent.
    pub noise_sd: f64,
    /// Firm fixed-effect SD in percent.
    pub firm_effect_sd: f64,
    /// Industry-by-event shock SD in percent.
    pub industry_event_sd: f64,
    /// Probability that a firm carries ESG scores.
    pub esg_coverage: f64,
    pub seed: u64,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    /// First event date of the second coefficient regime.
    pub break_date: NaiveDate,
    /// Upper bound on `n_firms * n_events`.
    pub max_rows: usize,
    /// Return coefficients by term name, e.g. `ts_x_esg`. Surprises enter in
    /// percentage points. `post_x_*` terms are the post-break deltas.
    pub coefficients: BTreeMap<String, f64>,
    pub industries: Vec<IndustryProfile>,
}

impl Default for DgpConfig {
    fn default() -> Self {
        Self {
            n_firms: 500,
            n_events: 160,
            ts_sd: 2.683,
            ps_sd: 6.385,
            noise_sd: 0.6,
            firm_effect_sd: 0.05,
            industry_event_sd: 0.0,
            esg_coverage: 0.85,
            seed: 20151215,
            start_date: NaiveDate::from_ymd_opt(2005, 1, 1).expect("valid date"),
            end_date: NaiveDate::from_ymd_opt(2025, 6, 30).expect("valid date"),
            break_date: default_break_date(),
            max_rows: 5_000_000,
            coefficients: esg_interaction_coefficients(),
            industries: default_industries(),
        }
    }
}

fn esg_interaction_coefficients() -> BTreeMap<String, f64> {
    coefficients(&[
        ("ts", -6.227),
        ("ps", -3.667),
        ("esg", 0.019),
        ("ts_x_esg", 0.890),
        ("ps_x_esg", -1.055),
        ("size", -0.015),
        ("leverage", 0.036),
        ("profitability", -0.004),
        ("non_div", 0.021),
    ])
}

fn coefficients(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

impl DgpConfig {
    /// Heterogeneous-effects truth: ESG-only model with controls. This is
    /// also the default coefficient block.
    pub fn esg_interaction_truth() -> Self {
        Self::default()
    }

    /// All coefficients zero: returns are fixed effects plus noise.
    pub fn null() -> Self {
        Self {
            coefficients: BTreeMap::new(),
            ..Self::default()
        }
    }

    /// Regime-shift truth: within-industry model with a post-break reversal
    /// of the target-by-ESG slope.
    pub fn regime_shift_truth() -> Self {
        Self {
            coefficients: coefficients(&[
                ("ts", -11.074),
                ("esg", 0.001),
                ("ts_x_esg", 0.285),
                ("ps_x_esg", -0.119),
                ("post_x_ts", -6.840),
                ("post_x_esg", -0.002),
                ("post_x_ts_x_esg", -0.930),
                ("post_x_ps_x_esg", -0.086),
            ]),
            industry_event_sd: 0.3,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n_events < 3 {
            return bad(format!("n_events = {} but at least 3 events are needed", self.n_events));
        }
        if self.n_firms == 0 {
            return bad("n_firms must be positive".into());
        }
        if self.n_firms.saturating_mul(self.n_events) > self.max_rows {
            return bad(format!(
                "{} firms x {} events exceeds max_rows = {}",
                self.n_firms, self.n_events, self.max_rows
            ));
        }
        if !(self.ts_sd > 0.0 && self.ps_sd > 0.0) || !self.ts_sd.is_finite() || !self.ps_sd.is_finite() {
            return bad("ts_sd and ps_sd must be positive".into());
        }
        for (name, v) in [
            ("noise_sd", self.noise_sd),
            ("firm_effect_sd", self.firm_effect_sd),
            ("industry_event_sd", self.industry_event_sd),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be non-negative"));
            }
        }
        if !(0.0..=1.0).contains(&self.esg_coverage) {
            return bad(format!("esg_coverage {} outside [0, 1]", self.esg_coverage));
        }
        if self.end_date <= self.start_date {
            return bad("end_date must follow start_date".into());
        }
        if ((self.end_date - self.start_date).num_days() as usize) < self.n_events {
            return bad("date range shorter than the number of events".into());
        }
        if self.industries.is_empty() || self.industries.iter().any(|i| !(i.weight > 0.0)) {
            return bad("industries need positive weights".into());
        }
        for (k, v) in &self.coefficients {
            k.parse::<Term>()?;
            if !v.is_finite() {
                return bad(format!("coefficient {k} is not finite"));
            }
        }
        Ok(())
    }

    pub fn terms(&self) -> Result<Vec<(Term, f64)>> {
        self.coefficients.iter().map(|(k, v)| Ok((k.parse::<Term>()?, *v))).collect()
    }

    pub fn from_cfg_str(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).map_err(|e| Error::InvalidArgument(e.message().to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let c: Self = toml::from_str(&text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_cfg_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// One announcement with its surprises in basis points.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSurprise {
    pub event_id: String,
    pub date: NaiveDate,
    pub ts_bp: f64,
    pub ps_bp: f64,
}

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const SURPRISE_STREAM: u64 = 0;
const SHOCK_STREAM: u64 = u64::MAX;

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn center(v: &mut [f64]) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= m);
}

/// Evenly spaced event dates with ids `E001`, `E002`, ...
pub fn event_calendar(cfg: &DgpConfig) -> Vec<(String, NaiveDate)> {
    let span = (cfg.end_date - cfg.start_date).num_days() as f64;
    let width = cfg.n_events.to_string().len().max(3);
    (0..cfg.n_events)
        .map(|k| {
            let offset = ((k as f64 + 0.5) * span / cfg.n_events as f64).floor() as i64;
            (format!("E{:0width$}", k + 1), cfg.start_date + Duration::days(offset))
        })
        .collect()
}

/// Gaussian surprises made exactly mean-zero and mutually orthogonal in sample.
pub fn generate_surprises(cfg: &DgpConfig) -> Result<Vec<EventSurprise>> {
    if cfg.n_events < 3 {
        return Err(Error::InsufficientData(format!("{} events; at least 3 needed", cfg.n_events)));
    }
    let mut rng = rng_for(cfg.seed, SURPRISE_STREAM);
    let n = cfg.n_events;
    let mut ts: Vec<f64> = (0..n).map(|_| cfg.ts_sd * normal(&mut rng)).collect();
    let mut ps: Vec<f64> = (0..n).map(|_| cfg.ps_sd * normal(&mut rng)).collect();
    center(&mut ts);
    center(&mut ps);
    let tt: f64 = ts.iter().map(|x| x * x).sum();
    let tp: f64 = ts.iter().zip(&ps).map(|(a, b)| a * b).sum();
    for (p, t) in ps.iter_mut().zip(&ts) {
        *p -= tp / tt * t;
    }
    center(&mut ps);
    Ok(event_calendar(cfg)
        .into_iter()
        .zip(ts.into_iter().zip(ps))
        .map(|((event_id, date), (ts_bp, ps_bp))| EventSurprise {
            event_id,
            date,
            ts_bp,
            ps_bp,
        })
        .collect())
}

fn firm_records(
    cfg: &DgpConfig,
    firm: usize,
    events: &[EventSurprise],
    picker: &WeightedIndex<f64>,
    shocks: &[Vec<f64>],
) -> Vec<FirmEventRecord> {
    let mut rng = rng_for(cfg.seed, firm as u64 + 1);
    let width = cfg.n_firms.to_string().len().max(4);
    let firm_id = format!("F{:0width$}", firm + 1);
    let ind = rng.sample(picker);
    let profile = &cfg.industries[ind];
    let has_esg = rng.random::<f64>() < cfg.esg_coverage;
    let alpha = cfg.firm_effect_sd * normal(&mut rng);
    let size0 = 22.6 + 1.2 * normal(&mut rng);
    let lev0 = (0.45 + 0.2 * normal(&mut rng)).max(0.02);
    let prof0 = 0.125 + 0.08 * normal(&mut rng);
    let p_nondiv = if rng.random::<f64>() < 0.2 { 0.7 } else { 0.05 };
    let esg0 = profile.esg_offset + normal(&mut rng);
    events
        .iter()
        .enumerate()
        .map(|(t, e)| {
            let size = size0 + 0.1 * normal(&mut rng);
            let leverage = (lev0 + 0.03 * normal(&mut rng)).max(0.0);
            let profitability = prof0 + 0.05 * normal(&mut rng);
            let non_div = rng.random::<f64>() < p_nondiv;
            let esg_draw = 50.0 + 15.0 * (esg0 + 0.3 * normal(&mut rng));
            let eps = cfg.noise_sd * normal(&mut rng);
            FirmEventRecord {
                firm_id: firm_id.clone(),
                event_id: e.event_id.clone(),
                event_date: e.date,
                industry: profile.name.clone(),
                ret: Some(alpha + shocks[ind][t] + eps),
                esg_raw: has_esg.then(|| esg_draw.clamp(0.0, 100.0)),
                esg_std: None,
                size: Some(size),
                leverage: Some(leverage),
                profitability: Some(profitability),
                non_div: Some(non_div),
                ts_bp: e.ts_bp,
                ps_bp: e.ps_bp,
                quintile: None,
            }
        })
        .collect()
}

/// Balanced synthetic panel, prepared (winsorized, standardized, quintiles
/// assigned), with returns linear in the configured terms plus firm effects,
/// industry-by-event shocks and Gaussian noise. Terms that are missing on a
/// row (ESG terms for unscored firms) contribute nothing.
pub fn generate_panel(cfg: &DgpConfig) -> Result<PanelDataset> {
    cfg.validate()?;
    let events = generate_surprises(cfg)?;
    let terms = cfg.terms()?;
    let mut shock_rng = rng_for(cfg.seed, SHOCK_STREAM);
    let shocks: Vec<Vec<f64>> = cfg
        .industries
        .iter()
        .map(|_| (0..events.len()).map(|_| cfg.industry_event_sd * normal(&mut shock_rng)).collect())
        .collect();
    let picker = WeightedIndex::new(cfg.industries.iter().map(|i| i.weight))
        .map_err(|e| Error::InvalidArgument(format!("industry weights: {e}")))?;
    let records: Vec<FirmEventRecord> = (0..cfg.n_firms)
        .into_par_iter()
        .map(|f| firm_records(cfg, f, &events, &picker, &shocks))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let mut panel = PanelDataset::new(records)?;
    prepare_panel(&mut panel, PrepareOptions::default())?;
    for r in panel.records_mut() {
        let signal: f64 = terms.iter().filter_map(|(t, b)| t.value(r, cfg.break_date).map(|v| b * v)).sum();
        if let Some(ret) = r.ret.as_mut() {
            *ret += signal;
        }
    }
    Ok(panel)
}

/// Distinct events of a panel in first-appearance order.
pub fn panel_events(panel: &PanelDataset) -> Vec<EventSurprise> {
    let mut seen = std::collections::HashSet::new();
    panel
        .records()
        .iter()
        .filter(|r| seen.insert(r.event_id.clone()))
        .map(|r| EventSurprise {
            event_id: r.event_id.clone(),
            date: r.event_date,
            ts_bp: r.ts_bp,
            ps_bp: r.ps_bp,
        })
        .collect()
}

pub(crate) fn days_in_month(d: NaiveDate) -> u32 {
    let (y, m) = if d.month() == 12 { (d.year() + 1, 1) } else { (d.year(), d.month() + 1) };
    NaiveDate::from_ymd_opt(y, m, 1).expect("valid date").pred_opt().expect("valid date").day()
}
