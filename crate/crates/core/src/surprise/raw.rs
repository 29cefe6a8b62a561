use chrono::NaiveDate;

use crate::error::{Error, Result};

/// Default late-month cutoff: fewer remaining days than this switches to the
/// next-month contract.
pub const LATE_MONTH_THRESHOLD: u32 = 7;

/// Quotes for one announcement, in percent (rates) and percentage points
/// (Treasury changes), plus the calendar facts needed for day-count scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct EventQuoteSet {
    pub event_id: String,
    pub announce_date: NaiveDate,
    /// Day of month of the announcement (1-based).
    pub day: u32,
    pub days_in_month: u32,
    /// Day of month of the second scheduled meeting.
    pub second_day: u32,
    pub second_days_in_month: u32,
    pub ff1_pre: Option<f64>,
    pub ff1_post: Option<f64>,
    pub ff1_next_pre: Option<f64>,
    pub ff1_next_post: Option<f64>,
    pub ff2_pre: Option<f64>,
    pub ff2_post: Option<f64>,
    pub d2y: Option<f64>,
    pub d5y: Option<f64>,
    pub d10y: Option<f64>,
}

impl EventQuoteSet {
    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Error::InvalidEvent {
            event_id: self.event_id.clone(),
            message,
        };
        for (label, d, dm) in [
            ("announcement", self.day, self.days_in_month),
            ("second meeting", self.second_day, self.second_days_in_month),
        ] {
            if !(28..=31).contains(&dm) {
                return Err(bad(format!("{label} month length {dm} outside 28..=31")));
            }
            if d < 1 || d > dm {
                return Err(bad(format!("{label} day {d} outside 1..={dm}")));
            }
        }
        let quotes = [
            ("ff1_pre", self.ff1_pre),
            ("ff1_post", self.ff1_post),
            ("ff1n_pre", self.ff1_next_pre),
            ("ff1n_post", self.ff1_next_post),
            ("ff2_pre", self.ff2_pre),
            ("ff2_post", self.ff2_post),
            ("d2y", self.d2y),
            ("d5y", self.d5y),
            ("d10y", self.d10y),
        ];
        for (name, v) in quotes {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(bad(format!("{name} is not finite")));
                }
            }
        }
        Ok(())
    }
}

/// One scaled surprise component in basis points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledSurprise {
    pub bp: f64,
    pub used_next_month_contract: bool,
}

/// Day-count-scaled raw surprises for one event, in basis points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawSurprises {
    pub mp1: f64,
    pub mp2: f64,
    /// The current-month rule was replaced by the next-month contract for mp1.
    pub used_next_month_contract: bool,
    /// The same substitution applied to the second-meeting contract.
    pub mp2_used_next_month_contract: bool,
}

fn quote_change(
    q: &EventQuoteSet,
    pre: Option<f64>,
    post: Option<f64>,
    what: &str,
) -> Result<f64> {
    match (pre, post) {
        (Some(a), Some(b)) => Ok(b - a),
        _ => Err(Error::InvalidEvent {
            event_id: q.event_id.clone(),
            message: format!("missing {what} quotes"),
        }),
    }
}

/// Current-meeting surprise.
///
/// With at least `late_month_threshold` days left in the month the change in
/// the current-month contract is scaled by `D/(D-d)`; otherwise the unscaled
/// change in the next-month contract is used.
pub fn compute_mp1(q: &EventQuoteSet, late_month_threshold: u32) -> Result<ScaledSurprise> {
    let remaining = q.days_in_month - q.day;
    if remaining >= late_month_threshold && remaining > 0 {
        let change = quote_change(q, q.ff1_pre, q.ff1_post, "current-month")?;
        let scale = q.days_in_month as f64 / remaining as f64;
        Ok(ScaledSurprise {
            bp: 100.0 * scale * change,
            used_next_month_contract: false,
        })
    } else {
        let change = quote_change(q, q.ff1_next_pre, q.ff1_next_post, "next-month")?;
        Ok(ScaledSurprise {
            bp: 100.0 * change,
            used_next_month_contract: true,
        })
    }
}

/// Second-meeting surprise given `mp1` in basis points.
///
/// When the second meeting falls late in its month the `ff2` columns are read
/// as the contract for the month after that meeting, whose rate is the
/// post-meeting expectation itself, so the change is taken unscaled.
pub fn compute_mp2(q: &EventQuoteSet, mp1_bp: f64, late_month_threshold: u32) -> Result<ScaledSurprise> {
    let change_bp = 100.0 * quote_change(q, q.ff2_pre, q.ff2_post, "second-meeting")?;
    let d2 = q.second_day as f64;
    let month = q.second_days_in_month as f64;
    let remaining = q.second_days_in_month - q.second_day;
    if remaining < late_month_threshold {
        return Ok(ScaledSurprise {
            bp: change_bp,
            used_next_month_contract: true,
        });
    }
    if remaining == 0 {
        return Err(Error::InvalidEvent {
            event_id: q.event_id.clone(),
            message: "second meeting on the last day of its month (D2 = d2)".into(),
        });
    }
    let bp = month / (month - d2) * (change_bp - d2 / month * mp1_bp);
    Ok(ScaledSurprise {
        bp,
        used_next_month_contract: false,
    })
}

pub fn compute_raw(q: &EventQuoteSet, late_month_threshold: u32) -> Result<RawSurprises> {
    q.validate()?;
    let mp1 = compute_mp1(q, late_month_threshold)?;
    let mp2 = compute_mp2(q, mp1.bp, late_month_threshold)?;
    Ok(RawSurprises {
        mp1: mp1.bp,
        mp2: mp2.bp,
        used_next_month_contract: mp1.used_next_month_contract,
        mp2_used_next_month_contract: mp2.used_next_month_contract,
    })
}
