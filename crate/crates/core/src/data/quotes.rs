use chrono::{Datelike, Duration};
use rand::Rng;
use rand_distr::StandardNormal;

use super::dgp::{days_in_month, rng_for, EventSurprise};
use crate::surprise::{EventQuoteSet, LATE_MONTH_THRESHOLD};

/// Responses of (mp1, mp2, 2y, 5y, 10y) to a 1 bp target surprise.
pub const TARGET_LOADINGS: [f64; 5] = [1.0, 1.155, 1.283, 2.115, 1.453];
/// Responses of the same instruments to a 1 bp path surprise.
pub const PATH_LOADINGS: [f64; 5] = [0.0, 0.606, 1.283, 3.676, 5.764];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuoteOptions {
    /// Instrument-level measurement noise in basis points.
    pub noise_bp: f64,
    pub seed: u64,
    /// Days from each announcement to the next scheduled meeting.
    pub meeting_gap_days: i64,
}

impl Default for QuoteOptions {
    fn default() -> Self {
        Self {
            noise_bp: 0.05,
            seed: 7,
            meeting_gap_days: 45,
        }
    }
}

/// Futures and Treasury quotes whose day-count-scaled surprises equal the
/// loadings applied to each event's (TS, PS) plus noise.
pub fn generate_quotes(events: &[EventSurprise], opts: QuoteOptions) -> Vec<EventQuoteSet> {
    let mut rng = rng_for(opts.seed, 0);
    let mut level = 2.0;
    events
        .iter()
        .map(|e| {
            let x: Vec<f64> = (0..5)
                .map(|i| {
                    let noise: f64 = rng.sample(StandardNormal);
                    TARGET_LOADINGS[i] * e.ts_bp + PATH_LOADINGS[i] * e.ps_bp + opts.noise_bp * noise
                })
                .collect();
            let (mp1, mp2) = (x[0], x[1]);
            let day = e.date.day();
            let days = days_in_month(e.date);
            let second = e.date + Duration::days(opts.meeting_gap_days);
            let (d2, days2) = (second.day(), days_in_month(second));

            let remaining = days - day;
            // Consistent with the next-month contract when the current month is too short.
            let ff1_change = mp1 * remaining as f64 / days as f64 / 100.0;
            let remaining2 = days2 - d2;
            let ff2_change_bp = if remaining2 >= LATE_MONTH_THRESHOLD {
                mp2 * remaining2 as f64 / days2 as f64 + d2 as f64 / days2 as f64 * mp1
            } else {
                mp2
            };
            let base = level;
            level = (level + 0.01 * rng.sample::<f64, _>(StandardNormal)).max(0.05);
            EventQuoteSet {
                event_id: e.event_id.clone(),
                announce_date: e.date,
                day,
                days_in_month: days,
                second_day: d2,
                second_days_in_month: days2,
                ff1_pre: Some(base),
                ff1_post: Some(base + ff1_change),
                ff1_next_pre: Some(base),
                ff1_next_post: Some(base + mp1 / 100.0),
                ff2_pre: Some(base),
                ff2_post: Some(base + ff2_change_bp / 100.0),
                d2y: Some(x[2] / 100.0),
                d5y: Some(x[3] / 100.0),
                d10y: Some(x[4] / 100.0),
            }
        })
        .collect()
}
