use chrono::NaiveDate;

use super::rotation::PolicySurprises;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n-1); zero for a single observation.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl SeriesStats {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        let sd = if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Self { n, mean, sd, min, max })
    }

    pub fn range(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSummary {
    pub name: &'static str,
    pub full: Option<SeriesStats>,
    /// Events dated strictly before the break.
    pub pre: Option<SeriesStats>,
    /// Events on or after the break.
    pub post: Option<SeriesStats>,
}

impl SeriesSummary {
    /// Post minus pre mean, when both periods are populated.
    pub fn mean_difference(&self) -> Option<f64> {
        Some(self.post?.mean - self.pre?.mean)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurpriseSummary {
    pub break_date: NaiveDate,
    pub target: SeriesSummary,
    pub path: SeriesSummary,
}

pub fn surprise_summary(s: &PolicySurprises, break_date: NaiveDate) -> SurpriseSummary {
    let split = |values: &[f64], name: &'static str| {
        let (mut pre, mut post) = (Vec::new(), Vec::new());
        for (e, &v) in s.events.iter().zip(values) {
            if e.date < break_date {
                pre.push(v);
            } else {
                post.push(v);
            }
        }
        SeriesSummary {
            name,
            full: SeriesStats::of(values),
            pre: SeriesStats::of(&pre),
            post: SeriesStats::of(&post),
        }
    };
    SurpriseSummary {
        break_date,
        target: split(&s.ts, "Target Surprise (bp)"),
        path: split(&s.ps, "Path Surprise (bp)"),
    }
}
