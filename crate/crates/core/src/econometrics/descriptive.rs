use super::data::{FirmEventRecord, PanelDataset};
use super::prep::nearest_rank_bounds;

type Getter = fn(&FirmEventRecord) -> Option<f64>;

/// The panel variables described in summary tables, with display labels.
pub const VARIABLES: [(&str, Getter); 6] = [
    ("Stock Return (%)", |r| r.ret),
    ("ESG Score (Std.)", |r| r.esg_std),
    ("Log(Assets)", |r| r.size),
    ("Book Leverage", |r| r.leverage),
    ("Profitability", |r| r.profitability),
    ("Non-Dividend Payer", |r| r.non_div.map(|b| if b { 1.0 } else { 0.0 })),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub variable: String,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub p10: f64,
    pub p50: f64,
    pub p90: f64,
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    nearest_rank_bounds(sorted, p, 1.0).map_or(f64::NAN, |b| b.0)
}

pub fn summary_statistics(data: &PanelDataset) -> Vec<SummaryRow> {
    VARIABLES
        .iter()
        .map(|(label, get)| {
            let mut v: Vec<f64> = data.records().iter().filter_map(get).collect();
            v.sort_by(f64::total_cmp);
            let n = v.len();
            let mean = v.iter().sum::<f64>() / n as f64;
            let sd = if n > 1 {
                (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                f64::NAN
            };
            SummaryRow {
                variable: label.to_string(),
                n,
                mean,
                sd,
                p10: percentile(&v, 0.10),
                p50: percentile(&v, 0.50),
                p90: percentile(&v, 0.90),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndustryRow {
    pub industry: String,
    pub firms: usize,
    /// Percent of firm-event rows with a standardized score.
    pub coverage_pct: f64,
    pub avg_esg: f64,
    pub sd_esg: f64,
    pub n_obs: usize,
}

/// Score coverage and distribution per industry, sorted by coverage descending.
pub fn esg_by_industry(data: &PanelDataset) -> Vec<IndustryRow> {
    let mut rows: Vec<IndustryRow> = data
        .industries()
        .into_iter()
        .map(|ind| {
            let recs: Vec<&FirmEventRecord> = data.records().iter().filter(|r| r.industry == ind).collect();
            let mut firms: Vec<&str> = recs.iter().map(|r| r.firm_id.as_str()).collect();
            firms.sort_unstable();
            firms.dedup();
            let scores: Vec<f64> = recs.iter().filter_map(|r| r.esg_std).collect();
            let m = scores.len() as f64;
            let avg = scores.iter().sum::<f64>() / m;
            let sd = (scores.iter().map(|x| (x - avg).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
            IndustryRow {
                industry: ind,
                firms: firms.len(),
                coverage_pct: 100.0 * m / recs.len() as f64,
                avg_esg: avg,
                sd_esg: sd,
                n_obs: recs.len(),
            }
        })
        .collect();
    rows.sort_by(|a, b| b.coverage_pct.total_cmp(&a.coverage_pct).then_with(|| a.industry.cmp(&b.industry)));
    rows
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    /// Lower-triangular Pearson correlations (full symmetric storage).
    pub values: Vec<Vec<f64>>,
    /// `|t| >= 1.96` for `t = r sqrt(n-2) / sqrt(1-r^2)`.
    pub significant: Vec<Vec<bool>>,
    pub n: usize,
}

/// Pearson correlations over rows with every variable present.
pub fn correlation_matrix(data: &PanelDataset) -> CorrelationMatrix {
    let getters: [(&str, Getter); 7] = [
        ("Stock Return", |r| r.ret),
        ("ESG Score", |r| r.esg_std),
        ("Log Size", |r| r.size),
        ("Leverage", |r| r.leverage),
        ("Profitability", |r| r.profitability),
        ("Target Surprise", |r| Some(r.ts_bp)),
        ("Path Surprise", |r| Some(r.ps_bp)),
    ];
    let rows: Vec<Vec<f64>> = data
        .records()
        .iter()
        .filter_map(|r| getters.iter().map(|(_, g)| g(r)).collect::<Option<Vec<f64>>>())
        .collect();
    let n = rows.len();
    let k = getters.len();
    let means: Vec<f64> = (0..k).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let mut cov = vec![vec![0.0; k]; k];
    for r in &rows {
        for a in 0..k {
            for b in 0..=a {
                cov[a][b] += (r[a] - means[a]) * (r[b] - means[b]);
            }
        }
    }
    let mut values = vec![vec![f64::NAN; k]; k];
    let mut significant = vec![vec![false; k]; k];
    for a in 0..k {
        for b in 0..=a {
            let r = cov[a][b] / (cov[a][a] * cov[b][b]).sqrt();
            values[a][b] = r;
            values[b][a] = r;
            let t = r * ((n as f64 - 2.0) / (1.0 - r * r)).sqrt();
            let sig = a != b && t.abs() >= 1.96;
            significant[a][b] = sig;
            significant[b][a] = sig;
        }
    }
    CorrelationMatrix {
        labels: getters.iter().map(|(l, _)| l.to_string()).collect(),
        values,
        significant,
        n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econometrics::data::tests::record;

    fn panel() -> PanelDataset {
        let recs = (0..20)
            .map(|i| {
                let mut r = record(&format!("f{i}"), "e1", 1);
                r.ret = Some(i as f64);
                r.size = Some(2.0 * i as f64 + 1.0);
                r.esg_std = if i % 4 == 0 { None } else { Some((i % 7) as f64) };
                r.industry = if i < 10 { "A".into() } else { "B".into() };
                r
            })
            .collect();
        PanelDataset::new(recs).unwrap()
    }

    #[test]
    fn summary_counts_and_percentiles() {
        let s = summary_statistics(&panel());
        assert_eq!(s[0].n, 20);
        assert_eq!(s[0].p50, 9.0);
        assert_eq!(s[0].p10, 1.0);
        assert_eq!(s[1].n, 15);
    }

    #[test]
    fn perfectly_correlated_columns() {
        let mut d = panel();
        for r in d.records_mut() {
            r.esg_std = Some(1.0 + (r.ret.unwrap() * 0.37).sin());
            r.profitability = Some(r.ret.unwrap().cos());
            r.leverage = Some(r.ret.unwrap().sqrt());
        }
        let c = correlation_matrix(&d);
        assert_eq!(c.n, 20);
        assert!((c.values[2][0] - 1.0).abs() < 1e-12);
        assert!(c.significant[2][0]);
    }

    #[test]
    fn industry_coverage() {
        let rows = esg_by_industry(&panel());
        assert_eq!(rows.len(), 2);
        let a = rows.iter().find(|r| r.industry == "A").unwrap();
        assert_eq!(a.n_obs, 10);
        assert!((a.coverage_pct - 70.0).abs() < 1e-12);
    }
}
