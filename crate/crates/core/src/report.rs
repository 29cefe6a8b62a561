//! Side-by-side coefficient tables from one or more fit files.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::data::io::FitTable;
use crate::econometrics::Term;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportStyle {
    /// Heterogeneous effects: main effects, ESG and control interactions.
    Table12,
    /// ESG channel: surprises, ESG and their interactions.
    Table13,
    /// Regime shift: pre-break ESG channel plus post-break changes.
    Table14,
    /// Green and brown portfolios.
    Table15,
    /// Quintile interactions.
    Table16,
}

impl FromStr for ReportStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "table12" => ReportStyle::Table12,
            "table13" => ReportStyle::Table13,
            "table14" => ReportStyle::Table14,
            "table15" => ReportStyle::Table15,
            "table16" => ReportStyle::Table16,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown report style {other:?}; valid styles: table12, table13, table14, table15, table16"
                )))
            }
        })
    }
}

impl ReportStyle {
    /// Preferred row order; terms not listed follow in first-seen order.
    pub fn rows(self) -> Vec<String> {
        let base13 = ["ts", "ps", "esg", "ts_x_esg", "ps_x_esg"];
        let v: Vec<&str> = match self {
            ReportStyle::Table12 => vec![
                "ts",
                "ps",
                "esg",
                "size",
                "leverage",
                "profitability",
                "non_div",
                "ts_x_esg",
                "ps_x_esg",
                "ts_x_size",
                "ps_x_size",
                "ts_x_leverage",
                "ps_x_leverage",
                "ts_x_profitability",
                "ps_x_profitability",
                "ts_x_non_div",
                "ps_x_non_div",
            ],
            ReportStyle::Table13 => base13.to_vec(),
            ReportStyle::Table14 => {
                let mut v = base13.to_vec();
                v.extend(["post", "post_x_ts", "post_x_ps", "post_x_esg", "post_x_ts_x_esg", "post_x_ps_x_esg"]);
                v
            }
            ReportStyle::Table15 => vec![
                "ts",
                "ps",
                "green",
                "brown",
                "ts_x_green",
                "ps_x_green",
                "ts_x_brown",
                "ps_x_brown",
                "post_x_ts_x_green",
                "post_x_ps_x_green",
                "post_x_ts_x_brown",
                "post_x_ps_x_brown",
            ],
            ReportStyle::Table16 => vec![
                "q2_x_ts", "q3_x_ts", "q4_x_ts", "q5_x_ts", "q2_x_ps", "q3_x_ps", "q4_x_ps", "q5_x_ps", "ts", "ps",
            ],
        };
        v.into_iter().map(String::from).collect()
    }
}

fn label(term: &str) -> String {
    term.parse::<Term>().map(|t| t.label()).unwrap_or_else(|_| term.to_string())
}

fn fmt_coef(v: f64) -> String {
    format!("{v:.3}")
}

struct Cell {
    coef: String,
    se: String,
}

/// Rows of the comparison: (term, per-column cells).
fn layout(style: ReportStyle, fits: &[FitTable]) -> Vec<(String, Vec<Option<Cell>>)> {
    let mut order = style.rows();
    for f in fits {
        for r in &f.rows {
            if !order.contains(&r.term) {
                order.push(r.term.clone());
            }
        }
    }
    order
        .into_iter()
        .filter_map(|term| {
            let cells: Vec<Option<Cell>> = fits
                .iter()
                .map(|f| {
                    f.rows.iter().find(|r| r.term == term).map(|r| match (r.coef, r.se) {
                        (Some(c), Some(s)) => Cell {
                            coef: format!("{}{}", fmt_coef(c), r.stars),
                            se: format!("({s:.3})"),
                        },
                        _ => Cell {
                            coef: "---".into(),
                            se: "---".into(),
                        },
                    })
                })
                .collect();
            cells.iter().any(Option::is_some).then_some((term, cells))
        })
        .collect()
}

fn footer(fits: &[FitTable]) -> Vec<(&'static str, Vec<String>)> {
    vec![
        ("Observations", fits.iter().map(|f| f.n.to_string()).collect()),
        ("R²", fits.iter().map(|f| format!("{:.3}", f.r2)).collect()),
        (
            "Within R²",
            fits.iter().map(|f| f.r2_within.map(|v| format!("{v:.3}")).unwrap_or_default()).collect(),
        ),
        ("Clusters (events)", fits.iter().map(|f| f.clusters.to_string()).collect()),
    ]
}

fn check(fits: &[FitTable]) -> Result<()> {
    if fits.is_empty() {
        return Err(Error::InvalidArgument("no fits to report".into()));
    }
    Ok(())
}

/// Markdown table with standard errors in parentheses under each estimate.
pub fn render_markdown(style: ReportStyle, fits: &[FitTable]) -> Result<String> {
    check(fits)?;
    let mut s = String::new();
    let k = fits.len();
    let _ = writeln!(s, "| |{}", (1..=k).map(|j| format!(" ({j}) |")).collect::<String>());
    let _ = writeln!(s, "|---|{}", "---:|".repeat(k));
    let _ = writeln!(s, "| |{}", fits.iter().map(|f| format!(" {} |", f.spec)).collect::<String>());
    for (term, cells) in layout(style, fits) {
        let coef: String = cells.iter().map(|c| format!(" {} |", c.as_ref().map_or("", |c| &c.coef))).collect();
        let se: String = cells.iter().map(|c| format!(" {} |", c.as_ref().map_or("", |c| &c.se))).collect();
        let _ = writeln!(s, "| {} |{coef}", label(&term));
        let _ = writeln!(s, "| |{se}");
    }
    for (name, vals) in footer(fits) {
        let _ = writeln!(s, "| {name} |{}", vals.iter().map(|v| format!(" {v} |")).collect::<String>());
    }
    s.push_str(
        "\nStandard errors clustered by event in parentheses. ***, ** and * denote |t| at or above 2.576, 1.960 and 1.645. --- marks terms absorbed by the fixed effects.\n",
    );
    Ok(s)
}

/// Header and rows of the CSV rendering: one coefficient row and one
/// standard-error row per term, then summary rows.
pub fn render_csv_rows(style: ReportStyle, fits: &[FitTable]) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    check(fits)?;
    let mut header = vec!["term".to_string(), "label".to_string(), "row".to_string()];
    header.extend(fits.iter().enumerate().map(|(j, f)| format!("({}) {}", j + 1, f.spec)));
    let mut rows = Vec::new();
    for (term, cells) in layout(style, fits) {
        let lab = label(&term);
        let mut coef = vec![term.clone(), lab.clone(), "coef".into()];
        let mut se = vec![term, lab, "se".into()];
        for c in &cells {
            coef.push(c.as_ref().map(|c| c.coef.clone()).unwrap_or_default());
            se.push(c.as_ref().map(|c| c.se.clone()).unwrap_or_default());
        }
        rows.push(coef);
        rows.push(se);
    }
    for (name, vals) in footer(fits) {
        let mut r = vec![String::new(), name.to_string(), "stat".into()];
        r.extend(vals);
        rows.push(r);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::io::FitRow;

    fn fit(spec: &str, rows: &[(&str, Option<f64>, Option<f64>, &str)]) -> FitTable {
        FitTable {
            spec: spec.into(),
            n: 100,
            r2: 0.25,
            r2_within: Some(0.1),
            clusters: 10,
            rows: rows
                .iter()
                .map(|(t, c, s, st)| FitRow {
                    term: t.to_string(),
                    coef: *c,
                    se: *s,
                    stars: st.to_string(),
                })
                .collect(),
        }
    }

    #[test]
    fn three_column_comparison() {
        let a = fit("esg_only", &[("ts", Some(-6.227), Some(1.109), "***"), ("ps", Some(-3.667), Some(0.7), "***")]);
        let b = fit("full", &[("ts", Some(-16.83), Some(5.605), "***")]);
        let c = fit("industry_event_fe", &[("ts", Some(-11.452), Some(10.452), ""), ("ps", None, None, "absorbed")]);
        let md = render_markdown(ReportStyle::Table13, &[a, b, c]).unwrap();
        assert!(md.contains("| Target Surprise | -6.227*** | -16.830*** | -11.452 |"), "{md}");
        assert!(md.contains("| Path Surprise | -3.667*** |  | --- |"), "{md}");
        assert!(md.contains("(3)"));
    }

    #[test]
    fn empty_list_rejected() {
        assert!(render_markdown(ReportStyle::Table12, &[]).is_err());
    }

    #[test]
    fn unknown_style() {
        assert!("table99".parse::<ReportStyle>().is_err());
    }
}
