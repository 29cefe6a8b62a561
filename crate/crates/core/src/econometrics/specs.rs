use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::covariance::cluster_covariance;
use super::data::PanelDataset;
use super::design::{build_design, Factor, FixedEffects, RegressionSpec, SampleFilter, Term};
use super::fe::{absorb_fixed_effects, AbsorbOptions};
use super::ols::ols_fit;
use crate::error::{Error, Result};

/// Named specifications of the estimation ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpecName {
    Baseline,
    Interactions,
    EsgOnly,
    Full,
    IndustryEventFe,
    ParisBasic,
    ParisFull,
    ParisFe,
    Portfolio,
    Quintile,
    Industry,
}

impl SpecName {
    pub const ALL: [SpecName; 11] = [
        SpecName::Baseline,
        SpecName::Interactions,
        SpecName::EsgOnly,
        SpecName::Full,
        SpecName::IndustryEventFe,
        SpecName::ParisBasic,
        SpecName::ParisFull,
        SpecName::ParisFe,
        SpecName::Portfolio,
        SpecName::Quintile,
        SpecName::Industry,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SpecName::Baseline => "baseline",
            SpecName::Interactions => "interactions",
            SpecName::EsgOnly => "esg_only",
            SpecName::Full => "full",
            SpecName::IndustryEventFe => "industry_event_fe",
            SpecName::ParisBasic => "paris_basic",
            SpecName::ParisFull => "paris_full",
            SpecName::ParisFe => "paris_fe",
            SpecName::Portfolio => "portfolio",
            SpecName::Quintile => "quintile",
            SpecName::Industry => "industry",
        }
    }

    /// Builds the specification. `industries` is only used by `Industry`.
    pub fn spec(self, industries: &[String]) -> RegressionSpec {
        use Factor::*;
        let m = Term::main;
        let t = Term::of;
        let mp = [Target, Path];
        let controls = [Size, Leverage, Profitability, NonDividend];
        let control_terms = || controls.iter().cloned().map(m).collect::<Vec<_>>();
        let control_mp = || {
            mp.iter()
                .flat_map(|s| controls.iter().map(move |c| t(&[s.clone(), c.clone()])))
                .collect::<Vec<_>>()
        };
        let esg_block = || vec![m(Target), m(Path), m(Esg), t(&[Target, Esg]), t(&[Path, Esg])];
        let full = || {
            let mut v = esg_block();
            v.extend(control_terms());
            v.extend(control_mp());
            v
        };
        let with_post = |base: Vec<Term>| {
            let mut v = base.clone();
            v.push(m(Post));
            v.extend(base.into_iter().map(|b| {
                let mut f = vec![Post];
                f.extend(b.0);
                Term(f)
            }));
            v
        };
        let (terms, fe, sample) = match self {
            SpecName::Baseline => {
                let mut v = vec![m(Target), m(Path)];
                v.extend(control_terms());
                (v, FixedEffects::Firm, SampleFilter::All)
            }
            SpecName::Interactions => {
                let mut v = vec![m(Target), m(Path)];
                v.extend(control_terms());
                v.extend(control_mp());
                (v, FixedEffects::Firm, SampleFilter::All)
            }
            SpecName::EsgOnly => {
                let mut v = esg_block();
                v.extend(control_terms());
                (v, FixedEffects::Firm, SampleFilter::RequireEsg)
            }
            SpecName::Full => (full(), FixedEffects::Firm, SampleFilter::RequireEsg),
            SpecName::IndustryEventFe => (full(), FixedEffects::FirmAndIndustryEvent, SampleFilter::RequireEsg),
            SpecName::ParisBasic => {
                let mut v = esg_block();
                v.extend([
                    m(Post),
                    t(&[Post, Target]),
                    t(&[Post, Path]),
                    t(&[Post, Esg]),
                    t(&[Post, Target, Esg]),
                    t(&[Post, Path, Esg]),
                ]);
                v.extend(control_terms());
                (v, FixedEffects::Firm, SampleFilter::RequireEsg)
            }
            SpecName::ParisFull => (with_post(full()), FixedEffects::Firm, SampleFilter::RequireEsg),
            SpecName::ParisFe => (with_post(full()), FixedEffects::FirmAndIndustryEvent, SampleFilter::RequireEsg),
            SpecName::Portfolio => {
                let mut v = vec![
                    m(Target),
                    m(Path),
                    m(Green),
                    m(Brown),
                    t(&[Target, Green]),
                    t(&[Path, Green]),
                    t(&[Target, Brown]),
                    t(&[Path, Brown]),
                ];
                v.extend(control_terms());
                (v, FixedEffects::Firm, SampleFilter::All)
            }
            SpecName::Quintile => {
                let mut v = vec![m(Target), m(Path)];
                v.extend((2..=5).map(|q| m(Quintile(q))));
                for q in 2..=5 {
                    v.push(t(&[Quintile(q), Target]));
                    v.push(t(&[Quintile(q), Path]));
                }
                v.extend(control_terms());
                (v, FixedEffects::Firm, SampleFilter::RequireEsg)
            }
            SpecName::Industry => {
                let mut v = Vec::new();
                for ind in industries {
                    let i = Industry(ind.clone());
                    v.push(t(&[i.clone(), Target]));
                    v.push(t(&[i.clone(), Path]));
                    v.push(t(&[i.clone(), Post, Target]));
                    v.push(t(&[i, Post, Path]));
                }
                v.extend([m(Esg), t(&[Target, Esg]), t(&[Path, Esg])]);
                v.extend(control_terms());
                v.push(m(Post));
                (v, FixedEffects::Firm, SampleFilter::RequireEsg)
            }
        };
        RegressionSpec::new(self.as_str(), terms, fe, sample)
    }

    pub fn valid_names() -> String {
        Self::ALL.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for SpecName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpecName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown specification {s:?}; valid names: {}", Self::valid_names())))
    }
}

/// One reported coefficient. `coef` and `se` are `None` for absorbed terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub name: String,
    pub label: String,
    pub coef: Option<f64>,
    pub se: Option<f64>,
}

impl Estimate {
    pub fn t_stat(&self) -> Option<f64> {
        Some(self.coef? / self.se?)
    }

    pub fn is_absorbed(&self) -> bool {
        self.coef.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub spec: String,
    pub estimates: Vec<Estimate>,
    /// Covariance of the estimated (non-absorbed) coefficients, in order.
    pub covariance: DMatrix<f64>,
    pub n: usize,
    pub clusters: usize,
    /// Overall R² of the model including fixed effects.
    pub r2: f64,
    /// R² of the within-transformed regression.
    pub r2_within: f64,
    pub dropped_rows: usize,
    pub small_sample_factor: f64,
    pub fixed_effects: FixedEffects,
}

impl FitResult {
    pub fn get(&self, name: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.name == name)
    }

    pub fn absorbed(&self) -> Vec<&str> {
        self.estimates.iter().filter(|e| e.is_absorbed()).map(|e| e.name.as_str()).collect()
    }
}

/// Estimates `spec` on prepared data with event-clustered errors.
pub fn fit_specification(spec: &RegressionSpec, data: &PanelDataset) -> Result<FitResult> {
    let mut design = build_design(spec, data)?;
    let y_raw = design.y.clone();
    let absorbed = if design.fixed_effects.is_empty() {
        vec![false; design.x.ncols()]
    } else {
        absorb_fixed_effects(&mut design.x, &mut design.y, &design.fixed_effects, AbsorbOptions::default())?.absorbed
    };
    let kept: Vec<usize> = (0..design.x.ncols()).filter(|&j| !absorbed[j]).collect();
    if kept.is_empty() {
        return Err(Error::InsufficientData(format!(
            "every regressor in {} is absorbed by the fixed effects",
            spec.name
        )));
    }
    let x = design.x.select_columns(&kept);
    let names: Vec<String> = kept.iter().map(|&j| design.names[j].clone()).collect();
    let ols = ols_fit(&x, &design.y, &names)?;
    let (covariance, factor) = cluster_covariance(&x, &ols.residuals, &ols.xtx_inv, &design.clusters)?;

    let rss = ols.residuals.norm_squared();
    let mean = y_raw.mean();
    let tss = y_raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    let r2 = 1.0 - rss / tss;
    let r2_within = if design.fixed_effects.is_empty() {
        r2
    } else {
        1.0 - rss / design.y.norm_squared()
    };

    let mut estimates = Vec::with_capacity(design.names.len());
    let mut pos = 0;
    for j in 0..design.names.len() {
        let (coef, se) = if absorbed[j] {
            (None, None)
        } else {
            let e = (Some(ols.coefficients[pos]), Some(covariance[(pos, pos)].max(0.0).sqrt()));
            pos += 1;
            e
        };
        estimates.push(Estimate {
            name: design.names[j].clone(),
            label: design.labels[j].clone(),
            coef,
            se,
        });
    }
    Ok(FitResult {
        spec: spec.name.clone(),
        estimates,
        covariance,
        n: design.n(),
        clusters: design.clusters.n_groups,
        r2,
        r2_within,
        dropped_rows: design.dropped_rows,
        small_sample_factor: factor,
        fixed_effects: spec.fixed_effects,
    })
}

/// Builds and estimates a named specification.
pub fn run_specification(name: SpecName, data: &PanelDataset) -> Result<FitResult> {
    fit_specification(&name.spec(&data.industries()), data)
}
