#![allow(dead_code)]

use chrono::{Duration, NaiveDate};
use mpesg::econometrics::{FirmEventRecord, FixedEffects, PanelDataset, RegressionSpec, SampleFilter, Term};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn corr(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Least squares through the SVD pseudo-inverse.
pub fn lstsq(x: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    x.clone().svd(true, true).solve(y, 1e-10).expect("svd solve")
}

/// Small unbalanced-free panel with a few industries and random data.
pub fn random_panel(seed: u64, n_firms: usize, n_events: usize, n_industries: usize) -> PanelDataset {
    let mut r = rng(seed);
    let start = NaiveDate::from_ymd_opt(2014, 1, 15).unwrap();
    let events: Vec<(String, NaiveDate, f64, f64)> = (0..n_events)
        .map(|e| {
            (
                format!("E{e:02}"),
                start + Duration::days(60 * e as i64),
                10.0 * normal(&mut r),
                10.0 * normal(&mut r),
            )
        })
        .collect();
    let mut records = Vec::new();
    for f in 0..n_firms {
        let industry = format!("I{}", f % n_industries);
        let firm_level = normal(&mut r);
        for (id, date, ts, ps) in &events {
            records.push(FirmEventRecord {
                firm_id: format!("F{f:02}"),
                event_id: id.clone(),
                event_date: *date,
                industry: industry.clone(),
                ret: Some(normal(&mut r)),
                esg_raw: None,
                esg_std: Some(firm_level + 0.5 * normal(&mut r)),
                size: Some(normal(&mut r)),
                leverage: Some(normal(&mut r)),
                profitability: Some(normal(&mut r)),
                non_div: Some(r.random_bool(0.3)),
                ts_bp: *ts,
                ps_bp: *ps,
                quintile: None,
            });
        }
    }
    PanelDataset::new(records).unwrap()
}

pub fn oracle_spec(fe: FixedEffects) -> RegressionSpec {
    let terms = ["esg", "ts_x_esg", "ps_x_esg", "size", "leverage"]
        .iter()
        .map(|s| s.parse::<Term>().unwrap())
        .collect();
    RegressionSpec::new("oracle", terms, fe, SampleFilter::RequireEsg)
}

/// Slope estimates from explicit firm (and industry-by-event) dummies.
pub fn dummy_variable_estimates(spec: &RegressionSpec, data: &PanelDataset) -> Vec<f64> {
    let rows = data.records();
    let k = spec.terms.len();
    let firms: Vec<&str> = {
        let mut v: Vec<&str> = rows.iter().map(|r| r.firm_id.as_str()).collect();
        v.sort();
        v.dedup();
        v
    };
    let cells: Vec<(String, String)> = {
        let mut v: Vec<(String, String)> = rows.iter().map(|r| (r.industry.clone(), r.event_id.clone())).collect();
        v.sort();
        v.dedup();
        v
    };
    let two_way = spec.fixed_effects == FixedEffects::FirmAndIndustryEvent;
    let width = k + firms.len() + if two_way { cells.len() } else { 0 };
    let mut x = DMatrix::<f64>::zeros(rows.len(), width);
    let mut y = DVector::<f64>::zeros(rows.len());
    for (i, r) in rows.iter().enumerate() {
        for (j, t) in spec.terms.iter().enumerate() {
            x[(i, j)] = t.value(r, spec.break_date).unwrap();
        }
        x[(i, k + firms.binary_search(&r.firm_id.as_str()).unwrap())] = 1.0;
        if two_way {
            let c = cells.binary_search(&(r.industry.clone(), r.event_id.clone())).unwrap();
            x[(i, k + firms.len() + c)] = 1.0;
        }
        y[i] = r.ret.unwrap();
    }
    lstsq(&x, &y).iter().take(k).copied().collect()
}

/// `(X'X)^-1 (sum_g s_g s_g') (X'X)^-1` with `s_g = X_g' u_g`, by explicit loops.
pub fn brute_force_cluster_sandwich(x: &DMatrix<f64>, u: &DVector<f64>, cluster: &[usize]) -> DMatrix<f64> {
    let (n, k) = x.shape();
    let bread = (x.transpose() * x).try_inverse().unwrap();
    let n_groups = cluster.iter().max().unwrap() + 1;
    let mut meat = DMatrix::<f64>::zeros(k, k);
    for g in 0..n_groups {
        let mut s = vec![0.0; k];
        for i in (0..n).filter(|&i| cluster[i] == g) {
            for (j, sj) in s.iter_mut().enumerate() {
                *sj += x[(i, j)] * u[i];
            }
        }
        for a in 0..k {
            for b in 0..k {
                meat[(a, b)] += s[a] * s[b];
            }
        }
    }
    &bread * meat * &bread
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}
