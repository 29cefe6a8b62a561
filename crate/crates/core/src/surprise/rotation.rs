use nalgebra::{DMatrix, DVector, Matrix2};

use super::panel::{EventMeta, InstrumentPanel, INSTRUMENTS};
use super::pca::{centered, least_squares_loadings, FactorDecomposition};
use crate::error::{Error, Result};

const MP1: usize = 0;
const TWO_YEAR: usize = 2;
const TEN_YEAR: usize = 4;

/// Response of one instrument to unit target and path surprises.
#[derive(Debug, Clone, PartialEq)]
pub struct MaturityLoading {
    pub instrument: &'static str,
    pub target: f64,
    pub path: f64,
    pub r2: f64,
}

/// Rotated target/path surprises, one pair per event, in basis points.
#[derive(Debug, Clone)]
pub struct PolicySurprises {
    pub events: Vec<EventMeta>,
    pub ts: Vec<f64>,
    pub ps: Vec<f64>,
    /// `[ts ps] = raw_factors * rotation`.
    pub rotation: Matrix2<f64>,
    pub loadings: Vec<MaturityLoading>,
}

/// Rotates the two raw principal components into a target factor, which
/// carries all of the panel's mp1 signal with unit loading, and an orthogonal
/// path factor with no mp1 loading.
///
/// The path factor is scaled so its 2-year loading matches the target
/// factor's in magnitude, and signed so its 10-year loading is positive.
pub fn rotate_to_target_path(dec: &FactorDecomposition, panel: &InstrumentPanel) -> Result<PolicySurprises> {
    let f = &dec.raw_factors;
    if f.ncols() != 2 || f.nrows() != panel.len() {
        return Err(Error::InvalidArgument(
            "decomposition does not match the instrument panel".into(),
        ));
    }
    let x = centered(&panel.x, &dec.center);
    let gram = f.transpose() * f;
    let chol = gram.clone().cholesky().ok_or_else(|| {
        Error::DegenerateRotation(format!("raw factors are collinear ({} events)", panel.len()))
    })?;

    // target = projection of mp1 on the factor span
    let mp1 = x.column(MP1).into_owned();
    let c = chol.solve(&(f.transpose() * &mp1));
    let ts: DVector<f64> = f * &c;
    let mp1_norm = mp1.norm();
    if !(ts.norm() > 1e-10 * mp1_norm) || mp1_norm == 0.0 {
        return Err(Error::DegenerateRotation(format!(
            "raw factors carry no mp1 signal ({} events from {} to {})",
            panel.len(),
            panel.events.first().map(|e| e.date.to_string()).unwrap_or_default(),
            panel.events.last().map(|e| e.date.to_string()).unwrap_or_default(),
        )));
    }

    // path direction: in-span vector orthogonal to the target
    let gc = &gram * &c;
    let d = DVector::from_vec(vec![-gc[1], gc[0]]);
    let path_raw: DVector<f64> = f * &d;

    let two_year = x.column(TWO_YEAR);
    let ts_two_year = two_year.dot(&ts) / ts.norm_squared();
    let path_two_year = two_year.dot(&path_raw);
    if ts_two_year.abs() < 1e-12 || path_two_year.abs() < 1e-12 * two_year.norm() * path_raw.norm() {
        return Err(Error::DegenerateRotation(
            "2-year instrument does not load on both factors; path scale undefined".into(),
        ));
    }
    let mut scale = path_two_year / (path_raw.norm_squared() * ts_two_year);
    if x.column(TEN_YEAR).dot(&path_raw) * scale < 0.0 {
        scale = -scale;
    }
    let ps = &path_raw * scale;
    let rotation = Matrix2::new(c[0], d[0] * scale, c[1], d[1] * scale);

    let loadings = maturity_loadings(&x, &ts, &ps)?;
    Ok(PolicySurprises {
        events: panel.events.clone(),
        ts: ts.iter().copied().collect(),
        ps: ps.iter().copied().collect(),
        rotation,
        loadings,
    })
}

fn maturity_loadings(x: &DMatrix<f64>, ts: &DVector<f64>, ps: &DVector<f64>) -> Result<Vec<MaturityLoading>> {
    let f = DMatrix::from_columns(&[ts.clone(), ps.clone()]);
    let coef = least_squares_loadings(x, &f)?;
    let fitted = &f * coef.transpose();
    Ok(INSTRUMENTS
        .iter()
        .enumerate()
        .map(|(j, &name)| {
            let col = x.column(j);
            let mean = col.mean();
            let tss: f64 = col.iter().map(|v| (v - mean).powi(2)).sum();
            let rss: f64 = col.iter().zip(fitted.column(j).iter()).map(|(a, b)| (a - b).powi(2)).sum();
            MaturityLoading {
                instrument: name,
                target: coef[(j, 0)],
                path: coef[(j, 1)],
                r2: if tss > 0.0 { 1.0 - rss / tss } else { 0.0 },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surprise::pca::{pca_decompose, PcaOptions};
    use chrono::NaiveDate;

    fn panel(x: DMatrix<f64>) -> InstrumentPanel {
        let events = (0..x.nrows())
            .map(|i| EventMeta {
                event_id: format!("e{i}"),
                date: NaiveDate::from_ymd_opt(2006, 1, 1).unwrap() + chrono::Days::new(45 * i as u64),
            })
            .collect();
        InstrumentPanel::new(events, x).unwrap()
    }

    #[test]
    fn constraints_hold_on_structured_panel() {
        let x = DMatrix::from_fn(25, 5, |i, j| {
            let a = (i as f64 * 0.7).sin() * 3.0;
            let b = (i as f64 * 1.3).cos() * 6.0;
            let e = ((i * 31 + j * 17) % 13) as f64 * 0.05;
            [1.0, 1.1, 1.3, 2.1, 1.5][j] * a + [0.0, 0.6, 1.3, 3.7, 5.8][j] * b + e
        });
        let p = panel(x);
        let dec = pca_decompose(&p, PcaOptions::default()).unwrap();
        let s = rotate_to_target_path(&dec, &p).unwrap();
        let dot: f64 = s.ts.iter().zip(&s.ps).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-9);
        assert!((s.loadings[0].target - 1.0).abs() < 1e-10);
        assert!(s.loadings[0].path.abs() < 1e-10);
        assert!((s.loadings[2].target - s.loadings[2].path).abs() < 1e-10);
        assert!(s.loadings[4].path > 0.0);
    }

    #[test]
    fn mp1_without_signal_is_degenerate() {
        let x = DMatrix::from_fn(20, 5, |i, j| if j == 0 { 0.0 } else { (i * j) as f64 % 7.0 });
        let p = panel(x);
        let dec = pca_decompose(&p, PcaOptions::default()).unwrap();
        assert!(matches!(rotate_to_target_path(&dec, &p), Err(Error::DegenerateRotation(_))));
    }
}
