use log::warn;
use nalgebra::{DMatrix, SymmetricEigen};

use super::panel::InstrumentPanel;
use crate::error::{Error, Result};

/// Matrix whose eigenstructure defines the principal components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PcaBasis {
    /// Columns standardized to unit variance; eigenvalues sum to the column count.
    #[default]
    Correlation,
    /// Raw basis-point covariance.
    Covariance,
}

impl std::str::FromStr for PcaBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "correlation" => Ok(PcaBasis::Correlation),
            "covariance" => Ok(PcaBasis::Covariance),
            other => Err(Error::InvalidArgument(format!(
                "unknown pca basis {other:?} (expected correlation or covariance)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PcaOptions {
    pub basis: PcaBasis,
    pub demean: bool,
}

impl Default for PcaOptions {
    fn default() -> Self {
        Self {
            basis: PcaBasis::Correlation,
            demean: true,
        }
    }
}

pub const RETAINED_FACTORS: usize = 2;

#[derive(Debug, Clone)]
pub struct FactorDecomposition {
    pub options: PcaOptions,
    /// All eigenvalues, descending, clamped at zero.
    pub eigenvalues: Vec<f64>,
    pub variance_shares: Vec<f64>,
    /// Eigenvectors as columns, ordered like `eigenvalues`.
    pub eigenvectors: DMatrix<f64>,
    /// `T x 2` scores of the first two components.
    pub raw_factors: DMatrix<f64>,
    /// `5 x 2` least-squares loadings of each (centred) instrument on the raw factors, in bp.
    pub loadings: DMatrix<f64>,
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
    pub rank_deficient: bool,
}

/// `X - center` (when demeaning), used by loadings and the rotation.
pub(crate) fn centered(x: &DMatrix<f64>, center: &[f64]) -> DMatrix<f64> {
    let mut z = x.clone();
    for (j, mut col) in z.column_iter_mut().enumerate() {
        col.add_scalar_mut(-center[j]);
    }
    z
}

/// Symmetric 5x5 second-moment matrix of the (optionally demeaned and
/// standardized) panel.
pub fn moment_matrix(panel: &InstrumentPanel, options: PcaOptions) -> (DMatrix<f64>, Vec<f64>, Vec<f64>) {
    let t = panel.len();
    let k = panel.x.ncols();
    let denom = (t.max(2) - 1) as f64;
    let center: Vec<f64> = (0..k)
        .map(|j| if options.demean { panel.x.column(j).mean() } else { 0.0 })
        .collect();
    let mut z = centered(&panel.x, &center);
    let scale: Vec<f64> = (0..k)
        .map(|j| match options.basis {
            PcaBasis::Covariance => 1.0,
            PcaBasis::Correlation => {
                let sd = (z.column(j).norm_squared() / denom).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    warn!("instrument {j} has zero variance; left unscaled");
                    1.0
                }
            }
        })
        .collect();
    for (j, mut col) in z.column_iter_mut().enumerate() {
        col /= scale[j];
    }
    let mut s = z.transpose() * &z / denom;
    // exact symmetry
    for i in 0..k {
        for j in 0..i {
            let v = 0.5 * (s[(i, j)] + s[(j, i)]);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    (s, center, scale)
}

/// Eigen-decomposition of the instrument panel, keeping the first two
/// components as raw factors.
pub fn pca_decompose(panel: &InstrumentPanel, options: PcaOptions) -> Result<FactorDecomposition> {
    let t = panel.len();
    if t < super::panel::MIN_EVENTS {
        return Err(Error::InsufficientData(format!("{t} events; need at least 3")));
    }
    let (s, center, scale) = moment_matrix(panel, options);
    let trace = s.trace();
    if !(trace > 0.0) {
        return Err(Error::InsufficientData("instrument panel has no variation".into()));
    }

    let eig = SymmetricEigen::new(s);
    let k = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let floor = 1e-12 * trace;
    let mut eigenvalues = Vec::with_capacity(k);
    let mut vectors = DMatrix::zeros(k, k);
    for (dst, &src) in order.iter().enumerate() {
        let v = eig.eigenvalues[src];
        eigenvalues.push(if v.abs() <= floor { 0.0 } else { v.max(0.0) });
        let mut col = eig.eigenvectors.column(src).into_owned();
        // sign: largest-magnitude entry positive
        let pivot = col.iamax();
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    let rank_deficient = eigenvalues.contains(&0.0);
    if rank_deficient {
        warn!("instrument moment matrix is rank deficient: eigenvalues {eigenvalues:?}");
    }
    let total: f64 = eigenvalues.iter().sum();
    let variance_shares = eigenvalues.iter().map(|v| v / total).collect();

    let mut z = centered(&panel.x, &center);
    for (j, mut col) in z.column_iter_mut().enumerate() {
        col /= scale[j];
    }
    let raw_factors = &z * vectors.columns(0, RETAINED_FACTORS);
    let loadings = least_squares_loadings(&centered(&panel.x, &center), &raw_factors)?;

    Ok(FactorDecomposition {
        options,
        eigenvalues,
        variance_shares,
        eigenvectors: vectors,
        raw_factors,
        loadings,
        center,
        scale,
        rank_deficient,
    })
}

/// Coefficients of each column of `y` regressed on the columns of `f`
/// (no intercept), returned as `ncols(y) x ncols(f)`.
pub(crate) fn least_squares_loadings(y: &DMatrix<f64>, f: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let gram = f.transpose() * f;
    let chol = gram.clone().cholesky().ok_or_else(|| {
        Error::DegenerateRotation("retained factors are linearly dependent".into())
    })?;
    let rhs = f.transpose() * y;
    Ok(chol.solve(&rhs).transpose())
}
