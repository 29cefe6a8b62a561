use nalgebra::{DMatrix, DVector};

use super::design::Grouping;
use crate::error::{Error, Result};

/// `bread * meat * bread`.
pub fn sandwich(bread: &DMatrix<f64>, meat: &DMatrix<f64>) -> DMatrix<f64> {
    let v = bread * meat * bread;
    (&v + v.transpose()) * 0.5
}

/// Sum over clusters of the outer product of within-cluster score sums.
pub fn cluster_meat(x: &DMatrix<f64>, residuals: &DVector<f64>, clusters: &Grouping) -> DMatrix<f64> {
    let k = x.ncols();
    let mut scores = DMatrix::<f64>::zeros(clusters.n_groups, k);
    for j in 0..k {
        let col = x.column(j);
        for (i, &g) in clusters.codes.iter().enumerate() {
            scores[(g, j)] += col[i] * residuals[i];
        }
    }
    scores.transpose() * scores
}

/// CRV1 factor `G/(G-1) * (N-1)/(N-K)`.
pub fn crv1_factor(n: usize, k: usize, g: usize) -> f64 {
    (g as f64 / (g as f64 - 1.0)) * ((n as f64 - 1.0) / (n as f64 - k as f64))
}

/// Cluster-robust covariance with the CRV1 small-sample correction. `k` is
/// the number of estimated slope coefficients.
pub fn cluster_covariance(
    x: &DMatrix<f64>,
    residuals: &DVector<f64>,
    xtx_inv: &DMatrix<f64>,
    clusters: &Grouping,
) -> Result<(DMatrix<f64>, f64)> {
    let (n, k) = x.shape();
    let g = clusters.n_groups;
    if g < 2 {
        return Err(Error::InsufficientData(format!("{g} cluster(s); clustered errors need at least 2")));
    }
    if n <= k {
        return Err(Error::InsufficientData(format!("{n} rows for {k} regressors")));
    }
    let factor = crv1_factor(n, k, g);
    Ok((sandwich(xtx_inv, &cluster_meat(x, residuals, clusters)) * factor, factor))
}

/// White covariance with the `N/(N-K)` correction.
pub fn hc1_covariance(x: &DMatrix<f64>, residuals: &DVector<f64>, xtx_inv: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, k) = x.shape();
    let mut meat = DMatrix::<f64>::zeros(k, k);
    for i in 0..n {
        let row = x.row(i).transpose() * residuals[i];
        meat += &row * row.transpose();
    }
    sandwich(xtx_inv, &meat) * (n as f64 / (n as f64 - k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn system(seed: u64, n: usize, k: usize) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(n, k, |_, _| rng.random::<f64>() - 0.5);
        let u = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
        let inv = (x.transpose() * &x).try_inverse().unwrap();
        (x, u, inv)
    }

    #[test]
    fn singleton_clusters_equal_hc1() {
        let (x, u, inv) = system(1, 40, 3);
        let g = Grouping::from_labels(0..40);
        let (v, _) = cluster_covariance(&x, &u, &inv, &g).unwrap();
        let hc1 = hc1_covariance(&x, &u, &inv);
        assert!((v - hc1).amax() < 1e-10);
    }

    #[test]
    fn brute_force_sandwich() {
        let (x, u, inv) = system(2, 30, 2);
        let labels: Vec<usize> = (0..30).map(|i| i % 4).collect();
        let g = Grouping::from_labels(labels.iter().copied());
        let (v, factor) = cluster_covariance(&x, &u, &inv, &g).unwrap();
        let mut meat = DMatrix::zeros(2, 2);
        for a in 0..30 {
            for b in 0..30 {
                if labels[a] == labels[b] {
                    meat += x.row(a).transpose() * x.row(b) * (u[a] * u[b]);
                }
            }
        }
        let oracle = &inv * meat * &inv * factor;
        assert!((v - oracle).amax() < 1e-10);
    }

    #[test]
    fn zero_residuals_zero_covariance() {
        let (x, _, inv) = system(3, 10, 2);
        let g = Grouping::from_labels((0..10).map(|i| i % 3));
        let (v, _) = cluster_covariance(&x, &DVector::zeros(10), &inv, &g).unwrap();
        assert_eq!(v.amax(), 0.0);
    }

    #[test]
    fn single_cluster_rejected() {
        let (x, u, inv) = system(4, 10, 2);
        let g = Grouping::from_labels(std::iter::repeat_n(0, 10));
        assert!(cluster_covariance(&x, &u, &inv, &g).is_err());
    }
}
