use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Diagonal entries of R below this fraction of the first one mark the
/// remaining columns as linearly dependent.
pub const RANK_TOL: f64 = 1e-8;

/// Householder QR with column pivoting on remaining column norms, applied to
/// unit-norm scaled columns.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    /// Householder vectors below the diagonal, R on and above it.
    qr: DMatrix<f64>,
    betas: Vec<f64>,
    /// `perm[j]` is the original column in pivot position `j`.
    pub perm: Vec<usize>,
    /// Norm of each original column.
    pub scale: Vec<f64>,
    pub rank: usize,
}

impl PivotedQr {
    pub fn new(x: &DMatrix<f64>) -> Self {
        let (n, k) = x.shape();
        let scale: Vec<f64> = x.column_iter().map(|c| c.norm()).collect();
        let mut a = x.clone();
        for (j, mut col) in a.column_iter_mut().enumerate() {
            if scale[j] > 0.0 {
                col /= scale[j];
            }
        }
        let mut perm: Vec<usize> = (0..k).collect();
        let mut betas = Vec::with_capacity(k.min(n));
        let mut rank = 0;
        let mut r00 = 0.0;
        for j in 0..k.min(n) {
            let norms: Vec<f64> = (j..k).map(|c| a.view((j, c), (n - j, 1)).norm()).collect();
            let (off, &best) = norms
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
                .expect("non-empty");
            if j == 0 {
                r00 = best;
            }
            if best <= RANK_TOL * r00 || best == 0.0 {
                break;
            }
            a.swap_columns(j, j + off);
            perm.swap(j, j + off);
            let mut v: Vec<f64> = a.view((j, j), (n - j, 1)).iter().copied().collect();
            let alpha = if v[0] >= 0.0 { -best } else { best };
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            let beta = if vnorm2 > 0.0 { 2.0 / vnorm2 } else { 0.0 };
            for c in j..k {
                let mut col = a.view_mut((j, c), (n - j, 1));
                let dot: f64 = col.iter().zip(&v).map(|(x, y)| x * y).sum();
                let f = beta * dot;
                for (x, vi) in col.iter_mut().zip(&v) {
                    *x -= f * vi;
                }
            }
            // Store v (normalized to v[0] = 1) below the diagonal.
            let v0 = v[0];
            a[(j, j)] = alpha;
            for i in 1..n - j {
                a[(j + i, j)] = if v0 != 0.0 { v[i] / v0 } else { 0.0 };
            }
            betas.push(beta * v0 * v0);
            rank += 1;
        }
        Self {
            qr: a,
            betas,
            perm,
            scale,
            rank,
        }
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.qr.ncols()
    }

    /// Original indices of columns beyond the numerical rank.
    pub fn dependent_columns(&self) -> Vec<usize> {
        let mut cols: Vec<usize> = self.perm[self.rank..].to_vec();
        cols.sort_unstable();
        cols
    }

    /// Applies Q' to `y` in place.
    fn apply_qt(&self, y: &mut DVector<f64>) {
        let n = self.qr.nrows();
        for (j, &beta) in self.betas.iter().enumerate() {
            let mut dot = y[j];
            for i in j + 1..n {
                dot += self.qr[(i, j)] * y[i];
            }
            let f = beta * dot;
            y[j] -= f;
            for i in j + 1..n {
                y[i] -= f * self.qr[(i, j)];
            }
        }
    }

    /// Least-squares coefficients in original column order and scale.
    pub fn solve(&self, y: &DVector<f64>) -> DVector<f64> {
        let k = self.rank;
        let mut qty = y.clone();
        self.apply_qt(&mut qty);
        let mut z = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = qty[i];
            for j in i + 1..k {
                s -= self.qr[(i, j)] * z[j];
            }
            z[i] = s / self.qr[(i, i)];
        }
        let mut beta = DVector::zeros(self.qr.ncols());
        for (p, zi) in z.into_iter().enumerate() {
            let c = self.perm[p];
            beta[c] = zi / self.scale[c];
        }
        beta
    }

    /// `(X'X)^{-1}` in original column order; requires full rank.
    pub fn xtx_inverse(&self) -> DMatrix<f64> {
        let k = self.rank;
        let mut rinv = DMatrix::<f64>::zeros(k, k);
        for c in 0..k {
            rinv[(c, c)] = 1.0 / self.qr[(c, c)];
            for i in (0..c).rev() {
                let mut s = 0.0;
                for j in i + 1..=c {
                    s += self.qr[(i, j)] * rinv[(j, c)];
                }
                rinv[(i, c)] = -s / self.qr[(i, i)];
            }
        }
        let m = &rinv * rinv.transpose();
        let kk = self.qr.ncols();
        let mut out = DMatrix::zeros(kk, kk);
        for a in 0..k {
            for b in 0..k {
                let (ca, cb) = (self.perm[a], self.perm[b]);
                out[(ca, cb)] = m[(a, b)] / (self.scale[ca] * self.scale[cb]);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coefficients: DVector<f64>,
    pub residuals: DVector<f64>,
    pub xtx_inv: DMatrix<f64>,
}

/// Least squares through a rank-revealing QR. `names` label the columns in
/// rank-deficiency errors.
pub fn ols_fit(x: &DMatrix<f64>, y: &DVector<f64>, names: &[String]) -> Result<OlsFit> {
    if x.nrows() != y.len() {
        return Err(Error::InvalidArgument(format!("design has {} rows, response {}", x.nrows(), y.len())));
    }
    if x.ncols() == 0 || x.nrows() < x.ncols() {
        return Err(Error::InsufficientData(format!("{} rows for {} regressors", x.nrows(), x.ncols())));
    }
    let qr = PivotedQr::new(x);
    if !qr.is_full_rank() {
        let columns = qr
            .dependent_columns()
            .into_iter()
            .map(|c| names.get(c).cloned().unwrap_or_else(|| format!("column {c}")))
            .collect();
        return Err(Error::RankDeficient { columns });
    }
    let coefficients = qr.solve(y);
    let residuals = y - x * &coefficients;
    Ok(OlsFit {
        coefficients,
        residuals,
        xtx_inv: qr.xtx_inverse(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn exact_slope() {
        let x = DMatrix::from_column_slice(4, 1, &[1.0, 2.0, -3.0, 0.5]);
        let y = &x.column(0) * 2.0;
        let fit = ols_fit(&x, &y, &names(1)).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_regressors_match_univariate() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0]);
        let y = DVector::from_vec(vec![3.0, 1.0, -2.0, 0.5]);
        let fit = ols_fit(&x, &y, &names(2)).unwrap();
        for j in 0..2 {
            let c = x.column(j);
            let uni = c.dot(&y) / c.dot(&c);
            assert!((fit.coefficients[j] - uni).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let (n, k) = (60, 6);
            let x = DMatrix::from_fn(n, k, |_, _| rng.random::<f64>() - 0.5);
            let y = DVector::from_fn(n, |_, _| rng.random::<f64>());
            let fit = ols_fit(&x, &y, &names(k)).unwrap();
            let xtx = x.transpose() * &x;
            let oracle = xtx.clone().cholesky().unwrap().solve(&(x.transpose() * &y));
            assert!((&fit.coefficients - &oracle).amax() < 1e-8);
            let inv = xtx.try_inverse().unwrap();
            assert!((&fit.xtx_inv - inv).amax() < 1e-8);
        }
    }

    #[test]
    fn rank_deficiency_names_column() {
        let x = DMatrix::from_row_slice(4, 3, &[1.0, 2.0, 3.0, 2.0, 0.0, 2.0, 3.0, 1.0, 4.0, 0.0, 5.0, 5.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        match ols_fit(&x, &y, &["a".into(), "b".into(), "c".into()]) {
            Err(Error::RankDeficient { columns }) => assert_eq!(columns.len(), 1),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn badly_scaled_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = DMatrix::from_fn(50, 3, |_, j| (rng.random::<f64>() - 0.5) * 10f64.powi(4 * j as i32 - 4));
        let truth = DVector::from_vec(vec![1e4, -2.0, 3e-4]);
        let y = &x * &truth;
        let fit = ols_fit(&x, &y, &names(3)).unwrap();
        for j in 0..3 {
            assert!(((fit.coefficients[j] - truth[j]) / truth[j]).abs() < 1e-10);
        }
    }
}
