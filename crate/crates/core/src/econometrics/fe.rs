use nalgebra::{DMatrix, DVector};

use super::design::Grouping;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorbOptions {
    /// Stop when every cell mean is below `tol * max(1, column RMS)`.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for AbsorbOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_sweeps: 10_000,
        }
    }
}

/// A column whose demeaned norm falls below this fraction of its original
/// norm is treated as spanned by the fixed effects.
pub const ABSORBED_REL_NORM: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Absorption {
    /// Per regressor column.
    pub absorbed: Vec<bool>,
    /// Largest sweep count over all columns.
    pub sweeps: usize,
}

fn subtract_group_means(v: &mut [f64], g: &Grouping, sums: &mut Vec<f64>, counts: &[f64]) -> f64 {
    sums.clear();
    sums.resize(g.n_groups, 0.0);
    for (x, &c) in v.iter().zip(&g.codes) {
        sums[c] += x;
    }
    let mut max_mean = 0.0f64;
    for (s, &n) in sums.iter_mut().zip(counts) {
        if n > 0.0 {
            *s /= n;
            max_mean = max_mean.max(s.abs());
        }
    }
    for (x, &c) in v.iter_mut().zip(&g.codes) {
        *x -= sums[c];
    }
    max_mean
}

/// Within-transforms one vector by alternating projections.
pub fn demean(v: &mut [f64], groups: &[Grouping], opts: AbsorbOptions) -> Result<usize> {
    if groups.is_empty() || v.is_empty() {
        return Ok(0);
    }
    let counts: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let mut c = vec![0.0; g.n_groups];
            for &k in &g.codes {
                c[k] += 1.0;
            }
            c
        })
        .collect();
    let rms = (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt();
    let tol = opts.tol * rms.max(1.0);
    let mut sums = Vec::new();
    for sweep in 1..=opts.max_sweeps {
        for (g, c) in groups.iter().zip(&counts) {
            subtract_group_means(v, g, &mut sums, c);
        }
        if groups.len() == 1 {
            return Ok(sweep);
        }
        // Means left by the final projection are zero by construction; check the others.
        let worst = groups[..groups.len() - 1]
            .iter()
            .zip(&counts)
            .map(|(g, c)| {
                sums.clear();
                sums.resize(g.n_groups, 0.0);
                for (x, &k) in v.iter().zip(&g.codes) {
                    sums[k] += x;
                }
                sums.iter().zip(c).filter(|(_, &n)| n > 0.0).map(|(s, n)| (s / n).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if worst < tol {
            return Ok(sweep);
        }
    }
    Err(Error::NoConvergence {
        what: "fixed-effect absorption",
        iterations: opts.max_sweeps,
    })
}

/// Demeans every column of `x` and `y` in place and flags absorbed columns.
pub fn absorb_fixed_effects(
    x: &mut DMatrix<f64>,
    y: &mut DVector<f64>,
    groups: &[Grouping],
    opts: AbsorbOptions,
) -> Result<Absorption> {
    let mut sweeps = demean(y.as_mut_slice(), groups, opts)?;
    let mut absorbed = Vec::with_capacity(x.ncols());
    for mut col in x.column_iter_mut() {
        let before = col.norm();
        sweeps = sweeps.max(demean(col.as_mut_slice(), groups, opts)?);
        let after = col.norm();
        absorbed.push(before == 0.0 || after <= ABSORBED_REL_NORM * before);
    }
    Ok(Absorption { absorbed, sweeps })
}
