//! Principal component analysis on the centered cross-product matrix,
//! eigensolved by cyclic Jacobi rotations. When there are more features than
//! rows the n x n Gram matrix is decomposed instead and eigenvectors are
//! mapped back; both routes agree to numerical precision.
//!
//! Eigenvalues are those of the centered cross-product `Xc' * Xc` (no
//! 1/(n-1) factor); eigenvectors are unaffected by that scaling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigh, Mat};

/// Component-count ceiling: the feature cluster fed to the classifier stays
/// below 10 dimensions.
pub const MAX_COMPONENTS: usize = 9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PcaModel {
    /// Column means of the training matrix (re-fit even on pre-scaled data;
    /// SMOTE augmentation shifts them off zero).
    pub train_mean: Vec<f64>,
    /// p x k orthonormal eigenvector columns; the largest-magnitude entry of
    /// each column is positive.
    pub components: Mat,
    /// Descending, nonnegative.
    pub eigenvalues: Vec<f64>,
}

impl PcaModel {
    pub fn k(&self) -> usize {
        self.components.cols()
    }

    pub fn n_features(&self) -> usize {
        self.components.rows()
    }

    /// Scores = (X - mean) * components.
    pub fn transform(&self, x: &Mat) -> Result<Mat> {
        let p = self.n_features();
        if x.cols() != p {
            return Err(Error::ShapeMismatch {
                expected: p,
                got: x.cols(),
            });
        }
        let k = self.k();
        let mut out = Mat::zeros(x.rows(), k);
        for r in 0..x.rows() {
            let row = x.row(r);
            for c in 0..k {
                let mut acc = 0.0;
                for j in 0..p {
                    acc += (row[j] - self.train_mean[j]) * self.components.get(j, c);
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// Keep only the leading `k` components.
    pub fn truncated(&self, k: usize) -> PcaModel {
        let k = k.min(self.k());
        let idx: Vec<usize> = (0..k).collect();
        PcaModel {
            train_mean: self.train_mean.clone(),
            components: self.components.select_columns(&idx),
            eigenvalues: self.eigenvalues[..k].to_vec(),
        }
    }
}

fn fix_signs(components: &mut Mat) {
    for c in 0..components.cols() {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for r in 0..components.rows() {
            let a = components.get(r, c).abs();
            if a > best_abs {
                best_abs = a;
                best = r;
            }
        }
        if components.get(best, c) < 0.0 {
            for r in 0..components.rows() {
                components.set(r, c, -components.get(r, c));
            }
        }
    }
}

pub fn fit_pca(x: &Mat, k: usize) -> Result<PcaModel> {
    let (n, p) = (x.rows(), x.cols());
    if n < 2 {
        return Err(Error::InvalidParam {
            name: "n",
            msg: "need at least two rows".into(),
        });
    }
    let k_max = n.min(p).min(MAX_COMPONENTS);
    if k == 0 || k > k_max {
        return Err(Error::KOutOfRange { k, max: k_max });
    }
    if !x.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    let mean = x.column_means();
    let mut xc = x.clone();
    for r in 0..n {
        let row = xc.row_mut(r);
        for (v, m) in row.iter_mut().zip(&mean) {
            *v -= m;
        }
    }

    let (mut eigenvalues, mut components) = if p <= n {
        // direct route: p x p cross-product
        let mut s = Mat::zeros(p, p);
        for r in 0..n {
            let row = xc.row(r);
            for i in 0..p {
                for j in i..p {
                    let v = s.get(i, j) + row[i] * row[j];
                    s.set(i, j, v);
                }
            }
        }
        for i in 0..p {
            for j in 0..i {
                s.set(i, j, s.get(j, i));
            }
        }
        let (l, v) = jacobi_eigh(&s)?;
        let idx: Vec<usize> = (0..k).collect();
        (l[..k].to_vec(), v.select_columns(&idx))
    } else {
        // Gram route: n x n, map u back through Xc' / sqrt(lambda)
        let mut g = Mat::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let dot: f64 = xc.row(a).iter().zip(xc.row(b)).map(|(x, y)| x * y).sum();
                g.set(a, b, dot);
                g.set(b, a, dot);
            }
        }
        let (l, u) = jacobi_eigh(&g)?;
        let lambda_max = l.first().copied().unwrap_or(0.0).max(0.0);
        let rank_eps = 1e-12 * lambda_max.max(1.0);
        let mut comp = Mat::zeros(p, k);
        for c in 0..k {
            if l[c] > rank_eps {
                let scale = 1.0 / l[c].sqrt();
                for j in 0..p {
                    let mut acc = 0.0;
                    for a in 0..n {
                        acc += xc.get(a, j) * u.get(a, c);
                    }
                    comp.set(j, c, acc * scale);
                }
                // renormalize against accumulated rounding
                let norm: f64 = (0..p).map(|j| comp.get(j, c).powi(2)).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for j in 0..p {
                        comp.set(j, c, comp.get(j, c) / norm);
                    }
                }
            } else {
                // rank-deficient tail: deterministic orthonormal filler from
                // the standard basis (the eigenvalue is ~0, so the direction
                // carries no variance)
                'basis: for e in 0..p {
                    let mut v = vec![0.0; p];
                    v[e] = 1.0;
                    for prev in 0..c {
                        let dot: f64 = (0..p).map(|j| v[j] * comp.get(j, prev)).sum();
                        for (j, vj) in v.iter_mut().enumerate() {
                            *vj -= dot * comp.get(j, prev);
                        }
                    }
                    let norm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                    if norm > 1e-6 {
                        for (j, vj) in v.iter().enumerate() {
                            comp.set(j, c, vj / norm);
                        }
                        break 'basis;
                    }
                }
            }
        }
        (l[..k].to_vec(), comp)
    };

    for l in eigenvalues.iter_mut() {
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    fix_signs(&mut components);
    Ok(PcaModel {
        train_mean: mean,
        components,
        eigenvalues,
    })
}
