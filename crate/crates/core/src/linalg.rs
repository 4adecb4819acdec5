//! Dense row-major matrix plus the small numeric kernels shared across the
//! crate: a cyclic Jacobi eigensolver for symmetric matrices and the
//! linear-interpolation percentile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major dense matrix of `f64`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        Mat {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Keep the listed columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.rows, idx.len());
        for r in 0..self.rows {
            let src = self.row(r);
            let dst = out.row_mut(r);
            for (j, &c) in idx.iter().enumerate() {
                dst[j] = src[c];
            }
        }
        out
    }

    /// Keep the listed rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        let mut out = Mat::zeros(idx.len(), self.cols);
        for (j, &r) in idx.iter().enumerate() {
            out.row_mut(j).copy_from_slice(self.row(r));
        }
        out
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut mu = vec![0.0; self.cols];
        for row in self.iter_rows() {
            for (m, v) in mu.iter_mut().zip(row) {
                *m += v;
            }
        }
        let n = self.rows.max(1) as f64;
        mu.iter_mut().for_each(|m| *m /= n);
        mu
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order with eigenvectors as matching
/// columns. Convergence: off-diagonal Frobenius norm below `1e-12` relative
/// to the matrix scale, at most 100 sweeps.
pub fn jacobi_eigh(a: &Mat) -> Result<(Vec<f64>, Mat)> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::ShapeMismatch {
            expected: n,
            got: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    let mut m = a.clone();
    let mut v = Mat::zeros(n, n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    if n > 1 {
        let scale = m.data.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
        let tol = 1e-12 * scale;
        for sweep in 0..100 {
            let mut off = 0.0;
            let mut off_abs = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += m.get(p, q) * m.get(p, q);
                    off_abs += m.get(p, q).abs();
                }
            }
            if (2.0 * off).sqrt() <= tol {
                break;
            }
            // threshold early sweeps; later, zero out rotations too small to
            // matter against the diagonal (Numerical-Recipes style)
            let tresh = if sweep < 3 {
                0.2 * off_abs / (n * n) as f64
            } else {
                0.0
            };
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    let apq = m.get(p, q);
                    if apq == 0.0 {
                        continue;
                    }
                    let g = 100.0 * apq.abs();
                    if sweep > 3
                        && m.get(p, p).abs() + g == m.get(p, p).abs()
                        && m.get(q, q).abs() + g == m.get(q, q).abs()
                    {
                        m.set(p, q, 0.0);
                        m.set(q, p, 0.0);
                        continue;
                    }
                    if apq.abs() <= tresh {
                        continue;
                    }
                    let app = m.get(p, p);
                    let aqq = m.get(q, q);
                    // rotation angle per Numerical-Recipes formulation
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (1.0 + theta * theta).sqrt())
                    } else {
                        1.0 / (theta - (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);

                    m.set(p, p, app - t * apq);
                    m.set(q, q, aqq + t * apq);
                    m.set(p, q, 0.0);
                    m.set(q, p, 0.0);
                    for i in 0..n {
                        if i != p && i != q {
                            let aip = m.get(i, p);
                            let aiq = m.get(i, q);
                            let nip = aip - s * (aiq + tau * aip);
                            let niq = aiq + s * (aip - tau * aiq);
                            m.set(i, p, nip);
                            m.set(p, i, nip);
                            m.set(i, q, niq);
                            m.set(q, i, niq);
                        }
                    }
                    for i in 0..n {
                        let vip = v.get(i, p);
                        let viq = v.get(i, q);
                        v.set(i, p, vip - s * (viq + tau * vip));
                        v.set(i, q, viq + s * (vip - tau * viq));
                    }
                }
            }
        }
    }
    // sort descending, stable in original index for exact ties
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m.get(j, j)
            .partial_cmp(&m.get(i, i))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vecs = Mat::zeros(n, n);
    for (newc, &oldc) in order.iter().enumerate() {
        for r in 0..n {
            vecs.set(r, newc, v.get(r, oldc));
        }
    }
    Ok((eigenvalues, vecs))
}

/// Percentile with linear interpolation between order statistics
/// (the `(n-1)p` rule). `sorted` must be ascending and nonempty;
/// `p` in [0, 100].
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0);
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p / 100.0;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= n {
        sorted[n - 1]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len().max(1) as f64
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / xs.len().max(1) as f64
}

/// x·log2(x) with the 0·log 0 = 0 convention.
#[inline]
pub fn xlog2(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}
