//! Fold-local standardization and SMOTE oversampling. Both are fit on
//! training rows only; SMOTE runs on scaled data and synthesizes minority
//! rows until the classes balance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rng::SplitMix64;

/// Per-feature z-scaler with population standard deviation; zero sigma is
/// replaced by 1 so constant columns map to zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scaler {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

pub fn fit_scaler(train: &Mat) -> Result<Scaler> {
    if train.rows() == 0 {
        return Err(Error::InvalidParam {
            name: "train",
            msg: "need at least one row".into(),
        });
    }
    let n = train.rows() as f64;
    let mu = train.column_means();
    let mut sigma = vec![0.0; train.cols()];
    for row in train.iter_rows() {
        for ((s, v), m) in sigma.iter_mut().zip(row).zip(&mu) {
            *s += (v - m) * (v - m);
        }
    }
    for s in sigma.iter_mut() {
        *s = (*s / n).sqrt();
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    Ok(Scaler { mu, sigma })
}

impl Scaler {
    pub fn apply(&self, x: &Mat) -> Result<Mat> {
        if x.cols() != self.mu.len() {
            return Err(Error::ShapeMismatch {
                expected: self.mu.len(),
                got: x.cols(),
            });
        }
        let mut out = x.clone();
        for r in 0..out.rows() {
            let row = out.row_mut(r);
            for ((v, m), s) in row.iter_mut().zip(&self.mu).zip(&self.sigma) {
                *v = (*v - m) / s;
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SmoteParams {
    /// Neighbour count; clamped to minority size - 1 when necessary.
    pub k: usize,
    pub seed: u64,
}

/// Provenance of one synthetic row: `x = reference + beta * (neighbor - reference)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SyntheticRecord {
    /// Row index (in the input matrix) of the reference minority sample.
    pub reference: usize,
    /// Row index of the chosen minority neighbour.
    pub neighbor: usize,
    pub beta: f64,
}

#[derive(Clone, Debug)]
pub struct SmoteOutput {
    pub x: Mat,
    pub labels: Vec<u8>,
    pub records: Vec<SyntheticRecord>,
    pub notes: Vec<String>,
}

/// Balance the classes by synthesizing minority rows. Originals are
/// preserved unchanged and synthetic rows are appended; the whole procedure
/// is a pure function of `(x, labels, params)`.
pub fn smote(x: &Mat, labels: &[u8], params: &SmoteParams) -> Result<SmoteOutput> {
    smote_with_beta(x, labels, params, None)
}

/// SMOTE with an optional fixed interpolation factor (test hook).
pub fn smote_with_beta(
    x: &Mat,
    labels: &[u8],
    params: &SmoteParams,
    beta_override: Option<f64>,
) -> Result<SmoteOutput> {
    if labels.len() != x.rows() {
        return Err(Error::ShapeMismatch {
            expected: x.rows(),
            got: labels.len(),
        });
    }
    if params.k == 0 {
        return Err(Error::InvalidParam {
            name: "k",
            msg: "must be >= 1".into(),
        });
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut notes = Vec::new();
    let mut rows: Vec<Vec<f64>> = x.iter_rows().map(|r| r.to_vec()).collect();
    let mut out_labels = labels.to_vec();
    let mut records = Vec::new();
    if n_pos == n_neg {
        return Ok(SmoteOutput {
            x: x.clone(),
            labels: out_labels,
            records,
            notes,
        });
    }
    let minority_label = if n_pos < n_neg { 1u8 } else { 0u8 };
    let minority: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i] == minority_label)
        .collect();
    let need = n_pos.abs_diff(n_neg);
    let mut rng = SplitMix64::new(params.seed);

    if minority.len() == 1 {
        notes.push("minority size 1: falling back to exact duplication".into());
        for _ in 0..need {
            rows.push(x.row(minority[0]).to_vec());
            out_labels.push(minority_label);
            records.push(SyntheticRecord {
                reference: minority[0],
                neighbor: minority[0],
                beta: 0.0,
            });
        }
        return Ok(SmoteOutput {
            x: Mat::from_rows(rows),
            labels: out_labels,
            records,
            notes,
        });
    }

    let k = if params.k > minority.len() - 1 {
        notes.push(format!(
            "k clamped from {} to {}",
            params.k,
            minority.len() - 1
        ));
        minority.len() - 1
    } else {
        params.k
    };

    // exact k nearest minority neighbours, ties broken by index order
    let mut neighbors: Vec<Vec<usize>> = Vec::with_capacity(minority.len());
    for (a, &ia) in minority.iter().enumerate() {
        let mut d: Vec<(f64, usize)> = minority
            .iter()
            .enumerate()
            .filter(|&(b, _)| b != a)
            .map(|(_, &ib)| {
                let dist: f64 = x
                    .row(ia)
                    .iter()
                    .zip(x.row(ib))
                    .map(|(p, q)| (p - q) * (p - q))
                    .sum();
                (dist, ib)
            })
            .collect();
        d.sort_by(|l, r| l.0.partial_cmp(&r.0).unwrap().then(l.1.cmp(&r.1)));
        neighbors.push(d.into_iter().take(k).map(|(_, i)| i).collect());
    }

    // reference order: seeded shuffle of the minority rows
    let mut order: Vec<usize> = (0..minority.len()).collect();
    rng.shuffle(&mut order);

    for t in 0..need {
        let local = order[t % minority.len()];
        let reference = minority[local];
        let nbrs = &neighbors[local];
        let neighbor = nbrs[rng.next_below(nbrs.len() as u64) as usize];
        let beta = beta_override.unwrap_or_else(|| rng.next_open01());
        rows.push(
            x.row(reference)
                .iter()
                .zip(x.row(neighbor))
                .map(|(r, n)| r + beta * (n - r))
                .collect(),
        );
        out_labels.push(minority_label);
        records.push(SyntheticRecord {
            reference,
            neighbor,
            beta,
        });
    }
    Ok(SmoteOutput {
        x: Mat::from_rows(rows),
        labels: out_labels,
        records,
        notes,
    })
}
