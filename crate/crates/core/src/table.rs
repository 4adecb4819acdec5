//! The cases x features table with labels, degenerate-column pruning, and
//! the correlation analyses (Pearson matrix, average-linkage cluster order,
//! subgroup summaries).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureType, FeatureVector};
use crate::filters::ImageType;
use crate::linalg::{percentile, Mat};

/// Descriptor of one feature column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnDesc {
    pub name: String,
    pub image_type: ImageType,
    pub feature_type: FeatureType,
}

impl ColumnDesc {
    /// Recover the tags from a `<image>_<family>_<Name>` column name.
    pub fn parse(name: &str) -> Result<ColumnDesc> {
        let mut parts = name.splitn(3, '_');
        let img = parts.next().unwrap_or("");
        let fam = parts.next().unwrap_or("");
        if parts.next().is_none() {
            return Err(Error::UnknownTag {
                tag: name.to_string(),
            });
        }
        Ok(ColumnDesc {
            name: name.to_string(),
            image_type: ImageType::parse(img)?,
            feature_type: FeatureType::parse(fam)?,
        })
    }
}

/// Cases x features matrix with optional binary labels
/// (1 = positive outcome class).
#[derive(Clone, Debug)]
pub struct FeatureTable {
    pub case_ids: Vec<String>,
    pub labels: Vec<Option<u8>>,
    pub columns: Vec<ColumnDesc>,
    pub values: Mat,
}

impl FeatureTable {
    pub fn new(
        case_ids: Vec<String>,
        labels: Vec<Option<u8>>,
        columns: Vec<ColumnDesc>,
        values: Mat,
    ) -> Result<Self> {
        if case_ids.len() != values.rows() || labels.len() != values.rows() {
            return Err(Error::ShapeMismatch {
                expected: values.rows(),
                got: case_ids.len(),
            });
        }
        if columns.len() != values.cols() {
            return Err(Error::ShapeMismatch {
                expected: values.cols(),
                got: columns.len(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for id in &case_ids {
            if !seen.insert(id) {
                return Err(Error::DegenerateTable(format!("duplicate case id `{id}`")));
            }
        }
        if let Some(l) = labels.iter().flatten().find(|&&l| l > 1) {
            return Err(Error::InvalidParam {
                name: "label",
                msg: format!("labels must be 0 or 1, got {l}"),
            });
        }
        Ok(FeatureTable {
            case_ids,
            labels,
            columns,
            values,
        })
    }

    /// Assemble a table from per-case feature vectors (all sharing one
    /// canonical column layout).
    pub fn from_cases(cases: &[FeatureVector], labels: Vec<Option<u8>>) -> Result<Self> {
        let first = cases
            .first()
            .ok_or_else(|| Error::DegenerateTable("no cases".into()))?;
        let columns: Vec<ColumnDesc> = first
            .entries
            .iter()
            .map(|e| ColumnDesc {
                name: e.name.clone(),
                image_type: e.image_type,
                feature_type: e.feature_type,
            })
            .collect();
        let mut rows = Vec::with_capacity(cases.len());
        let mut ids = Vec::with_capacity(cases.len());
        for case in cases {
            if case.entries.len() != columns.len() {
                return Err(Error::ShapeMismatch {
                    expected: columns.len(),
                    got: case.entries.len(),
                });
            }
            rows.push(case.entries.iter().map(|e| e.value).collect());
            ids.push(case.case_id.clone());
        }
        FeatureTable::new(ids, labels, columns, Mat::from_rows(rows))
    }

    pub fn n_cases(&self) -> usize {
        self.values.rows()
    }

    pub fn n_features(&self) -> usize {
        self.values.cols()
    }

    /// All labels, required present; 1 = positive class.
    pub fn labels_binary(&self) -> Result<Vec<u8>> {
        self.labels
            .iter()
            .map(|l| {
                l.ok_or_else(|| Error::InvalidParam {
                    name: "labels",
                    msg: "modeling requires a label for every case".into(),
                })
            })
            .collect()
    }

    pub fn select_columns(&self, idx: &[usize]) -> FeatureTable {
        FeatureTable {
            case_ids: self.case_ids.clone(),
            labels: self.labels.clone(),
            columns: idx.iter().map(|&i| self.columns[i].clone()).collect(),
            values: self.values.select_columns(idx),
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> FeatureTable {
        FeatureTable {
            case_ids: idx.iter().map(|&i| self.case_ids[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            columns: self.columns.clone(),
            values: self.values.select_rows(idx),
        }
    }

    /// CSV: header `case_id,label,<feature names...>`, '.' decimal separator,
    /// shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("case_id,label");
        for c in &self.columns {
            out.push(',');
            out.push_str(&c.name);
        }
        out.push('\n');
        for r in 0..self.n_cases() {
            out.push_str(&self.case_ids[r]);
            out.push(',');
            if let Some(l) = self.labels[r] {
                out.push_str(&l.to_string());
            }
            for v in self.values.row(r) {
                out.push(',');
                out.push_str(&format_f64(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn from_csv_str(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Csv {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
        let mut fields = header.split(',');
        if fields.next() != Some("case_id") || fields.next() != Some("label") {
            return Err(err(1, "header must start with `case_id,label`".into()));
        }
        let columns: Vec<ColumnDesc> = fields
            .map(ColumnDesc::parse)
            .collect::<Result<_>>()
            .map_err(|e| err(1, e.to_string()))?;
        let mut ids = Vec::new();
        let mut labels = Vec::new();
        let mut rows = Vec::new();
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let id = fields
                .next()
                .ok_or_else(|| err(lineno + 1, "missing case id".into()))?;
            let label_raw = fields
                .next()
                .ok_or_else(|| err(lineno + 1, "missing label field".into()))?;
            let label = match label_raw {
                "" => None,
                "0" => Some(0),
                "1" => Some(1),
                other => return Err(err(lineno + 1, format!("bad label `{other}`"))),
            };
            let row: Vec<f64> = fields
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| err(lineno + 1, format!("bad number `{f}`")))
                })
                .collect::<Result<_>>()?;
            if row.len() != columns.len() {
                return Err(err(
                    lineno + 1,
                    format!("expected {} values, got {}", columns.len(), row.len()),
                ));
            }
            ids.push(id.to_string());
            labels.push(label);
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(err(1, "no data rows".into()));
        }
        FeatureTable::new(ids, labels, columns, Mat::from_rows(rows))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_csv_str(&text, path)
    }
}

/// Shortest round-trip decimal rendering of an f64.
pub fn format_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PruneReason {
    NonFinite,
    ZeroVariance,
}

impl fmt::Display for PruneReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PruneReason::NonFinite => write!(f, "non-finite"),
            PruneReason::ZeroVariance => write!(f, "zero variance"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PruneRecord {
    pub name: String,
    pub reason: PruneReason,
}

/// Remove columns containing non-finite values or with zero variance.
pub fn prune_degenerate(t: &FeatureTable) -> Result<(FeatureTable, Vec<PruneRecord>)> {
    if t.n_cases() < 2 {
        return Err(Error::InvalidParam {
            name: "table",
            msg: "pruning needs at least two cases".into(),
        });
    }
    let mut keep = Vec::new();
    let mut log = Vec::new();
    for c in 0..t.n_features() {
        let first = t.values.get(0, c);
        let mut finite = first.is_finite();
        let mut constant = true;
        for r in 1..t.n_cases() {
            let v = t.values.get(r, c);
            finite &= v.is_finite();
            constant &= v == first;
        }
        if !finite {
            log.push(PruneRecord {
                name: t.columns[c].name.clone(),
                reason: PruneReason::NonFinite,
            });
        } else if constant {
            log.push(PruneRecord {
                name: t.columns[c].name.clone(),
                reason: PruneReason::ZeroVariance,
            });
        } else {
            keep.push(c);
        }
    }
    if keep.is_empty() {
        return Err(Error::DegenerateTable(
            "all columns degenerate after pruning".into(),
        ));
    }
    Ok((t.select_columns(&keep), log))
}

/// Pearson correlation matrix over columns; the diagonal is exactly 1.
pub fn pearson_matrix(t: &FeatureTable) -> Result<Mat> {
    let (n, p) = (t.n_cases(), t.n_features());
    // stage centered columns with their norms
    let mut centered = Mat::zeros(p, n);
    let mut norms = vec![0.0; p];
    for c in 0..p {
        let mut mu = 0.0;
        for r in 0..n {
            mu += t.values.get(r, c);
        }
        mu /= n as f64;
        let mut ss = 0.0;
        for r in 0..n {
            let d = t.values.get(r, c) - mu;
            centered.set(c, r, d);
            ss += d * d;
        }
        if ss == 0.0 {
            return Err(Error::DegenerateTable(format!(
                "zero-variance column `{}` (prune first)",
                t.columns[c].name
            )));
        }
        norms[c] = ss.sqrt();
    }
    let mut m = Mat::zeros(p, p);
    for a in 0..p {
        m.set(a, a, 1.0);
        for b in (a + 1)..p {
            let dot: f64 = centered
                .row(a)
                .iter()
                .zip(centered.row(b))
                .map(|(x, y)| x * y)
                .sum();
            let r = dot / (norms[a] * norms[b]);
            m.set(a, b, r);
            m.set(b, a, r);
        }
    }
    Ok(m)
}

/// Leaf order of an average-linkage dendrogram on distance `1 - |r|`.
/// Ties break on the smallest original column index, which maps an identity
/// correlation matrix to the identity permutation.
pub fn cluster_order(corr: &Mat) -> Vec<usize> {
    let p = corr.rows();
    if p <= 1 {
        return (0..p).collect();
    }
    let mut dist = Mat::zeros(p, p);
    for a in 0..p {
        for b in 0..p {
            if a != b {
                dist.set(a, b, 1.0 - corr.get(a, b).abs());
            }
        }
    }
    let mut active: Vec<bool> = vec![true; p];
    let mut size: Vec<f64> = vec![1.0; p];
    let mut leaves: Vec<Vec<usize>> = (0..p).map(|i| vec![i]).collect();
    for _ in 0..p - 1 {
        // minimum distance; ties by (min leaf, max leaf)
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for a in 0..p {
            if !active[a] {
                continue;
            }
            for b in (a + 1)..p {
                if !active[b] {
                    continue;
                }
                let d = dist.get(a, b);
                let (la, lb) = (leaves[a][0], leaves[b][0]);
                let key = (d, la.min(lb), la.max(lb));
                let better = match &best {
                    None => true,
                    Some((bd, bl, bh, _, _)) => key < (*bd, *bl, *bh),
                };
                if better {
                    best = Some((d, la.min(lb), la.max(lb), a, b));
                }
            }
        }
        let (_, _, _, a, b) = best.expect("at least two active clusters");
        // child with the smaller leading leaf comes first
        let (first, second) = if leaves[a][0] <= leaves[b][0] {
            (a, b)
        } else {
            (b, a)
        };
        let mut merged = std::mem::take(&mut leaves[first]);
        merged.extend(std::mem::take(&mut leaves[second]));
        // Lance-Williams average linkage update, stored in slot `first`
        for t in 0..p {
            if t != a && t != b && active[t] {
                let d = (size[a] * dist.get(a, t) + size[b] * dist.get(b, t)) / (size[a] + size[b]);
                dist.set(first, t, d);
                dist.set(t, first, d);
            }
        }
        size[first] = size[a] + size[b];
        active[second] = false;
        leaves[first] = merged;
    }
    let winner = (0..p).find(|&i| active[i]).unwrap();
    leaves[winner].clone()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupStats {
    pub group: String,
    pub n_pairs: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrelationSummary {
    pub by_feature_type: Vec<GroupStats>,
    pub by_image_type: Vec<GroupStats>,
    /// 20 equal-width bins over |r| in [0, 1]; the last bin includes 1.
    pub histogram: Vec<usize>,
    pub fraction_le_half: f64,
    pub notes: Vec<String>,
}

fn five_number(group: &str, mut values: Vec<f64>) -> GroupStats {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    GroupStats {
        group: group.to_string(),
        n_pairs: values.len(),
        min: values[0],
        q1: percentile(&values, 25.0),
        median: percentile(&values, 50.0),
        q3: percentile(&values, 75.0),
        max: values[values.len() - 1],
    }
}

/// |r| distributions per feature type and per image type (within-group pairs
/// only), the overall 20-bin histogram, and the share of pairs with
/// |r| <= 0.5. Each unordered pair counts once.
pub fn correlation_summary(corr: &Mat, columns: &[ColumnDesc]) -> CorrelationSummary {
    let p = corr.rows();
    let mut histogram = vec![0usize; 20];
    let mut le_half = 0usize;
    let mut total = 0usize;
    for a in 0..p {
        for b in (a + 1)..p {
            let r = corr.get(a, b).abs();
            let bin = ((r * 20.0).floor() as usize).min(19);
            histogram[bin] += 1;
            if r <= 0.5 {
                le_half += 1;
            }
            total += 1;
        }
    }
    let mut notes = Vec::new();
    let mut groups_of = |key: &dyn Fn(&ColumnDesc) -> String| -> Vec<GroupStats> {
        let mut members: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, c) in columns.iter().enumerate() {
            members.entry(key(c)).or_default().push(i);
        }
        let mut out = Vec::new();
        for (group, idx) in members {
            if idx.len() < 2 {
                notes.push(format!("group `{group}` omitted: fewer than 2 members"));
                continue;
            }
            let mut vals = Vec::with_capacity(idx.len() * (idx.len() - 1) / 2);
            for (ai, &a) in idx.iter().enumerate() {
                for &b in &idx[ai + 1..] {
                    vals.push(corr.get(a, b).abs());
                }
            }
            out.push(five_number(&group, vals));
        }
        out
    };
    let by_feature_type = groups_of(&|c: &ColumnDesc| c.feature_type.tag().to_string());
    let by_image_type = groups_of(&|c: &ColumnDesc| c.image_type.tag().to_string());
    CorrelationSummary {
        by_feature_type,
        by_image_type,
        histogram,
        fraction_le_half: if total == 0 {
            1.0
        } else {
            le_half as f64 / total as f64
        },
        notes,
    }
}
