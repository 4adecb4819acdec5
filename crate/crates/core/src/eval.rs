//! Nested leave-one-out cross-validation with an inner LOOCV hyperparameter
//! search, plus ROC/AUC, confusion metrics, per-feature-type subset runs and
//! feature-type weight analysis.
//!
//! Fold seeds derive from case ids, never row positions, so outer scores are
//! invariant under row permutation of the input table, and parallel
//! execution is bit-identical to serial.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureType;
use crate::linalg::Mat;
use crate::pca::{fit_pca, MAX_COMPONENTS};
use crate::pipeline::{fit_pipeline, HyperConfig, PipelineModel};
use crate::preprocess::{fit_scaler, smote, SmoteParams};
use crate::rng::fnv1a64;
use crate::svm::{train_svm, SvmParams};
use crate::table::{format_f64, prune_degenerate, FeatureTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Rbf,
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelKind::Linear => write!(f, "linear"),
            KernelKind::Rbf => write!(f, "rbf"),
        }
    }
}

/// Hyperparameter search space. C spans 1e-5..=1e2 and gamma 1e-3..=1e1 on
/// decade grids; PCA keeps 2..=9 components; SMOTE tries 3 and 5 neighbours.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HyperGrid {
    pub kernel: KernelKind,
    pub c_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub pca_k: Vec<usize>,
    pub smote_k: Vec<usize>,
}

fn decades(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|e| 10f64.powi(e)).collect()
}

impl HyperGrid {
    pub fn linear() -> Self {
        HyperGrid {
            kernel: KernelKind::Linear,
            c_values: decades(-5, 2),
            gamma_values: Vec::new(),
            pca_k: (2..=9).collect(),
            smote_k: vec![3, 5],
        }
    }

    pub fn rbf() -> Self {
        HyperGrid {
            kernel: KernelKind::Rbf,
            gamma_values: decades(-3, 1),
            ..HyperGrid::linear()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::BadGrid(msg.to_string()));
        if self.c_values.is_empty() || self.pca_k.is_empty() || self.smote_k.is_empty() {
            return bad("empty dimension");
        }
        if self.kernel == KernelKind::Rbf && self.gamma_values.is_empty() {
            return bad("rbf kernel needs gamma values");
        }
        if self.c_values.iter().any(|&c| !(c > 0.0) || !c.is_finite()) {
            return bad("C values must be positive and finite");
        }
        if self
            .gamma_values
            .iter()
            .any(|&g| !(g > 0.0) || !g.is_finite())
        {
            return bad("gamma values must be positive and finite");
        }
        if self.pca_k.iter().any(|&k| k == 0 || k > MAX_COMPONENTS) {
            return bad("pca_k must lie in 1..=9");
        }
        if self.smote_k.contains(&0) {
            return bad("smote_k must be >= 1");
        }
        Ok(())
    }

    /// Fixed enumeration order: smote_k, pca_k, C, gamma.
    pub fn enumerate(&self) -> Vec<HyperConfig> {
        let gammas: Vec<Option<f64>> = match self.kernel {
            KernelKind::Linear => vec![None],
            KernelKind::Rbf => self.gamma_values.iter().map(|&g| Some(g)).collect(),
        };
        let mut out = Vec::new();
        for &smote_k in &self.smote_k {
            for &pca_k in &self.pca_k {
                for &c in &self.c_values {
                    for &gamma in &gammas {
                        out.push(HyperConfig {
                            smote_k,
                            pca_k,
                            c,
                            gamma,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// None marks the (0,0) anchor (threshold above every score).
    pub threshold: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
    /// Hanley-McNeil standard error of the empirical AUC.
    pub auc_se: f64,
}

/// Empirical step ROC (descending score sweep, ties grouped), trapezoidal
/// AUC and its Hanley-McNeil standard error.
pub fn roc_and_auc(scores: &[f64], labels: &[u8]) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::ShapeMismatch {
            expected: labels.len(),
            got: scores.len(),
        });
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: None,
    }];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut auc = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        // absorb the whole tie group
        let (mut dtp, mut dfp) = (0usize, 0usize);
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == 1 {
                dtp += 1;
            } else {
                dfp += 1;
            }
            i += 1;
        }
        let (fpr0, tpr0) = (fp as f64 / n_neg as f64, tp as f64 / n_pos as f64);
        tp += dtp;
        fp += dfp;
        let (fpr1, tpr1) = (fp as f64 / n_neg as f64, tp as f64 / n_pos as f64);
        auc += (fpr1 - fpr0) * (tpr0 + tpr1) / 2.0;
        points.push(RocPoint {
            fpr: fpr1,
            tpr: tpr1,
            threshold: Some(s),
        });
    }
    let a = auc;
    let q1 = a / (2.0 - a);
    let q2 = 2.0 * a * a / (1.0 + a);
    let (np, nn) = (n_pos as f64, n_neg as f64);
    let var = (a * (1.0 - a) + (np - 1.0) * (q1 - a * a) + (nn - 1.0) * (q2 - a * a)) / (np * nn);
    Ok(RocCurve {
        points,
        auc,
        auc_se: var.max(0.0).sqrt(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Metrics {
    pub acc: f64,
    /// Ratios with zero denominators are reported absent, not zero.
    pub ppv: Option<f64>,
    pub npv: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

/// Confusion counts and derived rates; a score at or above the threshold
/// predicts the positive class.
pub fn confusion_metrics(scores: &[f64], labels: &[u8], threshold: f64) -> (Confusion, Metrics) {
    let mut c = Confusion {
        tp: 0,
        fp: 0,
        fn_: 0,
        tn: 0,
    };
    for (&s, &l) in scores.iter().zip(labels) {
        match (s >= threshold, l == 1) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    (c, metrics_from_confusion(&c))
}

pub fn metrics_from_confusion(c: &Confusion) -> Metrics {
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            None
        } else {
            Some(num as f64 / den as f64)
        }
    };
    let n = c.tp + c.fp + c.fn_ + c.tn;
    Metrics {
        acc: (c.tp + c.tn) as f64 / n.max(1) as f64,
        ppv: ratio(c.tp, c.tp + c.fp),
        npv: ratio(c.tn, c.tn + c.fn_),
        sensitivity: ratio(c.tp, c.tp + c.fn_),
        specificity: ratio(c.tn, c.tn + c.fp),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoldResult {
    pub case_id: String,
    pub label: u8,
    pub score: f64,
    pub config: HyperConfig,
    /// Pooled inner AUC of the selected configuration.
    pub inner_auc: f64,
    pub train_fingerprint: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalReport {
    pub kernel: KernelKind,
    pub seed: u64,
    /// Feature-type tag when this is a subset (ablation) run.
    pub subset: Option<String>,
    pub n_cases: usize,
    pub n_positive: usize,
    pub n_negative: usize,
    pub auc: f64,
    pub auc_se: f64,
    pub confusion: Confusion,
    pub metrics: Metrics,
    pub skipped_inner_folds: usize,
    pub folds: Vec<FoldResult>,
    pub roc: Vec<RocPoint>,
}

impl EvalReport {
    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// `fpr,tpr,threshold` rows; the (0,0) anchor renders threshold `inf`.
    pub fn roc_csv(&self) -> String {
        let mut out = String::from("fpr,tpr,threshold\n");
        for p in &self.roc {
            out.push_str(&format!(
                "{},{},{}\n",
                format_f64(p.fpr),
                format_f64(p.tpr),
                p.threshold.map_or("inf".into(), format_f64)
            ));
        }
        out
    }

    pub fn chosen_hyperparams_csv(&self) -> String {
        let mut out = String::from("case_id,label,score,smote_k,pca_k,c,gamma,inner_auc\n");
        for f in &self.folds {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                f.case_id,
                f.label,
                format_f64(f.score),
                f.config.smote_k,
                f.config.pca_k,
                format_f64(f.config.c),
                f.config.gamma.map_or(String::new(), format_f64),
                format_f64(f.inner_auc),
            ));
        }
        out
    }

    pub fn confusion_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), format_f64);
        format!(
            "tp,fp,fn,tn,acc,ppv,npv,sensitivity,specificity\n{},{},{},{},{},{},{},{},{}\n",
            self.confusion.tp,
            self.confusion.fp,
            self.confusion.fn_,
            self.confusion.tn,
            format_f64(self.metrics.acc),
            opt(self.metrics.ppv),
            opt(self.metrics.npv),
            opt(self.metrics.sensitivity),
            opt(self.metrics.specificity),
        )
    }
}

pub struct LoocvOutcome {
    pub report: EvalReport,
    /// One refit model per outer fold, in canonical case order.
    pub models: Vec<PipelineModel>,
}

/// Indices sorted by case id: the canonical processing order.
fn canonical_order(t: &FeatureTable) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..t.n_cases()).collect();
    idx.sort_by(|&a, &b| t.case_ids[a].cmp(&t.case_ids[b]));
    idx
}

struct SelectionOutcome {
    best: HyperConfig,
    best_auc: f64,
    skipped: usize,
}

/// Inner LOOCV over `train`: each configuration is refit per fold
/// (prune -> scale -> SMOTE -> PCA -> SVM), single-case scores are pooled
/// into one AUC per configuration, and the best configuration wins.
/// Tie-break: fewer components, then smaller C, gamma, smote_k.
fn select_config(
    train: &FeatureTable,
    grid: &HyperGrid,
    ctx_seed: u64,
) -> Result<SelectionOutcome> {
    let configs = grid.enumerate();
    let labels = train.labels_binary()?;
    let n = train.n_cases();
    let mut pooled: Vec<Vec<(u8, f64)>> = vec![Vec::with_capacity(n); configs.len()];
    let mut skipped = 0usize;

    let k_req_max = *grid.pca_k.iter().max().expect("validated grid");
    for j in 0..n {
        let inner_idx: Vec<usize> = (0..n).filter(|&r| r != j).collect();
        let inner_labels: Vec<u8> = inner_idx.iter().map(|&r| labels[r]).collect();
        if !inner_labels.contains(&0) || !inner_labels.contains(&1) {
            skipped += 1;
            continue;
        }
        let inner = train.select_rows(&inner_idx);
        let (pruned, _) = prune_degenerate(&inner)?;
        let scaler = fit_scaler(&pruned.values)?;
        let scaled = scaler.apply(&pruned.values)?;
        // held-out case restricted to the fold's pruned columns
        let col_idx: Vec<usize> = pruned
            .columns
            .iter()
            .map(|c| {
                train
                    .columns
                    .iter()
                    .position(|tc| tc.name == c.name)
                    .expect("pruned columns come from the table")
            })
            .collect();
        let test_raw = Mat::from_rows(vec![col_idx
            .iter()
            .map(|&c| train.values.get(j, c))
            .collect()]);
        let test_scaled = scaler.apply(&test_raw)?;
        let fold_seed = ctx_seed ^ fnv1a64(train.case_ids[j].as_bytes());

        let mut cfg_idx = 0usize;
        for &smote_k in &grid.smote_k {
            let aug = smote(
                &scaled,
                &inner_labels,
                &SmoteParams {
                    k: smote_k,
                    seed: fold_seed,
                },
            )?;
            let y: Vec<i8> = aug
                .labels
                .iter()
                .map(|&l| if l == 1 { 1 } else { -1 })
                .collect();
            let k_max = k_req_max
                .min(aug.x.rows())
                .min(aug.x.cols())
                .min(MAX_COMPONENTS);
            let pca = fit_pca(&aug.x, k_max)?;
            let train_scores = pca.transform(&aug.x)?;
            let test_scores = pca.transform(&test_scaled)?;
            for &pca_k in &grid.pca_k {
                let k_eff = pca_k.min(k_max);
                let cols: Vec<usize> = (0..k_eff).collect();
                let sub = train_scores.select_columns(&cols);
                let test_sub: Vec<f64> = test_scores.row(0)[..k_eff].to_vec();
                for &c in &grid.c_values {
                    let gammas: Vec<Option<f64>> = match grid.kernel {
                        KernelKind::Linear => vec![None],
                        KernelKind::Rbf => grid.gamma_values.iter().map(|&g| Some(g)).collect(),
                    };
                    for gamma in gammas {
                        let cfg = HyperConfig {
                            smote_k,
                            pca_k,
                            c,
                            gamma,
                        };
                        debug_assert_eq!(configs[cfg_idx], cfg);
                        let model = train_svm(&sub, &y, &SvmParams::new(cfg.kernel(), c))?;
                        let score = model.decision_function(&test_sub)?;
                        pooled[cfg_idx].push((labels[j], score));
                        cfg_idx += 1;
                    }
                }
            }
        }
    }

    // pooled AUC per configuration; a single-class pool scores neutral 0.5
    let mut best: Option<(f64, HyperConfig)> = None;
    let mut best_auc = 0.5;
    for (cfg, pool) in configs.iter().zip(&pooled) {
        let auc = if pool.iter().any(|(l, _)| *l == 1) && pool.iter().any(|(l, _)| *l == 0) {
            let scores: Vec<f64> = pool.iter().map(|&(_, s)| s).collect();
            let labels: Vec<u8> = pool.iter().map(|&(l, _)| l).collect();
            roc_and_auc(&scores, &labels)?.auc
        } else {
            0.5
        };
        let better = match &best {
            None => true,
            Some((ba, bc)) => {
                let key = (
                    -auc,
                    cfg.pca_k,
                    cfg.c,
                    cfg.gamma.unwrap_or(0.0),
                    cfg.smote_k,
                );
                let bkey = (-*ba, bc.pca_k, bc.c, bc.gamma.unwrap_or(0.0), bc.smote_k);
                key < bkey
            }
        };
        if better {
            best = Some((auc, *cfg));
            best_auc = auc;
        }
    }
    let (_, best) = best.ok_or_else(|| Error::BadGrid("no configurations".into()))?;
    Ok(SelectionOutcome {
        best,
        best_auc,
        skipped,
    })
}

/// Nested LOOCV: the outer loop scores each held-out case with a pipeline
/// whose hyperparameters were chosen by an inner LOOCV on the remaining
/// cases only.
pub fn nested_loocv(t: &FeatureTable, grid: &HyperGrid, seed: u64) -> Result<LoocvOutcome> {
    grid.validate()?;
    let labels = t.labels_binary()?;
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos < 2 || n_neg < 2 {
        return Err(Error::InvalidParam {
            name: "labels",
            msg: format!("need >= 2 cases per class, got {n_neg}/{n_pos}"),
        });
    }
    let canon = t.select_rows(&canonical_order(t));
    let labels = canon.labels_binary()?;
    let n = canon.n_cases();

    let fold_outputs: Vec<Result<(FoldResult, PipelineModel, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let train_idx: Vec<usize> = (0..n).filter(|&r| r != i).collect();
            let train = canon.select_rows(&train_idx);
            let ctx_seed = seed ^ fnv1a64(canon.case_ids[i].as_bytes());
            let selection = select_config(&train, grid, ctx_seed)?;
            let model = fit_pipeline(&train, &selection.best, ctx_seed)?;
            // leakage audit: the held-out id must not be in the fitted fold
            assert!(
                !model.train_case_ids.contains(&canon.case_ids[i]),
                "held-out case leaked into the training fold"
            );
            let test = canon.select_rows(&[i]);
            let score = model.score_table(&test)?[0];
            Ok((
                FoldResult {
                    case_id: canon.case_ids[i].clone(),
                    label: labels[i],
                    score,
                    config: model.config,
                    inner_auc: selection.best_auc,
                    train_fingerprint: model.train_fingerprint,
                },
                model,
                selection.skipped,
            ))
        })
        .collect();

    let mut folds = Vec::with_capacity(n);
    let mut models = Vec::with_capacity(n);
    let mut skipped_inner_folds = 0;
    for out in fold_outputs {
        let (fold, model, skipped) = out?;
        folds.push(fold);
        models.push(model);
        skipped_inner_folds += skipped;
    }

    let scores: Vec<f64> = folds.iter().map(|f| f.score).collect();
    let curve = roc_and_auc(&scores, &labels)?;
    let (confusion, metrics) = confusion_metrics(&scores, &labels, 0.0);
    let report = EvalReport {
        kernel: grid.kernel,
        seed,
        subset: None,
        n_cases: n,
        n_positive: n_pos,
        n_negative: n_neg,
        auc: curve.auc,
        auc_se: curve.auc_se,
        confusion,
        metrics,
        skipped_inner_folds,
        folds,
        roc: curve.points,
    };
    Ok(LoocvOutcome { report, models })
}

/// Nested LOOCV restricted to the columns of one feature type.
pub fn evaluate_feature_subset(
    t: &FeatureTable,
    feature_type: FeatureType,
    grid: &HyperGrid,
    seed: u64,
) -> Result<LoocvOutcome> {
    let idx: Vec<usize> = t
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| c.feature_type == feature_type)
        .map(|(i, _)| i)
        .collect();
    if idx.is_empty() {
        return Err(Error::EmptySubset {
            tag: feature_type.tag().to_string(),
        });
    }
    let sub = t.select_columns(&idx);
    let mut outcome = nested_loocv(&sub, grid, seed)?;
    outcome.report.subset = Some(feature_type.tag().to_string());
    Ok(outcome)
}

/// Select hyperparameters on the full table (inner protocol) and refit the
/// deployable pipeline on all cases.
pub fn fit_final_model(
    t: &FeatureTable,
    grid: &HyperGrid,
    seed: u64,
) -> Result<(PipelineModel, f64)> {
    grid.validate()?;
    let canon = t.select_rows(&canonical_order(t));
    let selection = select_config(&canon, grid, seed)?;
    let model = fit_pipeline(&canon, &selection.best, seed)?;
    Ok((model, selection.best_auc))
}

/// Averaged per-feature-type share of the linear decision weights, mapped
/// back through the PCA loadings: per fold `a_i = |sum_k w_k V_ik|` on the
/// standardized features, averaged over folds and within feature types,
/// normalized to sum 1.
pub fn feature_type_weights(models: &[PipelineModel]) -> Result<Vec<(FeatureType, f64)>> {
    if models.is_empty() {
        return Err(Error::InvalidParam {
            name: "models",
            msg: "need at least one fold model".into(),
        });
    }
    use std::collections::BTreeMap;
    let mut sums: BTreeMap<String, (FeatureType, f64, usize)> = BTreeMap::new();
    for model in models {
        let w = model.svm.linear_weights()?; // errors on RBF models
        let p = model.pca.n_features();
        for i in 0..p {
            let mut a = 0.0;
            for (k, wk) in w.iter().enumerate() {
                a += wk * model.pca.components.get(i, k);
            }
            let entry = sums.entry(model.columns[i].name.clone()).or_insert((
                model.columns[i].feature_type,
                0.0,
                0,
            ));
            entry.1 += a.abs();
            entry.2 += 1;
        }
    }
    let mut per_type: BTreeMap<&'static str, (FeatureType, f64, usize)> = BTreeMap::new();
    for (_, (ftype, sum, count)) in sums {
        let mean = sum / count as f64;
        let entry = per_type.entry(ftype.tag()).or_insert((ftype, 0.0, 0));
        entry.1 += mean;
        entry.2 += 1;
    }
    let mut out: Vec<(FeatureType, f64)> = FeatureType::ALL
        .iter()
        .filter_map(|t| per_type.get(t.tag()).map(|(ft, s, c)| (*ft, s / *c as f64)))
        .collect();
    let total: f64 = out.iter().map(|(_, v)| v).sum();
    if total > 0.0 {
        for (_, v) in out.iter_mut() {
            *v /= total;
        }
    } else {
        let uniform = 1.0 / out.len().max(1) as f64;
        for (_, v) in out.iter_mut() {
            *v = uniform;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::synth::{gen_tabular, TabularSpec};

    #[test]
    fn roc_known_pair_counting_case() {
        let curve = roc_and_auc(&[0.9, 0.8, 0.3, 0.2], &[1, 0, 1, 0]).unwrap();
        assert_eq!(curve.auc, 0.75);
        assert_eq!(curve.points.first().unwrap().fpr, 0.0);
        assert_eq!(curve.points.last().unwrap().tpr, 1.0);
    }

    #[test]
    fn roc_perfect_and_tied() {
        let c = roc_and_auc(&[2.0, 1.5, -1.0, -2.0], &[1, 1, 0, 0]).unwrap();
        assert_eq!(c.auc, 1.0);
        let c = roc_and_auc(&[0.5; 6], &[1, 0, 1, 0, 1, 0]).unwrap();
        assert_eq!(c.auc, 0.5);
    }

    #[test]
    fn roc_is_monotone_and_matches_pair_counting() {
        let mut rng = SplitMix64::new(10);
        for _ in 0..200 {
            let n = 2 + rng.next_below(40) as usize;
            let mut labels: Vec<u8> = (0..n).map(|_| (rng.next_f64() < 0.4) as u8).collect();
            labels[0] = 1;
            labels[if n > 1 { 1 } else { 0 }] = 0;
            // coarse grid of scores so ties happen often
            let scores: Vec<f64> = (0..n).map(|_| (rng.next_below(7) as f64) / 3.0).collect();
            let curve = roc_and_auc(&scores, &labels).unwrap();
            // pair-counting oracle with half credit for ties
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if labels[i] == 1 && labels[j] == 0 {
                        den += 1.0;
                        num += if scores[i] > scores[j] {
                            1.0
                        } else if scores[i] == scores[j] {
                            0.5
                        } else {
                            0.0
                        };
                    }
                }
            }
            assert!((curve.auc - num / den).abs() < 1e-12);
            for w in curve.points.windows(2) {
                assert!(w[1].fpr >= w[0].fpr && w[1].tpr >= w[0].tpr);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn trapezoid_auc_equals_pair_counting(
            n in 2usize..40,
            grid in 2u64..12,
            seed in 0u64..u64::MAX,
        ) {
            let mut rng = SplitMix64::new(seed);
            let mut labels: Vec<u8> = (0..n).map(|_| (rng.next_f64() < 0.5) as u8).collect();
            labels[0] = 1;
            labels[n - 1] = 0;
            let scores: Vec<f64> = (0..n)
                .map(|_| rng.next_below(grid) as f64 / grid as f64)
                .collect();
            let curve = roc_and_auc(&scores, &labels).unwrap();
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if labels[i] == 1 && labels[j] == 0 {
                        den += 1.0;
                        num += if scores[i] > scores[j] {
                            1.0
                        } else if scores[i] == scores[j] {
                            0.5
                        } else {
                            0.0
                        };
                    }
                }
            }
            proptest::prop_assert!((curve.auc - num / den).abs() < 1e-12);
            let first = curve.points.first().unwrap();
            let last = curve.points.last().unwrap();
            proptest::prop_assert!(first.fpr == 0.0 && first.tpr == 0.0);
            proptest::prop_assert!(last.fpr == 1.0 && last.tpr == 1.0);
        }
    }

    #[test]
    fn confusion_reproduces_reported_arithmetic() {
        let c = Confusion {
            tp: 9,
            fp: 2,
            fn_: 5,
            tn: 26,
        };
        let m = metrics_from_confusion(&c);
        assert!((m.ppv.unwrap() - 9.0 / 11.0).abs() < 1e-12);
        assert!((m.npv.unwrap() - 26.0 / 31.0).abs() < 1e-12);
        assert!((m.acc - 35.0 / 42.0).abs() < 1e-12);

        let c = Confusion {
            tp: 7,
            fp: 3,
            fn_: 7,
            tn: 25,
        };
        let m = metrics_from_confusion(&c);
        assert!((m.ppv.unwrap() - 0.70).abs() < 1e-12);
        assert!((m.npv.unwrap() - 25.0 / 32.0).abs() < 1e-12);
        assert!((m.acc - 32.0 / 42.0).abs() < 1e-12);
    }

    #[test]
    fn confusion_zero_denominator_is_absent() {
        let scores = [-1.0, -2.0, -0.5];
        let labels = [0, 0, 1];
        let (c, m) = confusion_metrics(&scores, &labels, 0.0);
        assert_eq!(c.tp + c.fp, 0);
        assert!(m.ppv.is_none());
        assert!((m.acc - 2.0 / 3.0).abs() < 1e-12);
        // identity: sens*P + spec*N = TP + TN
        let sens = m.sensitivity.unwrap_or(0.0);
        let spec = m.specificity.unwrap_or(0.0);
        assert!((sens * 1.0 + spec * 2.0 - (c.tp + c.tn) as f64).abs() < 1e-12);
    }

    fn tiny_grid(kernel: KernelKind) -> HyperGrid {
        HyperGrid {
            kernel,
            c_values: vec![1.0],
            gamma_values: if kernel == KernelKind::Rbf {
                vec![0.1]
            } else {
                vec![]
            },
            pca_k: vec![2],
            smote_k: vec![3],
        }
    }

    #[test]
    fn toy_four_case_fold_structure() {
        let spec = TabularSpec {
            seed: 5,
            n_features: 4,
            n_informative: 1,
            effect_size: 2.0,
            n_negative: 2,
            n_positive: 2,
            informative_type: None,
        };
        let t = gen_tabular(&spec).unwrap();
        let out = nested_loocv(&t, &tiny_grid(KernelKind::Linear), 0).unwrap();
        assert_eq!(out.models.len(), 4);
        for model in &out.models {
            assert_eq!(model.train_case_ids.len(), 3);
        }
        assert_eq!(out.report.folds.len(), 4);
        // every fold fingerprint differs (different training sets)
        let mut fps: Vec<u64> = out
            .report
            .folds
            .iter()
            .map(|f| f.train_fingerprint)
            .collect();
        fps.sort_unstable();
        fps.dedup();
        assert_eq!(fps.len(), 4);
    }

    #[test]
    fn row_permutation_leaves_outer_scores_unchanged() {
        let spec = TabularSpec {
            seed: 8,
            n_features: 12,
            n_informative: 3,
            effect_size: 1.0,
            n_negative: 7,
            n_positive: 5,
            informative_type: None,
        };
        let t = gen_tabular(&spec).unwrap();
        let grid = tiny_grid(KernelKind::Linear);
        let a = nested_loocv(&t, &grid, 3).unwrap();
        let perm: Vec<usize> = (0..t.n_cases()).rev().collect();
        let shuffled = t.select_rows(&perm);
        let b = nested_loocv(&shuffled, &grid, 3).unwrap();
        assert_eq!(
            serde_json::to_string(&a.report).unwrap(),
            serde_json::to_string(&b.report).unwrap()
        );
    }

    #[test]
    fn rerun_is_bit_identical() {
        let spec = TabularSpec {
            seed: 13,
            n_features: 10,
            n_informative: 2,
            effect_size: 1.5,
            n_negative: 6,
            n_positive: 4,
            informative_type: None,
        };
        let t = gen_tabular(&spec).unwrap();
        let grid = tiny_grid(KernelKind::Rbf);
        let a = nested_loocv(&t, &grid, 1).unwrap();
        let b = nested_loocv(&t, &grid, 1).unwrap();
        assert_eq!(
            serde_json::to_string(&a.report).unwrap(),
            serde_json::to_string(&b.report).unwrap()
        );
    }

    #[test]
    fn subset_runs_use_only_tagged_columns() {
        let spec = TabularSpec {
            seed: 21,
            n_features: 21,
            n_informative: 3,
            effect_size: 3.0,
            n_negative: 8,
            n_positive: 6,
            informative_type: Some(FeatureType::Glcm),
        };
        let t = gen_tabular(&spec).unwrap();
        let grid = tiny_grid(KernelKind::Linear);
        let glcm = evaluate_feature_subset(&t, FeatureType::Glcm, &grid, 2).unwrap();
        assert_eq!(glcm.report.subset.as_deref(), Some("glcm"));
        let shape = evaluate_feature_subset(&t, FeatureType::Shape, &grid, 2).unwrap();
        assert!(
            glcm.report.auc > shape.report.auc,
            "signal-bearing subset must win: {} vs {}",
            glcm.report.auc,
            shape.report.auc
        );
    }

    #[test]
    fn weights_normalized_and_symmetric_construction_splits_evenly() {
        // two feature types carrying identical duplicated columns
        use crate::table::{ColumnDesc, FeatureTable};
        let mut rng = SplitMix64::new(2);
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let shift = if i < 6 { 0.0 } else { 2.0 };
                let v = rng.next_gaussian() + shift;
                let w = rng.next_gaussian() * 0.1;
                vec![v, v + w * 1e-12]
            })
            .collect();
        let t = FeatureTable::new(
            (0..12).map(|i| format!("c{i:02}")).collect(),
            (0..12).map(|i| Some(u8::from(i >= 6))).collect(),
            vec![
                ColumnDesc::parse("original_glcm_X").unwrap(),
                ColumnDesc::parse("original_glrlm_X").unwrap(),
            ],
            Mat::from_rows(rows),
        )
        .unwrap();
        let grid = HyperGrid {
            kernel: KernelKind::Linear,
            c_values: vec![1.0],
            gamma_values: vec![],
            pca_k: vec![1],
            smote_k: vec![3],
        };
        let out = nested_loocv(&t, &grid, 0).unwrap();
        let w = feature_type_weights(&out.models).unwrap();
        let total: f64 = w.iter().map(|(_, v)| v).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for (_, v) in &w {
            assert!(*v >= 0.0);
            assert!(
                (v - 0.5).abs() < 1e-6,
                "symmetric columns must split evenly"
            );
        }
    }

    #[test]
    fn weights_reject_rbf_models() {
        let spec = TabularSpec {
            seed: 3,
            n_features: 6,
            n_informative: 2,
            effect_size: 1.0,
            n_negative: 5,
            n_positive: 4,
            informative_type: None,
        };
        let t = gen_tabular(&spec).unwrap();
        let out = nested_loocv(&t, &tiny_grid(KernelKind::Rbf), 0).unwrap();
        assert!(matches!(
            feature_type_weights(&out.models),
            Err(Error::KernelMismatch)
        ));
    }

    #[test]
    fn single_pc_on_one_axis_owns_the_weight() {
        // hand-built fold model: PC1 = feature 0's axis, w = (0.7);
        // all weight must land on feature 0's type
        use crate::pca::PcaModel;
        use crate::pipeline::fingerprint_ids;
        use crate::preprocess::{Scaler, SmoteParams};
        use crate::svm::{Kernel, SvmModel};
        use crate::table::ColumnDesc;
        let columns = vec![
            ColumnDesc::parse("original_shape_Big").unwrap(),
            ColumnDesc::parse("original_ngtdm_Small").unwrap(),
        ];
        let ids = vec!["a".to_string(), "b".to_string()];
        let model = PipelineModel {
            columns,
            prune_log: vec![],
            scaler: Scaler {
                mu: vec![0.0, 0.0],
                sigma: vec![1.0, 1.0],
            },
            smote: SmoteParams { k: 3, seed: 0 },
            pca: PcaModel {
                train_mean: vec![0.0, 0.0],
                components: Mat::from_vec(2, 1, vec![1.0, 0.0]),
                eigenvalues: vec![1.0],
            },
            svm: SvmModel {
                kernel: Kernel::Linear,
                c: 1.0,
                support_vectors: Mat::from_vec(1, 1, vec![1.0]),
                dual_coef: vec![0.7],
                bias: 0.0,
                converged: true,
                iterations: 0,
                max_kkt_violation: 0.0,
            },
            config: HyperConfig {
                smote_k: 3,
                pca_k: 1,
                c: 1.0,
                gamma: None,
            },
            train_fingerprint: fingerprint_ids(&ids),
            train_case_ids: ids,
        };
        let w = feature_type_weights(&[model]).unwrap();
        let shape = w
            .iter()
            .find(|(t, _)| *t == FeatureType::Shape)
            .map(|(_, v)| *v)
            .unwrap();
        assert!(
            (shape - 1.0).abs() < 1e-12,
            "axis-aligned PC owns it: {shape}"
        );
        let total: f64 = w.iter().map(|(_, v)| v).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn final_model_trains_on_all_cases() {
        let spec = TabularSpec {
            seed: 10,
            n_features: 8,
            n_informative: 2,
            effect_size: 1.5,
            n_negative: 7,
            n_positive: 5,
            informative_type: None,
        };
        let t = gen_tabular(&spec).unwrap();
        let (model, inner_auc) = fit_final_model(&t, &tiny_grid(KernelKind::Linear), 9).unwrap();
        assert_eq!(model.train_case_ids.len(), 12);
        assert!((0.0..=1.0).contains(&inner_auc));
    }

    #[test]
    fn grid_validation_rejects_bad_grids() {
        let mut g = HyperGrid::linear();
        g.c_values.clear();
        assert!(g.validate().is_err());
        let mut g = HyperGrid::rbf();
        g.gamma_values = vec![0.0];
        assert!(g.validate().is_err());
        let mut g = HyperGrid::linear();
        g.pca_k = vec![10];
        assert!(g.validate().is_err());
        assert!(HyperGrid::linear().validate().is_ok());
        assert!(HyperGrid::rbf().validate().is_ok());
        assert_eq!(HyperGrid::linear().enumerate().len(), 8 * 8 * 2);
        assert_eq!(HyperGrid::rbf().enumerate().len(), 8 * 8 * 2 * 5);
    }

    #[test]
    fn subset_without_columns_is_rejected() {
        let spec = TabularSpec {
            seed: 6,
            n_features: 6,
            n_informative: 2,
            effect_size: 1.0,
            n_negative: 5,
            n_positive: 4,
            informative_type: Some(FeatureType::Glcm),
        };
        // noise columns cycle over everything except GLCM, and the two
        // informative columns are GLCM; shape may or may not appear, so
        // build a table where one type is guaranteed absent
        let t = gen_tabular(&spec).unwrap();
        let idx: Vec<usize> = t
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.feature_type != FeatureType::Ngtdm)
            .map(|(i, _)| i)
            .collect();
        let without = t.select_columns(&idx);
        assert!(matches!(
            evaluate_feature_subset(
                &without,
                FeatureType::Ngtdm,
                &tiny_grid(KernelKind::Linear),
                0
            ),
            Err(Error::EmptySubset { .. })
        ));
    }

    #[test]
    fn single_class_inputs_are_rejected() {
        let spec = TabularSpec {
            seed: 2,
            n_features: 5,
            n_informative: 1,
            effect_size: 1.0,
            n_negative: 4,
            n_positive: 2,
            informative_type: None,
        };
        let mut t = gen_tabular(&spec).unwrap();
        for l in t.labels.iter_mut() {
            *l = Some(0);
        }
        assert!(nested_loocv(&t, &tiny_grid(KernelKind::Linear), 0).is_err());
        assert!(roc_and_auc(&[1.0, 2.0], &[1, 1]).is_err());
    }
}
