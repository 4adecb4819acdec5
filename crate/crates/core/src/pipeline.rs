//! The fitted prediction pipeline: pruning column set, scaler, SMOTE
//! settings, PCA basis and SVM, all fit on one training fold and kept
//! together as a deployable unit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pca::{fit_pca, PcaModel, MAX_COMPONENTS};
use crate::preprocess::{fit_scaler, smote, Scaler, SmoteParams};
use crate::rng::fnv1a64;
use crate::svm::{train_svm, Kernel, SvmModel, SvmParams};
use crate::table::{prune_degenerate, ColumnDesc, FeatureTable, PruneRecord};

/// One point of the hyperparameter search space. `gamma = None` selects the
/// linear kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperConfig {
    pub smote_k: usize,
    pub pca_k: usize,
    pub c: f64,
    pub gamma: Option<f64>,
}

impl HyperConfig {
    pub fn kernel(&self) -> Kernel {
        match self.gamma {
            Some(gamma) => Kernel::Rbf { gamma },
            None => Kernel::Linear,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineModel {
    /// Surviving columns after training-fold pruning, in table order.
    pub columns: Vec<ColumnDesc>,
    pub prune_log: Vec<PruneRecord>,
    pub scaler: Scaler,
    pub smote: SmoteParams,
    pub pca: PcaModel,
    pub svm: SvmModel,
    pub config: HyperConfig,
    /// Sorted training case ids (leakage audit trail).
    pub train_case_ids: Vec<String>,
    /// FNV-1a hash over the sorted training ids.
    pub train_fingerprint: u64,
}

pub fn fingerprint_ids(ids: &[String]) -> u64 {
    let mut sorted: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
    sorted.sort_unstable();
    fnv1a64(sorted.join("\n").as_bytes())
}

/// Fit prune -> scale -> SMOTE -> PCA -> SVM on the given training table.
/// The requested component count is clamped to what the fold supports.
pub fn fit_pipeline(
    train: &FeatureTable,
    config: &HyperConfig,
    seed: u64,
) -> Result<PipelineModel> {
    let labels = train.labels_binary()?;
    if !labels.contains(&0) || !labels.contains(&1) {
        return Err(Error::SingleClass);
    }
    let (pruned, prune_log) = prune_degenerate(train)?;
    let scaler = fit_scaler(&pruned.values)?;
    let scaled = scaler.apply(&pruned.values)?;
    let aug = smote(
        &scaled,
        &labels,
        &SmoteParams {
            k: config.smote_k,
            seed,
        },
    )?;
    let k_cap = aug.x.rows().min(aug.x.cols()).clamp(1, MAX_COMPONENTS);
    let k_eff = config.pca_k.clamp(1, k_cap);
    let pca = fit_pca(&aug.x, k_eff)?;
    let scores = pca.transform(&aug.x)?;
    let y: Vec<i8> = aug
        .labels
        .iter()
        .map(|&l| if l == 1 { 1 } else { -1 })
        .collect();
    let svm = train_svm(&scores, &y, &SvmParams::new(config.kernel(), config.c))?;
    let mut train_case_ids = train.case_ids.clone();
    train_case_ids.sort_unstable();
    let train_fingerprint = fingerprint_ids(&train_case_ids);
    Ok(PipelineModel {
        columns: pruned.columns.clone(),
        prune_log,
        scaler,
        smote: SmoteParams {
            k: config.smote_k,
            seed,
        },
        pca,
        svm,
        config: HyperConfig {
            pca_k: k_eff,
            ..*config
        },
        train_case_ids,
        train_fingerprint,
    })
}

impl PipelineModel {
    /// Stage dimensions must chain: pruned p -> scaled p -> PCA k -> SVM k.
    pub fn dims_consistent(&self) -> bool {
        let p = self.columns.len();
        self.scaler.mu.len() == p
            && self.pca.n_features() == p
            && self.svm.support_vectors.cols() == self.pca.k()
    }

    /// Decision scores for a table, aligning this model's columns by name.
    pub fn score_table(&self, t: &FeatureTable) -> Result<Vec<f64>> {
        let idx: Vec<usize> = self
            .columns
            .iter()
            .map(|c| {
                t.columns
                    .iter()
                    .position(|tc| tc.name == c.name)
                    .ok_or_else(|| Error::UnknownTag {
                        tag: c.name.clone(),
                    })
            })
            .collect::<Result<_>>()?;
        let x = t.values.select_columns(&idx);
        let scaled = self.scaler.apply(&x)?;
        let scores = self.pca.transform(&scaled)?;
        self.svm.decision_many(&scores)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
