//! Self-describing trained-model files.
//!
//! A model file carries everything prediction needs: the standardizer, the
//! kernel artifacts (training columns for plain RBF methods, the full
//! reference-kernel model for GRK methods), the dual solution, and the seeds
//! that produced it. JSON keeps it versioned and inspectable; floats are
//! written with round-trip precision.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::Standardizer;
use crate::experiment::{ExperimentError, FittedModel, Machine};
use crate::grk::GrkModel;
use crate::kernel::rbf_kernel;
use crate::matrix::Matrix;
use crate::svm::{decide, SvmModel};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("model file {path}: {source}")]
    Format {
        path: String,
        source: serde_json::Error,
    },
    #[error("unsupported model format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}

/// Kernel-side artifacts, by method family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum KernelArtifacts {
    /// Plain RBF: decision kernels are computed against the stored
    /// (standardized) training columns.
    Rbf { train_columns: Matrix, sigma: f64 },
    /// Reference kernel: the frozen training pipeline.
    Grk { model: GrkModel },
}

/// A trained model plus its full provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub method: String,
    pub dataset: String,
    pub target_class: String,
    pub neg_budget: String,
    pub repeat: u32,
    pub user_seed: u64,
    pub s: f64,
    /// nu for one-class methods, C for the binary SVM.
    pub param: f64,
    pub standardizer: Standardizer,
    pub kernel: KernelArtifacts,
    pub svm: SvmModel,
}

impl TrainedModel {
    /// Package a fitted method for persistence.
    #[allow(clippy::too_many_arguments)]
    pub fn from_fitted(
        fitted: &FittedModel,
        method: &str,
        dataset: &str,
        target_class: &str,
        neg_budget: &str,
        repeat: u32,
        user_seed: u64,
        s: f64,
        param: f64,
        standardizer: Standardizer,
    ) -> Self {
        let kernel = match &fitted.machine {
            Machine::Plain { cols, sigma, .. } => KernelArtifacts::Rbf {
                train_columns: cols.clone(),
                sigma: *sigma,
            },
            Machine::Grk { model } => KernelArtifacts::Grk {
                model: model.clone(),
            },
        };
        TrainedModel {
            format_version: FORMAT_VERSION,
            method: method.to_string(),
            dataset: dataset.to_string(),
            target_class: target_class.to_string(),
            neg_budget: neg_budget.to_string(),
            repeat,
            user_seed,
            s,
            param,
            standardizer,
            kernel,
            svm: fitted.svm.clone(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let text = serde_json::to_string_pretty(self).map_err(|source| ModelError::Format {
            path: path.display().to_string(),
            source,
        })?;
        std::fs::write(path, text + "\n").map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let model: TrainedModel =
            serde_json::from_str(&text).map_err(|source| ModelError::Format {
                path: path.display().to_string(),
                source,
            })?;
        if model.format_version != FORMAT_VERSION {
            return Err(ModelError::Version(model.format_version));
        }
        Ok(model)
    }

    /// Decision values for raw (unstandardized) feature columns.
    pub fn decision_values(&self, raw: &Matrix) -> Result<Vec<f64>, ModelError> {
        let z = crate::data::standardize(raw, &self.standardizer).map_err(ExperimentError::from)?;
        let cross = match &self.kernel {
            KernelArtifacts::Rbf {
                train_columns,
                sigma,
            } => rbf_kernel(train_columns, &z, *sigma).map_err(ExperimentError::from)?,
            KernelArtifacts::Grk { model } => {
                crate::grk::grk_test(model, &z).map_err(ExperimentError::from)?
            }
        };
        Ok(decide(&self.svm, &cross).map_err(ExperimentError::from)?)
    }
}
