//! Radiomic image-marker toolkit: extracts a full shape / first-order /
//! texture feature set from 3D volumes with binary tumor masks, and trains
//! and evaluates SMOTE -> PCA -> SVM outcome classifiers under nested
//! leave-one-out cross-validation.

// `!(x > 0.0)` deliberately rejects NaN alongside non-positive values, and
// index loops mirror the matrix subscripts they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod eval;
pub mod features;
pub mod filters;
pub mod linalg;
pub mod pca;
pub mod pipeline;
pub mod preprocess;
pub mod rng;
pub mod svm;
pub mod synth;
pub mod table;
pub mod volume;

pub use error::{Error, Result};
