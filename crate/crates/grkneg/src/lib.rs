//! One-class classification toolkit built around reference-vector kernels.
//!
//! The pieces, bottom to top:
//!
//! - [`matrix`], [`eigen`], [`kernel`]: dense linear algebra, symmetric
//!   eigendecomposition, pseudoinverse, RBF kernels, and kernel centering.
//! - [`grk`]: reference-set construction and the reference-kernel train/test
//!   pipeline.
//! - [`svm`]: SMO solvers for the nu-one-class SVM and binary C-SVC on
//!   precomputed kernels.
//! - [`data`]: CSV ingestion, the bundled benchmark manifest, seeded
//!   stratified splits, and positive-referenced standardization.
//! - [`experiment`]: hyperparameter cross-validation, Gmean scoring, and the
//!   (method x task x negative-budget x repeat) experiment matrix.
//! - [`model`]: self-describing trained-model files.
//! - [`report`]: delimited and Markdown result/summary writers.

pub mod data;
pub mod eigen;
pub mod experiment;
pub mod grk;
pub mod kernel;
pub mod matrix;
pub mod model;
pub mod report;
pub mod svm;
