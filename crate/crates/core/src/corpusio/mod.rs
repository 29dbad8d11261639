//! Feature catalog, corpus manifests, feature tables, label alignment,
//! fold construction and standardization.

pub mod alignment;
pub mod catalog;
pub mod folds;
pub mod manifest;
pub mod matrix;
mod selected;
pub mod standardize;

pub use alignment::{apply_alignment, AlignmentScheme, SchemeId, COMMON_STATES};
pub use catalog::{build_catalog, Category, FeatureCatalog, FeatureDescriptor, Representation};
pub use folds::{restrict_folds, stratified_kfold, Fold, FoldGrouping, DEFAULT_FOLDS};
pub use manifest::{load_manifest, CorpusManifest, ManifestEntry};
pub use matrix::{ingest_feature_table, FeatureMatrix, FeatureRow, FeatureTable, TableRow};
pub use standardize::{fit_apply_standardizer, Standardizer};
