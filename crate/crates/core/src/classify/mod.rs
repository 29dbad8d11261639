//! KNN and RBF-kernel SVM classifiers with cross-validated evaluation.

pub mod cv;
pub mod knn;
pub mod rate;
pub mod svm;

pub use cv::{
    aggregate_segment_votes, cross_validate, fold_standardizer, knn_rates, select_knn_k,
    select_svm_params, ClassifierKind, ClassifierSpec, SvmGrid,
};
pub use knn::{knn_predict, KnnModel, DEFAULT_K_CANDIDATES};
pub use rate::RecognitionRate;
pub use svm::{svm_predict, svm_train, SvmModel};
