//! Wrapper feature selection: SFFS, repeated GA and boosting, all scored
//! by a cached KNN cross-validation criterion, plus subset combination.

pub mod boost;
pub mod combine;
pub mod criterion;
pub mod ga;
pub mod sffs;
pub mod subset;

pub use boost::{boost_select, BoostParams, BoostResult};
pub use combine::{choose_combined, combine_subsets, CombinedChoice};
pub use criterion::Criterion;
pub use ga::{ga_probabilities, ga_select, GaParams, GaResult};
pub use sffs::{sffs, SffsParams, SffsResult};
pub use subset::{load_subset, Combination, FeatureSubset, Provenance, Selector};
