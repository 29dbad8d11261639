//! Cross-corpus orchestration: per-alignment selection rounds on every
//! selection corpus, the candidate pool, ranking, the stability check on
//! independent corpora and the final trade-off choice.

pub mod compare;
pub mod pipeline;
pub mod plan;
pub mod rank;
pub mod round;

pub use compare::{compare_to_paper_subset, OverlapCounts, OverlapSummary};
pub use pipeline::{
    choose_language_independent, rank, run_pipeline, run_pipeline_on, RankingReport,
};
pub use plan::{CatalogSource, CorpusSource, CustomAlignment, ExperimentPlan};
pub use rank::{
    build_candidates, choose_by_tradeoff, evaluate, rank_order, Candidate, Cell, EvalCorpus, Role,
    BASELINE_NAME,
};
pub use round::{choose_train_corpus, RoundOutcome, SelectionContext};
