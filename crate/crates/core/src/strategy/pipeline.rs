use std::collections::BTreeMap;
use std::sync::Arc;

use log::info;

use super::plan::ExperimentPlan;
use super::rank::{
    build_candidates, choose_by_tradeoff, evaluate, rank_order, Candidate, Cell, EvalCorpus, Role,
};
use super::round::{choose_train_corpus, RoundOutcome, SelectionContext};
use crate::classify::{ClassifierKind, RecognitionRate};
use crate::corpusio::{FeatureCatalog, FeatureMatrix, Representation};
use crate::error::{Error, Result};
use crate::select::{FeatureSubset, Provenance, Selector};

#[derive(Debug, Clone, PartialEq)]
pub struct RankingReport {
    pub representation: Representation,
    pub catalog: Arc<FeatureCatalog>,
    pub alignments: Vec<String>,
    /// Sorted by id.
    pub selection_corpora: Vec<String>,
    /// Sorted by id; empty means no stability check was possible.
    pub independent_corpora: Vec<String>,
    pub classifiers: Vec<ClassifierKind>,
    pub rounds: Vec<RoundOutcome>,
    /// Average test score of each corpus's rounds when it trained.
    pub train_scores: BTreeMap<String, f64>,
    pub train_corpus: String,
    pub candidates: Vec<Candidate>,
    pub cells: Vec<Cell>,
    /// k used by the KNN evaluation of each corpus.
    pub knn_k: BTreeMap<String, usize>,
    /// Rank sum over selection corpora of each candidate, per classifier.
    pub rank_sums: BTreeMap<ClassifierKind, Vec<usize>>,
    /// Candidates from best to worst over all classifiers.
    pub order: Vec<usize>,
    pub chosen: usize,
    /// Set when no candidate stayed within `delta` of the full set.
    pub chosen_fallback: bool,
    pub delta: f64,
    pub notes: Vec<String>,
}

impl RankingReport {
    pub fn cell(
        &self,
        candidate: usize,
        corpus: &str,
        classifier: ClassifierKind,
    ) -> Option<&RecognitionRate> {
        self.cells
            .iter()
            .find(|c| c.candidate == candidate && c.corpus == corpus && c.classifier == classifier)
            .map(|c| &c.rate)
    }

    pub fn chosen_subset(&self) -> &FeatureSubset {
        &self.candidates[self.chosen].subset
    }

    pub fn chosen_candidate(&self) -> &Candidate {
        &self.candidates[self.chosen]
    }

    pub fn baseline(&self) -> usize {
        self.candidates.iter().position(|c| c.baseline).unwrap_or(0)
    }

    pub fn has_stability_check(&self) -> bool {
        !self.independent_corpora.is_empty()
    }

    /// Mean rates `[candidate][column]` over the given corpora, one column
    /// per (corpus, classifier) in corpus-then-classifier order.
    fn table(&self, corpora: &[&String], classifiers: &[ClassifierKind]) -> Vec<Vec<f64>> {
        (0..self.candidates.len())
            .map(|cand| {
                corpora
                    .iter()
                    .flat_map(|corpus| classifiers.iter().map(move |&k| (corpus, k)))
                    .map(|(corpus, k)| self.cell(cand, corpus, k).map_or(f64::NAN, |r| r.mean))
                    .collect()
            })
            .collect()
    }
}

/// Loads the plan's corpora and runs the whole strategy.
pub fn run_pipeline(plan: &ExperimentPlan) -> Result<RankingReport> {
    plan.validate()?;
    let (selection, independent) = plan.load_corpora()?;
    run_pipeline_on(plan, selection, independent)
}

/// Runs the strategy on corpora already in memory; the plan's corpus lists
/// are ignored.
pub fn run_pipeline_on(
    plan: &ExperimentPlan,
    mut selection: Vec<FeatureMatrix>,
    mut independent: Vec<FeatureMatrix>,
) -> Result<RankingReport> {
    if selection.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 selection corpora, got {}",
            selection.len()
        )));
    }
    selection.sort_by(|a, b| a.corpus_id.cmp(&b.corpus_id));
    independent.sort_by(|a, b| a.corpus_id.cmp(&b.corpus_id));
    let catalog = selection[0].catalog.clone();
    let mut seen = std::collections::BTreeSet::new();
    for m in selection.iter().chain(&independent) {
        if !seen.insert(m.corpus_id.clone()) {
            return Err(Error::InvalidConfig(format!(
                "corpus `{}` given twice",
                m.corpus_id
            )));
        }
        if *m.catalog != *catalog {
            return Err(Error::InvalidConfig(format!(
                "corpus `{}` uses a different feature catalog",
                m.corpus_id
            )));
        }
    }
    let width = catalog.len();
    let pool: Vec<usize> = (0..width)
        .filter(|&f| selection.iter().chain(&independent).all(|m| m.present[f]))
        .collect();
    if pool.is_empty() {
        return Err(Error::InvalidConfig(
            "no feature column is present in every corpus".into(),
        ));
    }

    let context = SelectionContext::build(plan, &selection, pool.clone())?;
    let rounds = context.run_all()?;
    let (train_corpus, train_scores) = choose_train_corpus(&rounds);
    info!("training corpus: {train_corpus}");
    let mut notes: Vec<String> = rounds
        .iter()
        .flat_map(|r| r.notes.iter().cloned())
        .collect();

    let per_alignment: Vec<(String, FeatureSubset)> = context
        .alignments()
        .iter()
        .map(|a| {
            let r = rounds
                .iter()
                .find(|r| &r.alignment == a && r.train_corpus == train_corpus)
                .expect("one round per alignment and corpus");
            (a.clone(), r.chosen.clone())
        })
        .collect();
    let full = FeatureSubset::new(
        pool,
        width,
        Provenance::new(Selector::Full, "none", &train_corpus),
    )?;
    let (candidates, candidate_notes) = build_candidates(&per_alignment, full, width);
    notes.extend(candidate_notes);

    let selection_ids: Vec<String> = selection.iter().map(|m| m.corpus_id.clone()).collect();
    let independent_ids: Vec<String> = independent.iter().map(|m| m.corpus_id.clone()).collect();
    let eval: Vec<EvalCorpus> = selection
        .into_iter()
        .map(|m| EvalCorpus::build(plan, m, Role::Selection))
        .chain(
            independent
                .into_iter()
                .map(|m| EvalCorpus::build(plan, m, Role::Independent)),
        )
        .collect::<Result<_>>()?;
    let knn_k = eval.iter().map(|e| (e.id().to_string(), e.k)).collect();
    let cells = evaluate(&candidates, &eval, &plan.classifiers)?;
    if independent_ids.is_empty() {
        notes.push("no independent corpus: no stability check".into());
    }

    let mut report = RankingReport {
        representation: catalog.representation(),
        catalog,
        alignments: context.alignments().to_vec(),
        selection_corpora: selection_ids,
        independent_corpora: independent_ids,
        classifiers: plan.classifiers.clone(),
        rounds,
        train_scores,
        train_corpus,
        candidates,
        cells,
        knn_k,
        rank_sums: BTreeMap::new(),
        order: Vec::new(),
        chosen: 0,
        chosen_fallback: false,
        delta: plan.delta,
        notes,
    };
    rank(&mut report);
    let (chosen, fallback) = choose_language_independent(&report, plan.delta)?;
    report.chosen = chosen;
    report.chosen_fallback = fallback;
    if fallback {
        report.notes.push(format!(
            "no candidate stayed within {} points of the full set everywhere",
            plan.delta
        ));
    }
    info!(
        "chosen subset: {} ({} features)",
        report.candidates[chosen].name,
        report.candidates[chosen].subset.len()
    );
    Ok(report)
}

/// Fills rank sums per classifier and the overall order, both over the
/// selection corpora only.
pub fn rank(report: &mut RankingReport) {
    let sizes: Vec<usize> = report.candidates.iter().map(|c| c.subset.len()).collect();
    let corpora: Vec<&String> = report.selection_corpora.iter().collect();
    let mut rank_sums = BTreeMap::new();
    for &k in &report.classifiers {
        let (sums, _) = rank_order(&report.table(&corpora, &[k]), &sizes);
        rank_sums.insert(k, sums);
    }
    let (_, order) = rank_order(&report.table(&corpora, &report.classifiers), &sizes);
    report.rank_sums = rank_sums;
    report.order = order;
}

/// Trade-off choice over every corpus, selection and independent, and
/// every classifier. Returns the candidate index and the fallback flag.
pub fn choose_language_independent(report: &RankingReport, delta: f64) -> Result<(usize, bool)> {
    let sizes: Vec<usize> = report.candidates.iter().map(|c| c.subset.len()).collect();
    let corpora: Vec<&String> = report
        .selection_corpora
        .iter()
        .chain(&report.independent_corpora)
        .collect();
    let table = report.table(&corpora, &report.classifiers);
    choose_by_tradeoff(&table, report.baseline(), &sizes, &report.order, delta)
}
