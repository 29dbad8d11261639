use std::collections::BTreeMap;
use std::sync::Arc;

use log::{info, warn};
use rayon::prelude::*;

use super::plan::ExperimentPlan;
use crate::classify::select_knn_k;
use crate::corpusio::{apply_alignment, stratified_kfold, AlignmentScheme, FeatureMatrix};
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::select::{
    boost_select, choose_combined, combine_subsets, ga_probabilities, sffs, Combination, Criterion,
    FeatureSubset, GaParams, Provenance, Selector,
};

/// What one (alignment, training corpus) round produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub alignment: String,
    pub train_corpus: String,
    /// SFFS, GA and boosting subsets, in that order; a selector that came
    /// back empty is missing.
    pub selected: Vec<FeatureSubset>,
    pub union: FeatureSubset,
    pub intersection: Option<FeatureSubset>,
    pub union_mean: f64,
    pub intersection_mean: Option<f64>,
    pub chosen: FeatureSubset,
    /// Mean KNN score of `chosen` over the other selection corpora.
    pub test_mean: f64,
    pub notes: Vec<String>,
}

/// Aligned selection corpora with their fixed folds and KNN criteria,
/// shared by every selector of every round.
pub struct SelectionContext {
    seed: u64,
    plan: ExperimentPlan,
    pool: Vec<usize>,
    width: usize,
    alignments: Vec<String>,
    corpora: Vec<String>,
    criteria: BTreeMap<(String, String), Criterion>,
}

impl SelectionContext {
    /// `selection` must be sorted by corpus id; `pool` lists the features
    /// the selectors may use.
    pub fn build(
        plan: &ExperimentPlan,
        selection: &[FeatureMatrix],
        pool: Vec<usize>,
    ) -> Result<Self> {
        let schemes = plan.schemes(selection)?;
        let jobs: Vec<(&AlignmentScheme, &FeatureMatrix)> = schemes
            .iter()
            .flat_map(|s| selection.iter().map(move |m| (s, m)))
            .collect();
        let built = jobs
            .par_iter()
            .map(|(scheme, m)| {
                let name = scheme.id.to_string();
                let make = || -> Result<Criterion> {
                    let aligned = apply_alignment(m, scheme)?;
                    let seed = derive_seed(plan.seed, &format!("folds/{name}/{}", m.corpus_id));
                    let folds = stratified_kfold(&aligned, plan.folds, seed, plan.fold_grouping)?;
                    let k = select_knn_k(&aligned, &folds, &plan.k_candidates)?;
                    Criterion::new(Arc::new(aligned), &folds, k)
                };
                let crit = make().map_err(|e| e.in_corpus(&m.corpus_id))?;
                Ok(((name, m.corpus_id.clone()), crit))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SelectionContext {
            seed: plan.seed,
            plan: plan.clone(),
            pool,
            width: selection[0].width(),
            alignments: schemes.iter().map(|s| s.id.to_string()).collect(),
            corpora: selection.iter().map(|m| m.corpus_id.clone()).collect(),
            criteria: built.into_iter().collect(),
        })
    }

    pub fn alignments(&self) -> &[String] {
        &self.alignments
    }

    pub fn corpora(&self) -> &[String] {
        &self.corpora
    }

    pub fn pool(&self) -> &[usize] {
        &self.pool
    }

    pub fn criterion(&self, alignment: &str, corpus: &str) -> Option<&Criterion> {
        self.criteria
            .get(&(alignment.to_string(), corpus.to_string()))
    }

    /// Runs SFFS, GA and boosting on the aligned training corpus, combines
    /// their subsets and keeps whichever combination tests better on the
    /// other selection corpora.
    pub fn run_round(&self, train: &str, alignment: &str) -> Result<RoundOutcome> {
        let crit = self.criterion(alignment, train).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "no selection corpus `{train}` under alignment `{alignment}`"
            ))
        })?;
        let mut notes = Vec::new();
        let prov = |s: Selector| Provenance::new(s, alignment, train);
        let mut selected = Vec::new();

        let found = sffs(crit, &self.pool, &self.plan.sffs)?;
        selected.push(FeatureSubset::new(
            found.subset,
            self.width,
            prov(Selector::Sffs),
        )?);

        let ga_params = GaParams {
            seed: derive_seed(self.seed, &format!("ga/{alignment}/{train}")),
            ..self.plan.ga.clone()
        };
        let ga = ga_probabilities(crit, &self.pool, &ga_params)?;
        let ga_subset = if ga.subset.is_empty() {
            let top = ga.probabilities.iter().cloned().fold(0.0, f64::max);
            let note = format!(
                "{alignment}/{train}: no GA feature reached probability {}; kept those at {top}",
                ga_params.threshold
            );
            warn!("{note}");
            notes.push(note);
            self.pool
                .iter()
                .zip(&ga.probabilities)
                .filter(|(_, &p)| p == top && p > 0.0)
                .map(|(&f, _)| f)
                .collect()
        } else {
            ga.subset
        };
        if !ga_subset.is_empty() {
            selected.push(FeatureSubset::new(
                ga_subset,
                self.width,
                prov(Selector::Ga),
            )?);
        }

        match boost_select(crit.matrix(), &self.pool, &self.plan.boost) {
            Ok(b) => {
                if b.weak_learner_failure {
                    notes.push(format!(
                        "{alignment}/{train}: boosting stopped early, no stump beat the margin"
                    ));
                }
                selected.push(FeatureSubset::new(
                    b.subset,
                    self.width,
                    prov(Selector::Boost),
                )?);
            }
            Err(Error::EmptyResult { .. }) => {
                let note = format!("{alignment}/{train}: boosting found no usable stump");
                warn!("{note}");
                notes.push(note);
            }
            Err(e) => return Err(e),
        }

        let refs: Vec<&FeatureSubset> = selected.iter().collect();
        let (union, intersection) = if refs.len() == 1 {
            (refs[0].clone(), Some(refs[0].clone()))
        } else {
            let union = combine_subsets(&refs, Combination::Union, self.width)?;
            let intersection = match combine_subsets(&refs, Combination::Intersection, self.width) {
                Ok(i) => Some(i),
                Err(Error::EmptyIntersection) => {
                    let note = format!(
                        "{alignment}/{train}: selector subsets are disjoint, using the union"
                    );
                    warn!("{note}");
                    notes.push(note);
                    None
                }
                Err(e) => return Err(e),
            };
            (union, intersection)
        };
        let tests: Vec<&Criterion> = self
            .corpora
            .iter()
            .filter(|c| c.as_str() != train)
            .filter_map(|c| self.criterion(alignment, c))
            .collect();
        let choice = choose_combined(&union, intersection.as_ref(), &tests)?;
        let test_mean = match (choice.intersection_mean, intersection.as_ref()) {
            (Some(m), Some(i)) if choice.chosen.same_features(i) => m,
            _ => choice.union_mean,
        };
        info!(
            "round {alignment}/{train}: sizes {:?}, kept {} features, test mean {test_mean:.2}",
            selected.iter().map(FeatureSubset::len).collect::<Vec<_>>(),
            choice.chosen.len()
        );
        Ok(RoundOutcome {
            alignment: alignment.to_string(),
            train_corpus: train.to_string(),
            selected,
            union,
            intersection,
            union_mean: choice.union_mean,
            intersection_mean: choice.intersection_mean,
            chosen: choice.chosen,
            test_mean,
            notes,
        })
    }

    /// Every round, alignment-major in plan order, corpora by id.
    pub fn run_all(&self) -> Result<Vec<RoundOutcome>> {
        let jobs: Vec<(&String, &String)> = self
            .alignments
            .iter()
            .flat_map(|a| self.corpora.iter().map(move |c| (a, c)))
            .collect();
        jobs.par_iter().map(|(a, c)| self.run_round(c, a)).collect()
    }
}

/// The training corpus whose rounds test best on average over alignments;
/// ties go to the smaller id. Returns it with every corpus's average.
pub fn choose_train_corpus(rounds: &[RoundOutcome]) -> (String, BTreeMap<String, f64>) {
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for r in rounds {
        let e = sums.entry(r.train_corpus.clone()).or_insert((0.0, 0));
        e.0 += r.test_mean;
        e.1 += 1;
    }
    let averages: BTreeMap<String, f64> = sums
        .into_iter()
        .map(|(c, (s, n))| (c, s / n as f64))
        .collect();
    let mut best: Option<(&String, f64)> = None;
    for (c, &v) in &averages {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((c, v));
        }
    }
    (best.map(|(c, _)| c.clone()).unwrap_or_default(), averages)
}
