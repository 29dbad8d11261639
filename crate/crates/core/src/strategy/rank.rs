use std::sync::Arc;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::ExperimentPlan;
use crate::classify::{
    cross_validate, select_knn_k, ClassifierKind, ClassifierSpec, RecognitionRate, SvmGrid,
};
use crate::corpusio::{stratified_kfold, FeatureMatrix, Fold};
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::select::{combine_subsets, Combination, Criterion, FeatureSubset};

pub const BASELINE_NAME: &str = "FFS";

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// `FFS`, `SFS(A1)`, `SFS(A1∩A2)`, ...
    pub name: String,
    pub subset: FeatureSubset,
    pub baseline: bool,
}

/// The full set first, then every alignment subset and every intersection
/// of two or more of them, smallest combinations first. Empty
/// intersections and feature sets already in the pool are dropped.
pub fn build_candidates(
    per_alignment: &[(String, FeatureSubset)],
    full: FeatureSubset,
    width: usize,
) -> (Vec<Candidate>, Vec<String>) {
    let mut pool = vec![Candidate {
        name: BASELINE_NAME.into(),
        subset: full,
        baseline: true,
    }];
    let mut notes = Vec::new();
    let n = per_alignment.len();
    let mut combos: Vec<Vec<usize>> = (1..(1usize << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    combos.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    for combo in combos {
        let name = format!(
            "SFS({})",
            combo
                .iter()
                .map(|&i| per_alignment[i].0.as_str())
                .collect::<Vec<_>>()
                .join("∩")
        );
        let subset = if combo.len() == 1 {
            per_alignment[combo[0]].1.clone()
        } else {
            let refs: Vec<&FeatureSubset> = combo.iter().map(|&i| &per_alignment[i].1).collect();
            match combine_subsets(&refs, Combination::Intersection, width) {
                Ok(s) => s,
                Err(_) => {
                    let note = format!("{name} is empty and was dropped");
                    warn!("{note}");
                    notes.push(note);
                    continue;
                }
            }
        };
        if let Some(same) = pool.iter().find(|c| c.subset.same_features(&subset)) {
            notes.push(format!("{name} equals {} and was dropped", same.name));
            continue;
        }
        pool.push(Candidate {
            name,
            subset,
            baseline: false,
        });
    }
    (pool, notes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Selection,
    Independent,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Selection => "selection",
            Role::Independent => "independent",
        }
    }
}

/// A corpus under its native labels, with the folds and k every candidate
/// is scored with.
pub struct EvalCorpus {
    pub role: Role,
    pub k: usize,
    folds: Vec<Fold>,
    knn: Criterion,
    svm: SvmGrid,
}

impl EvalCorpus {
    pub fn build(plan: &ExperimentPlan, matrix: FeatureMatrix, role: Role) -> Result<Self> {
        let id = matrix.corpus_id.clone();
        let make = || -> Result<EvalCorpus> {
            let folds = stratified_kfold(
                &matrix,
                plan.folds,
                derive_seed(plan.seed, &format!("eval-folds/{id}")),
                plan.fold_grouping,
            )?;
            let k = select_knn_k(&matrix, &folds, &plan.k_candidates)?;
            let svm = SvmGrid {
                seed: derive_seed(plan.seed, &format!("svm-grid/{id}")),
                ..plan.svm.clone()
            };
            let knn = Criterion::new(Arc::new(matrix), &folds, k)?;
            Ok(EvalCorpus {
                role,
                k,
                folds,
                knn,
                svm,
            })
        };
        make().map_err(|e| e.in_corpus(&id))
    }

    pub fn matrix(&self) -> &FeatureMatrix {
        self.knn.matrix()
    }

    pub fn id(&self) -> &str {
        &self.matrix().corpus_id
    }

    pub fn rate(
        &self,
        subset: &FeatureSubset,
        classifier: ClassifierKind,
    ) -> Result<RecognitionRate> {
        let features = subset.sorted();
        match classifier {
            ClassifierKind::Knn => self.knn.rate(&features),
            ClassifierKind::Svm => cross_validate(
                self.matrix(),
                &ClassifierSpec::SvmGrid(self.svm.clone()),
                &self.folds,
                &features,
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub candidate: usize,
    pub corpus: String,
    pub role: Role,
    pub classifier: ClassifierKind,
    pub rate: RecognitionRate,
}

/// Scores every candidate on every corpus with every classifier; cells come
/// back candidate-major, then corpus, then classifier.
pub fn evaluate(
    candidates: &[Candidate],
    corpora: &[EvalCorpus],
    classifiers: &[ClassifierKind],
) -> Result<Vec<Cell>> {
    let jobs: Vec<(usize, &EvalCorpus, ClassifierKind)> = (0..candidates.len())
        .flat_map(|c| {
            corpora
                .iter()
                .flat_map(move |e| classifiers.iter().map(move |&k| (c, e, k)))
        })
        .collect();
    jobs.par_iter()
        .map(|&(c, e, k)| {
            let rate = e
                .rate(&candidates[c].subset, k)
                .map_err(|err| err.in_corpus(e.id()))?;
            Ok(Cell {
                candidate: c,
                corpus: e.id().to_string(),
                role: e.role,
                classifier: k,
                rate,
            })
        })
        .collect()
}

/// Rank sums over columns of `means[candidate][column]` (rank 1 is best;
/// equal means share the better rank) and the candidate order they imply.
/// Ties go to the higher mean over columns, then the smaller subset.
pub fn rank_order(means: &[Vec<f64>], sizes: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let n = means.len();
    let cols = means.first().map_or(0, Vec::len);
    let mut sums = vec![0usize; n];
    for col in 0..cols {
        for c in 0..n {
            sums[c] += 1 + (0..n).filter(|&o| means[o][col] > means[c][col]).count();
        }
    }
    let avg: Vec<f64> = means
        .iter()
        .map(|r| r.iter().sum::<f64>() / r.len().max(1) as f64)
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        sums[a]
            .cmp(&sums[b])
            .then(avg[b].total_cmp(&avg[a]))
            .then(sizes[a].cmp(&sizes[b]))
            .then(a.cmp(&b))
    });
    (sums, order)
}

/// Among non-baseline candidates within `delta` of the baseline in every
/// column, the one with the largest mean gain over it; ties go to the
/// smaller subset, then to rank order. When nothing passes, the best ranked
/// non-baseline candidate is returned with the flag set.
pub fn choose_by_tradeoff(
    table: &[Vec<f64>],
    baseline: usize,
    sizes: &[usize],
    order: &[usize],
    delta: f64,
) -> Result<(usize, bool)> {
    let others: Vec<usize> = order.iter().copied().filter(|&c| c != baseline).collect();
    if others.is_empty() {
        return Ok((baseline, false));
    }
    let base = &table[baseline];
    let mut best: Option<(usize, f64)> = None;
    for &c in &others {
        let row = &table[c];
        if row.iter().zip(base).any(|(r, b)| *r < b - delta) {
            continue;
        }
        let gain = row.iter().zip(base).map(|(r, b)| r - b).sum::<f64>() / row.len().max(1) as f64;
        let better = match best {
            None => true,
            Some((b, g)) => gain > g || (gain == g && sizes[c] < sizes[b]),
        };
        if better {
            best = Some((c, gain));
        }
    }
    match best {
        Some((c, _)) => Ok((c, false)),
        None => others
            .first()
            .map(|&c| (c, true))
            .ok_or(Error::EmptyResult { threshold: delta }),
    }
}
