use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// What must stay together inside one fold.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoldGrouping {
    /// All rows of an utterance (its segments) share a fold; stratified by class.
    #[default]
    Utterance,
    /// All rows of a speaker share a fold; balanced by row count.
    Speaker,
}

/// Stratified k-fold split over row indices of `matrix`.
pub fn stratified_kfold(
    matrix: &FeatureMatrix,
    k: usize,
    seed: u64,
    grouping: FoldGrouping,
) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "fold count must be >= 2, got {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let units = matrix.utterance_groups();
    let mut assignment = vec![0usize; units.len()];

    match grouping {
        FoldGrouping::Utterance => {
            let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (u, rows) in units.iter().enumerate() {
                by_class
                    .entry(matrix.rows[rows[0]].class)
                    .or_default()
                    .push(u);
            }
            for (&class, members) in &by_class {
                if members.len() < k {
                    return Err(Error::TooFewRowsPerClass {
                        class: matrix.class_names[class].clone(),
                        count: members.len(),
                        k,
                    });
                }
            }
            let mut next = 0;
            for members in by_class.values_mut() {
                members.shuffle(&mut rng);
                for &u in members.iter() {
                    assignment[u] = next % k;
                    next += 1;
                }
            }
        }
        FoldGrouping::Speaker => {
            let mut speakers: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (u, rows) in units.iter().enumerate() {
                speakers
                    .entry(matrix.rows[rows[0]].speaker.as_str())
                    .or_default()
                    .push(u);
            }
            if speakers.len() < k {
                return Err(Error::TooFewRowsPerClass {
                    class: "<speakers>".into(),
                    count: speakers.len(),
                    k,
                });
            }
            let mut groups: Vec<Vec<usize>> = speakers.into_values().collect();
            groups.shuffle(&mut rng);
            let size = |g: &Vec<usize>| g.iter().map(|&u| units[u].len()).sum::<usize>();
            groups.sort_by_key(|g| std::cmp::Reverse(size(g)));
            let mut load = vec![0usize; k];
            for g in groups {
                let fold = (0..k).min_by_key(|&f| (load[f], f)).unwrap_or(0);
                load[fold] += size(&g);
                for u in g {
                    assignment[u] = fold;
                }
            }
        }
    }

    let mut folds = vec![
        Fold {
            train: Vec::new(),
            test: Vec::new()
        };
        k
    ];
    for (u, rows) in units.iter().enumerate() {
        for (f, fold) in folds.iter_mut().enumerate() {
            if f == assignment[u] {
                fold.test.extend_from_slice(rows);
            } else {
                fold.train.extend_from_slice(rows);
            }
        }
    }
    for fold in &mut folds {
        fold.train.sort_unstable();
        fold.test.sort_unstable();
    }
    Ok(folds)
}

/// Folds restricted to a row subset, with indices re-expressed in the
/// subset's own numbering.
pub fn restrict_folds(folds: &[Fold], rows: &[usize]) -> Vec<Fold> {
    let pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    folds
        .iter()
        .map(|f| Fold {
            train: f.train.iter().filter_map(|r| pos.get(r).copied()).collect(),
            test: f.test.iter().filter_map(|r| pos.get(r).copied()).collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpusio::catalog::{FeatureCatalog, Representation};
    use crate::corpusio::matrix::FeatureRow;
    use std::sync::Arc;

    pub(crate) fn balanced(classes: usize, per_class: usize, segments: usize) -> FeatureMatrix {
        let catalog = Arc::new(FeatureCatalog::custom(&["x"], Representation::Segment).unwrap());
        let mut rows = Vec::new();
        for c in 0..classes {
            for i in 0..per_class {
                for s in 0..segments.max(1) {
                    rows.push(FeatureRow {
                        utterance_id: format!("u{c}_{i}"),
                        segment_index: s,
                        values: vec![0.0],
                        class: c,
                        speaker: format!("spk{}", i % 5),
                    });
                }
            }
        }
        FeatureMatrix {
            corpus_id: "t".into(),
            representation: Representation::Segment,
            catalog,
            present: vec![true],
            class_names: (0..classes).map(|c| format!("c{c}")).collect(),
            rows,
        }
    }

    #[test]
    fn one_row_per_class_per_fold() {
        let m = balanced(4, 10, 1);
        let folds = stratified_kfold(&m, 10, 7, FoldGrouping::Utterance).unwrap();
        for f in &folds {
            assert_eq!(f.test.len(), 4);
            let mut classes: Vec<usize> = f.test.iter().map(|&r| m.rows[r].class).collect();
            classes.sort();
            assert_eq!(classes, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn deterministic_and_partitioning() {
        let m = balanced(3, 13, 1);
        let a = stratified_kfold(&m, 5, 11, FoldGrouping::Utterance).unwrap();
        let b = stratified_kfold(&m, 5, 11, FoldGrouping::Utterance).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<usize> = a.iter().flat_map(|f| f.test.clone()).collect();
        all.sort();
        assert_eq!(all, (0..m.len()).collect::<Vec<_>>());
        for f in &a {
            assert_eq!(f.train.len() + f.test.len(), m.len());
            assert!(f.train.iter().all(|r| !f.test.contains(r)));
        }
    }

    #[test]
    fn segments_of_an_utterance_stay_together() {
        let m = balanced(2, 10, 5);
        let folds = stratified_kfold(&m, 10, 3, FoldGrouping::Utterance).unwrap();
        for f in &folds {
            assert_eq!(f.test.len() % 5, 0);
            for &r in &f.test {
                let u = &m.rows[r].utterance_id;
                let n = f
                    .test
                    .iter()
                    .filter(|&&q| &m.rows[q].utterance_id == u)
                    .count();
                assert_eq!(n, 5);
            }
        }
    }

    #[test]
    fn too_few_rows_per_class() {
        let m = balanced(2, 4, 1);
        assert!(matches!(
            stratified_kfold(&m, 5, 0, FoldGrouping::Utterance),
            Err(Error::TooFewRowsPerClass { count: 4, k: 5, .. })
        ));
    }

    #[test]
    fn speaker_grouping_keeps_speakers_whole() {
        let m = balanced(2, 10, 1);
        let folds = stratified_kfold(&m, 5, 1, FoldGrouping::Speaker).unwrap();
        for f in &folds {
            for &r in &f.test {
                let spk = &m.rows[r].speaker;
                assert!(f.train.iter().all(|&q| &m.rows[q].speaker != spk));
            }
        }
        assert!(stratified_kfold(&m, 6, 1, FoldGrouping::Speaker).is_err());
    }
}
