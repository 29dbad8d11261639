use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::knn::{by_row, nearest, squared_distance, vote, KnnModel};
use super::rate::RecognitionRate;
use super::svm::{pair_vote, train_pairs, Gram, SvmModel};
use crate::corpusio::{
    stratified_kfold, FeatureMatrix, FeatureRow, Fold, FoldGrouping, Representation, Standardizer,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmGrid {
    pub c_values: Vec<f64>,
    /// Kernel widths are these factors divided by the feature count.
    pub gamma_factors: Vec<f64>,
    pub inner_folds: usize,
    pub seed: u64,
}

impl Default for SvmGrid {
    fn default() -> Self {
        SvmGrid {
            c_values: vec![0.1, 1.0, 10.0, 100.0],
            gamma_factors: vec![0.1, 1.0, 10.0],
            inner_folds: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierSpec {
    Knn {
        k: usize,
    },
    Svm {
        c: f64,
        gamma: f64,
    },
    /// SVM with (C, gamma) chosen per training fold by inner CV.
    SvmGrid(SvmGrid),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassifierKind {
    #[serde(rename = "KNN")]
    Knn,
    #[serde(rename = "SVM")]
    Svm,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Knn => "KNN",
            ClassifierKind::Svm => "SVM",
        }
    }
}

/// Majority over segment predictions; tied classes are separated by the
/// larger summed score, then the smaller class id.
pub fn aggregate_segment_votes(predictions: &[usize], scores: &[f64]) -> Result<usize> {
    if predictions.is_empty() {
        return Err(Error::EmptyPredictionSet);
    }
    let mut tally: HashMap<usize, (usize, f64)> = HashMap::new();
    for (&p, &s) in predictions.iter().zip(scores) {
        let e = tally.entry(p).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += s;
    }
    let mut best: Option<(usize, usize, f64)> = None;
    for (&class, &(count, score)) in &tally {
        let better = match best {
            None => true,
            Some((bc, bn, bs)) => {
                count > bn || (count == bn && (score > bs || (score == bs && class < bc)))
            }
        };
        if better {
            best = Some((class, count, score));
        }
    }
    Ok(best.map(|b| b.0).expect("nonempty"))
}

/// The standardizer a fold's model sees: fitted on training rows over the
/// subset's columns only.
pub fn fold_standardizer(
    matrix: &FeatureMatrix,
    fold: &Fold,
    subset: &[usize],
) -> Result<Standardizer> {
    let rows: Vec<Vec<f64>> = fold
        .train
        .iter()
        .map(|&r| project(&matrix.rows[r], subset))
        .collect();
    Standardizer::fit(rows.iter().map(|r| r.as_slice()))
}

fn project(row: &FeatureRow, subset: &[usize]) -> Vec<f64> {
    subset.iter().map(|&c| row.values[c]).collect()
}

/// Standardized training and test rows of a fold.
pub(crate) struct FoldData {
    pub train_x: Vec<Vec<f64>>,
    pub train_y: Vec<usize>,
    pub test_x: Vec<Vec<f64>>,
}

pub(crate) fn prepare_fold(
    matrix: &FeatureMatrix,
    fold: &Fold,
    subset: &[usize],
) -> Result<FoldData> {
    let std = fold_standardizer(matrix, fold, subset)?;
    Ok(FoldData {
        train_x: fold
            .train
            .iter()
            .map(|&r| std.transform(&project(&matrix.rows[r], subset)))
            .collect(),
        train_y: fold.train.iter().map(|&r| matrix.rows[r].class).collect(),
        test_x: fold
            .test
            .iter()
            .map(|&r| std.transform(&project(&matrix.rows[r], subset)))
            .collect(),
    })
}

/// Percentage of test units classified correctly. Segment matrices are
/// scored per utterance after vote aggregation.
pub fn score_predictions(
    matrix: &FeatureMatrix,
    test: &[usize],
    predictions: &[(usize, f64)],
) -> Result<f64> {
    if test.is_empty() {
        return Ok(0.0);
    }
    if matrix.representation == Representation::Utterance {
        let correct = test
            .iter()
            .zip(predictions)
            .filter(|(&r, p)| matrix.rows[r].class == p.0)
            .count();
        return Ok(100.0 * correct as f64 / test.len() as f64);
    }
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, (usize, Vec<usize>, Vec<f64>)> = HashMap::new();
    for (&r, &(p, s)) in test.iter().zip(predictions) {
        let row = &matrix.rows[r];
        let g = groups.entry(&row.utterance_id).or_insert_with(|| {
            order.push(&row.utterance_id);
            (row.class, Vec::new(), Vec::new())
        });
        g.1.push(p);
        g.2.push(s);
    }
    let mut correct = 0;
    for u in &order {
        let (class, preds, scores) = &groups[u];
        if aggregate_segment_votes(preds, scores)? == *class {
            correct += 1;
        }
    }
    Ok(100.0 * correct as f64 / order.len() as f64)
}

/// Picks (C, gamma) by inner cross-validation over the standardized
/// training rows of one outer fold. Ties keep the earlier grid point.
pub fn select_svm_params(
    train_x: &[Vec<f64>],
    train_y: &[usize],
    groups: &[String],
    class_count: usize,
    grid: &SvmGrid,
) -> Result<(f64, f64)> {
    let d = train_x.first().map_or(1, Vec::len).max(1) as f64;
    let fallback = (1.0, 1.0 / d);
    if grid.c_values.is_empty() || grid.gamma_factors.is_empty() {
        return Ok(fallback);
    }
    // A label-only matrix lets the outer fold builder make the inner split.
    let shell = FeatureMatrix {
        corpus_id: "inner".into(),
        representation: Representation::Segment,
        catalog: std::sync::Arc::new(crate::corpusio::FeatureCatalog::custom::<&str>(
            &[],
            Representation::Segment,
        )?),
        present: Vec::new(),
        class_names: (0..class_count).map(|c| c.to_string()).collect(),
        rows: train_y
            .iter()
            .zip(groups)
            .map(|(&class, g)| FeatureRow {
                utterance_id: g.clone(),
                segment_index: 0,
                values: Vec::new(),
                class,
                speaker: g.clone(),
            })
            .collect(),
    };
    let mut per_class: HashMap<usize, std::collections::HashSet<&str>> = HashMap::new();
    for (&y, g) in train_y.iter().zip(groups) {
        per_class.entry(y).or_default().insert(g);
    }
    let smallest = per_class.values().map(|s| s.len()).min().unwrap_or(0);
    let k = grid.inner_folds.min(smallest);
    if k < 2 {
        return Ok(fallback);
    }
    let folds = stratified_kfold(&shell, k, grid.seed, FoldGrouping::Utterance)?;
    let dist = Gram::squared_distances(train_x);
    let mut best = (f64::NEG_INFINITY, fallback);
    for &factor in &grid.gamma_factors {
        let gamma = factor / d;
        let gram = dist.rbf(gamma);
        for &c in &grid.c_values {
            let mut correct = 0usize;
            for f in &folds {
                let labels: Vec<usize> = f.train.iter().map(|&t| train_y[t]).collect();
                let machines = train_pairs(&gram, &f.train, &labels, class_count, c);
                for &t in &f.test {
                    let (p, _) = pair_vote(&machines, class_count, |m| {
                        m.decision_with(|s| gram.get(s, t))
                    });
                    if p == train_y[t] {
                        correct += 1;
                    }
                }
            }
            let acc = correct as f64 / train_y.len() as f64;
            if acc > best.0 {
                best = (acc, (c, gamma));
            }
        }
    }
    Ok(best.1)
}

fn fold_predictions(
    matrix: &FeatureMatrix,
    spec: &ClassifierSpec,
    fold: &Fold,
    subset: &[usize],
) -> Result<Vec<(usize, f64)>> {
    let data = prepare_fold(matrix, fold, subset)?;
    let classes = matrix.class_count();
    match spec {
        ClassifierSpec::Knn { k } => {
            let model = KnnModel::fit(
                data.train_x,
                data.train_y,
                (*k).min(fold.train.len()),
                classes,
            )?;
            data.test_x
                .iter()
                .map(|q| model.predict_scored(q))
                .collect()
        }
        ClassifierSpec::Svm { c, gamma } => {
            let model = super::svm::svm_train(&data.train_x, &data.train_y, *c, *gamma)?;
            data.test_x
                .iter()
                .map(|q| svm_scored(&model, q, classes))
                .collect()
        }
        ClassifierSpec::SvmGrid(grid) => {
            let groups: Vec<String> = fold
                .train
                .iter()
                .map(|&r| matrix.rows[r].utterance_id.clone())
                .collect();
            let (c, gamma) =
                select_svm_params(&data.train_x, &data.train_y, &groups, classes, grid)?;
            let model = super::svm::svm_train(&data.train_x, &data.train_y, c, gamma)?;
            data.test_x
                .iter()
                .map(|q| svm_scored(&model, q, classes))
                .collect()
        }
    }
}

fn svm_scored(model: &SvmModel, q: &[f64], classes: usize) -> Result<(usize, f64)> {
    let (p, s) = model.predict_scored(q)?;
    Ok((p.min(classes.saturating_sub(1)), s))
}

/// Per fold: standardize on training rows, restrict to `subset`, train,
/// score the test rows.
pub fn cross_validate(
    matrix: &FeatureMatrix,
    spec: &ClassifierSpec,
    folds: &[Fold],
    subset: &[usize],
) -> Result<RecognitionRate> {
    matrix.check_subset(subset)?;
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let per_fold = folds
        .par_iter()
        .map(|fold| {
            let preds = fold_predictions(matrix, spec, fold, subset)?;
            score_predictions(matrix, &fold.test, &preds)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(RecognitionRate::from_folds(per_fold))
}

/// CV rate of every k in `candidates` on the given columns, computing each
/// fold's neighbour ordering once.
pub fn knn_rates(
    matrix: &FeatureMatrix,
    folds: &[Fold],
    subset: &[usize],
    candidates: &[usize],
) -> Result<Vec<RecognitionRate>> {
    matrix.check_subset(subset)?;
    let classes = matrix.class_count();
    let max_k = candidates.iter().copied().max().unwrap_or(1);
    let per_fold: Vec<Vec<f64>> = folds
        .par_iter()
        .map(|fold| {
            let data = prepare_fold(matrix, fold, subset)?;
            let sorted: Vec<Vec<(f64, usize)>> = data
                .test_x
                .iter()
                .map(|q| {
                    let d = data
                        .train_x
                        .iter()
                        .enumerate()
                        .map(|(i, r)| (squared_distance(r, q), i))
                        .collect();
                    nearest(d, max_k)
                })
                .collect();
            candidates
                .iter()
                .map(|&k| {
                    let preds: Vec<(usize, f64)> = sorted
                        .iter()
                        .map(|n| {
                            vote(
                                &by_row(n[..k.min(n.len())].to_vec()),
                                &data.train_y,
                                classes,
                            )
                        })
                        .collect();
                    score_predictions(matrix, &fold.test, &preds)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok((0..candidates.len())
        .map(|c| RecognitionRate::from_folds(per_fold.iter().map(|f| f[c]).collect()))
        .collect())
}

/// The candidate with the best CV mean on all present features; ties go to
/// the smallest k. Candidates larger than the smallest training fold are
/// skipped.
pub fn select_knn_k(matrix: &FeatureMatrix, folds: &[Fold], candidates: &[usize]) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no k candidates".into()));
    }
    if let Some(&k) = candidates.iter().find(|&&k| k % 2 == 0) {
        return Err(Error::InvalidParameter(format!(
            "k candidates must be odd, got {k}"
        )));
    }
    let min_train = folds.iter().map(|f| f.train.len()).min().unwrap_or(0);
    let mut usable: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&k| k <= min_train)
        .collect();
    usable.sort_unstable();
    usable.dedup();
    if usable.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "every k candidate exceeds the smallest training fold ({min_train} rows)"
        )));
    }
    if usable.len() == 1 {
        return Ok(usable[0]);
    }
    let rates = knn_rates(matrix, folds, &matrix.present_indices(), &usable)?;
    let mut best = 0;
    for i in 1..usable.len() {
        if rates[i].mean > rates[best].mean {
            best = i;
        }
    }
    Ok(usable[best])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_clusters(n: usize, noise: usize, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = Vec::new();
        let mut classes = Vec::new();
        for i in 0..n {
            let c = i % 2;
            let mut row = vec![if c == 0 { -5.0 } else { 5.0 } + rng.random_range(-0.5..0.5)];
            row.extend((0..noise).map(|_| rng.random_range(-1.0..1.0)));
            values.push(row);
            classes.push(c);
        }
        FeatureMatrix::from_dense("t", values, classes, vec!["a".into(), "b".into()]).unwrap()
    }

    #[test]
    fn votes_aggregate() {
        assert_eq!(
            aggregate_segment_votes(&[0, 0, 1], &[0.0, 0.0, 9.0]).unwrap(),
            0
        );
        assert_eq!(aggregate_segment_votes(&[2], &[-1.0]).unwrap(), 2);
        assert_eq!(aggregate_segment_votes(&[0, 1], &[-2.0, -1.0]).unwrap(), 1);
        assert!(matches!(
            aggregate_segment_votes(&[], &[]),
            Err(Error::EmptyPredictionSet)
        ));
    }

    #[test]
    fn perfect_separation_scores_100() {
        let m = two_clusters(40, 0, 1);
        let folds = stratified_kfold(&m, 10, 0, FoldGrouping::Utterance).unwrap();
        for spec in [
            ClassifierSpec::Knn { k: 1 },
            ClassifierSpec::Svm { c: 1.0, gamma: 1.0 },
        ] {
            let r = cross_validate(&m, &spec, &folds, &[0]).unwrap();
            assert_eq!((r.mean, r.std), (100.0, 0.0));
            assert_eq!(
                r.mean,
                r.per_fold.iter().sum::<f64>() / r.per_fold.len() as f64
            );
        }
        let r = cross_validate(
            &m,
            &ClassifierSpec::SvmGrid(SvmGrid::default()),
            &folds,
            &[0],
        )
        .unwrap();
        assert_eq!(r.mean, 100.0);
    }

    #[test]
    fn chance_level_with_constant_feature() {
        // every row identical: nearest neighbours tie, smallest class wins
        let values = vec![vec![1.0]; 40];
        let classes: Vec<usize> = (0..40).map(|i| i % 4).collect();
        let names = (0..4).map(|c| c.to_string()).collect();
        let m = FeatureMatrix::from_dense("t", values, classes, names).unwrap();
        let folds = stratified_kfold(&m, 10, 0, FoldGrouping::Utterance).unwrap();
        let r = cross_validate(&m, &ClassifierSpec::Knn { k: 5 }, &folds, &[0]).unwrap();
        assert!((r.mean - 25.0).abs() <= 2.0);
    }

    #[test]
    fn missing_column_rejected() {
        let mut m = two_clusters(20, 1, 2);
        m.present[1] = false;
        let folds = stratified_kfold(&m, 5, 0, FoldGrouping::Utterance).unwrap();
        assert!(matches!(
            cross_validate(&m, &ClassifierSpec::Knn { k: 1 }, &folds, &[0, 1]),
            Err(Error::MissingFeatureColumn(_))
        ));
    }

    #[test]
    fn test_rows_never_touch_the_standardizer() {
        let m = two_clusters(40, 2, 3);
        let folds = stratified_kfold(&m, 10, 0, FoldGrouping::Utterance).unwrap();
        for fold in &folds {
            let clean = fold_standardizer(&m, fold, &[0, 1, 2]).unwrap();
            let mut poisoned = m.clone();
            for &r in &fold.test {
                for v in &mut poisoned.rows[r].values {
                    *v += 1e6;
                }
            }
            assert_eq!(
                fold_standardizer(&poisoned, fold, &[0, 1, 2]).unwrap(),
                clean
            );
        }
    }

    #[test]
    fn k_selection() {
        let m = two_clusters(40, 1, 4);
        let folds = stratified_kfold(&m, 10, 0, FoldGrouping::Utterance).unwrap();
        assert_eq!(select_knn_k(&m, &folds, &[5]).unwrap(), 5);
        let cands = [1, 3, 5, 7];
        let k = select_knn_k(&m, &folds, &cands).unwrap();
        let all = m.present_indices();
        let best = cands
            .iter()
            .map(|&k| {
                cross_validate(&m, &ClassifierSpec::Knn { k }, &folds, &all)
                    .unwrap()
                    .mean
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let got = cross_validate(&m, &ClassifierSpec::Knn { k }, &folds, &all)
            .unwrap()
            .mean;
        assert_eq!(got, best);
        // perfectly separable: every k ties, the smallest wins
        assert_eq!(k, 1);
        assert!(select_knn_k(&m, &folds, &[2]).is_err());
    }

    #[test]
    fn knn_rates_match_cross_validate() {
        let m = two_clusters(30, 3, 5);
        let folds = stratified_kfold(&m, 5, 1, FoldGrouping::Utterance).unwrap();
        let subset = [1, 2, 3];
        let rates = knn_rates(&m, &folds, &subset, &[1, 3, 5]).unwrap();
        for (r, k) in rates.iter().zip([1, 3, 5]) {
            assert_eq!(
                r,
                &cross_validate(&m, &ClassifierSpec::Knn { k }, &folds, &subset).unwrap()
            );
        }
    }
}
