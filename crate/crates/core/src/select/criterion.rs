use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use crate::classify::cv::score_predictions;
use crate::classify::knn::{nearest_in_row, vote};
use crate::classify::RecognitionRate;
use crate::corpusio::{FeatureMatrix, Fold, Standardizer};
use crate::error::{Error, Result};

/// One fold, standardized on its training rows, stored column-major so a
/// subset's distances accumulate one feature at a time.
struct FoldColumns {
    train_cols: Vec<Vec<f64>>,
    test_cols: Vec<Vec<f64>>,
    train_y: Vec<usize>,
    test_rows: Vec<usize>,
    /// Per feature, squared test-train differences laid out like the
    /// distance block; empty when over [`SQUARED_BUDGET`].
    squared: Vec<Vec<f64>>,
}

/// Largest number of cached squared differences per criterion.
const SQUARED_BUDGET: usize = 1 << 22;

/// KNN cross-validation score of feature subsets on one (corpus,
/// alignment), with fixed folds and k and a shared memo table.
pub struct Criterion {
    matrix: Arc<FeatureMatrix>,
    folds: Vec<FoldColumns>,
    k: usize,
    cache: Mutex<HashMap<Vec<usize>, RecognitionRate>>,
    evaluations: AtomicUsize,
}

impl Criterion {
    pub fn new(matrix: Arc<FeatureMatrix>, folds: &[Fold], k: usize) -> Result<Self> {
        let present = matrix.present.clone();
        let width = matrix.width();
        let mut fold_cols = Vec::with_capacity(folds.len());
        for fold in folds {
            let std =
                Standardizer::fit(fold.train.iter().map(|&r| matrix.rows[r].values.as_slice()))?;
            let column = |rows: &[usize], c: usize| -> Vec<f64> {
                if !present[c] {
                    return Vec::new();
                }
                rows.iter()
                    .map(|&r| std.transform_value(c, matrix.rows[r].values[c]))
                    .collect()
            };
            fold_cols.push(FoldColumns {
                train_cols: (0..width).map(|c| column(&fold.train, c)).collect(),
                test_cols: (0..width).map(|c| column(&fold.test, c)).collect(),
                train_y: fold.train.iter().map(|&r| matrix.rows[r].class).collect(),
                test_rows: fold.test.clone(),
                squared: Vec::new(),
            });
        }
        let cached: usize = fold_cols
            .iter()
            .map(|f| f.train_y.len() * f.test_rows.len() * present.iter().filter(|&&p| p).count())
            .sum();
        if cached <= SQUARED_BUDGET {
            for f in &mut fold_cols {
                f.squared = (0..width)
                    .map(|c| {
                        f.test_cols[c]
                            .iter()
                            .flat_map(|&x| f.train_cols[c].iter().map(move |&y| (x - y) * (x - y)))
                            .collect()
                    })
                    .collect();
            }
        }
        if k == 0 || fold_cols.iter().any(|f| f.train_y.len() < k) {
            return Err(Error::InvalidParameter(format!(
                "k = {k} exceeds a training fold"
            )));
        }
        Ok(Criterion {
            matrix,
            folds: fold_cols,
            k,
            cache: Mutex::new(HashMap::new()),
            evaluations: AtomicUsize::new(0),
        })
    }

    pub fn matrix(&self) -> &FeatureMatrix {
        &self.matrix
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_count(&self) -> usize {
        self.folds.len()
    }

    /// Distinct subsets actually evaluated (cache misses).
    pub fn evaluations(&self) -> usize {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// Mean recognition rate of `subset`; the empty subset scores 0.
    pub fn score(&self, subset: &[usize]) -> Result<f64> {
        if subset.is_empty() {
            return Ok(0.0);
        }
        self.rate(subset).map(|r| r.mean)
    }

    pub fn rate(&self, subset: &[usize]) -> Result<RecognitionRate> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut key = subset.to_vec();
        key.sort_unstable();
        key.dedup();
        if let Some(r) = self.cache.lock().expect("criterion cache").get(&key) {
            return Ok(r.clone());
        }
        self.matrix.check_subset(&key)?;
        let rate = self.compute(&key)?;
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        self.cache
            .lock()
            .expect("criterion cache")
            .insert(key, rate.clone());
        Ok(rate)
    }

    fn compute(&self, subset: &[usize]) -> Result<RecognitionRate> {
        let classes = self.matrix.class_count();
        let mut per_fold = Vec::with_capacity(self.folds.len());
        let mut dist = Vec::new();
        let mut neighbours = Vec::with_capacity(self.k);
        let mut scratch = Vec::new();
        for fold in &self.folds {
            let n_train = fold.train_y.len();
            let n_test = fold.test_rows.len();
            dist.clear();
            dist.resize(n_train * n_test, 0.0);
            if fold.squared.is_empty() {
                for &c in subset {
                    let train = &fold.train_cols[c][..n_train];
                    for (t, &x) in fold.test_cols[c].iter().enumerate() {
                        let row = &mut dist[t * n_train..(t + 1) * n_train];
                        for j in 0..n_train {
                            let diff = x - train[j];
                            row[j] += diff * diff;
                        }
                    }
                }
            } else {
                dist.copy_from_slice(&fold.squared[subset[0]]);
                for &c in &subset[1..] {
                    for (d, &q) in dist.iter_mut().zip(&fold.squared[c]) {
                        *d += q;
                    }
                }
            }
            let preds: Vec<(usize, f64)> = (0..n_test)
                .map(|t| {
                    let row = &dist[t * n_train..(t + 1) * n_train];
                    nearest_in_row(row, self.k, &mut scratch, &mut neighbours);
                    vote(&neighbours, &fold.train_y, classes)
                })
                .collect();
            per_fold.push(score_predictions(&self.matrix, &fold.test_rows, &preds)?);
        }
        Ok(RecognitionRate::from_folds(per_fold))
    }
}
