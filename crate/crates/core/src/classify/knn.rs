use crate::error::{Error, Result};

pub const DEFAULT_K_CANDIDATES: [usize; 8] = [1, 3, 5, 7, 9, 11, 13, 15];

/// Euclidean k-nearest-neighbour classifier over already standardized rows.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub k: usize,
    pub class_count: usize,
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The `k` nearest of `(squared distance, row)` pairs in ascending order,
/// equal distances ordered by row index.
pub fn nearest(mut dist: Vec<(f64, usize)>, k: usize) -> Vec<(f64, usize)> {
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    let k = k.min(dist.len());
    if k == 0 {
        return Vec::new();
    }
    if k < dist.len() {
        dist.select_nth_unstable_by(k - 1, cmp);
        dist.truncate(k);
    }
    dist.sort_unstable_by(cmp);
    dist
}

/// Value of rank `k` (0-based) among finite values, reordering `v`.
/// Branch-free three-way partitions keep it fast on short rows and
/// linear on constant ones.
pub fn kth_smallest(v: &mut [f64], mut k: usize) -> f64 {
    let mut s = v;
    loop {
        let n = s.len();
        if n <= 16 {
            s.sort_unstable_by(f64::total_cmp);
            return s[k];
        }
        let (a, b, c) = (s[0], s[n / 2], s[n - 1]);
        let p = a.max(b).min(a.min(b).max(c));
        let mut lt = 0;
        for i in 0..n {
            let x = s[i];
            s[i] = s[lt];
            s[lt] = x;
            lt += (x < p) as usize;
        }
        if k < lt {
            s = &mut s[..lt];
            continue;
        }
        let mut eq = lt;
        for i in lt..n {
            let x = s[i];
            s[i] = s[eq];
            s[eq] = x;
            eq += (x == p) as usize;
        }
        if k < eq {
            return p;
        } else {
            k -= eq;
            s = &mut s[eq..];
        }
    }
}

/// The same neighbours as [`nearest`] over a row of distances indexed by
/// training row, but in row order; reuses `scratch` and `out`.
pub fn nearest_in_row(row: &[f64], k: usize, scratch: &mut Vec<f64>, out: &mut Vec<(f64, usize)>) {
    out.clear();
    let k = k.min(row.len());
    if k == 0 {
        return;
    }
    scratch.clear();
    scratch.extend_from_slice(row);
    let kth = kth_smallest(scratch, k - 1);
    let mut ties = k - row.iter().filter(|&&d| d < kth).count();
    for (j, &d) in row.iter().enumerate() {
        if d < kth {
            out.push((d, j));
        } else if d == kth && ties > 0 {
            ties -= 1;
            out.push((d, j));
        }
    }
}

/// Puts neighbours in row order, the order [`vote`] sums distances in.
pub fn by_row(mut neighbours: Vec<(f64, usize)>) -> Vec<(f64, usize)> {
    neighbours.sort_unstable_by_key(|n| n.1);
    neighbours
}

/// Majority label among neighbours given in row order; tied labels go to
/// the smallest class id. The score is the negative mean distance of the
/// winning neighbours.
pub fn vote(neighbours: &[(f64, usize)], labels: &[usize], class_count: usize) -> (usize, f64) {
    let mut stack = [0usize; 16];
    let mut heap = Vec::new();
    let counts: &mut [usize] = if class_count <= stack.len() {
        &mut stack[..class_count]
    } else {
        heap.resize(class_count, 0);
        &mut heap
    };
    for &(_, r) in neighbours {
        counts[labels[r]] += 1;
    }
    let mut best = 0;
    for c in 1..class_count {
        if counts[c] > counts[best] {
            best = c;
        }
    }
    let dist: f64 = neighbours
        .iter()
        .filter(|&&(_, r)| labels[r] == best)
        .fold(0.0, |acc, &(d, _)| acc + d.sqrt());
    (best, -dist / counts[best].max(1) as f64)
}

impl KnnModel {
    pub fn fit(
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        k: usize,
        class_count: usize,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if k == 0 || k > rows.len() {
            return Err(Error::InvalidParameter(format!(
                "k = {k} must lie in 1..={}",
                rows.len()
            )));
        }
        Ok(KnnModel {
            rows,
            labels,
            k,
            class_count,
        })
    }

    fn check(&self, query: &[f64]) -> Result<()> {
        let w = self.rows[0].len();
        if query.len() != w {
            return Err(Error::DimensionMismatch {
                expected: w,
                found: query.len(),
            });
        }
        Ok(())
    }

    pub fn neighbours(&self, query: &[f64]) -> Vec<(f64, usize)> {
        let dist = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (squared_distance(r, query), i))
            .collect();
        nearest(dist, self.k)
    }

    pub fn predict_scored(&self, query: &[f64]) -> Result<(usize, f64)> {
        self.check(query)?;
        Ok(vote(
            &by_row(self.neighbours(query)),
            &self.labels,
            self.class_count,
        ))
    }

    pub fn predict(&self, query: &[f64]) -> Result<usize> {
        self.predict_scored(query).map(|p| p.0)
    }
}

pub fn knn_predict(model: &KnnModel, query: &[f64]) -> Result<usize> {
    model.predict(query)
}
