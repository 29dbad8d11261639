use std::cmp::Ordering;

use crate::error::{Error, Result};

pub const SMO_TOLERANCE: f64 = 1e-3;
pub const SMO_MAX_PASSES: usize = 10_000;
const TAU: f64 = 1e-12;

/// Dense RBF Gram matrix over a fixed row set.
#[derive(Debug, Clone)]
pub struct Gram {
    n: usize,
    data: Vec<f64>,
}

impl Gram {
    /// Pairwise squared distances; turn into kernels with [`Gram::rbf`].
    pub fn squared_distances(rows: &[Vec<f64>]) -> Gram {
        let n = rows.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = super::knn::squared_distance(&rows[i], &rows[j]);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Gram { n, data }
    }

    pub fn rbf(&self, gamma: f64) -> Gram {
        Gram {
            n: self.n,
            data: self.data.iter().map(|d| (-gamma * d).exp()).collect(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    (-gamma * super::knn::squared_distance(a, b)).exp()
}

/// Binary machine separating `positive` (+1) from `negative` (-1).
#[derive(Debug, Clone, PartialEq)]
pub struct PairMachine {
    pub positive: usize,
    pub negative: usize,
    /// Indices into the model's training rows.
    pub support: Vec<usize>,
    pub alpha: Vec<f64>,
    /// +1 or -1 per support row.
    pub y: Vec<f64>,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub rows: Vec<Vec<f64>>,
    pub class_count: usize,
    pub gamma: f64,
    pub c: f64,
    pub machines: Vec<PairMachine>,
}

/// Dual solution of one binary problem over `idx` (indices into `gram`).
struct Solution {
    alpha: Vec<f64>,
    bias: f64,
}

/// SMO with maximal-violating-pair working set selection.
fn smo(gram: &Gram, idx: &[usize], y: &[f64], c: f64) -> Solution {
    let n = idx.len();
    let q = |s: usize, t: usize| y[s] * y[t] * gram.get(idx[s], idx[t]);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let max_iter = SMO_MAX_PASSES.saturating_mul(n.max(1));
    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    for _ in 0..max_iter {
        let mut i = usize::MAX;
        let mut g_max = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut g_min = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && v > g_max {
                g_max = v;
                i = t;
            }
            if in_low(alpha[t], y[t]) && v < g_min {
                g_min = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || g_max - g_min < SMO_TOLERANCE {
            break;
        }
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let qij = q(i, j);
        if y[i] != y[j] {
            let quad = (q(i, i) + q(j, j) + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (q(i, i) + q(j, j) - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q(i, t) * di + q(j, t) * dj;
        }
    }

    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum_free) = (0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    let rho = if free > 0 {
        sum_free / free as f64
    } else {
        (ub + lb) / 2.0
    };
    Solution { alpha, bias: -rho }
}

/// Trains one-vs-one machines over rows `idx` of a precomputed Gram
/// matrix. Support indices refer to Gram rows.
pub fn train_pairs(
    gram: &Gram,
    idx: &[usize],
    labels: &[usize],
    class_count: usize,
    c: f64,
) -> Vec<PairMachine> {
    let mut machines = Vec::new();
    for a in 0..class_count {
        for b in a + 1..class_count {
            let sub: Vec<usize> = (0..idx.len())
                .filter(|&t| labels[t] == a || labels[t] == b)
                .collect();
            let pos = sub.iter().any(|&t| labels[t] == a);
            let neg = sub.iter().any(|&t| labels[t] == b);
            if !pos || !neg {
                continue;
            }
            let rows: Vec<usize> = sub.iter().map(|&t| idx[t]).collect();
            let y: Vec<f64> = sub
                .iter()
                .map(|&t| if labels[t] == a { 1.0 } else { -1.0 })
                .collect();
            let sol = smo(gram, &rows, &y, c);
            let mut m = PairMachine {
                positive: a,
                negative: b,
                support: Vec::new(),
                alpha: Vec::new(),
                y: Vec::new(),
                bias: sol.bias,
            };
            for (t, &al) in sol.alpha.iter().enumerate() {
                if al > 0.0 {
                    m.support.push(rows[t]);
                    m.alpha.push(al);
                    m.y.push(y[t]);
                }
            }
            machines.push(m);
        }
    }
    machines
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// One-vs-one RBF SVM. Rows are put in a canonical order first so the
/// solution does not depend on the order they are given in.
pub fn svm_train(rows: &[Vec<f64>], labels: &[usize], c: f64, gamma: f64) -> Result<SvmModel> {
    if rows.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if !(c > 0.0 && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "SVM needs C > 0 and gamma > 0, got C = {c}, gamma = {gamma}"
        )));
    }
    let class_count = labels.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; class_count];
    for &l in labels {
        counts[l] += 1;
    }
    let live = counts.iter().filter(|&&n| n > 0).count();
    if live < 2 {
        return Err(Error::DegenerateClassCount(live));
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| lexicographic(&rows[a], &rows[b]).then(labels[a].cmp(&labels[b])));
    let rows: Vec<Vec<f64>> = order.iter().map(|&i| rows[i].clone()).collect();
    let labels: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
    let gram = Gram::squared_distances(&rows).rbf(gamma);
    let idx: Vec<usize> = (0..rows.len()).collect();
    let machines = train_pairs(&gram, &idx, &labels, class_count, c);
    Ok(SvmModel {
        rows,
        class_count,
        gamma,
        c,
        machines,
    })
}

impl PairMachine {
    /// Signed decision value given a kernel lookup for support rows.
    pub fn decision_with(&self, kernel: impl Fn(usize) -> f64) -> f64 {
        self.support
            .iter()
            .zip(&self.alpha)
            .zip(&self.y)
            .map(|((&s, a), y)| a * y * kernel(s))
            .sum::<f64>()
            + self.bias
    }
}

/// One-vs-one voting; tied classes go to the smallest id. The score is
/// the winner's vote lead over the runner-up.
pub fn pair_vote(
    machines: &[PairMachine],
    class_count: usize,
    decision: impl Fn(&PairMachine) -> f64,
) -> (usize, f64) {
    let mut votes = vec![0usize; class_count];
    for m in machines {
        if decision(m) > 0.0 {
            votes[m.positive] += 1;
        } else {
            votes[m.negative] += 1;
        }
    }
    let mut best = 0;
    for c in 1..class_count {
        if votes[c] > votes[best] {
            best = c;
        }
    }
    let runner_up = (0..class_count)
        .filter(|&c| c != best)
        .map(|c| votes[c])
        .max()
        .unwrap_or(0);
    (best, votes[best] as f64 - runner_up as f64)
}

impl SvmModel {
    pub fn decision(&self, machine: &PairMachine, query: &[f64]) -> f64 {
        machine.decision_with(|s| rbf(&self.rows[s], query, self.gamma))
    }

    pub fn predict_scored(&self, query: &[f64]) -> Result<(usize, f64)> {
        let w = self.rows[0].len();
        if query.len() != w {
            return Err(Error::DimensionMismatch {
                expected: w,
                found: query.len(),
            });
        }
        Ok(pair_vote(&self.machines, self.class_count, |m| {
            self.decision(m, query)
        }))
    }

    pub fn predict(&self, query: &[f64]) -> Result<usize> {
        self.predict_scored(query).map(|p| p.0)
    }
}

pub fn svm_predict(model: &SvmModel, query: &[f64]) -> Result<usize> {
    model.predict(query)
}
