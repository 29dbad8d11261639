use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpusio::FeatureMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostParams {
    /// Rounds per binary problem.
    pub rounds: usize,
    /// A stump must have weighted error below 0.5 minus this margin.
    pub margin: f64,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams {
            rounds: 10,
            margin: 1e-3,
        }
    }
}

/// Single-feature threshold rule: predicts +1 when `polarity * (x - threshold) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub polarity: f64,
    pub error: f64,
}

impl Stump {
    pub fn predict(&self, x: f64) -> f64 {
        if self.polarity * (x - self.threshold) > 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostRound {
    pub stump: Stump,
    pub alpha: f64,
    /// Product of 2 sqrt(e (1 - e)) so far: the exponential-loss bound on
    /// training error.
    pub loss_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostResult {
    /// Distinct stump features ordered by first use.
    pub subset: Vec<usize>,
    /// Rounds of each binary problem (one per class, or one for two classes).
    pub problems: Vec<Vec<BoostRound>>,
    /// Set when some problem stopped because no stump beat the margin.
    pub weak_learner_failure: bool,
}

/// Lowest weighted-error stump over the pool; ties go to the earlier pool
/// feature, then the lower threshold.
fn best_stump(columns: &[(usize, Vec<(f64, usize)>)], y: &[f64], w: &[f64]) -> Option<Stump> {
    let total_pos: f64 = y
        .iter()
        .zip(w)
        .filter(|(l, _)| **l > 0.0)
        .map(|(_, w)| w)
        .sum();
    let total: f64 = w.iter().sum();
    columns
        .par_iter()
        .map(|(feature, sorted)| {
            // Threshold below all values: polarity +1 predicts all +1.
            let mut best: Option<Stump> = None;
            let mut consider = |threshold: f64, pos_below: f64, below: f64| {
                // polarity +1: predict +1 above threshold
                let err_up = pos_below + ((total - below) - (total_pos - pos_below));
                let err_down = total - err_up;
                for (err, polarity) in [(err_up, 1.0), (err_down, -1.0)] {
                    if best.is_none_or(|b| err < b.error - 1e-15) {
                        best = Some(Stump {
                            feature: *feature,
                            threshold,
                            polarity,
                            error: err.max(0.0),
                        });
                    }
                }
            };
            let first = sorted[0].0;
            consider(first - 1.0, 0.0, 0.0);
            let mut pos_below = 0.0;
            let mut below = 0.0;
            for i in 0..sorted.len() {
                let (v, r) = sorted[i];
                below += w[r];
                if y[r] > 0.0 {
                    pos_below += w[r];
                }
                if i + 1 < sorted.len() && sorted[i + 1].0 == v {
                    continue;
                }
                let threshold = if i + 1 < sorted.len() {
                    0.5 * (v + sorted[i + 1].0)
                } else {
                    v + 1.0
                };
                consider(threshold, pos_below, below);
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<Stump>, s| match acc {
            Some(a) if a.error <= s.error + 1e-15 => Some(a),
            _ => Some(s),
        })
}

fn adaboost(
    columns: &[(usize, Vec<(f64, usize)>)],
    values: &dyn Fn(usize, usize) -> f64,
    y: &[f64],
    params: &BoostParams,
) -> (Vec<BoostRound>, bool) {
    let n = y.len();
    let mut w = vec![1.0 / n as f64; n];
    let mut rounds = Vec::new();
    let mut bound = 1.0;
    for _ in 0..params.rounds {
        let Some(stump) = best_stump(columns, y, &w) else {
            break;
        };
        if stump.error >= 0.5 - params.margin {
            return (rounds, true);
        }
        let e = stump.error;
        if e <= 0.0 {
            rounds.push(BoostRound {
                stump,
                alpha: f64::INFINITY,
                loss_bound: 0.0,
            });
            break;
        }
        let alpha = 0.5 * ((1.0 - e) / e).ln();
        bound *= 2.0 * (e * (1.0 - e)).sqrt();
        let mut z = 0.0;
        for r in 0..n {
            w[r] *= (-alpha * y[r] * stump.predict(values(r, stump.feature))).exp();
            z += w[r];
        }
        for x in &mut w {
            *x /= z;
        }
        rounds.push(BoostRound {
            stump,
            alpha,
            loss_bound: bound,
        });
    }
    (rounds, false)
}

/// Discrete AdaBoost with decision stumps; two-class matrices form one
/// problem, otherwise one-vs-rest per class. The subset collects stump
/// features round by round.
pub fn boost_select(
    matrix: &FeatureMatrix,
    pool: &[usize],
    params: &BoostParams,
) -> Result<BoostResult> {
    if params.rounds == 0 {
        return Err(Error::InvalidParameter(
            "boosting needs at least one round".into(),
        ));
    }
    matrix.check_subset(pool)?;
    if pool.is_empty() || matrix.is_empty() {
        return Err(Error::EmptySubset);
    }
    let columns: Vec<(usize, Vec<(f64, usize)>)> = pool
        .iter()
        .map(|&f| {
            let mut col: Vec<(f64, usize)> = matrix
                .rows
                .iter()
                .enumerate()
                .map(|(r, row)| (row.values[f], r))
                .collect();
            col.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            (f, col)
        })
        .collect();
    let values = |r: usize, f: usize| matrix.rows[r].values[f];
    let live: Vec<usize> = {
        let h = matrix.class_histogram();
        (0..h.len()).filter(|&c| h[c] > 0).collect()
    };
    if live.len() < 2 {
        return Err(Error::DegenerateClassCount(live.len()));
    }
    let targets: Vec<usize> = if live.len() == 2 { vec![live[0]] } else { live };
    let mut problems = Vec::new();
    let mut failure = false;
    for &class in &targets {
        let y: Vec<f64> = matrix
            .rows
            .iter()
            .map(|r| if r.class == class { 1.0 } else { -1.0 })
            .collect();
        let (rounds, failed) = adaboost(&columns, &values, &y, params);
        failure |= failed;
        problems.push(rounds);
    }
    let mut subset = Vec::new();
    let longest = problems.iter().map(Vec::len).max().unwrap_or(0);
    for round in 0..longest {
        for p in &problems {
            if let Some(r) = p.get(round) {
                if !subset.contains(&r.stump.feature) {
                    subset.push(r.stump.feature);
                }
            }
        }
    }
    if subset.is_empty() {
        return Err(Error::EmptyResult {
            threshold: 0.5 - params.margin,
        });
    }
    Ok(BoostResult {
        subset,
        problems,
        weak_learner_failure: failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::select::criterion::tests::noisy;

    #[test]
    fn separable_feature_wins_round_one() {
        let values: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                vec![
                    (i % 3) as f64,
                    (i % 2) as f64 * 4.0 - 2.0,
                    (i * 7 % 5) as f64,
                ]
            })
            .collect();
        let classes: Vec<usize> = (0..20).map(|i| i % 2).collect();
        let m =
            FeatureMatrix::from_dense("t", values, classes, vec!["a".into(), "b".into()]).unwrap();
        let r = boost_select(&m, &[0, 1, 2], &BoostParams::default()).unwrap();
        assert_eq!(r.subset, vec![1]);
        assert_eq!(r.problems[0][0].stump.error, 0.0);
        assert_eq!(r.problems[0].len(), 1);
    }

    #[test]
    fn subset_bounded_by_rounds_and_bound_decreases() {
        let m = noisy(80, 12, 3, 4);
        let pool: Vec<usize> = (0..12).collect();
        let params = BoostParams {
            rounds: 6,
            ..Default::default()
        };
        let r = boost_select(&m, &pool, &params).unwrap();
        assert!(r.subset.len() <= 6);
        for p in &r.problems {
            for w in p.windows(2) {
                assert!(w[1].loss_bound <= w[0].loss_bound);
            }
        }
    }

    #[test]
    fn multiclass_one_vs_rest() {
        let values: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![(i % 3) as f64, ((i * 13) % 7) as f64])
            .collect();
        let classes: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let names = (0..3).map(|c| c.to_string()).collect();
        let m = FeatureMatrix::from_dense("t", values, classes, names).unwrap();
        let r = boost_select(&m, &[0, 1], &BoostParams::default()).unwrap();
        assert_eq!(r.problems.len(), 3);
        assert_eq!(r.subset[0], 0);
    }
}
