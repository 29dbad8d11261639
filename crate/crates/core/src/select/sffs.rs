use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::criterion::Criterion;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SffsParams {
    /// Largest subset size visited; `None` means 60% of the pool.
    pub max_size: Option<usize>,
    /// Stop after this many inclusions without improving the best score.
    pub patience: usize,
}

impl Default for SffsParams {
    fn default() -> Self {
        SffsParams {
            max_size: None,
            patience: 15,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SffsResult {
    /// Features of the best subset, in inclusion order.
    pub subset: Vec<usize>,
    pub score: f64,
    /// Best score found at each size (index 0 is size 1); `None` if unvisited.
    pub best_per_size: Vec<Option<f64>>,
    /// Every improvement of a per-size best, in search order: (size, score).
    pub trace: Vec<(usize, f64)>,
}

struct Search<'a> {
    criterion: &'a Criterion,
    best_score: Vec<f64>,
    best_set: Vec<Vec<usize>>,
    trace: Vec<(usize, f64)>,
}

impl Search<'_> {
    fn record(&mut self, set: &[usize], score: f64) -> bool {
        let k = set.len();
        if score > self.best_score[k] {
            self.best_score[k] = score;
            self.best_set[k] = set.to_vec();
            self.trace.push((k, score));
            true
        } else {
            false
        }
    }

    /// Best single-feature extension; ties go to the lowest feature index.
    fn best_addition(&self, current: &[usize], pool: &[usize]) -> Result<Option<(usize, f64)>> {
        let scored: Vec<(usize, f64)> = pool
            .par_iter()
            .filter(|f| !current.contains(f))
            .map(|&f| {
                let mut s = current.to_vec();
                s.push(f);
                self.criterion.score(&s).map(|v| (f, v))
            })
            .collect::<Result<_>>()?;
        Ok(scored
            .into_iter()
            .fold(None, |best: Option<(usize, f64)>, (f, v)| match best {
                Some((bf, bv)) if bv > v || (bv == v && bf < f) => Some((bf, bv)),
                _ => Some((f, v)),
            }))
    }

    /// Best single-feature removal; ties go to removing the lowest index.
    fn best_removal(&self, current: &[usize]) -> Result<(usize, f64)> {
        let scored: Vec<(usize, f64)> = current
            .par_iter()
            .map(|&f| {
                let s: Vec<usize> = current.iter().copied().filter(|&g| g != f).collect();
                self.criterion.score(&s).map(|v| (f, v))
            })
            .collect::<Result<_>>()?;
        Ok(scored
            .into_iter()
            .fold((usize::MAX, f64::NEG_INFINITY), |(bf, bv), (f, v)| {
                if v > bv || (v == bv && f < bf) {
                    (f, v)
                } else {
                    (bf, bv)
                }
            }))
    }
}

/// Sizes searched beyond `max_size`.
const LOOKAHEAD: usize = 2;

/// Sequential floating forward selection over `pool`.
pub fn sffs(criterion: &Criterion, pool: &[usize], params: &SffsParams) -> Result<SffsResult> {
    if pool.is_empty() {
        return Err(Error::EmptySubset);
    }
    let max_size = params
        .max_size
        .unwrap_or_else(|| ((pool.len() as f64 * 0.6).round() as usize).max(1))
        .clamp(1, pool.len());
    // Growing a little past the target lets exclusion steps come back down
    // to it along other paths.
    let horizon = (max_size + LOOKAHEAD).min(pool.len());
    let mut search = Search {
        criterion,
        best_score: vec![f64::NEG_INFINITY; horizon + 1],
        best_set: vec![Vec::new(); horizon + 1],
        trace: Vec::new(),
    };
    let mut current: Vec<usize> = Vec::new();
    let mut overall = f64::NEG_INFINITY;
    let mut stale = 0usize;
    // Each step strictly improves some per-size best, so this only guards
    // against pathological float behaviour.
    let step_limit = 50 * horizon * pool.len() + 100;

    for _ in 0..step_limit {
        if current.len() >= horizon || stale >= params.patience {
            break;
        }
        let Some((f, score)) = search.best_addition(&current, pool)? else {
            break;
        };
        current.push(f);
        let k = current.len();
        if !search.record(&current, score) && score < search.best_score[k] {
            current = search.best_set[k].clone();
        }

        // Conditional exclusion: drop features while that beats the best
        // subset known at the smaller size.
        while current.len() > 2 {
            let (g, s) = search.best_removal(&current)?;
            let smaller = current.len() - 1;
            if s > search.best_score[smaller] {
                current.retain(|&x| x != g);
                search.record(&current, s);
            } else {
                break;
            }
        }

        let best_now = search.best_score[..=max_size]
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        if best_now > overall {
            overall = best_now;
            stale = 0;
        } else {
            stale += 1;
        }
    }

    let mut best_k = 1;
    for k in 1..=max_size {
        if search.best_score[k] > search.best_score[best_k] {
            best_k = k;
        }
    }
    Ok(SffsResult {
        subset: search.best_set[best_k].clone(),
        score: search.best_score[best_k],
        best_per_size: search.best_score[1..=max_size]
            .iter()
            .map(|&s| (s > f64::NEG_INFINITY).then_some(s))
            .collect(),
        trace: search.trace,
    })
}
