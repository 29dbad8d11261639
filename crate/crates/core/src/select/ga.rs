use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::criterion::Criterion;
use crate::error::{Error, Result};
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaParams {
    pub runs: usize,
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Per-bit flip probability; `None` means 2 / pool size.
    pub mutation_rate: Option<f64>,
    pub tournament: usize,
    pub elitism: usize,
    /// Percentage points subtracted per unit of |subset| / pool size.
    pub size_penalty: f64,
    /// Minimum inclusion probability for the returned subset.
    pub threshold: f64,
    /// Probability that a bit is set in the initial population.
    pub init_density: f64,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            runs: 50,
            population: 50,
            generations: 40,
            crossover_rate: 0.8,
            mutation_rate: None,
            tournament: 3,
            elitism: 1,
            size_penalty: 0.1,
            threshold: 0.5,
            init_density: 0.5,
            seed: 0,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1], got {v}"
                )))
            }
        };
        unit("crossover_rate", self.crossover_rate)?;
        unit("init_density", self.init_density)?;
        if let Some(m) = self.mutation_rate {
            unit("mutation_rate", m)?;
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold must lie in (0, 1], got {}",
                self.threshold
            )));
        }
        if self.runs == 0
            || self.population < 2
            || self.tournament == 0
            || self.elitism > self.population
        {
            return Err(Error::InvalidParameter(
                "GA needs runs >= 1, population >= 2, tournament >= 1 and elitism <= population"
                    .into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaResult {
    /// Features at or above the threshold, in pool order.
    pub subset: Vec<usize>,
    /// Inclusion probability per pool position.
    pub probabilities: Vec<f64>,
    /// Best chromosome of each run, as pool features.
    pub run_best: Vec<Vec<usize>>,
}

fn decode(bits: &[bool], pool: &[usize]) -> Vec<usize> {
    bits.iter()
        .zip(pool)
        .filter(|(b, _)| **b)
        .map(|(_, &f)| f)
        .collect()
}

fn fitness(criterion: &Criterion, bits: &[bool], pool: &[usize], penalty: f64) -> Result<f64> {
    let subset = decode(bits, pool);
    if subset.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(criterion.score(&subset)? - penalty * subset.len() as f64 / pool.len() as f64)
}

/// One GA execution; returns the fittest chromosome seen.
fn run_once(
    criterion: &Criterion,
    pool: &[usize],
    params: &GaParams,
    seed: u64,
) -> Result<Vec<bool>> {
    let d = pool.len();
    let mutation = params.mutation_rate.unwrap_or((2.0 / d as f64).min(1.0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut population: Vec<Vec<bool>> = (0..params.population)
        .map(|_| {
            (0..d)
                .map(|_| rng.random_bool(params.init_density))
                .collect()
        })
        .collect();
    let mut scores: Vec<f64> = population
        .iter()
        .map(|c| fitness(criterion, c, pool, params.size_penalty))
        .collect::<Result<_>>()?;
    let mut best = (scores[0], population[0].clone());
    let track = |best: &mut (f64, Vec<bool>), pop: &[Vec<bool>], sc: &[f64]| {
        for (c, &s) in pop.iter().zip(sc) {
            if s > best.0 {
                *best = (s, c.clone());
            }
        }
    };
    track(&mut best, &population, &scores);

    for _ in 0..params.generations {
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        let mut next: Vec<Vec<bool>> = order[..params.elitism]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        let pick = |rng: &mut ChaCha8Rng| {
            let mut winner = rng.random_range(0..population.len());
            for _ in 1..params.tournament {
                let c = rng.random_range(0..population.len());
                if scores[c] > scores[winner] {
                    winner = c;
                }
            }
            winner
        };
        while next.len() < params.population {
            let (a, b) = (pick(&mut rng), pick(&mut rng));
            let mut child = if rng.random_bool(params.crossover_rate) {
                population[a]
                    .iter()
                    .zip(&population[b])
                    .map(|(&x, &y)| if rng.random_bool(0.5) { x } else { y })
                    .collect()
            } else {
                population[a].clone()
            };
            for bit in child.iter_mut() {
                if rng.random_bool(mutation) {
                    *bit = !*bit;
                }
            }
            next.push(child);
        }
        population = next;
        scores = population
            .iter()
            .map(|c| fitness(criterion, c, pool, params.size_penalty))
            .collect::<Result<_>>()?;
        track(&mut best, &population, &scores);
    }
    Ok(best.1)
}

/// Repeated GA runs; a feature is kept when it appears in the best
/// chromosome of at least `threshold` of the runs.
pub fn ga_select(criterion: &Criterion, pool: &[usize], params: &GaParams) -> Result<GaResult> {
    let result = ga_probabilities(criterion, pool, params)?;
    if result.subset.is_empty() {
        return Err(Error::EmptyResult {
            threshold: params.threshold,
        });
    }
    Ok(result)
}

/// Like [`ga_select`] but an empty thresholded subset is not an error.
pub fn ga_probabilities(
    criterion: &Criterion,
    pool: &[usize],
    params: &GaParams,
) -> Result<GaResult> {
    params.validate()?;
    if pool.is_empty() {
        return Err(Error::EmptySubset);
    }
    let bests: Vec<Vec<bool>> = (0..params.runs)
        .into_par_iter()
        .map(|r| {
            run_once(
                criterion,
                pool,
                params,
                derive_seed(params.seed, &format!("ga-run-{r}")),
            )
        })
        .collect::<Result<_>>()?;
    let probabilities: Vec<f64> = (0..pool.len())
        .map(|i| bests.iter().filter(|b| b[i]).count() as f64 / params.runs as f64)
        .collect();
    let subset: Vec<usize> = pool
        .iter()
        .zip(&probabilities)
        .filter(|(_, &p)| p >= params.threshold)
        .map(|(&f, _)| f)
        .collect();
    Ok(GaResult {
        subset,
        probabilities,
        run_best: bests.iter().map(|b| decode(b, pool)).collect(),
    })
}
