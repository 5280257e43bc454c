//! Generational GA over the same genome layout as harmony search.
//!
//! Size-2 tournament selection, single-point crossover, per-gene Gaussian
//! mutation (σ = 0.1 × dimension width, clamped into bounds; categorical
//! genes are redrawn uniformly) and an elite of one.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{rng_from_seed, score, Bounds, Dimension, Harmony, HsError, RunOutcome, Trace, TraceRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct GaParams {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub seed: u64,
}

impl GaParams {
    pub fn new(population: usize, generations: usize, seed: u64) -> Self {
        Self { population, generations, crossover_rate: 0.9, mutation_rate: 0.05, seed }
    }

    pub fn validate(&self) -> Result<(), HsError> {
        let bad = |name, requirement, value: f64| Err(HsError::InvalidParam { name, requirement, value });
        if self.population < 2 {
            return bad("population", "at least 2", self.population as f64);
        }
        if self.generations < 1 {
            return bad("generations", "at least 1", self.generations as f64);
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad("crossover_rate", "in [0, 1]", self.crossover_rate);
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad("mutation_rate", "in [0, 1]", self.mutation_rate);
        }
        Ok(())
    }
}

fn sort_best_first(pop: &mut [Harmony]) {
    pop.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
}

fn tournament<'a, R: Rng + ?Sized>(pop: &'a [Harmony], rng: &mut R) -> &'a Harmony {
    let a = &pop[rng.random_range(0..pop.len())];
    let b = &pop[rng.random_range(0..pop.len())];
    if b.fitness > a.fitness {
        b
    } else {
        a
    }
}

fn mutate<R: Rng + ?Sized>(genes: &mut [f64], bounds: &Bounds, rate: f64, rng: &mut R) {
    for (g, dim) in genes.iter_mut().zip(bounds.dims()) {
        if !(rng.random::<f64>() < rate) {
            continue;
        }
        match *dim {
            Dimension::Continuous { low, high } => {
                let noise = Normal::new(0.0, 0.1 * (high - low)).expect("positive width");
                *g = (*g + noise.sample(rng)).max(low).min(high);
            }
            Dimension::Categorical { .. } => *g = dim.sample(rng),
        }
    }
}

/// Runs the GA; the trace holds one record per generation.
pub fn run_ga_baseline<F>(bounds: &Bounds, params: &GaParams, mut cost: F) -> Result<RunOutcome, HsError>
where
    F: FnMut(&[f64]) -> f64,
{
    params.validate()?;
    let mut rng = rng_from_seed(params.seed);
    let mut pop: Vec<Harmony> = (0..params.population)
        .map(|_| {
            let genes = bounds.sample(&mut rng);
            let fitness = score(&mut cost, &genes);
            Harmony { genes, fitness }
        })
        .collect();
    sort_best_first(&mut pop);
    let initial_best = pop[0].fitness;
    let n = bounds.len();
    let mut records = Vec::with_capacity(params.generations);

    for generation in 1..=params.generations {
        let mut next = Vec::with_capacity(params.population);
        next.push(pop[0].clone());
        while next.len() < params.population {
            let mut genes = tournament(&pop, &mut rng).genes.clone();
            if n > 1 && rng.random::<f64>() < params.crossover_rate {
                let other = tournament(&pop, &mut rng);
                let cut = rng.random_range(1..n);
                genes[cut..].copy_from_slice(&other.genes[cut..]);
            }
            mutate(&mut genes, bounds, params.mutation_rate, &mut rng);
            let fitness = score(&mut cost, &genes);
            next.push(Harmony { genes, fitness });
        }
        sort_best_first(&mut next);
        pop = next;
        records.push(TraceRecord { iteration: generation, best_fitness: pop[0].fitness, hmcr: None, par: None });
    }

    Ok(RunOutcome { best: pop[0].clone(), trace: Trace { initial_best, records } })
}
