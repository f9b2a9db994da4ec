//! Population-level NEAT: speciation, explicit fitness sharing, stagnation,
//! offspring allocation, reproduction and the generation loop.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::activation::Dictionary;
use crate::error::{Error, Result};
use crate::genome::{compatibility_distance, crossover, mutate, CppnGenome, MutationParams};
use crate::innovation::InnovationRegistry;
use crate::pool::WorkerPool;
use crate::record::{GenerationStats, RunRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub population_size: usize,
    pub generations: usize,
    pub compatibility_threshold: f64,
    pub excess_coefficient: f64,
    pub disjoint_coefficient: f64,
    pub weight_coefficient: f64,
    pub max_stagnation: usize,
    pub survival_threshold: f64,
    /// Species champions are copied unchanged when the species is larger
    /// than this.
    pub elitism_min_size: usize,
    pub mutation: MutationParams,
    pub dictionary: Dictionary,
    pub n_inputs: usize,
    pub n_outputs: usize,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        EvolutionParams {
            population_size: 50,
            generations: 200,
            compatibility_threshold: 3.0,
            excess_coefficient: 1.0,
            disjoint_coefficient: 1.0,
            weight_coefficient: 0.5,
            max_stagnation: 25,
            survival_threshold: 0.2,
            elitism_min_size: 4,
            mutation: MutationParams::default(),
            dictionary: Dictionary::Full,
            n_inputs: 4,
            n_outputs: 1,
        }
    }
}

impl EvolutionParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 {
            return Err(Error::Config("population_size must be positive".into()));
        }
        if self.generations == 0 {
            return Err(Error::Config("generations must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.survival_threshold) {
            return Err(Error::Config("survival_threshold outside [0, 1]".into()));
        }
        if self.n_inputs == 0 || self.n_outputs == 0 {
            return Err(Error::Config("genomes need inputs and outputs".into()));
        }
        self.mutation.validate()
    }

    pub fn distance(&self, a: &CppnGenome, b: &CppnGenome) -> f64 {
        compatibility_distance(
            a,
            b,
            self.excess_coefficient,
            self.disjoint_coefficient,
            self.weight_coefficient,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub id: u64,
    pub representative: CppnGenome,
    /// Indices into the current population.
    pub members: Vec<usize>,
    pub staleness: usize,
    pub best_fitness: f64,
}

/// Assigns each genome to the first species whose representative is within
/// the compatibility threshold; unmatched genomes found new species.
/// Species left without members are dropped.
pub fn speciate(
    population: &[CppnGenome],
    previous: &[Species],
    params: &EvolutionParams,
    next_id: &mut u64,
) -> Vec<Species> {
    let mut species: Vec<Species> = previous
        .iter()
        .map(|s| Species {
            members: Vec::new(),
            ..s.clone()
        })
        .collect();
    for (i, g) in population.iter().enumerate() {
        let home = species
            .iter()
            .position(|s| params.distance(&s.representative, g) < params.compatibility_threshold);
        match home {
            Some(k) => species[k].members.push(i),
            None => {
                species.push(Species {
                    id: *next_id,
                    representative: g.clone(),
                    members: vec![i],
                    staleness: 0,
                    best_fitness: f64::NEG_INFINITY,
                });
                *next_id += 1;
            }
        }
    }
    species.retain(|s| !s.members.is_empty());
    species
}

/// Explicit fitness sharing: each member's fitness divided by species size.
pub fn shared_fitness(species: &Species, fitness: &[f64]) -> Vec<f64> {
    let n = species.members.len() as f64;
    species.members.iter().map(|&i| fitness[i] / n).collect()
}

/// Inputs to offspring allocation for one species.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesShare {
    pub id: u64,
    pub adjusted_sum: f64,
    pub staleness: usize,
    pub has_best: bool,
}

/// Offspring per species, proportional to summed adjusted fitness and
/// rounded by largest remainder (ties to the lower species id).
///
/// Species stale for `max_stagnation` generations get nothing unless they
/// hold the population best; that species always gets at least one slot.
pub fn allocate_offspring(shares: &[SpeciesShare], population_size: usize, max_stagnation: usize) -> Vec<usize> {
    let n = shares.len();
    if n == 0 {
        return Vec::new();
    }
    let mut eligible: Vec<bool> = shares
        .iter()
        .map(|s| s.staleness < max_stagnation || s.has_best)
        .collect();
    if !eligible.iter().any(|&e| e) {
        // total stagnation: revive the best species
        let best = (0..n)
            .max_by(|&a, &b| {
                shares[a]
                    .adjusted_sum
                    .total_cmp(&shares[b].adjusted_sum)
                    .then(shares[b].id.cmp(&shares[a].id))
            })
            .expect("non-empty");
        eligible[best] = true;
    }
    let raw: Vec<f64> = shares
        .iter()
        .zip(&eligible)
        .map(|(s, &e)| if e && s.adjusted_sum.is_finite() { s.adjusted_sum } else { 0.0 })
        .collect();
    let floor = raw
        .iter()
        .zip(&eligible)
        .filter(|(_, &e)| e)
        .map(|(&w, _)| w)
        .fold(f64::INFINITY, f64::min);
    let mut weights: Vec<f64> = raw
        .iter()
        .zip(&eligible)
        .map(|(&w, &e)| {
            if !e {
                0.0
            } else if floor < 0.0 {
                w - floor
            } else {
                w
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        for (w, &e) in weights.iter_mut().zip(&eligible) {
            *w = if e { 1.0 } else { 0.0 };
        }
    }
    let total: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights
        .iter()
        .map(|w| w / total * population_size as f64)
        .collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..n).filter(|&i| eligible[i]).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa).then(shares[a].id.cmp(&shares[b].id))
    });
    for &i in order.iter().cycle().take(population_size.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    if let Some(b) = shares.iter().position(|s| s.has_best) {
        if counts[b] == 0 && population_size > 0 {
            let donor = (0..n)
                .max_by(|&x, &y| counts[x].cmp(&counts[y]).then(shares[y].id.cmp(&shares[x].id)))
                .expect("non-empty");
            counts[donor] -= 1;
            counts[b] += 1;
        }
    }
    counts
}

/// Offspring of one species. `members` must be sorted best-first and carry
/// fitness. Only the top `survival_threshold` fraction (at least one) are
/// parents. When `elite` is set the first offspring is the unmodified
/// champion.
pub fn reproduce<R: Rng + ?Sized>(
    members: &[&CppnGenome],
    n_offspring: usize,
    elite: bool,
    params: &EvolutionParams,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> Vec<CppnGenome> {
    if n_offspring == 0 || members.is_empty() {
        return Vec::new();
    }
    let pool = parent_pool_size(members.len(), params.survival_threshold);
    let parents = &members[..pool];
    let mut out = Vec::with_capacity(n_offspring);
    if elite {
        out.push(members[0].clone());
    }
    while out.len() < n_offspring {
        let a = *parents.choose(rng).expect("non-empty");
        let b = *parents.choose(rng).expect("non-empty");
        let child = if std::ptr::eq(a, b) {
            a.clone()
        } else {
            crossover(a, b, rng)
        };
        out.push(mutate(&child, &params.mutation, params.dictionary, registry, rng));
    }
    out
}

pub fn parent_pool_size(n_members: usize, survival_threshold: f64) -> usize {
    ((n_members as f64 * survival_threshold).ceil() as usize).clamp(1, n_members.max(1))
}

fn sanitize(f: f64) -> f64 {
    if f.is_nan() {
        f64::NEG_INFINITY
    } else {
        f
    }
}

/// Runs NEAT from a minimal population. `evaluator` errors give the genome
/// a fitness of negative infinity. Genomes that already carry a fitness
/// (unchanged elites) are not re-evaluated.
pub fn evolve<F>(evaluator: F, params: &EvolutionParams, seed: u64, pool: &WorkerPool) -> Result<RunRecord<CppnGenome>>
where
    F: Fn(&CppnGenome) -> Result<f64> + Sync + Send,
{
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut registry = InnovationRegistry::new(params.n_inputs, params.n_outputs);
    let mut population: Vec<CppnGenome> = (0..params.population_size)
        .map(|_| {
            CppnGenome::minimal(
                params.n_inputs,
                params.n_outputs,
                params.dictionary,
                params.mutation.init_weight_range,
                &mut rng,
            )
        })
        .collect();
    let mut species: Vec<Species> = Vec::new();
    let mut next_species = 0u64;
    let mut rows = Vec::with_capacity(params.generations);
    let mut champion: Option<CppnGenome> = None;
    let mut best_so_far = f64::NEG_INFINITY;

    for generation in 0..params.generations {
        let pending: Vec<usize> = (0..population.len())
            .filter(|&i| population[i].fitness.is_none())
            .collect();
        let scores = pool.map(&pending, |&i| {
            evaluator(&population[i]).map(sanitize).unwrap_or(f64::NEG_INFINITY)
        });
        for (&i, s) in pending.iter().zip(scores) {
            population[i].fitness = Some(s);
        }
        let fitness: Vec<f64> = population.iter().map(|g| g.fitness.expect("evaluated")).collect();

        species = speciate(&population, &species, params, &mut next_species);
        for s in &mut species {
            let best = s.members.iter().map(|&i| fitness[i]).fold(f64::NEG_INFINITY, f64::max);
            if best > s.best_fitness {
                s.best_fitness = best;
                s.staleness = 0;
            } else {
                s.staleness += 1;
            }
        }

        let best_idx = best_index(&fitness);
        let best = &population[best_idx];
        if fitness[best_idx] > best_so_far || champion.is_none() {
            best_so_far = fitness[best_idx];
            champion = Some(best.clone());
        }
        rows.push(GenerationStats {
            generation,
            best_fitness: fitness[best_idx],
            mean_fitness: fitness.iter().sum::<f64>() / fitness.len() as f64,
            n_species: species.len(),
            best_connections: best.enabled_connection_count(),
            best_hidden_nodes: best.hidden_count(),
            best_so_far,
        });
        if generation + 1 == params.generations {
            break;
        }

        registry.new_generation();
        population = next_generation(&population, &fitness, &mut species, best_idx, params, &mut registry, &mut rng);
        debug_assert_eq!(population.len(), params.population_size);
    }

    let champion = champion.expect("at least one generation");
    Ok(RunRecord {
        seed,
        champion_fitness: champion.fitness.unwrap_or(f64::NEG_INFINITY),
        champion,
        generations: rows,
    })
}

fn best_index(fitness: &[f64]) -> usize {
    let mut best = 0;
    for (i, &f) in fitness.iter().enumerate() {
        if f > fitness[best] {
            best = i;
        }
    }
    best
}

fn next_generation<R: Rng>(
    population: &[CppnGenome],
    fitness: &[f64],
    species: &mut Vec<Species>,
    best_idx: usize,
    params: &EvolutionParams,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> Vec<CppnGenome> {
    let finite_min = fitness
        .iter()
        .copied()
        .filter(|f| f.is_finite())
        .fold(f64::INFINITY, f64::min);
    let floor = if finite_min.is_finite() { finite_min.min(0.0) } else { 0.0 };
    let clean: Vec<f64> = fitness.iter().map(|&f| if f.is_finite() { f } else { floor }).collect();

    let shares: Vec<SpeciesShare> = species
        .iter()
        .map(|s| SpeciesShare {
            id: s.id,
            adjusted_sum: shared_fitness(s, &clean).iter().sum(),
            staleness: s.staleness,
            has_best: s.members.contains(&best_idx),
        })
        .collect();
    let counts = allocate_offspring(&shares, params.population_size, params.max_stagnation);

    let mut next = Vec::with_capacity(params.population_size);
    for (s, &n) in species.iter().zip(&counts) {
        let mut members: Vec<usize> = s.members.clone();
        // stable: ties keep population order
        members.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]));
        let refs: Vec<&CppnGenome> = members.iter().map(|&i| &population[i]).collect();
        let elite = members.len() > params.elitism_min_size || s.members.contains(&best_idx);
        next.extend(reproduce(&refs, n, elite, params, registry, rng));
    }
    // representatives for the next round come from this generation
    for s in species.iter_mut() {
        let pick = *s.members.choose(rng).expect("species are non-empty");
        s.representative = population[pick].clone();
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::Activation;

    fn share(id: u64, sum: f64) -> SpeciesShare {
        SpeciesShare {
            id,
            adjusted_sum: sum,
            staleness: 0,
            has_best: false,
        }
    }

    #[test]
    fn shared_fitness_divides_by_size() {
        let g = CppnGenome::minimal_with(4, 1, Activation::Identity, 1.0);
        let s = Species {
            id: 0,
            representative: g.clone(),
            members: vec![0],
            staleness: 0,
            best_fitness: 0.0,
        };
        assert_eq!(shared_fitness(&s, &[4.0]), vec![4.0]);
        let s5 = Species {
            members: (0..5).collect(),
            ..s
        };
        assert_eq!(shared_fitness(&s5, &[10.0; 5]), vec![2.0; 5]);
    }

    #[test]
    fn single_species_gets_everything() {
        assert_eq!(allocate_offspring(&[share(0, 1.0)], 50, 25), vec![50]);
    }

    #[test]
    fn three_to_one_split() {
        let c = allocate_offspring(&[share(0, 3.0), share(1, 1.0)], 50, 25);
        assert_eq!(c, vec![38, 12]);
        let c = allocate_offspring(&[share(0, 3.0), share(1, 1.0)], 20, 25);
        assert_eq!(c, vec![15, 5]);
    }

    #[test]
    fn stale_species_without_best_gets_nothing() {
        let mut stale = share(1, 5.0);
        stale.staleness = 25;
        let mut best = share(0, 1.0);
        best.has_best = true;
        assert_eq!(allocate_offspring(&[best, stale], 10, 25), vec![10, 0]);
    }

    #[test]
    fn best_species_always_gets_a_slot() {
        let mut tiny = share(3, 0.0);
        tiny.has_best = true;
        let c = allocate_offspring(&[share(0, 100.0), tiny], 10, 25);
        assert_eq!(c, vec![9, 1]);
    }

    #[test]
    fn parent_pool() {
        assert_eq!(parent_pool_size(10, 0.2), 2);
        assert_eq!(parent_pool_size(1, 0.2), 1);
        assert_eq!(parent_pool_size(3, 0.2), 1);
    }

    #[test]
    fn zero_offspring_is_empty() {
        let g = CppnGenome::minimal_with(4, 1, Activation::Identity, 1.0);
        let mut reg = InnovationRegistry::new(4, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = reproduce(&[&g], 0, true, &EvolutionParams::default(), &mut reg, &mut rng);
        assert!(out.is_empty());
    }
}
