//! Simple genetic algorithm over a direct phase matrix.
//!
//! An individual is an `X x (Y*Z)` matrix of phase offsets; row `x` holds
//! the `(y, z)` slice of the canvas in row-major order, so the flat index
//! of `(x, y, z)` equals the SAM's flat index.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morphology::Sam;
use crate::pool::WorkerPool;
use crate::record::{GenerationStats, RunRecord};
use crate::sim::PhaseField;

const LIMIT: f64 = 2.0 * PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgaParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub elitism: usize,
}

impl Default for SgaParams {
    fn default() -> Self {
        SgaParams {
            population_size: 50,
            generations: 200,
            crossover_rate: 0.9,
            mutation_rate: 0.1,
            tournament_size: 3,
            elitism: 1,
        }
    }
}

impl SgaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 || self.generations == 0 || self.tournament_size == 0 {
            return Err(Error::Config(
                "population, generations and tournament size must be positive".into(),
            ));
        }
        if self.elitism >= self.population_size {
            return Err(Error::Config("elitism must be smaller than the population".into()));
        }
        for (name, p) in [("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must lie in [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgaIndividual {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    pub fitness: Option<f64>,
}

impl SgaIndividual {
    /// Matrix shape for a canvas: `(X, Y*Z)`.
    pub fn shape([nx, ny, nz]: [usize; 3]) -> (usize, usize) {
        (nx, ny * nz)
    }

    pub fn random<R: Rng + ?Sized>(dims: [usize; 3], rng: &mut R) -> Self {
        let (rows, cols) = Self::shape(dims);
        let data = (0..rows * cols).map(|_| rng.random_range(-LIMIT..=LIMIT)).collect();
        SgaIndividual {
            rows,
            cols,
            data,
            fitness: None,
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Config("phase matrix must be a non-empty rectangle".into()));
        }
        let n = rows.len();
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|v| !(-LIMIT..=LIMIT).contains(v)) {
            return Err(Error::Config("phase matrix values must lie in [-2pi, 2pi]".into()));
        }
        Ok(SgaIndividual {
            rows: n,
            cols,
            data,
            fitness: None,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major elements.
    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    /// One line per row, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for row in self.data.chunks(self.cols) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|c| {
                    c.trim().parse::<f64>().map_err(|e| Error::Parse {
                        line: i + 1,
                        msg: format!("bad phase value {c:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::from_rows(rows)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Swaps the segment `[k1, k2)` of the flattened matrices.
pub fn crossover_at(a: &SgaIndividual, b: &SgaIndividual, k1: usize, k2: usize) -> (SgaIndividual, SgaIndividual) {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "shape mismatch");
    let (lo, hi) = (k1.min(k2), k1.max(k2).min(a.data.len()));
    let mut ca = a.clone();
    let mut cb = b.clone();
    ca.data[lo..hi].copy_from_slice(&b.data[lo..hi]);
    cb.data[lo..hi].copy_from_slice(&a.data[lo..hi]);
    ca.fitness = None;
    cb.fitness = None;
    (ca, cb)
}

/// With probability `rate`, swaps the segment between two uniform cut
/// points; otherwise returns copies.
pub fn two_point_crossover<R: Rng + ?Sized>(
    a: &SgaIndividual,
    b: &SgaIndividual,
    rate: f64,
    rng: &mut R,
) -> (SgaIndividual, SgaIndividual) {
    if rng.random_bool(rate) {
        let n = a.data.len();
        let k1 = rng.random_range(0..=n);
        let k2 = rng.random_range(0..=n);
        crossover_at(a, b, k1, k2)
    } else {
        (a.clone(), b.clone())
    }
}

/// With probability `rate`, resamples one uniformly chosen element.
pub fn mutate<R: Rng + ?Sized>(ind: &SgaIndividual, rate: f64, rng: &mut R) -> SgaIndividual {
    let mut out = ind.clone();
    if rng.random_bool(rate) {
        let i = rng.random_range(0..out.data.len());
        out.data[i] = rng.random_range(-LIMIT..=LIMIT);
        out.fitness = None;
    }
    out
}

/// Phase of every non-empty voxel of `sam`: `matrix[x][y * Z + z]`.
pub fn decode(ind: &SgaIndividual, sam: &Sam) -> Result<PhaseField> {
    let dims = sam.dims();
    if SgaIndividual::shape(dims) != (ind.rows, ind.cols) {
        return Err(Error::Config(format!(
            "phase matrix {}x{} does not cover canvas {dims:?}",
            ind.rows, ind.cols
        )));
    }
    let mut field = PhaseField::new(dims);
    for ([x, y, z], _) in sam.voxels() {
        field.set(x, y, z, ind.get(x, y * dims[2] + z));
    }
    Ok(field)
}

fn tournament<R: Rng + ?Sized>(fitness: &[f64], size: usize, rng: &mut R) -> usize {
    let mut best = rng.random_range(0..fitness.len());
    for _ in 1..size {
        let c = rng.random_range(0..fitness.len());
        if fitness[c] > fitness[best] || (fitness[c] == fitness[best] && c < best) {
            best = c;
        }
    }
    best
}

/// Generational GA with tournament selection and elitism. `evaluator`
/// errors give negative infinity.
pub fn evolve<F>(
    evaluator: F,
    params: &SgaParams,
    dims: [usize; 3],
    seed: u64,
    pool: &WorkerPool,
) -> Result<RunRecord<SgaIndividual>>
where
    F: Fn(&SgaIndividual) -> Result<f64> + Sync + Send,
{
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut population: Vec<SgaIndividual> =
        (0..params.population_size).map(|_| SgaIndividual::random(dims, &mut rng)).collect();
    let mut rows = Vec::with_capacity(params.generations);
    let mut champion: Option<SgaIndividual> = None;
    let mut best_so_far = f64::NEG_INFINITY;

    for generation in 0..params.generations {
        let pending: Vec<usize> = (0..population.len())
            .filter(|&i| population[i].fitness.is_none())
            .collect();
        let scores = pool.map(&pending, |&i| match evaluator(&population[i]) {
            Ok(f) if !f.is_nan() => f,
            _ => f64::NEG_INFINITY,
        });
        for (&i, s) in pending.iter().zip(scores) {
            population[i].fitness = Some(s);
        }
        let fitness: Vec<f64> = population.iter().map(|g| g.fitness.expect("evaluated")).collect();
        let mut order: Vec<usize> = (0..fitness.len()).collect();
        order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]));
        let best_idx = order[0];
        if fitness[best_idx] > best_so_far || champion.is_none() {
            best_so_far = fitness[best_idx];
            champion = Some(population[best_idx].clone());
        }
        rows.push(GenerationStats {
            generation,
            best_fitness: fitness[best_idx],
            mean_fitness: fitness.iter().sum::<f64>() / fitness.len() as f64,
            n_species: 1,
            best_connections: 0,
            best_hidden_nodes: 0,
            best_so_far,
        });
        if generation + 1 == params.generations {
            break;
        }

        let mut next: Vec<SgaIndividual> = order[..params.elitism].iter().map(|&i| population[i].clone()).collect();
        while next.len() < params.population_size {
            let a = tournament(&fitness, params.tournament_size, &mut rng);
            let b = tournament(&fitness, params.tournament_size, &mut rng);
            let (ca, cb) = two_point_crossover(&population[a], &population[b], params.crossover_rate, &mut rng);
            for child in [ca, cb] {
                if next.len() < params.population_size {
                    next.push(mutate(&child, params.mutation_rate, &mut rng));
                }
            }
        }
        population = next;
    }

    let champion = champion.expect("at least one generation");
    Ok(RunRecord {
        seed,
        champion_fitness: champion.fitness.unwrap_or(f64::NEG_INFINITY),
        champion,
        generations: rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphology::Material;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn init_range_and_shape() {
        let ind = SgaIndividual::random([20, 8, 8], &mut rng(1));
        assert_eq!((ind.rows(), ind.cols()), (20, 64));
        assert_eq!(ind.values().len(), 1280);
        assert!(ind.values().iter().all(|v| (-LIMIT..=LIMIT).contains(v)));
        assert_eq!(SgaIndividual::random([20, 8, 8], &mut rng(1)), ind);
    }

    #[test]
    fn init_mean_near_zero() {
        let mut r = rng(7);
        let mut sum = 0.0;
        let mut n = 0;
        while n < 100_000 {
            let ind = SgaIndividual::random([10, 10, 10], &mut r);
            sum += ind.values().iter().sum::<f64>();
            n += ind.values().len();
        }
        assert!((sum / n as f64).abs() < 0.06);
    }

    #[test]
    fn crossover_cases() {
        let a = SgaIndividual::from_rows(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let b = SgaIndividual::from_rows(vec![vec![-1.0, -2.0, -3.0], vec![-4.0, -5.0, -6.0]]).unwrap();
        let (x, y) = crossover_at(&a, &b, 2, 2);
        assert_eq!((x.values(), y.values()), (a.values(), b.values()));
        let (x, y) = crossover_at(&a, &b, 1, 4);
        assert_eq!(x.values(), &[1.0, -2.0, -3.0, -4.0, 5.0, 6.0]);
        assert_eq!(y.values(), &[-1.0, 2.0, 3.0, 4.0, -5.0, -6.0]);
        let (x, y) = two_point_crossover(&a, &a, 1.0, &mut rng(3));
        assert_eq!((x.values(), y.values()), (a.values(), a.values()));
    }

    #[test]
    fn mutation_hamming_and_rate() {
        let mut r = rng(11);
        let ind = SgaIndividual::random([4, 3, 3], &mut r);
        assert_eq!(mutate(&ind, 0.0, &mut r), ind);
        let mut fired = 0;
        for _ in 0..10_000 {
            let m = mutate(&ind, 0.1, &mut r);
            let diff = m.values().iter().zip(ind.values()).filter(|(a, b)| a != b).count();
            assert!(diff <= 1);
            fired += diff;
        }
        assert!((fired as f64 / 1e4 - 0.1).abs() < 0.01, "{fired}");
    }

    #[test]
    fn decode_index_map() {
        let mut sam = Sam::new([2, 2, 2]).unwrap();
        for i in 0..8 {
            let [x, y, z] = sam.coords(i);
            sam.set(x, y, z, Material::Passive);
        }
        let rows: Vec<Vec<f64>> = (0..2).map(|r| (0..4).map(|c| (r * 4 + c) as f64 * 0.1).collect()).collect();
        let ind = SgaIndividual::from_rows(rows).unwrap();
        let f = decode(&ind, &sam).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    assert_eq!(f.get(x, y, z), Some((x * 4 + y * 2 + z) as f64 * 0.1));
                }
            }
        }
        let wrong = SgaIndividual::random([3, 2, 2], &mut rng(0));
        assert!(matches!(decode(&wrong, &sam), Err(Error::Config(_))));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let ind = SgaIndividual::random([3, 2, 2], &mut rng(5));
        let text = ind.to_csv();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(SgaIndividual::from_csv(&text).unwrap(), ind);
        assert!(matches!(SgaIndividual::from_csv("1.0,abc\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn evolve_improves_sum() {
        let pool = WorkerPool::new(1).unwrap();
        let params = SgaParams {
            population_size: 20,
            generations: 50,
            ..SgaParams::default()
        };
        let eval = |i: &SgaIndividual| Ok(i.values().iter().sum::<f64>());
        let rec = evolve(eval, &params, [3, 2, 2], 9, &pool).unwrap();
        let curve = rec.best_curve();
        assert!(curve.windows(2).all(|w| w[1] >= w[0]));
        assert!(curve.windows(2).any(|w| w[1] > w[0]));
        assert_eq!(evolve(eval, &params, [3, 2, 2], 9, &pool).unwrap(), rec);
        let flat = evolve(|_: &SgaIndividual| Ok(1.0), &params, [3, 2, 2], 9, &pool).unwrap();
        assert!(flat.best_curve().iter().all(|&f| f == 1.0));
    }
}
