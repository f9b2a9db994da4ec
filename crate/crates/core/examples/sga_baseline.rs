//! The simple GA baseline: a direct phase matrix evolved with two-point
//! crossover, single-element mutation and tournament selection.
//!
//! cargo run --release --example sga_baseline -- [generations]

use phasevo::harness::{evaluate_set, Phenotype};
use phasevo::morphology::generate_striped_diagonal;
use phasevo::sga::{evolve, SgaParams};
use phasevo::{SimParams, WorkerPool};

fn main() -> phasevo::Result<()> {
    let generations = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5);
    let dims = [6, 3, 4];
    let sams = vec![generate_striped_diagonal(dims, 0)?];
    let sim = SimParams::desk();
    let params = SgaParams {
        population_size: 12,
        generations,
        ..SgaParams::default()
    };
    let pool = WorkerPool::new(1)?;
    let record = evolve(
        |ind| Ok(evaluate_set(&Phenotype::Matrix(ind.clone()), &sams, &sim)?.0),
        &params,
        dims,
        42,
        &pool,
    )?;
    for row in &record.generations {
        println!("gen {:>3}  best {:.4e}  mean {:.4e}", row.generation, row.best_fitness, row.mean_fitness);
    }
    let m = &record.champion;
    println!("champion matrix {}x{}, first row:", m.rows(), m.cols());
    println!("{}", m.to_csv().lines().next().unwrap_or(""));
    Ok(())
}
