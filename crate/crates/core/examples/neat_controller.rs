//! Evolves a direct CPPN controller with NEAT for one small SAM and prints
//! the champion's phase offsets along the body.
//!
//! cargo run --release --example neat_controller -- [generations]

use phasevo::harness::{evaluate_set, Phenotype};
use phasevo::morphology::generate_striped_diagonal;
use phasevo::neat::evolve;
use phasevo::{EvolutionParams, SimParams, WorkerPool};

fn main() -> phasevo::Result<()> {
    let generations = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5);
    let sams = vec![generate_striped_diagonal([6, 3, 4], 0)?];
    let sim = SimParams::desk();
    let params = EvolutionParams {
        population_size: 12,
        generations,
        ..EvolutionParams::default()
    };
    let pool = WorkerPool::new(1)?;
    let record = evolve(|g| Ok(evaluate_set(&Phenotype::neat(g)?, &sams, &sim)?.0), &params, 42, &pool)?;

    for row in &record.generations {
        println!(
            "gen {:>3}  best {:.4e}  species {:>2}  champion {} conns / {} hidden",
            row.generation, row.best_fitness, row.n_species, row.best_connections, row.best_hidden_nodes
        );
    }
    let field = Phenotype::neat(&record.champion)?.phases(&sams[0])?;
    let along_x: Vec<String> = (0..6)
        .filter_map(|x| field.get(x, 1, 2))
        .map(|p| format!("{p:+.2}"))
        .collect();
    println!("phases along x at (y=1, z=2): {}", along_x.join(" "));
    Ok(())
}
