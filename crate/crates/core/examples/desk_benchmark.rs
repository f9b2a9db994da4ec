//! Desk-scale comparison of NEAT, HyperNEAT and the SGA on one NF-like SAM.
//!
//! cargo run --release --example desk_benchmark -- [runs] [generations] [population]

use std::time::Instant;

use phasevo::harness::{run_experiment, Algorithm, ExperimentConfig};
use phasevo::harness::metrics::{mean, median};

fn main() -> phasevo::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let runs = args.first().copied().unwrap_or(5);
    let generations = args.get(1).copied().unwrap_or(30);
    let population = args.get(2).copied().unwrap_or(20);
    let out = std::env::temp_dir().join("phasevo_desk_benchmark");

    let mut finals = Vec::new();
    for algorithm in [Algorithm::Neat, Algorithm::HyperNeat, Algorithm::Sga] {
        let mut config = ExperimentConfig::default();
        config.apply_text("sim_profile = desk\nsam_dims = 10x4x4\nsam_count = 1\naptitude = false\n")?;
        config.algorithm = algorithm;
        config.runs = runs;
        config.generations = generations;
        config.population = population;
        let start = Instant::now();
        let summary = run_experiment(&config, &out.join(algorithm.to_string()))?;
        let best: Vec<f64> = summary.runs.iter().map(|r| r.final_best).collect();
        let conns: Vec<f64> = summary.runs.iter().map(|r| r.connections as f64).collect();
        let hidden: Vec<f64> = summary.runs.iter().map(|r| r.hidden_nodes as f64).collect();
        println!(
            "{:<10} median {:.4e}  mean conns {:>6.2}  mean hidden {:>5.2}  {:.1} s",
            algorithm.to_string(),
            median(&best),
            mean(&conns),
            mean(&hidden),
            start.elapsed().as_secs_f64()
        );
        println!("           per run {:?}", best.iter().map(|b| format!("{b:.3e}")).collect::<Vec<_>>());
        finals.push(best);
    }
    let wins = finals[0].iter().zip(&finals[2]).filter(|(n, s)| n > s).count();
    println!("NEAT beats SGA in {wins}/{runs} runs");
    println!("outputs in {}", out.display());
    Ok(())
}
