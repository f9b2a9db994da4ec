//! NEAT genetic operators on CPPN genomes: mutation, crossover,
//! compatibility distance, evaluation and JSON round trip.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use phasevo::genome::{compatibility_distance, crossover, mutate};
use phasevo::innovation::InnovationRegistry;
use phasevo::{CppnGenome, Dictionary, MutationParams};

fn main() -> phasevo::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut registry = InnovationRegistry::new(4, 1);
    let params = MutationParams {
        add_node: 0.6,
        add_connection: 0.6,
        ..MutationParams::default()
    };

    let mut a = CppnGenome::minimal(4, 1, Dictionary::Full, 2.0, &mut rng);
    let mut b = CppnGenome::minimal(4, 1, Dictionary::Full, 2.0, &mut rng);
    for _ in 0..6 {
        registry.new_generation();
        a = mutate(&a, &params, Dictionary::Full, &mut registry, &mut rng);
        b = mutate(&b, &params, Dictionary::Full, &mut registry, &mut rng);
    }
    a.fitness = Some(1.0);
    b.fitness = Some(0.5);
    let child = crossover(&a, &b, &mut rng);

    for (name, g) in [("a", &a), ("b", &b), ("child", &child)] {
        println!(
            "{name:<6} {} connections enabled, {} hidden, out(0.1, -0.2, 0.3, 1) = {:.5}",
            g.enabled_connection_count(),
            g.hidden_count(),
            g.forward(&[0.1, -0.2, 0.3, 1.0])?[0]
        );
    }
    println!("distance(a, b) = {:.4}", compatibility_distance(&a, &b, 1.0, 1.0, 0.5));
    let json = child.to_json()?;
    assert_eq!(CppnGenome::from_json(&json)?.connections, child.connections);
    println!("child as JSON: {} bytes", json.len());
    Ok(())
}
