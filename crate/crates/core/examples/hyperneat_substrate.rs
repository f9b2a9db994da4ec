//! Builds a HyperNEAT substrate from a randomly mutated CPPN and shows its
//! connectivity and the phases it paints on a SAM.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use phasevo::genome::mutate;
use phasevo::hyperneat::{build_substrate, QueryParams, SubstrateLayout};
use phasevo::innovation::InnovationRegistry;
use phasevo::harness::{voxel_inputs, Phenotype};
use phasevo::morphology::generate_pyramidal;
use phasevo::{CppnGenome, Dictionary, MutationParams};

fn main() -> phasevo::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut registry = InnovationRegistry::new(4, 2);
    let mut cppn = CppnGenome::minimal(4, 2, Dictionary::Full, 2.0, &mut rng);
    for _ in 0..4 {
        registry.new_generation();
        cppn = mutate(&cppn, &MutationParams::default(), Dictionary::Full, &mut registry, &mut rng);
    }

    let layout = SubstrateLayout::default();
    let net = build_substrate(&cppn, &layout, &QueryParams::default())?;
    println!(
        "substrate: {} of {} possible connections, {} hidden neurons",
        net.connection_count(),
        layout.max_connections(),
        net.hidden_count()
    );
    let weights: Vec<f64> = net.connections.iter().map(|c| c.w).collect();
    let lo = weights.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("weight range [{lo:.3}, {hi:.3}]");

    let sam = generate_pyramidal([8, 4, 4])?;
    let field = Phenotype::Substrate(net.clone()).phases(&sam)?;
    for ([x, y, z], code) in sam.voxels().take(5) {
        let inputs = voxel_inputs([x, y, z], code, sam.dims());
        println!("voxel ({x},{y},{z}) inputs {inputs:?} -> phase {:+.4}", field.get(x, y, z).unwrap());
    }
    println!("JSON dump is {} bytes", net.to_json()?.len());
    Ok(())
}
