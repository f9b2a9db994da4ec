//! Robustness of one controller: its mean displacement over the NF-like
//! and NW-like nine-SAM sets.

use phasevo::activation::Activation;
use phasevo::harness::{aptitude, evaluate, Phenotype};
use phasevo::morphology::{nf_like_set, nw_like_set};
use phasevo::{CppnGenome, SimParams};

fn main() -> phasevo::Result<()> {
    let dims = [6, 4, 4];
    let sim = SimParams::desk();
    // phase varies sinusoidally along the body
    let mut g = CppnGenome::minimal_with(4, 1, Activation::Sine, 0.0);
    g.connections[0].weight = 3.0;
    let ctrl = Phenotype::neat(&g)?;

    for (name, set) in [("nf-like", nf_like_set(dims)?), ("nw-like", nw_like_set(dims)?)] {
        let each: Vec<String> = set
            .iter()
            .map(|s| evaluate(&ctrl, s, &sim).map(|e| format!("{:.2e}", e.fitness)))
            .collect::<phasevo::Result<_>>()?;
        println!("{name}: aptitude {:.4e}", aptitude(&ctrl, &set, &sim)?);
        println!("  per SAM {}", each.join(" "));
    }
    Ok(())
}
