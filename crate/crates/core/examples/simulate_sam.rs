//! Simulates a striped SAM with a travelling-wave phase field and prints
//! the free-end displacement.
//!
//! cargo run --release --example simulate_sam -- [X Y Z] [--desk]

use std::f64::consts::PI;
use std::time::Instant;

use phasevo::morphology::{generate_striped_diagonal, CONTRACTILE};
use phasevo::sim::{fitness_from_trace, simulate, PhaseField, SimParams};

fn main() -> phasevo::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let desk = args.iter().any(|a| a == "--desk");
    let dims: Vec<usize> = args.iter().filter_map(|a| a.parse().ok()).collect();
    let dims = if dims.len() == 3 { [dims[0], dims[1], dims[2]] } else { [10, 4, 4] };

    let sam = generate_striped_diagonal(dims, 0)?;
    let mut phases = PhaseField::new(dims);
    for ([x, y, z], code) in sam.voxels() {
        if code == CONTRACTILE {
            phases.set(x, y, z, PI * x as f64 / dims[0] as f64 + 0.3 * z as f64 - 0.1 * y as f64);
        }
    }
    let params = if desk { SimParams::desk() } else { SimParams::default() };

    let start = Instant::now();
    let trace = simulate(&sam, &phases, &params)?;
    let elapsed = start.elapsed();
    println!("voxels            {}", sam.voxel_count());
    println!("contractile       {}", sam.contractile_count());
    println!("samples           {}", trace.samples.len());
    println!("fitness           {:.6e} m", fitness_from_trace(&trace));
    println!("max planar        {:.6e} m", trace.max_planar_displacement());
    println!("final planar      {:.6e} m", trace.final_planar_displacement());
    println!("wall time         {:.3} s", elapsed.as_secs_f64());
    Ok(())
}
