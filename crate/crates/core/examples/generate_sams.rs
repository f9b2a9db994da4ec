//! The morphology generators and the two nine-SAM benchmark sets.

use phasevo::morphology::{generate_fragmented, hole_fraction, nf_like_set, nw_like_set, Sam};

fn describe(name: &str, s: &Sam) {
    println!(
        "{name:<14} voxels {:>4}  contractile {:>4}  holes {:>5.1}%  valid {}",
        s.voxel_count(),
        s.contractile_count(),
        100.0 * hole_fraction(s),
        s.is_valid()
    );
}

fn main() -> phasevo::Result<()> {
    let dims = [20, 8, 8];
    for (i, s) in nf_like_set(dims)?.iter().enumerate() {
        describe(&format!("nf-like #{i}"), s);
    }
    for (i, s) in nw_like_set(dims)?.iter().enumerate() {
        describe(&format!("nw-like #{i}"), s);
    }
    let small = generate_fragmented([6, 4, 4], 5)?;
    println!("\nfragmented 6x4x4, seed 5, text form:\n{}", small.to_text());
    assert_eq!(Sam::from_text(&small.to_text())?, small);
    Ok(())
}
