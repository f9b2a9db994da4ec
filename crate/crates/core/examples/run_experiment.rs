//! A small replicated experiment written to a directory, then summarised
//! again from its run files.
//!
//! cargo run --release --example run_experiment -- [out-dir]

use std::path::PathBuf;

use phasevo::harness::{report, run_experiment, ExperimentConfig};

fn main() -> phasevo::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("phasevo_run_experiment"));
    let config = ExperimentConfig::from_text(
        "algorithm = neat\n\
         sim_profile = desk\n\
         sam_dims = 5x4x4\n\
         sam_count = 2\n\
         runs = 2\n\
         generations = 3\n\
         population = 6\n\
         seed = 11\n\
         aptitude = false\n",
    )?;
    let summary = run_experiment(&config, &out)?;
    for r in &summary.runs {
        println!("run {} seed {:#018x} best {:.4e}", r.index, r.seed, r.final_best);
    }
    if let Some(h) = &summary.histogram {
        for (a, p) in h {
            println!("{:<16} {p:5.1}%", a.name());
        }
    }
    let mut files: Vec<String> = std::fs::read_dir(&out)
        .map_err(|e| phasevo::Error::io(&out, e))?
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .collect();
    files.sort();
    println!("files: {}", files.join(" "));
    let again = out.join("report");
    report(&out, &again)?;
    println!("metrics recomputed into {}", again.display());
    Ok(())
}
