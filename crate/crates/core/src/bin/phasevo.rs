use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use phasevo::harness::{report, run_experiment, ExperimentConfig};
use phasevo::morphology::{generate_fragmented, generate_pyramidal, generate_striped_diagonal};
use phasevo::sga::{decode, SgaIndividual};
use phasevo::sim::{fitness_from_trace, simulate, SimParams};
use phasevo::{Error, Sam};

#[derive(Parser)]
#[command(name = "phasevo", version, about = "Evolve phase-offset controllers for voxel soft actuators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run replicated evolutionary runs and write metrics.
    Evolve(EvolveArgs),
    /// Simulate one SAM under a phase matrix and write the free-end trace.
    Simulate {
        #[arg(long)]
        sam: PathBuf,
        /// Phase matrix CSV: X rows of Y*Z values.
        #[arg(long)]
        phases: PathBuf,
        #[arg(long)]
        duration: Option<f64>,
        /// Use the fast desk-scale simulator profile.
        #[arg(long)]
        desk: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a SAM text file.
    GenSam {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "20x8x8")]
        dims: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute metrics and charts from run CSVs.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Striped,
    Pyramidal,
    Fragmented,
}

#[derive(clap::Args)]
struct EvolveArgs {
    /// Key-value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long)]
    dictionary: Option<String>,
    /// nf, nw, or comma-separated SAM files.
    #[arg(long)]
    sam_set: Option<String>,
    #[arg(long)]
    sam_dims: Option<String>,
    #[arg(long)]
    sam_count: Option<String>,
    #[arg(long)]
    runs: Option<String>,
    #[arg(long)]
    generations: Option<String>,
    #[arg(long)]
    population: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// default or desk.
    #[arg(long)]
    sim_profile: Option<String>,
    /// Any other config key, as key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_dims(s: &str) -> phasevo::Result<[usize; 3]> {
    let mut c = ExperimentConfig::default();
    c.set("sam_dims", s)?;
    Ok(c.sam_dims)
}

fn evolve(args: EvolveArgs) -> phasevo::Result<()> {
    let mut config = ExperimentConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        config.apply_text(&text)?;
    }
    let flags = [
        ("sim_profile", &args.sim_profile),
        ("algorithm", &args.algorithm),
        ("dictionary", &args.dictionary),
        ("sam_set", &args.sam_set),
        ("sam_dims", &args.sam_dims),
        ("sam_count", &args.sam_count),
        ("runs", &args.runs),
        ("generations", &args.generations),
        ("population", &args.population),
        ("seed", &args.seed),
        ("workers", &args.workers),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            config.set(key, v)?;
        }
    }
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        config.set(k, v)?;
    }
    let summary = run_experiment(&config, &args.out)?;
    for r in &summary.runs {
        println!(
            "run {:>2}  best {:.6e}  connections {:>3}  hidden {:>2}",
            r.index, r.final_best, r.connections, r.hidden_nodes
        );
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn run(cli: Cli) -> phasevo::Result<()> {
    match cli.command {
        Command::Evolve(args) => evolve(args),
        Command::Simulate {
            sam,
            phases,
            duration,
            desk,
            out,
        } => {
            let sam = Sam::load(&sam)?;
            sam.ensure_valid()?;
            let field = decode(&SgaIndividual::load(&phases)?, &sam)?;
            let mut params = if desk { SimParams::desk() } else { SimParams::default() };
            if let Some(d) = duration {
                params.duration = d;
            }
            let trace = simulate(&sam, &field, &params)?;
            let file = std::fs::File::create(&out).map_err(|e| Error::io(&out, e))?;
            trace.write_csv(std::io::BufWriter::new(file), &params)?;
            println!("fitness {:.6e} m", fitness_from_trace(&trace));
            Ok(())
        }
        Command::GenSam { kind, seed, dims, out } => {
            let dims = parse_dims(&dims)?;
            let sam = match kind {
                Kind::Striped => generate_striped_diagonal(dims, seed)?,
                Kind::Pyramidal => generate_pyramidal(dims)?,
                Kind::Fragmented => generate_fragmented(dims, seed)?,
            };
            sam.save(&out)?;
            println!("{} voxels ({} contractile)", sam.voxel_count(), sam.contractile_count());
            Ok(())
        }
        Command::Report { input, out } => {
            let n = report(&input, &out)?;
            println!("summarised {n} runs into {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
