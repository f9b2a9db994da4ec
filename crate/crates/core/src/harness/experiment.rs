//! Replicated runs and the files they leave behind.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::genome::CppnGenome;
use crate::harness::config::{Algorithm, ExperimentConfig};
use crate::harness::controller::{aptitude, evaluate_set, Phenotype};
use crate::harness::metrics::{activation_histogram, ci95};
use crate::harness::svg::{line_chart, Series};
use crate::hyperneat::SubstrateLayout;
use crate::morphology::{nf_like_set, nw_like_set, Sam};
use crate::neat::{self, EvolutionParams};
use crate::pool::WorkerPool;
use crate::record::{read_rows_file, write_rows, GenerationStats};
use crate::sga::{self, SgaIndividual, SgaParams};

#[derive(Debug, Clone, PartialEq)]
pub enum Champion {
    Cppn(CppnGenome),
    Matrix(SgaIndividual),
}

/// Everything one evolutionary run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub index: usize,
    pub seed: u64,
    pub generations: Vec<GenerationStats>,
    pub champion: Champion,
    pub phenotype: Phenotype,
    pub champion_fitness: f64,
    /// Simulations that diverged and were scored 0.
    pub diverged: usize,
}

impl RunOutcome {
    pub fn final_best(&self) -> f64 {
        self.generations.last().map_or(f64::NEG_INFINITY, |g| g.best_so_far)
    }

    /// `(connections, hidden nodes)` of the champion's phenotype.
    pub fn complexity(&self) -> (usize, usize) {
        self.phenotype.complexity()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub index: usize,
    pub seed: u64,
    pub final_best: f64,
    pub connections: usize,
    pub hidden_nodes: usize,
    pub aptitude_nf: Option<f64>,
    pub aptitude_nw: Option<f64>,
    pub diverged: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub runs: Vec<RunSummary>,
    pub outcomes: Vec<RunOutcome>,
    pub histogram: Option<Vec<(Activation, f64)>>,
    pub out_dir: PathBuf,
}

fn layout(config: &ExperimentConfig) -> SubstrateLayout {
    SubstrateLayout::with_hidden(&config.hidden_layers)
}

/// Runs replicate `index` of `config` against `sams`.
pub fn run_once(config: &ExperimentConfig, index: usize, sams: &[Sam], pool: &WorkerPool) -> Result<RunOutcome> {
    let seed = config.run_seed(index);
    let diverged = AtomicUsize::new(0);
    let score = |p: &Phenotype| -> Result<f64> {
        let (f, d) = evaluate_set(p, sams, &config.sim)?;
        diverged.fetch_add(d, Ordering::Relaxed);
        Ok(f)
    };
    let cppn_params = |n_outputs| EvolutionParams {
        population_size: config.population,
        generations: config.generations,
        dictionary: config.dictionary,
        n_inputs: 4,
        n_outputs,
        ..EvolutionParams::default()
    };
    let layout = layout(config);
    let (generations, champion, phenotype, champion_fitness) = match config.algorithm {
        Algorithm::Neat => {
            let rec = neat::evolve(|g| score(&Phenotype::neat(g)?), &cppn_params(1), seed, pool)?;
            let p = Phenotype::neat(&rec.champion)?;
            (rec.generations, Champion::Cppn(rec.champion), p, rec.champion_fitness)
        }
        Algorithm::HyperNeat => {
            let rec = neat::evolve(|g| score(&Phenotype::hyperneat(g, &layout)?), &cppn_params(2), seed, pool)?;
            let p = Phenotype::hyperneat(&rec.champion, &layout)?;
            (rec.generations, Champion::Cppn(rec.champion), p, rec.champion_fitness)
        }
        Algorithm::Sga => {
            let params = SgaParams {
                population_size: config.population,
                generations: config.generations,
                ..SgaParams::default()
            };
            let rec = sga::evolve(
                |ind| score(&Phenotype::Matrix(ind.clone())),
                &params,
                config.sam_dims,
                seed,
                pool,
            )?;
            let p = Phenotype::Matrix(rec.champion.clone());
            (rec.generations, Champion::Matrix(rec.champion), p, rec.champion_fitness)
        }
    };
    Ok(RunOutcome {
        index,
        seed,
        generations,
        champion,
        phenotype,
        champion_fitness,
        diverged: diverged.into_inner(),
    })
}

fn ensure_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".write_probe");
    fs::write(&probe, b"").map_err(|e| Error::io(dir, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Mean and CI of the per-generation best and best-so-far curves. The CI
/// columns are NaN for a single run.
pub fn metrics_csv(runs: &[Vec<GenerationStats>]) -> Result<String> {
    if runs.is_empty() {
        return Err(Error::Config("no runs to summarise".into()));
    }
    let len = runs.iter().map(Vec::len).min().unwrap_or(0);
    let curve = |f: fn(&GenerationStats) -> f64| -> Vec<Vec<f64>> {
        runs.iter().map(|r| r[..len].iter().map(f).collect()).collect()
    };
    let band = |curves: Vec<Vec<f64>>| match ci95(&curves) {
        Ok(b) => Ok(b),
        Err(Error::CiUndefined) => Ok((curves[0].clone(), vec![f64::NAN; len])),
        Err(e) => Err(e),
    };
    let (best, best_ci) = band(curve(|g| g.best_fitness))?;
    let (bsf, bsf_ci) = band(curve(|g| g.best_so_far))?;
    let mut s = String::from("generation,mean_best,ci95_best,mean_best_so_far,ci95_best_so_far\n");
    for g in 0..len {
        let _ = writeln!(s, "{g},{},{},{},{}", best[g], best_ci[g], bsf[g], bsf_ci[g]);
    }
    Ok(s)
}

/// Fitness chart of the best-so-far curve with its CI band.
pub fn fitness_svg(title: &str, runs: &[Vec<GenerationStats>]) -> String {
    let len = runs.iter().map(Vec::len).min().unwrap_or(0);
    let curves: Vec<Vec<f64>> = runs.iter().map(|r| r[..len].iter().map(|g| g.best_so_far).collect()).collect();
    let (mean, half) = ci95(&curves).unwrap_or_else(|_| (curves.first().cloned().unwrap_or_default(), Vec::new()));
    line_chart(
        title,
        "generation",
        "best displacement (m)",
        &[Series {
            label: title,
            mean: &mean,
            half_width: &half,
        }],
    )
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

/// Runs every replicate and writes the result files into `out_dir`.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentSummary> {
    config.validate()?;
    ensure_writable(out_dir)?;
    let sams = config.sams()?;
    let pool = WorkerPool::new(config.workers)?;
    let indices: Vec<usize> = (0..config.runs).collect();
    let outcomes = pool
        .map(&indices, |&i| run_once(config, i, &sams, &pool))
        .into_iter()
        .collect::<Result<Vec<RunOutcome>>>()?;

    let (nf, nw) = if config.aptitude {
        (Some(nf_like_set(config.sam_dims)?), Some(nw_like_set(config.sam_dims)?))
    } else {
        (None, None)
    };
    let apt = |p: &Phenotype, set: &Option<Vec<Sam>>| -> Result<Option<f64>> {
        set.as_ref().map(|s| aptitude(p, s, &config.sim)).transpose()
    };
    let scored = pool
        .map(&outcomes, |o| Ok((apt(&o.phenotype, &nf)?, apt(&o.phenotype, &nw)?)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    write(&out_dir.join("config.txt"), config.to_text())?;
    let mut runs = Vec::with_capacity(outcomes.len());
    for (o, (a_nf, a_nw)) in outcomes.iter().zip(scored) {
        let mut buf = Vec::new();
        write_rows(&o.generations, &mut buf)?;
        write(&out_dir.join(format!("run_{:02}.csv", o.index)), buf)?;
        match &o.champion {
            Champion::Cppn(g) => write(&out_dir.join(format!("champion_{:02}.json", o.index)), g.to_json()?)?,
            Champion::Matrix(m) => write(&out_dir.join(format!("champion_{:02}.csv", o.index)), m.to_csv())?,
        }
        if let Phenotype::Substrate(net) = &o.phenotype {
            write(&out_dir.join(format!("substrate_{:02}.json", o.index)), net.to_json()?)?;
        }
        let (connections, hidden_nodes) = o.complexity();
        runs.push(RunSummary {
            index: o.index,
            seed: o.seed,
            final_best: o.final_best(),
            connections,
            hidden_nodes,
            aptitude_nf: a_nf,
            aptitude_nw: a_nw,
            diverged: o.diverged,
        });
    }

    let mut table = String::from("run,seed,final_best,connections,hidden_nodes,aptitude_nf,aptitude_nw,diverged\n");
    for r in &runs {
        let _ = writeln!(
            table,
            "{},{},{},{},{},{},{},{}",
            r.index,
            r.seed,
            r.final_best,
            r.connections,
            r.hidden_nodes,
            opt(r.aptitude_nf),
            opt(r.aptitude_nw),
            r.diverged
        );
    }
    write(&out_dir.join("runs.csv"), table)?;

    let curves: Vec<Vec<GenerationStats>> = outcomes.iter().map(|o| o.generations.clone()).collect();
    write(&out_dir.join("metrics.csv"), metrics_csv(&curves)?)?;
    let title = format!("{} / {}", config.algorithm, config.dictionary);
    write(&out_dir.join("fitness.svg"), fitness_svg(&title, &curves))?;

    let genomes: Vec<CppnGenome> = outcomes
        .iter()
        .filter_map(|o| match &o.champion {
            Champion::Cppn(g) => Some(g.clone()),
            Champion::Matrix(_) => None,
        })
        .collect();
    let histogram = if genomes.is_empty() {
        None
    } else {
        let h = activation_histogram(&genomes, config.dictionary)?;
        let mut s = String::from("activation,percent\n");
        for (a, p) in &h {
            let _ = writeln!(s, "{},{p}", a.name());
        }
        write(&out_dir.join("activation_histogram.csv"), s)?;
        Some(h)
    };

    Ok(ExperimentSummary {
        runs,
        outcomes,
        histogram,
        out_dir: out_dir.to_path_buf(),
    })
}

/// Recomputes `metrics.csv` and `fitness.svg` from the `run_*.csv` files
/// in `in_dir`.
pub fn report(in_dir: &Path, out_dir: &Path) -> Result<usize> {
    let mut files: Vec<PathBuf> = fs::read_dir(in_dir)
        .map_err(|e| Error::io(in_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("run_") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Config(format!("no run_*.csv files in {}", in_dir.display())));
    }
    let runs = files.iter().map(|p| read_rows_file(p)).collect::<Result<Vec<_>>>()?;
    ensure_writable(out_dir)?;
    write(&out_dir.join("metrics.csv"), metrics_csv(&runs)?)?;
    let title = in_dir.file_name().and_then(|n| n.to_str()).unwrap_or("fitness");
    write(&out_dir.join("fitness.svg"), fitness_svg(title, &runs))?;
    Ok(runs.len())
}
