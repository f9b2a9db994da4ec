//! Experiment configuration and its `key = value` text form.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::activation::Dictionary;
use crate::error::{Error, Result};
use crate::morphology::{nf_like_set, nw_like_set, Sam};
use crate::sim::SimParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Neat,
    HyperNeat,
    Sga,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Neat => "neat",
            Algorithm::HyperNeat => "hyperneat",
            Algorithm::Sga => "sga",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "neat" => Ok(Algorithm::Neat),
            "hyperneat" => Ok(Algorithm::HyperNeat),
            "sga" => Ok(Algorithm::Sga),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SamSet {
    NfLike,
    NwLike,
    Custom(Vec<PathBuf>),
}

impl SamSet {
    pub fn load(&self, dims: [usize; 3]) -> Result<Vec<Sam>> {
        match self {
            SamSet::NfLike => nf_like_set(dims),
            SamSet::NwLike => nw_like_set(dims),
            SamSet::Custom(paths) => paths
                .iter()
                .map(|p| {
                    let s = Sam::load(p)?;
                    s.ensure_valid()?;
                    Ok(s)
                })
                .collect(),
        }
    }
}

impl fmt::Display for SamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamSet::NfLike => f.write_str("nf"),
            SamSet::NwLike => f.write_str("nw"),
            SamSet::Custom(paths) => {
                let p: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
                f.write_str(&p.join(","))
            }
        }
    }
}

impl FromStr for SamSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "nf" | "nf_like" => Ok(SamSet::NfLike),
            "nw" | "nw_like" => Ok(SamSet::NwLike),
            "" => Err(Error::Config("empty sam_set".into())),
            paths => Ok(SamSet::Custom(paths.split(',').map(|p| PathBuf::from(p.trim())).collect())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub dictionary: Dictionary,
    pub sam_set: SamSet,
    pub sam_dims: [usize; 3],
    /// Use only the first `n` SAMs of the set.
    pub sam_count: Option<usize>,
    pub runs: usize,
    pub generations: usize,
    pub population: usize,
    pub master_seed: u64,
    pub workers: usize,
    /// Hidden layer sizes of the HyperNEAT substrate.
    pub hidden_layers: Vec<usize>,
    /// Score champions on both nine-SAM sets.
    pub aptitude: bool,
    pub sim: SimParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            algorithm: Algorithm::Neat,
            dictionary: Dictionary::Full,
            sam_set: SamSet::NfLike,
            sam_dims: [20, 8, 8],
            sam_count: None,
            runs: 20,
            generations: 200,
            population: 50,
            master_seed: 0,
            workers: 1,
            hidden_layers: vec![7, 6],
            aptitude: true,
            sim: SimParams::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.trim()
        .parse()
        .map_err(|e| Error::Config(format!("bad value {v:?} for {key}: {e}")))
}

fn parse_dims(v: &str) -> Result<[usize; 3]> {
    let parts: Vec<&str> = v.split(['x', 'X', ',', ' ']).filter(|s| !s.is_empty()).collect();
    match parts.as_slice() {
        [a, b, c] => Ok([parse("sam_dims", a)?, parse("sam_dims", b)?, parse("sam_dims", c)?]),
        _ => Err(Error::Config(format!("sam_dims must look like 20x8x8, got {v:?}"))),
    }
}

impl ExperimentConfig {
    pub const KEYS: [&'static str; 21] = [
        "algorithm",
        "dictionary",
        "sam_set",
        "sam_dims",
        "sam_count",
        "runs",
        "generations",
        "population",
        "seed",
        "workers",
        "hidden_layers",
        "aptitude",
        "sim_profile",
        "duration",
        "sample_every",
        "damping_ratio",
        "mass_scaling",
        "gravity",
        "dt",
        "density",
        "voxel_edge",
    ];

    /// Sets one key. `sim_profile` (`default` or `desk`) replaces every
    /// simulator setting, so give it before individual overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "algorithm" => self.algorithm = v.parse()?,
            "dictionary" => self.dictionary = v.parse()?,
            "sam_set" => self.sam_set = v.parse()?,
            "sam_dims" => self.sam_dims = parse_dims(v)?,
            "sam_count" => self.sam_count = if v == "all" { None } else { Some(parse(key, v)?) },
            "runs" => self.runs = parse(key, v)?,
            "generations" => self.generations = parse(key, v)?,
            "population" => self.population = parse(key, v)?,
            "seed" => self.master_seed = parse(key, v)?,
            "workers" => self.workers = parse(key, v)?,
            "hidden_layers" => {
                self.hidden_layers = v.split(',').map(|s| parse(key, s)).collect::<Result<_>>()?
            }
            "aptitude" => self.aptitude = parse(key, v)?,
            "sim_profile" => {
                self.sim = match v {
                    "default" => SimParams::default(),
                    "desk" => SimParams::desk(),
                    _ => return Err(Error::Config(format!("unknown sim_profile {v:?}"))),
                }
            }
            "duration" => self.sim.duration = parse(key, v)?,
            "sample_every" => self.sim.sample_every = parse(key, v)?,
            "damping_ratio" => self.sim.damping_ratio = parse(key, v)?,
            "mass_scaling" => self.sim.mass_scaling = parse(key, v)?,
            "gravity" => self.sim.gravity = parse(key, v)?,
            "dt" => self.sim.dt = if v == "auto" { None } else { Some(parse(key, v)?) },
            "density" => self.sim.material.density = parse(key, v)?,
            "voxel_edge" => self.sim.material.voxel_edge = parse(key, v)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key = value, got {line:?}"),
            })?;
            self.set(k, v).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        c.apply_text(text)?;
        Ok(c)
    }

    /// Full `key = value` listing that reproduces this configuration.
    pub fn to_text(&self) -> String {
        let s = &self.sim;
        let hidden: Vec<String> = self.hidden_layers.iter().map(usize::to_string).collect();
        let [x, y, z] = self.sam_dims;
        let lines = [
            format!("algorithm = {}", self.algorithm),
            format!("dictionary = {}", self.dictionary),
            format!("sam_set = {}", self.sam_set),
            format!("sam_dims = {x}x{y}x{z}"),
            format!("sam_count = {}", self.sam_count.map_or("all".into(), |n| n.to_string())),
            format!("runs = {}", self.runs),
            format!("generations = {}", self.generations),
            format!("population = {}", self.population),
            format!("seed = {}", self.master_seed),
            format!("workers = {}", self.workers),
            format!("hidden_layers = {}", hidden.join(",")),
            format!("aptitude = {}", self.aptitude),
            format!("duration = {}", s.duration),
            format!("sample_every = {}", s.sample_every),
            format!("damping_ratio = {}", s.damping_ratio),
            format!("mass_scaling = {}", s.mass_scaling),
            format!("gravity = {}", s.gravity),
            format!("dt = {}", s.dt.map_or("auto".into(), |d| d.to_string())),
            format!("density = {}", s.material.density),
            format!("voxel_edge = {}", s.material.voxel_edge),
        ];
        lines.join("\n") + "\n"
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 || self.generations == 0 || self.population == 0 {
            return Err(Error::Config("runs, generations and population must be positive".into()));
        }
        if self.sam_count == Some(0) {
            return Err(Error::Config("sam_count must be positive".into()));
        }
        if self.hidden_layers.is_empty() || self.hidden_layers.contains(&0) {
            return Err(Error::Config("hidden_layers must list positive sizes".into()));
        }
        Ok(())
    }

    /// The SAMs fitness is averaged over.
    pub fn sams(&self) -> Result<Vec<Sam>> {
        let mut sams = self.sam_set.load(self.sam_dims)?;
        if let Some(n) = self.sam_count {
            sams.truncate(n);
        }
        Ok(sams)
    }

    /// Independent seed of run `index`.
    pub fn run_seed(&self, index: usize) -> u64 {
        run_seed(self.master_seed, index)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn run_seed(master: u64, index: usize) -> u64 {
    splitmix64(splitmix64(master) ^ index as u64)
}
