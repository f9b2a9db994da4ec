//! Per-run results shared by every algorithm.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row of a run's fitness curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// Best fitness within this generation.
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub n_species: usize,
    pub best_connections: usize,
    pub best_hidden_nodes: usize,
    /// Best fitness seen up to and including this generation.
    pub best_so_far: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord<C> {
    pub seed: u64,
    pub generations: Vec<GenerationStats>,
    pub champion: C,
    pub champion_fitness: f64,
}

impl<C> RunRecord<C> {
    pub fn best_curve(&self) -> Vec<f64> {
        self.generations.iter().map(|g| g.best_fitness).collect()
    }

    pub fn final_best(&self) -> f64 {
        self.generations.last().map_or(f64::NEG_INFINITY, |g| g.best_so_far)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_rows(&self.generations, w)
    }
}

pub fn write_rows<W: Write>(rows: &[GenerationStats], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r).map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn read_rows<R: Read>(r: R) -> Result<Vec<GenerationStats>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row.map_err(csv_err)?);
    }
    Ok(out)
}

pub fn read_rows_file(path: &Path) -> Result<Vec<GenerationStats>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_rows(f)
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        msg: e.to_string(),
    }
}
