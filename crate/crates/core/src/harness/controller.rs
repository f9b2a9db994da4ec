//! Turning evolved genotypes into phase fields and scoring them.

use crate::error::{Error, Result};
use crate::genome::{CppnGenome, Network};
use crate::hyperneat::{build_substrate, QueryParams, SubstrateLayout, SubstrateNet, PHASE_LIMIT};
use crate::morphology::{Sam, CONTRACTILE, PASSIVE};
use crate::sga::{self, SgaIndividual};
use crate::sim::{fitness_from_trace, simulate, PhaseField, SimParams};

/// Normalized network inputs for a voxel: coordinates mapped to [-1, 1] by
/// the canvas size (0 on a unit axis) and material mapped {0, 0.5, 1}.
pub fn voxel_inputs([x, y, z]: [usize; 3], code: u8, dims: [usize; 3]) -> [f64; 4] {
    let norm = |v: usize, n: usize| if n <= 1 { 0.0 } else { 2.0 * v as f64 / (n - 1) as f64 - 1.0 };
    let m = match code {
        PASSIVE => 0.5,
        CONTRACTILE => 1.0,
        _ => 0.0,
    };
    [norm(x, dims[0]), norm(y, dims[1]), norm(z, dims[2]), m]
}

pub fn clamp_phase(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-PHASE_LIMIT, PHASE_LIMIT)
    }
}

/// A decoded controller ready to paint any SAM.
#[derive(Debug, Clone)]
pub enum Phenotype {
    /// Direct CPPN: output 0 is the phase.
    Cppn(Network),
    Substrate(SubstrateNet),
    Matrix(SgaIndividual),
}

impl Phenotype {
    pub fn neat(genome: &CppnGenome) -> Result<Self> {
        if genome.n_inputs() != 4 || genome.n_outputs() != 1 {
            return Err(Error::Arity {
                expected: 4,
                got: genome.n_inputs(),
            });
        }
        Ok(Phenotype::Cppn(genome.compile()?))
    }

    pub fn hyperneat(genome: &CppnGenome, layout: &SubstrateLayout) -> Result<Self> {
        Ok(Phenotype::Substrate(build_substrate(genome, layout, &QueryParams::default())?))
    }

    /// Phase field defined on exactly the non-empty voxels of `sam`.
    pub fn phases(&self, sam: &Sam) -> Result<PhaseField> {
        let dims = sam.dims();
        match self {
            Phenotype::Matrix(m) => sga::decode(m, sam),
            Phenotype::Cppn(net) => {
                let mut field = PhaseField::new(dims);
                let mut scratch = Vec::new();
                let mut out = [0.0];
                for (pos, code) in sam.voxels() {
                    net.evaluate_into(&voxel_inputs(pos, code, dims), &mut scratch, &mut out)?;
                    field.set(pos[0], pos[1], pos[2], clamp_phase(out[0]));
                }
                Ok(field)
            }
            Phenotype::Substrate(net) => {
                let mut field = PhaseField::new(dims);
                for (pos, code) in sam.voxels() {
                    field.set(pos[0], pos[1], pos[2], net.forward(voxel_inputs(pos, code, dims)));
                }
                Ok(field)
            }
        }
    }

    /// `(connections, hidden nodes)`: enabled CPPN genes for direct
    /// encodings, built substrate for HyperNEAT, `(0, 0)` for the GA.
    pub fn complexity(&self) -> (usize, usize) {
        match self {
            Phenotype::Cppn(net) => (net.connection_count(), net.hidden_count()),
            Phenotype::Substrate(s) => (s.connection_count(), s.hidden_count()),
            Phenotype::Matrix(_) => (0, 0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    pub diverged: bool,
}

/// Decode, simulate, score. A diverged simulation scores 0 and is flagged.
pub fn evaluate(ctrl: &Phenotype, sam: &Sam, sim: &SimParams) -> Result<Evaluation> {
    let phases = ctrl.phases(sam)?;
    match simulate(sam, &phases, sim) {
        Ok(trace) => Ok(Evaluation {
            fitness: fitness_from_trace(&trace),
            diverged: false,
        }),
        Err(Error::Diverged { .. }) => Ok(Evaluation {
            fitness: 0.0,
            diverged: true,
        }),
        Err(e) => Err(e),
    }
}

/// Mean fitness over a SAM set, plus the number of diverged runs.
pub fn evaluate_set(ctrl: &Phenotype, sams: &[Sam], sim: &SimParams) -> Result<(f64, usize)> {
    if sams.is_empty() {
        return Err(Error::Config("empty SAM set".into()));
    }
    let mut sum = 0.0;
    let mut diverged = 0;
    for sam in sams {
        let e = evaluate(ctrl, sam, sim)?;
        sum += e.fitness;
        diverged += e.diverged as usize;
    }
    Ok((sum / sams.len() as f64, diverged))
}

/// Robustness of a controller: mean displacement over exactly nine SAMs.
pub fn aptitude(ctrl: &Phenotype, sams: &[Sam], sim: &SimParams) -> Result<f64> {
    if sams.len() != 9 {
        return Err(Error::Arity {
            expected: 9,
            got: sams.len(),
        });
    }
    let scores = sams
        .iter()
        .map(|s| evaluate(ctrl, s, sim).map(|e| e.fitness))
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean_of_nine(&scores))
}

fn mean_of_nine(d: &[f64]) -> f64 {
    d.iter().sum::<f64>() / 9.0
}
