//! Evolving phase-offset controllers for voxel-based soft actuators.
//!
//! A soft actuator morphology ([`morphology::Sam`]) is a lattice of empty,
//! passive and contractile voxels. A controller assigns each contractile
//! voxel a phase offset; the mass-spring simulator ([`sim`]) integrates the
//! body for a fixed duration and the fitness is the rise of its free end.
//!
//! Three controller searches are provided: direct CPPN encodings evolved
//! with NEAT ([`neat`]), CPPN-generated substrate networks ([`hyperneat`]),
//! and a direct phase matrix evolved by a simple GA ([`sga`]). The
//! [`harness`] module runs replicated experiments and writes the result
//! files.

pub mod activation;
pub mod error;
pub mod genome;
pub mod harness;
pub mod hyperneat;
pub mod innovation;
pub mod morphology;
pub mod neat;
pub mod pool;
pub mod record;
pub mod sga;
pub mod sim;

pub use activation::{Activation, Dictionary};
pub use error::{Error, Result};
pub use genome::{CppnGenome, MutationParams};
pub use morphology::{Material, Sam};
pub use neat::EvolutionParams;
pub use pool::WorkerPool;
pub use record::{GenerationStats, RunRecord};
pub use sim::{PhaseField, SimParams, SimTrace};
