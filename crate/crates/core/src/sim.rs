//! Deterministic mass-spring voxel simulator.
//!
//! Every voxel corner is a point mass shared with neighbouring voxels. Each
//! voxel contributes a spring along its 12 edges and both diagonals of its
//! 6 faces; contributions to the same node pair are merged into one spring
//! whose stiffness is their sum and whose rest length is their mean (the
//! exact equivalent of parallel springs of equal stiffness). Contractile
//! voxels modulate the rest length of their springs sinusoidally with the
//! voxel's phase offset. Nodes on the `x = 0` plane are fixed.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::morphology::{Sam, CONTRACTILE, EMPTY};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub poisson_ratio: f64,
    /// Pa.
    pub youngs_modulus: f64,
    /// Stored for completeness; there is no contact model.
    pub static_friction: f64,
    /// Stored for completeness; there is no contact model.
    pub dynamic_friction: f64,
    /// Volumetric amplitude: 0.5 means +-50% of the rest volume.
    pub actuation_amplitude: f64,
    /// Hz.
    pub actuation_frequency: f64,
    /// kg/m^3.
    pub density: f64,
    /// m.
    pub voxel_edge: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams {
            poisson_ratio: 0.35,
            youngs_modulus: 5e6,
            static_friction: 1.0,
            dynamic_friction: 0.5,
            actuation_amplitude: 0.5,
            actuation_frequency: 4.0,
            density: 1000.0,
            voxel_edge: 0.01,
        }
    }
}

impl MaterialParams {
    /// Linear strain of an isotropic expansion by the volumetric amplitude.
    pub fn linear_strain(&self) -> f64 {
        (1.0 + self.actuation_amplitude).cbrt() - 1.0
    }

    pub fn axial_stiffness(&self) -> f64 {
        self.youngs_modulus * self.voxel_edge
    }

    pub fn diagonal_stiffness(&self) -> f64 {
        let nu = self.poisson_ratio;
        self.axial_stiffness() * nu / (1.0 - nu)
    }

    pub fn voxel_mass(&self) -> f64 {
        self.density * self.voxel_edge.powi(3)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub material: MaterialParams,
    /// Seconds.
    pub duration: f64,
    /// Record a sample every this many steps.
    pub sample_every: usize,
    /// Viscous damping ratio per node.
    pub damping_ratio: f64,
    /// Inertia multiplier applied after damping is computed from the
    /// physical masses. Values above 1 trade high-frequency fidelity for a
    /// larger stable step.
    pub mass_scaling: f64,
    pub gravity: bool,
    /// Explicit step; `None` uses `dt_safety * sqrt(m_min / k_max)`.
    pub dt: Option<f64>,
    pub dt_safety: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            material: MaterialParams::default(),
            duration: 1.0,
            sample_every: 50,
            damping_ratio: 0.1,
            mass_scaling: 1.0,
            gravity: false,
            dt: None,
            dt_safety: 0.25,
        }
    }
}

pub const DESK_MASS_SCALING: f64 = 100.0;

impl SimParams {
    /// Fast profile for desk-scale experiments: two actuation cycles and
    /// inertia scaled by `DESK_MASS_SCALING`, which enlarges the stable step
    /// 10x while the drive stays below the structural modes.
    pub fn desk() -> Self {
        SimParams {
            mass_scaling: DESK_MASS_SCALING,
            duration: 0.5,
            sample_every: 10,
            ..SimParams::default()
        }
    }

    /// Short hex digest identifying this configuration.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("plain data");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Per-voxel phase offsets, defined on a subset of canvas cells.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    dims: [usize; 3],
    values: Vec<Option<f64>>,
}

impl PhaseField {
    pub fn new(dims: [usize; 3]) -> Self {
        PhaseField {
            dims,
            values: vec![None; dims.iter().product()],
        }
    }

    /// Same phase on every non-empty voxel of `sam`.
    pub fn uniform(sam: &Sam, phase: f64) -> Self {
        let mut f = PhaseField::new(sam.dims());
        for ([x, y, z], _) in sam.voxels() {
            f.set(x, y, z, phase);
        }
        f
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.dims[1] + y) * self.dims[2] + z
    }

    pub fn set(&mut self, x: usize, y: usize, z: usize, phase: f64) {
        let i = self.index(x, y, z);
        self.values[i] = Some(phase);
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> Option<f64> {
        self.values[self.index(x, y, z)]
    }

    pub fn len(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().filter_map(|v| *v)
    }

    pub fn mirror_y(&self) -> PhaseField {
        let mut out = self.clone();
        let [nx, ny, nz] = self.dims;
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    let j = out.index(x, ny - 1 - y, z);
                    out.values[j] = self.get(x, y, z);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpringKind {
    Axial,
    Diagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spring {
    pub a: usize,
    pub b: usize,
    pub rest0: f64,
    pub stiffness: f64,
    pub kind: SpringKind,
    /// Number of voxels that contributed to this spring.
    pub contributors: usize,
    /// Phases of the contractile contributors.
    pub phases: Vec<f64>,
}

impl Spring {
    pub fn passive(a: usize, b: usize, rest0: f64, stiffness: f64) -> Self {
        Spring {
            a,
            b,
            rest0,
            stiffness,
            kind: SpringKind::Axial,
            contributors: 1,
            phases: Vec::new(),
        }
    }

    pub fn is_active(&self) -> bool {
        !self.phases.is_empty()
    }
}

/// Rest length at time `t`: `L0 * (1 + strain * mean_i(sin(2 pi f t + phase_i)))`
/// where passive contributors count as zero.
pub fn rest_length(spring: &Spring, t: f64, mat: &MaterialParams) -> f64 {
    if spring.phases.is_empty() {
        return spring.rest0;
    }
    let w = 2.0 * PI * mat.actuation_frequency;
    let s: f64 = spring.phases.iter().map(|&p| (w * t + p).sin()).sum();
    spring.rest0 * (1.0 + mat.linear_strain() * s / spring.contributors as f64)
}

/// Flat actuation table so a step evaluates one `sin` per contractile voxel.
#[derive(Debug, Clone, PartialEq)]
struct Actuation {
    voxel_phases: Vec<f64>,
    /// Per spring: range into `refs`.
    ranges: Vec<(u32, u32)>,
    refs: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    pub positions: Vec<[f64; 3]>,
    pub velocities: Vec<[f64; 3]>,
    pub masses: Vec<f64>,
    pub fixed: Vec<bool>,
    pub springs: Vec<Spring>,
    /// Per-node viscous coefficient.
    pub damping: Vec<f64>,
    pub gravity: f64,
    pub time: f64,
    /// Nodes on the free end face.
    pub free_end: Vec<usize>,
    strain: f64,
    omega: f64,
    actuation: Actuation,
    forces: Vec<[f64; 3]>,
    sines: Vec<f64>,
}

impl LatticeState {
    /// Assembles a lattice from explicit parts, with no damping or gravity.
    pub fn from_parts(
        positions: Vec<[f64; 3]>,
        masses: Vec<f64>,
        fixed: Vec<bool>,
        springs: Vec<Spring>,
        mat: &MaterialParams,
    ) -> Self {
        let n = positions.len();
        let mut phase_ids: HashMap<u64, u32> = HashMap::new();
        let mut voxel_phases = Vec::new();
        let mut ranges = Vec::with_capacity(springs.len());
        let mut refs = Vec::new();
        for s in &springs {
            let start = refs.len() as u32;
            for &p in &s.phases {
                let id = *phase_ids.entry(p.to_bits()).or_insert_with(|| {
                    voxel_phases.push(p);
                    (voxel_phases.len() - 1) as u32
                });
                refs.push(id);
            }
            ranges.push((start, refs.len() as u32));
        }
        let max_x = positions.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        let free_end = (0..n).filter(|&i| positions[i][0] == max_x).collect();
        LatticeState {
            velocities: vec![[0.0; 3]; n],
            damping: vec![0.0; n],
            forces: vec![[0.0; 3]; n],
            sines: vec![0.0; voxel_phases.len()],
            positions,
            masses,
            fixed,
            springs,
            gravity: 0.0,
            time: 0.0,
            free_end,
            strain: mat.linear_strain(),
            omega: 2.0 * PI * mat.actuation_frequency,
            actuation: Actuation {
                voxel_phases,
                ranges,
                refs,
            },
        }
    }

    pub fn max_stiffness(&self) -> f64 {
        self.springs.iter().map(|s| s.stiffness).fold(0.0, f64::max)
    }

    pub fn min_mass(&self) -> f64 {
        self.masses.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest step accepted by [`step`].
    pub fn stable_dt(&self) -> f64 {
        0.5 * (self.min_mass() / self.max_stiffness()).sqrt()
    }

    pub fn free_end_centroid(&self) -> [f64; 3] {
        let mut c = [0.0; 3];
        for &i in &self.free_end {
            for (k, ck) in c.iter_mut().enumerate() {
                *ck += self.positions[i][k];
            }
        }
        let n = self.free_end.len().max(1) as f64;
        c.map(|v| v / n)
    }

    pub fn momentum(&self) -> [f64; 3] {
        let mut p = [0.0; 3];
        for (v, &m) in self.velocities.iter().zip(&self.masses) {
            for k in 0..3 {
                p[k] += m * v[k];
            }
        }
        p
    }

    /// Kinetic energy plus spring energy at the current rest lengths.
    pub fn energy(&self) -> f64 {
        let kinetic: f64 = self
            .velocities
            .iter()
            .zip(&self.masses)
            .map(|(v, m)| 0.5 * m * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]))
            .sum();
        let t = self.time;
        let potential: f64 = self
            .springs
            .iter()
            .map(|s| {
                let rest = s.rest0
                    * (1.0
                        + self.strain
                            * s.phases.iter().map(|&p| (self.omega * t + p).sin()).sum::<f64>()
                            / s.contributors as f64);
                let d = dist(self.positions[s.a], self.positions[s.b]);
                0.5 * s.stiffness * (d - rest) * (d - rest)
            })
            .sum();
        kinetic + potential
    }

    fn accumulate_forces(&mut self) {
        for f in &mut self.forces {
            *f = [0.0; 3];
        }
        let t = self.time;
        for (s, &p) in self.sines.iter_mut().zip(&self.actuation.voxel_phases) {
            *s = (self.omega * t + p).sin();
        }
        for (i, sp) in self.springs.iter().enumerate() {
            let (lo, hi) = self.actuation.ranges[i];
            let rest = if lo == hi {
                sp.rest0
            } else {
                let sum: f64 = self.actuation.refs[lo as usize..hi as usize]
                    .iter()
                    .map(|&r| self.sines[r as usize])
                    .sum();
                sp.rest0 * (1.0 + self.strain * sum / sp.contributors as f64)
            };
            let pa = self.positions[sp.a];
            let pb = self.positions[sp.b];
            let d = [pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]];
            let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if len == 0.0 {
                continue;
            }
            let scale = sp.stiffness * (len - rest) / len;
            let f = [scale * d[0], scale * d[1], scale * d[2]];
            let fa = &mut self.forces[sp.a];
            fa[0] += f[0];
            fa[1] += f[1];
            fa[2] += f[2];
            let fb = &mut self.forces[sp.b];
            fb[0] -= f[0];
            fb[1] -= f[1];
            fb[2] -= f[2];
        }
    }
}

#[inline]
fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

const FACE_DIAGONALS: [(usize, usize); 12] = [
    // corners are numbered by bits (dx, dy, dz) = (c & 1, c >> 1 & 1, c >> 2 & 1)
    (0, 3), (1, 2), (4, 7), (5, 6), // z faces
    (0, 5), (1, 4), (2, 7), (3, 6), // y faces
    (0, 6), (2, 4), (1, 7), (3, 5), // x faces
];

fn voxel_edges() -> impl Iterator<Item = (usize, usize)> {
    (0..8usize).flat_map(|a| {
        [1usize, 2, 4]
            .into_iter()
            .filter(move |bit| a & bit == 0)
            .map(move |bit| (a, a | bit))
    })
}

/// Builds the lattice for `sam`. `phases` supplies the phase of every
/// contractile voxel.
pub fn build_lattice(sam: &Sam, phases: &PhaseField, params: &SimParams) -> Result<LatticeState> {
    let [nx, ny, nz] = sam.dims();
    if sam.voxel_count() == 0 || !(0..ny).any(|y| (0..nz).any(|z| sam.code(0, y, z) != EMPTY)) {
        return Err(Error::InvalidSam("no voxel on the x = 0 plane anchors the body".into()));
    }
    if phases.dims() != sam.dims() {
        return Err(Error::Config(format!(
            "phase field dims {:?} differ from SAM dims {:?}",
            phases.dims(),
            sam.dims()
        )));
    }
    let mat = &params.material;
    let l = mat.voxel_edge;
    let corner_id = |i: usize, j: usize, k: usize| (i * (ny + 1) + j) * (nz + 1) + k;
    let mut node_of = vec![usize::MAX; (nx + 1) * (ny + 1) * (nz + 1)];
    let mut positions = Vec::new();
    let mut masses = Vec::new();
    let mut fixed = Vec::new();

    // nodes in corner order, so numbering does not depend on voxel order
    let mut used = vec![false; node_of.len()];
    for ([x, y, z], _) in sam.voxels() {
        for c in 0..8 {
            used[corner_id(x + (c & 1), y + (c >> 1 & 1), z + (c >> 2 & 1))] = true;
        }
    }
    for i in 0..=nx {
        for j in 0..=ny {
            for k in 0..=nz {
                let cid = corner_id(i, j, k);
                if used[cid] {
                    node_of[cid] = positions.len();
                    positions.push([i as f64 * l, j as f64 * l, k as f64 * l]);
                    masses.push(0.0);
                    fixed.push(i == 0);
                }
            }
        }
    }

    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut springs: Vec<Spring> = Vec::new();
    let k_axial = mat.axial_stiffness();
    let k_diag = mat.diagonal_stiffness();
    let m_corner = mat.voxel_mass() / 8.0;
    for ([x, y, z], code) in sam.voxels() {
        let corners: Vec<usize> = (0..8)
            .map(|c| node_of[corner_id(x + (c & 1), y + (c >> 1 & 1), z + (c >> 2 & 1))])
            .collect();
        for &n in &corners {
            masses[n] += m_corner;
        }
        let phase = if code == CONTRACTILE {
            Some(phases.get(x, y, z).ok_or_else(|| {
                Error::Config(format!("no phase for contractile voxel ({x}, {y}, {z})"))
            })?)
        } else {
            None
        };
        let pairs = voxel_edges()
            .map(|p| (p, SpringKind::Axial))
            .chain(FACE_DIAGONALS.iter().map(|&p| (p, SpringKind::Diagonal)));
        for ((ca, cb), kind) in pairs {
            let (a, b) = (corners[ca].min(corners[cb]), corners[ca].max(corners[cb]));
            let k = match kind {
                SpringKind::Axial => k_axial,
                SpringKind::Diagonal => k_diag,
            };
            let si = *index.entry((a, b)).or_insert_with(|| {
                springs.push(Spring {
                    a,
                    b,
                    rest0: dist(positions[a], positions[b]),
                    stiffness: 0.0,
                    kind,
                    contributors: 0,
                    phases: Vec::new(),
                });
                springs.len() - 1
            });
            let s = &mut springs[si];
            s.stiffness += k;
            s.contributors += 1;
            if let Some(p) = phase {
                s.phases.push(p);
            }
        }
    }

    let mut state = LatticeState::from_parts(positions, masses, fixed, springs, mat);
    let k_max = state.max_stiffness();
    state.damping = state
        .masses
        .iter()
        .map(|&m| 2.0 * params.damping_ratio * (k_max * m).sqrt())
        .collect();
    if !(params.mass_scaling > 0.0) {
        return Err(Error::Config("mass_scaling must be positive".into()));
    }
    for m in &mut state.masses {
        *m *= params.mass_scaling;
    }
    if params.gravity {
        state.gravity = -9.81;
    }
    Ok(state)
}

/// One semi-implicit Euler step. Fixed nodes are never touched.
pub fn step(state: &mut LatticeState, dt: f64) -> Result<()> {
    let bound = state.stable_dt();
    if !(dt > 0.0 && dt <= bound) {
        return Err(Error::Config(format!("dt = {dt} outside (0, {bound}]")));
    }
    step_unchecked(state, dt);
    Ok(())
}

fn step_unchecked(state: &mut LatticeState, dt: f64) {
    state.accumulate_forces();
    let g = state.gravity;
    for i in 0..state.positions.len() {
        if state.fixed[i] {
            continue;
        }
        let m = state.masses[i];
        let c = state.damping[i];
        let v = &mut state.velocities[i];
        let f = state.forces[i];
        let fx = f[0] - c * v[0];
        let fy = f[1] - c * v[1];
        let fz = f[2] - c * v[2] + m * g;
        v[0] += fx / m * dt;
        v[1] += fy / m * dt;
        v[2] += fz / m * dt;
        let p = &mut state.positions[i];
        p[0] += v[0] * dt;
        p[1] += v[1] * dt;
        p[2] += v[2] * dt;
    }
    state.time += dt;
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    /// `(t, free-end centroid)`, first sample at `t = 0`.
    pub samples: Vec<(f64, [f64; 3])>,
    pub voxel_count: usize,
}

impl SimTrace {
    fn planar(&self, i: usize) -> (f64, f64) {
        let (_, c0) = self.samples[0];
        let (_, c) = self.samples[i];
        (c[1] - c0[1], c[2] - c0[2])
    }

    /// Largest yz-plane displacement, ignoring direction.
    pub fn max_planar_displacement(&self) -> f64 {
        (0..self.samples.len())
            .map(|i| {
                let (dy, dz) = self.planar(i);
                dy.hypot(dz)
            })
            .fold(0.0, f64::max)
    }

    pub fn final_planar_displacement(&self) -> f64 {
        let (dy, dz) = self.planar(self.samples.len() - 1);
        dy.hypot(dz)
    }

    pub fn write_csv<W: Write>(&self, mut w: W, params: &SimParams) -> Result<()> {
        let io = |e| Error::io("<trace>", e);
        writeln!(
            w,
            "# voxel_count={} config_hash={}",
            self.voxel_count,
            params.config_hash()
        )
        .map_err(io)?;
        writeln!(w, "t,cx,cy,cz").map_err(io)?;
        for (t, c) in &self.samples {
            writeln!(w, "{t},{},{},{}", c[0], c[1], c[2]).map_err(io)?;
        }
        Ok(())
    }
}

/// Largest yz-plane displacement among samples whose z is not below the
/// start; 0 when the free end never rises.
pub fn fitness_from_trace(trace: &SimTrace) -> f64 {
    let z0 = trace.samples[0].1[2];
    (0..trace.samples.len())
        .filter(|&i| trace.samples[i].1[2] >= z0)
        .map(|i| {
            let (dy, dz) = trace.planar(i);
            dy.hypot(dz)
        })
        .fold(0.0, f64::max)
}

/// Time step that `simulate` uses for this lattice.
pub fn default_dt(state: &LatticeState, params: &SimParams) -> f64 {
    params
        .dt
        .unwrap_or_else(|| params.dt_safety * (state.min_mass() / state.max_stiffness()).sqrt())
}

/// Integrates a lattice for `params.duration` seconds and records the
/// free-end centroid every `sample_every` steps (and at the last step).
pub fn run_lattice(mut state: LatticeState, params: &SimParams, voxel_count: usize) -> Result<SimTrace> {
    if !(params.duration > 0.0) {
        return Err(Error::Config("duration must be positive".into()));
    }
    let dt = default_dt(&state, params);
    let bound = state.stable_dt();
    if !(dt > 0.0 && dt <= bound) {
        return Err(Error::Config(format!("dt = {dt} outside (0, {bound}]")));
    }
    let every = params.sample_every.max(1);
    let steps = (params.duration / dt).ceil() as usize;
    let mut samples = Vec::with_capacity(steps / every + 2);
    samples.push((0.0, state.free_end_centroid()));
    for n in 1..=steps {
        step_unchecked(&mut state, dt);
        if n % every == 0 || n == steps {
            let c = state.free_end_centroid();
            if c.iter().any(|v| !v.is_finite()) || state.positions.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Diverged { time: state.time });
            }
            samples.push((n as f64 * dt, c));
        }
    }
    Ok(SimTrace {
        samples,
        voxel_count,
    })
}

pub fn simulate(sam: &Sam, phases: &PhaseField, params: &SimParams) -> Result<SimTrace> {
    let state = build_lattice(sam, phases, params)?;
    run_lattice(state, params, sam.voxel_count())
}
