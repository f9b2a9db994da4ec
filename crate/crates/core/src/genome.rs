//! CPPN genomes: node and connection genes, feed-forward evaluation and
//! the NEAT genetic operators.
//!
//! Genomes keep nodes sorted by id and connections sorted by innovation
//! number. Operators never mutate in place; they return new genomes.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet};

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::activation::{Activation, Dictionary};
use crate::error::{Error, Result};
use crate::innovation::InnovationRegistry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Input,
    Output,
    Hidden,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeGene {
    pub id: u64,
    pub kind: NodeKind,
    /// Ignored for input nodes.
    pub activation: Activation,
    /// Ignored for input nodes.
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionGene {
    pub innovation: u64,
    pub src: u64,
    pub dst: u64,
    pub weight: f64,
    pub enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CppnGenome {
    pub nodes: Vec<NodeGene>,
    pub connections: Vec<ConnectionGene>,
    #[serde(skip)]
    pub fitness: Option<f64>,
}

/// Rates and magnitudes used by [`mutate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationParams {
    pub add_connection: f64,
    pub delete_connection: f64,
    pub toggle_connection: f64,
    pub add_node: f64,
    pub delete_node: f64,
    pub activation: f64,
    /// Per-gene probability of Gaussian perturbation of a weight or bias.
    pub weight_perturb: f64,
    /// Per-gene probability of resampling a weight or bias uniformly.
    pub weight_replace: f64,
    pub weight_power: f64,
    pub weight_limit: f64,
    /// Half-width of the uniform range for weights of new genes.
    pub init_weight_range: f64,
}

impl Default for MutationParams {
    fn default() -> Self {
        MutationParams {
            add_connection: 0.2,
            delete_connection: 0.1,
            toggle_connection: 0.5,
            add_node: 0.2,
            delete_node: 0.1,
            activation: 0.4,
            weight_perturb: 0.8,
            weight_replace: 0.1,
            weight_power: 0.5,
            weight_limit: 8.0,
            init_weight_range: 2.0,
        }
    }
}

impl MutationParams {
    /// All rates zero: `mutate` becomes the identity.
    pub fn none() -> Self {
        MutationParams {
            add_connection: 0.0,
            delete_connection: 0.0,
            toggle_connection: 0.0,
            add_node: 0.0,
            delete_node: 0.0,
            activation: 0.0,
            weight_perturb: 0.0,
            weight_replace: 0.0,
            ..MutationParams::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("add_connection", self.add_connection),
            ("delete_connection", self.delete_connection),
            ("toggle_connection", self.toggle_connection),
            ("add_node", self.add_node),
            ("delete_node", self.delete_node),
            ("activation", self.activation),
            ("weight_perturb", self.weight_perturb),
            ("weight_replace", self.weight_replace),
        ];
        for (name, r) in rates {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Config(format!("rate {name} = {r} outside [0, 1]")));
            }
        }
        if self.weight_perturb + self.weight_replace > 1.0 {
            return Err(Error::Config(
                "weight_perturb + weight_replace exceeds 1".into(),
            ));
        }
        Ok(())
    }
}

impl CppnGenome {
    /// Fully connected input->output genome without hidden nodes.
    pub fn minimal<R: Rng + ?Sized>(
        n_inputs: usize,
        n_outputs: usize,
        dictionary: Dictionary,
        init_weight_range: f64,
        rng: &mut R,
    ) -> Self {
        let mut g = Self::minimal_with(n_inputs, n_outputs, Activation::Identity, 0.0);
        for node in g.nodes.iter_mut().filter(|n| n.kind == NodeKind::Output) {
            node.activation = *dictionary.members().choose(rng).expect("non-empty dictionary");
        }
        for c in &mut g.connections {
            c.weight = rng.random_range(-init_weight_range..=init_weight_range);
        }
        g
    }

    /// Deterministic minimal genome with a fixed output activation and weight.
    pub fn minimal_with(
        n_inputs: usize,
        n_outputs: usize,
        output_activation: Activation,
        weight: f64,
    ) -> Self {
        let mut nodes = Vec::with_capacity(n_inputs + n_outputs);
        for i in 0..n_inputs {
            nodes.push(NodeGene {
                id: i as u64,
                kind: NodeKind::Input,
                activation: Activation::Identity,
                bias: 0.0,
            });
        }
        for j in 0..n_outputs {
            nodes.push(NodeGene {
                id: (n_inputs + j) as u64,
                kind: NodeKind::Output,
                activation: output_activation,
                bias: 0.0,
            });
        }
        let mut connections = Vec::with_capacity(n_inputs * n_outputs);
        for i in 0..n_inputs {
            for j in 0..n_outputs {
                connections.push(ConnectionGene {
                    innovation: (i * n_outputs + j) as u64,
                    src: i as u64,
                    dst: (n_inputs + j) as u64,
                    weight,
                    enabled: true,
                });
            }
        }
        CppnGenome {
            nodes,
            connections,
            fitness: None,
        }
    }

    pub fn node(&self, id: u64) -> Option<&NodeGene> {
        self.nodes
            .binary_search_by_key(&id, |n| n.id)
            .ok()
            .map(|i| &self.nodes[i])
    }

    fn node_mut(&mut self, id: u64) -> Option<&mut NodeGene> {
        self.nodes
            .binary_search_by_key(&id, |n| n.id)
            .ok()
            .map(move |i| &mut self.nodes[i])
    }

    pub fn connection(&self, innovation: u64) -> Option<&ConnectionGene> {
        self.connections
            .binary_search_by_key(&innovation, |c| c.innovation)
            .ok()
            .map(|i| &self.connections[i])
    }

    pub fn n_inputs(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Input).count()
    }

    pub fn n_outputs(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Output).count()
    }

    pub fn hidden_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Hidden).count()
    }

    pub fn enabled_connection_count(&self) -> usize {
        self.connections.iter().filter(|c| c.enabled).count()
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Structure(m));
        for w in self.nodes.windows(2) {
            if w[0].id >= w[1].id {
                return err(format!("node ids not strictly increasing at {}", w[1].id));
            }
        }
        for w in self.connections.windows(2) {
            if w[0].innovation >= w[1].innovation {
                return err(format!(
                    "innovations not strictly increasing at {}",
                    w[1].innovation
                ));
            }
        }
        let mut pairs = HashSet::new();
        for c in &self.connections {
            let (Some(s), Some(d)) = (self.node(c.src), self.node(c.dst)) else {
                return err(format!("connection {} references a missing node", c.innovation));
            };
            if d.kind == NodeKind::Input {
                return err(format!("connection {} targets an input", c.innovation));
            }
            if s.kind == NodeKind::Output {
                return err(format!("connection {} leaves an output", c.innovation));
            }
            if c.enabled && !pairs.insert((c.src, c.dst)) {
                return err(format!(
                    "duplicate enabled connection {} -> {}",
                    c.src, c.dst
                ));
            }
            if !c.weight.is_finite() {
                return err(format!("connection {} has non-finite weight", c.innovation));
            }
        }
        self.topological_order().map(|_| ())
    }

    fn enabled_successors(&self) -> BTreeMap<u64, Vec<u64>> {
        let mut succ: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for c in self.connections.iter().filter(|c| c.enabled) {
            succ.entry(c.src).or_default().push(c.dst);
        }
        succ
    }

    /// Kahn's algorithm over enabled connections; ties broken by node id.
    fn topological_order(&self) -> Result<Vec<u64>> {
        let mut indeg: BTreeMap<u64, usize> = self.nodes.iter().map(|n| (n.id, 0)).collect();
        for c in self.connections.iter().filter(|c| c.enabled) {
            *indeg
                .get_mut(&c.dst)
                .ok_or_else(|| Error::Structure(format!("missing node {}", c.dst)))? += 1;
        }
        let succ = self.enabled_successors();
        let mut ready: BinaryHeap<Reverse<u64>> = indeg
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&id, _)| Reverse(id))
            .collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(Reverse(id)) = ready.pop() {
            order.push(id);
            for &d in succ.get(&id).map(Vec::as_slice).unwrap_or(&[]) {
                let e = indeg.get_mut(&d).expect("checked above");
                *e -= 1;
                if *e == 0 {
                    ready.push(Reverse(d));
                }
            }
        }
        if order.len() != self.nodes.len() {
            return Err(Error::Structure("cycle among enabled connections".into()));
        }
        Ok(order)
    }

    /// True if `to` is reachable from `from` along enabled connections.
    fn reaches(&self, from: u64, to: u64) -> bool {
        if from == to {
            return true;
        }
        let succ = self.enabled_successors();
        let mut stack = vec![from];
        let mut seen = HashSet::new();
        while let Some(n) = stack.pop() {
            if n == to {
                return true;
            }
            if !seen.insert(n) {
                continue;
            }
            if let Some(next) = succ.get(&n) {
                stack.extend(next.iter().copied());
            }
        }
        false
    }

    fn has_enabled_pair(&self, src: u64, dst: u64, except: Option<u64>) -> bool {
        self.connections
            .iter()
            .any(|c| c.enabled && c.src == src && c.dst == dst && Some(c.innovation) != except)
    }

    fn insert_connection(&mut self, gene: ConnectionGene) {
        let pos = self
            .connections
            .binary_search_by_key(&gene.innovation, |c| c.innovation)
            .unwrap_err();
        self.connections.insert(pos, gene);
    }

    fn insert_node(&mut self, gene: NodeGene) {
        let pos = self
            .nodes
            .binary_search_by_key(&gene.id, |n| n.id)
            .unwrap_err();
        self.nodes.insert(pos, gene);
    }

    /// Compiles the enabled graph into an evaluation plan.
    pub fn compile(&self) -> Result<Network> {
        let order = self.topological_order()?;
        let slot_of: BTreeMap<u64, usize> =
            self.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.nodes.len()];
        for c in self.connections.iter().filter(|c| c.enabled) {
            incoming[slot_of[&c.dst]].push((slot_of[&c.src], c.weight));
        }
        let mut plan = Vec::new();
        let mut edges = Vec::new();
        for id in order {
            let slot = slot_of[&id];
            let node = &self.nodes[slot];
            if node.kind == NodeKind::Input {
                continue;
            }
            let start = edges.len();
            edges.extend(incoming[slot].iter().copied());
            plan.push(PlannedNode {
                slot,
                activation: node.activation,
                bias: node.bias,
                edges: start..edges.len(),
            });
        }
        let slots_of = |kind| {
            self.nodes
                .iter()
                .enumerate()
                .filter(|(_, n)| n.kind == kind)
                .map(|(i, _)| i)
                .collect::<Vec<_>>()
        };
        Ok(Network {
            n_slots: self.nodes.len(),
            inputs: slots_of(NodeKind::Input),
            outputs: slots_of(NodeKind::Output),
            plan,
            edges,
        })
    }

    /// One feed-forward pass. Compiles on every call; use [`compile`](Self::compile)
    /// for repeated queries.
    pub fn forward(&self, inputs: &[f64]) -> Result<Vec<f64>> {
        self.compile()?.evaluate(inputs)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let mut g: CppnGenome = serde_json::from_str(s)?;
        g.nodes.sort_by_key(|n| n.id);
        g.connections.sort_by_key(|c| c.innovation);
        g.validate()?;
        Ok(g)
    }
}

#[derive(Debug, Clone)]
struct PlannedNode {
    slot: usize,
    activation: Activation,
    bias: f64,
    edges: std::ops::Range<usize>,
}

/// A compiled genome: nodes in topological order with their incoming edges.
#[derive(Debug, Clone)]
pub struct Network {
    n_slots: usize,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    plan: Vec<PlannedNode>,
    edges: Vec<(usize, f64)>,
}

impl Network {
    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Enabled connections of the source genome.
    pub fn connection_count(&self) -> usize {
        self.edges.len()
    }

    pub fn hidden_count(&self) -> usize {
        self.plan.len() - self.outputs.len()
    }

    pub fn evaluate(&self, inputs: &[f64]) -> Result<Vec<f64>> {
        let mut values = vec![0.0; self.n_slots];
        let mut out = vec![0.0; self.outputs.len()];
        self.evaluate_into(inputs, &mut values, &mut out)?;
        Ok(out)
    }

    /// Allocation-free variant; `scratch` is resized as needed.
    pub fn evaluate_into(&self, inputs: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) -> Result<()> {
        if inputs.len() != self.inputs.len() || out.len() != self.outputs.len() {
            return Err(Error::Arity {
                expected: self.inputs.len(),
                got: inputs.len(),
            });
        }
        scratch.clear();
        scratch.resize(self.n_slots, 0.0);
        for (&slot, &x) in self.inputs.iter().zip(inputs) {
            scratch[slot] = x;
        }
        for node in &self.plan {
            let sum = self.edges[node.edges.clone()]
                .iter()
                .fold(node.bias, |acc, &(src, w)| acc + w * scratch[src]);
            scratch[node.slot] = node.activation.apply(sum);
        }
        for (o, &slot) in out.iter_mut().zip(&self.outputs) {
            *o = scratch[slot];
        }
        Ok(())
    }
}

/// Excess/disjoint/matching breakdown of two genomes' connection genes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneAlignment {
    pub excess: usize,
    pub disjoint: usize,
    pub matching: usize,
    /// Mean |weight difference| over matching genes (0 when none match).
    pub mean_weight_diff: f64,
    /// Normaliser: the larger gene count, or 1 when both are below 20.
    pub n: f64,
}

pub const SMALL_GENOME: usize = 20;

pub fn align(a: &CppnGenome, b: &CppnGenome) -> GeneAlignment {
    let (ga, gb) = (&a.connections, &b.connections);
    let max_a = ga.last().map(|c| c.innovation);
    let max_b = gb.last().map(|c| c.innovation);
    // Genes past the other genome's highest innovation are excess.
    let cutoff = match (max_a, max_b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        _ => None,
    };
    let classify = |innov: u64| match cutoff {
        Some(c) if innov <= c => false,
        _ => true,
    };
    let (mut i, mut j) = (0, 0);
    let (mut excess, mut disjoint, mut matching) = (0, 0, 0);
    let mut wsum = 0.0;
    while i < ga.len() || j < gb.len() {
        let ia = ga.get(i).map(|c| c.innovation);
        let ib = gb.get(j).map(|c| c.innovation);
        match (ia, ib) {
            (Some(x), Some(y)) if x == y => {
                matching += 1;
                wsum += (ga[i].weight - gb[j].weight).abs();
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                if classify(x) { excess += 1 } else { disjoint += 1 }
                i += 1;
            }
            (Some(_), Some(y)) => {
                if classify(y) { excess += 1 } else { disjoint += 1 }
                j += 1;
            }
            (Some(x), None) => {
                if classify(x) { excess += 1 } else { disjoint += 1 }
                i += 1;
            }
            (None, Some(y)) => {
                if classify(y) { excess += 1 } else { disjoint += 1 }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    let larger = ga.len().max(gb.len());
    let n = if ga.len() < SMALL_GENOME && gb.len() < SMALL_GENOME {
        1.0
    } else {
        larger as f64
    };
    GeneAlignment {
        excess,
        disjoint,
        matching,
        mean_weight_diff: if matching == 0 { 0.0 } else { wsum / matching as f64 },
        n,
    }
}

/// Compatibility distance `c1*E/N + c2*D/N + c3*mean|dw|`.
pub fn compatibility_distance(a: &CppnGenome, b: &CppnGenome, c1: f64, c2: f64, c3: f64) -> f64 {
    let al = align(a, b);
    c1 * al.excess as f64 / al.n + c2 * al.disjoint as f64 / al.n + c3 * al.mean_weight_diff
}

/// NEAT crossover. Matching genes come from either parent with equal
/// probability; disjoint and excess genes come from the fitter parent
/// (a random parent on ties). Enabled genes that would duplicate a pair or
/// close a cycle are disabled in the child.
pub fn crossover<R: Rng + ?Sized>(a: &CppnGenome, b: &CppnGenome, rng: &mut R) -> CppnGenome {
    let fa = a.fitness.unwrap_or(f64::NEG_INFINITY);
    let fb = b.fitness.unwrap_or(f64::NEG_INFINITY);
    let a_fitter = if fa > fb {
        true
    } else if fb > fa {
        false
    } else {
        rng.random_bool(0.5)
    };
    let (fit, other) = if a_fitter { (a, b) } else { (b, a) };

    let mut connections = Vec::with_capacity(fit.connections.len());
    for gene in &fit.connections {
        let chosen = match other.connection(gene.innovation) {
            Some(og) if rng.random_bool(0.5) => og,
            _ => gene,
        };
        connections.push(chosen.clone());
    }
    let nodes = fit
        .nodes
        .iter()
        .map(|n| match other.node(n.id) {
            Some(on) if on.kind == n.kind && rng.random_bool(0.5) => on.clone(),
            _ => n.clone(),
        })
        .collect();
    let mut child = CppnGenome {
        nodes,
        connections,
        fitness: None,
    };
    repair(&mut child);
    child
}

/// Disables enabled genes (in innovation order) that duplicate an enabled
/// pair or close a cycle.
fn repair(g: &mut CppnGenome) {
    let flags: Vec<bool> = g.connections.iter().map(|c| c.enabled).collect();
    for c in &mut g.connections {
        c.enabled = false;
    }
    for (i, was_enabled) in flags.into_iter().enumerate() {
        if !was_enabled {
            continue;
        }
        let (src, dst) = (g.connections[i].src, g.connections[i].dst);
        if !g.has_enabled_pair(src, dst, None) && !g.reaches(dst, src) {
            g.connections[i].enabled = true;
        }
    }
}

fn random_weight<R: Rng + ?Sized>(range: f64, rng: &mut R) -> f64 {
    rng.random_range(-range..=range)
}

/// Adds a connection between a random unconnected, cycle-free pair.
/// Returns the genome unchanged when no such pair exists.
pub fn add_connection<R: Rng + ?Sized>(
    g: &CppnGenome,
    params: &MutationParams,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> CppnGenome {
    let existing: BTreeSet<(u64, u64)> = g.connections.iter().map(|c| (c.src, c.dst)).collect();
    let mut candidates = Vec::new();
    for s in g.nodes.iter().filter(|n| n.kind != NodeKind::Output) {
        for d in g.nodes.iter().filter(|n| n.kind != NodeKind::Input) {
            if s.id != d.id && !existing.contains(&(s.id, d.id)) && !g.reaches(d.id, s.id) {
                candidates.push((s.id, d.id));
            }
        }
    }
    let Some(&(src, dst)) = candidates.choose(rng) else {
        return g.clone();
    };
    let innovation = registry.connection(src, dst);
    if g.connection(innovation).is_some() {
        return g.clone();
    }
    let mut out = g.clone();
    out.insert_connection(ConnectionGene {
        innovation,
        src,
        dst,
        weight: random_weight(params.init_weight_range, rng),
        enabled: true,
    });
    out
}

/// Splits the connection with `innovation`: the original is disabled, a new
/// hidden node `h` is inserted with `src -> h` weight 1 and `h -> dst` the
/// old weight.
pub fn split_connection(
    g: &CppnGenome,
    innovation: u64,
    activation: Activation,
    registry: &mut InnovationRegistry,
) -> CppnGenome {
    let Some(conn) = g.connection(innovation).filter(|c| c.enabled).cloned() else {
        return g.clone();
    };
    let ids = registry.split(innovation);
    if g.node(ids.node).is_some()
        || g.connection(ids.incoming).is_some()
        || g.connection(ids.outgoing).is_some()
    {
        return g.clone();
    }
    let mut out = g.clone();
    if let Ok(i) = out.connections.binary_search_by_key(&innovation, |c| c.innovation) {
        out.connections[i].enabled = false;
    }
    out.insert_node(NodeGene {
        id: ids.node,
        kind: NodeKind::Hidden,
        activation,
        bias: 0.0,
    });
    out.insert_connection(ConnectionGene {
        innovation: ids.incoming,
        src: conn.src,
        dst: ids.node,
        weight: 1.0,
        enabled: true,
    });
    out.insert_connection(ConnectionGene {
        innovation: ids.outgoing,
        src: ids.node,
        dst: conn.dst,
        weight: conn.weight,
        enabled: true,
    });
    out
}

pub fn add_node<R: Rng + ?Sized>(
    g: &CppnGenome,
    dictionary: Dictionary,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> CppnGenome {
    let enabled: Vec<u64> = g
        .connections
        .iter()
        .filter(|c| c.enabled)
        .map(|c| c.innovation)
        .collect();
    let Some(&innovation) = enabled.choose(rng) else {
        return g.clone();
    };
    let activation = *dictionary.members().choose(rng).expect("non-empty dictionary");
    split_connection(g, innovation, activation, registry)
}

pub fn delete_connection<R: Rng + ?Sized>(g: &CppnGenome, rng: &mut R) -> CppnGenome {
    if g.connections.is_empty() {
        return g.clone();
    }
    let mut out = g.clone();
    let i = rng.random_range(0..out.connections.len());
    out.connections.remove(i);
    out
}

/// Removes a random hidden node together with every connection touching it.
pub fn delete_node<R: Rng + ?Sized>(g: &CppnGenome, rng: &mut R) -> CppnGenome {
    let hidden: Vec<u64> = g
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::Hidden)
        .map(|n| n.id)
        .collect();
    let Some(&id) = hidden.choose(rng) else {
        return g.clone();
    };
    let mut out = g.clone();
    out.nodes.retain(|n| n.id != id);
    out.connections.retain(|c| c.src != id && c.dst != id);
    out
}

/// Flips the enabled flag of a random connection. Re-enabling is skipped
/// when it would duplicate an enabled pair or create a cycle.
pub fn toggle_connection<R: Rng + ?Sized>(g: &CppnGenome, rng: &mut R) -> CppnGenome {
    if g.connections.is_empty() {
        return g.clone();
    }
    let i = rng.random_range(0..g.connections.len());
    let c = &g.connections[i];
    if !c.enabled && (g.has_enabled_pair(c.src, c.dst, None) || g.reaches(c.dst, c.src)) {
        return g.clone();
    }
    let mut out = g.clone();
    out.connections[i].enabled = !out.connections[i].enabled;
    out
}

/// Resamples the activation of a random non-input node.
pub fn mutate_activation<R: Rng + ?Sized>(
    g: &CppnGenome,
    dictionary: Dictionary,
    rng: &mut R,
) -> CppnGenome {
    let ids: Vec<u64> = g
        .nodes
        .iter()
        .filter(|n| n.kind != NodeKind::Input)
        .map(|n| n.id)
        .collect();
    let Some(&id) = ids.choose(rng) else {
        return g.clone();
    };
    let mut out = g.clone();
    let act = *dictionary.members().choose(rng).expect("non-empty dictionary");
    if let Some(n) = out.node_mut(id) {
        n.activation = act;
    }
    out
}

fn perturb_value<R: Rng + ?Sized>(v: f64, params: &MutationParams, noise: &Normal<f64>, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    if u < params.weight_replace {
        random_weight(params.weight_limit, rng)
    } else if u < params.weight_replace + params.weight_perturb {
        (v + noise.sample(rng)).clamp(-params.weight_limit, params.weight_limit)
    } else {
        v
    }
}

/// Perturbs connection weights and non-input biases.
pub fn perturb_weights<R: Rng + ?Sized>(g: &CppnGenome, params: &MutationParams, rng: &mut R) -> CppnGenome {
    if params.weight_perturb == 0.0 && params.weight_replace == 0.0 {
        return g.clone();
    }
    let noise = Normal::new(0.0, params.weight_power).expect("finite power");
    let mut out = g.clone();
    for c in &mut out.connections {
        c.weight = perturb_value(c.weight, params, &noise, rng);
    }
    for n in out.nodes.iter_mut().filter(|n| n.kind != NodeKind::Input) {
        n.bias = perturb_value(n.bias, params, &noise, rng);
    }
    out
}

/// Applies each operator once with its configured probability, then the
/// weight perturbation.
pub fn mutate<R: Rng + ?Sized>(
    g: &CppnGenome,
    params: &MutationParams,
    dictionary: Dictionary,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> CppnGenome {
    let mut out = g.clone();
    out.fitness = None;
    if rng.random_bool(params.add_node) {
        out = add_node(&out, dictionary, registry, rng);
    }
    if rng.random_bool(params.add_connection) {
        out = add_connection(&out, params, registry, rng);
    }
    if rng.random_bool(params.delete_node) {
        out = delete_node(&out, rng);
    }
    if rng.random_bool(params.delete_connection) {
        out = delete_connection(&out, rng);
    }
    if rng.random_bool(params.toggle_connection) {
        out = toggle_connection(&out, rng);
    }
    if rng.random_bool(params.activation) {
        out = mutate_activation(&out, dictionary, rng);
    }
    perturb_weights(&out, params, rng)
}
