//! Substrate networks painted by a CPPN.
//!
//! The CPPN is queried once per adjacent-layer neuron pair for a weight and
//! once per neuron for a bias. Weak weight outputs mean "no connection";
//! the rest are rescaled to `[-max_weight, max_weight]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{CppnGenome, Network};

pub const PHASE_LIMIT: f64 = 2.0 * PI;

/// Neuron coordinates, one list per layer, input layer first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstrateLayout {
    pub layers: Vec<Vec<[f64; 2]>>,
}

impl Default for SubstrateLayout {
    /// 4 inputs, hidden layers of 7 and 6, one output.
    fn default() -> Self {
        SubstrateLayout::with_hidden(&[7, 6])
    }
}

impl SubstrateLayout {
    pub const INPUTS: usize = 4;
    pub const OUTPUTS: usize = 1;

    /// Layers spread evenly over y in [-1, 1]; neurons in a layer spread
    /// evenly over x in [-1, 1], a lone neuron sitting at x = 0.
    pub fn with_hidden(hidden: &[usize]) -> Self {
        let mut sizes = vec![Self::INPUTS];
        sizes.extend_from_slice(hidden);
        sizes.push(Self::OUTPUTS);
        let n_layers = sizes.len();
        let spread = |i: usize, n: usize| {
            if n == 1 {
                0.0
            } else {
                -1.0 + 2.0 * i as f64 / (n - 1) as f64
            }
        };
        let layers = sizes
            .iter()
            .enumerate()
            .map(|(l, &n)| {
                let y = spread(l, n_layers);
                (0..n).map(|i| [spread(i, n), y]).collect()
            })
            .collect();
        SubstrateLayout { layers }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.len() < 3 {
            return Err(Error::Config("substrate needs at least one hidden layer".into()));
        }
        if self.layers[0].len() != Self::INPUTS {
            return Err(Error::Config(format!(
                "substrate input layer must have {} neurons",
                Self::INPUTS
            )));
        }
        if self.layers.last().map(Vec::len) != Some(Self::OUTPUTS) {
            return Err(Error::Config("substrate output layer must have 1 neuron".into()));
        }
        if self.layers.iter().any(Vec::is_empty) {
            return Err(Error::Config("empty substrate layer".into()));
        }
        let all: Vec<[f64; 2]> = self.layers.iter().flatten().copied().collect();
        if all.iter().flatten().any(|c| !(-1.0..=1.0).contains(c)) {
            return Err(Error::Config("substrate coordinates must lie in [-1, 1]".into()));
        }
        for (i, a) in all.iter().enumerate() {
            if all[..i].contains(a) {
                return Err(Error::Config(format!("duplicate substrate coordinate {a:?}")));
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn hidden_count(&self) -> usize {
        self.layers[1..self.layers.len() - 1].iter().map(Vec::len).sum()
    }

    /// First node id of every layer, plus the total as a sentinel.
    fn offsets(&self) -> Vec<usize> {
        let mut out = vec![0];
        for l in &self.layers {
            out.push(out.last().unwrap() + l.len());
        }
        out
    }

    fn coords(&self) -> Vec<[f64; 2]> {
        self.layers.iter().flatten().copied().collect()
    }

    /// Sum over adjacent layers of the layer-size products.
    pub fn max_connections(&self) -> usize {
        self.layers.windows(2).map(|w| w[0].len() * w[1].len()).sum()
    }
}

/// Threshold and output range of the weight map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryParams {
    pub threshold: f64,
    pub max_weight: f64,
}

impl Default for QueryParams {
    fn default() -> Self {
        QueryParams {
            threshold: 0.2,
            max_weight: 3.0,
        }
    }
}

impl QueryParams {
    /// `sign(r) * (|r| - t) / (1 - t) * max`, with `|r|` capped at 1.
    fn scale(&self, raw: f64) -> f64 {
        if !raw.is_finite() || self.threshold >= 1.0 {
            return 0.0;
        }
        let mag = (raw.abs().min(1.0) - self.threshold).max(0.0) / (1.0 - self.threshold);
        raw.signum() * mag * self.max_weight
    }

    /// `None` below the threshold.
    pub fn map_weight(&self, raw: f64) -> Option<f64> {
        if raw.is_nan() || raw.abs() < self.threshold {
            return None;
        }
        Some(self.scale(raw))
    }

    pub fn map_bias(&self, raw: f64) -> f64 {
        self.scale(raw)
    }
}

/// CPPN outputs: `[0]` weight, `[1]` bias.
pub const CPPN_OUTPUTS: usize = 2;

pub fn raw_weight_2d(cppn: &Network, src: [f64; 2], dst: [f64; 2]) -> Result<f64> {
    Ok(cppn.evaluate(&[dst[0], dst[1], src[0], src[1]])?[0])
}

pub fn query_weight_2d(cppn: &Network, src: [f64; 2], dst: [f64; 2], q: &QueryParams) -> Result<Option<f64>> {
    Ok(q.map_weight(raw_weight_2d(cppn, src, dst)?))
}

pub fn query_bias_2d(cppn: &Network, node: [f64; 2], q: &QueryParams) -> Result<f64> {
    Ok(q.map_bias(cppn.evaluate(&[node[0], node[1], 0.0, 0.0])?[1]))
}

/// 6-input analogue of [`query_weight_2d`].
pub fn query_weight_3d(cppn: &Network, src: [f64; 3], dst: [f64; 3], q: &QueryParams) -> Result<Option<f64>> {
    let raw = cppn.evaluate(&[dst[0], dst[1], dst[2], src[0], src[1], src[2]])?[0];
    Ok(q.map_weight(raw))
}

pub fn query_bias_3d(cppn: &Network, node: [f64; 3], q: &QueryParams) -> Result<f64> {
    let raw = cppn.evaluate(&[node[0], node[1], node[2], 0.0, 0.0, 0.0])?[1];
    Ok(q.map_bias(raw))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstrateConnection {
    pub src: usize,
    pub dst: usize,
    pub w: f64,
}

/// Node ids are layer-major positions in the layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstrateNet {
    pub layout: SubstrateLayout,
    pub connections: Vec<SubstrateConnection>,
    /// One per node; input biases are stored but unused.
    pub biases: Vec<f64>,
    #[serde(skip)]
    layer_of: Vec<usize>,
}

impl SubstrateNet {
    /// Assembles and checks a net from explicit parts.
    pub fn from_parts(
        layout: SubstrateLayout,
        mut connections: Vec<SubstrateConnection>,
        biases: Vec<f64>,
    ) -> Result<Self> {
        layout.validate()?;
        let offsets = layout.offsets();
        let n = layout.node_count();
        if biases.len() != n {
            return Err(Error::Structure(format!("expected {n} biases, got {}", biases.len())));
        }
        let layer_of: Vec<usize> = (0..layout.layers.len())
            .flat_map(|l| std::iter::repeat_n(l, offsets[l + 1] - offsets[l]))
            .collect();
        for c in &connections {
            if c.src >= n || c.dst >= n || layer_of[c.dst] != layer_of[c.src] + 1 {
                return Err(Error::Structure(format!(
                    "connection {} -> {} does not join adjacent layers",
                    c.src, c.dst
                )));
            }
            if !c.w.is_finite() {
                return Err(Error::Structure(format!("non-finite weight on {} -> {}", c.src, c.dst)));
            }
        }
        connections.sort_by_key(|c| (c.src, c.dst));
        if connections.windows(2).any(|w| (w[0].src, w[0].dst) == (w[1].src, w[1].dst)) {
            return Err(Error::Structure("duplicate substrate connection".into()));
        }
        Ok(SubstrateNet {
            layout,
            connections,
            biases,
            layer_of,
        })
    }

    pub fn connection_count(&self) -> usize {
        self.connections.len()
    }

    pub fn hidden_count(&self) -> usize {
        self.layout.hidden_count()
    }

    pub fn weight(&self, src: usize, dst: usize) -> Option<f64> {
        self.connections
            .binary_search_by_key(&(src, dst), |c| (c.src, c.dst))
            .ok()
            .map(|i| self.connections[i].w)
    }

    /// Forward pass: ReLU hidden layers, identity output clamped to
    /// `[-2 pi, 2 pi]`.
    pub fn forward(&self, inputs: [f64; 4]) -> f64 {
        let n = self.biases.len();
        let mut values = vec![0.0; n];
        values[..4].copy_from_slice(&inputs);
        let offsets = self.layout.offsets();
        let last = self.layout.layers.len() - 1;
        let mut sums = self.biases.clone();
        let mut ci = 0;
        for l in 1..=last {
            while ci < self.connections.len() && self.layer_of[self.connections[ci].src] == l - 1 {
                let c = &self.connections[ci];
                sums[c.dst] += c.w * values[c.src];
                ci += 1;
            }
            for id in offsets[l]..offsets[l + 1] {
                values[id] = if l == last { sums[id] } else { sums[id].max(0.0) };
            }
        }
        let out = values[n - 1];
        if out.is_nan() {
            0.0
        } else {
            out.clamp(-PHASE_LIMIT, PHASE_LIMIT)
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: SubstrateNet = serde_json::from_str(s)?;
        SubstrateNet::from_parts(raw.layout, raw.connections, raw.biases)
    }
}

/// Queries every adjacent-layer pair and every node bias, in layer-major,
/// index-minor order.
pub fn build_substrate(cppn: &CppnGenome, layout: &SubstrateLayout, q: &QueryParams) -> Result<SubstrateNet> {
    if cppn.n_inputs() != 4 || cppn.n_outputs() != CPPN_OUTPUTS {
        return Err(Error::Arity {
            expected: 4,
            got: cppn.n_inputs(),
        });
    }
    let net = cppn.compile()?;
    build_substrate_with(&net, layout, q)
}

pub fn build_substrate_with(cppn: &Network, layout: &SubstrateLayout, q: &QueryParams) -> Result<SubstrateNet> {
    layout.validate()?;
    let coords = layout.coords();
    let offsets = layout.offsets();
    let mut connections = Vec::new();
    let mut scratch = Vec::new();
    let mut out = [0.0; CPPN_OUTPUTS];
    for l in 0..layout.layers.len() - 1 {
        for src in offsets[l]..offsets[l + 1] {
            for dst in offsets[l + 1]..offsets[l + 2] {
                let (s, d) = (coords[src], coords[dst]);
                cppn.evaluate_into(&[d[0], d[1], s[0], s[1]], &mut scratch, &mut out)?;
                if let Some(w) = q.map_weight(out[0]) {
                    connections.push(SubstrateConnection { src, dst, w });
                }
            }
        }
    }
    let mut biases = Vec::with_capacity(coords.len());
    for c in &coords {
        cppn.evaluate_into(&[c[0], c[1], 0.0, 0.0], &mut scratch, &mut out)?;
        biases.push(q.map_bias(out[1]));
    }
    SubstrateNet::from_parts(layout.clone(), connections, biases)
}
