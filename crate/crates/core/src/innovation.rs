//! Global historical markings.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Ids handed out when a connection is split by a new hidden node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIds {
    pub node: u64,
    /// Innovation of `src -> node`.
    pub incoming: u64,
    /// Innovation of `node -> dst`.
    pub outgoing: u64,
}

/// Owner of the innovation counter and the per-generation mutation memo.
///
/// Identical structural mutations made in the same generation map to the
/// same ids. Counters never decrease.
#[derive(Debug, Clone)]
pub struct InnovationRegistry {
    next_innovation: u64,
    next_node: u64,
    connections: HashMap<(u64, u64), u64>,
    splits: HashMap<u64, SplitIds>,
}

impl InnovationRegistry {
    /// Registry for genomes whose minimal topology is `n_inputs x n_outputs`.
    ///
    /// Input nodes take ids `0..n_inputs`, outputs follow, and the initial
    /// connection `input i -> output j` has innovation `i * n_outputs + j`.
    pub fn new(n_inputs: usize, n_outputs: usize) -> Self {
        let nodes = (n_inputs + n_outputs) as u64;
        InnovationRegistry {
            next_innovation: (n_inputs * n_outputs) as u64,
            next_node: nodes,
            connections: HashMap::new(),
            splits: HashMap::new(),
        }
    }

    /// Forgets the memo; called once at the start of each generation.
    pub fn new_generation(&mut self) {
        self.connections.clear();
        self.splits.clear();
    }

    pub fn connection(&mut self, src: u64, dst: u64) -> u64 {
        if let Some(&id) = self.connections.get(&(src, dst)) {
            return id;
        }
        let id = self.next_innovation;
        self.next_innovation += 1;
        self.connections.insert((src, dst), id);
        id
    }

    pub fn split(&mut self, innovation: u64) -> SplitIds {
        if let Some(&ids) = self.splits.get(&innovation) {
            return ids;
        }
        let ids = SplitIds {
            node: self.next_node,
            incoming: self.next_innovation,
            outgoing: self.next_innovation + 1,
        };
        self.next_node += 1;
        self.next_innovation += 2;
        self.splits.insert(innovation, ids);
        ids
    }

    pub fn innovation_count(&self) -> u64 {
        self.next_innovation
    }

    pub fn node_count(&self) -> u64 {
        self.next_node
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_generation_same_ids() {
        let mut reg = InnovationRegistry::new(4, 1);
        let a = reg.connection(0, 7);
        let b = reg.connection(0, 7);
        assert_eq!(a, b);
        assert_eq!(a, 4);
        let s1 = reg.split(2);
        let s2 = reg.split(2);
        assert_eq!(s1, s2);
        assert_eq!(s1.node, 5);
    }

    #[test]
    fn new_generation_gets_fresh_ids() {
        let mut reg = InnovationRegistry::new(4, 1);
        let a = reg.connection(1, 4);
        reg.new_generation();
        let b = reg.connection(1, 4);
        assert!(b > a);
        let before = reg.innovation_count();
        reg.split(0);
        assert_eq!(reg.innovation_count(), before + 2);
    }
}
