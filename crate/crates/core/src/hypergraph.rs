//! Hypergraphs in compressed adjacency form and seeded generation of the
//! mixed model with independent edge draws (with replacement).

use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::threshold::EdgeMix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypergraphError {
    #[error("{n} nodes cannot hold an edge of size {k}")]
    TooFewNodes { n: usize, k: u32 },
    #[error("edge {edge} references node {node} outside [0, {n})")]
    NodeOutOfRange { edge: usize, node: u32, n: usize },
    #[error("edge {edge} repeats node {node}")]
    RepeatedNode { edge: usize, node: u32 },
    #[error("node count {0} does not fit in 32 bits")]
    TooManyNodes(usize),
}

/// Nodes `0..n`, edges as sets of distinct node ids, plus the per-node
/// incidence index. Both are stored as flat offset arrays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    edge_offsets: Vec<usize>,
    edge_nodes: Vec<u32>,
    inc_offsets: Vec<usize>,
    inc_edges: Vec<u32>,
}

impl Hypergraph {
    /// Builds a hypergraph from explicit edges, validating ids and distinctness.
    pub fn from_edges<E: AsRef<[u32]>>(n: usize, edges: &[E]) -> Result<Self, HypergraphError> {
        if n > u32::MAX as usize {
            return Err(HypergraphError::TooManyNodes(n));
        }
        let mut edge_offsets = Vec::with_capacity(edges.len() + 1);
        let mut edge_nodes = Vec::new();
        edge_offsets.push(0);
        for (i, e) in edges.iter().enumerate() {
            let e = e.as_ref();
            for (j, &v) in e.iter().enumerate() {
                if v as usize >= n {
                    return Err(HypergraphError::NodeOutOfRange { edge: i, node: v, n });
                }
                if e[..j].contains(&v) {
                    return Err(HypergraphError::RepeatedNode { edge: i, node: v });
                }
            }
            edge_nodes.extend_from_slice(e);
            edge_offsets.push(edge_nodes.len());
        }
        Ok(Self::from_flat(n, edge_offsets, edge_nodes))
    }

    fn from_flat(n: usize, edge_offsets: Vec<usize>, edge_nodes: Vec<u32>) -> Self {
        let mut inc_offsets = vec![0usize; n + 1];
        for &v in &edge_nodes {
            inc_offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            inc_offsets[i + 1] += inc_offsets[i];
        }
        let mut fill = inc_offsets.clone();
        let mut inc_edges = vec![0u32; edge_nodes.len()];
        for e in 0..edge_offsets.len() - 1 {
            for &v in &edge_nodes[edge_offsets[e]..edge_offsets[e + 1]] {
                inc_edges[fill[v as usize]] = e as u32;
                fill[v as usize] += 1;
            }
        }
        Self { n, edge_offsets, edge_nodes, inc_offsets, inc_edges }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_offsets.len() - 1
    }

    pub fn edge(&self, e: usize) -> &[u32] {
        &self.edge_nodes[self.edge_offsets[e]..self.edge_offsets[e + 1]]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        (0..self.edge_count()).map(move |e| self.edge(e))
    }

    /// Ids of the edges containing `v`.
    pub fn incident(&self, v: usize) -> &[u32] {
        &self.inc_edges[self.inc_offsets[v]..self.inc_offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.inc_offsets[v + 1] - self.inc_offsets[v]
    }

    /// Total number of (node, edge) incidences.
    pub fn incidence_count(&self) -> usize {
        self.edge_nodes.len()
    }
}

/// Number of edges of each size: `round(α_i·m)` for all but the last size,
/// the remainder for the last.
pub fn edge_counts(m: usize, mix: &EdgeMix) -> Vec<usize> {
    let s = mix.len();
    let mut counts = Vec::with_capacity(s);
    let mut left = m;
    for &alpha in &mix.fractions()[..s - 1] {
        let c = (libm::round(alpha * m as f64) as usize).min(left);
        counts.push(c);
        left -= c;
    }
    counts.push(left);
    counts
}

/// Appends a uniformly random `k`-subset of `[0, n)` to `out`, redrawing
/// any node already chosen.
pub(crate) fn push_random_subset<R: Rng>(rng: &mut R, n: usize, k: usize, out: &mut Vec<u32>) {
    let start = out.len();
    while out.len() - start < k {
        let v = rng.gen_range(0..n as u32);
        if !out[start..].contains(&v) {
            out.push(v);
        }
    }
}

/// Random mixed hypergraph: `n` nodes, `m` edges split across the sizes of
/// `mix` by [`edge_counts`], each edge an independent uniform subset of
/// distinct nodes. Deterministic in `(n, m, mix, seed)`.
pub fn generate_mixed(n: usize, m: usize, mix: &EdgeMix, seed: u64) -> Result<Hypergraph, HypergraphError> {
    let k_max = mix.max_size();
    if n < k_max as usize {
        return Err(HypergraphError::TooFewNodes { n, k: k_max });
    }
    if n > u32::MAX as usize {
        return Err(HypergraphError::TooManyNodes(n));
    }
    let counts = edge_counts(m, mix);
    let total: usize = counts.iter().zip(mix.sizes()).map(|(&c, &k)| c * k as usize).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edge_offsets = Vec::with_capacity(m + 1);
    let mut edge_nodes = Vec::with_capacity(total);
    edge_offsets.push(0);
    for (&count, &k) in counts.iter().zip(mix.sizes()) {
        for _ in 0..count {
            push_random_subset(&mut rng, n, k as usize, &mut edge_nodes);
            edge_offsets.push(edge_nodes.len());
        }
    }
    Ok(Hypergraph::from_flat(n, edge_offsets, edge_nodes))
}
