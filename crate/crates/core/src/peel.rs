//! Peeling: repeatedly delete a node of degree at most one together with its
//! incident edge, leaving the 2-core.
//!
//! Runs in `O(n + Σ|e|)`. Live degrees are kept as counters and removed edges
//! are flagged; incidence lists are never rewritten, so finding the single
//! live edge of a degree-1 node skips flagged entries lazily.

use alloc::boxed::Box;
use alloc::collections::VecDeque;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hypergraph::Hypergraph;

/// Order in which pending low-degree nodes are taken off the work list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PeelOrder {
    #[default]
    Fifo,
    Lifo,
    /// Uniformly random pending node, driven by the given seed.
    Random(u64),
}

/// Outcome of peeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeelResult {
    pub core_node_count: usize,
    pub core_edge_count: usize,
    /// Removed nodes in order, each with the edge removed alongside it (if any).
    pub removed_pairs: Vec<(u32, Option<u32>)>,
    node_in_core: Vec<bool>,
    edge_in_core: Vec<bool>,
}

impl PeelResult {
    pub fn is_core_empty(&self) -> bool {
        self.core_edge_count == 0
    }

    pub fn node_in_core(&self) -> &[bool] {
        &self.node_in_core
    }

    pub fn edge_in_core(&self) -> &[bool] {
        &self.edge_in_core
    }
}

enum WorkList {
    Queue(VecDeque<u32>),
    Stack(Vec<u32>),
    Random(Vec<u32>, Box<ChaCha8Rng>),
}

impl WorkList {
    fn new(order: PeelOrder) -> Self {
        match order {
            PeelOrder::Fifo => WorkList::Queue(VecDeque::new()),
            PeelOrder::Lifo => WorkList::Stack(Vec::new()),
            PeelOrder::Random(seed) => WorkList::Random(Vec::new(), Box::new(ChaCha8Rng::seed_from_u64(seed))),
        }
    }

    fn push(&mut self, v: u32) {
        match self {
            WorkList::Queue(q) => q.push_back(v),
            WorkList::Stack(s) | WorkList::Random(s, _) => s.push(v),
        }
    }

    fn pop(&mut self) -> Option<u32> {
        match self {
            WorkList::Queue(q) => q.pop_front(),
            WorkList::Stack(s) => s.pop(),
            WorkList::Random(s, rng) => {
                if s.is_empty() {
                    None
                } else {
                    let i = rng.gen_range(0..s.len());
                    Some(s.swap_remove(i))
                }
            }
        }
    }
}

/// Peels with a FIFO work list.
pub fn peel(h: &Hypergraph) -> PeelResult {
    peel_with_order(h, PeelOrder::Fifo)
}

pub fn peel_with_order(h: &Hypergraph, order: PeelOrder) -> PeelResult {
    let n = h.node_count();
    let m = h.edge_count();
    let mut degree: Vec<u32> = (0..n).map(|v| h.degree(v) as u32).collect();
    let mut node_in_core = alloc::vec![true; n];
    let mut edge_in_core = alloc::vec![true; m];
    let mut removed_pairs = Vec::with_capacity(n);
    let mut work = WorkList::new(order);
    for (v, &d) in degree.iter().enumerate() {
        if d <= 1 {
            work.push(v as u32);
        }
    }

    let mut removed_edges = 0;
    while let Some(v) = work.pop() {
        let vi = v as usize;
        if !node_in_core[vi] {
            continue;
        }
        node_in_core[vi] = false;
        if degree[vi] == 0 {
            removed_pairs.push((v, None));
            continue;
        }
        let e = *h
            .incident(vi)
            .iter()
            .find(|&&e| edge_in_core[e as usize])
            .expect("live degree 1 implies one live incident edge");
        edge_in_core[e as usize] = false;
        removed_edges += 1;
        for &u in h.edge(e as usize) {
            let ui = u as usize;
            degree[ui] -= 1;
            // nodes reaching 0 were already queued when they reached 1
            if degree[ui] == 1 && node_in_core[ui] {
                work.push(u);
            }
        }
        removed_pairs.push((v, Some(e)));
    }

    PeelResult {
        core_node_count: n - removed_pairs.len(),
        core_edge_count: m - removed_edges,
        removed_pairs,
        node_in_core,
        edge_in_core,
    }
}

/// `true` iff peeling removes every edge.
pub fn has_empty_core(h: &Hypergraph) -> bool {
    peel(h).is_core_empty()
}
