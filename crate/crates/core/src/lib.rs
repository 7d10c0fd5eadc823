//! Optimal 2-core thresholds for random hypergraphs mixing two edge sizes,
//! linear-time peeling, and an XOR retrieval structure built on the optimal
//! mixture.
//!
//! The crate is `no_std` and only needs `alloc`. IO, parallel Monte-Carlo
//! sweeps and the command-line front end live in `mixcore-cli`.

#![no_std]
// `!(x > 0.0)` style guards are used on purpose: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod hash;
pub mod hypergraph;
pub mod numerics;
pub mod optimizer;
pub mod peel;
pub mod retrieval;
pub mod threshold;

pub use hypergraph::{generate_mixed, Hypergraph, HypergraphError};
pub use numerics::{bisect_root, fit_sigmoid, minimize_1d, sigmoid, Bracket, NumericsError, SigmoidFit};
pub use optimizer::{
    b_prime, general_threshold, optimize_pair, table_scan, uniform_threshold, CaseLabel, OptimizeError, Optimum,
    DEFAULT_EPS,
};
pub use peel::{has_empty_core, peel, peel_with_order, PeelOrder, PeelResult};
pub use retrieval::{assign_edge, EdgeAssignment, RetrievalError, RetrievalStructure};
pub use threshold::{
    aux_f, aux_g, aux_g_deriv, aux_h, special_points, threshold_t, threshold_t_general, EdgeMix, SpecialPoints,
    ThresholdError,
};
