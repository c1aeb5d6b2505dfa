//! Reductions between team selection and classic graph problems.
//!
//! * [`dks_to_du`]: densest k-subgraph instances become team-selection
//!   instances whose optimal teams are the densest k-vertex subsets.
//! * [`du_to_mewc_basic`], [`du_to_mewc_pairs`], [`du_to_mewc_general`]:
//!   team selection becomes maximum edge-weighted clique, for instances
//!   without bonuses, with pair alliances, and with size-q alliances.
//! * [`solve_mewc_exact`] and [`clique_to_team`] close the loop for
//!   cross-checking on small graphs.

mod clique;
mod dks;
mod graph;
mod mewc;

pub use clique::{clique_to_team, solve_mewc_exact, CliqueSolution, DEFAULT_CLIQUE_LIMIT};
pub use dks::{dks_to_du, parse_edge_list, DksInstance, SimpleGraph};
pub use graph::{Edge, VertexLabel, WeightedGraph};
pub use mewc::{
    choose_big_n, du_to_mewc_basic, du_to_mewc_general, du_to_mewc_pairs, DEFAULT_REDUCTION_GUARD,
};
