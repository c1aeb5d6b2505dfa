use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::evaluator::Team;

use super::graph::{VertexLabel, WeightedGraph};

/// Default vertex limit for [`solve_mewc_exact`].
pub const DEFAULT_CLIQUE_LIMIT: usize = 64;

/// Hard ceiling imposed by the bitset representation.
const MAX_VERTICES: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct CliqueSolution {
    /// Sorted vertex ids.
    pub vertices: Vec<usize>,
    pub weight: f64,
    pub proven_optimal: bool,
}

struct Search<'a> {
    graph: &'a WeightedGraph,
    adj: Vec<u128>,
    w: Vec<Vec<f64>>,
    best: Option<(f64, Vec<usize>)>,
}

fn bits(mut set: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let v = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(v)
        }
    })
}

impl Search<'_> {
    /// Upper bound on the weight any extension by vertices of `cand` adds.
    /// Each candidate is credited with its edges to the current clique plus
    /// half of its edges inside `cand`.
    fn extension_bound(&self, cand: u128, attach: &[f64]) -> f64 {
        let mut total = 0.0;
        for v in bits(cand) {
            let mut inner = 0.0;
            for u in bits(cand & self.adj[v]) {
                inner += self.w[v][u];
            }
            let gain = attach[v] + 0.5 * inner;
            if gain > 0.0 {
                total += gain;
            }
        }
        total
    }

    fn consider(&mut self, clique: &[usize]) {
        let mut sorted = clique.to_vec();
        sorted.sort_unstable();
        let weight = self
            .graph
            .clique_weight(&sorted)
            .expect("search only builds cliques");
        let better = match &self.best {
            None => true,
            Some((bw, bv)) => weight > *bw || (weight == *bw && sorted < *bv),
        };
        if better {
            self.best = Some((weight, sorted));
        }
    }

    fn expand(&mut self, clique: &mut Vec<usize>, weight: f64, mut cand: u128, mut done: u128, attach: &[f64]) {
        if cand == 0 {
            if done == 0 {
                self.consider(clique);
            }
            return;
        }
        if let Some((best, _)) = &self.best {
            let slack = 1e-9 * best.abs().max(1.0);
            if weight + self.extension_bound(cand, attach) < best - slack {
                return;
            }
        }
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            let mut next_attach = attach.to_vec();
            for u in bits(cand & self.adj[v]) {
                next_attach[u] += self.w[v][u];
            }
            clique.push(v);
            self.expand(
                clique,
                weight + attach[v],
                cand & self.adj[v],
                done & self.adj[v],
                &next_attach,
            );
            clique.pop();
            cand &= !(1u128 << v);
            done |= 1u128 << v;
        }
    }
}

/// Exact maximum edge-weighted clique over maximal cliques, by
/// Bron–Kerbosch enumeration with weight-bound pruning. Weights must be
/// non-negative. Ties go to the lexicographically smallest vertex set.
pub fn solve_mewc_exact(graph: &WeightedGraph, size_limit: usize) -> Result<CliqueSolution> {
    let n = graph.vertex_count();
    let limit = size_limit.min(MAX_VERTICES);
    if n > limit {
        return Err(Error::TooLarge(format!(
            "{n} vertices exceed the clique solver limit of {limit}"
        )));
    }
    let mut adj = vec![0u128; n];
    let mut w = vec![vec![0.0; n]; n];
    for (&(u, v), e) in &graph.edges {
        if e.weight < 0.0 {
            return Err(Error::NegativeWeight(u, v));
        }
        adj[u] |= 1u128 << v;
        adj[v] |= 1u128 << u;
        w[u][v] = e.weight;
        w[v][u] = e.weight;
    }
    let mut search = Search {
        graph,
        adj,
        w,
        best: None,
    };
    let all = if n == 0 { 0 } else { u128::MAX >> (128 - n) };
    search.expand(&mut Vec::new(), 0.0, all, 0, &vec![0.0; n]);
    let (weight, vertices) = search.best.unwrap_or((0.0, Vec::new()));
    Ok(CliqueSolution {
        vertices,
        weight,
        proven_optimal: true,
    })
}

/// Heroes named by the slot vertices of a clique.
pub fn clique_to_team(graph: &WeightedGraph, clique: &CliqueSolution) -> Result<Team> {
    let mut heroes = BTreeSet::new();
    for &v in &clique.vertices {
        match graph.labels.get(v) {
            None => {
                return Err(Error::LabelMismatch(format!(
                    "vertex {v} is not in a graph of {} vertices",
                    graph.vertex_count()
                )))
            }
            Some(VertexLabel::Slot { hero, .. }) => {
                if !heroes.insert(*hero) {
                    return Err(Error::InconsistentClique(format!(
                        "hero {hero} occupies two slots"
                    )));
                }
            }
            Some(VertexLabel::Group { .. }) => {}
        }
    }
    Ok(heroes.into_iter().collect())
}
