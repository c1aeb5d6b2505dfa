use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::instance::{BonusKey, Hero, Instance};

/// Simple undirected graph; edges are stored as `(u, v)` with `u < v`,
/// sorted and without duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::format(format!("self-loop on vertex {u}")));
            }
            if u.max(v) >= vertex_count {
                return Err(Error::format(format!(
                    "edge ({u}, {v}) out of range for {vertex_count} vertices"
                )));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(SimpleGraph {
            vertex_count,
            edges: set.into_iter().collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edges with both endpoints in `subset`.
    pub fn induced_edges(&self, subset: &[usize]) -> usize {
        let set: BTreeSet<usize> = subset.iter().copied().collect();
        self.edges
            .iter()
            .filter(|(u, v)| set.contains(u) && set.contains(v))
            .count()
    }
}

/// Parses `u v` pairs, one per line, 0-based; `#` starts a comment. The
/// vertex count is `vertices` when given, else one past the largest id.
pub fn parse_edge_list(text: &str, vertices: Option<usize>) -> Result<SimpleGraph> {
    let mut edges = Vec::new();
    let mut max_id = None;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Format {
            line: n + 1,
            column: 0,
            message: msg,
        };
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(err(format!("expected `u v`, found `{line}`")));
        }
        let u: usize = parts[0].parse().map_err(|e| err(format!("bad vertex `{}`: {e}", parts[0])))?;
        let v: usize = parts[1].parse().map_err(|e| err(format!("bad vertex `{}`: {e}", parts[1])))?;
        if u == v {
            return Err(err(format!("self-loop on vertex {u}")));
        }
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        edges.push((u, v));
    }
    let inferred = max_id.map_or(0, |m| m + 1);
    let count = match vertices {
        Some(c) if c < inferred => {
            return Err(Error::format(format!(
                "edge list mentions vertex {} but only {c} vertices were declared",
                inferred - 1
            )))
        }
        Some(c) => c,
        None => inferred,
    };
    SimpleGraph::new(count, edges)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DksInstance {
    pub graph: SimpleGraph,
    pub k: usize,
}

/// One hero per vertex with equal power, one two-member alliance per edge
/// that grants `edge_bonus` to both endpoints once both are fielded, and a
/// team cap of `k`.
pub fn dks_to_du(dks: &DksInstance, base_power: f64, edge_bonus: f64) -> Result<Instance> {
    let n = dks.graph.vertex_count();
    if dks.k == 0 || dks.k > n {
        return Err(Error::InvalidK {
            k: dks.k,
            vertices: n,
        });
    }
    if !base_power.is_finite() || base_power < 0.0 {
        return Err(Error::NotApplicable(format!("base power {base_power} is negative")));
    }
    if !edge_bonus.is_finite() || edge_bonus <= 0.0 {
        return Err(Error::NotApplicable(format!("edge bonus {edge_bonus} is not positive")));
    }
    let alliance_name = |u: usize, v: usize| format!("e{u}_{v}");
    let mut heroes: Vec<Hero> = (0..n)
        .map(|id| Hero {
            id,
            name: format!("v{id}"),
            power: base_power,
            alliances: BTreeSet::new(),
        })
        .collect();
    let mut alliances = Vec::with_capacity(dks.graph.edges().len());
    let mut bonuses = BTreeMap::new();
    for (j, &(u, v)) in dks.graph.edges().iter().enumerate() {
        let name = alliance_name(u, v);
        heroes[u].alliances.insert(name.clone());
        heroes[v].alliances.insert(name.clone());
        alliances.push(name);
        for hero in [u, v] {
            bonuses.insert(
                BonusKey {
                    hero,
                    alliance: j,
                    threshold: 2,
                },
                edge_bonus,
            );
        }
    }
    Instance::new(heroes, alliances, bonuses, dks.k, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{brute_force, DEFAULT_SUBSET_GUARD};

    #[test]
    fn edge_list_parsing() {
        let g = parse_edge_list("# triangle\n0 1\n1 2 # tail\n\n2 0\n1 0\n", None).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert!(matches!(parse_edge_list("0 1 2\n", None), Err(Error::Format { line: 1, .. })));
        assert!(parse_edge_list("0 0\n", None).is_err());
        assert_eq!(parse_edge_list("", Some(4)).unwrap().vertex_count(), 4);
        assert!(parse_edge_list("0 5\n", Some(3)).is_err());
    }

    #[test]
    fn triangle_pairs() {
        let g = parse_edge_list("0 1\n1 2\n0 2\n", None).unwrap();
        let inst = dks_to_du(&DksInstance { graph: g, k: 2 }, 1.0, 1.0).unwrap();
        assert_eq!(inst.max_alliance_size(), 2);
        assert_eq!(inst.bonuses().len(), 6);
        let s = brute_force(&inst, DEFAULT_SUBSET_GUARD).unwrap();
        assert_eq!(s.objective, 4.0);
    }

    #[test]
    fn path_optimum() {
        let g = parse_edge_list("0 1\n1 2\n", None).unwrap();
        let inst = dks_to_du(&DksInstance { graph: g, k: 2 }, 1.0, 0.5).unwrap();
        let s = brute_force(&inst, DEFAULT_SUBSET_GUARD).unwrap();
        assert_eq!(s.objective, 3.0);
        assert_eq!(s.team.to_vec(), vec![0, 1]);
    }

    #[test]
    fn edgeless_and_bad_k() {
        let g = SimpleGraph::new(4, []).unwrap();
        let inst = dks_to_du(&DksInstance { graph: g.clone(), k: 3 }, 2.0, 1.0).unwrap();
        assert_eq!(brute_force(&inst, DEFAULT_SUBSET_GUARD).unwrap().objective, 6.0);
        assert!(matches!(
            dks_to_du(&DksInstance { graph: g, k: 5 }, 1.0, 1.0),
            Err(Error::InvalidK { k: 5, vertices: 4 })
        ));
    }
}
