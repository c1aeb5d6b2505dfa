use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::instance::HeroId;

/// What a reduction vertex stands for.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexLabel {
    /// Hero `hero` placed in team slot `slot` (family F).
    Slot { hero: HeroId, slot: usize },
    /// Hero set `heroes` placed on slot set `slots` (family F_q).
    Group { heroes: Vec<HeroId>, slots: Vec<usize> },
}

fn join(items: &[usize]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("+")
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexLabel::Slot { hero, slot } => write!(f, "v_{hero}@{slot}"),
            VertexLabel::Group { heroes, slots } => {
                write!(f, "w_{}@{}", join(heroes), join(slots))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub weight: f64,
    /// Carries the consistency constant N.
    pub heavy: bool,
}

/// Undirected edge-weighted graph produced by the clique reductions.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    pub labels: Vec<VertexLabel>,
    /// Keyed by `(u, v)` with `u < v`.
    pub edges: BTreeMap<(usize, usize), Edge>,
    pub heavy_n: f64,
}

impl WeightedGraph {
    pub fn new(labels: Vec<VertexLabel>, heavy_n: f64) -> Self {
        WeightedGraph {
            labels,
            edges: BTreeMap::new(),
            heavy_n,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Inserts or overwrites edge `{u, v}`.
    ///
    /// # Panics
    /// On self-loops or out-of-range vertices.
    pub fn set_edge(&mut self, u: usize, v: usize, weight: f64, heavy: bool) {
        assert!(u != v, "self-loop on vertex {u}");
        assert!(u.max(v) < self.labels.len(), "vertex out of range");
        self.edges.insert((u.min(v), u.max(v)), Edge { weight, heavy });
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<&Edge> {
        self.edges.get(&(u.min(v), u.max(v)))
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(a, &u)| {
            vertices[a + 1..]
                .iter()
                .all(|&v| u != v && self.edge(u, v).is_some())
        })
    }

    /// Sum of induced edge weights, accumulated over sorted vertex pairs.
    /// `None` if the set is not a clique.
    pub fn clique_weight(&self, vertices: &[usize]) -> Option<f64> {
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        let mut total = 0.0;
        for (a, &u) in sorted.iter().enumerate() {
            for &v in &sorted[a + 1..] {
                total += self.edge(u, v)?.weight;
            }
        }
        Some(total)
    }

    /// Number of heavy edges induced by `vertices`.
    pub fn heavy_edges_in(&self, vertices: &[usize]) -> usize {
        let mut count = 0;
        for (a, &u) in vertices.iter().enumerate() {
            for &v in &vertices[a + 1..] {
                if self.edge(u, v).is_some_and(|e| e.heavy) {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn vertex_of(&self, label: &VertexLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Structural problems: duplicate labels, self-loops, bad weights.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for l in &self.labels {
            if !seen.insert(l) {
                out.push(format!("duplicate label {l}"));
            }
        }
        for (&(u, v), e) in &self.edges {
            if u == v {
                out.push(format!("self-loop on {u}"));
            }
            if v >= self.labels.len() {
                out.push(format!("edge ({u}, {v}) out of range"));
            }
            if !e.weight.is_finite() {
                out.push(format!("edge ({u}, {v}) has weight {}", e.weight));
            }
        }
        out
    }

    /// DOT rendering with vertices and edges sorted by label.
    pub fn to_dot(&self) -> String {
        let names: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));

        let mut edges: Vec<(&str, &str, &Edge)> = self
            .edges
            .iter()
            .map(|(&(u, v), e)| {
                let (a, b) = (names[u].as_str(), names[v].as_str());
                if a <= b {
                    (a, b, e)
                } else {
                    (b, a, e)
                }
            })
            .collect();
        edges.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));

        let mut out = String::from("graph reduction {\n");
        let _ = writeln!(out, "  // heavy_N = {}", self.heavy_n);
        for &v in &order {
            let family = match self.labels[v] {
                VertexLabel::Slot { .. } => "F",
                VertexLabel::Group { .. } => "Fq",
            };
            let _ = writeln!(out, "  \"{}\" [family={family}];", names[v]);
        }
        for (a, b, e) in edges {
            if e.heavy {
                let _ = writeln!(out, "  \"{a}\" -- \"{b}\" [weight={}, heavy=true];", e.weight);
            } else {
                let _ = writeln!(out, "  \"{a}\" -- \"{b}\" [weight={}];", e.weight);
            }
        }
        out.push_str("}\n");
        out
    }
}
