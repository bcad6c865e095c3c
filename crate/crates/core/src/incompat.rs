//! The incompatibility graph on incidence pairs.
//!
//! Two pairs `(g, m)` and `(h, n)` of `I` are incompatible when neither
//! `(g, n)` nor `(h, m)` is in `I`; no Ferrers relation inside `I` can hold
//! both. A context is two-factorizable exactly when this graph is bipartite.

use std::collections::BTreeSet;

use crate::context::{FormalContext, IncidencePair};
use crate::graph::{Bipartition, Graph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompatibilityGraph {
    vertices: Vec<IncidencePair>,
    graph: Graph,
}

/// A 2-coloring of all pairs or an odd cycle of pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BipartitionWitness {
    Coloring(Vec<(IncidencePair, u8)>),
    OddCycle(Vec<IncidencePair>),
}

impl BipartitionWitness {
    pub fn is_bipartite(&self) -> bool {
        matches!(self, BipartitionWitness::Coloring(_))
    }

    pub fn odd_cycle(&self) -> Option<&[IncidencePair]> {
        match self {
            BipartitionWitness::OddCycle(c) => Some(c),
            BipartitionWitness::Coloring(_) => None,
        }
    }

    /// Pairs carrying `color` (1 or 2), empty for an odd cycle.
    pub fn class(&self, color: u8) -> BTreeSet<IncidencePair> {
        match self {
            BipartitionWitness::Coloring(c) => {
                c.iter().filter(|(_, k)| *k == color).map(|(p, _)| *p).collect()
            }
            BipartitionWitness::OddCycle(_) => BTreeSet::new(),
        }
    }
}

/// `true` when `(g, m)` and `(h, n)` are incompatible in `ctx`.
pub fn incompatible(ctx: &FormalContext, a: IncidencePair, b: IncidencePair) -> bool {
    !ctx.has(a.object, b.attribute) && !ctx.has(b.object, a.attribute)
}

pub fn build_incompatibility_graph(ctx: &FormalContext) -> IncompatibilityGraph {
    let vertices = ctx.incidence();
    let mut graph = Graph::new(vertices.len());
    for (i, &a) in vertices.iter().enumerate() {
        for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
            if incompatible(ctx, a, b) {
                graph.add_edge(i, j);
            }
        }
    }
    IncompatibilityGraph { vertices, graph }
}

impl IncompatibilityGraph {
    /// Pairs of `I` in lexicographic order; vertex `i` is `vertices()[i]`.
    pub fn vertices(&self) -> &[IncidencePair] {
        &self.vertices
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn index_of(&self, pair: IncidencePair) -> Option<usize> {
        self.vertices.binary_search(&pair).ok()
    }

    pub fn has_edge(&self, a: IncidencePair, b: IncidencePair) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.graph.has_edge(i, j),
            _ => false,
        }
    }

    /// Edges as pair tuples, each with the smaller pair first.
    pub fn edges(&self) -> BTreeSet<(IncidencePair, IncidencePair)> {
        self.graph
            .edges()
            .into_iter()
            .map(|(u, v)| (self.vertices[u], self.vertices[v]))
            .collect()
    }

    pub fn bipartition(&self) -> BipartitionWitness {
        match self.graph.bipartition() {
            Bipartition::Coloring(c) => BipartitionWitness::Coloring(
                self.vertices.iter().copied().zip(c).collect(),
            ),
            Bipartition::OddCycle(cycle) => {
                BipartitionWitness::OddCycle(cycle.into_iter().map(|v| self.vertices[v]).collect())
            }
        }
    }

    pub fn is_bipartite(&self) -> bool {
        self.graph.bipartition().is_bipartite()
    }

    /// Connected components, ordered by their smallest pair.
    pub fn components(&self) -> Vec<Vec<IncidencePair>> {
        self.graph
            .components()
            .into_iter()
            .map(|c| c.into_iter().map(|v| self.vertices[v]).collect())
            .collect()
    }

    /// Pairs incompatible with no other pair: the singleton components.
    pub fn isolated_pairs(&self) -> BTreeSet<IncidencePair> {
        (0..self.len())
            .filter(|&v| self.graph.degree(v) == 0)
            .map(|v| self.vertices[v])
            .collect()
    }

    /// Re-checks a witness against the graph.
    pub fn verify(&self, witness: &BipartitionWitness) -> bool {
        match witness {
            BipartitionWitness::Coloring(c) => {
                c.len() == self.len()
                    && c.iter().zip(&self.vertices).all(|((p, k), v)| p == v && (*k == 1 || *k == 2))
                    && self
                        .graph
                        .is_proper_coloring(&c.iter().map(|(_, k)| *k).collect::<Vec<_>>())
            }
            BipartitionWitness::OddCycle(cycle) => {
                let idx: Option<Vec<usize>> = cycle.iter().map(|&p| self.index_of(p)).collect();
                idx.is_some_and(|idx| self.graph.is_odd_cycle(&idx))
            }
        }
    }
}
