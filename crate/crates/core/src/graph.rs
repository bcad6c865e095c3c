//! Small undirected graphs on `0..n` with bitset adjacency.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<FixedBitSet>,
}

/// Outcome of a 2-coloring attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bipartition {
    /// `colors[v]` is 1 or 2 (0 for vertices outside the inspected set).
    Coloring(Vec<u8>),
    /// Vertex sequence of an odd cycle; consecutive entries and the last/first
    /// pair are adjacent.
    OddCycle(Vec<usize>),
}

impl Bipartition {
    pub fn is_bipartite(&self) -> bool {
        matches!(self, Bipartition::Coloring(_))
    }
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self { adj: vec![FixedBitSet::with_capacity(n); n] }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert_ne!(u, v, "self-loops are not allowed");
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones(..)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, a)| a.ones().filter(move |&v| v > u).map(move |v| (u, v)))
            .collect()
    }

    pub fn full_mask(&self) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.len());
        m.insert_range(..);
        m
    }

    /// Subgraph induced by `alive`, with the original index of each new vertex.
    pub fn induced(&self, alive: &FixedBitSet) -> (Graph, Vec<usize>) {
        let map: Vec<usize> = alive.ones().collect();
        let mut g = Graph::new(map.len());
        for (i, &u) in map.iter().enumerate() {
            for (j, &v) in map.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        (g, map)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_within(&self.full_mask())
    }

    /// Components of the subgraph induced by `alive`.
    pub fn components_within(&self, alive: &FixedBitSet) -> Vec<Vec<usize>> {
        let mut seen = FixedBitSet::with_capacity(self.len());
        let mut out = Vec::new();
        for s in alive.ones() {
            if seen.contains(s) {
                continue;
            }
            seen.insert(s);
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for v in self.adj[u].ones() {
                    if alive.contains(v) && !seen.contains(v) {
                        seen.insert(v);
                        comp.push(v);
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn bipartition(&self) -> Bipartition {
        self.bipartition_within(&self.full_mask())
    }

    /// Breadth-first 2-coloring of the subgraph induced by `alive`.
    ///
    /// Components are seeded at their smallest vertex with color 1 and
    /// neighbors are visited in ascending order, so the result is
    /// deterministic.
    pub fn bipartition_within(&self, alive: &FixedBitSet) -> Bipartition {
        let n = self.len();
        let mut color = vec![0u8; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for s in alive.ones() {
            if color[s] != 0 {
                continue;
            }
            color[s] = 1;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for v in self.adj[u].ones() {
                    if !alive.contains(v) {
                        continue;
                    }
                    if color[v] == 0 {
                        color[v] = 3 - color[u];
                        parent[v] = u;
                        queue.push_back(v);
                    } else if color[v] == color[u] {
                        return Bipartition::OddCycle(close_cycle(&parent, u, v));
                    }
                }
            }
        }
        Bipartition::Coloring(color)
    }

    pub fn is_bipartite_within(&self, alive: &FixedBitSet) -> bool {
        self.bipartition_within(alive).is_bipartite()
    }

    /// Checks that `cycle` is a closed walk of odd length without repeated
    /// vertices.
    pub fn is_odd_cycle(&self, cycle: &[usize]) -> bool {
        if cycle.len() < 3 || cycle.len().is_multiple_of(2) {
            return false;
        }
        let mut seen = FixedBitSet::with_capacity(self.len());
        for &v in cycle {
            if v >= self.len() || seen.put(v) {
                return false;
            }
        }
        (0..cycle.len()).all(|i| self.has_edge(cycle[i], cycle[(i + 1) % cycle.len()]))
    }

    /// Checks a 1/2 coloring against every edge.
    pub fn is_proper_coloring(&self, colors: &[u8]) -> bool {
        colors.len() == self.len()
            && self.edges().iter().all(|&(u, v)| colors[u] != colors[v] && colors[u] != 0)
    }
}

/// Joins the tree paths from `u` and `v` to their common ancestor with the
/// edge `uv`. Both ends have equal BFS depth parity, so the cycle is odd.
fn close_cycle(parent: &[usize], u: usize, v: usize) -> Vec<usize> {
    let path = |mut x: usize| {
        let mut p = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            p.push(x);
        }
        p
    };
    let mut pu = path(u);
    let mut pv = path(v);
    // Strip the shared suffix down to the last common vertex.
    while pu.len() >= 2 && pv.len() >= 2 && pu[pu.len() - 2] == pv[pv.len() - 2] {
        pu.pop();
        pv.pop();
    }
    debug_assert_eq!(pu.last(), pv.last());
    pv.pop();
    pv.reverse();
    pu.extend(pv);
    pu
}
