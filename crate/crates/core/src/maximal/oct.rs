//! Odd cycle transversals: exact branch-and-bound and a local-search
//! heuristic.

use std::time::Instant;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

/// The search ran past its deadline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutOfTime;

pub(crate) struct ExactSolver<'a> {
    g: &'a Graph,
    deadline: Option<Instant>,
    nodes: u64,
}

impl<'a> ExactSolver<'a> {
    pub fn new(g: &'a Graph, deadline: Option<Instant>) -> Self {
        Self { g, deadline, nodes: 0 }
    }

    /// Minimum transversal of the whole graph; among all minimum ones the
    /// lexicographically smallest.
    pub fn solve(&mut self) -> Result<Vec<usize>, OutOfTime> {
        let mut out = Vec::new();
        for comp in self.g.components() {
            let mut alive = FixedBitSet::with_capacity(self.g.len());
            alive.extend(comp.iter().copied());
            if self.g.is_bipartite_within(&alive) {
                continue;
            }
            out.extend(self.solve_component(&alive)?);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Size of a minimum transversal, without tie-breaking.
    pub fn minimum_size(&mut self) -> Result<usize, OutOfTime> {
        let alive = self.g.full_mask();
        let keep = FixedBitSet::with_capacity(self.g.len());
        let limit = self.upper_bound(&alive);
        Ok(self
            .branch(&alive, &keep, limit)?
            .expect("deleting every vertex is always feasible")
            .len())
    }

    fn solve_component(&mut self, comp: &FixedBitSet) -> Result<Vec<usize>, OutOfTime> {
        let n = self.g.len();
        let mut keep = FixedBitSet::with_capacity(n);
        let size = self
            .branch(comp, &keep, self.upper_bound(comp))?
            .expect("deleting every vertex is always feasible")
            .len();

        // Fix vertices in ascending order: delete each one if a minimum
        // transversal extending the current choice still exists.
        let mut alive = comp.clone();
        let mut chosen = Vec::with_capacity(size);
        for v in comp.ones() {
            if chosen.len() == size {
                break;
            }
            alive.set(v, false);
            let rest = size - chosen.len() - 1;
            if self.branch(&alive, &keep, rest)?.is_some() {
                chosen.push(v);
            } else {
                alive.insert(v);
                keep.insert(v);
            }
        }
        debug_assert_eq!(chosen.len(), size);
        Ok(chosen)
    }

    /// Size of a heuristic transversal of `alive`, used as the initial limit.
    fn upper_bound(&self, alive: &FixedBitSet) -> usize {
        let (sub, _) = self.g.induced(alive);
        local_search(&sub, 0, 4).len()
    }

    fn tick(&mut self) -> Result<(), OutOfTime> {
        self.nodes += 1;
        if self.nodes % 128 == 1 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(OutOfTime);
                }
            }
        }
        Ok(())
    }

    /// A minimum transversal of `alive` of size at most `limit` that avoids
    /// `keep`, or `None` when none exists.
    fn branch(
        &mut self,
        alive: &FixedBitSet,
        keep: &FixedBitSet,
        limit: usize,
    ) -> Result<Option<Vec<usize>>, OutOfTime> {
        self.tick()?;
        let Some(cycle) = find_odd_cycle(self.g, alive, keep) else {
            return Ok(Some(Vec::new()));
        };
        if limit == 0 {
            return Ok(None);
        }

        let comps: Vec<FixedBitSet> = self
            .g
            .components_within(alive)
            .into_iter()
            .filter(|c| c.len() >= 3)
            .map(|c| {
                let mut m = FixedBitSet::with_capacity(self.g.len());
                m.extend(c);
                m
            })
            .filter(|m| !self.g.is_bipartite_within(m))
            .collect();
        if comps.len() > 1 {
            return self.branch_components(&comps, keep, limit);
        }

        let bound = packing_bound(self.g, alive, keep);
        if bound > limit {
            return Ok(None);
        }

        let deletable: Vec<usize> = cycle.iter().copied().filter(|&v| !keep.contains(v)).collect();
        let mut best: Option<Vec<usize>> = None;
        let mut budget = limit;
        let mut sub_alive = alive.clone();
        let mut sub_keep = keep.clone();
        for &v in &deletable {
            sub_alive.set(v, false);
            if let Some(mut s) = self.branch(&sub_alive, &sub_keep, budget - 1)? {
                s.push(v);
                let size = s.len();
                best = Some(s);
                if size <= bound {
                    break;
                }
                budget = size - 1;
            }
            sub_alive.insert(v);
            // later branches keep v
            sub_keep.insert(v);
        }
        Ok(best)
    }

    /// Independent components: minimum of the whole is the sum of minima.
    fn branch_components(
        &mut self,
        comps: &[FixedBitSet],
        keep: &FixedBitSet,
        limit: usize,
    ) -> Result<Option<Vec<usize>>, OutOfTime> {
        let bounds: Vec<usize> = comps.iter().map(|c| packing_bound(self.g, c, keep)).collect();
        let total: usize = bounds.iter().sum();
        if total > limit {
            return Ok(None);
        }
        let mut out = Vec::new();
        let mut spent = 0;
        for (i, comp) in comps.iter().enumerate() {
            let later: usize = bounds[i + 1..].iter().sum();
            let allowed = limit - spent - later;
            match self.branch(comp, keep, allowed)? {
                Some(s) => {
                    spent += s.len();
                    out.extend(s);
                }
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

/// Number of odd cycles found greedily that pairwise share no deletable
/// vertex; `usize::MAX` when some odd cycle has no deletable vertex at all.
fn packing_bound(g: &Graph, alive: &FixedBitSet, keep: &FixedBitSet) -> usize {
    let mut work = alive.clone();
    let mut count = 0;
    while let Some(cycle) = find_odd_cycle(g, &work, keep) {
        let mut any = false;
        for v in cycle {
            if !keep.contains(v) {
                work.set(v, false);
                any = true;
            }
        }
        if !any {
            return usize::MAX;
        }
        count += 1;
    }
    count
}

/// A short odd cycle of the subgraph induced by `alive`, preferring cycles
/// with few vertices outside `keep`. Triangles are tried first.
pub(crate) fn find_odd_cycle(g: &Graph, alive: &FixedBitSet, keep: &FixedBitSet) -> Option<Vec<usize>> {
    let free = |v: usize| usize::from(!keep.contains(v));
    let mut best: Option<(usize, Vec<usize>)> = None;
    for u in alive.ones() {
        for v in g.neighbors(u).ones().filter(|&v| v > u && alive.contains(v)) {
            for w in g.neighbors(u).intersection(g.neighbors(v)) {
                if w <= v || !alive.contains(w) {
                    continue;
                }
                let d = free(u) + free(v) + free(w);
                if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    best = Some((d, vec![u, v, w]));
                    if d <= 1 {
                        return best.map(|(_, c)| c);
                    }
                }
            }
        }
    }
    if best.is_some() {
        return best.map(|(_, c)| c);
    }

    // No triangles: shortest odd cycle through each start vertex.
    let n = g.len();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    for s in alive.ones() {
        for x in dist.iter_mut() {
            *x = usize::MAX;
        }
        dist[s] = 0;
        parent[s] = usize::MAX;
        queue.clear();
        queue.push_back(s);
        let mut found = None;
        'bfs: while let Some(u) = queue.pop_front() {
            if best.as_ref().is_some_and(|(_, len, _)| 2 * dist[u] + 1 > *len) {
                break;
            }
            for v in g.neighbors(u).ones() {
                if !alive.contains(v) {
                    continue;
                }
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    queue.push_back(v);
                } else if dist[v] == dist[u] {
                    found = Some((u, v));
                    break 'bfs;
                }
            }
        }
        if let Some((u, v)) = found {
            let cycle = join_paths(&parent, u, v);
            let d = cycle.iter().map(|&x| free(x)).sum::<usize>();
            let better = best
                .as_ref()
                .is_none_or(|(bd, bl, _)| (d, cycle.len()) < (*bd, *bl));
            if better {
                let done = d <= 1;
                best = Some((d, cycle.len(), cycle));
                if done {
                    break;
                }
            }
        }
    }
    best.map(|(_, _, c)| c)
}

fn join_paths(parent: &[usize], u: usize, v: usize) -> Vec<usize> {
    let walk = |mut x: usize| {
        let mut p = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            p.push(x);
        }
        p
    };
    let mut pu = walk(u);
    let mut pv = walk(v);
    while pu.len() >= 2 && pv.len() >= 2 && pu[pu.len() - 2] == pv[pv.len() - 2] {
        pu.pop();
        pv.pop();
    }
    pv.pop();
    pv.reverse();
    pu.extend(pv);
    pu
}

/// Best of `restarts` randomized local searches: start from a random
/// 2-coloring, then repeatedly take the vertex with the most conflicting
/// edges and either flip it (if that lowers its conflicts) or evict it. Evicted
/// vertices are re-inserted where they fit, then a tabu search trades them
/// against their neighbours. Returns the evicted set, sorted.
pub(crate) fn local_search(g: &Graph, seed: u64, restarts: usize) -> Vec<usize> {
    let mut best: Option<Vec<usize>> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let evicted = one_run(g, &mut rng);
        let better = match &best {
            None => true,
            Some(b) => (evicted.len(), &evicted) < (b.len(), b),
        };
        if better {
            best = Some(evicted);
        }
    }
    best.unwrap_or_default()
}

fn one_run(g: &Graph, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = g.len();
    let mut color: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
    let mut present = vec![true; n];
    let conflicts_of = |v: usize, c: u8, color: &[u8], present: &[bool]| {
        g.neighbors(v).ones().filter(|&u| present[u] && color[u] == c).count()
    };
    let mut conflicts: Vec<usize> = (0..n).map(|v| conflicts_of(v, color[v], &color, &present)).collect();

    while let Some(v) = (0..n)
        .filter(|&v| present[v] && conflicts[v] > 0)
        .max_by_key(|&v| (conflicts[v], std::cmp::Reverse(v)))
    {
        let other = 1 - color[v];
        let after = conflicts_of(v, other, &color, &present);
        if after < conflicts[v] {
            for u in g.neighbors(v).ones().filter(|&u| present[u]) {
                if color[u] == color[v] {
                    conflicts[u] -= 1;
                } else {
                    conflicts[u] += 1;
                }
            }
            color[v] = other;
            conflicts[v] = after;
        } else {
            for u in g.neighbors(v).ones().filter(|&u| present[u] && color[u] == color[v]) {
                conflicts[u] -= 1;
            }
            present[v] = false;
            conflicts[v] = 0;
        }
    }

    let mut out: Vec<usize> = (0..n).filter(|&v| !present[v]).collect();
    out.shuffle(rng);
    out.retain(|&v| {
        for c in [color[v], 1 - color[v]] {
            if conflicts_of(v, c, &color, &present) == 0 {
                color[v] = c;
                present[v] = true;
                return false;
            }
        }
        true
    });
    tabu_improve(g, rng, color, present)
}

/// Tabu search over valid states: a deleted vertex re-enters with the colour
/// that evicts the fewest neighbours. Evicted vertices may not re-enter for a
/// few steps. Returns the best deleted set seen.
fn tabu_improve(g: &Graph, rng: &mut ChaCha8Rng, mut color: Vec<u8>, mut present: Vec<bool>) -> Vec<usize> {
    let n = g.len();
    let mut count = vec![[0usize; 2]; n];
    for v in (0..n).filter(|&v| present[v]) {
        for u in g.neighbors(v).ones() {
            count[u][color[v] as usize] += 1;
        }
    }
    let mut deleted: Vec<usize> = (0..n).filter(|&v| !present[v]).collect();
    let mut best = deleted.clone();
    let mut tabu_until = vec![0usize; n];
    let steps = 50 * n;
    let mut since_best = 0;

    for step in 1..=steps {
        if deleted.is_empty() || since_best > 10 * n {
            break;
        }
        let mut choice: Option<(usize, usize, u8)> = None;
        let mut ties = 0u32;
        for &v in &deleted {
            if tabu_until[v] > step {
                continue;
            }
            for c in 0..2u8 {
                let cost = count[v][c as usize];
                match choice {
                    Some((best_cost, _, _)) if cost > best_cost => {}
                    Some((best_cost, _, _)) if cost == best_cost => {
                        ties += 1;
                        if rng.gen_range(0..ties) == 0 {
                            choice = Some((cost, v, c));
                        }
                    }
                    _ => {
                        ties = 1;
                        choice = Some((cost, v, c));
                    }
                }
            }
        }
        let Some((_, v, c)) = choice else {
            continue;
        };
        let evict: Vec<usize> = g.neighbors(v).ones().filter(|&u| present[u] && color[u] == c).collect();
        for &u in &evict {
            present[u] = false;
            for w in g.neighbors(u).ones() {
                count[w][c as usize] -= 1;
            }
            tabu_until[u] = step + 2 + rng.gen_range(0..8);
        }
        present[v] = true;
        color[v] = c;
        for w in g.neighbors(v).ones() {
            count[w][c as usize] += 1;
        }
        deleted.retain(|&u| u != v);
        deleted.extend(evict);

        since_best += 1;
        if deleted.len() < best.len() {
            best = deleted.clone();
            since_best = 0;
        }
    }
    best.sort_unstable();
    best
}
