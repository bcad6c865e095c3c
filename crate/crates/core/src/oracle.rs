//! Brute-force ground truth and seeded instance generators.
//!
//! Nothing here uses the lattice, the transversal solver, or the factor
//! sweep; only incidence bookkeeping and the bipartiteness test.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::{FormalContext, IncidencePair};
use crate::incompat::build_incompatibility_graph;
use crate::reduction::{poset_to_context, Poset};

/// Parameters of a random context.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub objects: usize,
    pub attributes: usize,
    /// Probability of a cross, clamped to `[0, 1]`.
    pub density: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(objects: usize, attributes: usize, density: f64, seed: u64) -> Self {
        Self { objects, attributes, density, seed }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn density(&self) -> f64 {
        self.density.clamp(0.0, 1.0)
    }
}

/// k-subsets of `0..n` in colexicographic order.
pub struct Colex {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Colex {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, current: (k <= n).then(|| (0..k).collect()) }
    }
}

impl Iterator for Colex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let c = self.current.as_mut().expect("checked above");
        let k = c.len();
        let mut j = 0;
        while j < k && c[j] + 1 == if j + 1 < k { c[j + 1] } else { self.n } {
            j += 1;
        }
        if j == k {
            self.current = None;
        } else {
            c[j] += 1;
            for (i, x) in c.iter_mut().enumerate().take(j) {
                *x = i;
            }
        }
        Some(out)
    }
}

/// Smallest `k ≤ k_max` such that removing some `k` pairs from `I` leaves a
/// bipartite incompatibility graph, by exhaustive enumeration.
pub fn brute_force_min_removal(ctx: &FormalContext, k_max: usize) -> Option<usize> {
    brute_force_min_removal_counted(ctx, k_max).0
}

/// As [`brute_force_min_removal`], also returning the number of
/// bipartiteness tests performed.
pub fn brute_force_min_removal_counted(ctx: &FormalContext, k_max: usize) -> (Option<usize>, usize) {
    let pairs = ctx.incidence();
    let mut tests = 0;
    for k in 0..=k_max.min(pairs.len()) {
        for subset in Colex::new(pairs.len(), k) {
            tests += 1;
            let removed: Vec<IncidencePair> = subset.iter().map(|&i| pairs[i]).collect();
            let smaller = ctx.remove_incidences(&removed).expect("pairs come from I");
            if build_incompatibility_graph(&smaller).is_bipartite() {
                return (Some(k), tests);
            }
        }
    }
    (None, tests)
}

/// Number of feasible removals of each size `0..=k_max`, without early exit,
/// and the number of bipartiteness tests performed.
pub fn removal_profile(ctx: &FormalContext, k_max: usize) -> (Vec<usize>, usize) {
    let pairs = ctx.incidence();
    let mut feasible = vec![0; k_max.min(pairs.len()) + 1];
    let mut tests = 0;
    for (k, count) in feasible.iter_mut().enumerate() {
        for subset in Colex::new(pairs.len(), k) {
            tests += 1;
            let removed: Vec<IncidencePair> = subset.iter().map(|&i| pairs[i]).collect();
            let smaller = ctx.remove_incidences(&removed).expect("pairs come from I");
            if build_incompatibility_graph(&smaller).is_bipartite() {
                *count += 1;
            }
        }
    }
    (feasible, tests)
}

/// Smallest number of pairs to add to `p` so that the result is a partial
/// order of dimension at most two, by exhaustive enumeration over sets of
/// incomparable pairs.
pub fn brute_force_min_extension(p: &Poset, k_max: usize) -> Option<usize> {
    let n = p.len();
    let candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && !p.leq(a, b) && !p.leq(b, a))
        .collect();
    for k in 0..=k_max.min(candidates.len()) {
        for subset in Colex::new(candidates.len(), k) {
            let mut up: Vec<FixedBitSet> = (0..n).map(|a| p.up_set(a).clone()).collect();
            for &i in &subset {
                let (a, b) = candidates[i];
                up[a].insert(b);
            }
            // only sets that are already orders, no closure
            let Ok(ext) = Poset::from_up_sets(p.elements().to_vec(), up) else {
                continue;
            };
            if build_incompatibility_graph(&poset_to_context(&ext)).is_bipartite() {
                return Some(k);
            }
        }
    }
    None
}

fn named(spec: &GeneratorSpec, rows: Vec<FixedBitSet>) -> FormalContext {
    let pairs = rows
        .iter()
        .enumerate()
        .flat_map(|(g, r)| r.ones().map(move |m| IncidencePair::new(g, m)));
    FormalContext::from_pairs(spec.objects, spec.attributes, pairs).expect("indices in range")
}

/// Each cell is a cross independently with probability `density`.
pub fn random_context(spec: &GeneratorSpec) -> FormalContext {
    let mut rng = spec.rng(0);
    let d = spec.density();
    let rows = (0..spec.objects)
        .map(|_| {
            let mut r = FixedBitSet::with_capacity(spec.attributes);
            for m in 0..spec.attributes {
                if rng.gen_bool(d) {
                    r.insert(m);
                }
            }
            r
        })
        .collect();
    named(spec, rows)
}

/// A staircase (Ferrers) relation under random row and column permutations.
fn staircase(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Vec<FixedBitSet> {
    let d = spec.density();
    let mut objects: Vec<usize> = (0..spec.objects).collect();
    let mut attributes: Vec<usize> = (0..spec.attributes).collect();
    objects.shuffle(rng);
    attributes.shuffle(rng);
    let mut widths: Vec<usize> =
        (0..spec.objects).map(|_| (0..spec.attributes).filter(|_| rng.gen_bool(d)).count()).collect();
    widths.sort_unstable_by(|a, b| b.cmp(a));

    let mut rows = vec![FixedBitSet::with_capacity(spec.attributes); spec.objects];
    for (&g, &w) in objects.iter().zip(&widths) {
        rows[g].extend(attributes[..w].iter().copied());
    }
    rows
}

/// One random staircase relation; Ferrers by construction.
pub fn random_staircase_context(spec: &GeneratorSpec) -> FormalContext {
    let mut rng = spec.rng(1);
    named(spec, staircase(spec, &mut rng))
}

/// Union of two random staircases; two-factorizable by construction.
pub fn random_two_factorizable_context(spec: &GeneratorSpec) -> FormalContext {
    let mut rng = spec.rng(2);
    let mut rows = staircase(spec, &mut rng);
    for (r, s) in rows.iter_mut().zip(staircase(spec, &mut rng)) {
        r.union_with(&s);
    }
    let ctx = named(spec, rows);
    debug_assert!(build_incompatibility_graph(&ctx).is_bipartite());
    ctx
}

/// A random partial order on `n` elements: each pair `i < j` of a random
/// permutation is related with probability `density`, then closed.
pub fn random_poset(n: usize, density: f64, seed: u64) -> Poset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(3);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut relations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                relations.push((perm[i], perm[j]));
            }
        }
    }
    let names = (0..n).map(|i| format!("x{i}")).collect();
    Poset::from_relations(names, &relations).expect("relations follow a permutation")
}
