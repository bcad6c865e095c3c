//! Concepts, their extent order, and conjugate orders.
//!
//! Concepts are enumerated with NextClosure over the attribute side, so the
//! output follows the lectic order of intents. The order relation is
//! recovered by extent inclusion; the covering relation is never built.

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::context::FormalContext;
use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("more than {cap} concepts")]
    ConceptBudgetExceeded { cap: usize },
    #[error("order is not two-dimensional: {0}")]
    NotTwoDimensional(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub extent: FixedBitSet,
    pub intent: FixedBitSet,
}

impl Concept {
    pub fn extent_indices(&self) -> Vec<usize> {
        self.extent.ones().collect()
    }

    pub fn intent_indices(&self) -> Vec<usize> {
        self.intent.ones().collect()
    }
}

/// `⌊3/2 · min(|G|, |M|)²⌋ + 2`, the default enumeration cap. Contexts whose
/// lattice has order dimension at most two stay below it.
pub fn default_concept_cap(ctx: &FormalContext) -> usize {
    let n = ctx.n_objects().min(ctx.n_attributes());
    3 * n * n / 2 + 2
}

/// All concepts of `ctx` in lectic order of intents, capped at
/// [`default_concept_cap`].
pub fn enumerate_concepts(ctx: &FormalContext) -> Result<Vec<Concept>, LatticeError> {
    enumerate_concepts_capped(ctx, Some(default_concept_cap(ctx)))
}

pub fn enumerate_concepts_capped(
    ctx: &FormalContext,
    cap: Option<usize>,
) -> Result<Vec<Concept>, LatticeError> {
    let n = ctx.n_attributes();
    let close = |b: &FixedBitSet| {
        let extent = ctx.extent_of(b);
        let intent = ctx.intent_of(&extent);
        Concept { extent, intent }
    };

    let mut out = Vec::new();
    let mut current = close(&FixedBitSet::with_capacity(n));
    loop {
        if cap.is_some_and(|c| out.len() >= c) {
            return Err(LatticeError::ConceptBudgetExceeded { cap: cap.unwrap_or_default() });
        }
        let done = current.intent.count_ones(..) == n;
        out.push(current.clone());
        if done {
            break;
        }
        current = next_closure(&current.intent, n, &close)
            .expect("a non-full intent always has a lectic successor");
    }
    Ok(out)
}

fn next_closure(
    intent: &FixedBitSet,
    n: usize,
    close: &impl Fn(&FixedBitSet) -> Concept,
) -> Option<Concept> {
    for i in (0..n).rev() {
        if intent.contains(i) {
            continue;
        }
        let mut candidate = intent.clone();
        candidate.remove_range(i..);
        candidate.insert(i);
        let c = close(&candidate);
        // accept if closure adds nothing below i
        let added_below = c.intent.ones().take_while(|&m| m < i).any(|m| !intent.contains(m));
        if !added_below {
            return Some(c);
        }
    }
    None
}

/// Concepts with `leq[i] ∋ j` iff concept `i ≤ j` (extent inclusion).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptOrder {
    pub concepts: Vec<Concept>,
    leq: Vec<FixedBitSet>,
}

pub fn concept_order(concepts: Vec<Concept>) -> ConceptOrder {
    let n = concepts.len();
    let mut leq = vec![FixedBitSet::with_capacity(n); n];
    for i in 0..n {
        for j in 0..n {
            if concepts[i].extent.is_subset(&concepts[j].extent) {
                leq[i].insert(j);
            }
        }
    }
    ConceptOrder { concepts, leq }
}

impl ConceptOrder {
    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i].contains(j)
    }

    /// Up-set of `i`, including `i`.
    pub fn up_set(&self, i: usize) -> &FixedBitSet {
        &self.leq[i]
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) || self.leq(j, i)
    }

    pub fn top(&self) -> Option<usize> {
        (0..self.len()).find(|&i| self.leq[i].count_ones(..) == 1)
    }

    pub fn bottom(&self) -> Option<usize> {
        (0..self.len()).find(|&i| self.leq[i].count_ones(..) == self.len())
    }
}

/// Edges on the incomparable pairs of `order`.
pub fn cocomparability_graph(order: &ConceptOrder) -> Graph {
    cocomparability_of(&order.leq)
}

/// Cocomparability graph of an arbitrary relation given by up-sets.
pub(crate) fn cocomparability_of(leq: &[FixedBitSet]) -> Graph {
    let n = leq.len();
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if !leq[i].contains(j) && !leq[j].contains(i) {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// A transitive orientation: `succ[a] ∋ b` for every edge oriented `a → b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    pub succ: Vec<FixedBitSet>,
}

impl Orientation {
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.succ[a].contains(b)
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.succ.len()).all(|a| self.succ[a].ones().all(|b| self.succ[b].is_subset(&self.succ[a])))
    }
}

/// Orients every edge so that the result is transitive.
///
/// Uses the implication-class decomposition: take the smallest remaining edge,
/// orient its whole implication class (forcing within the remaining edges),
/// drop the class and its reverse, repeat. A class containing both directions
/// of some edge means no transitive orientation exists. The final orientation
/// is re-checked for transitivity.
pub fn transitive_orientation(graph: &Graph) -> Result<Orientation, LatticeError> {
    let n = graph.len();
    let mut remaining: Vec<FixedBitSet> = (0..n).map(|v| graph.neighbors(v).clone()).collect();
    let mut succ = vec![FixedBitSet::with_capacity(n); n];
    let mut class = vec![FixedBitSet::with_capacity(n); n];

    while let Some((a0, b0)) =
        (0..n).find_map(|a| remaining[a].ones().find(|&b| b > a).map(|b| (a, b)))
    {

        let mut members = vec![(a0, b0)];
        class[a0].insert(b0);
        let mut k = 0;
        while k < members.len() {
            let (a, b) = members[k];
            k += 1;
            // (a, b) forces (a, c) when c ~ a but c ≁ b
            for c in remaining[a].ones() {
                if c != b && !remaining[b].contains(c) && !class[a].put(c) {
                    members.push((a, c));
                }
            }
            // (a, b) forces (c, b) when c ~ b but c ≁ a
            for c in remaining[b].ones() {
                if c != a && !remaining[a].contains(c) && !class[c].put(b) {
                    members.push((c, b));
                }
            }
        }

        for &(a, b) in &members {
            if class[b].contains(a) {
                return Err(LatticeError::NotTwoDimensional(format!(
                    "implication class of edge ({a0}, {b0}) forces both directions of ({a}, {b})"
                )));
            }
        }
        for &(a, b) in &members {
            succ[a].insert(b);
            remaining[a].set(b, false);
            remaining[b].set(a, false);
            class[a].set(b, false);
        }
    }

    let orientation = Orientation { succ };
    if !orientation.is_transitive() {
        return Err(LatticeError::NotTwoDimensional("orientation is not transitive".into()));
    }
    Ok(orientation)
}

/// A conjugate order `≤_c` of a concept order together with the two linear
/// orders `≤ ∪ ≤_c` and `≤ ∪ ≥_c` it induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugateOrder {
    pub orientation: Orientation,
    /// Concept indices sorted by `≤ ∪ ≤_c`, smallest first.
    pub first: Vec<usize>,
    /// Concept indices sorted by `≤ ∪ ≥_c`, smallest first.
    pub second: Vec<usize>,
}

impl ConjugateOrder {
    /// Whether `a <_c b`.
    pub fn less(&self, a: usize, b: usize) -> bool {
        self.orientation.contains(a, b)
    }
}

/// Orients the cocomparability graph of `order` and checks that both unions
/// with `≤` are linear orders.
pub fn conjugate_order(order: &ConceptOrder) -> Result<ConjugateOrder, LatticeError> {
    conjugate_of(&order.leq)
}

pub(crate) fn conjugate_of(leq: &[FixedBitSet]) -> Result<ConjugateOrder, LatticeError> {
    let n = leq.len();
    let orientation = transitive_orientation(&cocomparability_of(leq))?;

    let mut reversed = vec![FixedBitSet::with_capacity(n); n];
    for a in 0..n {
        for b in orientation.succ[a].ones() {
            reversed[b].insert(a);
        }
    }
    let union = |extra: &[FixedBitSet]| -> Vec<FixedBitSet> {
        (0..n)
            .map(|i| {
                let mut r = leq[i].clone();
                r.union_with(&extra[i]);
                r
            })
            .collect()
    };
    let first = linear_sequence(&union(&orientation.succ))
        .ok_or_else(|| LatticeError::NotTwoDimensional("≤ ∪ ≤_c is not a linear order".into()))?;
    let second = linear_sequence(&union(&reversed))
        .ok_or_else(|| LatticeError::NotTwoDimensional("≤ ∪ ≥_c is not a linear order".into()))?;
    Ok(ConjugateOrder { orientation, first, second })
}

/// If `up` (up-sets, reflexive) is a linear order, its elements from least
/// to greatest.
pub(crate) fn linear_sequence(up: &[FixedBitSet]) -> Option<Vec<usize>> {
    let n = up.len();
    for i in 0..n {
        if !up[i].contains(i) {
            return None;
        }
        for j in i + 1..n {
            if up[i].contains(j) == up[j].contains(i) {
                return None;
            }
        }
        if up[i].ones().any(|j| !up[j].is_subset(&up[i])) {
            return None;
        }
    }
    let mut seq: Vec<usize> = (0..n).collect();
    seq.sort_by_key(|&i| std::cmp::Reverse(up[i].count_ones(..)));
    Some(seq)
}
