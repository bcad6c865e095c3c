//! Two-dimension extensions of partial orders, solved through ordinal
//! two-factorization of the context `(X, X, ≰)`.
//!
//! A pair set `C` makes `≤ ∪ C` two-dimensional exactly when removing `C`
//! from `≰` leaves a two-factorizable context, so a maximal factorization of
//! `(X, X, ≰)` yields a minimum extension when its removal is certified.

use std::collections::{BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::{ContextError, FormalContext};
use crate::incompat::build_incompatibility_graph;
use crate::maximal::{ord2factor, MaximalError, SolverOptions};
use crate::twofactor::FerrersFactor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("not a partial order: {0}")]
    NotAPartialOrder(String),
    #[error("invalid poset JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Maximal(#[from] MaximalError),
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// A finite partial order; `up[a]` holds every `b` with `a ≤ b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    elements: Vec<String>,
    up: Vec<FixedBitSet>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PosetJson {
    elements: Vec<String>,
    #[serde(default)]
    relations: Vec<[String; 2]>,
}

impl Poset {
    /// Builds the reflexive-transitive closure of `relations` and checks
    /// antisymmetry.
    pub fn from_relations(
        elements: Vec<String>,
        relations: &[(usize, usize)],
    ) -> Result<Self, ReductionError> {
        let n = elements.len();
        let mut seen = BTreeSet::new();
        for e in &elements {
            if !seen.insert(e) {
                return Err(ReductionError::NotAPartialOrder(format!("duplicate element {e:?}")));
            }
        }
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (a, row) in up.iter_mut().enumerate() {
            row.insert(a);
        }
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(ReductionError::NotAPartialOrder(format!("index out of range in ({a}, {b})")));
            }
            up[a].insert(b);
        }
        // Warshall
        for k in 0..n {
            let via = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&via);
                }
            }
        }
        Self::from_up_sets(elements, up)
    }

    /// Wraps up-sets that must already form a partial order.
    pub fn from_up_sets(elements: Vec<String>, up: Vec<FixedBitSet>) -> Result<Self, ReductionError> {
        let n = elements.len();
        if up.len() != n {
            return Err(ReductionError::NotAPartialOrder("relation size mismatch".into()));
        }
        for a in 0..n {
            if !up[a].contains(a) {
                return Err(ReductionError::NotAPartialOrder(format!("{} ≰ itself", elements[a])));
            }
            for b in up[a].ones() {
                if b != a && up[b].contains(a) {
                    return Err(ReductionError::NotAPartialOrder(format!(
                        "{} and {} are mutually below each other",
                        elements[a], elements[b]
                    )));
                }
                if !up[b].is_subset(&up[a]) {
                    return Err(ReductionError::NotAPartialOrder("relation is not transitive".into()));
                }
            }
        }
        Ok(Self { elements, up })
    }

    pub fn from_json(text: &str) -> Result<Self, ReductionError> {
        let raw: PosetJson = serde_json::from_str(text).map_err(|e| ReductionError::Json(e.to_string()))?;
        let index = |name: &str| {
            raw.elements
                .iter()
                .position(|e| e == name)
                .ok_or_else(|| ReductionError::Json(format!("unknown element {name:?}")))
        };
        let relations = raw
            .relations
            .iter()
            .map(|[a, b]| Ok((index(a)?, index(b)?)))
            .collect::<Result<Vec<_>, ReductionError>>()?;
        Self::from_relations(raw.elements.clone(), &relations)
    }

    /// Covering-free JSON: every strict comparability is listed.
    pub fn to_json(&self) -> String {
        let relations = self
            .strict_pairs()
            .into_iter()
            .map(|(a, b)| [self.elements[a].clone(), self.elements[b].clone()])
            .collect();
        serde_json::to_string_pretty(&PosetJson { elements: self.elements.clone(), relations })
            .expect("poset serializes")
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn up_set(&self, a: usize) -> &FixedBitSet {
        &self.up[a]
    }

    /// `|≤|`, counting the reflexive pairs.
    pub fn relation_size(&self) -> usize {
        self.up.iter().map(|r| r.count_ones(..)).sum()
    }

    /// `(a, b)` with `a < b`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|a| self.up[a].ones().filter(move |&b| b != a).map(move |b| (a, b)))
            .collect()
    }

    /// Whether the order has dimension at most two, decided by the
    /// bipartiteness of the incompatibility graph of `(X, X, ≰)`.
    pub fn has_dimension_at_most_two(&self) -> bool {
        build_incompatibility_graph(&poset_to_context(self)).is_bipartite()
    }

    /// A linear extension, smallest available index first.
    pub fn linear_extension(&self) -> Vec<usize> {
        let n = self.len();
        let mut below = vec![0usize; n];
        for a in 0..n {
            for b in self.up[a].ones().filter(|&b| b != a) {
                below[b] += 1;
            }
        }
        let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&a| below[a] == 0).map(Reverse).collect();
        let mut out = Vec::with_capacity(n);
        while let Some(Reverse(a)) = ready.pop() {
            out.push(a);
            for b in self.up[a].ones().filter(|&b| b != a) {
                below[b] -= 1;
                if below[b] == 0 {
                    ready.push(Reverse(b));
                }
            }
        }
        out
    }
}

/// The context `(X, X, ≰)`.
pub fn poset_to_context(p: &Poset) -> FormalContext {
    let n = p.len();
    let incidence = (0..n).map(|a| (0..n).map(|b| !p.leq(a, b)).collect()).collect();
    FormalContext::new(p.elements.clone(), p.elements.clone(), incidence)
        .expect("poset elements are distinct")
}

/// A two-dimensional extension of a poset with a realizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionExtension {
    /// `|extension| − |≤|`.
    pub added: usize,
    pub extension: Poset,
    /// Two linear orders, least element first, whose intersection is
    /// `extension`.
    pub realizer: [Vec<usize>; 2],
    /// Pairs removed by the underlying factorization.
    pub removed: usize,
    /// Whether `added` is known to be minimum.
    pub certificate: bool,
}

/// Extends `p` to an order of dimension at most two.
///
/// Each factor `Fᵢ` of a maximal factorization of `(X, X, ≰)` gives a total
/// preorder `Lᵢ = (X × X) ∖ Fᵢ` containing `≤`. Breaking ties inside each
/// class of `Lᵢ` along a fixed linear extension of `≤` turns it into a
/// linear order; the two linear orders form the realizer.
pub fn two_dimension_extension(
    p: &Poset,
    options: &SolverOptions,
) -> Result<DimensionExtension, ReductionError> {
    let n = p.len();
    let ctx = poset_to_context(p);
    let result = ord2factor(&ctx, options)?;

    let mut tiebreak = vec![0usize; n];
    for (pos, a) in p.linear_extension().into_iter().enumerate() {
        tiebreak[a] = pos;
    }
    let linearize = |factor: &FerrersFactor| -> Result<Vec<usize>, ReductionError> {
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (a, row) in up.iter_mut().enumerate() {
            row.insert_range(..);
            for b in 0..n {
                if factor.contains(&crate::context::IncidencePair::new(a, b)) {
                    row.set(b, false);
                }
            }
        }
        check_total_preorder(&up)?;
        // in a total preorder, a lies below exactly the elements with larger up-set rank
        let mut seq: Vec<usize> = (0..n).collect();
        seq.sort_by_key(|&a| (Reverse(up[a].count_ones(..)), tiebreak[a]));
        Ok(seq)
    };
    let first = linearize(&result.f1)?;
    let second = linearize(&result.f2)?;

    let position = |seq: &[usize]| {
        let mut pos = vec![0usize; n];
        for (i, &a) in seq.iter().enumerate() {
            pos[a] = i;
        }
        pos
    };
    let (p1, p2) = (position(&first), position(&second));
    let up: Vec<FixedBitSet> = (0..n)
        .map(|a| {
            let mut row = FixedBitSet::with_capacity(n);
            row.extend((0..n).filter(|&b| p1[a] <= p1[b] && p2[a] <= p2[b]));
            row
        })
        .collect();
    for (a, row) in up.iter().enumerate() {
        if !p.up_set(a).is_subset(row) {
            return Err(ReductionError::Internal("realizer does not extend the order".into()));
        }
    }
    let extension = Poset::from_up_sets(p.elements.clone(), up)?;
    Ok(DimensionExtension {
        added: extension.relation_size() - p.relation_size(),
        extension,
        realizer: [first, second],
        removed: result.removed.len(),
        certificate: result.certificate,
    })
}

fn check_total_preorder(up: &[FixedBitSet]) -> Result<(), ReductionError> {
    let n = up.len();
    for a in 0..n {
        for b in 0..n {
            if !up[a].contains(b) && !up[b].contains(a) {
                return Err(ReductionError::Internal(format!("complement of a factor is not total at ({a}, {b})")));
            }
        }
        if up[a].ones().any(|b| !up[b].is_subset(&up[a])) {
            return Err(ReductionError::Internal("complement of a factor is not transitive".into()));
        }
    }
    Ok(())
}
