//! Ordinal two-factorizations of two-factorizable contexts.
//!
//! The factors are read off the concept lattice of the complement context:
//! pick a conjugate order, sweep the concepts along each of the two resulting
//! linear orders, and take the complement of what the sweep covers.

use std::collections::BTreeSet;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::context::{ContextError, FormalContext, IncidencePair};
use crate::incompat::build_incompatibility_graph;
use crate::lattice::{self, LatticeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("context is not two-factorizable: {0}")]
    NotTwoFactorizable(String),
    #[error("invalid factorization: {0:?}")]
    InvalidFactorization(Vec<Violation>),
    #[error(transparent)]
    Context(#[from] ContextError),
}

impl From<LatticeError> for FactorError {
    fn from(e: LatticeError) -> Self {
        FactorError::NotTwoFactorizable(e.to_string())
    }
}

/// A set of incidence pairs meant to satisfy the Ferrers condition.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct FerrersFactor(pub BTreeSet<IncidencePair>);

impl FerrersFactor {
    pub fn pairs(&self) -> &BTreeSet<IncidencePair> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: &IncidencePair) -> bool {
        self.0.contains(p)
    }

    /// Two pairs `(g, m)`, `(h, n)` of the factor with neither `(g, n)` nor
    /// `(h, m)` in it, if any.
    pub fn ferrers_violation(&self) -> Option<(IncidencePair, IncidencePair)> {
        // Ferrers iff the object rows form a chain under inclusion.
        let mut rows: Vec<(usize, BTreeSet<usize>)> = Vec::new();
        for p in &self.0 {
            match rows.last_mut() {
                Some((g, r)) if *g == p.object => {
                    r.insert(p.attribute);
                }
                _ => rows.push((p.object, [p.attribute].into_iter().collect())),
            }
        }
        rows.sort_by_key(|(g, r)| (std::cmp::Reverse(r.len()), *g));
        for w in rows.windows(2) {
            let (g, big) = &w[0];
            let (h, small) = &w[1];
            if let Some(&n) = small.iter().find(|n| !big.contains(n)) {
                let m = *big.iter().find(|m| !small.contains(m)).expect("rows differ");
                return Some((IncidencePair::new(*g, m), IncidencePair::new(*h, n)));
            }
        }
        None
    }

    pub fn is_ferrers(&self) -> bool {
        self.ferrers_violation().is_none()
    }
}

impl FromIterator<IncidencePair> for FerrersFactor {
    fn from_iter<T: IntoIterator<Item = IncidencePair>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Two factors, the pairs they share, and the pairs left uncovered.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactorizationResult {
    pub f1: FerrersFactor,
    pub f2: FerrersFactor,
    pub shared: BTreeSet<IncidencePair>,
    pub removed: BTreeSet<IncidencePair>,
    /// Set when the removal is provably minimum; see [`crate::maximal`].
    pub certificate: bool,
    /// Number of transversal rounds that preceded the factorization.
    pub rounds: usize,
}

impl FactorizationResult {
    /// `f1 ∪ f2`.
    pub fn covered(&self) -> BTreeSet<IncidencePair> {
        self.f1.0.union(&self.f2.0).copied().collect()
    }

    /// Relabels the factors so that `f1` holds the smallest pair that lies in
    /// exactly one factor.
    pub(crate) fn canonical_labels(mut self) -> Self {
        let first_exclusive =
            |a: &FerrersFactor, b: &FerrersFactor| a.0.iter().find(|p| !b.contains(p)).copied();
        let e1 = first_exclusive(&self.f1, &self.f2);
        let e2 = first_exclusive(&self.f2, &self.f1);
        let swap = match (e1, e2) {
            (Some(a), Some(b)) => b < a,
            (None, Some(_)) => true,
            _ => false,
        };
        if swap {
            std::mem::swap(&mut self.f1, &mut self.f2);
        }
        self
    }
}

/// Whether `pairs ⊆ I` satisfies the Ferrers condition.
pub fn is_ferrers(ctx: &FormalContext, pairs: &BTreeSet<IncidencePair>) -> Result<bool, FactorError> {
    if let Some(p) = pairs.iter().find(|p| !ctx.contains(**p)) {
        return Err(ContextError::PairNotIncident { object: p.object, attribute: p.attribute }.into());
    }
    Ok(FerrersFactor(pairs.clone()).is_ferrers())
}

/// Computes an ordinal two-factorization `F₁ ∪ F₂ = I`.
///
/// Nothing is removed, so the result is always certified.
/// Fails with [`FactorError::NotTwoFactorizable`] when the complement
/// lattice has no conjugate order or a sweep leaves a pair outside `I`.
pub fn two_factorize(ctx: &FormalContext) -> Result<FactorizationResult, FactorError> {
    if ctx.incidence_count() == 0 {
        return Ok(FactorizationResult { certificate: true, ..Default::default() });
    }
    let complement = ctx.complement();
    let order = lattice::concept_order(lattice::enumerate_concepts(&complement)?);
    let conjugate = lattice::conjugate_order(&order)?;

    let f1 = sweep(ctx, &order, &conjugate.first)?;
    let f2 = sweep(ctx, &order, &conjugate.second)?;
    let shared = f1.0.intersection(&f2.0).copied().collect();
    Ok(FactorizationResult { f1, f2, shared, certificate: true, ..Default::default() }.canonical_labels())
}

/// `(G × M) ∖ L` where `L` accumulates `Ã × B` over concepts `(A, B)` of the
/// complement, `Ã` being the union of all extents seen so far.
fn sweep(
    ctx: &FormalContext,
    order: &lattice::ConceptOrder,
    sequence: &[usize],
) -> Result<FerrersFactor, FactorError> {
    let mut covered = vec![FixedBitSet::with_capacity(ctx.n_attributes()); ctx.n_objects()];
    let mut seen = FixedBitSet::with_capacity(ctx.n_objects());
    for &c in sequence {
        let concept = &order.concepts[c];
        seen.union_with(&concept.extent);
        for g in seen.ones() {
            covered[g].union_with(&concept.intent);
        }
    }
    let mut factor = BTreeSet::new();
    for (g, row) in covered.iter_mut().enumerate() {
        row.toggle_range(..);
        for m in row.ones() {
            if !ctx.has(g, m) {
                return Err(FactorError::NotTwoFactorizable(format!(
                    "sweep leaves ({}, {}) outside the incidence",
                    ctx.objects()[g],
                    ctx.attributes()[m]
                )));
            }
            factor.insert(IncidencePair::new(g, m));
        }
    }
    Ok(FerrersFactor(factor))
}

/// Rewrites a factorization so that `shared` is exactly the set of isolated
/// pairs of the covered context and both factors contain it.
pub fn canonical_partition(
    ctx: &FormalContext,
    result: &FactorizationResult,
) -> Result<FactorizationResult, FactorError> {
    let violations = validate_factorization(ctx, result);
    if !violations.is_empty() {
        return Err(FactorError::InvalidFactorization(violations));
    }
    let covered_ctx = ctx.remove_incidences(&result.removed)?;
    let core = build_incompatibility_graph(&covered_ctx).isolated_pairs();
    let widen = |f: &FerrersFactor| -> FerrersFactor { f.0.union(&core).copied().collect() };
    let out = FactorizationResult {
        f1: widen(&result.f1),
        f2: widen(&result.f2),
        shared: core,
        ..result.clone()
    }
    .canonical_labels();

    let violations = validate_factorization(ctx, &out);
    if !violations.is_empty() {
        return Err(FactorError::InvalidFactorization(violations));
    }
    Ok(out)
}

/// A broken invariant of a [`FactorizationResult`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// Two pairs of one factor that violate the Ferrers condition.
    FerrersViolation { factor: u8, first: IncidencePair, second: IncidencePair },
    /// Pairs of `I ∖ removed` covered by neither factor.
    CoverageViolation { missing: Vec<IncidencePair> },
    /// Factor pairs outside `I ∖ removed`.
    OutsideIncidence { factor: u8, pairs: Vec<IncidencePair> },
    /// Removed pairs that were never in `I`.
    RemovedNotIncident { pairs: Vec<IncidencePair> },
    /// Shared pairs missing from a factor.
    SharedNotInBoth { pairs: Vec<IncidencePair> },
    /// Shared pairs that have an incompatible partner.
    SharedNotIsolated { pairs: Vec<IncidencePair> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Lists every broken invariant; empty means the factorization is valid.
pub fn validate_factorization(ctx: &FormalContext, result: &FactorizationResult) -> Vec<Violation> {
    let mut out = Vec::new();

    let bad_removed: Vec<_> = result.removed.iter().filter(|p| !ctx.contains(**p)).copied().collect();
    if !bad_removed.is_empty() {
        out.push(Violation::RemovedNotIncident { pairs: bad_removed });
    }
    let target: BTreeSet<IncidencePair> =
        ctx.incidence().into_iter().filter(|p| !result.removed.contains(p)).collect();

    for (k, factor) in [(1u8, &result.f1), (2, &result.f2)] {
        let outside: Vec<_> = factor.0.difference(&target).copied().collect();
        if !outside.is_empty() {
            out.push(Violation::OutsideIncidence { factor: k, pairs: outside });
        }
        if let Some((first, second)) = factor.ferrers_violation() {
            out.push(Violation::FerrersViolation { factor: k, first, second });
        }
    }

    let covered = result.covered();
    let missing: Vec<_> = target.difference(&covered).copied().collect();
    if !missing.is_empty() {
        out.push(Violation::CoverageViolation { missing });
    }

    let not_in_both: Vec<_> = result
        .shared
        .iter()
        .filter(|p| !result.f1.contains(p) || !result.f2.contains(p))
        .copied()
        .collect();
    if !not_in_both.is_empty() {
        out.push(Violation::SharedNotInBoth { pairs: not_in_both });
    }

    if !result.shared.is_empty() {
        let core = ctx
            .restrict_to(&target)
            .map(|c| build_incompatibility_graph(&c).isolated_pairs())
            .unwrap_or_default();
        let stray: Vec<_> = result.shared.difference(&core).copied().collect();
        if !stray.is_empty() {
            out.push(Violation::SharedNotIsolated { pairs: stray });
        }
    }
    out
}
