//! Maximal ordinal two-factorizations of arbitrary contexts.
//!
//! Incidence pairs are deleted until the incompatibility graph becomes
//! bipartite, by repeatedly removing an odd cycle transversal. Deleting pairs
//! can create new incompatibilities, so the graph is rebuilt and checked
//! again after every round. The surviving incidence is then factorized
//! exactly.

mod oct;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::context::FormalContext;
use crate::context::IncidencePair;
use crate::incompat::{build_incompatibility_graph, IncompatibilityGraph};
use crate::twofactor::{canonical_partition, two_factorize, FactorError, FactorizationResult};

pub use oct::OutOfTime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MaximalError {
    #[error("time budget exceeded")]
    BudgetExceeded,
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<OutOfTime> for MaximalError {
    fn from(_: OutOfTime) -> Self {
        MaximalError::BudgetExceeded
    }
}

/// How transversals are computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Mode {
    /// Branch-and-bound; minimum transversals, lexicographically smallest
    /// among equals.
    #[default]
    Exact,
    /// Seeded local search; always returns, no optimality guarantee.
    Heuristic,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Heuristic => "heuristic",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "heuristic" => Ok(Mode::Heuristic),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// Restarts used by the heuristic.
pub const HEURISTIC_RESTARTS: usize = 32;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverOptions {
    pub mode: Mode,
    /// Wall-clock limit for the whole run; `None` means unbounded. Only the
    /// exact mode can run out of it.
    pub budget: Option<Duration>,
    pub seed: u64,
}

impl SolverOptions {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn heuristic(seed: u64) -> Self {
        Self { mode: Mode::Heuristic, seed, ..Self::default() }
    }

    fn deadline(&self) -> Option<Instant> {
        self.budget.map(|b| Instant::now() + b)
    }
}

/// Pairs that induce a bipartite subgraph, and the pairs deleted to get there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OctSolution {
    pub kept: BTreeSet<IncidencePair>,
    pub deleted: BTreeSet<IncidencePair>,
    /// Whether `deleted` is known to be minimum.
    pub optimal: bool,
}

pub fn max_bipartite_subset(
    graph: &IncompatibilityGraph,
    options: &SolverOptions,
) -> Result<OctSolution, MaximalError> {
    solve_round(graph, options, options.deadline())
}

fn solve_round(
    graph: &IncompatibilityGraph,
    options: &SolverOptions,
    deadline: Option<Instant>,
) -> Result<OctSolution, MaximalError> {
    let deleted_idx = match options.mode {
        Mode::Exact => oct::ExactSolver::new(graph.graph(), deadline).solve()?,
        Mode::Heuristic => oct::local_search(graph.graph(), options.seed, HEURISTIC_RESTARTS),
    };
    let deleted: BTreeSet<IncidencePair> = deleted_idx.iter().map(|&v| graph.vertices()[v]).collect();
    let kept = graph.vertices().iter().filter(|p| !deleted.contains(p)).copied().collect();
    Ok(OctSolution { kept, deleted, optimal: options.mode == Mode::Exact })
}

/// Size of a minimum odd cycle transversal of the incompatibility graph.
pub fn minimum_transversal_size(
    graph: &IncompatibilityGraph,
    budget: Option<Duration>,
) -> Result<usize, MaximalError> {
    let deadline = budget.map(|b| Instant::now() + b);
    Ok(oct::ExactSolver::new(graph.graph(), deadline).minimum_size()?)
}

/// Computes a large ordinal two-factorization of any context.
///
/// The result is in canonical partition form. `certificate` is set when the
/// covered incidence is provably as large as possible: no pairs had to be
/// removed, or a single exact round sufficed.
pub fn ord2factor(
    ctx: &FormalContext,
    options: &SolverOptions,
) -> Result<FactorizationResult, MaximalError> {
    let deadline = options.deadline();
    let max_rounds = ctx.incidence_count();
    let mut current = ctx.clone();
    let mut rounds = 0;
    loop {
        let graph = build_incompatibility_graph(&current);
        if graph.is_bipartite() {
            break;
        }
        if rounds >= max_rounds {
            return Err(MaximalError::Internal(format!("no bipartite incidence after {rounds} rounds")));
        }
        let solution = solve_round(&graph, options, deadline)?;
        current = ctx.restrict_to(&solution.kept).map_err(FactorError::from)?;
        rounds += 1;
        if rounds >= 2 {
            log::info!(
                "kept incidence after a {} transversal is not two-factorizable (round {rounds})",
                options.mode
            );
        }
    }

    let mut result = two_factorize(&current)?;
    let covered = current.incidence_set();
    result.removed = ctx.incidence().into_iter().filter(|p| !covered.contains(p)).collect();
    let mut result = canonical_partition(ctx, &result)?;
    result.rounds = rounds;
    result.certificate = rounds == 0 || (rounds == 1 && options.mode == Mode::Exact);
    Ok(result)
}

/// Checks that `result` is a globally maximal factorization by the
/// single-round argument: the removed pairs form a minimum odd cycle
/// transversal of the original incompatibility graph and the remaining
/// incidence is already two-factorizable.
pub fn certify_global_optimality(ctx: &FormalContext, result: &FactorizationResult) -> bool {
    if result.removed.iter().any(|p| !ctx.contains(*p)) {
        return false;
    }
    let Ok(covered) = ctx.remove_incidences(&result.removed) else {
        return false;
    };
    if !build_incompatibility_graph(&covered).is_bipartite() {
        return false;
    }
    if result.removed.is_empty() {
        return true;
    }
    if result.rounds != 1 {
        return false;
    }
    let graph = build_incompatibility_graph(ctx);
    let mut alive = graph.graph().full_mask();
    for p in &result.removed {
        if let Some(i) = graph.index_of(*p) {
            alive.set(i, false);
        }
    }
    graph.graph().is_bipartite_within(&alive)
        && minimum_transversal_size(&graph, None).is_ok_and(|k| k == result.removed.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::twofactor::validate_factorization;

    #[test]
    fn forum_romanum_exact() {
        let ctx = fixtures::forum_romanum();
        let r = ord2factor(&ctx, &SolverOptions::exact()).unwrap();
        let expected: BTreeSet<_> = [
            ctx.pair("Basilica of Maxentius", "B").unwrap(),
            ctx.pair("Temple of Romulus", "GB1").unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(r.removed, expected);
        assert!(r.certificate);
        assert_eq!(r.rounds, 1);
        assert_eq!(validate_factorization(&ctx, &r), []);
        assert!(certify_global_optimality(&ctx, &r));
    }

    #[test]
    fn factorizable_input_is_untouched() {
        let ctx = fixtures::das();
        let r = ord2factor(&ctx, &SolverOptions::exact()).unwrap();
        assert!(r.removed.is_empty());
        assert_eq!(r.rounds, 0);
        assert!(r.certificate);
        let direct = canonical_partition(&ctx, &two_factorize(&ctx).unwrap()).unwrap();
        assert_eq!(r, direct);
        assert!(certify_global_optimality(&ctx, &r));
    }

    #[test]
    fn triangle_graph_needs_one_removal() {
        let ctx = fixtures::forum_romanum();
        let g = build_incompatibility_graph(&ctx);
        let sol = max_bipartite_subset(&g, &SolverOptions::exact()).unwrap();
        assert_eq!(sol.deleted.len(), 2);
        assert!(sol.optimal);
        assert_eq!(sol.kept.len() + sol.deleted.len(), g.len());
    }

    #[test]
    fn heuristic_is_valid_and_no_better_than_exact() {
        let ctx = fixtures::forum_romanum();
        for seed in 0..4 {
            let r = ord2factor(&ctx, &SolverOptions::heuristic(seed)).unwrap();
            assert_eq!(validate_factorization(&ctx, &r), []);
            assert!(r.removed.len() >= 2);
        }
    }

    #[test]
    fn multi_round_results_are_not_certified() {
        let ctx = fixtures::forum_romanum();
        let mut r = ord2factor(&ctx, &SolverOptions::exact()).unwrap();
        r.rounds = 2;
        assert!(!certify_global_optimality(&ctx, &r));
    }

    #[test]
    fn zero_budget_runs_out() {
        let ctx = fixtures::forum_romanum();
        let opts = SolverOptions { budget: Some(Duration::ZERO), ..SolverOptions::exact() };
        assert_eq!(ord2factor(&ctx, &opts), Err(MaximalError::BudgetExceeded));
        let opts = SolverOptions { budget: Some(Duration::ZERO), ..SolverOptions::heuristic(0) };
        assert!(ord2factor(&ctx, &opts).is_ok());
    }
}
