//! Ordinal two-factorizations of formal contexts.
//!
//! A context is covered by two Ferrers relations exactly when its
//! incompatibility graph is bipartite. [`two_factorize`] computes such a
//! cover, [`ord2factor`] first deletes as few incidence pairs as it can so
//! that one exists, and [`biplot`] draws the result.

pub mod biplot;
pub mod context;
pub mod fixtures;
pub mod graph;
pub mod incompat;
pub mod lattice;
pub mod maximal;
pub mod oracle;
pub mod reduction;
pub mod twofactor;

pub use biplot::{factor_axis, reconstruct, render, Biplot, BiplotError, FactorAxis, Format};
pub use context::{parse_cxt, serialize_cxt, ContextError, FormalContext, IncidencePair, Side};
pub use incompat::{build_incompatibility_graph, BipartitionWitness, IncompatibilityGraph};
pub use lattice::{enumerate_concepts, Concept, LatticeError};
pub use maximal::{
    certify_global_optimality, max_bipartite_subset, ord2factor, MaximalError, Mode, OctSolution, SolverOptions,
};
pub use reduction::{poset_to_context, two_dimension_extension, DimensionExtension, Poset, ReductionError};
pub use twofactor::{
    canonical_partition, is_ferrers, two_factorize, validate_factorization, FactorError, FactorizationResult,
    FerrersFactor, Violation,
};
