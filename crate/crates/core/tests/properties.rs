use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use proptest::prelude::*;

use ord2factor::biplot::{factor_axis, reconstruct};
use ord2factor::lattice::enumerate_concepts;
use ord2factor::oracle::{random_two_factorizable_context, GeneratorSpec};
use ord2factor::{
    build_incompatibility_graph, canonical_partition, ord2factor, parse_cxt, serialize_cxt, two_factorize,
    validate_factorization, FormalContext, IncidencePair, SolverOptions,
};

fn context(max_g: usize, max_m: usize) -> impl Strategy<Value = FormalContext> {
    (0..=max_g, 0..=max_m).prop_flat_map(|(g, m)| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), m), g).prop_map(move |rows| {
            let pairs = rows
                .iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().enumerate().filter(|(_, &x)| x).map(move |(j, _)| IncidencePair::new(i, j)))
                .collect::<Vec<_>>();
            FormalContext::from_pairs(g, m, pairs).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn cxt_round_trip(ctx in context(6, 6)) {
        let text = serialize_cxt(&ctx);
        prop_assert_eq!(parse_cxt(&text).unwrap(), ctx.clone());
        prop_assert_eq!(FormalContext::from_json(&ctx.to_json()).unwrap(), ctx);
    }

    #[test]
    fn derivation_is_a_galois_connection(ctx in context(5, 5), a in any::<u8>(), b in any::<u8>()) {
        let mut objects = FixedBitSet::with_capacity(ctx.n_objects());
        objects.extend((0..ctx.n_objects()).filter(|i| a >> i & 1 == 1));
        let mut attributes = FixedBitSet::with_capacity(ctx.n_attributes());
        attributes.extend((0..ctx.n_attributes()).filter(|i| b >> i & 1 == 1));
        // B ⊆ A′ iff A ⊆ B′
        prop_assert_eq!(attributes.is_subset(&ctx.intent_of(&objects)), objects.is_subset(&ctx.extent_of(&attributes)));
        // A ⊆ A″ and A‴ = A′
        let closed = ctx.extent_of(&ctx.intent_of(&objects));
        prop_assert!(objects.is_subset(&closed));
        prop_assert_eq!(ctx.intent_of(&closed), ctx.intent_of(&objects));
    }

    #[test]
    fn concepts_are_closed_and_distinct(ctx in context(4, 4)) {
        let concepts = enumerate_concepts(&ctx).unwrap();
        let extents: BTreeSet<Vec<usize>> = concepts.iter().map(|c| c.extent_indices()).collect();
        prop_assert_eq!(extents.len(), concepts.len());
        for c in &concepts {
            prop_assert_eq!(&ctx.intent_of(&c.extent), &c.intent);
            prop_assert_eq!(&ctx.extent_of(&c.intent), &c.extent);
        }
    }

    #[test]
    fn incompatibility_is_transpose_invariant(ctx in context(5, 5)) {
        let swap = |p: &IncidencePair| IncidencePair::new(p.attribute, p.object);
        let direct: BTreeSet<_> = build_incompatibility_graph(&ctx).edges().into_iter().collect();
        let transposed: BTreeSet<_> = build_incompatibility_graph(&ctx.transpose())
            .edges()
            .into_iter()
            .map(|(a, b)| {
                let (a, b) = (swap(&a), swap(&b));
                if a < b { (a, b) } else { (b, a) }
            })
            .collect();
        prop_assert_eq!(direct, transposed);
    }

    #[test]
    fn witnesses_verify(ctx in context(5, 5)) {
        let g = build_incompatibility_graph(&ctx);
        prop_assert!(g.verify(&g.bipartition()));
    }

    #[test]
    fn heuristic_results_validate(ctx in context(5, 5), seed in any::<u64>()) {
        let r = ord2factor(&ctx, &SolverOptions::heuristic(seed)).unwrap();
        prop_assert!(validate_factorization(&ctx, &r).is_empty());
        let exact = ord2factor(&ctx, &SolverOptions::exact()).unwrap();
        prop_assert!(r.removed.len() >= exact.removed.len());
    }

    #[test]
    fn biplots_are_lossless(g in 1usize..8, m in 1usize..8, density in 0.0f64..1.0, seed in any::<u64>()) {
        let ctx = random_two_factorizable_context(&GeneratorSpec::new(g, m, density, seed));
        let r = canonical_partition(&ctx, &two_factorize(&ctx).unwrap()).unwrap();
        let a1 = factor_axis(&ctx, &r.f1).unwrap();
        let a2 = factor_axis(&ctx, &r.f2).unwrap();
        prop_assert_eq!(reconstruct(&a1, &a2), ctx.incidence_set());
        // positions strictly decrease in support along each axis
        for axis in [&a1, &a2] {
            let supports: Vec<usize> = (1..=axis.len())
                .map(|p| axis.object_position.iter().filter(|&&q| q >= p).count())
                .collect();
            prop_assert!(supports.windows(2).all(|w| w[0] > w[1]));
        }
    }
}
