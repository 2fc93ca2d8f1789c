use proptest::prelude::*;
use treksep::algebra::{
    build_covariance, generic_rank_oracle, sample_parameters, translate_subdivision_parameters, DEFAULT_SCALE,
};
use treksep::trek::{max_noncrossing, DEFAULT_CAP};
use treksep::verify::random_graph;
use treksep::{
    ci_implied, d_sep_via_t_sep, d_separates, generic_rank, parse_graph, vset, GraphClass, MixedGraph, VertexSet,
};

fn class() -> impl Strategy<Value = GraphClass> {
    prop::sample::select(vec![GraphClass::Dag, GraphClass::Undirected, GraphClass::Mixed])
}

fn query(max_n: usize) -> impl Strategy<Value = (MixedGraph, VertexSet, VertexSet, u64)> {
    (class(), 1..=max_n, any::<u64>(), 0.2f64..0.8).prop_flat_map(|(c, n, seed, d)| {
        let g = random_graph(c, n, seed, d);
        let set = prop::collection::btree_set(1..=n, 1..=3.min(n)).prop_map(vset);
        (Just(g), set.clone(), set, Just(seed))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn file_format_round_trips((g, _, _, _) in query(7)) {
        prop_assert_eq!(parse_graph(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn min_cut_rank_is_generic_rank((g, a, b, seed) in query(6)) {
        let comb = generic_rank(&g, &a, &b).unwrap();
        prop_assert_eq!(comb, generic_rank_oracle(&g, &a, &b, seed, 5).unwrap());
        prop_assert!(comb <= a.len().min(b.len()));
    }

    #[test]
    fn min_cut_rank_is_largest_noncrossing_system((g, a, b, _) in query(5)) {
        prop_assert_eq!(generic_rank(&g, &a, &b).unwrap(), max_noncrossing(&g, &a, &b, DEFAULT_CAP).unwrap());
    }

    #[test]
    fn subdivision_preserves_covariance((g, _, _, seed) in query(6)) {
        let sub = g.bidirected_subdivision();
        let p = sample_parameters(&sub, seed, DEFAULT_SCALE);
        let big = build_covariance(&sub, &p).unwrap();
        let small = build_covariance(&g, &translate_subdivision_parameters(&g, &p)).unwrap();
        let idx: Vec<usize> = (0..g.m()).collect();
        prop_assert_eq!(big.submatrix(&idx, &idx), small);
    }

    #[test]
    fn dsep_three_ways(n in 2usize..=6, seed: u64, picks in prop::collection::vec(0usize..4, 6)) {
        let g = random_graph(GraphClass::Dag, n, seed, 0.5);
        let mut sets = [VertexSet::new(), VertexSet::new(), VertexSet::new(), VertexSet::new()];
        for (v, &k) in picks.iter().take(n).enumerate() {
            sets[k].insert(treksep::VertexId::new(v + 1));
        }
        let [_, a, b, c] = sets;
        prop_assume!(!a.is_empty() && !b.is_empty());
        let classic = d_separates(&g, &a, &b, &c).unwrap();
        prop_assert_eq!(classic, d_sep_via_t_sep(&g, &a, &b, &c).unwrap());
        prop_assert_eq!(classic, ci_implied(&g, &a, &b, &c).unwrap());
    }
}
