//! Property tests over random families, sizes and seeds.

use proptest::prelude::*;

use splitrec::model::SplitVectorModel;
use splitrec::records::{
    count_records_edges, count_records_vertices, expected_records_vertices,
    simulate_cuts_vertices,
};
use splitrec::rng::{stream, tags};
use splitrec::tree::{generate_tree, SplitParams, SplitTree};

fn arb_params() -> impl Strategy<Value = SplitParams> {
    prop_oneof![
        Just(SplitParams::bst()),
        (2u32..=4).prop_map(|m| SplitParams::mary(m).unwrap()),
        (2u32..=3).prop_map(|b| {
            SplitParams::new(SplitVectorModel::symmetric(b).unwrap(), 3, 1, 1).unwrap()
        }),
        Just(
            SplitParams::new(
                SplitVectorModel::permuted_fixed(vec![0.2, 0.3, 0.5]).unwrap(),
                2,
                0,
                0,
            )
            .unwrap()
        ),
        Just(SplitParams::new(SplitVectorModel::bst(), 4, 0, 2).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_trees_satisfy_all_invariants(
        params in arb_params(),
        n in 1u64..300,
        seed in 0u64..1000,
    ) {
        let mut rng = stream(seed, &[tags::TREE]);
        let tree = generate_tree(&params, n, &mut rng).unwrap();
        prop_assert!(tree.validate().is_empty(), "{:?}", tree.validate());
        prop_assert_eq!(tree.n(), n);
        prop_assert_eq!(tree.insertion_depths().len() as u64, n);
        // determinism: same (params, n, seed) regenerates the same tree
        let mut rng2 = stream(seed, &[tags::TREE]);
        let again = generate_tree(&params, n, &mut rng2).unwrap();
        prop_assert!(tree == again);
    }

    #[test]
    fn text_round_trip_preserves_structure(
        params in arb_params(),
        n in 1u64..200,
        seed in 0u64..500,
    ) {
        let mut rng = stream(seed, &[tags::TREE]);
        let tree = generate_tree(&params, n, &mut rng).unwrap();
        let mut buf = Vec::new();
        tree.write_text(&mut buf, seed).unwrap();
        let parsed = SplitTree::from_text(&buf[..]).unwrap();
        prop_assert!(tree == parsed);
    }

    #[test]
    fn record_counts_stay_in_bounds(
        params in arb_params(),
        n in 1u64..200,
        seed in 0u64..500,
    ) {
        let mut rng = stream(seed, &[tags::TREE]);
        let tree = generate_tree(&params, n, &mut rng).unwrap();
        let n_nodes = tree.node_count();
        let mut label_rng = stream(seed, &[tags::LABELS]);
        let xv = count_records_vertices(&tree, &mut label_rng);
        prop_assert!(xv >= 1 && xv <= n_nodes);
        let xe = count_records_edges(&tree, &mut label_rng);
        prop_assert!(xe <= n_nodes - 1);
        let mut cut_rng = stream(seed, &[tags::CUTS_V]);
        let cuts = simulate_cuts_vertices(&tree, &mut cut_rng);
        prop_assert!(cuts.count() >= 1 && cuts.count() <= n_nodes);
        prop_assert_eq!(*cuts.cuts.last().unwrap(), tree.root());
    }

    #[test]
    fn expected_records_grow_with_added_nodes(
        // random increasing parent vector of length 1..12
        parents in (1usize..12).prop_flat_map(|len| {
            (0..len).map(|i| 0u32..=(i as u32)).collect::<Vec<_>>()
        }),
        extra_parent_rank in 0u32..100,
    ) {
        let base = SplitTree::from_parents(&parents).unwrap();
        let mut grown = parents.clone();
        grown.push(extra_parent_rank % (parents.len() as u32 + 1));
        let bigger = SplitTree::from_parents(&grown).unwrap();
        prop_assert!(
            expected_records_vertices(&bigger) > expected_records_vertices(&base)
        );
    }
}
