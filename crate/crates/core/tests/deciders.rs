mod common;

use common::{graph_from_mask, random_revelation};
use evendeg::degeneracy::{
    build_prescribed_witness, exact_even_decomposable, exact_even_degenerate, greedy_even_degenerate, verify_chain,
    verify_ordering, GreedyPolicy,
};
use evendeg::graph::families;
use evendeg::sampling::sample_gnp;
use evendeg::{verify_revelation, Graph, RandomSource};
use proptest::prelude::*;
use rand::seq::SliceRandom;

/// Brute force over all orders: independent of the subset DP.
fn brute_force_degenerate(g: &Graph) -> bool {
    fn go(g: &Graph, left: &mut Vec<usize>) -> bool {
        if left.len() <= 2 {
            return true;
        }
        for i in 0..left.len() {
            let v = left.remove(i);
            let back = left.iter().filter(|&&u| g.has_edge(u, v)).count();
            if back % 2 == 0 && go(g, left) {
                left.insert(i, v);
                return true;
            }
            left.insert(i, v);
        }
        false
    }
    go(g, &mut (0..g.n()).collect())
}

#[test]
fn named_graphs() {
    let yes = [families::complete(3), families::path(3), families::cycle(4), families::cycle(5)];
    let no = [families::star(3), families::complete(4), families::complete(5), families::petersen()];
    for g in &yes {
        let order = exact_even_degenerate(g).unwrap().expect("even-degenerate");
        assert!(verify_ordering(g, &order).unwrap());
    }
    for g in &no {
        assert!(exact_even_degenerate(g).unwrap().is_none(), "{g:?}");
    }
    assert!(exact_even_decomposable(&families::complete(3)).unwrap().is_none());
    let c4 = families::cycle(4);
    let chain = exact_even_decomposable(&c4).unwrap().expect("C4 decomposes");
    assert!(verify_chain(&c4, &chain));
}

#[test]
fn dp_matches_brute_force_on_all_six_vertex_graphs() {
    for mask in 0..1u64 << 15 {
        let g = graph_from_mask(6, mask);
        assert_eq!(exact_even_degenerate(&g).unwrap().is_some(), brute_force_degenerate(&g), "mask {mask}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn orders_verify_and_greedy_is_sound(n in 3usize..=11, p in prop::sample::select(vec![0.2, 0.5, 0.8]), seed in any::<u64>()) {
        let mut rng = RandomSource::new(seed, 0);
        let g = sample_gnp(n, p, &mut rng).unwrap();
        let exact = exact_even_degenerate(&g).unwrap();
        if let Some(order) = &exact {
            prop_assert!(verify_ordering(&g, order).unwrap());
            // The last two vertices keep the edge-count parity.
            let (x, y) = (order[n - 2], order[n - 1]);
            prop_assert_eq!(usize::from(g.has_edge(x, y)), g.edge_count() % 2);
        }
        for policy in [GreedyPolicy::FirstIndex, GreedyPolicy::Random, GreedyPolicy::MinDegree, GreedyPolicy::MaxDegree] {
            if let Some(order) = greedy_even_degenerate(&g, policy, &mut rng) {
                prop_assert!(verify_ordering(&g, &order).unwrap());
                prop_assert!(exact.is_some());
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let h = g.relabel(&perm).unwrap();
        prop_assert_eq!(exact_even_degenerate(&h).unwrap().is_some(), exact.is_some());
    }

    #[test]
    fn witness_meets_revelation(k in 0usize..=5, seed in any::<u64>()) {
        let mut rng = RandomSource::new(seed, 1);
        let n = 3 * k + 4;
        let rev = random_revelation(n, k, &mut rng);
        let (g, order, _) = build_prescribed_witness(&rev, n).unwrap();
        prop_assert!(verify_revelation(&g, &rev));
        prop_assert!(verify_ordering(&g, &order).unwrap());
    }
}
