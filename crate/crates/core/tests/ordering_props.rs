use graphlayout_core::generate;
use graphlayout_core::graph::{bfs_levels, connected_components};
use graphlayout_core::ordering::{self, order_dgl_from_root, order_per_part, Scope, Strategy as Order};
use graphlayout_core::partition::partition_random;
use graphlayout_core::{Graph, Ordering};
use proptest::prelude::*;

fn arb_graph() -> impl Strategy<Value = Graph> {
    (1usize..50)
        .prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..120)))
        .prop_map(|(n, e)| Graph::from_edges(n, &e, false).unwrap())
}

fn strategies() -> [Order; 3] {
    [Order::Random, Order::Rcm, Order::Dgl]
}

fn is_bijection(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&p| p < perm.len() && !std::mem::replace(&mut seen[p], true))
}

proptest! {
    #[test]
    fn every_strategy_is_a_bijection(g in arb_graph(), seed in any::<u64>()) {
        for s in strategies() {
            let o = ordering::order_global(&g, s, seed);
            prop_assert!(is_bijection(o.perm()));
            prop_assert_eq!(o.scope(), Scope::Global);
            prop_assert_eq!(ordering::order_global(&g, s, seed), o.clone());
            let inv = o.inverse();
            prop_assert!((0..g.n()).all(|v| inv[o.perm()[v]] == v));
        }
    }

    #[test]
    fn per_part_orderings_keep_parts_contiguous(g in arb_graph(), p in 1usize..5, seed in any::<u64>()) {
        let part = partition_random(&g, p, seed).unwrap();
        for s in strategies() {
            let o = order_per_part(&g, &part, s, seed);
            prop_assert!(is_bijection(o.perm()));
            prop_assert!(o.check_part_ranges(&part).is_ok());
            // Part k occupies the range after parts 0..k.
            let mut start = 0;
            for (k, &size) in part.part_vertices().iter().enumerate() {
                for v in 0..g.n() {
                    if part.part_of(v) == k {
                        prop_assert!((start..start + size).contains(&o.perm()[v]));
                    }
                }
                start += size;
            }
        }
    }

    #[test]
    fn bfs_orderings_give_deeper_levels_smaller_ids(g in arb_graph(), seed in any::<u64>()) {
        // Within one connected component, a vertex's new id decreases as its
        // BFS level from the component root grows.
        let (comp, _) = connected_components(&g);
        for s in [Order::Rcm, Order::Dgl] {
            let o = ordering::order_global(&g, s, seed);
            let inv = o.inverse();
            // The root of each component is its largest new id.
            for c in 0..g.n() {
                let members: Vec<usize> = (0..g.n()).filter(|&v| comp[v] == c).collect();
                let Some(&root) = members.iter().max_by_key(|&&v| o.perm()[v]) else { continue };
                let level = bfs_levels(&g, root);
                let mut ids: Vec<usize> = members.iter().map(|&v| o.perm()[v]).collect();
                ids.sort_unstable();
                // Contiguous block per component.
                prop_assert_eq!(ids.last().unwrap() - ids[0] + 1, ids.len());
                for w in ids.windows(2) {
                    prop_assert!(level[inv[w[0]]] >= level[inv[w[1]]]);
                }
            }
        }
    }

    #[test]
    fn single_part_reproduces_global(g in arb_graph(), seed in any::<u64>()) {
        let part = partition_random(&g, 1, 0).unwrap();
        for s in strategies() {
            let local = order_per_part(&g, &part, s, seed);
            let global = ordering::order_global(&g, s, seed);
            prop_assert_eq!(local.perm(), global.perm());
        }
    }
}

#[test]
fn dgl_path_hand_trace() {
    let g = generate::path(5);
    let o = order_dgl_from_root(&g, 0, 0).unwrap();
    assert_eq!(o.perm(), &[4, 3, 2, 1, 0]);
}

#[test]
fn dgl_star_from_leaf() {
    let g = generate::star(4);
    for seed in 0..20 {
        let o = ordering::order_dgl(&g, seed);
        let root = (0..5).find(|&v| o.perm()[v] == 4).unwrap();
        assert_ne!(root, 0, "root must be a minimum-degree leaf");
        assert_eq!(o.perm()[0], 3, "center sits in level 1");
        // The other leaves take ids 0..3, contiguous.
        let mut rest: Vec<usize> = (1..5).filter(|&v| v != root).map(|v| o.perm()[v]).collect();
        rest.sort_unstable();
        assert_eq!(rest, vec![0, 1, 2]);
    }
}

#[test]
fn invalid_orderings() {
    assert!(Ordering::new(vec![0, 0], Scope::Global).is_err());
    assert!(Ordering::new(vec![1, 2], Scope::Global).is_err());
    assert!(order_dgl_from_root(&generate::path(3), 3, 0).is_err());
}
