//! Layout metrics against direct recomputation from edge lists, including
//! multigraphs, self-loops and directed inputs.

use std::collections::{BTreeSet, VecDeque};

use graphlayout_core::metrics::{self, layout_report};
use graphlayout_core::{Graph, Partition};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Case {
    n: usize,
    edges: Vec<(usize, usize)>,
    directed: bool,
    p: usize,
    assignment: Vec<usize>,
}

fn arb_case() -> impl Strategy<Value = Case> {
    (1usize..25, 1usize..5, any::<bool>())
        .prop_flat_map(|(n, p, directed)| {
            (
                Just(n),
                prop::collection::vec((0..n, 0..n), 0..70),
                Just(directed),
                Just(p),
                prop::collection::vec(0..p, n),
            )
        })
        .prop_map(|(n, edges, directed, p, assignment)| Case { n, edges, directed, p, assignment })
}

/// Arcs as stored: both directions for undirected non-loop edges.
fn arcs(c: &Case) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &(u, v) in &c.edges {
        out.push((u, v));
        if !c.directed && u != v {
            out.push((v, u));
        }
    }
    out
}

fn build(c: &Case) -> (Graph, Partition) {
    let g = Graph::from_edges(c.n, &c.edges, c.directed).unwrap();
    let part = Partition::new(&g, c.p, c.assignment.clone()).unwrap();
    (g, part)
}

/// Undirected edges as stored: undirected inputs keep parallel copies,
/// directed inputs collapse to one edge per adjacent pair.
fn sym_edges(c: &Case) -> Vec<(usize, usize)> {
    let pairs = c.edges.iter().map(|&(u, v)| (u.min(v), u.max(v)));
    if c.directed {
        pairs.collect::<BTreeSet<_>>().into_iter().collect()
    } else {
        pairs.collect()
    }
}

fn replication_oracle(c: &Case, hops: usize) -> f64 {
    let edges = sym_edges(c);
    if edges.is_empty() {
        return 0.0;
    }
    let mut adj = vec![Vec::new(); c.n];
    for &(u, v) in &edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut stored = 0;
    for k in 0..c.p {
        let mut dist = vec![usize::MAX; c.n];
        let mut queue: VecDeque<usize> = (0..c.n).filter(|&v| c.assignment[v] == k).collect();
        for &v in &queue {
            dist[v] = 0;
        }
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        stored += edges.iter().filter(|&&(u, v)| dist[u] < hops || dist[v] < hops).count();
    }
    stored as f64 / edges.len() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn partition_metrics_match_direct_counts(c in arb_case()) {
        let (g, part) = build(&c);
        let a = &c.assignment;
        let arcs = arcs(&c);
        let m = arcs.len();
        let pf = c.p as f64;

        let mut size = vec![0usize; c.p];
        let mut stored = vec![0usize; c.p];
        let mut cut = vec![0usize; c.p];
        for v in 0..c.n {
            size[a[v]] += 1;
        }
        for &(u, v) in &arcs {
            stored[a[u]] += 1;
            if a[u] != a[v] {
                cut[a[u]] += 1;
            }
        }
        prop_assert_eq!(part.part_vertices(), &size[..]);
        prop_assert_eq!(part.part_edges(), &stored[..]);
        prop_assert_eq!(part.part_cut(), &cut[..]);

        let r = layout_report(&g, &part, &g, None).unwrap();
        let cut_arcs = arcs.iter().filter(|&&(u, v)| a[u] != a[v]).count();
        prop_assert_eq!(r.v_max, *size.iter().max().unwrap() as f64 * pf / c.n as f64);
        let e_max = if m == 0 { 0.0 } else { *stored.iter().max().unwrap() as f64 * pf / m as f64 };
        prop_assert_eq!(r.e_max, e_max);
        prop_assert_eq!(r.ec, if m == 0 { 0.0 } else { cut_arcs as f64 / m as f64 });
        prop_assert_eq!(r.ec_max, *cut.iter().max().unwrap());
        prop_assert_eq!(r.has_empty_part, size.contains(&0));
        if !c.directed {
            // Per-part cut counts sum to twice the undirected cut edges.
            prop_assert_eq!(cut.iter().sum::<usize>(), cut_arcs);
        }
    }

    #[test]
    fn replication_matches_bfs_oracle(c in arb_case(), hops in 1usize..4) {
        let (g, part) = build(&c);
        prop_assert_eq!(metrics::replication_ratio(&g, &part, hops).unwrap(), replication_oracle(&c, hops));
    }

    #[test]
    fn colocation_and_gaps_match_direct_sums(c in arb_case()) {
        let (g, _) = build(&c);
        let mut rows = vec![Vec::new(); c.n];
        for (u, v) in arcs(&c) {
            rows[u].push(v);
        }
        let (mut close, mut pairs, mut cost) = (0usize, 0usize, 0.0f64);
        for (v, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            pairs += row.len().saturating_sub(1);
            close += row.windows(2).filter(|w| w[1] - w[0] <= 1).count();
            if let Some(&first) = row.first() {
                let mut own = (1.0 + first.abs_diff(v) as f64).log2();
                for w in row.windows(2) {
                    own += (1.0 + (w[1] - w[0]) as f64).log2();
                }
                cost += own;
            }
        }
        let coloc = if pairs == 0 { 0.0 } else { close as f64 / pairs as f64 };
        prop_assert_eq!(metrics::colocation_ratio(&g), coloc);
        let m = g.m();
        let gap = if c.n < 2 || m == 0 { 0.0 } else { (cost / (m as f64 * (c.n as f64).log2())).clamp(0.0, 1.0) };
        prop_assert!((metrics::gap_sum_ratio(&g) - gap).abs() <= 1e-12);
    }
}

#[test]
fn random_order_has_almost_no_colocation() {
    let g = graphlayout_core::generate::ba_like(10_000, 4, 1).unwrap();
    let h = graphlayout_core::ordering::order_random(&g, 1).apply(&g).unwrap();
    assert!(metrics::colocation_ratio(&h) < 0.01);
}

#[test]
fn hops_one_counts_interior_plus_incident_cut() {
    let g = graphlayout_core::generate::cycle(6);
    let part = Partition::new(&g, 2, vec![0, 0, 1, 1, 1, 0]).unwrap();
    // Parts {0,1,5} and {2,3,4}: 2 interior + 2 cut edges each.
    assert_eq!(metrics::replication_ratio(&g, &part, 1).unwrap(), 8.0 / 6.0);
}
