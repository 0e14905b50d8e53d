//! Vertex relabeling: random shuffle, reverse Cuthill–McKee, and the
//! sort-free BFS-level ordering (`Dgl`), applied globally or within each part.
//!
//! The BFS-level ordering runs one BFS from a minimum-degree root, keeps each
//! level in queue-arrival order, and hands out new ids starting from the
//! deepest level and walking back to the root. RCM differs in sorting every
//! vertex's newly discovered neighbors by ascending degree and reversing the
//! final sequence.
//!
//! Disconnected inputs are ordered one component at a time, largest first
//! (ties: smallest member id), each component occupying a contiguous id range.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{domain, invalid, Result};
use crate::graph::{self, Graph};
use crate::partition::Partition;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Global,
    /// Ordered within each of `p` parts; part `k` occupies a contiguous range.
    PerPart(usize),
}

/// A bijection `old id -> new id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ordering {
    perm: Vec<usize>,
    scope: Scope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Random,
    Rcm,
    Dgl,
}

impl Ordering {
    pub fn new(perm: Vec<usize>, scope: Scope) -> Result<Self> {
        let n = perm.len();
        graph::check_bijection(&perm, n)?;
        Ok(Ordering { perm, scope })
    }

    pub fn identity(n: usize) -> Self {
        Ordering {
            perm: (0..n).collect(),
            scope: Scope::Global,
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn into_perm(self) -> Vec<usize> {
        self.perm
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// `new id -> old id`.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.perm.len()];
        for (old, &new) in self.perm.iter().enumerate() {
            inv[new] = old;
        }
        inv
    }

    /// The relabeled graph.
    pub fn apply(&self, g: &Graph) -> Result<Graph> {
        g.permute(&self.perm)
    }

    /// Checks that every part occupies its contiguous id range, parts laid
    /// out in part-id order.
    pub fn check_part_ranges(&self, part: &Partition) -> Result<()> {
        if part.n() != self.perm.len() {
            return Err(invalid!("ordering and partition sizes differ"));
        }
        let mut start = vec![0usize; part.p() + 1];
        for k in 0..part.p() {
            start[k + 1] = start[k] + part.part_vertices()[k];
        }
        for (v, &new) in self.perm.iter().enumerate() {
            let k = part.part_of(v);
            if !(start[k]..start[k + 1]).contains(&new) {
                return Err(invalid!("vertex {v} of part {k} got id {new} outside its range"));
            }
        }
        Ok(())
    }
}

pub fn order_random(g: &Graph, seed: u64) -> Ordering {
    let mut rng = rng::rng(rng::substream(seed, "order-random"));
    let mut sequence: Vec<usize> = (0..g.n()).collect();
    sequence.shuffle(&mut rng);
    from_sequence(&sequence, Scope::Global)
}

/// BFS-level ordering from a random minimum-degree root per component.
pub fn order_dgl(g: &Graph, seed: u64) -> Ordering {
    by_components(g, seed, None, dgl_component)
}

/// BFS-level ordering with the root of its component pinned; that component
/// comes first, the others follow as in [`order_dgl`].
pub fn order_dgl_from_root(g: &Graph, root: usize, seed: u64) -> Result<Ordering> {
    if root >= g.n() {
        return Err(domain!("root {root} out of range for n = {}", g.n()));
    }
    Ok(by_components(g, seed, Some(root), dgl_component))
}

/// Reverse Cuthill–McKee from a random minimum-degree root per component.
pub fn order_rcm(g: &Graph, seed: u64) -> Ordering {
    by_components(g, seed, None, rcm_component)
}

pub fn order_global(g: &Graph, strategy: Strategy, seed: u64) -> Ordering {
    match strategy {
        Strategy::Random => order_random(g, seed),
        Strategy::Rcm => order_rcm(g, seed),
        Strategy::Dgl => order_dgl(g, seed),
    }
}

/// Applies `strategy` independently to each part-induced subgraph. Part `k`
/// is ordered with seed `seed + k`, so a single part reproduces the global
/// ordering exactly.
pub fn order_per_part(g: &Graph, part: &Partition, strategy: Strategy, seed: u64) -> Ordering {
    let mut perm = vec![0usize; g.n()];
    let mut start = 0;
    for (k, members) in part.members().into_iter().enumerate() {
        let sub = g.induced_subgraph(&members);
        let local = order_global(&sub, strategy, seed.wrapping_add(k as u64));
        for (i, &new) in local.perm().iter().enumerate() {
            perm[members[i]] = start + new;
        }
        start += members.len();
    }
    Ordering {
        perm,
        scope: Scope::PerPart(part.p()),
    }
}

/// `sequence[i]` receives new id `i`.
fn from_sequence(sequence: &[usize], scope: Scope) -> Ordering {
    let mut perm = vec![0; sequence.len()];
    for (i, &v) in sequence.iter().enumerate() {
        perm[v] = i;
    }
    Ordering { perm, scope }
}

/// Orders each connected component with `visit(g, root, visited, out)`,
/// which must append the component's vertices to `out` in new-id order.
fn by_components(
    g: &Graph,
    seed: u64,
    pinned_root: Option<usize>,
    visit: fn(&Graph, usize, &mut [bool], &mut Vec<usize>),
) -> Ordering {
    let n = g.n();
    // Minimum-degree root per component; ties go to the smallest hash key,
    // a uniform choice for a random seed.
    let salt = rng::substream(seed, "order-root");
    let key = |v: usize| (g.degree(v), rng::mix64(salt ^ v as u64));

    // Connected graphs need no component pass: the global minimum is the
    // root of the only component.
    let first = pinned_root.or_else(|| (0..n).min_by_key(|&v| key(v)));
    let mut visited = vec![false; n];
    let mut sequence = Vec::with_capacity(n);
    if let Some(r) = first {
        visit(g, r, &mut visited, &mut sequence);
        if sequence.len() == n {
            return from_sequence(&sequence, Scope::Global);
        }
        visited.iter_mut().for_each(|x| *x = false);
        sequence.clear();
    }

    let (comp, count) = graph::connected_components(g);
    let mut size = vec![0usize; count];
    let mut root = vec![usize::MAX; count];
    for v in 0..n {
        let c = comp[v];
        size[c] += 1;
        if root[c] == usize::MAX || key(v) < key(root[c]) {
            root[c] = v;
        }
    }
    if let Some(r) = pinned_root {
        root[comp[r]] = r;
    }

    // Component ids follow smallest member, so a stable sort keeps ties in
    // that order.
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| size[b].cmp(&size[a]));
    if let Some(r) = pinned_root {
        let first = comp[r];
        order.retain(|&c| c != first);
        order.insert(0, first);
    }

    for c in order {
        visit(g, root[c], &mut visited, &mut sequence);
    }
    from_sequence(&sequence, Scope::Global)
}

fn dgl_component(g: &Graph, root: usize, visited: &mut [bool], out: &mut Vec<usize>) {
    // `out[begin..]` is the BFS queue, i.e. the levels L_0, L_1, ... in
    // arrival order.
    let begin = out.len();
    visited[root] = true;
    out.push(root);
    let mut bounds = vec![begin];
    let mut head = begin;
    while head < out.len() {
        let level_end = out.len();
        while head < level_end {
            let v = out[head];
            head += 1;
            for &u in g.neighbors(v) {
                if !visited[u] {
                    visited[u] = true;
                    out.push(u);
                }
            }
        }
        bounds.push(level_end);
    }
    // Deepest level first, queue order kept inside each level: reverse the
    // whole range, then each level back.
    let end = out.len();
    out[begin..].reverse();
    for w in bounds.windows(2) {
        out[begin + end - w[1]..begin + end - w[0]].reverse();
    }
}

fn rcm_component(g: &Graph, root: usize, visited: &mut [bool], out: &mut Vec<usize>) {
    let begin = out.len();
    visited[root] = true;
    out.push(root);
    let mut head = begin;
    let mut fresh: Vec<usize> = Vec::new();
    while head < out.len() {
        let v = out[head];
        head += 1;
        fresh.clear();
        for &u in g.neighbors(v) {
            if !visited[u] {
                visited[u] = true;
                fresh.push(u);
            }
        }
        fresh.sort_unstable_by_key(|&u| (g.degree(u), u));
        out.extend_from_slice(&fresh);
    }
    out[begin..].reverse();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::graph::bfs_levels;

    #[test]
    fn dgl_path_hand_trace() {
        let g = generate::path(5);
        let o = order_dgl_from_root(&g, 0, 0).unwrap();
        assert_eq!(o.perm(), &[4, 3, 2, 1, 0]);
    }

    #[test]
    fn dgl_star_from_leaf() {
        let g = generate::star(4);
        for seed in 0..10 {
            let o = order_dgl(&g, seed);
            let root = o.inverse()[4];
            assert_ne!(root, 0, "root must be a leaf");
            assert_eq!(o.perm()[0], 3, "center sits in level 1");
        }
    }

    #[test]
    fn single_vertex_is_identity() {
        let g = generate::path(1);
        for s in [Strategy::Random, Strategy::Rcm, Strategy::Dgl] {
            assert_eq!(order_global(&g, s, 3).perm(), &[0]);
        }
    }

    #[test]
    fn rcm_path_has_bandwidth_one() {
        let g = generate::path(7);
        let h = order_rcm(&g, 5).apply(&g).unwrap();
        for v in 0..7 {
            assert!(h.neighbors(v).iter().all(|&u| u.abs_diff(v) == 1));
        }
    }

    #[test]
    fn rcm_star_leaves_contiguous() {
        let g = generate::star(4);
        let o = order_rcm(&g, 1);
        let root = o.inverse()[4];
        assert_ne!(root, 0);
        assert_eq!(o.perm()[0], 3);
        let mut others: Vec<usize> = (1..5).filter(|&v| v != root).map(|v| o.perm()[v]).collect();
        others.sort();
        assert_eq!(others, vec![0, 1, 2]);
    }

    #[test]
    fn dgl_labels_decrease_with_depth() {
        let g = generate::ba_like(500, 2, 4).unwrap();
        let o = order_dgl(&g, 8);
        let root = o.inverse()[g.n() - 1];
        let lv = bfs_levels(&g, root);
        for u in 0..g.n() {
            for v in 0..g.n() {
                if lv[u] > lv[v] {
                    assert!(o.perm()[u] < o.perm()[v]);
                }
            }
        }
    }

    #[test]
    fn disconnected_components_largest_first() {
        // triangle {0,1,2}, path {3..=6}
        let g = Graph::from_edges(7, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 6)], false)
            .unwrap();
        let o = order_dgl(&g, 2);
        assert!((3..7).all(|v| o.perm()[v] < 4));
        assert!((0..3).all(|v| o.perm()[v] >= 4));
    }

    #[test]
    fn random_is_reproducible() {
        let g = generate::path(50);
        assert_eq!(order_random(&g, 9), order_random(&g, 9));
        assert_ne!(order_random(&g, 9), order_random(&g, 10));
    }

    #[test]
    fn per_part_single_part_matches_global() {
        let g = generate::ba_like(300, 2, 1).unwrap();
        let one = Partition::new(&g, 1, vec![0; g.n()]).unwrap();
        for s in [Strategy::Random, Strategy::Rcm, Strategy::Dgl] {
            assert_eq!(
                order_per_part(&g, &one, s, 21).perm(),
                order_global(&g, s, 21).perm()
            );
        }
    }

    #[test]
    fn per_part_ranges_are_contiguous() {
        let g = Graph::from_edges(6, &[(0, 2), (2, 4), (4, 0), (1, 3), (3, 5), (5, 1)], false)
            .unwrap();
        let part = Partition::new(&g, 2, vec![0, 1, 0, 1, 0, 1]).unwrap();
        for s in [Strategy::Random, Strategy::Rcm, Strategy::Dgl] {
            let o = order_per_part(&g, &part, s, 4);
            o.check_part_ranges(&part).unwrap();
            assert_eq!(o.scope(), Scope::PerPart(2));
        }
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Ordering::new(vec![1, 1], Scope::Global).is_err());
        assert!(order_dgl_from_root(&generate::path(3), 7, 0).is_err());
    }
}
