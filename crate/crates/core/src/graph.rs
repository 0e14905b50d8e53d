//! Immutable CSR graphs and the cleaning pipeline applied before layout.
//!
//! Arc-count convention: `m()` is the number of stored arcs. An undirected
//! edge `{u, v}` with `u != v` is stored as the two arcs `(u, v)` and
//! `(v, u)`; an undirected self-loop is stored once. Rows are kept sorted by
//! `(target, weight)`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, invalid, Result};

/// Sentinel for "not reached" in level arrays.
pub const UNREACHED: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Option<Vec<f64>>,
    directed: bool,
}

/// Degree summary of a graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    /// Arcs per vertex, i.e. `m / n`. For an undirected graph this equals
    /// `2 * edges / n`, the usual average degree.
    pub d_avg: f64,
    pub d_max: usize,
    /// Double-sweep BFS lower bound on the diameter of the symmetrized graph.
    pub approx_diameter: Option<usize>,
}

impl Graph {
    /// Builds a graph from raw CSR arrays, checking every invariant.
    pub fn from_csr(
        offsets: Vec<usize>,
        targets: Vec<usize>,
        weights: Option<Vec<f64>>,
        directed: bool,
    ) -> Result<Self> {
        if offsets.is_empty() {
            return Err(invalid!("offsets must have length n+1"));
        }
        let n = offsets.len() - 1;
        if offsets[0] != 0 {
            return Err(invalid!("offsets[0] = {} (expected 0)", offsets[0]));
        }
        if offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid!("offsets are not nondecreasing"));
        }
        if offsets[n] != targets.len() {
            return Err(invalid!(
                "offsets[n] = {} but {} targets",
                offsets[n],
                targets.len()
            ));
        }
        if let Some(&bad) = targets.iter().find(|&&t| t >= n) {
            return Err(invalid!("target {bad} out of range for n = {n}"));
        }
        if let Some(w) = &weights {
            if w.len() != targets.len() {
                return Err(invalid!("{} weights for {} arcs", w.len(), targets.len()));
            }
            if let Some(bad) = w.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
                return Err(domain!("weight {bad} is negative or not finite"));
            }
        }
        let mut g = Graph {
            offsets,
            targets,
            weights,
            directed,
        };
        g.sort_rows();
        if !directed && !g.is_symmetric() {
            return Err(invalid!("undirected graph has an arc without its reverse"));
        }
        Ok(g)
    }

    /// Builds a graph from `(u, v)` pairs. For undirected graphs each pair is
    /// stored in both directions. Duplicates are preserved.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], directed: bool) -> Result<Self> {
        Self::build(n, edges.iter().map(|&(u, v)| (u, v, 1.0)), false, directed)
    }

    /// Like [`Graph::from_edges`] with a weight per pair.
    pub fn from_weighted_edges(
        n: usize,
        edges: &[(usize, usize, f64)],
        directed: bool,
    ) -> Result<Self> {
        Self::build(n, edges.iter().copied(), true, directed)
    }

    fn build(
        n: usize,
        edges: impl Iterator<Item = (usize, usize, f64)> + Clone,
        weighted: bool,
        directed: bool,
    ) -> Result<Self> {
        let mut degree = vec![0usize; n];
        for (u, v, w) in edges.clone() {
            if u >= n || v >= n {
                return Err(domain!("edge ({u}, {v}) out of range for n = {n}"));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(domain!("edge ({u}, {v}) has invalid weight {w}"));
            }
            degree[u] += 1;
            if !directed && u != v {
                degree[v] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let m = offsets[n];
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0usize; m];
        let mut weights = if weighted { vec![0.0; m] } else { Vec::new() };
        let mut put = |u: usize, v: usize, w: f64| {
            targets[fill[u]] = v;
            if weighted {
                weights[fill[u]] = w;
            }
            fill[u] += 1;
        };
        for (u, v, w) in edges {
            put(u, v, w);
            if !directed && u != v {
                put(v, u, w);
            }
        }
        let mut g = Graph {
            offsets,
            targets,
            weights: weighted.then_some(weights),
            directed,
        };
        g.sort_rows();
        Ok(g)
    }

    fn sort_rows(&mut self) {
        let n = self.n();
        match &mut self.weights {
            None => {
                for v in 0..n {
                    self.targets[self.offsets[v]..self.offsets[v + 1]].sort_unstable();
                }
            }
            Some(w) => {
                let mut row: Vec<(usize, f64)> = Vec::new();
                for v in 0..n {
                    let (a, b) = (self.offsets[v], self.offsets[v + 1]);
                    row.clear();
                    row.extend(self.targets[a..b].iter().copied().zip(w[a..b].iter().copied()));
                    row.sort_unstable_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
                    for (i, (t, x)) in row.iter().enumerate() {
                        self.targets[a + i] = *t;
                        w[a + i] = *x;
                    }
                }
            }
        }
    }

    fn is_symmetric(&self) -> bool {
        let mut fwd: Vec<(usize, usize, u64)> = Vec::with_capacity(self.m());
        let mut rev: Vec<(usize, usize, u64)> = Vec::with_capacity(self.m());
        for u in 0..self.n() {
            for (i, &v) in self.neighbors(u).iter().enumerate() {
                let w = self.arc_weight_at(u, i).to_bits();
                fwd.push((u, v, w));
                rev.push((v, u, w));
            }
        }
        fwd.sort_unstable();
        rev.sort_unstable();
        fwd == rev
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of stored arcs.
    #[inline]
    pub fn m(&self) -> usize {
        self.targets.len()
    }

    /// Number of undirected edges: arcs `(u, v)` with `u < v` plus self-loops.
    /// Meaningful for undirected graphs; for directed graphs this is `m()`.
    pub fn undirected_edge_count(&self) -> usize {
        if self.directed {
            return self.m();
        }
        (0..self.n())
            .map(|u| self.neighbors(u).iter().filter(|&&v| u <= v).count())
            .sum()
    }

    #[inline]
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    #[inline]
    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Weights of `v`'s arcs, aligned with [`Graph::neighbors`].
    pub fn arc_weights(&self, v: usize) -> Option<&[f64]> {
        self.weights
            .as_ref()
            .map(|w| &w[self.offsets[v]..self.offsets[v + 1]])
    }

    /// Weight of the `i`-th arc of `v`; 1 for unweighted graphs.
    #[inline]
    pub fn arc_weight_at(&self, v: usize, i: usize) -> f64 {
        match &self.weights {
            Some(w) => w[self.offsets[v] + i],
            None => 1.0,
        }
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Iterates `(u, v, w)` over all arcs in row order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .enumerate()
                .map(move |(i, &v)| (u, v, self.arc_weight_at(u, i)))
        })
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let n = self.n();
        let d_max = (0..n).map(|v| self.degree(v)).max().unwrap_or(0);
        let d_avg = if n == 0 { 0.0 } else { self.m() as f64 / n as f64 };
        let approx_diameter = if n == 0 {
            None
        } else if self.directed {
            Some(double_sweep_diameter(&symmetrize(self)))
        } else {
            Some(double_sweep_diameter(self))
        };
        DegreeStats {
            d_avg,
            d_max,
            approx_diameter,
        }
    }

    /// Relabels vertices: old vertex `v` becomes `perm[v]`. Rows are re-sorted
    /// and weights travel with their arcs.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.n();
        check_bijection(perm, n)?;
        let mut inverse = vec![0usize; n];
        for (old, &new) in perm.iter().enumerate() {
            inverse[new] = old;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(self.m());
        let mut weights = self.weights.as_ref().map(|_| Vec::with_capacity(self.m()));
        for &old in &inverse {
            targets.extend(self.neighbors(old).iter().map(|&t| perm[t]));
            if let (Some(out), Some(w)) = (weights.as_mut(), self.arc_weights(old)) {
                out.extend_from_slice(w);
            }
            offsets.push(targets.len());
        }
        let mut g = Graph {
            offsets,
            targets,
            weights,
            directed: self.directed,
        };
        g.sort_rows();
        Ok(g)
    }

    /// Subgraph induced by `vertices` (given in ascending order); local id `i`
    /// corresponds to `vertices[i]`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut local = vec![UNREACHED; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut offsets = Vec::with_capacity(vertices.len() + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        let mut weights = self.weights.as_ref().map(|_| Vec::new());
        for &v in vertices {
            for (i, &t) in self.neighbors(v).iter().enumerate() {
                if local[t] != UNREACHED {
                    targets.push(local[t]);
                    if let Some(w) = weights.as_mut() {
                        w.push(self.arc_weight_at(v, i));
                    }
                }
            }
            offsets.push(targets.len());
        }
        let mut g = Graph {
            offsets,
            targets,
            weights,
            directed: self.directed,
        };
        g.sort_rows();
        g
    }
}

pub(crate) fn check_bijection(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(domain!("permutation has length {} for n = {n}", perm.len()));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(domain!("permutation is not a bijection on [0, {n})"));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Union of arcs and their reverses, as an undirected graph without
/// duplicate arcs. When both directions carry weights the smaller wins.
pub fn symmetrize(g: &Graph) -> Graph {
    let mut pairs: Vec<(usize, usize, f64)> = g
        .arcs()
        .map(|(u, v, w)| if u <= v { (u, v, w) } else { (v, u, w) })
        .collect();
    pairs.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
    pairs.dedup_by(|later, first| later.0 == first.0 && later.1 == first.1);
    Graph::build(g.n(), pairs.into_iter(), g.is_weighted(), false)
        .expect("arcs of a valid graph are in range")
}

/// Removes self-loops and multi-arcs (keeping the lightest copy), then keeps
/// only the largest weakly connected component. Ties between equally large
/// components go to the one holding the smallest vertex id. Surviving
/// vertices keep their relative order.
///
/// Returns the cleaned graph and `old -> Some(new)` / `None` for dropped
/// vertices.
pub fn preprocess(g: &Graph) -> Result<(Graph, Vec<Option<usize>>)> {
    let n = g.n();
    let mut arcs: Vec<(usize, usize, f64)> = g.arcs().filter(|(u, v, _)| u != v).collect();
    arcs.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
    arcs.dedup_by(|later, first| later.0 == first.0 && later.1 == first.1);

    let mut dsu = DisjointSets::new(n);
    for &(u, v, _) in &arcs {
        dsu.union(u, v);
    }
    // Component size and smallest member, per root.
    let mut size = vec![0usize; n];
    let mut min_id = vec![usize::MAX; n];
    for v in 0..n {
        let r = dsu.find(v);
        size[r] += 1;
        min_id[r] = min_id[r].min(v);
    }
    let best = (0..n)
        .filter(|&r| size[r] > 0)
        .max_by(|&a, &b| size[a].cmp(&size[b]).then(min_id[b].cmp(&min_id[a])));
    let best = match best {
        Some(r) if size[r] >= 2 => r,
        _ => return Err(domain!("preprocessing removed every vertex")),
    };

    let mut id_map = vec![None; n];
    let mut next = 0;
    for (v, slot) in id_map.iter_mut().enumerate() {
        if dsu.find(v) == best {
            *slot = Some(next);
            next += 1;
        }
    }
    let kept: Vec<(usize, usize, f64)> = arcs
        .into_iter()
        .filter_map(|(u, v, w)| Some((id_map[u]?, id_map[v]?, w)))
        .collect();
    // `kept` already holds both directions for undirected inputs.
    let out = Graph::build(next, kept.into_iter(), g.is_weighted(), true)?;
    Ok((
        Graph {
            directed: g.directed,
            ..out
        },
        id_map,
    ))
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            core::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// BFS levels from `root` following out-arcs; [`UNREACHED`] where unreachable.
pub fn bfs_levels(g: &Graph, root: usize) -> Vec<usize> {
    let mut level = vec![UNREACHED; g.n()];
    let mut queue = VecDeque::new();
    level[root] = 0;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if level[v] == UNREACHED {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    level
}

/// Connected components of an undirected graph: `(component id per vertex,
/// component count)`, ids assigned in order of smallest member.
pub fn connected_components(g: &Graph) -> (Vec<usize>, usize) {
    let mut comp = vec![UNREACHED; g.n()];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..g.n() {
        if comp[s] != UNREACHED {
            continue;
        }
        comp[s] = count;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &v in g.neighbors(u) {
                if comp[v] == UNREACHED {
                    comp[v] = count;
                    stack.push(v);
                }
            }
        }
        count += 1;
    }
    (comp, count)
}

/// Two BFS sweeps: from vertex 0 to the farthest vertex `a`, then from `a`;
/// returns the eccentricity of `a` within its component.
pub fn double_sweep_diameter(g: &Graph) -> usize {
    if g.n() == 0 {
        return 0;
    }
    let far = |levels: &[usize]| {
        levels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != UNREACHED)
            .max_by_key(|(i, &l)| (l, core::cmp::Reverse(*i)))
            .map(|(i, &l)| (i, l))
            .unwrap()
    };
    let (a, _) = far(&bfs_levels(g, 0));
    far(&bfs_levels(g, a)).1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &e, false).unwrap()
    }

    #[test]
    fn csr_validation() {
        assert!(Graph::from_csr(vec![0, 1], vec![0], None, true).is_ok());
        assert!(Graph::from_csr(vec![0, 2, 1], vec![1, 0], None, true).is_err());
        assert!(Graph::from_csr(vec![0, 1, 1], vec![5], None, true).is_err());
        // undirected without reverse arc
        assert!(Graph::from_csr(vec![0, 1, 1], vec![1], None, false).is_err());
        assert!(Graph::from_csr(vec![0, 1, 2], vec![1, 0], Some(vec![1.0, 2.0]), false).is_err());
        assert!(Graph::from_csr(vec![0, 1, 1], vec![1], Some(vec![-1.0]), true).is_err());
    }

    #[test]
    fn undirected_storage() {
        let g = path(3);
        assert_eq!((g.n(), g.m()), (3, 4));
        assert_eq!(g.undirected_edge_count(), 2);
        let loops = Graph::from_edges(2, &[(0, 0), (0, 1)], false).unwrap();
        assert_eq!(loops.m(), 3);
        assert_eq!(loops.undirected_edge_count(), 2);
    }

    #[test]
    fn preprocess_picks_component_with_smallest_id_on_tie() {
        // triangles {1,2,3} and {4,5,6}; vertex 0 isolated
        let e = [(1, 2), (2, 3), (3, 1), (4, 5), (5, 6), (6, 4)];
        let g = Graph::from_edges(7, &e, false).unwrap();
        let (h, map) = preprocess(&g).unwrap();
        assert_eq!((h.n(), h.m()), (3, 6));
        assert_eq!(map[0], None);
        assert_eq!(&map[1..4], &[Some(0), Some(1), Some(2)]);
        assert!(map[4..].iter().all(Option::is_none));
    }

    #[test]
    fn preprocess_collapses_multi_edges_and_loops() {
        let g = Graph::from_edges(2, &[(0, 1), (0, 1), (1, 0), (1, 1)], false).unwrap();
        let (h, _) = preprocess(&g).unwrap();
        assert_eq!((h.n(), h.m()), (2, 2));
    }

    #[test]
    fn preprocess_keeps_lightest_duplicate() {
        let g = Graph::from_weighted_edges(2, &[(0, 1, 4.0), (0, 1, 2.0)], false).unwrap();
        let (h, _) = preprocess(&g).unwrap();
        assert_eq!(h.weights().unwrap(), &[2.0, 2.0]);
    }

    #[test]
    fn preprocess_of_clean_cycle_is_identity() {
        let e: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        let g = Graph::from_edges(6, &e, false).unwrap();
        let (h, map) = preprocess(&g).unwrap();
        assert_eq!(h, g);
        assert!(map.iter().enumerate().all(|(i, m)| *m == Some(i)));
    }

    #[test]
    fn preprocess_rejects_edgeless_graph() {
        let g = Graph::from_edges(3, &[(1, 1)], false).unwrap();
        assert!(matches!(preprocess(&g), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn preprocess_weak_connectivity_for_directed() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 1), (3, 3)], true).unwrap();
        let (h, map) = preprocess(&g).unwrap();
        assert!(h.is_directed());
        assert_eq!((h.n(), h.m()), (3, 2));
        assert_eq!(map[3], None);
    }

    #[test]
    fn symmetrize_rules() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)], true).unwrap();
        let s = symmetrize(&g);
        assert!(!s.is_directed());
        assert_eq!(s.m(), 4);
        assert_eq!(symmetrize(&s), s);

        let w = Graph::from_weighted_edges(2, &[(0, 1, 3.0)], true).unwrap();
        assert_eq!(symmetrize(&w).weights().unwrap(), &[3.0, 3.0]);
        let both = Graph::from_weighted_edges(2, &[(0, 1, 3.0), (1, 0, 2.0)], true).unwrap();
        assert_eq!(symmetrize(&both).weights().unwrap(), &[2.0, 2.0]);
    }

    #[test]
    fn permute_reversal_on_path() {
        let g = path(3);
        let r = g.permute(&[2, 1, 0]).unwrap();
        assert_eq!(r, g);
        assert!(g.permute(&[0, 0, 1]).is_err());
        assert!(g.permute(&[0, 1]).is_err());
        let id = g.permute(&[0, 1, 2]).unwrap();
        assert_eq!(id, g);
    }

    #[test]
    fn permute_carries_weights() {
        let g = Graph::from_weighted_edges(3, &[(0, 1, 5.0), (1, 2, 7.0)], false).unwrap();
        let h = g.permute(&[1, 2, 0]).unwrap();
        // old edge (0,1,5) -> (1,2,5); old (1,2,7) -> (2,0,7)
        assert_eq!(h.neighbors(2), &[0, 1]);
        assert_eq!(h.arc_weights(2).unwrap(), &[7.0, 5.0]);
    }

    #[test]
    fn degree_stats_of_star() {
        let e: Vec<_> = (1..5).map(|i| (0, i)).collect();
        let g = Graph::from_edges(5, &e, false).unwrap();
        let s = g.degree_stats();
        assert_eq!(s.d_max, 4);
        assert!((s.d_avg - 8.0 / 5.0).abs() < 1e-12);
        assert_eq!(s.approx_diameter, Some(2));
    }

    #[test]
    fn components_and_levels() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (3, 4)], false).unwrap();
        let (comp, count) = connected_components(&g);
        assert_eq!(count, 2);
        assert_eq!(comp, vec![0, 0, 0, 1, 1]);
        assert_eq!(bfs_levels(&g, 0), vec![0, 1, 2, UNREACHED, UNREACHED]);
    }
}
