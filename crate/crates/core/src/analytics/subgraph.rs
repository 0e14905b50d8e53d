//! Color-coding estimates of tree-template embedding counts.

use alloc::vec;
use alloc::vec::Vec;

use super::{Analytic, BenchTrace, DistributedGraph, Exchange, LocalGraph, PhaseTrace, Row, Target};
use crate::error::{domain, Result};
use crate::graph::DisjointSets;
use crate::rng;

pub const MAX_TEMPLATE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Leaf,
    /// Root of `active` is the sub-template root; `passive` hangs off it by
    /// one template edge.
    Split { active: usize, passive: usize },
}

/// A tree template with its rooted decomposition and automorphism count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateTree {
    k: usize,
    edges: Vec<(usize, usize)>,
    /// Post-order: children before parents, root last.
    nodes: Vec<(usize, Node)>,
    automorphisms: u64,
}

impl TemplateTree {
    pub fn from_edges(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if k == 0 || k > MAX_TEMPLATE {
            return Err(domain!("template size must be in 1..={MAX_TEMPLATE}, got {k}"));
        }
        if edges.len() != k - 1 {
            return Err(domain!("a tree on {k} vertices has {} edges, got {}", k - 1, edges.len()));
        }
        let mut sets = DisjointSets::new(k);
        let mut adj = vec![Vec::new(); k];
        for &(u, v) in edges {
            if u >= k || v >= k {
                return Err(domain!("template edge ({u}, {v}) out of range"));
            }
            if !sets.union(u, v) {
                return Err(domain!("template has a cycle through ({u}, {v})"));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut children = vec![Vec::new(); k];
        let mut stack = vec![(0usize, usize::MAX)];
        while let Some((v, parent)) = stack.pop() {
            for &u in &adj[v] {
                if u != parent {
                    children[v].push(u);
                    stack.push((u, v));
                }
            }
        }
        let mut nodes = Vec::with_capacity(2 * k - 1);
        decompose(&children, 0, children[0].len(), &mut nodes);
        Ok(TemplateTree {
            k,
            edges: edges.to_vec(),
            nodes,
            automorphisms: automorphisms(&adj),
        })
    }

    pub fn path(k: usize) -> Result<Self> {
        let e: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
        Self::from_edges(k, &e)
    }

    pub fn star(k: usize) -> Result<Self> {
        let e: Vec<_> = (1..k).map(|i| (0, i)).collect();
        Self::from_edges(k, &e)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn automorphisms(&self) -> u64 {
        self.automorphisms
    }

    /// Number of splits, i.e. exchanges per coloring.
    pub fn splits(&self) -> usize {
        self.nodes.len() / 2
    }
}

fn decompose(children: &[Vec<usize>], v: usize, kids: usize, out: &mut Vec<(usize, Node)>) -> usize {
    if kids == 0 {
        out.push((1, Node::Leaf));
        return out.len() - 1;
    }
    let c = children[v][kids - 1];
    let active = decompose(children, v, kids - 1, out);
    let passive = decompose(children, c, children[c].len(), out);
    out.push((out[active].0 + out[passive].0, Node::Split { active, passive }));
    out.len() - 1
}

/// Automorphism count of a tree from canonical encodings around its center.
fn automorphisms(adj: &[Vec<usize>]) -> u64 {
    let k = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..k).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = k;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &u in &adj[v] {
                degree[u] -= 1;
                if degree[u] == 1 {
                    next.push(u);
                }
            }
        }
        layer = next;
    }
    match layer[..] {
        [c] => canonical(adj, c, usize::MAX).1,
        [a, b] => {
            let (ca, na) = canonical(adj, a, b);
            let (cb, nb) = canonical(adj, b, a);
            na * nb * if ca == cb { 2 } else { 1 }
        }
        _ => 1,
    }
}

fn canonical(adj: &[Vec<usize>], v: usize, parent: usize) -> (Vec<u8>, u64) {
    let mut kids: Vec<(Vec<u8>, u64)> = adj[v]
        .iter()
        .filter(|&&u| u != parent)
        .map(|&u| canonical(adj, u, v))
        .collect();
    kids.sort();
    let mut code = vec![b'('];
    let mut count = 1u64;
    let mut run = 0u64;
    for i in 0..kids.len() {
        code.extend_from_slice(&kids[i].0);
        count *= kids[i].1;
        run = if i > 0 && kids[i].0 == kids[i - 1].0 { run + 1 } else { 1 };
        count *= run;
    }
    code.push(b')');
    (code, count)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountResult {
    /// Mean of the per-iteration estimates.
    pub estimate: f64,
    pub per_iteration: Vec<f64>,
    /// Colorful injective maps found in each iteration.
    pub colorful: Vec<u128>,
}

/// Colors are drawn from the vertex's global id.
pub fn count_subgraphs(
    dg: &DistributedGraph,
    template: &TemplateTree,
    iterations: usize,
    seed: u64,
) -> Result<(CountResult, BenchTrace)> {
    let keys: Vec<u64> = (0..dg.n() as u64).collect();
    count_subgraphs_keyed(dg, template, iterations, seed, &keys)
}

/// Like [`count_subgraphs`] but vertex `v` draws its colors from `keys[v]`,
/// so relabeled copies of one graph see identical colorings when the keys
/// follow the relabeling.
pub fn count_subgraphs_keyed(
    dg: &DistributedGraph,
    template: &TemplateTree,
    iterations: usize,
    seed: u64,
    keys: &[u64],
) -> Result<(CountResult, BenchTrace)> {
    if iterations == 0 {
        return Err(domain!("color-coding needs at least one iteration"));
    }
    if dg.is_directed() {
        return Err(domain!("subgraph counting needs an undirected graph"));
    }
    if keys.len() != dg.n() {
        return Err(domain!("{} color keys for n = {}", keys.len(), dg.n()));
    }
    let p = dg.p();
    let k = template.k;
    let mut trace = BenchTrace::new(Analytic::Count, p);
    if k > dg.n() {
        let zeros = vec![0.0; iterations];
        let result = CountResult {
            estimate: 0.0,
            per_iteration: zeros,
            colorful: vec![0; iterations],
        };
        return Ok((result, trace));
    }
    let sets = ColorSets::new(k);
    let stream = rng::substream(seed, "count");
    // k^k / k! / |Aut(T)|
    let scale = (1..=k).map(|i| k as f64 / i as f64).product::<f64>() / template.automorphisms as f64;
    let mut colorful = Vec::with_capacity(iterations);
    for it in 0..iterations {
        let round = rng::child(stream, it as u64);
        let colors: Vec<Vec<usize>> = dg
            .tasks()
            .iter()
            .map(|t| {
                t.owned
                    .iter()
                    .map(|&v| (rng::mix64(round ^ rng::mix64(keys[v])) % k as u64) as usize)
                    .collect()
            })
            .collect();
        colorful.push(run_coloring(dg, template, &sets, &colors, &mut trace)?);
    }
    let per_iteration: Vec<f64> = colorful.iter().map(|&c| c as f64 * scale).collect();
    let estimate = per_iteration.iter().sum::<f64>() / iterations as f64;
    Ok((
        CountResult {
            estimate,
            per_iteration,
            colorful,
        },
        trace,
    ))
}

/// Color sets of each size as bit masks, with column indices.
struct ColorSets {
    k: usize,
    by_size: Vec<Vec<u32>>,
    column: Vec<usize>,
    /// `splits[a][b]`: for every set of size `a + b`, the `(column of the
    /// size-a part, column of the size-b part)` pairs.
    splits: Vec<Vec<Vec<Vec<(usize, usize)>>>>,
}

impl ColorSets {
    fn new(k: usize) -> Self {
        let mut by_size = vec![Vec::new(); k + 1];
        let mut column = vec![0; 1 << k];
        for mask in 0u32..(1 << k) {
            let s = mask.count_ones() as usize;
            column[mask as usize] = by_size[s].len();
            by_size[s].push(mask);
        }
        let mut splits = vec![vec![Vec::new(); k + 1]; k + 1];
        for a in 1..k {
            for b in 1..=k - a {
                splits[a][b] = by_size[a + b]
                    .iter()
                    .map(|&set| {
                        let mut pairs = Vec::new();
                        let mut sub = set;
                        while sub != 0 {
                            if sub.count_ones() as usize == a {
                                pairs.push((column[sub as usize], column[(set ^ sub) as usize]));
                            }
                            sub = (sub - 1) & set;
                        }
                        pairs.sort_unstable();
                        pairs
                    })
                    .collect();
            }
        }
        ColorSets {
            k,
            by_size,
            column,
            splits,
        }
    }

    fn width(&self, size: usize) -> usize {
        self.by_size[size].len()
    }
}

/// Per-task table: `rows[i * width + c]`.
struct Table {
    width: usize,
    rows: Vec<u128>,
}

impl Table {
    fn row(&self, i: usize) -> &[u128] {
        &self.rows[i * self.width..(i + 1) * self.width]
    }
}

fn run_coloring(
    dg: &DistributedGraph,
    template: &TemplateTree,
    sets: &ColorSets,
    colors: &[Vec<usize>],
    trace: &mut BenchTrace,
) -> Result<u128> {
    let p = dg.p();
    let mut tables: Vec<Option<Vec<Table>>> = (0..template.nodes.len()).map(|_| None).collect();
    for (idx, &(size, node)) in template.nodes.iter().enumerate() {
        let built = match node {
            Node::Leaf => colors
                .iter()
                .map(|cs| {
                    let width = sets.width(1);
                    let mut rows = vec![0u128; cs.len() * width];
                    for (i, &c) in cs.iter().enumerate() {
                        rows[i * width + sets.column[1 << c]] = 1;
                    }
                    Table { width, rows }
                })
                .collect(),
            Node::Split { active, passive } => {
                let a = tables[active].take().expect("active table built");
                let b = tables[passive].take().expect("passive table built");
                let mut phase = PhaseTrace::new(p);
                let ghost_rows = exchange_rows(dg, &b, &mut phase);
                let sa = template.nodes[active].0;
                let sb = template.nodes[passive].0;
                let pairs = &sets.splits[sa][sb];
                let out = dg
                    .tasks()
                    .iter()
                    .enumerate()
                    .map(|(k, t)| {
                        combine(t, &a[k], &b[k], &ghost_rows[k], pairs, &mut phase.compute_ops[k])
                    })
                    .collect::<Result<Vec<Table>>>()?;
                trace.phases.push(phase);
                debug_assert_eq!(out[0].width, sets.width(size));
                out
            }
        };
        tables[idx] = Some(built);
    }
    let root = tables.pop().flatten().expect("root table built");
    let full = sets.column[(1usize << sets.k) - 1];
    let mut total = 0u128;
    for t in &root {
        for i in 0..t.rows.len() / t.width {
            total = total
                .checked_add(t.row(i)[full])
                .ok_or_else(|| domain!("colorful count overflows"))?;
        }
    }
    Ok(total)
}

/// Sends every owned row a peer holds as a ghost; returns per-task ghost
/// rows in ghost order.
fn exchange_rows(dg: &DistributedGraph, table: &[Table], phase: &mut PhaseTrace) -> Vec<Vec<Vec<u128>>> {
    let p = dg.p();
    let mut exchange = Exchange::new(p);
    for (k, t) in dg.tasks().iter().enumerate() {
        for (j, list) in t.mirrors.iter().enumerate() {
            for &(i, ghost) in list {
                exchange.send(
                    k,
                    j,
                    Row {
                        ghost,
                        values: table[k].row(i).to_vec(),
                    },
                );
            }
        }
    }
    let inbox = exchange.deliver(phase);
    inbox
        .into_iter()
        .enumerate()
        .map(|(k, msgs)| {
            let mut rows = vec![Vec::new(); dg.task(k).ghosts.len()];
            for (_, items) in msgs {
                for r in items {
                    rows[r.ghost] = r.values;
                }
            }
            rows
        })
        .collect()
}

fn combine(
    t: &LocalGraph,
    a: &Table,
    b: &Table,
    ghosts: &[Vec<u128>],
    pairs: &[Vec<(usize, usize)>],
    ops: &mut u64,
) -> Result<Table> {
    let overflow = || domain!("colorful count overflows");
    let width = pairs.len();
    let mut rows = vec![0u128; t.n_local() * width];
    let mut sum = vec![0u128; b.width];
    for i in 0..t.n_local() {
        let ra = a.row(i);
        if ra.iter().all(|&x| x == 0) {
            continue;
        }
        sum.iter_mut().for_each(|s| *s = 0);
        for &x in t.row(i) {
            let rb = match t.target(x) {
                Target::Local(j) => b.row(j),
                Target::Ghost(g) => &ghosts[g][..],
            };
            for (s, &v) in sum.iter_mut().zip(rb) {
                *s = s.checked_add(v).ok_or_else(overflow)?;
            }
        }
        *ops += (t.degree(i) * b.width) as u64;
        let out = &mut rows[i * width..(i + 1) * width];
        for (o, list) in out.iter_mut().zip(pairs) {
            let mut acc = 0u128;
            for &(ca, cb) in list {
                if ra[ca] != 0 && sum[cb] != 0 {
                    let term = ra[ca].checked_mul(sum[cb]).ok_or_else(overflow)?;
                    acc = acc.checked_add(term).ok_or_else(overflow)?;
                }
            }
            *o = acc;
            *ops += list.len() as u64;
        }
    }
    Ok(Table { width, rows })
}
