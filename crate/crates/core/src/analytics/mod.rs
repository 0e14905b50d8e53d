//! Simulated 1D-distributed analytics.
//!
//! `p` tasks run phase-synchronously in one process. Each task owns the
//! vertices a [`Partition`] gives it, together with their out-arcs in a local
//! CSR. Remote endpoints are *ghosts*. Tasks only learn about remote state
//! through [`Exchange`], an all-to-all that moves records between per-task
//! buffers and counts them on both the sending and the receiving side.
//! A [`BenchTrace`] collects per-phase, per-task computation counters and the
//! `p x p` record matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::partition::Partition;

pub mod bfs;
pub mod pagerank;
pub mod sssp;
pub mod subgraph;

pub use bfs::bfs;
pub use pagerank::pagerank;
pub use sssp::{sssp_delta, SsspConfig};
pub use subgraph::{count_subgraphs, count_subgraphs_keyed, CountResult, TemplateTree};

/// A remote vertex referenced by a task's local arcs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ghost {
    pub global: usize,
    pub owner: usize,
    /// Index of the vertex among its owner's local vertices.
    pub remote_index: usize,
}

/// One task's share of the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalGraph {
    /// Owned global ids, ascending; local index `i` is `owned[i]`.
    pub owned: Vec<usize>,
    pub offsets: Vec<usize>,
    /// Arc targets: `t < owned.len()` is local, otherwise ghost
    /// `t - owned.len()`.
    pub targets: Vec<usize>,
    pub weights: Option<Vec<f64>>,
    /// Ghosts in ascending global id.
    pub ghosts: Vec<Ghost>,
    /// `mirrors[j]`: `(local index, ghost index at j)` for every owned vertex
    /// task `j` holds as a ghost, in `j`'s ghost order.
    pub mirrors: Vec<Vec<(usize, usize)>>,
}

impl LocalGraph {
    #[inline]
    pub fn n_local(&self) -> usize {
        self.owned.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn row_weights(&self, i: usize) -> Option<&[f64]> {
        self.weights
            .as_ref()
            .map(|w| &w[self.offsets[i]..self.offsets[i + 1]])
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Resolves a local arc target into local or ghost form.
    #[inline]
    pub fn target(&self, t: usize) -> Target {
        if t < self.owned.len() {
            Target::Local(t)
        } else {
            Target::Ghost(t - self.owned.len())
        }
    }

    pub fn global_of(&self, t: usize) -> usize {
        match self.target(t) {
            Target::Local(i) => self.owned[i],
            Target::Ghost(g) => self.ghosts[g].global,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Local(usize),
    Ghost(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributedGraph {
    n: usize,
    directed: bool,
    owner: Vec<usize>,
    local_index: Vec<usize>,
    tasks: Vec<LocalGraph>,
}

/// Splits `g` across `part.p()` tasks.
pub fn distribute(g: &Graph, part: &Partition) -> Result<DistributedGraph> {
    if part.n() != g.n() {
        return Err(invalid!("partition covers {} vertices, graph has {}", part.n(), g.n()));
    }
    let p = part.p();
    let owner = part.assignment().to_vec();
    let members = part.members();
    let mut local_index = vec![0usize; g.n()];
    for list in &members {
        for (i, &v) in list.iter().enumerate() {
            local_index[v] = i;
        }
    }

    let mut tasks = Vec::with_capacity(p);
    let mut ghost_slot = vec![usize::MAX; g.n()];
    for (k, owned) in members.into_iter().enumerate() {
        // Ghost table in ascending global id.
        let mut ghost_ids: Vec<usize> = owned
            .iter()
            .flat_map(|&v| g.neighbors(v).iter().copied())
            .filter(|&u| owner[u] != k)
            .collect();
        ghost_ids.sort_unstable();
        ghost_ids.dedup();
        for (i, &u) in ghost_ids.iter().enumerate() {
            ghost_slot[u] = i;
        }
        let n_local = owned.len();
        let mut offsets = Vec::with_capacity(n_local + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        let mut weights = g.weights().map(|_| Vec::new());
        for &v in &owned {
            for (i, &u) in g.neighbors(v).iter().enumerate() {
                targets.push(if owner[u] == k {
                    local_index[u]
                } else {
                    n_local + ghost_slot[u]
                });
                if let Some(w) = weights.as_mut() {
                    w.push(g.arc_weight_at(v, i));
                }
            }
            offsets.push(targets.len());
        }
        let ghosts = ghost_ids
            .iter()
            .map(|&u| Ghost {
                global: u,
                owner: owner[u],
                remote_index: local_index[u],
            })
            .collect();
        tasks.push(LocalGraph {
            owned,
            offsets,
            targets,
            weights,
            ghosts,
            mirrors: vec![Vec::new(); p],
        });
    }
    for j in 0..p {
        for gi in 0..tasks[j].ghosts.len() {
            let gh = tasks[j].ghosts[gi];
            tasks[gh.owner].mirrors[j].push((gh.remote_index, gi));
        }
    }
    Ok(DistributedGraph {
        n: g.n(),
        directed: g.is_directed(),
        owner,
        local_index,
        tasks,
    })
}

impl DistributedGraph {
    pub fn p(&self) -> usize {
        self.tasks.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn owner(&self, v: usize) -> usize {
        self.owner[v]
    }

    pub fn local_index(&self, v: usize) -> usize {
        self.local_index[v]
    }

    pub fn task(&self, k: usize) -> &LocalGraph {
        &self.tasks[k]
    }

    pub fn tasks(&self) -> &[LocalGraph] {
        &self.tasks
    }

    pub fn is_weighted(&self) -> bool {
        self.tasks.iter().any(|t| t.weights.is_some())
    }

    /// Scatters per-task values (indexed by local index) into a global array.
    pub fn gather<T: Clone>(&self, per_task: &[Vec<T>], fill: T) -> Vec<T> {
        let mut out = vec![fill; self.n];
        for (t, vals) in self.tasks.iter().zip(per_task) {
            for (i, &v) in t.owned.iter().enumerate() {
                out[v] = vals[i].clone();
            }
        }
        out
    }

    /// Verifies ownership, arc coverage against `g`, and ghost/mirror
    /// consistency.
    pub fn check(&self, g: &Graph) -> Result<()> {
        let mut seen = vec![false; self.n];
        for (k, t) in self.tasks.iter().enumerate() {
            for (i, &v) in t.owned.iter().enumerate() {
                if seen[v] || self.owner[v] != k || self.local_index[v] != i {
                    return Err(invalid!("vertex {v} ownership is inconsistent"));
                }
                seen[v] = true;
                let mut row: Vec<usize> = t.row(i).iter().map(|&x| t.global_of(x)).collect();
                row.sort_unstable();
                if row != g.neighbors(v) {
                    return Err(invalid!("arcs of vertex {v} differ from the global graph"));
                }
            }
            for gh in &t.ghosts {
                let o = &self.tasks[gh.owner];
                if gh.owner == k || o.owned.get(gh.remote_index) != Some(&gh.global) {
                    return Err(invalid!("ghost {} of task {k} is inconsistent", gh.global));
                }
            }
            for (j, list) in t.mirrors.iter().enumerate() {
                for &(li, gi) in list {
                    if self.tasks[j].ghosts.get(gi).map(|g| g.global) != Some(t.owned[li]) {
                        return Err(invalid!("mirror list of task {k} for task {j} is inconsistent"));
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(invalid!("some vertex has no owner"));
        }
        Ok(())
    }
}

/// Items that travel through an [`Exchange`] and how many records each
/// stands for.
pub trait Records {
    fn records(&self) -> u64 {
        1
    }
}

impl Records for (usize, f64) {}
impl Records for usize {}

/// A row of dynamic-programming values sent as one record per entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub ghost: usize,
    pub values: Vec<u128>,
}

impl Records for Row {
    fn records(&self) -> u64 {
        self.values.len() as u64
    }
}

/// One all-to-all round.
#[derive(Debug)]
pub struct Exchange<T> {
    outbox: Vec<Vec<Vec<T>>>,
}

impl<T: Records> Exchange<T> {
    pub fn new(p: usize) -> Self {
        Exchange {
            outbox: (0..p).map(|_| (0..p).map(|_| Vec::new()).collect()).collect(),
        }
    }

    /// Queues `item` from task `src` to task `dst` (`src != dst`).
    pub fn send(&mut self, src: usize, dst: usize, item: T) {
        debug_assert_ne!(src, dst, "local data never goes through the exchange");
        self.outbox[src][dst].push(item);
    }

    /// Moves every buffer to its destination. Returns `inbox[dst]`, holding
    /// `(src, items)` in ascending `src`. Counts are recorded into `phase`.
    pub fn deliver(self, phase: &mut PhaseTrace) -> Vec<Vec<(usize, Vec<T>)>> {
        let p = self.outbox.len();
        phase.exchanges += 1;
        let mut inbox: Vec<Vec<(usize, Vec<T>)>> = (0..p).map(|_| Vec::new()).collect();
        for (src, row) in self.outbox.into_iter().enumerate() {
            for (dst, items) in row.into_iter().enumerate() {
                if items.is_empty() {
                    continue;
                }
                phase.sent[src][dst] += items.iter().map(Records::records).sum::<u64>();
                inbox[dst].push((src, items));
            }
        }
        for (dst, msgs) in inbox.iter().enumerate() {
            for (src, items) in msgs {
                phase.received[dst][*src] += items.iter().map(Records::records).sum::<u64>();
            }
        }
        inbox
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Analytic {
    PageRank,
    Bfs,
    Sssp,
    Count,
}

impl Analytic {
    pub fn name(self) -> &'static str {
        match self {
            Analytic::PageRank => "pagerank",
            Analytic::Bfs => "bfs",
            Analytic::Sssp => "sssp",
            Analytic::Count => "count",
        }
    }
}

/// Accounting for one phase: a PageRank iteration, a BFS level, a
/// delta-stepping bucket, or one template split of one coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseTrace {
    /// All-to-all rounds executed in this phase.
    pub exchanges: u32,
    pub compute_ops: Vec<u64>,
    /// `sent[i][j]`: records task `i` sent to task `j`.
    pub sent: Vec<Vec<u64>>,
    /// `received[j][i]`: records task `j` received from task `i`.
    pub received: Vec<Vec<u64>>,
}

impl PhaseTrace {
    pub fn new(p: usize) -> Self {
        PhaseTrace {
            exchanges: 0,
            compute_ops: vec![0; p],
            sent: vec![vec![0; p]; p],
            received: vec![vec![0; p]; p],
        }
    }

    pub fn total_sent(&self) -> u64 {
        self.sent.iter().flatten().sum()
    }

    pub fn conserved(&self) -> bool {
        let p = self.sent.len();
        (0..p).all(|i| (0..p).all(|j| self.sent[i][j] == self.received[j][i]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchTrace {
    pub analytic: Analytic,
    pub p: usize,
    pub phases: Vec<PhaseTrace>,
    /// Filled in by callers that time the run; never part of emitted CSVs.
    pub wall_time: Option<Duration>,
}

impl BenchTrace {
    pub fn new(analytic: Analytic, p: usize) -> Self {
        BenchTrace {
            analytic,
            p,
            phases: Vec::new(),
            wall_time: None,
        }
    }

    pub fn total_sent(&self) -> u64 {
        self.phases.iter().map(PhaseTrace::total_sent).sum()
    }

    pub fn total_received(&self) -> u64 {
        self.phases
            .iter()
            .map(|ph| ph.received.iter().flatten().sum::<u64>())
            .sum()
    }

    pub fn total_compute(&self) -> u64 {
        self.phases.iter().flat_map(|ph| ph.compute_ops.iter()).sum()
    }

    pub fn sent_by_task(&self, task: usize) -> u64 {
        self.phases.iter().map(|ph| ph.sent[task].iter().sum::<u64>()).sum()
    }

    pub fn received_by_task(&self, task: usize) -> u64 {
        self.phases
            .iter()
            .map(|ph| ph.received[task].iter().sum::<u64>())
            .sum()
    }

    pub fn compute_by_task(&self, task: usize) -> u64 {
        self.phases.iter().map(|ph| ph.compute_ops[task]).sum()
    }

    pub fn exchanges(&self) -> u64 {
        self.phases.iter().map(|ph| u64::from(ph.exchanges)).sum()
    }

    /// Per phase, every `sent[i][j]` equals `received[j][i]`.
    pub fn check_conservation(&self) -> Result<()> {
        match self.phases.iter().position(|ph| !ph.conserved()) {
            None => Ok(()),
            Some(i) => Err(invalid!("phase {i} sent and received volumes disagree")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn single_task_is_the_whole_graph() {
        let g = generate::cycle(6);
        let part = Partition::new(&g, 1, vec![0; 6]).unwrap();
        let dg = distribute(&g, &part).unwrap();
        dg.check(&g).unwrap();
        let t = dg.task(0);
        assert!(t.ghosts.is_empty());
        assert_eq!(t.targets, g.targets());
        assert_eq!(t.offsets, g.offsets());
    }

    #[test]
    fn cycle_halves_have_two_ghosts_each() {
        let g = generate::cycle(6);
        let part = Partition::new(&g, 2, vec![0, 0, 0, 1, 1, 1]).unwrap();
        let dg = distribute(&g, &part).unwrap();
        dg.check(&g).unwrap();
        let ghosts: Vec<Vec<usize>> = dg
            .tasks()
            .iter()
            .map(|t| t.ghosts.iter().map(|g| g.global).collect())
            .collect();
        assert_eq!(ghosts, vec![vec![3, 5], vec![0, 2]]);
        assert_eq!(dg.task(0).mirrors[1], vec![(0, 0), (2, 1)]);
    }

    #[test]
    fn random_partitions_distribute_consistently() {
        let g = generate::ba_like(400, 3, 2).unwrap();
        for p in [2, 3, 7] {
            let part = crate::partition::partition_random(&g, p, p as u64).unwrap();
            distribute(&g, &part).unwrap().check(&g).unwrap();
        }
    }

    #[test]
    fn exchange_counts_both_sides() {
        let mut ph = PhaseTrace::new(3);
        let mut ex: Exchange<usize> = Exchange::new(3);
        ex.send(0, 1, 5);
        ex.send(0, 1, 6);
        ex.send(2, 0, 1);
        let inbox = ex.deliver(&mut ph);
        assert_eq!(inbox[1], vec![(0, vec![5, 6])]);
        assert_eq!(ph.sent[0][1], 2);
        assert_eq!(ph.received[1][0], 2);
        assert!(ph.conserved());
        assert_eq!(ph.exchanges, 1);
    }
}
