//! Multi-constraint, multi-objective label-propagation partitioning.
//!
//! Pipeline:
//!
//! 1. `p` distinct random seed vertices receive the `p` labels; everything
//!    else starts unlabeled. Degree-weighted propagation fills the graph: a
//!    vertex takes the label maximizing `sum w(u, v) / deg(u)` over labeled
//!    neighbors `u`.
//! 2. `k1` rounds of (vertex balance, cut refinement).
//! 3. `k2` rounds of (edge balance [+ max-cut pressure in [`Mode::MM`]], cut
//!    refinement under both constraints).
//!
//! Balancing is label propagation whose neighbor counts are scaled by
//! `max(0, 1 - tally(L) / cap)`; in the MM edge stage a score additionally
//! loses `cut(L) / cut_target`. Refinement is a strict-gain move: a vertex
//! joins the label most common among its neighbors only if that lowers the
//! cut and the destination stays within its caps.
//!
//! All label and tally state is atomic so that the same sweep code runs
//! either sequentially (deterministic) or split into concurrently executed
//! chunks through a [`SweepRunner`]. Concurrent sweeps read neighbor labels
//! without synchronization; the size guards below use read-modify-write, so
//! parts are never emptied and caps are never exceeded even then. Tallies are
//! recounted exactly between stages.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;
use core::sync::atomic::{AtomicI64, AtomicUsize, Ordering::Relaxed};

use rand::Rng as _;

use super::{Mode, Partition, PartitionConfig};
use crate::error::{domain, Result};
use crate::graph::Graph;
use crate::rng;

const UNLABELED: usize = usize::MAX;

/// Executes one sweep over `0..n` as a set of disjoint ranges.
///
/// `body(chunk, range)` returns the number of label changes it made; `run`
/// returns the total. Implementations may call `body` concurrently.
pub trait SweepRunner: Sync {
    fn run(&self, n: usize, body: &(dyn Fn(usize, Range<usize>) -> usize + Sync)) -> usize;
}

/// Single chunk, in order. The deterministic execution mode.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl SweepRunner for Sequential {
    fn run(&self, n: usize, body: &(dyn Fn(usize, Range<usize>) -> usize + Sync)) -> usize {
        body(0, 0..n)
    }
}

/// Which constraint a balance stage works on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceTarget {
    Vertex,
    /// Edge balance, plus max-cut pressure when the config mode is MM.
    EdgeMaxCut,
}

/// Balance achieved when a constraint is left unmet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub v_max: f64,
    pub e_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub partition: Partition,
    /// `Some` if the vertex or edge imbalance target was not reached.
    pub violation: Option<Violation>,
}

/// Label-propagation partitioning in deterministic mode.
pub fn partition_lp(g: &Graph, cfg: &PartitionConfig) -> Result<LpOutcome> {
    partition_lp_with(g, cfg, &Sequential)
}

/// Label-propagation partitioning with a caller-chosen sweep executor.
pub fn partition_lp_with(
    g: &Graph,
    cfg: &PartitionConfig,
    runner: &dyn SweepRunner,
) -> Result<LpOutcome> {
    cfg.validate()?;
    if g.is_directed() {
        return Err(domain!("label propagation needs an undirected graph; symmetrize first"));
    }
    let (n, p) = (g.n(), cfg.p);
    if p > n {
        return Err(domain!("cannot split {n} vertices into {p} nonempty parts"));
    }
    let mut lp = Engine::new(g, cfg, runner);
    if p == 1 {
        lp.state.fill(0);
    } else {
        lp.initialize();
        for _ in 0..cfg.k1 {
            lp.balance(BalanceTarget::Vertex);
            lp.refine(false);
        }
        for _ in 0..cfg.k2 {
            lp.balance(BalanceTarget::EdgeMaxCut);
            lp.refine(true);
        }
    }
    let partition = lp.state.to_partition();
    let violation = violation(g, &partition, cfg);
    Ok(LpOutcome {
        partition,
        violation,
    })
}

/// Cut refinement alone, under both balance caps of `cfg`.
/// The total cut never increases.
pub fn refine_edge_cut(g: &Graph, part: &Partition, cfg: &PartitionConfig) -> Partition {
    let mut lp = Engine::new(g, cfg, &Sequential);
    lp.state.load(part.assignment());
    lp.refine(true);
    lp.state.to_partition()
}

/// One balance stage alone. Empty parts are repopulated first; afterwards the
/// largest tally of the balanced quantity never exceeds its value before the
/// sweeps.
pub fn balance_stage(
    g: &Graph,
    part: &Partition,
    cfg: &PartitionConfig,
    target: BalanceTarget,
) -> Partition {
    let mut lp = Engine::new(g, cfg, &Sequential);
    lp.state.load(part.assignment());
    lp.balance(target);
    lp.state.to_partition()
}

fn violation(g: &Graph, part: &Partition, cfg: &PartitionConfig) -> Option<Violation> {
    let b = crate::metrics::balance(g, part);
    let eps = 1e-9;
    (b.v_max > cfg.vertex_imbalance + eps || b.e_max > cfg.edge_imbalance + eps).then_some(
        Violation {
            v_max: b.v_max,
            e_max: b.e_max,
        },
    )
}

struct State<'g> {
    g: &'g Graph,
    p: usize,
    label: Vec<AtomicUsize>,
    size: Vec<AtomicI64>,
    edges: Vec<AtomicI64>,
    cut: Vec<AtomicI64>,
}

impl<'g> State<'g> {
    fn new(g: &'g Graph, p: usize) -> Self {
        State {
            g,
            p,
            label: (0..g.n()).map(|_| AtomicUsize::new(UNLABELED)).collect(),
            size: (0..p).map(|_| AtomicI64::new(0)).collect(),
            edges: (0..p).map(|_| AtomicI64::new(0)).collect(),
            cut: (0..p).map(|_| AtomicI64::new(0)).collect(),
        }
    }

    #[inline]
    fn label(&self, v: usize) -> usize {
        self.label[v].load(Relaxed)
    }

    fn fill(&mut self, k: usize) {
        for l in &self.label {
            l.store(k, Relaxed);
        }
        self.recount();
    }

    fn load(&mut self, assignment: &[usize]) {
        for (l, &k) in self.label.iter().zip(assignment) {
            l.store(k, Relaxed);
        }
        self.recount();
    }

    /// Exact tallies from the current labels (unlabeled vertices ignored).
    fn recount(&mut self) {
        let mut size = vec![0i64; self.p];
        let mut edges = vec![0i64; self.p];
        let mut cut = vec![0i64; self.p];
        for v in 0..self.g.n() {
            let k = self.label(v);
            if k == UNLABELED {
                continue;
            }
            size[k] += 1;
            edges[k] += self.g.degree(v) as i64;
            cut[k] += self
                .g
                .neighbors(v)
                .iter()
                .filter(|&&u| self.label(u) != k)
                .count() as i64;
        }
        for k in 0..self.p {
            self.size[k].store(size[k], Relaxed);
            self.edges[k].store(edges[k], Relaxed);
            self.cut[k].store(cut[k], Relaxed);
        }
    }

    fn tally(v: &[AtomicI64]) -> Vec<i64> {
        v.iter().map(|x| x.load(Relaxed)).collect()
    }

    fn to_partition(&self) -> Partition {
        let assignment = (0..self.g.n()).map(|v| self.label(v)).collect();
        Partition::new(self.g, self.p, assignment).expect("labels stay within 0..p")
    }

    /// Moves `v` from `from` to `to` if the rule admits it. `c_from`/`c_to`
    /// are `v`'s neighbor counts in the two parts and `d` its non-loop degree.
    fn try_move(&self, v: usize, from: usize, to: usize, nb: &NeighborCounts, rule: &MoveRule) -> bool {
        let deg = self.g.degree(v) as i64;
        let prev_from = self.size[from].fetch_sub(1, Relaxed);
        if prev_from <= 1 {
            self.size[from].fetch_add(1, Relaxed);
            return false;
        }
        let prev_to = self.size[to].fetch_add(1, Relaxed);
        if prev_to + 1 > rule.size_cap || (rule.monotone_size && prev_to + 1 > prev_from) {
            self.size[to].fetch_sub(1, Relaxed);
            self.size[from].fetch_add(1, Relaxed);
            return false;
        }
        let edges_to = self.edges[to].fetch_add(deg, Relaxed) + deg;
        let edges_from = self.edges[from].load(Relaxed);
        let edge_ok = rule.edge_cap.is_none_or(|cap| edges_to <= cap)
            && (!rule.monotone_edges || edges_to <= edges_from);
        let delta_to = nb.d - 2 * nb.count(to);
        let cut_ok = match rule.cut_cap {
            Some(cap) if delta_to > 0 => self.cut[to].load(Relaxed) + delta_to <= cap,
            _ => true,
        };
        if !(edge_ok && cut_ok) {
            self.edges[to].fetch_sub(deg, Relaxed);
            self.size[to].fetch_sub(1, Relaxed);
            self.size[from].fetch_add(1, Relaxed);
            return false;
        }
        self.edges[from].fetch_sub(deg, Relaxed);
        self.cut[from].fetch_add(2 * nb.count(from) - nb.d, Relaxed);
        self.cut[to].fetch_add(delta_to, Relaxed);
        self.label[v].store(to, Relaxed);
        true
    }
}

#[derive(Debug, Clone, Copy)]
struct MoveRule {
    size_cap: i64,
    edge_cap: Option<i64>,
    /// A move may not raise the destination's cut above this.
    cut_cap: Option<i64>,
    /// Destination may not end larger than the source was (balance stages).
    monotone_size: bool,
    monotone_edges: bool,
}

/// Scratch space: per-label scores for one vertex.
struct NeighborCounts {
    score: Vec<f64>,
    counts: Vec<i64>,
    touched: Vec<usize>,
    d: i64,
}

impl NeighborCounts {
    fn new(p: usize) -> Self {
        NeighborCounts {
            score: vec![0.0; p],
            counts: vec![0; p],
            touched: Vec::new(),
            d: 0,
        }
    }

    fn clear(&mut self) {
        for &l in &self.touched {
            self.score[l] = 0.0;
            self.counts[l] = 0;
        }
        self.touched.clear();
        self.d = 0;
    }

    #[inline]
    fn count(&self, l: usize) -> i64 {
        self.counts[l]
    }

    /// Gathers labeled neighbors of `v`; `weight(u, i)` is the contribution
    /// of the `i`-th arc to `u`.
    fn gather(&mut self, st: &State<'_>, v: usize, weight: impl Fn(usize, usize) -> f64) {
        self.clear();
        for (i, &u) in st.g.neighbors(v).iter().enumerate() {
            if u == v {
                continue;
            }
            self.d += 1;
            let l = st.label(u);
            if l == UNLABELED {
                continue;
            }
            if self.counts[l] == 0 {
                self.touched.push(l);
            }
            self.counts[l] += 1;
            self.score[l] += weight(u, i);
        }
    }

    /// Label with the highest `value`, ties broken uniformly at random.
    fn best(&self, rng: &mut rng::Rng, value: impl Fn(usize) -> f64) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut ties = 0u32;
        for &l in &self.touched {
            let s = value(l);
            match best {
                Some((_, b)) if s < b => {}
                Some((_, b)) if s == b => {
                    ties += 1;
                    if rng.random_range(0..ties) == 0 {
                        best = Some((l, s));
                    }
                }
                _ => {
                    best = Some((l, s));
                    ties = 1;
                }
            }
        }
        best
    }
}

struct Engine<'g, 'r> {
    state: State<'g>,
    cfg: &'r PartitionConfig,
    runner: &'r dyn SweepRunner,
    seed: u64,
    stage: u64,
}

impl<'g, 'r> Engine<'g, 'r> {
    fn new(g: &'g Graph, cfg: &'r PartitionConfig, runner: &'r dyn SweepRunner) -> Self {
        Engine {
            state: State::new(g, cfg.p),
            cfg,
            runner,
            seed: rng::substream(cfg.seed, "partition-lp"),
            stage: 0,
        }
    }

    fn next_seed(&mut self) -> u64 {
        self.stage += 1;
        rng::child(self.seed, self.stage)
    }

    fn vertex_cap(&self) -> i64 {
        let g = self.state.g;
        libm::floor(self.cfg.vertex_imbalance * g.n() as f64 / self.cfg.p as f64 + 1e-9) as i64
    }

    fn edge_cap(&self) -> i64 {
        let g = self.state.g;
        libm::floor(self.cfg.edge_imbalance * g.m() as f64 / self.cfg.p as f64 + 1e-9) as i64
    }

    /// Runs up to `lp_iters` sweeps of `visit`, stopping early once a sweep
    /// changes nothing. Tallies are exact afterwards.
    fn sweeps<F>(&mut self, visit: F)
    where
        F: Fn(&State<'g>, usize, &mut NeighborCounts, &mut rng::Rng) -> bool + Sync,
    {
        for _ in 0..self.cfg.lp_iters {
            let seed = self.next_seed();
            let st = &self.state;
            let body = |chunk: usize, range: Range<usize>| {
                let mut rng = rng::rng(rng::child(seed, chunk as u64));
                let mut nb = NeighborCounts::new(st.p);
                range.filter(|&v| visit(st, v, &mut nb, &mut rng)).count()
            };
            let changed = self.runner.run(st.g.n(), &body);
            self.state.recount();
            if changed == 0 {
                break;
            }
        }
    }

    fn initialize(&mut self) {
        let g = self.state.g;
        let (n, p) = (g.n(), self.cfg.p);
        let mut rng = rng::rng(self.next_seed());
        let mut pinned = vec![false; n];
        for (k, v) in rand::seq::index::sample(&mut rng, n, p).into_iter().enumerate() {
            pinned[v] = true;
            self.state.label[v].store(k, Relaxed);
        }
        self.state.recount();

        self.sweeps(|st, v, nb, rng| {
            if pinned[v] {
                return false;
            }
            nb.gather(st, v, |u, i| st.g.arc_weight_at(v, i) / st.g.degree(u) as f64);
            let own = st.label(v);
            let Some((best, score)) = nb.best(rng, |l| nb.score[l]) else {
                return false;
            };
            if own == best || (own != UNLABELED && score <= nb.score[own]) {
                return false;
            }
            // Seeds are pinned, so no label can disappear here.
            st.label[v].store(best, Relaxed);
            true
        });

        // Vertices the propagation never reached go to the lightest part.
        let mut size = State::tally(&self.state.size);
        for v in 0..n {
            if self.state.label(v) == UNLABELED {
                let k = (0..p).min_by_key(|&k| size[k]).unwrap();
                self.state.label[v].store(k, Relaxed);
                size[k] += 1;
            }
        }
        self.state.recount();
    }

    /// Gives every empty part one random vertex of the currently largest part.
    fn repair_empty_parts(&mut self) {
        let p = self.cfg.p;
        let mut rng = rng::rng(self.next_seed());
        loop {
            let size = State::tally(&self.state.size);
            let Some(empty) = (0..p).find(|&k| size[k] == 0) else {
                break;
            };
            let donor = (0..p).max_by_key(|&k| (size[k], core::cmp::Reverse(k))).unwrap();
            if size[donor] <= 1 {
                break;
            }
            let members: Vec<usize> = (0..self.state.g.n())
                .filter(|&v| self.state.label(v) == donor)
                .collect();
            let v = members[rng.random_range(0..members.len())];
            self.state.label[v].store(empty, Relaxed);
            self.state.recount();
        }
    }

    fn balance(&mut self, target: BalanceTarget) {
        self.repair_empty_parts();
        let vcap = self.vertex_cap();
        let ecap = self.edge_cap();
        match target {
            BalanceTarget::Vertex => {
                let rule = MoveRule {
                    size_cap: vcap,
                    edge_cap: None,
                    cut_cap: None,
                    monotone_size: true,
                    monotone_edges: false,
                };
                let capf = vcap.max(1) as f64;
                self.sweeps(|st, v, nb, rng| {
                    nb.gather(st, v, |_, _| 1.0);
                    let weight = |l: usize| {
                        let w = 1.0 - st.size[l].load(Relaxed) as f64 / capf;
                        nb.count(l) as f64 * w.max(0.0)
                    };
                    balance_move(st, v, nb, rng, weight, &rule)
                });
            }
            BalanceTarget::EdgeMaxCut => {
                let rule = MoveRule {
                    size_cap: vcap,
                    edge_cap: Some(ecap),
                    cut_cap: None,
                    monotone_size: false,
                    monotone_edges: true,
                };
                let capf = ecap.max(1) as f64;
                let maxcut = self.cfg.mode == Mode::MM;
                self.sweeps(|st, v, nb, rng| {
                    nb.gather(st, v, |_, _| 1.0);
                    let cut_target = cut_target(st);
                    let weight = |l: usize| {
                        let w = 1.0 - st.edges[l].load(Relaxed) as f64 / capf;
                        let mut s = nb.count(l) as f64 * w.max(0.0);
                        if maxcut {
                            s -= st.cut[l].load(Relaxed) as f64 / cut_target;
                        }
                        s
                    };
                    balance_move(st, v, nb, rng, weight, &rule)
                });
            }
        }
    }

    fn refine(&mut self, edge_constraint: bool) {
        let maxcut = edge_constraint && self.cfg.mode == Mode::MM;
        let max_cut = State::tally(&self.state.cut).into_iter().max().unwrap_or(0);
        let rule = MoveRule {
            size_cap: self.vertex_cap(),
            edge_cap: edge_constraint.then(|| self.edge_cap()),
            cut_cap: maxcut.then_some(max_cut),
            monotone_size: false,
            monotone_edges: false,
        };
        self.sweeps(|st, v, nb, rng| {
            nb.gather(st, v, |_, _| 1.0);
            let own = st.label(v);
            let Some((best, count)) = nb.best(rng, |l| nb.count(l) as f64) else {
                return false;
            };
            best != own && count > nb.count(own) as f64 && st.try_move(v, own, best, nb, &rule)
        });
    }
}

/// Average per-part cut, floored at 1.
fn cut_target(st: &State<'_>) -> f64 {
    let total: i64 = st.cut.iter().map(|c| c.load(Relaxed)).sum();
    (total as f64 / st.p as f64).max(1.0)
}

fn balance_move(
    st: &State<'_>,
    v: usize,
    nb: &NeighborCounts,
    rng: &mut rng::Rng,
    weight: impl Fn(usize) -> f64,
    rule: &MoveRule,
) -> bool {
    let own = st.label(v);
    let Some((best, score)) = nb.best(rng, &weight) else {
        return false;
    };
    best != own && score > weight(own) && st.try_move(v, own, best, nb, rule)
}
