//! Delta-stepping SSSP with semi-sorted adjacencies, lazily cleaned bucket
//! queues and a per-ghost tentative-distance filter.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::{Analytic, BenchTrace, DistributedGraph, Exchange, LocalGraph, PhaseTrace, Target};
use crate::error::{domain, Result};

const NOT_QUEUED: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsspConfig {
    /// Bucket width; `None` picks [`default_delta`]. `f64::INFINITY` puts
    /// everything into one bucket.
    pub delta: Option<f64>,
    /// Suppress remote relaxations that do not improve the task's cached
    /// distance for that ghost.
    pub filter_remote: bool,
}

impl Default for SsspConfig {
    fn default() -> Self {
        SsspConfig {
            delta: None,
            filter_remote: true,
        }
    }
}

/// Average arc weight times `n / m`; 1 when there are no arcs.
pub fn default_delta(dg: &DistributedGraph) -> f64 {
    let mut m = 0usize;
    let mut total = 0.0;
    for t in dg.tasks() {
        m += t.targets.len();
        total += t.weights.as_ref().map_or(t.targets.len() as f64, |w| w.iter().sum());
    }
    if m == 0 || total <= 0.0 {
        return 1.0;
    }
    (total / m as f64) * (dg.n() as f64 / m as f64)
}

struct Task<'a> {
    graph: &'a LocalGraph,
    /// Row `i` reordered light-first: `(target, weight)`, light ones end at
    /// `split[i]`.
    arcs: Vec<(usize, f64)>,
    split: Vec<usize>,
    dist: Vec<f64>,
    queued: Vec<usize>,
    buckets: BTreeMap<usize, Vec<usize>>,
    ghost_best: Vec<f64>,
    settled: Vec<usize>,
    in_settled: Vec<bool>,
}

impl<'a> Task<'a> {
    fn new(graph: &'a LocalGraph, delta: f64) -> Self {
        let n = graph.n_local();
        let mut arcs = Vec::with_capacity(graph.targets.len());
        let mut split = Vec::with_capacity(n);
        for i in 0..n {
            let start = arcs.len();
            let ws = graph.row_weights(i);
            let row = graph.row(i);
            let weight = |j: usize| ws.map_or(1.0, |w| w[j]);
            arcs.extend((0..row.len()).filter(|&j| weight(j) <= delta).map(|j| (row[j], weight(j))));
            split.push(arcs.len() - start);
            arcs.extend((0..row.len()).filter(|&j| weight(j) > delta).map(|j| (row[j], weight(j))));
        }
        Task {
            graph,
            arcs,
            split,
            dist: vec![f64::INFINITY; n],
            queued: vec![NOT_QUEUED; n],
            buckets: BTreeMap::new(),
            ghost_best: vec![f64::INFINITY; graph.ghosts.len()],
            settled: Vec::new(),
            in_settled: vec![false; n],
        }
    }

    fn light(&self, i: usize) -> &[(usize, f64)] {
        let s = self.graph.offsets[i];
        &self.arcs[s..s + self.split[i]]
    }

    fn heavy(&self, i: usize) -> &[(usize, f64)] {
        &self.arcs[self.graph.offsets[i] + self.split[i]..self.graph.offsets[i + 1]]
    }

    fn relax(&mut self, i: usize, d: f64, delta: f64) {
        if d < self.dist[i] {
            self.dist[i] = d;
            let b = bucket_of(d, delta);
            if self.queued[i] != b {
                self.queued[i] = b;
                self.buckets.entry(b).or_default().push(i);
            }
        }
    }

    /// Smallest bucket holding a live entry, dropping stale ones on the way.
    fn first_live(&mut self) -> Option<usize> {
        loop {
            let mut entry = self.buckets.first_entry()?;
            let b = *entry.key();
            let queued = &self.queued;
            entry.get_mut().retain(|&i| queued[i] == b);
            if entry.get().is_empty() {
                entry.remove();
            } else {
                return Some(b);
            }
        }
    }

    fn has_live(&self, b: usize) -> bool {
        self.buckets
            .get(&b)
            .is_some_and(|list| list.iter().any(|&i| self.queued[i] == b))
    }
}

fn bucket_of(d: f64, delta: f64) -> usize {
    if delta.is_infinite() {
        0
    } else {
        libm::floor(d / delta) as usize
    }
}

/// Distances by global id (`f64::INFINITY` when unreachable). Unweighted
/// graphs use unit weights.
///
/// Each bucket is one phase: light-arc rounds (discovery, exchange, update)
/// until the bucket stays empty, then one heavy-arc round for every vertex
/// settled in the bucket.
pub fn sssp_delta(
    dg: &DistributedGraph,
    root: usize,
    cfg: &SsspConfig,
) -> Result<(Vec<f64>, BenchTrace)> {
    if root >= dg.n() {
        return Err(domain!("root {root} out of range for n = {}", dg.n()));
    }
    let delta = cfg.delta.unwrap_or_else(|| default_delta(dg));
    if !(delta > 0.0) {
        return Err(domain!("delta must be positive, got {delta}"));
    }
    for t in dg.tasks() {
        if let Some(w) = t.weights.as_ref().and_then(|w| w.iter().find(|&&w| !(w >= 0.0))) {
            return Err(domain!("negative or undefined weight {w}"));
        }
    }
    let p = dg.p();
    let mut trace = BenchTrace::new(Analytic::Sssp, p);
    let mut tasks: Vec<Task> = dg.tasks().iter().map(|t| Task::new(t, delta)).collect();
    tasks[dg.owner(root)].relax(dg.local_index(root), 0.0, delta);

    // Global minimum over tasks: a scalar reduction, not counted as records.
    while let Some(current) = tasks.iter_mut().filter_map(Task::first_live).min() {
        let mut phase = PhaseTrace::new(p);
        loop {
            let mut requests: Vec<Vec<(usize, f64)>> = vec![Vec::new(); p];
            let mut exchange = Exchange::new(p);
            for (k, task) in tasks.iter_mut().enumerate() {
                let Some(list) = task.buckets.remove(&current) else {
                    continue;
                };
                for i in list {
                    if task.queued[i] != current {
                        continue;
                    }
                    task.queued[i] = NOT_QUEUED;
                    if !task.in_settled[i] {
                        task.in_settled[i] = true;
                        task.settled.push(i);
                    }
                    let arcs = task.light(i).len();
                    phase.compute_ops[k] += arcs as u64;
                    for a in 0..arcs {
                        let (x, w) = task.light(i)[a];
                        discover(task, k, x, task.dist[i] + w, cfg, &mut requests[k], &mut exchange);
                    }
                }
            }
            apply(&mut tasks, requests, exchange, &mut phase, delta);
            if !tasks.iter().any(|t| t.has_live(current)) {
                break;
            }
        }
        let mut requests: Vec<Vec<(usize, f64)>> = vec![Vec::new(); p];
        let mut exchange = Exchange::new(p);
        for (k, task) in tasks.iter_mut().enumerate() {
            let settled = core::mem::take(&mut task.settled);
            for &i in &settled {
                task.in_settled[i] = false;
                let arcs = task.heavy(i).len();
                phase.compute_ops[k] += arcs as u64;
                for a in 0..arcs {
                    let (x, w) = task.heavy(i)[a];
                    discover(task, k, x, task.dist[i] + w, cfg, &mut requests[k], &mut exchange);
                }
            }
        }
        apply(&mut tasks, requests, exchange, &mut phase, delta);
        trace.phases.push(phase);
    }
    let dist: Vec<Vec<f64>> = tasks.into_iter().map(|t| t.dist).collect();
    Ok((dg.gather(&dist, f64::INFINITY), trace))
}

fn discover(
    task: &mut Task,
    k: usize,
    x: usize,
    d: f64,
    cfg: &SsspConfig,
    local: &mut Vec<(usize, f64)>,
    exchange: &mut Exchange<(usize, f64)>,
) {
    match task.graph.target(x) {
        Target::Local(j) => {
            if d < task.dist[j] {
                local.push((j, d));
            }
        }
        Target::Ghost(g) => {
            if cfg.filter_remote {
                if !(d < task.ghost_best[g]) {
                    return;
                }
                task.ghost_best[g] = d;
            }
            let gh = task.graph.ghosts[g];
            exchange.send(k, gh.owner, (gh.remote_index, d));
        }
    }
}

fn apply(
    tasks: &mut [Task],
    local: Vec<Vec<(usize, f64)>>,
    exchange: Exchange<(usize, f64)>,
    phase: &mut PhaseTrace,
    delta: f64,
) {
    let inbox = exchange.deliver(phase);
    for (k, (own, msgs)) in local.into_iter().zip(inbox).enumerate() {
        let task = &mut tasks[k];
        phase.compute_ops[k] += own.len() as u64;
        for (j, d) in own {
            task.relax(j, d, delta);
        }
        for (_, items) in msgs {
            phase.compute_ops[k] += items.len() as u64;
            for (j, d) in items {
                task.relax(j, d, delta);
            }
        }
    }
}
