//! Level-synchronous BFS: local discovery, all-to-all exchange, local update.

use alloc::vec;
use alloc::vec::Vec;

use super::{Analytic, BenchTrace, DistributedGraph, Exchange, PhaseTrace, Target};
use crate::error::{domain, Result};
use crate::graph::UNREACHED;

/// Levels by global id; unreachable vertices hold [`UNREACHED`].
///
/// One phase per non-empty frontier, each with one exchange. A task sends a
/// ghost to its owner at most once over the whole run.
pub fn bfs(dg: &DistributedGraph, root: usize) -> Result<(Vec<usize>, BenchTrace)> {
    if root >= dg.n() {
        return Err(domain!("root {root} out of range for n = {}", dg.n()));
    }
    let p = dg.p();
    let mut trace = BenchTrace::new(Analytic::Bfs, p);
    let mut level: Vec<Vec<usize>> = dg
        .tasks()
        .iter()
        .map(|t| vec![UNREACHED; t.n_local()])
        .collect();
    let mut ghost_sent: Vec<Vec<bool>> = dg
        .tasks()
        .iter()
        .map(|t| vec![false; t.ghosts.len()])
        .collect();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new(); p];
    let (rk, ri) = (dg.owner(root), dg.local_index(root));
    level[rk][ri] = 0;
    frontier[rk].push(ri);

    let mut depth = 0;
    while frontier.iter().any(|f| !f.is_empty()) {
        let mut phase = PhaseTrace::new(p);
        let mut next: Vec<Vec<usize>> = vec![Vec::new(); p];
        let mut exchange = Exchange::new(p);
        for (k, t) in dg.tasks().iter().enumerate() {
            for &i in &frontier[k] {
                phase.compute_ops[k] += t.degree(i) as u64;
                for &x in t.row(i) {
                    match t.target(x) {
                        Target::Local(j) => {
                            if level[k][j] == UNREACHED {
                                level[k][j] = depth + 1;
                                next[k].push(j);
                            }
                        }
                        Target::Ghost(g) => {
                            if !ghost_sent[k][g] {
                                ghost_sent[k][g] = true;
                                let gh = t.ghosts[g];
                                exchange.send(k, gh.owner, gh.remote_index);
                            }
                        }
                    }
                }
            }
        }
        let inbox = exchange.deliver(&mut phase);
        for (k, msgs) in inbox.into_iter().enumerate() {
            for (_, items) in msgs {
                phase.compute_ops[k] += items.len() as u64;
                for j in items {
                    if level[k][j] == UNREACHED {
                        level[k][j] = depth + 1;
                        next[k].push(j);
                    }
                }
            }
        }
        trace.phases.push(phase);
        frontier = next;
        depth += 1;
    }
    Ok((dg.gather(&level, UNREACHED), trace))
}
