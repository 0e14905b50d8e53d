//! Push-style PageRank with per-ghost aggregation.

use alloc::vec;
use alloc::vec::Vec;

use super::{Analytic, BenchTrace, DistributedGraph, Exchange, PhaseTrace, Target};

pub const DEFAULT_DAMPING: f64 = 0.85;

/// Runs `iters` synchronous iterations from the uniform vector. Mass of
/// vertices without out-arcs is spread uniformly. Returns ranks by global id.
///
/// Every iteration is one phase with one exchange: each task sends one
/// `(remote index, summed contribution)` record per ghost.
pub fn pagerank(dg: &DistributedGraph, iters: usize, damping: f64) -> (Vec<f64>, BenchTrace) {
    let n = dg.n();
    let p = dg.p();
    let mut trace = BenchTrace::new(Analytic::PageRank, p);
    if n == 0 {
        return (Vec::new(), trace);
    }
    let nf = n as f64;
    let mut rank: Vec<Vec<f64>> = dg
        .tasks()
        .iter()
        .map(|t| vec![1.0 / nf; t.n_local()])
        .collect();

    for _ in 0..iters {
        let mut phase = PhaseTrace::new(p);
        // Scalar all-reduce in ascending global id; not part of the record
        // volume.
        let dangling: f64 = (0..n)
            .filter_map(|v| {
                let (k, i) = (dg.owner(v), dg.local_index(v));
                (dg.task(k).degree(i) == 0).then(|| rank[k][i])
            })
            .sum();

        let mut acc: Vec<Vec<f64>> = Vec::with_capacity(p);
        let mut exchange = Exchange::new(p);
        for (k, t) in dg.tasks().iter().enumerate() {
            let mut local = vec![0.0; t.n_local()];
            let mut ghost = vec![0.0; t.ghosts.len()];
            for i in 0..t.n_local() {
                let d = t.degree(i);
                if d == 0 {
                    continue;
                }
                let c = rank[k][i] / d as f64;
                for &x in t.row(i) {
                    match t.target(x) {
                        Target::Local(j) => local[j] += c,
                        Target::Ghost(g) => ghost[g] += c,
                    }
                }
                phase.compute_ops[k] += d as u64;
            }
            for (g, &value) in t.ghosts.iter().zip(&ghost) {
                exchange.send(k, g.owner, (g.remote_index, value));
            }
            acc.push(local);
        }
        let inbox = exchange.deliver(&mut phase);
        let base = (1.0 - damping) / nf + damping * dangling / nf;
        for (k, msgs) in inbox.into_iter().enumerate() {
            for (_, items) in msgs {
                phase.compute_ops[k] += items.len() as u64;
                for (i, value) in items {
                    acc[k][i] += value;
                }
            }
            for (r, a) in rank[k].iter_mut().zip(&acc[k]) {
                *r = base + damping * a;
            }
            phase.compute_ops[k] += rank[k].len() as u64;
        }
        trace.phases.push(phase);
    }
    (dg.gather(&rank, 0.0), trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::distribute;
    use crate::generate;
    use crate::graph::Graph;
    use crate::partition::Partition;

    #[test]
    fn two_cycle_is_uniform() {
        let g = Graph::from_edges(2, &[(0, 1), (1, 0)], true).unwrap();
        let part = Partition::new(&g, 2, vec![0, 1]).unwrap();
        let (r, _) = pagerank(&distribute(&g, &part).unwrap(), 7, DEFAULT_DAMPING);
        assert!(r.iter().all(|&x| (x - 0.5).abs() < 1e-15));
    }

    #[test]
    fn six_cycle_volume_is_four_per_iteration() {
        let g = generate::cycle(6);
        let part = Partition::new(&g, 2, vec![0, 0, 0, 1, 1, 1]).unwrap();
        let (r, trace) = pagerank(&distribute(&g, &part).unwrap(), 5, DEFAULT_DAMPING);
        assert!(r.iter().all(|&x| (x - 1.0 / 6.0).abs() < 1e-15));
        assert_eq!(trace.phases.len(), 5);
        for ph in &trace.phases {
            assert_eq!(ph.total_sent(), 4);
            assert_eq!(ph.exchanges, 1);
        }
        trace.check_conservation().unwrap();
    }

    #[test]
    fn single_task_sends_nothing() {
        let g = generate::ba_like(200, 2, 4).unwrap();
        let part = Partition::new(&g, 1, vec![0; 200]).unwrap();
        let (_, trace) = pagerank(&distribute(&g, &part).unwrap(), 3, DEFAULT_DAMPING);
        assert_eq!(trace.total_sent(), 0);
    }

    #[test]
    fn dangling_mass_is_kept() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)], true).unwrap();
        let part = Partition::new(&g, 2, vec![0, 1, 0]).unwrap();
        let (r, _) = pagerank(&distribute(&g, &part).unwrap(), 20, DEFAULT_DAMPING);
        assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
