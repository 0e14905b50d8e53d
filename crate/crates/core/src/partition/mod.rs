//! p-way vertex partitions: random and block baselines plus the
//! label-propagation partitioner (see [`lp`]).
//!
//! Tallies follow the 1D CSR storage convention: a part's edge tally is the
//! number of arcs it stores, i.e. the summed degree of its vertices, and its
//! cut tally is the number of stored arcs whose target lives elsewhere (for
//! undirected graphs: cut edges incident to the part).

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{domain, invalid, Result};
use crate::graph::Graph;
use crate::rng;

pub mod lp;

pub use lp::{
    balance_stage, partition_lp, partition_lp_with, refine_edge_cut, BalanceTarget, LpOutcome,
    Sequential, SweepRunner, Violation,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    p: usize,
    assignment: Vec<usize>,
    part_vertices: Vec<usize>,
    part_edges: Vec<usize>,
    part_cut: Vec<usize>,
}

impl Partition {
    /// Validates `assignment` against `g` and computes the per-part tallies.
    pub fn new(g: &Graph, p: usize, assignment: Vec<usize>) -> Result<Self> {
        if p == 0 {
            return Err(domain!("part count must be at least 1"));
        }
        if assignment.len() != g.n() {
            return Err(invalid!(
                "assignment has {} entries for n = {}",
                assignment.len(),
                g.n()
            ));
        }
        if let Some((v, &k)) = assignment.iter().enumerate().find(|(_, &k)| k >= p) {
            return Err(invalid!("vertex {v} assigned to part {k} >= p = {p}"));
        }
        let (part_vertices, part_edges, part_cut) = tallies(g, p, &assignment);
        Ok(Partition {
            p,
            assignment,
            part_vertices,
            part_edges,
            part_cut,
        })
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    #[inline]
    pub fn part_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn into_assignment(self) -> Vec<usize> {
        self.assignment
    }

    pub fn part_vertices(&self) -> &[usize] {
        &self.part_vertices
    }

    /// Arcs stored by each part (summed degree of owned vertices).
    pub fn part_edges(&self) -> &[usize] {
        &self.part_edges
    }

    /// Arcs leaving each part.
    pub fn part_cut(&self) -> &[usize] {
        &self.part_cut
    }

    pub fn has_empty_part(&self) -> bool {
        self.part_vertices.contains(&0)
    }

    /// Vertices of each part, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .part_vertices
            .iter()
            .map(|&c| Vec::with_capacity(c))
            .collect();
        for (v, &k) in self.assignment.iter().enumerate() {
            out[k].push(v);
        }
        out
    }

    /// Re-derives the tallies from the assignment and compares them with the
    /// cached ones.
    pub fn tallies_consistent(&self, g: &Graph) -> bool {
        g.n() == self.n()
            && tallies(g, self.p, &self.assignment)
                == (
                    self.part_vertices.clone(),
                    self.part_edges.clone(),
                    self.part_cut.clone(),
                )
    }

    /// The same assignment expressed on a relabeled graph: new vertex
    /// `perm[v]` keeps the part of old vertex `v`.
    pub fn permuted(&self, relabeled: &Graph, perm: &[usize]) -> Result<Partition> {
        crate::graph::check_bijection(perm, self.n())?;
        let mut assignment = vec![0; self.n()];
        for (old, &new) in perm.iter().enumerate() {
            assignment[new] = self.assignment[old];
        }
        Partition::new(relabeled, self.p, assignment)
    }
}

fn tallies(g: &Graph, p: usize, assignment: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut vertices = vec![0; p];
    let mut edges = vec![0; p];
    let mut cut = vec![0; p];
    for (v, &k) in assignment.iter().enumerate() {
        vertices[k] += 1;
        edges[k] += g.degree(v);
        cut[k] += g
            .neighbors(v)
            .iter()
            .filter(|&&u| assignment[u] != k)
            .count();
    }
    (vertices, edges, cut)
}

/// Which objectives the label-propagation partitioner pursues. Both modes
/// enforce the vertex and edge balance constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Minimize total edge cut.
    M,
    /// Minimize total edge cut and the largest per-part cut.
    MM,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionConfig {
    pub p: usize,
    pub vertex_imbalance: f64,
    pub edge_imbalance: f64,
    /// Alternating vertex-balance / refine rounds.
    pub k1: usize,
    /// Alternating edge-balance(+max-cut) / refine rounds.
    pub k2: usize,
    /// Sweep cap for every propagation, balance and refine stage.
    pub lp_iters: usize,
    pub seed: u64,
    pub mode: Mode,
}

impl PartitionConfig {
    pub fn new(p: usize) -> Self {
        PartitionConfig {
            p,
            vertex_imbalance: 1.10,
            edge_imbalance: 1.50,
            k1: 3,
            k2: 3,
            lp_iters: 10,
            seed: 0,
            mode: Mode::MM,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(domain!("part count must be at least 1"));
        }
        if !(self.vertex_imbalance >= 1.0) || !(self.edge_imbalance >= 1.0) {
            return Err(domain!(
                "imbalance ratios must be >= 1 (vertex {}, edge {})",
                self.vertex_imbalance,
                self.edge_imbalance
            ));
        }
        Ok(())
    }
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self::new(2)
    }
}

/// Independent uniform part per vertex.
pub fn partition_random(g: &Graph, p: usize, seed: u64) -> Result<Partition> {
    if p == 0 {
        return Err(domain!("part count must be at least 1"));
    }
    let mut rng = rng::rng(rng::substream(seed, "partition-random"));
    let assignment = (0..g.n()).map(|_| rng.random_range(0..p)).collect();
    Partition::new(g, p, assignment)
}

/// Contiguous id ranges of near-equal size; earlier parts take the remainder.
pub fn partition_block(g: &Graph, p: usize) -> Result<Partition> {
    if p == 0 {
        return Err(domain!("part count must be at least 1"));
    }
    let n = g.n();
    let (base, extra) = (n / p, n % p);
    let mut assignment = Vec::with_capacity(n);
    for k in 0..p {
        let size = base + usize::from(k < extra);
        assignment.extend(core::iter::repeat_n(k, size));
    }
    Partition::new(g, p, assignment)
}
