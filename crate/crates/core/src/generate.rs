//! Deterministic synthetic graphs: small shapes with known answers plus two
//! desk-scale stand-ins for real small-world graphs (a planted-partition
//! block model and a preferential-attachment "ba-like" graph).

use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{domain, Result};
use crate::graph::Graph;
use crate::rng;

/// Undirected edge list with vertex count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl EdgeList {
    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(self.n, &self.edges, false).expect("generator ids are in range")
    }
}

pub fn path_edges(n: usize) -> EdgeList {
    EdgeList {
        n,
        edges: (1..n).map(|i| (i - 1, i)).collect(),
    }
}

pub fn cycle_edges(n: usize) -> EdgeList {
    let edges = if n < 3 {
        path_edges(n).edges
    } else {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    };
    EdgeList { n, edges }
}

/// Star with center 0 and `leaves` leaves.
pub fn star_edges(leaves: usize) -> EdgeList {
    EdgeList {
        n: leaves + 1,
        edges: (1..=leaves).map(|i| (0, i)).collect(),
    }
}

/// Two `k`-cliques on `0..k` and `k..2k` joined by the edge `(k-1, k)`.
pub fn clique_pair_edges(k: usize) -> EdgeList {
    let mut edges = Vec::new();
    for base in [0, k] {
        for i in 0..k {
            for j in i + 1..k {
                edges.push((base + i, base + j));
            }
        }
    }
    if k > 0 {
        edges.push((k - 1, k));
    }
    EdgeList { n: 2 * k, edges }
}

pub fn path(n: usize) -> Graph {
    path_edges(n).to_graph()
}

pub fn cycle(n: usize) -> Graph {
    cycle_edges(n).to_graph()
}

pub fn star(leaves: usize) -> Graph {
    star_edges(leaves).to_graph()
}

pub fn clique_pair(k: usize) -> Graph {
    clique_pair_edges(k).to_graph()
}

/// Parameters of the planted-partition (stochastic block) model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Planted {
    pub blocks: usize,
    pub block_size: usize,
    pub p_in: f64,
    pub p_out: f64,
}

/// Samples each within-block pair with probability `p_in` and each
/// cross-block pair with probability `p_out`. Block `b` holds vertices
/// `b * block_size .. (b + 1) * block_size`.
pub fn planted_edges(params: &Planted, seed: u64) -> Result<EdgeList> {
    let Planted {
        blocks,
        block_size: s,
        p_in,
        p_out,
    } = *params;
    for p in [p_in, p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain!("edge probability {p} outside [0, 1]"));
        }
    }
    if blocks == 0 || s == 0 {
        return Err(domain!("planted model needs at least one nonempty block"));
    }
    let mut rng = rng::rng(rng::substream(seed, "planted"));
    let mut edges = Vec::new();
    for a in 0..blocks {
        let base = a * s;
        let pairs = s * (s - 1) / 2;
        bernoulli_indices(&mut rng, pairs, p_in, |idx| {
            let (i, j) = unrank_pair(idx);
            edges.push((base + i, base + j));
        });
        for b in a + 1..blocks {
            let other = b * s;
            bernoulli_indices(&mut rng, s * s, p_out, |idx| {
                edges.push((base + idx / s, other + idx % s));
            });
        }
    }
    Ok(EdgeList {
        n: blocks * s,
        edges,
    })
}

pub fn planted(params: &Planted, seed: u64) -> Result<Graph> {
    Ok(planted_edges(params, seed)?.to_graph())
}

/// Calls `hit` for each index in `0..count` selected independently with
/// probability `p`, jumping geometric gaps instead of flipping every coin.
fn bernoulli_indices(rng: &mut rng::Rng, count: usize, p: f64, mut hit: impl FnMut(usize)) {
    if p <= 0.0 || count == 0 {
        return;
    }
    if p >= 1.0 {
        (0..count).for_each(hit);
        return;
    }
    let log_q = libm::log(1.0 - p);
    let mut i: usize = 0;
    loop {
        // u in (0, 1]
        let u = 1.0 - rng.random::<f64>();
        let skip = libm::floor(libm::log(u) / log_q);
        if skip >= (count - i) as f64 {
            return;
        }
        i += skip as usize;
        hit(i);
        i += 1;
        if i >= count {
            return;
        }
    }
}

/// Maps `idx` in `0..C(s,2)` to the pair `(i, j)`, `i < j`, in the order
/// (0,1), (0,2), (1,2), (0,3), ... (column-major over `j`).
fn unrank_pair(idx: usize) -> (usize, usize) {
    // largest j with j*(j-1)/2 <= idx
    let mut j = libm::floor((1.0 + libm::sqrt(1.0 + 8.0 * idx as f64)) / 2.0) as usize;
    while j * (j - 1) / 2 > idx {
        j -= 1;
    }
    while (j + 1) * j / 2 <= idx {
        j += 1;
    }
    (idx - j * (j - 1) / 2, j)
}

/// Preferential attachment: a clique on `attach + 1` vertices, then every new
/// vertex links to `attach` distinct existing vertices chosen with
/// probability proportional to their degree.
pub fn ba_like_edges(n: usize, attach: usize, seed: u64) -> Result<EdgeList> {
    if attach == 0 {
        return Err(domain!("ba-like generator needs attach >= 1"));
    }
    if n < attach + 1 {
        return Err(domain!("ba-like generator needs n > attach (n = {n}, attach = {attach})"));
    }
    let mut rng = rng::rng(rng::substream(seed, "ba-like"));
    let mut edges = Vec::with_capacity(n * attach);
    // Every arc endpoint once: sampling an entry uniformly is degree-proportional.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * n * attach);
    for i in 0..=attach {
        for j in i + 1..=attach {
            edges.push((i, j));
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(attach);
    for v in attach + 1..n {
        chosen.clear();
        while chosen.len() < attach {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Ok(EdgeList { n, edges })
}

pub fn ba_like(n: usize, attach: usize, seed: u64) -> Result<Graph> {
    Ok(ba_like_edges(n, attach, seed)?.to_graph())
}

/// Erdős–Rényi G(n, p), used by tests as a structure-free baseline.
pub fn gnp_edges(n: usize, p: f64, seed: u64) -> Result<EdgeList> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain!("edge probability {p} outside [0, 1]"));
    }
    let mut rng = rng::rng(rng::substream(seed, "gnp"));
    let mut edges = Vec::new();
    bernoulli_indices(&mut rng, n * n.saturating_sub(1) / 2, p, |idx| {
        edges.push(unrank_pair(idx));
    });
    Ok(EdgeList { n, edges })
}
