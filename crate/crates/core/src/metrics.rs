//! Layout quality: balance, cut objectives, adjacency locality and n-hop
//! replication.
//!
//! Conventions (shared with [`crate::partition::Partition`]):
//! - `m` counts arcs; an undirected edge contributes two.
//! - A part's edge tally is the number of arcs it stores (summed degree);
//!   `e_max` divides the largest tally by `m / p`.
//! - A part's cut tally is the number of stored arcs leaving it, which for
//!   undirected graphs is the number of cut edges incident to the part.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::graph::{self, Graph, UNREACHED};
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Balance {
    pub v_max: f64,
    pub e_max: f64,
    pub has_empty_part: bool,
}

/// Largest per-part vertex and arc tallies relative to the per-part average.
pub fn balance(g: &Graph, part: &Partition) -> Balance {
    let p = part.p() as f64;
    let ratio = |max: usize, total: usize| {
        if total == 0 {
            0.0
        } else {
            max as f64 * p / total as f64
        }
    };
    Balance {
        v_max: ratio(part.part_vertices().iter().copied().max().unwrap_or(0), g.n()),
        e_max: ratio(part.part_edges().iter().copied().max().unwrap_or(0), g.m()),
        has_empty_part: part.has_empty_part(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCut {
    /// `cut_arcs / m`, in `[0, 1]`.
    pub fraction: f64,
    pub cut_arcs: usize,
}

pub fn edge_cut(g: &Graph, part: &Partition) -> EdgeCut {
    let cut_arcs = g
        .arcs()
        .filter(|&(u, v, _)| part.part_of(u) != part.part_of(v))
        .count();
    EdgeCut {
        fraction: if g.m() == 0 {
            0.0
        } else {
            cut_arcs as f64 / g.m() as f64
        },
        cut_arcs,
    }
}

/// Largest number of cut edges incident to a single part.
pub fn max_part_cut(_g: &Graph, part: &Partition) -> usize {
    part.part_cut().iter().copied().max().unwrap_or(0)
}

/// Fraction of consecutive sorted-neighbor pairs whose ids differ by at most
/// one. The denominator is `sum_v max(deg(v) - 1, 0)`; 0 when that is 0.
pub fn colocation_ratio(g: &Graph) -> f64 {
    let mut close = 0usize;
    let mut pairs = 0usize;
    for v in 0..g.n() {
        let nbrs = g.neighbors(v);
        pairs += nbrs.len().saturating_sub(1);
        close += nbrs.windows(2).filter(|w| w[1] - w[0] <= 1).count();
    }
    if pairs == 0 {
        0.0
    } else {
        close as f64 / pairs as f64
    }
}

/// Log-gap cost of `v`'s sorted adjacency:
/// `log2(1 + |u_1 - v|) + sum_i log2(1 + (u_{i+1} - u_i))`.
pub fn vertex_gap_cost(g: &Graph, v: usize) -> f64 {
    let nbrs = g.neighbors(v);
    let Some(&first) = nbrs.first() else {
        return 0.0;
    };
    let mut cost = libm::log2(1.0 + first.abs_diff(v) as f64);
    for w in nbrs.windows(2) {
        cost += libm::log2(1.0 + (w[1] - w[0]) as f64);
    }
    cost
}

/// Total log-gap cost scaled by `m * log2(n)` and clamped to `[0, 1]`.
pub fn gap_sum_ratio(g: &Graph) -> f64 {
    let n = g.n();
    if n < 2 || g.m() == 0 {
        return 0.0;
    }
    let cost: f64 = (0..n).map(|v| vertex_gap_cost(g, v)).sum();
    (cost / (g.m() as f64 * libm::log2(n as f64))).clamp(0.0, 1.0)
}

/// Total edges stored under an undirected `hops`-hop guarantee divided by the
/// undirected edge count. Part `k` stores every edge with an endpoint within
/// `hops - 1` steps of a vertex it owns. Directed inputs are symmetrized.
pub fn replication_ratio(g: &Graph, part: &Partition, hops: usize) -> Result<f64> {
    if hops == 0 {
        return Err(domain!("replication needs hops >= 1"));
    }
    let sym;
    let g = if g.is_directed() {
        sym = graph::symmetrize(g);
        &sym
    } else {
        g
    };
    let m_und = g.undirected_edge_count();
    if m_und == 0 {
        return Ok(0.0);
    }
    let mut stored_total = 0usize;
    let mut dist = vec![UNREACHED; g.n()];
    let mut reached = Vec::new();
    let mut queue = VecDeque::new();
    for members in part.members() {
        for &s in &members {
            dist[s] = 0;
            reached.push(s);
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            if dist[u] + 1 > hops - 1 {
                continue;
            }
            for &v in g.neighbors(u) {
                if dist[v] == UNREACHED {
                    dist[v] = dist[u] + 1;
                    reached.push(v);
                    queue.push_back(v);
                }
            }
        }
        // Each stored edge once: from its reached endpoint, or from the
        // smaller endpoint when both are reached.
        for &u in &reached {
            stored_total += g
                .neighbors(u)
                .iter()
                .filter(|&&v| dist[v] == UNREACHED || u <= v)
                .count();
        }
        for &u in &reached {
            dist[u] = UNREACHED;
        }
        reached.clear();
    }
    Ok(stored_total as f64 / m_und as f64)
}

/// Every quality metric for one (graph, partition, ordering) triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutReport {
    pub v_max: f64,
    pub e_max: f64,
    pub ec: f64,
    /// Largest per-part cut (undirected edges).
    pub ec_max: usize,
    /// `ec_max` divided by the average per-part cut; 0 without cut edges.
    pub ec_max_norm: f64,
    pub coloc: f64,
    pub gapsum: f64,
    pub replication: Option<f64>,
    pub has_empty_part: bool,
}

/// `g` is the partitioned graph; `ordered` is `g` after relabeling (pass `g`
/// itself to measure the given ids). `hops` enables the replication ratio.
pub fn layout_report(
    g: &Graph,
    part: &Partition,
    ordered: &Graph,
    hops: Option<usize>,
) -> Result<LayoutReport> {
    let b = balance(g, part);
    let cut = edge_cut(g, part);
    let ec_max = max_part_cut(g, part);
    let total: usize = part.part_cut().iter().sum();
    Ok(LayoutReport {
        v_max: b.v_max,
        e_max: b.e_max,
        ec: cut.fraction,
        ec_max,
        ec_max_norm: if total == 0 {
            0.0
        } else {
            ec_max as f64 * part.p() as f64 / total as f64
        },
        coloc: colocation_ratio(ordered),
        gapsum: gap_sum_ratio(ordered),
        replication: hops.map(|h| replication_ratio(g, part, h)).transpose()?,
        has_empty_part: b.has_empty_part,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    fn halves6() -> (Graph, Partition) {
        let g = generate::cycle(6);
        let p = Partition::new(&g, 2, vec![0, 0, 0, 1, 1, 1]).unwrap();
        (g, p)
    }

    #[test]
    fn balance_examples() {
        let (g, p) = halves6();
        assert_eq!(balance(&g, &p).v_max, 1.0);
        let skew = Partition::new(&g, 2, vec![0, 0, 0, 0, 1, 1]).unwrap();
        assert!((balance(&g, &skew).v_max - 4.0 / 3.0).abs() < 1e-15);
        let empty = Partition::new(&g, 3, vec![0, 0, 0, 1, 1, 1]).unwrap();
        assert!(balance(&g, &empty).has_empty_part);
    }

    #[test]
    fn cut_examples() {
        let (g, p) = halves6();
        let c = edge_cut(&g, &p);
        assert_eq!(c.cut_arcs, 4);
        assert!((c.fraction - 4.0 / 12.0).abs() < 1e-15);
        assert_eq!(max_part_cut(&g, &p), 2);
        let one = Partition::new(&g, 1, vec![0; 6]).unwrap();
        assert_eq!(edge_cut(&g, &one).cut_arcs, 0);
        assert_eq!(max_part_cut(&g, &one), 0);
    }

    #[test]
    fn k4_balanced_cut_is_always_eight_arcs() {
        // Brute force over all 2/2 splits of K4.
        let e: Vec<_> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
        let g = Graph::from_edges(4, &e, false).unwrap();
        for mask in 0u32..16 {
            if mask.count_ones() != 2 {
                continue;
            }
            let a = (0..4).map(|v| ((mask >> v) & 1) as usize).collect();
            let p = Partition::new(&g, 2, a).unwrap();
            assert_eq!(edge_cut(&g, &p).cut_arcs, 8);
        }
    }

    #[test]
    fn star_hub_alone() {
        let g = generate::star(8);
        let a = (0..9).map(|v| usize::from(v != 0)).collect();
        let p = Partition::new(&g, 2, a).unwrap();
        assert_eq!(p.part_cut(), &[8, 8]);
        assert_eq!(max_part_cut(&g, &p), 8);
    }

    #[test]
    fn colocation_examples() {
        assert_eq!(colocation_ratio(&generate::star(3)), 1.0);
        assert_eq!(colocation_ratio(&generate::path(5)), 0.0);
        assert_eq!(colocation_ratio(&generate::path(1)), 0.0);
    }

    #[test]
    fn gap_cost_of_star_center() {
        let g = generate::star(3);
        assert_eq!(vertex_gap_cost(&g, 0), 3.0);
        // leaves 1, 2, 3 each point back at 0: log2(2) + log2(3) + log2(4)
        let expected = (3.0 + 1.0 + 3f64.log2() + 2.0) / (6.0 * 2.0);
        assert!((gap_sum_ratio(&g) - expected).abs() < 1e-12);
        assert_eq!(gap_sum_ratio(&generate::path(1)), 0.0);
    }

    #[test]
    fn replication_examples() {
        let (g, p) = halves6();
        assert_eq!(replication_ratio(&g, &p, 2).unwrap(), 2.0);
        // hops = 1: each part stores 2 interior + 2 cut edges
        assert_eq!(replication_ratio(&g, &p, 1).unwrap(), 8.0 / 6.0);
        let one = Partition::new(&g, 1, vec![0; 6]).unwrap();
        for h in 1..5 {
            assert_eq!(replication_ratio(&g, &one, h).unwrap(), 1.0);
        }
        assert!(replication_ratio(&g, &p, 0).is_err());
    }

    #[test]
    fn report_row() {
        let (g, p) = halves6();
        let r = layout_report(&g, &p, &g, Some(2)).unwrap();
        assert_eq!(r.ec_max, 2);
        assert_eq!(r.ec_max_norm, 1.0);
        assert_eq!(r.replication, Some(2.0));
    }
}
