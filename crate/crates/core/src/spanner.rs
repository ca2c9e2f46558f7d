//! Randomized cluster spanner (Baswana and Sen).
//!
//! `k' - 1` clustering rounds sample the current clusters with probability
//! `n^(-1/k')`. A vertex of an unsampled cluster either joins the sampled
//! neighbor cluster reached by its lightest edge, keeping the lightest edge
//! to every cluster that is strictly closer, or, with no sampled neighbor,
//! keeps its lightest edge to every adjacent cluster and leaves the
//! clustering. A final round joins every vertex to all clusters it still
//! touches. Lightest means smallest `(weight, neighbor id)`.
//!
//! Decisions within a round are made against the round's starting state
//! and edge removals are applied afterwards.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::graph::Graph;
use crate::seed;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpannerError {
    #[error("spanner parameter k' must be at least 1, got {0}")]
    InvalidParameter(usize),
}

/// Edge subset `E_H` of a base graph with stretch at most `2k' - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannerSubgraph {
    graph: Graph,
    k_prime: usize,
    base_edges: usize,
}

impl SpannerSubgraph {
    /// The spanner as a graph on the base vertex set.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn k_prime(&self) -> usize {
        self.k_prime
    }

    /// Certified multiplicative stretch, `2k' - 1`.
    pub fn stretch_bound(&self) -> u64 {
        2 * self.k_prime as u64 - 1
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn base_edge_count(&self) -> usize {
        self.base_edges
    }
}

#[derive(Clone, Copy)]
struct Arc {
    to: u32,
    weight: u64,
    id: u32,
}

/// Lightest alive edge from `v` into each adjacent cluster, as
/// `(cluster, weight, neighbor, edge id)` sorted by cluster.
fn lightest_per_cluster(
    arcs: &[Arc],
    alive: &[bool],
    cluster: &[u32],
    out: &mut Vec<(u32, u64, u32, u32)>,
) {
    out.clear();
    for a in arcs.iter().filter(|a| alive[a.id as usize]) {
        let c = cluster[a.to as usize];
        debug_assert_ne!(c, NONE, "alive edge into an unclustered vertex");
        out.push((c, a.weight, a.to, a.id));
    }
    out.sort_unstable();
    out.dedup_by_key(|e| e.0);
}

pub fn build_spanner(g: &Graph, k_prime: usize, seed: u64) -> Result<SpannerSubgraph, SpannerError> {
    if k_prime < 1 {
        return Err(SpannerError::InvalidParameter(k_prime));
    }
    let n = g.vertex_count();
    let edges: Vec<_> = g.edges().collect();
    let mut adjacency: Vec<Vec<Arc>> = vec![Vec::new(); n];
    for (id, &(u, v, w)) in edges.iter().enumerate() {
        let id = id as u32;
        adjacency[u].push(Arc { to: v as u32, weight: w, id });
        adjacency[v].push(Arc { to: u as u32, weight: w, id });
    }
    let mut alive = vec![true; edges.len()];
    let mut chosen = vec![false; edges.len()];
    let mut cluster: Vec<u32> = (0..n as u32).collect();
    let p = libm::pow(n as f64, -1.0 / k_prime as f64);
    let mut best = Vec::new();

    for round in 1..k_prime {
        let mut rng = seed::rng(seed, round as u64);
        let mut is_center = vec![false; n];
        for &c in &cluster {
            if c != NONE {
                is_center[c as usize] = true;
            }
        }
        let mut sampled = vec![false; n];
        for c in (0..n).filter(|&c| is_center[c]) {
            sampled[c] = rng.random::<f64>() < p;
        }

        let mut next = cluster.clone();
        let mut removed: Vec<u32> = Vec::new();
        let mut dropped: Vec<u32> = Vec::new();
        for v in 0..n {
            let c = cluster[v];
            if c == NONE || sampled[c as usize] {
                continue;
            }
            lightest_per_cluster(&adjacency[v], &alive, &cluster, &mut best);
            let join = best
                .iter()
                .filter(|e| sampled[e.0 as usize])
                .min_by_key(|e| (e.1, e.2))
                .copied();
            dropped.clear();
            match join {
                None => {
                    for e in &best {
                        chosen[e.3 as usize] = true;
                        dropped.push(e.0);
                    }
                    next[v] = NONE;
                }
                Some((target, weight, _, id)) => {
                    chosen[id as usize] = true;
                    next[v] = target;
                    dropped.push(target);
                    for e in best.iter().filter(|e| e.1 < weight) {
                        chosen[e.3 as usize] = true;
                        dropped.push(e.0);
                    }
                }
            }
            dropped.sort_unstable();
            for a in adjacency[v].iter().filter(|a| alive[a.id as usize]) {
                if dropped.binary_search(&cluster[a.to as usize]).is_ok() {
                    removed.push(a.id);
                }
            }
        }
        for id in removed {
            alive[id as usize] = false;
        }
        cluster = next;
        for (id, &(u, v, _)) in edges.iter().enumerate() {
            if alive[id] && cluster[u] != NONE && cluster[u] == cluster[v] {
                alive[id] = false;
            }
        }
    }

    for incident in &adjacency {
        lightest_per_cluster(incident, &alive, &cluster, &mut best);
        for e in &best {
            chosen[e.3 as usize] = true;
        }
    }

    let kept = edges
        .iter()
        .zip(&chosen)
        .filter(|(_, &c)| c)
        .map(|(&e, _)| e);
    let graph = Graph::from_edges(n, kept).expect("edge subset of a valid graph");
    Ok(SpannerSubgraph {
        graph,
        k_prime,
        base_edges: edges.len(),
    })
}

/// Expected-size reference `k' * n^(1 + 1/k')`.
pub fn size_reference(n: usize, k_prime: usize) -> f64 {
    k_prime as f64 * libm::pow(n as f64, 1.0 + 1.0 / k_prime as f64)
}
