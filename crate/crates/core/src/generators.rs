//! Seeded graph families. Every generator returns a connected graph.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::{seed, Distance, VertexId};

/// Named family, as used by bench scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Random spanning tree plus uniform random edges up to `m` total.
    Gnm,
    /// Near-square grid.
    Grid,
    /// Random tree plus `m - (n - 1)` random chords.
    TreeChords,
    /// Preferential attachment with `max(1, m / n)` edges per new vertex.
    Preferential,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gnm => "gnm",
            Family::Grid => "grid",
            Family::TreeChords => "tree-chords",
            Family::Preferential => "preferential",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "gnm" | "random" => Some(Family::Gnm),
            "grid" => Some(Family::Grid),
            "tree-chords" | "tree+chords" => Some(Family::TreeChords),
            "preferential" | "pa" => Some(Family::Preferential),
            _ => None,
        }
    }

    /// Roughly `n` vertices and `m` edges (grids round `n` to a rectangle and
    /// ignore `m`).
    pub fn generate(self, n: usize, m: usize, weights: RangeInclusive<Distance>, seed: u64) -> Graph {
        match self {
            Family::Gnm => gnm(n, m, weights, seed),
            Family::Grid => {
                let rows = libm::floor(libm::sqrt(n as f64)).max(1.0) as usize;
                grid(rows, n.div_ceil(rows), weights, seed)
            }
            Family::TreeChords => tree_plus_chords(n, m.saturating_sub(n.saturating_sub(1)), weights, seed),
            Family::Preferential => preferential_attachment(n, (m / n.max(1)).max(1), weights, seed),
        }
    }
}

fn weight(rng: &mut ChaCha8Rng, weights: &RangeInclusive<Distance>) -> Distance {
    rng.random_range(weights.clone())
}

fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<(VertexId, VertexId)> {
    // random labels, each new vertex hangs off an earlier one
    let mut order: Vec<VertexId> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    (1..n)
        .map(|i| (order[rng.random_range(0..i)], order[i]))
        .collect()
}

fn finish(
    n: usize,
    pairs: BTreeSet<(VertexId, VertexId)>,
    rng: &mut ChaCha8Rng,
    weights: &RangeInclusive<Distance>,
) -> Graph {
    let edges: Vec<_> = pairs
        .into_iter()
        .map(|(u, v)| (u, v, weight(rng, weights)))
        .collect();
    Graph::from_edges(n, edges).expect("generated ids are in range")
}

fn key(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn add_random_edges(
    n: usize,
    target: usize,
    pairs: &mut BTreeSet<(VertexId, VertexId)>,
    rng: &mut ChaCha8Rng,
) {
    let max = n * n.saturating_sub(1) / 2;
    let target = target.min(max);
    while pairs.len() < target {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            pairs.insert(key(u, v));
        }
    }
}

/// Connected random graph with `max(m, n - 1)` edges (capped at complete).
pub fn gnm(n: usize, m: usize, weights: RangeInclusive<Distance>, seed: u64) -> Graph {
    let mut rng = seed::rng(seed, 0);
    let mut pairs: BTreeSet<_> = random_tree(n, &mut rng)
        .into_iter()
        .map(|(u, v)| key(u, v))
        .collect();
    add_random_edges(n, m, &mut pairs, &mut rng);
    finish(n, pairs, &mut rng, &weights)
}

pub fn grid(rows: usize, cols: usize, weights: RangeInclusive<Distance>, seed: u64) -> Graph {
    let mut rng = seed::rng(seed, 0);
    let mut pairs = BTreeSet::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                pairs.insert((v, v + 1));
            }
            if r + 1 < rows {
                pairs.insert((v, v + cols));
            }
        }
    }
    finish(rows * cols, pairs, &mut rng, &weights)
}

pub fn tree_plus_chords(n: usize, chords: usize, weights: RangeInclusive<Distance>, seed: u64) -> Graph {
    let mut rng = seed::rng(seed, 0);
    let mut pairs: BTreeSet<_> = random_tree(n, &mut rng)
        .into_iter()
        .map(|(u, v)| key(u, v))
        .collect();
    let target = pairs.len() + chords;
    add_random_edges(n, target, &mut pairs, &mut rng);
    finish(n, pairs, &mut rng, &weights)
}

/// Each new vertex attaches to `per_vertex` distinct earlier vertices chosen
/// proportionally to degree.
pub fn preferential_attachment(
    n: usize,
    per_vertex: usize,
    weights: RangeInclusive<Distance>,
    seed: u64,
) -> Graph {
    let mut rng = seed::rng(seed, 0);
    let mut pairs = BTreeSet::new();
    let mut endpoints: Vec<VertexId> = Vec::new();
    for v in 1..n {
        let want = per_vertex.min(v);
        let mut chosen = BTreeSet::new();
        while chosen.len() < want {
            let u = if endpoints.is_empty() || rng.random_bool(0.2) {
                rng.random_range(0..v)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            chosen.insert(u);
        }
        for u in chosen {
            pairs.insert(key(u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    finish(n, pairs, &mut rng, &weights)
}
