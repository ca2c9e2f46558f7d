//! Exact shortest-path primitives.
//!
//! Dijkstra runs on a binary heap with lazy deletion (stale entries are
//! skipped on pop). Multi-source runs order labels by `(distance, origin)`,
//! so every vertex is claimed by the nearest source with the smallest id.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use rand::Rng;

use crate::graph::Graph;
use crate::{seed, Distance, Rational, VertexId, INFINITY};

const NONE: u32 = u32::MAX;

/// Rounds drawn by [`sample_vertices`] before it settles for the best round seen.
pub const MAX_SAMPLING_ROUNDS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SsspError {
    #[error("sample set is empty")]
    EmptySampleSet,
    #[error("sample vertex {0} is out of range")]
    SampleOutOfRange(VertexId),
    #[error("sampling exponent {0} is outside (0, 1]")]
    InvalidExponent(Rational),
    #[error("graph has no vertices")]
    EmptyGraph,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Vertex(VertexId),
    /// Virtual source joined by zero-weight edges to every member.
    Set(Vec<VertexId>),
}

/// Distances, shortest-path parents and claiming source of one Dijkstra run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceArray {
    pub source: Source,
    dist: Vec<Distance>,
    parent: Vec<u32>,
    origin: Vec<u32>,
}

impl DistanceArray {
    pub fn distances(&self) -> &[Distance] {
        &self.dist
    }

    pub fn into_distances(self) -> Vec<Distance> {
        self.dist
    }

    pub fn distance(&self, v: VertexId) -> Distance {
        self.dist[v]
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        (self.parent[v] != NONE).then_some(self.parent[v] as VertexId)
    }

    /// Source that claimed `v`; `None` when `v` is unreachable.
    pub fn origin(&self, v: VertexId) -> Option<VertexId> {
        (self.origin[v] != NONE).then_some(self.origin[v] as VertexId)
    }
}

fn run(g: &Graph, sources: &[VertexId]) -> (Vec<Distance>, Vec<u32>, Vec<u32>) {
    let n = g.vertex_count();
    let mut dist = vec![INFINITY; n];
    let mut parent = vec![NONE; n];
    let mut origin = vec![NONE; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if origin[s] == NONE {
            dist[s] = 0;
            origin[s] = s as u32;
            heap.push(Reverse((0, s as u32, s as u32)));
        }
    }
    while let Some(Reverse((d, o, u))) = heap.pop() {
        let u = u as usize;
        if (d, o) != (dist[u], origin[u]) {
            continue;
        }
        for (v, w) in g.neighbors(u) {
            let nd = d + w;
            if (nd, o) < (dist[v], origin[v]) {
                dist[v] = nd;
                origin[v] = o;
                parent[v] = u as u32;
                heap.push(Reverse((nd, o, v as u32)));
            }
        }
    }
    (dist, parent, origin)
}

/// Single-source exact distances. Unreachable vertices get [`INFINITY`].
pub fn dijkstra(g: &Graph, source: VertexId) -> DistanceArray {
    let (dist, parent, origin) = run(g, &[source]);
    DistanceArray {
        source: Source::Vertex(source),
        dist,
        parent,
        origin,
    }
}

/// Distance from the nearest member of `sources`, ties to the smallest id.
pub fn multi_source_dijkstra(g: &Graph, sources: &[VertexId]) -> DistanceArray {
    let (dist, parent, origin) = run(g, sources);
    DistanceArray {
        source: Source::Set(sources.to_vec()),
        dist,
        parent,
        origin,
    }
}

/// Nearest sampled vertex `p_S(u)` and its distance for every `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleAssignment {
    samples: Vec<VertexId>,
    nearest: Vec<u32>,
    dist: Vec<Distance>,
    /// Exponent `i/k` and probability `n^(-i/k)`, when drawn by [`sample_vertices`].
    pub exponent: Option<Rational>,
    pub probability: Option<f64>,
}

impl SampleAssignment {
    /// Sorted sample set `S`.
    pub fn samples(&self) -> &[VertexId] {
        &self.samples
    }

    pub fn nearest(&self, u: VertexId) -> VertexId {
        self.nearest[u] as VertexId
    }

    pub fn distance(&self, u: VertexId) -> Distance {
        self.dist[u]
    }

    pub fn distances(&self) -> &[Distance] {
        &self.dist
    }

    pub fn nearest_all(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.nearest.iter().map(|&p| p as VertexId)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.samples.binary_search(&v).is_ok()
    }

    /// Reassembles an assignment from stored parts, e.g. after decoding.
    /// Checks shape only; distances are trusted.
    pub fn from_parts(
        samples: Vec<VertexId>,
        nearest: Vec<VertexId>,
        dist: Vec<Distance>,
    ) -> Option<Self> {
        let sorted = samples.windows(2).all(|w| w[0] < w[1]);
        let shaped = nearest.len() == dist.len()
            && nearest.iter().all(|p| samples.binary_search(p).is_ok());
        (sorted && shaped && !samples.is_empty()).then(|| SampleAssignment {
            samples,
            nearest: nearest.into_iter().map(|p| p as u32).collect(),
            dist,
            exponent: None,
            probability: None,
        })
    }
}

pub fn nearest_sample(g: &Graph, samples: &[VertexId]) -> Result<SampleAssignment, SsspError> {
    if samples.is_empty() {
        return Err(SsspError::EmptySampleSet);
    }
    let n = g.vertex_count();
    if let Some(&bad) = samples.iter().find(|&&s| s >= n) {
        return Err(SsspError::SampleOutOfRange(bad));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let (dist, _, origin) = run(g, &sorted);
    Ok(SampleAssignment {
        samples: sorted,
        nearest: origin,
        dist,
        exponent: None,
        probability: None,
    })
}

/// The sparsified graph `G_S`: at each vertex `v`, only edges lighter than
/// `d(v, p_S(v))` survive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsifiedGraph(Graph);

impl SparsifiedGraph {
    pub fn graph(&self) -> &Graph {
        &self.0
    }

    pub fn into_graph(self) -> Graph {
        self.0
    }

    pub fn edge_count(&self) -> usize {
        self.0.edge_count()
    }
}

pub fn build_sparsified(g: &Graph, sa: &SampleAssignment) -> SparsifiedGraph {
    let kept = g
        .edges()
        .filter(|&(u, v, w)| w < sa.dist[u] || w < sa.dist[v]);
    SparsifiedGraph(
        Graph::from_edges(g.vertex_count(), kept).expect("edge subset of a valid graph"),
    )
}

/// One accepted (or fallback) round of [`sample_vertices`].
#[derive(Debug, Clone, PartialEq)]
pub struct Sampling {
    pub assignment: SampleAssignment,
    pub sparsified: SparsifiedGraph,
    /// Rounds drawn, including the accepted one.
    pub rounds: usize,
    /// False when the round cap was hit and the best round was taken instead.
    pub accepted: bool,
}

impl Sampling {
    pub fn samples(&self) -> &[VertexId] {
        self.assignment.samples()
    }
}

/// `n^(-exponent)`.
pub fn sampling_probability(n: usize, exponent: Rational) -> f64 {
    let e = *exponent.numer() as f64 / *exponent.denom() as f64;
    libm::pow(n as f64, -e).min(1.0)
}

/// Draws `S` with per-vertex probability `p = n^(-exponent)`, redrawing until
/// `pn/2 <= |S| <= 2pn`, `S` is non-empty and `|E_S| <= 4n/p`.
pub fn sample_vertices(g: &Graph, exponent: Rational, seed: u64) -> Result<Sampling, SsspError> {
    let zero = Rational::from_integer(0);
    if exponent <= zero || exponent > Rational::from_integer(1) {
        return Err(SsspError::InvalidExponent(exponent));
    }
    let n = g.vertex_count();
    if n == 0 {
        return Err(SsspError::EmptyGraph);
    }
    let p = sampling_probability(n, exponent);
    let expected = p * n as f64;
    let edge_cap = 4.0 * n as f64 / p;

    // (in window, |E_S|, round)
    let mut best: Option<(bool, usize, Sampling)> = None;
    for round in 0..MAX_SAMPLING_ROUNDS {
        let mut rng = seed::rng(seed, round as u64);
        let samples: Vec<VertexId> = (0..n).filter(|_| rng.random::<f64>() < p).collect();
        if samples.is_empty() {
            continue;
        }
        let size = samples.len() as f64;
        let in_window = expected / 2.0 <= size && size <= 2.0 * expected;
        let mut assignment = nearest_sample(g, &samples)?;
        assignment.exponent = Some(exponent);
        assignment.probability = Some(p);
        let sparsified = build_sparsified(g, &assignment);
        let edges = sparsified.edge_count();
        let sampling = Sampling {
            assignment,
            sparsified,
            rounds: round + 1,
            accepted: true,
        };
        if in_window && (edges as f64) <= edge_cap {
            return Ok(sampling);
        }
        let better = match &best {
            None => true,
            Some((w, e, _)) => (in_window, core::cmp::Reverse(edges)) > (*w, core::cmp::Reverse(*e)),
        };
        if better {
            best = Some((in_window, edges, sampling));
        }
    }
    let mut fallback = match best {
        Some((_, _, s)) => s,
        None => {
            let mut assignment = nearest_sample(g, &[0])?;
            assignment.exponent = Some(exponent);
            assignment.probability = Some(p);
            let sparsified = build_sparsified(g, &assignment);
            Sampling {
                assignment,
                sparsified,
                rounds: 0,
                accepted: false,
            }
        }
    };
    fallback.rounds = MAX_SAMPLING_ROUNDS;
    fallback.accepted = false;
    Ok(fallback)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn p3() -> Graph {
        Graph::from_edges(3, [(0, 1, 1), (1, 2, 1)]).unwrap()
    }

    /// Independent reference: relax every edge n times.
    fn bellman_ford(g: &Graph, s: VertexId) -> Vec<Distance> {
        let n = g.vertex_count();
        let mut d = vec![INFINITY; n];
        d[s] = 0;
        for _ in 0..n {
            for (u, v, w) in g.edges() {
                if d[u] != INFINITY && d[u] + w < d[v] {
                    d[v] = d[u] + w;
                }
                if d[v] != INFINITY && d[v] + w < d[u] {
                    d[u] = d[v] + w;
                }
            }
        }
        d
    }

    #[test]
    fn dijkstra_small_cases() {
        assert_eq!(dijkstra(&p3(), 0).distances(), &[0, 1, 2]);
        assert_eq!(dijkstra(&Graph::empty(1), 0).distances(), &[0]);
    }

    #[test]
    fn dijkstra_matches_bellman_ford_and_fixpoint() {
        for s in 0..10u64 {
            let g = generators::gnm(8, 14, 1..=20, s);
            for src in 0..8 {
                let da = dijkstra(&g, src);
                assert_eq!(da.distances(), &bellman_ford(&g, src)[..]);
                for (u, v, w) in g.edges() {
                    assert!(da.distance(v) <= da.distance(u) + w);
                    assert!(da.distance(u) <= da.distance(v) + w);
                }
                for v in 0..8 {
                    // walking parents sums back to dist
                    let (mut x, mut total) = (v, 0);
                    while let Some(p) = da.parent(x) {
                        total += g.edge_weight(p, x).unwrap();
                        x = p;
                    }
                    assert_eq!(x, src);
                    assert_eq!(total, da.distance(v));
                }
            }
        }
    }

    #[test]
    fn nearest_sample_examples() {
        let sa = nearest_sample(&p3(), &[2]).unwrap();
        assert_eq!(sa.nearest_all().collect::<Vec<_>>(), vec![2, 2, 2]);
        assert_eq!(sa.distances(), &[2, 1, 0]);

        let sa = nearest_sample(&p3(), &[0, 1, 2]).unwrap();
        assert_eq!(sa.nearest_all().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(sa.distances(), &[0, 0, 0]);

        assert_eq!(nearest_sample(&p3(), &[]), Err(SsspError::EmptySampleSet));
    }

    #[test]
    fn nearest_sample_ties_go_to_smallest_id() {
        // 1 is equidistant from 0 and 2
        let sa = nearest_sample(&p3(), &[2, 0]).unwrap();
        assert_eq!(sa.nearest(1), 0);
        assert_eq!(sa.samples(), &[0, 2]);
    }

    #[test]
    fn nearest_sample_matches_brute_force() {
        for s in 0..8u64 {
            let g = generators::gnm(16, 30, 1..=50, s);
            let set: Vec<_> = (0..16).filter(|v| (v * 7 + s as usize) % 5 == 0).collect();
            let sa = nearest_sample(&g, &set).unwrap();
            for u in 0..16 {
                let row = bellman_ford(&g, u);
                let best = set.iter().map(|&x| (row[x], x)).min().unwrap();
                assert_eq!((sa.distance(u), sa.nearest(u)), best);
                assert_eq!(sa.distance(u) == 0, set.contains(&u));
            }
        }
    }

    #[test]
    fn sparsified_examples() {
        let g = p3();
        let sa = nearest_sample(&g, &[2]).unwrap();
        let gs = build_sparsified(&g, &sa);
        assert_eq!(gs.graph().edges().collect::<Vec<_>>(), vec![(0, 1, 1)]);

        let sa = nearest_sample(&g, &[0, 1, 2]).unwrap();
        assert_eq!(build_sparsified(&g, &sa).edge_count(), 0);
    }

    #[test]
    fn single_sample_sparsification_rule() {
        for s in 0..10u64 {
            let g = generators::gnm(20, 45, 1..=30, s);
            let star = (s as usize * 3) % 20;
            let sa = nearest_sample(&g, &[star]).unwrap();
            let gs = build_sparsified(&g, &sa);
            let d = dijkstra(&g, star);
            for (u, v, w) in g.edges() {
                let expected = w < d.distance(u) || w < d.distance(v);
                assert_eq!(gs.graph().edge_weight(u, v).is_some(), expected);
            }
            // no edge is kept on behalf of the sample itself
            for (x, w) in gs.graph().neighbors(star) {
                assert!(w < d.distance(x));
            }
        }
    }

    #[test]
    fn sampling_edge_cases() {
        let one = Graph::empty(1);
        let s = sample_vertices(&one, Rational::from_integer(1), 3).unwrap();
        assert_eq!(s.samples(), &[0]);
        assert!(s.accepted);

        let g = p3();
        assert!(matches!(
            sample_vertices(&g, Rational::from_integer(0), 1),
            Err(SsspError::InvalidExponent(_))
        ));
        assert!(sample_vertices(&g, Rational::new(3, 2), 1).is_err());
    }

    #[test]
    fn sampling_is_seed_deterministic_and_in_window() {
        let g = generators::gnm(256, 1024, 1..=100, 5);
        let a = sample_vertices(&g, Rational::new(1, 2), 77).unwrap();
        let b = sample_vertices(&g, Rational::new(1, 2), 77).unwrap();
        assert_eq!(a, b);
        assert!(a.accepted);
        let size = a.samples().len();
        assert!((8..=32).contains(&size), "{size}");
        assert!(a.sparsified.edge_count() <= 4 * 256 * 16);
    }
}
