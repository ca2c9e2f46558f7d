//! Immutable weighted undirected graphs in compressed adjacency form.
//!
//! Every undirected edge `{u, v}` appears in both adjacency lists with the
//! same weight. Lists are sorted by neighbor id, which makes symmetry checks
//! and lookups a binary search.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Distance, VertexId};

/// Largest admissible `n * max_weight`. Any sum of four simple-path lengths
/// stays below `u64::MAX`, which covers every estimate an oracle forms.
pub const MAX_PATH_LENGTH: u128 = (u64::MAX / 8) as u128;

/// Largest vertex count; ids are stored as `u32` and `u32::MAX` is reserved.
pub const MAX_VERTICES: usize = (u32::MAX - 1) as usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex count {0} exceeds the supported maximum")]
    TooManyVertices(usize),
    #[error("n * max_weight = {n} * {max_weight} overflows the distance accumulator")]
    WeightOverflow { n: usize, max_weight: Distance },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<Distance>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Self-loops are dropped and parallel
    /// edges collapse to their minimum weight.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId, Distance)>,
    {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut arcs: Vec<(u32, u32, Distance)> = Vec::new();
        let mut max_weight = 0;
        for (u, v, w) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                continue;
            }
            max_weight = max_weight.max(w);
            arcs.push((u as u32, v as u32, w));
            arcs.push((v as u32, u as u32, w));
        }
        if (n as u128) * (max_weight as u128) > MAX_PATH_LENGTH {
            return Err(GraphError::WeightOverflow { n, max_weight });
        }
        arcs.sort_unstable();
        arcs.dedup_by(|next, kept| next.0 == kept.0 && next.1 == kept.1);

        let mut offsets = vec![0usize; n + 1];
        for &(u, _, _) in &arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = arcs.iter().map(|a| a.1).collect();
        let weights = arcs.iter().map(|a| a.2).collect();
        Ok(Graph {
            offsets,
            targets,
            weights,
        })
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// `(neighbor, weight)` pairs of `v`, sorted by neighbor.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, Distance)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()]
            .iter()
            .zip(&self.weights[range])
            .map(|(&t, &w)| (t as VertexId, w))
    }

    /// Weight of edge `{u, v}`, if present.
    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<Distance> {
        let range = self.offsets[u]..self.offsets[u + 1];
        let slice = &self.targets[range.clone()];
        slice
            .binary_search(&(v as u32))
            .ok()
            .map(|i| self.weights[range.start + i])
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`, in
    /// lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, Distance)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    pub fn max_weight(&self) -> Distance {
        self.weights.iter().copied().max().unwrap_or(0)
    }

    /// Component label per vertex; labels are dense and ordered by the
    /// smallest vertex in each component.
    pub fn components(&self) -> (usize, Vec<u32>) {
        let n = self.vertex_count();
        let mut label = vec![u32::MAX; n];
        let mut count = 0u32;
        let mut stack = Vec::new();
        for root in 0..n {
            if label[root] != u32::MAX {
                continue;
            }
            label[root] = count;
            stack.push(root);
            while let Some(u) = stack.pop() {
                for (v, _) in self.neighbors(u) {
                    if label[v] == u32::MAX {
                        label[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (count as usize, label)
    }
}

/// Outcome of [`validate_graph`]. Oracle builders require [`is_ok`](Self::is_ok).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub vertices: usize,
    pub edges: usize,
    pub components: usize,
    pub connected: bool,
    pub symmetric: bool,
    pub positive: bool,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.connected && self.symmetric && self.positive
    }
}

pub fn validate_graph(g: &Graph) -> ValidationReport {
    let n = g.vertex_count();
    let (components, _) = g.components();
    let symmetric = (0..n).all(|u| {
        g.neighbors(u)
            .all(|(v, w)| v != u && g.edge_weight(v, u) == Some(w))
    });
    ValidationReport {
        vertices: n,
        edges: g.edge_count(),
        components,
        connected: components <= 1,
        symmetric,
        positive: g.weights.iter().all(|&w| w > 0),
    }
}

/// Result of [`contract_zero_edges`]. `merge_map[v]` is the vertex of
/// `graph` that original vertex `v` was merged into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub graph: Graph,
    pub merge_map: Vec<VertexId>,
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, so class ids follow the smallest member
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Merges every set of vertices joined by zero-weight paths. Surviving
/// classes are numbered in order of their smallest original vertex.
/// Distances between classes are preserved exactly.
pub fn contract_zero_edges(g: &Graph) -> Contraction {
    let n = g.vertex_count();
    let mut sets = DisjointSets::new(n);
    for (u, v, w) in g.edges() {
        if w == 0 {
            sets.union(u, v);
        }
    }
    let mut class_of_root = vec![usize::MAX; n];
    let mut merge_map = Vec::with_capacity(n);
    let mut classes = 0;
    for v in 0..n {
        let root = sets.find(v);
        if class_of_root[root] == usize::MAX {
            class_of_root[root] = classes;
            classes += 1;
        }
        merge_map.push(class_of_root[root]);
    }
    let graph = Graph::from_edges(
        classes,
        g.edges()
            .filter(|&(_, _, w)| w > 0)
            .map(|(u, v, w)| (merge_map[u], merge_map[v], w)),
    )
    .expect("contraction cannot increase n * max_weight");
    Contraction { graph, merge_map }
}

/// Largest connected component, with ties going to the component holding
/// the smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub graph: Graph,
    /// `map[v]` is the new id of original vertex `v`, if it was kept.
    pub map: Vec<Option<VertexId>>,
}

pub fn largest_component(g: &Graph) -> Component {
    let n = g.vertex_count();
    let (count, label) = g.components();
    let mut sizes = vec![0usize; count];
    for &l in &label {
        sizes[l as usize] += 1;
    }
    let best = (0..count).max_by_key(|&c| (sizes[c], usize::MAX - c)).unwrap_or(0) as u32;
    let mut map = vec![None; n];
    let mut next = 0;
    for v in 0..n {
        if label[v] == best {
            map[v] = Some(next);
            next += 1;
        }
    }
    let graph = Graph::from_edges(
        next,
        g.edges()
            .filter_map(|(u, v, w)| Some((map[u]?, map[v]?, w))),
    )
    .expect("a subgraph inherits the weight cap");
    Component { graph, map }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3(w01: Distance, w12: Distance) -> Graph {
        Graph::from_edges(3, [(0, 1, w01), (1, 2, w12)]).unwrap()
    }

    #[test]
    fn parallel_edges_collapse_to_min_and_loops_drop() {
        let g = Graph::from_edges(2, [(0, 1, 5), (1, 0, 3), (0, 0, 1), (0, 1, 9)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(0, 1), Some(3));
        assert_eq!(g.edge_weight(1, 0), Some(3));
        assert_eq!(g.degree(0), 1);
    }

    #[test]
    fn rejects_out_of_range_and_overflow() {
        assert_eq!(
            Graph::from_edges(2, [(0, 2, 1)]),
            Err(GraphError::VertexOutOfRange { vertex: 2, n: 2 })
        );
        assert!(matches!(
            Graph::from_edges(4, [(0, 1, u64::MAX / 16)]),
            Err(GraphError::WeightOverflow { .. })
        ));
    }

    #[test]
    fn validation_flags() {
        let r = validate_graph(&p3(1, 1));
        assert!(r.connected && r.positive && r.symmetric && r.is_ok());

        let two = Graph::from_edges(4, [(0, 1, 1), (2, 3, 1)]).unwrap();
        let r = validate_graph(&two);
        assert!(!r.connected);
        assert_eq!(r.components, 2);

        let r = validate_graph(&p3(0, 1));
        assert!(!r.positive);
    }

    #[test]
    fn contraction_examples() {
        let c = contract_zero_edges(&p3(0, 1));
        assert_eq!(c.merge_map, vec![0, 0, 1]);
        assert_eq!(c.graph.vertex_count(), 2);
        assert_eq!(c.graph.edges().collect::<Vec<_>>(), vec![(0, 1, 1)]);

        let g = p3(2, 3);
        let c = contract_zero_edges(&g);
        assert_eq!(c.graph, g);
        assert_eq!(c.merge_map, vec![0, 1, 2]);

        let tri = Graph::from_edges(3, [(0, 1, 0), (1, 2, 0), (0, 2, 5)]).unwrap();
        let c = contract_zero_edges(&tri);
        assert_eq!(c.graph.vertex_count(), 1);
        assert_eq!(c.graph.edge_count(), 0);
        assert_eq!(c.merge_map, vec![0, 0, 0]);
    }

    #[test]
    fn contraction_is_idempotent() {
        let g = Graph::from_edges(
            6,
            [(0, 1, 0), (1, 2, 4), (2, 3, 0), (3, 4, 2), (4, 5, 0), (5, 0, 7)],
        )
        .unwrap();
        let once = contract_zero_edges(&g);
        let twice = contract_zero_edges(&once.graph);
        assert_eq!(twice.graph, once.graph);
        assert_eq!(twice.merge_map, (0..once.graph.vertex_count()).collect::<Vec<_>>());
    }

    #[test]
    fn largest_component_keeps_biggest() {
        let g = Graph::from_edges(5, [(0, 1, 1), (2, 3, 1), (3, 4, 2)]).unwrap();
        let c = largest_component(&g);
        assert_eq!(c.map, vec![None, None, Some(0), Some(1), Some(2)]);
        assert_eq!(c.graph.edges().collect::<Vec<_>>(), vec![(0, 1, 1), (1, 2, 2)]);
    }
}
