//! Ground truth and audits.
//!
//! [`exact_oracle`] is the all-pairs Dijkstra table; [`bellman_ford`] is an
//! independent algorithm used to cross-check it. Stretch audits compare any
//! [`DistanceOracle`] against ground truth with integer arithmetic, so a
//! bound is either met exactly or reported as a violation.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::composite::{CompositeOracle, FarTable, StorageEntries};
use crate::graph::Graph;
use crate::sssp::{dijkstra, SampleAssignment};
use crate::tz::{TzError, TzOracle};
use crate::{seed, Distance, VertexId, INFINITY};

/// Largest graph for which [`exact_oracle`] materializes a table.
pub const EXACT_ORACLE_MAX_N: usize = 4096;
/// Largest graph for which all-pairs audits are allowed.
pub const ALL_PAIRS_MAX_N: usize = 1024;
/// Constant `C` in every size budget.
pub const SIZE_CONSTANT: f64 = 10.0;
/// Violations kept verbatim in a report; the rest are only counted.
pub const MAX_RECORDED_VIOLATIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AuditError {
    #[error("exact oracle limited to n <= {EXACT_ORACLE_MAX_N}, got {0}")]
    TooLargeForExact(usize),
    #[error("all-pairs audit limited to n <= {ALL_PAIRS_MAX_N}, got {0}")]
    TooLargeForAllPairs(usize),
    #[error("oracle and graph disagree on vertex count ({oracle} vs {graph})")]
    SizeMismatch { oracle: usize, graph: usize },
    #[error(transparent)]
    Query(#[from] TzError),
}

/// Exact all-pairs distances, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactOracle {
    n: usize,
    table: Vec<Distance>,
}

impl ExactOracle {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn distance(&self, u: VertexId, v: VertexId) -> Distance {
        self.table[u * self.n + v]
    }

    pub fn row(&self, u: VertexId) -> &[Distance] {
        &self.table[u * self.n..(u + 1) * self.n]
    }
}

pub fn exact_oracle(g: &Graph) -> Result<ExactOracle, AuditError> {
    let n = g.vertex_count();
    if n > EXACT_ORACLE_MAX_N {
        return Err(AuditError::TooLargeForExact(n));
    }
    let mut table = Vec::with_capacity(n * n);
    for u in 0..n {
        table.extend_from_slice(dijkstra(g, u).distances());
    }
    Ok(ExactOracle { n, table })
}

/// Single-source distances by repeated edge relaxation.
pub fn bellman_ford(g: &Graph, source: VertexId) -> Vec<Distance> {
    let n = g.vertex_count();
    let mut dist = vec![INFINITY; n];
    dist[source] = 0;
    for _ in 0..n {
        let mut changed = false;
        for (u, v, w) in g.edges() {
            if dist[u] != INFINITY && dist[u] + w < dist[v] {
                dist[v] = dist[u] + w;
                changed = true;
            }
            if dist[v] != INFINITY && dist[v] + w < dist[u] {
                dist[u] = dist[v] + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// First `(u, v)` where the exact table and Bellman-Ford disagree.
pub fn cross_check_exact(g: &Graph, exact: &ExactOracle) -> Option<(VertexId, VertexId)> {
    (0..g.vertex_count()).find_map(|u| {
        let bf = bellman_ford(g, u);
        bf.iter()
            .zip(exact.row(u))
            .position(|(a, b)| a != b)
            .map(|v| (u, v))
    })
}

/// `B_S(u) = { v : d(u, v) < d(u, p_S(u)) }`, via a fresh Dijkstra from `u`.
pub fn ball_b_s(g: &Graph, sa: &SampleAssignment, u: VertexId) -> Vec<VertexId> {
    let radius = sa.distance(u);
    let d = dijkstra(g, u);
    (0..g.vertex_count()).filter(|&v| d.distance(v) < radius).collect()
}

/// Anything that answers distance queries with a certified stretch.
pub trait DistanceOracle {
    fn vertex_count(&self) -> usize;
    fn estimate(&self, u: VertexId, v: VertexId) -> Result<Distance, TzError>;
    fn stretch_bound(&self) -> u64;
    fn label(&self) -> &'static str;
}

impl DistanceOracle for CompositeOracle {
    fn vertex_count(&self) -> usize {
        CompositeOracle::vertex_count(self)
    }
    fn estimate(&self, u: VertexId, v: VertexId) -> Result<Distance, TzError> {
        self.query(u, v)
    }
    fn stretch_bound(&self) -> u64 {
        CompositeOracle::stretch_bound(self)
    }
    fn label(&self) -> &'static str {
        self.kind().name()
    }
}

impl DistanceOracle for TzOracle {
    fn vertex_count(&self) -> usize {
        TzOracle::vertex_count(self)
    }
    fn estimate(&self, u: VertexId, v: VertexId) -> Result<Distance, TzError> {
        self.query(u, v)
    }
    fn stretch_bound(&self) -> u64 {
        TzOracle::stretch_bound(self)
    }
    fn label(&self) -> &'static str {
        "tz"
    }
}

impl DistanceOracle for ExactOracle {
    fn vertex_count(&self) -> usize {
        self.n
    }
    fn estimate(&self, u: VertexId, v: VertexId) -> Result<Distance, TzError> {
        Ok(self.distance(u, v))
    }
    fn stretch_bound(&self) -> u64 {
        1
    }
    fn label(&self) -> &'static str {
        "exact"
    }
}

/// Exact distances of some subgraph (e.g. a spanner) audited against the
/// base graph with a given bound.
pub struct BoundedExact<'a> {
    pub distances: &'a ExactOracle,
    pub bound: u64,
}

impl DistanceOracle for BoundedExact<'_> {
    fn vertex_count(&self) -> usize {
        self.distances.n
    }
    fn estimate(&self, u: VertexId, v: VertexId) -> Result<Distance, TzError> {
        Ok(self.distances.distance(u, v))
    }
    fn stretch_bound(&self) -> u64 {
        self.bound
    }
    fn label(&self) -> &'static str {
        "subgraph"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSample {
    /// Every unordered pair `u < v`; only for `n ≤ ALL_PAIRS_MAX_N`.
    All,
    /// Uniform pairs with `u ≠ v` (when `n > 1`).
    Random { count: usize, seed: u64 },
}

impl PairSample {
    pub fn pairs(&self, n: usize) -> Result<Vec<(VertexId, VertexId)>, AuditError> {
        match *self {
            PairSample::All => {
                if n > ALL_PAIRS_MAX_N {
                    return Err(AuditError::TooLargeForAllPairs(n));
                }
                Ok((0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect())
            }
            PairSample::Random { count, seed } => {
                let mut rng = seed::rng(seed, 0);
                Ok((0..count)
                    .map(|_| {
                        let u = rng.random_range(0..n);
                        let mut v = rng.random_range(0..n);
                        while n > 1 && v == u {
                            v = rng.random_range(0..n);
                        }
                        (u, v)
                    })
                    .collect())
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PairSample::All => String::from("all"),
            PairSample::Random { count, seed } => alloc::format!("sample={count}@{seed}"),
        }
    }
}

/// Source of exact distances for an audit.
pub enum GroundTruth<'a> {
    Table(&'a ExactOracle),
    /// Dijkstra per distinct source, for graphs too large for a table.
    PerPair(&'a Graph),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Estimate below the true distance: a correctness bug.
    BelowExact,
    AboveBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub u: VertexId,
    pub v: VertexId,
    pub exact: Distance,
    pub estimate: Distance,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeAudit {
    pub entries: StorageEntries,
    /// `C · k · n^(1 + 1/k)`.
    pub budget: f64,
    /// `(entries, C · κ · |S| · n^(1/κ))` for a restricted far oracle.
    pub restricted: Option<(usize, f64)>,
}

impl SizeAudit {
    pub fn within_budget(&self) -> bool {
        self.entries.total() as f64 <= self.budget
            && self.restricted.is_none_or(|(e, b)| e as f64 <= b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub graph_vertices: usize,
    pub graph_edges: usize,
    pub oracle: &'static str,
    pub stretch_bound: u64,
    pub pairs: String,
    pub pairs_audited: usize,
    pub max_stretch: f64,
    pub mean_stretch: f64,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
    pub size: Option<SizeAudit>,
    /// `(stage, nanoseconds)`, filled in by callers that own a clock.
    pub timings_ns: Vec<(&'static str, u64)>,
    pub seed: Option<u64>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// `n^(1 + 1/k)` budget with the shared constant.
pub fn size_budget(n: usize, k: usize) -> f64 {
    SIZE_CONSTANT * k as f64 * libm::pow(n as f64, 1.0 + 1.0 / k as f64)
}

/// `C · κ · |S| · n^(1/κ)`.
pub fn restricted_budget(n: usize, kappa: usize, stored: usize) -> f64 {
    SIZE_CONSTANT * kappa as f64 * stored as f64 * libm::pow(n as f64, 1.0 / kappa as f64)
}

pub fn audit_size(oracle: &CompositeOracle) -> SizeAudit {
    let n = oracle.vertex_count();
    let restricted = match oracle.far() {
        Some(FarTable::Restricted(r)) => Some((
            oracle.storage().restricted(),
            restricted_budget(n, r.kappa(), r.stored_vertex_count()),
        )),
        _ => None,
    };
    SizeAudit {
        entries: oracle.storage(),
        budget: size_budget(n, oracle.k()),
        restricted,
    }
}

pub fn audit_stretch(
    oracle: &dyn DistanceOracle,
    g: &Graph,
    truth: GroundTruth<'_>,
    sample: &PairSample,
) -> Result<AuditReport, AuditError> {
    let n = g.vertex_count();
    if oracle.vertex_count() != n {
        return Err(AuditError::SizeMismatch {
            oracle: oracle.vertex_count(),
            graph: n,
        });
    }
    let mut pairs = sample.pairs(n)?;
    if matches!(truth, GroundTruth::PerPair(_)) {
        pairs.sort_unstable();
    }
    let bound = oracle.stretch_bound();
    let mut cached: Option<(VertexId, Vec<Distance>)> = None;
    let mut max_stretch: f64 = 1.0;
    let mut sum = 0.0;
    let mut counted = 0usize;
    let mut violation_count = 0;
    let mut violations = Vec::new();
    for &(u, v) in &pairs {
        let exact = match truth {
            GroundTruth::Table(t) => t.distance(u, v),
            GroundTruth::PerPair(graph) => {
                if cached.as_ref().is_none_or(|c| c.0 != u) {
                    cached = Some((u, dijkstra(graph, u).into_distances()));
                }
                cached.as_ref().expect("just filled").1[v]
            }
        };
        let estimate = oracle.estimate(u, v)?;
        let kind = if estimate < exact {
            Some(ViolationKind::BelowExact)
        } else if (estimate as u128) > (bound as u128) * (exact as u128) {
            Some(ViolationKind::AboveBound)
        } else {
            None
        };
        if let Some(kind) = kind {
            violation_count += 1;
            if violations.len() < MAX_RECORDED_VIOLATIONS {
                violations.push(Violation {
                    u,
                    v,
                    exact,
                    estimate,
                    kind,
                });
            }
        }
        if exact > 0 && exact != INFINITY {
            let s = estimate as f64 / exact as f64;
            max_stretch = max_stretch.max(s);
            sum += s;
            counted += 1;
        }
    }
    Ok(AuditReport {
        graph_vertices: n,
        graph_edges: g.edge_count(),
        oracle: oracle.label(),
        stretch_bound: bound,
        pairs: sample.describe(),
        pairs_audited: pairs.len(),
        max_stretch,
        mean_stretch: if counted == 0 { 1.0 } else { sum / counted as f64 },
        violation_count,
        violations,
        size: None,
        timings_ns: Vec::new(),
        seed: None,
    })
}
