//! Thorup-Zwick distance oracle.
//!
//! Level sets `V = A_0 ⊇ A_1 ⊇ … ⊇ A_{κ-1} ⊋ A_κ = ∅` are drawn by keeping
//! each member of the previous level with probability `n^(-1/κ)`. For every
//! stored vertex `v` the oracle keeps the pivots `p_i(v)` with `d(A_i, v)`
//! and the bunch
//!
//! ```text
//! B(v) = ∪_i { w ∈ A_i \ A_{i+1} : d(w, v) < d(A_{i+1}, v) }
//! ```
//!
//! Bunches are built from clusters: for each `w` of level exactly `i`, a
//! Dijkstra from `w` only settles `v` while the tentative distance beats
//! `d(A_{i+1}, v)`. Shortest paths into a cluster stay inside it, so the
//! pruned search is exact.
//!
//! A restricted oracle stores pivots and bunches only for a vertex set `S`
//! and answers queries between members of `S`.
//!
//! The oracle may be built over a disconnected graph (the composite oracles
//! do this for `G_S`); queries across components then return
//! [`INFINITY`].

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use rand::Rng;

use crate::graph::{validate_graph, Graph};
use crate::sssp::multi_source_dijkstra;
use crate::{seed, Distance, VertexId, INFINITY};

const NONE: u32 = u32::MAX;

/// Level-sampling rounds per level count before dropping to `κ - 1` levels.
pub const MAX_LEVEL_ROUNDS: usize = 100;

/// Largest supported level count.
pub const MAX_KAPPA: usize = u16::MAX as usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TzError {
    #[error("level count must be in 1..={MAX_KAPPA}, got {0}")]
    InvalidKappa(usize),
    #[error("graph must be connected with positive symmetric weights")]
    InvalidGraph,
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("expected {expected} injected levels A_1..A_(κ-1), got {got}")]
    LevelCount { expected: usize, got: usize },
    #[error("injected level A_{0} is not a subset of the level below it")]
    NotNested(usize),
    #[error("injected top level A_(κ-1) is empty")]
    EmptyTopLevel,
    #[error("restriction set is empty")]
    EmptyRestriction,
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(VertexId),
    #[error("vertex {0} is outside the restriction set")]
    OutsideRestriction(VertexId),
    #[error("query loop did not terminate within κ - 1 swaps")]
    NonTermination,
    #[error("stored oracle parts are inconsistent: {0}")]
    Corrupt(&'static str),
}

/// Build options beyond the level count and seed.
#[derive(Debug, Clone, Default)]
pub struct TzOptions {
    /// Store pivots and bunches only for these vertices.
    pub restriction: Option<Vec<VertexId>>,
    /// Explicit `A_1 … A_{κ-1}`, replacing sampling. Test hook.
    pub injected_levels: Option<Vec<Vec<VertexId>>>,
    /// Skip the connectivity requirement (used for sparsified graphs).
    pub allow_disconnected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TzOracle {
    n: usize,
    kappa: usize,
    requested_kappa: usize,
    level: Vec<u16>,
    restriction: Option<Vec<VertexId>>,
    slot: Vec<u32>,
    pivots: Vec<(u32, Distance)>,
    bunch_offsets: Vec<usize>,
    bunch: Vec<(u32, Distance)>,
    connected: bool,
    level_rounds: usize,
}

/// Raw arrays of a [`TzOracle`], for storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TzParts {
    pub n: usize,
    pub kappa: usize,
    pub requested_kappa: usize,
    /// Highest level each vertex belongs to.
    pub level: Vec<u16>,
    pub restriction: Option<Vec<VertexId>>,
    /// `κ` entries `(pivot, distance)` per stored vertex; `(u32::MAX, INFINITY)` when undefined.
    pub pivots: Vec<(u32, Distance)>,
    /// `stored + 1` prefix offsets into `bunch`.
    pub bunch_offsets: Vec<usize>,
    /// Concatenated bunches, each sorted by member id.
    pub bunch: Vec<(u32, Distance)>,
    pub connected: bool,
    pub level_rounds: usize,
}

fn slots(n: usize, restriction: &Option<Vec<VertexId>>) -> Vec<u32> {
    match restriction {
        None => (0..n as u32).collect(),
        Some(set) => {
            let mut slot = vec![NONE; n];
            for (i, &v) in set.iter().enumerate() {
                slot[v] = i as u32;
            }
            slot
        }
    }
}

fn sample_levels(n: usize, requested: usize, seed: u64) -> (usize, Vec<u16>, usize) {
    let mut rounds = 0;
    for kappa in (2..=requested).rev() {
        let p = libm::pow(n as f64, -1.0 / kappa as f64);
        for round in 0..MAX_LEVEL_ROUNDS {
            rounds += 1;
            let stream = (((requested - kappa) as u64) << 32) | round as u64;
            let mut rng = seed::rng(seed, stream);
            let mut level = vec![0u16; n];
            let mut current: Vec<VertexId> = (0..n).collect();
            for i in 1..kappa {
                current.retain(|_| rng.random::<f64>() < p);
                for &v in &current {
                    level[v] = i as u16;
                }
            }
            if !current.is_empty() {
                return (kappa, level, rounds);
            }
        }
    }
    (1, vec![0; n], rounds.max(1))
}

fn injected(n: usize, kappa: usize, levels: &[Vec<VertexId>]) -> Result<Vec<u16>, TzError> {
    if levels.len() != kappa - 1 {
        return Err(TzError::LevelCount {
            expected: kappa - 1,
            got: levels.len(),
        });
    }
    let mut level = vec![0u16; n];
    for (idx, set) in levels.iter().enumerate() {
        let i = idx + 1;
        for &v in set {
            if v >= n {
                return Err(TzError::VertexOutOfRange(v));
            }
            if level[v] as usize != i - 1 {
                return Err(TzError::NotNested(i));
            }
        }
        for &v in set {
            level[v] = i as u16;
        }
    }
    if kappa > 1 && levels[kappa - 2].is_empty() {
        return Err(TzError::EmptyTopLevel);
    }
    Ok(level)
}

/// Dijkstra from `w` that only settles `v` while the distance is below
/// `bound[v]`. Calls `visit(v, d)` for every member of the cluster.
struct ClusterGrower {
    dist: Vec<Distance>,
    touched: Vec<u32>,
    heap: BinaryHeap<Reverse<(Distance, u32)>>,
}

impl ClusterGrower {
    fn new(n: usize) -> Self {
        ClusterGrower {
            dist: vec![INFINITY; n],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn grow(&mut self, g: &Graph, w: VertexId, bound: &[Distance], mut visit: impl FnMut(VertexId, Distance)) {
        self.dist[w] = 0;
        self.touched.push(w as u32);
        self.heap.push(Reverse((0, w as u32)));
        while let Some(Reverse((d, u))) = self.heap.pop() {
            let u = u as usize;
            if d != self.dist[u] {
                continue;
            }
            visit(u, d);
            for (v, wt) in g.neighbors(u) {
                let nd = d + wt;
                if nd < bound[v] && nd < self.dist[v] {
                    if self.dist[v] == INFINITY {
                        self.touched.push(v as u32);
                    }
                    self.dist[v] = nd;
                    self.heap.push(Reverse((nd, v as u32)));
                }
            }
        }
        for &t in &self.touched {
            self.dist[t as usize] = INFINITY;
        }
        self.touched.clear();
    }
}

pub fn build_tz(g: &Graph, kappa: usize, seed: u64, options: &TzOptions) -> Result<TzOracle, TzError> {
    if !(1..=MAX_KAPPA).contains(&kappa) {
        return Err(TzError::InvalidKappa(kappa));
    }
    let n = g.vertex_count();
    if n == 0 {
        return Err(TzError::EmptyGraph);
    }
    let report = validate_graph(g);
    if !(report.positive && report.symmetric) || (!report.connected && !options.allow_disconnected) {
        return Err(TzError::InvalidGraph);
    }
    let restriction = match &options.restriction {
        None => None,
        Some(set) => {
            let mut set = set.clone();
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                return Err(TzError::EmptyRestriction);
            }
            if let Some(&bad) = set.iter().find(|&&v| v >= n) {
                return Err(TzError::VertexOutOfRange(bad));
            }
            Some(set)
        }
    };

    let (kappa_eff, level, level_rounds) = match &options.injected_levels {
        Some(levels) => (kappa, injected(n, kappa, levels)?, 0),
        None => sample_levels(n, kappa, seed),
    };

    let slot = slots(n, &restriction);
    let stored = restriction.as_ref().map_or(n, Vec::len);
    let mut pivots = vec![(NONE, INFINITY); stored * kappa_eff];
    let mut bunches: Vec<Vec<(u32, Distance)>> = vec![Vec::new(); stored];
    for v in 0..n {
        if slot[v] != NONE {
            pivots[slot[v] as usize * kappa_eff] = (v as u32, 0);
        }
    }

    let mut grower = ClusterGrower::new(n);
    for i in 0..kappa_eff {
        let bound: Vec<Distance> = if i + 1 < kappa_eff {
            let upper: Vec<VertexId> = (0..n).filter(|&v| level[v] as usize > i).collect();
            let next = multi_source_dijkstra(g, &upper);
            for v in 0..n {
                if slot[v] != NONE && next.distance(v) != INFINITY {
                    let origin = next.origin(v).expect("reached vertices have an origin");
                    pivots[slot[v] as usize * kappa_eff + i + 1] = (origin as u32, next.distance(v));
                }
            }
            next.into_distances()
        } else {
            vec![INFINITY; n]
        };
        for w in (0..n).filter(|&w| level[w] as usize == i) {
            grower.grow(g, w, &bound, |v, d| {
                if slot[v] != NONE {
                    bunches[slot[v] as usize].push((w as u32, d));
                }
            });
        }
    }

    let mut bunch_offsets = Vec::with_capacity(stored + 1);
    bunch_offsets.push(0);
    let mut bunch = Vec::with_capacity(bunches.iter().map(Vec::len).sum());
    for mut b in bunches {
        b.sort_unstable();
        bunch.extend(b);
        bunch_offsets.push(bunch.len());
    }

    Ok(TzOracle {
        n,
        kappa: kappa_eff,
        requested_kappa: kappa,
        level,
        restriction,
        slot,
        pivots,
        bunch_offsets,
        bunch,
        connected: report.connected,
        level_rounds,
    })
}

impl TzOracle {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Level count actually used; below the requested count only if level
    /// sampling kept failing to populate the top level.
    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn requested_kappa(&self) -> usize {
        self.requested_kappa
    }

    /// Guaranteed multiplicative stretch, `2κ - 1`.
    pub fn stretch_bound(&self) -> u64 {
        2 * self.kappa as u64 - 1
    }

    pub fn level_rounds(&self) -> usize {
        self.level_rounds
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn restriction(&self) -> Option<&[VertexId]> {
        self.restriction.as_deref()
    }

    pub fn is_stored(&self, v: VertexId) -> bool {
        v < self.n && self.slot[v] != NONE
    }

    /// Highest level containing `v`.
    pub fn level_of(&self, v: VertexId) -> usize {
        self.level[v] as usize
    }

    /// `A_i` as a sorted vertex list.
    pub fn level_set(&self, i: usize) -> Vec<VertexId> {
        (0..self.n).filter(|&v| self.level[v] as usize >= i).collect()
    }

    /// `(p_i(v), d(A_i, v))`; `None` when `v` is not stored or `A_i` is
    /// unreachable from `v`.
    pub fn pivot(&self, v: VertexId, i: usize) -> Option<(VertexId, Distance)> {
        if !self.is_stored(v) || i >= self.kappa {
            return None;
        }
        let (p, d) = self.pivots[self.slot[v] as usize * self.kappa + i];
        (p != NONE).then_some((p as VertexId, d))
    }

    /// `B(v)` as `(member, distance)` sorted by member.
    pub fn bunch(&self, v: VertexId) -> Option<&[(u32, Distance)]> {
        if !self.is_stored(v) {
            return None;
        }
        let s = self.slot[v] as usize;
        Some(&self.bunch[self.bunch_offsets[s]..self.bunch_offsets[s + 1]])
    }

    fn bunch_distance(&self, v: VertexId, w: VertexId) -> Option<Distance> {
        let b = self.bunch(v)?;
        b.binary_search_by_key(&(w as u32), |e| e.0).ok().map(|i| b[i].1)
    }

    pub fn stored_vertex_count(&self) -> usize {
        self.bunch_offsets.len() - 1
    }

    pub fn bunch_entries(&self) -> usize {
        self.bunch.len()
    }

    pub fn pivot_entries(&self) -> usize {
        self.pivots.len()
    }

    /// Alternating bunch query. Endpoints are ordered by id first, so the
    /// result is symmetric.
    pub fn query(&self, u: VertexId, v: VertexId) -> Result<Distance, TzError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(TzError::VertexOutOfRange(x));
            }
            if !self.is_stored(x) {
                return Err(TzError::OutsideRestriction(x));
            }
        }
        let (mut u, mut v) = if u <= v { (u, v) } else { (v, u) };
        let mut w = u;
        let mut to_u = 0;
        let mut i = 0;
        loop {
            if let Some(to_v) = self.bunch_distance(v, w) {
                return Ok(to_u + to_v);
            }
            i += 1;
            if i >= self.kappa {
                // only possible when u and v lie in different components
                return if self.connected {
                    Err(TzError::NonTermination)
                } else {
                    Ok(INFINITY)
                };
            }
            core::mem::swap(&mut u, &mut v);
            match self.pivot(u, i) {
                Some((p, d)) => {
                    w = p;
                    to_u = d;
                }
                None if self.connected => return Err(TzError::NonTermination),
                None => return Ok(INFINITY),
            }
        }
    }

    pub fn to_parts(&self) -> TzParts {
        TzParts {
            n: self.n,
            kappa: self.kappa,
            requested_kappa: self.requested_kappa,
            level: self.level.clone(),
            restriction: self.restriction.clone(),
            pivots: self.pivots.clone(),
            bunch_offsets: self.bunch_offsets.clone(),
            bunch: self.bunch.clone(),
            connected: self.connected,
            level_rounds: self.level_rounds,
        }
    }

    /// Rebuilds an oracle from stored arrays, checking every shape invariant.
    pub fn from_parts(parts: TzParts) -> Result<Self, TzError> {
        let TzParts {
            n,
            kappa,
            requested_kappa,
            level,
            restriction,
            pivots,
            bunch_offsets,
            bunch,
            connected,
            level_rounds,
        } = parts;
        if !(1..=MAX_KAPPA).contains(&kappa) || requested_kappa < kappa {
            return Err(TzError::Corrupt("level count"));
        }
        if level.len() != n || level.iter().any(|&l| l as usize >= kappa) {
            return Err(TzError::Corrupt("level table"));
        }
        if kappa > 1 && !level.iter().any(|&l| l as usize == kappa - 1) {
            return Err(TzError::Corrupt("empty top level"));
        }
        if let Some(set) = &restriction {
            if set.is_empty() || set.windows(2).any(|w| w[0] >= w[1]) || set.iter().any(|&v| v >= n) {
                return Err(TzError::Corrupt("restriction set"));
            }
        }
        let stored = restriction.as_ref().map_or(n, Vec::len);
        if pivots.len() != stored * kappa
            || pivots.iter().any(|&(p, _)| p != NONE && p as usize >= n)
        {
            return Err(TzError::Corrupt("pivot table"));
        }
        if bunch_offsets.len() != stored + 1
            || bunch_offsets[0] != 0
            || bunch_offsets.windows(2).any(|w| w[0] > w[1])
            || bunch_offsets[stored] != bunch.len()
        {
            return Err(TzError::Corrupt("bunch offsets"));
        }
        for s in 0..stored {
            let run = &bunch[bunch_offsets[s]..bunch_offsets[s + 1]];
            if run.windows(2).any(|w| w[0].0 >= w[1].0) || run.iter().any(|e| e.0 as usize >= n) {
                return Err(TzError::Corrupt("bunch run"));
            }
        }
        let slot = slots(n, &restriction);
        Ok(TzOracle {
            n,
            kappa,
            requested_kappa,
            level,
            restriction,
            slot,
            pivots,
            bunch_offsets,
            bunch,
            connected,
            level_rounds,
        })
    }
}

/// Reference bunch size `κ · n^(1/κ)`.
pub fn bunch_size_reference(n: usize, kappa: usize) -> f64 {
    kappa as f64 * libm::pow(n as f64, 1.0 / kappa as f64)
}
