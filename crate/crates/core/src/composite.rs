//! Composite oracles: sampling, sparsification, a Thorup-Zwick oracle on
//! `G_S`, and a far-distance structure over a spanner.
//!
//! A query returns `min(d̃₁, d̃₂)` where `d̃₁` is the `G_S` oracle's estimate
//! and `d̃₂ = d(u, p_S(u)) + far(p_S(u), p_S(v)) + d(v, p_S(v))`. The far
//! structure is an exact `|S| × |S|` table of spanner distances (small-k) or
//! a restricted Thorup-Zwick oracle on the spanner (near-linear).
//!
//! The same container also holds the two oracles without a far part: plain
//! Thorup-Zwick on the input graph, and the warm-up oracle (Thorup-Zwick on a
//! spanner).

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{validate_graph, Graph, ValidationReport};
use crate::params::{
    select_params_near_linear, select_params_small_k, warmup_spanner_parameter, NearLinearSelection, ParamError,
    ParamMode, ParamsNearLinear, ParamsSmallK,
};
use crate::spanner::{build_spanner, SpannerError};
use crate::sssp::{dijkstra, sample_vertices, SampleAssignment, SsspError};
use crate::tz::{build_tz, TzError, TzOptions, TzOracle};
use crate::{seed, Distance, Rational, VertexId, INFINITY};

const STAGE_SAMPLING: u64 = 1;
const STAGE_INNER: u64 = 2;
const STAGE_SPANNER: u64 = 3;
const STAGE_FAR: u64 = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompositeError {
    #[error("graph rejected by validation: {0:?}")]
    InvalidGraph(ValidationReport),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("epsilon must be positive")]
    InvalidEpsilon,
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Tz(#[from] TzError),
    #[error(transparent)]
    Sssp(#[from] SsspError),
    #[error(transparent)]
    Spanner(#[from] SpannerError),
    #[error("stored oracle parts are inconsistent: {0}")]
    Corrupt(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    /// Thorup-Zwick on the input graph.
    Plain,
    /// Thorup-Zwick on a spanner.
    Warmup,
    /// `G_S` oracle plus exact `S × S` spanner distances.
    SmallK,
    /// `G_S` oracle plus a restricted oracle on the spanner.
    NearLinear,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::Plain => "tz",
            OracleKind::Warmup => "warmup",
            OracleKind::SmallK => "small-k",
            OracleKind::NearLinear => "near-linear",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tz" | "plain" => Some(OracleKind::Plain),
            "warmup" => Some(OracleKind::Warmup),
            "small-k" => Some(OracleKind::SmallK),
            "near-linear" => Some(OracleKind::NearLinear),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Params {
    Plain { kappa: usize },
    Warmup { k: usize, epsilon: Rational, spanner_t: usize },
    SmallK(ParamsSmallK),
    NearLinear(ParamsNearLinear),
}

/// Build metadata. Everything here is a deterministic function of the
/// inputs and seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildInfo {
    pub seed: u64,
    /// Kind the caller asked for; differs from the built kind after a fallback.
    pub requested: OracleKind,
    pub requested_k: usize,
    pub fallback: bool,
    pub sampling_rounds: usize,
    pub sampling_accepted: bool,
    pub sparsified_edges: usize,
    pub spanner_edges: usize,
    pub graph_vertices: usize,
    pub graph_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FarTable {
    /// Row-major `|S| × |S|` spanner distances.
    Exact(Vec<Distance>),
    Restricted(TzOracle),
}

/// Stored-entry accounting used by size audits and the codec.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StorageEntries {
    pub bunch: usize,
    pub pivots: usize,
    pub far_cells: usize,
    pub restricted_bunch: usize,
    pub restricted_pivots: usize,
    /// `p_S` and `d_S` arrays.
    pub samples: usize,
}

impl StorageEntries {
    pub fn total(&self) -> usize {
        self.bunch + self.pivots + self.far_cells + self.restricted_bunch + self.restricted_pivots + self.samples
    }

    pub fn restricted(&self) -> usize {
        self.restricted_bunch + self.restricted_pivots
    }
}

/// Both estimates of a query; `far` is absent for oracles without a far part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Estimates {
    pub near: Distance,
    pub far: Option<Distance>,
}

impl Estimates {
    pub fn min(&self) -> Distance {
        self.far.map_or(self.near, |f| f.min(self.near))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeOracle {
    kind: OracleKind,
    params: Params,
    info: BuildInfo,
    assignment: Option<SampleAssignment>,
    sample_slot: Vec<u32>,
    inner: TzOracle,
    far: Option<FarTable>,
}

/// Raw pieces of a [`CompositeOracle`], for storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeParts {
    pub kind: OracleKind,
    pub params: Params,
    pub info: BuildInfo,
    pub assignment: Option<SampleAssignment>,
    pub inner: TzOracle,
    pub far: Option<FarTable>,
}

/// Receives a call as each build stage finishes. Lets a caller with a clock
/// time the stages.
pub trait BuildObserver {
    fn stage_done(&mut self, stage: &'static str);
}

pub struct NoopObserver;

impl BuildObserver for NoopObserver {
    fn stage_done(&mut self, _stage: &'static str) {}
}

fn check(g: &Graph) -> Result<(), CompositeError> {
    if g.vertex_count() == 0 {
        return Err(CompositeError::EmptyGraph);
    }
    let report = validate_graph(g);
    if report.is_ok() {
        Ok(())
    } else {
        Err(CompositeError::InvalidGraph(report))
    }
}

fn info(g: &Graph, seed: u64, requested: OracleKind, k: usize) -> BuildInfo {
    BuildInfo {
        seed,
        requested,
        requested_k: k,
        fallback: false,
        sampling_rounds: 0,
        sampling_accepted: true,
        sparsified_edges: 0,
        spanner_edges: 0,
        graph_vertices: g.vertex_count(),
        graph_edges: g.edge_count(),
    }
}

fn slots_for(assignment: &Option<SampleAssignment>) -> Vec<u32> {
    match assignment {
        None => Vec::new(),
        Some(a) => a
            .nearest_all()
            .map(|p| a.samples().binary_search(&p).expect("nearest is a sample") as u32)
            .collect(),
    }
}

/// Thorup-Zwick with `kappa` levels directly on `g`.
pub fn build_plain(
    g: &Graph,
    kappa: usize,
    seed: u64,
    observer: &mut dyn BuildObserver,
) -> Result<CompositeOracle, CompositeError> {
    check(g)?;
    let inner = build_tz(g, kappa, seed::derive(seed, STAGE_INNER), &TzOptions::default())?;
    observer.stage_done("tz");
    Ok(CompositeOracle {
        kind: OracleKind::Plain,
        params: Params::Plain { kappa },
        info: info(g, seed, OracleKind::Plain, kappa),
        assignment: None,
        sample_slot: Vec::new(),
        inner,
        far: None,
    })
}

/// Spanner with stretch `2t - 1 ≤ ⌈1/ε⌉ + 1`, then Thorup-Zwick with `k` levels on it.
pub fn build_warmup(
    g: &Graph,
    k: usize,
    epsilon: Rational,
    seed: u64,
    observer: &mut dyn BuildObserver,
) -> Result<CompositeOracle, CompositeError> {
    check(g)?;
    let t = warmup_spanner_parameter(epsilon).ok_or(CompositeError::InvalidEpsilon)?;
    let spanner = build_spanner(g, t, seed::derive(seed, STAGE_SPANNER))?;
    observer.stage_done("spanner");
    let mut meta = info(g, seed, OracleKind::Warmup, k);
    meta.spanner_edges = spanner.edge_count();
    let inner = build_tz(spanner.graph(), k, seed::derive(seed, STAGE_INNER), &TzOptions::default())?;
    observer.stage_done("tz");
    Ok(CompositeOracle {
        kind: OracleKind::Warmup,
        params: Params::Warmup { k, epsilon, spanner_t: t },
        info: meta,
        assignment: None,
        sample_slot: Vec::new(),
        inner,
        far: None,
    })
}

struct NearPart {
    assignment: SampleAssignment,
    inner: TzOracle,
    meta: BuildInfo,
}

fn near_part(
    g: &Graph,
    k: usize,
    exponent: Rational,
    seed: u64,
    requested: OracleKind,
    observer: &mut dyn BuildObserver,
) -> Result<NearPart, CompositeError> {
    let sampling = sample_vertices(g, exponent, seed::derive(seed, STAGE_SAMPLING))?;
    observer.stage_done("sampling");
    let mut meta = info(g, seed, requested, k);
    meta.sampling_rounds = sampling.rounds;
    meta.sampling_accepted = sampling.accepted;
    meta.sparsified_edges = sampling.sparsified.edge_count();
    let options = TzOptions {
        allow_disconnected: true,
        ..TzOptions::default()
    };
    let inner = build_tz(sampling.sparsified.graph(), k, seed::derive(seed, STAGE_INNER), &options)?;
    observer.stage_done("tz-sparsified");
    Ok(NearPart {
        assignment: sampling.assignment,
        inner,
        meta,
    })
}

/// Small-k oracle, `k ≥ 3`.
pub fn build_small_k(
    g: &Graph,
    k: usize,
    seed: u64,
    observer: &mut dyn BuildObserver,
) -> Result<CompositeOracle, CompositeError> {
    check(g)?;
    let params = select_params_small_k(k)?;
    small_k_with(g, params, seed, OracleKind::SmallK, observer)
}

fn small_k_with(
    g: &Graph,
    params: ParamsSmallK,
    seed: u64,
    requested: OracleKind,
    observer: &mut dyn BuildObserver,
) -> Result<CompositeOracle, CompositeError> {
    let NearPart {
        assignment,
        inner,
        mut meta,
    } = near_part(g, params.k, params.sampling_exponent(), seed, requested, observer)?;
    let spanner = build_spanner(g, params.k_prime, seed::derive(seed, STAGE_SPANNER))?;
    observer.stage_done("spanner");
    meta.spanner_edges = spanner.edge_count();
    let samples = assignment.samples();
    let mut table = vec![0; samples.len() * samples.len()];
    for (row, &s) in table.chunks_exact_mut(samples.len().max(1)).zip(samples) {
        let d = dijkstra(spanner.graph(), s);
        for (cell, &t) in row.iter_mut().zip(samples) {
            *cell = d.distance(t);
        }
    }
    observer.stage_done("far-table");
    let assignment = Some(assignment);
    Ok(CompositeOracle {
        kind: OracleKind::SmallK,
        params: Params::SmallK(params),
        info: meta,
        sample_slot: slots_for(&assignment),
        assignment,
        inner,
        far: Some(FarTable::Exact(table)),
    })
}

/// Near-linear oracle. Falls back to small-k (or plain Thorup-Zwick when
/// `k < 3`) if the parameter rule is infeasible for this `k`; the fallback
/// is recorded in [`BuildInfo::fallback`].
pub fn build_near_linear(
    g: &Graph,
    k: usize,
    mode: ParamMode,
    seed: u64,
    observer: &mut dyn BuildObserver,
) -> Result<CompositeOracle, CompositeError> {
    check(g)?;
    let params = match select_params_near_linear(k, mode)? {
        NearLinearSelection::Feasible(p) => p,
        NearLinearSelection::Infeasible { .. } => {
            let mut oracle = if k >= 3 {
                small_k_with(g, select_params_small_k(k)?, seed, OracleKind::NearLinear, observer)?
            } else {
                let mut o = build_plain(g, k, seed, observer)?;
                o.info.requested = OracleKind::NearLinear;
                o
            };
            oracle.info.fallback = true;
            return Ok(oracle);
        }
    };
    let NearPart {
        assignment,
        inner,
        mut meta,
    } = near_part(g, k, params.sampling_exponent(), seed, OracleKind::NearLinear, observer)?;
    let spanner = build_spanner(g, params.k_prime, seed::derive(seed, STAGE_SPANNER))?;
    observer.stage_done("spanner");
    meta.spanner_edges = spanner.edge_count();
    let options = TzOptions {
        restriction: Some(assignment.samples().to_vec()),
        ..TzOptions::default()
    };
    let far = build_tz(spanner.graph(), params.kappa, seed::derive(seed, STAGE_FAR), &options)?;
    observer.stage_done("restricted-tz");
    let assignment = Some(assignment);
    Ok(CompositeOracle {
        kind: OracleKind::NearLinear,
        params: Params::NearLinear(params),
        info: meta,
        sample_slot: slots_for(&assignment),
        assignment,
        inner,
        far: Some(FarTable::Restricted(far)),
    })
}

impl CompositeOracle {
    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn info(&self) -> &BuildInfo {
        &self.info
    }

    pub fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    pub fn assignment(&self) -> Option<&SampleAssignment> {
        self.assignment.as_ref()
    }

    /// Oracle over the input graph (plain), the spanner (warm-up) or `G_S`.
    pub fn inner(&self) -> &TzOracle {
        &self.inner
    }

    pub fn far(&self) -> Option<&FarTable> {
        self.far.as_ref()
    }

    /// Certified stretch over the input graph.
    pub fn stretch_bound(&self) -> u64 {
        match self.params {
            Params::Plain { .. } => self.inner.stretch_bound(),
            Params::Warmup { spanner_t, .. } => self.inner.stretch_bound() * (2 * spanner_t as u64 - 1),
            Params::SmallK(p) => 2 * p.k as u64 - 1,
            Params::NearLinear(p) => 2 * p.k as u64 - 1,
        }
    }

    /// Parameter `k` the oracle was built for.
    pub fn k(&self) -> usize {
        match self.params {
            Params::Plain { kappa } => kappa,
            Params::Warmup { k, .. } => k,
            Params::SmallK(p) => p.k,
            Params::NearLinear(p) => p.k,
        }
    }

    fn far_estimate(&self, u: VertexId, v: VertexId) -> Result<Option<Distance>, TzError> {
        let (Some(a), Some(far)) = (&self.assignment, &self.far) else {
            return Ok(None);
        };
        let between = match far {
            FarTable::Exact(table) => {
                let s = a.samples().len();
                table[self.sample_slot[u] as usize * s + self.sample_slot[v] as usize]
            }
            FarTable::Restricted(o) => o.query(a.nearest(u), a.nearest(v))?,
        };
        Ok(Some(a.distance(u).saturating_add(between).saturating_add(a.distance(v))))
    }

    pub fn estimates(&self, u: VertexId, v: VertexId) -> Result<Estimates, TzError> {
        let n = self.vertex_count();
        for x in [u, v] {
            if x >= n {
                return Err(TzError::VertexOutOfRange(x));
            }
        }
        Ok(Estimates {
            near: self.inner.query(u, v)?,
            far: self.far_estimate(u, v)?,
        })
    }

    /// `min(d̃₁, d̃₂)`.
    pub fn query(&self, u: VertexId, v: VertexId) -> Result<Distance, TzError> {
        if u == v && u < self.vertex_count() {
            return Ok(0);
        }
        let e = self.estimates(u, v)?;
        let d = e.min();
        debug_assert!(d != INFINITY, "composite oracles are built on connected graphs");
        Ok(d)
    }

    pub fn storage(&self) -> StorageEntries {
        let mut s = StorageEntries {
            bunch: self.inner.bunch_entries(),
            pivots: self.inner.pivot_entries(),
            samples: self.assignment.as_ref().map_or(0, |a| 2 * a.distances().len()),
            ..StorageEntries::default()
        };
        match &self.far {
            Some(FarTable::Exact(t)) => s.far_cells = t.len(),
            Some(FarTable::Restricted(o)) => {
                s.restricted_bunch = o.bunch_entries();
                s.restricted_pivots = o.pivot_entries();
            }
            None => {}
        }
        s
    }

    pub fn to_parts(&self) -> CompositeParts {
        CompositeParts {
            kind: self.kind,
            params: self.params,
            info: self.info.clone(),
            assignment: self.assignment.clone(),
            inner: self.inner.clone(),
            far: self.far.clone(),
        }
    }

    /// Reassembles an oracle, checking that the pieces fit together.
    pub fn from_parts(parts: CompositeParts) -> Result<Self, CompositeError> {
        let CompositeParts {
            kind,
            params,
            info,
            assignment,
            inner,
            far,
        } = parts;
        let n = inner.vertex_count();
        let needs_samples = matches!(kind, OracleKind::SmallK | OracleKind::NearLinear);
        if needs_samples != assignment.is_some() || needs_samples != far.is_some() {
            return Err(CompositeError::Corrupt("kind does not match stored parts"));
        }
        if inner.restriction().is_some() {
            return Err(CompositeError::Corrupt("inner oracle must not be restricted"));
        }
        if let Some(a) = &assignment {
            if a.distances().len() != n || a.samples().iter().any(|&s| s >= n) {
                return Err(CompositeError::Corrupt("sample arrays"));
            }
            let s = a.samples();
            match &far {
                Some(FarTable::Exact(t)) if t.len() != s.len() * s.len() => {
                    return Err(CompositeError::Corrupt("far table shape"))
                }
                Some(FarTable::Restricted(o)) if o.restriction() != Some(s) || o.vertex_count() != n => {
                    return Err(CompositeError::Corrupt("restricted oracle set"))
                }
                _ => {}
            }
        }
        let kind_matches = matches!(
            (kind, &params, &far),
            (OracleKind::Plain, Params::Plain { .. }, None)
                | (OracleKind::Warmup, Params::Warmup { .. }, None)
                | (OracleKind::SmallK, Params::SmallK(_), Some(FarTable::Exact(_)))
                | (OracleKind::NearLinear, Params::NearLinear(_), Some(FarTable::Restricted(_)))
        );
        if !kind_matches {
            return Err(CompositeError::Corrupt("parameters do not match kind"));
        }
        let sample_slot = slots_for(&assignment);
        Ok(CompositeOracle {
            kind,
            params,
            info,
            assignment,
            sample_slot,
            inner,
            far,
        })
    }
}
