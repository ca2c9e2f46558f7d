//! JSON form of audit reports. The schema is documented in the repository README.

use serde::Serialize;

use adoracle_core::audit::{AuditReport, SizeAudit, ViolationKind};
use adoracle_core::composite::{CompositeOracle, Params};

use crate::pipeline::mode_name;

#[derive(Debug, Clone, Serialize)]
pub struct GraphJson {
    pub vertices: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleJson {
    pub kind: String,
    pub requested: String,
    pub fallback: bool,
    pub k: usize,
    pub params: serde_json::Value,
    pub seed: u64,
    pub sampling_rounds: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ViolationJson {
    pub u: usize,
    pub v: usize,
    pub exact: u64,
    pub estimate: u64,
    pub kind: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeJson {
    pub entries: usize,
    pub bunch: usize,
    pub pivots: usize,
    pub far_cells: usize,
    pub samples: usize,
    pub restricted_entries: usize,
    pub budget: f64,
    pub restricted_budget: Option<f64>,
    pub within_budget: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditJson {
    pub graph: GraphJson,
    pub oracle: Option<OracleJson>,
    pub stretch_bound: u64,
    pub pairs: String,
    pub pairs_audited: usize,
    pub max_stretch: f64,
    pub mean_stretch: f64,
    pub violation_count: usize,
    pub violations: Vec<ViolationJson>,
    pub size: Option<SizeJson>,
    pub timings_ns: Vec<(String, u64)>,
    pub passed: bool,
}

fn rational(r: adoracle_core::Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn params_json(p: &Params) -> serde_json::Value {
    match *p {
        Params::Plain { kappa } => serde_json::json!({ "kappa": kappa }),
        Params::Warmup { k, epsilon, spanner_t } => {
            serde_json::json!({ "k": k, "epsilon": rational(epsilon), "spanner_t": spanner_t })
        }
        Params::SmallK(p) => serde_json::json!({ "k": p.k, "k_prime": p.k_prime, "i": rational(p.i) }),
        Params::NearLinear(p) => serde_json::json!({
            "k": p.k,
            "mode": mode_name(p.mode),
            "kappa": p.kappa,
            "i": rational(p.i),
            "k_prime": p.k_prime,
            "certificate": p.stretch_certificate(),
        }),
    }
}

pub fn oracle_json(o: &CompositeOracle) -> OracleJson {
    let info = o.info();
    OracleJson {
        kind: o.kind().name().to_string(),
        requested: info.requested.name().to_string(),
        fallback: info.fallback,
        k: o.k(),
        params: params_json(o.params()),
        seed: info.seed,
        sampling_rounds: info.sampling_rounds,
    }
}

fn size_json(s: &SizeAudit) -> SizeJson {
    SizeJson {
        entries: s.entries.total(),
        bunch: s.entries.bunch,
        pivots: s.entries.pivots,
        far_cells: s.entries.far_cells,
        samples: s.entries.samples,
        restricted_entries: s.entries.restricted(),
        budget: s.budget,
        restricted_budget: s.restricted.map(|r| r.1),
        within_budget: s.within_budget(),
    }
}

pub fn audit_json(report: &AuditReport, oracle: Option<&CompositeOracle>) -> AuditJson {
    AuditJson {
        graph: GraphJson {
            vertices: report.graph_vertices,
            edges: report.graph_edges,
        },
        oracle: oracle.map(oracle_json),
        stretch_bound: report.stretch_bound,
        pairs: report.pairs.clone(),
        pairs_audited: report.pairs_audited,
        max_stretch: report.max_stretch,
        mean_stretch: report.mean_stretch,
        violation_count: report.violation_count,
        violations: report
            .violations
            .iter()
            .map(|v| ViolationJson {
                u: v.u,
                v: v.v,
                exact: v.exact,
                estimate: v.estimate,
                kind: match v.kind {
                    ViolationKind::BelowExact => "below-exact",
                    ViolationKind::AboveBound => "above-bound",
                },
            })
            .collect(),
        size: report.size.as_ref().map(size_json),
        timings_ns: report.timings_ns.iter().map(|&(s, t)| (s.to_string(), t)).collect(),
        passed: report.passed(),
    }
}
