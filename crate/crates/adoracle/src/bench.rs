//! Benchmark scenarios.
//!
//! A scenario is a list of cells; each cell expands to the cross product of
//! its sizes, oracle kinds, `k` values and seeds, and every combination
//! becomes one CSV row. Columns listed in [`TIMING_COLUMNS`] hold wall-clock
//! measurements; all other columns are a deterministic function of the
//! scenario.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use serde::Deserialize;

use adoracle_core::audit::{audit_size, audit_stretch, GroundTruth, PairSample};
use adoracle_core::composite::OracleKind;
use adoracle_core::generators::Family;
use adoracle_core::graph::Graph;
use adoracle_core::{seed, Distance};
use rand::Rng;

use crate::io::{load_graph, Format};
use crate::pipeline::{build, parse_kind, parse_mode, parse_rational, prepare, BuildConfig};
use crate::timing::{quantile, StageClock};

pub const COLUMNS: [&str; 23] = [
    "cell",
    "family",
    "n",
    "m",
    "kind",
    "built_kind",
    "k",
    "seed",
    "fallback",
    "sampling_rounds",
    "pairs",
    "pairs_audited",
    "stretch_bound",
    "stretch_max",
    "stretch_mean",
    "violations",
    "entries",
    "budget",
    "within_budget",
    "build_ms",
    "stage_ms",
    "query_p50_ns",
    "query_p99_ns",
];

pub const TIMING_COLUMNS: [&str; 4] = ["build_ms", "stage_ms", "query_p50_ns", "query_p99_ns"];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cell {
    /// Generator family; exclusive with `graph` and `edges`.
    pub family: Option<String>,
    /// Graph file, resolved relative to the scenario file.
    pub graph: Option<PathBuf>,
    pub format: Option<String>,
    /// Inline `[u, v, w]` edges.
    pub edges: Option<Vec<(u64, u64, u64)>>,
    #[serde(default)]
    pub n: Vec<usize>,
    /// Edge count, or `n^m_exponent`, or `m_per_vertex · n` (default 4n).
    pub m: Option<usize>,
    pub m_exponent: Option<f64>,
    pub m_per_vertex: Option<f64>,
    pub weights: Option<(Distance, Distance)>,
    pub kinds: Vec<String>,
    pub k: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub epsilon: Option<String>,
    pub param_mode: Option<String>,
    /// `all`, `sample=N` or `none`.
    #[serde(default = "default_pairs")]
    pub pairs: String,
    #[serde(default = "default_queries")]
    pub queries: usize,
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

fn default_pairs() -> String {
    "sample=1000".into()
}

fn default_queries() -> usize {
    1000
}

impl Scenario {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        toml::from_str(text).context("parsing TOML scenario")
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        serde_json::from_str(text).context("parsing JSON scenario")
    }

    /// Reads `.json` as JSON and anything else as TOML.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut s = if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)?
        } else {
            Self::from_toml(&text)?
        };
        let base = path.parent().unwrap_or(Path::new("."));
        for c in &mut s.cells {
            if let Some(g) = &mut c.graph {
                *g = base.join(&*g);
            }
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub cell: usize,
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub kind: String,
    pub built_kind: String,
    pub k: usize,
    pub seed: u64,
    pub fallback: bool,
    pub sampling_rounds: usize,
    pub pairs: String,
    pub pairs_audited: usize,
    pub stretch_bound: u64,
    pub stretch_max: Option<f64>,
    pub stretch_mean: Option<f64>,
    pub violations: usize,
    pub entries: usize,
    pub budget: f64,
    pub within_budget: bool,
    pub build_ms: f64,
    pub stage_ms: Vec<(&'static str, f64)>,
    pub query_p50_ns: u64,
    pub query_p99_ns: u64,
}

impl Row {
    pub fn fields(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        let stages = self
            .stage_ms
            .iter()
            .map(|(s, t)| format!("{s}={t:.3}"))
            .collect::<Vec<_>>()
            .join(";");
        vec![
            self.cell.to_string(),
            self.family.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.kind.clone(),
            self.built_kind.clone(),
            self.k.to_string(),
            self.seed.to_string(),
            self.fallback.to_string(),
            self.sampling_rounds.to_string(),
            self.pairs.clone(),
            self.pairs_audited.to_string(),
            self.stretch_bound.to_string(),
            opt(self.stretch_max),
            opt(self.stretch_mean),
            self.violations.to_string(),
            self.entries.to_string(),
            format!("{:.1}", self.budget),
            self.within_budget.to_string(),
            format!("{:.3}", self.build_ms),
            stages,
            self.query_p50_ns.to_string(),
            self.query_p99_ns.to_string(),
        ]
    }
}

/// Least-squares slope of `ln(build_ms)` against `ln(n)` for one
/// `(family, kind, k)` group, over per-size means.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub family: String,
    pub kind: String,
    pub k: usize,
    pub points: usize,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<Row>,
    pub fits: Vec<Fit>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.fields().join(","));
            out.push('\n');
        }
        out
    }

    /// Fitted exponents as `#`-prefixed lines, appended after the rows.
    pub fn fits_text(&self) -> String {
        let mut out = String::new();
        for f in &self.fits {
            let _ = writeln!(
                out,
                "# fit family={} kind={} k={} points={} build_time_exponent={:.3}",
                f.family, f.kind, f.k, f.points, f.exponent
            );
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<_, _> = COLUMNS
                    .iter()
                    .zip(r.fields())
                    .map(|(c, v)| (c.to_string(), serde_json::Value::String(v)))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let fits: Vec<_> = self
            .fits
            .iter()
            .map(|f| {
                serde_json::json!({
                    "family": f.family, "kind": f.kind, "k": f.k,
                    "points": f.points, "build_time_exponent": f.exponent,
                })
            })
            .collect();
        serde_json::json!({ "columns": COLUMNS, "rows": rows, "fits": fits })
    }
}

enum Source {
    Family(Family),
    Fixed(String, Graph),
}

fn cell_source(cell: &Cell) -> anyhow::Result<Source> {
    let given = [cell.family.is_some(), cell.graph.is_some(), cell.edges.is_some()];
    if given.iter().filter(|&&b| b).count() != 1 {
        bail!("each cell needs exactly one of `family`, `graph` or `edges`");
    }
    if let Some(f) = &cell.family {
        let family = Family::parse(f).with_context(|| format!("unknown family {f:?}"))?;
        if cell.n.is_empty() {
            bail!("family cells need at least one size in `n`");
        }
        return Ok(Source::Family(family));
    }
    let loaded = if let Some(path) = &cell.graph {
        let format = match &cell.format {
            Some(f) => Format::parse(f).with_context(|| format!("unknown format {f:?}"))?,
            None => Format::from_path(path),
        };
        load_graph(path, format).with_context(|| format!("loading {}", path.display()))?
    } else {
        let text: String = cell
            .edges
            .as_ref()
            .unwrap()
            .iter()
            .map(|(u, v, w)| format!("{u} {v} {w}\n"))
            .collect();
        crate::io::parse_edge_list(text.as_bytes())?
    };
    let name = cell.graph.as_ref().map_or("inline".into(), |p| p.display().to_string());
    Ok(Source::Fixed(name, prepare(loaded, true).graph))
}

fn edge_target(cell: &Cell, n: usize) -> usize {
    let m = match (cell.m, cell.m_exponent) {
        (Some(m), _) => m,
        (None, Some(e)) => (n as f64).powf(e).round() as usize,
        (None, None) => (cell.m_per_vertex.unwrap_or(4.0) * n as f64).round() as usize,
    };
    m.clamp(n.saturating_sub(1), n * n.saturating_sub(1) / 2)
}

fn parse_pairs(spec: &str, seed: u64) -> anyhow::Result<Option<PairSample>> {
    Ok(match spec {
        "none" => None,
        "all" => Some(PairSample::All),
        s => match s.strip_prefix("sample=") {
            Some(c) => Some(PairSample::Random {
                count: c.parse().with_context(|| format!("bad pair count in {s:?}"))?,
                seed,
            }),
            None => bail!("pairs must be `all`, `sample=N` or `none` (got {s:?})"),
        },
    })
}

pub fn run(scenario: &Scenario) -> anyhow::Result<BenchReport> {
    run_with_progress(scenario, |_| {})
}

/// Runs every cell, calling `progress` after each row.
pub fn run_with_progress(scenario: &Scenario, mut progress: impl FnMut(&Row)) -> anyhow::Result<BenchReport> {
    let mut rows = Vec::new();
    for (idx, cell) in scenario.cells.iter().enumerate() {
        let source = cell_source(cell).with_context(|| format!("cell {idx}"))?;
        let kinds = cell
            .kinds
            .iter()
            .map(|k| parse_kind(k).with_context(|| format!("cell {idx}: unknown kind {k:?}")))
            .collect::<anyhow::Result<Vec<OracleKind>>>()?;
        let mode = match &cell.param_mode {
            Some(m) => parse_mode(m).with_context(|| format!("cell {idx}: unknown param mode {m:?}"))?,
            None => adoracle_core::params::ParamMode::ConstantC,
        };
        let epsilon = match &cell.epsilon {
            Some(e) => Some(parse_rational(e).with_context(|| format!("cell {idx}: bad epsilon {e:?}"))?),
            None => None,
        };
        let (lo, hi) = cell.weights.unwrap_or((1, 100));
        if lo > hi {
            bail!("cell {idx}: empty weight range");
        }
        let sizes: Vec<Option<usize>> = match source {
            Source::Family(_) => cell.n.iter().copied().map(Some).collect(),
            Source::Fixed(..) => vec![None],
        };
        for n in sizes {
            for &s in &cell.seeds {
                let (family, g) = match (&source, n) {
                    (Source::Family(f), Some(n)) => {
                        let gseed = seed::derive(s, 0x6e67_7261_7068);
                        (f.name().to_string(), f.generate(n, edge_target(cell, n), lo..=hi, gseed))
                    }
                    (Source::Fixed(name, g), _) => (name.clone(), g.clone()),
                    _ => unreachable!(),
                };
                for &kind in &kinds {
                    for &k in &cell.k {
                        let cfg = BuildConfig {
                            kind,
                            k,
                            epsilon,
                            kappa: None,
                            mode,
                            seed: s,
                        };
                        let row = measure(idx, &family, &g, &cfg, &cell.pairs, cell.queries)
                            .with_context(|| format!("cell {idx}, kind {}, k={k}, seed={s}", kind.name()))?;
                        progress(&row);
                        rows.push(row);
                    }
                }
            }
        }
    }
    let fits = fit_exponents(&rows);
    Ok(BenchReport { rows, fits })
}

fn measure(
    cell: usize,
    family: &str,
    g: &Graph,
    cfg: &BuildConfig,
    pairs: &str,
    queries: usize,
) -> anyhow::Result<Row> {
    let mut clock = StageClock::start();
    let oracle = build(g, cfg, &mut clock)?;
    let n = g.vertex_count();

    let mut rng = seed::rng(seed::derive(cfg.seed, 0x71_7565_7279), 0);
    let mut latencies = Vec::with_capacity(queries);
    let mut sink = 0u64;
    for _ in 0..queries {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        let t = Instant::now();
        sink = sink.wrapping_add(oracle.query(u, v)?);
        latencies.push(t.elapsed().as_nanos() as u64);
    }
    std::hint::black_box(sink);

    let sample = parse_pairs(pairs, seed::derive(cfg.seed, 0x7061_6972))?;
    let audit = match &sample {
        Some(p) => Some(audit_stretch(&oracle, g, GroundTruth::PerPair(g), p)?),
        None => None,
    };
    let size = audit_size(&oracle);
    let info = oracle.info();
    Ok(Row {
        cell,
        family: family.to_string(),
        n,
        m: g.edge_count(),
        kind: cfg.kind.name().to_string(),
        built_kind: oracle.kind().name().to_string(),
        k: cfg.k,
        seed: cfg.seed,
        fallback: info.fallback,
        sampling_rounds: info.sampling_rounds,
        pairs: sample.map_or("none".into(), |p| p.describe()),
        pairs_audited: audit.as_ref().map_or(0, |a| a.pairs_audited),
        stretch_bound: oracle.stretch_bound(),
        stretch_max: audit.as_ref().map(|a| a.max_stretch),
        stretch_mean: audit.as_ref().map(|a| a.mean_stretch),
        violations: audit.as_ref().map_or(0, |a| a.violation_count),
        entries: size.entries.total(),
        budget: size.budget,
        within_budget: size.within_budget(),
        build_ms: clock.total().as_secs_f64() * 1e3,
        stage_ms: clock.stages.iter().map(|&(s, d)| (s, d.as_secs_f64() * 1e3)).collect(),
        query_p50_ns: quantile(&mut latencies, 0.5),
        query_p99_ns: quantile(&mut latencies, 0.99),
    })
}

fn fit_exponents(rows: &[Row]) -> Vec<Fit> {
    let mut groups: Vec<(String, String, usize)> = rows
        .iter()
        .map(|r| (r.family.clone(), r.kind.clone(), r.k))
        .collect();
    groups.sort();
    groups.dedup();
    let mut fits = Vec::new();
    for (family, kind, k) in groups {
        let mut by_n: Vec<(usize, Vec<f64>)> = Vec::new();
        for r in rows.iter().filter(|r| r.family == family && r.kind == kind && r.k == k) {
            match by_n.iter_mut().find(|(n, _)| *n == r.n) {
                Some((_, v)) => v.push(r.build_ms),
                None => by_n.push((r.n, vec![r.build_ms])),
            }
        }
        let points: Vec<(f64, f64)> = by_n
            .iter()
            .filter(|(n, _)| *n > 1)
            .map(|(n, t)| ((*n as f64).ln(), (t.iter().sum::<f64>() / t.len() as f64).max(1e-6).ln()))
            .collect();
        if points.len() < 2 {
            continue;
        }
        fits.push(Fit {
            family,
            kind,
            k,
            points: points.len(),
            exponent: slope(&points),
        });
    }
    fits
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let len = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / len;
    let my = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Columns of `csv` other than the timing ones, for determinism checks.
pub fn deterministic_columns(csv: &str) -> Vec<Vec<String>> {
    let keep: Vec<usize> = (0..COLUMNS.len())
        .filter(|&i| !TIMING_COLUMNS.contains(&COLUMNS[i]))
        .collect();
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            keep.iter().map(|&i| f.get(i).unwrap_or(&"").to_string()).collect()
        })
        .collect()
}
