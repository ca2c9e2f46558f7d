//! Input normalization and oracle construction from a configuration.

use adoracle_core::composite::{
    build_near_linear, build_plain, build_small_k, build_warmup, CompositeError, CompositeOracle, OracleKind,
};
use adoracle_core::graph::{contract_zero_edges, largest_component, Graph};
use adoracle_core::params::ParamMode;
use adoracle_core::{BuildObserver, Rational};

use crate::codec::LabelMap;
use crate::io::LoadedGraph;

/// Normalized graph plus the map from input labels to its vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prepared {
    pub graph: Graph,
    pub labels: LabelMap,
}

/// Contracts zero-weight edges, then optionally keeps only the largest
/// connected component.
pub fn prepare(loaded: LoadedGraph, keep_largest_component: bool) -> Prepared {
    let LoadedGraph { graph, labels } = loaded;
    let contraction = contract_zero_edges(&graph);
    let contracted = contraction.graph.vertex_count() != graph.vertex_count();
    let mut mapped: Vec<Option<u32>> = contraction.merge_map.iter().map(|&c| Some(c as u32)).collect();
    let mut graph = contraction.graph;
    if keep_largest_component {
        let component = largest_component(&graph);
        for m in &mut mapped {
            *m = m.and_then(|c| component.map[c as usize]).map(|v| v as u32);
        }
        graph = component.graph;
    }
    Prepared {
        graph,
        labels: LabelMap {
            labels,
            mapped,
            contracted,
            largest_component: keep_largest_component,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildConfig {
    pub kind: OracleKind,
    pub k: usize,
    pub epsilon: Option<Rational>,
    /// Level count for `tz` and `warmup`; defaults to `k`.
    pub kappa: Option<usize>,
    pub mode: ParamMode,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("--epsilon is required for the warm-up oracle")]
    MissingEpsilon,
    #[error("--kappa applies only to the tz and warmup kinds")]
    KappaNotApplicable,
    #[error(transparent)]
    Build(#[from] CompositeError),
}

pub fn build(g: &Graph, cfg: &BuildConfig, observer: &mut dyn BuildObserver) -> Result<CompositeOracle, ConfigError> {
    let levels = cfg.kappa.unwrap_or(cfg.k);
    if cfg.kappa.is_some() && !matches!(cfg.kind, OracleKind::Plain | OracleKind::Warmup) {
        return Err(ConfigError::KappaNotApplicable);
    }
    Ok(match cfg.kind {
        OracleKind::Plain => build_plain(g, levels, cfg.seed, observer)?,
        OracleKind::Warmup => {
            let eps = cfg.epsilon.ok_or(ConfigError::MissingEpsilon)?;
            build_warmup(g, levels, eps, cfg.seed, observer)?
        }
        OracleKind::SmallK => build_small_k(g, cfg.k, cfg.seed, observer)?,
        OracleKind::NearLinear => build_near_linear(g, cfg.k, cfg.mode, cfg.seed, observer)?,
    })
}

pub fn parse_kind(s: &str) -> Option<OracleKind> {
    OracleKind::parse(s)
}

pub fn parse_mode(s: &str) -> Option<ParamMode> {
    match s {
        "paper-c" => Some(ParamMode::ConstantC),
        "large-k" => Some(ParamMode::LargeK),
        _ => None,
    }
}

pub fn mode_name(m: ParamMode) -> &'static str {
    match m {
        ParamMode::ConstantC => "paper-c",
        ParamMode::LargeK => "large-k",
    }
}

/// Parses `3`, `1/3` or `0.25` as an exact non-negative rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let (n, d): (u64, u64) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
        return (d != 0).then(|| Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().ok()? };
        let den = 10u64.pow(frac.len() as u32);
        let num = int.checked_mul(den)?.checked_add(frac.parse().ok()?)?;
        return Some(Rational::new(num, den));
    }
    s.parse().ok().map(Rational::from_integer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_edge_list;
    use adoracle_core::NoopObserver;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/3"), Some(Rational::new(1, 3)));
        assert_eq!(parse_rational("0.25"), Some(Rational::new(1, 4)));
        assert_eq!(parse_rational(".5"), Some(Rational::new(1, 2)));
        assert_eq!(parse_rational("2"), Some(Rational::from_integer(2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("-1"), None);
        assert_eq!(parse_rational("1."), None);
    }

    #[test]
    fn prepare_contracts_and_maps_labels() {
        let loaded = parse_edge_list("10 20 0\n20 30 4\n40 50 1\n".as_bytes()).unwrap();
        let p = prepare(loaded.clone(), false);
        assert_eq!(p.graph.vertex_count(), 4);
        assert!(p.labels.contracted);
        assert_eq!(p.labels.resolve(10), p.labels.resolve(20));
        let p = prepare(loaded, true);
        assert_eq!(p.graph.vertex_count(), 2);
        assert_eq!(p.labels.resolve(40), None);
        assert_eq!(p.labels.resolve(10), Some(0));
        assert_eq!(p.labels.resolve(30), Some(1));
    }

    #[test]
    fn config_checks() {
        let g = Graph::from_edges(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let mut cfg = BuildConfig {
            kind: OracleKind::Warmup,
            k: 2,
            epsilon: None,
            kappa: None,
            mode: ParamMode::ConstantC,
            seed: 1,
        };
        assert_eq!(build(&g, &cfg, &mut NoopObserver).unwrap_err(), ConfigError::MissingEpsilon);
        cfg.kind = OracleKind::SmallK;
        cfg.k = 3;
        cfg.kappa = Some(2);
        assert_eq!(build(&g, &cfg, &mut NoopObserver).unwrap_err(), ConfigError::KappaNotApplicable);
        cfg.kind = OracleKind::Plain;
        let o = build(&g, &cfg, &mut NoopObserver).unwrap();
        assert_eq!(o.k(), 2);
    }
}
