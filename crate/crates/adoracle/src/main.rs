use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use adoracle::bench::{self, Scenario};
use adoracle::codec::{self, OracleFile};
use adoracle::io::{load_graph, write_edge_list, Format};
use adoracle::pipeline::{build, parse_kind, parse_mode, parse_rational, prepare, BuildConfig, Prepared};
use adoracle::report::audit_json;
use adoracle::timing::StageClock;
use adoracle_core::audit::{audit_size, audit_stretch, GroundTruth, PairSample};
use adoracle_core::spanner::build_spanner;

#[derive(Parser)]
#[command(name = "adoracle", version, about = "Approximate distance oracles for weighted undirected graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an oracle from a graph file and write it to disk.
    Build {
        #[arg(long)]
        input: PathBuf,
        /// `dimacs` or `edge-list`; inferred from the extension when omitted.
        #[arg(long)]
        format: Option<String>,
        /// tz, warmup, small-k or near-linear.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        k: usize,
        /// Spanner slack for the warm-up oracle, e.g. `1/3` or `0.25`.
        #[arg(long)]
        epsilon: Option<String>,
        /// Level count for tz and warmup (defaults to k).
        #[arg(long)]
        kappa: Option<usize>,
        #[arg(long, default_value = "paper-c")]
        param_mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Keep only the largest connected component.
        #[arg(long)]
        largest_component: bool,
    },
    /// Answer distance queries, one `u v estimate` line per pair.
    Query {
        #[arg(long)]
        oracle: PathBuf,
        /// A file of `u v` lines, or a single `u,v` pair. Ids are input labels.
        #[arg(long)]
        pairs: String,
    },
    /// Check an oracle against exact distances; exits 1 on any violation.
    Audit {
        #[arg(long)]
        oracle: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        format: Option<String>,
        /// `all` or `sample=N`.
        #[arg(long, default_value = "sample=100000")]
        pairs: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a benchmark scenario (TOML or JSON) and write CSV rows.
    Bench {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write rows and fitted exponents as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Build a spanner and write its edges as an edge list.
    Spanner {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        format: Option<String>,
        /// Spanner parameter; stretch is 2k'-1.
        #[arg(long)]
        k_prime: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        largest_component: bool,
    },
}

fn format_for(path: &Path, format: &Option<String>) -> anyhow::Result<Format> {
    match format {
        Some(f) => Format::parse(f).with_context(|| format!("unknown format {f:?}")),
        None => Ok(Format::from_path(path)),
    }
}

fn load_prepared(path: &Path, format: &Option<String>, largest: bool) -> anyhow::Result<Prepared> {
    let loaded = load_graph(path, format_for(path, format)?).with_context(|| format!("loading {}", path.display()))?;
    Ok(prepare(loaded, largest))
}

fn read_oracle(path: &Path) -> anyhow::Result<OracleFile> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    codec::decode(&bytes).with_context(|| format!("decoding {}", path.display()))
}

fn parse_pair(line: &str) -> Option<(u64, u64)> {
    let mut it = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty());
    let pair = (it.next()?.parse().ok()?, it.next()?.parse().ok()?);
    it.next().is_none().then_some(pair)
}

fn read_pairs(spec: &str) -> anyhow::Result<Vec<(u64, u64)>> {
    let path = Path::new(spec);
    if !path.exists() {
        return parse_pair(spec)
            .map(|p| vec![p])
            .with_context(|| format!("{spec:?} is neither a file nor a `u,v` pair"));
    }
    let text = fs::read_to_string(path)?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        pairs.push(parse_pair(body).with_context(|| format!("{}:{}: expected `u v`", spec, i + 1))?);
    }
    Ok(pairs)
}

fn parse_sample(spec: &str, seed: u64) -> anyhow::Result<PairSample> {
    if spec == "all" {
        return Ok(PairSample::All);
    }
    match spec.strip_prefix("sample=").and_then(|c| c.parse().ok()) {
        Some(count) => Ok(PairSample::Random { count, seed }),
        None => bail!("--pairs must be `all` or `sample=N`"),
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Build {
            input,
            format,
            kind,
            k,
            epsilon,
            kappa,
            param_mode,
            seed,
            out,
            largest_component,
        } => {
            let prepared = load_prepared(&input, &format, largest_component)?;
            let cfg = BuildConfig {
                kind: parse_kind(&kind).with_context(|| format!("unknown kind {kind:?}"))?,
                k,
                epsilon: match epsilon {
                    Some(e) => Some(parse_rational(&e).with_context(|| format!("bad epsilon {e:?}"))?),
                    None => None,
                },
                kappa,
                mode: parse_mode(&param_mode).with_context(|| format!("unknown param mode {param_mode:?}"))?,
                seed,
            };
            let mut clock = StageClock::start();
            let oracle = build(&prepared.graph, &cfg, &mut clock)?;
            let file = OracleFile {
                oracle,
                labels: Some(prepared.labels),
            };
            let (bytes, entries) = codec::encode_counted(&file);
            fs::write(&out, &bytes).with_context(|| format!("writing {}", out.display()))?;
            let info = file.oracle.info();
            eprintln!(
                "built {} (requested {}{}) n={} m={} entries={} stretch<={} bytes={}",
                file.oracle.kind().name(),
                info.requested.name(),
                if info.fallback { ", fell back" } else { "" },
                info.graph_vertices,
                info.graph_edges,
                entries,
                file.oracle.stretch_bound(),
                bytes.len()
            );
            for (stage, d) in &clock.stages {
                eprintln!("  {stage}: {:.3} ms", d.as_secs_f64() * 1e3);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Query { oracle, pairs } => {
            let file = read_oracle(&oracle)?;
            let resolve = |label: u64| -> anyhow::Result<usize> {
                match &file.labels {
                    Some(map) => map
                        .resolve(label)
                        .map(|v| v as usize)
                        .with_context(|| format!("vertex {label} is not in the oracle")),
                    None => Ok(label as usize),
                }
            };
            let stdout = std::io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            for (a, b) in read_pairs(&pairs)? {
                let d = file.oracle.query(resolve(a)?, resolve(b)?)?;
                writeln!(out, "{a} {b} {d}")?;
            }
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Audit {
            oracle,
            graph,
            format,
            pairs,
            seed,
            report,
        } => {
            let file = read_oracle(&oracle)?;
            let largest = file.labels.as_ref().is_some_and(|l| l.largest_component);
            let prepared = load_prepared(&graph, &format, largest)?;
            if let Some(labels) = &file.labels {
                if labels != &prepared.labels {
                    bail!("graph does not match the one the oracle was built from");
                }
            }
            let sample = parse_sample(&pairs, seed)?;
            let g = &prepared.graph;
            let start = Instant::now();
            let mut result = audit_stretch(&file.oracle, g, GroundTruth::PerPair(g), &sample)?;
            result.timings_ns.push(("audit", start.elapsed().as_nanos() as u64));
            result.size = Some(audit_size(&file.oracle));
            result.seed = Some(file.oracle.info().seed);
            let json = serde_json::to_string_pretty(&audit_json(&result, Some(&file.oracle)))?;
            match report {
                Some(path) => fs::write(&path, json + "\n")?,
                None => println!("{json}"),
            }
            eprintln!(
                "{} pairs, max stretch {:.4} (bound {}), {} violations",
                result.pairs_audited, result.max_stretch, result.stretch_bound, result.violation_count
            );
            Ok(if result.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Bench { scenario, out, json } => {
            let s = Scenario::load(&scenario)?;
            let report = bench::run_with_progress(&s, |r| {
                eprintln!("cell {} {} n={} {} k={} seed={}: {:.1} ms", r.cell, r.family, r.n, r.kind, r.k, r.seed, r.build_ms)
            })?;
            fs::write(&out, report.to_csv()).with_context(|| format!("writing {}", out.display()))?;
            print!("{}", report.fits_text());
            if let Some(path) = json {
                fs::write(&path, serde_json::to_string_pretty(&report.to_json())? + "\n")?;
            }
            let violations: usize = report.rows.iter().map(|r| r.violations).sum();
            Ok(if violations == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Spanner {
            input,
            format,
            k_prime,
            seed,
            out,
            largest_component,
        } => {
            let prepared = load_prepared(&input, &format, largest_component)?;
            let h = build_spanner(&prepared.graph, k_prime, seed)?;
            // write edges with one representative input label per vertex
            let mut label = vec![0u64; prepared.graph.vertex_count()];
            for (l, m) in prepared.labels.labels.iter().zip(&prepared.labels.mapped).rev() {
                if let Some(v) = m {
                    label[*v as usize] = *l;
                }
            }
            let f = BufWriter::new(fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?);
            write_edge_list(h.graph(), Some(&label), f)?;
            eprintln!(
                "spanner k'={} kept {} of {} edges",
                k_prime,
                h.edge_count(),
                prepared.graph.edge_count()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
