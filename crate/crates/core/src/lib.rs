//! Approximate distance oracles for weighted undirected graphs.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! - [`graph`]: compact adjacency graphs, validation and zero-edge contraction;
//! - [`sssp`]: Dijkstra, nearest-sample assignment, vertex sampling and the
//!   sparsified graph `G_S`;
//! - [`spanner`]: the randomized cluster spanner of Baswana and Sen;
//! - [`tz`]: the Thorup-Zwick oracle, including the restricted variant that
//!   keeps bunches only for a query set;
//! - [`params`] and [`composite`]: parameter rules and assembly of the
//!   warm-up, small-k and near-linear composite oracles;
//! - [`audit`]: exact ground truth, stretch and size audits;
//! - [`generators`]: seeded random graph families used by tests and benches.
//!
//! All distances are integers. Every build is a pure function of its inputs
//! and a `u64` seed.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod audit;
pub mod composite;
pub mod generators;
pub mod graph;
pub mod params;
pub mod seed;
pub mod spanner;
pub mod sssp;
pub mod tz;

pub use composite::{BuildObserver, CompositeOracle, NoopObserver, OracleKind};
pub use graph::{Graph, GraphError, ValidationReport};
pub use tz::TzOracle;

/// Edge weight and path length, in abstract integer distance units.
pub type Distance = u64;

/// Dense vertex index in `[0, n)`.
pub type VertexId = usize;

/// Sentinel for "no path".
pub const INFINITY: Distance = u64::MAX;

/// Exact rational used for sampling exponents and epsilon.
pub type Rational = num_rational::Ratio<u64>;
