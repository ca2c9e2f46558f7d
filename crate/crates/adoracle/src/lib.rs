//! Std companion to `adoracle-core`: graph file formats, the binary oracle
//! codec, build pipeline, JSON reports, the benchmark runner and the CLI.

pub mod bench;
pub mod codec;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod timing;
