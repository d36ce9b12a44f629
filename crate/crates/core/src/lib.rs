//! Perplexity measurement for source code across programming languages.
//!
//! The crate covers the whole path from a project manifest to a report:
//!
//! - [`corpus`]: manifest filtering, extension-based classification,
//!   content deduplication and seeded stratified sampling;
//! - [`clean`]: encoding detection and comment stripping driven by
//!   per-language comment grammars;
//! - [`tokenize`]: byte, whitespace and external tokenizers, token
//!   statistics and an on-disk token cache;
//! - [`engine`]: context-size derivation, scorers (uniform, n-gram,
//!   external) and stride-1 sliding-window perplexity;
//! - [`analysis`] and [`report`]: per-language summaries, rank
//!   correlations, cross-model matrices, CSV tables and SVG charts;
//! - [`protocol`]: the line-delimited JSON protocol spoken by external
//!   scorers, with a client, a conformance check and a mock server;
//! - [`config`] and [`pipeline`]: the TOML run configuration and the
//!   `curate` / `perplexity` / `analyze` / `protocol-check` commands.

pub mod analysis;
pub mod clean;
pub mod config;
pub mod corpus;
pub mod engine;
pub mod pipeline;
pub mod protocol;
pub mod report;
pub mod rng;
pub mod tokenize;

pub use corpus::{FileKey, SourceFile};
pub use engine::{EngineConfig, FileScore, Scorer};
