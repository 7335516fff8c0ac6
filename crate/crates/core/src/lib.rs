//! Deterministic tweet-corpus mining: domain filtering, categorization,
//! sentiment scoring and co-occurrence network analysis.

pub mod categorize;
pub mod clustering;
pub mod community;
pub mod config;
pub mod corpus;
pub mod domainfilter;
pub mod error;
pub mod export;
pub mod graph;
pub mod netmetrics;
pub mod pipeline;
pub mod preprocess;
pub mod sentiment;
pub mod synth;
pub mod topics;
pub mod wordgraph;

pub use error::{Error, Result};
