//! Detection of priming events: bursty topic clusters in a timestamped
//! document stream whose burst intensity co-moves with the volatility of a
//! numeric index series.
//!
//! The pipeline has two phases. Phase one turns raw documents into
//! influential topics: documents are tokenized, stemmed and windowed by the
//! index dates ([`corpus`]), per-feature burstiness is measured against a
//! binomial background model ([`burst`]), the index is converted into a
//! probabilized volatility series ([`volatility`]), and features are grouped
//! greedily into topics by document overlap, burst-shape similarity and
//! volatility mass ([`topics`]). Phase two turns topics into events: each
//! window's bursty topics are clustered by document overlap ([`clustering`]),
//! clusters are chained across consecutive windows into paths seeded at
//! volatility peaks, and overlapping paths are merged into ranked events
//! ([`events`]).

pub mod burst;
pub mod clustering;
pub mod corpus;
pub mod error;
pub mod events;
pub mod pipeline;
pub mod stem;
pub mod synth;
pub mod topics;
pub mod volatility;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
