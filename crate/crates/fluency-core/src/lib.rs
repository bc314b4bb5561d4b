//! Analysis toolkit for phonemic ("letter F") verbal-fluency data.
//!
//! The crate covers the full pipeline: ingesting and screening raw fluency
//! responses ([`corpus`]), simulating participants against chat-completion
//! providers ([`simharness`]), participant-level adherence and diversity
//! metrics ([`participant_metrics`]), item-level Zipf fits and lexical-norm
//! models ([`item_metrics`]), TMFG co-occurrence networks with null-model and
//! bootstrap comparisons ([`netcomp`]), mixed-model ensemble sampling
//! ([`ensemble`]), and report emission ([`report`], [`svg`]).
//!
//! All randomized procedures draw per-iteration seeds through [`seed`], so
//! results are reproducible bit-for-bit for a fixed base seed regardless of
//! evaluation order.

pub mod corpus;
pub mod ensemble;
pub mod error;
pub mod item_metrics;
pub mod netcomp;
pub mod participant_metrics;
pub mod report;
pub mod seed;
pub mod simharness;
pub mod stats;
pub mod svg;

pub use error::{Error, Result};
