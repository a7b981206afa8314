//! Detection and analysis of net-zero and emission-reduction targets in text.
//!
//! The crate covers the whole workflow: building a cleaned three-class
//! dataset ([`ingest`]), training and cross-validating classifiers
//! ([`classifier`]), a zero-shot chat-model baseline ([`llm`]), extraction of
//! target ambitions with an extractive Q&A backend ([`ambition`]), two-stage
//! corpus analysis over transcripts ([`corpus`]) and the review loop that
//! feeds misclassifications back to annotators ([`hitl`]).

pub mod ambition;
pub mod classifier;
pub mod corpus;
pub mod error;
pub mod hitl;
pub mod ingest;
pub mod label;
pub mod llm;
pub mod plot;
pub mod seed;
pub mod synth;

pub use error::{Error, Result};
pub use label::{BinaryLabel, ClassLabel, ClimateLabel, TargetLabel};
