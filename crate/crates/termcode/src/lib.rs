//! Deterministic simulator for two-party message exchange with adaptive
//! termination over adversarial channels.
//!
//! The crate is organized as five layers:
//!
//! - [`ecc`]: prefix-coherent evaluation codes with erasure-aware
//!   exhaustive decoding.
//! - [`engine`]: the round-by-round session loop, transcripts, and
//!   noise-rate accounting under four termination models.
//! - [`protocols`]: endpoint implementations for the exchange protocols
//!   and the naive baselines they improve on.
//! - [`adversaries`]: channel strategies, from seeded random corruption to
//!   counterfactual confusion attacks.
//! - [`harness`]: config-driven sweeps, CSV/JSON reporting, attack suites,
//!   code audits, and transcript replay.

pub mod adversaries;
pub mod ecc;
pub mod engine;
pub mod harness;
pub mod protocols;
