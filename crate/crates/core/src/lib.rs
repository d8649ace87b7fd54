//! Pulse-level simulation of quantum information transfer between a
//! Majorana-based topological qubit and a superconducting flux qubit.
//!
//! The crate is layered bottom-up:
//!
//! - [`hilbert`]: dense operators and states on C² ⊗ C^N,
//! - [`device`]: circuit and wire parameters to couplings g, g′ and E(φ),
//! - [`dynamics`]: Lindblad evolution under pulse schedules,
//! - [`gates`]: pulse-area gates, CP synthesis and local invariants,
//! - [`experiment`]: scenario configs, sweeps, robustness runs and output files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod device;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod gates;
pub mod hilbert;
pub mod units;

pub use error::{Error, Result};
