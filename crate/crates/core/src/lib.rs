//! Population inversion and entanglement dynamics of single and double
//! Jaynes-Cummings models whose atom-cavity couplings carry quenched disorder.
//!
//! The crate is organized bottom-up:
//!
//! - [`disorder`]: the four disorder distributions, deterministic per-realization
//!   streams, and the mean/median quenched-averaging engine.
//! - [`entanglement`]: von Neumann entropy, Wootters concurrence, partial traces.
//! - [`singlejc`]: photon statistics, clean and disorder-averaged inversion,
//!   atom-photon entanglement.
//! - [`doublejc`]: closed-form atom-atom concurrences, sudden-death detection and
//!   region scans.
//! - [`coupled`]: truncated-basis evolution with Ising or XY atom-atom couplings.
//! - [`cli`]: configuration, orchestration, CSV/JSON output and plot scripts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coupled;
pub mod disorder;
pub mod doublejc;
pub mod entanglement;
mod error;
pub mod series;
pub mod singlejc;
pub mod truncated;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
