//! Pattern-division random access (PDRA) for massive-MIMO machine-type access.
//!
//! Pilots are built by superposing `L` cyclically shifted Zadoff-Chu
//! sequences drawn from one root. The crate provides:
//!
//! - [`zc`]: root sequences, cyclic shifts, shift planning and correlation.
//! - [`combinatorics`] and [`pool`]: the indexed pattern pool with O(1)
//!   unranking, lazy waveform materialization and a cross-correlation table.
//! - [`analytic`]: the closed-form success probability, evaluated in the log
//!   domain.
//! - [`geometry`]: hexagonal layout, UE drops, pathloss and Rayleigh channels.
//! - [`sim`]: the Monte-Carlo engine (matched-filter estimation and detection)
//!   and the reproducible parallel campaign runner.

pub mod analytic;
pub mod combinatorics;
pub mod error;
pub mod geometry;
pub mod pool;
pub mod sim;
pub mod units;
pub mod zc;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use analytic::{AnalyticParams, CollisionEventProbs, Scheme};
pub use geometry::{CellLayout, ChannelKind, ChannelModelSpec, UePlacement};
pub use pool::{Pattern, PatternId, PilotPool, PoolDescriptor};
pub use sim::{
    Activity, ReceiverPath, ScenarioConfig, SweepResult, TaggedEvent, TrialOutcome,
};
pub use zc::{ShiftPlan, ZcConfig, ZcSequence};
