//! Desk-scale simulations of composed quantum algorithms.
//!
//! - [`state`]: dense state vectors, the uniform (Walsh-Hadamard) transform
//!   and phase oracles.
//! - [`promise`]: the promise problems `g` and `h`, composed instances, the
//!   Las Vegas algorithm for `h`, and majority-vote error.
//! - [`graph`]: weighted graphs as electric networks: total weight,
//!   minimum-energy flows, effective resistance, hitting times.
//! - [`walk`]: the electric-network quantum walk and the line purifier.
//! - [`compose`]: Deutsch-Jozsa, its early-stopped composition with `h`,
//!   composition cost models, and the majority-vs-purifier table.

#![allow(clippy::needless_range_loop)]

pub mod compose;
pub mod error;
pub mod graph;
pub mod promise;
pub mod state;
pub mod walk;

pub use compose::{
    classical_avg_cost, majority_vs_purifier_table, quantum_naive_cost, quantum_walk_cost,
    run_composed_dj_h, run_dj, ComposedRunResult, CostProfile, OverheadRow, StopTime,
};
pub use error::{Error, Result};
pub use graph::{Flow, HittingTimes, McEstimate, WeightedGraph};
pub use promise::{
    las_vegas_h, las_vegas_h_ordered, majority_vote_error, BitString, ComposedInstance, GInput,
    HInput, LasVegasTrace,
};
pub use state::{Amplitude, StateVector, UnitaryMatrix};
pub use walk::{
    decide_purifier, perturbation_bound, purifier_complexity, purifier_record, EdgeSpace,
    PurifierLine, PurifierRecord, WalkOperator,
};
