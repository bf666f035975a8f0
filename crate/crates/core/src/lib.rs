//! Matrix-product simulation of probabilistic logic circuits.
//!
//! A distribution over `n` bits is held as a chain of site matrices,
//! `P(x) = M_1^{x_1} M_2^{x_2} ... M_n^{x_n}`, and gates act locally on one
//! site or on a neighbouring pair. On top of the simulator sit a preimage
//! search and an exact solution counter for deterministic circuits, a
//! tracker for the height profile of the bond dimensions, and a dense
//! brute-force oracle for checking small cases.

pub mod circuit;
pub mod error;
pub mod gates;
pub mod heights;
mod linalg;
pub mod oracle;
pub mod search;
pub mod state;

pub use circuit::{
    execute, execute_logged, execute_observed, parse_circuit, route_nearest_neighbor, Circuit, CircuitOp,
};
pub use error::{Error, ParseError, Result};
pub use gates::{assemble_gate_blocks, svd_split, OneBitGate, SvdConfig, TwoBitGate};
pub use heights::{BoundReport, HeightProfile, StepRecord};
pub use oracle::{
    evaluate_deterministic, oracle_count, oracle_count_with_prefix, oracle_execute, DenseDistribution, ORACLE_MAX_BITS,
};
pub use search::{count_solutions, measure_count, search_preimage, CountMeasurement, SearchOutcome, SearchStep};
pub use state::{BitAssignment, MpsState, SiteMatrices};
