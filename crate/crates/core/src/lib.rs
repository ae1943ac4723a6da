//! Limit values of two-state zero-sum Markov games with one informed player.
//!
//! The pipeline goes from a [`GameSpec`] through the one-shot value oracle
//! [`UOracle`], its concave envelope, and the alternating sliding/revealing
//! construction in [`solver`] to a [`PiecewiseValue`]. The result can be
//! checked against the characterization conditions and a discrete-time
//! value iteration ([`verify`]) and against Monte-Carlo simulation of the
//! optimal belief process ([`sim`]).

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod envelope;
pub mod error;
pub mod game;
pub mod io;
pub mod matrix_game;
pub mod oracle;
pub mod sim;
pub mod solver;
pub mod value;
pub mod verify;
pub use envelope::{initial_interval, initial_segment, upper_concave_envelope, ConcaveEnvelope, InitialSegment};
pub use error::{Error, Result};
pub use game::{discrete_step_params, validate_spec, DerivedParams, DiscreteParams, GameSpec, RawGame};
pub use matrix_game::{matrix_game_value, MatrixGameSolution};
pub use oracle::{eval_u, UOracle};
pub use sim::{build_policy, estimate_value, sample_trajectory, RevelationPolicy, SimOptions};
pub use solver::{solve_limit_value, AlgorithmTrace, Solution, SolveOptions};
pub use value::{DenseCurve, PiecewiseValue, Segment, SegmentKind};
pub use verify::{check_characterization, compare_to_oracle, discrete_oracle_value, CharReport, OracleGrid};
