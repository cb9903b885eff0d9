//! Stochastic local search for pseudo-Boolean optimization.
//!
//! The solver is split into seven replaceable heuristic slots (see
//! [`search::HeuristicSuite`]) driven by a fixed search loop. Around it sit
//! an OPB reader/writer, a benchmark harness computing competition-style
//! metrics, and the command-line front end used by the harness.

pub mod bench;
pub mod cli;
pub mod heuristics;
pub mod model;
pub mod opb;
pub mod search;

pub use heuristics::{baseline_suite, greedy_only_suite};
pub use model::{Assignment, Literal, Objective, PbConstraint, PboInstance, RawConstraint, RelOp, Term, Var};
pub use search::{run_search, HeuristicSuite, SearchOutcome, SearchStatus};
