//! The local search loop, generic over a [`HeuristicSuite`].
//!
//! Each iteration records the current assignment if it is a new best
//! feasible solution, then flips either the best improving variable or,
//! at a local optimum, updates weights and flips an escape variable.
//! Slacks and scores are maintained incrementally; [`full_recompute`]
//! rebuilds them from scratch for verification.

mod engine;
mod state;
mod suite;

pub use engine::{
    full_recompute, run_search, run_search_with, ScoreSnapshot, Search, SearchError, SearchLimits,
    SearchOptions, SearchOutcome, SearchStatus, SCORE_EPS,
};
pub use state::{SearchState, WeightTable};
pub use suite::{
    CalculateScoreFn, HeuristicSuite, InitializeAssignmentFn, PenaltyHardFn, PenaltyObjFn,
    PickBestVariableFn, PickEscapeVariableFn, ScoreContext, Slot, SuiteParams, UpdateWeightsFn,
    SLOT_NAMES,
};

/// ChaCha with 8 rounds, seeded through `seed_from_u64`. Its output stream
/// is fixed by the algorithm, so trajectories reproduce across builds.
pub type SearchRng = rand_chacha::ChaCha8Rng;
