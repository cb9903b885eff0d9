//! The seven interchangeable heuristic slots driven by the search loop.

use std::fmt;

use crate::heuristics::WeightPolicy;
use crate::model::{PbConstraint, PboInstance, Var};
use crate::search::{SearchRng, SearchState, WeightTable};

/// Context handed to [`CalculateScoreFn`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreContext {
    /// Whether any feasible assignment has been seen in this run.
    pub found_feasible: bool,
}

/// Tunable constants shared by the slots.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteParams {
    pub weights: WeightPolicy,
    /// Sample size for best-from-multiple-selections escape picks.
    pub bms: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            weights: WeightPolicy::default(),
            bms: 50,
        }
    }
}

pub type InitializeAssignmentFn = fn(&PboInstance, &mut SearchRng) -> Vec<bool>;
/// `(constraint, violation, weight, smoothing) -> penalty`
pub type PenaltyHardFn = fn(&PbConstraint, i64, u64, f64) -> f64;
/// `(objective value, weight, smoothing) -> penalty`
pub type PenaltyObjFn = fn(i64, u64, f64) -> f64;
pub type CalculateScoreFn = fn(f64, f64, &ScoreContext) -> f64;
pub type PickBestVariableFn = fn(&[Var], &SearchState) -> Var;
pub type UpdateWeightsFn = fn(&PboInstance, &SearchState, &SuiteParams, &mut SearchRng, &mut WeightTable);
pub type PickEscapeVariableFn = fn(&PboInstance, &SearchState, &SuiteParams, &mut SearchRng) -> Var;

/// A named slot implementation. The name is recorded in run output.
#[derive(Clone, Copy)]
pub struct Slot<F> {
    pub name: &'static str,
    pub func: F,
}

impl<F> Slot<F> {
    pub const fn new(name: &'static str, func: F) -> Slot<F> {
        Slot { name, func }
    }
}

impl<F> fmt::Debug for Slot<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

/// Names of the seven slots, in the order they appear in the search loop.
pub const SLOT_NAMES: [&str; 7] = [
    "initialize_assignment",
    "penalty_hard",
    "penalty_obj",
    "calculate_score",
    "pick_best_variable",
    "update_weights",
    "pick_escape_variable",
];

#[derive(Debug, Clone)]
pub struct HeuristicSuite {
    pub initialize_assignment: Slot<InitializeAssignmentFn>,
    pub penalty_hard: Slot<PenaltyHardFn>,
    pub penalty_obj: Slot<PenaltyObjFn>,
    pub calculate_score: Slot<CalculateScoreFn>,
    pub pick_best_variable: Slot<PickBestVariableFn>,
    pub update_weights: Slot<UpdateWeightsFn>,
    pub pick_escape_variable: Slot<PickEscapeVariableFn>,
    pub params: SuiteParams,
}

impl HeuristicSuite {
    /// `(slot, implementation)` pairs in loop order.
    pub fn slot_ids(&self) -> [(&'static str, &'static str); 7] {
        [
            (SLOT_NAMES[0], self.initialize_assignment.name),
            (SLOT_NAMES[1], self.penalty_hard.name),
            (SLOT_NAMES[2], self.penalty_obj.name),
            (SLOT_NAMES[3], self.calculate_score.name),
            (SLOT_NAMES[4], self.pick_best_variable.name),
            (SLOT_NAMES[5], self.update_weights.name),
            (SLOT_NAMES[6], self.pick_escape_variable.name),
        ]
    }
}

impl Default for HeuristicSuite {
    fn default() -> Self {
        crate::heuristics::baseline_suite()
    }
}
