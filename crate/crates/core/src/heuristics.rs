//! Baseline implementations of the seven heuristic slots, plus a few
//! alternatives selectable by name.
//!
//! Penalties follow the smoothed scheme: a violated constraint costs
//! `w(c) * viol(c) / smooth(c)` and the objective costs
//! `w(o) * obj / smooth(o)`. A variable's hscore (oscore) is the drop in
//! the hard (objective) penalty caused by flipping it. The objective is
//! ignored by the score until the first feasible assignment is seen.
//!
//! Each baseline slot body sits between `// SLOT-BEGIN <name>` and
//! `// SLOT-END <name>` markers. Tools that rewrite slot implementations
//! replace only the text between a pair of markers.

use rand::Rng;
use thiserror::Error;

use crate::model::{PbConstraint, PboInstance, Var};
use crate::search::{
    CalculateScoreFn, HeuristicSuite, InitializeAssignmentFn, PenaltyHardFn, PenaltyObjFn,
    PickBestVariableFn, PickEscapeVariableFn, ScoreContext, SearchRng, SearchState, Slot,
    SuiteParams, UpdateWeightsFn, WeightTable, SLOT_NAMES,
};

/// Per-constraint and objective divisors that put penalties of
/// differently scaled constraints on a common footing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SmoothingTable {
    hard: Vec<f64>,
    obj: f64,
}

impl SmoothingTable {
    /// `smooth(c) = max(1, mean coefficient of c)` and
    /// `smooth(o) = max(1, mean objective coefficient)`.
    pub fn for_instance(instance: &PboInstance) -> SmoothingTable {
        let mean = |sum: i64, len: usize| {
            if len == 0 {
                1.0
            } else {
                (sum as f64 / len as f64).max(1.0)
            }
        };
        let hard = instance
            .constraints()
            .iter()
            .map(|c| mean(c.coefficient_sum(), c.terms().len()))
            .collect();
        let o = instance.objective();
        let obj = mean(o.terms().iter().map(|t| t.coef).sum(), o.terms().len());
        SmoothingTable { hard, obj }
    }

    #[inline]
    pub fn hard(&self, constraint: usize) -> f64 {
        self.hard[constraint]
    }

    pub fn obj(&self) -> f64 {
        self.obj
    }
}

/// Constants of the weighting scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightPolicy {
    pub hard_increment: u64,
    pub obj_increment: u64,
    /// `None` means `max(1, ceil(mean objective coefficient))`.
    pub obj_weight_cap: Option<u64>,
    /// Probability of decaying hard weights instead of increasing them.
    pub smoothing_probability: f64,
}

impl Default for WeightPolicy {
    fn default() -> Self {
        WeightPolicy {
            hard_increment: 1,
            obj_increment: 1,
            obj_weight_cap: None,
            smoothing_probability: 0.0,
        }
    }
}

impl WeightPolicy {
    pub fn obj_cap(&self, instance: &PboInstance) -> u64 {
        self.obj_weight_cap.unwrap_or_else(|| {
            let terms = instance.objective().terms();
            if terms.is_empty() {
                return 1;
            }
            let sum: u128 = terms.iter().map(|t| t.coef as u128).sum();
            let len = terms.len() as u128;
            (sum.div_ceil(len) as u64).max(1)
        })
    }
}

/// Orders candidates: higher score first, then least recently flipped,
/// then lower variable number.
#[inline]
pub fn prefers(state: &SearchState, a: Var, b: Var) -> bool {
    let (sa, sb) = (state.score(a), state.score(b));
    if sa != sb {
        return sa > sb;
    }
    let (aa, ab) = (state.age(a), state.age(b));
    if aa != ab {
        return aa < ab;
    }
    a < b
}

fn best_of(state: &SearchState, vars: impl IntoIterator<Item = Var>) -> Option<Var> {
    vars.into_iter()
        .fold(None, |best, v| match best {
            Some(b) if !prefers(state, v, b) => Some(b),
            _ => Some(v),
        })
}

fn random_var(instance: &PboInstance, rng: &mut SearchRng) -> Var {
    Var::from_index(rng.random_range(0..instance.num_vars()))
}

/// Best of up to `bms` samples (with replacement) from `pool`; the whole
/// pool when it is no larger than `bms`.
fn bms_pick(state: &SearchState, pool: &[Var], bms: usize, rng: &mut SearchRng) -> Option<Var> {
    if pool.is_empty() {
        return None;
    }
    if pool.len() <= bms {
        best_of(state, pool.iter().copied())
    } else {
        best_of(
            state,
            (0..bms.max(1)).map(|_| pool[rng.random_range(0..pool.len())]),
        )
    }
}

// SLOT-BEGIN initialize_assignment
/// Every variable independently 0 or 1 with equal probability.
pub fn initialize_assignment(instance: &PboInstance, rng: &mut SearchRng) -> Vec<bool> {
    (0..instance.num_vars()).map(|_| rng.random_bool(0.5)).collect()
}
// SLOT-END initialize_assignment

// SLOT-BEGIN penalty_hard
pub fn penalty_hard(_c: &PbConstraint, violation: i64, weight: u64, smooth: f64) -> f64 {
    weight as f64 * violation as f64 / smooth
}
// SLOT-END penalty_hard

// SLOT-BEGIN penalty_obj
pub fn penalty_obj(obj: i64, weight: u64, smooth: f64) -> f64 {
    weight as f64 * obj as f64 / smooth
}
// SLOT-END penalty_obj

// SLOT-BEGIN calculate_score
/// `hscore + oscore`, with the objective part ignored until a feasible
/// assignment has been found.
pub fn calculate_score(hscore: f64, oscore: f64, ctx: &ScoreContext) -> f64 {
    if ctx.found_feasible {
        hscore + oscore
    } else {
        hscore
    }
}
// SLOT-END calculate_score

// SLOT-BEGIN pick_best_variable
/// Highest score; ties go to the least recently flipped, then the lowest
/// variable number.
pub fn pick_best_variable(candidates: &[Var], state: &SearchState) -> Var {
    best_of(state, candidates.iter().copied()).expect("candidate set is non-empty")
}
// SLOT-END pick_best_variable

// SLOT-BEGIN update_weights
/// Infeasible: bump every violated constraint. Feasible: bump the
/// objective weight up to its cap. With probability `sp`, decay all hard
/// weights above 1 instead.
pub fn update_weights(
    instance: &PboInstance,
    state: &SearchState,
    params: &SuiteParams,
    rng: &mut SearchRng,
    weights: &mut WeightTable,
) {
    let policy = &params.weights;
    if policy.smoothing_probability > 0.0 && rng.random_bool(policy.smoothing_probability.min(1.0)) {
        for c in 0..instance.constraints().len() {
            let w = weights.hard(c);
            if w > 1 {
                weights.set_hard(c, w - 1);
            }
        }
        return;
    }
    if state.is_feasible() {
        let cap = policy.obj_cap(instance);
        if weights.obj() < cap {
            weights.set_obj(weights.obj().saturating_add(policy.obj_increment).min(cap));
        }
    } else {
        for &c in state.violated() {
            weights.set_hard(c, weights.hard(c).saturating_add(policy.hard_increment));
        }
    }
}
// SLOT-END update_weights

// SLOT-BEGIN pick_escape_variable
/// Infeasible: a random violated constraint, best of `bms` sampled
/// variables. Feasible: the same over objective variables whose flip
/// lowers the objective. Falls back to a uniformly random variable.
pub fn pick_escape_variable(
    instance: &PboInstance,
    state: &SearchState,
    params: &SuiteParams,
    rng: &mut SearchRng,
) -> Var {
    let pool: Vec<Var> = if let Some(&cid) = pick_violated(state, rng) {
        instance.constraint(cid).terms().iter().map(|t| t.lit.var).collect()
    } else {
        let values = state.assignment().values();
        instance
            .objective()
            .terms()
            .iter()
            .filter(|t| t.lit.value(values))
            .map(|t| t.lit.var)
            .collect()
    };
    bms_pick(state, &pool, params.bms, rng).unwrap_or_else(|| random_var(instance, rng))
}
// SLOT-END pick_escape_variable

fn pick_violated<'s>(state: &'s SearchState, rng: &mut SearchRng) -> Option<&'s usize> {
    let v = state.violated();
    if v.is_empty() {
        None
    } else {
        v.get(rng.random_range(0..v.len()))
    }
}

/// All variables start at 0.
pub fn initialize_zeros(instance: &PboInstance, _rng: &mut SearchRng) -> Vec<bool> {
    vec![false; instance.num_vars()]
}

/// `w(c) * viol(c)` without smoothing.
pub fn penalty_hard_unsmoothed(_c: &PbConstraint, violation: i64, weight: u64, _smooth: f64) -> f64 {
    weight as f64 * violation as f64
}

/// `w(o) * obj` without smoothing.
pub fn penalty_obj_unsmoothed(obj: i64, weight: u64, _smooth: f64) -> f64 {
    weight as f64 * obj as f64
}

/// `hscore + oscore` from the first step.
pub fn calculate_score_unsuppressed(hscore: f64, oscore: f64, _ctx: &ScoreContext) -> f64 {
    hscore + oscore
}

/// Leaves every weight unchanged.
pub fn update_weights_noop(
    _instance: &PboInstance,
    _state: &SearchState,
    _params: &SuiteParams,
    _rng: &mut SearchRng,
    _weights: &mut WeightTable,
) {
}

/// Uniformly random variable of a random violated constraint (random walk).
pub fn pick_escape_random(
    instance: &PboInstance,
    state: &SearchState,
    _params: &SuiteParams,
    rng: &mut SearchRng,
) -> Var {
    match pick_violated(state, rng).map(|&c| instance.constraint(c).terms()) {
        Some(terms) if !terms.is_empty() => terms[rng.random_range(0..terms.len())].lit.var,
        _ => random_var(instance, rng),
    }
}

pub const INITIALIZE_IMPLS: &[Slot<InitializeAssignmentFn>] = &[
    Slot::new("baseline.initialize_assignment.v0", initialize_assignment),
    Slot::new("zeros.initialize_assignment.v0", initialize_zeros),
];
pub const PENALTY_HARD_IMPLS: &[Slot<PenaltyHardFn>] = &[
    Slot::new("baseline.penalty_hard.v0", penalty_hard),
    Slot::new("unsmoothed.penalty_hard.v0", penalty_hard_unsmoothed),
];
pub const PENALTY_OBJ_IMPLS: &[Slot<PenaltyObjFn>] = &[
    Slot::new("baseline.penalty_obj.v0", penalty_obj),
    Slot::new("unsmoothed.penalty_obj.v0", penalty_obj_unsmoothed),
];
pub const CALCULATE_SCORE_IMPLS: &[Slot<CalculateScoreFn>] = &[
    Slot::new("baseline.calculate_score.v0", calculate_score),
    Slot::new("unsuppressed.calculate_score.v0", calculate_score_unsuppressed),
];
pub const PICK_BEST_IMPLS: &[Slot<PickBestVariableFn>] =
    &[Slot::new("baseline.pick_best_variable.v0", pick_best_variable)];
pub const UPDATE_WEIGHTS_IMPLS: &[Slot<UpdateWeightsFn>] = &[
    Slot::new("baseline.update_weights.v0", update_weights),
    Slot::new("noop.update_weights.v0", update_weights_noop),
];
pub const PICK_ESCAPE_IMPLS: &[Slot<PickEscapeVariableFn>] = &[
    Slot::new("baseline.pick_escape_variable.v0", pick_escape_variable),
    Slot::new("random.pick_escape_variable.v0", pick_escape_random),
];

pub fn baseline_suite() -> HeuristicSuite {
    HeuristicSuite {
        initialize_assignment: INITIALIZE_IMPLS[0],
        penalty_hard: PENALTY_HARD_IMPLS[0],
        penalty_obj: PENALTY_OBJ_IMPLS[0],
        calculate_score: CALCULATE_SCORE_IMPLS[0],
        pick_best_variable: PICK_BEST_IMPLS[0],
        update_weights: UPDATE_WEIGHTS_IMPLS[0],
        pick_escape_variable: PICK_ESCAPE_IMPLS[0],
        params: SuiteParams::default(),
    }
}

/// Baseline with weight updates switched off.
pub fn greedy_only_suite() -> HeuristicSuite {
    HeuristicSuite {
        update_weights: UPDATE_WEIGHTS_IMPLS[1],
        ..baseline_suite()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlotError {
    #[error("unknown slot '{0}'")]
    UnknownSlot(String),
    #[error("unknown implementation '{implementation}' for slot '{slot}'")]
    UnknownImplementation { slot: String, implementation: String },
}

fn find<F: Copy>(table: &[Slot<F>], slot: &str, name: &str) -> Result<Slot<F>, SlotError> {
    table
        .iter()
        .find(|s| s.name == name)
        .copied()
        .ok_or_else(|| SlotError::UnknownImplementation {
            slot: slot.to_string(),
            implementation: name.to_string(),
        })
}

/// Implementation names registered for `slot`.
pub fn implementations(slot: &str) -> Result<Vec<&'static str>, SlotError> {
    fn names<F>(t: &[Slot<F>]) -> Vec<&'static str> {
        t.iter().map(|s| s.name).collect()
    }
    Ok(match slot {
        "initialize_assignment" => names(INITIALIZE_IMPLS),
        "penalty_hard" => names(PENALTY_HARD_IMPLS),
        "penalty_obj" => names(PENALTY_OBJ_IMPLS),
        "calculate_score" => names(CALCULATE_SCORE_IMPLS),
        "pick_best_variable" => names(PICK_BEST_IMPLS),
        "update_weights" => names(UPDATE_WEIGHTS_IMPLS),
        "pick_escape_variable" => names(PICK_ESCAPE_IMPLS),
        other => return Err(SlotError::UnknownSlot(other.to_string())),
    })
}

impl HeuristicSuite {
    /// Replaces one slot by a registered implementation.
    pub fn set_slot(&mut self, slot: &str, implementation: &str) -> Result<(), SlotError> {
        match slot {
            "initialize_assignment" => {
                self.initialize_assignment = find(INITIALIZE_IMPLS, slot, implementation)?
            }
            "penalty_hard" => self.penalty_hard = find(PENALTY_HARD_IMPLS, slot, implementation)?,
            "penalty_obj" => self.penalty_obj = find(PENALTY_OBJ_IMPLS, slot, implementation)?,
            "calculate_score" => {
                self.calculate_score = find(CALCULATE_SCORE_IMPLS, slot, implementation)?
            }
            "pick_best_variable" => {
                self.pick_best_variable = find(PICK_BEST_IMPLS, slot, implementation)?
            }
            "update_weights" => {
                self.update_weights = find(UPDATE_WEIGHTS_IMPLS, slot, implementation)?
            }
            "pick_escape_variable" => {
                self.pick_escape_variable = find(PICK_ESCAPE_IMPLS, slot, implementation)?
            }
            other => return Err(SlotError::UnknownSlot(other.to_string())),
        }
        debug_assert!(SLOT_NAMES.contains(&slot));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Literal, Objective, Term};
    use crate::search::Search;
    use rand::SeedableRng;

    fn x(n: u32) -> Var {
        Var::new(n).unwrap()
    }

    fn instance(n: u32, cons: &[(&[(i64, Literal)], i64)], obj: &[(i64, Literal)]) -> PboInstance {
        let cons = cons
            .iter()
            .map(|(ts, b)| {
                PbConstraint::new(ts.iter().map(|&(a, l)| Term::new(a, l)).collect(), *b).unwrap()
            })
            .collect();
        let obj = Objective::new(obj.iter().map(|&(a, l)| Term::new(a, l)).collect(), 0).unwrap();
        PboInstance::new("t", n, cons, obj).unwrap()
    }

    /// Builds a search positioned at `values` by flipping from all-zero.
    fn search_at<'a>(f: &'a PboInstance, suite: &'a HeuristicSuite, values: &[bool]) -> Search<'a> {
        let mut s = Search::new(f, suite, 0).unwrap();
        for v in f.vars() {
            if s.state().assignment().value(v) != values[v.index()] {
                s.apply_flip(v);
            }
        }
        s
    }

    fn zero_suite() -> HeuristicSuite {
        let mut s = baseline_suite();
        s.set_slot("initialize_assignment", "zeros.initialize_assignment.v0").unwrap();
        s
    }

    #[test]
    fn smoothing_is_mean_coefficient() {
        let p = Literal::pos;
        let f = instance(2, &[(&[(2, p(x(1))), (4, p(x(2)))], 1)], &[(2, p(x(1))), (1, p(x(2)))]);
        let t = SmoothingTable::for_instance(&f);
        assert_eq!(t.hard(0), 3.0);
        assert_eq!(t.obj(), 1.5);
        let g = instance(1, &[], &[]);
        assert_eq!(SmoothingTable::for_instance(&g).obj(), 1.0);
    }

    #[test]
    fn initialization_is_seeded() {
        let f = instance(10, &[], &[]);
        let mut a = SearchRng::seed_from_u64(42);
        let mut b = SearchRng::seed_from_u64(42);
        assert_eq!(initialize_assignment(&f, &mut a), initialize_assignment(&f, &mut b));
        let suite = baseline_suite();
        let s = Search::new(&f, &suite, 3).unwrap();
        assert!(s.state().is_feasible());
    }

    #[test]
    fn hscore_examples() {
        let p = Literal::pos;
        let f = instance(2, &[(&[(1, p(x(1))), (1, p(x(2)))], 1)], &[]);
        let suite = zero_suite();
        let s = search_at(&f, &suite, &[false, false]);
        assert_eq!(penalty_hard(f.constraint(0), 1, 1, 1.0), 1.0);
        assert_eq!(s.state().hscore(x(1)), 1.0);
        let s = search_at(&f, &suite, &[true, true]);
        assert_eq!(s.state().hscore(x(1)), 0.0);
        let s = search_at(&f, &suite, &[true, false]);
        assert_eq!(s.state().hscore(x(1)), -1.0);
    }

    #[test]
    fn oscore_examples() {
        let p = Literal::pos;
        let f = instance(2, &[], &[(2, p(x(1))), (1, p(x(2)))]);
        let suite = zero_suite();
        let s = search_at(&f, &suite, &[true, true]);
        assert_eq!(penalty_obj(3, 1, 1.5), 2.0);
        assert!((s.state().oscore(x(1)) - 4.0 / 3.0).abs() < 1e-12);

        let g = instance(1, &[], &[(1, p(x(1)))]);
        let s = search_at(&g, &suite, &[false]);
        assert_eq!(s.state().oscore(x(1)), -1.0 / s.state().smoothing().obj());

        let h = instance(2, &[(&[(1, p(x(1)))], 1)], &[]);
        let s = search_at(&h, &suite, &[true, false]);
        assert!(s.state().vars_all_zero_oscore(&h));
    }

    impl SearchState {
        fn vars_all_zero_oscore(&self, f: &PboInstance) -> bool {
            f.vars().all(|v| self.oscore(v) == 0.0)
        }
    }

    #[test]
    fn score_combination() {
        let on = ScoreContext { found_feasible: true };
        let off = ScoreContext { found_feasible: false };
        assert_eq!(calculate_score(1.0, 0.5, &on), 1.5);
        assert_eq!(calculate_score(0.0, 0.0, &on), 0.0);
        assert!((calculate_score(-1.0, 4.0 / 3.0, &on) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(calculate_score(-1.0, 4.0 / 3.0, &off), -1.0);
    }

    #[test]
    fn pick_best_ties_by_age_then_index() {
        let p = Literal::pos;
        // x1 and x2 each fix one unit of c0; x3 fixes c1 worth 1/2
        let f = instance(
            3,
            &[(&[(1, p(x(1))), (1, p(x(2)))], 1), (&[(2, p(x(3)))], 1)],
            &[],
        );
        let suite = zero_suite();
        let mut s = search_at(&f, &suite, &[false, false, false]);
        // give x1 a later age than x2
        s.apply_flip(x(2));
        s.apply_flip(x(2));
        s.apply_flip(x(1));
        s.apply_flip(x(1));
        let st = s.state();
        assert_eq!(st.score(x(1)), st.score(x(2)));
        assert!(st.age(x(1)) > st.age(x(2)));
        assert_eq!(pick_best_variable(&[x(1), x(2)], st), x(2));
        assert_eq!(pick_best_variable(&[x(3)], st), x(3));
        assert_eq!(pick_best_variable(&[x(1), x(3)], st), x(1));
        let fresh = search_at(&f, &suite, &[false, false, false]);
        assert_eq!(pick_best_variable(&[x(2), x(1)], fresh.state()), x(1));
    }

    #[test]
    fn update_weights_rules() {
        let p = Literal::pos;
        let f = instance(
            3,
            &[(&[(1, p(x(1)))], 1), (&[(1, p(x(2)))], 1), (&[(1, p(x(3)))], 1)],
            &[(5, p(x(1)))],
        );
        let suite = zero_suite();
        let mut s = search_at(&f, &suite, &[false, false, true]);
        s.update_weights();
        assert_eq!(s.state().weights().hard_weights(), &[2, 2, 1]);

        let mut s = search_at(&f, &suite, &[true, true, true]);
        assert_eq!(WeightPolicy::default().obj_cap(&f), 5);
        s.update_weights();
        assert_eq!(s.state().weights().obj(), 2);
        for _ in 0..10 {
            s.update_weights();
        }
        assert_eq!(s.state().weights().obj(), 5);
    }

    #[test]
    fn smoothing_decays_but_never_below_one() {
        let p = Literal::pos;
        let f = instance(2, &[(&[(1, p(x(1)))], 1), (&[(1, p(x(2)))], 1)], &[]);
        let mut suite = zero_suite();
        let mut s = search_at(&f, &suite, &[false, true]);
        s.update_weights();
        s.update_weights();
        assert_eq!(s.state().weights().hard_weights(), &[3, 1]);
        suite.params.weights.smoothing_probability = 1.0;
        let mut t = search_at(&f, &suite, &[false, true]);
        t.update_weights();
        assert_eq!(t.state().weights().hard_weights(), &[1, 1]);
    }

    #[test]
    fn escape_prefers_highest_score() {
        let p = Literal::pos;
        let n = Literal::neg;
        // c0: x1 + x2 >= 1 violated. Flipping x2 also breaks c1 and c2.
        let f = instance(
            2,
            &[
                (&[(1, p(x(1))), (1, p(x(2)))], 1),
                (&[(1, n(x(2)))], 1),
                (&[(2, n(x(2)))], 2),
                (&[(1, n(x(1)))], 1),
            ],
            &[],
        );
        let suite = zero_suite();
        let s = search_at(&f, &suite, &[false, false]);
        assert_eq!(s.state().score(x(1)), 0.0);
        assert!(s.state().score(x(2)) < s.state().score(x(1)));
        let mut rng = SearchRng::seed_from_u64(1);
        let v = pick_escape_variable(&f, s.state(), &SuiteParams::default(), &mut rng);
        assert_eq!(v, x(1));

        let g = instance(2, &[(&[(1, p(x(2)))], 1)], &[]);
        let s = search_at(&g, &suite, &[false, false]);
        for seed in 0..5 {
            let mut rng = SearchRng::seed_from_u64(seed);
            assert_eq!(pick_escape_variable(&g, s.state(), &SuiteParams::default(), &mut rng), x(2));
        }
    }

    #[test]
    fn escape_when_feasible_targets_objective() {
        let p = Literal::pos;
        let f = instance(3, &[], &[(1, p(x(1))), (1, p(x(2)))]);
        let suite = zero_suite();
        let s = search_at(&f, &suite, &[false, true, true]);
        let mut rng = SearchRng::seed_from_u64(7);
        assert_eq!(pick_escape_variable(&f, s.state(), &SuiteParams::default(), &mut rng), x(2));
    }

    #[test]
    fn registry_lookup() {
        let mut s = baseline_suite();
        assert!(s.set_slot("update_weights", "noop.update_weights.v0").is_ok());
        assert_eq!(s.update_weights.name, "noop.update_weights.v0");
        assert_eq!(
            s.set_slot("bogus", "x"),
            Err(SlotError::UnknownSlot("bogus".into()))
        );
        assert!(matches!(
            s.set_slot("penalty_obj", "nope"),
            Err(SlotError::UnknownImplementation { .. })
        ));
        for slot in SLOT_NAMES {
            assert!(!implementations(slot).unwrap().is_empty());
        }
    }
}
