use std::time::{Duration, Instant};

use rand::SeedableRng;
use thiserror::Error;

use crate::heuristics::SmoothingTable;
use crate::model::{objective_value, Assignment, PbConstraint, PboInstance, Var};
use crate::search::state::IndexedSet;
use crate::search::{HeuristicSuite, ScoreContext, SearchRng, SearchState, WeightTable};

/// Scores closer to zero than this are treated as zero when building the
/// improving-candidate set.
pub const SCORE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("slot {slot} returned variable x{var}, outside 1..={num_vars}")]
    SlotFault {
        slot: &'static str,
        var: u32,
        num_vars: usize,
    },
    #[error("slot {slot} produced {got} values for {expected} variables")]
    BadInitialAssignment {
        slot: &'static str,
        got: usize,
        expected: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub cutoff: Duration,
    /// Optional step budget, for reproducible runs independent of timing.
    pub max_steps: Option<u64>,
    /// Stop as soon as a feasible solution this good is recorded.
    pub target_obj: Option<i64>,
}

impl SearchLimits {
    pub fn cutoff_ms(ms: u64) -> SearchLimits {
        SearchLimits {
            cutoff: Duration::from_millis(ms),
            max_steps: None,
            target_obj: None,
        }
    }

    pub fn with_max_steps(mut self, steps: u64) -> SearchLimits {
        self.max_steps = Some(steps);
        self
    }

    pub fn with_target(mut self, obj: i64) -> SearchLimits {
        self.target_obj = Some(obj);
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Build the candidate set from every variable instead of only those
    /// in violated constraints (plus objective variables when feasible).
    pub full_scan: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    SolutionFound,
    NoSolution,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub best_obj: Option<i64>,
    pub best_assignment: Option<Vec<bool>>,
    pub steps_executed: u64,
    pub elapsed_ms: u64,
    /// FNV-1a hash of the flipped variable sequence.
    pub trajectory_digest: u64,
}

/// Slacks and scores recomputed from scratch, for checking the
/// incrementally maintained values.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSnapshot {
    pub slack: Vec<i64>,
    pub violation: Vec<i64>,
    pub hscore: Vec<f64>,
    pub oscore: Vec<f64>,
    pub score: Vec<f64>,
}

impl ScoreSnapshot {
    /// Largest difference between this snapshot's scores and the ones
    /// stored in `state`, relative to `max(1, |value|)`. Slacks must match
    /// exactly, otherwise infinity is returned.
    pub fn max_score_error(&self, state: &SearchState) -> f64 {
        if self.slack.as_slice() != state.assignment.slacks() {
            return f64::INFINITY;
        }
        let rel = |a: f64, b: f64| (a - b).abs() / 1f64.max(a.abs()).max(b.abs());
        let pairs = [
            (&self.hscore, &state.hscore),
            (&self.oscore, &state.oscore),
            (&self.score, &state.score),
        ];
        pairs
            .iter()
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(&x, &y)| rel(x, y)))
            .fold(0.0, f64::max)
    }
}

#[inline]
fn viol(slack: i64) -> i64 {
    (-slack).max(0)
}

/// Slack after flipping a term whose literal is currently `lit_true`.
#[inline]
fn slack_after(slack: i64, lit_true: bool, coef: i64) -> i64 {
    if lit_true {
        slack - coef
    } else {
        slack + coef
    }
}

#[inline]
fn obj_contribution(
    pen: crate::search::PenaltyObjFn,
    obj: i64,
    lit_true: bool,
    coef: i64,
    weight: u64,
    smooth: f64,
) -> f64 {
    let after = if lit_true { obj - coef } else { obj + coef };
    pen(obj, weight, smooth) - pen(after, weight, smooth)
}

#[inline]
fn hard_contribution(
    pen: crate::search::PenaltyHardFn,
    c: &PbConstraint,
    slack: i64,
    lit_true: bool,
    coef: i64,
    weight: u64,
    smooth: f64,
) -> f64 {
    pen(c, viol(slack), weight, smooth)
        - pen(c, viol(slack_after(slack, lit_true, coef)), weight, smooth)
}

/// Recomputes every slack, violation and score of `state` from its
/// assignment, weights and smoothing, using the suite's penalty and score
/// definitions. Does not touch `state`.
pub fn full_recompute(
    state: &SearchState,
    instance: &PboInstance,
    suite: &HeuristicSuite,
) -> ScoreSnapshot {
    let values = state.assignment.values();
    let n = instance.num_vars();
    let pen = suite.penalty_hard.func;
    let slack: Vec<i64> = instance.constraints().iter().map(|c| c.slack(values)).collect();
    let violation = slack.iter().map(|&s| viol(s)).collect();
    let mut hscore = vec![0.0; n];
    for c in instance.constraints() {
        let w = state.weights.hard(c.id());
        let sm = state.smoothing.hard(c.id());
        let s = slack[c.id()];
        for t in c.terms() {
            hscore[t.lit.var.index()] +=
                hard_contribution(pen, c, s, t.lit.value(values), t.coef, w, sm);
        }
    }
    let mut oscore = vec![0.0; n];
    let obj = objective_value(instance.objective(), values);
    for t in instance.objective().terms() {
        oscore[t.lit.var.index()] = obj_contribution(
            suite.penalty_obj.func,
            obj,
            t.lit.value(values),
            t.coef,
            state.weights.obj(),
            state.smoothing.obj(),
        );
    }
    let ctx = ScoreContext {
        found_feasible: state.found_feasible,
    };
    let score = hscore
        .iter()
        .zip(&oscore)
        .map(|(&h, &o)| (suite.calculate_score.func)(h, o, &ctx))
        .collect();
    ScoreSnapshot {
        slack,
        violation,
        hscore,
        oscore,
        score,
    }
}

/// One run of the local search loop over a fixed instance and suite.
pub struct Search<'a> {
    instance: &'a PboInstance,
    suite: &'a HeuristicSuite,
    options: SearchOptions,
    state: SearchState,
    rng: SearchRng,
    stamp: Vec<u32>,
    stamp_gen: u32,
    touched: Vec<usize>,
    candidates: Vec<Var>,
    digest: u64,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

impl<'a> Search<'a> {
    /// Initializes the assignment with the suite's initializer, sets all
    /// weights to 1 and computes every score.
    pub fn new(
        instance: &'a PboInstance,
        suite: &'a HeuristicSuite,
        seed: u64,
    ) -> Result<Search<'a>, SearchError> {
        Search::with_options(instance, suite, seed, SearchOptions::default())
    }

    pub fn with_options(
        instance: &'a PboInstance,
        suite: &'a HeuristicSuite,
        seed: u64,
        options: SearchOptions,
    ) -> Result<Search<'a>, SearchError> {
        let mut rng = SearchRng::seed_from_u64(seed);
        let n = instance.num_vars();
        let values = (suite.initialize_assignment.func)(instance, &mut rng);
        if values.len() != n {
            return Err(SearchError::BadInitialAssignment {
                slot: suite.initialize_assignment.name,
                got: values.len(),
                expected: n,
            });
        }
        let m = instance.constraints().len();
        let assignment = Assignment::new(instance, values);
        let mut violated = IndexedSet::new(m);
        for c in 0..m {
            if assignment.slack(c) < 0 {
                violated.insert(c);
            }
        }
        let mut state = SearchState {
            assignment,
            weights: WeightTable::new(m),
            smoothing: SmoothingTable::for_instance(instance),
            hscore: vec![0.0; n],
            oscore: vec![0.0; n],
            score: vec![0.0; n],
            age: vec![0; n],
            step: 0,
            violated,
            found_feasible: false,
            best: None,
        };
        let snap = full_recompute(&state, instance, suite);
        state.hscore = snap.hscore;
        state.oscore = snap.oscore;
        state.score = snap.score;
        Ok(Search {
            instance,
            suite,
            options,
            state,
            rng,
            stamp: vec![0; n],
            stamp_gen: 0,
            touched: Vec::new(),
            candidates: Vec::new(),
            digest: FNV_OFFSET,
        })
    }

    pub fn state(&self) -> &SearchState {
        &self.state
    }

    pub fn instance(&self) -> &PboInstance {
        self.instance
    }

    pub fn full_recompute(&self) -> ScoreSnapshot {
        full_recompute(&self.state, self.instance, self.suite)
    }

    fn next_stamp(&mut self) {
        self.stamp_gen = self.stamp_gen.wrapping_add(1);
        if self.stamp_gen == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.stamp_gen = 1;
        }
    }

    fn rescore_touched(&mut self) {
        let ctx = ScoreContext {
            found_feasible: self.state.found_feasible,
        };
        let f = self.suite.calculate_score.func;
        for &i in &self.touched {
            self.state.score[i] = f(self.state.hscore[i], self.state.oscore[i], &ctx);
        }
        self.touched.clear();
    }

    fn rescore_all(&mut self) {
        let ctx = ScoreContext {
            found_feasible: self.state.found_feasible,
        };
        let f = self.suite.calculate_score.func;
        let s = &mut self.state;
        for i in 0..s.score.len() {
            s.score[i] = f(s.hscore[i], s.oscore[i], &ctx);
        }
    }

    /// Sets every oscore directly from the current objective value.
    fn refresh_oscores(&mut self) {
        let obj = self.state.assignment.objective();
        let w = self.state.weights.obj();
        let sm = self.state.smoothing.obj();
        let pen = self.suite.penalty_obj.func;
        for t in self.instance.objective().terms() {
            let i = t.lit.var.index();
            let lit_true = t.lit.value(self.state.assignment.values());
            self.state.oscore[i] = obj_contribution(pen, obj, lit_true, t.coef, w, sm);
            if self.stamp[i] != self.stamp_gen {
                self.stamp[i] = self.stamp_gen;
                self.touched.push(i);
            }
        }
    }

    /// Flips `var` and updates slacks, the violated set and every score that
    /// depends on the flipped variable. Advances the step counter.
    pub fn apply_flip(&mut self, var: Var) {
        self.next_stamp();
        let inst = self.instance;
        let pen = self.suite.penalty_hard.func;
        let x_old = self.state.assignment.value(var);
        let values = self.state.assignment.values();
        for occ in inst.occurrences(var) {
            let cid = occ.constraint;
            let c = inst.constraint(cid);
            let s_old = self.state.assignment.slack(cid);
            let s_new = slack_after(s_old, x_old != occ.negated, occ.coef);
            let w = self.state.weights.hard(cid);
            let sm = self.state.smoothing.hard(cid);
            let p_old = pen(c, viol(s_old), w, sm);
            let p_new = pen(c, viol(s_new), w, sm);
            for t in c.terms() {
                let y = t.lit.var;
                let true_old = t.lit.value(values);
                let true_new = if y == var { !true_old } else { true_old };
                let before = p_old - pen(c, viol(slack_after(s_old, true_old, t.coef)), w, sm);
                let after = p_new - pen(c, viol(slack_after(s_new, true_new, t.coef)), w, sm);
                if before != after {
                    let i = y.index();
                    self.state.hscore[i] += after - before;
                    if self.stamp[i] != self.stamp_gen {
                        self.stamp[i] = self.stamp_gen;
                        self.touched.push(i);
                    }
                }
            }
            if s_new < 0 {
                self.state.violated.insert(cid);
            } else {
                self.state.violated.remove(cid);
            }
        }
        self.state.assignment.flip(inst, var);
        if inst.objective_term(var).is_some() {
            self.refresh_oscores();
        }
        let i = var.index();
        if self.stamp[i] != self.stamp_gen {
            self.stamp[i] = self.stamp_gen;
            self.touched.push(i);
        }
        self.rescore_touched();
        self.state.age[i] = self.state.step;
        self.state.step += 1;
        self.digest = (self.digest ^ var.number() as u64).wrapping_mul(FNV_PRIME);
    }

    /// Runs the suite's `update_weights` slot and refreshes the scores of
    /// every variable whose penalty terms changed.
    pub fn update_weights(&mut self) {
        let mut weights = std::mem::take(&mut self.state.weights);
        (self.suite.update_weights.func)(
            self.instance,
            &self.state,
            &self.suite.params,
            &mut self.rng,
            &mut weights,
        );
        self.state.weights = weights;
        self.refresh_after_weight_change();
    }

    fn refresh_after_weight_change(&mut self) {
        let (dirty, obj_before) = self.state.weights.drain_changes();
        if dirty.is_empty() && obj_before.is_none() {
            return;
        }
        self.next_stamp();
        let pen = self.suite.penalty_hard.func;
        let values = self.state.assignment.values();
        for (cid, w_old) in dirty {
            let c = self.instance.constraint(cid);
            let w_new = self.state.weights.hard(cid);
            let sm = self.state.smoothing.hard(cid);
            let s = self.state.assignment.slack(cid);
            for t in c.terms() {
                let lit_true = t.lit.value(values);
                let before = hard_contribution(pen, c, s, lit_true, t.coef, w_old, sm);
                let after = hard_contribution(pen, c, s, lit_true, t.coef, w_new, sm);
                if before != after {
                    let i = t.lit.var.index();
                    self.state.hscore[i] += after - before;
                    if self.stamp[i] != self.stamp_gen {
                        self.stamp[i] = self.stamp_gen;
                        self.touched.push(i);
                    }
                }
            }
        }
        if obj_before.is_some() {
            self.refresh_oscores();
        }
        self.rescore_touched();
    }

    /// Records the current assignment as the best solution when it is
    /// feasible and improves on the incumbent. Returns whether it did.
    pub fn record_best(&mut self) -> bool {
        if !self.state.is_feasible() {
            return false;
        }
        let obj = self.state.assignment.objective();
        if self.state.best.as_ref().is_some_and(|(_, b)| obj >= *b) {
            return false;
        }
        self.state.best = Some((self.state.assignment.values().to_vec(), obj));
        if !self.state.found_feasible {
            self.state.found_feasible = true;
            self.rescore_all();
        }
        true
    }

    fn collect_candidates(&mut self) {
        self.next_stamp();
        self.candidates.clear();
        let s = &self.state;
        if self.options.full_scan {
            self.candidates
                .extend(self.instance.vars().filter(|v| s.score[v.index()] > SCORE_EPS));
            return;
        }
        for &cid in s.violated.as_slice() {
            for t in self.instance.constraint(cid).terms() {
                let i = t.lit.var.index();
                if self.stamp[i] != self.stamp_gen {
                    self.stamp[i] = self.stamp_gen;
                    if s.score[i] > SCORE_EPS {
                        self.candidates.push(t.lit.var);
                    }
                }
            }
        }
        if s.violated.as_slice().is_empty() {
            for t in self.instance.objective().terms() {
                let i = t.lit.var.index();
                if s.score[i] > SCORE_EPS {
                    self.candidates.push(t.lit.var);
                }
            }
        }
    }

    fn check_var(&self, slot: &'static str, var: Var) -> Result<Var, SearchError> {
        let n = self.instance.num_vars();
        if var.index() < n {
            Ok(var)
        } else {
            Err(SearchError::SlotFault {
                slot,
                var: var.number(),
                num_vars: n,
            })
        }
    }

    /// Picks one variable (greedy if any candidate improves, otherwise
    /// weight update plus escape) and flips it.
    pub fn select_and_flip(&mut self) -> Result<Var, SearchError> {
        self.collect_candidates();
        let var = if !self.candidates.is_empty() {
            let v = (self.suite.pick_best_variable.func)(&self.candidates, &self.state);
            self.check_var(self.suite.pick_best_variable.name, v)?
        } else {
            self.update_weights();
            let v = (self.suite.pick_escape_variable.func)(
                self.instance,
                &self.state,
                &self.suite.params,
                &mut self.rng,
            );
            self.check_var(self.suite.pick_escape_variable.name, v)?
        };
        self.apply_flip(var);
        Ok(var)
    }

    /// Runs the loop until a limit is hit, measuring time from `started`.
    pub fn run_from(mut self, limits: SearchLimits, started: Instant) -> Result<SearchOutcome, SearchError> {
        let lower_bound = self.instance.objective().lower_bound();
        loop {
            self.record_best();
            if let Some(best) = self.state.best_obj() {
                if best <= lower_bound || limits.target_obj.is_some_and(|t| best <= t) {
                    break;
                }
            }
            if limits.max_steps.is_some_and(|m| self.state.step >= m) {
                break;
            }
            if started.elapsed() >= limits.cutoff {
                break;
            }
            self.select_and_flip()?;
        }
        Ok(self.into_outcome(started))
    }

    pub fn run(self, limits: SearchLimits) -> Result<SearchOutcome, SearchError> {
        self.run_from(limits, Instant::now())
    }

    fn into_outcome(self, started: Instant) -> SearchOutcome {
        let elapsed_ms = started.elapsed().as_millis() as u64;
        let (status, best_obj, best_assignment) = match self.state.best {
            Some((values, obj)) => (SearchStatus::SolutionFound, Some(obj), Some(values)),
            None => (SearchStatus::NoSolution, None, None),
        };
        SearchOutcome {
            status,
            best_obj,
            best_assignment,
            steps_executed: self.state.step,
            elapsed_ms,
            trajectory_digest: self.digest,
        }
    }
}

/// Runs one search with the given limits and options. Time is measured
/// from before initialization; if the cutoff has already passed once the
/// initial assignment is built, no solution is reported.
pub fn run_search_with(
    instance: &PboInstance,
    suite: &HeuristicSuite,
    limits: SearchLimits,
    seed: u64,
    options: SearchOptions,
) -> Result<SearchOutcome, SearchError> {
    let started = Instant::now();
    let search = Search::with_options(instance, suite, seed, options)?;
    if started.elapsed() >= limits.cutoff {
        return Ok(SearchOutcome {
            status: SearchStatus::NoSolution,
            best_obj: None,
            best_assignment: None,
            steps_executed: 0,
            elapsed_ms: started.elapsed().as_millis() as u64,
            trajectory_digest: FNV_OFFSET,
        });
    }
    search.run_from(limits, started)
}

/// Runs one search under a wall-clock cutoff.
pub fn run_search(
    instance: &PboInstance,
    suite: &HeuristicSuite,
    cutoff_ms: u64,
    seed: u64,
) -> Result<SearchOutcome, SearchError> {
    run_search_with(
        instance,
        suite,
        SearchLimits::cutoff_ms(cutoff_ms),
        seed,
        SearchOptions::default(),
    )
}
