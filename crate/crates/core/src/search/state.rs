use crate::heuristics::SmoothingTable;
use crate::model::{Assignment, Var};

/// Constraint and objective weights. Every write is clamped to at least 1
/// and remembered so the engine can refresh the affected scores.
#[derive(Debug, Clone, Default)]
pub struct WeightTable {
    hard: Vec<u64>,
    obj: u64,
    // (constraint, weight before the first change since the last drain)
    dirty: Vec<(usize, u64)>,
    dirty_mark: Vec<bool>,
    obj_before: Option<u64>,
}

impl WeightTable {
    pub fn new(num_constraints: usize) -> WeightTable {
        WeightTable {
            hard: vec![1; num_constraints],
            obj: 1,
            dirty: Vec::new(),
            dirty_mark: vec![false; num_constraints],
            obj_before: None,
        }
    }

    #[inline]
    pub fn hard(&self, constraint: usize) -> u64 {
        self.hard[constraint]
    }

    pub fn hard_weights(&self) -> &[u64] {
        &self.hard
    }

    pub fn obj(&self) -> u64 {
        self.obj
    }

    pub fn set_hard(&mut self, constraint: usize, weight: u64) {
        let weight = weight.max(1);
        let old = self.hard[constraint];
        if old == weight {
            return;
        }
        if !self.dirty_mark[constraint] {
            self.dirty_mark[constraint] = true;
            self.dirty.push((constraint, old));
        }
        self.hard[constraint] = weight;
    }

    pub fn set_obj(&mut self, weight: u64) {
        let weight = weight.max(1);
        if weight != self.obj && self.obj_before.is_none() {
            self.obj_before = Some(self.obj);
        }
        self.obj = weight;
    }

    /// Returns the changed constraints with their previous weights, and the
    /// previous objective weight if it changed.
    pub(crate) fn drain_changes(&mut self) -> (Vec<(usize, u64)>, Option<u64>) {
        let dirty = std::mem::take(&mut self.dirty);
        for &(c, _) in &dirty {
            self.dirty_mark[c] = false;
        }
        let obj = self.obj_before.take().filter(|&w| w != self.obj);
        (dirty, obj)
    }
}

/// Set of constraint ids with O(1) insert, remove and uniform indexing.
#[derive(Debug, Clone)]
pub(crate) struct IndexedSet {
    items: Vec<usize>,
    pos: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl IndexedSet {
    pub fn new(universe: usize) -> IndexedSet {
        IndexedSet {
            items: Vec::new(),
            pos: vec![ABSENT; universe],
        }
    }

    pub fn insert(&mut self, x: usize) {
        if self.pos[x] == ABSENT {
            self.pos[x] = self.items.len();
            self.items.push(x);
        }
    }

    pub fn remove(&mut self, x: usize) {
        let p = self.pos[x];
        if p == ABSENT {
            return;
        }
        let last = *self.items.last().unwrap();
        self.items.swap_remove(p);
        if last != x {
            self.pos[last] = p;
        }
        self.pos[x] = ABSENT;
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.items
    }
}

/// Everything the search mutates during one run.
///
/// Slots receive a shared reference. `score[x]` always equals
/// `calculate_score(hscore[x], oscore[x])` between steps.
#[derive(Debug, Clone)]
pub struct SearchState {
    pub(crate) assignment: Assignment,
    pub(crate) weights: WeightTable,
    pub(crate) smoothing: SmoothingTable,
    pub(crate) hscore: Vec<f64>,
    pub(crate) oscore: Vec<f64>,
    pub(crate) score: Vec<f64>,
    pub(crate) age: Vec<u64>,
    pub(crate) step: u64,
    pub(crate) violated: IndexedSet,
    pub(crate) found_feasible: bool,
    pub(crate) best: Option<(Vec<bool>, i64)>,
}

impl SearchState {
    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    /// Empty while `update_weights` runs; that slot gets the live table as
    /// its own argument.
    pub fn weights(&self) -> &WeightTable {
        &self.weights
    }

    pub fn smoothing(&self) -> &SmoothingTable {
        &self.smoothing
    }

    #[inline]
    pub fn hscore(&self, var: Var) -> f64 {
        self.hscore[var.index()]
    }

    #[inline]
    pub fn oscore(&self, var: Var) -> f64 {
        self.oscore[var.index()]
    }

    #[inline]
    pub fn score(&self, var: Var) -> f64 {
        self.score[var.index()]
    }

    /// Step at which `var` was last flipped (0 if never).
    #[inline]
    pub fn age(&self, var: Var) -> u64 {
        self.age[var.index()]
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// Ids of the currently violated constraints.
    pub fn violated(&self) -> &[usize] {
        self.violated.as_slice()
    }

    pub fn is_feasible(&self) -> bool {
        self.violated.as_slice().is_empty()
    }

    pub fn found_feasible(&self) -> bool {
        self.found_feasible
    }

    pub fn best_obj(&self) -> Option<i64> {
        self.best.as_ref().map(|(_, o)| *o)
    }

    pub fn best_solution(&self) -> Option<&[bool]> {
        self.best.as_ref().map(|(v, _)| v.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexed_set_insert_remove() {
        let mut s = IndexedSet::new(5);
        s.insert(3);
        s.insert(1);
        s.insert(3);
        assert_eq!(s.as_slice(), &[3, 1]);
        s.remove(3);
        assert_eq!(s.as_slice(), &[1]);
        s.remove(3);
        s.insert(4);
        s.remove(1);
        assert_eq!(s.as_slice(), &[4]);
    }

    #[test]
    fn weights_floor_and_dirty_tracking() {
        let mut w = WeightTable::new(3);
        w.set_hard(0, 0);
        assert_eq!(w.hard(0), 1);
        w.set_hard(1, 4);
        w.set_hard(1, 5);
        w.set_obj(0);
        assert_eq!(w.obj(), 1);
        w.set_obj(3);
        let (dirty, obj) = w.drain_changes();
        assert_eq!(dirty, vec![(1, 1)]);
        assert_eq!(obj, Some(1));
        let (dirty, obj) = w.drain_changes();
        assert!(dirty.is_empty());
        assert_eq!(obj, None);
    }
}
