//! Pseudo-Boolean instances in normalized form.
//!
//! Every constraint is stored as `sum a_j * l_j >= b` with `a_j >= 1`,
//! `b >= 0` and at most one term per variable. The objective is
//! `sum e_j * l_j + d` with `e_j >= 1` and is always minimized.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("arithmetic range exceeded: {0}")]
    ArithmeticRange(String),
    #[error("variable x{var} out of range (instance has {num_vars} variables)")]
    VariableOutOfRange { var: u32, num_vars: u32 },
    #[error("variable index must be at least 1")]
    ZeroVariableIndex,
    #[error("instance must declare at least one variable")]
    NoVariables,
    #[error("coefficient must be positive in normalized form, got {0}")]
    NonPositiveCoefficient(i64),
    #[error("threshold must be non-negative in normalized form, got {0}")]
    NegativeThreshold(i64),
    #[error("variable x{0} appears more than once in one constraint")]
    DuplicateVariable(u32),
}

/// A Boolean variable, numbered from 1 as in OPB files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn new(number: u32) -> Result<Var, ModelError> {
        if number == 0 {
            Err(ModelError::ZeroVariableIndex)
        } else {
            Ok(Var(number))
        }
    }

    /// Builds a variable from a 0-based array index.
    pub fn from_index(index: usize) -> Var {
        Var(index as u32 + 1)
    }

    /// The 1-based variable number.
    pub fn number(self) -> u32 {
        self.0
    }

    /// 0-based position used by per-variable arrays.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: Var,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: Var) -> Literal {
        Literal { var, negated: false }
    }

    pub fn neg(var: Var) -> Literal {
        Literal { var, negated: true }
    }

    /// Value of the literal under a complete valuation.
    #[inline]
    pub fn value(self, values: &[bool]) -> bool {
        values[self.var.index()] != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "~{}", self.var)
        } else {
            write!(f, "{}", self.var)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub coef: i64,
    pub lit: Literal,
}

impl Term {
    pub fn new(coef: i64, lit: Literal) -> Term {
        Term { coef, lit }
    }
}

/// Relational operator of a constraint before normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelOp {
    Ge,
    Gt,
    Le,
    Lt,
    Eq,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Ge => ">=",
            RelOp::Gt => ">",
            RelOp::Le => "<=",
            RelOp::Lt => "<",
            RelOp::Eq => "=",
        }
    }

    /// Evaluates `lhs op rhs`.
    pub fn holds(self, lhs: i128, rhs: i128) -> bool {
        match self {
            RelOp::Ge => lhs >= rhs,
            RelOp::Gt => lhs > rhs,
            RelOp::Le => lhs <= rhs,
            RelOp::Lt => lhs < rhs,
            RelOp::Eq => lhs == rhs,
        }
    }
}

/// A constraint as written in the input: arbitrary signs, any operator,
/// repeated variables allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawConstraint {
    pub terms: Vec<(i64, Literal)>,
    pub op: RelOp,
    pub rhs: i64,
}

impl RawConstraint {
    pub fn new(terms: Vec<(i64, Literal)>, op: RelOp, rhs: i64) -> RawConstraint {
        RawConstraint { terms, op, rhs }
    }

    /// Direct evaluation, used as the reference semantics of normalization.
    pub fn is_satisfied(&self, values: &[bool]) -> bool {
        let lhs: i128 = self
            .terms
            .iter()
            .filter(|(_, lit)| lit.value(values))
            .map(|&(a, _)| a as i128)
            .sum();
        self.op.holds(lhs, self.rhs as i128)
    }
}

/// A normalized `>=` constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PbConstraint {
    id: usize,
    terms: Vec<Term>,
    threshold: i64,
    coef_sum: i64,
}

impl PbConstraint {
    /// Checks normalized form. The id is assigned when the constraint is
    /// added to an instance.
    pub fn new(terms: Vec<Term>, threshold: i64) -> Result<PbConstraint, ModelError> {
        if threshold < 0 {
            return Err(ModelError::NegativeThreshold(threshold));
        }
        let mut seen = std::collections::HashSet::with_capacity(terms.len());
        let mut sum: i64 = 0;
        for t in &terms {
            if t.coef < 1 {
                return Err(ModelError::NonPositiveCoefficient(t.coef));
            }
            if !seen.insert(t.lit.var) {
                return Err(ModelError::DuplicateVariable(t.lit.var.number()));
            }
            sum = sum.checked_add(t.coef).ok_or_else(|| {
                ModelError::ArithmeticRange("constraint coefficient sum overflows i64".into())
            })?;
        }
        Ok(PbConstraint {
            id: 0,
            terms,
            threshold,
            coef_sum: sum,
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn threshold(&self) -> i64 {
        self.threshold
    }

    pub fn coefficient_sum(&self) -> i64 {
        self.coef_sum
    }

    pub fn is_tautology(&self) -> bool {
        self.threshold == 0
    }

    /// `sum a_j * l_j - b`; non-negative iff satisfied.
    pub fn slack(&self, values: &[bool]) -> i64 {
        let lhs: i64 = self
            .terms
            .iter()
            .filter(|t| t.lit.value(values))
            .map(|t| t.coef)
            .sum();
        lhs - self.threshold
    }
}

impl fmt::Display for PbConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            write!(f, "+{} {} ", t.coef, t.lit)?;
        }
        write!(f, ">= {}", self.threshold)
    }
}

/// Violation degree `max(0, b - sum a_j * l_j)`.
pub fn violation(c: &PbConstraint, values: &[bool]) -> i64 {
    (-c.slack(values)).max(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Objective {
    terms: Vec<Term>,
    constant: i64,
}

impl Objective {
    pub fn new(terms: Vec<Term>, constant: i64) -> Result<Objective, ModelError> {
        let mut seen = std::collections::HashSet::with_capacity(terms.len());
        let mut sum = constant.unsigned_abs() as i128;
        for t in &terms {
            if t.coef < 1 {
                return Err(ModelError::NonPositiveCoefficient(t.coef));
            }
            if !seen.insert(t.lit.var) {
                return Err(ModelError::DuplicateVariable(t.lit.var.number()));
            }
            sum += t.coef as i128;
        }
        if sum > i64::MAX as i128 {
            return Err(ModelError::ArithmeticRange(
                "objective coefficient sum overflows i64".into(),
            ));
        }
        Ok(Objective { terms, constant })
    }

    /// Normalizes an objective with arbitrary signs and repeated variables,
    /// rewriting negative coefficients through `x = 1 - ~x`.
    pub fn from_raw(terms: &[(i64, Literal)], constant: i64) -> Result<Objective, ModelError> {
        let (merged, offset) = merge_terms(terms)?;
        let constant = to_i64(constant as i128 + offset, "objective constant")?;
        let (terms, shift) = orient_terms(merged)?;
        // shift is the constant produced by flipping negative coefficients
        let constant = to_i64(constant as i128 + shift, "objective constant")?;
        Objective::new(terms, constant)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest value the objective can take: every literal false.
    pub fn lower_bound(&self) -> i64 {
        self.constant
    }
}

/// `sum e_j * l_j + d`.
pub fn objective_value(o: &Objective, values: &[bool]) -> i64 {
    o.terms
        .iter()
        .filter(|t| t.lit.value(values))
        .map(|t| t.coef)
        .sum::<i64>()
        + o.constant
}

fn to_i64(v: i128, what: &str) -> Result<i64, ModelError> {
    i64::try_from(v).map_err(|_| ModelError::ArithmeticRange(format!("{what} {v} exceeds i64")))
}

/// Merges terms per variable as coefficients on the positive literal.
/// Returns the per-variable coefficients and the constant produced by
/// `a * ~x = a - a * x`.
fn merge_terms(terms: &[(i64, Literal)]) -> Result<(BTreeMap<Var, i128>, i128), ModelError> {
    let mut merged: BTreeMap<Var, i128> = BTreeMap::new();
    let mut constant: i128 = 0;
    for &(a, lit) in terms {
        let a = a as i128;
        if lit.negated {
            constant += a;
            *merged.entry(lit.var).or_default() -= a;
        } else {
            *merged.entry(lit.var).or_default() += a;
        }
    }
    Ok((merged, constant))
}

/// Turns signed positive-literal coefficients into positive coefficients
/// over literals. Returns the terms and the constant contributed by
/// negative coefficients (`c * x = c - c * ~x`).
fn orient_terms(merged: BTreeMap<Var, i128>) -> Result<(Vec<Term>, i128), ModelError> {
    let mut out = Vec::with_capacity(merged.len());
    let mut constant: i128 = 0;
    for (var, c) in merged {
        if c > 0 {
            out.push(Term::new(to_i64(c, "coefficient")?, Literal::pos(var)));
        } else if c < 0 {
            constant += c;
            out.push(Term::new(to_i64(-c, "coefficient")?, Literal::neg(var)));
        }
    }
    Ok((out, constant))
}

/// Rewrites `terms >= rhs` (arbitrary signs) to normalized form. The
/// threshold is clamped at 0.
fn normalize_ge(terms: &[(i64, Literal)], rhs: i128) -> Result<PbConstraint, ModelError> {
    let (merged, c1) = merge_terms(terms)?;
    let (terms, c2) = orient_terms(merged)?;
    let b = rhs - c1 - c2;
    let b = to_i64(b.max(0), "threshold")?;
    PbConstraint::new(terms, b)
}

/// Converts a raw constraint to one (or, for `=`, two) normalized `>=`
/// constraints with exactly the same set of satisfying assignments.
/// Tautologies come back with threshold 0; callers decide whether to keep them.
pub fn normalize_constraint(raw: &RawConstraint) -> Result<Vec<PbConstraint>, ModelError> {
    let negated: Vec<(i64, Literal)> = raw
        .terms
        .iter()
        .map(|&(a, l)| {
            a.checked_neg()
                .map(|n| (n, l))
                .ok_or_else(|| ModelError::ArithmeticRange("coefficient negation".into()))
        })
        .collect::<Result<_, _>>()?;
    let rhs = raw.rhs as i128;
    let out = match raw.op {
        RelOp::Ge => vec![normalize_ge(&raw.terms, rhs)?],
        RelOp::Gt => vec![normalize_ge(&raw.terms, rhs + 1)?],
        RelOp::Le => vec![normalize_ge(&negated, -rhs)?],
        RelOp::Lt => vec![normalize_ge(&negated, -rhs + 1)?],
        RelOp::Eq => vec![
            normalize_ge(&raw.terms, rhs)?,
            normalize_ge(&negated, -rhs)?,
        ],
    };
    Ok(out)
}

/// Where a variable occurs in a constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence {
    pub constraint: usize,
    pub coef: i64,
    pub negated: bool,
}

/// A normalized PBO instance. Immutable once built; occurrence lists are
/// computed at construction.
#[derive(Debug, Clone)]
pub struct PboInstance {
    name: String,
    num_vars: u32,
    constraints: Vec<PbConstraint>,
    objective: Objective,
    occurrences: Vec<Vec<Occurrence>>,
    obj_terms: Vec<Option<Term>>,
}

impl PartialEq for PboInstance {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars
            && self.constraints == other.constraints
            && self.objective == other.objective
    }
}

impl PboInstance {
    pub fn new(
        name: impl Into<String>,
        num_vars: u32,
        constraints: Vec<PbConstraint>,
        objective: Objective,
    ) -> Result<PboInstance, ModelError> {
        if num_vars == 0 {
            return Err(ModelError::NoVariables);
        }
        let check = |v: Var| {
            if v.number() > num_vars {
                Err(ModelError::VariableOutOfRange {
                    var: v.number(),
                    num_vars,
                })
            } else {
                Ok(())
            }
        };
        let mut occurrences = vec![Vec::new(); num_vars as usize];
        let mut constraints = constraints;
        for (id, c) in constraints.iter_mut().enumerate() {
            c.id = id;
            for t in &c.terms {
                check(t.lit.var)?;
                occurrences[t.lit.var.index()].push(Occurrence {
                    constraint: id,
                    coef: t.coef,
                    negated: t.lit.negated,
                });
            }
        }
        let mut obj_terms = vec![None; num_vars as usize];
        for t in objective.terms() {
            check(t.lit.var)?;
            obj_terms[t.lit.var.index()] = Some(*t);
        }
        Ok(PboInstance {
            name: name.into(),
            num_vars,
            constraints,
            objective,
            occurrences,
            obj_terms,
        })
    }

    /// Normalizes raw constraints and objective, dropping tautologies.
    /// Returns the instance and the number of tautologies dropped.
    pub fn from_raw(
        name: impl Into<String>,
        num_vars: u32,
        raw: &[RawConstraint],
        objective_terms: &[(i64, Literal)],
        objective_constant: i64,
    ) -> Result<(PboInstance, usize), ModelError> {
        let mut constraints = Vec::with_capacity(raw.len());
        let mut dropped = 0;
        for r in raw {
            for c in normalize_constraint(r)? {
                if c.is_tautology() {
                    dropped += 1;
                } else {
                    constraints.push(c);
                }
            }
        }
        let objective = Objective::from_raw(objective_terms, objective_constant)?;
        Ok((PboInstance::new(name, num_vars, constraints, objective)?, dropped))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars as usize
    }

    pub fn constraints(&self) -> &[PbConstraint] {
        &self.constraints
    }

    pub fn constraint(&self, id: usize) -> &PbConstraint {
        &self.constraints[id]
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn occurrences(&self, var: Var) -> &[Occurrence] {
        &self.occurrences[var.index()]
    }

    /// The objective term on `var`, if any.
    pub fn objective_term(&self, var: Var) -> Option<Term> {
        self.obj_terms[var.index()]
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        (0..self.num_vars as usize).map(Var::from_index)
    }
}

/// `true` iff every constraint has violation 0.
pub fn is_feasible(instance: &PboInstance, values: &[bool]) -> bool {
    instance
        .constraints()
        .iter()
        .all(|c| violation(c, values) == 0)
}

/// A complete 0/1 valuation with cached objective and per-constraint slack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<bool>,
    obj: i64,
    slack: Vec<i64>,
}

impl Assignment {
    pub fn new(instance: &PboInstance, values: Vec<bool>) -> Assignment {
        assert_eq!(values.len(), instance.num_vars(), "assignment length");
        let slack = instance
            .constraints()
            .iter()
            .map(|c| c.slack(&values))
            .collect();
        let obj = objective_value(instance.objective(), &values);
        Assignment { values, obj, slack }
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn into_values(self) -> Vec<bool> {
        self.values
    }

    #[inline]
    pub fn value(&self, var: Var) -> bool {
        self.values[var.index()]
    }

    pub fn objective(&self) -> i64 {
        self.obj
    }

    #[inline]
    pub fn slack(&self, constraint: usize) -> i64 {
        self.slack[constraint]
    }

    pub fn slacks(&self) -> &[i64] {
        &self.slack
    }

    #[inline]
    pub fn violation(&self, constraint: usize) -> i64 {
        (-self.slack[constraint]).max(0)
    }

    /// Toggles `var`, updating slacks of the constraints it occurs in and
    /// the cached objective.
    pub fn flip(&mut self, instance: &PboInstance, var: Var) {
        let i = var.index();
        let new_value = !self.values[i];
        self.values[i] = new_value;
        for occ in instance.occurrences(var) {
            // literal becomes true iff new value differs from its negation flag
            if new_value != occ.negated {
                self.slack[occ.constraint] += occ.coef;
            } else {
                self.slack[occ.constraint] -= occ.coef;
            }
        }
        if let Some(t) = instance.objective_term(var) {
            if new_value != t.lit.negated {
                self.obj += t.coef;
            } else {
                self.obj -= t.coef;
            }
        }
    }
}
