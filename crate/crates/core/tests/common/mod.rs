#![allow(dead_code)]

use pbls::model::{is_feasible, objective_value, Literal, PboInstance, RawConstraint, RelOp, Var};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn lit(n: u32, negated: bool) -> Literal {
    Literal {
        var: Var::new(n).unwrap(),
        negated,
    }
}

pub const OPS: [RelOp; 5] = [RelOp::Ge, RelOp::Gt, RelOp::Le, RelOp::Lt, RelOp::Eq];

fn nonzero(rng: &mut ChaCha8Rng, max: i64) -> i64 {
    let a = rng.random_range(1..=max);
    if rng.random_bool(0.5) {
        -a
    } else {
        a
    }
}

/// Up to 6 terms over at most `n` variables (repeats and both polarities
/// allowed), coefficients in [-5, 5] without 0, any operator.
pub fn random_raw_constraint(rng: &mut ChaCha8Rng, n: u32) -> RawConstraint {
    let k = rng.random_range(1..=6);
    let terms = (0..k)
        .map(|_| (nonzero(rng, 5), lit(rng.random_range(1..=n), rng.random_bool(0.3))))
        .collect();
    let op = OPS[rng.random_range(0..OPS.len())];
    RawConstraint::new(terms, op, rng.random_range(-12..=12))
}

pub fn all_assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}

/// Random instance. With `planted`, every constraint is satisfied by a
/// hidden assignment, so the instance is feasible.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    name: &str,
    n: u32,
    m: usize,
    planted: bool,
) -> PboInstance {
    let hidden: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let mut raw = Vec::with_capacity(m);
    for _ in 0..m {
        let k = rng.random_range(2.min(n as usize)..=(n as usize).min(6));
        let vars = sample(rng, n as usize, k);
        let terms: Vec<(i64, Literal)> = vars
            .iter()
            .map(|v| (nonzero(rng, 5), lit(v as u32 + 1, false)))
            .collect();
        let lhs: i64 = terms
            .iter()
            .filter(|(_, l)| l.value(&hidden))
            .map(|(a, _)| a)
            .sum();
        let (op, rhs) = if planted {
            match rng.random_range(0..10) {
                0 => (RelOp::Eq, lhs),
                1..=5 => (RelOp::Ge, lhs - rng.random_range(0..=2)),
                _ => (RelOp::Le, lhs + rng.random_range(0..=2)),
            }
        } else {
            let op = [RelOp::Ge, RelOp::Le][rng.random_range(0..2)];
            (op, rng.random_range(-4..=6))
        };
        raw.push(RawConstraint::new(terms, op, rhs));
    }
    let k = rng.random_range(1..=n as usize);
    let obj: Vec<(i64, Literal)> = sample(rng, n as usize, k)
        .iter()
        .map(|v| (nonzero(rng, 10), lit(v as u32 + 1, false)))
        .collect();
    PboInstance::from_raw(name, n, &raw, &obj, 0).unwrap().0
}

/// Minimum objective over all feasible assignments, by enumeration.
pub fn brute_force_optimum(f: &PboInstance) -> Option<i64> {
    all_assignments(f.num_vars())
        .filter(|v| is_feasible(f, v))
        .map(|v| objective_value(f.objective(), &v))
        .min()
}

/// `3 x1 >= 2` together with `20 ~x1 + x2 + ... + x21 >= 20`.
///
/// With x1 = 0 the second constraint holds and no flip reduces the
/// penalty; flipping x1 fixes the first constraint but breaks the second
/// by far more, so plain greedy moves bounce back. Only after the weight
/// of the first constraint has grown does the search push x2..x21 to 1.
pub fn stall_instance() -> PboInstance {
    let c1 = RawConstraint::new(vec![(3, lit(1, false))], RelOp::Ge, 2);
    let mut terms = vec![(20, lit(1, true))];
    terms.extend((2..=21).map(|i| (1, lit(i, false))));
    let c2 = RawConstraint::new(terms, RelOp::Ge, 20);
    PboInstance::from_raw("stall", 21, &[c1, c2], &[], 0).unwrap().0
}

/// Triangle vertex cover: min x1+x2+x3 with every edge covered.
pub fn triangle() -> PboInstance {
    let edge = |a, b| RawConstraint::new(vec![(1, lit(a, false)), (1, lit(b, false))], RelOp::Ge, 1);
    let obj = [(1, lit(1, false)), (1, lit(2, false)), (1, lit(3, false))];
    PboInstance::from_raw("triangle", 3, &[edge(1, 2), edge(2, 3), edge(1, 3)], &obj, 0)
        .unwrap()
        .0
}
