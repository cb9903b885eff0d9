//! A local optimum that plain greedy search cannot leave.
//!
//! `3 x1 >= 2` and `20 ~x1 + x2 + ... + x21 >= 20`: with x1 = 0 no single
//! flip lowers the penalty. Escaping to x1 = 1 is undone at once unless
//! the weight of the first constraint has grown enough to keep it.

use pbls::search::{run_search_with, SearchLimits, SearchOptions};
use pbls::{baseline_suite, greedy_only_suite, Literal, PboInstance, RawConstraint, RelOp, Var};

fn x(n: u32) -> Literal {
    Literal::pos(Var::new(n).unwrap())
}

fn main() {
    let c1 = RawConstraint::new(vec![(3, x(1))], RelOp::Ge, 2);
    let mut terms = vec![(20, Literal::neg(Var::new(1).unwrap()))];
    terms.extend((2..=21).map(|i| (1, x(i))));
    let c2 = RawConstraint::new(terms, RelOp::Ge, 20);
    let (instance, _) = PboInstance::from_raw("stall", 21, &[c1, c2], &[], 0).unwrap();

    let limits = SearchLimits::cutoff_ms(10_000).with_max_steps(10_000);
    for (label, suite) in [("greedy only", greedy_only_suite()), ("with weights", baseline_suite())] {
        print!("{label:<13}");
        for seed in 1..=10 {
            let out = run_search_with(&instance, &suite, limits, seed, SearchOptions::default()).unwrap();
            match out.best_obj {
                Some(_) => print!(" {:>5}", out.steps_executed),
                None => print!(" {:>5}", "-"),
            }
        }
        println!();
    }
    println!("(steps to the first feasible assignment per seed, - = none in 10000)");
}
