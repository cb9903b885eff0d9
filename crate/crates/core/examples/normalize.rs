//! Show how raw constraints are rewritten into `sum a_j l_j >= b` form
//! with positive coefficients.

use pbls::model::normalize_constraint;
use pbls::{Literal, RawConstraint, RelOp, Var};

fn x(n: u32) -> Literal {
    Literal::pos(Var::new(n).unwrap())
}

fn show(raw: &RawConstraint) {
    let lhs: Vec<String> = raw
        .terms
        .iter()
        .map(|(a, l)| format!("{a:+} {}x{}", if l.negated { "~" } else { "" }, l.var.number()))
        .collect();
    println!("{} {} {}", lhs.join(" "), raw.op.symbol(), raw.rhs);
    for c in normalize_constraint(raw).unwrap() {
        let terms: Vec<String> = c
            .terms()
            .iter()
            .map(|t| format!("{} {}x{}", t.coef, if t.lit.negated { "~" } else { "" }, t.lit.var.number()))
            .collect();
        println!("    => {} >= {}", terms.join(" + "), c.threshold());
    }
}

fn main() {
    // negative coefficient turns into a negated literal
    show(&RawConstraint::new(vec![(3, x(1)), (-2, x(2))], RelOp::Ge, 1));
    // <= flips every sign
    show(&RawConstraint::new(vec![(1, x(1)), (1, x(2)), (1, x(3))], RelOp::Le, 1));
    // repeated variables merge, strict inequality tightens by one
    show(&RawConstraint::new(vec![(2, x(1)), (3, x(1)), (1, x(2))], RelOp::Gt, 4));
    // equality becomes two constraints
    show(&RawConstraint::new(vec![(1, x(1)), (1, x(2))], RelOp::Eq, 1));
    // x1 + ~x1 cancels to a constant
    show(&RawConstraint::new(vec![(1, x(1)), (1, Literal::neg(Var::new(1).unwrap())), (2, x(2))], RelOp::Ge, 2));
}
