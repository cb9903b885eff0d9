//! Drive the search by hand: flip variables, bump weights, and compare the
//! incrementally maintained scores with a full recomputation.

use pbls::opb::parse_instance;
use pbls::search::Search;
use pbls::{baseline_suite, Var};

const TEXT: &str = "\
min: +2 x1 +1 x2 +3 x3 ;
+1 x1 +1 x2 >= 1 ;
+2 x2 +1 x3 +1 x4 >= 2 ;
+1 x1 +1 x3 +1 ~x4 >= 1 ;
";

fn dump(s: &Search) {
    let st = s.state();
    let scores: Vec<String> = s
        .instance()
        .vars()
        .map(|v| format!("x{}:{:+.3}", v.number(), st.score(v)))
        .collect();
    println!(
        "step {:>2} obj {} violated {:?}  {}",
        st.step(),
        st.assignment().objective(),
        st.violated(),
        scores.join(" ")
    );
}

fn main() {
    let (instance, _) = parse_instance(TEXT, "demo").unwrap();
    let suite = baseline_suite();
    let mut search = Search::new(&instance, &suite, 3).unwrap();
    dump(&search);
    for n in [1, 4, 2, 2] {
        search.apply_flip(Var::new(n).unwrap());
        dump(&search);
    }
    search.update_weights();
    let w = search.state().weights();
    println!("weights: hard {:?} objective {}", w.hard_weights(), w.obj());
    for _ in 0..5 {
        search.record_best();
        search.select_and_flip().unwrap();
        dump(&search);
    }
    let err = search.full_recompute().max_score_error(search.state());
    println!("max relative difference to full recomputation: {err:.1e}");
}
