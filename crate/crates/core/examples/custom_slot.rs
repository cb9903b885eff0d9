//! Plug a hand-written heuristic into one slot and compare it with the
//! baseline on the same instances and seeds.

use pbls::opb::parse_file;
use pbls::search::{run_search_with, SearchLimits, SearchOptions, SearchRng, SearchState, Slot, SuiteParams};
use pbls::{baseline_suite, PboInstance, Var};
use rand::Rng;

/// Escape by flipping the stalest variable of a random violated
/// constraint, ignoring scores entirely.
fn pick_escape_oldest(instance: &PboInstance, state: &SearchState, _: &SuiteParams, rng: &mut SearchRng) -> Var {
    let violated = state.violated();
    if violated.is_empty() {
        return Var::from_index(rng.random_range(0..instance.num_vars()));
    }
    let c = instance.constraint(violated[rng.random_range(0..violated.len())]);
    c.terms()
        .iter()
        .map(|t| t.lit.var)
        .min_by_key(|&v| state.age(v))
        .unwrap()
}

/// Greedy pick that skips the age tie-break.
fn pick_best_lowest_index(candidates: &[Var], state: &SearchState) -> Var {
    let mut best = candidates[0];
    for &v in &candidates[1..] {
        if state.score(v) > state.score(best) || (state.score(v) == state.score(best) && v < best) {
            best = v;
        }
    }
    best
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let mut custom = baseline_suite();
    custom.pick_escape_variable = Slot::new("oldest.pick_escape_variable.v0", pick_escape_oldest);
    custom.pick_best_variable = Slot::new("index.pick_best_variable.v0", pick_best_lowest_index);
    let baseline = baseline_suite();

    for file in ["cover.opb", "assign.opb"] {
        let (instance, _) = parse_file(&data.join(file))?;
        for (label, suite) in [("baseline", &baseline), ("custom", &custom)] {
            let objs: Vec<String> = (1..=5)
                .map(|seed| {
                    let limits = SearchLimits::cutoff_ms(2_000).with_max_steps(20_000);
                    let out = run_search_with(&instance, suite, limits, seed, SearchOptions::default()).unwrap();
                    out.best_obj.map_or("-".into(), |o| o.to_string())
                })
                .collect();
            println!("{:<8} {:<9} best per seed: {}", instance.name(), label, objs.join(" "));
        }
    }
    for (slot, imp) in custom.slot_ids() {
        println!("  {slot} = {imp}");
    }
    Ok(())
}
