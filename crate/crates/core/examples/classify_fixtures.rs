//! Runs the nondegeneracy conditions on every bundled fixture.

use stadisc::cli::FIXTURES;
use stadisc::model::{classify, parse_model, SearchConfig};

fn main() {
    let search = SearchConfig::with_seed(0);
    println!("{:<12} {:>2} {:>2}   a     b     t     d     f", "model", "n", "d");
    for (name, text) in FIXTURES {
        let model = parse_model(text).expect("bundled fixture parses");
        let r = classify(&model, &search);
        println!(
            "{name:<12} {:>2} {:>2}   {:<5} {:<5} {:<5} {:<5} {:<5}",
            model.n(),
            model.d(),
            r.cond_a,
            r.cond_b,
            r.cond_t,
            r.cond_d,
            r.cond_f
        );
        if let Some(f) = &r.f_failure {
            println!("{:>15} (f): {f}", "");
        }
    }
}
