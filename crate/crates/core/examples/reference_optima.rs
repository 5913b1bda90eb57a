//! Recomputes `fixtures/reference_optima.json` by multi-start local search.
//!
//! Usage: `cargo run --release --example reference_optima [-- <output path>]`

#[path = "../tests/support/oracle.rs"]
mod oracle;

use std::collections::BTreeMap;

use catmads::bench::reference::ReferenceOptimum;
use catmads::blackbox::make_problem;
use catmads::blackbox::problems::{suite, Suite};
use rayon::prelude::*;

const STARTS_PER_COMPONENT: usize = 24;

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/fixtures/reference_optima.json"
        )
        .to_string()
    });
    let table: BTreeMap<String, ReferenceOptimum> = suite(Suite::Unconstrained)
        .par_iter()
        .map(|&name| {
            let problem = make_problem(name).expect("registered problem");
            let (point, f) = oracle::brute_force_optimum(&problem, STARTS_PER_COMPONENT, 1);
            eprintln!("{name}: {f}");
            (
                name.to_string(),
                ReferenceOptimum {
                    f,
                    point: problem.domain.point_to_json(&point),
                },
            )
        })
        .collect();
    let text = serde_json::to_string_pretty(&table).expect("table serializes");
    std::fs::write(&out, text + "\n").expect("fixture path is writable");
}
