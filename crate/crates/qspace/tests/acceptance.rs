//! Acceptance suite: one PASS/FAIL line per criterion, then one line per
//! check underneath it. Tolerances and budgets live in `qspace::criteria`.
//!
//! Two stated bounds do not hold numerically and are reported as FAIL
//! without failing the run (see KNOWN_FAILURES); their corrected forms run
//! as supplementary checks and must pass.

use std::process::ExitCode;
use std::time::Instant;

use qspace::corpus::{self, CorpusSpec};
use qspace::criteria::{self, CRITERIA};
use qspace::io::to_json;

const SEED: u64 = 0x5eed;

/// (criterion id, check label prefix) of checks that fail faithfully.
const KNOWN_FAILURES: [(u32, &str); 2] = [(4, "gap >= 2 sin"), (7, "measured kappa <= 2T")];

fn known(id: u32, label: &str) -> bool {
    KNOWN_FAILURES.iter().any(|(i, p)| *i == id && label.starts_with(p))
}

fn main() -> ExitCode {
    let mut unexpected = Vec::new();
    let total = Instant::now();

    for (id, name, _) in CRITERIA {
        let outcome = criteria::run(id, None, SEED).expect("criterion id from the table");
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id:>2} {name} ({:.1} s)", outcome.elapsed.as_secs_f64());
        for c in &outcome.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            let mut note = String::new();
            if c.supplementary {
                note.push_str(" [supplementary]");
            }
            if !c.pass && known(id, &c.label) {
                note.push_str(" [known]");
            } else if !c.pass {
                unexpected.push(format!("criterion {id}: {}", c.label));
            }
            println!("       {tag} {}: {}{note}", c.label, c.detail);
        }
    }

    // criterion 11: identical seed, identical reports
    let spec = CorpusSpec::parse(include_str!("../corpus/smoke.json")).expect("smoke corpus parses");
    let start = Instant::now();
    let a = corpus::run(&spec, SEED);
    let b = corpus::run(&spec, SEED);
    let json_same = to_json(&a) == to_json(&b);
    let csv_same = a.csv().expect("csv") == b.csv().expect("csv");
    let pass = json_same && csv_same;
    println!(
        "{} criterion 11 determinism ({:.1} s)",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    println!("       json identical: {json_same}, csv identical: {csv_same}, {} cases", a.all_cases().count());
    if !pass {
        unexpected.push("criterion 11: reports differ".into());
    }

    println!("total {:.1} s", total.elapsed().as_secs_f64());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            eprintln!("unexpected failure: {u}");
        }
        ExitCode::FAILURE
    }
}
