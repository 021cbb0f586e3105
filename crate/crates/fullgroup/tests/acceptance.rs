//! Acceptance run: every criterion with its pinned size and time limit, one
//! PASS/FAIL line each. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fullgroup::{cli, run_suite, RunConfig, SelftestReport};
use fullgroup_core::Backend;

const SEED: u64 = 0x5eed_2024;
const ALL: &[&str] = &["odo2", "odo3", "shift2", "shift3"];
const ODOMETERS: &[&str] = &["odo2", "odo3"];

/// A suite run over several backends with the properties that must have been
/// checked on every trial.
struct SuitePlan {
    suite: &'static str,
    backends: &'static [&'static str],
    trials: usize,
    max_depth: usize,
    every_trial: &'static [&'static str],
    /// Groups of properties whose counts must add up to the trial count
    /// (exactly one branch per trial).
    one_of: &'static [&'static [&'static str]],
    odometer_only: &'static [&'static str],
    /// Properties that must have been checked at least once.
    some_trials: &'static [&'static str],
}

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Duration,
    check: Check,
}

enum Check {
    Suite(SuitePlan),
    Determinism,
}

fn count(report: &SelftestReport, name: &str) -> u64 {
    report.suites[0].property(name).map_or(0, |p| p.checked)
}

fn run_plan(plan: &SuitePlan) -> Result<String, String> {
    let mut notes = Vec::new();
    for tag in plan.backends {
        let backend: Backend = tag.parse().map_err(|e| format!("{tag}: {e}"))?;
        let config = RunConfig::new(backend, SEED, plan.max_depth, plan.trials).map_err(|e| e.to_string())?;
        let report = run_suite(plan.suite, &config).map_err(|e| format!("{tag}: {e}"))?;
        let result = &report.suites[0];
        for (name, p) in &result.properties {
            if p.passed != p.checked {
                let example = p.counterexamples.first().cloned().unwrap_or_default();
                return Err(format!("{tag}: {name} {}/{} ({example})", p.passed, p.checked));
            }
        }
        let trials = plan.trials as u64;
        let mut required: Vec<&str> = plan.every_trial.to_vec();
        if backend.has_measure() {
            required.extend(plan.odometer_only);
        }
        for name in required {
            let n = count(&report, name);
            if n != trials {
                return Err(format!("{tag}: {name} checked {n} times, expected {trials}"));
            }
        }
        for group in plan.one_of {
            let n: u64 = group.iter().map(|name| count(&report, name)).sum();
            if n != trials {
                return Err(format!("{tag}: {} checked {n} times, expected {trials}", group.join(" or ")));
            }
        }
        let mut note = format!("{tag} {}", plan.trials);
        for name in plan.some_trials {
            let n = count(&report, name);
            if n == 0 {
                return Err(format!("{tag}: {name} never checked"));
            }
            note.push_str(&format!(" ({n} {name})"));
        }
        notes.push(note);
    }
    Ok(notes.join(", "))
}

fn run_cli(args: &[&str]) -> i32 {
    cli::run(std::iter::once("fullgroup").chain(args.iter().copied()))
}

/// Runs each command twice into separate files and compares the bytes.
fn determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let seed = SEED.to_string();
    let commands: Vec<(&str, Vec<&str>)> = vec![
        ("selftest-odo", vec!["--backend", "odo2", "--seed", &seed, "selftest", "--suite", "all", "--trials", "10", "--max-depth", "3"]),
        ("selftest-shift", vec!["--backend", "shift3", "--seed", &seed, "selftest", "--suite", "all", "--trials", "10", "--max-depth", "3"]),
        (
            "certify",
            vec!["--backend", "odo2", "certify", "--tau0", "odo2:[(ε;+1)]", "--alpha", "odo2:[(00;+1),(10;-1),(01;0),(11;0)]", "--beta", "odo2:[(00;+2),(01;-2),(10;0),(11;0)]"],
        ),
        ("split", vec!["--backend", "shift2", "split", "shift2:[(0>11),(11>0),(10>10)]"]),
        ("gw", vec!["--backend", "odo2", "gw", "b2:{00}", "b2:{01}", "--rounds", "6"]),
    ];
    let mut checked = 0;
    for (label, args) in &commands {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("{label}-{run}.json"));
            let path_text = path.to_string_lossy().into_owned();
            let mut full: Vec<&str> = vec!["--quiet", "--output", &path_text];
            full.extend(args.iter().copied());
            let code = run_cli(&full);
            if code != 0 {
                return Err(format!("{label}: exit code {code}"));
            }
            outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{label}: outputs differ"));
        }
        checked += 1;
    }
    Ok(format!("{checked} commands byte-identical across two runs"))
}

fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion {
            id: 1,
            name: "group axioms and pointwise oracle",
            limit: secs(30),
            check: Check::Suite(SuitePlan {
                suite: "group-axioms",
                backends: ALL,
                trials: 1000,
                max_depth: 6,
                every_trial: &["associativity", "identity", "inverse", "composition-matches-oracle", "equality-matches-oracle"],
                one_of: &[],
                odometer_only: &[],
                some_trials: &[],
            }),
        },
        Criterion {
            id: 2,
            name: "measure invariance",
            limit: secs(10),
            check: Check::Suite(SuitePlan {
                suite: "measure-invariance",
                backends: ODOMETERS,
                trials: 200,
                max_depth: 6,
                every_trial: &["measure-preserved"],
                one_of: &[],
                odometer_only: &[],
                some_trials: &[],
            }),
        },
        Criterion {
            id: 3,
            name: "support of conjugates",
            limit: secs(10),
            check: Check::Suite(SuitePlan {
                suite: "support-conjugation",
                backends: ALL,
                trials: 500,
                max_depth: 6,
                every_trial: &["support-of-conjugate", "conjugate-support-matches-oracle"],
                one_of: &[],
                odometer_only: &[],
                some_trials: &[],
            }),
        },
        Criterion {
            id: 4,
            name: "comparison by full group elements",
            limit: secs(30),
            check: Check::Suite(SuitePlan {
                suite: "lemma-transfers",
                backends: ALL,
                trials: 500,
                max_depth: 6,
                every_trial: &["postconditions", "image-inside-b"],
                one_of: &[&["involution", "inside-case-leaves-room"]],
                odometer_only: &[],
                some_trials: &[],
            }),
        },
        Criterion {
            id: 5,
            name: "comparison by commutators",
            limit: secs(30),
            check: Check::Suite(SuitePlan {
                suite: "commutator-transfers",
                backends: ALL,
                trials: 500,
                max_depth: 6,
                every_trial: &["postconditions", "witness-evaluates", "image-inside-b"],
                one_of: &[&["second-image-inside-b", "inside-case-leaves-room"]],
                odometer_only: &[],
                some_trials: &[],
            }),
        },
        Criterion {
            id: 6,
            name: "exact swaps and intertwining",
            limit: secs(30),
            check: Check::Suite(SuitePlan {
                suite: "gw",
                backends: ALL,
                trials: 300,
                max_depth: 6,
                every_trial: &[
                    "swap-image",
                    "swap-involution",
                    "swap-support",
                    "gw-invariants",
                    "gw-diameters",
                    "gw-annuli",
                ],
                one_of: &[],
                odometer_only: &[],
                some_trials: &[],
            }),
        },
        Criterion {
            id: 7,
            name: "decomposition into small supports",
            limit: secs(60),
            check: Check::Suite(SuitePlan {
                suite: "decomposition",
                backends: ALL,
                trials: 200,
                max_depth: 6,
                every_trial: &["reconstruction", "bounds-proper", "support-inside-bound"],
                one_of: &[],
                odometer_only: &["bounds-small"],
                some_trials: &[],
            }),
        },
        Criterion {
            id: 8,
            name: "splitting into proper supports",
            limit: secs(30),
            check: Check::Suite(SuitePlan {
                suite: "split",
                backends: ALL,
                trials: 100,
                max_depth: 6,
                every_trial: &["product", "proper-supports", "certificate-scan", "certificate-verifies"],
                one_of: &[],
                odometer_only: &[],
                some_trials: &[],
            }),
        },
        Criterion {
            id: 9,
            name: "commutators in the normal closure",
            limit: secs(120),
            check: Check::Suite(SuitePlan {
                suite: "simplicity",
                backends: ALL,
                trials: 100,
                max_depth: 5,
                every_trial: &["certificate-scan", "certificate-verifies"],
                one_of: &[],
                odometer_only: &[],
                some_trials: &["sign-flip-rejected"],
            }),
        },
        Criterion { id: 10, name: "determinism", limit: secs(60), check: Check::Determinism },
    ]
}

fn main() -> ExitCode {
    let mut failures = 0;
    for c in criteria() {
        let start = Instant::now();
        let outcome = match &c.check {
            Check::Suite(plan) => run_plan(plan),
            Check::Determinism => determinism(),
        };
        let elapsed = start.elapsed();
        let (verdict, detail) = match outcome {
            Ok(_) if elapsed > c.limit => ("FAIL", "over the time limit".to_string()),
            Ok(d) => ("PASS", d),
            Err(e) => ("FAIL", e),
        };
        if verdict == "FAIL" {
            failures += 1;
        }
        println!(
            "{verdict} criterion {:>2}: {:<36} {:>7.2}s / {:>3}s  {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
