use std::path::Path;

use fullgroup::cli;
use fullgroup::json::CertificateFile;
use fullgroup_core::GroupElement;

fn run(args: &[&str]) -> i32 {
    cli::run(std::iter::once("fullgroup").chain(args.iter().copied()))
}

fn run_to(path: &Path, args: &[&str]) -> i32 {
    let p = path.to_string_lossy().into_owned();
    let mut full = vec!["--quiet", "--output", p.as_str()];
    full.extend_from_slice(args);
    run(&full)
}

const ALPHA: &str = "odo2:[(00;+1),(10;-1),(01;0),(11;0)]";
const BETA: &str = "odo2:[(00;+2),(01;-2),(10;0),(11;0)]";

#[test]
fn compare_emits_the_expected_bisection() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cmp.json");
    assert_eq!(run_to(&path, &["compare", "b2:{00}", "b2:{1}"]), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("odo2:[(00;+1)]"), "{text}");
    assert!(text.contains("\"format_version\": 1"));
}

#[test]
fn certify_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    assert_eq!(run_to(&path, &["certify", "--tau0", "odo2:[(ε;+1)]", "--alpha", ALPHA, "--beta", BETA]), 0);
    let p = path.to_str().unwrap();
    assert_eq!(run(&["--quiet", "verify", p]), 0);
    assert_eq!(run(&["--quiet", "--backend", "odo3", "verify", p]), 2);

    let mut file = CertificateFile::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!file.factors.is_empty());
    file.factors[0].sign = -file.factors[0].sign;
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&file).unwrap()).unwrap();
    assert_eq!(run(&["--quiet", "verify", bad.to_str().unwrap()]), 3);

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(run(&["--quiet", "verify", garbage.to_str().unwrap()]), 2);
}

#[test]
fn every_witness_command_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let cases: &[&[&str]] = &[
        &["transfer", "b2:{00}", "b2:{1}"],
        &["transfer", "--commutator", "b2:{000}", "b2:{1}"],
        &["--backend", "shift2", "transfer", "b2:{0}", "b2:{01}"],
        &["swap", "b2:{00}", "b2:{01}"],
        &["--backend", "shift3", "swap", "b3:{0}", "b3:{10}"],
        &["gw", "b2:{00}", "b2:{01}", "--rounds", "4"],
        &["decompose", "odo2:[(ε;+1)]", "--eps", "1/4"],
        &["--backend", "shift2", "decompose", "shift2:[(0>11),(11>0),(10>10)]"],
        &["split", "odo2:[(ε;+1)]"],
    ];
    for args in cases {
        assert_eq!(run_to(&out, args), 0, "{args:?}");
        let text = std::fs::read_to_string(&out).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["format_version"], 1, "{args:?}");
    }
}

#[test]
fn split_certificate_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("split.json");
    assert_eq!(run_to(&out, &["--backend", "shift2", "split", "shift2:[(0>11),(11>0),(10>10)]"]), 0);
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let cert: CertificateFile = serde_json::from_value(value["certificate"].clone()).unwrap();
    let (cp, env, target) = cert.to_parts().unwrap();
    let tau1: GroupElement = value["tau1"].as_str().unwrap().parse().unwrap();
    assert_eq!(target, tau1);
    assert!(fullgroup_core::certificate::verify_certificate(&cp, &env, &target).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    // malformed input
    assert_eq!(run_to(&out, &["compare", "b2:{2}", "b2:{1}"]), 2);
    assert_eq!(run_to(&out, &["compare", "b3:{0}", "b2:{1}"]), 2);
    assert_eq!(run_to(&out, &["--backend", "odo9x", "compare", "b2:{0}", "b2:{1}"]), 2);
    assert_eq!(run_to(&out, &["decompose", "odo2:[(ε;+1)]", "--eps", "abc"]), 2);
    assert_eq!(run_to(&out, &["no-such-command"]), 2);
    assert_eq!(run_to(&out, &["selftest", "--suite", "no-such-suite"]), 2);
    assert_eq!(run_to(&out, &["selftest", "--suite", "split", "--trials", "0"]), 2);
    // violated preconditions
    assert_eq!(run_to(&out, &["gw", "b2:{00}", "b2:{01}", "--rounds", "-1"]), 1);
    assert_eq!(run_to(&out, &["transfer", "b2:{ε}", "b2:{1}"]), 1);
    assert_eq!(run_to(&out, &["compare", "b2:{0}", "b2:{1}"]), 1);
    assert_eq!(run_to(&out, &["swap", "b2:{0}", "b2:{10}"]), 1);
    assert_eq!(run_to(&out, &["split", "odo2:[(ε;0)]"]), 1);
    assert_eq!(run_to(&out, &["decompose", "odo2:[(ε;+1)]", "--eps", "0/1"]), 1);
}

#[test]
fn selftest_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let args = ["--seed", "11", "selftest", "--suite", "group-axioms", "--trials", "25", "--max-depth", "4"];
    assert_eq!(run_to(&a, &args), 0);
    assert_eq!(run_to(&b, &args), 0);
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let report: fullgroup::SelftestReport = serde_json::from_slice(&ta).unwrap();
    assert!(report.passed());
    assert_eq!(report.suites[0].property("associativity").unwrap().checked, 25);
}
