//! Randomized property suites. Every property is checked by the core
//! algorithms and, where it concerns sets or maps, again by the oracle.

use std::collections::BTreeMap;

use fullgroup_core::certificate::{
    commutator_product_identity, commutator_target, normality_certificate, simplicity_certificate, structural_scan,
    verify_certificate,
};
use fullgroup_core::decompose::{decompose_small_support, split_nontrivial_support};
use fullgroup_core::transfer::{commutator_transfer, exact_swap_involution, full_group_transfer, gw_intertwining};
use fullgroup_core::{Backend, BackendKind, ClopenSet, Environment, GroupElement, Ratio, TransferKind, Word};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::HarnessError;
use crate::json::FORMAT_VERSION;
use crate::oracle::{self, words_of};
use crate::random;

pub const SUITES: &[&str] = &[
    "group-axioms",
    "measure-invariance",
    "support-conjugation",
    "lemma-transfers",
    "commutator-transfers",
    "gw",
    "decomposition",
    "split",
    "simplicity",
];

/// Counterexamples kept per property.
const KEEP: usize = 5;
/// Depths with at most this many cylinders are checked exhaustively.
const ALL_CYLINDERS_UP_TO: u128 = 1024;
/// Probe words per oracle comparison.
const PROBES: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub checked: u64,
    pub passed: u64,
    pub counterexamples: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    pub properties: BTreeMap<String, PropertyReport>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.properties.values().all(|p| p.checked == p.passed)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyReport> {
        self.properties.get(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub format_version: u32,
    pub backend: String,
    pub seed: u64,
    pub trial_count: usize,
    pub max_depth: usize,
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

#[derive(Default)]
struct Tally {
    properties: BTreeMap<String, PropertyReport>,
}

impl Tally {
    fn record(&mut self, name: &str, ok: bool, context: impl FnOnce() -> String) {
        let p = self
            .properties
            .entry(name.to_string())
            .or_insert(PropertyReport { checked: 0, passed: 0, counterexamples: Vec::new() });
        p.checked += 1;
        if ok {
            p.passed += 1;
        } else if p.counterexamples.len() < KEEP {
            p.counterexamples.push(context());
        }
    }
}

type Trial = fn(&mut ChaCha8Rng, Backend, usize, usize, &mut Tally) -> Result<(), HarnessError>;

fn trial_fn(suite: &str) -> Option<Trial> {
    Some(match suite {
        "group-axioms" => group_axioms,
        "measure-invariance" => measure_invariance,
        "support-conjugation" => support_conjugation,
        "lemma-transfers" => lemma_transfers,
        "commutator-transfers" => commutator_transfers,
        "gw" => gw,
        "decomposition" => decomposition,
        "split" => split,
        "simplicity" => simplicity,
        _ => return None,
    })
}

/// Runs one suite, or every suite for `"all"`.
pub fn run_suite(suite: &str, config: &RunConfig) -> Result<SelftestReport, HarnessError> {
    config.validate()?;
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(HarnessError::UnknownSuite(suite.to_string()));
    };
    let mut suites = Vec::new();
    for name in names {
        let trial = trial_fn(name).expect("listed suite");
        let mut tally = Tally::default();
        for i in 0..config.trial_count {
            let label = format!("{name}/{}/{i}", config.backend);
            let mut rng = random::substream(config.seed, &label);
            if let Err(e) = trial(&mut rng, config.backend, config.max_depth, i, &mut tally) {
                tally.record("no-errors", false, || format!("{label}: {e}"));
            } else {
                tally.record("no-errors", true, String::new);
            }
        }
        suites.push(SuiteResult { suite: name.to_string(), properties: tally.properties });
    }
    Ok(SelftestReport {
        format_version: FORMAT_VERSION,
        backend: config.backend.to_string(),
        seed: config.seed,
        trial_count: config.trial_count,
        max_depth: config.max_depth,
        suites,
    })
}

fn composition_probes(rng: &mut ChaCha8Rng, f: &GroupElement, g: &GroupElement, fg: &GroupElement) -> Vec<Vec<u8>> {
    let (df, dg, dfg) = (oracle::source_depth(f), oracle::source_depth(g), oracle::source_depth(fg));
    let depth = match f.backend().kind {
        BackendKind::Odometer => df.max(dg).max(dfg),
        BackendKind::FullShift => (df + dg).max(dfg),
    };
    oracle::probe_words(rng, f.base(), depth, PROBES)
}

fn equality_probes(rng: &mut ChaCha8Rng, f: &GroupElement, g: &GroupElement) -> Vec<Vec<u8>> {
    let depth = oracle::source_depth(f).max(oracle::source_depth(g));
    oracle::probe_words(rng, f.base(), depth, PROBES)
}

fn group_axioms(rng: &mut ChaCha8Rng, backend: Backend, depth: usize, _: usize, t: &mut Tally) -> Result<(), HarnessError> {
    let f = random::random_element(rng, backend, depth)?;
    let g = random::random_element(rng, backend, depth)?;
    let h = random::random_element(rng, backend, depth)?;
    let ctx = || format!("f={f} g={g} h={h}");
    let fg = f.compose(&g)?;
    t.record("associativity", fg.compose(&h)? == f.compose(&g.compose(&h)?)?, ctx);
    let id = GroupElement::identity(backend);
    t.record("identity", f.compose(&id)? == f && id.compose(&f)? == f, ctx);
    let inv = f.inverse();
    t.record("inverse", f.compose(&inv)?.is_identity() && inv.compose(&f)?.is_identity(), ctx);
    let words = composition_probes(rng, &f, &g, &fg);
    t.record("composition-matches-oracle", oracle::agrees(&fg, &words, |w| oracle::composed_local(&f, &g, w)), ctx);
    let words = equality_probes(rng, &f, &g);
    t.record("equality-matches-oracle", (f == g) == oracle::equal_on(&f, &g, &words), ctx);
    let back = fg.compose(&g.inverse())?;
    let words = equality_probes(rng, &back, &f);
    t.record("cancellation", back == f && oracle::equal_on(&back, &f, &words), ctx);
    let parsed: GroupElement = f.to_string().parse()?;
    t.record("encoding-round-trip", parsed == f, ctx);
    Ok(())
}

fn measure_invariance(rng: &mut ChaCha8Rng, backend: Backend, depth: usize, _: usize, t: &mut Tally) -> Result<(), HarnessError> {
    let g = random::random_element(rng, backend, depth)?;
    let base = backend.base;
    let mut ok = true;
    let mut cylinders = Vec::new();
    for d in 0..=depth {
        let count = (base as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
        if count <= ALL_CYLINDERS_UP_TO {
            cylinders.extend(Word::all_of_length(base, d));
        } else {
            cylinders.extend((0..64).map(|_| random::random_word(rng, base, d)));
        }
    }
    let sets = cylinders
        .iter()
        .map(|w| ClopenSet::cylinder(base, w.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    if backend.has_measure() {
        ok &= g.check_measure_invariance(&sets)?.passed();
        for w in &cylinders {
            let img = oracle::image(&g, &[w.symbols().to_vec()]);
            ok &= img.and_then(|i| oracle::measure(base, &i)) == oracle::measure(base, &[w.symbols().to_vec()]);
        }
        let random_set = random::random_clopen(rng, base, depth)?;
        ok &= g.image(&random_set)?.try_measure()? == random_set.try_measure()?;
    } else {
        ok &= g.check_measure_invariance(&sets)?.passed();
    }
    t.record("measure-preserved", ok, || format!("g={g}"));
    Ok(())
}

fn support_conjugation(rng: &mut ChaCha8Rng, backend: Backend, depth: usize, _: usize, t: &mut Tally) -> Result<(), HarnessError> {
    let a = random::random_element(rng, backend, depth)?;
    let b = random::random_element(rng, backend, depth)?;
    let ctx = || format!("alpha={a} beta={b}");
    let base = backend.base;
    let conj = b.conjugate(&a)?;
    let lhs = conj.support();
    let rhs = b.image(&a.support())?;
    t.record("support-of-conjugate", lhs == rhs, ctx);
    t.record("support-matches-oracle", oracle::set_equal(base, &oracle::support(&a), &words_of(&a.support())), ctx);
    let oracle_rhs = oracle::image(&b, &oracle::support(&a));
    t.record(
        "conjugate-support-matches-oracle",
        oracle_rhs.is_some_and(|r| oracle::set_equal(base, &r, &oracle::support(&conj))),
        ctx,
    );
    let s = random::random_clopen(rng, base, depth)?;
    let img = b.image(&s)?;
    let oracle_img = oracle::image(&b, &words_of(&s));
    t.record("image-matches-oracle", oracle_img.is_some_and(|i| oracle::set_equal(base, &i, &words_of(&img))), || {
        format!("beta={b} set={s}")
    });
    Ok(())
}

/// Union, intersection, difference, complement and measure against covering
/// checks.
fn clopen_ops_agree(a: &ClopenSet, b: &ClopenSet) -> Result<bool, HarnessError> {
    let base = a.base();
    let (wa, wb) = (words_of(a), words_of(b));
    let wu = words_of(&a.union(b)?);
    let wi = words_of(&a.intersect(b)?);
    let wd = words_of(&a.difference(b)?);
    let wc = words_of(&a.complement());
    let mut ok = oracle::set_equal(base, &wu, &[wa.clone(), wb.clone()].concat());
    ok &= oracle::set_equal(base, &wa, &[wi.clone(), wd.clone()].concat());
    ok &= oracle::subset(base, &wi, &wb) && oracle::disjoint(&wd, &wb);
    ok &= oracle::disjoint(&wa, &wc) && oracle::is_whole(base, &[wa.clone(), wc].concat());
    ok &= a.is_subset(b)? == oracle::subset(base, &wa, &wb);
    ok &= oracle::measure(base, &wa) == Some(a.try_measure()?.to_ratio()?);
    Ok(ok)
}

fn lemma_transfers(rng: &mut ChaCha8Rng, backend: Backend, depth: usize, _: usize, t: &mut Tally) -> Result<(), HarnessError> {
    let base = backend.base;
    let (a, b) = random::random_admissible_pair(rng, backend, depth, 1)?;
    let ctx = || format!("A={a} B={b}");
    t.record("clopen-ops-match-oracle", clopen_ops_agree(&a, &b)?, ctx);
    let r = full_group_transfer(backend, &a, &b)?;
    t.record("postconditions", r.check(&a, &b).is_ok(), ctx);
    let g = &r.element;
    let (wa, wb) = (words_of(&a), words_of(&b));
    let image = oracle::image(g, &wa).unwrap_or_default();
    t.record("image-inside-b", oracle::subset(base, &image, &wb), ctx);
    let supp = oracle::support(g);
    match r.kind {
        TransferKind::InvolutionSmallSupport => {
            t.record("involution", g.compose(g)?.is_identity(), ctx);
            t.record("support-inside-a-and-image", oracle::subset(base, &supp, &[wa.clone(), image].concat()), ctx);
        }
        TransferKind::InsideCaseSupportBound => {
            t.record("inside-case-leaves-room", !oracle::is_whole(base, &[wa.clone(), supp].concat()), ctx);
        }
        _ => t.record("expected-kind", false, ctx),
    }
    Ok(())
}

fn commutator_transfers(rng: &mut ChaCha8Rng, backend: Backend, depth: usize, _: usize, t: &mut Tally) -> Result<(), HarnessError> {
    let base = backend.base;
    let (a, b) = random::random_admissible_pair(rng, backend, depth, 3)?;
    let ctx = || format!("A={a} B={b}");
    let r = commutator_transfer(backend, &a, &b)?;
    t.record("postconditions", r.check(&a, &b).is_ok(), ctx);
    let g = &r.element;
    let witness_ok = match &r.witness {
        Some(w) => w.evaluate()? == *g,
        None => false,
    };
    t.record("witness-evaluates", witness_ok, ctx);
    let (wa, wb) = (words_of(&a), words_of(&b));
    let image = oracle::image(g, &wa).unwrap_or_default();
    t.record("image-inside-b", oracle::subset(base, &image, &wb), ctx);
    let supp = oracle::support(g);
    match r.kind {
        TransferKind::CommutatorCyclic => {
            let image2 = oracle::image(g, &image).unwrap_or_default();
            t.record("second-image-inside-b", oracle::subset(base, &image2, &wb), ctx);
            t.record(
                "support-inside-orbit",
                oracle::subset(base, &supp, &[wa.clone(), image, image2].concat()),
                ctx,
            );
        }
        TransferKind::CommutatorInsideCase => {
            t.record("inside-case-leaves-room", !oracle::is_whole(base, &[wa.clone(), supp].concat()), ctx);
        }
        _ => t.record("expected-kind", false, ctx),
    }
    Ok(())
}

fn gw(rng: &mut ChaCha8Rng, backend: Backend, depth: usize, trial: usize, t: &mut Tally) -> Result<(), HarnessError> {
    let base = backend.base;
    let (a, b) = random::random_equal_measure_pair(rng, backend, depth)?;
    let ctx = || format!("A={a} B={b}");
    let swap = exact_swap_involution(backend, &a, &b)?;
    let (wa, wb) = (words_of(&a), words_of(&b));
    let image = oracle::image(&swap, &wa).unwrap_or_default();
    t.record("swap-image", oracle::set_equal(base, &image, &wb) && swap.image(&a)? == b, ctx);
    t.record("swap-involution", swap.compose(&swap)?.is_identity(), ctx);
    let sym = a.difference(&b)?.union(&b.difference(&a)?)?;
    t.record("swap-support", oracle::set_equal(base, &oracle::support(&swap), &words_of(&sym)), ctx);

    let rounds = 1 + trial % 8;
    let state = gw_intertwining(backend, &a, &b, rounds)?;
    t.record("gw-invariants", state.check().is_ok(), ctx);
    t.record("gw-round-count", state.round() == rounds, ctx);
    let mut diam_ok = true;
    let mut annulus_ok = true;
    for (i, r) in state.rounds.iter().enumerate() {
        let n = i + 1;
        diam_ok &= oracle::common_prefix_at_least(&words_of(&r.residual_a), n);
        if n >= 2 {
            diam_ok &= oracle::common_prefix_at_least(&words_of(&r.residual_b), n);
        }
        let img = oracle::image(&r.alpha, &words_of(&r.annulus_a)).unwrap_or_default();
        annulus_ok &= oracle::set_equal(base, &img, &words_of(&r.annulus_b));
    }
    t.record("gw-diameters", diam_ok, ctx);
    t.record("gw-annuli", annulus_ok, ctx);
    if trial.is_multiple_of(4) {
        let longer = gw_intertwining(backend, &a, &b, rounds + 1)?;
        t.record("gw-prefix-stable", longer.rounds[..rounds] == state.rounds[..], ctx);
    }
    Ok(())
}

const EPSILONS: [(u128, u128); 3] = [(1, 4), (1, 8), (1, 16)];

fn decomposition(rng: &mut ChaCha8Rng, backend: Backend, depth: usize, trial: usize, t: &mut Tally) -> Result<(), HarnessError> {
    let base = backend.base;
    let alpha = random::random_element(rng, backend, depth)?;
    let (p, q) = EPSILONS[trial % EPSILONS.len()];
    let eps = Ratio::new(p, q);
    let ctx = || format!("alpha={alpha} eps={eps}");
    let d = decompose_small_support(&alpha, eps)?;
    t.record("postconditions", d.check(&alpha).is_ok(), ctx);
    t.record("reconstruction", d.product()? == alpha, ctx);
    let mut proper = true;
    let mut inside = true;
    let mut small = true;
    for (f, c) in d.factors.iter().zip(&d.bounds) {
        let wc = words_of(c);
        proper &= !oracle::is_whole(base, &wc);
        inside &= oracle::subset(base, &oracle::support(f), &wc);
        if backend.has_measure() {
            small &= oracle::measure(base, &wc).is_some_and(|m| m < eps);
        }
    }
    t.record("bounds-proper", proper, ctx);
    t.record("support-inside-bound", inside, ctx);
    t.record("bounds-small", small, ctx);
    Ok(())
}

fn split(rng: &mut ChaCha8Rng, backend: Backend, depth: usize, _: usize, t: &mut Tally) -> Result<(), HarnessError> {
    let base = backend.base;
    let tau = random::random_nontrivial(rng, backend, depth)?;
    let ctx = || format!("tau={tau}");
    let s = split_nontrivial_support(&tau)?;
    t.record("postconditions", s.check(&tau).is_ok(), ctx);
    t.record("product", s.tau1.compose(&s.tau2)? == tau, ctx);
    t.record(
        "proper-supports",
        !oracle::is_whole(base, &oracle::support(&s.tau1)) && !oracle::is_whole(base, &oracle::support(&s.tau2)),
        ctx,
    );
    t.record("certificate-scan", structural_scan(&s.certificate).is_ok(), ctx);
    t.record("certificate-verifies", verify_certificate(&s.certificate, &s.environment, &s.tau1)?, ctx);
    Ok(())
}

fn simplicity(rng: &mut ChaCha8Rng, backend: Backend, depth: usize, trial: usize, t: &mut Tally) -> Result<(), HarnessError> {
    let depth = depth.min(5);
    let mut env = Environment::new(backend);
    let tau0 = random::random_non_involution(rng, backend, depth)?;
    env.insert("tau0", tau0.clone())?;
    let names = ["alpha", "beta", "gamma", "delta"];
    let count = if trial.is_multiple_of(4) { 4 } else { 2 };
    for name in &names[..count] {
        env.insert(name, random::random_element(rng, backend, depth)?)?;
    }
    let mut targets = vec![("alpha".to_string(), "beta".to_string())];
    if count == 4 {
        targets.push(("gamma".to_string(), "delta".to_string()));
    }
    let described: Vec<String> = env.elements().iter().map(|(k, v)| format!("{k}={v}")).collect();
    let described = described.join(" ");
    let ctx = || described.clone();
    let (cp, _) = simplicity_certificate("tau0", &targets, &mut env)?;
    let target = commutator_target(&targets, &env)?;
    t.record("certificate-scan", structural_scan(&cp).is_ok(), ctx);
    t.record("certificate-verifies", verify_certificate(&cp, &env, &target)?, ctx);
    if !cp.is_empty() {
        let mut mutated = cp.clone();
        let i = rng.gen_range(0..mutated.len());
        mutated.factors[i].inverse = !mutated.factors[i].inverse;
        t.record("sign-flip-rejected", !verify_certificate(&mutated, &env, &target)?, ctx);
    }
    let gs: Vec<String> = vec!["alpha".into(), "beta".into()];
    let hs: Vec<String> = vec!["beta".into(), "alpha".into(), "beta".into()];
    let (lhs, rhs) = commutator_product_identity(&gs, &hs)?;
    t.record("expansion-identity", lhs.evaluate(&env)? == rhs.evaluate(&env)?, ctx);
    if !tau0.support().is_whole() {
        let (w, _) = normality_certificate("tau0", "alpha", &mut env)?;
        let alpha = env.get("alpha")?.clone();
        let lhs = alpha.conjugate(&tau0)?;
        let rhs = w.evaluate(&env)?.conjugate(&tau0)?;
        t.record("normality", lhs == rhs && !w.mentions("tau0"), ctx);
    }
    Ok(())
}
