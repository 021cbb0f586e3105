//! Products of conjugates of a distinguished element, and the synthesizers
//! that express commutators in that form.
//!
//! A [`GroupWord`] is evaluated left to right as composition: the word
//! `a b` denotes `a ∘ b`. A [`ConjugateProduct`] over the generator `t`
//! denotes `Π gᵢ t^(±1) gᵢ⁻¹` in list order. All names resolve in an
//! [`Environment`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::backend::{require, Backend, BackendKind};
use crate::clopen::ClopenSet;
use crate::decompose::{decompose_small_support, separating_set};
use crate::element::GroupElement;
use crate::error::{ensure, Error, Result};
use crate::transfer::full_group_transfer;
use crate::Ratio;

/// One letter of a word: a name or its inverse.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token {
    pub name: String,
    pub inverse: bool,
}

impl Token {
    pub fn new(name: &str) -> Self {
        Token { name: name.to_string(), inverse: false }
    }

    pub fn inv(name: &str) -> Self {
        Token { name: name.to_string(), inverse: true }
    }

    pub fn inverted(&self) -> Self {
        Token { name: self.name.clone(), inverse: !self.inverse }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

/// Names start with a letter or `_` and continue with letters, digits, `_`
/// and `.`.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

/// A finite word in named elements and their inverses.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupWord {
    pub tokens: Vec<Token>,
}

impl GroupWord {
    pub fn empty() -> Self {
        GroupWord { tokens: Vec::new() }
    }

    pub fn from_tokens(tokens: Vec<Token>) -> Self {
        GroupWord { tokens }
    }

    pub fn atom(name: &str) -> Self {
        GroupWord { tokens: alloc::vec![Token::new(name)] }
    }

    /// Parses whitespace-separated letters `name` or `name^-1`; `1` and the
    /// empty string are the empty word.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "1" {
            return Ok(GroupWord::empty());
        }
        let mut tokens = Vec::new();
        for part in text.split_whitespace() {
            let (name, inverse) = match part.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (part, false),
            };
            if !is_identifier(name) {
                return Err(Error::Malformed(format!("bad name {part:?} in word")));
            }
            tokens.push(Token { name: name.to_string(), inverse });
        }
        Ok(GroupWord { tokens })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn inverse(&self) -> Self {
        GroupWord { tokens: self.tokens.iter().rev().map(Token::inverted).collect() }
    }

    pub fn concat(&self, other: &GroupWord) -> Self {
        let mut tokens = self.tokens.clone();
        tokens.extend(other.tokens.iter().cloned());
        GroupWord { tokens }
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &GroupWord, b: &GroupWord) -> Self {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.tokens.iter().any(|t| t.name == name)
    }

    pub fn evaluate(&self, env: &Environment) -> Result<GroupElement> {
        let mut acc = GroupElement::identity(env.backend);
        for t in &self.tokens {
            acc = acc.compose(&env.letter(t)?)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tokens.is_empty() {
            return f.write_str("1");
        }
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Named elements of one backend.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Environment {
    backend: Backend,
    elements: BTreeMap<String, GroupElement>,
}

impl Environment {
    pub fn new(backend: Backend) -> Self {
        Environment { backend, elements: BTreeMap::new() }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn elements(&self) -> &BTreeMap<String, GroupElement> {
        &self.elements
    }

    /// Binds `name`. Rebinding a name to a different element is refused.
    pub fn insert(&mut self, name: &str, element: GroupElement) -> Result<()> {
        if !is_identifier(name) {
            return Err(Error::Malformed(format!("bad element name {name:?}")));
        }
        self.backend.check_same(&element.backend())?;
        match self.elements.get(name) {
            Some(old) if *old != element => Err(Error::Precondition(format!("name {name} is already bound"))),
            _ => {
                self.elements.insert(name.to_string(), element);
                Ok(())
            }
        }
    }

    pub fn get(&self, name: &str) -> Result<&GroupElement> {
        self.elements.get(name).ok_or_else(|| Error::UnresolvedName(name.to_string()))
    }

    /// The first of `stem`, `stem.2`, `stem.3`, … that is unbound.
    pub fn fresh_name(&self, stem: &str) -> String {
        if !self.elements.contains_key(stem) {
            return stem.to_string();
        }
        (2..).map(|i| format!("{stem}.{i}")).find(|n| !self.elements.contains_key(n)).unwrap()
    }

    pub fn bind_fresh(&mut self, stem: &str, element: GroupElement) -> Result<String> {
        let name = self.fresh_name(stem);
        self.insert(&name, element)?;
        Ok(name)
    }

    fn letter(&self, t: &Token) -> Result<GroupElement> {
        let g = self.get(&t.name)?;
        Ok(if t.inverse { g.inverse() } else { g.clone() })
    }
}

/// `g · t^(±1) · g⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConjugateFactor {
    pub conjugator: GroupWord,
    /// `true` for `t⁻¹`.
    pub inverse: bool,
}

/// `Π gᵢ t^(±1) gᵢ⁻¹` over a named generator `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConjugateProduct {
    pub generator: String,
    pub factors: Vec<ConjugateFactor>,
}

impl ConjugateProduct {
    pub fn identity(generator: &str) -> Self {
        ConjugateProduct { generator: generator.to_string(), factors: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The product written out as one word.
    pub fn flatten(&self) -> GroupWord {
        let mut tokens = Vec::new();
        for f in &self.factors {
            tokens.extend(f.conjugator.tokens.iter().cloned());
            tokens.push(Token { name: self.generator.clone(), inverse: f.inverse });
            tokens.extend(f.conjugator.inverse().tokens);
        }
        GroupWord { tokens }
    }

    /// Exact evaluation. A run of consecutive factors whose conjugators start
    /// with the same letter `x` is evaluated as `x · (inner run) · x⁻¹`, so
    /// shared conjugator prefixes are applied once and the inner products,
    /// which tend to have small support, stay cheap. Single conjugates
    /// `w t w⁻¹` are memoized by `w`.
    pub fn evaluate(&self, env: &Environment) -> Result<GroupElement> {
        let mut letters: BTreeMap<&str, (GroupElement, GroupElement)> = BTreeMap::new();
        for f in &self.factors {
            for tok in &f.conjugator.tokens {
                if !letters.contains_key(tok.name.as_str()) {
                    let g = env.get(&tok.name)?;
                    letters.insert(&tok.name, (g.clone(), g.inverse()));
                }
            }
        }
        let mut eval = RunEvaluator {
            backend: env.backend,
            generator: env.get(&self.generator)?.clone(),
            letters,
            memo: BTreeMap::new(),
        };
        let items: Vec<(&[Token], bool)> = self.factors.iter().map(|f| (&f.conjugator.tokens[..], f.inverse)).collect();
        eval.runs(&items)
    }

    pub fn concat(&mut self, other: ConjugateProduct) -> Result<()> {
        require(self.generator == other.generator, "generators differ")?;
        self.factors.extend(other.factors);
        Ok(())
    }
}

struct RunEvaluator<'a> {
    backend: Backend,
    generator: GroupElement,
    letters: BTreeMap<&'a str, (GroupElement, GroupElement)>,
    /// `w ↦ (w t w⁻¹, w t⁻¹ w⁻¹)`.
    memo: BTreeMap<Vec<Token>, (GroupElement, GroupElement)>,
}

impl RunEvaluator<'_> {
    fn letter(&self, t: &Token) -> &GroupElement {
        let (g, g_inv) = &self.letters[t.name.as_str()];
        if t.inverse {
            g_inv
        } else {
            g
        }
    }

    fn single(&mut self, word: &[Token], inverse: bool) -> Result<GroupElement> {
        if let Some((p, n)) = self.memo.get(word) {
            return Ok(if inverse { n.clone() } else { p.clone() });
        }
        let positive = match word.split_first() {
            None => self.generator.clone(),
            Some((x, rest)) => {
                let inner = self.single(rest, false)?;
                self.letter(x).conjugate(&inner)?
            }
        };
        let negative = positive.inverse();
        let out = if inverse { negative.clone() } else { positive.clone() };
        self.memo.insert(word.to_vec(), (positive, negative));
        Ok(out)
    }

    fn runs(&mut self, items: &[(&[Token], bool)]) -> Result<GroupElement> {
        let mut acc = GroupElement::identity(self.backend);
        let mut i = 0;
        while i < items.len() {
            let (word, inverse) = items[i];
            let mut j = i + 1;
            if let Some(head) = word.first() {
                while j < items.len() && items[j].0.first() == Some(head) {
                    j += 1;
                }
            }
            let value = if j == i + 1 {
                self.single(word, inverse)?
            } else {
                let inner: Vec<(&[Token], bool)> = items[i..j].iter().map(|(w, s)| (&w[1..], *s)).collect();
                let inner = self.runs(&inner)?;
                self.letter(&word[0]).conjugate(&inner)?
            };
            acc = acc.compose(&value)?;
            i = j;
        }
        Ok(acc)
    }
}

/// Notes on the choices made while building a certificate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProofTrace {
    pub entries: Vec<TraceEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub tag: String,
    pub detail: String,
}

impl ProofTrace {
    pub fn push(&mut self, tag: &str, detail: String) {
        self.entries.push(TraceEntry { tag: tag.to_string(), detail });
    }

    pub fn extend(&mut self, other: ProofTrace) {
        self.entries.extend(other.entries);
    }
}

/// The commutator `[g_g, h_h]` conjugated by `conjugator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpandedCommutator {
    pub conjugator: GroupWord,
    pub g: usize,
    pub h: usize,
}

/// Writes `[g₁⋯gₙ, h₁⋯hₘ]` as a product of conjugates of the `n·m` commutators
/// `[gᵢ, hⱼ]`, using `[g₁G, H] = g₁[G, H]g₁⁻¹ · [g₁, H]` and
/// `[g, h₁H] = [g, h₁] · h₁[g, H]h₁⁻¹`.
pub fn expand_commutator_product(gs: &[String], hs: &[String]) -> Result<Vec<ExpandedCommutator>> {
    require(!gs.is_empty() && !hs.is_empty(), "commutator expansion needs nonempty lists")?;
    Ok(expand(gs, hs, 0, 0))
}

fn expand(gs: &[String], hs: &[String], g0: usize, h0: usize) -> Vec<ExpandedCommutator> {
    fn prefixed(name: &str, list: Vec<ExpandedCommutator>) -> Vec<ExpandedCommutator> {
        list.into_iter()
            .map(|mut e| {
                e.conjugator = GroupWord::atom(name).concat(&e.conjugator);
                e
            })
            .collect()
    }
    if gs.len() == 1 {
        let mut out = alloc::vec![ExpandedCommutator { conjugator: GroupWord::empty(), g: g0, h: h0 }];
        if hs.len() > 1 {
            out.extend(prefixed(&hs[0], expand(gs, &hs[1..], g0, h0 + 1)));
        }
        out
    } else {
        let mut out = prefixed(&gs[0], expand(&gs[1..], hs, g0 + 1, h0));
        out.extend(expand(&gs[..1], hs, g0, h0));
        out
    }
}

fn product_word(names: &[String]) -> GroupWord {
    GroupWord::from_tokens(names.iter().map(|n| Token::new(n)).collect())
}

/// The two sides of the expansion identity: `[g₁⋯gₙ, h₁⋯hₘ]` and the product of
/// conjugated atomic commutators.
pub fn commutator_product_identity(gs: &[String], hs: &[String]) -> Result<(GroupWord, GroupWord)> {
    let lhs = GroupWord::commutator(&product_word(gs), &product_word(hs));
    let mut rhs = GroupWord::empty();
    for e in expand_commutator_product(gs, hs)? {
        let atom = GroupWord::commutator(&GroupWord::atom(&gs[e.g]), &GroupWord::atom(&hs[e.h]));
        rhs = rhs.concat(&e.conjugator).concat(&atom).concat(&e.conjugator.inverse());
    }
    Ok((lhs, rhs))
}

/// Names of small-support factors of `name`: the name itself when `small`
/// holds for its support, and otherwise fresh names for the factors of a
/// decomposition with threshold `epsilon`.
fn small_factors(
    env: &mut Environment,
    name: &str,
    epsilon: Ratio,
    small: impl Fn(&ClopenSet) -> Result<bool>,
    trace: &mut ProofTrace,
) -> Result<Vec<String>> {
    let g = env.get(name)?.clone();
    if small(&g.support())? {
        return Ok(alloc::vec![name.to_string()]);
    }
    let d = decompose_small_support(&g, epsilon)?;
    let mut names = Vec::with_capacity(d.factors.len());
    for (f, c) in d.factors.into_iter().zip(d.bounds) {
        let n = env.bind_fresh(&format!("{name}.f"), f)?;
        trace.push("small-support", format!("{n} supported in {c}"));
        names.push(n);
    }
    Ok(names)
}

fn measure_ratio(set: &ClopenSet) -> Result<Ratio> {
    set.try_measure()?.to_ratio()
}

/// A word `w`, a product of commutators `[αᵢ, γᵢ]`, with `ατα⁻¹ = wτw⁻¹`.
///
/// Requires `supp(τ) ≠ X`. When `supp(α)` is too large to be moved off
/// `supp(τ)` (measure at least `μ(X∖supp τ)`, or the whole space) `α` is first
/// decomposed into factors `α₁⋯αₙ` bound in the environment, and the factors
/// are handled from the inside out: `γᵢ` moves `supp(αᵢ)` off the support of
/// the current conjugate of `τ`.
pub fn normality_certificate(tau: &str, alpha: &str, env: &mut Environment) -> Result<(GroupWord, ProofTrace)> {
    let t = env.get(tau)?.clone();
    let a = env.get(alpha)?.clone();
    let mut trace = ProofTrace::default();
    if a.is_identity() {
        return Ok((GroupWord::empty(), trace));
    }
    let backend = env.backend;
    let b = t.support();
    require(!b.is_whole(), "supp(tau) is the whole space; split tau first")?;
    let room = measure_ratio(&b.complement())?;
    let names = if backend.has_measure() {
        small_factors(env, alpha, room, |s| Ok(measure_ratio(s)? < room), &mut trace)?
    } else {
        small_factors(env, alpha, room, |s| Ok(!s.is_whole()), &mut trace)?
    };
    let mut word = GroupWord::empty();
    let mut current_support = b;
    for n in names.iter().rev() {
        let ai = env.get(n)?.clone();
        let gamma = full_group_transfer(backend, &ai.support(), &current_support.complement())?.element;
        let g = env.bind_fresh(&format!("{alpha}.gamma"), gamma)?;
        trace.push("normality", format!("{g} moves supp({n}) off {current_support}"));
        let c = GroupWord::commutator(&GroupWord::atom(n), &GroupWord::atom(&g));
        let ce = c.evaluate(env)?;
        current_support = ce.image(&current_support)?;
        word = c.concat(&word);
    }
    let w = word.evaluate(env)?;
    ensure(a.conjugate(&t)? == w.conjugate(&t)?, "conjugation identity fails")?;
    Ok((word, trace))
}

/// A product of conjugates of `τ₀^(±1)` equal to `[α, β]`.
///
/// `β` and then `α` are decomposed into factors of small support (on the
/// odometer `β` to measure below `1/2`, and `α` below `η/2` with
/// `η = min(μ(C), μ(X∖supp βⱼ))` for a set `C` with `τ₀(C) ∩ C = ∅`). The
/// commutator is expanded into atomic commutators `[αᵢ, βⱼ]`, and each nontrivial
/// one contributes eight conjugates: with `γ₀` moving `A = supp(αᵢ)` off
/// `B = supp(βⱼ)`, `σ` moving `D = A ∪ supp(γ₀)` into `C` and `s = σ⁻¹`,
/// the element `γ = [γ₀, sτ₀s⁻¹]` satisfies `γ(A) ∩ B = ∅` and
/// `[αᵢ, βⱼ] = [αᵢ, γ] · βⱼ[αᵢ, γ]⁻¹βⱼ⁻¹`.
pub fn commutator_in_normal_closure(
    alpha: &str,
    beta: &str,
    tau0: &str,
    env: &mut Environment,
) -> Result<(ConjugateProduct, ProofTrace)> {
    let t0 = env.get(tau0)?.clone();
    require(!t0.is_identity(), "tau0 must not be the identity")?;
    let a = env.get(alpha)?.clone();
    let b = env.get(beta)?.clone();
    let mut trace = ProofTrace::default();
    let mut product = ConjugateProduct::identity(tau0);
    if a.commutator_with(&b)?.is_identity() {
        trace.push("trivial", format!("[{alpha},{beta}] = 1"));
        return Ok((product, trace));
    }
    let backend = env.backend;
    let c = separating_set(&t0)?;
    trace.push("separating-set", format!("{tau0} moves {c} off itself"));
    let half = Ratio::new(1, 2);
    let (beta_names, alpha_names) = match backend.kind {
        BackendKind::Odometer => {
            let betas = small_factors(env, beta, half, |s| Ok(measure_ratio(s)? <= half), &mut trace)?;
            let mut eta = measure_ratio(&c)?;
            for n in &betas {
                eta = eta.min(measure_ratio(&env.get(n)?.support().complement())?);
            }
            let limit = eta / Ratio::from_integer(2);
            trace.push("eta", format!("{eta}"));
            let alphas = small_factors(env, alpha, limit, |s| Ok(measure_ratio(s)? < limit), &mut trace)?;
            (betas, alphas)
        }
        BackendKind::FullShift => {
            let whole = |s: &ClopenSet| Ok(!s.is_whole());
            let betas = small_factors(env, beta, half, whole, &mut trace)?;
            let alphas = small_factors(env, alpha, half, whole, &mut trace)?;
            (betas, alphas)
        }
    };
    let mut atomic_count = 0;
    for e in expand_commutator_product(&alpha_names, &beta_names)? {
        let (an, bn) = (&alpha_names[e.g], &beta_names[e.h]);
        if env.get(an)?.commutator_with(env.get(bn)?)?.is_identity() {
            continue;
        }
        atomic(env, &e.conjugator, an, bn, &c, &mut trace, &mut product)?;
        atomic_count += 1;
    }
    ensure(product.len() == 8 * atomic_count, "factor count differs from eight per atomic commutator")?;
    Ok((product, trace))
}

#[allow(clippy::too_many_arguments)]
fn atomic(
    env: &mut Environment,
    prefix: &GroupWord,
    alpha: &str,
    beta: &str,
    c: &ClopenSet,
    trace: &mut ProofTrace,
    product: &mut ConjugateProduct,
) -> Result<()> {
    let backend = env.backend;
    let a = env.get(alpha)?.support();
    let b = env.get(beta)?.support();
    let gamma0 = full_group_transfer(backend, &a, &b.complement())?.element;
    let d = a.union(&gamma0.support())?;
    ensure(!d.is_whole(), "A together with supp(gamma0) covers the space")?;
    let sigma = full_group_transfer(backend, &d, c)?.element;
    let g0 = env.bind_fresh("gamma0", gamma0)?;
    let s = env.bind_fresh("sigma", sigma)?;
    trace.push("atomic", format!("[{alpha},{beta}]: {g0} moves {a} off {b}; {s} moves {d} into the separating set"));
    let si = Token::inv(&s);
    let (ta, tb, tg) = (Token::new(alpha), Token::new(beta), Token::new(&g0));
    let layout: [(Vec<Token>, bool); 8] = [
        (alloc::vec![ta.clone(), tg.clone(), si.clone()], false),
        (alloc::vec![ta.clone(), si.clone()], true),
        (alloc::vec![si.clone()], false),
        (alloc::vec![tg.clone(), si.clone()], true),
        (alloc::vec![tb.clone(), tg.clone(), si.clone()], false),
        (alloc::vec![tb.clone(), si.clone()], true),
        (alloc::vec![tb.clone(), ta.clone(), si.clone()], false),
        (alloc::vec![tb, ta, tg, si], true),
    ];
    for (tokens, inverse) in layout {
        let conjugator = prefix.concat(&GroupWord::from_tokens(tokens));
        product.factors.push(ConjugateFactor { conjugator, inverse });
    }
    Ok(())
}

/// Concatenated certificates for `Π [αⱼ, βⱼ]`.
pub fn simplicity_certificate(
    tau0: &str,
    targets: &[(String, String)],
    env: &mut Environment,
) -> Result<(ConjugateProduct, ProofTrace)> {
    require(!env.get(tau0)?.is_identity(), "tau0 must not be the identity")?;
    let mut product = ConjugateProduct::identity(tau0);
    let mut trace = ProofTrace::default();
    for (a, b) in targets {
        let (p, t) = commutator_in_normal_closure(a, b, tau0, env)?;
        product.concat(p)?;
        trace.extend(t);
    }
    Ok((product, trace))
}

/// `Π [αⱼ, βⱼ]` evaluated in the environment.
pub fn commutator_target(targets: &[(String, String)], env: &Environment) -> Result<GroupElement> {
    let mut acc = GroupElement::identity(env.backend);
    for (a, b) in targets {
        acc = acc.compose(&env.get(a)?.commutator_with(env.get(b)?)?)?;
    }
    Ok(acc)
}

/// Checks that every occurrence of the generator in the flattened product
/// sits in a block `g · t^(±1) · g⁻¹` with `g` free of the generator.
pub fn structural_scan(cp: &ConjugateProduct) -> Result<()> {
    if !is_identifier(&cp.generator) {
        return Err(Error::Malformed(format!("bad generator name {:?}", cp.generator)));
    }
    for f in &cp.factors {
        if f.conjugator.mentions(&cp.generator) {
            return Err(Error::Postcondition(format!("conjugator {} contains the generator", f.conjugator)));
        }
    }
    let word = cp.flatten().tokens;
    let mut pos = 0;
    let mut blocks = 0;
    while pos < word.len() {
        let Some(offset) = word[pos..].iter().position(|t| t.name == cp.generator) else {
            return Err(Error::Postcondition("letters after the last conjugate".into()));
        };
        let g = &word[pos..pos + offset];
        let after = pos + offset + 1;
        let tail = after + g.len();
        let closes = tail <= word.len() && word[after..tail].iter().eq(g.iter().rev().map(Token::inverted).collect::<Vec<_>>().iter());
        if !closes {
            return Err(Error::Postcondition(format!("generator occurrence {blocks} is not conjugated")));
        }
        pos = tail;
        blocks += 1;
    }
    ensure(blocks == cp.factors.len(), "block count differs from factor count")
}

/// Structural scan, then exact evaluation compared with `target`.
///
/// Returns `Ok(false)` when the scan or the comparison fails, and an error for
/// unresolved names or a target on another backend.
pub fn verify_certificate(cp: &ConjugateProduct, env: &Environment, target: &GroupElement) -> Result<bool> {
    env.backend.check_same(&target.backend())?;
    env.get(&cp.generator)?;
    for f in &cp.factors {
        for t in &f.conjugator.tokens {
            env.get(&t.name)?;
        }
    }
    if structural_scan(cp).is_err() {
        return Ok(false);
    }
    Ok(cp.evaluate(env)? == *target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::Piece;
    use crate::word::Word;
    use alloc::vec;

    fn w(s: &str) -> Word {
        Word::new(s.bytes().map(|c| c - b'0').collect())
    }

    fn shift(pairs: &[(&str, &str)]) -> GroupElement {
        GroupElement::from_pieces(Backend::full_shift(2), pairs.iter().map(|(u, v)| Piece::shift(w(u), w(v))).collect())
            .unwrap()
    }

    fn odo(pairs: &[(&str, i128)]) -> GroupElement {
        GroupElement::from_pieces(Backend::odometer(2), pairs.iter().map(|(u, n)| Piece::odometer(w(u), *n)).collect())
            .unwrap()
    }

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn word_parse_and_display() {
        let g = GroupWord::parse("a b^-1 c.2").unwrap();
        assert_eq!(g.to_string(), "a b^-1 c.2");
        assert_eq!(g.inverse().to_string(), "c.2^-1 b a^-1");
        assert!(GroupWord::parse("1").unwrap().is_empty());
        assert!(GroupWord::parse("a ^-1").is_err());
        assert!(GroupWord::parse("2a").is_err());
    }

    #[test]
    fn expansion_shapes() {
        let single = expand_commutator_product(&names(&["g"]), &names(&["h"])).unwrap();
        assert_eq!(single, vec![ExpandedCommutator { conjugator: GroupWord::empty(), g: 0, h: 0 }]);
        let two = expand_commutator_product(&names(&["g1", "g2"]), &names(&["h"])).unwrap();
        assert_eq!(
            two,
            vec![
                ExpandedCommutator { conjugator: GroupWord::atom("g1"), g: 1, h: 0 },
                ExpandedCommutator { conjugator: GroupWord::empty(), g: 0, h: 0 },
            ]
        );
        assert!(expand_commutator_product(&[], &names(&["h"])).is_err());
        let (lhs, rhs) = commutator_product_identity(&names(&["g1", "g2"]), &names(&["h"])).unwrap();
        assert_eq!(lhs.to_string(), "g1 g2 h g2^-1 g1^-1 h^-1");
        assert_eq!(rhs.to_string(), "g1 g2 h g2^-1 h^-1 g1^-1 g1 h g1^-1 h^-1");
    }

    #[test]
    fn expansion_evaluates_equal() {
        let mut env = Environment::new(Backend::full_shift(2));
        env.insert("g1", shift(&[("0", "11"), ("11", "0"), ("10", "10")])).unwrap();
        env.insert("g2", shift(&[("0", "1"), ("1", "0")])).unwrap();
        env.insert("h1", shift(&[("00", "01"), ("01", "00"), ("1", "1")])).unwrap();
        env.insert("h2", shift(&[("0", "10"), ("10", "11"), ("11", "0")])).unwrap();
        let (lhs, rhs) = commutator_product_identity(&names(&["g1", "g2"]), &names(&["h1", "h2"])).unwrap();
        assert_eq!(lhs.evaluate(&env).unwrap(), rhs.evaluate(&env).unwrap());
        assert_eq!(expand_commutator_product(&names(&["g1", "g2"]), &names(&["h1", "h2"])).unwrap().len(), 4);
    }

    #[test]
    fn normality_identity_and_disjoint() {
        let mut env = Environment::new(Backend::odometer(2));
        env.insert("tau", odo(&[("00", 1), ("10", -1), ("01", 0), ("11", 0)])).unwrap();
        env.insert("id", GroupElement::identity(Backend::odometer(2))).unwrap();
        let (word, _) = normality_certificate("tau", "id", &mut env).unwrap();
        assert!(word.is_empty());
        env.insert("far", odo(&[("01", 1), ("11", -1), ("00", 0), ("10", 0)])).unwrap();
        let (word, _) = normality_certificate("tau", "far", &mut env).unwrap();
        let w = word.evaluate(&env).unwrap();
        let tau = env.get("tau").unwrap();
        assert_eq!(w.conjugate(tau).unwrap(), *tau);
    }

    #[test]
    fn normality_with_decomposition() {
        let mut env = Environment::new(Backend::odometer(2));
        env.insert("tau", odo(&[("000", 1), ("100", -1), ("001", 0), ("101", 0), ("01", 0), ("11", 0)])).unwrap();
        env.insert("phi", odo(&[("", 1)])).unwrap();
        let (word, _) = normality_certificate("tau", "phi", &mut env).unwrap();
        let w = word.evaluate(&env).unwrap();
        let tau = env.get("tau").unwrap();
        let phi = env.get("phi").unwrap();
        assert_eq!(w.conjugate(tau).unwrap(), phi.conjugate(tau).unwrap());
        let full = shift(&[("0", "1"), ("1", "0")]);
        let mut env = Environment::new(Backend::full_shift(2));
        env.insert("tau", full.clone()).unwrap();
        env.insert("a", shift(&[("00", "01"), ("01", "00"), ("1", "1")])).unwrap();
        assert!(normality_certificate("tau", "a", &mut env).is_err());
    }

    fn shift_env() -> Environment {
        let mut env = Environment::new(Backend::full_shift(2));
        env.insert("tau0", shift(&[("0", "10"), ("10", "11"), ("11", "0")])).unwrap();
        env.insert("alpha", shift(&[("00", "01"), ("01", "00"), ("1", "1")])).unwrap();
        env.insert("beta", shift(&[("0", "0"), ("10", "11"), ("11", "10")])).unwrap();
        env.insert("gamma", shift(&[("0", "1"), ("1", "0")])).unwrap();
        env.insert("delta", shift(&[("0", "11"), ("11", "0"), ("10", "10")])).unwrap();
        env
    }

    #[test]
    fn trivial_commutator_gives_empty_certificate() {
        let mut env = shift_env();
        let (cp, _) = commutator_in_normal_closure("alpha", "alpha", "tau0", &mut env).unwrap();
        assert!(cp.is_empty());
        let id = GroupElement::identity(Backend::full_shift(2));
        assert!(verify_certificate(&cp, &env, &id).unwrap());
    }

    #[test]
    fn atomic_certificate_has_eight_factors() {
        let mut env = shift_env();
        let target = env.get("gamma").unwrap().commutator_with(env.get("delta").unwrap()).unwrap();
        assert!(!target.is_identity());
        let mut small = env.clone();
        let (cp, _) = commutator_in_normal_closure("delta", "alpha", "tau0", &mut small).unwrap();
        let t2 = small.get("delta").unwrap().commutator_with(small.get("alpha").unwrap()).unwrap();
        assert_eq!(cp.len(), 8);
        assert!(verify_certificate(&cp, &small, &t2).unwrap());
        let (cp, _) = commutator_in_normal_closure("gamma", "delta", "tau0", &mut env).unwrap();
        assert_eq!(cp.len() % 8, 0);
        structural_scan(&cp).unwrap();
        assert!(verify_certificate(&cp, &env, &target).unwrap());
        let mut flipped = cp.clone();
        flipped.factors[0].inverse = !flipped.factors[0].inverse;
        assert!(!verify_certificate(&flipped, &env, &target).unwrap());
    }

    #[test]
    fn odometer_certificate() {
        let mut env = Environment::new(Backend::odometer(2));
        env.insert("tau0", odo(&[("", 1)])).unwrap();
        env.insert("a", odo(&[("00", 2), ("01", -2), ("10", 0), ("11", 0)])).unwrap();
        env.insert("b", odo(&[("0", 1), ("1", -1)])).unwrap();
        let targets = vec![("a".to_string(), "b".to_string())];
        let (cp, _) = simplicity_certificate("tau0", &targets, &mut env).unwrap();
        let target = commutator_target(&targets, &env).unwrap();
        assert!(!target.is_identity());
        assert!(verify_certificate(&cp, &env, &target).unwrap());
    }

    #[test]
    fn simplicity_certificates() {
        let mut env = shift_env();
        let (cp, _) = simplicity_certificate("tau0", &[], &mut env).unwrap();
        assert!(cp.is_empty());
        let targets = vec![("alpha".to_string(), "beta".to_string()), ("gamma".to_string(), "delta".to_string())];
        let (cp, _) = simplicity_certificate("tau0", &targets, &mut env).unwrap();
        assert!(verify_certificate(&cp, &env, &commutator_target(&targets, &env).unwrap()).unwrap());
    }

    #[test]
    fn verifier_errors_and_scan() {
        let env = shift_env();
        let mut cp = ConjugateProduct::identity("tau0");
        cp.factors.push(ConjugateFactor { conjugator: GroupWord::atom("nope"), inverse: false });
        let id = GroupElement::identity(Backend::full_shift(2));
        assert!(matches!(verify_certificate(&cp, &env, &id), Err(Error::UnresolvedName(_))));
        let odo_id = GroupElement::identity(Backend::odometer(2));
        assert!(matches!(
            verify_certificate(&ConjugateProduct::identity("tau0"), &env, &odo_id),
            Err(Error::BackendMismatch { .. })
        ));
        let mut bad = ConjugateProduct::identity("tau0");
        bad.factors.push(ConjugateFactor { conjugator: GroupWord::atom("tau0"), inverse: false });
        assert!(structural_scan(&bad).is_err());
        assert!(!verify_certificate(&bad, &env, &id).unwrap());
        assert!(verify_certificate(&ConjugateProduct::identity("tau0"), &env, &id).unwrap());
    }
}
