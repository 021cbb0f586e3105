//! Factorizations into elements of small support.

use alloc::vec::Vec;

use crate::backend::{require, Backend, BackendKind};
use crate::certificate::{ConjugateFactor, ConjugateProduct, Environment, GroupWord};
use crate::clopen::{cylinder_ratio, ClopenSet};
use crate::element::GroupElement;
use crate::error::{ensure, Error, Result};
use crate::transfer::{commutator_transfer, exact_swap_involution, full_group_transfer, TransferKind};
use crate::word::Word;
use crate::Ratio;

/// `α = α₁α₂⋯αₙ` with `supp(αᵢ) ⊆ Cᵢ ≠ X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionResult {
    pub backend: Backend,
    pub factors: Vec<GroupElement>,
    pub bounds: Vec<ClopenSet>,
    /// The measure threshold, on the odometer only.
    pub epsilon: Option<Ratio>,
}

impl DecompositionResult {
    /// `α₁ ∘ α₂ ∘ ⋯ ∘ αₙ`.
    pub fn product(&self) -> Result<GroupElement> {
        let mut acc = GroupElement::identity(self.backend);
        for f in &self.factors {
            acc = acc.compose(f)?;
        }
        Ok(acc)
    }

    /// Checks reconstruction, support bounds, properness and the measure
    /// bound against the element that was decomposed.
    pub fn check(&self, alpha: &GroupElement) -> Result<()> {
        ensure(self.factors.len() == self.bounds.len(), "factor and bound counts differ")?;
        ensure(self.product()? == *alpha, "factors do not multiply back to the element")?;
        for (f, c) in self.factors.iter().zip(&self.bounds) {
            ensure(f.support().is_subset(c)?, "factor support escapes its bound")?;
            ensure(!c.is_whole(), "bound is the whole space")?;
            if let Some(eps) = self.epsilon {
                ensure(c.try_measure()?.to_ratio()? < eps, "bound measure not below epsilon")?;
            }
        }
        Ok(())
    }
}

/// Smallest `d` with `b^(−d) < ε/2` and `2·b^(−d) < 1`.
pub fn partition_depth(base: u8, epsilon: Ratio) -> Result<usize> {
    require(epsilon > Ratio::from_integer(0), "epsilon must be positive")?;
    let half = epsilon / Ratio::from_integer(2);
    let mut d = 1u32;
    loop {
        let m = cylinder_ratio(base, d)?;
        if m < half && m * Ratio::from_integer(2) < Ratio::from_integer(1) {
            return Ok(d as usize);
        }
        d += 1;
    }
}

/// Writes `α` as a product of elements whose supports lie in proper clopen
/// sets, of measure below `ε` on the odometer.
///
/// On the odometer the space is cut into cylinders `Aᵢ` of depth
/// [`partition_depth`]. Factor `αᵢ` agrees with the residual `ρ` on `Aᵢ`, sends
/// `ρ(Aᵢ)∖Aᵢ` back onto `Aᵢ∖ρ(Aᵢ)` by an exact swap and fixes everything else,
/// so its support lies in `Cᵢ = Aᵢ ∪ ρ(Aᵢ)`. The residual `αᵢ⁻¹ρ` is then the
/// identity on `A₁ ∪ ⋯ ∪ Aᵢ`. Identity factors are dropped.
///
/// On the full shift `ε` is ignored. For a cylinder `A` with `A ∩ α(A) = ∅`
/// and `A ∪ α(A) ≠ X`, the factors are the involution `α₁` equal to `α` on
/// `A`, and `α₂ = α₁⁻¹α`, which is the identity on `A`.
pub fn decompose_small_support(alpha: &GroupElement, epsilon: Ratio) -> Result<DecompositionResult> {
    let backend = alpha.backend();
    let mut out = DecompositionResult { backend, factors: Vec::new(), bounds: Vec::new(), epsilon: None };
    match backend.kind {
        BackendKind::Odometer => {
            let depth = partition_depth(backend.base, epsilon)?;
            out.epsilon = Some(epsilon);
            if !alpha.is_identity() {
                peel(alpha, depth, &mut out)?;
            }
        }
        BackendKind::FullShift => {
            if !alpha.is_identity() {
                split_at_cylinder(alpha, &mut out)?;
            }
        }
    }
    out.check(alpha)?;
    Ok(out)
}

fn peel(alpha: &GroupElement, depth: usize, out: &mut DecompositionResult) -> Result<()> {
    let backend = alpha.backend();
    let base = backend.base;
    let mut rho = alpha.clone();
    let mut done = ClopenSet::empty(base);
    for w in Word::all_of_length(base, depth) {
        if rho.is_identity() {
            break;
        }
        let ai = ClopenSet::cylinder(base, w)?;
        let mut pieces = rho.pieces_on(&ai)?;
        done = done.union(&ai)?;
        if pieces.iter().all(|p| !p.moves()) {
            continue;
        }
        let image = rho.image(&ai)?;
        let gap = ai.difference(&image)?;
        let spill = image.difference(&ai)?;
        if !gap.is_empty() {
            let swap = exact_swap_involution(backend, &gap, &spill)?;
            pieces.extend(swap.pieces_on(&spill)?);
        }
        let factor = GroupElement::from_partial(backend, pieces)?;
        rho = factor.inverse().compose(&rho)?;
        ensure(rho.support().is_disjoint(&done)?, "residual still moves peeled cylinders")?;
        out.factors.push(factor);
        out.bounds.push(ai.union(&image)?);
    }
    ensure(rho.is_identity(), "residual is not the identity after peeling")
}

fn split_at_cylinder(alpha: &GroupElement, out: &mut DecompositionResult) -> Result<()> {
    let backend = alpha.backend();
    let a = ClopenSet::cylinder(backend.base, find_separating_cylinder(alpha, 0)?)?;
    let image = alpha.image(&a)?;
    let mut pieces = alpha.pieces_on(&a)?;
    pieces.extend(alpha.inverse().pieces_on(&image)?);
    let first = GroupElement::from_partial(backend, pieces)?;
    let second = first.inverse().compose(alpha)?;
    out.factors.push(first);
    out.bounds.push(a.union(&image)?);
    if !second.is_identity() {
        out.factors.push(second);
        out.bounds.push(a.complement());
    }
    Ok(())
}

/// A cylinder `[w]` with `|w| ≥ min_depth`, `[w] ∩ g([w]) = ∅` and
/// `[w] ∪ g([w]) ≠ X`.
///
/// Takes the first moving piece of `g`. Odometer pieces are followed down
/// `u·0^k`; for a prefix exchange `u ↦ v` with `u`, `v` comparable a symbol
/// `t` is inserted first so that `u·t` and its image part ways.
pub fn find_separating_cylinder(g: &GroupElement, min_depth: usize) -> Result<Word> {
    let base = g.base();
    let piece = g
        .pieces()
        .iter()
        .find(|p| p.moves())
        .ok_or_else(|| Error::Precondition("the identity moves no cylinder".into()))?;
    let u = piece.source().clone();
    let v = piece.range(base);
    let mut w = if u.comparable(&v) && g.backend().kind == BackendKind::FullShift {
        let split = if u.len() < v.len() { v.symbols()[u.len()] } else { u.symbols()[v.len()] };
        u.child((split + 1) % base)
    } else {
        u
    };
    for _ in 0..512 {
        if w.len() >= min_depth {
            let image = g.image_of_cylinder(&w).ok_or(Error::Postcondition("descent left its piece".into()))?;
            if !w.comparable(&image) {
                let pair = ClopenSet::canonicalize(base, alloc::vec![w.clone(), image])?;
                if !pair.is_whole() {
                    return Ok(w);
                }
            }
        }
        w = w.child(0);
    }
    Err(Error::Postcondition("no separating cylinder found".into()))
}

/// A clopen set `C` with `g(C) ∩ C = ∅`, grown greedily from
/// [`find_separating_cylinder`] by cylinders of one fixed depth in
/// lexicographic order.
pub fn separating_set(g: &GroupElement) -> Result<ClopenSet> {
    let base = g.base();
    let seed = find_separating_cylinder(g, 0)?;
    let piece_depth = g.pieces().iter().map(|p| p.source().len()).max().unwrap_or(0);
    let mut depth = seed.len().max(piece_depth);
    while depth > seed.len() && (base as usize).saturating_pow(depth as u32) > 4096 {
        depth -= 1;
    }
    let mut set = ClopenSet::cylinder(base, seed.clone())?;
    let mut image = g.image(&set)?;
    for w in Word::all_of_length(base, depth) {
        let Some(wi) = g.image_of_cylinder(&w) else { continue };
        if w.comparable(&wi) {
            continue;
        }
        let cw = ClopenSet::cylinder(base, w)?;
        let ci = ClopenSet::cylinder(base, wi)?;
        if cw.is_disjoint(&set)? && cw.is_disjoint(&image)? && ci.is_disjoint(&set)? {
            set = set.union(&cw)?;
            image = image.union(&ci)?;
        }
    }
    ensure(g.image(&set)?.is_disjoint(&set)?, "separating set meets its image")?;
    Ok(set)
}

/// `τ = τ₁τ₂` with both supports proper, together with a certificate writing
/// `τ₁` as a product of conjugates of `τ` and `τ⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitResult {
    pub tau1: GroupElement,
    pub tau2: GroupElement,
    /// Over the generator `tau`, with conjugators in `sigma` and `gamma`.
    pub certificate: ConjugateProduct,
    pub environment: Environment,
    /// The separating cylinder `A` and its proper part `A₀`.
    pub a: ClopenSet,
    pub a0: ClopenSet,
}

impl SplitResult {
    pub fn check(&self, tau: &GroupElement) -> Result<()> {
        ensure(self.tau1.compose(&self.tau2)? == *tau, "tau1 tau2 differs from tau")?;
        ensure(!self.tau1.support().is_whole(), "supp(tau1) is the whole space")?;
        ensure(!self.tau2.support().is_whole(), "supp(tau2) is the whole space")?;
        let rest = self.a.difference(&self.a0)?;
        ensure(self.tau1.support().is_disjoint(&rest)?, "supp(tau1) meets A minus A0")?;
        ensure(self.tau2.support().is_disjoint(&self.a0)?, "supp(tau2) meets A0")?;
        ensure(self.certificate.evaluate(&self.environment)? == self.tau1, "certificate does not evaluate to tau1")
    }
}

/// Splits a nontrivial `τ` into two factors of proper support.
///
/// A separating cylinder `A` (of measure below `1/16` on the odometer) is
/// shrunk until `A ∪ τA ∪ τ⁻¹A ∪ B ≠ X`, where `B = σ₀(τA)` for a transfer
/// `σ₀` of `τA` off `A ∪ τA`. With `A₀ = [w·0]` and `B₀ = σ₀(τA₀)`, the element
/// `σ = σ₁σ₂ = [σ₂, σ₁]` cycles `A₀ → τA₀ → B₀` and agrees with `τ` on `A₀`. A
/// commutator `γ` moves `τA ∪ B` into the rest `C`, and then
/// `τ₀ = [γσγ⁻¹, τ]`, `τ₁ = γ⁻¹τ₀γ`, `τ₂ = τ₁⁻¹τ`.
pub fn split_nontrivial_support(tau: &GroupElement) -> Result<SplitResult> {
    require(!tau.is_identity(), "tau must not be the identity")?;
    let backend = tau.backend();
    let base = backend.base;
    let mut min_depth = 0;
    if backend.has_measure() {
        let limit = Ratio::new(1, 16);
        while cylinder_ratio(base, min_depth as u32)? >= limit {
            min_depth += 1;
        }
    }
    let tau_inv = tau.inverse();
    let mut attempt = 0;
    let (w, t_a, sigma0, b) = loop {
        let w = find_separating_cylinder(tau, min_depth)?;
        let a = ClopenSet::cylinder(base, w.clone())?;
        let t_a = tau.image(&a)?;
        let room = a.union(&t_a)?.complement();
        let sigma0 = full_group_transfer(backend, &t_a, &room)?.element;
        let b = sigma0.image(&t_a)?;
        let cover = a.union(&t_a)?.union(&tau_inv.image(&a)?)?.union(&b)?;
        if !cover.is_whole() {
            break (w, t_a, sigma0, b);
        }
        attempt += 1;
        ensure(attempt < 64, "could not shrink the separating cylinder")?;
        min_depth = w.len() + 1;
    };
    let a = ClopenSet::cylinder(base, w.clone())?;
    let a0 = ClopenSet::cylinder(base, w.child(0))?;
    let t_a0 = tau.image(&a0)?;
    let b0 = sigma0.image(&t_a0)?;

    let mut p1 = tau.pieces_on(&a0)?;
    p1.extend(tau_inv.pieces_on(&t_a0)?);
    let sigma1 = GroupElement::from_partial(backend, p1)?;
    let mut p2 = sigma0.pieces_on(&t_a0)?;
    p2.extend(sigma0.inverse().pieces_on(&b0)?);
    let sigma2 = GroupElement::from_partial(backend, p2)?;
    let sigma = sigma1.compose(&sigma2)?;
    ensure(sigma == sigma2.commutator_with(&sigma1)?, "sigma is not [sigma2, sigma1]")?;

    let cover = a.union(&t_a)?.union(&tau_inv.image(&a)?)?.union(&b)?;
    let moved = t_a.union(&b)?;
    let transfer = commutator_transfer(backend, &moved, &cover.complement())?;
    ensure(transfer.kind == TransferKind::CommutatorCyclic, "unexpected commutator transfer branch")?;
    let gamma = transfer.element;
    ensure(gamma.support().is_disjoint(&a)?, "gamma moves A")?;

    let conj = gamma.conjugate(&sigma)?;
    let tau0 = conj.commutator_with(tau)?;
    let gamma_inv = gamma.inverse();
    let tau1 = gamma_inv.conjugate(&tau0)?;
    let tau2 = tau1.inverse().compose(tau)?;

    let mut environment = Environment::new(backend);
    environment.insert("tau", tau.clone())?;
    environment.insert("sigma", sigma)?;
    environment.insert("gamma", gamma)?;
    let certificate = ConjugateProduct {
        generator: "tau".into(),
        factors: alloc::vec![
            ConjugateFactor { conjugator: GroupWord::parse("sigma gamma^-1")?, inverse: false },
            ConjugateFactor { conjugator: GroupWord::parse("gamma^-1")?, inverse: true },
        ],
    };
    let result = SplitResult { tau1, tau2, certificate, environment, a, a0 };
    result.check(tau)?;
    Ok(result)
}
