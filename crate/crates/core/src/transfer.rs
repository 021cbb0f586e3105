//! Moving clopen sets around with elements of the topological full group.
//!
//! * [`full_group_transfer`]: an element mapping `A` into `B`, either an
//!   involution supported on `A ∪ α(A)` or, when `B ⊆ A` on the full shift, a
//!   product of two involutions that leaves a reserved cylinder untouched.
//! * [`commutator_transfer`]: the same with a commutator `γ = [α, β]`.
//! * [`exact_swap_involution`]: an involution with `α(A) = B` on the nose,
//!   which exists in the topological full group for both backends.
//! * [`gw_intertwining`]: the alternating back-and-forth construction with
//!   shrinking neighborhoods of two anchor points, run for finitely many
//!   rounds.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::backend::{compare_clopen, require, Backend, BackendKind, Piece};
use crate::clopen::ClopenSet;
use crate::element::{DerivedWitness, GroupElement, WitnessExpr};
use crate::error::{ensure, precondition, Error, Result};
use crate::measure::MeasureValue;
use crate::word::{PointName, Word};
use crate::Ratio;

/// Which postconditions a [`TransferResult`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransferKind {
    /// `α² = id` and `supp(α) ⊆ A ∪ α(A)`.
    InvolutionSmallSupport,
    /// `A ∪ supp(α) ≠ X` (the case `B ⊆ A`, full shift only).
    InsideCaseSupportBound,
    /// `γ = [α, β]` cyclically permutes `A∖B`, `γ(A∖B)`, `γ²(A∖B)`; hence
    /// `γ²(A) ⊆ B` and `supp(γ) ⊆ A ∪ γ(A) ∪ γ²(A)`.
    CommutatorCyclic,
    /// `γ = [α, β]` with `A ∪ supp(γ) ≠ X` (the case `B ⊆ A`).
    CommutatorInsideCase,
}

impl TransferKind {
    pub fn name(&self) -> &'static str {
        match self {
            TransferKind::InvolutionSmallSupport => "involution-small-support",
            TransferKind::InsideCaseSupportBound => "inside-case-support-bound",
            TransferKind::CommutatorCyclic => "commutator-cyclic",
            TransferKind::CommutatorInsideCase => "commutator-inside-case",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferResult {
    pub element: GroupElement,
    pub witness: Option<DerivedWitness>,
    pub kind: TransferKind,
}

impl TransferResult {
    /// Re-checks every postcondition of the tagged kind for the pair `(A, B)`
    /// the element was built for, plus `α(A) ⊆ B`.
    pub fn check(&self, a: &ClopenSet, b: &ClopenSet) -> Result<()> {
        let g = &self.element;
        let ga = g.image(a)?;
        ensure(ga.is_subset(b)?, "image of A not inside B")?;
        let supp = g.support();
        match self.kind {
            TransferKind::InvolutionSmallSupport => {
                ensure(g.compose(g)?.is_identity(), "not an involution")?;
                ensure(supp.is_subset(&a.union(&ga)?)?, "support not inside A ∪ α(A)")?;
            }
            TransferKind::InsideCaseSupportBound | TransferKind::CommutatorInsideCase => {
                ensure(!a.union(&supp)?.is_whole(), "A ∪ supp covers the whole space")?;
            }
            TransferKind::CommutatorCyclic => {
                let gga = g.image(&ga)?;
                ensure(gga.is_subset(b)?, "second image of A not inside B")?;
                ensure(supp.is_subset(&a.union(&ga)?.union(&gga)?)?, "support not inside A ∪ γA ∪ γ²A")?;
            }
        }
        if matches!(self.kind, TransferKind::CommutatorCyclic | TransferKind::CommutatorInsideCase) {
            let w = self.witness.as_ref().ok_or_else(|| Error::Postcondition("missing witness".into()))?;
            ensure(w.evaluate()? == *g, "witness does not evaluate to the element")?;
        }
        Ok(())
    }
}

fn check_pair(backend: Backend, a: &ClopenSet, b: &ClopenSet) -> Result<()> {
    backend.check_set(a)?;
    backend.check_set(b)
}

/// The child `c·(b−1)` of the picked cylinder `c` of a nonempty set: a
/// nonempty clopen subset whose complement in the set is nonempty.
fn reserved_cylinder(set: &ClopenSet) -> Result<ClopenSet> {
    let c = set.pick_cylinder()?;
    ClopenSet::cylinder(set.base(), c.child(set.base() - 1))
}

/// Involution swapping `A∖B` with `σ_U(A∖B) ⊆ B∖A`, `U` from comparison.
fn swap_into(backend: Backend, a: &ClopenSet, b: &ClopenSet) -> Result<GroupElement> {
    let a1 = a.difference(b)?;
    let b1 = b.difference(a)?;
    let u = compare_clopen(backend, &a1, &b1)?;
    GroupElement::involution_from(&u)
}

/// An element `α` with `α(A) ⊆ B`.
///
/// Requires `A ≠ X`, `B ≠ ∅` and, on the odometer, `μ(A) < μ(B)`. If
/// `B∖A ≠ ∅` the result is an involution with `supp(α) ⊆ A ∪ α(A)` (the
/// identity when `A ⊆ B`). If `B ⊆ A` (full shift only) a cylinder `C` of the
/// complement of `A` is reserved first and `α = α₁α₂` is built inside `X∖C`
/// from `α₂(A) ⊆ (X∖C)∖A` and `α₁((X∖C)∖A) ⊆ B`.
pub fn full_group_transfer(backend: Backend, a: &ClopenSet, b: &ClopenSet) -> Result<TransferResult> {
    check_pair(backend, a, b)?;
    require(!a.is_whole(), "A must not be the whole space")?;
    require(!b.is_empty(), "B must be nonempty")?;
    if backend.has_measure() {
        require(a.try_measure()? < b.try_measure()?, "requires mu(A) < mu(B)")?;
    }
    let result = if a.is_subset(b)? {
        TransferResult {
            element: GroupElement::identity(backend),
            witness: None,
            kind: TransferKind::InvolutionSmallSupport,
        }
    } else if !b.difference(a)?.is_empty() {
        TransferResult {
            element: swap_into(backend, a, b)?,
            witness: None,
            kind: TransferKind::InvolutionSmallSupport,
        }
    } else {
        debug_assert_eq!(backend.kind, BackendKind::FullShift);
        let outside = a.complement();
        let reserved = reserved_cylinder(&outside)?;
        let room = outside.difference(&reserved)?;
        let alpha2 = swap_into(backend, a, &room)?;
        let alpha1 = swap_into(backend, &room, b)?;
        TransferResult {
            element: alpha1.compose(&alpha2)?,
            witness: None,
            kind: TransferKind::InsideCaseSupportBound,
        }
    };
    result.check(a, b)?;
    Ok(result)
}

/// An element `γ = [α, β]` of the derived subgroup with `γ(A) ⊆ B`.
///
/// Requires `A ≠ X`, `B ≠ ∅` and, on the odometer, `3μ(A) < μ(B)`. When
/// `B∖A ≠ ∅`, `α` and `β` are involutions moving `A∖B` to disjoint parts of
/// `B∖A`, and `γ = βα` cycles the three sets. When `B ⊆ A`, `α` is the
/// inside-case transfer and `β` moves `A ∪ supp(α)` off itself while keeping
/// a reserved cylinder fixed.
pub fn commutator_transfer(backend: Backend, a: &ClopenSet, b: &ClopenSet) -> Result<TransferResult> {
    check_pair(backend, a, b)?;
    require(!a.is_whole(), "A must not be the whole space")?;
    require(!b.is_empty(), "B must be nonempty")?;
    if backend.has_measure() {
        require(a.try_measure()?.times(3)? < b.try_measure()?.to_ratio()?, "requires 3 mu(A) < mu(B)")?;
    }
    let result = if a.is_subset(b)? {
        TransferResult {
            element: GroupElement::identity(backend),
            witness: Some(DerivedWitness::new(backend)),
            kind: TransferKind::CommutatorCyclic,
        }
    } else if !b.difference(a)?.is_empty() {
        let a1 = a.difference(b)?;
        let b1 = b.difference(a)?;
        let mut alpha = swap_into(backend, &a1, &b1)?;
        let mut rest = b1.difference(&alpha.image(&a1)?)?;
        if rest.is_empty() {
            // keep a proper part of B∖A free for the second involution
            let b0 = b1.difference(&reserved_cylinder(&b1)?)?;
            alpha = swap_into(backend, &a1, &b0)?;
            rest = b1.difference(&alpha.image(&a1)?)?;
        }
        let beta = swap_into(backend, &a1, &rest)?;
        commutator_result(backend, alpha, beta, TransferKind::CommutatorCyclic)?
    } else {
        let alpha = full_group_transfer(backend, a, b)?.element;
        let grown = a.union(&alpha.support())?;
        let outside = grown.complement();
        let target = outside.difference(&reserved_cylinder(&outside)?)?;
        let beta = swap_into(backend, &grown, &target)?;
        commutator_result(backend, alpha, beta, TransferKind::CommutatorInsideCase)?
    };
    result.check(a, b)?;
    Ok(result)
}

fn commutator_result(
    backend: Backend,
    alpha: GroupElement,
    beta: GroupElement,
    kind: TransferKind,
) -> Result<TransferResult> {
    let gamma = alpha.commutator_with(&beta)?;
    if kind == TransferKind::CommutatorCyclic {
        ensure(gamma == beta.compose(&alpha)?, "[alpha, beta] differs from beta alpha")?;
    }
    let mut witness = DerivedWitness::new(backend);
    witness.bind("alpha", alpha);
    witness.bind("beta", beta);
    witness.expr = WitnessExpr::Commutator("alpha".to_string(), "beta".to_string());
    Ok(TransferResult { element: gamma, witness: Some(witness), kind })
}

/// An involution `α` with `α(A) = B` and `supp(α) ⊆ A ∪ B`, identity on
/// `A ∩ B`.
///
/// The parts `A∖B` and `B∖A` are cut into equally many cylinders and paired in
/// lexicographic order. On the odometer they are refined to a common depth,
/// which needs `μ(A) = μ(B)`. On the full shift cylinders are split (each split
/// adds `b − 1` cylinders) until the counts agree, which is possible exactly
/// when the counts agree modulo `b − 1`.
pub fn exact_swap_involution(backend: Backend, a: &ClopenSet, b: &ClopenSet) -> Result<GroupElement> {
    check_pair(backend, a, b)?;
    if a == b {
        return Ok(GroupElement::identity(backend));
    }
    let a1 = a.difference(b)?;
    let b1 = b.difference(a)?;
    require(!a1.is_empty() && !b1.is_empty(), "requires A\\B and B\\A nonempty")?;
    let base = backend.base;
    let mut pieces = Vec::new();
    match backend.kind {
        BackendKind::Odometer => {
            require(a.try_measure()? == b.try_measure()?, "requires mu(A) = mu(B)")?;
            let depth = a1.max_depth().max(b1.max_depth());
            let xs = a1.cylinders_at_depth(depth);
            let ys = b1.cylinders_at_depth(depth);
            debug_assert_eq!(xs.len(), ys.len());
            for (x, y) in xs.into_iter().zip(ys) {
                let n = y.lsd_value(base)? - x.lsd_value(base)?;
                pieces.push(Piece::odometer(x, n));
                pieces.push(Piece::odometer(y, -n));
            }
        }
        BackendKind::FullShift => {
            let mut xs = a1.cylinders().to_vec();
            let mut ys = b1.cylinders().to_vec();
            let step = base as usize - 1;
            require(
                xs.len() % step == ys.len() % step,
                "cylinder counts of A\\B and B\\A differ modulo base - 1",
            )?;
            while xs.len() != ys.len() {
                let shorter = if xs.len() < ys.len() { &mut xs } else { &mut ys };
                split_first(base, shorter);
            }
            for (x, y) in xs.into_iter().zip(ys) {
                pieces.push(Piece::shift(x.clone(), y.clone()));
                pieces.push(Piece::shift(y, x));
            }
        }
    }
    let alpha = GroupElement::from_partial(backend, pieces)?;
    ensure(alpha.image(a)? == *b, "swap does not map A onto B")?;
    Ok(alpha)
}

/// Replaces the lexicographically first cylinder by its children, keeping
/// the list sorted.
fn split_first(base: u8, cylinders: &mut Vec<Word>) {
    let first = cylinders.remove(0);
    for (i, s) in (0..base).enumerate() {
        cylinders.insert(i, first.child(s));
    }
}

/// One round of the intertwining construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GwRound {
    /// `Aₙ` and `Bₙ` after the round.
    pub residual_a: ClopenSet,
    pub residual_b: ClopenSet,
    /// The involution `αₙ`, exchanging the two annuli.
    pub alpha: GroupElement,
    /// `A_{n−1}∖Aₙ` and `B_{n−1}∖Bₙ`.
    pub annulus_a: ClopenSet,
    pub annulus_b: ClopenSet,
}

/// State after finitely many rounds of the intertwining construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GwState {
    pub backend: Backend,
    /// `A∖B` and `B∖A`.
    pub start_a: ClopenSet,
    pub start_b: ClopenSet,
    pub x0: PointName,
    pub y0: PointName,
    /// Product of the `αₙ` so far: exact on `(A∖Aₙ) ∪ (B∖Bₙ)`, identity
    /// elsewhere.
    pub partial: GroupElement,
    pub rounds: Vec<GwRound>,
}

impl GwState {
    pub fn round(&self) -> usize {
        self.rounds.len()
    }

    pub fn residual_a(&self) -> &ClopenSet {
        self.rounds.last().map_or(&self.start_a, |r| &r.residual_a)
    }

    pub fn residual_b(&self) -> &ClopenSet {
        self.rounds.last().map_or(&self.start_b, |r| &r.residual_b)
    }

    /// Re-checks the construction at every round: `diam(Aₙ) < 2^(1−n)` (and
    /// the same for `Bₙ` from the second round on), `αₙ(A_{n−1}∖Aₙ) =
    /// B_{n−1}∖Bₙ`, `supp(αₙ)` inside the two annuli, nested residuals holding
    /// their anchors, equal residual measures with `μ(Aₙ) ≤ 2^(−n) μ(A)` on the
    /// odometer, and exactness of the partial element on the settled region.
    pub fn check(&self) -> Result<()> {
        let (mut prev_a, mut prev_b) = (&self.start_a, &self.start_b);
        let mut settled_a = ClopenSet::empty(self.backend.base);
        let mut settled_b = settled_a.clone();
        let start_measure = self.start_a.try_measure()?;
        for (i, r) in self.rounds.iter().enumerate() {
            let n = i as i64 + 1;
            ensure(r.residual_a.diameter_bound()?.below_pow2(n - 1), "diam(A_n) too large")?;
            if n >= 2 {
                ensure(r.residual_b.diameter_bound()?.below_pow2(n - 1), "diam(B_n) too large")?;
            }
            ensure(r.residual_a.is_subset(prev_a)? && r.residual_b.is_subset(prev_b)?, "residuals not nested")?;
            ensure(
                r.residual_a.contains_point(&self.x0) && r.residual_b.contains_point(&self.y0),
                "anchor left its residual",
            )?;
            ensure(r.annulus_a == prev_a.difference(&r.residual_a)?, "wrong A annulus")?;
            ensure(r.annulus_b == prev_b.difference(&r.residual_b)?, "wrong B annulus")?;
            ensure(r.alpha.image(&r.annulus_a)? == r.annulus_b, "annulus transfer not exact")?;
            ensure(r.alpha.compose(&r.alpha)?.is_identity(), "alpha_n not an involution")?;
            ensure(
                r.alpha.support().is_subset(&r.annulus_a.union(&r.annulus_b)?)?,
                "alpha_n supported outside the annuli",
            )?;
            if self.backend.has_measure() {
                let ma = r.residual_a.try_measure()?;
                ensure(ma == r.residual_b.try_measure()?, "residual measures differ")?;
                let bound = start_measure.to_ratio()? / Ratio::from_integer(1u128 << n.min(120));
                ensure(ma.to_ratio()? <= bound, "mu(A_n) did not halve")?;
            }
            settled_a = settled_a.union(&r.annulus_a)?;
            settled_b = settled_b.union(&r.annulus_b)?;
            prev_a = &r.residual_a;
            prev_b = &r.residual_b;
        }
        ensure(self.partial.image(&settled_a)? == settled_b, "partial element not exact on settled region")?;
        let moved = settled_a.union(&settled_b)?;
        ensure(self.partial.support().is_subset(&moved)?, "partial element moves unsettled points")?;
        Ok(())
    }
}

/// Runs `rounds` rounds of the alternating construction on `A∖B` and `B∖A`.
///
/// The anchors are the picked cylinders followed by zeros. In round `n` the
/// side being shrunk (`A` for odd `n`, `B` for even `n`) is replaced by the
/// cylinder around its anchor of the smallest depth `k` that lies strictly
/// inside the current residual, has `k ≥ n + 1` (so the diameter is below
/// `2^(−n)`) and, on the odometer, has measure below half the residual. The
/// annulus left over is transferred by an involution into the other residual
/// minus the anchor cylinder one level deeper than `k`, which keeps the other
/// anchor out of the image.
pub fn gw_intertwining(backend: Backend, a: &ClopenSet, b: &ClopenSet, rounds: usize) -> Result<GwState> {
    check_pair(backend, a, b)?;
    let start_a = a.difference(b)?;
    let start_b = b.difference(a)?;
    require(!start_a.is_empty() && !start_b.is_empty(), "requires A\\B and B\\A nonempty")?;
    if backend.has_measure() {
        require(a.try_measure()? == b.try_measure()?, "requires mu(A) = mu(B)")?;
    }
    let x0 = PointName::zero_tail(start_a.pick_cylinder()?.clone());
    let y0 = PointName::zero_tail(start_b.pick_cylinder()?.clone());
    let mut state = GwState {
        backend,
        start_a: start_a.clone(),
        start_b: start_b.clone(),
        x0,
        y0,
        partial: GroupElement::identity(backend),
        rounds: Vec::with_capacity(rounds),
    };
    let (mut res_a, mut res_b) = (start_a, start_b);
    for n in 1..=rounds {
        let shrink_a = n % 2 == 1;
        let (src, src_anchor, dst, dst_anchor) = if shrink_a {
            (&res_a, &state.x0, &res_b, &state.y0)
        } else {
            (&res_b, &state.y0, &res_a, &state.x0)
        };
        let k = neighborhood_depth(backend, src, src_anchor, n + 1)?;
        let nbhd = ClopenSet::cylinder(backend.base, src_anchor.prefix(k))?;
        let annulus = src.difference(&nbhd)?;
        let j = containment_depth(dst, dst_anchor)?;
        let avoid = ClopenSet::cylinder(backend.base, dst_anchor.prefix((k + 1).max(j + 1)))?;
        let target = dst.difference(&avoid)?;
        let alpha = full_group_transfer(backend, &annulus, &target)?.element;
        let image = alpha.image(&annulus)?;
        let new_dst = dst.difference(&image)?;
        let (annulus_a, annulus_b) = if shrink_a { (annulus, image) } else { (image, annulus) };
        if shrink_a {
            res_a = nbhd;
            res_b = new_dst;
        } else {
            res_b = nbhd;
            res_a = new_dst;
        }
        state.partial = alpha.compose(&state.partial)?;
        state.rounds.push(GwRound {
            residual_a: res_a.clone(),
            residual_b: res_b.clone(),
            alpha,
            annulus_a,
            annulus_b,
        });
    }
    Ok(state)
}

/// Smallest `j` with `[x|j]` inside `set`.
fn containment_depth(set: &ClopenSet, x: &PointName) -> Result<usize> {
    set.cylinders()
        .iter()
        .find(|c| x.in_cylinder(c))
        .map(Word::len)
        .ok_or_else(|| precondition("anchor outside its residual"))
}

fn neighborhood_depth(backend: Backend, set: &ClopenSet, x: &PointName, min_depth: usize) -> Result<usize> {
    let mut k = min_depth.max(containment_depth(set, x)? + 1);
    if backend.has_measure() {
        let half = set.try_measure()?.to_ratio()? / Ratio::from_integer(2);
        while MeasureValue::cylinder(backend.base, k).to_ratio()? >= half {
            k += 1;
        }
    }
    Ok(k)
}

/// Human-readable summary used in traces.
pub fn describe(result: &TransferResult) -> alloc::string::String {
    format!("{} {}", result.kind.name(), result.element)
}
