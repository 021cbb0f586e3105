//! Finitely piecewise homeomorphisms: the topological full group.
//!
//! A [`GroupElement`] is a bisection whose source and range are both the
//! whole space, kept in canonical form: pieces sorted by source and every
//! complete family of sibling pieces that are restrictions of one parent piece
//! merged. On the odometer the power of the piece covering a point is the
//! unique `n` with `α(x) = x + n` (the action is free), and on the full shift
//! a reduced prefix-exchange diagram is unique, so two elements are equal as
//! maps exactly when their canonical forms are identical.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::backend::{identity_on, merge_pieces, Backend, Bisection, Piece};
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::word::Word;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    backend: Backend,
    pieces: Vec<Piece>,
}

impl GroupElement {
    pub fn identity(backend: Backend) -> Self {
        GroupElement { backend, pieces: alloc::vec![backend.identity_piece(Word::empty())] }
    }

    /// Checks that the pieces form a homeomorphism of the whole space and
    /// canonicalizes them.
    pub fn from_pieces(backend: Backend, pieces: Vec<Piece>) -> Result<Self> {
        let bisection = Bisection::new(backend, pieces)?;
        let (s, r) = bisection.source_range();
        if !s.is_whole() {
            return Err(Error::NotTotal { range_side: false });
        }
        if !r.is_whole() {
            return Err(Error::NotTotal { range_side: true });
        }
        Ok(GroupElement { backend, pieces: merge_pieces(backend.base, bisection.into_pieces()) })
    }

    /// Pieces defined on part of the space, extended by the identity on the
    /// complement of their sources.
    pub fn from_partial(backend: Backend, mut pieces: Vec<Piece>) -> Result<Self> {
        let sources = ClopenSet::canonicalize(backend.base, pieces.iter().map(|p| p.source().clone()).collect())?;
        pieces.extend(identity_on(backend, &sources.complement()));
        Self::from_pieces(backend, pieces)
    }

    /// The involution `σ_U ⊔ σ_U⁻¹ ⊔ id`, for a bisection whose source and
    /// range are disjoint.
    pub fn involution_from(u: &Bisection) -> Result<Self> {
        let (s, r) = u.source_range();
        if !s.is_disjoint(&r)? {
            return Err(crate::error::precondition("involution needs disjoint source and range"));
        }
        let mut pieces = u.pieces().to_vec();
        pieces.extend(u.inverse().into_pieces());
        Self::from_partial(u.backend(), pieces)
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn base(&self) -> u8 {
        self.backend.base
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn as_bisection(&self) -> Bisection {
        Bisection::new_unchecked(self.backend, self.pieces.clone())
    }

    pub fn is_identity(&self) -> bool {
        self.pieces.iter().all(|p| !p.moves())
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        self.backend.check_same(&other.backend)?;
        let base = self.backend.base;
        let mut out = Vec::with_capacity(self.pieces.len().max(other.pieces.len()));
        let mut stack: Vec<Piece> = other.pieces.iter().rev().cloned().collect();
        while let Some(q) = stack.pop() {
            let r = q.range(base);
            match self.piece_containing(&r) {
                Some(p) => out.push(p.after(base, &q)),
                None => {
                    let children: Vec<Piece> = q.children(base).collect();
                    stack.extend(children.into_iter().rev());
                }
            }
        }
        Ok(GroupElement { backend: self.backend, pieces: merge_pieces(base, out) })
    }

    pub fn inverse(&self) -> GroupElement {
        let base = self.backend.base;
        let pieces = self.pieces.iter().map(|p| p.inverse(base)).collect();
        GroupElement { backend: self.backend, pieces: merge_pieces(base, pieces) }
    }

    /// `gᵏ` for any integer `k`.
    pub fn pow(&self, k: i64) -> Result<GroupElement> {
        let step = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = GroupElement::identity(self.backend);
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&step)?;
        }
        Ok(acc)
    }

    /// `self · x · self⁻¹`.
    ///
    /// Only the moving pieces of `x` are transported; the result is the
    /// identity off `self(supp x)`, so the cost does not depend on how many
    /// pieces `self` has away from that set.
    pub fn conjugate(&self, x: &GroupElement) -> Result<GroupElement> {
        self.backend.check_same(&x.backend)?;
        let base = self.backend.base;
        let mut out = Vec::new();
        let mut stack: Vec<Piece> = x.pieces.iter().rev().filter(|p| p.moves()).cloned().collect();
        while let Some(q) = stack.pop() {
            let r = q.range(base);
            match (self.piece_containing(q.source()), self.piece_containing(&r)) {
                (Some(inner), Some(outer)) => {
                    let back = inner.restrict(q.source()).inverse(base);
                    out.push(outer.after(base, &q.after(base, &back)));
                }
                _ => {
                    let children: Vec<Piece> = q.children(base).collect();
                    stack.extend(children.into_iter().rev());
                }
            }
        }
        let sources = ClopenSet::canonicalize(base, out.iter().map(|p| p.source().clone()).collect())?;
        out.extend(identity_on(self.backend, &sources.complement()));
        let g = GroupElement { backend: self.backend, pieces: merge_pieces(base, out) };
        debug_assert!(Bisection::new(self.backend, g.pieces.clone()).is_ok());
        Ok(g)
    }

    /// `[self, other] = self · other · self⁻¹ · other⁻¹`.
    pub fn commutator_with(&self, other: &GroupElement) -> Result<GroupElement> {
        self.conjugate(other)?.compose(&other.inverse())
    }

    /// The piece whose source contains `[w]`, if a single one does.
    fn piece_containing(&self, w: &Word) -> Option<&Piece> {
        let idx = self.pieces.partition_point(|p| p.source() <= w);
        (idx > 0 && self.pieces[idx - 1].source().is_prefix_of(w)).then(|| &self.pieces[idx - 1])
    }

    /// Image of the cylinder `[w]` when a single piece covers it.
    pub fn image_of_cylinder(&self, w: &Word) -> Option<Word> {
        self.piece_containing(w).map(|p| p.apply_unchecked(self.base(), w))
    }

    /// The restriction of the element to `set`, as pieces whose sources
    /// partition `set`.
    pub fn pieces_on(&self, set: &ClopenSet) -> Result<Vec<Piece>> {
        self.backend.check_set(set)?;
        let mut out = Vec::new();
        for s in set.cylinders() {
            if let Some(p) = self.piece_containing(s) {
                out.push(p.restrict(s));
                continue;
            }
            let start = self.pieces.partition_point(|p| p.source() < s);
            out.extend(self.pieces[start..].iter().take_while(|p| s.is_prefix_of(p.source())).cloned());
        }
        Ok(out)
    }

    /// `α(A)` as a canonical clopen set.
    pub fn image(&self, set: &ClopenSet) -> Result<ClopenSet> {
        let base = self.base();
        let ranges = self.pieces_on(set)?.iter().map(|p| p.range(base)).collect();
        ClopenSet::canonicalize(base, ranges)
    }

    /// The closure of the moved set. Moving odometer pieces move every point
    /// of their source; a moving prefix exchange fixes at most one point, so
    /// in both cases the closure is the union of the moving sources.
    pub fn support(&self) -> ClopenSet {
        let moving = self.pieces.iter().filter(|p| p.moves()).map(|p| p.source().clone()).collect();
        ClopenSet::canonicalize(self.base(), moving).expect("validated symbols")
    }

    /// Checks `μ(α(A)) = μ(A)` for every trial set. On the full shift there is
    /// no invariant measure and the check passes vacuously.
    pub fn check_measure_invariance(&self, trials: &[ClopenSet]) -> Result<MeasureInvarianceReport> {
        let mut report = MeasureInvarianceReport { checked: 0, violations: Vec::new() };
        if !self.backend.has_measure() {
            return Ok(report);
        }
        for a in trials {
            let img = self.image(a)?;
            report.checked += 1;
            if img.try_measure()? != a.try_measure()? {
                report.violations.push(a.clone());
            }
        }
        Ok(report)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "elem:{}", self.as_bisection())
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureInvarianceReport {
    pub checked: usize,
    pub violations: Vec<ClopenSet>,
}

impl MeasureInvarianceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `[f, g]` together with a witness naming its two arguments `f` and `g`.
pub fn commutator(f: &GroupElement, g: &GroupElement) -> Result<(GroupElement, DerivedWitness)> {
    let value = f.commutator_with(g)?;
    let mut witness = DerivedWitness::new(f.backend());
    witness.bind("f", f.clone());
    witness.bind("g", g.clone());
    witness.expr = WitnessExpr::Commutator("f".to_string(), "g".to_string());
    Ok((value, witness))
}

/// A product of commutators of named elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessExpr {
    Commutator(String, String),
    Product(Vec<WitnessExpr>),
}

impl WitnessExpr {
    pub fn one() -> Self {
        WitnessExpr::Product(Vec::new())
    }
}

impl fmt::Display for WitnessExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessExpr::Commutator(a, b) => write!(f, "[{a},{b}]"),
            WitnessExpr::Product(items) if items.is_empty() => f.write_str("1"),
            WitnessExpr::Product(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    write!(f, "{item}")?;
                }
                Ok(())
            }
        }
    }
}

/// Constructive evidence that an element lies in the derived subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedWitness {
    pub backend: Backend,
    pub elements: BTreeMap<String, GroupElement>,
    pub expr: WitnessExpr,
}

impl DerivedWitness {
    pub fn new(backend: Backend) -> Self {
        DerivedWitness { backend, elements: BTreeMap::new(), expr: WitnessExpr::one() }
    }

    pub fn bind(&mut self, name: &str, element: GroupElement) {
        self.elements.insert(name.to_string(), element);
    }

    pub fn evaluate(&self) -> Result<GroupElement> {
        self.eval_expr(&self.expr)
    }

    fn lookup(&self, name: &str) -> Result<&GroupElement> {
        self.elements.get(name).ok_or_else(|| Error::UnresolvedName(name.to_string()))
    }

    fn eval_expr(&self, expr: &WitnessExpr) -> Result<GroupElement> {
        match expr {
            WitnessExpr::Commutator(a, b) => self.lookup(a)?.commutator_with(self.lookup(b)?),
            WitnessExpr::Product(items) => {
                let mut acc = GroupElement::identity(self.backend);
                for item in items {
                    acc = acc.compose(&self.eval_expr(item)?)?;
                }
                Ok(acc)
            }
        }
    }
}
