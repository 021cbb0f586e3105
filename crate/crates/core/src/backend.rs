//! The two groupoid models and their compact open bisections.
//!
//! * Odometer: the transformation groupoid of `x ↦ x + 1` on the `b`-adic
//!   integers (digits least significant first). A piece `(u; n)` is the
//!   restriction of `x ↦ x + n` to the cylinder `[u]`; since `x + n` only
//!   changes `x` by a carry into the tail, the image of a depth-`d` cylinder is
//!   again a depth-`d` cylinder.
//! * Full shift: the Deaconu–Renault groupoid of the one-sided full shift. A
//!   piece `(u > v)` is the prefix exchange `u·y ↦ v·y`. Its topological full
//!   group is the Higman–Thompson group `V_b`.
//!
//! Both models are minimal and second countable; the odometer is uniquely
//! ergodic (its invariant measure is the Bernoulli measure) while the full
//! shift groupoid has no invariant measure at all.

use alloc::vec::Vec;
use core::fmt;

use crate::clopen::ClopenSet;
use crate::error::{precondition, Error, Result};
use crate::word::{check_base, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BackendKind {
    Odometer,
    FullShift,
}

/// What the set of invariant probability measures looks like.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasureClass {
    /// Exactly one invariant measure, the Bernoulli measure.
    UniqueErgodic,
    /// No invariant measure.
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Backend {
    pub kind: BackendKind,
    pub base: u8,
}

impl Backend {
    pub fn new(kind: BackendKind, base: u8) -> Result<Self> {
        check_base(base)?;
        Ok(Backend { kind, base })
    }

    pub fn odometer(base: u8) -> Self {
        Backend::new(BackendKind::Odometer, base).expect("valid base")
    }

    pub fn full_shift(base: u8) -> Self {
        Backend::new(BackendKind::FullShift, base).expect("valid base")
    }

    pub fn measure_class(&self) -> MeasureClass {
        match self.kind {
            BackendKind::Odometer => MeasureClass::UniqueErgodic,
            BackendKind::FullShift => MeasureClass::Empty,
        }
    }

    pub fn has_measure(&self) -> bool {
        self.measure_class() == MeasureClass::UniqueErgodic
    }

    pub fn tag(&self) -> &'static str {
        match self.kind {
            BackendKind::Odometer => "odo",
            BackendKind::FullShift => "shift",
        }
    }

    pub fn check_set(&self, set: &ClopenSet) -> Result<()> {
        if set.base() == self.base {
            Ok(())
        } else {
            Err(Error::BaseMismatch { left: self.base, right: set.base() })
        }
    }

    pub fn check_same(&self, other: &Backend) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::BackendMismatch { left: *self, right: *other })
        }
    }

    /// The piece acting as the identity on `[w]`.
    pub fn identity_piece(&self, w: Word) -> Piece {
        match self.kind {
            BackendKind::Odometer => Piece::Odometer(OdometerPiece { source: w, power: 0 }),
            BackendKind::FullShift => {
                Piece::Shift(ShiftPiece { target: w.clone(), source: w })
            }
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.tag(), self.base)
    }
}

/// `x ↦ x + power` restricted to `[source]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OdometerPiece {
    pub source: Word,
    pub power: i128,
}

/// `source·y ↦ target·y`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShiftPiece {
    pub source: Word,
    pub target: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Piece {
    Odometer(OdometerPiece),
    Shift(ShiftPiece),
}

impl Piece {
    pub fn odometer(source: Word, power: i128) -> Piece {
        Piece::Odometer(OdometerPiece { source, power })
    }

    pub fn shift(source: Word, target: Word) -> Piece {
        Piece::Shift(ShiftPiece { source, target })
    }

    pub fn kind(&self) -> BackendKind {
        match self {
            Piece::Odometer(_) => BackendKind::Odometer,
            Piece::Shift(_) => BackendKind::FullShift,
        }
    }

    pub fn source(&self) -> &Word {
        match self {
            Piece::Odometer(p) => &p.source,
            Piece::Shift(p) => &p.source,
        }
    }

    /// The range cylinder.
    pub fn range(&self, base: u8) -> Word {
        match self {
            Piece::Odometer(p) => p.source.add_lsd(base, p.power).0,
            Piece::Shift(p) => p.target.clone(),
        }
    }

    /// Whether the piece moves points of its source. Odometer pieces with
    /// nonzero power move every point (the action is free); a prefix exchange
    /// with `u ≠ v` fixes at most one point of `[u]`.
    pub fn moves(&self) -> bool {
        match self {
            Piece::Odometer(p) => p.power != 0,
            Piece::Shift(p) => p.source != p.target,
        }
    }

    /// Image of the cylinder `[c]`, which must lie inside the source.
    pub fn apply(&self, base: u8, c: &Word) -> Result<Word> {
        if !self.source().is_prefix_of(c) {
            return Err(Error::NotInSource { piece_source: self.source().clone(), cylinder: c.clone() });
        }
        Ok(self.apply_unchecked(base, c))
    }

    pub(crate) fn apply_unchecked(&self, base: u8, c: &Word) -> Word {
        match self {
            Piece::Odometer(p) => c.add_lsd(base, p.power).0,
            Piece::Shift(p) => p.target.concat(c.suffix_after(p.source.len())),
        }
    }

    /// The same map restricted to `[c]`, a subcylinder of the source.
    pub fn restrict(&self, c: &Word) -> Piece {
        debug_assert!(self.source().is_prefix_of(c));
        match self {
            Piece::Odometer(p) => Piece::odometer(c.clone(), p.power),
            Piece::Shift(p) => {
                Piece::shift(c.clone(), p.target.concat(c.suffix_after(p.source.len())))
            }
        }
    }

    /// The `base` restrictions to the child cylinders of the source.
    pub fn children(&self, base: u8) -> impl Iterator<Item = Piece> + '_ {
        (0..base).map(move |a| self.restrict(&self.source().child(a)))
    }

    pub fn inverse(&self, base: u8) -> Piece {
        match self {
            Piece::Odometer(p) => Piece::odometer(self.range(base), -p.power),
            Piece::Shift(p) => Piece::shift(p.target.clone(), p.source.clone()),
        }
    }

    /// `self ∘ inner`, defined when the range of `inner` lies inside the
    /// source of `self`.
    pub(crate) fn after(&self, base: u8, inner: &Piece) -> Piece {
        match (self, inner) {
            (Piece::Odometer(outer), Piece::Odometer(inner)) => Piece::odometer(
                inner.source.clone(),
                inner.power.checked_add(outer.power).expect("odometer power overflow"),
            ),
            (Piece::Shift(_), Piece::Shift(inner)) => {
                Piece::shift(inner.source.clone(), self.apply_unchecked(base, &inner.target))
            }
            _ => unreachable!("pieces of one backend"),
        }
    }

    fn check(&self, backend: &Backend) -> Result<()> {
        if self.kind() != backend.kind {
            return Err(Error::Malformed(alloc::format!("piece {self} does not belong to {backend}")));
        }
        let words: &[&Word] = match self {
            Piece::Odometer(p) => &[&p.source],
            Piece::Shift(p) => &[&p.source, &p.target],
        };
        for w in words {
            if w.symbols().iter().any(|&s| s >= backend.base) {
                return Err(Error::Malformed(alloc::format!("piece {self} has symbols outside base {}", backend.base)));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::Odometer(p) => {
                if p.power < 0 {
                    write!(f, "({};{})", p.source, p.power)
                } else {
                    write!(f, "({};+{})", p.source, p.power)
                }
            }
            Piece::Shift(p) => write!(f, "({}>{})", p.source, p.target),
        }
    }
}

/// Merges complete sibling families whose maps agree, bottom-up, and sorts by
/// source. Two families merge when they are restrictions of one piece on the
/// parent cylinder: equal powers (odometer) or targets `v·a` on child `u·a`
/// (shift).
pub(crate) fn merge_pieces(base: u8, mut pieces: Vec<Piece>) -> Vec<Piece> {
    pieces.sort_unstable_by(|a, b| a.source().cmp(b.source()));
    let b = base as usize;
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        out.push(p);
        while out.len() >= b && out.last().and_then(|q| q.source().last()) == Some(base - 1) {
            match merge_family(base, &out[out.len() - b..]) {
                Some(parent) => {
                    out.truncate(out.len() - b);
                    out.push(parent);
                }
                None => break,
            }
        }
    }
    out
}

fn merge_family(base: u8, family: &[Piece]) -> Option<Piece> {
    let parent = family[0].source().parent()?;
    for (a, p) in family.iter().enumerate() {
        if p.source().len() != parent.len() + 1
            || !parent.is_prefix_of(p.source())
            || p.source().last() != Some(a as u8)
        {
            return None;
        }
    }
    debug_assert_eq!(family.len(), base as usize);
    match &family[0] {
        Piece::Odometer(first) => {
            let same = family.iter().all(|p| matches!(p, Piece::Odometer(q) if q.power == first.power));
            same.then(|| Piece::odometer(parent, first.power))
        }
        Piece::Shift(first) => {
            let v = first.target.parent()?;
            let same = family.iter().enumerate().all(|(a, p)| {
                matches!(p, Piece::Shift(q)
                    if q.target.len() == v.len() + 1
                        && v.is_prefix_of(&q.target)
                        && q.target.last() == Some(a as u8))
            });
            same.then(|| Piece::shift(parent, v))
        }
    }
}

/// A compact open bisection, given as finitely many pieces with pairwise
/// disjoint sources and pairwise disjoint ranges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bisection {
    backend: Backend,
    pieces: Vec<Piece>,
}

impl Bisection {
    pub fn empty(backend: Backend) -> Self {
        Bisection { backend, pieces: Vec::new() }
    }

    /// Wraps pieces after checking kinds, symbols and injectivity.
    pub fn new(backend: Backend, pieces: Vec<Piece>) -> Result<Self> {
        let b = Bisection { backend, pieces };
        b.validate()?;
        Ok(b)
    }

    /// Wraps pieces without validation; [`Bisection::validate`] reports the
    /// first violation.
    pub fn new_unchecked(backend: Backend, pieces: Vec<Piece>) -> Self {
        Bisection { backend, pieces }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn into_pieces(self) -> Vec<Piece> {
        self.pieces
    }

    /// Accepts iff sources are pairwise disjoint and ranges are pairwise
    /// disjoint; otherwise names the first offending pair (sources first).
    pub fn validate(&self) -> Result<()> {
        for p in &self.pieces {
            p.check(&self.backend)?;
        }
        let mut sources: Vec<Word> = self.pieces.iter().map(|p| p.source().clone()).collect();
        first_overlap(&mut sources, false)?;
        let mut ranges: Vec<Word> = self.pieces.iter().map(|p| p.range(self.backend.base)).collect();
        first_overlap(&mut ranges, true)
    }

    /// Canonical sets `s(U)` and `r(U)`.
    pub fn source_range(&self) -> (ClopenSet, ClopenSet) {
        let base = self.backend.base;
        let s = ClopenSet::canonicalize(base, self.pieces.iter().map(|p| p.source().clone()).collect());
        let r = ClopenSet::canonicalize(base, self.pieces.iter().map(|p| p.range(base)).collect());
        (s.expect("validated symbols"), r.expect("validated symbols"))
    }

    /// The same partial map with every source cylinder at depth `≥ depth`.
    pub fn refine(&self, depth: usize) -> Bisection {
        let base = self.backend.base;
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let d = p.source().len();
            if d >= depth {
                pieces.push(p.clone());
            } else {
                pieces.extend(
                    Word::all_of_length(base, depth - d).map(|t| p.restrict(&p.source().concat(t.symbols()))),
                );
            }
        }
        Bisection { backend: self.backend, pieces }
    }

    /// Maximal merging of sibling pieces, sorted by source.
    pub fn normalized(&self) -> Bisection {
        Bisection { backend: self.backend, pieces: merge_pieces(self.backend.base, self.pieces.clone()) }
    }

    pub fn inverse(&self) -> Bisection {
        let base = self.backend.base;
        Bisection { backend: self.backend, pieces: self.pieces.iter().map(|p| p.inverse(base)).collect() }
    }
}

fn first_overlap(words: &mut [Word], range_side: bool) -> Result<()> {
    words.sort_unstable();
    for pair in words.windows(2) {
        if pair[0].is_prefix_of(&pair[1]) {
            return Err(Error::OverlappingPieces { range_side, first: pair[0].clone(), second: pair[1].clone() });
        }
    }
    Ok(())
}

impl fmt::Display for Bisection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:[", self.backend)?;
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("]")
    }
}

/// A compact open bisection `U` with `s(U) = A` and `r(U) ⊆ B`.
///
/// On the odometer both sets are refined to a common depth and the
/// `A`-cylinders are matched in lexicographic order to the first
/// `B`-cylinders by carry-free pieces `(a; m(b) − m(a))`; this needs
/// `μ(A) < μ(B)`. On the full shift every source cylinder `uᵢ` is sent to
/// `v·wᵢ`, where `v` is the picked cylinder of `B` and the `wᵢ` are the first
/// words of the shortest nonzero length `L` with `b^L > #A`, so the range is
/// always a proper subset of `[v]`.
pub fn compare_clopen(backend: Backend, a: &ClopenSet, b: &ClopenSet) -> Result<Bisection> {
    backend.check_set(a)?;
    backend.check_set(b)?;
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    if a.is_empty() {
        return Ok(Bisection::empty(backend));
    }
    let base = backend.base;
    let pieces = match backend.kind {
        BackendKind::Odometer => {
            if a.try_measure()? >= b.try_measure()? {
                return Err(Error::ComparisonUnavailable);
            }
            let depth = a.max_depth().max(b.max_depth());
            let sources = a.cylinders_at_depth(depth);
            let targets = b.cylinders_at_depth(depth);
            let mut pieces = Vec::with_capacity(sources.len());
            for (u, v) in sources.into_iter().zip(targets) {
                let power = v.lsd_value(base)? - u.lsd_value(base)?;
                pieces.push(Piece::odometer(u, power));
            }
            pieces
        }
        BackendKind::FullShift => {
            let v = b.pick_cylinder()?;
            let count = a.cylinders().len();
            let mut len = 1usize;
            while (base as usize).checked_pow(len as u32).is_some_and(|cap| cap <= count) {
                len += 1;
            }
            a.cylinders()
                .iter()
                .enumerate()
                .map(|(i, u)| Piece::shift(u.clone(), v.concat(Word::counting(base, len, i).symbols())))
                .collect()
        }
    };
    let u = Bisection { backend, pieces }.normalized();
    debug_assert!(u.validate().is_ok());
    Ok(u)
}

/// Identity pieces covering `set`.
pub(crate) fn identity_on(backend: Backend, set: &ClopenSet) -> Vec<Piece> {
    set.cylinders().iter().map(|c| backend.identity_piece(c.clone())).collect()
}

pub(crate) fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(precondition(msg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn w(s: &str) -> Word {
        Word::new(s.bytes().map(|c| c - b'0').collect())
    }

    fn set(base: u8, words: &[&str]) -> ClopenSet {
        ClopenSet::canonicalize(base, words.iter().map(|s| w(s)).collect()).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(Piece::odometer(w("00"), 3).apply(2, &w("00")).unwrap(), w("11"));
        let p = Piece::odometer(w("11"), 1);
        assert_eq!(p.apply(2, &w("11")).unwrap(), w("00"));
        assert_eq!(w("11").add_lsd(2, 1).1, 1);
        assert_eq!(Piece::shift(w("0"), w("110")).apply(2, &w("01")).unwrap(), w("1101"));
        assert!(matches!(
            Piece::shift(w("0"), w("1")).apply(2, &w("1")),
            Err(Error::NotInSource { .. })
        ));
    }

    #[test]
    fn validate_examples() {
        let shift = Backend::full_shift(2);
        let ok = Bisection::new_unchecked(
            shift,
            vec![Piece::shift(w("0"), w("11")), Piece::shift(w("11"), w("0")), Piece::shift(w("10"), w("10"))],
        );
        assert!(ok.validate().is_ok());
        let bad = Bisection::new_unchecked(shift, vec![Piece::shift(w("0"), w("1")), Piece::shift(w("10"), w("11"))]);
        assert_eq!(
            bad.validate(),
            Err(Error::OverlappingPieces { range_side: true, first: w("1"), second: w("11") })
        );
        let odo = Backend::odometer(2);
        let swap = Bisection::new(odo, vec![Piece::odometer(w("0"), 1), Piece::odometer(w("1"), -1)]).unwrap();
        let (s, r) = swap.source_range();
        assert!(s.is_whole() && r.is_whole());
        assert_eq!(swap.pieces()[1].range(2), w("0"));
    }

    #[test]
    fn source_range_examples() {
        let (s, r) = Bisection::empty(Backend::odometer(2)).source_range();
        assert!(s.is_empty() && r.is_empty());
        let u = Bisection::new(Backend::odometer(2), vec![Piece::odometer(w("00"), 1)]).unwrap();
        assert_eq!(u.source_range(), (set(2, &["00"]), set(2, &["10"])));
        let v = Bisection::new(
            Backend::full_shift(2),
            vec![Piece::shift(w("0"), w("11")), Piece::shift(w("11"), w("0")), Piece::shift(w("10"), w("10"))],
        )
        .unwrap();
        let (s, r) = v.source_range();
        assert!(s.is_whole() && r.is_whole());
    }

    #[test]
    fn refine_examples() {
        let phi = Bisection::new(Backend::odometer(2), vec![Piece::odometer(Word::empty(), 1)]).unwrap();
        assert_eq!(phi.refine(1).pieces(), &[Piece::odometer(w("0"), 1), Piece::odometer(w("1"), 1)]);
        let s = Bisection::new(Backend::full_shift(2), vec![Piece::shift(w("0"), w("1"))]).unwrap();
        assert_eq!(s.refine(2).pieces(), &[Piece::shift(w("00"), w("10")), Piece::shift(w("01"), w("11"))]);
        assert_eq!(s.refine(1), s);
        assert_eq!(s.refine(2).normalized(), s);
    }

    #[test]
    fn compare_examples() {
        let odo = Backend::odometer(2);
        let u = compare_clopen(odo, &set(2, &["00"]), &set(2, &["1"])).unwrap();
        assert_eq!(u.pieces(), &[Piece::odometer(w("00"), 1)]);
        assert_eq!(u.source_range().1, set(2, &["10"]));
        assert!(compare_clopen(odo, &ClopenSet::empty(2), &set(2, &["1"])).unwrap().pieces().is_empty());
        assert_eq!(compare_clopen(odo, &set(2, &["0"]), &set(2, &["1"])), Err(Error::ComparisonUnavailable));
        assert_eq!(compare_clopen(odo, &set(2, &["0"]), &ClopenSet::empty(2)), Err(Error::EmptySet));
        let shift = Backend::full_shift(2);
        let u = compare_clopen(shift, &set(2, &["0"]), &set(2, &["11"])).unwrap();
        assert_eq!(u.pieces(), &[Piece::shift(w("0"), w("110"))]);
        // no measure condition on the full shift
        let u = compare_clopen(shift, &ClopenSet::whole(2).difference(&set(2, &["111"])).unwrap(), &set(2, &["111"]))
            .unwrap();
        assert!(u.validate().is_ok());
    }
}
