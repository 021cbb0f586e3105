//! The Boolean algebra of clopen subsets of `{0,…,b−1}^ℕ`.
//!
//! A clopen set is stored as its canonical antichain of cylinders: no word is
//! a prefix of another, no complete family of `b` siblings is present, and
//! the words are sorted. Two cylinder lists denote the same set exactly when
//! their canonical forms coincide, so `==` is set equality.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::measure::{pow, MeasureValue};
use crate::word::{check_base, PointName, Word};
use crate::Ratio;

/// A cylinder `[u]` is named by its prefix word; the empty word is the whole
/// space.
pub type Cylinder = Word;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ClopenSet {
    base: u8,
    cylinders: Vec<Word>,
}

/// The bound `2^(−exponent)` on the diameter under `d(x, y) = 2^(−k)`, `k` the
/// first index where `x` and `y` differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiameterBound {
    pub exponent: u32,
}

impl DiameterBound {
    /// Whether the bound is strictly below `2^(−n)`.
    pub fn below_pow2(&self, n: i64) -> bool {
        i64::from(self.exponent) > n
    }

    pub fn to_ratio(&self) -> Ratio {
        Ratio::new(1, 1u128 << self.exponent.min(127))
    }
}

impl ClopenSet {
    pub fn empty(base: u8) -> Self {
        ClopenSet { base, cylinders: Vec::new() }
    }

    pub fn whole(base: u8) -> Self {
        ClopenSet { base, cylinders: alloc::vec![Word::empty()] }
    }

    pub fn cylinder(base: u8, w: Word) -> Result<Self> {
        Self::canonicalize(base, alloc::vec![w])
    }

    /// Canonical form of the union of the given cylinders.
    pub fn canonicalize(base: u8, mut words: Vec<Word>) -> Result<Self> {
        check_base(base)?;
        for w in &words {
            if let Some(&s) = w.symbols().iter().find(|&&s| s >= base) {
                return Err(Error::Malformed(alloc::format!(
                    "cylinder [{w}] has symbol {s} outside base {base}"
                )));
            }
        }
        words.sort_unstable();
        words.dedup();
        Ok(Self::from_sorted_unchecked(base, words))
    }

    fn from_sorted_unchecked(base: u8, words: Vec<Word>) -> Self {
        // prefix absorption: extensions of a kept word follow it contiguously
        let mut antichain: Vec<Word> = Vec::with_capacity(words.len());
        for w in words {
            match antichain.last() {
                Some(last) if last.is_prefix_of(&w) => {}
                _ => antichain.push(w),
            }
        }
        ClopenSet { base, cylinders: merge_siblings(base, antichain) }
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn cylinders(&self) -> &[Word] {
        &self.cylinders
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.cylinders.len() == 1 && self.cylinders[0].is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.cylinders.iter().map(Word::len).max().unwrap_or(0)
    }

    fn check_same_base(&self, other: &ClopenSet) -> Result<()> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(Error::BaseMismatch { left: self.base, right: other.base })
        }
    }

    pub fn complement(&self) -> ClopenSet {
        let mut out = Vec::new();
        complement_rec(self.base, Word::empty(), &self.cylinders, &mut out);
        Self::from_sorted_unchecked(self.base, out)
    }

    pub fn intersect(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.check_same_base(other)?;
        let mut out = Vec::new();
        intersect_rec(self.base, 0, &self.cylinders, &other.cylinders, &mut out);
        Ok(Self::from_sorted_unchecked(self.base, out))
    }

    pub fn union(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.check_same_base(other)?;
        let mut all = self.cylinders.clone();
        all.extend(other.cylinders.iter().cloned());
        all.sort_unstable();
        Ok(Self::from_sorted_unchecked(self.base, all))
    }

    pub fn difference(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.check_same_base(other)?;
        self.intersect(&other.complement())
    }

    pub fn is_subset(&self, other: &ClopenSet) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn is_disjoint(&self, other: &ClopenSet) -> Result<bool> {
        Ok(self.intersect(other)?.is_empty())
    }

    /// Whether the cylinder `[w]` lies inside the set.
    pub fn contains_cylinder(&self, w: &Word) -> bool {
        let idx = self.cylinders.partition_point(|c| c <= w);
        idx > 0 && self.cylinders[idx - 1].is_prefix_of(w)
    }

    pub fn contains_point(&self, x: &PointName) -> bool {
        self.contains_cylinder(&x.prefix(self.max_depth()))
    }

    /// The Bernoulli measure, additive over the antichain.
    pub fn measure(&self) -> MeasureValue {
        self.try_measure().expect("measure denominator exceeds u128")
    }

    pub fn try_measure(&self) -> Result<MeasureValue> {
        if self.cylinders.is_empty() {
            return Ok(MeasureValue::zero(self.base));
        }
        let depth = self.max_depth() as u32;
        let mut numerator: u128 = 0;
        for c in &self.cylinders {
            let term = pow(self.base, depth - c.len() as u32)?;
            numerator = numerator.checked_add(term).ok_or(Error::Overflow)?;
        }
        MeasureValue::new(self.base, numerator, depth)
    }

    /// `2^(−k)` with `k` the length of the longest common prefix.
    pub fn diameter_bound(&self) -> Result<DiameterBound> {
        let first = self.cylinders.first().ok_or(Error::EmptySet)?;
        let mut k = first.len();
        for c in &self.cylinders[1..] {
            let common = first
                .symbols()
                .iter()
                .zip(c.symbols())
                .take_while(|(a, b)| a == b)
                .count();
            k = k.min(common);
        }
        Ok(DiameterBound { exponent: k as u32 })
    }

    /// The shallowest cylinder of the antichain, lexicographically least
    /// among those.
    pub fn pick_cylinder(&self) -> Result<&Word> {
        self.cylinders
            .iter()
            .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
            .ok_or(Error::EmptySet)
    }

    /// Every depth-`depth` cylinder inside the set, in lexicographic order.
    /// Cylinders already deeper than `depth` are kept as they are.
    pub fn cylinders_at_depth(&self, depth: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for c in &self.cylinders {
            if c.len() >= depth {
                out.push(c.clone());
            } else {
                out.extend(
                    Word::all_of_length(self.base, depth - c.len()).map(|t| c.concat(t.symbols())),
                );
            }
        }
        out
    }
}

/// Merges complete sibling families in a sorted antichain. In sorted order
/// the children `w·0, …, w·(b−1)` of a fully merged parent are adjacent once
/// their own subtrees have been merged, so one stack pass suffices.
fn merge_siblings(base: u8, antichain: Vec<Word>) -> Vec<Word> {
    let b = base as usize;
    let mut out: Vec<Word> = Vec::with_capacity(antichain.len());
    for w in antichain {
        out.push(w);
        while out.len() >= b && out.last().and_then(Word::last) == Some(base - 1) {
            let family = &out[out.len() - b..];
            let parent = family[0].parent();
            let complete = parent.as_ref().is_some_and(|p| {
                family
                    .iter()
                    .enumerate()
                    .all(|(a, c)| c.len() == p.len() + 1 && p.is_prefix_of(c) && c.last() == Some(a as u8))
            });
            if !complete {
                break;
            }
            out.truncate(out.len() - b);
            out.push(parent.expect("complete family has a parent"));
        }
    }
    out
}

/// Splits a sorted slice of words sharing a length-`k` prefix by symbol `k`.
fn split_by_symbol(words: &[Word], k: usize, symbol: u8) -> &[Word] {
    let lo = words.partition_point(|w| w.symbols()[k] < symbol);
    let hi = words.partition_point(|w| w.symbols()[k] <= symbol);
    &words[lo..hi]
}

fn complement_rec(base: u8, prefix: Word, words: &[Word], out: &mut Vec<Word>) {
    if words.is_empty() {
        out.push(prefix);
        return;
    }
    if words[0].len() == prefix.len() {
        return;
    }
    for s in 0..base {
        let sub = split_by_symbol(words, prefix.len(), s);
        complement_rec(base, prefix.child(s), sub, out);
    }
}

fn intersect_rec(base: u8, k: usize, a: &[Word], b: &[Word], out: &mut Vec<Word>) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    if a[0].len() == k {
        out.extend(b.iter().cloned());
        return;
    }
    if b[0].len() == k {
        out.extend(a.iter().cloned());
        return;
    }
    for s in 0..base {
        intersect_rec(base, k + 1, split_by_symbol(a, k, s), split_by_symbol(b, k, s), out);
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}:{{", self.base)?;
        for (i, c) in self.cylinders.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `b^(−n)` as a rational.
pub fn cylinder_ratio(base: u8, depth: u32) -> Result<Ratio> {
    Ok(Ratio::new(1, pow(base, depth)?))
}
