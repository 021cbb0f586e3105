//! Finite words over `{0, …, b−1}` and eventually periodic points.
//!
//! Index 0 of a word is the first coordinate of the infinite sequence. For the
//! odometer that is the least significant digit.

use alloc::vec::Vec;
use core::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest supported base; symbols are written as `0-9a-z`.
pub const MAX_BASE: u8 = 36;

/// A finite word. It also names the cylinder of all sequences starting with it.
///
/// The derived order is lexicographic with a prefix sorting before all of its
/// extensions, which the clopen algebra relies on.
#[derive(Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Symbols);

/// Words up to this length are stored inline.
type Symbols = SmallVec<[u8; 24]>;

impl Clone for Word {
    fn clone(&self) -> Self {
        Word(Symbols::from_slice(&self.0))
    }
}

impl Word {
    pub const fn empty() -> Self {
        Word(Symbols::new_const())
    }

    pub fn new(symbols: Vec<u8>) -> Self {
        Word(Symbols::from_vec(symbols))
    }

    /// Builds a word and checks every symbol against `base`.
    pub fn checked(base: u8, symbols: Vec<u8>) -> Result<Self> {
        check_base(base)?;
        if let Some(&s) = symbols.iter().find(|&&s| s >= base) {
            return Err(Error::Malformed(alloc::format!("symbol {s} not below base {base}")));
        }
        Ok(Word::new(symbols))
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// True when the two cylinders intersect, i.e. one word extends the other.
    pub fn comparable(&self, other: &Word) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn child(&self, symbol: u8) -> Word {
        let mut v = Symbols::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(symbol);
        Word(v)
    }

    pub fn concat(&self, tail: &[u8]) -> Word {
        let mut v = Symbols::with_capacity(self.0.len() + tail.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(tail);
        Word(v)
    }

    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word(Symbols::from_slice(&self.0[..self.0.len() - 1])))
        }
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    pub fn truncate(&self, len: usize) -> Word {
        Word(Symbols::from_slice(&self.0[..len.min(self.0.len())]))
    }

    /// Symbols after the first `len`.
    pub fn suffix_after(&self, len: usize) -> &[u8] {
        &self.0[len.min(self.0.len())..]
    }

    /// The integer `Σ uₖ bᵏ` read least-significant-digit first.
    pub fn lsd_value(&self, base: u8) -> Result<i128> {
        let mut acc: i128 = 0;
        for &s in self.0.iter().rev() {
            acc = acc
                .checked_mul(i128::from(base))
                .and_then(|v| v.checked_add(i128::from(s)))
                .ok_or(Error::Overflow)?;
        }
        Ok(acc)
    }

    /// Adds `n` to the word read as a `len`-digit number (LSD first), modulo
    /// `base^len`, returning the result together with the carry out.
    pub fn add_lsd(&self, base: u8, n: i128) -> (Word, i128) {
        let mut out = Symbols::from_slice(&self.0);
        let mut carry = n;
        for s in out.iter_mut() {
            if carry == 0 {
                break;
            }
            carry = match i64::try_from(carry) {
                Ok(c) => {
                    let t = i64::from(*s) + c;
                    *s = t.rem_euclid(i64::from(base)) as u8;
                    i128::from(t.div_euclid(i64::from(base)))
                }
                Err(_) => {
                    let t = i128::from(*s) + carry;
                    *s = t.rem_euclid(i128::from(base)) as u8;
                    t.div_euclid(i128::from(base))
                }
            };
        }
        (Word(out), carry)
    }

    /// All `base^len` words of length `len`, in lexicographic order.
    pub fn all_of_length(base: u8, len: usize) -> impl Iterator<Item = Word> {
        let total = (base as usize).checked_pow(len as u32).expect("word enumeration too large");
        (0..total).map(move |i| Word::counting(base, len, i))
    }

    /// The `index`-th word of length `len` in lexicographic order (the first
    /// symbol is most significant).
    pub fn counting(base: u8, len: usize, mut index: usize) -> Word {
        let mut v = Symbols::from_elem(0u8, len);
        for slot in v.iter_mut().rev() {
            *slot = (index % base as usize) as u8;
            index /= base as usize;
        }
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for &s in &self.0 {
            fmt::Write::write_char(f, symbol_char(s))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

pub(crate) fn symbol_char(s: u8) -> char {
    char::from_digit(u32::from(s), 36).expect("symbol below 36")
}

pub(crate) fn check_base(base: u8) -> Result<()> {
    if (2..=MAX_BASE).contains(&base) {
        Ok(())
    } else {
        Err(Error::Malformed(alloc::format!("base {base} outside 2..={MAX_BASE}")))
    }
}

/// The eventually periodic sequence `preperiod · period · period · …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointName {
    preperiod: Word,
    period: Word,
}

impl PointName {
    pub fn new(preperiod: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Malformed("point period must be nonempty".into()));
        }
        Ok(PointName { preperiod, period })
    }

    /// `prefix · 000…`
    pub fn zero_tail(prefix: Word) -> Self {
        PointName { preperiod: prefix, period: Word::new(alloc::vec![0]) }
    }

    pub fn preperiod(&self) -> &Word {
        &self.preperiod
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn symbol_at(&self, index: usize) -> u8 {
        let pre = self.preperiod.symbols();
        if index < pre.len() {
            pre[index]
        } else {
            let per = self.period.symbols();
            per[(index - pre.len()) % per.len()]
        }
    }

    /// The first `len` coordinates.
    pub fn prefix(&self, len: usize) -> Word {
        Word::new((0..len).map(|i| self.symbol_at(i)).collect())
    }

    /// Whether the point lies in the cylinder `[w]`.
    pub fn in_cylinder(&self, w: &Word) -> bool {
        w.symbols().iter().enumerate().all(|(i, &s)| self.symbol_at(i) == s)
    }
}

impl fmt::Display for PointName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.preperiod.is_empty() {
            write!(f, "{}", self.preperiod)?;
        }
        write!(f, "({})", self.period)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn lsd_arithmetic() {
        let w = Word::new(vec![1, 1]);
        assert_eq!(w.lsd_value(2).unwrap(), 3);
        let (img, carry) = w.add_lsd(2, 1);
        assert_eq!(img, Word::new(vec![0, 0]));
        assert_eq!(carry, 1);
        let (img, carry) = Word::new(vec![0, 0]).add_lsd(2, -1);
        assert_eq!(img, Word::new(vec![1, 1]));
        assert_eq!(carry, -1);
    }

    #[test]
    fn counting_order_is_lexicographic() {
        let words: Vec<Word> = Word::all_of_length(3, 2).collect();
        assert_eq!(words.len(), 9);
        assert!(words.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(words[5], Word::new(vec![1, 2]));
    }

    #[test]
    fn points() {
        let p = PointName::new(Word::new(vec![1]), Word::new(vec![0, 1])).unwrap();
        assert_eq!(p.prefix(5), Word::new(vec![1, 0, 1, 0, 1]));
        assert!(p.in_cylinder(&Word::new(vec![1, 0])));
        assert!(!p.in_cylinder(&Word::new(vec![1, 1])));
        assert!(PointName::new(Word::empty(), Word::empty()).is_err());
        assert_eq!(alloc::format!("{p}"), "1(01)");
    }
}
