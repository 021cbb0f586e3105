//! Parsers for the textual encodings printed by the `Display` impls:
//!
//! * words: base-36 digits, `ε` (or nothing) for the empty word;
//! * clopen sets: `b2:{00,01,1}`, `b2:{}`, `b2:{ε}`;
//! * bisections: `odo2:[(00;+1)]`, `shift2:[(0>11),(11>0),(10>10)]`;
//! * elements: a bisection, optionally behind the header `elem:`;
//! * points: `01(0)` for `0 1 0 0 0 …`;
//! * witness expressions: `[a,b]*[c,d]`, `1`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::backend::{Backend, BackendKind, Bisection, Piece};
use crate::certificate::is_identifier;
use crate::clopen::ClopenSet;
use crate::element::{GroupElement, WitnessExpr};
use crate::error::{Error, Result};
use crate::word::{PointName, Word};

fn malformed(what: &str, text: &str) -> Error {
    Error::Malformed(format!("invalid {what}: {text:?}"))
}

pub fn parse_word(base: u8, text: &str) -> Result<Word> {
    let text = text.trim();
    if text.is_empty() || text == "ε" {
        return Ok(Word::empty());
    }
    let symbols = text
        .chars()
        .map(|c| c.to_digit(36).map(|d| d as u8))
        .collect::<Option<Vec<u8>>>()
        .ok_or_else(|| malformed("word", text))?;
    Word::checked(base, symbols)
}

fn split_list(inner: &str) -> impl Iterator<Item = &str> {
    inner.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl FromStr for ClopenSet {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (head, body) = text.split_once(':').ok_or_else(|| malformed("clopen set", text))?;
        let base: u8 = head
            .strip_prefix('b')
            .and_then(|b| b.parse().ok())
            .ok_or_else(|| malformed("clopen set base", text))?;
        crate::word::check_base(base)?;
        let inner = body
            .trim()
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| malformed("clopen set", text))?;
        let words = split_list(inner).map(|w| parse_word(base, w)).collect::<Result<Vec<_>>>()?;
        ClopenSet::canonicalize(base, words)
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (kind, rest) = if let Some(rest) = text.strip_prefix("odo") {
            (BackendKind::Odometer, rest)
        } else if let Some(rest) = text.strip_prefix("shift") {
            (BackendKind::FullShift, rest)
        } else {
            return Err(malformed("backend", text));
        };
        let base = rest.parse().map_err(|_| malformed("backend base", text))?;
        Backend::new(kind, base)
    }
}

/// One piece, `(u;+n)` or `(u>v)`, checked against the backend.
pub fn parse_piece(backend: Backend, text: &str) -> Result<Piece> {
    let t = text.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| malformed("piece", text))?;
    let piece = match backend.kind {
        BackendKind::Odometer => {
            let (u, n) = inner.split_once(';').ok_or_else(|| malformed("odometer piece", text))?;
            let n = n.trim();
            let n: i128 = n.strip_prefix('+').unwrap_or(n).parse().map_err(|_| malformed("power", text))?;
            Piece::odometer(parse_word(backend.base, u)?, n)
        }
        BackendKind::FullShift => {
            let (u, v) = inner.split_once('>').ok_or_else(|| malformed("shift piece", text))?;
            Piece::shift(parse_word(backend.base, u)?, parse_word(backend.base, v)?)
        }
    };
    Ok(piece)
}

fn parse_pieces(text: &str) -> Result<(Backend, Vec<Piece>)> {
    let text = text.trim();
    let (head, body) = text.split_once(':').ok_or_else(|| malformed("bisection", text))?;
    let backend: Backend = head.parse()?;
    let inner = body
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| malformed("piece list", text))?;
    let mut pieces = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let end = rest.find(')').ok_or_else(|| malformed("piece list", text))?;
        pieces.push(parse_piece(backend, &rest[..=end])?);
        rest = rest[end + 1..].trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
        } else if !rest.is_empty() {
            return Err(malformed("piece list", text));
        }
    }
    Ok((backend, pieces))
}

impl FromStr for Bisection {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (backend, pieces) = parse_pieces(text)?;
        Bisection::new(backend, pieces)
    }
}

impl FromStr for GroupElement {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let body = text.strip_prefix("elem:").unwrap_or(text);
        let (backend, pieces) = parse_pieces(body)?;
        GroupElement::from_pieces(backend, pieces)
    }
}

/// `pre(period)` with digits in the given base.
pub fn parse_point(base: u8, text: &str) -> Result<PointName> {
    let t = text.trim();
    let (pre, rest) = t.split_once('(').ok_or_else(|| malformed("point", text))?;
    let period = rest.strip_suffix(')').ok_or_else(|| malformed("point", text))?;
    PointName::new(parse_word(base, pre)?, parse_word(base, period)?)
}

impl FromStr for WitnessExpr {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "1" || text.is_empty() {
            return Ok(WitnessExpr::one());
        }
        let mut items = Vec::new();
        for part in text.split('*') {
            let inner = part
                .trim()
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| malformed("commutator", part))?;
            let (a, b) = inner.split_once(',').ok_or_else(|| malformed("commutator", part))?;
            let (a, b) = (a.trim(), b.trim());
            if !is_identifier(a) || !is_identifier(b) {
                return Err(malformed("commutator", part));
            }
            items.push(WitnessExpr::Commutator(a.to_string(), b.to_string()));
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { WitnessExpr::Product(items) })
    }
}
