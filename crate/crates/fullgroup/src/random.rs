//! Seeded generators. Each trial draws from its own substream, keyed by a
//! label, so a failing trial can be replayed without running the others.

use fullgroup_core::{Backend, BackendKind, ClopenSet, GroupElement, Piece, Result, Word};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// The generator seeded by `SHA-256(seed ‖ label)`.
pub fn substream(seed: u64, label: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

pub fn random_word<R: Rng>(rng: &mut R, base: u8, len: usize) -> Word {
    Word::new((0..len).map(|_| rng.gen_range(0..base)).collect())
}

/// A clopen set read off a random tree of depth at most `max_depth`.
pub fn random_clopen<R: Rng>(rng: &mut R, base: u8, max_depth: usize) -> Result<ClopenSet> {
    fn grow<R: Rng>(rng: &mut R, base: u8, prefix: Word, left: usize, out: &mut Vec<Word>) {
        if left == 0 {
            if rng.gen_bool(0.5) {
                out.push(prefix);
            }
            return;
        }
        match rng.gen_range(0..4) {
            0 => out.push(prefix),
            1 => {}
            _ => {
                for s in 0..base {
                    grow(rng, base, prefix.child(s), left - 1, out);
                }
            }
        }
    }
    let mut words = Vec::new();
    grow(rng, base, Word::empty(), max_depth, &mut words);
    ClopenSet::canonicalize(base, words)
}

/// A random set that is neither empty nor the whole space.
pub fn random_proper<R: Rng>(rng: &mut R, base: u8, max_depth: usize) -> Result<ClopenSet> {
    loop {
        let s = random_clopen(rng, base, max_depth.max(1))?;
        if !s.is_empty() && !s.is_whole() {
            return Ok(s);
        }
    }
}

/// A nonempty subset of a nonempty set, possibly the set itself.
pub fn random_subset<R: Rng>(rng: &mut R, set: &ClopenSet, extra_depth: usize) -> Result<ClopenSet> {
    for _ in 0..32 {
        let mask = random_clopen(rng, set.base(), set.max_depth() + extra_depth)?;
        let s = set.intersect(&mask)?;
        if !s.is_empty() {
            return Ok(s);
        }
    }
    ClopenSet::cylinder(set.base(), set.pick_cylinder()?.child(0))
}

/// Leaves of a prefix tree obtained by `splits` leaf expansions at depth below
/// `max_depth`. Requires `splits` to be at most the number of internal nodes
/// of the full tree of that depth.
fn random_prefix_code<R: Rng>(rng: &mut R, base: u8, max_depth: usize, splits: usize) -> Vec<Word> {
    let mut leaves = vec![Word::empty()];
    for _ in 0..splits {
        let open: Vec<usize> = (0..leaves.len()).filter(|&i| leaves[i].len() < max_depth).collect();
        let Some(&i) = open.choose(rng) else { break };
        let w = leaves.swap_remove(i);
        leaves.extend((0..base).map(|s| w.child(s)));
    }
    leaves
}

fn max_splits(base: u8, max_depth: usize) -> usize {
    let mut total = 0usize;
    let mut level = 1usize;
    for _ in 0..max_depth {
        total = total.saturating_add(level);
        level = level.saturating_mul(base as usize);
    }
    total
}

/// A random element whose pieces have sources of length at most `max_depth`.
///
/// On the odometer: a permutation `π` of the words of one length `d`, realized
/// by the powers `m(πw) − m(w) + j·b^d`. On the full shift: two random prefix
/// codes with the same number of leaves, matched by a random bijection.
pub fn random_element<R: Rng>(rng: &mut R, backend: Backend, max_depth: usize) -> Result<GroupElement> {
    let base = backend.base;
    match backend.kind {
        BackendKind::Odometer => {
            let d = rng.gen_range(0..=max_depth);
            let words: Vec<Word> = Word::all_of_length(base, d).collect();
            let mut targets = words.clone();
            targets.shuffle(rng);
            let period = (base as i128).pow(d as u32);
            let mut pieces = Vec::with_capacity(words.len());
            for (w, t) in words.into_iter().zip(targets) {
                let j = rng.gen_range(-1..=1i128);
                let power = t.lsd_value(base)? - w.lsd_value(base)? + j * period;
                pieces.push(Piece::odometer(w, power));
            }
            GroupElement::from_pieces(backend, pieces)
        }
        BackendKind::FullShift => {
            let cap = max_splits(base, max_depth).min(3 * max_depth);
            let splits = rng.gen_range(0..=cap);
            let sources = random_prefix_code(rng, base, max_depth, splits);
            let mut targets = random_prefix_code(rng, base, max_depth, splits);
            targets.shuffle(rng);
            let pieces = sources.into_iter().zip(targets).map(|(u, v)| Piece::shift(u, v)).collect();
            GroupElement::from_pieces(backend, pieces)
        }
    }
}

pub fn random_nontrivial<R: Rng>(rng: &mut R, backend: Backend, max_depth: usize) -> Result<GroupElement> {
    loop {
        let g = random_element(rng, backend, max_depth.max(1))?;
        if !g.is_identity() {
            return Ok(g);
        }
    }
}

/// A nontrivial element whose square is not the identity.
pub fn random_non_involution<R: Rng>(rng: &mut R, backend: Backend, max_depth: usize) -> Result<GroupElement> {
    loop {
        let g = random_nontrivial(rng, backend, max_depth)?;
        if !g.compose(&g)?.is_identity() {
            return Ok(g);
        }
    }
}

/// `(A, B)` with `A ≠ X`, `B ≠ ∅` and `3^k μ(A) < μ(B)` on the odometer
/// (`k = 0` for one transfer, `k = 1` for the commutator transfer). On the
/// full shift every third pair has `B ⊆ A`.
pub fn random_admissible_pair<R: Rng>(
    rng: &mut R,
    backend: Backend,
    max_depth: usize,
    factor: u128,
) -> Result<(ClopenSet, ClopenSet)> {
    let base = backend.base;
    loop {
        let a = random_clopen(rng, base, max_depth)?;
        if a.is_whole() {
            continue;
        }
        if !backend.has_measure() {
            if !a.is_empty() && rng.gen_range(0..3) == 0 {
                let b = random_subset(rng, &a, 1)?;
                return Ok((a, b));
            }
            let b = random_proper(rng, base, max_depth)?;
            return Ok((a, b));
        }
        let b = random_clopen(rng, base, max_depth)?;
        if b.is_empty() {
            continue;
        }
        if a.try_measure()?.times(factor)? < b.try_measure()?.to_ratio()? {
            return Ok((a, b));
        }
    }
}

/// `(A, B)` with both differences nonempty and, on the odometer, equal
/// measures. On the full shift with `b ≥ 3` the cylinder counts of the two
/// differences agree modulo `b − 1`.
pub fn random_equal_measure_pair<R: Rng>(
    rng: &mut R,
    backend: Backend,
    max_depth: usize,
) -> Result<(ClopenSet, ClopenSet)> {
    let base = backend.base;
    loop {
        let (a, b) = match backend.kind {
            BackendKind::Odometer => {
                let d = rng.gen_range(1..=max_depth.max(1));
                let words: Vec<Word> = Word::all_of_length(base, d).collect();
                let k = rng.gen_range(1..words.len());
                let pick = |rng: &mut R| words.choose_multiple(rng, k).cloned().collect::<Vec<_>>();
                let a = ClopenSet::canonicalize(base, pick(rng))?;
                let b = ClopenSet::canonicalize(base, pick(rng))?;
                (a, b)
            }
            BackendKind::FullShift => (random_proper(rng, base, max_depth)?, random_proper(rng, base, max_depth)?),
        };
        let (ab, ba) = (a.difference(&b)?, b.difference(&a)?);
        if ab.is_empty() || ba.is_empty() {
            continue;
        }
        if backend.kind == BackendKind::FullShift && base >= 3 {
            let m = base as usize - 1;
            if ab.cylinders().len() % m != ba.cylinders().len() % m {
                continue;
            }
        }
        return Ok((a, b));
    }
}
