//! Reference computations that only read the raw piece lists and cylinder
//! words. Every lookup is a linear scan; nothing here calls the canonical-form
//! algorithms of the core crate except for constructing inputs.

use fullgroup_core::{ClopenSet, GroupElement, Piece, Ratio};
use rand::Rng;

/// What an element does on a cylinder that lies inside one of its pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalMap {
    /// `x ↦ x + n` on the odometer.
    Translate(i128),
    /// The image word of the cylinder on the full shift.
    Exchange(Vec<u8>),
}

fn is_prefix(u: &[u8], w: &[u8]) -> bool {
    u.len() <= w.len() && &w[..u.len()] == u
}

fn comparable(u: &[u8], w: &[u8]) -> bool {
    is_prefix(u, w) || is_prefix(w, u)
}

/// Adds `n` to the least-significant-first numeral `w` modulo `base^|w|`.
pub fn add_digits(base: u8, w: &[u8], n: i128) -> Vec<u8> {
    let b = base as i128;
    let mut out = Vec::with_capacity(w.len());
    let mut carry = n;
    for &d in w {
        let t = d as i128 + carry;
        out.push(t.rem_euclid(b) as u8);
        carry = t.div_euclid(b);
    }
    out
}

/// The piece whose source is a prefix of `w`.
pub fn covering_piece<'a>(g: &'a GroupElement, w: &[u8]) -> Option<&'a Piece> {
    g.pieces().iter().find(|p| is_prefix(p.source().symbols(), w))
}

pub fn local_map(g: &GroupElement, w: &[u8]) -> Option<LocalMap> {
    Some(match covering_piece(g, w)? {
        Piece::Odometer(p) => LocalMap::Translate(p.power),
        Piece::Shift(p) => {
            let mut img = p.target.symbols().to_vec();
            img.extend_from_slice(&w[p.source.len()..]);
            LocalMap::Exchange(img)
        }
    })
}

/// The image word of `[w]`, when `[w]` lies inside one piece.
pub fn image_word(g: &GroupElement, w: &[u8]) -> Option<Vec<u8>> {
    Some(match local_map(g, w)? {
        LocalMap::Translate(n) => add_digits(g.base(), w, n),
        LocalMap::Exchange(v) => v,
    })
}

/// The local map of `f ∘ g` on `[w]`, when `[w]` and its image under `g` each
/// lie inside one piece.
pub fn composed_local(f: &GroupElement, g: &GroupElement, w: &[u8]) -> Option<LocalMap> {
    match local_map(g, w)? {
        LocalMap::Translate(n) => match local_map(f, &add_digits(g.base(), w, n))? {
            LocalMap::Translate(m) => Some(LocalMap::Translate(n + m)),
            LocalMap::Exchange(_) => None,
        },
        LocalMap::Exchange(v) => image_word(f, &v).map(LocalMap::Exchange),
    }
}

/// Longest piece source.
pub fn source_depth(g: &GroupElement) -> usize {
    g.pieces().iter().map(|p| p.source().len()).max().unwrap_or(0)
}

/// All words of length `depth` when there are at most `limit` of them,
/// otherwise `limit` uniformly sampled ones.
pub fn probe_words<R: Rng>(rng: &mut R, base: u8, depth: usize, limit: usize) -> Vec<Vec<u8>> {
    let total = (base as u128).checked_pow(depth as u32);
    match total {
        Some(t) if t <= limit as u128 => (0..t as usize)
            .map(|mut i| {
                (0..depth)
                    .map(|_| {
                        let d = (i % base as usize) as u8;
                        i /= base as usize;
                        d
                    })
                    .collect()
            })
            .collect(),
        _ => (0..limit).map(|_| (0..depth).map(|_| rng.gen_range(0..base)).collect()).collect(),
    }
}

/// Whether `h` has the expected local map on every probe word.
pub fn agrees(h: &GroupElement, words: &[Vec<u8>], expected: impl Fn(&[u8]) -> Option<LocalMap>) -> bool {
    words.iter().all(|w| match (local_map(h, w), expected(w)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    })
}

/// Pointwise equality on the probe words.
pub fn equal_on(f: &GroupElement, g: &GroupElement, words: &[Vec<u8>]) -> bool {
    agrees(f, words, |w| local_map(g, w))
}

/// Whether `[w]` is covered by the union of the cylinders `set`.
pub fn covers(base: u8, set: &[Vec<u8>], w: &[u8]) -> bool {
    if set.iter().any(|c| is_prefix(c, w)) {
        return true;
    }
    if !set.iter().any(|c| c.len() > w.len() && is_prefix(w, c)) {
        return false;
    }
    (0..base).all(|s| {
        let mut child = w.to_vec();
        child.push(s);
        covers(base, set, &child)
    })
}

pub fn words_of(set: &ClopenSet) -> Vec<Vec<u8>> {
    set.cylinders().iter().map(|w| w.symbols().to_vec()).collect()
}

pub fn subset(base: u8, a: &[Vec<u8>], b: &[Vec<u8>]) -> bool {
    a.iter().all(|w| covers(base, b, w))
}

pub fn set_equal(base: u8, a: &[Vec<u8>], b: &[Vec<u8>]) -> bool {
    subset(base, a, b) && subset(base, b, a)
}

pub fn disjoint(a: &[Vec<u8>], b: &[Vec<u8>]) -> bool {
    a.iter().all(|u| b.iter().all(|v| !comparable(u, v)))
}

pub fn is_whole(base: u8, a: &[Vec<u8>]) -> bool {
    covers(base, a, &[])
}

/// `Σ b^(−|w|)` over an antichain; `None` if two words are comparable.
pub fn measure(base: u8, a: &[Vec<u8>]) -> Option<Ratio> {
    for (i, u) in a.iter().enumerate() {
        if a[i + 1..].iter().any(|v| comparable(u, v)) {
            return None;
        }
    }
    let mut total = Ratio::from_integer(0);
    for w in a {
        total += Ratio::new(1, (base as u128).checked_pow(w.len() as u32)?);
    }
    Some(total)
}

/// Image of a union of cylinders, refining each cylinder until it lies in a
/// single piece. Disjoint inputs give disjoint outputs.
pub fn image(g: &GroupElement, a: &[Vec<u8>]) -> Option<Vec<Vec<u8>>> {
    fn go(g: &GroupElement, w: &[u8], out: &mut Vec<Vec<u8>>) -> Option<()> {
        if let Some(v) = image_word(g, w) {
            out.push(v);
            return Some(());
        }
        if !g.pieces().iter().any(|p| is_prefix(w, p.source().symbols())) {
            return None;
        }
        for s in 0..g.base() {
            let mut child = w.to_vec();
            child.push(s);
            go(g, &child, out)?;
        }
        Some(())
    }
    let mut out = Vec::new();
    for w in a {
        go(g, w, &mut out)?;
    }
    Some(out)
}

/// Union of the piece sources on which the local map moves the cylinder.
pub fn support(g: &GroupElement) -> Vec<Vec<u8>> {
    g.pieces()
        .iter()
        .filter_map(|p| {
            let w = p.source().symbols();
            let moved = match local_map(g, w)? {
                LocalMap::Translate(n) => n != 0,
                LocalMap::Exchange(v) => v != w,
            };
            moved.then(|| w.to_vec())
        })
        .collect()
}

/// `true` when every pair of words in the list shares a prefix of length `n`.
pub fn common_prefix_at_least(a: &[Vec<u8>], n: usize) -> bool {
    match a.first() {
        None => true,
        Some(first) => first.len() >= n && a.iter().all(|w| w.len() >= n && w[..n] == first[..n]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn digits_carry_least_significant_first() {
        assert_eq!(add_digits(2, &[1, 1], 2), vec![1, 0]);
        assert_eq!(add_digits(2, &[0, 0], -1), vec![1, 1]);
        assert_eq!(add_digits(3, &[2], 1), vec![0]);
    }

    #[test]
    fn covering_and_measure() {
        let set = vec![vec![0, 0], vec![0, 1], vec![1]];
        assert!(is_whole(2, &set));
        assert_eq!(measure(2, &set), Some(Ratio::from_integer(1)));
        assert_eq!(measure(2, &[vec![0], vec![0, 1]]), None);
        assert!(subset(2, &[vec![1, 0]], &[vec![1]]));
        assert!(!subset(2, &[vec![1]], &[vec![1, 0]]));
        assert!(disjoint(&[vec![0]], &[vec![1, 1]]));
    }

    #[test]
    fn shift_images() {
        let g: GroupElement = "shift2:[(0>11),(11>0),(10>10)]".parse().unwrap();
        assert_eq!(image(&g, &[vec![0]]), Some(vec![vec![1, 1]]));
        assert!(set_equal(2, &image(&g, &[vec![1]]).unwrap(), &[vec![0], vec![1, 0]]));
        let s = support(&g);
        assert!(set_equal(2, &s, &[vec![0], vec![1, 1]]));
    }

    #[test]
    fn probe_words_enumerate_small_depths() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        assert_eq!(probe_words(&mut rng, 2, 3, 100).len(), 8);
        assert_eq!(probe_words(&mut rng, 3, 9, 100).len(), 100);
    }
}
