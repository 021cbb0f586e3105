use fullgroup_core::decompose::decompose_small_support;
use fullgroup_core::transfer::{exact_swap_involution, full_group_transfer};
use fullgroup_core::{Backend, ClopenSet, GroupElement, Piece, Ratio, Word};
use proptest::prelude::*;

const DEPTH: usize = 4;

fn word_at(base: u8, depth: usize, mut index: usize) -> Word {
    let mut v = vec![0u8; depth];
    for slot in v.iter_mut().rev() {
        *slot = (index % base as usize) as u8;
        index /= base as usize;
    }
    Word::new(v)
}

/// A clopen set given by the depth-`DEPTH` cylinders it contains.
fn from_bits(base: u8, bits: &[bool]) -> ClopenSet {
    let words = bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| word_at(base, DEPTH, i)).collect();
    ClopenSet::canonicalize(base, words).unwrap()
}

fn to_bits(set: &ClopenSet) -> Vec<bool> {
    let n = (set.base() as usize).pow(DEPTH as u32);
    (0..n).map(|i| set.contains_cylinder(&word_at(set.base(), DEPTH, i))).collect()
}

fn bits(base: u8) -> impl Strategy<Value = Vec<bool>> {
    proptest::collection::vec(any::<bool>(), (base as usize).pow(DEPTH as u32))
}

fn base_and_two_sets() -> impl Strategy<Value = (u8, Vec<bool>, Vec<bool>)> {
    (2u8..=3).prop_flat_map(|b| (Just(b), bits(b), bits(b)))
}

fn odometer_element(base: u8) -> impl Strategy<Value = GroupElement> {
    (0usize..=3).prop_flat_map(move |d| {
        let n = (base as usize).pow(d as u32);
        let perm = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
        (Just(d), perm, proptest::collection::vec(-1i128..=1, n))
    })
    .prop_map(move |(d, perm, wraps)| {
        let period = (base as i128).pow(d as u32);
        let pieces = (0..perm.len())
            .map(|i| {
                let w = word_at(base, d, i);
                let t = word_at(base, d, perm[i]);
                let power = t.lsd_value(base).unwrap() - w.lsd_value(base).unwrap() + wraps[i] * period;
                Piece::odometer(w, power)
            })
            .collect();
        GroupElement::from_pieces(Backend::odometer(base), pieces).unwrap()
    })
}

/// Leaves of a prefix tree grown by expanding the chosen leaves.
fn prefix_code(base: u8, choices: &[usize]) -> Vec<Word> {
    let mut leaves = vec![Word::empty()];
    for &c in choices {
        let open: Vec<usize> = (0..leaves.len()).filter(|&i| leaves[i].len() < 3).collect();
        if open.is_empty() {
            break;
        }
        let w = leaves.swap_remove(open[c % open.len()]);
        leaves.extend((0..base).map(|s| w.child(s)));
    }
    leaves
}

fn shift_element(base: u8) -> impl Strategy<Value = GroupElement> {
    (0usize..=4)
        .prop_flat_map(|k| (proptest::collection::vec(any::<usize>(), k), proptest::collection::vec(any::<usize>(), k)))
        .prop_flat_map(move |(a, b)| {
            let (src, dst) = (prefix_code(base, &a), prefix_code(base, &b));
            let n = src.len().min(dst.len());
            (Just(src), Just(dst), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
        .prop_filter("codes of equal size", |(s, d, _)| s.len() == d.len())
        .prop_map(move |(src, dst, perm)| {
            let pieces = src.iter().zip(&perm).map(|(u, &j)| Piece::shift(u.clone(), dst[j].clone())).collect();
            GroupElement::from_pieces(Backend::full_shift(base), pieces).unwrap()
        })
}

fn element() -> impl Strategy<Value = GroupElement> {
    prop_oneof![odometer_element(2), odometer_element(3), shift_element(2), shift_element(3)]
}

fn triple() -> impl Strategy<Value = (GroupElement, GroupElement, GroupElement)> {
    prop_oneof![
        (odometer_element(2), odometer_element(2), odometer_element(2)),
        (odometer_element(3), odometer_element(3), odometer_element(3)),
        (shift_element(2), shift_element(2), shift_element(2)),
        (shift_element(3), shift_element(3), shift_element(3)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn clopen_algebra_matches_bitmaps((base, x, y) in base_and_two_sets()) {
        let (a, b) = (from_bits(base, &x), from_bits(base, &y));
        prop_assert_eq!(to_bits(&a), x.clone());
        let zip = |f: fn(bool, bool) -> bool| x.iter().zip(&y).map(|(&p, &q)| f(p, q)).collect::<Vec<_>>();
        prop_assert_eq!(to_bits(&a.union(&b).unwrap()), zip(|p, q| p || q));
        prop_assert_eq!(to_bits(&a.intersect(&b).unwrap()), zip(|p, q| p && q));
        prop_assert_eq!(to_bits(&a.difference(&b).unwrap()), zip(|p, q| p && !q));
        prop_assert_eq!(to_bits(&a.complement()), x.iter().map(|p| !p).collect::<Vec<_>>());
        prop_assert_eq!(a.is_subset(&b).unwrap(), x.iter().zip(&y).all(|(&p, &q)| !p || q));
        prop_assert_eq!(a.is_disjoint(&b).unwrap(), x.iter().zip(&y).all(|(&p, &q)| !(p && q)));
        prop_assert_eq!(a == b, x == y);
        let count = x.iter().filter(|&&p| p).count() as u128;
        let total = (base as u128).pow(DEPTH as u32);
        prop_assert_eq!(a.try_measure().unwrap().to_ratio().unwrap(), Ratio::new(count, total));
        let parsed: ClopenSet = a.to_string().parse().unwrap();
        prop_assert_eq!(parsed, a);
    }

    #[test]
    fn group_axioms((f, g, h) in triple()) {
        let id = GroupElement::identity(f.backend());
        prop_assert_eq!(f.compose(&g).unwrap().compose(&h).unwrap(), f.compose(&g.compose(&h).unwrap()).unwrap());
        prop_assert_eq!(f.compose(&id).unwrap(), f.clone());
        prop_assert_eq!(id.compose(&f).unwrap(), f.clone());
        prop_assert!(f.compose(&f.inverse()).unwrap().is_identity());
        prop_assert_eq!(f.inverse().inverse(), f.clone());
        prop_assert_eq!(f.compose(&g).unwrap().inverse(), g.inverse().compose(&f.inverse()).unwrap());
    }

    #[test]
    fn composition_acts_on_cylinders((f, g, _h) in triple(), picks in proptest::collection::vec(any::<usize>(), 16)) {
        let base = f.base();
        let fg = f.compose(&g).unwrap();
        let depth = 8;
        for p in picks {
            let w = word_at(base, depth, p % (base as usize).pow(depth as u32));
            let Some(gw) = g.image_of_cylinder(&w) else { continue };
            if let (Some(direct), Some(two_step)) = (fg.image_of_cylinder(&w), f.image_of_cylinder(&gw)) {
                prop_assert_eq!(direct, two_step);
            }
        }
    }

    #[test]
    fn images_preserve_measure(g in prop_oneof![odometer_element(2), odometer_element(3)], x in bits(2), y in bits(3)) {
        let set = from_bits(g.base(), if g.base() == 2 { &x } else { &y });
        let image = g.image(&set).unwrap();
        prop_assert_eq!(image.measure(), set.measure());
        prop_assert_eq!(g.inverse().image(&image).unwrap(), set);
    }

    #[test]
    fn support_of_conjugates((a, b, _c) in triple()) {
        let lhs = b.conjugate(&a).unwrap().support();
        let rhs = b.image(&a.support()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(b.conjugate(&a).unwrap(), b.compose(&a).unwrap().compose(&b.inverse()).unwrap());
    }

    #[test]
    fn encodings_round_trip(g in element()) {
        let parsed: GroupElement = g.to_string().parse().unwrap();
        prop_assert_eq!(parsed, g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transfers_land_inside((base, x, y) in base_and_two_sets(), odometer in any::<bool>()) {
        let backend = if odometer { Backend::odometer(base) } else { Backend::full_shift(base) };
        let (a, b) = (from_bits(base, &x), from_bits(base, &y));
        prop_assume!(!a.is_whole() && !b.is_empty());
        prop_assume!(!odometer || a.measure().to_ratio().unwrap() < b.measure().to_ratio().unwrap());
        let r = full_group_transfer(backend, &a, &b).unwrap();
        prop_assert!(r.check(&a, &b).is_ok());
        prop_assert!(r.element.image(&a).unwrap().is_subset(&b).unwrap());
    }

    #[test]
    fn exact_swaps_on_odometers(base in 2u8..=3, seed in any::<u64>()) {
        let n = (base as usize).pow(DEPTH as u32);
        let k = 1 + (seed as usize % (n - 1));
        let x: Vec<bool> = (0..n).map(|i| i < k).collect();
        let shift = (seed as usize / n) % n;
        let y: Vec<bool> = (0..n).map(|i| x[(i + shift) % n]).collect();
        let (a, b) = (from_bits(base, &x), from_bits(base, &y));
        prop_assume!(a != b);
        let g = exact_swap_involution(Backend::odometer(base), &a, &b).unwrap();
        prop_assert_eq!(g.image(&a).unwrap(), b.clone());
        prop_assert!(g.compose(&g).unwrap().is_identity());
        prop_assert!(g.support().is_subset(&a.union(&b).unwrap()).unwrap());
    }

    #[test]
    fn decompositions_multiply_back(g in element(), k in 2u128..=16) {
        let eps = Ratio::new(1, k);
        let d = decompose_small_support(&g, eps).unwrap();
        prop_assert!(d.check(&g).is_ok());
        prop_assert_eq!(d.product().unwrap(), g);
    }
}
