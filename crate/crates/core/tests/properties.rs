mod common;

use std::collections::BTreeSet;

use cofinitary::coding::{coding_length, s_value, shape, BitString, ZSet};
use cofinitary::families::{
    build_family, overlap_in_window, psi_split, psi_triple, psi_triple_split, CantorPairing, MemberRef,
};
use cofinitary::perms::{apply_word, eval_word, fixed_points, psi_image, GroundRepresentation, PartialInjection};
use cofinitary::words::{reduced_words_of_length, reduced_words_up_to, Word};
use common::{Table, A, AI};
use proptest::prelude::*;

const LETTERS: [i8; 6] = [A, AI, 1, -1, 2, -2];
const AB: [i8; 4] = [A, AI, 1, -1];

fn stack_reduce(raw: &[i8]) -> Vec<i8> {
    let mut out: Vec<i8> = Vec::new();
    for &l in raw {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn word(raw: &[i8]) -> Word {
    Word::reduce(common::library_word(raw).letters().iter().copied())
}

fn injection() -> impl Strategy<Value = Vec<(u64, u64)>> {
    proptest::collection::btree_map(0u64..24, 0u64..24, 0..10).prop_filter_map("injective", |m| {
        let values: BTreeSet<u64> = m.values().copied().collect();
        (values.len() == m.len()).then(|| m.into_iter().collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn reduce_matches_a_stack_reducer(raw in proptest::collection::vec(proptest::sample::select(LETTERS.to_vec()), 10)) {
        let w = word(&raw);
        prop_assert_eq!(common::oracle_letters(&w), stack_reduce(&raw));
        prop_assert!(w.is_reduced());
        prop_assert_eq!(Word::reduce(w.letters().iter().copied()), w);
    }

    #[test]
    fn display_round_trips(raw in proptest::collection::vec(proptest::sample::select(LETTERS.to_vec()), 0..12)) {
        let w = word(&raw);
        prop_assert_eq!(w.to_string().parse::<Word>().unwrap(), w);
    }

    #[test]
    fn evaluation_matches_the_oracle(
        pairs in injection(),
        raw in proptest::collection::vec(proptest::sample::select(AB.to_vec()), 1..7),
        m in 0u64..30,
    ) {
        let s = PartialInjection::from_pairs(pairs.iter().copied()).unwrap();
        let t = Table::new(&pairs);
        let rep = GroundRepresentation::single_zshift();
        let w = word(&raw);
        let letters = common::oracle_letters(&w);
        prop_assert_eq!(apply_word(&w, &rep, &s, m), common::eval(&letters, &t, m));
        let r = eval_word(&w, &rep, &s, m, 2).unwrap();
        prop_assert_eq!(r.path[0], m);
        prop_assert!(r.path.len() <= 2 * w.len() + 1);
        prop_assert_eq!(r.value, common::eval(&[letters.clone(), letters.clone()].concat(), &t, m));
        prop_assert!(r.use_set().iter().all(|x| r.path.contains(x)));
    }

    #[test]
    fn fixed_points_match_a_scan(
        pairs in injection(),
        raw in proptest::collection::vec(proptest::sample::select(AB.to_vec()), 1..6),
    ) {
        let w = word(&raw);
        prop_assume!(w.contains_new());
        let s = PartialInjection::from_pairs(pairs.iter().copied()).unwrap();
        let t = Table::new(&pairs);
        let rep = GroundRepresentation::single_zshift();
        let letters = common::oracle_letters(&w);
        // every defined point lies within a few shifts of the values of s
        let scan: BTreeSet<u64> = (0..80).filter(|&m| common::eval(&letters, &t, m) == Some(m)).collect();
        prop_assert_eq!(fixed_points(&w, &rep, &s, 0).unwrap(), scan);
    }

    #[test]
    fn psi_image_pairs_the_graph(pairs in injection()) {
        let s = PartialInjection::from_pairs(pairs.iter().copied()).unwrap();
        let image = psi_image(&Word::a(), &GroundRepresentation::trivial(), &s, CantorPairing).unwrap();
        let oracle: BTreeSet<u64> = pairs.iter().map(|&(n, k)| (n + k) * (n + k + 1) / 2 + k).collect();
        prop_assert_eq!(image, oracle);
    }

    #[test]
    fn a_coding_length_matches_the_oracle(pairs in injection(), m in 0u64..24, bits in "[01]{0,5}") {
        let s = PartialInjection::from_pairs(pairs.iter().copied()).unwrap();
        let t = Table::new(&pairs);
        let z: BitString = bits.parse().unwrap();
        let got = coding_length(&Word::a(), &GroundRepresentation::trivial(), &s, m, &ZSet::Bits(z.clone())).unwrap();
        // past the given prefix the real is read as zeros
        let mut padded = z.0.clone();
        padded.resize(16, false);
        prop_assert_eq!(got, t.a_coding_length(m, &padded));
    }

    #[test]
    fn pairing_splits_invert(n in 0u64..1_000_000, k in 0u64..1_000_000) {
        let c = (n + k) * (n + k + 1) / 2 + k;
        prop_assert_eq!(psi_split(c), (n, k));
    }
}

#[test]
fn inverses_cancel_for_short_words() {
    for w in reduced_words_up_to(4, 2) {
        assert!(w.after(&w.inverse()).is_empty(), "{w}");
        assert!(w.inverse().after(&w).is_empty(), "{w}");
        assert_eq!(w.inverse().inverse(), w);
    }
}

#[test]
fn subword_counts_subtract_duplicates() {
    for w in reduced_words_up_to(5, 2) {
        let letters = common::oracle_letters(&w);
        let n = letters.len();
        let distinct: BTreeSet<Vec<i8>> =
            (0..n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).map(|(i, j)| letters[i..j].to_vec()).collect();
        assert_eq!(w.subwords().len(), distinct.len(), "{w}");
        assert!(distinct.len() <= n * (n + 1) / 2);
    }
}

#[test]
fn reduced_word_counts_follow_the_branching_formula() {
    for ground in 0..3u32 {
        let k = 2 * (ground as usize + 1);
        for len in 1..6 {
            let expected = k * (k - 1).pow(len as u32 - 1);
            assert_eq!(reduced_words_of_length(len, ground).len(), expected);
        }
    }
}

#[test]
fn s_grows_with_length_and_only_sees_the_shape() {
    let words: Vec<Word> = reduced_words_up_to(4, 2).into_iter().filter(|w| w.in_wd()).collect();
    for x in &words {
        let sx = s_value(x).unwrap();
        assert!(sx > 1);
        for y in &words {
            let sy = s_value(y).unwrap();
            if x.len() < y.len() {
                assert!(sx < sy, "S({x}) = {sx}, S({y}) = {sy}");
            }
            assert_eq!(sx == sy, shape(x).unwrap().shape == shape(y).unwrap().shape, "{x} vs {y}");
        }
    }
}

#[test]
fn pinned_s_values() {
    assert_eq!(s_value(&"a".parse().unwrap()).unwrap(), 2);
    assert_eq!(s_value(&"a^-1".parse().unwrap()).unwrap(), 3);
    assert_eq!(s_value(&"b.a".parse().unwrap()).unwrap(), 10);
    assert_eq!(shape(&"b.a".parse().unwrap()).unwrap().to_string(), "y.a");
}

#[test]
fn triples_round_trip() {
    for x in 0..20 {
        for m in 0..20 {
            for n in 0..20 {
                assert_eq!(psi_triple_split(psi_triple(x, m, n)), (x, m, n));
            }
        }
    }
    assert_eq!(psi_triple(0, 0, 0), 0);
}

#[test]
fn family_members_are_disjoint_within_and_across_stages() {
    let fams: Vec<_> = (0..3).map(|stage| build_family(stage, 6, 3, 11).unwrap()).collect();
    let members: Vec<_> = fams
        .iter()
        .flat_map(|f| (0..6).flat_map(move |m| (0..3).map(move |xi| f.member(MemberRef { m, xi }).unwrap())))
        .collect();
    for (i, f) in members.iter().enumerate() {
        assert_eq!((0..200).filter(|&n| f.apply(n) == n).count(), 0);
        assert!((0..200).all(|n| f.inverse(f.apply(n)) == n));
        for g in &members[i + 1..] {
            assert_eq!(overlap_in_window(f, g, 200), 0);
        }
    }
    assert_eq!(build_family(1, 6, 3, 11).unwrap(), fams[1]);
}

#[test]
fn members_avoid_the_ground_shift() {
    let fam = build_family(0, 10, 2, 3).unwrap();
    for m in 0..10 {
        for xi in 0..2 {
            let f = fam.member(MemberRef { m, xi }).unwrap();
            let agree = (0..200).filter(|&n| f.apply(n) == common::zshift(n)).count();
            assert!(agree < 20, "f({m}, {xi}) meets the shift {agree} times on [0, 200)");
        }
    }
}
