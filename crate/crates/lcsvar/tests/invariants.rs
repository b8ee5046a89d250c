//! Property tests for the structural invariants of the core types.

use proptest::prelude::*;

use lcsvar::chain::{lcs_profile, InsertionChain};
use lcsvar::lcs::{
    decompose_compartments, enumerate_matches, extract_minimal_matching, lcs_length,
    lcs_length_bitparallel, letters_in_long_compartments,
};
use lcsvar::rational::Rational;
use lcsvar::words::{strip_extra_letter, Word};

fn word(alphabet: u8, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..alphabet, 0..=max_len).prop_map(Word::new)
}

fn chain_parts(m: u8, max_len: usize) -> impl Strategy<Value = InsertionChain> {
    (1..=max_len).prop_flat_map(move |n| {
        let letters = prop::collection::vec(0..m, n);
        let positions: Vec<BoxedStrategy<usize>> = (3..=n)
            .map(|k| (2..=k - 1).prop_map(|t| t).boxed())
            .collect();
        (letters, positions)
            .prop_map(move |(u, t)| InsertionChain::from_parts(usize::from(m), u, t).unwrap())
    })
}

proptest! {
    #[test]
    fn lcs_is_symmetric(a in word(3, 24), b in word(3, 24)) {
        prop_assert_eq!(lcs_length(&a, &b), lcs_length(&b, &a));
    }

    #[test]
    fn lcs_monotone_under_append(a in word(3, 20), b in word(3, 20), c in 0u8..3) {
        let base = lcs_length(&a, &b);
        let mut longer = a.letters().to_vec();
        longer.push(c);
        let grown = lcs_length(&Word::new(longer), &b);
        prop_assert!(grown >= base && grown <= base + 1);
        prop_assert!(base <= a.len().min(b.len()));
    }

    #[test]
    fn bitparallel_equals_dp(a in word(4, 200), b in word(4, 200)) {
        prop_assert_eq!(lcs_length_bitparallel(&a, &b), lcs_length(&a, &b));
    }

    #[test]
    fn minimal_matching_is_valid_and_maximal(a in word(3, 24), b in word(3, 24)) {
        let pair = extract_minimal_matching(&a, &b);
        prop_assert!(pair.is_valid_for(&a, &b));
        prop_assert_eq!(pair.len(), lcs_length(&a, &b));
        // Unmatched-letter identity over interior matches.
        if pair.len() >= 2 {
            let total: usize = enumerate_matches(&pair)
                .iter()
                .map(|m| m.unmatched_count())
                .sum();
            let l = pair.len();
            prop_assert_eq!(total, pair.eta[l - 1] - l - (pair.eta[0] - 1));
        }
    }

    #[test]
    fn profile_has_unit_increments(chain in chain_parts(2, 24), y in word(2, 24)) {
        let profile = lcs_profile(&chain, &y);
        prop_assert_eq!(profile.value(0), 0);
        for k in 1..=chain.n() {
            let step = profile.value(k) - profile.value(k - 1);
            prop_assert!(step <= 1);
        }
        // L(k) is the true LCS at every k, not just monotone.
        let k = chain.n();
        let z = chain.materialize(k).unwrap();
        prop_assert_eq!(profile.value(k) as usize, lcs_length(&z, &y));
    }

    #[test]
    fn deleting_insertion_recovers_previous(chain in chain_parts(3, 20)) {
        for k in 3..=chain.n() {
            let prev = chain.materialize(k - 1).unwrap();
            let cur = chain.materialize(k).unwrap();
            let mut trimmed = cur.letters().to_vec();
            trimmed.remove(chain.positions()[k - 3] - 1);
            prop_assert_eq!(Word::new(trimmed), prev);
        }
    }

    #[test]
    fn compartments_partition_and_count(y in word(3, 40)) {
        let d = decompose_compartments(&y, 3).unwrap();
        let comps = d.compartments();
        prop_assert_eq!(comps.len(), d.count());
        if y.is_empty() {
            prop_assert!(comps.is_empty());
        } else {
            prop_assert_eq!(comps[0].0, 1);
            prop_assert_eq!(comps[comps.len() - 1].1, y.len());
            for w in comps.windows(2) {
                prop_assert_eq!(w[0].1 + 1, w[1].0);
            }
        }
        // Long-compartment letter count agrees with a direct scan.
        for threshold in [1usize, 2, 5, y.len() + 1] {
            let direct: usize = comps
                .iter()
                .map(|&(s, e)| e - s + 1)
                .filter(|&len| len >= threshold)
                .sum();
            prop_assert_eq!(letters_in_long_compartments(&d, threshold), direct);
        }
    }

    #[test]
    fn strip_preserves_length_budget(x in word(4, 60)) {
        let (stripped, removed) = strip_extra_letter(&x, 3);
        prop_assert_eq!(stripped.len() + removed, x.len());
        prop_assert!(stripped.letters().iter().all(|&c| c != 3));
    }

    #[test]
    fn word_text_round_trip(w in word(36, 50)) {
        let line = w.to_text_line().unwrap();
        prop_assert_eq!(Word::from_text_line(&line).unwrap(), w);
    }

    #[test]
    fn rational_field_laws(
        an in -50i128..50, ad in 1i128..20,
        bn in -50i128..50, bd in 1i128..20,
    ) {
        let a = Rational::new(an, ad).unwrap();
        let b = Rational::new(bn, bd).unwrap();
        let sum = a.checked_add(b).unwrap();
        prop_assert_eq!(sum.checked_sub(b).unwrap(), a);
        prop_assert_eq!(a.checked_mul(b).unwrap(), b.checked_mul(a).unwrap());
        if !b.is_zero() {
            prop_assert_eq!(a.checked_div(b).unwrap().checked_mul(b).unwrap(), a);
        }
        let expect = (an as f64 / ad as f64) + (bn as f64 / bd as f64);
        prop_assert!((sum.to_f64() - expect).abs() < 1e-9);
    }
}
