mod common;

use proptest::prelude::*;
use rand::Rng;

use skat_core::cards::{CardSet, Suit};
use skat_core::features::{extract, null_features, null_win_probability, opening_features, suit_holding, OpeningContext, Question};
use skat_core::rules::GameType;

#[test]
fn null_product_matches_oracle() {
    let mut r = common::rng(41);
    for _ in 0..2000 {
        let (hand, discarded, variant, to_move, conf, entries) = common::random_null_config(&mut r);
        let t = common::null_table(&entries, conf);
        let direct: f64 = null_features(hand, variant, to_move, discarded)
            .iter()
            .map(|v| common::null_oracle_prob(&entries, conf, v))
            .product();
        let p = null_win_probability(hand, variant, to_move, discarded, &t).unwrap();
        assert!((p - direct).abs() <= 1e-12, "{p} vs {direct}");
    }
}
#[test]
fn null_product_all_ones() {
    let mut r = common::rng(42);
    for _ in 0..50 {
        let hand = common::random_cards(&mut r, 10);
        let mut entries = common::NullEntries::new();
        for v in null_features(hand, 0, true, CardSet::EMPTY) {
            entries.insert(v.0, (40, 40));
        }
        assert_eq!(
            null_win_probability(hand, 0, true, CardSet::EMPTY, &common::null_table(&entries, 32)).unwrap(),
            1.0
        );
    }
}

#[test]
fn null_holdings_cover_the_hand() {
    let mut r = common::rng(43);
    for _ in 0..100 {
        let hand = common::random_cards(&mut r, 10);
        let bits: u32 = Suit::ALL.iter().map(|&s| suit_holding(hand, s).count_ones()).sum();
        assert_eq!(bits, 10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn extracted_features_are_in_domain(seed in any::<u64>()) {
        let g = common::random_played(&mut common::rng(seed), 5);
        for q in Question::ALL {
            if !q.applies(&g) {
                continue;
            }
            for v in extract(q, &g).unwrap() {
                prop_assert!(q.schema().check(&v).is_ok(), "{} {:?}", q.tag(), v);
            }
        }
    }

    #[test]
    fn opening_features_are_in_domain(seed in any::<u64>(), g in 0usize..5, last in any::<bool>(), bid in 0u32..100) {
        let mut r = common::rng(seed);
        let game = GameType::ALL[g];
        let hand = common::random_cards(&mut r, 10);
        let lead = hand.to_vec()[r.gen_range(0..10)];
        let ctx = OpeningContext { game, hand, lead, declarer_last: last, partner_bid: bid };
        if let Some(v) = opening_features(&ctx) {
            let q = if game == GameType::Grand { Question::OpeningGrand } else { Question::OpeningSuit };
            prop_assert!(q.schema().check(&v).is_ok());
        }
    }
}
