mod common;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::Rng;

use skat_core::cards::{deal_count, deal_for_id, skat_deal_count_with_forehand, Card, CardSet, DealSpec, Rank, Suit};
use skat_core::rules::{game_outcome, seeger_fabian_score, Declaration, GameState, GameType, ScoredGame};

fn factorial(n: u32) -> BigUint {
    let mut f = BigUint::from(1u32);
    for i in 2..=n {
        f *= i;
    }
    f
}

/// Suit a card belongs to for following purposes; jacks and the trump suit share one.
fn follow_group(c: Card, game: GameType) -> Option<Suit> {
    match game {
        GameType::Suit(t) if c.rank() == Rank::Jack || c.suit() == t => None,
        GameType::Grand if c.rank() == Rank::Jack => None,
        _ => Some(c.suit()),
    }
}

#[test]
fn deal_count_identity() {
    let expected = factorial(32) / (factorial(10) * factorial(10) * factorial(10) * factorial(2));
    assert_eq!(deal_count(DealSpec::new(3, 32).unwrap()), expected);
    assert_eq!(skat_deal_count_with_forehand(), expected * 3u32);
    assert_eq!(deal_count(DealSpec::new(3, 32).unwrap()).to_string(), "2753294408504640");
}

#[test]
fn seeger_fabian_totals() {
    let games = [
        ScoredGame {
            declarer: 0,
            won: true,
            value: 24,
        },
        ScoredGame {
            declarer: 1,
            won: false,
            value: 46,
        },
        ScoredGame {
            declarer: 0,
            won: false,
            value: 18,
        },
    ];
    assert_eq!(seeger_fabian_score(&games), [24 + 50 + 40 - 36 - 50, -92 - 50 + 40, 40 + 40]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn deals_partition_deck(seed in any::<u64>(), id in any::<u64>()) {
        let d = deal_for_id(seed, id);
        let all = d.hands.iter().fold(d.skat, |a, h| a.union(*h));
        prop_assert_eq!(all, CardSet::FULL);
        prop_assert!(d.hands.iter().all(|h| h.len() == 10));
        prop_assert_eq!(d.forehand as u64, id % 3);
    }

    #[test]
    fn playouts_follow_suit_and_conserve_eyes(seed in any::<u64>(), g in 0usize..9) {
        let mut r = common::rng(seed);
        let game = GameType::ALL[g];
        let d = deal_for_id(r.gen(), r.gen());
        let declarer = r.gen_range(0..3u8);
        let mut st = GameState::new(d.hands, d.skat, declarer, d.forehand, Declaration::plain(game)).unwrap();
        while !st.is_finished() {
            let seat = st.to_move();
            let hand = st.hands[seat as usize];
            let legal = st.legal_moves(seat).unwrap();
            let expected = match st.trick.first() {
                None => hand,
                Some(&led) => {
                    let same: CardSet = hand.iter().filter(|&c| follow_group(c, game) == follow_group(led, game)).collect();
                    if same.is_empty() { hand } else { same }
                }
            };
            prop_assert_eq!(legal, expected);
            let c = legal.to_vec()[r.gen_range(0..legal.len())];
            st.play(c).unwrap();
            prop_assert!(st.eyes_conserved());
        }
        let out = game_outcome(&st, 18).unwrap();
        if game.is_null() {
            prop_assert_eq!(out.declarer_won, st.tricks_taken[0] == 0);
        } else {
            prop_assert_eq!(st.declarer_eyes + st.opponent_eyes, 120);
            prop_assert_eq!(out.schneider, st.declarer_eyes <= 30 || st.declarer_eyes >= 90);
            if out.declarer_won {
                prop_assert!(st.declarer_eyes >= 61);
            }
            prop_assert!(out.value >= 18 || !out.declarer_won);
        }
    }
}
