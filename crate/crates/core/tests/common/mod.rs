#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skat_core::cards::{deal_for_id, Card, CardSet, DealRecord, PLAYERS};
use skat_core::features::{null_features, Question};
use skat_core::orchestrator::finished_record;
use skat_core::pgn::GameRecord;
use skat_core::phash::FeatureVector;
use skat_core::rules::{bid_ladder, Declaration, GameState, GameType};
use skat_core::tables::{LayeredTable, TableEntry, WinningTable};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_legal(st: &GameState, r: &mut ChaCha8Rng) -> Card {
    let legal = st.legal_moves(st.to_move()).unwrap().to_vec();
    *legal.choose(r).unwrap()
}

/// A complete game with random declaration and random legal play.
pub fn random_played(r: &mut ChaCha8Rng, id: u64) -> GameRecord {
    let deal = DealRecord {
        id,
        deal: deal_for_id(r.gen(), id),
    };
    let game = GameType::ALL[r.gen_range(0..GameType::ALL.len())];
    let declaration = Declaration::plain(game);
    let declarer = r.gen_range(0..PLAYERS as u8);
    let mut hands = deal.deal.hands;
    let put = if declaration.hand {
        deal.deal.skat
    } else {
        let twelve = hands[declarer as usize].union(deal.deal.skat).to_vec();
        let pick: Vec<Card> = twelve.choose_multiple(r, 2).copied().collect();
        let put = CardSet::from_cards(pick);
        hands[declarer as usize] = hands[declarer as usize].union(deal.deal.skat).minus(put);
        put
    };
    let mut st = GameState::new(hands, put, declarer, deal.deal.forehand, declaration).unwrap();
    while !st.is_finished() {
        let c = random_legal(&st, r);
        st.play(c).unwrap();
    }
    let ladder = bid_ladder();
    let mut bids = [0u32; PLAYERS];
    for b in bids.iter_mut() {
        if r.gen_bool(0.5) {
            *b = ladder[r.gen_range(0..12)];
        }
    }
    bids[declarer as usize] = bids.iter().copied().max().unwrap().max(18);
    let strength = [r.gen_range(0..=10), r.gen_range(0..=10), r.gen_range(0..=10)];
    finished_record(&deal, bids, strength, &st).unwrap()
}

pub fn random_folded(r: &mut ChaCha8Rng, id: u64) -> GameRecord {
    let deal = deal_for_id(r.gen(), id);
    let mut g = GameRecord::folded(id, &deal);
    g.hand_strength = [r.gen_range(0..=10), r.gen_range(0..=10), r.gen_range(0..=10)];
    g
}

/// Played or folded record; played ones may be cut short and carry
/// arbitrary contract levels, as the format allows.
pub fn random_record(r: &mut ChaCha8Rng, id: u64) -> GameRecord {
    if r.gen_bool(0.2) {
        return random_folded(r, id);
    }
    let mut g = random_played(r, id);
    if r.gen_bool(0.3) {
        let keep = r.gen_range(0..=g.tricks.len());
        g.tricks.truncate(keep);
    }
    if r.gen_bool(0.3) {
        let level: i8 = r.gen_range(1..=11);
        g.contract_level = if r.gen_bool(0.5) { level } else { -level };
    }
    g
}

/// Records with ids `0..n`, about `fold_rate` of them folded.
pub fn synthetic_corpus(seed: u64, n: u64, fold_rate: f64) -> Vec<GameRecord> {
    let mut r = rng(seed);
    (0..n)
        .map(|id| {
            if r.gen_bool(fold_rate) {
                random_folded(&mut r, id)
            } else {
                random_played(&mut r, id)
            }
        })
        .collect()
}

/// Trick-boundary position with `n` cards per hand; the other cards are
/// banked at random by either side.
pub fn random_endgame(r: &mut ChaCha8Rng, n: usize, game: GameType) -> GameState {
    let mut deck: Vec<Card> = Card::all().collect();
    deck.shuffle(r);
    let hands: [CardSet; PLAYERS] = std::array::from_fn(|p| CardSet::from_cards(deck[p * n..(p + 1) * n].iter().copied()));
    let skat = CardSet::from_cards(deck[3 * n..3 * n + 2].iter().copied());
    let mut de = skat.eyes();
    let mut oe = 0;
    for c in &deck[3 * n + 2..] {
        if r.gen_bool(0.5) {
            de += c.eyes();
        } else {
            oe += c.eyes();
        }
    }
    let declarer = r.gen_range(0..PLAYERS as u8);
    let leader = r.gen_range(0..PLAYERS as u8);
    GameState::endgame(hands, skat, declarer, leader, Declaration::plain(game), de, oe).unwrap()
}

/// Final declarer eyes under best play, by plain minimax over every line.
pub fn minimax_eyes(st: &GameState) -> u32 {
    if st.is_finished() {
        return st.declarer_eyes;
    }
    let seat = st.to_move();
    let values = st.legal_moves(seat).unwrap().iter().map(|c| {
        let mut next = st.clone();
        next.play(c).unwrap();
        minimax_eyes(&next)
    });
    if seat == st.declarer {
        values.max().unwrap()
    } else {
        values.min().unwrap()
    }
}

/// Whether the null declarer can lose every remaining trick against any defence.
pub fn minimax_null(st: &GameState) -> bool {
    if st.tricks_taken[0] > 0 {
        return false;
    }
    if st.is_finished() {
        return true;
    }
    let seat = st.to_move();
    let mut outcomes = st.legal_moves(seat).unwrap().iter().map(|c| {
        let mut next = st.clone();
        next.play(c).unwrap();
        minimax_null(&next)
    });
    if seat == st.declarer {
        outcomes.any(|w| w)
    } else {
        outcomes.all(|w| w)
    }
}

pub const SAMPLE_PREFIX: &str = "0 0 2 22 0 22 0 0 0 0 0 0 1 0 -1 87 10";

/// A full clubs game whose first seventeen fields equal the truncated sample line.
pub fn sample_game() -> GameRecord {
    let game = GameType::Suit(skat_core::cards::Suit::Clubs);
    let mut r = rng(3);
    for seed in 0.. {
        let deal = deal_for_id(seed, 0);
        for _ in 0..200 {
            let mut st = GameState::new(deal.hands, deal.skat, 2, deal.forehand, Declaration::plain(game)).unwrap();
            while !st.is_finished() {
                let c = random_legal(&st, &mut r);
                st.play(c).unwrap();
            }
            if st.declarer_eyes == 87 {
                return finished_record(&DealRecord { id: 0, deal }, [22, 0, 22], [10, 4, 7], &st).unwrap();
            }
        }
    }
    unreachable!()
}

/// Table of `n` random buckets with 1..40 games each.
pub fn random_table(q: Question, seed: u64, n: usize) -> WinningTable {
    let mut r = rng(seed);
    let mut t = WinningTable::empty(q);
    for _ in 0..n {
        let v: Vec<u64> = q.schema().fields().iter().map(|f| r.gen_range(0..f.domain)).collect();
        let key = q.schema().rank(&FeatureVector(v)).unwrap();
        let games = r.gen_range(1..40);
        if t.get(key).is_none() {
            t.insert(key, TableEntry::new(r.gen_range(0..=games), games).unwrap()).unwrap();
        }
    }
    t
}

pub type NullEntries = BTreeMap<Vec<u64>, (u64, u64)>;

/// Per-suit null probability straight from the entry list: the full bucket
/// when confident, else all buckets sharing the holding when those are,
/// else one half.
pub fn null_oracle_prob(entries: &NullEntries, conf: u64, v: &FeatureVector) -> f64 {
    if let Some(&(w, g)) = entries.get(&v.0) {
        if g >= conf {
            return w as f64 / g as f64;
        }
    }
    let (mut w, mut g) = (0, 0);
    for (k, &(kw, kg)) in entries {
        if k[0] == v.0[0] {
            w += kw;
            g += kg;
        }
    }
    if g == 0 || g < conf {
        0.5
    } else {
        w as f64 / g as f64
    }
}

pub fn null_table(entries: &NullEntries, conf: u64) -> LayeredTable {
    let q = Question::NullPerSuit;
    let mut t = WinningTable::empty(q);
    for (k, &(w, g)) in entries {
        t.insert(q.schema().rank(&FeatureVector(k.clone())).unwrap(), TableEntry::new(w, g).unwrap())
            .unwrap();
    }
    LayeredTable::from_foreground(t).unwrap().with_confidence(conf)
}

pub fn random_cards(r: &mut ChaCha8Rng, n: usize) -> CardSet {
    let mut deck: Vec<Card> = Card::all().collect();
    deck.shuffle(r);
    CardSet::from_cards(deck[..n].iter().copied())
}

/// Random null position with table entries on or near its four suit features.
pub fn random_null_config(r: &mut ChaCha8Rng) -> (CardSet, CardSet, u8, bool, u64, NullEntries) {
    let hand = random_cards(r, 10);
    let discarded = random_cards(r, 2).minus(hand);
    let variant = r.gen_range(0..4u8);
    let to_move = r.gen_bool(0.5);
    let conf = r.gen_range(1..64);
    let mut entries = NullEntries::new();
    for v in null_features(hand, variant, to_move, discarded) {
        if r.gen_bool(0.6) {
            let g = r.gen_range(1..100);
            entries.insert(v.0.clone(), (r.gen_range(0..=g), g));
        }
        if r.gen_bool(0.3) {
            let mut other = v.0.clone();
            other[1] = (other[1] + 1) % 4;
            let g = r.gen_range(1..100);
            entries.insert(other, (r.gen_range(0..=g), g));
        }
    }
    (hand, discarded, variant, to_move, conf, entries)
}
