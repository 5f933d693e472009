mod common;

use proptest::prelude::*;
use skat_core::cards::Suit;
use skat_core::pgn::{parse_series_str, series_to_string, split_io, GameRecord, SeriesHeader};
use skat_core::rules::GameType;

#[test]
fn sample_line_fields() {
    let g = common::sample_game();
    let line = g.to_line();
    assert!(line.starts_with(common::SAMPLE_PREFIX), "{line}");
    let back = GameRecord::parse_line(&line).unwrap();
    assert_eq!(back.id, 0);
    assert_eq!(back.game, Some(GameType::Suit(Suit::Clubs)));
    assert_eq!(back.declarer, 2);
    assert_eq!(back.bids, [22, 0, 22]);
    assert!(back.declarer_won);
    assert!(!back.folded);
    assert!(!back.hand && !back.schneider && !back.schwarz && !back.ouvert);
    assert_eq!(back.contract_level, -1);
    assert_eq!(back.declarer_eyes, 87);
    assert_eq!(back.hand_strength[0], 10);
}

#[test]
fn truncated_sample_is_rejected() {
    assert!(GameRecord::parse_line(&format!("{} ...", common::SAMPLE_PREFIX)).is_err());
    assert!(GameRecord::parse_line(common::SAMPLE_PREFIX).is_err());
}

#[test]
fn series_roundtrip_is_byte_exact() {
    let mut r = common::rng(11);
    let records: Vec<GameRecord> = (0..200).map(|id| common::random_record(&mut r, id)).collect();
    let mut h = SeriesHeader::new("Training", ["Human", "AI1", "AI2"]);
    h.game_count = records.len() as u64;
    let text = series_to_string(&h, &records);
    let (h2, back) = parse_series_str(&text).unwrap();
    assert_eq!(h2, h);
    assert_eq!(back, records);
    assert_eq!(series_to_string(&h2, &back), text);
}

#[test]
fn split_drops_folded_and_sorts() {
    let mut r = common::rng(12);
    let mut records: Vec<GameRecord> = (0..60).map(|id| common::random_record(&mut r, id)).collect();
    records.reverse();
    let (input, output) = split_io(&records);
    assert_eq!(input.len(), 60);
    assert!(input.windows(2).all(|w| w[0].id < w[1].id));
    assert_eq!(output.len(), records.iter().filter(|g| !g.folded).count());
    assert!(output.iter().all(|g| !g.folded));
}

#[test]
fn played_records_replay_to_their_result() {
    let mut r = common::rng(13);
    for id in 0..300 {
        let g = common::random_played(&mut r, id);
        let st = g.replay().unwrap();
        assert!(st.is_finished());
        assert_eq!(st.declarer_eyes, g.declarer_eyes);
        let signed: i32 = g.tricks.iter().map(|t| t.eyes).filter(|&e| e > 0).sum();
        let skat = g.skat_put.eyes() as i32;
        if !g.game.unwrap().is_null() {
            assert_eq!(signed + skat, g.declarer_eyes as i32);
        }
        assert_eq!(
            g.declarer_hand().union(g.skat_put),
            g.hands[g.declarer as usize].union(g.skat_taken)
        );
        assert_eq!(g.declarer_hand().len(), 10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn line_roundtrip(seed in any::<u64>(), id in 0u64..1_000_000) {
        let g = common::random_record(&mut common::rng(seed), id);
        let line = g.to_line();
        prop_assert_eq!(line.split(' ').count(), g.field_count());
        prop_assert_eq!(GameRecord::parse_line(&line).unwrap(), g);
    }

    #[test]
    fn corrupted_card_rejected(seed in any::<u64>(), pos in 19usize..49, bad in 32i64..100) {
        let g = common::random_record(&mut common::rng(seed), 1);
        let mut fields: Vec<String> = g.to_line().split(' ').map(String::from).collect();
        fields[pos] = bad.to_string();
        prop_assert!(GameRecord::parse_line(&fields.join(" ")).is_err());
    }
}
