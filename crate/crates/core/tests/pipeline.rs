mod common;

use std::collections::HashMap;
use std::fs;

use skat_core::cards::{generate_deals_from, DealRecord};
use skat_core::features::{observations, Question};
use skat_core::orchestrator::{
    bootstrap, declarer_games, emit_report, evaluate, learn, metrics_csv, ocs_flags, parse_metrics_csv, report_from, run_selfplay,
    same_seats, versus, BootstrapConfig, MetricsRow,
};
use skat_core::pgn::parse_series_str;
use skat_core::players::{CardPlay, PolicyConfig};
use skat_core::rules::game_outcome;
use skat_core::tables::{TableSet, TableStore};

fn light() -> PolicyConfig {
    PolicyConfig {
        worlds: 1,
        endgame_worlds: 2,
        endgame_trigger: 3,
        eyes_tiebreak: false,
        seed: 5,
        ..PolicyConfig::default()
    }
}

fn deals(n: usize) -> Vec<DealRecord> {
    generate_deals_from(77, 0, n).collect()
}

#[test]
fn selfplay_is_reproducible_and_partition_free() {
    let d = deals(40);
    let t = TableSet::empty();
    let a = run_selfplay(&d, &same_seats(&t, CardPlay::Table), &light(), 1).unwrap();
    let b = run_selfplay(&d, &same_seats(&t, CardPlay::Table), &light(), 1).unwrap();
    let c = run_selfplay(&d, &same_seats(&t, CardPlay::Table), &light(), 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(a.len(), 40);
    assert!(a.iter().zip(&d).all(|(g, deal)| g.id == deal.id));
}

#[test]
fn selfplay_records_are_consistent() {
    let d = deals(40);
    let t = TableSet::empty();
    let records = run_selfplay(&d, &same_seats(&t, CardPlay::Table), &light(), 1).unwrap();
    for g in &records {
        g.validate().unwrap();
        assert_eq!(g.deal(), d[g.id as usize].deal);
        if !g.is_played() {
            assert!(g.tricks.is_empty());
            assert_eq!(g.contract_level, -1);
            continue;
        }
        let st = g.replay().unwrap();
        assert!(st.is_finished());
        let out = game_outcome(&st, g.highest_bid()).unwrap();
        assert_eq!(out.declarer_won, g.declarer_won);
        assert_eq!(out.eyes, g.declarer_eyes);
        assert!(g.bids[g.declarer as usize] >= 18);
        assert_eq!(g.bids[g.declarer as usize], g.highest_bid());
    }
}

#[test]
fn report_conserves_deals() {
    let d = deals(50);
    let t = TableSet::empty();
    let records = run_selfplay(&d, &same_seats(&t, CardPlay::RandomLegal), &light(), 1).unwrap();
    let rep = evaluate(&records, 1).unwrap();
    assert_eq!(rep.played() + rep.folded, 50);
    let all_agree: HashMap<u64, bool> = records.iter().filter(|g| g.is_played()).map(|g| (g.id, g.declarer_won)).collect();
    assert_eq!(report_from(&records, &all_agree).unwrap().accuracy(), 1.0);
    let flags = ocs_flags(&records, 2).unwrap();
    assert_eq!(flags.len() as u64, rep.played());
}

#[test]
fn learned_tables_count_played_games() {
    let d = deals(60);
    let t = TableSet::empty();
    let records = run_selfplay(&d, &same_seats(&t, CardPlay::RandomLegal), &light(), 1).unwrap();
    let (learned, stats) = learn(&records, &t).unwrap();
    let played = records.iter().filter(|g| g.is_played()).count() as u64;
    assert_eq!(declarer_games(&learned), played);
    for (q, st) in Question::ALL.iter().zip(&stats) {
        let naive: usize = records
            .iter()
            .filter(|g| q.applies(g))
            .map(|g| observations(*q, g).unwrap().len())
            .sum();
        assert_eq!(st.observations, naive, "{}", q.tag());
    }
}

#[test]
fn bootstrap_accumulates_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = BootstrapConfig {
        iterations: 2,
        deals_per_iteration: 25,
        deal_seed: 9,
        policy: light(),
        workers: 1,
        baseline: true,
    };
    let b = bootstrap(&cfg, TableSet::empty(), Some(dir.path())).unwrap();
    assert_eq!(b.runs.len(), 2);
    let played: u64 = b.corpora.iter().flatten().filter(|g| g.is_played()).count() as u64;
    assert_eq!(b.runs[1].table_games, played);
    assert_eq!(declarer_games(&b.tables), played);
    assert!(b.runs[0].table_games <= b.runs[1].table_games);
    assert_eq!(b.runs[1].first_id, 25);
    assert!(b.runs[0].baseline.is_none() && b.runs[1].baseline.is_some());

    let store = TableStore::new(dir.path().join("tables"));
    let (v, t) = store.load_current().unwrap().unwrap();
    assert_eq!(v, 2);
    assert_eq!(t, b.tables);

    let text = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let rows = parse_metrics_csv(&text).unwrap();
    assert_eq!(rows.len(), 2);
    let direct: Vec<MetricsRow> = b.runs.iter().map(MetricsRow::from_run).collect();
    assert_eq!(rows, direct);
    assert_eq!(metrics_csv(&b.runs).unwrap(), text);
    let acc = fs::read_to_string(dir.path().join("plots/accuracy.dat")).unwrap();
    assert_eq!(acc.lines().filter(|l| !l.starts_with('#')).count(), 2);
    for (i, r) in b.runs.iter().enumerate() {
        let corpus = fs::read_to_string(dir.path().join(format!("corpus/iter_{:03}.pgn", i + 1))).unwrap();
        let (h, records) = parse_series_str(&corpus).unwrap();
        assert_eq!(records, b.corpora[i]);
        assert_eq!(h.game_count, 25);
        assert_eq!(r.report.played() + r.report.folded, 25);
    }
}

#[test]
fn empty_iteration_keeps_tables() {
    let seed = run_selfplay(&deals(20), &same_seats(&TableSet::empty(), CardPlay::RandomLegal), &light(), 1).unwrap();
    let (start, _) = learn(&seed, &TableSet::empty()).unwrap();
    let cfg = BootstrapConfig {
        iterations: 1,
        deals_per_iteration: 0,
        deal_seed: 1,
        policy: light(),
        workers: 1,
        baseline: false,
    };
    let b = bootstrap(&cfg, start.clone(), None).unwrap();
    assert_eq!(b.tables, start);
    assert_eq!(b.runs[0].report.played(), 0);
    let cfg = BootstrapConfig { iterations: 0, ..cfg };
    assert!(bootstrap(&cfg, start, None).is_err());
    assert!(emit_report(&[], tempfile::tempdir().unwrap().path()).is_err());
}

#[test]
fn versus_seats_follow_seating() {
    let d = deals(30);
    let (a, _) = learn(
        &run_selfplay(&d, &same_seats(&TableSet::empty(), CardPlay::RandomLegal), &light(), 1).unwrap(),
        &TableSet::empty(),
    )
    .unwrap();
    let empty = TableSet::empty();
    let same = versus(&d, &empty, &empty, [true, false, false], &light(), 1).unwrap();
    let same2 = versus(&d, &empty, &empty, [false, true, true], &light(), 1).unwrap();
    assert_eq!(same.results, same2.results);
    let r = versus(&d, &a, &empty, [true, true, false], &light(), 1).unwrap();
    let games: u32 = r.results.iter().map(|x| x.won + x.lost).sum();
    assert!(games <= 30);
}
