//! Self-play, table learning, evaluation and reports.
//!
//! Every game draws its randomness from a seed mixed from the global seed and
//! the deal id, so results do not depend on how deals are split over workers.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cards::{generate_deals_from, DealRecord, PLAYERS};
use crate::error::{Error, Result};
use crate::features::{observations, relative_position, Question};
use crate::pgn::{series_to_string, split_io, GameRecord, SeatResult, SeriesHeader, TrickRecord};
use crate::players::{choose_card, choose_skat_put, hand_strength, max_bid, CardPlay, PolicyConfig};
use crate::rules::{bid_ladder, game_outcome, seeger_fabian_score, Declaration, GameState, GameType, ScoredGame};
use crate::solver::{predicted_outcome_with, Solver};
use crate::tables::{outer_learning, LearningStats, TableSet, TableStore, WinningTable};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "SKAT_WORKERS";

pub fn workers_from_env(default: usize) -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or(default)
}

/// SplitMix64 finaliser of `global ^ id`.
pub fn mix_seed(global: u64, id: u64) -> u64 {
    let mut z = (global ^ id).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Tables and card play used by one seat.
#[derive(Clone, Copy)]
pub struct SeatPolicy<'a> {
    pub tables: &'a TableSet,
    pub play: CardPlay,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuctionResult {
    pub declarer: Option<u8>,
    pub bids: [u32; PLAYERS],
    pub strength: [u8; PLAYERS],
}

/// Each seat holds up to its maximum bid; the earlier seat from forehand keeps ties.
pub fn auction(deal: &DealRecord, seats: &[SeatPolicy; PLAYERS], config: &PolicyConfig) -> Result<AuctionResult> {
    let fh = deal.deal.forehand;
    let mut max = [0u32; PLAYERS];
    let mut strength = [0u8; PLAYERS];
    for p in 0..PLAYERS {
        let d = max_bid(deal.deal.hands[p], relative_position(p as u8, fh), seats[p].tables, config)?;
        max[p] = d.bid;
        strength[p] = hand_strength(d.best_prob);
    }
    let order: Vec<u8> = (0..PLAYERS as u8).map(|k| (fh + k) % PLAYERS as u8).collect();
    let best = max.iter().copied().max().unwrap_or(0);
    let top = order.iter().copied().find(|&p| max[p as usize] == best).expect("three seats");
    if best == 0 {
        return Ok(AuctionResult {
            declarer: None,
            bids: [0; PLAYERS],
            strength,
        });
    }
    let rank = |p: u8| order.iter().position(|&q| q == p).expect("seat");
    let mut bid = 18;
    for &p in &order {
        if p == top || max[p as usize] == 0 {
            continue;
        }
        let m = max[p as usize];
        let need = if rank(p) < rank(top) {
            bid_ladder().iter().copied().find(|&v| v > m).unwrap_or(m)
        } else {
            m
        };
        bid = bid.max(need);
    }
    let mut bids = max;
    bids[top as usize] = bid.min(max[top as usize]).max(18);
    Ok(AuctionResult {
        declarer: Some(top),
        bids,
        strength,
    })
}

/// Plays one deal from bidding to the last trick.
pub fn play_game(deal: &DealRecord, seats: &[SeatPolicy; PLAYERS], config: &PolicyConfig, solver: &mut Solver) -> Result<GameRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, deal.id));
    let a = auction(deal, seats, config)?;
    let Some(declarer) = a.declarer else {
        let mut rec = GameRecord::folded(deal.id, &deal.deal);
        rec.hand_strength = a.strength;
        return Ok(rec);
    };
    let d = declarer as usize;
    let hand12 = deal.deal.hands[d].union(deal.deal.skat);
    let pos = relative_position(declarer, deal.deal.forehand);
    let bid = a.bids[d];
    let opp = (0..PLAYERS).filter(|&p| p != d).map(|p| a.bids[p]).max().unwrap_or(0);
    let choice = choose_skat_put(hand12, bid, pos, opp, seats[d].tables, config)?;
    let declaration = Declaration::plain(choice.game);
    let mut hands = deal.deal.hands;
    hands[d] = hand12.minus(choice.put);
    let mut st = GameState::new(hands, choice.put, declarer, deal.deal.forehand, declaration)?;
    while !st.is_finished() {
        let seat = st.to_move() as usize;
        let card = choose_card(&st, seats[seat].play, &a.bids, seats[seat].tables, config, solver, &mut rng)?;
        st.play(card)?;
    }
    finished_record(deal, a.bids, a.strength, &st)
}

/// Record of a game played to the end from the dealt cards in `deal`.
pub fn finished_record(deal: &DealRecord, bids: [u32; PLAYERS], strength: [u8; PLAYERS], st: &GameState) -> Result<GameRecord> {
    if !st.is_finished() {
        return Err(Error::Unfinished);
    }
    let out = game_outcome(st, bids.iter().copied().max().unwrap_or(0))?;
    let mut rec = GameRecord::folded(deal.id, &deal.deal);
    rec.game = Some(st.game());
    rec.declarer = st.declarer;
    rec.bids = bids;
    rec.hand = st.declaration.hand;
    rec.schneider = out.schneider;
    rec.schneider_announced = st.declaration.schneider_announced;
    rec.schwarz = out.schwarz;
    rec.schwarz_announced = st.declaration.schwarz_announced;
    rec.ouvert = st.declaration.ouvert;
    rec.declarer_won = out.declarer_won;
    rec.folded = false;
    rec.declarer_eyes = out.eyes;
    rec.hand_strength = strength;
    rec.skat_put = st.skat;
    rec.tricks = st
        .history
        .iter()
        .map(|t| {
            let e = t.eyes() as i32;
            TrickRecord {
                cards: t.cards,
                winner: t.winner,
                eyes: if t.winner == st.declarer { e } else { -e },
            }
        })
        .collect();
    Ok(rec)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

/// Transposition table size of worker solvers.
const WORKER_TABLE_BITS: u32 = 21;

/// One record per deal, in deal order.
pub fn run_selfplay(deals: &[DealRecord], seats: &[SeatPolicy; PLAYERS], config: &PolicyConfig, workers: usize) -> Result<Vec<GameRecord>> {
    config.validate()?;
    pool(workers)?.install(|| {
        deals
            .par_iter()
            .map_init(|| Solver::with_table_bits(WORKER_TABLE_BITS), |s, d| play_game(d, seats, config, s))
            .collect()
    })
}

pub fn same_seats(tables: &TableSet, play: CardPlay) -> [SeatPolicy<'_>; PLAYERS] {
    [SeatPolicy { tables, play }; PLAYERS]
}

/// Game groups of the evaluation report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameGroup {
    Suit,
    Null,
    Grand,
    NullOuvert,
}

impl GameGroup {
    pub const ALL: [GameGroup; 4] = [GameGroup::Suit, GameGroup::Null, GameGroup::Grand, GameGroup::NullOuvert];

    pub fn of(game: GameType) -> GameGroup {
        match game {
            GameType::Suit(_) => GameGroup::Suit,
            GameType::Grand => GameGroup::Grand,
            GameType::Null | GameType::NullHand => GameGroup::Null,
            GameType::NullOuvert | GameType::NullOuvertHand => GameGroup::NullOuvert,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GameGroup::Suit => "Suit",
            GameGroup::Null => "Null23/35",
            GameGroup::Grand => "Grand",
            GameGroup::NullOuvert => "Null46/59",
        }
    }

    fn key(self) -> &'static str {
        match self {
            GameGroup::Suit => "suit",
            GameGroup::Null => "null",
            GameGroup::Grand => "grand",
            GameGroup::NullOuvert => "null_ouvert",
        }
    }
}

/// Counts of (open-card solver, actual) outcomes per game group.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalReport {
    /// `cells[group][ocs][actual]`.
    pub cells: [[[u64; 2]; 2]; 4],
    pub folded: u64,
    pub scores: [i64; PLAYERS],
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl EvalReport {
    pub fn add(&mut self, game: GameType, ocs: bool, actual: bool) {
        let g = GameGroup::ALL.iter().position(|&x| x == GameGroup::of(game)).expect("group");
        self.cells[g][ocs as usize][actual as usize] += 1;
    }

    pub fn group_total(&self, g: usize) -> u64 {
        self.cells[g].iter().flatten().sum()
    }

    pub fn played(&self) -> u64 {
        (0..4).map(|g| self.group_total(g)).sum()
    }

    fn agree(&self, g: usize) -> u64 {
        self.cells[g][0][0] + self.cells[g][1][1]
    }

    /// Share of games whose actual result matches the solver's prediction.
    pub fn accuracy(&self) -> f64 {
        ratio((0..4).map(|g| self.agree(g)).sum(), self.played())
    }

    pub fn group_accuracy(&self, g: usize) -> f64 {
        ratio(self.agree(g), self.group_total(g))
    }

    fn ocs(&self, ocs: usize, actual: usize) -> u64 {
        (0..4).map(|g| self.cells[g][ocs][actual]).sum()
    }

    /// Solver-winnable games the declarer won.
    pub fn true_positive_rate(&self) -> f64 {
        ratio(self.ocs(1, 1), self.ocs(1, 0) + self.ocs(1, 1))
    }

    /// Solver-winnable games the declarer lost.
    pub fn false_negative_rate(&self) -> f64 {
        ratio(self.ocs(1, 0), self.ocs(1, 0) + self.ocs(1, 1))
    }

    pub fn winning_rate(&self) -> f64 {
        ratio(self.ocs(0, 1) + self.ocs(1, 1), self.played())
    }

    /// Text table: OCS and actual outcome counts per group, then totals.
    pub fn to_table(&self) -> String {
        let mut s = String::from("Game OCS AI Count Total %Games Acc\n");
        let played = self.played();
        for (g, group) in GameGroup::ALL.iter().enumerate() {
            for ocs in 0..2 {
                for act in 0..2 {
                    let _ = write!(s, "{} {} {} {}", group.label(), ocs, act, self.cells[g][ocs][act]);
                    if ocs == 1 && act == 1 {
                        let _ = write!(
                            s,
                            " {} {:.1}% {:.1}%",
                            self.group_total(g),
                            100.0 * ratio(self.group_total(g), played),
                            100.0 * self.group_accuracy(g)
                        );
                    }
                    s.push('\n');
                }
            }
        }
        let _ = writeln!(
            s,
            "Total {} {:.1}% acc {:.2}%",
            played,
            if played > 0 { 100.0 } else { 0.0 },
            100.0 * self.accuracy()
        );
        let _ = writeln!(s, "Folded {} {:.2}%", self.folded, 100.0 * ratio(self.folded, played + self.folded));
        s
    }
}

/// Value the declarer scored, recomputed by replaying the record.
pub fn scored_game(rec: &GameRecord) -> Result<ScoredGame> {
    let st = rec.replay()?;
    let out = game_outcome(&st, rec.highest_bid())?;
    Ok(ScoredGame {
        declarer: rec.declarer,
        won: rec.declarer_won,
        value: out.value,
    })
}

pub fn series_scores(records: &[GameRecord]) -> Result<[i64; PLAYERS]> {
    let games: Vec<ScoredGame> = records.iter().filter(|r| r.is_played()).map(scored_game).collect::<Result<_>>()?;
    Ok(seeger_fabian_score(&games))
}

/// Solver verdicts for the played records, keyed by id.
pub fn ocs_flags(records: &[GameRecord], workers: usize) -> Result<HashMap<u64, bool>> {
    let played: Vec<&GameRecord> = records.iter().filter(|r| r.is_played()).collect();
    let flags: Vec<(u64, bool)> = pool(workers)?.install(|| {
        played
            .par_iter()
            .map_init(
                || Solver::with_table_bits(WORKER_TABLE_BITS),
                |s, r| Ok((r.id, predicted_outcome_with(s, r)?)),
            )
            .collect::<Result<_>>()
    })?;
    Ok(flags.into_iter().collect())
}

/// Builds the report from records and solver verdicts for every played record.
pub fn report_from(records: &[GameRecord], ocs: &HashMap<u64, bool>) -> Result<EvalReport> {
    let mut rep = EvalReport::default();
    for r in records {
        if !r.is_played() {
            rep.folded += 1;
            continue;
        }
        let flag = *ocs.get(&r.id).ok_or(Error::MissingContext("solver verdict"))?;
        rep.add(r.game.expect("played"), flag, r.declarer_won);
    }
    rep.scores = series_scores(records)?;
    Ok(rep)
}

pub fn evaluate(records: &[GameRecord], workers: usize) -> Result<EvalReport> {
    report_from(records, &ocs_flags(records, workers)?)
}

/// Rebuilds every question table from `records`, counting on top of `bias`.
pub fn learn(records: &[GameRecord], bias: &TableSet) -> Result<(TableSet, Vec<LearningStats>)> {
    let (input, output) = split_io(records);
    let mut fg: Vec<WinningTable> = Vec::new();
    let mut stats = Vec::new();
    for q in Question::ALL {
        let (t, st) = outer_learning(
            &input,
            &output,
            |_, o| !q.applies(o),
            |_, o| observations(q, o),
            bias.get(q).foreground(),
        )?;
        fg.push(t);
        stats.push(st);
    }
    Ok((TableSet::from_foregrounds(fg)?, stats))
}

/// Declarer games a table set was learned from.
pub fn declarer_games(t: &TableSet) -> u64 {
    t.get(Question::DeclarerSuit).foreground().total_games()
        + t.get(Question::DeclarerGrand).foreground().total_games()
        + t.get(Question::NullPerSuit).foreground().total_games() / 4
}

pub fn series_header(event: &str, records: &[GameRecord]) -> Result<SeriesHeader> {
    let mut h = SeriesHeader::new(event, ["AI1", "AI2", "AI3"]);
    h.game_count = records.len() as u64;
    let scores = series_scores(records)?;
    let mut results = [SeatResult::default(); PLAYERS];
    for (p, r) in results.iter_mut().enumerate() {
        r.score = scores[p];
    }
    for rec in records.iter().filter(|r| r.is_played()) {
        let r = &mut results[rec.declarer as usize];
        if rec.declarer_won {
            r.won += 1;
        } else {
            r.lost += 1;
        }
    }
    h.results = results;
    Ok(h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapConfig {
    pub iterations: usize,
    pub deals_per_iteration: usize,
    /// Seed of the deal stream.
    pub deal_seed: u64,
    pub policy: PolicyConfig,
    pub workers: usize,
    /// Also play the last iteration's deals with random card play.
    pub baseline: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapRun {
    pub iteration: usize,
    pub first_id: u64,
    pub deals: usize,
    /// Version of the tables the games were played with.
    pub tables_version: u32,
    pub report: EvalReport,
    /// Declarer games in the tables published after this iteration.
    pub table_games: u64,
    pub baseline: Option<EvalReport>,
}

/// Output of a bootstrap run.
#[derive(Clone, Debug)]
pub struct Bootstrap {
    pub runs: Vec<BootstrapRun>,
    pub tables: TableSet,
    pub corpora: Vec<Vec<GameRecord>>,
}

/// The outer-learning loop: play with the current tables, learn from the new
/// games on top of them, publish, evaluate.
pub fn bootstrap(cfg: &BootstrapConfig, initial: TableSet, out: Option<&Path>) -> Result<Bootstrap> {
    if cfg.iterations == 0 {
        return Err(Error::Config("at least one iteration".into()));
    }
    let store = out.map(|o| TableStore::new(o.join("tables")));
    let mut tables = initial;
    let mut version = 0u32;
    if let Some(s) = &store {
        if let Some((v, t)) = s.load_current()? {
            version = v;
            tables = t;
        } else {
            s.publish(0, &tables)?;
        }
    }
    let mut runs = Vec::new();
    let mut corpora = Vec::new();
    for it in 0..cfg.iterations {
        let first = (it * cfg.deals_per_iteration) as u64;
        let deals: Vec<DealRecord> = generate_deals_from(cfg.deal_seed, first, cfg.deals_per_iteration).collect();
        let corpus = run_selfplay(&deals, &same_seats(&tables, CardPlay::Table), &cfg.policy, cfg.workers)?;
        let (next, _) = learn(&corpus, &tables)?;
        let ocs = ocs_flags(&corpus, cfg.workers)?;
        let report = report_from(&corpus, &ocs)?;
        let baseline = if cfg.baseline && it + 1 == cfg.iterations {
            let random = run_selfplay(&deals, &same_seats(&tables, CardPlay::RandomLegal), &cfg.policy, cfg.workers)?;
            let mut flags = HashMap::new();
            let mut missing = Vec::new();
            let by_id: HashMap<u64, &GameRecord> = corpus.iter().map(|r| (r.id, r)).collect();
            for r in random.iter().filter(|r| r.is_played()) {
                let t = by_id[&r.id];
                if t.is_played() && t.game == r.game && t.declarer == r.declarer && t.skat_put == r.skat_put {
                    flags.insert(r.id, ocs[&r.id]);
                } else {
                    missing.push(r.clone());
                }
            }
            flags.extend(ocs_flags(&missing, cfg.workers)?);
            if let Some(o) = out {
                write_corpus(&o.join("corpus").join(format!("baseline_{:03}.pgn", it + 1)), "baseline", &random)?;
            }
            Some(report_from(&random, &flags)?)
        } else {
            None
        };
        if let Some(o) = out {
            write_corpus(
                &o.join("corpus").join(format!("iter_{:03}.pgn", it + 1)),
                &format!("selfplay {}", it + 1),
                &corpus,
            )?;
        }
        let played_with = version;
        version += 1;
        if let Some(s) = &store {
            s.publish(version, &next)?;
        }
        runs.push(BootstrapRun {
            iteration: it + 1,
            first_id: first,
            deals: deals.len(),
            tables_version: played_with,
            report,
            table_games: declarer_games(&next),
            baseline,
        });
        tables = next;
        corpora.push(corpus);
        if let Some(o) = out {
            emit_report(&runs, o)?;
        }
    }
    Ok(Bootstrap { runs, tables, corpora })
}

pub fn write_corpus(path: &Path, event: &str, records: &[GameRecord]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let text = series_to_string(&series_header(event, records)?, records);
    let tmp = path.with_extension("pgn.tmp");
    fs::write(&tmp, text)?;
    fs::rename(tmp, path)?;
    Ok(())
}

/// One CSV row per iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub iteration: usize,
    pub first_id: u64,
    pub deals: usize,
    pub tables_version: u32,
    pub played: u64,
    pub folded: u64,
    pub accuracy: f64,
    pub true_positive_rate: f64,
    pub false_negative_rate: f64,
    pub winning_rate: f64,
    pub suit_games: u64,
    pub suit_accuracy: f64,
    pub null_games: u64,
    pub null_accuracy: f64,
    pub grand_games: u64,
    pub grand_accuracy: f64,
    pub null_ouvert_games: u64,
    pub null_ouvert_accuracy: f64,
    pub score_seat1: i64,
    pub score_seat2: i64,
    pub score_seat3: i64,
    pub table_games: u64,
    pub baseline_accuracy: Option<f64>,
}

impl MetricsRow {
    pub fn from_run(r: &BootstrapRun) -> MetricsRow {
        let rep = &r.report;
        MetricsRow {
            iteration: r.iteration,
            first_id: r.first_id,
            deals: r.deals,
            tables_version: r.tables_version,
            played: rep.played(),
            folded: rep.folded,
            accuracy: rep.accuracy(),
            true_positive_rate: rep.true_positive_rate(),
            false_negative_rate: rep.false_negative_rate(),
            winning_rate: rep.winning_rate(),
            suit_games: rep.group_total(0),
            suit_accuracy: rep.group_accuracy(0),
            null_games: rep.group_total(1),
            null_accuracy: rep.group_accuracy(1),
            grand_games: rep.group_total(2),
            grand_accuracy: rep.group_accuracy(2),
            null_ouvert_games: rep.group_total(3),
            null_ouvert_accuracy: rep.group_accuracy(3),
            score_seat1: rep.scores[0],
            score_seat2: rep.scores[1],
            score_seat3: rep.scores[2],
            table_games: r.table_games,
            baseline_accuracy: r.baseline.as_ref().map(|b| b.accuracy()),
        }
    }
}

pub fn metrics_csv(runs: &[BootstrapRun]) -> Result<String> {
    if runs.is_empty() {
        return Err(Error::Config("no runs to report".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in runs {
        w.serialize(MetricsRow::from_run(r)).map_err(|e| Error::Format(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn parse_metrics_csv(text: &str) -> Result<Vec<MetricsRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(|e| Error::Format(e.to_string()))).collect()
}

/// Two-column `iteration value` series per metric, for gnuplot.
pub fn plot_series(runs: &[BootstrapRun]) -> Vec<(String, String)> {
    let rows: Vec<MetricsRow> = runs.iter().map(MetricsRow::from_run).collect();
    type Metric = Box<dyn Fn(&MetricsRow) -> f64>;
    let mut metrics: Vec<(&str, Metric)> = vec![
        ("accuracy", Box::new(|r| r.accuracy)),
        ("winning_rate", Box::new(|r| r.winning_rate)),
        ("true_positive_rate", Box::new(|r| r.true_positive_rate)),
        ("false_negative_rate", Box::new(|r| r.false_negative_rate)),
    ];
    for g in GameGroup::ALL {
        let i = GameGroup::ALL.iter().position(|&x| x == g).expect("group");
        let f: Box<dyn Fn(&MetricsRow) -> f64> = match i {
            0 => Box::new(|r| r.suit_accuracy),
            1 => Box::new(|r| r.null_accuracy),
            2 => Box::new(|r| r.grand_accuracy),
            _ => Box::new(|r| r.null_ouvert_accuracy),
        };
        metrics.push((g.key(), f));
    }
    metrics
        .into_iter()
        .map(|(name, f)| {
            let mut s = format!("# iteration {name}\n");
            for r in &rows {
                let _ = writeln!(s, "{} {}", r.iteration, f(r));
            }
            let file = if name.ends_with("rate") || name == "accuracy" {
                format!("{name}.dat")
            } else {
                format!("{name}_accuracy.dat")
            };
            (file, s)
        })
        .collect()
}

/// Writes `report.csv` and `plots/*.dat` under `dir`.
pub fn emit_report(runs: &[BootstrapRun], dir: &Path) -> Result<PathBuf> {
    let csv = metrics_csv(runs)?;
    fs::create_dir_all(dir.join("plots"))?;
    let path = dir.join("report.csv");
    fs::write(&path, csv)?;
    for (name, body) in plot_series(runs) {
        fs::write(dir.join("plots").join(name), body)?;
    }
    Ok(path)
}

/// Per-seat results of a head-to-head series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VersusReport {
    /// True for seats playing with the first table set.
    pub seating: [bool; PLAYERS],
    pub results: [SeatResult; PLAYERS],
}

/// Plays the same deals with the first tables at the seats marked in `seating`
/// and the second tables elsewhere.
pub fn versus(
    deals: &[DealRecord],
    with: &TableSet,
    without: &TableSet,
    seating: [bool; PLAYERS],
    config: &PolicyConfig,
    workers: usize,
) -> Result<VersusReport> {
    let seats: [SeatPolicy; PLAYERS] = std::array::from_fn(|p| SeatPolicy {
        tables: if seating[p] { with } else { without },
        play: CardPlay::Table,
    });
    let records = run_selfplay(deals, &seats, config, workers)?;
    let h = series_header("versus", &records)?;
    Ok(VersusReport {
        seating,
        results: h.results,
    })
}
