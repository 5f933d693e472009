//! Portable game notation for Skat series.
//!
//! A series file starts with bracketed header lines, followed by a blank line
//! and one game per line. A game line is a single-space separated list of
//! integers:
//!
//! | pos | content |
//! |-----|---------|
//! | 1 | id |
//! | 2 | game code (-1 folded, 0..3 suit, 4 grand, 5..8 null variants) |
//! | 3 | declarer position |
//! | 4..6 | final bid of seats 0..2 |
//! | 7..12 | hand, schneider, schneider announced, schwarz, schwarz announced, ouvert |
//! | 13 | declarer won |
//! | 14 | folded |
//! | 15 | contract level (1..11 or -1..-11) |
//! | 16 | declarer eyes |
//! | 17..19 | hand strength 0..10 of seats 0..2 |
//! | 20..49 | dealt hands of seats 0..2 |
//! | 50..51 | skat taken |
//! | 52..53 | skat put |
//! | 54.. | per trick: 3 cards, winner position, signed trick eyes |
//!
//! Trick eyes are positive for tricks won by the declarer and negative
//! otherwise. Card codes are compact card indices. The forehand of game `id`
//! is seat `id mod 3`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::cards::{forehand_for_id, Card, CardSet, Deal, PLAYERS};
use crate::error::{Error, Result};
use crate::rules::{Declaration, GameState, GameType};

pub const FIXED_FIELDS: usize = 19;
pub const CARD_FIELDS: usize = 34;
pub const TRICK_FIELDS: usize = 5;
pub const MAX_TRICKS: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seat {
    pub name: String,
    pub id: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SeatResult {
    pub score: i64,
    pub won: u32,
    pub lost: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesHeader {
    pub event: String,
    pub date: String,
    pub duration: String,
    pub seats: [Seat; PLAYERS],
    pub game_count: u64,
    pub results: [SeatResult; PLAYERS],
}

impl SeriesHeader {
    pub fn new(event: &str, names: [&str; PLAYERS]) -> SeriesHeader {
        SeriesHeader {
            event: event.to_string(),
            date: "01.01.2026, 00:00".to_string(),
            duration: "0m".to_string(),
            seats: std::array::from_fn(|i| Seat {
                name: names[i].to_string(),
                id: i as u64,
            }),
            game_count: 0,
            results: [SeatResult::default(); PLAYERS],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrickRecord {
    pub cards: [Card; 3],
    pub winner: u8,
    pub eyes: i32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameRecord {
    pub id: u64,
    pub game: Option<GameType>,
    pub declarer: u8,
    pub bids: [u32; PLAYERS],
    pub hand: bool,
    pub schneider: bool,
    pub schneider_announced: bool,
    pub schwarz: bool,
    pub schwarz_announced: bool,
    pub ouvert: bool,
    pub declarer_won: bool,
    pub folded: bool,
    pub contract_level: i8,
    pub declarer_eyes: u32,
    pub hand_strength: [u8; PLAYERS],
    pub hands: [CardSet; PLAYERS],
    pub skat_taken: CardSet,
    pub skat_put: CardSet,
    pub tricks: Vec<TrickRecord>,
}

impl GameRecord {
    /// A folded game for `deal`: no declarer, no tricks.
    pub fn folded(id: u64, deal: &Deal) -> GameRecord {
        GameRecord {
            id,
            game: None,
            declarer: 0,
            bids: [0; PLAYERS],
            hand: false,
            schneider: false,
            schneider_announced: false,
            schwarz: false,
            schwarz_announced: false,
            ouvert: false,
            declarer_won: false,
            folded: true,
            contract_level: -1,
            declarer_eyes: 0,
            hand_strength: [0; PLAYERS],
            hands: deal.hands,
            skat_taken: deal.skat,
            skat_put: deal.skat,
            tricks: Vec::new(),
        }
    }

    pub fn forehand(&self) -> u8 {
        forehand_for_id(self.id)
    }

    pub fn deal(&self) -> Deal {
        Deal {
            hands: self.hands,
            skat: self.skat_taken,
            forehand: self.forehand(),
        }
    }

    pub fn is_played(&self) -> bool {
        !self.folded && self.game.is_some()
    }

    pub fn declaration(&self) -> Option<Declaration> {
        self.game.map(|game| Declaration {
            game,
            hand: self.hand,
            schneider_announced: self.schneider_announced,
            schwarz_announced: self.schwarz_announced,
            ouvert: self.ouvert,
        })
    }

    /// Highest bid of the table, the contract the declarer must cover.
    pub fn highest_bid(&self) -> u32 {
        self.bids.iter().copied().max().unwrap_or(0)
    }

    /// Declarer's playing hand after the skat exchange.
    pub fn declarer_hand(&self) -> CardSet {
        let d = self.declarer as usize;
        if self.hand {
            self.hands[d]
        } else {
            self.hands[d].union(self.skat_taken).minus(self.skat_put)
        }
    }

    /// Position at the first card of trick 1.
    pub fn initial_state(&self) -> Result<GameState> {
        let decl = self.declaration().ok_or(Error::Folded)?;
        if self.folded {
            return Err(Error::Folded);
        }
        let mut hands = self.hands;
        hands[self.declarer as usize] = self.declarer_hand();
        GameState::new(hands, self.skat_put, self.declarer, self.forehand(), decl)
    }

    /// Replays the recorded tricks, checking every card for legality.
    pub fn replay(&self) -> Result<GameState> {
        let mut st = self.initial_state()?;
        for (i, t) in self.tricks.iter().enumerate() {
            let mut done = None;
            for &c in &t.cards {
                done = st.play(c)?;
            }
            let done = done.ok_or(Error::IncompleteTrick)?;
            if done.winner != t.winner {
                return Err(Error::Format(format!(
                    "trick {} winner {} recorded as {}",
                    i + 1,
                    done.winner,
                    t.winner
                )));
            }
        }
        Ok(st)
    }

    pub fn field_count(&self) -> usize {
        FIXED_FIELDS + 3 * 10 + 4 + TRICK_FIELDS * self.tricks.len()
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Format(m));
        if self.declarer as usize >= PLAYERS {
            return err(format!("declarer position {}", self.declarer));
        }
        if self.game.is_none() && !self.folded {
            return err("game code -1 requires folded=1".into());
        }
        if self.folded && !self.tricks.is_empty() {
            return err("folded game with tricks".into());
        }
        if !(1..=11).contains(&self.contract_level.unsigned_abs()) {
            return err(format!("contract level {}", self.contract_level));
        }
        if self.hand_strength.iter().any(|&s| s > 10) {
            return err("hand strength above 10".into());
        }
        if self.declarer_eyes > 120 {
            return err(format!("declarer eyes {}", self.declarer_eyes));
        }
        let mut seen = CardSet::EMPTY;
        for (i, g) in self.hands.iter().enumerate() {
            if g.len() != 10 {
                return err(format!("hand {i} holds {} cards", g.len()));
            }
        }
        for g in self.hands.iter().chain([&self.skat_taken]) {
            if !seen.intersect(*g).is_empty() {
                return err("duplicate card code".into());
            }
            seen = seen.union(*g);
        }
        if self.skat_taken.len() != 2 || self.skat_put.len() != 2 {
            return err("skat must hold two distinct cards".into());
        }
        let pool = self.hands[self.declarer as usize].union(self.skat_taken);
        if !self.folded && self.skat_put.minus(pool) != CardSet::EMPTY {
            return err("skat put not held by declarer".into());
        }
        if self.tricks.len() > MAX_TRICKS {
            return err(format!("{} tricks", self.tricks.len()));
        }
        let mut played = CardSet::EMPTY;
        for (i, t) in self.tricks.iter().enumerate() {
            let set = CardSet::from_cards(t.cards);
            if set.len() != 3 || !played.intersect(set).is_empty() || !set.intersect(self.skat_put).is_empty() {
                return err(format!("trick {} repeats a card", i + 1));
            }
            played = played.union(set);
            if t.winner as usize >= PLAYERS {
                return err(format!("trick {} winner {}", i + 1, t.winner));
            }
            let eyes = set.eyes() as i32;
            if t.eyes.abs() != eyes {
                return err(format!("trick {} eyes {} but cards hold {}", i + 1, t.eyes, eyes));
            }
            let by_declarer = t.winner == self.declarer;
            if (t.eyes > 0 && !by_declarer) || (t.eyes < 0 && by_declarer) {
                return err(format!("trick {} eyes sign disagrees with winner", i + 1));
            }
        }
        Ok(())
    }

    pub fn to_line(&self) -> String {
        let b = |x: bool| u8::from(x);
        let mut s = String::with_capacity(256);
        let _ = write!(
            s,
            "{} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {}",
            self.id,
            self.game.map_or(-1, |g| g.code()),
            self.declarer,
            self.bids[0],
            self.bids[1],
            self.bids[2],
            b(self.hand),
            b(self.schneider),
            b(self.schneider_announced),
            b(self.schwarz),
            b(self.schwarz_announced),
            b(self.ouvert),
            b(self.declarer_won),
            b(self.folded),
            self.contract_level,
            self.declarer_eyes,
            self.hand_strength[0],
            self.hand_strength[1],
            self.hand_strength[2],
        );
        for group in self.hands.iter().chain([&self.skat_taken, &self.skat_put]) {
            for c in group.iter() {
                let _ = write!(s, " {}", c.index());
            }
        }
        for t in &self.tricks {
            let _ = write!(
                s,
                " {} {} {} {} {}",
                t.cards[0].index(),
                t.cards[1].index(),
                t.cards[2].index(),
                t.winner,
                t.eyes
            );
        }
        s
    }

    pub fn parse_line(line: &str) -> Result<GameRecord> {
        let fields: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|e| Error::Format(format!("field '{t}': {e}"))))
            .collect::<Result<_>>()?;
        let base = FIXED_FIELDS + CARD_FIELDS;
        if fields.len() < base || !(fields.len() - base).is_multiple_of(TRICK_FIELDS) {
            return Err(Error::Format(format!(
                "{} fields; expected {} plus 5 per trick",
                fields.len(),
                base
            )));
        }
        let flag = |i: usize| -> Result<bool> {
            match fields[i] {
                0 => Ok(false),
                1 => Ok(true),
                v => Err(Error::Format(format!("position {} must be 0/1, got {v}", i + 1))),
            }
        };
        let small = |i: usize, max: i64| -> Result<i64> {
            let v = fields[i];
            if v < 0 || v > max {
                Err(Error::Format(format!("position {} value {v} out of range", i + 1)))
            } else {
                Ok(v)
            }
        };
        let card = |i: usize| -> Result<Card> {
            let v = fields[i];
            if !(0..32).contains(&v) {
                return Err(Error::InvalidCard(v));
            }
            Card::from_index(v as u8)
        };
        let group = |start: usize, n: usize| -> Result<CardSet> {
            let mut set = CardSet::EMPTY;
            for i in start..start + n {
                let c = card(i)?;
                if set.contains(c) {
                    return Err(Error::Format(format!("duplicate card code {}", c.index())));
                }
                set.insert(c);
            }
            Ok(set)
        };
        if fields[0] < 0 {
            return Err(Error::Format("negative id".into()));
        }
        let contract = fields[14];
        if !(-11..=11).contains(&contract) {
            return Err(Error::Format(format!("contract level {contract}")));
        }
        let mut tricks = Vec::new();
        let mut i = base;
        while i < fields.len() {
            let eyes = fields[i + 4];
            if eyes.abs() > 120 {
                return Err(Error::Format(format!("trick eyes {eyes}")));
            }
            tricks.push(TrickRecord {
                cards: [card(i)?, card(i + 1)?, card(i + 2)?],
                winner: small(i + 3, 2)? as u8,
                eyes: eyes as i32,
            });
            i += TRICK_FIELDS;
        }
        let rec = GameRecord {
            id: fields[0] as u64,
            game: GameType::from_code(fields[1])?,
            declarer: small(2, 2)? as u8,
            bids: [small(3, 999)? as u32, small(4, 999)? as u32, small(5, 999)? as u32],
            hand: flag(6)?,
            schneider: flag(7)?,
            schneider_announced: flag(8)?,
            schwarz: flag(9)?,
            schwarz_announced: flag(10)?,
            ouvert: flag(11)?,
            declarer_won: flag(12)?,
            folded: flag(13)?,
            contract_level: contract as i8,
            declarer_eyes: small(15, 120)? as u32,
            hand_strength: [small(16, 10)? as u8, small(17, 10)? as u8, small(18, 10)? as u8],
            hands: [group(19, 10)?, group(29, 10)?, group(39, 10)?],
            skat_taken: group(49, 2)?,
            skat_put: group(51, 2)?,
            tricks,
        };
        rec.validate()?;
        Ok(rec)
    }
}

fn header_groups(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = line;
    while let Some(start) = rest.find('[') {
        let Some(len) = rest[start..].find(']') else { break };
        out.push(&rest[start + 1..start + len]);
        rest = &rest[start + len + 1..];
    }
    out
}

fn parse_seat(body: &str) -> Option<(usize, Seat)> {
    let rest = body.strip_prefix("Seat")?;
    let (num, rest) = rest.split_once(": ")?;
    let (name, id) = rest.rsplit_once(" (ID: ")?;
    let id = id.strip_suffix(')')?.parse().ok()?;
    let idx: usize = num.parse().ok()?;
    (1..=PLAYERS).contains(&idx).then(|| {
        (
            idx - 1,
            Seat {
                name: name.to_string(),
                id,
            },
        )
    })
}

fn parse_results(body: &str) -> Option<[SeatResult; PLAYERS]> {
    let rest = body.strip_prefix("Result: ")?;
    let mut out = [SeatResult::default(); PLAYERS];
    let mut seen = [false; PLAYERS];
    let toks: Vec<&str> = rest.split_whitespace().collect();
    if toks.len() != 3 * PLAYERS {
        return None;
    }
    for chunk in toks.chunks(3) {
        let idx: usize = chunk[0].strip_prefix("Seat")?.strip_suffix(':')?.parse().ok()?;
        if !(1..=PLAYERS).contains(&idx) {
            return None;
        }
        let score = chunk[1].parse().ok()?;
        let (w, l) = chunk[2].strip_prefix('(')?.strip_suffix(')')?.split_once(':')?;
        out[idx - 1] = SeatResult {
            score,
            won: w.parse().ok()?,
            lost: l.parse().ok()?,
        };
        seen[idx - 1] = true;
    }
    seen.iter().all(|&s| s).then_some(out)
}

fn parse_header(lines: &[(usize, &str)]) -> Result<SeriesHeader> {
    let mut event = None;
    let mut date = None;
    let mut seats: [Option<Seat>; PLAYERS] = Default::default();
    let mut count = None;
    let mut results = None;
    for &(no, line) in lines {
        for g in header_groups(line) {
            let bad = |what: &str| Error::Parse {
                line: no,
                msg: format!("malformed {what} header '{g}'"),
            };
            if let Some(v) = g.strip_prefix("Event: ") {
                event = Some(v.to_string());
            } else if let Some(v) = g.strip_prefix("Date: ") {
                let (d, dur) = v.split_once(", Duration: ").ok_or_else(|| bad("date"))?;
                date = Some((d.to_string(), dur.to_string()));
            } else if g.starts_with("Seat") {
                let (i, s) = parse_seat(g).ok_or_else(|| bad("seat"))?;
                seats[i] = Some(s);
            } else if let Some(v) = g.strip_prefix("Number of games: ") {
                count = Some(v.trim().parse::<u64>().map_err(|_| bad("game count"))?);
            } else if g.starts_with("Result: ") {
                results = Some(parse_results(g).ok_or_else(|| bad("result"))?);
            } else {
                return Err(bad("unknown"));
            }
        }
    }
    let first = lines.first().map_or(1, |l| l.0);
    let missing = |what: &str| Error::Parse {
        line: first,
        msg: format!("header lacks {what}"),
    };
    let (date, duration) = date.ok_or_else(|| missing("Date"))?;
    let [s0, s1, s2] = seats;
    Ok(SeriesHeader {
        event: event.ok_or_else(|| missing("Event"))?,
        date,
        duration,
        seats: [
            s0.ok_or_else(|| missing("Seat1"))?,
            s1.ok_or_else(|| missing("Seat2"))?,
            s2.ok_or_else(|| missing("Seat3"))?,
        ],
        game_count: count.ok_or_else(|| missing("Number of games"))?,
        results: results.ok_or_else(|| missing("Result"))?,
    })
}

pub fn parse_series_str(text: &str) -> Result<(SeriesHeader, Vec<GameRecord>)> {
    let mut header_lines = Vec::new();
    let mut records = Vec::new();
    let mut in_header = true;
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if !in_header {
                return Err(Error::Parse {
                    line: no,
                    msg: "header line after games".into(),
                });
            }
            header_lines.push((no, line));
            continue;
        }
        in_header = false;
        let rec = GameRecord::parse_line(line).map_err(|e| Error::Parse {
            line: no,
            msg: e.to_string(),
        })?;
        records.push(rec);
    }
    if header_lines.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "missing series header".into(),
        });
    }
    Ok((parse_header(&header_lines)?, records))
}

pub fn parse_series<R: BufRead>(mut r: R) -> Result<(SeriesHeader, Vec<GameRecord>)> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    parse_series_str(&text)
}

pub fn series_to_string(header: &SeriesHeader, records: &[GameRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "[Event: {}] [Date: {}, Duration: {}]",
        header.event, header.date, header.duration
    );
    let seats: Vec<String> = header
        .seats
        .iter()
        .enumerate()
        .map(|(i, st)| format!("[Seat{}: {} (ID: {})]", i + 1, st.name, st.id))
        .collect();
    let _ = writeln!(s, "{}", seats.join(" "));
    let _ = writeln!(s, "[Number of games: {}]", header.game_count);
    let res: Vec<String> = header
        .results
        .iter()
        .enumerate()
        .map(|(i, r)| format!("Seat{}: {} ({}:{})", i + 1, r.score, r.won, r.lost))
        .collect();
    let _ = writeln!(s, "[Result: {}]", res.join(" "));
    s.push('\n');
    for r in records {
        s.push_str(&r.to_line());
        s.push('\n');
    }
    s
}

pub fn write_series<W: Write>(mut w: W, header: &SeriesHeader, records: &[GameRecord]) -> Result<()> {
    w.write_all(series_to_string(header, records).as_bytes())?;
    Ok(())
}

/// Splits records into the deal file (every record) and the played-games file
/// (non-folded records only), both ordered by id.
pub fn split_io(records: &[GameRecord]) -> (Vec<GameRecord>, Vec<GameRecord>) {
    let mut input = records.to_vec();
    input.sort_by_key(|r| r.id);
    let output = input.iter().filter(|r| !r.folded).cloned().collect();
    (input, output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::generate_deals;

    pub(crate) const SAMPLE_HEADER: &str = "[Event: Training] [Date: 12.01.2025, 13:19, Duration: 24m] \n\
[Seat1: Human (ID: 23)] [Seat2: AI1 (ID: 68)] [Seat3: AI2 (ID: 67)] \n\
[Number of games: 36] \n\
[Result: Seat1: 581 (6:3) Seat2: 1276 (9:0) Seat3: 1136 (13:3)] \n";

    fn sample_folded(id: u64) -> GameRecord {
        let deal = generate_deals(5, 1).next().unwrap().deal;
        GameRecord::folded(id, &deal)
    }

    #[test]
    fn header_parses() {
        let (h, recs) = parse_series_str(&format!("{SAMPLE_HEADER}\n")).unwrap();
        assert!(recs.is_empty());
        assert_eq!(h.event, "Training");
        assert_eq!(h.date, "12.01.2025, 13:19");
        assert_eq!(h.duration, "24m");
        assert_eq!(
            h.seats[1],
            Seat {
                name: "AI1".into(),
                id: 68
            }
        );
        assert_eq!(h.game_count, 36);
        assert_eq!(
            h.results[2],
            SeatResult {
                score: 1136,
                won: 13,
                lost: 3
            }
        );
    }

    #[test]
    fn empty_series() {
        let mut h = SeriesHeader::new("Empty", ["a", "b", "c"]);
        h.game_count = 0;
        let text = series_to_string(&h, &[]);
        assert!(text.ends_with("]\n\n"));
        let (back, recs) = parse_series_str(&text).unwrap();
        assert_eq!(back, h);
        assert!(recs.is_empty());
    }

    #[test]
    fn folded_line() {
        let r = sample_folded(4);
        let line = r.to_line();
        let fields: Vec<&str> = line.split(' ').collect();
        assert_eq!(fields.len(), 53);
        assert_eq!(fields[1], "-1");
        assert_eq!(fields[13], "1");
        assert_eq!(GameRecord::parse_line(&line).unwrap(), r);
    }

    #[test]
    fn duplicate_card_names_line() {
        let r = sample_folded(0);
        let mut fields: Vec<String> = r.to_line().split(' ').map(String::from).collect();
        fields[20] = fields[19].clone();
        let text = format!("{SAMPLE_HEADER}\n{}\n", fields.join(" "));
        match parse_series_str(&text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 6);
                assert!(msg.contains("duplicate"), "{msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_field_count() {
        let r = sample_folded(0);
        let line = format!("{} 1 2", r.to_line());
        assert!(GameRecord::parse_line(&line).is_err());
    }

    #[test]
    fn split_examples() {
        let mut a = sample_folded(0);
        a.folded = false;
        a.game = Some(GameType::Grand);
        a.tricks.clear();
        let b = sample_folded(1);
        let mut c = a.clone();
        c.id = 2;
        let (input, output) = split_io(&[c.clone(), b.clone(), a.clone()]);
        assert_eq!(input.iter().map(|r| r.id).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(output.iter().map(|r| r.id).collect::<Vec<_>>(), vec![0, 2]);
        let (_, none) = split_io(&[b]);
        assert!(none.is_empty());
        let (i2, o2) = split_io(&[a, c]);
        assert_eq!(i2, o2);
    }
}
