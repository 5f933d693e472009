//! Table-driven decisions for every stage of a game.
//!
//! Bidding, game selection and discarding look up declarer tables; the first
//! lead of an opponent uses the opening tables; all other cards are chosen by
//! perfect-information Monte-Carlo sampling over the open-card solver.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cards::{Card, CardSet, Rank, Suit, PLAYERS, TOTAL_EYES};
use crate::error::{Error, Result};
use crate::features::{
    answer_under_ace, grand_declarer_features, null_features, opening_features, relative_position, skat_class, suit_declarer_features,
    suit_holding, OpeningContext, Question, UnderAce,
};
use crate::rules::{best_position, card_class, card_power, game_value, matadors, Announcements, GameState, GameType, TRUMP};
use crate::solver::Solver;
use crate::tables::{LayeredTable, Source, TableSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    MaxProb,
    ExpectedScore,
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Objective> {
        match s {
            "max_prob" => Ok(Objective::MaxProb),
            "expected_score" => Ok(Objective::ExpectedScore),
            _ => Err(Error::Config(format!("unknown objective '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyConfig {
    /// Minimum winning probability for a game to be bid.
    pub theta: f64,
    /// Worlds sampled per card decision.
    pub worlds: usize,
    /// Cards per hand at or below which all consistent worlds are enumerated.
    pub endgame_trigger: usize,
    /// Most worlds enumerated in the endgame; beyond it that many are sampled.
    pub endgame_worlds: usize,
    pub objective: Objective,
    /// Also rank moves by the eyes they reach, not only by wins.
    pub eyes_tiebreak: bool,
    pub seed: u64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            theta: 0.6,
            worlds: 16,
            endgame_trigger: 6,
            endgame_worlds: 64,
            objective: Objective::MaxProb,
            eyes_tiebreak: true,
            seed: 0,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::Config(format!("theta {} outside (0,1)", self.theta)));
        }
        if self.worlds == 0 || self.endgame_worlds == 0 {
            return Err(Error::Config("world counts must be positive".into()));
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |e: &dyn std::fmt::Display| Error::Config(format!("{key}={value}: {e}"));
        match key {
            "theta" => self.theta = value.parse().map_err(|e| bad(&e))?,
            "worlds" => self.worlds = value.parse().map_err(|e| bad(&e))?,
            "endgame_trigger" => self.endgame_trigger = value.parse().map_err(|e| bad(&e))?,
            "endgame_worlds" => self.endgame_worlds = value.parse().map_err(|e| bad(&e))?,
            "objective" => self.objective = value.parse()?,
            "eyes_tiebreak" => self.eyes_tiebreak = value.parse().map_err(|e| bad(&e))?,
            "seed" => self.seed = value.parse().map_err(|e| bad(&e))?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines; `#` starts a comment. Unknown keys are errors.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: no + 1,
                msg: format!("expected key=value, got '{line}'"),
            })?;
            self.set(k.trim(), v.trim())?;
        }
        self.validate()
    }

    pub fn parse(text: &str) -> Result<PolicyConfig> {
        let mut c = PolicyConfig::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        let obj = match self.objective {
            Objective::MaxProb => "max_prob",
            Objective::ExpectedScore => "expected_score",
        };
        format!(
            "theta={}\nworlds={}\nendgame_trigger={}\nendgame_worlds={}\nobjective={}\neyes_tiebreak={}\nseed={}\n",
            self.theta, self.worlds, self.endgame_trigger, self.endgame_worlds, obj, self.eyes_tiebreak, self.seed
        )
    }
}

/// Games considered when bidding and declaring.
pub const CANDIDATE_GAMES: [GameType; 7] = [
    GameType::Suit(Suit::Clubs),
    GameType::Suit(Suit::Spades),
    GameType::Suit(Suit::Hearts),
    GameType::Suit(Suit::Diamonds),
    GameType::Grand,
    GameType::Null,
    GameType::NullOuvert,
];

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Rule-of-thumb winning chance used while a table has no data at all.
pub fn heuristic_prob(cards: CardSet, game: GameType) -> f64 {
    let jacks = cards.intersect(CardSet::rank(Rank::Jack)).len() as f64;
    match game {
        GameType::Suit(t) => {
            let trumps = cards.iter().filter(|&c| card_class(c, game) == TRUMP).count() as f64;
            let others = Suit::ALL.into_iter().filter(|&s| s != t);
            let mut side = 0.0;
            for s in others {
                let plain = cards.intersect(CardSet::suit(s)).minus(CardSet::rank(Rank::Jack));
                if plain.is_empty() {
                    side += 0.5;
                } else if plain.contains(Card::new(s, Rank::Ace)) {
                    side += if plain.contains(Card::new(s, Rank::Ten)) { 1.5 } else { 1.0 };
                }
            }
            logistic(1.3 * (trumps + 0.5 * jacks + side - 7.0))
        }
        GameType::Grand => {
            let aces = cards.intersect(CardSet::rank(Rank::Ace)).len() as f64;
            let tens = cards.intersect(CardSet::rank(Rank::Ten)).len() as f64;
            let top = cards.contains(Card::new(Suit::Clubs, Rank::Jack)) as u8 as f64;
            logistic(1.3 * (2.0 * jacks + top + aces + 0.5 * tens - 8.0))
        }
        _ => {
            let mut p = 1.0;
            for s in Suit::ALL {
                let h = suit_holding(cards, s);
                let mut low = 0;
                for r in 0..8 {
                    if h & (1 << r) != 0 {
                        if r > 2 * low + 1 {
                            p *= 0.55;
                        }
                        low += 1;
                    }
                }
            }
            if game.null_variant().is_some_and(|v| v >= 2) {
                p * p
            } else {
                p
            }
        }
    }
}

/// Declarer situation for a table lookup.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeclarerContext {
    pub opposing_bid: u32,
    /// Seat counted from forehand.
    pub position: u8,
    pub hand: bool,
}

/// Winning probability of declaring `game` with playing hand `cards`, having laid away `put`.
pub fn declarer_prob(cards: CardSet, put: CardSet, game: GameType, ctx: DeclarerContext, tables: &TableSet) -> Result<f64> {
    let skat_eyes = (!ctx.hand).then(|| put.eyes());
    let fallback = |l: crate::tables::Lookup| {
        if l.source == Source::Prior {
            heuristic_prob(cards, game)
        } else {
            l.prob
        }
    };
    match game {
        GameType::Suit(s) => {
            let v = suit_declarer_features(cards, s, ctx.opposing_bid, skat_eyes);
            Ok(fallback(tables.get(Question::DeclarerSuit).lookup(&v)?))
        }
        GameType::Grand => {
            let v = grand_declarer_features(cards, ctx.opposing_bid, ctx.position, skat_eyes);
            Ok(fallback(tables.get(Question::DeclarerGrand).lookup(&v)?))
        }
        _ => {
            let variant = game.null_variant().expect("null game");
            let discarded = if ctx.hand { CardSet::EMPTY } else { put };
            let t: &LayeredTable = tables.get(Question::NullPerSuit);
            let mut p = 1.0;
            let mut prior = true;
            for v in null_features(cards, variant, ctx.position == 0, discarded) {
                let l = t.lookup(&v)?;
                prior &= l.source == Source::Prior;
                p *= l.prob;
            }
            Ok(if prior { heuristic_prob(cards, game) } else { p })
        }
    }
}

/// Value of `game` declared without announcements by a declarer holding `cards` (skat included).
pub fn declared_value(cards: CardSet, game: GameType) -> u32 {
    game_value(game, matadors(cards, game), Announcements::default())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BidDecision {
    /// Highest bid the seat will hold, 0 to pass.
    pub bid: u32,
    pub game: Option<GameType>,
    /// Best probability over all candidate games.
    pub best_prob: f64,
}

/// Highest value among games whose estimated winning probability reaches `theta`.
///
/// The skat is unknown, so the lookup uses the expected eyes of two unseen cards.
pub fn max_bid(hand: CardSet, position: u8, tables: &TableSet, config: &PolicyConfig) -> Result<BidDecision> {
    let unseen = (TOTAL_EYES - hand.eyes()) as f64 * 2.0 / 22.0;
    let skat = skat_class(unseen.round() as u32);
    let mut out = BidDecision {
        bid: 0,
        game: None,
        best_prob: 0.0,
    };
    for game in CANDIDATE_GAMES {
        let ctx = DeclarerContext {
            opposing_bid: 0,
            position,
            hand: false,
        };
        let p = if game.is_null() {
            declarer_prob(hand, CardSet::EMPTY, game, ctx, tables)?
        } else {
            expected_skat_prob(hand, game, skat, tables, ctx)?
        };
        out.best_prob = out.best_prob.max(p);
        if p >= config.theta {
            let v = declared_value(hand, game);
            if v > out.bid {
                out.bid = v;
                out.game = Some(game);
            }
        }
    }
    Ok(out)
}

fn expected_skat_prob(hand: CardSet, game: GameType, skat: u64, tables: &TableSet, ctx: DeclarerContext) -> Result<f64> {
    let (q, mut v) = match game {
        GameType::Suit(s) => (Question::DeclarerSuit, suit_declarer_features(hand, s, 0, None)),
        _ => (Question::DeclarerGrand, grand_declarer_features(hand, 0, ctx.position, None)),
    };
    let idx = q
        .schema()
        .fields()
        .iter()
        .position(|f| f.name == "skatvalue")
        .expect("skatvalue field");
    v.0[idx] = skat;
    let l = tables.get(q).lookup(&v)?;
    Ok(if l.source == Source::Prior {
        heuristic_prob(hand, game)
    } else {
        l.prob
    })
}

/// Hand strength 0..10: the best winning probability scaled and rounded.
pub fn hand_strength(best_prob: f64) -> u8 {
    (best_prob.clamp(0.0, 1.0) * 10.0).round() as u8
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkatChoice {
    pub put: CardSet,
    pub game: GameType,
    pub prob: f64,
    pub score: f64,
    /// Discard pairs looked up for each evaluated game.
    pub pairs_per_game: usize,
    pub games_evaluated: usize,
}

pub fn objective_score(objective: Objective, prob: f64, value: u32) -> f64 {
    match objective {
        Objective::MaxProb => prob,
        Objective::ExpectedScore => {
            let v = value as f64;
            prob * (v + 50.0) - (1.0 - prob) * (2.0 * v + 50.0)
        }
    }
}

/// Best discard and game for a declarer holding twelve cards.
///
/// Every pair of the twelve cards is tried for every candidate game covering
/// the bid (all candidates when none does). Ties keep the first pair in card
/// index order and the first game in code order.
pub fn choose_skat_put(
    hand12: CardSet,
    bid: u32,
    position: u8,
    opposing_bid: u32,
    tables: &TableSet,
    config: &PolicyConfig,
) -> Result<SkatChoice> {
    if hand12.len() != 12 {
        return Err(Error::InvalidDeal(format!("declarer holds {} cards, expected 12", hand12.len())));
    }
    let covering: Vec<GameType> = CANDIDATE_GAMES.into_iter().filter(|&g| declared_value(hand12, g) >= bid).collect();
    let games = if covering.is_empty() { CANDIDATE_GAMES.to_vec() } else { covering };
    let cards = hand12.to_vec();
    let ctx = DeclarerContext {
        opposing_bid,
        position,
        hand: false,
    };
    let mut best: Option<SkatChoice> = None;
    let mut pairs = 0;
    for &game in &games {
        let value = declared_value(hand12, game);
        pairs = 0;
        for i in 0..cards.len() {
            for j in i + 1..cards.len() {
                pairs += 1;
                let put = CardSet::from_cards([cards[i], cards[j]]);
                let prob = declarer_prob(hand12.minus(put), put, game, ctx, tables)?;
                let score = objective_score(config.objective, prob, value);
                if best.is_none_or(|b| score > b.score) {
                    best = Some(SkatChoice {
                        put,
                        game,
                        prob,
                        score,
                        pairs_per_game: 0,
                        games_evaluated: 0,
                    });
                }
            }
        }
    }
    let mut b = best.expect("twelve cards give pairs");
    b.pairs_per_game = pairs;
    b.games_evaluated = games.len();
    Ok(b)
}

/// First lead of an opponent: suit by length and seating, high or low card by the opening tables.
pub fn choose_opening_card(hand: CardSet, game: GameType, declarer_last: bool, partner_bid: u32, tables: &TableSet) -> Result<Card> {
    let plain = |s: Suit| hand.intersect(CardSet::suit(s)).minus(CardSet::rank(Rank::Jack));
    let suits: Vec<Suit> = Suit::ALL
        .into_iter()
        .filter(|&s| Some(s) != game.trump_suit() && !plain(s).is_empty())
        .collect();
    let Some(&first) = suits.first() else {
        return Ok(lowest(hand, game));
    };
    let mut chosen = first;
    for &s in &suits[1..] {
        let (a, b) = (plain(s).len(), plain(chosen).len());
        if (declarer_last && a > b) || (!declarer_last && a < b) {
            chosen = s;
        }
    }
    let cards = plain(chosen);
    let ace = Card::new(chosen, Rank::Ace);
    if !cards.contains(ace) {
        return Ok(lowest(cards, game));
    }
    let under = cards.minus(CardSet::from_cards([ace]));
    if under.is_empty() {
        return Ok(ace);
    }
    let q = if game == GameType::Grand {
        Question::OpeningGrand
    } else {
        Question::OpeningSuit
    };
    let ctx = OpeningContext {
        game,
        hand,
        lead: ace,
        declarer_last,
        partner_bid,
    };
    let Some(v) = opening_features(&ctx) else { return Ok(ace) };
    Ok(match answer_under_ace(tables.get(q), &v)? {
        UnderAce::PlayAce | UnderAce::InsufficientData => ace,
        UnderAce::PlayUnderAce => highest(under, game),
    })
}

fn lowest(cards: CardSet, game: GameType) -> Card {
    cards
        .iter()
        .min_by_key(|&c| (card_class(c, game) == TRUMP, card_power(c, game), c.index()))
        .expect("non-empty")
}

fn highest(cards: CardSet, game: GameType) -> Card {
    cards
        .iter()
        .max_by_key(|&c| (card_power(c, game), std::cmp::Reverse(c.index())))
        .expect("non-empty")
}

/// What the seat to move knows about the hidden cards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Knowledge {
    pub seat: u8,
    /// Cards known to be held by each seat.
    pub known: [CardSet; PLAYERS],
    /// Following classes each seat has shown to be void in, as a bitmask.
    pub voids: [u8; PLAYERS],
    pub hand_sizes: [usize; PLAYERS],
    /// Skat when the seat knows it.
    pub skat: Option<CardSet>,
    /// Cards whose location is unknown to the seat.
    pub unknown: CardSet,
    /// Eyes the declarer banked from tricks, public.
    pub declarer_trick_eyes: u32,
}

pub fn knowledge(st: &GameState, seat: u8) -> Knowledge {
    let game = st.game();
    let mut known = [CardSet::EMPTY; PLAYERS];
    known[seat as usize] = st.hands[seat as usize];
    if st.declaration.ouvert {
        known[st.declarer as usize] = st.hands[st.declarer as usize];
    }
    let mut voids = [0u8; PLAYERS];
    let mut mark = |leader: u8, cards: &[Card]| {
        let Some(&first) = cards.first() else { return };
        let led = card_class(first, game);
        for (i, &c) in cards.iter().enumerate().skip(1) {
            if card_class(c, game) != led {
                voids[(leader as usize + i) % PLAYERS] |= 1 << led;
            }
        }
    };
    for t in &st.history {
        mark(t.leader, &t.cards);
    }
    mark(st.leader, &st.trick);
    let skat = (seat == st.declarer && !st.declaration.hand).then_some(st.skat);
    let mut seen = st.played_cards();
    for k in known {
        seen = seen.union(k);
    }
    if let Some(s) = skat {
        seen = seen.union(s);
    }
    let declarer_trick_eyes = st.history.iter().filter(|t| t.winner == st.declarer).map(|t| t.eyes()).sum();
    Knowledge {
        seat,
        known,
        voids,
        hand_sizes: st.hands.map(|h| h.len()),
        skat,
        unknown: CardSet(!seen.0 & CardSet::FULL.0),
        declarer_trick_eyes,
    }
}

const SKAT_SLOT: usize = PLAYERS;

struct Sampler<'a> {
    k: &'a Knowledge,
    game: GameType,
    cards: Vec<Card>,
    caps: [usize; PLAYERS + 1],
    assign: [CardSet; PLAYERS + 1],
}

impl Sampler<'_> {
    fn allowed(&self, c: Card, slot: usize) -> bool {
        slot == SKAT_SLOT || self.k.voids[slot] & (1 << card_class(c, self.game)) == 0
    }

    fn slots(&self, c: Card) -> Vec<usize> {
        (0..=PLAYERS).filter(|&s| self.caps[s] > 0 && self.allowed(c, s)).collect()
    }

    fn random<R: Rng>(&mut self, i: usize, rng: &mut R) -> bool {
        if i == self.cards.len() {
            return true;
        }
        let c = self.cards[i];
        let mut opts = self.slots(c);
        // Capacity-weighted order without replacement.
        let mut order = Vec::with_capacity(opts.len());
        while !opts.is_empty() {
            let total: usize = opts.iter().map(|&s| self.caps[s]).sum();
            let mut r = rng.gen_range(0..total);
            let mut pick = 0;
            for (j, &s) in opts.iter().enumerate() {
                if r < self.caps[s] {
                    pick = j;
                    break;
                }
                r -= self.caps[s];
            }
            order.push(opts.remove(pick));
        }
        for s in order {
            self.caps[s] -= 1;
            self.assign[s].insert(c);
            if self.random(i + 1, rng) {
                return true;
            }
            self.caps[s] += 1;
            self.assign[s].remove(c);
        }
        false
    }

    fn all(&mut self, i: usize, limit: usize, out: &mut Vec<[CardSet; PLAYERS + 1]>) {
        if out.len() > limit {
            return;
        }
        if i == self.cards.len() {
            out.push(self.assign);
            return;
        }
        let c = self.cards[i];
        for s in self.slots(c) {
            self.caps[s] -= 1;
            self.assign[s].insert(c);
            self.all(i + 1, limit, out);
            self.caps[s] += 1;
            self.assign[s].remove(c);
        }
    }
}

fn sampler<'a>(st: &GameState, k: &'a Knowledge) -> Sampler<'a> {
    let mut caps = [0usize; PLAYERS + 1];
    for (p, cap) in caps.iter_mut().take(PLAYERS).enumerate() {
        *cap = k.hand_sizes[p] - k.known[p].len();
    }
    caps[SKAT_SLOT] = if k.skat.is_some() { 0 } else { 2 };
    let game = st.game();
    let mut cards = k.unknown.to_vec();
    // Most constrained cards first.
    cards.sort_by_key(|&c| {
        (0..PLAYERS)
            .filter(|&p| caps[p] > 0 && k.voids[p] & (1 << card_class(c, game)) == 0)
            .count()
    });
    Sampler {
        k,
        game,
        cards,
        caps,
        assign: [CardSet::EMPTY; PLAYERS + 1],
    }
}

fn world_state(st: &GameState, k: &Knowledge, a: &[CardSet; PLAYERS + 1]) -> GameState {
    let mut w = st.clone();
    for (p, hand) in w.hands.iter_mut().enumerate() {
        *hand = k.known[p].union(a[p]);
    }
    w.skat = k.skat.unwrap_or(a[SKAT_SLOT]);
    w.declarer_eyes = k.declarer_trick_eyes + w.skat.eyes();
    debug_assert!(w.eyes_conserved());
    w
}

/// One hidden-card assignment consistent with `k`.
pub fn sample_world<R: Rng>(st: &GameState, k: &Knowledge, rng: &mut R) -> GameState {
    let mut s = sampler(st, k);
    let ok = s.random(0, rng);
    assert!(ok, "the actual deal is always consistent");
    world_state(st, k, &s.assign)
}

/// Every consistent world, or `None` when there are more than `limit`.
pub fn enumerate_worlds(st: &GameState, k: &Knowledge, limit: usize) -> Option<Vec<GameState>> {
    let mut s = sampler(st, k);
    let mut out = Vec::new();
    s.all(0, limit, &mut out);
    (out.len() <= limit).then(|| out.iter().map(|a| world_state(st, k, a)).collect())
}

/// Aggregate of one candidate card over the sampled worlds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CardTally {
    pub card: Card,
    pub votes: u32,
    /// Summed solver eyes for the mover's side, or the tie preference.
    pub eyes: u32,
}

/// Votes per legal card over `worlds`: a card gets a vote in a world when it
/// reaches the best result available to the mover's side there.
pub fn tally(worlds: &[GameState], seat: u8, exact: bool, solver: &mut Solver) -> Result<Vec<CardTally>> {
    let mut out: Vec<CardTally> = Vec::new();
    for w in worlds {
        let moves = solver.move_values(w, exact)?;
        if out.is_empty() {
            out = moves
                .iter()
                .map(|m| CardTally {
                    card: m.card,
                    votes: 0,
                    eyes: 0,
                })
                .collect();
        }
        let declarer = seat == w.declarer;
        let good = |m: &crate::solver::MoveValue| m.declarer_wins == declarer;
        let any = moves.iter().any(good);
        let null = w.game().is_null();
        for (t, m) in out.iter_mut().zip(&moves) {
            debug_assert_eq!(t.card, m.card);
            if any && good(m) {
                t.votes += 1;
            }
            if let (Some(e), false) = (m.eyes, null) {
                t.eyes += if declarer { e } else { TOTAL_EYES - e };
            }
        }
    }
    Ok(out)
}

/// Highest votes, then eyes, then lowest card index.
pub fn best_tally(t: &[CardTally]) -> Option<Card> {
    t.iter()
        .max_by(|a, b| (a.votes, a.eyes).cmp(&(b.votes, b.eyes)).then(b.card.index().cmp(&a.card.index())))
        .map(|t| t.card)
}

/// Cheap preference among cards with equal votes: lead and discard low,
/// beat as cheaply as possible, load points onto a trick the own side holds.
/// Null declarers prefer the highest card that stays under the trick.
pub fn tie_preference(st: &GameState, seat: u8, card: Card) -> u32 {
    let game = st.game();
    let eyes = card.eyes();
    if st.trick.is_empty() {
        return 20 - eyes;
    }
    let mut with = st.trick.clone();
    with.push(card);
    let beats = best_position(&with, game) == st.trick.len();
    if game.is_null() {
        let power = card_power(card, game) as u32;
        return match (seat == st.declarer, beats) {
            (true, false) => 20 + power,
            (true, true) => 10 - power,
            (false, _) => 0,
        };
    }
    let holder = (st.leader as usize + best_position(&st.trick, game)) % PLAYERS;
    let own_side = (holder as u8 == st.declarer) == (seat == st.declarer);
    match (own_side, beats) {
        (true, _) => 20 + eyes,
        (false, true) => 40 - card_power(card, game) as u32,
        (false, false) => 20 - eyes,
    }
}

/// Card for the seat to move by perfect-information Monte-Carlo sampling.
pub fn choose_trick_card<R: Rng>(st: &GameState, config: &PolicyConfig, solver: &mut Solver, rng: &mut R) -> Result<Card> {
    let seat = st.to_move();
    let legal = st.legal_moves(seat)?;
    if legal.len() == 1 {
        return Ok(legal.first().expect("one card"));
    }
    let k = knowledge(st, seat);
    let worlds = if k.unknown.is_empty() {
        vec![st.clone()]
    } else {
        let exhaustive = if st.hands[seat as usize].len() <= config.endgame_trigger {
            enumerate_worlds(st, &k, config.endgame_worlds)
        } else {
            None
        };
        match exhaustive {
            Some(w) => w,
            None => {
                let n = if st.hands[seat as usize].len() <= config.endgame_trigger {
                    config.endgame_worlds
                } else {
                    config.worlds
                };
                (0..n).map(|_| sample_world(st, &k, rng)).collect()
            }
        }
    };
    let mut t = tally(&worlds, seat, config.eyes_tiebreak, solver)?;
    if !config.eyes_tiebreak {
        for c in &mut t {
            c.eyes = tie_preference(st, seat, c.card);
        }
    }
    Ok(best_tally(&t).expect("legal moves exist"))
}

pub fn random_card<R: Rng>(st: &GameState, rng: &mut R) -> Result<Card> {
    let legal = st.legal_moves(st.to_move())?.to_vec();
    Ok(*legal.choose(rng).expect("legal moves exist"))
}

/// How a seat plays its cards.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CardPlay {
    /// Opening tables for the first lead, sampling otherwise.
    Table,
    RandomLegal,
}

/// Card for the seat to move under `mode`.
pub fn choose_card<R: Rng>(
    st: &GameState,
    mode: CardPlay,
    bids: &[u32; PLAYERS],
    tables: &TableSet,
    config: &PolicyConfig,
    solver: &mut Solver,
    rng: &mut R,
) -> Result<Card> {
    let seat = st.to_move();
    match mode {
        CardPlay::RandomLegal => random_card(st, rng),
        CardPlay::Table => {
            let game = st.game();
            let opening = st.history.is_empty() && st.trick.is_empty() && seat != st.declarer && !game.is_null();
            if opening {
                let partner = (0..PLAYERS as u8).find(|&p| p != seat && p != st.declarer).expect("three seats");
                let last = relative_position(st.declarer, seat) == 2;
                return choose_opening_card(st.hands[seat as usize], game, last, bids[partner as usize], tables);
            }
            choose_trick_card(st, config, solver, rng)
        }
    }
}
