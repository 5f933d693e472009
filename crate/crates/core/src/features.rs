//! Relevant-feature extraction for the five table questions.
//!
//! Declarer features describe the playing hand after the skat exchange, with
//! the eyes pushed into the skat as `skatvalue`. Null features are computed per
//! suit and combined by a product. Opening features describe the first card
//! an opponent leads.

use std::sync::OnceLock;

use crate::cards::{Card, CardSet, Rank, Suit, PLAYERS};
use crate::error::{Error, Result};
use crate::pgn::GameRecord;
use crate::phash::{FeatureSchema, FeatureVector};
use crate::rules::{card_class, GameType, TRUMP};
use crate::tables::{LayeredTable, Observation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Question {
    DeclarerSuit,
    DeclarerGrand,
    NullPerSuit,
    OpeningSuit,
    OpeningGrand,
}

const MANIFESTS: [&str; 5] = [
    include_str!("../schemas/declarer_suit.schema"),
    include_str!("../schemas/declarer_grand.schema"),
    include_str!("../schemas/null_per_suit.schema"),
    include_str!("../schemas/opening_suit.schema"),
    include_str!("../schemas/opening_grand.schema"),
];

/// Fields dropped from a foreground schema to form its background.
pub const BACKGROUND_DROP: usize = 3;

struct Schemas {
    fg: Vec<FeatureSchema>,
    bg: Vec<FeatureSchema>,
}

fn schemas() -> &'static Schemas {
    static S: OnceLock<Schemas> = OnceLock::new();
    S.get_or_init(|| {
        let fg: Vec<FeatureSchema> = Question::ALL
            .iter()
            .map(|q| FeatureSchema::parse_manifest(q.tag(), MANIFESTS[q.index()]).expect("bundled schema"))
            .collect();
        let bg = fg
            .iter()
            .map(|s| {
                s.prefix(&format!("{}_background", s.name()), s.len() - BACKGROUND_DROP)
                    .expect("bundled schema")
            })
            .collect();
        Schemas { fg, bg }
    })
}

impl Question {
    pub const ALL: [Question; 5] = [
        Question::DeclarerSuit,
        Question::DeclarerGrand,
        Question::NullPerSuit,
        Question::OpeningSuit,
        Question::OpeningGrand,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn tag(self) -> &'static str {
        match self {
            Question::DeclarerSuit => "declarer_suit",
            Question::DeclarerGrand => "declarer_grand",
            Question::NullPerSuit => "null_per_suit",
            Question::OpeningSuit => "opening_suit",
            Question::OpeningGrand => "opening_grand",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Question> {
        Question::ALL
            .into_iter()
            .find(|q| q.tag() == tag)
            .ok_or_else(|| Error::Config(format!("unknown question '{tag}'")))
    }

    pub fn file_name(self) -> String {
        format!("{}.table", self.tag())
    }

    pub fn schema(self) -> &'static FeatureSchema {
        &schemas().fg[self.index()]
    }

    pub fn background_schema(self) -> &'static FeatureSchema {
        &schemas().bg[self.index()]
    }

    /// Whether the question has anything to learn from a played game.
    pub fn applies(self, g: &GameRecord) -> bool {
        if !g.is_played() {
            return false;
        }
        let game = g.game.expect("played game has a type");
        match self {
            Question::DeclarerSuit => game.trump_suit().is_some(),
            Question::DeclarerGrand => game == GameType::Grand,
            Question::NullPerSuit => game.is_null(),
            Question::OpeningSuit => game.trump_suit().is_some() && opening_context(g).is_some(),
            Question::OpeningGrand => game == GameType::Grand && opening_context(g).is_some(),
        }
    }
}

const BID_THRESHOLDS: [u32; 8] = [0, 18, 20, 24, 30, 36, 48, 60];

pub fn bidding_class(bid: u32) -> u64 {
    BID_THRESHOLDS.iter().filter(|&&t| bid >= t).count() as u64 - 1
}

pub fn skat_class(eyes: u32) -> u64 {
    match eyes {
        0 => 0,
        1..=20 => eyes.div_ceil(4) as u64,
        21 => 6,
        _ => 7,
    }
}

/// Jack bitmask: bit 3 clubs, bit 2 spades, bit 1 hearts, bit 0 diamonds.
pub fn jacks_mask(cards: CardSet) -> u64 {
    Suit::ALL
        .iter()
        .filter(|&&s| cards.contains(Card::new(s, Rank::Jack)))
        .map(|&s| 1u64 << (3 - s as u32))
        .sum()
}

const PLAIN_ORDER: [Rank; 7] = [Rank::Ace, Rank::Ten, Rank::King, Rank::Queen, Rank::Nine, Rank::Eight, Rank::Seven];

/// Plain cards outside the unbroken run from the ace, summed over non-trump suits.
pub fn lost_cards(cards: CardSet, trump: Option<Suit>) -> u64 {
    let mut lost = 0;
    for s in Suit::ALL {
        if Some(s) == trump {
            continue;
        }
        let held: Vec<bool> = PLAIN_ORDER.iter().map(|&r| cards.contains(Card::new(s, r))).collect();
        let len = held.iter().filter(|&&h| h).count();
        let run = held.iter().take_while(|&&h| h).count();
        lost += len - run;
    }
    lost.min(7) as u64
}

fn plain_cards(cards: CardSet, s: Suit) -> CardSet {
    cards.intersect(CardSet::suit(s)).minus(CardSet::rank(Rank::Jack))
}

/// Suit-game features of a declarer holding `cards`.
///
/// `skat_eyes` is `None` for hand games.
pub fn suit_declarer_features(cards: CardSet, trump: Suit, opposing_bid: u32, skat_eyes: Option<u32>) -> FeatureVector {
    let game = GameType::Suit(trump);
    let trumps = cards.iter().filter(|&c| card_class(c, game) == TRUMP).count() as u64;
    let top = [
        Card::new(Suit::Clubs, Rank::Jack),
        Card::new(Suit::Spades, Rank::Jack),
        Card::new(Suit::Hearts, Rank::Jack),
        Card::new(Suit::Diamonds, Rank::Jack),
        Card::new(trump, Rank::Ace),
        Card::new(trump, Rank::Ten),
    ];
    let pairs = top.windows(2).filter(|w| cards.contains(w[0]) && cards.contains(w[1])).count() as u64;
    let others: Vec<Suit> = Suit::ALL.into_iter().filter(|&s| s != trump).collect();
    let aces = others.iter().filter(|&&s| cards.contains(Card::new(s, Rank::Ace))).count() as u64;
    let tens = others.iter().filter(|&&s| cards.contains(Card::new(s, Rank::Ten))).count() as u64;
    let free = others.iter().filter(|&&s| plain_cards(cards, s).is_empty()).count() as u64;
    FeatureVector(vec![
        trumps.min(11),
        jacks_mask(cards),
        pairs.min(3),
        aces,
        tens,
        lost_cards(cards, Some(trump)),
        bidding_class(opposing_bid),
        skat_eyes.map_or(0, skat_class),
        free,
    ])
}

/// Grand features; `position` is the declarer's seat counted from forehand.
pub fn grand_declarer_features(cards: CardSet, opposing_bid: u32, position: u8, skat_eyes: Option<u32>) -> FeatureVector {
    let aces = cards.intersect(CardSet::rank(Rank::Ace)).len() as u64;
    let tens = cards.intersect(CardSet::rank(Rank::Ten)).len() as u64;
    FeatureVector(vec![
        jacks_mask(cards),
        aces,
        tens,
        lost_cards(cards, None),
        bidding_class(opposing_bid),
        position as u64,
        skat_eyes.map_or(0, skat_class),
    ])
}

/// Bitmask of the ranks held in `suit`, bit `r` for rank index `r` (seven is bit 0).
pub fn suit_holding(cards: CardSet, suit: Suit) -> u64 {
    (cards.0 >> (suit as u32 * 8)) as u64 & 0xff
}

pub fn null_suit_features(cards: CardSet, suit: Suit, variant: u8, declarer_to_move: bool, discarded: CardSet) -> FeatureVector {
    FeatureVector(vec![
        suit_holding(cards, suit),
        variant as u64,
        declarer_to_move as u64,
        discarded.intersect(CardSet::suit(suit)).len().min(2) as u64,
    ])
}

pub fn null_features(cards: CardSet, variant: u8, declarer_to_move: bool, discarded: CardSet) -> [FeatureVector; 4] {
    Suit::ALL.map(|s| null_suit_features(cards, s, variant, declarer_to_move, discarded))
}

/// `P_w(h) = prod_suit P_w(h, suit)`.
pub fn null_product(probs: &[f64; 4]) -> f64 {
    probs.iter().product()
}

pub fn null_win_probability(cards: CardSet, variant: u8, declarer_to_move: bool, discarded: CardSet, table: &LayeredTable) -> Result<f64> {
    let fv = null_features(cards, variant, declarer_to_move, discarded);
    let mut probs = [0.0; 4];
    for (p, v) in probs.iter_mut().zip(&fv) {
        *p = table.prob(v)?;
    }
    Ok(null_product(&probs))
}

/// Opener's view of the first trick, for opening questions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpeningContext {
    pub game: GameType,
    pub hand: CardSet,
    pub lead: Card,
    /// True when the declarer plays last in the first trick.
    pub declarer_last: bool,
    pub partner_bid: u32,
}

pub fn trump_strength(trumps: usize) -> u64 {
    match trumps {
        0..=2 => 0,
        3..=4 => 1,
        _ => 2,
    }
}

fn partner_bid_suit(partner_bid: u32, suit: Suit) -> bool {
    partner_bid > 0 && partner_bid.is_multiple_of(GameType::Suit(suit).base_value())
}

/// Opening-card features; `None` for leads the questions do not cover.
pub fn opening_features(ctx: &OpeningContext) -> Option<FeatureVector> {
    let OpeningContext {
        game,
        hand,
        lead,
        declarer_last,
        partner_bid,
    } = *ctx;
    let s = lead.suit();
    let ace = Card::new(s, Rank::Ace);
    let has_ace = hand.contains(ace);
    let has_ten = hand.contains(Card::new(s, Rank::Ten));
    match game {
        GameType::Suit(_) => {
            if card_class(lead, game) == TRUMP {
                return None;
            }
            let trumps = hand.iter().filter(|&c| card_class(c, game) == TRUMP).count();
            Some(FeatureVector(vec![
                trump_strength(trumps),
                plain_cards(hand, s).len() as u64,
                has_ace as u64,
                has_ten as u64,
                declarer_last as u64,
                partner_bid_suit(partner_bid, s) as u64,
                (lead == ace) as u64,
            ]))
        }
        GameType::Grand => {
            let jacks = jacks_mask(hand);
            if lead.is_jack() {
                return Some(FeatureVector(vec![declarer_last as u64, 0, 0, jacks, 0, 0, 0]));
            }
            Some(FeatureVector(vec![
                declarer_last as u64,
                plain_cards(hand, s).len() as u64,
                partner_bid_suit(partner_bid, s) as u64,
                jacks,
                has_ace as u64,
                has_ten as u64,
                (lead == ace) as u64,
            ]))
        }
        _ => None,
    }
}

/// Highest bid among the declarer's opponents.
pub fn opposing_bid(g: &GameRecord) -> u32 {
    (0..PLAYERS as u8)
        .filter(|&p| p != g.declarer)
        .map(|p| g.bids[p as usize])
        .max()
        .unwrap_or(0)
}

/// Declarer seat counted clockwise from forehand.
pub fn relative_position(seat: u8, forehand: u8) -> u8 {
    (seat + PLAYERS as u8 - forehand) % PLAYERS as u8
}

fn opening_context(g: &GameRecord) -> Option<OpeningContext> {
    let opener = g.forehand();
    if opener == g.declarer {
        return None;
    }
    let lead = g.tricks.first()?.cards[0];
    let partner = (0..PLAYERS as u8).find(|&p| p != opener && p != g.declarer)?;
    let ctx = OpeningContext {
        game: g.game?,
        hand: g.hands[opener as usize],
        lead,
        declarer_last: relative_position(g.declarer, opener) == 2,
        partner_bid: g.bids[partner as usize],
    };
    opening_features(&ctx).map(|_| ctx)
}

fn skat_eyes(g: &GameRecord) -> Option<u32> {
    (!g.hand).then(|| g.skat_put.eyes())
}

/// Feature vectors of `g` under `q`, one per bucket it contributes to.
pub fn extract(q: Question, g: &GameRecord) -> Result<Vec<FeatureVector>> {
    if g.folded {
        return Err(Error::Folded);
    }
    let game = g.game.ok_or(Error::Folded)?;
    let cards = g.declarer_hand();
    let wrong = || Error::MissingContext("game type does not match the question");
    let v = match q {
        Question::DeclarerSuit => {
            let trump = game.trump_suit().ok_or_else(wrong)?;
            vec![suit_declarer_features(cards, trump, opposing_bid(g), skat_eyes(g))]
        }
        Question::DeclarerGrand => {
            if game != GameType::Grand {
                return Err(wrong());
            }
            vec![grand_declarer_features(
                cards,
                opposing_bid(g),
                relative_position(g.declarer, g.forehand()),
                skat_eyes(g),
            )]
        }
        Question::NullPerSuit => {
            let variant = game.null_variant().ok_or_else(wrong)?;
            let discarded = if g.hand { CardSet::EMPTY } else { g.skat_put };
            null_features(cards, variant, g.declarer == g.forehand(), discarded).to_vec()
        }
        Question::OpeningSuit | Question::OpeningGrand => {
            if (q == Question::OpeningGrand) != (game == GameType::Grand) || game.is_null() {
                return Err(wrong());
            }
            if g.tricks.is_empty() {
                return Err(Error::MissingContext("first trick"));
            }
            match opening_context(g).and_then(|c| opening_features(&c)) {
                Some(v) => vec![v],
                None => Vec::new(),
            }
        }
    };
    for f in &v {
        q.schema().check(f)?;
    }
    Ok(v)
}

/// Suit class of the first trick the declarer won, if any.
fn first_declarer_trick_suit(g: &GameRecord) -> Option<Suit> {
    g.tricks.iter().find(|t| t.winner == g.declarer).map(|t| t.cards[0].suit())
}

/// Labelled observations of `g` under `q`; empty when the question does not apply.
pub fn observations(q: Question, g: &GameRecord) -> Result<Vec<Observation>> {
    if !q.applies(g) {
        return Ok(Vec::new());
    }
    let vs = extract(q, g)?;
    let obs = match q {
        Question::DeclarerSuit | Question::DeclarerGrand => vs
            .into_iter()
            .map(|features| Observation {
                features,
                won: g.declarer_won,
            })
            .collect(),
        Question::NullPerSuit => {
            let lost_in = first_declarer_trick_suit(g);
            vs.into_iter()
                .zip(Suit::ALL)
                .map(|(features, s)| {
                    let won = g.declarer_won || (lost_in.is_some() && lost_in != Some(s));
                    Observation { features, won }
                })
                .collect()
        }
        Question::OpeningSuit | Question::OpeningGrand => vs
            .into_iter()
            .map(|features| Observation {
                features,
                won: !g.declarer_won,
            })
            .collect(),
    };
    Ok(obs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnderAce {
    PlayAce,
    PlayUnderAce,
    InsufficientData,
}

/// Index of the `aceplayed` field, the last field of both opening schemas.
const ACE_PLAYED: usize = 6;

/// Compares the two opening buckets that differ only in whether the ace was led.
pub fn answer_under_ace(table: &LayeredTable, context: &FeatureVector) -> Result<UnderAce> {
    let fg = table.foreground();
    let mut probs = [None, None];
    for (played, p) in probs.iter_mut().enumerate() {
        let mut v = context.clone();
        v.0[ACE_PLAYED] = played as u64;
        if let Some(e) = fg.get_vector(&v)? {
            if e.games >= fg.confidence() {
                *p = Some(e.prob());
            }
        }
    }
    Ok(match probs {
        [None, None] => UnderAce::InsufficientData,
        [Some(_), None] => UnderAce::PlayUnderAce,
        [None, Some(_)] => UnderAce::PlayAce,
        // A tie keeps the ace back as a stopper.
        [Some(under), Some(ace)] => {
            if ace > under {
                UnderAce::PlayAce
            } else {
                UnderAce::PlayUnderAce
            }
        }
    })
}
