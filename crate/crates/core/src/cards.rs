//! Cards, card sets and deals for the 32-card Skat deck.
//!
//! Cards are addressed by a compact index in `[0, 32)` ordered suit-major
//! (clubs, spades, hearts, diamonds) and rank-minor (7, 8, 9, 10, J, Q, K, A).
//! The same index is used as the card code in game records.

use std::fmt;
use std::io::{self, Read, Write};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DECK_SIZE: usize = 32;
pub const HAND_SIZE: usize = 10;
pub const PLAYERS: usize = 3;
pub const TOTAL_EYES: u32 = 120;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suit {
    Clubs = 0,
    Spades = 1,
    Hearts = 2,
    Diamonds = 3,
}

impl Suit {
    pub const ALL: [Suit; 4] = [Suit::Clubs, Suit::Spades, Suit::Hearts, Suit::Diamonds];

    pub fn from_index(i: usize) -> Suit {
        Suit::ALL[i]
    }

    pub fn symbol(self) -> char {
        match self {
            Suit::Clubs => 'C',
            Suit::Spades => 'S',
            Suit::Hearts => 'H',
            Suit::Diamonds => 'D',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    Seven = 0,
    Eight = 1,
    Nine = 2,
    Ten = 3,
    Jack = 4,
    Queen = 5,
    King = 6,
    Ace = 7,
}

impl Rank {
    pub const ALL: [Rank; 8] = [
        Rank::Seven,
        Rank::Eight,
        Rank::Nine,
        Rank::Ten,
        Rank::Jack,
        Rank::Queen,
        Rank::King,
        Rank::Ace,
    ];

    pub fn from_index(i: usize) -> Rank {
        Rank::ALL[i]
    }

    /// Card points ("eyes") of this rank.
    pub fn eyes(self) -> u32 {
        match self {
            Rank::Ace => 11,
            Rank::Ten => 10,
            Rank::King => 4,
            Rank::Queen => 3,
            Rank::Jack => 2,
            Rank::Nine | Rank::Eight | Rank::Seven => 0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Rank::Seven => '7',
            Rank::Eight => '8',
            Rank::Nine => '9',
            Rank::Ten => 'T',
            Rank::Jack => 'J',
            Rank::Queen => 'Q',
            Rank::King => 'K',
            Rank::Ace => 'A',
        }
    }
}

/// A single card, stored as its compact index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Card(u8);

impl Card {
    pub fn new(suit: Suit, rank: Rank) -> Card {
        Card(suit as u8 * 8 + rank as u8)
    }

    pub fn from_index(index: u8) -> Result<Card> {
        if (index as usize) < DECK_SIZE {
            Ok(Card(index))
        } else {
            Err(Error::InvalidCard(index as i64))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn suit(self) -> Suit {
        Suit::from_index((self.0 / 8) as usize)
    }

    pub fn rank(self) -> Rank {
        Rank::from_index((self.0 % 8) as usize)
    }

    pub fn eyes(self) -> u32 {
        self.rank().eyes()
    }

    pub fn is_jack(self) -> bool {
        self.rank() == Rank::Jack
    }

    pub fn bit(self) -> u32 {
        1 << self.0
    }

    /// Every card of the deck in index order.
    pub fn all() -> impl Iterator<Item = Card> {
        (0..DECK_SIZE as u8).map(Card)
    }
}

impl fmt::Debug for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.suit().symbol(), self.rank().symbol())
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A set of cards as a 32-bit mask over compact indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CardSet(pub u32);

impl CardSet {
    pub const EMPTY: CardSet = CardSet(0);
    pub const FULL: CardSet = CardSet(u32::MAX);

    pub fn from_cards<I: IntoIterator<Item = Card>>(cards: I) -> CardSet {
        CardSet(cards.into_iter().fold(0, |m, c| m | c.bit()))
    }

    pub fn suit(suit: Suit) -> CardSet {
        CardSet(0xff << (suit as u32 * 8))
    }

    pub fn rank(rank: Rank) -> CardSet {
        CardSet(0x0101_0101 << rank as u32)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, card: Card) -> bool {
        self.0 & card.bit() != 0
    }

    pub fn insert(&mut self, card: Card) {
        self.0 |= card.bit();
    }

    pub fn remove(&mut self, card: Card) {
        self.0 &= !card.bit();
    }

    pub fn union(self, other: CardSet) -> CardSet {
        CardSet(self.0 | other.0)
    }

    pub fn intersect(self, other: CardSet) -> CardSet {
        CardSet(self.0 & other.0)
    }

    pub fn minus(self, other: CardSet) -> CardSet {
        CardSet(self.0 & !other.0)
    }

    pub fn eyes(self) -> u32 {
        self.iter().map(Card::eyes).sum()
    }

    /// Lowest-index card, if any.
    pub fn first(self) -> Option<Card> {
        if self.0 == 0 {
            None
        } else {
            Some(Card(self.0.trailing_zeros() as u8))
        }
    }

    pub fn iter(self) -> CardSetIter {
        CardSetIter(self.0)
    }

    pub fn to_vec(self) -> Vec<Card> {
        self.iter().collect()
    }
}

impl fmt::Debug for CardSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<Card> for CardSet {
    fn from_iter<I: IntoIterator<Item = Card>>(iter: I) -> Self {
        CardSet::from_cards(iter)
    }
}

impl IntoIterator for CardSet {
    type Item = Card;
    type IntoIter = CardSetIter;
    fn into_iter(self) -> CardSetIter {
        self.iter()
    }
}

/// Iterates a [`CardSet`] in ascending index order.
#[derive(Clone)]
pub struct CardSetIter(u32);

impl Iterator for CardSetIter {
    type Item = Card;

    fn next(&mut self) -> Option<Card> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(Card(i as u8))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for CardSetIter {}

/// A dealt game: three hands, the skat and the seat leading the first trick.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Deal {
    pub hands: [CardSet; PLAYERS],
    pub skat: CardSet,
    pub forehand: u8,
}

impl Deal {
    pub fn new(hands: [CardSet; PLAYERS], skat: CardSet, forehand: u8) -> Result<Deal> {
        let deal = Deal { hands, skat, forehand };
        deal.validate()?;
        Ok(deal)
    }

    /// Checks the partition invariant and the forehand range.
    pub fn validate(&self) -> Result<()> {
        if self.forehand as usize >= PLAYERS {
            return Err(Error::InvalidDeal(format!("forehand {} out of range", self.forehand)));
        }
        let mut seen = 0u32;
        for (i, group) in self.hands.iter().chain(std::iter::once(&self.skat)).enumerate() {
            let expected = if i < PLAYERS { HAND_SIZE } else { 2 };
            if group.len() != expected {
                return Err(Error::InvalidDeal(format!(
                    "group {} holds {} cards, expected {}",
                    i,
                    group.len(),
                    expected
                )));
            }
            if seen & group.0 != 0 {
                return Err(Error::InvalidDeal("card dealt twice".into()));
            }
            seen |= group.0;
        }
        debug_assert_eq!(seen, u32::MAX);
        Ok(())
    }

    /// Deals from an arbitrary ordering of the deck: 10 cards per seat, then 2 to the skat.
    pub fn from_order(order: &[Card; DECK_SIZE], forehand: u8) -> Deal {
        let group = |r: std::ops::Range<usize>| CardSet::from_cards(order[r].iter().copied());
        Deal {
            hands: [group(0..10), group(10..20), group(20..30)],
            skat: group(30..32),
            forehand,
        }
    }

    /// The 32 cards in deal order: hands 0, 1, 2 then skat, ascending within each group.
    pub fn card_order(&self) -> [Card; DECK_SIZE] {
        let mut out = [Card(0); DECK_SIZE];
        let cards = self.hands.iter().chain(std::iter::once(&self.skat)).flat_map(|g| g.iter());
        for (slot, card) in out.iter_mut().zip(cards) {
            *slot = card;
        }
        out
    }
}

/// A deal tagged with its game id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DealRecord {
    pub id: u64,
    pub deal: Deal,
}

/// Forehand seat of the game with the given id; it moves clockwise from deal to deal.
pub fn forehand_for_id(id: u64) -> u8 {
    (id % PLAYERS as u64) as u8
}

/// Identifier of the shuffling algorithm, written into deal file headers.
pub const DEAL_ALGORITHM: &str = "chacha8-stream";

/// Produces the deal with the given id. Every id owns an independent ChaCha8 stream
/// under the seed, so any deal of a corpus can be regenerated on its own.
pub fn deal_for_id(seed: u64, id: u64) -> Deal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    let mut order: [Card; DECK_SIZE] = std::array::from_fn(|i| Card(i as u8));
    order.shuffle(&mut rng);
    Deal::from_order(&order, forehand_for_id(id))
}

/// Deterministic deal stream with ids `first_id..first_id + count`.
pub fn generate_deals_from(seed: u64, first_id: u64, count: usize) -> impl Iterator<Item = DealRecord> {
    (first_id..first_id + count as u64).map(move |id| DealRecord {
        id,
        deal: deal_for_id(seed, id),
    })
}

pub fn generate_deals(seed: u64, count: usize) -> impl Iterator<Item = DealRecord> {
    generate_deals_from(seed, 0, count)
}

/// Players and deck size for the generic deal-count formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DealSpec {
    pub players: u32,
    pub deck: u32,
}

impl DealSpec {
    pub const SKAT: DealSpec = DealSpec { players: 3, deck: 32 };

    pub fn new(players: u32, deck: u32) -> Result<DealSpec> {
        if players == 0 || deck < players {
            return Err(Error::InvalidDealSpec { players, deck });
        }
        Ok(DealSpec { players, deck })
    }

    pub fn hand_size(&self) -> u32 {
        self.deck / self.players
    }
}

pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Number of ways to hand out `hand_size` cards to each player in turn,
/// ignoring leftovers and the choice of forehand.
pub fn deal_count(spec: DealSpec) -> BigUint {
    let h = spec.hand_size();
    (0..spec.players).map(|i| binomial(spec.deck - i * h, h)).product()
}

/// All Skat deals including the three forehand positions, `3 * 32! / (10! 10! 10! 2!)`.
pub fn skat_deal_count_with_forehand() -> BigUint {
    let fact = |n: u32| (1..=n).fold(BigUint::from(1u32), |acc, i| acc * i);
    let ten = fact(10);
    BigUint::from(3u32) * fact(32) / (&ten * &ten * &ten * fact(2))
}

const FILE_MAGIC: &[u8; 8] = b"SKDEAL01";
const ALGO_FIELD: usize = 16;
pub const DEAL_HEADER_LEN: usize = 8 + ALGO_FIELD + 8 + 8;
pub const DEAL_RECORD_LEN: usize = DECK_SIZE + 1 + 8;

/// Header of a binary deal file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DealFileHeader {
    pub algorithm: String,
    pub seed: u64,
    pub count: u64,
}

pub fn write_deal_file<W: Write>(mut w: W, header: &DealFileHeader, deals: &[DealRecord]) -> Result<()> {
    w.write_all(FILE_MAGIC)?;
    let mut algo = [0u8; ALGO_FIELD];
    let bytes = header.algorithm.as_bytes();
    let n = bytes.len().min(ALGO_FIELD);
    algo[..n].copy_from_slice(&bytes[..n]);
    w.write_all(&algo)?;
    w.write_all(&header.seed.to_le_bytes())?;
    w.write_all(&(deals.len() as u64).to_le_bytes())?;
    for rec in deals {
        w.write_all(&encode_deal_record(rec))?;
    }
    Ok(())
}

pub fn encode_deal_record(rec: &DealRecord) -> [u8; DEAL_RECORD_LEN] {
    let mut buf = [0u8; DEAL_RECORD_LEN];
    for (slot, card) in buf.iter_mut().zip(rec.deal.card_order()) {
        *slot = card.index();
    }
    buf[DECK_SIZE] = rec.deal.forehand;
    buf[DECK_SIZE + 1..].copy_from_slice(&rec.id.to_le_bytes());
    buf
}

pub fn decode_deal_record(buf: &[u8; DEAL_RECORD_LEN]) -> Result<DealRecord> {
    let mut order = [Card(0); DECK_SIZE];
    for (slot, &b) in order.iter_mut().zip(buf.iter()) {
        *slot = Card::from_index(b)?;
    }
    let deal = Deal::from_order(&order, buf[DECK_SIZE]);
    deal.validate()?;
    let id = u64::from_le_bytes(buf[DECK_SIZE + 1..].try_into().expect("8 bytes"));
    Ok(DealRecord { id, deal })
}

pub fn read_deal_file<R: Read>(mut r: R) -> Result<(DealFileHeader, Vec<DealRecord>)> {
    let mut head = [0u8; DEAL_HEADER_LEN];
    r.read_exact(&mut head)?;
    if &head[..8] != FILE_MAGIC {
        return Err(Error::Format("not a deal file".into()));
    }
    let algo = &head[8..8 + ALGO_FIELD];
    let end = algo.iter().position(|&b| b == 0).unwrap_or(ALGO_FIELD);
    let algorithm = String::from_utf8_lossy(&algo[..end]).into_owned();
    let seed = u64::from_le_bytes(head[24..32].try_into().expect("8 bytes"));
    let count = u64::from_le_bytes(head[32..40].try_into().expect("8 bytes"));
    let mut deals = Vec::with_capacity(count.min(1 << 24) as usize);
    let mut buf = [0u8; DEAL_RECORD_LEN];
    for _ in 0..count {
        r.read_exact(&mut buf).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => Error::Format("truncated deal file".into()),
            _ => Error::Io(e),
        })?;
        deals.push(decode_deal_record(&buf)?);
    }
    Ok((DealFileHeader { algorithm, seed, count }, deals))
}

/// Parses card shorthand such as `"CJ SA D7"`; used by tests and the CLI.
pub fn parse_cards(text: &str) -> Result<Vec<Card>> {
    text.split_whitespace()
        .map(|tok| {
            let mut chars = tok.chars();
            let (s, r) = match (chars.next(), chars.next(), chars.next()) {
                (Some(s), Some(r), None) => (s, r),
                _ => return Err(Error::Format(format!("bad card '{tok}'"))),
            };
            let suit = Suit::ALL
                .into_iter()
                .find(|x| x.symbol() == s.to_ascii_uppercase())
                .ok_or_else(|| Error::Format(format!("bad suit in '{tok}'")))?;
            let rank = Rank::ALL
                .into_iter()
                .find(|x| x.symbol() == r.to_ascii_uppercase())
                .ok_or_else(|| Error::Format(format!("bad rank in '{tok}'")))?;
            Ok(Card::new(suit, rank))
        })
        .collect()
}

pub fn cards(text: &str) -> CardSet {
    CardSet::from_cards(parse_cards(text).expect("valid card list"))
}
