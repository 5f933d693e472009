//! Skat game semantics: game types, following rules, trick evaluation,
//! contract values, outcomes and Seeger-Fabian scoring.

use crate::cards::{Card, CardSet, Rank, Suit, PLAYERS, TOTAL_EYES};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GameType {
    Suit(Suit),
    Grand,
    Null,
    NullOuvert,
    NullHand,
    NullOuvertHand,
}

impl GameType {
    pub const ALL: [GameType; 9] = [
        GameType::Suit(Suit::Clubs),
        GameType::Suit(Suit::Spades),
        GameType::Suit(Suit::Hearts),
        GameType::Suit(Suit::Diamonds),
        GameType::Grand,
        GameType::Null,
        GameType::NullOuvert,
        GameType::NullHand,
        GameType::NullOuvertHand,
    ];

    /// Game record code: 0..3 suit (clubs, spades, hearts, diamonds), 4 grand, 5..8 null variants.
    pub fn code(self) -> i8 {
        match self {
            GameType::Suit(s) => s as i8,
            GameType::Grand => 4,
            GameType::Null => 5,
            GameType::NullOuvert => 6,
            GameType::NullHand => 7,
            GameType::NullOuvertHand => 8,
        }
    }

    /// `-1` (folded) maps to `None`.
    pub fn from_code(code: i64) -> Result<Option<GameType>> {
        match code {
            -1 => Ok(None),
            0..=8 => Ok(Some(GameType::ALL[code as usize])),
            _ => Err(Error::InvalidGameCode(code)),
        }
    }

    pub fn is_null(self) -> bool {
        matches!(
            self,
            GameType::Null | GameType::NullOuvert | GameType::NullHand | GameType::NullOuvertHand
        )
    }

    pub fn trump_suit(self) -> Option<Suit> {
        match self {
            GameType::Suit(s) => Some(s),
            _ => None,
        }
    }

    /// Null variant index: 0 standard, 1 hand, 2 ouvert, 3 ouvert hand.
    pub fn null_variant(self) -> Option<u8> {
        match self {
            GameType::Null => Some(0),
            GameType::NullHand => Some(1),
            GameType::NullOuvert => Some(2),
            GameType::NullOuvertHand => Some(3),
            _ => None,
        }
    }

    /// Base value of trump games; fixed contract value of null games.
    pub fn base_value(self) -> u32 {
        match self {
            GameType::Suit(Suit::Diamonds) => 9,
            GameType::Suit(Suit::Hearts) => 10,
            GameType::Suit(Suit::Spades) => 11,
            GameType::Suit(Suit::Clubs) => 12,
            GameType::Grand => 24,
            GameType::Null => 23,
            GameType::NullHand => 35,
            GameType::NullOuvert => 46,
            GameType::NullOuvertHand => 59,
        }
    }
}

/// Following class of a card: `TRUMP` or the index of its plain suit.
pub const TRUMP: u8 = 4;

pub fn card_class(card: Card, game: GameType) -> u8 {
    match game {
        GameType::Suit(s) if card.is_jack() || card.suit() == s => TRUMP,
        GameType::Grand if card.is_jack() => TRUMP,
        _ => card.suit() as u8,
    }
}

/// Strength of a card inside its class; higher wins.
pub fn card_power(card: Card, game: GameType) -> u8 {
    if game.is_null() {
        return card.rank() as u8;
    }
    if card.is_jack() {
        return 10 + (3 - card.suit() as u8);
    }
    match card.rank() {
        Rank::Ace => 6,
        Rank::Ten => 5,
        Rank::King => 4,
        Rank::Queen => 3,
        Rank::Nine => 2,
        Rank::Eight => 1,
        Rank::Seven => 0,
        Rank::Jack => unreachable!(),
    }
}

/// Cards of one following class.
pub fn class_cards(game: GameType, class: u8) -> CardSet {
    Card::all().filter(|&c| card_class(c, game) == class).collect()
}

/// Trumps in descending strength (empty for null games).
pub fn trump_sequence(game: GameType) -> Vec<Card> {
    if game.is_null() {
        return Vec::new();
    }
    let mut t: Vec<Card> = class_cards(game, TRUMP).iter().collect();
    t.sort_by_key(|&c| std::cmp::Reverse(card_power(c, game)));
    t
}

/// Whether `card` beats `best` when `led` is the class led.
fn beats(card: Card, best: Card, led: u8, game: GameType) -> bool {
    let (cc, bc) = (card_class(card, game), card_class(best, game));
    if cc == bc {
        return card_power(card, game) > card_power(best, game);
    }
    cc == TRUMP || (cc == led && bc != TRUMP)
}

/// Index (0..3) within the trick of the winning card, cards in play order.
pub fn winning_position(cards: &[Card; 3], game: GameType) -> usize {
    best_position(cards, game)
}

/// Index of the card currently winning a possibly partial, non-empty trick.
pub fn best_position(cards: &[Card], game: GameType) -> usize {
    let led = card_class(cards[0], game);
    let mut best = 0;
    for i in 1..cards.len() {
        if beats(cards[i], cards[best], led, game) {
            best = i;
        }
    }
    best
}

/// Seat winning a complete trick led by `leader`.
pub fn trick_winner(cards: &[Card], leader: u8, game: GameType) -> Result<u8> {
    let cards: &[Card; 3] = cards.try_into().map_err(|_| Error::IncompleteTrick)?;
    Ok(((leader as usize + winning_position(cards, game)) % PLAYERS) as u8)
}

/// Cards `hand` may play when `led` (if any) opened the trick.
pub fn legal_cards(hand: CardSet, led: Option<Card>, game: GameType) -> CardSet {
    match led {
        None => hand,
        Some(l) => {
            let follow = hand.intersect(class_cards(game, card_class(l, game)));
            if follow.is_empty() {
                hand
            } else {
                follow
            }
        }
    }
}

/// Matadors "with" or "without": length of the unbroken run from the top trump
/// that is either fully held or fully missing.
pub fn matadors(cards: CardSet, game: GameType) -> u32 {
    let seq = trump_sequence(game);
    let Some(&top) = seq.first() else { return 0 };
    let with = cards.contains(top);
    seq.iter().take_while(|&&c| cards.contains(c) == with).count() as u32
}

/// Declaration details that raise the multiplier or change win conditions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Announcements {
    pub hand: bool,
    pub schneider: bool,
    pub schneider_announced: bool,
    pub schwarz: bool,
    pub schwarz_announced: bool,
    pub ouvert: bool,
}

/// Contract value. Null games have fixed values; trump games multiply the base
/// value by matadors + 1 plus one level for each flag set.
pub fn game_value(game: GameType, matadors: u32, ann: Announcements) -> u32 {
    if game.is_null() {
        return game.base_value();
    }
    let levels = [
        ann.hand,
        ann.schneider,
        ann.schneider_announced,
        ann.schwarz,
        ann.schwarz_announced,
        ann.ouvert,
    ];
    let multiplier = matadors + 1 + levels.iter().filter(|&&b| b).count() as u32;
    game.base_value() * multiplier
}

/// Every value a bid can name, ascending from 18.
pub fn bid_ladder() -> &'static [u32] {
    static LADDER: std::sync::OnceLock<Vec<u32>> = std::sync::OnceLock::new();
    LADDER.get_or_init(|| {
        let mut v: Vec<u32> = [9u32, 10, 11, 12, 24]
            .iter()
            .flat_map(|&b| (2..=18).map(move |m| b * m))
            .chain([23, 35, 46, 59])
            .filter(|&x| x >= 18)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    })
}

/// Smallest multiple of the base value that is at least `bid`; the value charged for an overbid.
pub fn overbid_value(game: GameType, bid: u32) -> u32 {
    let b = game.base_value();
    bid.div_ceil(b) * b
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Declaration {
    pub game: GameType,
    pub hand: bool,
    pub schneider_announced: bool,
    pub schwarz_announced: bool,
    pub ouvert: bool,
}

impl Declaration {
    pub fn plain(game: GameType) -> Declaration {
        Declaration {
            game,
            hand: matches!(game, GameType::NullHand | GameType::NullOuvertHand),
            schneider_announced: false,
            schwarz_announced: false,
            ouvert: matches!(game, GameType::NullOuvert | GameType::NullOuvertHand),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompletedTrick {
    pub leader: u8,
    pub cards: [Card; 3],
    pub winner: u8,
}

impl CompletedTrick {
    pub fn eyes(&self) -> u32 {
        self.cards.iter().map(|c| c.eyes()).sum()
    }
}

/// Trick-taking stage of one game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameState {
    pub declaration: Declaration,
    pub declarer: u8,
    pub hands: [CardSet; PLAYERS],
    /// Cards laid away by the declarer; they count for the declarer.
    pub skat: CardSet,
    /// Declarer's cards at declaration time (hand plus skat), used for matadors.
    pub declarer_cards: CardSet,
    pub leader: u8,
    pub trick: Vec<Card>,
    pub declarer_eyes: u32,
    pub opponent_eyes: u32,
    /// Tricks taken by declarer (0) and opponents (1).
    pub tricks_taken: [u8; 2],
    pub history: Vec<CompletedTrick>,
}

impl GameState {
    pub fn new(hands: [CardSet; PLAYERS], skat: CardSet, declarer: u8, forehand: u8, declaration: Declaration) -> Result<GameState> {
        if declarer as usize >= PLAYERS || forehand as usize >= PLAYERS {
            return Err(Error::InvalidDeal("seat out of range".into()));
        }
        if hands.iter().any(|h| h.len() != crate::cards::HAND_SIZE) {
            return Err(Error::InvalidDeal("hands must hold 10 cards".into()));
        }
        Self::endgame(hands, skat, declarer, forehand, declaration, skat.eyes(), 0)
    }

    /// A position at a trick boundary with hands of equal size and the given banked eyes.
    /// The declarer's banked eyes include the skat.
    pub fn endgame(
        hands: [CardSet; PLAYERS],
        skat: CardSet,
        declarer: u8,
        leader: u8,
        declaration: Declaration,
        declarer_eyes: u32,
        opponent_eyes: u32,
    ) -> Result<GameState> {
        if declarer as usize >= PLAYERS || leader as usize >= PLAYERS {
            return Err(Error::InvalidDeal("seat out of range".into()));
        }
        let n = hands[0].len();
        if hands.iter().any(|h| h.len() != n) || skat.len() != 2 {
            return Err(Error::InvalidDeal("uneven hands".into()));
        }
        let all = hands.iter().fold(
            skat,
            |acc, &h| {
                if acc.intersect(h).is_empty() {
                    acc.union(h)
                } else {
                    CardSet::FULL
                }
            },
        );
        if all.len() != 3 * n + 2 {
            return Err(Error::InvalidDeal("card dealt twice".into()));
        }
        let state = GameState {
            declaration,
            declarer,
            hands,
            skat,
            declarer_cards: hands[declarer as usize].union(skat),
            leader,
            trick: Vec::with_capacity(3),
            declarer_eyes,
            opponent_eyes,
            tricks_taken: [0, 0],
            history: Vec::new(),
        };
        if !state.eyes_conserved() {
            return Err(Error::InvalidDeal("banked eyes do not add up to 120".into()));
        }
        Ok(state)
    }

    pub fn game(&self) -> GameType {
        self.declaration.game
    }

    pub fn to_move(&self) -> u8 {
        ((self.leader as usize + self.trick.len()) % PLAYERS) as u8
    }

    pub fn is_declarer(&self, seat: u8) -> bool {
        seat == self.declarer
    }

    pub fn is_finished(&self) -> bool {
        (self.trick.is_empty() && self.hands.iter().all(|h| h.is_empty())) || (self.game().is_null() && self.tricks_taken[0] > 0)
    }

    pub fn legal_moves(&self, player: u8) -> Result<CardSet> {
        if self.is_finished() {
            return Err(Error::IllegalMove("game is over".into()));
        }
        if player != self.to_move() {
            return Err(Error::IllegalMove(format!("seat {player} is not to move")));
        }
        Ok(legal_cards(self.hands[player as usize], self.trick.first().copied(), self.game()))
    }

    /// Plays `card` for the seat to move; returns the trick once it completes.
    pub fn play(&mut self, card: Card) -> Result<Option<CompletedTrick>> {
        let seat = self.to_move();
        if !self.legal_moves(seat)?.contains(card) {
            return Err(Error::IllegalMove(format!("{card} by seat {seat}")));
        }
        self.hands[seat as usize].remove(card);
        self.trick.push(card);
        if self.trick.len() < 3 {
            return Ok(None);
        }
        let cards = [self.trick[0], self.trick[1], self.trick[2]];
        let winner = trick_winner(&cards, self.leader, self.game())?;
        let done = CompletedTrick {
            leader: self.leader,
            cards,
            winner,
        };
        let eyes = done.eyes();
        if winner == self.declarer {
            self.declarer_eyes += eyes;
            self.tricks_taken[0] += 1;
        } else {
            self.opponent_eyes += eyes;
            self.tricks_taken[1] += 1;
        }
        self.history.push(done);
        self.trick.clear();
        self.leader = winner;
        Ok(Some(done))
    }

    /// Eyes not yet banked by either side.
    pub fn eyes_in_play(&self) -> u32 {
        self.hands.iter().map(|h| h.eyes()).sum::<u32>() + self.trick.iter().map(|c| c.eyes()).sum::<u32>()
    }

    pub fn eyes_conserved(&self) -> bool {
        self.declarer_eyes + self.opponent_eyes + self.eyes_in_play() == TOTAL_EYES
    }

    pub fn played_cards(&self) -> CardSet {
        self.history
            .iter()
            .flat_map(|t| t.cards)
            .chain(self.trick.iter().copied())
            .collect()
    }

    pub fn cards_per_hand(&self) -> usize {
        self.hands[self.to_move() as usize].len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GameOutcome {
    pub declarer_won: bool,
    pub eyes: u32,
    pub schneider: bool,
    pub schwarz: bool,
    /// Value scored by the declarer (positive value even for a loss).
    pub value: u32,
}

/// Settles a finished game against the highest accepted bid.
pub fn game_outcome(state: &GameState, bid: u32) -> Result<GameOutcome> {
    let game = state.game();
    let decl = state.declaration;
    if game.is_null() {
        if !state.is_finished() {
            return Err(Error::Unfinished);
        }
        let won = state.tricks_taken[0] == 0;
        let value = game.base_value();
        return Ok(GameOutcome {
            declarer_won: won && value >= bid,
            eyes: state.declarer_eyes,
            schneider: false,
            schwarz: false,
            value: if value >= bid { value } else { overbid_value(game, bid) },
        });
    }
    if !state.is_finished() {
        return Err(Error::Unfinished);
    }
    let eyes = state.declarer_eyes;
    let schneider = eyes >= 90 || eyes <= 30;
    let schwarz = state.tricks_taken.contains(&0);
    let ann = Announcements {
        hand: decl.hand,
        schneider,
        schneider_announced: decl.schneider_announced,
        schwarz,
        schwarz_announced: decl.schwarz_announced,
        ouvert: decl.ouvert,
    };
    let value = game_value(game, matadors(state.declarer_cards, game), ann);
    let made = eyes >= 61 && (!decl.schneider_announced || eyes >= 90) && (!decl.schwarz_announced || state.tricks_taken[1] == 0);
    let covered = value >= bid;
    Ok(GameOutcome {
        declarer_won: made && covered,
        eyes,
        schneider,
        schwarz,
        value: if covered { value } else { overbid_value(game, bid) },
    })
}

/// One scored game of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScoredGame {
    pub declarer: u8,
    pub won: bool,
    pub value: u32,
}

pub const WIN_BONUS: i64 = 50;
pub const OPPONENT_BONUS: i64 = 40;

/// Seeger-Fabian totals per seat for a 3-player table.
pub fn seeger_fabian_score(games: &[ScoredGame]) -> [i64; PLAYERS] {
    let mut score = [0i64; PLAYERS];
    for g in games {
        let v = g.value as i64;
        if g.won {
            score[g.declarer as usize] += v + WIN_BONUS;
        } else {
            score[g.declarer as usize] -= 2 * v + WIN_BONUS;
            for (seat, s) in score.iter_mut().enumerate() {
                if seat != g.declarer as usize {
                    *s += OPPONENT_BONUS;
                }
            }
        }
    }
    score
}
