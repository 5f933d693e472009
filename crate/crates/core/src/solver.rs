//! Open-card solver.
//!
//! Positions are bitmasks of the remaining cards per seat. The two opponents
//! minimise together. Trump and grand games are searched with alpha-beta on
//! the declarer's eyes still to be won; null games with a boolean search that
//! stops at the first trick the declarer takes. A transposition table caches
//! bounds at trick boundaries, keyed by the remaining cards and the leader.
//! Cards of one class that are adjacent once played cards are removed, and
//! carry equal eyes, are searched only once.

use crate::cards::{Card, CardSet, Deal, DECK_SIZE, PLAYERS, TOTAL_EYES};
use crate::error::{Error, Result};
use crate::pgn::GameRecord;
use crate::rules::{card_class, card_power, Declaration, GameState, GameType, TRUMP};

/// Eyes the declarer needs to win a trump or grand game.
pub const WIN_EYES: u32 = 61;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverVerdict {
    pub declarer_can_win: bool,
    /// Declarer eyes under best play (skat included). For null games this is
    /// the number of tricks the declarer can be forced to take, 0 or 1.
    pub best_eyes: u32,
    pub principal_variation: Option<Vec<Card>>,
}

/// Outcome of one root move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveValue {
    pub card: Card,
    /// Whether the declarer wins after this move with best play.
    pub declarer_wins: bool,
    /// Final declarer eyes after this move, when computed.
    pub eyes: Option<u32>,
}

#[derive(Clone, Copy, Default)]
struct Entry {
    key: u64,
    gen: u32,
    lo: u8,
    hi: u8,
}

struct Tt {
    entries: Vec<Entry>,
    mask: usize,
    gen: u32,
}

impl Tt {
    fn new(bits: u32) -> Tt {
        let n = 1usize << bits;
        Tt {
            entries: vec![Entry::default(); n],
            mask: n - 1,
            gen: 1,
        }
    }

    fn slot(&self, key: u64) -> usize {
        (key.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40) as usize & self.mask
    }

    fn get(&self, key: u64) -> Option<(u8, u8)> {
        let e = &self.entries[self.slot(key)];
        (e.gen == self.gen && e.key == key).then_some((e.lo, e.hi))
    }

    fn put(&mut self, key: u64, lo: u8, hi: u8) {
        let i = self.slot(key);
        self.entries[i] = Entry {
            key,
            gen: self.gen,
            lo,
            hi,
        };
    }

    fn clear(&mut self) {
        self.gen = self.gen.wrapping_add(1);
        if self.gen == 0 {
            self.entries.fill(Entry::default());
            self.gen = 1;
        }
    }
}

/// Per-game card tables.
#[derive(Clone)]
struct Layout {
    null: bool,
    class: [u8; DECK_SIZE],
    eyes: [u8; DECK_SIZE],
    power: [u8; DECK_SIZE],
    class_mask: [u32; 5],
    /// Cards of each class, strongest first.
    order: [Vec<u8>; 5],
}

impl Layout {
    fn new(game: GameType) -> Layout {
        let mut l = Layout {
            null: game.is_null(),
            class: [0; DECK_SIZE],
            eyes: [0; DECK_SIZE],
            power: [0; DECK_SIZE],
            class_mask: [0; 5],
            order: Default::default(),
        };
        for c in Card::all() {
            let i = c.index() as usize;
            l.class[i] = card_class(c, game);
            l.eyes[i] = c.eyes() as u8;
            l.power[i] = card_power(c, game);
            l.class_mask[l.class[i] as usize] |= c.bit();
        }
        for (k, o) in l.order.iter_mut().enumerate() {
            let mut v: Vec<u8> = (0..DECK_SIZE as u8).filter(|&i| l.class[i as usize] == k as u8).collect();
            v.sort_by_key(|&i| std::cmp::Reverse(l.power[i as usize]));
            *o = v;
        }
        l
    }

    fn beats(&self, a: u8, b: u8, led: u8) -> bool {
        let (ca, cb) = (self.class[a as usize], self.class[b as usize]);
        if ca == cb {
            return self.power[a as usize] > self.power[b as usize];
        }
        (!self.null && ca == TRUMP) || (ca == led && (self.null || cb != TRUMP))
    }

    fn winner_pos(&self, t: &[u8; 3]) -> usize {
        let led = self.class[t[0] as usize];
        let mut best = 0;
        for i in 1..3 {
            if self.beats(t[i], t[best], led) {
                best = i;
            }
        }
        best
    }

    fn mask_eyes(&self, mut m: u32) -> i32 {
        let mut s = 0;
        while m != 0 {
            s += self.eyes[m.trailing_zeros() as usize] as i32;
            m &= m - 1;
        }
        s
    }
}

/// Exact solver. Keep one instance per thread; the table is reused across solves.
pub struct Solver {
    tt: Tt,
    layout: Option<(GameType, Layout)>,
    declarer: u8,
    nodes: u64,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

/// Search position: remaining cards per seat plus the current trick.
#[derive(Clone, Copy)]
struct Pos {
    hands: [u32; PLAYERS],
    leader: u8,
    trick: [u8; 3],
    n: usize,
}

impl Pos {
    fn from_state(st: &GameState) -> Pos {
        let mut trick = [0u8; 3];
        for (i, c) in st.trick.iter().enumerate() {
            trick[i] = c.index();
        }
        Pos {
            hands: st.hands.map(|h| h.0),
            leader: st.leader,
            trick,
            n: st.trick.len(),
        }
    }

    fn seat(&self) -> u8 {
        ((self.leader as usize + self.n) % PLAYERS) as u8
    }

    fn remaining(&self) -> u32 {
        self.hands[0] | self.hands[1] | self.hands[2]
    }
}

impl Solver {
    pub fn new() -> Solver {
        Solver::with_table_bits(20)
    }

    /// Table with `2^bits` entries.
    pub fn with_table_bits(bits: u32) -> Solver {
        Solver {
            tt: Tt::new(bits),
            layout: None,
            declarer: 0,
            nodes: 0,
        }
    }

    /// Nodes visited since construction.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    fn prepare(&mut self, st: &GameState) {
        let game = st.game();
        if self.layout.as_ref().map(|(g, _)| *g) != Some(game) {
            self.layout = Some((game, Layout::new(game)));
        }
        self.declarer = st.declarer;
        self.tt.clear();
    }

    fn lay(&self) -> &Layout {
        &self.layout.as_ref().expect("prepared").1
    }

    fn check(st: &GameState) -> Result<()> {
        if st.is_finished() {
            return Err(Error::IllegalMove("position is already decided".into()));
        }
        if !st.eyes_conserved() {
            return Err(Error::InvalidDeal("eyes are not conserved".into()));
        }
        let played = st.trick.len();
        let n = st.hands[st.to_move() as usize].len();
        for k in 0..PLAYERS {
            let seat = (st.leader as usize + k) % PLAYERS;
            let expect = if k < played { n.wrapping_sub(1) } else { n };
            if st.hands[seat].len() != expect {
                return Err(Error::InvalidDeal("hand sizes do not fit the trick".into()));
            }
        }
        Ok(())
    }

    /// Whether the declarer can force a win from `st`.
    pub fn can_declarer_win(&mut self, st: &GameState) -> Result<bool> {
        Self::check(st)?;
        self.prepare(st);
        let pos = Pos::from_state(st);
        if st.game().is_null() {
            return Ok(self.null_ply(pos));
        }
        let target = WIN_EYES as i32 - st.declarer_eyes as i32;
        Ok(self.ab_ply(pos, target - 1, target) >= target)
    }

    /// Exact declarer eyes (skat included) under best play from `st`.
    pub fn best_eyes(&mut self, st: &GameState) -> Result<u32> {
        Self::check(st)?;
        self.prepare(st);
        let pos = Pos::from_state(st);
        if st.game().is_null() {
            return Ok(if self.null_ply(pos) { 0 } else { 1 });
        }
        let v = self.ab_ply(pos, -1, TOTAL_EYES as i32 + 1);
        Ok(st.declarer_eyes + v as u32)
    }

    pub fn solve_state(&mut self, st: &GameState) -> Result<SolverVerdict> {
        let best = self.best_eyes(st)?;
        let win = if st.game().is_null() { best == 0 } else { best >= WIN_EYES };
        Ok(SolverVerdict {
            declarer_can_win: win,
            best_eyes: best,
            principal_variation: None,
        })
    }

    /// Like [`Solver::solve_state`], also following one optimal line to the end.
    pub fn solve_with_line(&mut self, st: &GameState) -> Result<SolverVerdict> {
        let mut v = self.solve_state(st)?;
        let mut line = Vec::new();
        let mut cur = st.clone();
        while !cur.is_finished() {
            let moves = self.move_values(&cur, true)?;
            let maximise = cur.to_move() == cur.declarer;
            let key = |m: &MoveValue| m.eyes.unwrap_or(0) as i64 * if cur.game().is_null() { -1 } else { 1 };
            let pick = if maximise {
                moves.iter().max_by_key(|m| (key(m), std::cmp::Reverse(m.card.index())))
            } else {
                moves.iter().min_by_key(|m| (key(m), m.card.index()))
            };
            let card = pick.expect("legal move exists").card;
            line.push(card);
            cur.play(card)?;
        }
        v.principal_variation = Some(line);
        Ok(v)
    }

    /// Values of every legal move of the seat to move, in card order.
    ///
    /// With `exact` the final declarer eyes of each move are computed too
    /// (for null games, 0 or 1 forced declarer tricks).
    pub fn move_values(&mut self, st: &GameState, exact: bool) -> Result<Vec<MoveValue>> {
        Self::check(st)?;
        self.prepare(st);
        let seat = st.to_move();
        let legal = st.legal_moves(seat)?;
        let null = st.game().is_null();
        let mut out = Vec::with_capacity(legal.len());
        for card in legal.iter() {
            let mut pos = Pos::from_state(st);
            pos.hands[seat as usize] &= !card.bit();
            pos.trick[pos.n] = card.index();
            let (wins, eyes) = if null {
                let ok = self.null_after(pos);
                (ok, exact.then_some(if ok { 0 } else { 1 }))
            } else {
                let target = WIN_EYES as i32 - st.declarer_eyes as i32;
                if exact {
                    let v = self.after(pos, -1, TOTAL_EYES as i32 + 1);
                    let e = st.declarer_eyes + v as u32;
                    (e >= WIN_EYES, Some(e))
                } else {
                    (self.after(pos, target - 1, target) >= target, None)
                }
            };
            out.push(MoveValue {
                card,
                declarer_wins: wins,
                eyes,
            });
        }
        Ok(out)
    }

    /// Value after the card at `pos.trick[pos.n]` was played.
    fn after(&mut self, mut pos: Pos, alpha: i32, beta: i32) -> i32 {
        if pos.n == 2 {
            let (winner, e) = self.finish_trick(&pos);
            let hands = pos.hands;
            let next = Pos {
                hands,
                leader: winner,
                trick: [0; 3],
                n: 0,
            };
            if winner == self.declarer {
                e + self.ab_trick(next, alpha - e, beta - e)
            } else {
                self.ab_trick(next, alpha, beta)
            }
        } else {
            pos.n += 1;
            self.ab_ply(pos, alpha, beta)
        }
    }

    fn null_after(&mut self, mut pos: Pos) -> bool {
        if pos.n == 2 {
            let (winner, _) = self.finish_trick(&pos);
            if winner == self.declarer {
                return false;
            }
            self.null_trick(Pos {
                hands: pos.hands,
                leader: winner,
                trick: [0; 3],
                n: 0,
            })
        } else {
            pos.n += 1;
            self.null_ply(pos)
        }
    }

    fn finish_trick(&self, pos: &Pos) -> (u8, i32) {
        let l = self.lay();
        let w = l.winner_pos(&pos.trick);
        let winner = ((pos.leader as usize + w) % PLAYERS) as u8;
        let e = pos.trick.iter().map(|&c| l.eyes[c as usize] as i32).sum();
        (winner, e)
    }

    fn key(pos: &Pos) -> u64 {
        pos.remaining() as u64 | (pos.leader as u64) << 32
    }

    /// Declarer eyes from the remaining cards, at a trick boundary.
    fn ab_trick(&mut self, pos: Pos, mut alpha: i32, mut beta: i32) -> i32 {
        let rem = pos.remaining();
        if rem == 0 {
            return 0;
        }
        let total = self.lay().mask_eyes(rem);
        let (mut lo, mut hi) = (0, total);
        let key = Self::key(&pos);
        if let Some((l, h)) = self.tt.get(key) {
            lo = l as i32;
            hi = h as i32;
        }
        if lo >= beta {
            return lo;
        }
        if hi <= alpha {
            return hi;
        }
        if lo == hi {
            return lo;
        }
        alpha = alpha.max(lo);
        beta = beta.min(hi);
        let v = self.ab_ply(pos, alpha, beta);
        if v <= alpha {
            hi = hi.min(v);
        } else if v >= beta {
            lo = lo.max(v);
        } else {
            lo = v;
            hi = v;
        }
        self.tt.put(key, lo as u8, hi as u8);
        v
    }

    fn ab_ply(&mut self, pos: Pos, mut alpha: i32, mut beta: i32) -> i32 {
        self.nodes += 1;
        let seat = pos.seat();
        let maximise = seat == self.declarer;
        let mut moves = [0u8; 10];
        let count = self.gen_moves(&pos, &mut moves);
        let mut best = if maximise { i32::MIN } else { i32::MAX };
        for &m in &moves[..count] {
            let mut child = pos;
            child.hands[seat as usize] &= !(1u32 << m);
            child.trick[pos.n] = m;
            let v = self.after(child, alpha, beta);
            if maximise {
                best = best.max(v);
                alpha = alpha.max(v);
            } else {
                best = best.min(v);
                beta = beta.min(v);
            }
            if alpha >= beta {
                break;
            }
        }
        best
    }

    /// Whether the declarer can avoid every remaining trick, at a trick boundary.
    fn null_trick(&mut self, pos: Pos) -> bool {
        if pos.remaining() == 0 {
            return true;
        }
        let key = Self::key(&pos);
        if let Some((lo, hi)) = self.tt.get(key) {
            if lo == hi {
                return lo == 1;
            }
        }
        let v = self.null_ply(pos);
        self.tt.put(key, v as u8, v as u8);
        v
    }

    fn null_ply(&mut self, pos: Pos) -> bool {
        self.nodes += 1;
        let seat = pos.seat();
        let declarer = seat == self.declarer;
        let mut moves = [0u8; 10];
        let count = self.gen_moves(&pos, &mut moves);
        for &m in &moves[..count] {
            let mut child = pos;
            child.hands[seat as usize] &= !(1u32 << m);
            child.trick[pos.n] = m;
            let ok = self.null_after(child);
            if declarer && ok {
                return true;
            }
            if !declarer && !ok {
                return false;
            }
        }
        !declarer
    }

    /// Legal moves with equivalent cards collapsed, in search order.
    fn gen_moves(&self, pos: &Pos, out: &mut [u8; 10]) -> usize {
        let l = self.lay();
        let seat = pos.seat() as usize;
        let hand = pos.hands[seat];
        let legal = if pos.n == 0 {
            hand
        } else {
            let f = hand & l.class_mask[l.class[pos.trick[0] as usize] as usize];
            if f == 0 {
                hand
            } else {
                f
            }
        };
        let mut present = pos.remaining();
        for &c in &pos.trick[..pos.n] {
            present |= 1 << c;
        }
        let mut count = 0;
        for (k, order) in l.order.iter().enumerate() {
            if legal & l.class_mask[k] == 0 {
                continue;
            }
            let mut prev_own: Option<u8> = None;
            for &c in order {
                let bit = 1u32 << c;
                if present & bit == 0 {
                    continue;
                }
                if legal & bit == 0 {
                    prev_own = None;
                    continue;
                }
                let same = prev_own.is_some_and(|p| l.null || l.eyes[p as usize] == l.eyes[c as usize]);
                if !same {
                    out[count] = c;
                    count += 1;
                }
                prev_own = Some(c);
            }
        }
        self.order_moves(pos, &mut out[..count]);
        count
    }

    fn order_moves(&self, pos: &Pos, moves: &mut [u8]) {
        let l = self.lay();
        let seat = pos.seat();
        let decl_side = seat == self.declarer;
        if pos.n == 0 {
            if !l.null && decl_side {
                moves.sort_by_key(|&c| (l.class[c as usize] != TRUMP, std::cmp::Reverse(l.power[c as usize])));
            } else if !l.null {
                moves.sort_by_key(|&c| {
                    let trump = l.class[c as usize] == TRUMP;
                    let ace = !trump && l.power[c as usize] == 6;
                    (trump, !ace, l.eyes[c as usize] >= 10, l.power[c as usize])
                });
            } else if decl_side {
                moves.sort_by_key(|&c| l.power[c as usize]);
            } else {
                moves.sort_by_key(|&c| std::cmp::Reverse(l.power[c as usize]));
            }
            return;
        }
        let led = l.class[pos.trick[0] as usize];
        let mut best = 0;
        for i in 1..pos.n {
            if l.beats(pos.trick[i], pos.trick[best], led) {
                best = i;
            }
        }
        let top = pos.trick[best];
        let top_seat = ((pos.leader as usize + best) % PLAYERS) as u8;
        let friend_wins = (top_seat == self.declarer) == decl_side;
        if l.null {
            if decl_side {
                // Highest card still ducking first, then the rest from low.
                moves.sort_by_key(|&c| {
                    let wins = l.beats(c, top, led);
                    (
                        wins,
                        if wins {
                            l.power[c as usize] as i32
                        } else {
                            -(l.power[c as usize] as i32)
                        },
                    )
                });
            } else {
                moves.sort_by_key(|&c| std::cmp::Reverse(l.power[c as usize]));
            }
            return;
        }
        moves.sort_by_key(|&c| {
            let e = l.eyes[c as usize] as i32;
            let p = l.power[c as usize] as i32 + if l.class[c as usize] == TRUMP { 20 } else { 0 };
            if friend_wins && pos.n == 2 {
                (0, -e, p)
            } else if l.beats(c, top, led) {
                (0, p, -e)
            } else {
                (1, e, p)
            }
        });
    }
}

/// Position at the first card of trick 1 after `skat_put` was laid away.
pub fn initial_state(deal: &Deal, declaration: Declaration, declarer: u8, skat_put: CardSet) -> Result<GameState> {
    let d = declarer as usize;
    if d >= PLAYERS {
        return Err(Error::InvalidDeal("declarer seat".into()));
    }
    let mut hands = deal.hands;
    hands[d] = hands[d].union(deal.skat).minus(skat_put);
    if skat_put.len() != 2 || hands[d].len() != crate::cards::HAND_SIZE {
        return Err(Error::InvalidDeal("skat put must be two of the declarer's twelve cards".into()));
    }
    GameState::new(hands, skat_put, declarer, deal.forehand, declaration)
}

/// Solves a dealt game from its first trick.
pub fn solve(deal: &Deal, game: GameType, declarer: u8, skat_put: CardSet) -> Result<SolverVerdict> {
    let st = initial_state(deal, Declaration::plain(game), declarer, skat_put)?;
    Solver::new().solve_state(&st)
}

/// Whether the open-card solver says the declarer of `record` can win.
pub fn predicted_outcome(record: &GameRecord) -> Result<bool> {
    predicted_outcome_with(&mut Solver::new(), record)
}

pub fn predicted_outcome_with(solver: &mut Solver, record: &GameRecord) -> Result<bool> {
    if !record.is_played() {
        return Err(Error::Folded);
    }
    solver.can_declarer_win(&record.initial_state()?)
}

/// Full verdict with one optimal line for the declared game of `record`.
pub fn solve_record(solver: &mut Solver, record: &GameRecord) -> Result<SolverVerdict> {
    if !record.is_played() {
        return Err(Error::Folded);
    }
    solver.solve_with_line(&record.initial_state()?)
}
