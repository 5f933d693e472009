//! Winning tables: per-bucket win statistics keyed by packed feature vectors.
//!
//! Tables are rebuilt from game corpora with [`outer_learning`], combined with
//! [`WinningTable::merge`], and consulted through a [`LayeredTable`] that falls
//! back to a coarser background table for sparse or unseen buckets.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::features::Question;
use crate::pgn::GameRecord;
use crate::phash::{FeatureSchema, FeatureVector, HashKey};

/// Minimum number of games before a bucket answers lookups.
pub const DEFAULT_CONFIDENCE: u64 = 32;

/// Probability reported when not even the background has seen a bucket.
pub const NEUTRAL_PRIOR: f64 = 0.5;

/// Games won and played in one bucket. The win probability is always `won / games`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TableEntry {
    pub won: u64,
    pub games: u64,
}

impl TableEntry {
    pub fn new(won: u64, games: u64) -> Result<TableEntry> {
        if games == 0 || won > games {
            return Err(Error::Tables(format!("invalid counts won={won} games={games}")));
        }
        Ok(TableEntry { won, games })
    }

    pub fn prob(&self) -> f64 {
        self.won as f64 / self.games as f64
    }

    fn add(&mut self, other: TableEntry) {
        self.won += other.won;
        self.games += other.games;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WinningTable {
    question: Question,
    schema: FeatureSchema,
    entries: BTreeMap<HashKey, TableEntry>,
    confidence: u64,
}

impl WinningTable {
    pub fn new(question: Question, schema: FeatureSchema) -> WinningTable {
        WinningTable {
            question,
            schema,
            entries: BTreeMap::new(),
            confidence: DEFAULT_CONFIDENCE,
        }
    }

    /// Empty foreground table for a question.
    pub fn empty(question: Question) -> WinningTable {
        WinningTable::new(question, question.schema().clone())
    }

    pub fn with_confidence(mut self, confidence: u64) -> WinningTable {
        self.confidence = confidence;
        self
    }

    pub fn question(&self) -> Question {
        self.question
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn confidence(&self) -> u64 {
        self.confidence
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: HashKey) -> Option<TableEntry> {
        self.entries.get(&key).copied()
    }

    pub fn get_vector(&self, v: &FeatureVector) -> Result<Option<TableEntry>> {
        Ok(self.get(self.schema.rank(v)?))
    }

    /// Entries in ascending key order, which is lexicographic feature order.
    pub fn iter(&self) -> impl Iterator<Item = (HashKey, TableEntry)> + '_ {
        self.entries.iter().map(|(k, e)| (*k, *e))
    }

    pub fn total_games(&self) -> u64 {
        self.entries.values().map(|e| e.games).sum()
    }

    /// Counts one more observation (with multiplicity `weight`) in bucket `key`.
    pub fn record(&mut self, key: HashKey, won: bool, weight: u64) -> Result<()> {
        if key.0 as u128 >= self.schema.capacity() {
            return Err(Error::KeyOutOfRange {
                key: key.0,
                capacity: self.schema.capacity().min(u64::MAX as u128) as u64,
            });
        }
        if weight == 0 {
            return Ok(());
        }
        let e = self.entries.entry(key).or_default();
        e.games += weight;
        if won {
            e.won += weight;
        }
        Ok(())
    }

    pub fn insert(&mut self, key: HashKey, entry: TableEntry) -> Result<()> {
        TableEntry::new(entry.won, entry.games)?;
        self.schema.unrank(key)?;
        self.entries.insert(key, entry);
        Ok(())
    }

    fn compatible(&self, other: &WinningTable) -> Result<()> {
        if self.question != other.question || self.schema != other.schema {
            return Err(Error::SchemaMismatch(format!("{} vs {}", self.schema.name(), other.schema.name())));
        }
        Ok(())
    }

    /// Adds the counts of `other` bucket by bucket.
    pub fn merge(&self, other: &WinningTable) -> Result<WinningTable> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (k, e) in other.iter() {
            out.entries.entry(k).or_default().add(e);
        }
        Ok(out)
    }

    /// Aggregates the counts onto `schema`, which must be a prefix of this table's schema.
    pub fn project(&self, schema: FeatureSchema) -> Result<WinningTable> {
        let same = |a: &crate::phash::Field, b: &crate::phash::Field| a.name == b.name && a.domain == b.domain;
        if schema.len() > self.schema.len() || !schema.fields().iter().zip(self.schema.fields()).all(|(a, b)| same(a, b)) {
            return Err(Error::SchemaMismatch(format!(
                "{} is not a prefix of {}",
                schema.name(),
                self.schema.name()
            )));
        }
        let dropped: u32 = self.schema.fields()[schema.len()..].iter().map(|f| f.bits).sum();
        let mut out = WinningTable {
            question: self.question,
            schema,
            entries: BTreeMap::new(),
            confidence: self.confidence,
        };
        for (k, e) in self.iter() {
            let pk = HashKey(if dropped >= 64 { 0 } else { k.0 >> dropped });
            out.entries.entry(pk).or_default().add(e);
        }
        Ok(out)
    }

    /// Writes `f_1 .. f_k won games prob` per entry in ascending key order.
    pub fn print<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, e) in self.iter() {
            let f = self.schema.unrank(k)?;
            writeln!(w, "{} {} {} {:.6}", f, e.won, e.games, e.prob())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.print(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn read<R: BufRead>(r: R, question: Question, schema: FeatureSchema) -> Result<WinningTable> {
        let mut t = WinningTable::new(question, schema);
        let k = t.schema.len();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let no = i + 1;
            let err = |msg: String| Error::Parse { line: no, msg };
            if line.trim().is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != k + 3 {
                return Err(err(format!("{} fields, expected {}", toks.len(), k + 3)));
            }
            let nums: Vec<u64> = toks[..k + 2]
                .iter()
                .map(|t| t.parse::<u64>().map_err(|e| err(format!("'{t}': {e}"))))
                .collect::<Result<_>>()?;
            let prob: f64 = toks[k + 2].parse().map_err(|e| err(format!("probability: {e}")))?;
            let fv = FeatureVector(nums[..k].to_vec());
            let key = t.schema.rank(&fv).map_err(|e| err(e.to_string()))?;
            let entry = TableEntry::new(nums[k], nums[k + 1]).map_err(|e| err(e.to_string()))?;
            if (entry.prob() - prob).abs() > 1e-6 {
                return Err(err(format!("probability {prob} disagrees with {}/{}", entry.won, entry.games)));
            }
            if t.entries.insert(key, entry).is_some() {
                return Err(err(format!("duplicate bucket {fv}")));
            }
        }
        Ok(t)
    }

    pub fn read_file(path: &Path, question: Question) -> Result<WinningTable> {
        let f = fs::File::open(path)?;
        WinningTable::read(std::io::BufReader::new(f), question, question.schema().clone())
    }
}

/// Records addressable by game id.
pub trait HasId {
    fn id(&self) -> u64;
}

impl HasId for GameRecord {
    fn id(&self) -> u64 {
        self.id
    }
}

/// One labelled feature vector produced from a game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observation {
    pub features: FeatureVector,
    pub won: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LearningStats {
    /// Final input/output offset, the number of unplayed deals skipped.
    pub offset: usize,
    pub matched: usize,
    pub excluded: usize,
    pub observations: usize,
}

fn check_sorted<R: HasId>(records: &[R]) -> Result<()> {
    for (i, w) in records.windows(2).enumerate() {
        if w[0].id() >= w[1].id() {
            return Err(Error::Unsorted(i + 1));
        }
    }
    Ok(())
}

/// Updates `bias` with the games of `output`, aligned to `input` by id.
///
/// Deals without a played game advance the input/output offset. Games for
/// which `exclude` holds are skipped; every other game contributes the
/// observations returned by `observe`, each counted `weight` times.
pub fn outer_learning_weighted<I, O, E, F>(
    input: &[I],
    output: &[O],
    exclude: E,
    observe: F,
    bias: &WinningTable,
    weight: u64,
) -> Result<(WinningTable, LearningStats)>
where
    I: HasId,
    O: HasId,
    E: Fn(&I, &O) -> bool,
    F: Fn(&I, &O) -> Result<Vec<Observation>>,
{
    check_sorted(input)?;
    check_sorted(output)?;
    let mut table = bias.clone();
    let mut stats = LearningStats::default();
    let mut d = 0usize;
    let mut l = 0usize;
    while l < output.len() {
        let o = &output[l];
        let Some(i) = input.get(l + d) else {
            return Err(Error::Alignment(o.id()));
        };
        if o.id() != i.id() {
            if o.id() < i.id() {
                return Err(Error::Alignment(o.id()));
            }
            d += 1;
            continue;
        }
        l += 1;
        stats.matched += 1;
        if exclude(i, o) {
            stats.excluded += 1;
            continue;
        }
        for obs in observe(i, o)? {
            let key = table.schema.rank(&obs.features)?;
            table.record(key, obs.won, weight)?;
            stats.observations += 1;
        }
    }
    stats.offset = d;
    Ok((table, stats))
}

pub fn outer_learning<I, O, E, F>(
    input: &[I],
    output: &[O],
    exclude: E,
    observe: F,
    bias: &WinningTable,
) -> Result<(WinningTable, LearningStats)>
where
    I: HasId,
    O: HasId,
    E: Fn(&I, &O) -> bool,
    F: Fn(&I, &O) -> Result<Vec<Observation>>,
{
    outer_learning_weighted(input, output, exclude, observe, bias, 1)
}

/// Which layer answered a lookup.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Foreground,
    Background,
    Prior,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lookup {
    pub prob: f64,
    pub games: u64,
    pub source: Source,
}

/// Foreground table with a coarser background over a prefix of its fields.
#[derive(Clone, Debug, PartialEq)]
pub struct LayeredTable {
    foreground: WinningTable,
    background: WinningTable,
}

impl LayeredTable {
    /// Derives the background by aggregating the foreground onto the question's background schema.
    pub fn from_foreground(foreground: WinningTable) -> Result<LayeredTable> {
        let bg = foreground.question().background_schema().clone();
        let background = foreground.project(bg)?;
        Ok(LayeredTable { foreground, background })
    }

    pub fn empty(question: Question) -> LayeredTable {
        LayeredTable::from_foreground(WinningTable::empty(question)).expect("question schemas are consistent")
    }

    pub fn with_confidence(self, confidence: u64) -> LayeredTable {
        LayeredTable {
            foreground: self.foreground.with_confidence(confidence),
            background: self.background.with_confidence(confidence),
        }
    }

    pub fn foreground(&self) -> &WinningTable {
        &self.foreground
    }

    pub fn background(&self) -> &WinningTable {
        &self.background
    }

    pub fn question(&self) -> Question {
        self.foreground.question()
    }

    pub fn lookup(&self, v: &FeatureVector) -> Result<Lookup> {
        if let Some(e) = self.foreground.get_vector(v)? {
            if e.games >= self.foreground.confidence {
                return Ok(Lookup {
                    prob: e.prob(),
                    games: e.games,
                    source: Source::Foreground,
                });
            }
        }
        let keep = self.background.schema.len();
        let pv = FeatureVector(v.0[..keep].to_vec());
        match self.background.get_vector(&pv)? {
            Some(e) if e.games >= self.background.confidence => Ok(Lookup {
                prob: e.prob(),
                games: e.games,
                source: Source::Background,
            }),
            _ => Ok(Lookup {
                prob: NEUTRAL_PRIOR,
                games: 0,
                source: Source::Prior,
            }),
        }
    }

    pub fn prob(&self, v: &FeatureVector) -> Result<f64> {
        Ok(self.lookup(v)?.prob)
    }
}

/// The five question tables a player consults.
#[derive(Clone, Debug, PartialEq)]
pub struct TableSet {
    pub tables: Vec<LayeredTable>,
}

impl TableSet {
    pub fn empty() -> TableSet {
        TableSet {
            tables: Question::ALL.iter().map(|&q| LayeredTable::empty(q)).collect(),
        }
    }

    pub fn from_foregrounds(fg: Vec<WinningTable>) -> Result<TableSet> {
        let mut set = TableSet::empty();
        for t in fg {
            let q = t.question();
            set.tables[q.index()] = LayeredTable::from_foreground(t)?;
        }
        Ok(set)
    }

    pub fn get(&self, q: Question) -> &LayeredTable {
        &self.tables[q.index()]
    }

    pub fn with_confidence(self, confidence: u64) -> TableSet {
        TableSet {
            tables: self.tables.into_iter().map(|t| t.with_confidence(confidence)).collect(),
        }
    }

    pub fn foregrounds(&self) -> Vec<WinningTable> {
        self.tables.iter().map(|t| t.foreground().clone()).collect()
    }

    pub fn total_games(&self) -> u64 {
        self.tables.iter().map(|t| t.foreground().total_games()).sum()
    }

    /// Loads `<question>.table` files from `dir`; missing files give empty tables.
    pub fn load_dir(dir: &Path) -> Result<TableSet> {
        let mut fg = Vec::new();
        for q in Question::ALL {
            let p = dir.join(q.file_name());
            if p.exists() {
                fg.push(WinningTable::read_file(&p, q)?);
            }
        }
        TableSet::from_foregrounds(fg)
    }

    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for t in &self.tables {
            let q = t.question();
            fs::write(dir.join(q.file_name()), t.foreground().to_text())?;
            fs::write(dir.join(format!("{}.schema", q.tag())), q.schema().to_manifest())?;
        }
        Ok(())
    }
}

const CURRENT: &str = "CURRENT";

/// Table versions published under a root directory. Each version lives in its
/// own directory; `CURRENT` names the live one and is replaced by rename.
pub struct TableStore {
    root: PathBuf,
}

impl TableStore {
    pub fn new<P: Into<PathBuf>>(root: P) -> TableStore {
        TableStore { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn version_dir(&self, version: u32) -> PathBuf {
        self.root.join(format!("v{version:04}"))
    }

    pub fn current_version(&self) -> Result<Option<u32>> {
        let p = self.root.join(CURRENT);
        if !p.exists() {
            return Ok(None);
        }
        let s = fs::read_to_string(p)?;
        let v = s
            .trim()
            .trim_start_matches('v')
            .parse()
            .map_err(|_| Error::Tables(format!("bad CURRENT '{}'", s.trim())))?;
        Ok(Some(v))
    }

    pub fn load_current(&self) -> Result<Option<(u32, TableSet)>> {
        match self.current_version()? {
            None => Ok(None),
            Some(v) => Ok(Some((v, TableSet::load_dir(&self.version_dir(v))?))),
        }
    }

    /// Writes the set as `version` and then switches `CURRENT` to it.
    pub fn publish(&self, version: u32, set: &TableSet) -> Result<PathBuf> {
        fs::create_dir_all(&self.root)?;
        let tmp = self.root.join(format!(".tmp-v{version:04}"));
        if tmp.exists() {
            fs::remove_dir_all(&tmp)?;
        }
        set.save_dir(&tmp)?;
        let dest = self.version_dir(version);
        if dest.exists() {
            fs::remove_dir_all(&dest)?;
        }
        fs::rename(&tmp, &dest)?;
        let ptr = self.root.join(".CURRENT.tmp");
        fs::write(&ptr, format!("v{version:04}\n"))?;
        fs::rename(&ptr, self.root.join(CURRENT))?;
        Ok(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone, Debug)]
    struct G {
        id: u64,
        f: u64,
        won: bool,
    }

    impl HasId for G {
        fn id(&self) -> u64 {
            self.id
        }
    }

    fn schema() -> FeatureSchema {
        Question::OpeningSuit.schema().clone()
    }

    fn vec_for(f: u64) -> FeatureVector {
        let mut v = vec![0; 7];
        v[1] = f % 8;
        v[0] = f % 3;
        FeatureVector(v)
    }

    fn observe(_: &G, o: &G) -> Result<Vec<Observation>> {
        Ok(vec![Observation {
            features: vec_for(o.f),
            won: o.won,
        }])
    }

    fn empty() -> WinningTable {
        WinningTable::new(Question::OpeningSuit, schema())
    }

    #[test]
    fn folded_game_advances_offset() {
        let input = vec![
            G { id: 0, f: 1, won: true },
            G { id: 1, f: 2, won: false },
            G { id: 2, f: 3, won: false },
        ];
        let output = vec![input[0].clone(), input[2].clone()];
        let (t, st) = outer_learning(&input, &output, |_, _| false, observe, &empty()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(st.offset, 1);
        assert_eq!(st.matched, 2);
        assert_eq!(t.total_games(), 2);
    }

    #[test]
    fn empty_output_returns_bias() {
        let mut bias = empty();
        bias.record(HashKey(5), true, 3).unwrap();
        let input = vec![G { id: 0, f: 1, won: true }];
        let (t, _) = outer_learning(&input, &[] as &[G], |_, _| false, observe, &bias).unwrap();
        assert_eq!(t, bias);
    }

    #[test]
    fn alignment_and_order_errors() {
        let input = vec![G { id: 0, f: 1, won: true }, G { id: 2, f: 1, won: true }];
        let missing = vec![G { id: 1, f: 1, won: true }];
        assert!(matches!(
            outer_learning(&input, &missing, |_, _| false, observe, &empty()),
            Err(Error::Alignment(1))
        ));
        let beyond = vec![G { id: 3, f: 1, won: true }];
        assert!(matches!(
            outer_learning(&input, &beyond, |_, _| false, observe, &empty()),
            Err(Error::Alignment(3))
        ));
        let unsorted = vec![input[1].clone(), input[0].clone()];
        assert!(matches!(
            outer_learning(&unsorted, &input, |_, _| false, observe, &empty()),
            Err(Error::Unsorted(1))
        ));
    }

    #[test]
    fn exclusion_filters() {
        let input: Vec<G> = (0..10)
            .map(|i| G {
                id: i,
                f: i,
                won: i % 2 == 0,
            })
            .collect();
        let (t, st) = outer_learning(&input, &input, |i, _| i.id >= 5, observe, &empty()).unwrap();
        assert_eq!(t.total_games(), 5);
        assert_eq!(st.excluded, 5);
    }

    #[test]
    fn weighting_scales_counts() {
        let input = vec![G { id: 0, f: 1, won: true }, G { id: 1, f: 1, won: false }];
        let (t, _) = outer_learning_weighted(&input, &input, |_, _| false, observe, &empty(), 3).unwrap();
        let e = t.get_vector(&vec_for(1)).unwrap().unwrap();
        assert_eq!((e.won, e.games), (3, 6));
    }

    #[test]
    fn merge_examples() {
        let mut a = empty();
        a.insert(HashKey(9), TableEntry::new(3, 10).unwrap()).unwrap();
        let mut b = empty();
        b.insert(HashKey(9), TableEntry::new(2, 5).unwrap()).unwrap();
        let m = a.merge(&b).unwrap();
        let e = m.get(HashKey(9)).unwrap();
        assert_eq!((e.won, e.games), (5, 15));
        assert_eq!(e.prob(), 1.0 / 3.0);
        assert_eq!(a.merge(&empty()).unwrap(), a);
        let other = WinningTable::empty(Question::DeclarerGrand);
        assert!(a.merge(&other).is_err());
    }

    #[test]
    fn layered_lookup_rules() {
        let mut fg = empty();
        let dense = FeatureVector(vec![1, 2, 1, 0, 0, 0, 0]);
        let sparse = FeatureVector(vec![1, 2, 1, 0, 1, 1, 1]);
        fg.insert(fg.schema().rank(&dense).unwrap(), TableEntry::new(600, 1000).unwrap())
            .unwrap();
        fg.insert(fg.schema().rank(&sparse).unwrap(), TableEntry::new(3, 3).unwrap())
            .unwrap();
        let lt = LayeredTable::from_foreground(fg).unwrap();
        let l = lt.lookup(&dense).unwrap();
        assert_eq!((l.source, l.prob), (Source::Foreground, 0.6));
        let l = lt.lookup(&sparse).unwrap();
        assert_eq!(l.source, Source::Background);
        assert_eq!(l.prob, 603.0 / 1003.0);
        let absent = FeatureVector(vec![1, 2, 1, 0, 1, 0, 0]);
        assert_eq!(lt.lookup(&absent).unwrap().source, Source::Background);
        let unseen = FeatureVector(vec![2, 7, 1, 1, 1, 1, 1]);
        let l = lt.lookup(&unseen).unwrap();
        assert_eq!((l.source, l.prob), (Source::Prior, NEUTRAL_PRIOR));
    }

    #[test]
    fn text_format() {
        assert!(WinningTable::read("".as_bytes(), Question::OpeningSuit, schema())
            .unwrap()
            .is_empty());
        let mut t = empty();
        t.insert(HashKey(3), TableEntry::new(1, 4).unwrap()).unwrap();
        assert_eq!(t.to_text(), "0 0 0 0 0 1 1 1 4 0.250000\n");
        let back = WinningTable::read(t.to_text().as_bytes(), Question::OpeningSuit, schema()).unwrap();
        assert_eq!(back, t);
        let bad = "0 0 0 0 0 1 1 5 4 1.250000\n";
        assert!(matches!(
            WinningTable::read(bad.as_bytes(), Question::OpeningSuit, schema()),
            Err(Error::Parse { line: 1, .. })
        ));
        let out_of_domain = "3 0 0 0 0 1 1 1 4 0.250000\n";
        assert!(WinningTable::read(out_of_domain.as_bytes(), Question::OpeningSuit, schema()).is_err());
    }

    #[test]
    fn store_publishes_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let store = TableStore::new(dir.path());
        assert!(store.load_current().unwrap().is_none());
        let mut set = TableSet::empty();
        let mut fg = WinningTable::empty(Question::DeclarerGrand);
        fg.record(HashKey(77), true, 40).unwrap();
        set.tables[Question::DeclarerGrand.index()] = LayeredTable::from_foreground(fg).unwrap();
        store.publish(1, &set).unwrap();
        let (v, back) = store.load_current().unwrap().unwrap();
        assert_eq!(v, 1);
        assert_eq!(back, set);
        assert!(!dir.path().join(".tmp-v0001").exists());
    }
}
