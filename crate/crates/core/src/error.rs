use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid card code {0}")]
    InvalidCard(i64),

    #[error("invalid deal: {0}")]
    InvalidDeal(String),

    #[error("invalid deal spec: {players} players, {deck} cards")]
    InvalidDealSpec { players: u32, deck: u32 },

    #[error("invalid game code {0}")]
    InvalidGameCode(i64),

    #[error("illegal move: {0}")]
    IllegalMove(String),

    #[error("game not finished")]
    Unfinished,

    #[error("incomplete trick")]
    IncompleteTrick,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("format: {0}")]
    Format(String),

    #[error("field {field} value {value} outside domain 0..{domain}")]
    OutOfDomain { field: usize, value: u64, domain: u64 },

    #[error("hash key {key} outside capacity {capacity}")]
    KeyOutOfRange { key: u64, capacity: u64 },

    #[error("schema: {0}")]
    Schema(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("records not sorted by id at position {0}")]
    Unsorted(usize),

    #[error("played game {0} has no matching deal")]
    Alignment(u64),

    #[error("missing context: {0}")]
    MissingContext(&'static str),

    #[error("folded game has no outcome to predict")]
    Folded,

    #[error("config: {0}")]
    Config(String),

    #[error("tables: {0}")]
    Tables(String),
}
