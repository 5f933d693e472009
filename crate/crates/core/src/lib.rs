//! Skat engine with self-play driven winning tables.
//!
//! Modules build on each other bottom up: [`cards`] and [`rules`] model the
//! game, [`pgn`] stores it, [`phash`], [`features`] and [`tables`] turn game
//! corpora into win statistics, [`solver`] evaluates open-card positions,
//! [`players`] makes table-driven decisions and [`orchestrator`] runs the
//! self-play and learning loop.

pub mod cards;
pub mod error;
pub mod features;
pub mod orchestrator;
pub mod pgn;
pub mod phash;
pub mod players;
pub mod rules;
pub mod solver;
pub mod tables;

pub use error::{Error, Result};
