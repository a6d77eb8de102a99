//! Unique maximum scores in random round-robin tournaments.
//!
//! * [`tournament`]: outcome matrices, score multisets and frequency tables.
//! * [`exact`]: exact frequency tables and the probability `r_n` that the top
//!   score is attained by a single player.
//! * [`oracle`]: brute-force enumeration of all labeled tournaments for small `n`.
//! * [`binomial`] and [`bounds`]: fair-binomial masses and tails, thresholds
//!   for the maximum score, and the moment and tail bounds built on them.
//! * [`sim`]: seeded, schedule-independent Monte-Carlo estimation.
//! * [`table`]: the text file format for frequency tables.
//! * [`verify`]: the invariant checks behind `tourney verify`.

pub mod binomial;
pub mod bounds;
pub mod error;
pub mod exact;
pub mod oracle;
pub mod rng;
pub mod sim;
pub mod table;
pub mod tournament;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{expand, extend, r_exact, unique_max_count, ExactResult, ExpandOptions};
pub use tournament::{BigCount, FrequencyTable, ScoreMultiset, TournamentMatrix};
