//! Simultaneous-message-passing protocols for the Hamming distance threshold
//! problem `HAM_{n,d}`: is `|x xor y| > d`?
//!
//! Alice holds `x`, Bob holds `y`; both read public coins derived from a shared
//! seed and each sends one message to a referee. The composed protocol costs
//! `gamma * reps + 2d * w(16 d^2)` bits per party, where the first term is a
//! constant-size gap test and the second a syndrome sketch of a bucket-reduced
//! string.
//!
//! Modules, bottom-up:
//! - [`bits`], [`coins`], [`instance`]: bit strings, shared randomness, the exact predicate.
//! - [`gap_test`]: biased inner-product test for distance `<= d` versus `> 2d`.
//! - [`bucket`]: random even partition into `16 d^2` buckets with per-bucket parity.
//! - [`field`], [`inner_code`]: GF(2^w) tables and the syndrome protocol.
//! - [`protocol`]: composition, referee, transcripts and cost accounting.
//! - [`harness`]: Monte Carlo estimation, cost sweeps, closed-form bounds.

pub mod bits;
pub mod bucket;
pub mod coins;
pub mod error;
pub mod field;
pub mod harness;
pub mod inner_code;
pub mod instance;
pub mod protocol;

pub use bits::{hamming_distance, BitString};
pub use coins::{draw_biased_bit, trial_seed, CoinStream};
pub use error::{Error, Result};
pub use instance::{gen_instance, ham_predicate, Instance, Verdict};
pub use protocol::{run_protocol, ProtocolConfig, Transcript};
