//! # wham
//!
//! Exact K-nearest-neighbor search over binary codes under a *weighted* Hamming
//! distance, where every bit carries its own cost for agreeing and for disagreeing
//! with the query.
//!
//! The main entry point is [`MultiIndex`]: the codes are split into `m` substrings,
//! each substring gets a hash table, and a query walks the buckets of every table in
//! best-first weight order ([`BucketEnumerator`]) while merging candidates into a
//! K-size max-heap. The search is non-exhaustive, yet it returns exactly what a linear
//! scan returns, including the order of ties (distance first, then id).
//!
//! ```
//! use wham::{CodeSet, MultiIndex, WeightTable};
//!
//! let codes: Vec<wham::BinaryCode> = ["0110", "0010", "1001", "0111"]
//!     .iter()
//!     .map(|s| s.parse().unwrap())
//!     .collect();
//! let index = MultiIndex::build(CodeSet::from_codes(4, &codes)?, 2)?;
//! let weights = WeightTable::from_mismatch_costs(&[0.4, 0.1, 0.3, 0.2])?;
//!
//! let top = index.query(&"0110".parse()?, &weights, 2)?;
//! assert_eq!(top[0].id, 0);
//! assert_eq!(top[1].id, 1);
//! # Ok::<(), wham::Error>(())
//! ```
//!
//! Besides the engine, the crate ships the comparison methods ([`baseline`]), file
//! formats and dataset readers ([`io`]), seeded fixtures ([`fixtures`]), an
//! evaluation harness ([`eval`]), a self-check suite ([`verify`]) and the command-line
//! front end ([`cli`]) behind the `wham` binary. The `examples/` directory of this
//! crate has one runnable program per capability.

pub mod baseline;
pub mod cli;
pub mod code;
pub mod enumerate;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod heap;
pub mod io;
pub mod multi;
pub mod single;
pub mod table;
pub mod verify;

/// Identifier of a stored code: its 0-based position in insertion order.
pub type CodeId = u32;

pub use baseline::{linear_scan_topk, mih_weighted_topk, ChunkLut};
pub use code::{
    hamming_distance, weighted_distance, BinaryCode, CodeSet, QueryContext, WeightTable, MAX_BITS,
};
pub use enumerate::{Bucket, BucketEnumerator, ChangePattern, Ranking};
pub use error::{Error, Result};
pub use heap::{CandidateHeap, Neighbor};
pub use multi::{choose_m, MultiIndex, QueryOutcome, QueryStats, Span};
pub use single::SingleIndexTable;
