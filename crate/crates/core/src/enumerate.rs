//! Best-first enumeration of table buckets.
//!
//! Every bucket is described by the set of *ranked positions* at which it differs from
//! the minimal code, where ranked position `r` is the bit with the `r`-th smallest
//! flip cost. Starting from the empty set, two successor rules generate each set
//! exactly once:
//!
//! * [`Ranking::operation1`] flips the ranked position right after the rightmost
//!   changed one (or position 0 for the empty set);
//! * [`Ranking::operation2`] moves the rightmost changed position one step right.
//!
//! Both rules never decrease the weight, so a min-priority queue seeded with the empty
//! set pops buckets in non-decreasing weight order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::code::{BinaryCode, QueryContext};
use crate::error::{Error, Result};

/// Longest code (or substring) a single enumerator can rank.
pub const MAX_ENUM_BITS: usize = 64;

/// Flip costs of a context in ranked order, plus the bucket-key masks they toggle.
#[derive(Clone, Debug)]
pub struct Ranking {
    bits: usize,
    base_weight: f64,
    minimal_key: u64,
    deltas: Vec<f64>,
    flips: Vec<u64>,
}

impl Ranking {
    pub fn new(ctx: &QueryContext) -> Result<Self> {
        if ctx.bits() > MAX_ENUM_BITS {
            return Err(Error::UnsupportedLength {
                bits: ctx.bits(),
                max: MAX_ENUM_BITS,
            });
        }
        let order = ctx.order();
        Ok(Ranking {
            bits: ctx.bits(),
            base_weight: ctx.base_weight(),
            minimal_key: ctx.minimal().key().expect("checked above"),
            deltas: order.iter().map(|&i| ctx.deltas()[i]).collect(),
            flips: order.iter().map(|&i| 1u64 << i).collect(),
        })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// The pattern with no changed bits: the minimal code itself.
    pub fn root(&self) -> ChangePattern {
        ChangePattern {
            changed: 0,
            prefix: self.base_weight,
            weight: self.base_weight,
            key: self.minimal_key,
        }
    }

    /// Changes the unchanged position right next to the rightmost changed one.
    pub fn operation1(&self, p: &ChangePattern) -> Option<ChangePattern> {
        let next = match p.rightmost() {
            None => 0,
            Some(r) => r + 1,
        };
        if next >= self.bits {
            return None;
        }
        Some(ChangePattern {
            changed: p.changed | (1 << next),
            prefix: p.weight,
            weight: p.weight + self.deltas[next],
            key: p.key ^ self.flips[next],
        })
    }

    /// Moves the rightmost changed position one step to the right.
    pub fn operation2(&self, p: &ChangePattern) -> Option<ChangePattern> {
        let r = p.rightmost()?;
        if r + 1 >= self.bits {
            return None;
        }
        Some(ChangePattern {
            changed: p.changed ^ (1 << r) ^ (1 << (r + 1)),
            prefix: p.prefix,
            weight: p.prefix + self.deltas[r + 1],
            key: p.key ^ self.flips[r] ^ self.flips[r + 1],
        })
    }

    /// Weight of an arbitrary set of ranked positions, folded in ascending rank
    /// order from the base weight. This is the value the queue carries for it.
    pub fn pattern_weight(&self, changed: u64) -> f64 {
        let mut weight = self.base_weight;
        for r in 0..self.bits {
            if changed >> r & 1 == 1 {
                weight += self.deltas[r];
            }
        }
        weight
    }
}

/// A set of changed ranked positions, with its cached weight and bucket key.
///
/// `prefix` is the weight without the rightmost changed position, which lets
/// operation 2 replace that term instead of subtracting it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChangePattern {
    changed: u64,
    prefix: f64,
    weight: f64,
    key: u64,
}

impl ChangePattern {
    /// Bitmask of changed ranked positions (bit `r` set = position `r` changed).
    pub fn changed(&self) -> u64 {
        self.changed
    }

    pub fn changed_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(|r| self.changed >> r & 1 == 1)
    }

    pub fn rightmost(&self) -> Option<usize> {
        (self.changed != 0).then(|| 63 - self.changed.leading_zeros() as usize)
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Integer key of the bucket this pattern denotes.
    pub fn key(&self) -> u64 {
        self.key
    }
}

#[derive(Debug)]
struct Queued(ChangePattern);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Reversed so that `BinaryHeap` pops the smallest (weight, key) first.
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .weight
            .total_cmp(&self.0.weight)
            .then_with(|| other.0.key.cmp(&self.0.key))
    }
}

/// A bucket index together with its weighted distance to the query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bucket {
    pub key: u64,
    pub weight: f64,
}

impl Bucket {
    pub fn code(&self, bits: usize) -> BinaryCode {
        BinaryCode::from_key(self.key, bits).expect("enumerated buckets hold at most 64 bits")
    }
}

/// Lazily yields every bucket of a `bits`-bit table in non-decreasing weight order.
/// Equal weights pop in ascending key order.
#[derive(Debug)]
pub struct BucketEnumerator {
    ranking: Ranking,
    queue: BinaryHeap<Queued>,
    emitted: u64,
}

impl BucketEnumerator {
    pub fn new(ctx: &QueryContext) -> Result<Self> {
        Ok(BucketEnumerator::from_ranking(Ranking::new(ctx)?))
    }

    pub fn from_ranking(ranking: Ranking) -> Self {
        let mut queue = BinaryHeap::new();
        queue.push(Queued(ranking.root()));
        BucketEnumerator {
            ranking,
            queue,
            emitted: 0,
        }
    }

    pub fn ranking(&self) -> &Ranking {
        &self.ranking
    }

    /// Pops the lightest pending bucket and queues its successors.
    pub fn next_bucket(&mut self) -> Option<Bucket> {
        let Queued(top) = self.queue.pop()?;
        if let Some(child) = self.ranking.operation1(&top) {
            self.queue.push(Queued(child));
        }
        if let Some(child) = self.ranking.operation2(&top) {
            self.queue.push(Queued(child));
        }
        self.emitted += 1;
        Some(Bucket {
            key: top.key,
            weight: top.weight,
        })
    }

    /// Weight of the bucket the next call to [`next_bucket`](Self::next_bucket) returns.
    pub fn peek_weight(&self) -> Option<f64> {
        self.queue.peek().map(|q| q.0.weight)
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }
}

impl Iterator for BucketEnumerator {
    type Item = Bucket;

    fn next(&mut self) -> Option<Bucket> {
        self.next_bucket()
    }
}
