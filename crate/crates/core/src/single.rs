//! Querying a single hash table keyed by the full code.

use crate::code::{BinaryCode, CodeSet, QueryContext, WeightTable};
use crate::enumerate::BucketEnumerator;
use crate::error::{Error, Result};
use crate::heap::Neighbor;
use crate::multi::{rounding_slack, QueryOutcome, QueryStats};
use crate::table::BucketTable;
use crate::CodeId;

/// Longest code accepted by [`SingleIndexTable`]; longer codes need substring tables.
pub const SINGLE_MAX_BITS: usize = 32;

/// One bucket per distinct code, holding the ids of all codes equal to it.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleIndexTable {
    bits: usize,
    n: usize,
    table: BucketTable,
}

impl SingleIndexTable {
    pub fn build(codes: &CodeSet) -> Result<Self> {
        let bits = codes.bits();
        if bits > SINGLE_MAX_BITS {
            return Err(Error::UnsupportedLength {
                bits,
                max: SINGLE_MAX_BITS,
            });
        }
        if codes.len() > CodeId::MAX as usize {
            return Err(Error::argument("too many codes for 32-bit identifiers"));
        }
        let keys: Vec<u64> = (0..codes.len())
            .map(|i| crate::code::extract_bits(codes.row(i), 0, bits))
            .collect();
        Ok(SingleIndexTable {
            bits,
            n: codes.len(),
            table: BucketTable::build(bits, &keys),
        })
    }

    /// Builds from a list of codes that must share one length.
    pub fn from_codes(bits: usize, codes: &[BinaryCode]) -> Result<Self> {
        SingleIndexTable::build(&CodeSet::from_codes(bits, codes)?)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Ids stored under `code`, in insertion order.
    pub fn bucket(&self, code: &BinaryCode) -> &[CodeId] {
        match code.key() {
            Some(key) if code.len() == self.bits => self.table.get(key),
            _ => &[],
        }
    }

    pub fn table(&self) -> &BucketTable {
        &self.table
    }

    pub fn query(&self, q: &BinaryCode, w: &WeightTable, k: usize) -> Result<Vec<Neighbor>> {
        Ok(self.query_with_stats(q, w, k)?.neighbors)
    }

    /// Probes buckets lightest-first until K ids are collected, then keeps probing
    /// while the next bucket could still tie with the K-th distance.
    pub fn query_with_stats(
        &self,
        q: &BinaryCode,
        w: &WeightTable,
        k: usize,
    ) -> Result<QueryOutcome> {
        if k == 0 {
            return Err(Error::argument("K must be at least 1"));
        }
        if q.len() != self.bits {
            return Err(Error::dimension(self.bits, q.len()));
        }
        let ctx = QueryContext::new(q, w)?;
        let slack = rounding_slack(&ctx);
        let target = k.min(self.n);
        let mut enumerator = BucketEnumerator::new(&ctx)?;
        let mut found: Vec<Neighbor> = Vec::with_capacity(target);
        let mut stats = QueryStats::default();

        while found.len() < target {
            let Some(bucket) = enumerator.next_bucket() else {
                break;
            };
            stats.buckets_probed += 1;
            let ids = self.table.get(bucket.key);
            if !ids.is_empty() {
                let distance = ctx.key_weight(bucket.key);
                found.extend(ids.iter().map(|&id| Neighbor::new(id, distance)));
            }
        }
        found.sort_by(Neighbor::rank_cmp);

        if let Some(&kth) = found.get(target.wrapping_sub(1)) {
            while let Some(weight) = enumerator.peek_weight() {
                if kth.distance < weight - slack {
                    break;
                }
                let bucket = enumerator.next_bucket().expect("peeked");
                stats.buckets_probed += 1;
                let ids = self.table.get(bucket.key);
                if !ids.is_empty() {
                    let distance = ctx.key_weight(bucket.key);
                    found.extend(ids.iter().map(|&id| Neighbor::new(id, distance)));
                }
            }
            found.sort_by(Neighbor::rank_cmp);
        }
        found.truncate(target);
        stats.candidates = found.len() as u64;
        stats.bound = enumerator.peek_weight().unwrap_or(f64::INFINITY);
        Ok(QueryOutcome {
            neighbors: found,
            stats,
        })
    }
}
