//! Multi-index weighted querying.
//!
//! The code is cut into `m` contiguous substrings, each indexed by its own hash table.
//! A query runs one [`BucketEnumerator`] per table. Every round pops the lightest
//! pending substring of each table, probes the popped buckets in ascending order of
//! how much each probe raises the lower bound, and pushes every unseen identifier
//! into a K-size max-heap keyed by its full distance. The search stops as soon as the
//! heap root is strictly below the lower bound on the distance of every code not yet
//! seen, so the result is exactly the linear-scan top-K under (distance, id) order.

use crate::baseline::ChunkLut;
use crate::code::{BinaryCode, CodeSet, QueryContext, WeightTable};
use crate::enumerate::{BucketEnumerator, MAX_ENUM_BITS};
use crate::error::{Error, Result};
use crate::heap::{CandidateHeap, Neighbor};
use crate::table::BucketTable;
use crate::CodeId;

/// A contiguous run of bits `start..start + len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub len: usize,
}

/// Number of substrings from the usual `b / log2(n)` rule, clamped to `1..=b`.
///
/// Also never returns fewer tables than needed to keep each substring within 64 bits;
/// with fewer than two codes the rule is undefined and 1 is returned.
pub fn choose_m(bits: usize, n: usize) -> usize {
    if bits == 0 {
        return 1;
    }
    let m = if n < 2 {
        1
    } else {
        (bits as f64 / (n as f64).log2()).round() as usize
    };
    m.clamp(bits.div_ceil(MAX_ENUM_BITS).max(1), bits)
}

/// Splits `bits` into `m` contiguous spans; the first `bits % m` spans are one bit longer.
pub fn split_spans(bits: usize, m: usize) -> Result<Vec<Span>> {
    if m == 0 || m > bits {
        return Err(Error::argument(format!(
            "substring count m={m} must be in 1..={bits}"
        )));
    }
    let (base, extra) = (bits / m, bits % m);
    let mut spans = Vec::with_capacity(m);
    let mut start = 0;
    for i in 0..m {
        let len = base + usize::from(i < extra);
        spans.push(Span { start, len });
        start += len;
    }
    if spans[0].len > MAX_ENUM_BITS {
        return Err(Error::argument(format!(
            "substrings of {} bits exceed the {MAX_ENUM_BITS}-bit limit; use m >= {}",
            spans[0].len,
            bits.div_ceil(MAX_ENUM_BITS)
        )));
    }
    Ok(spans)
}

/// `f(s)`: sum of the folded weights of a substring, given the span's own context.
pub fn substring_weight(span_ctx: &QueryContext, key: u64) -> f64 {
    span_ctx.key_weight(key)
}

/// The partially-advanced lower bound after the first `probed` tables of `order`
/// have been probed this round: those contribute their new top (`next`), the rest
/// the substring they popped but have not probed yet (`current`).
pub fn stopping_threshold(current: &[f64], next: &[f64], probed: usize, order: &[usize]) -> f64 {
    let mut total = 0.0;
    for (i, &t) in order.iter().enumerate() {
        total += if i < probed { next[t] } else { current[t] };
    }
    total
}

/// Absolute slack that covers the rounding difference between the enumerators'
/// incremental weights and the canonical full-code distance.
pub(crate) fn rounding_slack(ctx: &QueryContext) -> f64 {
    let scale: f64 = ctx
        .folded()
        .iter()
        .map(|&[a, b]| a.abs().max(b.abs()))
        .sum();
    scale * (8 * ctx.bits() + 16) as f64 * f64::EPSILON
}

/// Work counters of a single query.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QueryStats {
    /// Buckets looked up, empty ones included.
    pub buckets_probed: u64,
    /// Identifiers whose full distance was computed.
    pub candidates: u64,
    /// Final lower bound on the distance of unseen codes (infinite once all were seen).
    pub bound: f64,
}

#[derive(Clone, Debug)]
pub struct QueryOutcome {
    pub neighbors: Vec<Neighbor>,
    pub stats: QueryStats,
}

/// Fixed-size bitset over identifiers.
pub(crate) struct SeenSet {
    words: Vec<u64>,
    count: usize,
}

impl SeenSet {
    pub(crate) fn new(n: usize) -> Self {
        SeenSet {
            words: vec![0; n.div_ceil(64)],
            count: 0,
        }
    }

    /// Marks `id`; returns true the first time.
    #[inline]
    pub(crate) fn insert(&mut self, id: CodeId) -> bool {
        let (w, b) = (id as usize / 64, id % 64);
        let fresh = self.words[w] >> b & 1 == 0;
        if fresh {
            self.words[w] |= 1 << b;
            self.count += 1;
        }
        fresh
    }

    pub(crate) fn count(&self) -> usize {
        self.count
    }
}

/// `m` substring hash tables over a stored array of codes.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiIndex {
    spans: Vec<Span>,
    tables: Vec<BucketTable>,
    codes: CodeSet,
}

impl MultiIndex {
    /// Indexes `codes` with `m` substring tables. Identifier `i` is row `i`.
    pub fn build(codes: CodeSet, m: usize) -> Result<Self> {
        if codes.len() > CodeId::MAX as usize {
            return Err(Error::argument("too many codes for 32-bit identifiers"));
        }
        let spans = split_spans(codes.bits(), m)?;
        let mut keys = vec![0u64; codes.len()];
        let tables = spans
            .iter()
            .map(|span| {
                for (id, key) in keys.iter_mut().enumerate() {
                    *key = crate::code::extract_bits(codes.row(id), span.start, span.len);
                }
                BucketTable::build(span.len, &keys)
            })
            .collect();
        Ok(MultiIndex {
            spans,
            tables,
            codes,
        })
    }

    pub fn from_codes(codes: &[BinaryCode], m: usize) -> Result<Self> {
        let bits = codes
            .first()
            .map(BinaryCode::len)
            .ok_or_else(|| Error::argument("cannot infer the code length of an empty list"))?;
        MultiIndex::build(CodeSet::from_codes(bits, codes)?, m)
    }

    /// Reassembles an index from its persisted parts, checking they are consistent.
    pub fn from_parts(codes: CodeSet, spans: Vec<Span>, tables: Vec<BucketTable>) -> Result<Self> {
        let expected = split_spans(codes.bits(), spans.len())?;
        if spans != expected {
            return Err(Error::argument("span table does not match the code length"));
        }
        if tables.len() != spans.len() {
            return Err(Error::argument("one table per span is required"));
        }
        for (t, (table, span)) in tables.iter().zip(&spans).enumerate() {
            if table.postings() != codes.len() {
                return Err(Error::argument(format!(
                    "table {t} holds {} postings for {} codes",
                    table.postings(),
                    codes.len()
                )));
            }
            let mut seen = SeenSet::new(codes.len());
            for (key, ids) in table.sorted_buckets() {
                for &id in ids {
                    let row = codes
                        .as_packed()
                        .get(id as usize * codes.stride()..(id as usize + 1) * codes.stride())
                        .ok_or_else(|| {
                            Error::argument(format!("table {t}: id {id} out of range"))
                        })?;
                    if crate::code::extract_bits(row, span.start, span.len) != key
                        || !seen.insert(id)
                    {
                        return Err(Error::argument(format!(
                            "table {t}: id {id} is filed under the wrong bucket or twice"
                        )));
                    }
                }
            }
        }
        Ok(MultiIndex {
            spans,
            tables,
            codes,
        })
    }

    pub fn bits(&self) -> usize {
        self.codes.bits()
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Number of substring tables.
    pub fn m(&self) -> usize {
        self.spans.len()
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn tables(&self) -> &[BucketTable] {
        &self.tables
    }

    pub fn codes(&self) -> &CodeSet {
        &self.codes
    }

    /// Exact K nearest codes to `q` under the weights `w`.
    pub fn query(&self, q: &BinaryCode, w: &WeightTable, k: usize) -> Result<Vec<Neighbor>> {
        Ok(self.query_with_stats(q, w, k)?.neighbors)
    }

    pub fn query_with_stats(
        &self,
        q: &BinaryCode,
        w: &WeightTable,
        k: usize,
    ) -> Result<QueryOutcome> {
        if q.len() != self.bits() {
            return Err(Error::dimension(self.bits(), q.len()));
        }
        let ctx = QueryContext::new(q, w)?;
        self.query_context(&ctx, k)
    }

    /// Runs the search from a prepared query context.
    pub fn query_context(&self, ctx: &QueryContext, k: usize) -> Result<QueryOutcome> {
        if k == 0 {
            return Err(Error::argument("K must be at least 1"));
        }
        if ctx.bits() != self.bits() {
            return Err(Error::dimension(self.bits(), ctx.bits()));
        }
        let n = self.len();
        let target = k.min(n);
        let mut stats = QueryStats {
            bound: f64::NEG_INFINITY,
            ..QueryStats::default()
        };
        if n == 0 {
            stats.bound = f64::INFINITY;
            return Ok(QueryOutcome {
                neighbors: Vec::new(),
                stats,
            });
        }

        let lut = ChunkLut::new(ctx);
        let slack = rounding_slack(ctx);
        let m = self.m();
        let mut enumerators = self
            .spans
            .iter()
            .map(|s| BucketEnumerator::new(&ctx.span(s.start, s.len)?))
            .collect::<Result<Vec<_>>>()?;

        let mut heap = CandidateHeap::new(target);
        let mut seen = SeenSet::new(n);
        let mut popped: Vec<Option<u64>> = vec![None; m];
        let mut current = vec![0.0; m];
        let mut next = vec![0.0; m];
        let mut order: Vec<usize> = (0..m).collect();
        let mut gains = vec![0.0; m];

        'rounds: loop {
            for (t, e) in enumerators.iter_mut().enumerate() {
                match e.next_bucket() {
                    Some(bucket) => {
                        popped[t] = Some(bucket.key);
                        current[t] = bucket.weight;
                        next[t] = e.peek_weight().unwrap_or(f64::INFINITY);
                        gains[t] = next[t] - current[t];
                    }
                    None => {
                        popped[t] = None;
                        current[t] = f64::INFINITY;
                        next[t] = f64::INFINITY;
                        gains[t] = f64::INFINITY;
                    }
                }
            }
            if popped.iter().all(Option::is_none) {
                break;
            }
            order.sort_by(|&a, &b| gains[a].total_cmp(&gains[b]).then(a.cmp(&b)));

            for j in 0..m {
                let t = order[j];
                if let Some(key) = popped[t] {
                    stats.buckets_probed += 1;
                    for &id in self.tables[t].get(key) {
                        if seen.insert(id) {
                            stats.candidates += 1;
                            let distance = lut.distance(self.codes.row(id as usize));
                            heap.push(Neighbor::new(id, distance));
                        }
                    }
                }
                if seen.count() == n {
                    stats.bound = f64::INFINITY;
                    break 'rounds;
                }
                stats.bound = stopping_threshold(&current, &next, j + 1, &order);
                if heap.len() == target {
                    let root = heap.root().expect("heap is non-empty").distance;
                    if root < stats.bound - slack {
                        break 'rounds;
                    }
                }
            }
        }

        Ok(QueryOutcome {
            neighbors: heap.into_sorted(),
            stats,
        })
    }
}
