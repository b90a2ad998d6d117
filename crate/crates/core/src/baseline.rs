//! Reference methods: the exhaustive lookup-table scan and Hamming-first multi-index
//! hashing with weighted re-ranking.

use crate::code::{byte_len, hamming_packed, BinaryCode, CodeSet, QueryContext, WeightTable};
use crate::error::{Error, Result};
use crate::heap::{CandidateHeap, Neighbor};
use crate::multi::{MultiIndex, QueryOutcome, QueryStats, SeenSet};
use crate::CodeId;

/// Per-byte partial sums of the folded weights: `table[c * 256 + v]` is the weight of
/// chunk `c` when its byte equals `v`.
#[derive(Clone, Debug)]
pub struct ChunkLut {
    chunks: usize,
    table: Vec<f64>,
}

impl ChunkLut {
    pub fn new(ctx: &QueryContext) -> Self {
        let bits = ctx.bits();
        let chunks = byte_len(bits);
        let folded = ctx.folded();
        let mut table = vec![0.0; chunks * 256];
        for c in 0..chunks {
            let start = c * 8;
            let end = (start + 8).min(bits);
            for v in 0..256usize {
                let mut partial = 0.0;
                for i in start..end {
                    partial += folded[i][(v >> (i - start)) & 1];
                }
                table[c * 256 + v] = partial;
            }
        }
        ChunkLut { chunks, table }
    }

    pub fn chunks(&self) -> usize {
        self.chunks
    }

    /// Distance of a packed code; identical to [`QueryContext::distance`].
    #[inline]
    pub fn distance(&self, packed: &[u8]) -> f64 {
        debug_assert_eq!(packed.len(), self.chunks);
        let mut total = 0.0;
        for (c, &byte) in packed.iter().enumerate() {
            total += self.table[c * 256 + byte as usize];
        }
        total
    }
}

/// Exhaustive top-K by (distance, id); the ground truth for every exact method.
pub fn linear_scan_topk(
    codes: &CodeSet,
    q: &BinaryCode,
    w: &WeightTable,
    k: usize,
) -> Result<Vec<Neighbor>> {
    if q.len() != codes.bits() {
        return Err(Error::dimension(codes.bits(), q.len()));
    }
    let ctx = QueryContext::new(q, w)?;
    linear_scan_context(codes, &ctx, k)
}

pub fn linear_scan_context(codes: &CodeSet, ctx: &QueryContext, k: usize) -> Result<Vec<Neighbor>> {
    if k == 0 {
        return Err(Error::argument("K must be at least 1"));
    }
    if ctx.bits() != codes.bits() {
        return Err(Error::dimension(codes.bits(), ctx.bits()));
    }
    let lut = ChunkLut::new(ctx);
    let mut heap = CandidateHeap::new(k.min(codes.len()));
    for (id, row) in codes.as_packed().chunks_exact(codes.stride()).enumerate() {
        let distance = lut.distance(row);
        if heap.may_admit(distance) {
            heap.push(Neighbor::new(id as CodeId, distance));
        }
    }
    Ok(heap.into_sorted())
}

/// All masks of `len` bits with exactly `ones` bits set, in increasing order.
fn masks_with_ones(len: usize, ones: usize) -> impl Iterator<Item = u64> {
    let limit: u128 = 1u128 << len;
    let mut state: Option<u128> = (ones <= len).then(|| (1u128 << ones) - 1);
    std::iter::from_fn(move || {
        let x = state?;
        state = if x == 0 {
            None
        } else {
            // Gosper's hack: next integer with the same popcount.
            let c = x & x.wrapping_neg();
            let r = x + c;
            let next = (((r ^ x) >> 2) / c) | r;
            (next < limit).then_some(next)
        };
        Some(x as u64)
    })
}

/// Hamming-first search on the substring tables, re-ranked by weighted distance.
///
/// The Hamming radius grows one table at a time; after probing radius `s` in tables
/// `0..=t` every code within full Hamming distance `m * s + t` has been seen. Growth
/// stops at the first radius `R` with at least K codes within it, and those codes
/// (all of them, the whole level) are ranked by weighted distance. Not exact for
/// non-uniform weights: a code beyond `R` can be closer in the weighted metric.
pub fn mih_weighted_topk(
    ix: &MultiIndex,
    q: &BinaryCode,
    w: &WeightTable,
    k: usize,
) -> Result<Vec<Neighbor>> {
    Ok(mih_weighted_with_stats(ix, q, w, k)?.neighbors)
}

pub fn mih_weighted_with_stats(
    ix: &MultiIndex,
    q: &BinaryCode,
    w: &WeightTable,
    k: usize,
) -> Result<QueryOutcome> {
    if k == 0 {
        return Err(Error::argument("K must be at least 1"));
    }
    if q.len() != ix.bits() {
        return Err(Error::dimension(ix.bits(), q.len()));
    }
    let ctx = QueryContext::new(q, w)?;
    let n = ix.len();
    let target = k.min(n);
    let codes = ix.codes();
    let mut stats = QueryStats::default();
    let mut seen = SeenSet::new(n);
    let mut found: Vec<(CodeId, u32)> = Vec::new();
    let mut per_distance = vec![0usize; ix.bits() + 1];

    let longest = ix.spans().iter().map(|s| s.len).max().unwrap_or(0);
    let mut radius = None;
    'grow: for s in 0..=longest {
        for (t, span) in ix.spans().iter().enumerate() {
            let query_key = q.substring_key(span.start, span.len);
            for mask in masks_with_ones(span.len, s) {
                stats.buckets_probed += 1;
                for &id in ix.tables()[t].get(query_key ^ mask) {
                    if seen.insert(id) {
                        let h = hamming_packed(q.as_bytes(), codes.row(id as usize));
                        per_distance[h as usize] += 1;
                        found.push((id, h));
                    }
                }
            }
            if seen.count() == n {
                // Every distance is known: take the smallest level holding K codes.
                let mut cumulative = 0;
                radius = per_distance.iter().position(|&c| {
                    cumulative += c;
                    cumulative >= target
                });
                break 'grow;
            }
            let complete = ix.m() * s + t;
            let within: usize = per_distance[..=complete.min(ix.bits())].iter().sum();
            if within >= target {
                radius = Some(complete);
                break 'grow;
            }
        }
    }
    let radius = radius.unwrap_or(ix.bits()) as u32;

    stats.candidates = found.len() as u64;
    let lut = ChunkLut::new(&ctx);
    let mut verified: Vec<Neighbor> = found
        .into_iter()
        .filter(|&(_, h)| h <= radius)
        .map(|(id, _)| Neighbor::new(id, lut.distance(codes.row(id as usize))))
        .collect();
    verified.sort_by(Neighbor::rank_cmp);
    verified.truncate(target);
    stats.bound = f64::NAN;
    Ok(QueryOutcome {
        neighbors: verified,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn code(s: &str) -> BinaryCode {
        s.parse().unwrap()
    }

    #[test]
    fn gosper_masks() {
        let masks: Vec<u64> = masks_with_ones(4, 2).collect();
        assert_eq!(masks, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(masks_with_ones(5, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(masks_with_ones(3, 3).collect::<Vec<_>>(), vec![0b111]);
        assert_eq!(masks_with_ones(3, 4).count(), 0);
        assert_eq!(masks_with_ones(64, 1).count(), 64);
        assert_eq!(masks_with_ones(64, 64).collect::<Vec<_>>(), vec![u64::MAX]);
    }

    #[test]
    fn lut_matches_context_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for bits in [1usize, 7, 8, 13, 64, 200] {
            let w = WeightTable::new(
                (0..bits)
                    .map(|_| [rng.random_range(0.0..2.0), rng.random_range(0.0..2.0)])
                    .collect(),
            )
            .unwrap();
            let q = BinaryCode::from_bools(&(0..bits).map(|_| rng.random()).collect::<Vec<_>>())
                .unwrap();
            let ctx = QueryContext::new(&q, &w).unwrap();
            let lut = ChunkLut::new(&ctx);
            for _ in 0..50 {
                let g =
                    BinaryCode::from_bools(&(0..bits).map(|_| rng.random()).collect::<Vec<_>>())
                        .unwrap();
                assert_eq!(lut.distance(g.as_bytes()), ctx.distance(&g).unwrap());
            }
        }
    }

    #[test]
    fn linear_scan_examples() {
        let codes = CodeSet::from_codes(4, &[code("0110"), code("0010"), code("1001")]).unwrap();
        let w = WeightTable::from_mismatch_costs(&[0.4, 0.1, 0.3, 0.2]).unwrap();
        let q = code("0110");
        assert_eq!(
            linear_scan_topk(&codes, &q, &w, 2).unwrap(),
            vec![Neighbor::new(0, 0.0), Neighbor::new(1, 0.1)]
        );
        let all = linear_scan_topk(&codes, &q, &w, 10).unwrap();
        assert_eq!(all.iter().map(|n| n.id).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert!(linear_scan_topk(&codes, &q, &w, 0).is_err());
        assert!(linear_scan_topk(&codes, &code("011"), &WeightTable::unit(3).unwrap(), 1).is_err());
    }

    #[test]
    fn mih_misses_light_far_code() {
        // Bits 0..3 are nearly free, the rest cost 1.0 each.
        let bits = 16;
        let mut costs = vec![1.0; bits];
        costs[..3].fill(0.01);
        let w = WeightTable::from_mismatch_costs(&costs).unwrap();
        let q = BinaryCode::zeros(bits).unwrap();
        let mut codes = Vec::new();
        let mut far = q;
        for i in 0..3 {
            far.flip(i);
        }
        codes.push(far);
        for i in 3..bits {
            let mut c = q;
            c.flip(i);
            codes.push(c);
        }
        let ix = MultiIndex::from_codes(&codes, 2).unwrap();
        let mih = mih_weighted_topk(&ix, &q, &w, 1).unwrap();
        assert_eq!(mih[0].distance, 1.0);
        let exact = ix.query(&q, &w, 1).unwrap();
        assert_eq!(exact[0].id, 0);
        assert!((exact[0].distance - 0.03).abs() < 1e-12);
    }

    #[test]
    fn mih_candidate_set_is_the_complete_hamming_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..30 {
            let bits = 12 + trial % 9;
            let n = 500;
            let codes: Vec<BinaryCode> = (0..n)
                .map(|_| BinaryCode::from_key(rng.random::<u64>(), bits).unwrap())
                .collect();
            let m = 1 + trial % 3;
            let ix = MultiIndex::from_codes(&codes, m).unwrap();
            let q = BinaryCode::from_key(rng.random::<u64>(), bits).unwrap();
            let w = WeightTable::new(
                (0..bits)
                    .map(|_| [0.0, rng.random_range(0.5..1.5)])
                    .collect(),
            )
            .unwrap();
            let k = rng.random_range(1..30);

            // Oracle: smallest radius holding K codes, then weighted sort of that level.
            let h: Vec<u32> = codes
                .iter()
                .map(|c| crate::code::hamming_distance(&q, c).unwrap())
                .collect();
            let radius = (0..=bits as u32)
                .find(|&r| h.iter().filter(|&&d| d <= r).count() >= k)
                .unwrap();
            let ctx = QueryContext::new(&q, &w).unwrap();
            let mut expected: Vec<Neighbor> = (0..n)
                .filter(|&i| h[i] <= radius)
                .map(|i| Neighbor::new(i as CodeId, ctx.distance(&codes[i]).unwrap()))
                .collect();
            expected.sort_by(Neighbor::rank_cmp);
            expected.truncate(k);

            let out = mih_weighted_with_stats(&ix, &q, &w, k).unwrap();
            assert_eq!(out.neighbors, expected);
        }
    }

    #[test]
    fn mih_k_above_n() {
        let codes = [code("0110"), code("1111"), code("0000")];
        let ix = MultiIndex::from_codes(&codes, 2).unwrap();
        let w = WeightTable::from_mismatch_costs(&[0.4, 0.1, 0.3, 0.2]).unwrap();
        let out = mih_weighted_topk(&ix, &code("0110"), &w, 10).unwrap();
        let set = CodeSet::from_codes(4, &codes).unwrap();
        assert_eq!(out, linear_scan_topk(&set, &code("0110"), &w, 10).unwrap());
    }
}
