//! Hash-table storage shared by the single- and multi-index structures.

use std::collections::HashMap;

use crate::CodeId;

/// Keys of at most this many bits are stored in a dense offset array.
pub const DENSE_MAX_BITS: usize = 20;

/// Buckets of identifiers keyed by a (sub)code of `key_bits` bits.
/// Identifiers inside a bucket keep insertion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BucketTable {
    /// Compressed layout: bucket `k` is `ids[offsets[k]..offsets[k + 1]]`.
    Dense {
        offsets: Vec<u32>,
        ids: Vec<CodeId>,
    },
    Sparse(HashMap<u64, Vec<CodeId>>),
}

impl BucketTable {
    /// Groups `keys[i]` -> id `i`.
    pub fn build(key_bits: usize, keys: &[u64]) -> Self {
        if key_bits <= DENSE_MAX_BITS {
            let size = 1usize << key_bits;
            let mut offsets = vec![0u32; size + 1];
            for &k in keys {
                offsets[k as usize + 1] += 1;
            }
            for i in 0..size {
                offsets[i + 1] += offsets[i];
            }
            let mut cursor = offsets.clone();
            let mut ids = vec![0; keys.len()];
            for (id, &k) in keys.iter().enumerate() {
                let slot = &mut cursor[k as usize];
                ids[*slot as usize] = id as CodeId;
                *slot += 1;
            }
            BucketTable::Dense { offsets, ids }
        } else {
            let mut map: HashMap<u64, Vec<CodeId>> = HashMap::new();
            for (id, &k) in keys.iter().enumerate() {
                map.entry(k).or_default().push(id as CodeId);
            }
            BucketTable::Sparse(map)
        }
    }

    /// Rebuilds a table from explicit buckets (used when loading an index).
    pub fn from_buckets(key_bits: usize, buckets: Vec<(u64, Vec<CodeId>)>) -> Self {
        if key_bits <= DENSE_MAX_BITS {
            let size = 1usize << key_bits;
            let mut lists: Vec<Vec<CodeId>> = vec![Vec::new(); size];
            for (k, ids) in buckets {
                lists[k as usize].extend(ids);
            }
            let mut offsets = Vec::with_capacity(size + 1);
            let mut ids = Vec::new();
            offsets.push(0);
            for list in lists {
                ids.extend(list);
                offsets.push(ids.len() as u32);
            }
            BucketTable::Dense { offsets, ids }
        } else {
            let mut map: HashMap<u64, Vec<CodeId>> = HashMap::new();
            for (k, ids) in buckets {
                map.entry(k).or_default().extend(ids);
            }
            BucketTable::Sparse(map)
        }
    }

    #[inline]
    pub fn get(&self, key: u64) -> &[CodeId] {
        match self {
            BucketTable::Dense { offsets, ids } => {
                let k = key as usize;
                &ids[offsets[k] as usize..offsets[k + 1] as usize]
            }
            BucketTable::Sparse(map) => map.get(&key).map_or(&[], Vec::as_slice),
        }
    }

    /// Number of non-empty buckets.
    pub fn bucket_count(&self) -> usize {
        match self {
            BucketTable::Dense { offsets, .. } => {
                offsets.windows(2).filter(|w| w[1] > w[0]).count()
            }
            BucketTable::Sparse(map) => map.len(),
        }
    }

    /// Total number of stored identifiers.
    pub fn postings(&self) -> usize {
        match self {
            BucketTable::Dense { ids, .. } => ids.len(),
            BucketTable::Sparse(map) => map.values().map(Vec::len).sum(),
        }
    }

    /// Non-empty buckets in ascending key order.
    pub fn sorted_buckets(&self) -> Vec<(u64, &[CodeId])> {
        match self {
            BucketTable::Dense { offsets, ids } => offsets
                .windows(2)
                .enumerate()
                .filter(|(_, w)| w[1] > w[0])
                .map(|(k, w)| (k as u64, &ids[w[0] as usize..w[1] as usize]))
                .collect(),
            BucketTable::Sparse(map) => {
                let mut v: Vec<_> = map.iter().map(|(&k, ids)| (k, ids.as_slice())).collect();
                v.sort_unstable_by_key(|(k, _)| *k);
                v
            }
        }
    }
}
