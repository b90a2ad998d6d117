//! Bounded max-heap used to keep the K best candidates of a query.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::CodeId;

/// One search result.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub id: CodeId,
    pub distance: f64,
}

impl Neighbor {
    pub fn new(id: CodeId, distance: f64) -> Self {
        Neighbor { id, distance }
    }

    /// Result order: ascending distance, then ascending id.
    pub fn rank_cmp(&self, other: &Neighbor) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then_with(|| self.id.cmp(&other.id))
    }
}

#[derive(Debug)]
struct Ranked(Neighbor);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.rank_cmp(&other.0)
    }
}

/// Keeps the `capacity` smallest neighbors under (distance, id) order.
/// The root is the worst neighbor currently kept.
#[derive(Debug)]
pub struct CandidateHeap {
    capacity: usize,
    heap: BinaryHeap<Ranked>,
}

impl CandidateHeap {
    pub fn new(capacity: usize) -> Self {
        CandidateHeap {
            capacity,
            heap: BinaryHeap::with_capacity(capacity + 1),
        }
    }

    /// Offers a candidate; returns whether it was kept.
    #[inline]
    pub fn push(&mut self, candidate: Neighbor) -> bool {
        if self.heap.len() < self.capacity {
            self.heap.push(Ranked(candidate));
            return true;
        }
        match self.heap.peek() {
            Some(root) if candidate.rank_cmp(&root.0) == Ordering::Less => {
                self.heap.pop();
                self.heap.push(Ranked(candidate));
                true
            }
            _ => false,
        }
    }

    /// Cheap pre-check before computing anything else about a candidate at `distance`.
    #[inline]
    pub fn may_admit(&self, distance: f64) -> bool {
        match self.root() {
            Some(root) if self.is_full() => distance <= root.distance,
            _ => self.capacity > 0,
        }
    }

    pub fn root(&self) -> Option<Neighbor> {
        self.heap.peek().map(|r| r.0)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_full(&self) -> bool {
        self.heap.len() >= self.capacity
    }

    /// Kept neighbors in ascending (distance, id) order.
    pub fn into_sorted(self) -> Vec<Neighbor> {
        self.heap
            .into_sorted_vec()
            .into_iter()
            .map(|r| r.0)
            .collect()
    }
}
