//! Fenwick tree over integer weights.
//!
//! Weights are kept as `u64` so that sampling is exact: a uniform integer in
//! `[0, total)` maps to exactly one slot, with no floating-point drift after
//! millions of updates.

use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumTree {
    tree: Vec<u64>,
    weights: Vec<u64>,
    total: u64,
    top_bit: usize,
}

impl SumTree {
    pub fn new(weights: &[u64]) -> Self {
        let n = weights.len();
        let mut tree = vec![0u64; n + 1];
        for (i, &w) in weights.iter().enumerate() {
            tree[i + 1] += w;
            let parent = (i + 1) + ((i + 1) & (i + 1).wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i + 1];
            }
        }
        let top_bit = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        Self {
            tree,
            weights: weights.to_vec(),
            total: weights.iter().sum(),
            top_bit,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn weight(&self, index: usize) -> u64 {
        self.weights[index]
    }

    pub fn set(&mut self, index: usize, weight: u64) {
        let old = self.weights[index];
        if weight >= old {
            self.add(index, weight - old);
        } else {
            self.sub(index, old - weight);
        }
    }

    pub fn add(&mut self, index: usize, delta: u64) {
        self.weights[index] += delta;
        self.total += delta;
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    pub fn sub(&mut self, index: usize, delta: u64) {
        self.weights[index] -= delta;
        self.total -= delta;
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] -= delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of weights in slots `0..index`.
    pub fn prefix(&self, index: usize) -> u64 {
        let mut sum = 0;
        let mut i = index;
        while i > 0 {
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }

    /// Slot `j` such that `prefix(j) <= point < prefix(j + 1)`.
    pub fn find(&self, mut point: u64) -> usize {
        debug_assert!(point < self.total);
        let mut pos = 0;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= point {
                pos = next;
                point -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.find(rng.random_range(0..self.total))
    }

    /// Samples proportionally to weight over every slot except `excluded`.
    pub fn sample_excluding<R: Rng + ?Sized>(&self, rng: &mut R, excluded: usize) -> usize {
        let skip = self.weights[excluded];
        let start = self.prefix(excluded);
        let point = rng.random_range(0..self.total - skip);
        if point < start {
            self.find(point)
        } else {
            self.find(point + skip)
        }
    }
}
