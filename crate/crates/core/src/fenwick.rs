//! Fenwick-tree-backed weighted index sampling.
//!
//! Event-driven simulators keep one weight per site and need O(log n)
//! weight updates and O(log n) sampling proportional to weight. Weights are
//! plain `f64`; to keep long runs from accumulating drift in the prefix sums
//! the tree rebuilds itself from the stored weights every 2^20 updates.

use rand::Rng;

#[derive(Debug, Clone)]
pub struct WeightedIndex {
    tree: Vec<f64>,    // 1-based Fenwick array
    weights: Vec<f64>, // source of truth
    updates: u64,
}

const REBUILD_PERIOD: u64 = 1 << 20;

impl WeightedIndex {
    pub fn new(n: usize) -> Self {
        Self { tree: vec![0.0; n + 1], weights: vec![0.0; n], updates: 0 }
    }

    pub fn from_weights(weights: Vec<f64>) -> Self {
        let mut s = Self { tree: vec![0.0; weights.len() + 1], weights, updates: 0 };
        s.rebuild();
        s
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn set(&mut self, i: usize, w: f64) {
        debug_assert!(w >= 0.0 && w.is_finite());
        let delta = w - self.weights[i];
        if delta == 0.0 {
            return;
        }
        self.weights[i] = w;
        let mut idx = i + 1;
        while idx < self.tree.len() {
            self.tree[idx] += delta;
            idx += idx & idx.wrapping_neg();
        }
        self.updates += 1;
        if self.updates % REBUILD_PERIOD == 0 {
            self.rebuild();
        }
    }

    /// Total weight (exact prefix sum of the underlying array).
    pub fn total(&self) -> f64 {
        self.prefix(self.weights.len())
    }

    fn prefix(&self, mut i: usize) -> f64 {
        let mut acc = 0.0;
        while i > 0 {
            acc += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        acc
    }

    fn rebuild(&mut self) {
        self.tree.iter_mut().for_each(|t| *t = 0.0);
        for i in 0..self.weights.len() {
            let w = self.weights[i];
            if w != 0.0 {
                let mut idx = i + 1;
                while idx < self.tree.len() {
                    self.tree[idx] += w;
                    idx += idx & idx.wrapping_neg();
                }
            }
        }
    }

    /// Samples an index with probability proportional to its weight.
    /// Returns `None` when the total weight vanishes.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let total = self.total();
        if total <= 0.0 {
            return None;
        }
        let mut target = rng.gen::<f64>() * total;
        // binary-lifted descent over the implicit prefix sums
        let mut pos = 0usize;
        let mut step = self.tree.len().next_power_of_two() >> 1;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] < target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        // pos is now the count of indices with cumulative weight < target
        let mut i = pos.min(self.weights.len() - 1);
        // guard against landing on a zero-weight slot through rounding
        if self.weights[i] == 0.0 {
            i = (0..self.weights.len())
                .map(|d| (i + d) % self.weights.len())
                .find(|&j| self.weights[j] > 0.0)?;
        }
        Some(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn sampling_matches_weights() {
        let mut idx = WeightedIndex::new(4);
        idx.set(0, 1.0);
        idx.set(2, 3.0);
        let mut rng = stream(11, "fenwick.test", 0);
        let mut counts = [0u64; 4];
        let n = 200_000;
        for _ in 0..n {
            counts[idx.sample(&mut rng).unwrap()] += 1;
        }
        assert_eq!(counts[1], 0);
        assert_eq!(counts[3], 0);
        let f0 = counts[0] as f64 / n as f64;
        assert!((f0 - 0.25).abs() < 0.01, "got {f0}");
    }

    #[test]
    fn updates_track_totals() {
        let mut idx = WeightedIndex::from_weights(vec![0.5, 0.5, 1.0]);
        assert!((idx.total() - 2.0).abs() < 1e-12);
        idx.set(1, 0.0);
        idx.set(0, 2.5);
        assert!((idx.total() - 3.5).abs() < 1e-12);
        assert_eq!(idx.get(1), 0.0);
    }

    #[test]
    fn empty_total_yields_none() {
        let idx = WeightedIndex::new(3);
        let mut rng = stream(1, "fenwick.empty", 0);
        assert_eq!(idx.sample(&mut rng), None);
    }
}
