//! Streaming moment accumulators with exact associative merge.
//!
//! Replicas fill their own accumulators; the orchestrator merges them in
//! replica order. Merging uses the parallel Welford/Chan update, so the
//! result is independent of how samples were partitioned.

use serde::Serialize;

/// Count / mean / second central moment of a scalar stream.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other.clone();
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        self.m2 / (self.n - 1) as f64
    }

    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Standard error of the mean (i.i.d. samples).
    pub fn se(&self) -> f64 {
        self.sd() / (self.n as f64).sqrt()
    }
}

/// Vector version: means and the full co-moment matrix of fixed-width
/// observations, mergeable like [`Accumulator`].
#[derive(Debug, Clone)]
pub struct CovAccumulator {
    n: u64,
    means: Vec<f64>,
    /// upper triangle (row-major, including the diagonal) of Σ (x−mean)(x−mean)ᵀ
    comoments: Vec<f64>,
}

impl CovAccumulator {
    pub fn new(dim: usize) -> Self {
        Self { n: 0, means: vec![0.0; dim], comoments: vec![0.0; dim * (dim + 1) / 2] }
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    fn tri(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        a * self.dim() - a * (a + 1) / 2 + b
    }

    pub fn push(&mut self, x: &[f64]) {
        assert_eq!(x.len(), self.dim());
        self.n += 1;
        let nf = self.n as f64;
        let deltas: Vec<f64> = x.iter().zip(&self.means).map(|(a, m)| a - m).collect();
        for (m, d) in self.means.iter_mut().zip(&deltas) {
            *m += d / nf;
        }
        // pre-update deltas combine with post-update residuals
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let idx = self.tri(i, j);
                self.comoments[idx] += deltas[i] * (x[j] - self.means[j]);
            }
        }
    }

    pub fn merge(&mut self, other: &Self) {
        assert_eq!(self.dim(), other.dim());
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other.clone();
            return;
        }
        let n = self.n + other.n;
        let w = self.n as f64 * other.n as f64 / n as f64;
        let deltas: Vec<f64> =
            other.means.iter().zip(&self.means).map(|(b, a)| b - a).collect();
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let idx = self.tri(i, j);
                self.comoments[idx] += other.comoments[idx] + deltas[i] * deltas[j] * w;
            }
        }
        for (m, d) in self.means.iter_mut().zip(&deltas) {
            *m += d * other.n as f64 / n as f64;
        }
        self.n = n;
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.means[i]
    }

    /// Unbiased covariance entry.
    pub fn cov(&self, i: usize, j: usize) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        self.comoments[self.tri(i, j)] / (self.n - 1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn merge_equals_pooled() {
        let xs: Vec<f64> = (0..100).map(|i| ((i * 37) % 17) as f64 * 0.25 - 2.0).collect();
        let mut whole = Accumulator::new();
        xs.iter().for_each(|&x| whole.push(x));
        let mut left = Accumulator::new();
        let mut right = Accumulator::new();
        xs[..33].iter().for_each(|&x| left.push(x));
        xs[33..].iter().for_each(|&x| right.push(x));
        left.merge(&right);
        assert_eq!(left.count(), whole.count());
        assert_abs_diff_eq!(left.mean(), whole.mean(), epsilon = 1e-12);
        assert_abs_diff_eq!(left.variance(), whole.variance(), epsilon = 1e-12);
    }

    #[test]
    fn cov_accumulator_matches_direct_formula() {
        let rows: Vec<[f64; 2]> =
            (0..50).map(|i| [(i % 7) as f64, ((i * i) % 5) as f64 - 1.0]).collect();
        let mut acc = CovAccumulator::new(2);
        rows.iter().for_each(|r| acc.push(r));
        let mx = rows.iter().map(|r| r[0]).sum::<f64>() / 50.0;
        let my = rows.iter().map(|r| r[1]).sum::<f64>() / 50.0;
        let cov =
            rows.iter().map(|r| (r[0] - mx) * (r[1] - my)).sum::<f64>() / 49.0;
        assert_abs_diff_eq!(acc.cov(0, 1), cov, epsilon = 1e-12);

        // merge invariance
        let mut a = CovAccumulator::new(2);
        let mut b = CovAccumulator::new(2);
        rows[..20].iter().for_each(|r| a.push(r));
        rows[20..].iter().for_each(|r| b.push(r));
        a.merge(&b);
        assert_abs_diff_eq!(a.cov(0, 1), cov, epsilon = 1e-12);
        assert_abs_diff_eq!(a.cov(1, 1), acc.cov(1, 1), epsilon = 1e-12);
    }
}
