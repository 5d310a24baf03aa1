//! Ordered pairs of ±1 lattice bridges.
//!
//! A [`PathPair`] holds two paths `v ≥ w` on `{0, …, 2N}` with ±1 increments,
//! pinned to 0 at both ends. The geometry queries here (corners, contact
//! points) are what the interface dynamics and the enumeration code share;
//! the jump rules themselves live in the simulator crate.

use crate::error::CoreError;
use crate::field::FluctuationField;

/// Local extremum type of a path at an interior site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    /// Local maximum: discrete Laplacian −2, the flip moves the site down.
    Up,
    /// Local minimum: discrete Laplacian +2, the flip moves the site up.
    Down,
}

/// Which path of the pair an operation addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    V,
    W,
}

/// Corner type of `path` at interior site `k`, `None` when the path is
/// monotone through `k`.
pub fn corner_at(path: &[i32], k: usize) -> Option<Corner> {
    debug_assert!(k >= 1 && k + 1 < path.len());
    match path[k + 1] - 2 * path[k] + path[k - 1] {
        -2 => Some(Corner::Up),
        2 => Some(Corner::Down),
        _ => None,
    }
}

/// Ordered pair of ±1 bridges `v ≥ w` pinned at 0 on both ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathPair {
    v: Vec<i32>,
    w: Vec<i32>,
}

impl PathPair {
    pub fn new(v: Vec<i32>, w: Vec<i32>) -> Result<Self, CoreError> {
        if v.len() != w.len() {
            return Err(CoreError::InvalidPath(format!(
                "paths have different lengths {} and {}",
                v.len(),
                w.len()
            )));
        }
        if v.len() < 3 || v.len() % 2 == 0 {
            return Err(CoreError::InvalidPath(format!(
                "need an even number of steps ≥ 2, got {} nodes",
                v.len()
            )));
        }
        for p in [&v, &w] {
            if p[0] != 0 || p[p.len() - 1] != 0 {
                return Err(CoreError::InvalidPath("paths must start and end at 0".into()));
            }
            if p.windows(2).any(|s| (s[1] - s[0]).abs() != 1) {
                return Err(CoreError::InvalidPath("increments must be ±1".into()));
            }
        }
        if v.iter().zip(&w).any(|(a, b)| a < b) {
            return Err(CoreError::InvalidPath("ordering v ≥ w violated".into()));
        }
        Ok(Self { v, w })
    }

    /// The extremal pair: both paths equal to the maximal bridge (tent).
    pub fn tent(two_n: usize) -> Self {
        assert!(two_n >= 2 && two_n % 2 == 0);
        let n = two_n / 2;
        let path: Vec<i32> = (0..=two_n)
            .map(|k| if k <= n { k as i32 } else { (two_n - k) as i32 })
            .collect();
        Self { v: path.clone(), w: path }
    }

    /// Number of steps `2N`.
    pub fn two_n(&self) -> usize {
        self.v.len() - 1
    }

    pub fn v(&self) -> &[i32] {
        &self.v
    }

    pub fn w(&self) -> &[i32] {
        &self.w
    }

    pub fn path(&self, role: Role) -> &[i32] {
        match role {
            Role::V => &self.v,
            Role::W => &self.w,
        }
    }

    /// A contact point is an interior site where the paths coincide on the
    /// three sites `k−1, k, k+1`; only there do the reflection rules act.
    pub fn is_contact(&self, k: usize) -> bool {
        debug_assert!(k >= 1 && k < self.two_n());
        self.v[k - 1] == self.w[k - 1] && self.v[k] == self.w[k] && self.v[k + 1] == self.w[k + 1]
    }

    pub fn contact_points(&self) -> Vec<usize> {
        (1..self.two_n()).filter(|&k| self.is_contact(k)).collect()
    }

    pub fn corner(&self, role: Role, k: usize) -> Option<Corner> {
        corner_at(self.path(role), k)
    }

    /// Corner flip: replaces `x(k)` by `x(k−1) + x(k+1) − x(k)`. The caller is
    /// responsible for only flipping actual corners in an order-preserving
    /// way; the debug assertion catches rule bugs in tests.
    pub fn flip(&mut self, role: Role, k: usize) {
        debug_assert!(self.corner(role, k).is_some(), "flip at a non-corner");
        let path = match role {
            Role::V => &mut self.v,
            Role::W => &mut self.w,
        };
        path[k] = path[k - 1] + path[k + 1] - path[k];
        debug_assert!(self.v[k] >= self.w[k], "flip broke the ordering at {k}");
    }

    /// Both paths rescaled diffusively: values `x(k)/√(2N)` on the grid
    /// `{k/(2N)}`, linearly interpolated.
    pub fn rescaled(&self) -> (FluctuationField, FluctuationField) {
        let s = 1.0 / (self.two_n() as f64).sqrt();
        let to_field = |p: &[i32]| {
            FluctuationField::new(p.iter().map(|&x| x as f64 * s).collect()).expect("valid grid")
        };
        (to_field(&self.v), to_field(&self.w))
    }

    /// Sum and difference fields `S = (v+w)/√2`, `D = (v−w)/√2` of the
    /// rescaled pair. `S` behaves like a free interface, `D` like a
    /// non-negative one that only touches zero at contact intervals.
    pub fn sum_diff(&self) -> (FluctuationField, FluctuationField) {
        let s = 1.0 / (2.0 * self.two_n() as f64).sqrt();
        let sum = FluctuationField::new(
            self.v.iter().zip(&self.w).map(|(a, b)| (a + b) as f64 * s).collect(),
        )
        .expect("valid grid");
        let diff = FluctuationField::new(
            self.v.iter().zip(&self.w).map(|(a, b)| (a - b) as f64 * s).collect(),
        )
        .expect("valid grid");
        (sum, diff)
    }

    /// Pair distance `‖v−v'‖_{L¹} + ‖w−w'‖_{L¹}` of the rescaled paths.
    pub fn distance(&self, other: &Self) -> Result<f64, CoreError> {
        if self.two_n() != other.two_n() {
            return Err(CoreError::DimensionMismatch(format!(
                "path pairs with {} and {} steps",
                self.two_n(),
                other.two_n()
            )));
        }
        let (av, aw) = self.rescaled();
        let (bv, bw) = other.rescaled();
        Ok(av.l1_distance(&bv)? + aw.l1_distance(&bw)?)
    }

    /// CSV serialization: header `k,v,w`, one row per lattice site.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,v,w\n");
        for k in 0..=self.two_n() {
            out.push_str(&format!("{},{},{}\n", k, self.v[k], self.w[k]));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, CoreError> {
        let mut v = Vec::new();
        let mut w = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if (i == 0 && line.trim() == "k,v,w") || line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let _k = cols.next();
            let (a, b) = (cols.next(), cols.next());
            match (a, b) {
                (Some(a), Some(b)) => {
                    v.push(a.trim().parse().map_err(|e| CoreError::Parse(format!("row {i}: {e}")))?);
                    w.push(b.trim().parse().map_err(|e| CoreError::Parse(format!("row {i}: {e}")))?);
                }
                _ => return Err(CoreError::Parse(format!("row {i}: expected `k,v,w`"))),
            }
        }
        Self::new(v, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pair(v: Vec<i32>, w: Vec<i32>) -> PathPair {
        PathPair::new(v, w).unwrap()
    }

    #[test]
    fn validation_rejects_crossing_and_open_paths() {
        assert!(PathPair::new(vec![0, 1, 0], vec![0, 1, 0]).is_ok());
        assert!(PathPair::new(vec![0, -1, 0], vec![0, 1, 0]).is_err()); // crossing
        assert!(PathPair::new(vec![0, 1, 2], vec![0, -1, -2]).is_err()); // open ends
        assert!(PathPair::new(vec![0, 2, 0], vec![0, -1, 0]).is_err()); // bad step
    }

    #[test]
    fn contact_needs_three_coinciding_sites() {
        // v and w touch at k=2 only at the single site: not a contact point
        let p = pair(vec![0, 1, 0, 1, 0], vec![0, -1, 0, -1, 0]);
        assert!(p.contact_points().is_empty());

        // fully glued pair: every interior site is a contact point
        let q = pair(vec![0, 1, 0, 1, 0], vec![0, 1, 0, 1, 0]);
        assert_eq!(q.contact_points(), vec![1, 2, 3]);
    }

    #[test]
    fn figure_like_pair_has_contacts_at_3_and_9() {
        // 2N = 14 pair with two contact points, one with a downward corner at
        // k = 3 and one with an upward corner at k = 9.
        let v = vec![0, 1, 0, -1, 0, 1, 2, 1, 0, 1, 0, 1, 2, 1, 0];
        let w = vec![0, -1, 0, -1, 0, -1, -2, -1, 0, 1, 0, -1, -2, -1, 0];
        let p = pair(v, w);
        assert_eq!(p.contact_points(), vec![3, 9]);
        assert_eq!(p.corner(Role::V, 3), Some(Corner::Down));
        assert_eq!(p.corner(Role::V, 9), Some(Corner::Up));
        assert_eq!(p.corner(Role::W, 9), Some(Corner::Up));
    }

    #[test]
    fn corner_classification() {
        let p = pair(vec![0, 1, 2, 1, 0, 1, 0, 1, 0], vec![0, -1, 0, -1, 0, -1, 0, -1, 0]);
        assert_eq!(p.corner(Role::V, 2), Some(Corner::Up));
        assert_eq!(p.corner(Role::V, 1), None); // monotone through k=1
        assert_eq!(p.corner(Role::V, 4), Some(Corner::Down));
        assert_eq!(p.corner(Role::W, 1), Some(Corner::Down));
    }

    #[test]
    fn height_example_at_midpoint() {
        // 2N = 2: v = (0,1,0) rescales to 1/√2 at x = 1/2
        let p = pair(vec![0, 1, 0], vec![0, -1, 0]);
        let (v, w) = p.rescaled();
        assert_abs_diff_eq!(v.eval(0.5), 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(w.eval(0.5), -1.0 / 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn corner_flip_changes_l1_distance_by_rescaled_triangle() {
        // flipping one corner changes the path by a triangle of lattice area
        // 2 (base 2, height 2), i.e. 2·(2N)^{-3/2} after rescaling.
        for two_n in [2usize, 4, 8, 16] {
            let a = PathPair::tent(two_n);
            let mut b = a.clone();
            b.flip(Role::W, two_n / 2);
            let expect = 2.0 * (two_n as f64).powf(-1.5);
            assert_abs_diff_eq!(a.distance(&b).unwrap(), expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn sum_diff_round_trip() {
        let p = pair(vec![0, 1, 2, 1, 0], vec![0, 1, 0, 1, 0]);
        let (s, d) = p.sum_diff();
        let (v, w) = p.rescaled();
        let sqrt2 = 2f64.sqrt();
        // v = (S+D)/√2, w = (S−D)/√2
        let v2 = FluctuationField::linear_combination(1.0 / sqrt2, &s, 1.0 / sqrt2, &d).unwrap();
        let w2 = FluctuationField::linear_combination(1.0 / sqrt2, &s, -1.0 / sqrt2, &d).unwrap();
        assert_abs_diff_eq!(v.l1_distance(&v2).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.l1_distance(&w2).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn csv_round_trip() {
        let p = pair(vec![0, 1, 2, 1, 0], vec![0, -1, -2, -1, 0]);
        assert_eq!(PathPair::from_csv(&p.to_csv()).unwrap(), p);
    }
}
