//! Rescaled lattice fields on uniform grids of `[0,1]`.
//!
//! A [`FluctuationField`] is the continuous, piecewise-linear interpolation of
//! values sampled at `k/L`, `k = 0..=L`. All norms and inner products below
//! are *exact* for piecewise-linear data: each grid cell contributes a
//! closed-form integral, and two fields on different grids are first moved to
//! the least common refinement (where evaluation of a piecewise-linear
//! function at the new nodes is still exact).

use crate::error::CoreError;

/// Upper bound on the size of a common-refinement grid. Two fields whose
/// resolutions have an lcm above this are rejected instead of silently
/// resampled with error.
pub const MAX_COMMON_GRID: usize = 1 << 22;

/// Piecewise-linear field on the uniform grid `{0, 1/L, ..., 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationField {
    values: Vec<f64>,
}

impl FluctuationField {
    /// Wraps grid values (length `L+1`, all finite).
    pub fn new(values: Vec<f64>) -> Result<Self, CoreError> {
        if values.len() < 2 {
            return Err(CoreError::FieldTooShort(values.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::NotFinite(i));
        }
        Ok(Self { values })
    }

    /// The zero field with `resolution` cells.
    pub fn zero(resolution: usize) -> Self {
        Self { values: vec![0.0; resolution.max(1) + 1] }
    }

    /// Number of grid cells `L`.
    pub fn resolution(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at an arbitrary point (clamped to `[0,1]`), linear interpolation.
    pub fn eval(&self, x: f64) -> f64 {
        let l = self.resolution() as f64;
        let t = (x.clamp(0.0, 1.0)) * l;
        let k = (t.floor() as usize).min(self.resolution() - 1);
        let frac = t - k as f64;
        self.values[k] * (1.0 - frac) + self.values[k + 1] * frac
    }

    /// Exact `∫₀¹ f(x) dx` (trapezoid rule is exact for piecewise-linear f).
    pub fn integral(&self) -> f64 {
        let l = self.resolution() as f64;
        let inner: f64 = self.values[1..self.resolution()].iter().sum();
        (inner + 0.5 * (self.values[0] + self.values[self.resolution()])) / l
    }

    /// Exact `∫₀¹ |f(x)| dx`, splitting cells at sign changes.
    pub fn l1_norm(&self) -> f64 {
        let h = 1.0 / self.resolution() as f64;
        self.values
            .windows(2)
            .map(|ab| cell_abs_integral(ab[0], ab[1], h))
            .sum()
    }

    /// Exact `∫₀¹ f(x)² dx`.
    pub fn l2_norm_sq(&self) -> f64 {
        let h = 1.0 / self.resolution() as f64;
        self.values
            .windows(2)
            .map(|ab| h * (ab[0] * ab[0] + ab[0] * ab[1] + ab[1] * ab[1]) / 3.0)
            .sum()
    }

    /// Exact `∫₀¹ |f−g| dx`; fields are moved to their common refinement.
    pub fn l1_distance(&self, other: &Self) -> Result<f64, CoreError> {
        let l = common_refinement(self.resolution(), other.resolution())?;
        let (a, b) = (self.resample(l), other.resample(l));
        let h = 1.0 / l as f64;
        Ok(a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| x - y)
            .collect::<Vec<_>>()
            .windows(2)
            .map(|d| cell_abs_integral(d[0], d[1], h))
            .sum())
    }

    /// Exact `∫₀¹ f·g dx` (product of two piecewise-linear functions).
    pub fn integral_product(&self, other: &Self) -> Result<f64, CoreError> {
        let l = common_refinement(self.resolution(), other.resolution())?;
        let (a, b) = (self.resample(l), other.resample(l));
        let h = 1.0 / l as f64;
        let mut acc = 0.0;
        for k in 0..l {
            let (f0, f1) = (a.values[k], a.values[k + 1]);
            let (g0, g1) = (b.values[k], b.values[k + 1]);
            // ∫ cell of (linear)·(linear): h/6 · (2f0g0 + f0g1 + f1g0 + 2f1g1)
            acc += h / 6.0 * (2.0 * f0 * g0 + f0 * g1 + f1 * g0 + 2.0 * f1 * g1);
        }
        Ok(acc)
    }

    /// `a·f + b·g` on the common refinement.
    pub fn linear_combination(a: f64, f: &Self, b: f64, g: &Self) -> Result<Self, CoreError> {
        let l = common_refinement(f.resolution(), g.resolution())?;
        let (fr, gr) = (f.resample(l), g.resample(l));
        let values = fr
            .values
            .iter()
            .zip(&gr.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self::new(values)
    }

    /// Field on a new grid by exact evaluation at the new nodes. If the new
    /// resolution is a multiple of the old one this represents the same
    /// function; otherwise it is the interpolation error documented at the
    /// call site.
    pub fn resample(&self, resolution: usize) -> Self {
        if resolution == self.resolution() {
            return self.clone();
        }
        if resolution % self.resolution() == 0 {
            // exact refinement: new nodes hit old cells at rational offsets
            let r = resolution / self.resolution();
            let mut values = Vec::with_capacity(resolution + 1);
            for k in 0..self.resolution() {
                let (a, b) = (self.values[k], self.values[k + 1]);
                for j in 0..r {
                    let frac = j as f64 / r as f64;
                    values.push(a + (b - a) * frac);
                }
            }
            values.push(self.values[self.resolution()]);
            Self { values }
        } else {
            let values = (0..=resolution)
                .map(|k| self.eval(k as f64 / resolution as f64))
                .collect();
            Self { values }
        }
    }

    /// CSV serialization: header `x,value`, one row per grid node.
    pub fn to_csv(&self) -> String {
        let l = self.resolution() as f64;
        let mut out = String::from("x,value\n");
        for (k, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", k as f64 / l, v));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, CoreError> {
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 && line.trim() == "x,value" {
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let value = line
                .split(',')
                .nth(1)
                .ok_or_else(|| CoreError::Parse(format!("row {i}: expected `x,value`")))?;
            values.push(
                value
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| CoreError::Parse(format!("row {i}: {e}")))?,
            );
        }
        Self::new(values)
    }
}

/// Least common refinement of two grid resolutions, bounded by
/// [`MAX_COMMON_GRID`].
pub fn common_refinement(left: usize, right: usize) -> Result<usize, CoreError> {
    let g = gcd(left, right);
    let lcm = left / g * right;
    if lcm > MAX_COMMON_GRID {
        return Err(CoreError::GridMismatch { left, right, max: MAX_COMMON_GRID });
    }
    Ok(lcm)
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exact `∫ |linear|` over one cell of width `h` with endpoint values `a, b`.
fn cell_abs_integral(a: f64, b: f64, h: f64) -> f64 {
    if a * b >= 0.0 {
        h * (a.abs() + b.abs()) / 2.0
    } else {
        // the segment crosses zero at t = |a|/(|a|+|b|); two triangles
        h * (a * a + b * b) / (2.0 * (a.abs() + b.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn l1_norm_handles_sign_changes_exactly() {
        // f = 1 - 2x on grid {0, 1/2, 1}: |f| integrates to 1/4 + 1/4... split
        // at x = 1/2 where f = 0, giving two triangles of area 1/4 each.
        let f = FluctuationField::new(vec![1.0, 0.0, -1.0]).unwrap();
        assert_abs_diff_eq!(f.l1_norm(), 0.5, epsilon = 1e-15);

        // crossing inside a cell: f(0) = 1, f(1) = -3 on a single cell
        let g = FluctuationField::new(vec![1.0, -3.0]).unwrap();
        // zero at x = 1/4: areas 1·(1/4)/2 + 3·(3/4)/2 = 1/8 + 9/8 = 5/4
        assert_abs_diff_eq!(g.l1_norm(), 1.25, epsilon = 1e-15);
    }

    #[test]
    fn product_integral_matches_closed_form() {
        // ∫ x·(1-x) dx = 1/6, both factors representable exactly
        let l = 64;
        let x = FluctuationField::new((0..=l).map(|k| k as f64 / l as f64).collect()).unwrap();
        let one_minus_x =
            FluctuationField::new((0..=l).map(|k| 1.0 - k as f64 / l as f64).collect()).unwrap();
        // both factors are exactly linear, so the per-cell rule integrates the
        // quadratic product with no discretization error at all.
        assert_abs_diff_eq!(x.integral_product(&one_minus_x).unwrap(), 1.0 / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn resample_refinement_is_exact() {
        let f = FluctuationField::new(vec![0.0, 1.0, -0.5]).unwrap();
        let g = f.resample(6);
        for k in 0..=12 {
            let x = k as f64 / 12.0;
            assert_abs_diff_eq!(f.eval(x), g.eval(x), epsilon = 1e-15);
        }
        assert_abs_diff_eq!(f.l1_norm(), g.l1_norm(), epsilon = 1e-15);
    }

    #[test]
    fn mismatched_grids_use_common_refinement() {
        let f = FluctuationField::new(vec![0.0, 1.0, 0.0]).unwrap(); // L=2
        let g = FluctuationField::new(vec![0.0, 1.0, 1.0, 0.0]).unwrap(); // L=3
        // both are exact on L=6, distance computed there
        let d = f.l1_distance(&g).unwrap();
        assert!(d > 0.0 && d.is_finite());
        assert_abs_diff_eq!(f.l1_distance(&f).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn csv_round_trip() {
        let f = FluctuationField::new(vec![0.0, 0.5, -1.25, 0.0]).unwrap();
        let g = FluctuationField::from_csv(&f.to_csv()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(FluctuationField::new(vec![1.0]).is_err());
        assert!(FluctuationField::new(vec![1.0, f64::NAN]).is_err());
    }
}
