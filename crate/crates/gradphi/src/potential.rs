//! Convex interaction potentials for the gradient-interface dynamics.
//!
//! A potential is accepted only with a convexity certificate (nonnegative
//! second differences on a test grid, up to 10⁻¹² slack) and strictly
//! positive linear growth in both tail directions, which together make every
//! heat-bath conditional log-concave and normalizable.

use crate::error::GradPhiError;

/// Whether heights live on the real line or on the integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Continuous,
    Integer,
}

#[derive(Debug, Clone)]
enum Kind {
    /// `V(x) = x²/2`.
    Quadratic,
    /// `V(x) = β|x|`.
    Abs { beta: f64 },
    /// Piecewise-linear convex interpolation of `(xs, vs)` knots, extended
    /// linearly beyond the first and last knot.
    Table { xs: Vec<f64>, vs: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct Potential {
    kind: Kind,
    variant: Variant,
}

impl Potential {
    /// `V(x) = x²/2` on continuous heights: the heat-bath conditional is an
    /// exact Gaussian (possibly wall-truncated).
    pub fn quadratic() -> Self {
        Potential {
            kind: Kind::Quadratic,
            variant: Variant::Continuous,
        }
    }

    /// `V(x) = β|x|` on continuous heights.
    pub fn abs(beta: f64) -> Result<Self, GradPhiError> {
        check_beta(beta)?;
        Ok(Potential {
            kind: Kind::Abs { beta },
            variant: Variant::Continuous,
        })
    }

    /// `V(x) = β|x|` on integer heights: the heat-bath conditional is a
    /// two-sided geometric law sampled exactly.
    pub fn integer_abs(beta: f64) -> Result<Self, GradPhiError> {
        check_beta(beta)?;
        Ok(Potential {
            kind: Kind::Abs { beta },
            variant: Variant::Integer,
        })
    }

    /// Tabulated convex potential: knots `xs` strictly increasing, values
    /// `vs`, interpolated linearly and extended linearly past the ends.
    /// Requires nondecreasing chord slopes (the convexity certificate) with
    /// strictly negative first and strictly positive last slope, so both
    /// tails grow at least linearly.
    pub fn from_table(xs: Vec<f64>, vs: Vec<f64>, variant: Variant) -> Result<Self, GradPhiError> {
        if xs.len() < 3 || xs.len() != vs.len() {
            return Err(GradPhiError::InvalidPotential(format!(
                "need at least three knots with matching values, got {} and {}",
                xs.len(),
                vs.len()
            )));
        }
        if xs.iter().any(|x| !x.is_finite()) || vs.iter().any(|v| !v.is_finite()) {
            return Err(GradPhiError::InvalidPotential(
                "knots and values must be finite".into(),
            ));
        }
        let mut slopes = Vec::with_capacity(xs.len() - 1);
        for k in 1..xs.len() {
            let dx = xs[k] - xs[k - 1];
            if dx <= 0.0 {
                return Err(GradPhiError::InvalidPotential(format!(
                    "knots must increase strictly, got {} after {}",
                    xs[k],
                    xs[k - 1]
                )));
            }
            slopes.push((vs[k] - vs[k - 1]) / dx);
        }
        for pair in slopes.windows(2) {
            if pair[1] < pair[0] - 1e-12 {
                return Err(GradPhiError::InvalidPotential(format!(
                    "not convex: chord slope drops from {} to {}",
                    pair[0], pair[1]
                )));
            }
        }
        if !(slopes[0] < 0.0 && *slopes.last().unwrap() > 0.0) {
            return Err(GradPhiError::InvalidPotential(format!(
                "tails must grow linearly: end slopes are {} and {}",
                slopes[0],
                slopes.last().unwrap()
            )));
        }
        let potential = Potential {
            kind: Kind::Table { xs, vs },
            variant,
        };
        potential.certify_convex()?;
        Ok(potential)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Evaluate `V(x)`.
    pub fn value(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Quadratic => 0.5 * x * x,
            Kind::Abs { beta } => beta * x.abs(),
            Kind::Table { xs, vs } => {
                let n = xs.len();
                if x <= xs[0] {
                    let slope = (vs[1] - vs[0]) / (xs[1] - xs[0]);
                    vs[0] + slope * (x - xs[0])
                } else if x >= xs[n - 1] {
                    let slope = (vs[n - 1] - vs[n - 2]) / (xs[n - 1] - xs[n - 2]);
                    vs[n - 1] + slope * (x - xs[n - 1])
                } else {
                    let k = xs.partition_point(|&knot| knot <= x);
                    let t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
                    vs[k - 1] + t * (vs[k] - vs[k - 1])
                }
            }
        }
    }

    /// True when the conditional law has an exact closed-form sampler
    /// (quadratic, or the absolute-value potential on integer heights).
    pub fn has_exact_sampler(&self) -> bool {
        matches!(
            (&self.kind, self.variant),
            (Kind::Quadratic, Variant::Continuous) | (Kind::Abs { .. }, Variant::Integer)
        )
    }

    pub(crate) fn abs_rate(&self) -> Option<f64> {
        match self.kind {
            Kind::Abs { beta } => Some(beta),
            _ => None,
        }
    }

    pub(crate) fn is_quadratic(&self) -> bool {
        matches!(self.kind, Kind::Quadratic)
    }

    /// Second-difference certificate on a symmetric test grid.
    fn certify_convex(&self) -> Result<(), GradPhiError> {
        let (span, steps) = match &self.kind {
            Kind::Table { xs, .. } => (xs[0].abs().max(xs.last().unwrap().abs()) + 1.0, 4096),
            _ => (8.0, 2048),
        };
        let h = 2.0 * span / steps as f64;
        for k in 1..steps {
            let x = -span + k as f64 * h;
            let dd = self.value(x + h) - 2.0 * self.value(x) + self.value(x - h);
            if dd < -1e-12 {
                return Err(GradPhiError::InvalidPotential(format!(
                    "second difference {dd} at {x} breaks convexity"
                )));
            }
        }
        Ok(())
    }
}

fn check_beta(beta: f64) -> Result<(), GradPhiError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(GradPhiError::InvalidPotential(format!(
            "absolute-value rate must be positive and finite, got {beta}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_potentials_evaluate_correctly() {
        let quad = Potential::quadratic();
        assert_eq!(quad.value(2.0), 2.0);
        assert_eq!(quad.value(-3.0), 4.5);
        assert_eq!(quad.variant(), Variant::Continuous);
        assert!(quad.has_exact_sampler());

        let abs = Potential::integer_abs(0.7).unwrap();
        assert!((abs.value(-2.0) - 1.4).abs() < 1e-15);
        assert_eq!(abs.variant(), Variant::Integer);
        assert!(abs.has_exact_sampler());

        assert!(!Potential::abs(0.7).unwrap().has_exact_sampler());
    }

    #[test]
    fn table_interpolates_and_extrapolates_linearly() {
        // Exact encoding of 2|x| with knots at -1, 0, 3.
        let pot = Potential::from_table(
            vec![-1.0, 0.0, 3.0],
            vec![2.0, 0.0, 6.0],
            Variant::Continuous,
        )
        .unwrap();
        assert!((pot.value(0.5) - 1.0).abs() < 1e-15);
        assert!((pot.value(-0.25) - 0.5).abs() < 1e-15);
        assert!((pot.value(10.0) - 20.0).abs() < 1e-12);
        assert!((pot.value(-5.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_tables() {
        // Slope drops: not convex.
        assert!(Potential::from_table(
            vec![-1.0, 0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0, 1.5],
            Variant::Continuous,
        )
        .is_err());
        // Flat right tail: not coercive.
        assert!(Potential::from_table(
            vec![-1.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
            Variant::Continuous,
        )
        .is_err());
        // Non-increasing knots.
        assert!(Potential::from_table(
            vec![-1.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            Variant::Continuous,
        )
        .is_err());
        assert!(Potential::abs(0.0).is_err());
        assert!(Potential::integer_abs(f64::NAN).is_err());
    }
}
