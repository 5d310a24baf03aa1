//! Jump-rate functions for the zero-range process.
//!
//! A rate function assigns to each occupation number `k` the rate `τ(k)` at
//! which one particle leaves a site holding `k` particles (per allowed
//! direction, before the diffusive speed-up).  We require
//!
//! - `τ(0) = 0` (empty sites are silent),
//! - `τ(1) > 0` (single particles do move),
//! - `τ` non-decreasing (this is what makes the level coupling monotone).
//!
//! Rates are stored as an explicit table over small occupancies plus a growth
//! rule for the tail, so both bounded rates (e.g. the indicator rate) and
//! unbounded ones (e.g. the linear rate, whose invariant law is Poisson) fit
//! in one representation.

use crate::error::ZrpError;

/// Tail behaviour of the rate beyond the stored table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Growth {
    /// `τ(k)` stays at the last table value for all larger `k`.
    Constant,
    /// `τ(k)` continues linearly with the given slope from the last table value.
    Linear { slope: f64 },
}

/// A validated jump-rate function `k ↦ τ(k)`.
#[derive(Debug, Clone)]
pub struct RateFunction {
    /// `table[k] = τ(k)` for `k = 0, …, table.len() − 1`.
    table: Vec<f64>,
    growth: Growth,
}

impl RateFunction {
    /// The linear rate `τ(k) = k` (independent walkers; Poisson invariant law).
    pub fn linear() -> Self {
        RateFunction {
            table: vec![0.0, 1.0],
            growth: Growth::Linear { slope: 1.0 },
        }
    }

    /// The indicator rate `τ(k) = 1` for `k ≥ 1` (geometric invariant law).
    pub fn indicator() -> Self {
        RateFunction {
            table: vec![0.0, 1.0],
            growth: Growth::Constant,
        }
    }

    /// Builds a rate function from an explicit table and a tail rule.
    ///
    /// The table must start with `τ(0) = 0`, contain at least one more entry
    /// with `τ(1) > 0`, be non-decreasing, and the tail rule must not break
    /// monotonicity (negative slopes are rejected).
    pub fn from_table(table: Vec<f64>, growth: Growth) -> Result<Self, ZrpError> {
        if table.len() < 2 {
            return Err(ZrpError::DegenerateRate(
                "need at least τ(0) and τ(1)".into(),
            ));
        }
        if table[0] != 0.0 {
            return Err(ZrpError::DegenerateRate(format!(
                "τ(0) = {} must be 0",
                table[0]
            )));
        }
        if !(table[1] > 0.0) {
            return Err(ZrpError::DegenerateRate(format!(
                "τ(1) = {} must be positive",
                table[1]
            )));
        }
        for k in 1..table.len() {
            if !table[k].is_finite() || table[k] < table[k - 1] {
                return Err(ZrpError::DegenerateRate(format!(
                    "table decreases or degenerates at k = {k}"
                )));
            }
        }
        if let Growth::Linear { slope } = growth {
            if !slope.is_finite() || slope < 0.0 {
                return Err(ZrpError::DegenerateRate(format!(
                    "tail slope {slope} must be non-negative"
                )));
            }
        }
        Ok(RateFunction { table, growth })
    }

    /// Evaluates `τ(k)`.
    pub fn tau(&self, k: u64) -> f64 {
        let last = self.table.len() - 1;
        if (k as usize) <= last {
            self.table[k as usize]
        } else {
            match self.growth {
                Growth::Constant => self.table[last],
                Growth::Linear { slope } => self.table[last] + slope * (k - last as u64) as f64,
            }
        }
    }

    /// Supremum of `τ`, finite only for constant tails.
    pub fn sup(&self) -> Option<f64> {
        match self.growth {
            Growth::Constant => Some(*self.table.last().expect("validated non-empty")),
            Growth::Linear { slope } if slope == 0.0 => {
                Some(*self.table.last().expect("validated non-empty"))
            }
            Growth::Linear { .. } => None,
        }
    }

    /// Polynomial growth certificate: `(C, p)` with `τ(k) ≤ C·k^p` for all `k ≥ 1`.
    pub fn poly_bound(&self) -> (f64, u32) {
        let last = *self.table.last().expect("validated non-empty");
        let table_max = self
            .table
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &t)| t / k as f64)
            .fold(0.0_f64, f64::max);
        match self.growth {
            Growth::Constant => {
                // τ(k) ≤ max(table) ≤ max(table)·k^0 fails only at k where τ(k) > last;
                // monotone tables peak at the last entry, so C = last works with p = 0
                // and the table part with p = 0 needs C = last as well.
                (last, 0)
            }
            Growth::Linear { slope } => {
                // Tail: τ(k) = last + slope·(k − k₀) ≤ (last + slope)·k for k ≥ 1.
                ((last + slope).max(table_max), 1)
            }
        }
    }

    /// Largest occupancy covered by the explicit table.
    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    pub fn growth(&self) -> Growth {
        self.growth
    }
}
