//! Exact and asymptotic contact statistics for the ordered-pair ensemble.
//!
//! `km_count(k, j)` is the number of ordered pairs `v ≥ w` of simple-walk
//! trajectories of length `k` that both run from 0 to `j`. The determinant
//! identity gives
//!
//! ```text
//! C(k,j) = binom(k,m)² − binom(k,m−1)·binom(k,m+1),   m = (k+j)/2,
//! ```
//!
//! which collapses to the subtraction-free product form
//! `binom(k,m)²·(k+1)/((m+1)(k−m+1))` used below. The whole state space has
//! `|Ω_N| = C(2N, 0)` elements, and the states whose paths coincide on
//! `{k−1, k, k+1}` with a corner at `k` and shoulder height `j = v(k−1)`
//! split into classes of exactly `C(k−1,j)·C(2N−k−1,j)` states per corner
//! direction.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Number of ordered pairs of length-`k` walks `0 → j` (exact integer).
/// Returns 0 when `k + j` is odd or `|j| > k`.
pub fn km_count(k: u32, j: i64) -> BigUint {
    let k_i = i64::from(k);
    if j.abs() > k_i || (k_i + j) % 2 != 0 {
        return BigUint::zero();
    }
    let m = ((k_i + j) / 2) as u64;
    let b = binomial(u64::from(k), m);
    let num = &b * &b * BigUint::from(u64::from(k) + 1);
    num / (BigUint::from(m + 1) * BigUint::from(u64::from(k) - m + 1))
}

/// Size of the ordered-pair bridge ensemble for `2N` steps: `C(2N, 0)`.
pub fn omega_count(two_n: u32) -> BigUint {
    km_count(two_n, 0)
}

/// Number of states with a corner contact at site `k` and shoulder height
/// `j = v(k−1) = v(k+1)`, for one corner direction.
pub fn contact_class_count(two_n: u32, k: u32, j: i64) -> BigUint {
    assert!(k >= 1 && k <= two_n - 1, "interior site required");
    km_count(k - 1, j) * km_count(two_n - k - 1, j)
}

/// Probability under the uniform measure of the contact class `(k, j)` for
/// one corner direction, evaluated from the exact integer ratio.
pub fn contact_prob(two_n: u32, k: u32, j: i64) -> f64 {
    ratio_to_f64(&contact_class_count(two_n, k, j), &omega_count(two_n))
}

/// Large-`N` approximation of `contact_prob` for bulk sites and
/// `|j| ≲ (2N)^{2/3}` with the admissible parity `j ≡ k−1 (mod 2)`:
///
/// ```text
/// (2π(2N)²)^{-1} · ((2N)²/(k(2N−k)))² · exp(−(j²/(2N))·(2N)²/(k(2N−k)))
/// ```
pub fn contact_prob_asymptotic(two_n: u32, k: u32, j: i64) -> f64 {
    let n2 = f64::from(two_n);
    let k = f64::from(k);
    let a = n2 * n2 / (k * (n2 - k));
    let j = j as f64;
    a * a / (2.0 * std::f64::consts::PI * n2 * n2) * (-j * j / n2 * a).exp()
}

/// Expected number of contact corners (both directions) under the uniform
/// measure, via the exact class decomposition.
pub fn expected_contact_corners(two_n: u32) -> f64 {
    let mut num = BigUint::zero();
    for k in 1..two_n {
        let jmax = i64::from(k.min(two_n - k)) - 1;
        let mut j = -jmax;
        while j <= jmax {
            if (i64::from(k) - 1 + j) % 2 == 0 {
                num += contact_class_count(two_n, k, j);
            }
            j += 1;
        }
    }
    2.0 * ratio_to_f64(&num, &omega_count(two_n))
}

/// Binomial coefficient as an exact big integer.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `num/den` as f64, stable even when both operands overflow f64 range.
fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return 0.0;
    }
    // Normalize so the integer quotient carries ~80 significant bits, then
    // scale back by the power of two removed.
    let shift = 80 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    q.to_f64().expect("quotient fits f64") * 2f64.powi(-shift as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts_match_enumeration_oracle() {
        // frozen values from exhaustive listing of ordered walk pairs
        assert_eq!(km_count(0, 0), BigUint::from(1u32));
        assert_eq!(km_count(1, 1), BigUint::from(1u32));
        assert_eq!(km_count(2, 0), BigUint::from(3u32));
        assert_eq!(km_count(4, 0), BigUint::from(20u32));
        assert_eq!(km_count(6, 0), BigUint::from(175u32));
        assert_eq!(km_count(8, 0), BigUint::from(1764u32));
        assert_eq!(km_count(12, 0), BigUint::from(226_512u32));
        assert_eq!(km_count(14, 0), BigUint::from(2_760_615u32));
    }

    #[test]
    fn parity_and_range_give_zero() {
        assert!(km_count(3, 0).is_zero());
        assert!(km_count(4, 1).is_zero());
        assert!(km_count(4, 6).is_zero());
        assert!(km_count(4, -6).is_zero());
    }

    #[test]
    fn symmetric_in_j_and_extreme_j_is_one() {
        for k in 0..10u32 {
            for j in -(i64::from(k))..=i64::from(k) {
                assert_eq!(km_count(k, j), km_count(k, -j));
            }
            assert_eq!(km_count(k, i64::from(k)), BigUint::one());
        }
    }

    #[test]
    fn subtraction_form_agrees_with_product_form() {
        for k in 0..=16u32 {
            for j in (-i64::from(k)..=i64::from(k)).filter(|j| (i64::from(k) + j) % 2 == 0) {
                let m = ((i64::from(k) + j) / 2) as u64;
                let b = binomial(u64::from(k), m);
                let cross = if m == 0 {
                    BigUint::zero()
                } else {
                    binomial(u64::from(k), m - 1) * binomial(u64::from(k), m + 1)
                };
                assert_eq!(km_count(k, j) + cross, &b * &b, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn contact_prob_small_case() {
        // 2N=4, k=2, j=1: one state per corner direction out of 20
        assert_eq!(contact_class_count(4, 2, 1), BigUint::one());
        assert!((contact_prob(4, 2, 1) - 0.05).abs() < 1e-15);
        // wrong parity vanishes
        assert_eq!(contact_prob(4, 2, 0), 0.0);
    }

    #[test]
    fn asymptotic_matches_exact_in_the_bulk() {
        // midpoint of a 400-step ensemble, shoulder heights of admissible
        // parity covering |j| ≤ 19
        for j in (1..=19i64).step_by(2) {
            for sj in [j, -j] {
                let exact = contact_prob(400, 200, sj);
                let asym = contact_prob_asymptotic(400, 200, sj);
                let rel = (asym - exact).abs() / exact;
                assert!(rel < 0.05, "j={sj}: exact {exact:.3e} asym {asym:.3e} rel {rel:.4}");
            }
        }
    }

    #[test]
    fn asymptotic_midpoint_prefactor() {
        // k = N, j = 0: the rate factor (2N)²/(k(2N−k)) equals 4
        let v = contact_prob_asymptotic(400, 200, 0);
        let expect = 16.0 / (2.0 * std::f64::consts::PI * 400.0 * 400.0);
        assert!((v - expect).abs() < 1e-18);
        // symmetry
        assert_eq!(
            contact_prob_asymptotic(400, 160, 7),
            contact_prob_asymptotic(400, 160, -7)
        );
    }

    #[test]
    fn ratio_conversion_handles_huge_operands() {
        // identical huge operands divide to exactly 1
        let big = binomial(4000, 2000);
        assert_eq!(ratio_to_f64(&big, &big), 1.0);
        let half = ratio_to_f64(&big, &(&big * 2u32));
        assert_eq!(half, 0.5);
    }
}
