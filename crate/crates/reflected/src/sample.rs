//! Exact uniform sampling of ordered bridge pairs and of conditioned contact
//! classes.
//!
//! A single ±1 bridge is drawn by sequential conditioning: with `R` steps
//! left and current height `h`, the number of remaining up-steps is fixed at
//! `u = (R − h)/2`, so the next step is up with probability `u/R` — an exact
//! integer draw, no floating-point acceptance. A pair is drawn by running two
//! such bridges together and rejecting on the first ordering violation; the
//! accepted law is exactly uniform. The acceptance probability is
//! `(2N+1)/(N+1)²` and rejected attempts abort after `O(√N)` steps on
//! average, so the cost per sample stays mild even for `2N` in the tens of
//! thousands; rejection is therefore used at every size.

use crate::error::ReflectedError;
use fluctua_core::{Corner, PathPair};
use rand::Rng;

/// Attempt budget for the rejection samplers. The acceptance probability of
/// the pair sampler is `(2N+1)/(N+1)² ≳ 2/(2N)`, so for any practical size
/// the probability of exhausting the budget is astronomically small.
pub const MAX_REJECTION_TRIES: u64 = 50_000_000;

/// One uniform ±1 bridge of `two_n` steps from 0 to 0.
pub fn sample_bridge<R: Rng + ?Sized>(two_n: u32, rng: &mut R) -> Result<Vec<i32>, ReflectedError> {
    if two_n == 0 || two_n % 2 != 0 {
        return Err(ReflectedError::BadStepCount(two_n));
    }
    let mut x = Vec::with_capacity(two_n as usize + 1);
    x.push(0i32);
    let mut h = 0i32;
    for t in 0..two_n {
        let r = two_n - t;
        h += if step_is_up(r, h, 0, rng) { 1 } else { -1 };
        x.push(h);
    }
    Ok(x)
}

/// Exact uniform sample from the ordered-pair bridge ensemble.
pub fn sample_pair<R: Rng + ?Sized>(two_n: u32, rng: &mut R) -> Result<PathPair, ReflectedError> {
    if two_n == 0 || two_n % 2 != 0 {
        return Err(ReflectedError::BadStepCount(two_n));
    }
    let steps = two_n as usize;
    let mut v = vec![0i32; steps + 1];
    let mut w = vec![0i32; steps + 1];
    'tries: for _ in 0..MAX_REJECTION_TRIES {
        let (mut a, mut b) = (0i32, 0i32);
        for t in 0..two_n {
            let r = two_n - t;
            a += if step_is_up(r, a, 0, rng) { 1 } else { -1 };
            b += if step_is_up(r, b, 0, rng) { 1 } else { -1 };
            if b > a {
                continue 'tries;
            }
            v[t as usize + 1] = a;
            w[t as usize + 1] = b;
        }
        return Ok(PathPair::new(v, w).expect("sampler output is a valid ordered pair"));
    }
    Err(ReflectedError::RejectionBudget(MAX_REJECTION_TRIES))
}

/// Uniform ordered pair of ±1 walks of length `len`, both from 0 to `j`.
pub fn sample_walk_pair_to<R: Rng + ?Sized>(
    len: u32,
    j: i64,
    rng: &mut R,
) -> Result<(Vec<i32>, Vec<i32>), ReflectedError> {
    let feasible = j.abs() <= i64::from(len) && (i64::from(len) + j) % 2 == 0;
    if !feasible {
        return Err(ReflectedError::EmptyClass { two_n: len, site: 0, shoulder: j });
    }
    let j = j as i32;
    let steps = len as usize;
    let mut v = vec![0i32; steps + 1];
    let mut w = vec![0i32; steps + 1];
    'tries: for _ in 0..MAX_REJECTION_TRIES {
        let (mut a, mut b) = (0i32, 0i32);
        for t in 0..len {
            let r = len - t;
            a += if step_is_up(r, a, j, rng) { 1 } else { -1 };
            b += if step_is_up(r, b, j, rng) { 1 } else { -1 };
            if b > a {
                continue 'tries;
            }
            v[t as usize + 1] = a;
            w[t as usize + 1] = b;
        }
        return Ok((v, w));
    }
    Err(ReflectedError::RejectionBudget(MAX_REJECTION_TRIES))
}

/// Uniform sample from the contact class at `site` with shoulder height
/// `shoulder` and the given corner direction: heights coincide on
/// `{site−1, site, site+1}`, the tip sits at `shoulder±1`, and the two free
/// segments are independent uniform ordered walk pairs.
pub fn sample_contact_state<R: Rng + ?Sized>(
    two_n: u32,
    site: u32,
    shoulder: i64,
    corner: Corner,
    rng: &mut R,
) -> Result<PathPair, ReflectedError> {
    if two_n == 0 || two_n % 2 != 0 {
        return Err(ReflectedError::BadStepCount(two_n));
    }
    let admissible = site >= 1
        && site <= two_n - 1
        && (i64::from(site) - 1 + shoulder) % 2 == 0
        && shoulder.abs() <= i64::from(site) - 1
        && shoulder.abs() <= i64::from(two_n - site) - 1;
    if !admissible {
        return Err(ReflectedError::EmptyClass { two_n, site, shoulder });
    }
    let left = sample_walk_pair_to(site - 1, shoulder, rng)?;
    let right = sample_walk_pair_to(two_n - site - 1, shoulder, rng)?;
    let tip = shoulder as i32
        + match corner {
            Corner::Up => 1,
            Corner::Down => -1,
        };
    let assemble = |l: &[i32], r: &[i32]| {
        let mut x = Vec::with_capacity(two_n as usize + 1);
        x.extend_from_slice(l);
        x.push(tip);
        x.extend(r.iter().rev());
        x
    };
    let pair = PathPair::new(assemble(&left.0, &right.0), assemble(&left.1, &right.1))
        .expect("class assembly is a valid ordered pair");
    debug_assert!(pair.is_contact(site as usize));
    Ok(pair)
}

/// Exact conditional step: with `r` steps left, height `h`, target `goal`,
/// the walk must still take `(r − (h − goal).abs()) /2 + …` up-steps; the
/// draw `U{0..r} < ups` realizes the conditional probability exactly.
#[inline]
fn step_is_up<R: Rng + ?Sized>(r: u32, h: i32, goal: i32, rng: &mut R) -> bool {
    let ups = (i64::from(r) + i64::from(goal) - i64::from(h)) / 2;
    debug_assert!((0..=i64::from(r)).contains(&ups));
    (rng.gen_range(0..i64::from(r))) < ups
}
