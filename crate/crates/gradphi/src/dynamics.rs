//! Heat-bath dynamics: each free site `i ∈ {1, …, N−1}` carries an
//! independent rate-`N²` clock; when it rings, `h_i` is resampled from its
//! conditional equilibrium given the neighbors.  Aggregated, events arrive
//! at rate `(N−1)·N²` with a uniformly chosen site — diffusive time units.

use crate::conditional::sample_conditional;
use crate::error::GradPhiError;
use crate::potential::{Potential, Variant};
use crate::state::GradPhiState;
use rand::Rng;

/// Resample the height at free site `i` from its conditional law.
pub fn heat_bath_update<R: Rng + ?Sized>(
    state: &mut GradPhiState,
    i: usize,
    potential: &Potential,
    rng: &mut R,
) -> Result<(), GradPhiError> {
    let n = state.n_sites();
    if i == 0 || i >= n {
        return Err(GradPhiError::BadSite { site: i, n_sites: n });
    }
    let a = state.heights()[i - 1];
    let b = state.heights()[i + 1];
    let h = sample_conditional(potential, a, b, state.is_hard_wall(), rng)?;
    debug_assert!(
        !state.is_hard_wall() || h >= 0.0,
        "wall-restricted conditional produced {h}"
    );
    state.set_height(i, h);
    Ok(())
}

/// Run the Poissonian Gibbs sampler for `horizon` diffusive time units.
/// Returns the number of resampling events performed.
pub fn evolve<R: Rng + ?Sized>(
    state: &mut GradPhiState,
    horizon: f64,
    potential: &Potential,
    rng: &mut R,
) -> Result<u64, GradPhiError> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(GradPhiError::InvalidState(format!(
            "horizon must be finite and nonnegative, got {horizon}"
        )));
    }
    if potential.variant() == Variant::Integer && !state.is_integral() {
        return Err(GradPhiError::InvalidState(
            "integer potential on non-integer heights".into(),
        ));
    }
    let n = state.n_sites();
    let total_rate = (n - 1) as f64 * (n as f64) * (n as f64);
    let deadline = state.time() + horizon;
    let mut events = 0u64;
    loop {
        let dt = -(1.0 - rng.gen::<f64>()).ln() / total_rate;
        if state.time() + dt > deadline {
            state.advance_clock(deadline - state.time());
            break;
        }
        state.advance_clock(dt);
        let site = rng.gen_range(1..n);
        heat_bath_update(state, site, potential, rng)?;
        events += 1;
        if events.is_multiple_of(1 << 18) {
            state.validate()?;
        }
    }
    Ok(events)
}
