//! Ordered (reflected) interface pairs: exact ensemble counting, uniform and
//! conditioned sampling, event-driven corner-flip dynamics with contact
//! rules, contact-event logging, and a global monotone coupling.

pub mod coupling;
pub mod dynamics;
pub mod enumerate;
mod error;
pub mod km;
pub mod sample;

pub use coupling::{CoupledReflected, Move};
pub use dynamics::{
    reflection_measure, transitions, BinnedMeasure, ContactEvent, ContactEventLog, Event,
    EventKind, ReflectedDynamics,
};
pub use enumerate::{
    contact_classes, count_ordered_pairs_by_endpoint, enumerate_states, ContactClass,
};
pub use error::ReflectedError;
pub use km::{
    binomial, contact_class_count, contact_prob, contact_prob_asymptotic,
    expected_contact_corners, km_count, omega_count,
};
pub use sample::{sample_bridge, sample_contact_state, sample_pair, sample_walk_pair_to};
