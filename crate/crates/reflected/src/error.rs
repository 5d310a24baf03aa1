use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReflectedError {
    #[error("enumeration supports even step counts 2 ≤ 2N ≤ 14, got {0}")]
    EnumerationGuard(u32),
    #[error("step count must be even and ≥ 2, got {0}")]
    BadStepCount(u32),
    #[error("rejection sampler exceeded {0} attempts")]
    RejectionBudget(u64),
    #[error("no contact class at site {site} with shoulder {shoulder} for 2N = {two_n}")]
    EmptyClass { two_n: u32, site: u32, shoulder: i64 },
    #[error("dynamics invariant broken: {0}")]
    BrokenInvariant(String),
    #[error(transparent)]
    Core(#[from] fluctua_core::CoreError),
}
