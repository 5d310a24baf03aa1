//! Placeholder; populated module by module.
