//! IO companion for the `fraclap-core` toolkit (placeholder during build-up).
pub use fraclap_core as core;
