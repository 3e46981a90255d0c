//! Shared fixtures for the criterion benches.

use qcarrier_core::{SchemeSpec, SessionConfig};

/// A clean session config sized for throughput measurements.
pub fn session_config(scheme: SchemeSpec, rounds: u32) -> SessionConfig {
    SessionConfig {
        scheme,
        rounds,
        payload: Vec::new(),
        stray_fraction: 0.25,
        rng_seed: 0xBEEF,
        hadamard_every_round: true,
        adversary: None,
        retrieve_subset: None,
        announce_subset: None,
    }
}
