//! Fixed workloads shared by the benchmarks.

use stirap_core::{PulseConfig, Sequence, SimOptions};

/// Reference pulse pair: αT = 10, ΔT = 1.
pub fn reference(sequence: Sequence) -> PulseConfig {
    PulseConfig::new(10.0, 1.0, sequence)
}

/// Solver options that only record the endpoints.
pub fn endpoint_options() -> SimOptions {
    SimOptions {
        sampling: 2,
        ..SimOptions::default()
    }
}

/// ΓT values spanning weak damping to the Zeno regime.
pub const GAMMAS: [f64; 4] = [0.0, 1.0, 10.0, 500.0];
