//! Stimulated Raman adiabatic passage in a three-level system with a lossy
//! intermediate state.
//!
//! Two non-Hermitian models of the loss are provided: the phenomenological
//! one (an imaginary shift of the intermediate level) and the effective one
//! obtained from a time-dependent master equation whose jumps connect the
//! instantaneous eigenstates to an auxiliary sink level. The full four-level
//! master equation is also integrated so the two routes can be compared
//! directly.
//!
//! Times are measured in units of the pulse width `T` and rates in `1/T`.
//!
//! ```
//! use stirap_core::{PulseConfig, Sequence, ModelKind, BasisKind, SimOptions, propagate};
//!
//! let cfg = PulseConfig::new(10.0, 1.0, Sequence::Counterintuitive);
//! let traj = propagate(&cfg, 0.0, ModelKind::Effective, BasisKind::Bare, &SimOptions::default()).unwrap();
//! assert!(traj.p3_final > 0.9);
//! ```

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod format;
pub mod hamiltonians;
pub mod integrator;
pub mod lindblad;
pub mod propagator;
pub mod pulses;
pub mod quadrature;
pub mod svg;

pub use analysis::{
    dark_state_population, elimination_coefficient, weak_damping_p3, zeno_predict,
    EliminationCoefficient, ZenoOutcome, ZenoPrediction,
};
pub use error::{Error, Result};
pub use experiments::{
    render_figure, sweep_gamma, FigureId, FigureSpec, RenderedFigure, SweepRow, SweepSpec,
    SweepTable,
};
pub use hamiltonians::{
    build_generator, doublet_restriction, zeno_split, BasisKind, GeneratorMatrix, ModelKind,
};
pub use lindblad::{
    adiabatic_rate_rhs, master_rhs, propagate_master, rates_at, DecayRates, DensityMatrix4,
    MasterTrajectory, ReservoirSpec,
};
pub use propagator::{
    bare_populations, initial_state, propagate, propagate_states, AmplitudeState, SimOptions,
    Trajectory,
};
pub use pulses::{eval_pulses, frame_at, AdiabaticFrame, PulseConfig, PulsePair, Sequence};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
