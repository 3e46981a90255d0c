//! Qudit register engine: layouts, sparse/dense state vectors, gates,
//! reduced density matrices and metrics.

pub mod density;
pub mod layout;
pub mod state;

pub use density::{DensityMatrix, SparseDensity, DENSITY_CAP};
pub use layout::{RegisterLayout, WireRole};
pub use state::{
    omega_pow, AmplitudeEntry, Backend, MeasurementOutcome, QuditState, StateDump, DENSE_CAP,
    PRUNE_EPSILON,
};
