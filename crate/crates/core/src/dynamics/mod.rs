//! Channel-level scrambling diagnostics at infinite temperature: squared
//! commutators, coherence-generating power, their decomposition, and the
//! averaged identities connecting them.
//!
//! Heisenberg evolution is `W(t) = U_t† W U_t`.

mod averages;
mod otoc;
mod series;

pub use averages::{haar_masa_commutator_avg, haar_state_commutator_avg, phase_averaged_otoc, Averaging};
pub use otoc::{
    cgp, cgp_commutator_form, cgp_from_overlaps, grassmannian_distance_sq, intertwiner, otoc_cgp_decomposition,
    otoc_f, projection_otoc_sum, squared_commutator, Operator, OtocDecomposition, ProjectionMode,
    UnitaryEigensystem,
};
pub use series::{
    temporal_variance, tfim_dynamics_series, variance_ratio_scan, DiagonalPairDynamics, DynamicsSeries,
    DynamicsSample, Observable, TimeGrid, TimeSeries, VarianceRow,
};
