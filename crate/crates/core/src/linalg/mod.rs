//! Dense complex linear algebra: validated operator types, the Hermitian
//! eigensolver, spectral time evolution, dephasing, partial traces and basis
//! overlaps.
//!
//! Matrix exponentials are only ever formed from a spectral decomposition.

mod basis;
mod eigen;
mod matrix;
mod types;

pub use basis::{dephase, dephase_operator, overlap_matrix, partial_trace, schmidt_squared, OrthonormalBasis, Subsystem};
pub use eigen::{eigh, eigvalsh, evolve, SpectralDecomposition, DEGENERACY_TOL};
pub use matrix::{pauli, ComplexMatrix};
pub use types::{
    BistochasticMatrix, DensityMatrix, HermitianOperator, ProbabilityVector, PureState, UnitaryOperator, HERMITIAN_TOL,
    NORM_TOL, PROB_NEG_TOL, PROB_SUM_TOL, PSD_TOL, TRACE_TOL, UNITARY_TOL,
};
pub(crate) use types::shannon_entropy;
