//! Coherence-based diagnostics of quantum chaos.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: validated dense complex matrices, Hermitian eigensolver,
//!   spectral time evolution, dephasing, partial traces and basis overlaps.
//! * [`models`]: XXZ chain with an onsite defect (fixed magnetization
//!   sector), its mean-field basis, the transverse-field Ising model and the
//!   commuting `k`-local family.
//! * [`coherence`]: state-level coherence and delocalization measures.
//! * [`majorization`]: the majorization preorder on dephased eigenstates.
//! * [`dynamics`]: squared commutators / OTOCs, coherence-generating power
//!   and their exact decomposition, averaged OTOCs and temporal variances.
//! * [`rmt`]: GOE/GUE/Haar sampling, level statistics, the four-point
//!   spectral form factor and short-time CGP growth.
//!
//! All operations are pure; Monte-Carlo estimators draw from per-sample
//! random streams keyed by `(master_seed, sample_index)` and reduce in
//! sample order, so results do not depend on the number of worker threads.

pub mod coherence;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod majorization;
pub mod models;
pub mod rmt;

pub use error::{Error, Result};
pub use num_complex::Complex64;
