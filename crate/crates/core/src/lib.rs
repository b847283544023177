//! Continuous-time quantum walks on circulant graphs `Cay(Z_n, S)`.
//!
//! - [`graph`]: validated connection sets, gcd classes and divisor profiles.
//! - [`spectral`]: closed-form eigenvalues in Fourier order.
//! - [`dynamics`]: entries of `H(t) = exp(-itA)`, fidelities, periodicity.
//! - [`diophantine`]: simultaneous approximation and lattice time search.
//! - [`classifier`]: PST / PGST verdicts for the antipodal pair.

pub mod classifier;
pub mod diophantine;
pub mod dynamics;
pub mod graph;
pub mod spectral;

pub use classifier::{
    classify, hypothesis_report, verify_classification, Citation, Classification, Verdict,
};
pub use diophantine::{LatticeKind, QRange, TimeLattice};
pub use dynamics::{fidelity, transition_entry, transition_matrix, Amplitude, TransferRecord};
pub use graph::{CirculantGraph, GraphError};
pub use spectral::{spectrum, Spectrum};
