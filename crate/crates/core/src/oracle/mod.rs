//! Brute-force references for the closed forms.
//!
//! * [`dense`]: spin matrices and literal MPS tensors.
//! * [`environment`]: thermodynamic-limit contractions of the literal
//!   tensors, with environments from power iteration and connected sums
//!   done term by term.
//! * [`ed`]: the blockade-constrained Hilbert space at finite `L`.

pub mod dense;
pub mod ed;
pub mod environment;

pub use ed::{build_basis, build_hamiltonian, exact_report, mps_to_statevector, ConstrainedBasis, ExactReport};
pub use environment::{numeric_environment, EnvironmentReport};
