//! Time-dependent variational dynamics of the spin-`J` PXP chain on the
//! manifold of `ℤ_K`-periodic, bond-dimension-2 matrix product states.
//!
//! Each site carries a spin coherent state `|θ_i, φ_i⟩`; the Rydberg blockade
//! is built into the bond structure. The crate provides closed-form Gram
//! matrices, equations of motion, the energy variance and the leakage rate
//! `Γ²`, together with two independent numerical oracles.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod gram;
pub mod integrator;
pub mod leakage;
pub mod model;
pub mod oracle;
pub mod spin_coherent;
pub mod transfer;
pub mod validation;

pub use dynamics::{eom_exact, eom_large_j, eom_series, eom_spin_half, variational_energy, Velocity};
pub use error::{Error, Result};
pub use gram::{gram_bundle, GramBundle};
pub use leakage::{energy_variance, leakage_large_j, leakage_rate, leakage_spin_half, VarianceReport};
pub use model::{ModelParams, UnitCell, VariationalState};
