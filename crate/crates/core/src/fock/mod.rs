//! Exact N-boson, M-mode states in the occupation-number basis.

mod basis;
mod bose_hubbard;
mod spin;
mod state;
pub mod tridiag;

pub use basis::{basis_dimension, FockBasis, OccupationVector, DEFAULT_BASIS_CAP};
pub use bose_hubbard::{bh_ground_state, bh_ground_state_with, two_site_hamiltonian, BoseHubbardGroundState};
pub use spin::{spin_observables, SpinTriple};
pub use state::{build_generator, site_weights, FockState, OnsiteMoments, PhaseGenerator, NORM_TOLERANCE};
