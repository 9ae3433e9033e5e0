//! Phase-estimation sensitivities for `N` bosons in an `M`-site optical
//! lattice used as a multi-path interferometer.
//!
//! * [`fock`]: exact fixed-N states, brute-force quantum Fisher information,
//!   two-mode spin observables and the two-site Bose-Hubbard ground state.
//! * [`bounds`]: closed-form Cramér-Rao bounds for linear and power-law
//!   potentials.
//! * [`gutzwiller`]: site-factorized product states with a Gaussian number
//!   profile.
//! * [`farfield`]: far-field fringe model, one-body Fisher information and
//!   the least-squares fit sensitivity.
//! * [`figures`], [`verify`], [`cli`]: sweep drivers, oracle suites and the
//!   command-line front end.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod farfield;
pub mod figures;
pub mod fock;
pub mod gutzwiller;
pub mod numeric;
pub mod verify;

pub use error::{Error, Result};
