//! Far-field interference of the released lattice: fringe factor, one-body
//! Fisher information and the sensitivity of a least-squares fit of the
//! fringe phase.
//!
//! The slowly varying envelope of the expanded cloud is not modeled; every
//! integral runs over one fringe period `φ ∈ [−π, π)` with weight `dφ/2π`.

mod dirichlet;
mod fringe;
mod g2;
mod quadrature;
mod two_well;

pub use dirichlet::{dirichlet_f, dirichlet_f_prime, dirichlet_g, dirichlet_kernel};
pub use fringe::{
    coefficient_c, coefficient_c_from, fisher_one_body, fit_components, fit_sensitivity, fringe_density, integral_i1,
    integral_i2, log_derivative_spectrum, pair_integral, pair_integral_at, two_body_integrals, DoubleIntegral,
    FitComponents, FringeModel, PairKernel, TwoBodyIntegrals, DARK_FRINGE_THRESHOLD,
};
pub use g2::{coefficient_c_g2, g2_fringe};
pub use quadrature::{
    node, nodes, QuadratureGrid, DEFAULT_MAX_NODES, DEFAULT_MAX_NODES_DIRECT, DEFAULT_NODES_1D, DEFAULT_NODES_2D,
    DEFAULT_TOLERANCE,
};
pub use two_well::{coefficient_c_closed, fisher_per_atom_closed, pair_integral_closed, two_well_sensitivity_closed};
