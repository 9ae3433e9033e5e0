//! Two-mode angular-momentum observables on fixed-N states.
//!
//! With the descending basis order, index `i` is `|N−i, i⟩`; mode `a` is
//! the first site and `b` the second.

use num_complex::Complex64;

use super::state::FockState;
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Means and variances of `Jx`, `Jy`, `Jz` for a two-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinTriple {
    pub particles: u32,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub var_jx: f64,
    pub var_jy: f64,
    pub var_jz: f64,
}

impl SpinTriple {
    /// Fringe visibility `(2/N)⟨Jx⟩`.
    pub fn visibility(&self) -> f64 {
        2.0 * self.jx / f64::from(self.particles)
    }

    /// Phase-squeezing parameter `N·Var(Jy)/⟨Jx⟩²`.
    pub fn phase_squeezing(&self) -> Result<f64> {
        let n = f64::from(self.particles);
        if self.jx.abs() <= 1e-12 * n.max(1.0) {
            return Err(Error::UndefinedSqueezing);
        }
        Ok(n * self.var_jy / (self.jx * self.jx))
    }
}

/// `a†b |ψ⟩`, which moves one atom from site 2 to site 1.
fn raise(state: &[Complex64], n: u32) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for i in 1..state.len() {
        let (na, nb) = (f64::from(n) - i as f64, i as f64);
        out[i - 1] += state[i] * ((na + 1.0) * nb).sqrt();
    }
    out
}

/// `a b† |ψ⟩`.
fn lower(state: &[Complex64], n: u32) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for i in 0..state.len() - 1 {
        let (na, nb) = (f64::from(n) - i as f64, i as f64);
        out[i + 1] += state[i] * (na * (nb + 1.0)).sqrt();
    }
    out
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let re = compensated_sum(a.iter().zip(b).map(|(x, y)| (x.conj() * y).re));
    let im = compensated_sum(a.iter().zip(b).map(|(x, y)| (x.conj() * y).im));
    Complex64::new(re, im)
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    compensated_sum(a.iter().map(|c| c.norm_sqr()))
}

pub fn spin_observables(state: &FockState) -> Result<SpinTriple> {
    if state.modes() != 2 {
        return Err(Error::invalid(
            "state",
            format!("spin observables need two modes, got {}", state.modes()),
        ));
    }
    let n = state.particles();
    let psi = state.amplitudes();
    let up = raise(psi, n);
    let down = lower(psi, n);

    let jx_psi: Vec<Complex64> = up.iter().zip(&down).map(|(u, d)| 0.5 * (u + d)).collect();
    let jy_psi: Vec<Complex64> = up
        .iter()
        .zip(&down)
        .map(|(u, d)| (u - d) / Complex64::new(0.0, 2.0))
        .collect();

    let jx = inner(psi, &jx_psi).re;
    let jy = inner(psi, &jy_psi).re;
    let jz = state.expect_diagonal(|occ| 0.5 * (f64::from(occ[0]) - f64::from(occ[1])));
    let jz2 = state.expect_diagonal(|occ| {
        let m = 0.5 * (f64::from(occ[0]) - f64::from(occ[1]));
        m * m
    });

    Ok(SpinTriple {
        particles: n,
        jx,
        jy,
        jz,
        var_jx: (norm_sqr(&jx_psi) - jx * jx).max(0.0),
        var_jy: (norm_sqr(&jy_psi) - jy * jy).max(0.0),
        var_jz: (jz2 - jz * jz).max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn superfluid_two_atoms() {
        let s = FockState::superfluid(2, 2).unwrap();
        let t = spin_observables(&s).unwrap();
        assert_abs_diff_eq!(t.jx, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.visibility(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.jy, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.jz, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn coherent_state_is_not_squeezed() {
        for n in [2, 7, 40] {
            let s = FockState::superfluid(n, 2).unwrap();
            let t = spin_observables(&s).unwrap();
            let nf = f64::from(n);
            assert_abs_diff_eq!(t.jx, nf / 2.0, epsilon = 1e-10);
            assert_abs_diff_eq!(t.var_jy, nf / 4.0, epsilon = 1e-10);
            assert_abs_diff_eq!(t.phase_squeezing().unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn twin_fock_has_undefined_squeezing() {
        let s = FockState::basis_state(6, &[3, 3]).unwrap();
        let t = spin_observables(&s).unwrap();
        assert_eq!(t.jx, 0.0);
        assert_eq!(t.phase_squeezing(), Err(Error::UndefinedSqueezing));
    }

    #[test]
    fn rejects_three_modes() {
        let s = FockState::superfluid(2, 3).unwrap();
        assert!(spin_observables(&s).is_err());
    }
}
