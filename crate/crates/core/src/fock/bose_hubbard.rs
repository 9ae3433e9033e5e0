//! Ground state of the two-site Bose-Hubbard Hamiltonian `−E_J·Jx + U·Jz²`.
//!
//! In the `Jz` basis the Hamiltonian is tridiagonal. It commutes with the
//! site swap `n ↔ N−n`, and for `E_J > 0` its off-diagonal elements are
//! negative, so the ground state is nodeless and swap-even. Diagonalizing
//! inside the even sector keeps the problem non-degenerate even when the
//! even/odd splitting falls below double precision (`E_J/|U| → 0`).

use std::sync::Arc;

use num_complex::Complex64;

use super::basis::FockBasis;
use super::state::FockState;
use super::tridiag::{fix_sign, SymTridiagonal, DEFAULT_MAX_ITERATIONS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BoseHubbardGroundState {
    pub state: FockState,
    pub energy: f64,
}

/// Full `(N+1)×(N+1)` Hamiltonian in the basis `|N−i, i⟩`.
pub fn two_site_hamiltonian(particles: u32, josephson: f64, interaction: f64) -> Result<SymTridiagonal> {
    let n = f64::from(particles);
    let dim = particles as usize + 1;
    let diag = (0..dim)
        .map(|i| {
            let m = 0.5 * (n - 2.0 * i as f64);
            interaction * m * m
        })
        .collect();
    let off = (0..dim - 1).map(|i| hopping(n, i, josephson)).collect();
    SymTridiagonal::new(diag, off)
}

/// `⟨i+1| −E_J Jx |i⟩`.
fn hopping(n: f64, i: usize, josephson: f64) -> f64 {
    let i = i as f64;
    -0.5 * josephson * ((n - i) * (i + 1.0)).sqrt()
}

fn even_sector(particles: u32, josephson: f64, interaction: f64) -> Result<SymTridiagonal> {
    let full = two_site_hamiltonian(particles, josephson, interaction)?;
    let n = particles as usize;
    let mut diag: Vec<f64> = full.diag()[..n / 2 + 1].to_vec();
    let mut off: Vec<f64> = full.off()[..n / 2].to_vec();
    if n.is_multiple_of(2) {
        // centre vector |N/2, N/2⟩ couples to two symmetric partners
        if let Some(last) = off.last_mut() {
            *last *= std::f64::consts::SQRT_2;
        }
    } else {
        // partners (N+1)/2 ↔ (N−1)/2 are directly coupled
        let k = n / 2;
        diag[k] += full.off()[k];
    }
    SymTridiagonal::new(diag, off)
}

pub fn bh_ground_state(particles: u32, josephson: f64, interaction: f64) -> Result<BoseHubbardGroundState> {
    bh_ground_state_with(particles, josephson, interaction, DEFAULT_MAX_ITERATIONS)
}

pub fn bh_ground_state_with(
    particles: u32,
    josephson: f64,
    interaction: f64,
    max_iterations: usize,
) -> Result<BoseHubbardGroundState> {
    if particles == 0 {
        return Err(Error::invalid("N", "at least one particle is required"));
    }
    if !(josephson.is_finite() && josephson > 0.0) {
        return Err(Error::invalid("E_J", "must be positive and finite"));
    }
    if !interaction.is_finite() {
        return Err(Error::invalid("U", "must be finite"));
    }
    let n = particles as usize;
    let sector = even_sector(particles, josephson, interaction)?;
    let reduced = sector.ground_state(max_iterations)?;

    let mut amplitudes = vec![0.0; n + 1];
    for (i, &r) in reduced.vector.iter().enumerate() {
        if n.is_multiple_of(2) && i == n / 2 {
            amplitudes[i] = r;
        } else {
            let v = r * std::f64::consts::FRAC_1_SQRT_2;
            amplitudes[i] = v;
            amplitudes[n - i] = v;
        }
    }
    fix_sign(&mut amplitudes);
    let basis = Arc::new(FockBasis::new(particles, 2)?);
    let state = FockState::from_amplitudes(basis, amplitudes.into_iter().map(|a| Complex64::new(a, 0.0)).collect())?;
    Ok(BoseHubbardGroundState {
        state,
        energy: reduced.value,
    })
}
