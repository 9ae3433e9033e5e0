//! Closed forms for two sites, where `f(φ) = 1 + ν̃ cos φ`.
//!
//! With `u = √(1 − ν²)`: the one-body Fisher information per atom is
//! `1 − u` and both pair integrals equal `−2ν²/(1 + u)²`.

use crate::error::{Error, Result};

fn check_visibility(nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::invalid("nu", format!("visibility must lie in (0, 1], got {nu}")));
    }
    Ok((1.0 - nu * nu).max(0.0).sqrt())
}

/// `F₁/N = 1 − √(1 − ν²)`.
pub fn fisher_per_atom_closed(nu: f64) -> Result<f64> {
    let u = check_visibility(nu)?;
    Ok(nu * nu / (1.0 + u))
}

/// `I₁ = I₂ = (2/ν²)(−2 + ν² + 2√(1 − ν²))`.
pub fn pair_integral_closed(nu: f64) -> Result<f64> {
    let u = check_visibility(nu)?;
    Ok(-2.0 * nu * nu / ((1.0 + u) * (1.0 + u)))
}

/// `C = I·(⟨â²⟩² − N²/4)`.
pub fn coefficient_c_closed(nu: f64, a2: f64, total_atoms: f64) -> Result<f64> {
    Ok(pair_integral_closed(nu)? * (a2 * a2 - 0.25 * total_atoms * total_atoms))
}

/// `Δ²θ = (ξ² + √(1 − ν²)/ν²)/(mN)`.
pub fn two_well_sensitivity_closed(xi2: f64, nu: f64, particles: f64, repetitions: u32) -> Result<f64> {
    let u = check_visibility(nu)?;
    if !(particles > 0.0) {
        return Err(Error::invalid("N", "must be positive"));
    }
    if repetitions == 0 {
        return Err(Error::invalid("m", "at least one repetition is required"));
    }
    Ok((xi2 + u / (nu * nu)) / (f64::from(repetitions) * particles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_form_examples() {
        assert_abs_diff_eq!(fisher_per_atom_closed(0.8).unwrap(), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(pair_integral_closed(0.6).unwrap(), -2.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            two_well_sensitivity_closed(0.5, 0.8, 100.0, 1).unwrap(),
            0.014375,
            epsilon = 1e-15
        );
        assert_eq!(two_well_sensitivity_closed(1.0, 1.0, 10.0, 2).unwrap(), 0.05);
        assert!(two_well_sensitivity_closed(1.0, 0.0, 10.0, 1).is_err());
        assert!(pair_integral_closed(1.2).is_err());
    }

    #[test]
    fn stable_forms_match_the_textbook_forms() {
        for k in 1..=200 {
            let nu = f64::from(k) / 200.0;
            let u = (1.0 - nu * nu).sqrt();
            let bracket = -2.0 + nu * nu + 2.0 * u;
            assert_abs_diff_eq!(bracket, -(1.0 - u) * (1.0 - u), epsilon = 1e-15);
            assert!(bracket <= 0.0);
            assert_abs_diff_eq!(
                pair_integral_closed(nu).unwrap(),
                2.0 / (nu * nu) * bracket,
                epsilon = 1e-14 / (nu * nu)
            );
            assert_abs_diff_eq!(fisher_per_atom_closed(nu).unwrap(), 1.0 - u, epsilon = 1e-15);
        }
    }
}
