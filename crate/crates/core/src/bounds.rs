//! Closed-form Cramér-Rao bounds on the phase variance.
//!
//! The phase `θ = g·x0^j·t/ħ` relates estimation errors on `θ` and on the
//! coupling `g` by `Δg = ħ/(t·x0^j)·Δθ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

pub const SCHEMA_VERSION: u32 = 1;

/// Reduced Planck constant in J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HbarUnits {
    /// ħ = 1.
    #[default]
    Natural,
    Si,
}

impl HbarUnits {
    pub fn value(self) -> f64 {
        match self {
            HbarUnits::Natural => 1.0,
            HbarUnits::Si => HBAR_SI,
        }
    }
}

/// Perturbing potential `g·x^j` acting for a time `t` on sites spaced by `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub exponent: f64,
    pub coupling: f64,
    pub spacing: f64,
    pub duration: f64,
}

impl PotentialSpec {
    pub fn new(exponent: f64, coupling: f64, spacing: f64, duration: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::invalid("x0", "lattice spacing must be positive"));
        }
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(Error::invalid("t", "interaction time must be non-negative"));
        }
        if !exponent.is_finite() || !coupling.is_finite() {
            return Err(Error::invalid("g", "coupling and exponent must be finite"));
        }
        let spec = Self {
            exponent,
            coupling,
            spacing,
            duration,
        };
        if !spec.theta(1.0).is_finite() {
            return Err(Error::invalid("theta", "phase is not finite"));
        }
        Ok(spec)
    }

    /// Phase `θ = g·x0^j·t/ħ`.
    pub fn theta(&self, hbar: f64) -> f64 {
        self.coupling * self.spacing.powf(self.exponent) * self.duration / hbar
    }

    /// Energy scale `ε = g·x0`.
    pub fn energy_scale(&self) -> f64 {
        self.coupling * self.spacing
    }
}

/// Inputs shared by the symmetric-state bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundQuery {
    pub particles: u32,
    pub sites: usize,
    pub exponent: f64,
    pub repetitions: u32,
    /// Entanglement function `f(N)`: `N` for the superfluid, up to `N²`.
    pub entanglement: f64,
}

impl BoundQuery {
    pub fn validate(&self) -> Result<()> {
        check_sites(self.sites)?;
        check_repetitions(self.repetitions)?;
        check_entanglement(self.entanglement)?;
        if !self.exponent.is_finite() {
            return Err(Error::invalid("j", "exponent must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FisherInfo {
    Quantum { fisher: f64 },
    Fit { one_body: f64, correction: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub schema_version: u32,
    pub variance_theta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance_g: Option<f64>,
    pub fisher: FisherInfo,
    pub repetitions: u32,
    pub provenance: String,
    /// Set when `F1 + C < 0`, which no physical state can produce.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub invalid: bool,
}

impl SensitivityReport {
    pub fn new(variance_theta: f64, fisher: FisherInfo, repetitions: u32, provenance: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            variance_theta,
            variance_g: None,
            fisher,
            repetitions,
            provenance: provenance.into(),
            invalid: false,
        }
    }

    pub fn with_coupling(mut self, spec: &PotentialSpec, hbar: f64) -> Result<Self> {
        self.variance_g = Some(theta_to_g(self.variance_theta, spec, hbar)?);
        Ok(self)
    }
}

fn check_sites(sites: usize) -> Result<()> {
    if sites < 2 {
        return Err(Error::invalid("M", "at least two sites are required"));
    }
    Ok(())
}

fn check_repetitions(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("m", "at least one repetition is required"));
    }
    Ok(())
}

fn check_entanglement(f_n: f64) -> Result<()> {
    if !(f_n.is_finite() && f_n > 0.0) {
        return Err(Error::invalid("fN", "entanglement function must be positive"));
    }
    Ok(())
}

/// Best variance over all states, measurements and estimators:
/// `1/(m·N²·(M^j − 1)²)`.
pub fn ultimate_bound(particles: u32, sites: usize, exponent: f64, repetitions: u32) -> Result<f64> {
    check_sites(sites)?;
    check_repetitions(repetitions)?;
    if particles == 0 {
        return Err(Error::invalid("N", "at least one particle is required"));
    }
    let spread = (sites as f64).powf(exponent) - 1.0;
    if spread == 0.0 {
        return Err(Error::DegeneratePotential);
    }
    if !spread.is_finite() {
        return Err(Error::invalid("j", "M^j overflows"));
    }
    let n = f64::from(particles);
    Ok(1.0 / (f64::from(repetitions) * n * n * spread * spread))
}

/// Linear-potential bound for site-symmetric states, `3/(m·f(N)·(M² − 1))`.
pub fn symmetric_bound_linear(sites: usize, entanglement: f64, repetitions: u32) -> Result<f64> {
    check_sites(sites)?;
    check_repetitions(repetitions)?;
    check_entanglement(entanglement)?;
    let m2 = (sites as f64).powi(2);
    Ok(3.0 / (f64::from(repetitions) * entanglement * (m2 - 1.0)))
}

/// Generalized harmonic number `Σ_{k=1..n} k^(−r)`.
pub fn harmonic_number(n: u64, order: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    let mut acc = CompensatedSum::new();
    for k in 1..=n {
        acc.add((k as f64).powf(-order));
    }
    Ok(acc.value())
}

/// Power-law potential bound for site-symmetric states,
/// `M² / (4·m·f(N)·(M·H_M^(−2j) − (H_M^(−j))²))`.
pub fn symmetric_bound_nonlinear(sites: usize, exponent: f64, entanglement: f64, repetitions: u32) -> Result<f64> {
    check_sites(sites)?;
    check_repetitions(repetitions)?;
    check_entanglement(entanglement)?;
    let m = sites as f64;
    let h2 = harmonic_number(sites as u64, -2.0 * exponent)?;
    let h1 = harmonic_number(sites as u64, -exponent)?;
    let denominator = 4.0 * (m * h2 - h1 * h1);
    if !(denominator > 0.0) {
        return Err(Error::DegeneratePotential);
    }
    Ok(m * m / (f64::from(repetitions) * entanglement * denominator))
}

/// Large-`M` form of [`symmetric_bound_nonlinear`], valid for `j > 0`.
pub fn approx_bound_nonlinear(sites: usize, exponent: f64, entanglement: f64, repetitions: u32) -> Result<f64> {
    check_sites(sites)?;
    check_repetitions(repetitions)?;
    check_entanglement(entanglement)?;
    if !(exponent > 0.0) {
        return Err(Error::invalid("j", "the large-M form requires j > 0"));
    }
    let j = exponent;
    let prefactor = (1.0 + j).powi(2) * (1.0 + 2.0 * j) / (2.0 * j).powi(2);
    Ok(prefactor / ((sites as f64).powf(2.0 * j) * f64::from(repetitions) * entanglement))
}

/// Converts a phase variance into a coupling variance: `(ħ/(t·x0^j))²·Δ²θ`.
pub fn theta_to_g(variance_theta: f64, spec: &PotentialSpec, hbar: f64) -> Result<f64> {
    if !(spec.duration > 0.0) {
        return Err(Error::invalid("t", "interaction time must be positive"));
    }
    let factor = hbar / (spec.duration * spec.spacing.powf(spec.exponent));
    Ok(factor * factor * variance_theta)
}

/// `f(N)` recovered from the on-site variance of a symmetric state:
/// `Δ²n·M²/(M − 1)`.
pub fn entanglement_from_variance(onsite_variance: f64, sites: usize) -> f64 {
    let m = sites as f64;
    onsite_variance * m * m / (m - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn ultimate_bound_examples() {
        assert_eq!(ultimate_bound(1, 2, 1.0, 1).unwrap(), 1.0);
        assert_relative_eq!(ultimate_bound(10, 5, 1.0, 1).unwrap(), 6.25e-4, max_relative = 1e-15);
        assert_relative_eq!(
            ultimate_bound(1, 10, 2.0, 1).unwrap(),
            1.0 / 9801.0,
            max_relative = 1e-15
        );
        assert_eq!(ultimate_bound(3, 4, 0.0, 1), Err(Error::DegeneratePotential));
    }

    #[test]
    fn ultimate_bound_is_monotone() {
        for j in [-2.0, -1.0, 0.5, 1.0, 2.0] {
            let by_m: Vec<f64> = (2..40).map(|m| ultimate_bound(3, m, j, 1).unwrap()).collect();
            assert!(by_m.windows(2).all(|w| w[1] < w[0]), "j = {j}");
            let by_n: Vec<f64> = (1..40).map(|n| ultimate_bound(n, 4, j, 1).unwrap()).collect();
            assert!(by_n.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn linear_symmetric_examples() {
        assert_relative_eq!(
            symmetric_bound_linear(2, 7.0, 1).unwrap(),
            1.0 / 7.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(symmetric_bound_linear(2, 4.0, 1).unwrap(), 0.25, max_relative = 1e-15);
        assert!(symmetric_bound_linear(1, 4.0, 1).is_err());
    }

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic_number(4, -1.0).unwrap(), 10.0);
        assert_eq!(harmonic_number(3, -2.0).unwrap(), 14.0);
        assert_relative_eq!(harmonic_number(5, 1.0).unwrap(), 137.0 / 60.0, max_relative = 1e-15);
        assert!(harmonic_number(0, 1.0).is_err());
    }

    #[test]
    fn nonlinear_quadratic_two_sites() {
        assert_relative_eq!(
            symmetric_bound_nonlinear(2, 2.0, 1.0, 1).unwrap(),
            4.0 / 36.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn nonlinear_reduces_to_linear_for_unit_exponent() {
        for m in 2..=1000usize {
            let a = symmetric_bound_nonlinear(m, 1.0, 3.5, 2).unwrap();
            let b = symmetric_bound_linear(m, 3.5, 2).unwrap();
            assert!(((a - b) / b).abs() < 1e-12, "M = {m}");
        }
    }

    #[test]
    fn approx_examples() {
        assert_relative_eq!(
            approx_bound_nonlinear(10, 1.0, 1.0, 1).unwrap(),
            3.0 / 100.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            approx_bound_nonlinear(10, 2.0, 1.0, 1).unwrap(),
            2.8125e-4,
            max_relative = 1e-14
        );
        let half = approx_bound_nonlinear(2, 0.5, 1.0, 1).unwrap() * 2.0;
        assert_relative_eq!(half, 4.5, max_relative = 1e-15);
        assert!(approx_bound_nonlinear(10, 0.0, 1.0, 1).is_err());
        assert!(approx_bound_nonlinear(10, -1.0, 1.0, 1).is_err());
    }

    #[test]
    fn approx_converges_to_exact() {
        for j in [1.0, 2.0] {
            let exact = symmetric_bound_nonlinear(1000, j, 1.0, 1).unwrap();
            let approx = approx_bound_nonlinear(1000, j, 1.0, 1).unwrap();
            assert!((approx / exact - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn coupling_conversion() {
        let unit = PotentialSpec::new(1.0, 0.3, 1.0, 1.0).unwrap();
        assert_eq!(theta_to_g(0.7, &unit, 1.0).unwrap(), 0.7);
        let long = PotentialSpec::new(1.0, 0.3, 1.0, 2.0).unwrap();
        assert_abs_diff_eq!(theta_to_g(0.7, &long, 1.0).unwrap(), 0.7 / 4.0, epsilon = 1e-16);
        let cubic = PotentialSpec::new(3.0, 0.3, 2.0, 1.5).unwrap();
        let factor = (1.0f64 / (8.0 * 1.5)).powi(2);
        assert_relative_eq!(
            theta_to_g(0.7, &cubic, 1.0).unwrap(),
            0.7 * factor,
            max_relative = 1e-15
        );
        let idle = PotentialSpec::new(1.0, 0.3, 1.0, 0.0).unwrap();
        assert!(theta_to_g(0.7, &idle, 1.0).is_err());
        assert!(PotentialSpec::new(1.0, 0.3, 0.0, 1.0).is_err());
    }

    #[test]
    fn report_serializes_schema_version() {
        let r = SensitivityReport::new(1.0, FisherInfo::Quantum { fisher: 1.0 }, 1, "ultimate_bound");
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"schema_version\":1"));
        assert!(!json.contains("invalid"));
    }
}
