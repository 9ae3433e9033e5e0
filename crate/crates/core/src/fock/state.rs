use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use super::basis::FockBasis;
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, CompensatedSum};

/// Tolerance on `Σ|C|² = 1` for a constructed or evolved state.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Diagonal phase-shift generator `Σ_k k^j n_k` in the occupation basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGenerator {
    exponent: f64,
    diagonal: Vec<f64>,
}

impl PhaseGenerator {
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Smallest and largest eigenvalue over the basis.
    pub fn spectrum_bounds(&self) -> (f64, f64) {
        self.diagonal
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            })
    }

    /// `(λmax − λmin)²`, the largest value `4·Var(h)` can take.
    pub fn max_fisher(&self) -> f64 {
        let (lo, hi) = self.spectrum_bounds();
        (hi - lo).powi(2)
    }
}

/// Per-site phase weights `k^j`, `k = 1..=M`.
pub fn site_weights(modes: usize, exponent: f64) -> Result<Vec<f64>> {
    if !exponent.is_finite() {
        return Err(Error::invalid("j", "exponent must be finite"));
    }
    let weights: Vec<f64> = (1..=modes).map(|k| (k as f64).powf(exponent)).collect();
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::invalid("j", format!("k^{exponent} overflows for M = {modes}")));
    }
    Ok(weights)
}

pub fn build_generator(basis: &FockBasis, exponent: f64) -> Result<PhaseGenerator> {
    let weights = site_weights(basis.modes(), exponent)?;
    let diagonal = basis
        .iter()
        .map(|occ| compensated_sum(occ.iter().zip(&weights).map(|(&n, &w)| f64::from(n) * w)))
        .collect();
    Ok(PhaseGenerator { exponent, diagonal })
}

/// Exact moments of the number operator on one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnsiteMoments {
    pub mean: f64,
    pub second: f64,
    pub variance: f64,
}

/// Pure state of exactly `N` bosons in `M` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    basis: Arc<FockBasis>,
    amplitudes: Vec<Complex64>,
}

impl FockState {
    /// Normalizes `amplitudes` onto `basis`.
    pub fn from_amplitudes(basis: Arc<FockBasis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::invalid(
                "amplitudes",
                format!("expected {} entries, got {}", basis.len(), amplitudes.len()),
            ));
        }
        if amplitudes.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("amplitudes", "non-finite entry"));
        }
        let norm = compensated_sum(amplitudes.iter().map(|c| c.norm_sqr())).sqrt();
        if norm == 0.0 {
            return Err(Error::invalid("amplitudes", "zero vector"));
        }
        let amplitudes = amplitudes.into_iter().map(|c| c / norm).collect();
        Ok(Self { basis, amplitudes })
    }

    pub fn basis_state(particles: u32, counts: &[u32]) -> Result<Self> {
        let basis = Arc::new(FockBasis::new(particles, counts.len())?);
        let index = basis
            .index_of(counts)
            .ok_or_else(|| Error::invalid("counts", "occupations do not sum to N"))?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.len()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { basis, amplitudes })
    }

    /// Every atom in the equal superposition over all sites (multinomial amplitudes).
    pub fn superfluid(particles: u32, modes: usize) -> Result<Self> {
        if particles == 0 {
            return Err(Error::invalid("N", "at least one particle is required"));
        }
        let basis = Arc::new(FockBasis::new(particles, modes)?);
        let ln_fact = ln_factorials(particles);
        let ln_norm = ln_fact[particles as usize] - f64::from(particles) * (modes as f64).ln();
        let amplitudes = basis
            .iter()
            .map(|occ| {
                let ln_denominator: f64 = occ.iter().map(|&n| ln_fact[n as usize]).sum();
                Complex64::new((0.5 * (ln_norm - ln_denominator)).exp(), 0.0)
            })
            .collect();
        Self::from_amplitudes(basis, amplitudes)
    }

    /// Equal-weight superposition of the `M` states with all atoms on one site.
    pub fn noon_symmetric(particles: u32, modes: usize) -> Result<Self> {
        if particles == 0 {
            return Err(Error::invalid("N", "at least one particle is required"));
        }
        let basis = Arc::new(FockBasis::new(particles, modes)?);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.len()];
        let weight = Complex64::new(1.0 / (modes as f64).sqrt(), 0.0);
        let mut counts = vec![0u32; modes];
        for k in 0..modes {
            counts.fill(0);
            counts[k] = particles;
            let index = basis.index_of(&counts).expect("extremal vector is in the basis");
            amplitudes[index] = weight;
        }
        Ok(Self { basis, amplitudes })
    }

    /// Two-component NOON state `(|N,0,…,0⟩ + |0,…,0,N⟩)/√2`.
    pub fn noon_extremal(particles: u32, modes: usize) -> Result<Self> {
        let basis = Arc::new(FockBasis::new(particles, modes)?);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.len()];
        amplitudes[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let last = amplitudes.len() - 1;
        amplitudes[last] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Ok(Self { basis, amplitudes })
    }

    /// Random state whose amplitudes depend only on the multiset of occupations,
    /// so it is invariant under any permutation of sites.
    pub fn random_site_symmetric<R: Rng + ?Sized>(particles: u32, modes: usize, rng: &mut R) -> Result<Self> {
        let basis = Arc::new(FockBasis::new(particles, modes)?);
        let mut by_multiset: HashMap<Vec<u32>, Complex64> = HashMap::new();
        let mut amplitudes = Vec::with_capacity(basis.len());
        for occ in basis.iter() {
            let mut key = occ.to_vec();
            key.sort_unstable();
            let c = *by_multiset
                .entry(key)
                .or_insert_with(|| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            amplitudes.push(c);
        }
        Self::from_amplitudes(basis, amplitudes)
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn shared_basis(&self) -> Arc<FockBasis> {
        Arc::clone(&self.basis)
    }

    pub fn particles(&self) -> u32 {
        self.basis.particles()
    }

    pub fn modes(&self) -> usize {
        self.basis.modes()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        compensated_sum(self.amplitudes.iter().map(|c| c.norm_sqr()))
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.amplitudes.iter().map(|c| c.norm_sqr())
    }

    /// Expectation of a diagonal observable given by its value on each basis vector.
    pub fn expect_diagonal<F: Fn(&[u32]) -> f64>(&self, observable: F) -> f64 {
        compensated_sum(
            self.basis
                .iter()
                .zip(self.probabilities())
                .map(|(occ, p)| p * observable(occ)),
        )
    }

    /// Multiplies each amplitude by `exp(−iθ Σ_k k^j n_k)`.
    pub fn apply_phase(&self, theta: f64, exponent: f64) -> Result<Self> {
        let generator = build_generator(&self.basis, exponent)?;
        Ok(self.apply_generator(&generator, theta))
    }

    pub fn apply_generator(&self, generator: &PhaseGenerator, theta: f64) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(generator.diagonal())
            .map(|(c, &h)| c * Complex64::from_polar(1.0, -theta * h))
            .collect();
        Self {
            basis: Arc::clone(&self.basis),
            amplitudes,
        }
    }

    /// Variance of a diagonal generator.
    pub fn generator_variance(&self, generator: &PhaseGenerator) -> f64 {
        let h = generator.diagonal();
        let mean = compensated_sum(self.probabilities().zip(h).map(|(p, &x)| p * x));
        // centred second moment avoids cancellation in <h²> − <h>²
        compensated_sum(self.probabilities().zip(h).map(|(p, &x)| p * (x - mean) * (x - mean)))
    }

    /// Quantum Fisher information `4 Var(h_j)` of the pure state.
    pub fn qfi_brute(&self, exponent: f64) -> Result<f64> {
        let generator = build_generator(&self.basis, exponent)?;
        Ok(4.0 * self.generator_variance(&generator))
    }

    /// Moments of `n_k` for the 1-based site index `site`.
    pub fn onsite_moments(&self, site: usize) -> Result<OnsiteMoments> {
        if site == 0 || site > self.modes() {
            return Err(Error::invalid(
                "site",
                format!("expected 1..={}, got {site}", self.modes()),
            ));
        }
        let k = site - 1;
        let mut mean = CompensatedSum::new();
        let mut second = CompensatedSum::new();
        let mut centred = Vec::with_capacity(self.amplitudes.len());
        for (occ, p) in self.basis.iter().zip(self.probabilities()) {
            let n = f64::from(occ[k]);
            mean.add(p * n);
            second.add(p * n * n);
            centred.push((p, n));
        }
        let mean = mean.value();
        let variance = compensated_sum(centred.iter().map(|&(p, n)| p * (n - mean) * (n - mean)));
        Ok(OnsiteMoments {
            mean,
            second: second.value(),
            variance,
        })
    }

    /// `⟨n_k n_l⟩` for 1-based site indices.
    pub fn pair_correlation(&self, site_a: usize, site_b: usize) -> Result<f64> {
        let modes = self.modes();
        for site in [site_a, site_b] {
            if site == 0 || site > modes {
                return Err(Error::invalid("site", format!("expected 1..={modes}, got {site}")));
            }
        }
        let (a, b) = (site_a - 1, site_b - 1);
        Ok(self.expect_diagonal(|occ| f64::from(occ[a]) * f64::from(occ[b])))
    }
}

fn ln_factorials(n: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = CompensatedSum::new();
    out.push(0.0);
    for k in 1..=n {
        acc.add(f64::from(k).ln());
        out.push(acc.value());
    }
    out
}
