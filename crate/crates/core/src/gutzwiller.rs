//! Site-factorized product states `∏_k Σ_n C_n |n⟩_k` with identical real
//! on-site amplitudes.
//!
//! The total atom number is not fixed; `N` always means the realized mean
//! `M·⟨n̂⟩`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Half-width of the Gaussian window in units of σ.
pub const WINDOW_SIGMAS: f64 = 12.0;

/// Largest relative mean shift tolerated when the window is cut at `n = 0`.
pub const TRUNCATION_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct GutzwillerProduct {
    sites: usize,
    target_mean: f64,
    amplitudes: Vec<f64>,
}

/// On-site expectation values of a product state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SiteMoments {
    /// `⟨â⟩`
    pub a1: f64,
    /// `⟨â²⟩`
    pub a2: f64,
    /// `⟨n̂⟩`
    pub n1: f64,
    /// `⟨n̂²⟩`
    pub n2: f64,
    pub var_n: f64,
    /// `⟨â†â†ââ⟩`
    pub pair_density: f64,
    /// `⟨â†â†â⟩`
    pub skew_coherence: f64,
}

impl GutzwillerProduct {
    /// Product state with arbitrary real amplitudes `C_0, C_1, …`, normalized here.
    pub fn from_amplitudes(sites: usize, amplitudes: Vec<f64>) -> Result<Self> {
        if sites < 2 {
            return Err(Error::invalid("M", "at least two sites are required"));
        }
        if amplitudes.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("amplitudes", "non-finite entry"));
        }
        let norm = amplitudes
            .iter()
            .map(|c| c * c)
            .collect::<CompensatedSum>()
            .value()
            .sqrt();
        if norm == 0.0 {
            return Err(Error::invalid("amplitudes", "zero vector"));
        }
        let amplitudes: Vec<f64> = amplitudes.into_iter().map(|c| c / norm).collect();
        let n1 = amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c * c)
            .collect::<CompensatedSum>()
            .value();
        Ok(Self {
            sites,
            target_mean: n1,
            amplitudes,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Requested `⟨n̂⟩`; equals [`Self::mean_occupation`] up to discreteness.
    pub fn target_mean(&self) -> f64 {
        self.target_mean
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn max_occupation(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn mean_occupation(&self) -> f64 {
        self.moments().n1
    }

    /// Realized `⟨N̂⟩ = M·⟨n̂⟩`.
    pub fn total_atoms(&self) -> f64 {
        self.sites as f64 * self.mean_occupation()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|c| c * c)
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn moments(&self) -> SiteMoments {
        site_moments(&self.amplitudes)
    }
}

/// Gaussian profile `C_n ∝ exp(−(n − n̄)²/(4σ²))`, so that `|C_n|²` has
/// standard deviation σ and `Δ²n̂ ≈ σ²`.
///
/// The window is `[max(0, ⌊n̄ − 12σ⌋), ⌈n̄ + 12σ⌉]`.
pub fn make_gaussian_product(sites: usize, mean_n: f64, sigma: f64) -> Result<GutzwillerProduct> {
    if sites < 2 {
        return Err(Error::invalid("M", "at least two sites are required"));
    }
    if !(mean_n.is_finite() && mean_n > 0.0) {
        return Err(Error::invalid("mean_n", "must be positive and finite"));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid("sigma", "must be positive and finite"));
    }
    let upper = (mean_n + WINDOW_SIGMAS * sigma).ceil();
    if upper > 1e8 {
        return Err(Error::invalid("sigma", "occupation window exceeds 10^8 states"));
    }
    let lower_raw = mean_n - WINDOW_SIGMAS * sigma;
    let lower = lower_raw.floor().max(0.0) as usize;
    let upper = upper as usize;

    let width = 4.0 * sigma * sigma;
    let exponent = |n: usize| -(n as f64 - mean_n).powi(2) / width;
    let peak = (lower..=upper).map(exponent).fold(f64::NEG_INFINITY, f64::max);
    let mut amplitudes = vec![0.0; upper + 1];
    for (n, c) in amplitudes.iter_mut().enumerate().skip(lower) {
        *c = (exponent(n) - peak).exp();
    }
    let mut state = GutzwillerProduct::from_amplitudes(sites, amplitudes)?;
    state.target_mean = mean_n;

    if lower_raw < 0.0 {
        let realized = state.mean_occupation();
        if ((realized - mean_n) / mean_n).abs() > TRUNCATION_TOLERANCE {
            return Err(Error::TruncationShift {
                realized,
                target: mean_n,
            });
        }
    }
    Ok(state)
}

/// Moments of a single site with real amplitudes `c[n]`.
pub fn site_moments(c: &[f64]) -> SiteMoments {
    let mut a1 = CompensatedSum::new();
    let mut a2 = CompensatedSum::new();
    let mut n1 = CompensatedSum::new();
    let mut n2 = CompensatedSum::new();
    let mut pair = CompensatedSum::new();
    let mut skew = CompensatedSum::new();
    for (n, &cn) in c.iter().enumerate() {
        let nf = n as f64;
        let p = cn * cn;
        n1.add(nf * p);
        n2.add(nf * nf * p);
        pair.add(nf * (nf - 1.0) * p);
        if let Some(&up) = c.get(n + 1) {
            let root = (nf + 1.0).sqrt();
            a1.add(up * cn * root);
            skew.add(up * cn * nf * root);
        }
        if let Some(&up2) = c.get(n + 2) {
            a2.add(up2 * cn * ((nf + 1.0) * (nf + 2.0)).sqrt());
        }
    }
    let (n1, n2) = (n1.value(), n2.value());
    SiteMoments {
        a1: a1.value(),
        a2: a2.value(),
        n1,
        n2,
        var_n: (n2 - n1 * n1).max(0.0),
        pair_density: pair.value(),
        skew_coherence: skew.value(),
    }
}

impl SiteMoments {
    /// Coherent fraction `⟨â⟩²/⟨n̂⟩`; the two-site visibility.
    pub fn coherence(&self) -> f64 {
        if self.n1 == 0.0 {
            0.0
        } else {
            self.a1 * self.a1 / self.n1
        }
    }

    /// Phase squeezing of any two sites of the product,
    /// `n1·(n1² + n1 − a2²)/a1⁴`.
    pub fn pair_squeezing(&self) -> Result<f64> {
        let a1sq = self.a1 * self.a1;
        if a1sq <= 1e-300 || a1sq <= 1e-14 * self.n1 {
            return Err(Error::UndefinedSqueezing);
        }
        Ok(self.n1 * (self.n1 * self.n1 + self.n1 - self.a2 * self.a2) / (a1sq * a1sq))
    }

    /// `Δ²Ĵy` of a two-site product, `½(n1² + n1 − a2²)`.
    pub fn pair_var_jy(&self) -> f64 {
        0.5 * (self.n1 * self.n1 + self.n1 - self.a2 * self.a2)
    }
}

fn require_two_sites(state: &GutzwillerProduct) -> Result<()> {
    if state.sites != 2 {
        return Err(Error::invalid(
            "M",
            format!("two-mode quantity needs M = 2, got {}", state.sites),
        ));
    }
    Ok(())
}

/// `ν̃ = (2/N)⟨â⟩²` with `N = 2⟨n̂⟩`.
pub fn visibility_two_mode(state: &GutzwillerProduct) -> Result<f64> {
    require_two_sites(state)?;
    Ok(state.moments().coherence())
}

/// `ξ̃² = N·Δ²Ĵy/⟨Ĵx⟩²` with `⟨Ĵx⟩ = ⟨â⟩²`.
pub fn squeezing_two_mode(state: &GutzwillerProduct) -> Result<f64> {
    require_two_sites(state)?;
    state.moments().pair_squeezing()
}
