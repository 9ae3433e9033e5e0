//! Fringe factor `f(φ) = 1 + (⟨â⟩²/N)(D(φ) − M)` of the far-field density
//! and the Fisher-type integrals built from it.
//!
//! `N` is the total mean atom number `M·⟨n̂⟩`. Writing `κ = ⟨â⟩²/N` and
//! `ε = 1 − M·κ`, the fringe factor is `ε + κ·D(φ)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dirichlet::{dirichlet_f, dirichlet_f_prime, dirichlet_kernel};
use super::quadrature::{converge, node, nodes, QuadratureGrid};
use crate::bounds::{FisherInfo, SensitivityReport};
use crate::error::{Error, Result};
use crate::gutzwiller::{GutzwillerProduct, SiteMoments};
use crate::numeric::CompensatedSum;

/// Below this value of `f` the log-derivative is treated as singular.
pub const DARK_FRINGE_THRESHOLD: f64 = 1e-10;

const NEGATIVE_DENSITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FringeModel {
    sites: usize,
    total_atoms: f64,
    moments: SiteMoments,
    kappa: f64,
    epsilon: f64,
}

impl FringeModel {
    pub fn new(sites: usize, moments: SiteMoments) -> Result<Self> {
        if sites < 2 {
            return Err(Error::invalid("M", "at least two sites are required"));
        }
        let SiteMoments { a1, a2, n1, .. } = moments;
        if !(n1.is_finite() && n1 > 0.0) {
            return Err(Error::invalid("n1", "mean occupation must be positive"));
        }
        if !a1.is_finite() || !a2.is_finite() {
            return Err(Error::invalid("a1", "coherences must be finite"));
        }
        let total_atoms = sites as f64 * n1;
        let kappa = a1 * a1 / total_atoms;
        let mut epsilon = (n1 - a1 * a1) / n1;
        if epsilon < -NEGATIVE_DENSITY_TOLERANCE {
            return Err(Error::NegativeDensity { value: epsilon });
        }
        epsilon = epsilon.max(0.0);
        Ok(Self {
            sites,
            total_atoms,
            moments,
            kappa,
            epsilon,
        })
    }

    pub fn from_product(state: &GutzwillerProduct) -> Result<Self> {
        Self::new(state.sites(), state.moments())
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn total_atoms(&self) -> f64 {
        self.total_atoms
    }

    pub fn moments(&self) -> &SiteMoments {
        &self.moments
    }

    /// Fringe amplitude `⟨â⟩²/N`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Incoherent background `1 − M⟨â⟩²/N`, the minimum of `f`.
    pub fn background(&self) -> f64 {
        self.epsilon
    }

    pub fn density(&self, phi: f64) -> f64 {
        self.epsilon + self.kappa * dirichlet_f(phi, self.sites)
    }

    pub fn density_prime(&self, phi: f64) -> f64 {
        self.kappa * dirichlet_f_prime(phi, self.sites)
    }

    /// `∂_φ log f`, which equals `∂_θ log ρ` since `φ` depends on `θ` by a shift.
    pub fn log_derivative(&self, phi: f64) -> Result<f64> {
        let f = self.density(phi);
        if f < DARK_FRINGE_THRESHOLD {
            return Err(Error::DarkFringe);
        }
        Ok(self.density_prime(phi) / f)
    }

    /// `(∂_φ f)²/f`, continued through perfect dark fringes by the local
    /// quadratic model `f ≈ c(φ − φ₀)²`.
    fn fisher_integrand(&self, phi: f64) -> f64 {
        let f = self.density(phi);
        if f < DARK_FRINGE_THRESHOLD {
            let m = self.sites as f64;
            let cm = (0.5 * m * phi).cos();
            let s1 = (0.5 * phi).sin();
            return self.kappa * m * m * cm * cm / (s1 * s1);
        }
        let fp = self.density_prime(phi);
        fp * fp / f
    }
}

pub fn fringe_density(phi: f64, model: &FringeModel) -> f64 {
    model.density(phi)
}

/// `F₁ = N ∫ dφ/2π (∂_φ f)²/f`.
pub fn fisher_one_body(model: &FringeModel, grid: &QuadratureGrid) -> Result<f64> {
    grid.validate()?;
    if model.kappa == 0.0 {
        return Ok(0.0);
    }
    let ([value], _) = converge("F1", grid.nodes_1d, grid.max_nodes, grid.tolerance, |n| {
        let mean = (0..n)
            .map(|i| model.fisher_integrand(node(i, n, grid.shift)))
            .collect::<CompensatedSum>()
            .value()
            / n as f64;
        Ok(([mean], mean))
    })?;
    Ok(model.total_atoms * value)
}

fn log_derivatives(model: &FringeModel, n: usize, shift: f64) -> Result<Vec<f64>> {
    nodes(n, shift)
        .into_iter()
        .map(|phi| model.log_derivative(phi))
        .collect()
}

/// Trapezoid Fourier coefficients `L̂_d = (1/n) Σ_i L(φ_i) e^{i d φ_i}` of
/// the log-derivative for `d = −(M−1) … M−1`; entry `d + M − 1`.
pub fn log_derivative_spectrum(model: &FringeModel, n: usize, shift: f64) -> Result<Vec<Complex64>> {
    let values = log_derivatives(model, n, shift)?;
    Ok(spectrum(&values, model.sites, n, shift))
}

fn spectrum(values: &[f64], sites: usize, n: usize, shift: f64) -> Vec<Complex64> {
    let mut re = vec![CompensatedSum::new(); sites];
    let mut im = vec![CompensatedSum::new(); sites];
    for (i, &l) in values.iter().enumerate() {
        let z = Complex64::from_polar(1.0, node(i, n, shift));
        let mut p = Complex64::new(l, 0.0);
        for d in 0..sites {
            re[d].add(p.re);
            im[d].add(p.im);
            p *= z;
        }
    }
    let scale = 1.0 / n as f64;
    let positive: Vec<Complex64> = re
        .iter()
        .zip(&im)
        .map(|(r, i)| Complex64::new(r.value() * scale, i.value() * scale))
        .collect();
    let mut out = Vec::with_capacity(2 * sites - 1);
    out.extend(positive[1..].iter().rev().map(|c| c.conj()));
    out.extend_from_slice(&positive);
    out
}

/// Kernels that weight `L(φ)L(φ′)` in the two-body integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKernel {
    /// `D(φ + φ′)`, giving `I₁`.
    SumF,
    /// `D(φ − φ′)`.
    DiffF,
    /// `g(φ, φ′)`, giving `I₂`.
    G,
    /// `g(φ, −φ′)`.
    GNeg,
}

/// How the double trapezoid sum is evaluated. Both give the same sum up to
/// rounding; `Factorized` is `O(nM)`, `Direct` is `O(n²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoubleIntegral {
    #[default]
    Factorized,
    Direct,
}

/// Double trapezoid sums from the spectrum `L̂`, using
/// `D(u) = Σ_{|d|<M} (M − |d|) e^{idu}` and
/// `d(u) = Σ_{k=0}^{M−1} e^{i(k − (M−1)/2)u}`.
fn factorized(spec: &[Complex64], sites: usize, kernel: PairKernel) -> f64 {
    let m = sites as f64;
    let at = |d: isize| spec[(d + sites as isize - 1) as usize];
    match kernel {
        PairKernel::SumF | PairKernel::DiffF => {
            let mut acc = CompensatedSum::new();
            for d in -(sites as isize - 1)..sites as isize {
                let w = m - d.unsigned_abs() as f64;
                let l = at(d);
                let term = match kernel {
                    PairKernel::SumF => (l * l).re,
                    _ => l.norm_sqr(),
                };
                acc.add(w * term);
            }
            acc.value()
        }
        PairKernel::G | PairKernel::GNeg => {
            let mut acc = CompensatedSum::new();
            for c in 1..=sites as isize {
                let t: Complex64 = (1..=sites as isize).map(|a| at(a + c - sites as isize - 1)).sum();
                acc.add(match kernel {
                    PairKernel::G => (t * t).re,
                    _ => t.norm_sqr(),
                });
            }
            acc.value()
        }
    }
}

/// `(1/n²) Σ_{i,j} w_i w_j K[i ± j]`, rows in parallel and summed in order.
fn direct_sum(weights: &[f64], table: &[f64], difference: bool) -> f64 {
    let n = weights.len();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = CompensatedSum::new();
            for (j, &wj) in weights.iter().enumerate() {
                let k = if difference { i + n - 1 - j } else { i + j };
                acc.add(wj * table[k]);
            }
            weights[i] * acc.value()
        })
        .collect();
    rows.into_iter().collect::<CompensatedSum>().value() / (n as f64 * n as f64)
}

/// Values of `kernel_fn` at `φ_i + φ_j` (indexed by `i + j`) or at
/// `φ_i − φ_j` (indexed by `i − j + n − 1`).
fn pair_table(n: usize, shift: f64, difference: bool, kernel_fn: impl Fn(f64) -> f64 + Sync) -> Vec<f64> {
    let h = 2.0 * std::f64::consts::PI / n as f64;
    (0..2 * n - 1)
        .into_par_iter()
        .map(|k| {
            let u = if difference {
                (k as f64 - (n - 1) as f64) * h
            } else {
                node(0, n, shift) * 2.0 + k as f64 * h
            };
            kernel_fn(u)
        })
        .collect()
}

fn direct(values: &[f64], sites: usize, n: usize, shift: f64, kernel: PairKernel) -> f64 {
    let difference = matches!(kernel, PairKernel::DiffF | PairKernel::GNeg);
    match kernel {
        PairKernel::SumF | PairKernel::DiffF => {
            let table = pair_table(n, shift, difference, |u| dirichlet_f(u, sites));
            direct_sum(values, &table, difference)
        }
        PairKernel::G | PairKernel::GNeg => {
            let weights: Vec<f64> = values
                .iter()
                .enumerate()
                .map(|(i, l)| l * dirichlet_kernel(node(i, n, shift), sites))
                .collect();
            let table = pair_table(n, shift, difference, |u| dirichlet_kernel(u, sites));
            direct_sum(&weights, &table, difference)
        }
    }
}

/// Double trapezoid sum of `L(φ)L(φ′)K(φ, φ′)` on one `n × n` grid.
pub fn pair_integral_at(
    model: &FringeModel,
    n: usize,
    shift: f64,
    kernel: PairKernel,
    method: DoubleIntegral,
) -> Result<f64> {
    let values = log_derivatives(model, n, shift)?;
    Ok(match method {
        DoubleIntegral::Factorized => factorized(&spectrum(&values, model.sites, n, shift), model.sites, kernel),
        DoubleIntegral::Direct => direct(&values, model.sites, n, shift, kernel),
    })
}

fn scale_of(values: &[f64], sites: usize) -> f64 {
    let mean_sq = values.iter().map(|l| l * l).collect::<CompensatedSum>().value() / values.len() as f64;
    sites as f64 * sites as f64 * mean_sq
}

fn start_and_cap(grid: &QuadratureGrid, method: DoubleIntegral) -> (usize, usize) {
    match method {
        DoubleIntegral::Factorized => (grid.nodes_2d, grid.max_nodes),
        DoubleIntegral::Direct => (grid.nodes_2d, grid.max_nodes_direct.max(grid.nodes_2d)),
    }
}

/// Converged double integral `∫∫ dφ dφ′/(2π)² L(φ)L(φ′)K(φ, φ′)`.
pub fn pair_integral(
    model: &FringeModel,
    grid: &QuadratureGrid,
    kernel: PairKernel,
    method: DoubleIntegral,
) -> Result<f64> {
    grid.validate()?;
    if model.kappa == 0.0 {
        return Ok(0.0);
    }
    let (start, cap) = start_and_cap(grid, method);
    let ([value], _) = converge("pair integral", start, cap, grid.tolerance, |n| {
        let values = log_derivatives(model, n, grid.shift)?;
        let v = match method {
            DoubleIntegral::Factorized => {
                factorized(&spectrum(&values, model.sites, n, grid.shift), model.sites, kernel)
            }
            DoubleIntegral::Direct => direct(&values, model.sites, n, grid.shift, kernel),
        };
        Ok(([v], scale_of(&values, model.sites)))
    })?;
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoBodyIntegrals {
    pub i1: f64,
    pub i2: f64,
    /// Nodes per axis at convergence.
    pub nodes: usize,
}

/// `I₁` and `I₂` converged jointly.
pub fn two_body_integrals(
    model: &FringeModel,
    grid: &QuadratureGrid,
    method: DoubleIntegral,
) -> Result<TwoBodyIntegrals> {
    grid.validate()?;
    if model.kappa == 0.0 {
        return Ok(TwoBodyIntegrals {
            i1: 0.0,
            i2: 0.0,
            nodes: grid.nodes_2d,
        });
    }
    let (start, cap) = start_and_cap(grid, method);
    let ([i1, i2], nodes) = converge("I1/I2", start, cap, grid.tolerance, |n| {
        let values = log_derivatives(model, n, grid.shift)?;
        let pair = match method {
            DoubleIntegral::Factorized => {
                let spec = spectrum(&values, model.sites, n, grid.shift);
                [
                    factorized(&spec, model.sites, PairKernel::SumF),
                    factorized(&spec, model.sites, PairKernel::G),
                ]
            }
            DoubleIntegral::Direct => [
                direct(&values, model.sites, n, grid.shift, PairKernel::SumF),
                direct(&values, model.sites, n, grid.shift, PairKernel::G),
            ],
        };
        Ok((pair, scale_of(&values, model.sites)))
    })?;
    Ok(TwoBodyIntegrals { i1, i2, nodes })
}

pub fn integral_i1(model: &FringeModel, grid: &QuadratureGrid) -> Result<f64> {
    pair_integral(model, grid, PairKernel::SumF, DoubleIntegral::Factorized)
}

pub fn integral_i2(model: &FringeModel, grid: &QuadratureGrid) -> Result<f64> {
    pair_integral(model, grid, PairKernel::G, DoubleIntegral::Factorized)
}

/// `C = [a2² − n1² + 2n1a1² − 2a2a1²]·I₁ + [2a2a1² − 2n1a1²]·I₂`.
pub fn coefficient_c_from(model: &FringeModel, integrals: &TwoBodyIntegrals) -> f64 {
    let SiteMoments { a1, a2, n1, .. } = model.moments;
    let a1sq = a1 * a1;
    let first = a2 * a2 - n1 * n1 + 2.0 * n1 * a1sq - 2.0 * a2 * a1sq;
    let second = 2.0 * a2 * a1sq - 2.0 * n1 * a1sq;
    first * integrals.i1 + second * integrals.i2
}

pub fn coefficient_c(model: &FringeModel, grid: &QuadratureGrid) -> Result<f64> {
    let integrals = two_body_integrals(model, grid, DoubleIntegral::Factorized)?;
    Ok(coefficient_c_from(model, &integrals))
}

/// Everything entering the fit sensitivity of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitComponents {
    pub f1: f64,
    pub c: f64,
    pub i1: f64,
    pub i2: f64,
    /// `(F₁ + C)/F₁²`, the single-shot variance.
    pub variance_theta: f64,
}

pub fn fit_components(model: &FringeModel, grid: &QuadratureGrid) -> Result<FitComponents> {
    let f1 = fisher_one_body(model, grid)?;
    if f1 <= 0.0 {
        return Err(Error::NoFringeSignal);
    }
    let integrals = two_body_integrals(model, grid, DoubleIntegral::Factorized)?;
    let c = coefficient_c_from(model, &integrals);
    Ok(FitComponents {
        f1,
        c,
        i1: integrals.i1,
        i2: integrals.i2,
        variance_theta: (f1 + c) / (f1 * f1),
    })
}

/// `Δ²θ = (F₁ + C)/(m·F₁²)` for the least-squares fit of the fringe phase.
pub fn fit_sensitivity(model: &FringeModel, grid: &QuadratureGrid, repetitions: u32) -> Result<SensitivityReport> {
    if repetitions == 0 {
        return Err(Error::invalid("m", "at least one repetition is required"));
    }
    let parts = fit_components(model, grid)?;
    let mut report = SensitivityReport::new(
        parts.variance_theta / f64::from(repetitions),
        FisherInfo::Fit {
            one_body: parts.f1,
            correction: parts.c,
        },
        repetitions,
        "fit_sensitivity",
    );
    report.invalid = parts.f1 + parts.c < 0.0;
    Ok(report)
}
