//! Oracle suites: every closed form is compared against an independent
//! numerical route and the worst deviation per check is reported.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    approx_bound_nonlinear, entanglement_from_variance, symmetric_bound_linear, symmetric_bound_nonlinear,
    ultimate_bound, SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::farfield::{
    coefficient_c, coefficient_c_closed, coefficient_c_g2, fisher_one_body, fisher_per_atom_closed, fit_sensitivity,
    integral_i1, integral_i2, log_derivative_spectrum, pair_integral, pair_integral_at, pair_integral_closed,
    two_body_integrals, two_well_sensitivity_closed, DoubleIntegral, FringeModel, PairKernel, QuadratureGrid,
};
use crate::fock::{build_generator, FockBasis, FockState};
use crate::gutzwiller::{make_gaussian_product, GutzwillerProduct, SiteMoments};

const SEED: u64 = 0x5eed_2013;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Qfi,
    Twowell,
    Nonlinear,
    G2,
}

impl Scope {
    pub const ALL: [Scope; 4] = [Scope::Qfi, Scope::Twowell, Scope::Nonlinear, Scope::G2];

    pub fn as_str(self) -> &'static str {
        match self {
            Scope::Qfi => "qfi",
            Scope::Twowell => "twowell",
            Scope::Nonlinear => "nonlinear",
            Scope::G2 => "g2",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scope::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::invalid("scope", format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst deviation over all cases of this check.
    pub error: f64,
    pub tolerance: f64,
    pub cases: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub scope: Scope,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

/// Accumulates the worst error of each named check.
#[derive(Default)]
struct Tally {
    checks: Vec<Check>,
}

impl Tally {
    fn record(&mut self, name: &'static str, error: f64, tolerance: f64) {
        let error = if error.is_nan() { f64::INFINITY } else { error.abs() };
        match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => {
                c.error = c.error.max(error);
                c.cases += 1;
                c.passed = c.error <= c.tolerance;
            }
            None => self.checks.push(Check {
                name,
                passed: error <= tolerance,
                error,
                tolerance,
                cases: 1,
            }),
        }
    }

    fn relative(&mut self, name: &'static str, value: f64, reference: f64, tolerance: f64) {
        let scale = reference.abs().max(f64::MIN_POSITIVE);
        self.record(name, (value - reference) / scale, tolerance);
    }

    fn absolute(&mut self, name: &'static str, value: f64, reference: f64, tolerance: f64) {
        self.record(name, value - reference, tolerance);
    }

    fn finish(self, scope: Scope) -> SuiteReport {
        SuiteReport {
            scope,
            passed: self.checks.iter().all(|c| c.passed),
            checks: self.checks,
        }
    }
}

pub fn verify(scopes: &[Scope], grid: &QuadratureGrid) -> Result<VerifyReport> {
    let suites = scopes
        .iter()
        .map(|&scope| run_suite(scope, grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

pub fn run_suite(scope: Scope, grid: &QuadratureGrid) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    match scope {
        Scope::Qfi => qfi_suite(&mut tally)?,
        Scope::Twowell => two_well_suite(&mut tally, grid)?,
        Scope::Nonlinear => nonlinear_suite(&mut tally)?,
        Scope::G2 => g2_suite(&mut tally, grid)?,
    }
    Ok(tally.finish(scope))
}

/// Superfluid, symmetric NOON and `per_shape` random site-symmetric states
/// for each `N ∈ 2..=8`, `M ∈ 2..=4`.
pub fn symmetric_states(per_shape: usize) -> Result<Vec<(&'static str, FockState)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();
    for modes in 2..=4 {
        for particles in 2..=8 {
            out.push(("superfluid", FockState::superfluid(particles, modes)?));
            out.push(("noon", FockState::noon_symmetric(particles, modes)?));
            for _ in 0..per_shape {
                out.push(("random", FockState::random_site_symmetric(particles, modes, &mut rng)?));
            }
        }
    }
    Ok(out)
}

/// `(1/3)(M+1)M²Δ²n̂`.
pub fn symmetric_qfi(state: &FockState) -> Result<f64> {
    let m = state.modes() as f64;
    Ok((m + 1.0) * m * m * state.onsite_moments(1)?.variance / 3.0)
}

fn qfi_suite(t: &mut Tally) -> Result<()> {
    const TOL: f64 = 1e-10;
    for (kind, state) in symmetric_states(20)? {
        let n = f64::from(state.particles());
        let m = state.modes() as f64;
        let qfi = state.qfi_brute(1.0)?;
        t.absolute("symmetric_qfi_formula", qfi, symmetric_qfi(&state)?, TOL);
        match kind {
            "superfluid" => t.absolute("superfluid_qfi", qfi, (m * m - 1.0) * n / 3.0, TOL),
            "noon" => t.absolute("noon_qfi", qfi, (m * m - 1.0) * n * n / 3.0, TOL),
            _ => {}
        }

        let occupations = state.onsite_moments(1)?;
        let cross = state.pair_correlation(1, state.modes())?;
        let identity = n * n / m - (occupations.second - 2.0 * n * n / m + n * n) / (m - 1.0);
        t.absolute("cross_site_identity", cross, identity, TOL);
        let total: f64 = (1..=state.modes())
            .map(|k| state.onsite_moments(k).map(|o| o.mean))
            .sum::<Result<f64>>()?;
        t.absolute("number_conservation", total, n, TOL);

        for j in [1.0, 2.0, -1.0] {
            let generator = build_generator(state.basis(), j)?;
            let fisher = 4.0 * state.generator_variance(&generator);
            t.record("eigenvalue_bound", (fisher - generator.max_fisher()).max(0.0), TOL);
            for theta in [0.3, 1.7, PI] {
                let moved = state.apply_generator(&generator, theta);
                t.absolute("norm_preservation", moved.norm_sqr(), 1.0, 1e-12);
                t.absolute(
                    "qfi_phase_invariance",
                    4.0 * moved.generator_variance(&generator),
                    fisher,
                    TOL,
                );
            }
        }
    }
    // the extremal pair |N,0,…⟩ + |0,…,N⟩ saturates it
    let basis = FockBasis::new(5, 3)?;
    let extremal = FockState::noon_extremal(5, 3)?;
    for j in [1.0, 2.0, -1.0] {
        let generator = build_generator(&basis, j)?;
        t.absolute(
            "extremal_noon_saturates_bound",
            4.0 * extremal.generator_variance(&generator),
            generator.max_fisher(),
            TOL,
        );
    }
    Ok(())
}

fn nonlinear_suite(t: &mut Tally) -> Result<()> {
    for m in 2..=1000usize {
        let fn_ = 3.5;
        let exact = symmetric_bound_nonlinear(m, 1.0, fn_, 1)?;
        t.relative("j1_identity", exact, symmetric_bound_linear(m, fn_, 1)?, 1e-12);
    }
    for j in [1.0, 2.0] {
        let exact = symmetric_bound_nonlinear(1000, j, 1.0, 1)?;
        t.relative(
            "large_m_approximation",
            approx_bound_nonlinear(1000, j, 1.0, 1)?,
            exact,
            1e-2,
        );
    }
    for (kind, state) in symmetric_states(0)? {
        let m = state.modes();
        let fn_ = entanglement_from_variance(state.onsite_moments(1)?.variance, m);
        for j in [1.0, 2.0, -1.0] {
            let crlb = 1.0 / state.qfi_brute(j)?;
            t.relative(
                "symmetric_bound_oracle",
                symmetric_bound_nonlinear(m, j, fn_, 1)?,
                crlb,
                1e-10,
            );
        }
        if kind == "superfluid" {
            let n = f64::from(state.particles());
            let crlb = 1.0 / state.qfi_brute(1.0)?;
            t.relative("linear_bound_superfluid", symmetric_bound_linear(m, n, 1)?, crlb, 1e-10);
        }
    }
    let reference = ultimate_bound(1, 2, 1.0, 1)?;
    for j in [-2.0, -1.0, 1.0, 2.0] {
        let values: Vec<f64> = (2..=30).map(|m| ultimate_bound(1, m, j, 1)).collect::<Result<_>>()?;
        let worst_rise = values.windows(2).map(|w| (w[1] - w[0]).max(0.0)).fold(0.0, f64::max);
        t.record("ultimate_bound_decreasing", worst_rise, 0.0);
        if j < 0.0 {
            t.relative("negative_exponent_saturation", values[values.len() - 1], reference, 0.1);
        }
    }
    Ok(())
}

/// Two-site moments with visibility `nu`, `⟨n̂⟩ = n1` and `⟨â²⟩ = nu·n1`.
fn two_well_moments(nu: f64, n1: f64) -> SiteMoments {
    SiteMoments {
        a1: (nu * n1).sqrt(),
        a2: nu * n1,
        n1,
        n2: n1 * n1,
        var_n: 0.0,
        pair_density: 0.0,
        skew_coherence: 0.0,
    }
}

pub fn two_well_visibilities() -> Vec<f64> {
    let mut v: Vec<f64> = (0..24).map(|k| 0.05 + (0.999 - 0.05) * f64::from(k) / 23.0).collect();
    v.extend([0.99, 0.995, 0.998]);
    v
}

fn two_well_suite(t: &mut Tally, grid: &QuadratureGrid) -> Result<()> {
    const TOL: f64 = 1e-7;
    let n1 = 100.0;
    for nu in two_well_visibilities() {
        let moments = two_well_moments(nu, n1);
        let model = FringeModel::new(2, moments)?;
        let total = model.total_atoms();
        let closed_i = pair_integral_closed(nu)?;
        t.absolute(
            "fisher_per_atom",
            fisher_one_body(&model, grid)? / total,
            fisher_per_atom_closed(nu)?,
            TOL,
        );
        let ints = two_body_integrals(&model, grid, DoubleIntegral::Factorized)?;
        t.absolute("integral_i1", ints.i1, closed_i, TOL);
        t.absolute("integral_i2", ints.i2, closed_i, TOL);
        t.relative(
            "coefficient_c",
            coefficient_c(&model, grid)?,
            coefficient_c_closed(nu, moments.a2, total)?,
            TOL,
        );
        let xi2 = moments.pair_squeezing()?;
        let fit = fit_sensitivity(&model, grid, 1)?;
        t.relative(
            "fit_sensitivity",
            fit.variance_theta,
            two_well_sensitivity_closed(xi2, nu, total, 1)?,
            TOL,
        );
        let u = (1.0 - nu * nu).sqrt();
        let bracket = -2.0 + nu * nu + 2.0 * u;
        t.record(
            "sign_structure",
            bracket.max(0.0) + (bracket + (1.0 - u).powi(2)).abs(),
            1e-15,
        );
    }
    for nbar in [5.0, 25.0, 100.0, 400.0] {
        for ratio in [0.3, 0.5, 1.0, 2.0, 4.0] {
            let state = match make_gaussian_product(2, nbar, ratio * f64::sqrt(nbar)) {
                Err(Error::TruncationShift { .. }) => continue,
                other => other?,
            };
            let m = state.moments();
            t.record("cauchy_schwarz", (m.a1 * m.a1 - m.n1).max(0.0), 0.0);
            t.absolute("product_normalization", state.norm_sqr(), 1.0, 1e-12);
            t.absolute("product_total_atoms", state.total_atoms(), 2.0 * m.n1, 1e-9);
        }
    }
    let coherent = make_gaussian_product(2, 100.0, 10.0)?;
    t.absolute("poissonian_visibility", coherent.moments().coherence(), 1.0, 5e-3);
    Ok(())
}

fn random_product(sites: usize, rng: &mut ChaCha8Rng) -> Result<GutzwillerProduct> {
    let amps: Vec<f64> = (0..6).map(|_| 0.2 + rng.random::<f64>()).collect();
    GutzwillerProduct::from_amplitudes(sites, amps)
}

/// Product states used by the two-body checks.
pub fn g2_models() -> Result<Vec<FringeModel>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x92);
    let mut models = Vec::new();
    for sites in [2, 3] {
        for _ in 0..3 {
            models.push(FringeModel::from_product(&random_product(sites, &mut rng)?)?);
        }
    }
    for sites in [2, 3, 5] {
        for ratio in [0.7, 1.5] {
            let state = make_gaussian_product(sites, 40.0, ratio * 40f64.sqrt())?;
            models.push(FringeModel::from_product(&state)?);
        }
    }
    Ok(models)
}

fn g2_suite(t: &mut Tally, grid: &QuadratureGrid) -> Result<()> {
    for model in g2_models()? {
        if model.sites() <= 3 {
            t.relative(
                "c_from_g2",
                coefficient_c_g2(&model, grid)?,
                coefficient_c(&model, grid)?,
                1e-6,
            );
        }

        for kernel in [PairKernel::SumF, PairKernel::DiffF, PairKernel::G, PairKernel::GNeg] {
            let fast = pair_integral_at(&model, 256, 0.1, kernel, DoubleIntegral::Factorized)?;
            let slow = pair_integral_at(&model, 256, 0.1, kernel, DoubleIntegral::Direct)?;
            t.relative("factorized_vs_direct", fast, slow, 1e-10);
        }

        let sum_f = pair_integral(&model, grid, PairKernel::SumF, DoubleIntegral::Factorized)?;
        let diff_f = pair_integral(&model, grid, PairKernel::DiffF, DoubleIntegral::Factorized)?;
        t.relative("kernel_antisymmetry_f", sum_f, -diff_f, 1e-8);
        let g = pair_integral(&model, grid, PairKernel::G, DoubleIntegral::Factorized)?;
        let g_neg = pair_integral(&model, grid, PairKernel::GNeg, DoubleIntegral::Factorized)?;
        t.relative("kernel_antisymmetry_g", g, -g_neg, 1e-8);

        let f1 = fisher_one_body(&model, grid)?;
        let i1 = integral_i1(&model, grid)?;
        let i2 = integral_i2(&model, grid)?;
        let c = coefficient_c(&model, grid)?;
        for shift in [0.3, 1.7] {
            let moved = grid.with_shift(shift);
            t.relative("theta_invariance_f1", fisher_one_body(&model, &moved)?, f1, 1e-10);
            t.relative("theta_invariance_i1", integral_i1(&model, &moved)?, i1, 1e-10);
            t.relative("theta_invariance_i2", integral_i2(&model, &moved)?, i2, 1e-10);
            t.relative("theta_invariance_c", coefficient_c(&model, &moved)?, c, 1e-10);
        }

        let ints = two_body_integrals(&model, grid, DoubleIntegral::Factorized)?;
        let spectrum = log_derivative_spectrum(&model, ints.nodes, grid.shift)?;
        t.record("zero_mean_log_derivative", spectrum[model.sites() - 1].norm(), 1e-10);

        let finer = QuadratureGrid {
            nodes_1d: grid.nodes_1d * 4,
            nodes_2d: ints.nodes * 2,
            max_nodes: grid.max_nodes * 4,
            ..*grid
        };
        t.relative("quadrature_convergence_f1", fisher_one_body(&model, &finer)?, f1, 1e-8);
        t.relative("quadrature_convergence_i1", integral_i1(&model, &finer)?, i1, 1e-8);
        t.relative("quadrature_convergence_i2", integral_i2(&model, &finer)?, i2, 1e-8);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scope_round_trip() {
        for s in Scope::ALL {
            assert_eq!(s.as_str().parse::<Scope>().unwrap(), s);
        }
        assert!("bogus".parse::<Scope>().is_err());
    }

    #[test]
    fn tally_keeps_the_worst_case() {
        let mut t = Tally::default();
        t.record("x", 1e-12, 1e-10);
        t.record("x", -5e-9, 1e-10);
        t.record("x", 1e-13, 1e-10);
        let r = t.finish(Scope::Qfi);
        assert_eq!(r.checks.len(), 1);
        assert_eq!(r.checks[0].cases, 3);
        assert_eq!(r.checks[0].error, 5e-9);
        assert!(!r.passed);
    }

    #[test]
    fn nan_fails() {
        let mut t = Tally::default();
        t.record("x", f64::NAN, 1.0);
        assert!(!t.finish(Scope::G2).passed);
    }
}
