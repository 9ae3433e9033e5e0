//! Second-order far-field correlation of a product state, envelope removed.
//!
//! Used as an independent route to the coefficient `C`, which equals the
//! double integral of `L(φ)·L(φ′)·G₂(φ, φ′)`.

use rayon::prelude::*;

use super::dirichlet::{dirichlet_f, dirichlet_kernel};
use super::fringe::FringeModel;
use super::quadrature::{converge, node, QuadratureGrid};
use crate::error::Result;
use crate::gutzwiller::SiteMoments;
use crate::numeric::CompensatedSum;

/// Kernel values at one point `(φ, φ′)`.
#[derive(Debug, Clone, Copy)]
struct Kernels {
    fx: f64,
    fy: f64,
    f_sum: f64,
    f_diff: f64,
    g_sum: f64,
    g_diff: f64,
}

fn combine(k: &Kernels, sites: usize, m: &SiteMoments) -> f64 {
    let mm = sites as f64;
    let SiteMoments {
        a1,
        a2,
        n1,
        pair_density,
        skew_coherence,
        ..
    } = *m;
    let a1sq = a1 * a1;
    let fxy = k.fx + k.fy;
    mm * pair_density
        + (k.f_sum - mm) * a2 * a2
        + n1 * n1 * (k.f_diff + mm * mm - 2.0 * mm)
        + 2.0 * (fxy - 2.0 * mm) * skew_coherence * a1
        + n1 * a1sq * (8.0 * mm - 2.0 * mm * mm + (mm - 4.0) * fxy - 2.0 * k.f_diff + 2.0 * k.g_diff)
        + a1sq * a2 * (4.0 * mm - 2.0 * fxy - 2.0 * k.f_sum + 2.0 * k.g_sum)
        + a1sq
            * a1sq
            * (k.fx * k.fy - (mm - 4.0) * fxy + k.f_sum + k.f_diff - 2.0 * k.g_sum - 2.0 * k.g_diff + mm * mm
                - 6.0 * mm)
}

/// `G₂(φ, φ′)`: the normally ordered pair density, normalized so that its
/// mean over the square equals `⟨N̂(N̂ − 1)⟩`.
pub fn g2_fringe(phi: f64, phi_prime: f64, model: &FringeModel) -> f64 {
    let sites = model.sites();
    let dx = dirichlet_kernel(phi, sites);
    let dy = dirichlet_kernel(phi_prime, sites);
    let k = Kernels {
        fx: dirichlet_f(phi, sites),
        fy: dirichlet_f(phi_prime, sites),
        f_sum: dirichlet_f(phi + phi_prime, sites),
        f_diff: dirichlet_f(phi - phi_prime, sites),
        g_sum: dx * dy * dirichlet_kernel(phi + phi_prime, sites),
        g_diff: dx * dy * dirichlet_kernel(phi - phi_prime, sites),
    };
    combine(&k, sites, model.moments())
}

fn weighted_sum_at(model: &FringeModel, n: usize, shift: f64) -> Result<(f64, f64)> {
    let sites = model.sites();
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let phis: Vec<f64> = (0..n).map(|i| node(i, n, shift)).collect();
    let l: Vec<f64> = phis.iter().map(|&p| model.log_derivative(p)).collect::<Result<_>>()?;
    let f: Vec<f64> = phis.iter().map(|&p| dirichlet_f(p, sites)).collect();
    let d: Vec<f64> = phis.iter().map(|&p| dirichlet_kernel(p, sites)).collect();
    let base = 2.0 * phis[0];
    let sum_f: Vec<f64> = (0..2 * n - 1)
        .map(|k| dirichlet_f(base + k as f64 * h, sites))
        .collect();
    let sum_d: Vec<f64> = (0..2 * n - 1)
        .map(|k| dirichlet_kernel(base + k as f64 * h, sites))
        .collect();
    let diff_f: Vec<f64> = (0..2 * n - 1)
        .map(|k| dirichlet_f((k as f64 - (n - 1) as f64) * h, sites))
        .collect();
    let diff_d: Vec<f64> = (0..2 * n - 1)
        .map(|k| dirichlet_kernel((k as f64 - (n - 1) as f64) * h, sites))
        .collect();
    let moments = *model.moments();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = CompensatedSum::new();
            for j in 0..n {
                let k = Kernels {
                    fx: f[i],
                    fy: f[j],
                    f_sum: sum_f[i + j],
                    f_diff: diff_f[i + n - 1 - j],
                    g_sum: d[i] * d[j] * sum_d[i + j],
                    g_diff: d[i] * d[j] * diff_d[i + n - 1 - j],
                };
                acc.add(l[j] * combine(&k, sites, &moments));
            }
            l[i] * acc.value()
        })
        .collect();
    let value = rows.into_iter().collect::<CompensatedSum>().value() / (n as f64 * n as f64);
    let scale = model.total_atoms().powi(2) * l.iter().map(|x| x * x).sum::<f64>() / n as f64;
    Ok((value, scale))
}

/// `C = ∫∫ dφ dφ′/(2π)² L(φ)L(φ′)G₂(φ, φ′)` by direct double quadrature.
pub fn coefficient_c_g2(model: &FringeModel, grid: &QuadratureGrid) -> Result<f64> {
    grid.validate()?;
    if model.kappa() == 0.0 {
        return Ok(0.0);
    }
    let cap = grid.max_nodes_direct.max(grid.nodes_2d);
    let ([value], _) = converge("C from G2", grid.nodes_2d, cap, grid.tolerance, |n| {
        let (v, scale) = weighted_sum_at(model, n, grid.shift)?;
        Ok(([v], scale))
    })?;
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gutzwiller::GutzwillerProduct;
    use approx::assert_abs_diff_eq;

    fn model(sites: usize, amps: &[f64]) -> FringeModel {
        let state = GutzwillerProduct::from_amplitudes(sites, amps.to_vec()).unwrap();
        FringeModel::from_product(&state).unwrap()
    }

    #[test]
    fn symmetric_in_its_arguments() {
        let m = model(3, &[0.2, 0.5, 0.6, 0.4, 0.3]);
        for (x, y) in [(0.3, 1.2), (-2.0, 0.7), (1.0, -1.0)] {
            assert_abs_diff_eq!(g2_fringe(x, y, &m), g2_fringe(y, x, &m), epsilon = 1e-12);
        }
    }

    #[test]
    fn fock_site_limit() {
        let m = model(3, &[0.0, 0.0, 0.0, 1.0]);
        let pair = m.moments().pair_density;
        for (x, y) in [(0.3, 1.2), (0.5, 0.5)] {
            let expected = 3.0 * pair + 9.0 * (dirichlet_f(x - y, 3) + 9.0 - 6.0);
            assert_abs_diff_eq!(g2_fringe(x, y, &m), expected, epsilon = 1e-12);
        }
        // f(φ − φ′) → M² on the diagonal
        assert_abs_diff_eq!(
            g2_fringe(0.5, 0.5, &m),
            3.0 * pair + 9.0 * (9.0 + 9.0 - 6.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn mean_is_pair_number() {
        let amps = [0.3, 0.6, 0.5, 0.4, 0.2];
        for sites in [2, 3, 4] {
            let m = model(sites, &amps);
            let mom = *m.moments();
            let n = 96;
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += g2_fringe(node(i, n, 0.1), node(j, n, 0.1), &m);
                }
            }
            acc /= (n * n) as f64;
            // ⟨N(N−1)⟩ for independent identical sites
            let mm = sites as f64;
            let var_total = mm * mom.var_n;
            let mean_total = mm * mom.n1;
            let expected = var_total + mean_total * mean_total - mean_total;
            assert_abs_diff_eq!(acc, expected, epsilon = 1e-10);
        }
    }
}
