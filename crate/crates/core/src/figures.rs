//! Sweeps behind the three figures: ultimate scaling with the number of
//! sites, the two-well fit sensitivity against squeezing, and its collapse
//! across lattice sizes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::ultimate_bound;
use crate::error::{Error, Result};
use crate::farfield::{fit_components, two_well_sensitivity_closed, FringeModel, QuadratureGrid};
use crate::fock::{bh_ground_state, spin_observables};
use crate::gutzwiller::make_gaussian_product;
use crate::numeric::{geomspace, interpolate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig1Row {
    pub sites: usize,
    pub exponent: f64,
    /// `1/(M^j − 1)²`, i.e. the ultimate bound at `N = m = 1`.
    pub delta2_theta: f64,
}

/// Level of the `j = 1`, `M = 2` bound that the `j < 0` curves approach.
pub const FIG1_REFERENCE: f64 = 1.0;

pub fn fig1(exponents: &[f64], sites: &[usize]) -> Result<Vec<Fig1Row>> {
    if exponents.is_empty() {
        return Err(Error::invalid("j", "at least one exponent is required"));
    }
    if sites.is_empty() {
        return Err(Error::invalid("M", "at least one site count is required"));
    }
    let mut rows = Vec::with_capacity(exponents.len() * sites.len());
    for &j in exponents {
        for &m in sites {
            rows.push(Fig1Row {
                sites: m,
                exponent: j,
                delta2_theta: ultimate_bound(1, m, j, 1)?,
            });
        }
    }
    Ok(rows)
}

/// Geometric sweep of `σ/√n̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaSweep {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Default for SigmaSweep {
    fn default() -> Self {
        Self {
            min: 0.5,
            max: 20.0,
            steps: 60,
        }
    }
}

impl SigmaSweep {
    pub fn ratios(&self) -> Result<Vec<f64>> {
        if !(self.min > 0.0 && self.max >= self.min && self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::invalid("sigma", "need 0 < sigma_min <= sigma_max"));
        }
        if self.steps == 0 {
            return Err(Error::invalid("sigma_steps", "at least one point is required"));
        }
        Ok(geomspace(self.min, self.max, self.steps))
    }
}

/// Geometric sweep of `E_J/|U|` at `U < 0`, from strong tunnelling down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JosephsonSweep {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Default for JosephsonSweep {
    fn default() -> Self {
        Self {
            min: 1e-2,
            max: 1e6,
            steps: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fig2Curve {
    BoseHubbard,
    Gutzwiller,
}

impl Fig2Curve {
    pub fn as_str(self) -> &'static str {
        match self {
            Fig2Curve::BoseHubbard => "bose_hubbard",
            Fig2Curve::Gutzwiller => "gutzwiller",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig2Row {
    pub curve: Fig2Curve,
    /// `U/E_J` for the Bose-Hubbard curve, `σ/√n̄` for the product state.
    pub parameter: f64,
    pub xi2: f64,
    pub visibility: f64,
    pub var_n: f64,
    /// `m·N·Δ²θ` of the fit.
    pub normalized: f64,
    /// `N/F_Q` with `F_Q = 4Δ²n̂`.
    pub qfi_line: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig2Data {
    pub particles: u32,
    pub rows: Vec<Fig2Row>,
}

/// Fixed-N Bose-Hubbard states (closed two-well form) and Gaussian product
/// states (quadrature) at `M = 2`.
pub fn fig2(particles: u32, josephson: &JosephsonSweep, sigma: &SigmaSweep, grid: &QuadratureGrid) -> Result<Fig2Data> {
    if particles < 2 {
        return Err(Error::invalid("N", "need at least two particles"));
    }
    if !(josephson.min > 0.0 && josephson.max >= josephson.min) || josephson.steps == 0 {
        return Err(Error::invalid("ej_over_u", "need 0 < min <= max and at least one step"));
    }
    let n = f64::from(particles);
    let mut couplings = vec![0.0];
    couplings.extend(
        geomspace(josephson.max, josephson.min, josephson.steps)
            .into_iter()
            .map(|r| -1.0 / r),
    );

    let bh: Vec<Option<Fig2Row>> = couplings
        .par_iter()
        .map(|&u_over_ej| -> Result<Option<Fig2Row>> {
            let gs = bh_ground_state(particles, 1.0, u_over_ej)?;
            let spin = spin_observables(&gs.state)?;
            let xi2 = match spin.phase_squeezing() {
                Err(Error::UndefinedSqueezing) => return Ok(None),
                other => other?,
            };
            let nu = spin.visibility().min(1.0);
            let var_n = spin.var_jz;
            Ok(Some(Fig2Row {
                curve: Fig2Curve::BoseHubbard,
                parameter: u_over_ej,
                xi2,
                visibility: nu,
                var_n,
                normalized: n * two_well_sensitivity_closed(xi2, nu, n, 1)?,
                qfi_line: n / (4.0 * var_n),
            }))
        })
        .collect::<Result<_>>()?;

    let mean_site = n / 2.0;
    let product: Vec<Option<Fig2Row>> = sigma
        .ratios()?
        .par_iter()
        .map(|&ratio| -> Result<Option<Fig2Row>> {
            let state = match make_gaussian_product(2, mean_site, ratio * mean_site.sqrt()) {
                Err(Error::TruncationShift { .. }) => return Ok(None),
                other => other?,
            };
            let model = FringeModel::from_product(&state)?;
            let parts = fit_components(&model, grid)?;
            let m = state.moments();
            let total = model.total_atoms();
            Ok(Some(Fig2Row {
                curve: Fig2Curve::Gutzwiller,
                parameter: ratio,
                xi2: m.pair_squeezing()?,
                visibility: m.coherence(),
                var_n: m.var_n,
                normalized: total * parts.variance_theta,
                qfi_line: total / (4.0 * m.var_n),
            }))
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<Fig2Row> = bh.into_iter().flatten().collect();
    rows.extend(product.into_iter().flatten());
    Ok(Fig2Data { particles, rows })
}

impl Fig2Data {
    pub fn curve(&self, which: Fig2Curve) -> impl Iterator<Item = &Fig2Row> {
        self.rows.iter().filter(move |r| r.curve == which)
    }

    /// `(ξ², normalized)` sorted by `ξ²`. For the Bose-Hubbard curve only the
    /// branch from the coherent state down to minimal `ξ²` is kept, where
    /// `ξ²` is single valued.
    pub fn interpolation_table(&self, which: Fig2Curve) -> (Vec<f64>, Vec<f64>) {
        let rows: Vec<&Fig2Row> = self.curve(which).collect();
        let rows: Vec<&Fig2Row> = match which {
            Fig2Curve::BoseHubbard => {
                let end = rows
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.xi2.total_cmp(&b.1.xi2))
                    .map_or(0, |(i, _)| i + 1);
                rows[..end].to_vec()
            }
            Fig2Curve::Gutzwiller => rows,
        };
        sorted_curve(rows.iter().map(|r| (r.xi2, r.normalized)))
    }

    /// Largest relative deviation of the product-state curve from the
    /// Bose-Hubbard curve over product points with `ξ² ∈ [lo, hi]`.
    pub fn max_relative_gap(&self, lo: f64, hi: f64) -> Option<f64> {
        let (bx, by) = self.interpolation_table(Fig2Curve::BoseHubbard);
        let mut worst: Option<f64> = None;
        for r in self.curve(Fig2Curve::Gutzwiller).filter(|r| r.xi2 >= lo && r.xi2 <= hi) {
            let reference = interpolate(&bx, &by, r.xi2)?;
            let gap = ((r.normalized - reference) / reference).abs();
            worst = Some(worst.map_or(gap, |w| w.max(gap)));
        }
        worst
    }

    /// Curve value interpolated at `ξ²`.
    pub fn value_at(&self, which: Fig2Curve, xi2: f64) -> Option<f64> {
        let (x, y) = self.interpolation_table(which);
        let slack = 1e-9 * xi2.abs();
        let clamped = xi2.clamp(*x.first()?, *x.last()?);
        if (clamped - xi2).abs() > slack {
            return None;
        }
        interpolate(&x, &y, clamped)
    }
}

fn sorted_curve(points: impl Iterator<Item = (f64, f64)>) -> (Vec<f64>, Vec<f64>) {
    let mut pts: Vec<(f64, f64)> = points.filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    pts.into_iter().unzip()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Same mean total atom number for every `M`.
    #[default]
    FixedTotal,
    /// Same mean on-site occupation for every `M`, namely `N/max(M)`.
    FixedSite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig3Row {
    pub sites: usize,
    pub sigma_ratio: f64,
    pub sigma: f64,
    pub mean_site: f64,
    pub total_atoms: f64,
    pub xi2: f64,
    pub coherence: f64,
    pub f1: f64,
    pub c: f64,
    pub variance_theta: f64,
    /// `m·⟨N̂⟩·(M² − 1)/3·Δ²θ`.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig3Data {
    pub total_atoms: f64,
    pub mode: SweepMode,
    pub rows: Vec<Fig3Row>,
}

pub fn fig3(
    total_atoms: f64,
    sites: &[usize],
    sigma: &SigmaSweep,
    mode: SweepMode,
    grid: &QuadratureGrid,
) -> Result<Fig3Data> {
    if !(total_atoms.is_finite() && total_atoms > 0.0) {
        return Err(Error::invalid("N", "total atom number must be positive"));
    }
    if sites.is_empty() || sites.iter().any(|&m| m < 2) {
        return Err(Error::invalid("M", "need a non-empty list of M >= 2"));
    }
    let largest = *sites.iter().max().expect("non-empty");
    let ratios = sigma.ratios()?;
    let jobs: Vec<(usize, f64)> = sites
        .iter()
        .flat_map(|&m| ratios.iter().map(move |&r| (m, r)))
        .collect();
    let rows: Vec<Option<Fig3Row>> = jobs
        .par_iter()
        .map(|&(m, ratio)| -> Result<Option<Fig3Row>> {
            let mean_site = match mode {
                SweepMode::FixedTotal => total_atoms / m as f64,
                SweepMode::FixedSite => total_atoms / largest as f64,
            };
            let sigma = ratio * mean_site.sqrt();
            let state = match make_gaussian_product(m, mean_site, sigma) {
                Err(Error::TruncationShift { .. }) => return Ok(None),
                other => other?,
            };
            let model = FringeModel::from_product(&state)?;
            let parts = fit_components(&model, grid)?;
            let moments = state.moments();
            let total = model.total_atoms();
            let mf = m as f64;
            Ok(Some(Fig3Row {
                sites: m,
                sigma_ratio: ratio,
                sigma,
                mean_site,
                total_atoms: total,
                xi2: moments.pair_squeezing()?,
                coherence: moments.coherence(),
                f1: parts.f1,
                c: parts.c,
                variance_theta: parts.variance_theta,
                normalized: total * (mf * mf - 1.0) / 3.0 * parts.variance_theta,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(Fig3Data {
        total_atoms,
        mode,
        rows: rows.into_iter().flatten().collect(),
    })
}

impl Fig3Data {
    pub fn site_counts(&self) -> Vec<usize> {
        let mut m: Vec<usize> = self.rows.iter().map(|r| r.sites).collect();
        m.dedup();
        m.sort_unstable();
        m.dedup();
        m
    }

    pub fn curve(&self, sites: usize) -> (Vec<f64>, Vec<f64>) {
        sorted_curve(
            self.rows
                .iter()
                .filter(|r| r.sites == sites)
                .map(|r| (r.xi2, r.normalized)),
        )
    }

    /// `max/min − 1` of the normalized curves at `ξ²`, over the curves that
    /// reach it; `None` when fewer than two do.
    pub fn spread_at(&self, xi2: f64) -> Option<f64> {
        let values: Vec<f64> = self
            .site_counts()
            .into_iter()
            .filter_map(|m| {
                let (x, y) = self.curve(m);
                interpolate(&x, &y, xi2)
            })
            .collect();
        if values.len() < 2 {
            return None;
        }
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        Some(max / min - 1.0)
    }

    /// `ξ²` range covered by every curve.
    pub fn common_range(&self) -> Option<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for m in self.site_counts() {
            let (x, _) = self.curve(m);
            lo = lo.max(*x.first()?);
            hi = hi.min(*x.last()?);
        }
        (lo < hi).then_some((lo, hi))
    }

    /// Worst spread over `count` geometric points of `[lo, hi]` clipped to
    /// the common range, with the `ξ²` where it occurs.
    pub fn max_spread(&self, lo: f64, hi: f64, count: usize) -> Option<(f64, f64)> {
        let (clo, chi) = self.common_range()?;
        let (lo, hi) = (lo.max(clo), hi.min(chi));
        if lo >= hi {
            return None;
        }
        geomspace(lo, hi, count.max(2))
            .into_iter()
            .filter_map(|x| self.spread_at(x).map(|s| (s, x)))
            .max_by(|a, b| a.0.total_cmp(&b.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_rows() {
        let all: Vec<usize> = (2..=30).collect();
        let rows = fig1(&[1.0, 2.0, -1.0], &all).unwrap();
        assert_eq!(rows.len(), 87);
        assert_eq!(rows[0].delta2_theta, 1.0);
        let j2m4 = rows.iter().find(|r| r.exponent == 2.0 && r.sites == 4).unwrap();
        assert!((j2m4.delta2_theta - 1.0 / 225.0).abs() < 1e-15);
        let last = rows.iter().rev().find(|r| r.exponent == -1.0).unwrap();
        assert!((last.delta2_theta / FIG1_REFERENCE - 1.0).abs() < 0.1);
        assert!(fig1(&[], &all).is_err());
        assert!(fig1(&[1.0], &[1]).is_err());
    }

    #[test]
    fn small_fig2_touches_shot_noise() {
        let sweep = SigmaSweep {
            min: 0.8,
            max: 2.0,
            steps: 6,
        };
        let ej = JosephsonSweep {
            min: 1.0,
            max: 1e4,
            steps: 40,
        };
        let data = fig2(40, &ej, &sweep, &QuadratureGrid::default()).unwrap();
        let bh_top = data.value_at(Fig2Curve::BoseHubbard, 1.0).unwrap();
        assert!((bh_top - 1.0).abs() < 1e-9);
        for r in &data.rows {
            assert!(r.normalized >= r.qfi_line * (1.0 - 1e-9), "{r:?}");
        }
    }

    #[test]
    fn fig3_skips_truncated_points() {
        let sweep = SigmaSweep {
            min: 1.0,
            max: 20.0,
            steps: 4,
        };
        let data = fig3(
            400.0,
            &[2, 4],
            &sweep,
            SweepMode::FixedTotal,
            &QuadratureGrid::default(),
        )
        .unwrap();
        assert!(data.rows.len() < 8);
        assert_eq!(data.site_counts(), vec![2, 4]);
    }
}
