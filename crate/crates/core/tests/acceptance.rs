//! Acceptance run: one PASS/FAIL line per criterion, with timings.
//!
//! Exits 0 after printing every line so that `cargo test` reports the run
//! rather than aborting on it. Set `MULTIPATH_ACCEPTANCE_STRICT=1` to make
//! any FAIL line turn into a non-zero exit status.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use multipath::bounds::{approx_bound_nonlinear, symmetric_bound_linear, symmetric_bound_nonlinear, ultimate_bound};
use multipath::farfield::{
    coefficient_c, coefficient_c_closed, fisher_one_body, fisher_per_atom_closed, fit_sensitivity,
    pair_integral_closed, two_body_integrals, two_well_sensitivity_closed, DoubleIntegral, FringeModel, QuadratureGrid,
};
use multipath::figures::{fig1, fig2, fig3, Fig2Curve, JosephsonSweep, SigmaSweep, SweepMode, FIG1_REFERENCE};
use multipath::gutzwiller::SiteMoments;
use multipath::verify::{run_suite, symmetric_qfi, symmetric_states, two_well_visibilities, verify, Scope};

type Outcome = Result<(bool, String), String>;
/// Worst spread for `ξ² ≥ 0.3`, where it occurs, and spreads at fixed `ξ²`.
type Spreads = (f64, f64, Vec<(f64, Option<f64>)>);

struct Report {
    failures: usize,
}

impl Report {
    fn criterion(&mut self, id: u32, title: &str, limit: Option<Duration>, body: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = body();
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match outcome {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if let Some(limit) = limit {
            if elapsed > limit {
                passed = false;
                detail.push_str(&format!("; over the {limit:?} budget"));
            }
        }
        if !passed {
            self.failures += 1;
        }
        let tag = if passed { "PASS" } else { "FAIL" };
        println!("{tag} [{id}] {title} ({:.2?}): {detail}", elapsed);
    }
}

fn s(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn c1() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (_, state) in symmetric_states(20).map_err(s)? {
        let brute = state.qfi_brute(1.0).map_err(s)?;
        worst = worst.max((brute - symmetric_qfi(&state).map_err(s)?).abs());
        count += 1;
    }
    Ok((worst <= 1e-10, format!("{count} states, max |ΔF_Q| = {worst:.2e}")))
}

fn c2() -> Outcome {
    let mut worst = 0.0f64;
    for (kind, state) in symmetric_states(0).map_err(s)? {
        let n = f64::from(state.particles());
        let m = state.modes() as f64;
        let expected = match kind {
            "superfluid" => (m * m - 1.0) * n / 3.0,
            "noon" => (m * m - 1.0) * n * n / 3.0,
            _ => continue,
        };
        worst = worst.max((state.qfi_brute(1.0).map_err(s)? - expected).abs());
    }
    Ok((
        worst <= 1e-10,
        format!("superfluid and NOON, N ≤ 8, M ≤ 4, max error {worst:.2e}"),
    ))
}

fn c3() -> Outcome {
    let mut identity = 0.0f64;
    for m in 2..=1000 {
        for f_n in [1.0, 7.5, 1e3] {
            let a = symmetric_bound_nonlinear(m, 1.0, f_n, 2).map_err(s)?;
            let b = symmetric_bound_linear(m, f_n, 2).map_err(s)?;
            identity = identity.max((a / b - 1.0).abs());
        }
    }
    let mut approx = 0.0f64;
    for j in [1.0, 2.0] {
        let exact = symmetric_bound_nonlinear(1000, j, 1.0, 1).map_err(s)?;
        approx = approx.max((approx_bound_nonlinear(1000, j, 1.0, 1).map_err(s)? / exact - 1.0).abs());
    }
    Ok((
        identity < 1e-12 && approx < 0.01,
        format!(
            "j=1 identity rel. error {identity:.2e}; large-M form off by {:.3}%",
            100.0 * approx
        ),
    ))
}

fn c4() -> Outcome {
    let sites: Vec<usize> = (2..=30).collect();
    let rows = fig1(&[-2.0, -1.0, 1.0, 2.0], &sites).map_err(s)?;
    let mut exact = 0.0f64;
    for r in &rows {
        let reference = 1.0 / ((r.sites as f64).powf(r.exponent) - 1.0).powi(2);
        exact = exact.max((r.delta2_theta / reference - 1.0).abs());
    }
    let mut decreasing = true;
    let mut saturation = Vec::new();
    for j in [-2.0, -1.0, 1.0, 2.0] {
        let curve: Vec<f64> = rows
            .iter()
            .filter(|r| r.exponent == j)
            .map(|r| r.delta2_theta)
            .collect();
        if j > 0.0 {
            decreasing &= curve.windows(2).all(|w| w[1] < w[0]);
        } else {
            let last = *curve.last().ok_or("empty curve")?;
            saturation.push((j, last / FIG1_REFERENCE - 1.0));
        }
    }
    let reference = ultimate_bound(1, 2, 1.0, 1).map_err(s)?;
    let saturated = saturation.iter().all(|(_, d)| d.abs() < 0.1);
    Ok((
        exact < 1e-12 && decreasing && saturated && reference == FIG1_REFERENCE,
        format!(
            "{} rows; j>0 strictly decreasing: {decreasing}; M=30 offset from the j=1, M=2 level: {}",
            rows.len(),
            saturation
                .iter()
                .map(|(j, d)| format!("j={j}: {:+.2}%", 100.0 * d))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    ))
}

fn c5() -> Outcome {
    let grid = QuadratureGrid::default();
    let n1 = 100.0;
    let mut worst = 0.0f64;
    let mut where_ = 0.0;
    for nu in two_well_visibilities() {
        let moments = SiteMoments {
            a1: (nu * n1).sqrt(),
            a2: nu * n1,
            n1,
            n2: n1 * n1,
            var_n: 0.0,
            pair_density: 0.0,
            skew_coherence: 0.0,
        };
        let model = FringeModel::new(2, moments).map_err(s)?;
        let total = model.total_atoms();
        let closed_i = pair_integral_closed(nu).map_err(s)?;
        let ints = two_body_integrals(&model, &grid, DoubleIntegral::Factorized).map_err(s)?;
        let c_closed = coefficient_c_closed(nu, moments.a2, total).map_err(s)?;
        let xi2 = moments.pair_squeezing().map_err(s)?;
        let fit_closed = two_well_sensitivity_closed(xi2, nu, total, 1).map_err(s)?;
        let errors = [
            (fisher_one_body(&model, &grid).map_err(s)? / total - fisher_per_atom_closed(nu).map_err(s)?).abs(),
            (ints.i1 - closed_i).abs(),
            (ints.i2 - closed_i).abs(),
            (coefficient_c(&model, &grid).map_err(s)? / c_closed - 1.0).abs(),
            (fit_sensitivity(&model, &grid, 1).map_err(s)?.variance_theta / fit_closed - 1.0).abs(),
        ];
        let e = errors.iter().cloned().fold(0.0, f64::max);
        if e > worst {
            worst = e;
            where_ = nu;
        }
    }
    Ok((
        worst <= 1e-7,
        format!("ν ∈ [0.05, 0.999]; worst error {worst:.2e} at ν = {where_:.3} (F₁, I₁, I₂ absolute; C, Δ²θ relative)"),
    ))
}

fn c6() -> Outcome {
    let data = fig2(
        200,
        &JosephsonSweep::default(),
        &SigmaSweep::default(),
        &QuadratureGrid::default(),
    )
    .map_err(s)?;
    let gap = data
        .max_relative_gap(0.2, 1.0)
        .ok_or("curves do not overlap on [0.2, 1]")?;
    let bh = data
        .value_at(Fig2Curve::BoseHubbard, 1.0)
        .ok_or("BH curve does not reach ξ² = 1")?;
    let gw = data
        .value_at(Fig2Curve::Gutzwiller, 1.0)
        .ok_or("product curve does not reach ξ² = 1")?;
    let below = data
        .rows
        .iter()
        .filter(|r| r.normalized < r.qfi_line * (1.0 - 1e-9))
        .count();
    let touch = (bh - 1.0).abs() <= 0.03 && (gw - 1.0).abs() <= 0.03;
    Ok((
        gap <= 0.02 && touch && below == 0,
        format!(
            "max gap {:.2}% on ξ² ∈ [0.2, 1]; at ξ² = 1: BH {bh:.4}, product {gw:.4}; rows below the QFI line: {below}/{}",
            100.0 * gap,
            data.rows.len()
        ),
    ))
}

fn fig3_spreads(total: f64, mode: SweepMode) -> Result<Spreads, String> {
    let sites = [2, 4, 6, 8, 10, 12];
    let data = fig3(total, &sites, &SigmaSweep::default(), mode, &QuadratureGrid::default()).map_err(s)?;
    let (_, hi) = data.common_range().ok_or("no common ξ² range")?;
    let (spread, at) = data.max_spread(0.3, hi, 200).ok_or("no overlap above ξ² = 0.3")?;
    let small = [0.3, 0.2, 0.15, 0.1].iter().map(|&x| (x, data.spread_at(x))).collect();
    Ok((spread, at, small))
}

fn describe_spreads(small: &[(f64, Option<f64>)]) -> String {
    small
        .iter()
        .map(|(x, v)| match v {
            Some(v) => format!("{x}: {:.1}%", 100.0 * v),
            None => format!("{x}: n/a"),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn c7() -> Outcome {
    let (spread, at, small) = fig3_spreads(1e4, SweepMode::FixedTotal)?;
    let values: Vec<f64> = small.iter().filter_map(|(_, v)| *v).collect();
    let growing = values.len() >= 2 && values.windows(2).all(|w| w[1] >= w[0]);
    Ok((
        spread <= 0.05 && growing,
        format!(
            "⟨N̂⟩ = 1e4: worst spread for ξ² ≥ 0.3 is {:.2}% at ξ² = {at:.3}; spread by ξ²: {}",
            100.0 * spread,
            describe_spreads(&small)
        ),
    ))
}

fn c7_info(total: f64, mode: SweepMode) -> Result<String, String> {
    let (spread, at, small) = fig3_spreads(total, mode)?;
    Ok(format!(
        "{mode:?}, N = {total:e}: worst spread for ξ² ≥ 0.3 is {:.2}% at ξ² = {at:.3}; spread by ξ²: {}",
        100.0 * spread,
        describe_spreads(&small)
    ))
}

fn c8() -> Outcome {
    let grid = QuadratureGrid::default();
    let report = verify(&Scope::ALL, &grid).map_err(s)?;
    let checks: usize = report.suites.iter().map(|r| r.checks.len()).sum();
    let failed: Vec<String> = report
        .suites
        .iter()
        .flat_map(|r| {
            r.checks
                .iter()
                .filter(|c| !c.passed)
                .map(move |c| format!("{}/{}", r.scope, c.name))
        })
        .collect();
    for scope in Scope::ALL {
        let single = run_suite(scope, &grid).map_err(s)?;
        if single.passed != report.suites.iter().any(|r| r.scope == scope && r.passed) {
            return Err(format!("suite {scope} is not deterministic"));
        }
    }
    let status = Command::new(env!("CARGO_BIN_EXE_multipath"))
        .arg("verify")
        .output()
        .map_err(s)?
        .status;
    let exit_ok = status.code() == Some(0);
    Ok((
        report.passed && exit_ok,
        format!(
            "{checks} invariant checks in {} suites, failing: [{}]; `multipath verify` exit status {:?}",
            report.suites.len(),
            failed.join(", "),
            status.code()
        ),
    ))
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    let secs = Duration::from_secs;
    report.criterion(1, "symmetric-state QFI formula", Some(secs(10)), c1);
    report.criterion(2, "superfluid and NOON QFI", None, c2);
    report.criterion(3, "nonlinear-potential bound identities", Some(secs(1)), c3);
    report.criterion(4, "ultimate-bound table", None, c4);
    report.criterion(5, "two-well closed forms", Some(secs(30)), c5);
    report.criterion(6, "two-well fit sensitivity curves (N = 200)", Some(secs(120)), c6);
    report.criterion(7, "lattice-size collapse (⟨N̂⟩ = 1e4)", Some(secs(600)), c7);
    for (label, total, mode) in [
        ("same sweep at five times the atom number", 5e4, SweepMode::FixedTotal),
        ("fixed on-site occupation n̄ = N/12", 1e4, SweepMode::FixedSite),
    ] {
        let start = Instant::now();
        match c7_info(total, mode) {
            Ok(line) => println!("INFO [7] {label} ({:.2?}): {line}", start.elapsed()),
            Err(e) => println!("INFO [7] {label} failed: {e}"),
        }
    }
    report.criterion(8, "invariant suites and `verify` exit status", None, c8);
    println!("{} of 8 criteria passed", 8 - report.failures);
    let strict = std::env::var("MULTIPATH_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && report.failures > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
