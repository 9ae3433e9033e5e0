//! Multi-slit interference kernels.
//!
//! `D(φ) = sin²(Mφ/2)/sin²(φ/2) = (cos Mφ − 1)/(cos φ − 1)` and the centred
//! kernel `d(u) = sin(Mu/2)/sin(u/2)`. Near the zeros of `sin(φ/2)` the
//! closed forms lose precision, so they switch to the equivalent finite
//! trigonometric sums.

/// Below this `|sin(φ/2)|` the closed forms are replaced by exact sums.
const SINGULAR_WINDOW: f64 = 1e-2;

/// `D(φ)`, with the limit `M²` at `φ = 2πk`.
pub fn dirichlet_f(phi: f64, sites: usize) -> f64 {
    let m = sites as f64;
    let (s1, _) = (0.5 * phi).sin_cos();
    if s1.abs() < SINGULAR_WINDOW {
        return dirichlet_f_sum(phi, sites);
    }
    let sm = (0.5 * m * phi).sin();
    (sm / s1).powi(2)
}

/// `D(φ) = M + 2 Σ_{d=1}^{M−1} (M − d) cos(dφ)`.
fn dirichlet_f_sum(phi: f64, sites: usize) -> f64 {
    let m = sites as f64;
    let mut acc = m;
    for d in 1..sites {
        acc += 2.0 * (m - d as f64) * (d as f64 * phi).cos();
    }
    acc
}

/// `∂D/∂φ`.
pub fn dirichlet_f_prime(phi: f64, sites: usize) -> f64 {
    let m = sites as f64;
    let (s1, c1) = (0.5 * phi).sin_cos();
    if s1.abs() < SINGULAR_WINDOW {
        let mut acc = 0.0;
        for d in 1..sites {
            let d = d as f64;
            acc -= 2.0 * d * (m - d) * (d * phi).sin();
        }
        return acc;
    }
    let (sm, cm) = (0.5 * m * phi).sin_cos();
    m * sm * cm / (s1 * s1) - sm * sm * c1 / (s1 * s1 * s1)
}

/// `d(u)`, with the limit `M·(−1)^{k(M−1)}` at `u = 2πk`.
pub fn dirichlet_kernel(u: f64, sites: usize) -> f64 {
    let m = sites as f64;
    let s1 = (0.5 * u).sin();
    if s1.abs() < SINGULAR_WINDOW {
        let centre = 0.5 * (m - 1.0);
        let mut acc = 0.0;
        for k in 0..sites {
            acc += ((k as f64 - centre) * u).cos();
        }
        return acc;
    }
    (0.5 * m * u).sin() / s1
}

/// `g(φ, φ′) = d(φ)·d(φ′)·d(φ + φ′)`.
pub fn dirichlet_g(phi: f64, phi_prime: f64, sites: usize) -> f64 {
    dirichlet_kernel(phi, sites) * dirichlet_kernel(phi_prime, sites) * dirichlet_kernel(phi + phi_prime, sites)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn f_examples() {
        for m in 1..8 {
            assert_abs_diff_eq!(dirichlet_f(0.0, m), (m * m) as f64, epsilon = 1e-12);
            assert_abs_diff_eq!(dirichlet_f(2.0 * PI, m), (m * m) as f64, epsilon = 1e-9);
        }
        for phi in [0.3, 1.0, 2.5, PI] {
            assert_abs_diff_eq!(dirichlet_f(phi, 2), 2.0 * (1.0 + phi.cos()), epsilon = 1e-14);
        }
        assert_abs_diff_eq!(dirichlet_f(PI, 3), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(dirichlet_f(2.0 * PI / 5.0, 5), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn closed_form_and_sum_agree_near_the_window_edge() {
        for m in [2, 3, 7, 12] {
            for phi in [0.019, 0.021, 0.05, -0.03, 2.0 * PI - 0.021] {
                assert_abs_diff_eq!(dirichlet_f(phi, m), dirichlet_f_sum(phi, m), epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for m in [2, 3, 6, 12] {
            for phi in [-2.9, -1.0, -0.02, -1e-3, 0.0, 1e-5, 0.0199, 0.0201, 0.4, 1.3, 3.0] {
                let h = 1e-6;
                let fd = (dirichlet_f(phi + h, m) - dirichlet_f(phi - h, m)) / (2.0 * h);
                let scale = (m * m * m) as f64;
                assert_abs_diff_eq!(dirichlet_f_prime(phi, m), fd, epsilon = 1e-7 * scale);
            }
        }
    }

    #[test]
    fn g_examples() {
        for m in 1..6 {
            assert_abs_diff_eq!(dirichlet_g(0.0, 0.0, m), (m * m * m) as f64, epsilon = 1e-10);
        }
        for (x, y) in [(0.3, 1.1), (-2.0, 0.7), (3.0, 3.0)] {
            assert_abs_diff_eq!(dirichlet_g(x, y, 1), 1.0, epsilon = 1e-14);
        }
        for m in [2, 3, 5] {
            for phi in [0.4, 1.7, 2.9] {
                let expected = m as f64 * dirichlet_f(phi, m);
                assert_abs_diff_eq!(dirichlet_g(phi, -phi, m), expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn kernel_limit_sign() {
        assert_abs_diff_eq!(dirichlet_kernel(2.0 * PI, 2), -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dirichlet_kernel(2.0 * PI, 3), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dirichlet_kernel(4.0 * PI, 4), 4.0, epsilon = 1e-11);
        for u in [2.0 * PI - 0.03, 2.0 * PI + 0.015] {
            let closed = (2.0 * u).sin() / (0.5 * u).sin();
            assert_abs_diff_eq!(dirichlet_kernel(u, 4), closed, epsilon = 1e-11);
        }
    }
}
