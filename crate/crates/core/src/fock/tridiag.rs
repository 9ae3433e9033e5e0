//! Real symmetric tridiagonal eigenproblems: Sturm-sequence bisection for
//! eigenvalues, inverse iteration for the matching eigenvector.

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

pub const DEFAULT_MAX_ITERATIONS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::invalid("diag", "empty matrix"));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::invalid(
                "off",
                format!("expected {} entries, got {}", diag.len() - 1, off.len()),
            ));
        }
        if diag.iter().chain(&off).any(|x| !x.is_finite()) {
            return Err(Error::invalid("matrix", "non-finite entry"));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.off[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    pub fn rayleigh_quotient(&self, x: &[f64]) -> f64 {
        let y = self.matvec(x);
        let num = compensated_sum(x.iter().zip(&y).map(|(a, b)| a * b));
        let den = compensated_sum(x.iter().map(|a| a * a));
        num / den
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn scale(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.off)
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.scale().powi(2).max(1.0);
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.dim() {
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.dim() {
            return Err(Error::invalid("k", format!("index {k} out of range")));
        }
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * self.scale() * self.dim() as f64 + f64::MIN_POSITIVE;
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Eigenvector for `value` by inverse iteration from `start`.
    pub fn inverse_iteration(&self, value: f64, start: &[f64], max_iterations: usize) -> Result<Vec<f64>> {
        let n = self.dim();
        if start.len() != n {
            return Err(Error::invalid("start", "length does not match the matrix"));
        }
        if n == 1 {
            return Ok(vec![1.0]);
        }
        let factors = ShiftedLu::factor(self, value);
        let mut x = normalized(start.to_vec())?;
        let tol = 1e-14 * (n as f64).sqrt();
        for _ in 0..max_iterations {
            let y = normalized(factors.solve(&x))?;
            let sign = if dot(&x, &y) < 0.0 { -1.0 } else { 1.0 };
            let change = x
                .iter()
                .zip(&y)
                .map(|(a, b)| (a - sign * b).abs())
                .fold(0.0f64, f64::max);
            x = y.into_iter().map(|v| sign * v).collect();
            if change <= tol {
                return Ok(x);
            }
        }
        Err(Error::EigenNoConvergence {
            iterations: max_iterations,
        })
    }

    /// Lowest eigenpair, with the largest-magnitude component made positive
    /// (lowest index wins ties).
    pub fn ground_state(&self, max_iterations: usize) -> Result<EigenPair> {
        let value = self.eigenvalue(0)?;
        let start = vec![1.0; self.dim()];
        let mut vector = self.inverse_iteration(value, &start, max_iterations)?;
        fix_sign(&mut vector);
        Ok(EigenPair { value, vector })
    }
}

/// Makes the first largest-magnitude component positive.
pub fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

fn normalized(mut v: Vec<f64>) -> Result<Vec<f64>> {
    let norm = dot(&v, &v).sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::EigenNoConvergence { iterations: 0 });
    }
    for x in &mut v {
        *x /= norm;
    }
    Ok(v)
}

/// LU factors of `T − σI` with partial pivoting (LAPACK `gttrf` layout).
struct ShiftedLu {
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiagonal, shift: f64) -> Self {
        let n = t.dim();
        let mut d: Vec<f64> = t.diag.iter().map(|x| x - shift).collect();
        let mut du = t.off.clone();
        let mut dl = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let l = dl[i] / d[i];
                    dl[i] = l;
                    d[i + 1] -= l * du[i];
                }
            } else {
                let l = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = l;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - l * d[i + 1];
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -l;
                }
                swapped[i] = true;
            }
        }
        // exact singularity is expected when σ is an eigenvalue to working precision
        let tiny = f64::EPSILON * t.scale();
        for x in &mut d {
            if x.abs() < tiny {
                *x = if *x < 0.0 { -tiny } else { tiny };
            }
        }
        Self {
            d,
            du,
            du2,
            dl,
            swapped,
        }
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x = b.to_vec();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let tmp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = tmp - self.dl[i] * x[i];
            } else {
                x[i + 1] -= self.dl[i] * x[i];
            }
        }
        x[n - 1] /= self.d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.du[i] * x[i + 1] - self.du2[i] * x[i + 2]) / self.d[i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn laplacian_spectrum_matches_closed_form() {
        let n = 12;
        let t = laplacian(n);
        for k in 0..n {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert_abs_diff_eq!(t.eigenvalue(k).unwrap(), exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn ground_state_of_laplacian() {
        let n = 9;
        let t = laplacian(n);
        let gs = t.ground_state(DEFAULT_MAX_ITERATIONS).unwrap();
        let norm = (2.0 / (n + 1) as f64).sqrt();
        for (i, v) in gs.vector.iter().enumerate() {
            let exact = norm * ((i + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).sin();
            assert_abs_diff_eq!(*v, exact, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(t.rayleigh_quotient(&gs.vector), gs.value, epsilon = 1e-13);
    }

    #[test]
    fn pivoting_path_with_zero_diagonal() {
        let t = SymTridiagonal::new(vec![0.0, 0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let gs = t.ground_state(DEFAULT_MAX_ITERATIONS).unwrap();
        assert_abs_diff_eq!(gs.value, -(2.0f64).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(gs.vector[1], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn one_by_one() {
        let t = SymTridiagonal::new(vec![-3.0], vec![]).unwrap();
        let gs = t.ground_state(4).unwrap();
        assert_abs_diff_eq!(gs.value, -3.0, epsilon = 1e-15);
        assert_eq!(gs.vector, vec![1.0]);
    }

    #[test]
    fn shape_validation() {
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![f64::NAN], vec![]).is_err());
    }

    #[test]
    fn sign_convention() {
        let mut v = vec![0.1, -0.7, 0.7];
        fix_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.7, -0.7]);
    }
}
