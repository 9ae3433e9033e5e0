//! Periodic trapezoid rule on `[−π, π)` with half-step offset nodes.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const DEFAULT_NODES_1D: usize = 1024;
pub const DEFAULT_NODES_2D: usize = 512;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_NODES: usize = 1 << 22;
/// Node cap per axis for the `O(n²)` direct double sum.
pub const DEFAULT_MAX_NODES_DIRECT: usize = 1 << 13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureGrid {
    pub nodes_1d: usize,
    pub nodes_2d: usize,
    /// Rigid shift of every node; integrals over a full period ignore it.
    pub shift: f64,
    /// Relative change between successive doublings accepted as converged.
    pub tolerance: f64,
    pub max_nodes: usize,
    pub max_nodes_direct: usize,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self {
            nodes_1d: DEFAULT_NODES_1D,
            nodes_2d: DEFAULT_NODES_2D,
            shift: 0.0,
            tolerance: DEFAULT_TOLERANCE,
            max_nodes: DEFAULT_MAX_NODES,
            max_nodes_direct: DEFAULT_MAX_NODES_DIRECT,
        }
    }
}

impl QuadratureGrid {
    pub fn new(nodes_1d: usize, nodes_2d: usize) -> Result<Self> {
        let grid = Self {
            nodes_1d,
            nodes_2d,
            ..Self::default()
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("nodes_1d", self.nodes_1d), ("nodes_2d", self.nodes_2d)] {
            if n < 64 || n % 2 != 0 {
                return Err(Error::invalid(name, format!("need an even count >= 64, got {n}")));
            }
        }
        if self.max_nodes < self.nodes_1d.max(self.nodes_2d) {
            return Err(Error::invalid("max_nodes", "smaller than the starting node count"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance", "must be positive"));
        }
        if !self.shift.is_finite() {
            return Err(Error::invalid("shift", "must be finite"));
        }
        Ok(())
    }
}

/// Node `i` of an `n`-point grid.
pub fn node(i: usize, n: usize, shift: f64) -> f64 {
    let h = 2.0 * PI / n as f64;
    -PI + (i as f64 + 0.5) * h + shift
}

pub fn nodes(n: usize, shift: f64) -> Vec<f64> {
    (0..n).map(|i| node(i, n, shift)).collect()
}

/// Doubles the node count from `start` until successive values of every
/// component agree within `tolerance` (relative, with an absolute floor
/// from the scale returned alongside the values).
pub(crate) fn converge<const K: usize, F>(
    quantity: &'static str,
    start: usize,
    max_nodes: usize,
    tolerance: f64,
    mut evaluate: F,
) -> Result<([f64; K], usize)>
where
    F: FnMut(usize) -> Result<([f64; K], f64)>,
{
    let mut n = start;
    let (mut previous, _) = evaluate(n)?;
    let mut change = f64::INFINITY;
    loop {
        let next_n = n * 2;
        if next_n > max_nodes {
            return Err(Error::QuadratureNoConvergence {
                quantity,
                nodes: n,
                rel_change: change,
            });
        }
        let (current, scale) = evaluate(next_n)?;
        change = worst_change(&previous, &current, scale);
        if change <= tolerance {
            return Ok((current, next_n));
        }
        previous = current;
        n = next_n;
    }
}

fn worst_change<const K: usize>(a: &[f64; K], b: &[f64; K], scale: f64) -> f64 {
    let floor = 1e-14 * scale.abs();
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let diff = (x - y).abs();
            if diff <= floor {
                0.0
            } else {
                diff / y.abs().max(floor)
            }
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn nodes_avoid_the_origin() {
        let xs = nodes(64, 0.0);
        assert!(xs.iter().all(|x| x.abs() > 1e-3));
        assert_abs_diff_eq!(xs[0], -PI + PI / 64.0, epsilon = 1e-15);
    }

    #[test]
    fn trapezoid_is_spectral_for_periodic_functions() {
        let integrand = |x: f64| (x.cos()).exp();
        let exact = 1.266_065_877_752_008_4; // I0(1)
        let (value, _) = converge::<1, _>("test", 64, 1 << 12, 1e-12, |n| {
            let s: f64 = nodes(n, 0.3).into_iter().map(integrand).sum::<f64>() / n as f64;
            Ok(([s], 1.0))
        })
        .unwrap();
        assert_abs_diff_eq!(value[0], exact, epsilon = 1e-14);
    }

    #[test]
    fn validation() {
        assert!(QuadratureGrid::new(32, 512).is_err());
        assert!(QuadratureGrid::new(1025, 512).is_err());
        assert!(QuadratureGrid::new(1024, 512).is_ok());
    }

    #[test]
    fn non_convergence_is_reported() {
        let mut k = 0.0;
        let err = converge::<1, _>("drift", 64, 256, 1e-8, |_| {
            k += 1.0;
            Ok(([k], 1.0))
        })
        .unwrap_err();
        assert!(matches!(err, Error::QuadratureNoConvergence { quantity: "drift", .. }));
    }
}
