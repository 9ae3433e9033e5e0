//! Cross-checks against independent dense linear algebra.

use approx::assert_relative_eq;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use multipath::farfield::{
    coefficient_c, coefficient_c_g2, g2_fringe, pair_integral_at, DoubleIntegral, FringeModel, PairKernel,
    QuadratureGrid,
};
use multipath::fock::tridiag::SymTridiagonal;
use multipath::fock::{bh_ground_state, two_site_hamiltonian};
use multipath::gutzwiller::{make_gaussian_product, GutzwillerProduct};

fn dense(t: &SymTridiagonal) -> DMatrix<f64> {
    let n = t.dim();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = t.diag()[i];
        if i + 1 < n {
            a[(i, i + 1)] = t.off()[i];
            a[(i + 1, i)] = t.off()[i];
        }
    }
    a
}

fn sorted_eigenvalues(a: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn bisection_matches_dense_spectrum() {
    let t = SymTridiagonal::new(
        (0..40).map(|i| ((i * 7 % 11) as f64 - 5.0) * 0.3).collect(),
        (0..39).map(|i| 0.2 + ((i * 3 % 5) as f64) * 0.4).collect(),
    )
    .unwrap();
    let reference = sorted_eigenvalues(dense(&t));
    for (k, &e) in reference.iter().enumerate() {
        assert_relative_eq!(t.eigenvalue(k).unwrap(), e, epsilon = 1e-11);
    }
}

#[test]
fn bose_hubbard_ground_state_matches_dense() {
    for n in [2u32, 7, 20, 41] {
        for (ej, u) in [(1.0, 0.0), (1.0, 0.05), (1.0, -0.3), (0.1, 1.0), (1.0, 2.0)] {
            let h = two_site_hamiltonian(n, ej, u).unwrap();
            let eig = SymmetricEigen::new(dense(&h));
            let k = eig.eigenvalues.imin();
            let raw: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            // the swap-odd partner may be numerically degenerate; keep the even part
            let mut vec: Vec<f64> = (0..raw.len()).map(|i| raw[i] + raw[raw.len() - 1 - i]).collect();
            let norm = vec.iter().map(|v| v * v).sum::<f64>().sqrt();
            vec.iter_mut().for_each(|v| *v /= norm);
            let gs = bh_ground_state(n, ej, u).unwrap();
            assert_relative_eq!(gs.energy, eig.eigenvalues[k], epsilon = 1e-10);
            let ours: Vec<f64> = gs.state.amplitudes().iter().map(|a| a.re).collect();
            let dot: f64 = ours.iter().zip(&vec).map(|(a, b)| a * b).sum();
            if dot < 0.0 {
                vec.iter_mut().for_each(|v| *v = -*v);
            }
            for (a, b) in ours.iter().zip(&vec) {
                assert!((a - b).abs() < 1e-8, "N={n} E_J={ej} U={u}");
            }
        }
    }
}

/// Truncated Fock-space operators for a product of `sites` identical sites.
struct ProductSpace {
    dim: usize,
    lowering: Vec<DMatrix<Complex64>>,
    state: Vec<Complex64>,
}

impl ProductSpace {
    fn new(product: &GutzwillerProduct) -> Self {
        let c = product.amplitudes();
        let d = c.len();
        let sites = product.sites();
        let mut a = DMatrix::<Complex64>::zeros(d, d);
        for n in 1..d {
            a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        let eye = DMatrix::<Complex64>::identity(d, d);
        let lowering = (0..sites)
            .map(|k| {
                (0..sites).fold(DMatrix::<Complex64>::identity(1, 1), |acc, s| {
                    acc.kronecker(if s == k { &a } else { &eye })
                })
            })
            .collect();
        let single: Vec<Complex64> = c.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut state = vec![Complex64::new(1.0, 0.0)];
        for _ in 0..sites {
            state = state.iter().flat_map(|&x| single.iter().map(move |&y| x * y)).collect();
        }
        Self {
            dim: d.pow(sites as u32),
            lowering,
            state,
        }
    }

    fn field(&self, phi: f64) -> DMatrix<Complex64> {
        let mut out = DMatrix::<Complex64>::zeros(self.dim, self.dim);
        for (k, a) in self.lowering.iter().enumerate() {
            out += a * Complex64::from_polar(1.0, k as f64 * phi);
        }
        out
    }

    fn g2(&self, x: f64, y: f64) -> f64 {
        let px = self.field(x);
        let py = self.field(y);
        let v = nalgebra::DVector::from_vec(self.state.clone());
        let w = &py * (&px * &v);
        w.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn small_products() -> Vec<GutzwillerProduct> {
    vec![
        GutzwillerProduct::from_amplitudes(2, vec![0.3, 0.8, 0.5, 0.2, 0.1]).unwrap(),
        GutzwillerProduct::from_amplitudes(2, vec![0.1, 0.2, 0.9, 0.3]).unwrap(),
        GutzwillerProduct::from_amplitudes(3, vec![0.4, 0.7, 0.5, 0.3]).unwrap(),
    ]
}

#[test]
fn g2_matches_operator_expectation() {
    for product in small_products() {
        let space = ProductSpace::new(&product);
        let model = FringeModel::from_product(&product).unwrap();
        for (x, y) in [(0.0, 0.0), (0.3, -1.1), (2.5, 0.7), (-3.0, 3.0), (1e-3, 2e-3)] {
            let brute = space.g2(x, y);
            let ours = g2_fringe(x, y, &model);
            assert!(
                (ours - brute).abs() < 1e-10 * brute.abs().max(1.0),
                "x={x} y={y}: {ours} vs {brute}"
            );
        }
    }
}

#[test]
fn coefficient_c_from_g2_matches_factorized() {
    let grid = QuadratureGrid::default();
    for product in small_products()
        .into_iter()
        .chain([make_gaussian_product(2, 30.0, 4.0).unwrap()])
    {
        let model = FringeModel::from_product(&product).unwrap();
        let a = coefficient_c_g2(&model, &grid).unwrap();
        let b = coefficient_c(&model, &grid).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-8);
    }
}

#[test]
fn factorized_double_sum_matches_direct() {
    for product in small_products() {
        let model = FringeModel::from_product(&product).unwrap();
        for kernel in [PairKernel::SumF, PairKernel::DiffF, PairKernel::G, PairKernel::GNeg] {
            for (n, shift) in [(64, 0.0), (128, 0.37)] {
                let fast = pair_integral_at(&model, n, shift, kernel, DoubleIntegral::Factorized).unwrap();
                let slow = pair_integral_at(&model, n, shift, kernel, DoubleIntegral::Direct).unwrap();
                assert!(
                    (fast - slow).abs() <= 1e-11 * slow.abs().max(1.0),
                    "{kernel:?}: {fast} vs {slow}"
                );
            }
        }
    }
}
