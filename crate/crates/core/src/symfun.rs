//! Elementary symmetric functions and the normalized mean curvatures.
//!
//! `σ_r(x)` is evaluated as the coefficient of `t^{n-r}` in `∏_s (t + x_s)`, built by
//! multiplying in one linear factor at a time. Functions of `x` with entries
//! deleted rebuild the product over the remaining entries instead of dividing a
//! factor out, which would break down when an entry is a root.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};
use crate::linalg::{char_poly_coefficients, Mat};
use crate::oracle;
use crate::record::{Location, VerificationRecord, WorstCase};
use crate::sampling::{random_orthogonal, sample_rng, uniform, uniform_vec};
use crate::scalar::Real;
use crate::tolerance::Tolerances;
use rand_chacha::ChaCha8Rng;

/// A point of `R^n`, `n ≥ 2`, with finite entries: a principal-curvature vector or
/// a generic argument of `σ_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaVec(Vec<f64>);

impl LambdaVec {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::DimensionTooSmall(entries.len()));
        }
        if let Some(index) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(LambdaVec(entries))
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self> {
        Self::new(entries.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, s: f64) -> LambdaVec {
        LambdaVec(self.0.iter().map(|x| s * x).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl Deref for LambdaVec {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `σ_0, …, σ_n` of some vector; `σ_r = 0` for `r > n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaTable(Vec<f64>);

impl SigmaTable {
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn get(&self, r: usize) -> f64 {
        self.0.get(r).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Elementary symmetric functions of an arbitrary slice (any length, including 0).
pub(crate) fn elementary_slice(x: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; x.len() + 1];
    e[0] = 1.0;
    for (k, &xs) in x.iter().enumerate() {
        // multiply the running product by (t + xs)
        for r in (1..=k + 1).rev() {
            e[r] += xs * e[r - 1];
        }
    }
    e
}

/// `σ_r` of `x` with the entries at the listed positions removed.
fn sigma_without(x: &[f64], r: usize, skip: &[usize]) -> f64 {
    let rest: Vec<f64> = x
        .iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, &v)| v)
        .collect();
    elementary_slice(&rest).get(r).copied().unwrap_or(0.0)
}

/// All elementary symmetric functions `σ_0(x), …, σ_n(x)`.
pub fn elementary_all(x: &LambdaVec) -> SigmaTable {
    SigmaTable(elementary_slice(x))
}

/// `σ_r(x)`; zero for `r > n`.
pub fn sigma(r: usize, x: &LambdaVec) -> f64 {
    elementary_all(x).get(r)
}

fn check_range(r: usize, lo: usize, hi: usize) -> Result<()> {
    if r < lo || r > hi {
        return Err(Error::OrderOutOfRange { r, lo, hi });
    }
    Ok(())
}

/// Gradient of `σ_r`: component `j` is `σ_{r-1}` of `x` with entry `j` deleted.
pub fn sigma_grad(r: usize, x: &LambdaVec) -> Result<Vec<f64>> {
    let n = x.dim();
    check_range(r, 1, n)?;
    Ok((0..n).map(|j| sigma_without(x, r - 1, &[j])).collect())
}

/// Hessian of `σ_r`: off-diagonal `(i, j)` is `σ_{r-2}` with entries `i, j`
/// deleted; the diagonal is exactly zero (`σ_r` is affine in each entry).
pub fn sigma_hess(r: usize, x: &LambdaVec) -> Result<Mat> {
    let n = x.dim();
    check_range(r, 2, n)?;
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = sigma_without(x, r - 2, &[i, j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Hessian of `σ_r` for every `r ≥ 1`; the zero matrix when `r = 1`.
pub(crate) fn sigma_hess_or_zero(r: usize, x: &LambdaVec) -> Result<Mat> {
    if r == 1 {
        check_range(r, 1, x.dim())?;
        return Ok(Mat::zeros(x.dim(), x.dim()));
    }
    sigma_hess(r, x)
}

/// `H_r = σ_r(λ) / C(n, r)`; `H_0 = 1`.
pub fn mean_curvature_ratio(r: usize, lambda: &LambdaVec) -> Result<f64> {
    let n = lambda.dim();
    check_range(r, 0, n)?;
    Ok(sigma(r, lambda) / crate::binomial(n, r))
}

/// `σ_r` of the eigenvalues of `A`, read off the coefficients of `det(A + tI)`.
///
/// No eigendecomposition is involved, so the same routine applied to a matrix of
/// jets differentiates `H_r` smoothly, including across eigenvalue crossings.
pub fn char_poly_sigma<T: Real>(a: &Mat<T>) -> Result<Vec<T>> {
    if a.rows() != a.cols() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    Ok(char_poly_coefficients(a))
}

/// [`char_poly_sigma`] for a float matrix, packaged as a [`SigmaTable`].
pub fn char_poly_table(a: &Mat) -> Result<SigmaTable> {
    char_poly_sigma(a).map(SigmaTable)
}

/// `σ_r(|x_1|, …, |x_n|)`, the natural magnitude for rounding errors in `σ_r(x)`.
fn abs_bound(r: usize, x: &[f64]) -> f64 {
    let a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    elementary_slice(&a).get(r).copied().unwrap_or(0.0)
}

fn random_point(seed: u64, salt: u64, i: u64) -> (LambdaVec, ChaCha8Rng) {
    let n = 2 + (i as usize) % 7;
    let mut rng = sample_rng(seed, salt, i);
    let x = LambdaVec::new(uniform_vec(&mut rng, n, -2.0, 2.0)).expect("finite");
    (x, rng)
}

/// The randomized identity suite for `σ_r`: generating polynomial, subset sums,
/// gradient and Hessian against differences, homogeneity and basis invariance.
/// Dimensions cycle through `2..=8`; each identity sees `samples` random points.
pub fn identity_checks(samples: usize, seed: u64, tol: &Tolerances) -> Vec<VerificationRecord> {
    let mut generating = WorstCase::new("symfun.generating_identity");
    let mut subsets = WorstCase::new("symfun.subset_sum");
    let mut deleted = WorstCase::new("symfun.gradient_deleted_entry");
    let mut grad_fd = WorstCase::new("symfun.gradient_fd");
    let mut diag = WorstCase::new("symfun.hessian_diagonal");
    let mut hess_fd = WorstCase::new("symfun.hessian_fd");
    let mut homog = WorstCase::new("symfun.homogeneity");
    let mut basis = WorstCase::new("symfun.basis_invariance");
    let mut sigma_zero = WorstCase::new("symfun.sigma_zero");
    for i in 0..samples as u64 {
        let loc = || Location::Sample(i);
        let (x, mut rng) = random_point(seed, 0x5359, i);
        let n = x.dim();
        let table = elementary_all(&x);
        sigma_zero.push(VerificationRecord::identity("", loc(), table.get(0), 1.0, 0.0));

        for _ in 0..20 {
            let t = uniform(&mut rng, -2.0, 2.0);
            let lhs: f64 = x.iter().map(|v| v + t).product();
            let rhs: f64 = (0..=n).map(|r| table.get(r) * libm::pow(t, (n - r) as f64)).sum();
            let scale: f64 = x.iter().map(|v| v.abs() + t.abs()).product();
            generating.push(VerificationRecord::identity("", loc(), lhs, rhs, tol.sym_algebraic * scale.max(1.0)));
        }

        for r in 0..=n {
            let want = oracle::brute_sigma(r, &x);
            subsets.push(VerificationRecord::identity("", loc(), table.get(r), want, tol.sym_algebraic * (1.0 + abs_bound(r, &x))));
        }

        let h = 1e-3 * (1.0 + x.max_abs());
        for r in 1..=n {
            let g = sigma_grad(r, &x).expect("r in range");
            let fd = oracle::central_gradient4(|y| elementary_slice(y)[r], &x, h);
            let scale = 1.0 + abs_bound(r - 1, &x);
            for j in 0..n {
                let without: Vec<f64> = x.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect();
                let direct = oracle::brute_sigma(r - 1, &without);
                deleted.push(VerificationRecord::identity("", loc(), g[j], direct, tol.sym_algebraic * scale));
                grad_fd.push(VerificationRecord::identity("", loc(), g[j], fd[j], tol.sym_fd * scale));
            }
        }

        for r in 2..=n {
            let hm = sigma_hess(r, &x).expect("r in range");
            let fd = oracle::central_jacobian_sym(|y| sigma_grad(r, &LambdaVec::from_slice(y).expect("finite")).expect("r"), &x, h);
            let scale = 1.0 + abs_bound(r - 2, &x);
            for a in 0..n {
                diag.push(VerificationRecord::identity("", loc(), hm[(a, a)], 0.0, 0.0));
                for b in 0..n {
                    hess_fd.push(VerificationRecord::identity("", loc(), hm[(a, b)], fd[(a, b)], tol.sym_hess_fd * scale));
                }
            }
        }

        for s in [-2.0, 0.5, 3.0] {
            let scaled = elementary_all(&x.scaled(s));
            for r in 0..=n {
                let f = libm::pow(s, r as f64);
                let scale = 1.0 + libm::fabs(f) * abs_bound(r, &x);
                homog.push(VerificationRecord::identity("", loc(), scaled.get(r), f * table.get(r), tol.sym_algebraic * scale));
            }
        }

        let q = random_orthogonal(&mut rng, n);
        let a = random_symmetric(&mut rng, n);
        let rotated = q.transpose().matmul(&a).matmul(&q);
        let (ta, tr) = (char_poly_table(&a).expect("square"), char_poly_table(&rotated).expect("square"));
        let (vals, _) = crate::linalg::symmetric_eigen(&a);
        // first-order sensitivity of σ_r to an eigenvalue perturbation of size ‖A‖
        let norm = vals.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
        for r in 0..=n {
            let sens = if r > 0 { (n - r + 1) as f64 * abs_bound(r - 1, &vals) * norm } else { 0.0 };
            let scale = 1.0 + abs_bound(r, &vals) + sens;
            basis.push(VerificationRecord::identity("", loc(), tr.get(r), ta.get(r), tol.sym_basis * scale));
        }
    }
    [generating, subsets, deleted, grad_fd, diag, hess_fd, homog, basis, sigma_zero]
        .into_iter()
        .map(WorstCase::finish)
        .collect()
}

fn random_symmetric(rng: &mut impl rand::Rng, n: usize) -> Mat {
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = uniform(rng, -2.0, 2.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(x: &[f64]) -> LambdaVec {
        LambdaVec::from_slice(x).unwrap()
    }

    #[test]
    fn rejects_bad_vectors() {
        assert_eq!(LambdaVec::new(vec![1.0]), Err(Error::DimensionTooSmall(1)));
        assert_eq!(LambdaVec::new(vec![1.0, f64::NAN]), Err(Error::NonFinite { index: 1 }));
        assert!(LambdaVec::new(vec![1.0, f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn elementary_examples() {
        assert_eq!(elementary_all(&lv(&[1.0, 1.0, 1.0])).values(), &[1.0, 3.0, 3.0, 1.0]);
        // (t+1)(t+2)(t+3) = t^3 + 6t^2 + 11t + 6
        assert_eq!(elementary_all(&lv(&[1.0, 2.0, 3.0])).values(), &[1.0, 6.0, 11.0, 6.0]);
        let t = elementary_all(&lv(&[2.5, 0.0, 0.0, 0.0]));
        assert_eq!(t.values(), &[1.0, 2.5, 0.0, 0.0, 0.0]);
        assert_eq!(t.get(7), 0.0);
    }

    #[test]
    fn gradient_examples() {
        assert_eq!(sigma_grad(1, &lv(&[0.3, -2.0, 5.0])).unwrap(), vec![1.0, 1.0, 1.0]);
        assert_eq!(sigma_grad(2, &lv(&[1.0, 2.0, 3.0])).unwrap(), vec![5.0, 4.0, 3.0]);
        let ones = lv(&[1.0; 5]);
        for r in 1..=5 {
            let g = sigma_grad(r, &ones).unwrap();
            assert!(g.iter().all(|&v| v == crate::binomial(4, r - 1)));
        }
        assert!(sigma_grad(0, &ones).is_err());
        assert!(sigma_grad(6, &ones).is_err());
    }

    #[test]
    fn hessian_examples() {
        let h = sigma_hess(2, &lv(&[0.1, 0.2, 0.3])).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h[(i, j)], if i == j { 0.0 } else { 1.0 });
            }
        }
        let h = sigma_hess(3, &lv(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        assert_eq!(h[(0, 1)], 7.0);
        assert!(sigma_hess(1, &lv(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn deleted_entry_roots_are_handled() {
        // x_j = 0 makes division by the factor impossible; rebuilding still works
        let x = lv(&[0.0, 2.0, -3.0]);
        assert_eq!(sigma_grad(3, &x).unwrap(), vec![-6.0, 0.0, 0.0]);
    }

    #[test]
    fn mean_curvature_examples() {
        assert_eq!(mean_curvature_ratio(0, &lv(&[4.0, 5.0])).unwrap(), 1.0);
        let rho = 2.0;
        let x = lv(&[1.0 / rho; 4]);
        for r in 0..=4 {
            let h = mean_curvature_ratio(r, &x).unwrap();
            assert!((h - libm::pow(rho, -(r as f64))).abs() < 1e-15);
        }
        let h = mean_curvature_ratio(2, &lv(&[1.0, 2.0, 3.0])).unwrap();
        assert!((h - 11.0 / 3.0).abs() < 1e-15);
        assert!(mean_curvature_ratio(4, &lv(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(char_poly_table(&Mat::identity(3)).unwrap().values(), &[1.0, 3.0, 3.0, 1.0]);
        assert_eq!(char_poly_table(&Mat::diagonal(&[1.0, 2.0, 3.0])).unwrap().values(), &[1.0, 6.0, 11.0, 6.0]);
        assert!(char_poly_table(&Mat::zeros(2, 3)).is_err());
    }

    #[test]
    fn identity_suite_passes() {
        let recs = identity_checks(300, 11, &Tolerances::default());
        assert_eq!(recs.len(), 9);
        for r in &recs {
            assert!(r.passed(), "{r:?}");
        }
    }
}
