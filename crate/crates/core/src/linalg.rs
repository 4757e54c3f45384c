//! Small dense linear algebra: generic determinants, inverses and characteristic
//! polynomials over [`Real`], plus `f64` eigensolvers.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl Mat<f64> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(d: &[f64]) -> Self {
        Mat::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        Mat::from_fn(self.rows, other.cols, |i, j| (0..self.cols).map(|k| self[(i, k)] * other[(k, j)]).sum())
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..i {
                m = m.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        m
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant by Gaussian elimination; pivots are chosen on the value part, which
/// only permutes rows, so the result is the same polynomial in the entries.
pub fn det<T: Real>(a: &Mat<T>) -> T {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m = a.clone();
    let mut acc = T::from(1.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| m[(x, k)].value().abs().total_cmp(&m[(y, k)].value().abs()))
            .unwrap();
        if m[(p, k)].value() == 0.0 {
            return T::from(0.0);
        }
        if p != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = t;
            }
            acc = -acc;
        }
        let piv = m[(k, k)];
        acc = acc * piv;
        let inv = piv.recip();
        for i in k + 1..n {
            let f = m[(i, k)] * inv;
            for j in k + 1..n {
                m[(i, j)] = m[(i, j)] - f * m[(k, j)];
            }
        }
    }
    acc
}

/// Gauss–Jordan inverse with value-based partial pivoting. `None` when singular.
pub fn inverse<T: Real>(a: &Mat<T>) -> Option<Mat<T>> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m = a.clone();
    let mut inv = Mat::from_fn(n, n, |i, j| T::from(if i == j { 1.0 } else { 0.0 }));
    let scale = a.as_slice().iter().fold(0.0f64, |s, x| s.max(x.value().abs()));
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| m[(x, k)].value().abs().total_cmp(&m[(y, k)].value().abs()))
            .unwrap();
        if m[(p, k)].value().abs() <= 1e-300_f64.max(scale * 1e-15) {
            return None;
        }
        if p != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = t;
                let t = inv[(k, j)];
                inv[(k, j)] = inv[(p, j)];
                inv[(p, j)] = t;
            }
        }
        let r = m[(k, k)].recip();
        for j in 0..n {
            m[(k, j)] = m[(k, j)] * r;
            inv[(k, j)] = inv[(k, j)] * r;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = m[(i, k)];
            for j in 0..n {
                m[(i, j)] = m[(i, j)] - f * m[(k, j)];
                inv[(i, j)] = inv[(i, j)] - f * inv[(k, j)];
            }
        }
    }
    Some(inv)
}

/// Coefficients of `det(A + tI) = Σ_r s_r t^{n-r}`, returned as `[s_0, …, s_n]`,
/// i.e. the elementary symmetric functions of the eigenvalues of `A`.
///
/// Uses the division-free Samuelson–Berkowitz recurrence, so every coefficient is
/// a polynomial in the entries of `A` and differentiates cleanly through jets.
pub fn char_poly_coefficients<T: Real>(a: &Mat<T>) -> Vec<T> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let zero = T::from(0.0);
    // p holds det(tI - A_k) in descending powers
    let mut p: Vec<T> = vec![T::from(1.0)];
    for k in 0..n {
        let mut q = Vec::with_capacity(k + 2);
        q.push(T::from(1.0));
        q.push(-a[(k, k)]);
        // v = A_k^j C, starting from the column above the diagonal
        let mut v: Vec<T> = (0..k).map(|i| a[(i, k)]).collect();
        for _ in 0..k {
            let rv = (0..k).fold(zero, |s, i| s + a[(k, i)] * v[i]);
            q.push(-rv);
            let next: Vec<T> = (0..k).map(|i| (0..k).fold(zero, |s, l| s + a[(i, l)] * v[l])).collect();
            v = next;
        }
        let mut np = vec![zero; k + 2];
        for (i, slot) in np.iter_mut().enumerate() {
            let mut s = zero;
            for (j, pj) in p.iter().enumerate() {
                if i >= j {
                    s = s + q[i - j] * *pj;
                }
            }
            *slot = s;
        }
        p = np;
    }
    // det(tI + A) has coefficients (-1)^r times those of det(tI - A)
    p.into_iter().enumerate().map(|(r, c)| if r % 2 == 1 { -c } else { c }).collect()
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal eigenvectors
/// as the columns of the second matrix.
pub fn symmetric_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m = a.clone();
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
    let mut v = Mat::identity(n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += m[(i, i)] * m[(i, i)];
            for j in 0..i {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off <= 1e-34 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].total_cmp(&m[(y, y)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);
    (values, vectors)
}

/// Cholesky factor `L` (lower triangular) with `A = L Lᵀ`; `None` unless `A` is
/// positive definite.
pub fn cholesky(a: &Mat) -> Option<Mat> {
    let n = a.rows();
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = libm::sqrt(d);
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Generalized symmetric eigenproblem `h v = λ g v` with `g` positive definite.
///
/// Eigenvalues ascend; eigenvector columns are orthonormal with respect to `g`.
pub fn generalized_eigen(h: &Mat, g: &Mat) -> Option<(Vec<f64>, Mat)> {
    let n = h.rows();
    let l = cholesky(g)?;
    let linv = inverse(&l)?;
    let c = linv.matmul(h).matmul(&linv.transpose());
    let (vals, w) = symmetric_eigen(&c);
    let frame = linv.transpose().matmul(&w);
    debug_assert_eq!(frame.rows(), n);
    Some((vals, frame))
}

/// Balances a real matrix in place (Parlett–Reinsch, radix 2) to improve the
/// accuracy of its eigenvalues.
fn balance(a: &mut Mat) {
    let n = a.rows();
    let radix = 2.0;
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / radix;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while c > g {
                    f /= radix;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[(i, j)] *= g;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the shifted double-step QR
/// iteration (EISPACK `hqr`). The matrix is overwritten.
fn hessenberg_eigenvalues(h: &mut Mat) -> Vec<Complex64> {
    let nn = h.rows();
    let mut wr = vec![0.0; nn];
    let mut wi = vec![0.0; nn];
    if nn == 0 {
        return Vec::new();
    }
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            anorm += h[(i, j)].abs();
        }
    }
    let mut nh = nn as isize - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r): (f64, f64, f64);
    while nh >= 0 {
        let n = nh as usize;
        let mut its = 0;
        loop {
            // look for a single small subdiagonal element
            let mut l = n;
            while l >= 1 {
                let mut s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if h[(l, l - 1)].abs() <= eps * s {
                    h[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let x = h[(n, n)];
            if l == n {
                wr[n] = x + t;
                wi[n] = 0.0;
                nh -= 1;
                break;
            }
            let y = h[(n - 1, n - 1)];
            let w = h[(n, n - 1)] * h[(n - 1, n)];
            if l + 1 == n {
                p = 0.5 * (y - x);
                q = p * p + w;
                let z = libm::sqrt(q.abs());
                let x = x + t;
                if q >= 0.0 {
                    let z = p + if p >= 0.0 { z } else { -z };
                    wr[n - 1] = x + z;
                    wr[n] = wr[n - 1];
                    if z != 0.0 {
                        wr[n] = x - w / z;
                    }
                    wi[n - 1] = 0.0;
                    wi[n] = 0.0;
                } else {
                    wr[n - 1] = x + p;
                    wr[n] = x + p;
                    wi[n - 1] = -z;
                    wi[n] = z;
                }
                nh -= 2;
                break;
            }
            if its == 60 {
                // no convergence; report the current diagonal
                for i in 0..=n {
                    wr[i] = h[(i, i)] + t;
                    wi[i] = 0.0;
                }
                nh = -1;
                break;
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for i in 0..=n {
                    h[(i, i)] -= x;
                }
                let s = h[(n, n - 1)].abs() + h[(n - 1, n - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let mut m = n - 2;
            loop {
                let z = h[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - rr - ss;
                r = h[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=n {
                h[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }
            let mut k = m;
            while k < n {
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if k + 1 != n { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = libm::copysign(libm::sqrt(p * p + q * q + r * r), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            h[(k, k - 1)] = -h[(k, k - 1)];
                        }
                    } else {
                        h[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    let xx = p / s;
                    let yy = q / s;
                    let zz = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=n {
                        let mut pp = h[(k, j)] + q * h[(k + 1, j)];
                        if k + 1 != n {
                            pp += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= pp * zz;
                        }
                        h[(k + 1, j)] -= pp * yy;
                        h[(k, j)] -= pp * xx;
                    }
                    let mmin = if n < k + 3 { n } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = xx * h[(i, k)] + yy * h[(i, k + 1)];
                        if k + 1 != n {
                            pp += zz * h[(i, k + 2)];
                            h[(i, k + 2)] -= pp * r;
                        }
                        h[(i, k + 1)] -= pp * q;
                        h[(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect()
}

/// Roots of `Σ_k coeffs[k] t^{d-k}` (descending powers, `coeffs[0] ≠ 0`) as the
/// eigenvalues of the balanced companion matrix.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    assert!(coeffs[0] != 0.0, "leading coefficient must be nonzero");
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        return vec![Complex64::new(-coeffs[1] / coeffs[0], 0.0)];
    }
    let mut c = Mat::zeros(d, d);
    for j in 0..d {
        c[(0, j)] = -coeffs[j + 1] / coeffs[0];
    }
    for i in 1..d {
        c[(i, i - 1)] = 1.0;
    }
    balance(&mut c);
    hessenberg_eigenvalues(&mut c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn berkowitz_matches_diagonal() {
        let a = Mat::diagonal(&[1.0, 2.0, 3.0]);
        let s = char_poly_coefficients(&a);
        assert_eq!(s, vec![1.0, 6.0, 11.0, 6.0]);
    }

    #[test]
    fn berkowitz_general_matrix() {
        // det(A + tI) for A = [[1,2],[3,4]]: t^2 + 5t - 2
        let a = Mat::from_rows(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(char_poly_coefficients(&a), vec![1.0, 5.0, -2.0]);
        let b = Mat::from_rows(3, 3, vec![2.0, -1.0, 0.5, 1.0, 0.0, 3.0, -2.0, 4.0, 1.0]);
        let s = char_poly_coefficients(&b);
        assert!(close(s[1], 3.0, 1e-15));
        assert!(close(s[3], det(&b), 1e-14));
    }

    #[test]
    fn inverse_and_det() {
        let a = Mat::from_rows(3, 3, vec![4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let inv = inverse(&a).unwrap();
        let id = a.matmul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - e).abs() < 1e-14);
            }
        }
        assert!(close(det(&a), 18.0, 1e-14));
        assert!(inverse(&Mat::zeros(2, 2)).is_none());
    }

    #[test]
    fn jacobi_eigen() {
        let a = Mat::from_rows(3, 3, vec![2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
        let (vals, vecs) = symmetric_eigen(&a);
        let s2 = libm::sqrt(2.0);
        assert!(close(vals[0], 2.0 - s2, 1e-14));
        assert!(close(vals[1], 2.0, 1e-14));
        assert!(close(vals[2], 2.0 + s2, 1e-14));
        let av = a.matmul(&vecs);
        for j in 0..3 {
            for i in 0..3 {
                assert!((av[(i, j)] - vals[j] * vecs[(i, j)]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn generalized_eigen_is_g_orthonormal() {
        let g = Mat::from_rows(2, 2, vec![2.0, 0.5, 0.5, 1.0]);
        let h = Mat::from_rows(2, 2, vec![1.0, 0.2, 0.2, 3.0]);
        let (vals, e) = generalized_eigen(&h, &g).unwrap();
        let gram = e.transpose().matmul(&g).matmul(&e);
        let hh = e.transpose().matmul(&h).matmul(&e);
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - id).abs() < 1e-14);
                assert!((hh[(i, j)] - id * vals[i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn companion_roots_real_and_complex() {
        // (t - 1)(t - 2)(t + 3) = t^3 - 7t + 6
        let mut roots: Vec<f64> = polynomial_roots(&[1.0, 0.0, -7.0, 6.0]).iter().map(|z| z.re).collect();
        roots.sort_by(f64::total_cmp);
        assert!(close(roots[0], -3.0, 1e-13) && close(roots[1], 1.0, 1e-13) && close(roots[2], 2.0, 1e-13));
        // t^2 + 1
        let z = polynomial_roots(&[1.0, 0.0, 1.0]);
        assert!(z.iter().all(|r| r.re.abs() < 1e-15 && (r.im.abs() - 1.0).abs() < 1e-15));
        // degree 6 with spread roots
        let target = [-0.5, 1.0, 2.5, -4.0, 7.0, 0.25];
        let mut c = vec![1.0];
        for &r in &target {
            let mut n = vec![0.0; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                n[i] += ci;
                n[i + 1] -= r * ci;
            }
            c = n;
        }
        let mut got: Vec<f64> = polynomial_roots(&c).iter().map(|z| z.re).collect();
        got.sort_by(f64::total_cmp);
        let mut want = target;
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-10, "{got:?}");
        }
    }
}
