//! Reference computations that share no code path with the main routines:
//! brute-force subset sums and finite differences on plain floats.
//!
//! They exist to check the closed forms and the jet pipeline; nothing in the
//! library proper depends on them.

use alloc::vec;
use alloc::vec::Vec;

use crate::hypersurface::ImmersionChart;
use crate::linalg::{det, inverse, Mat};
use crate::spaceform::{AmbientPoint, AmbientVec, SpaceForm};

/// `σ_r(x)` as the sum over all `r`-subsets of products (exponential cost).
pub fn brute_sigma(r: usize, x: &[f64]) -> f64 {
    let n = x.len();
    assert!(n < 24);
    if r > n {
        return 0.0;
    }
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == r {
            let mut p = 1.0;
            for (i, xi) in x.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    p *= xi;
                }
            }
            total += p;
        }
    }
    total
}

/// Central-difference gradient with step `h`.
pub fn central_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            y[i] = x[i] + h;
            let fp = f(&y);
            y[i] = x[i] - h;
            let fm = f(&y);
            y[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Fourth-order central-difference gradient with step `h`.
pub fn central_gradient4(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            let mut at = |s: f64| {
                y[i] = x[i] + s * h;
                let v = f(&y);
                y[i] = x[i];
                v
            };
            (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * h)
        })
        .collect()
}

/// Jacobian of a vector field by central differences, symmetrized.
pub fn central_jacobian_sym(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Mat {
    let n = x.len();
    let mut y = x.to_vec();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        y[j] = x[j] + h;
        let fp = f(&y);
        y[j] = x[j] - h;
        let fm = f(&y);
        y[j] = x[j];
        cols.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<f64>>());
    }
    Mat::from_fn(n, n, |i, j| 0.5 * (cols[j][i] + cols[i][j]))
}

/// Hessian from second differences of `f` with step `h`.
pub fn central_hessian(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Mat {
    let n = x.len();
    let f0 = f(x);
    let mut y = x.to_vec();
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        y[i] = x[i] + h;
        let fp = f(&y);
        y[i] = x[i] - h;
        let fm = f(&y);
        y[i] = x[i];
        m[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| {
                y[i] = x[i] + si * h;
                y[j] = x[j] + sj * h;
                let v = f(&y);
                y[i] = x[i];
                y[j] = x[j];
                v
            };
            let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0)) / (4.0 * h * h);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Second difference of `s ↦ d(q0, γ(s))` along the geodesic through `p` with
/// velocity `v`; approximates `Hess r(v, v)`.
pub fn distance_second_difference(space: &SpaceForm, q0: &AmbientPoint, p: &AmbientPoint, v: &AmbientVec, s: f64) -> f64 {
    let d = |t: f64| {
        let q = space.geodesic(p, v, t).expect("tangent velocity");
        let q = space.project(q.coords).expect("on model");
        space.distance(q0, &q).expect("on model")
    };
    (d(s) - 2.0 * d(0.0) + d(-s)) / (s * s)
}

/// Metric `g_ij = ⟨∂_i f, ∂_j f⟩` from central differences of the chart map.
pub fn metric_fd(chart: &ImmersionChart, u: &[f64], h: f64) -> Mat {
    let n = u.len();
    let mut y = u.to_vec();
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        y[i] = u[i] + h;
        let fp = chart.map(&y);
        y[i] = u[i] - h;
        let fm = chart.map(&y);
        y[i] = u[i];
        d.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<f64>>());
    }
    Mat::from_fn(n, n, |i, j| chart.space().inner(&d[i], &d[j]))
}

fn laplacian_fd_step(chart: &ImmersionChart, u: &[f64], phi: &dyn Fn(&[f64]) -> f64, h: f64) -> f64 {
    let n = u.len();
    let flux = |x: &[f64], i: usize| -> f64 {
        let g = metric_fd(chart, x, h);
        let gi = inverse(&g).expect("immersion");
        let sd = libm::sqrt(det(&g));
        let grad = central_gradient(phi, x, h);
        sd * (0..n).map(|j| gi[(i, j)] * grad[j]).sum::<f64>()
    };
    let mut y = u.to_vec();
    let mut div = 0.0;
    for i in 0..n {
        y[i] = u[i] + h;
        let a = flux(&y, i);
        y[i] = u[i] - h;
        let b = flux(&y, i);
        y[i] = u[i];
        div += (a - b) / (2.0 * h);
    }
    div / libm::sqrt(det(&metric_fd(chart, u, h)))
}

/// Laplace–Beltrami operator by nested central differences in divergence form,
/// with one Richardson extrapolation step.
pub fn laplacian_fd(chart: &ImmersionChart, u: &[f64], phi: impl Fn(&[f64]) -> f64, h: f64) -> f64 {
    let coarse = laplacian_fd_step(chart, u, &phi, h);
    let fine = laplacian_fd_step(chart, u, &phi, h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Principal curvatures at `u` from finite differences of the chart map, using
/// the Euclidean normal of the tangent vectors (flat model only).
pub fn flat_principal_curvatures_fd(chart: &ImmersionChart, u: &[f64], h: f64) -> Vec<f64> {
    assert_eq!(chart.c(), 0.0);
    let n = u.len();
    let f = |x: &[f64]| chart.map(x);
    let m = n + 1;
    let mut y = u.to_vec();
    let mut d1 = vec![vec![0.0; m]; n];
    for i in 0..n {
        y[i] = u[i] + h;
        let fp = f(&y);
        y[i] = u[i] - h;
        let fm = f(&y);
        y[i] = u[i];
        for k in 0..m {
            d1[i][k] = (fp[k] - fm[k]) / (2.0 * h);
        }
    }
    // normal: null vector of the tangent vectors by Gram–Schmidt on the basis
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in &d1 {
        let mut w = v.clone();
        for b in &basis {
            let dot: f64 = w.iter().zip(b).map(|(a, c)| a * c).sum();
            w.iter_mut().zip(b).for_each(|(a, c)| *a -= dot * c);
        }
        let len = libm::sqrt(w.iter().map(|a| a * a).sum());
        basis.push(w.iter().map(|a| a / len).collect());
    }
    let mut normal = vec![0.0; m];
    for k in 0..m {
        let mut w = vec![0.0; m];
        w[k] = 1.0;
        for b in &basis {
            let dot: f64 = w.iter().zip(b).map(|(a, c)| a * c).sum();
            w.iter_mut().zip(b).for_each(|(a, c)| *a -= dot * c);
        }
        let len = libm::sqrt(w.iter().map(|a| a * a).sum());
        if len > 0.5 {
            normal = w.iter().map(|a| a / len).collect();
            break;
        }
    }
    let f0 = f(u);
    let second = |i: usize, j: usize| -> Vec<f64> {
        let mut y = u.to_vec();
        let mut at = |si: f64, sj: f64| {
            y.copy_from_slice(u);
            y[i] += si * h;
            y[j] += sj * h;
            f(&y)
        };
        if i == j {
            let (p, q) = (at(1.0, 0.0), at(-1.0, 0.0));
            (0..m).map(|k| (p[k] - 2.0 * f0[k] + q[k]) / (h * h)).collect()
        } else {
            let (a, b, c, d) = (at(1.0, 1.0), at(1.0, -1.0), at(-1.0, 1.0), at(-1.0, -1.0));
            (0..m).map(|k| (a[k] - b[k] - c[k] + d[k]) / (4.0 * h * h)).collect()
        }
    };
    let g = Mat::from_fn(n, n, |i, j| d1[i].iter().zip(&d1[j]).map(|(a, b)| a * b).sum());
    let hm = Mat::from_fn(n, n, |i, j| second(i, j).iter().zip(&normal).map(|(a, b)| a * b).sum());
    let (mut vals, _) = crate::linalg::generalized_eigen(&hm, &g).expect("immersion");
    // orient like the chart: positive trace means the same side as most charts here
    if vals.iter().sum::<f64>() < 0.0 {
        vals = vals.iter().rev().map(|v| -v).collect();
    }
    vals
}
