//! Gårding cones of the elementary symmetric functions.
//!
//! `σ_r` is hyperbolic with respect to `a = (1, …, 1)`: for every `x` the degree-`r`
//! polynomial `s ↦ σ_r(s·a + x)` has only real roots. The cone `Γ_r` is the
//! component of `{σ_r ≠ 0}` containing `a`; a point belongs to it exactly when
//! every root of that polynomial is negative, and that root test is the
//! membership primitive here. The sign test `σ_1, …, σ_r > 0` is only used as a
//! cross-check.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{polynomial_roots, symmetric_eigen, Mat};
use crate::oracle;
use crate::record::{Location, VerificationRecord, WorstCase};
use crate::sampling::{gaussian_vec, sample_rng, uniform_vec};
use crate::symfun::{elementary_all, sigma, sigma_grad, sigma_hess_or_zero, LambdaVec};
use crate::tolerance::Tolerances;

/// Outcome of a membership query for `Γ_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeReport {
    pub r: usize,
    pub point: LambdaVec,
    /// All `r` roots of `s ↦ σ_r(s·a + x)`, complex ones included.
    pub roots: Vec<Complex64>,
    pub in_cone: bool,
    /// A root lies within the boundary tolerance of zero.
    pub boundary: bool,
    pub max_imag: f64,
}

/// Hessian of `W_r = σ_r^{1/r}` at a cone point together with its top eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcavityProbe {
    pub r: usize,
    pub point: LambdaVec,
    pub hessian: Mat,
    pub max_eigenvalue: f64,
    /// Frobenius norm of the Hessian, or 1 when it vanishes.
    pub scale: f64,
}

impl ConcavityProbe {
    pub fn is_concave(&self, tol: &Tolerances) -> bool {
        self.max_eigenvalue <= tol.concavity * self.scale
    }
}

fn check_r(r: usize, n: usize) -> Result<()> {
    if r < 1 || r > n {
        return Err(Error::OrderOutOfRange { r, lo: 1, hi: n });
    }
    Ok(())
}

/// Coefficients of `s ↦ σ_r(s·a + x)` in descending powers of `s`, from
/// `σ_r(x + s·a) = Σ_j C(n-j, r-j) σ_j(x) s^{r-j}`.
pub fn shifted_coefficients(r: usize, x: &LambdaVec) -> Result<Vec<f64>> {
    let n = x.dim();
    check_r(r, n)?;
    let table = elementary_all(x);
    Ok((0..=r).map(|j| crate::binomial(n - j, r - j) * table.get(j)).collect())
}

/// All roots of `s ↦ σ_r(s·a + x)`, via companion-matrix eigenvalues.
pub fn roots_along(r: usize, x: &LambdaVec) -> Result<Vec<Complex64>> {
    let coeffs = shifted_coefficients(r, x)?;
    Ok(polynomial_roots(&coeffs))
}

/// Membership of `x` in the open cone `Γ_r`.
pub fn in_garding_cone(r: usize, x: &LambdaVec, tol: &Tolerances) -> Result<ConeReport> {
    let roots = roots_along(r, x)?;
    let scale = 1.0 + x.max_abs();
    let tol_root = tol.root_boundary * scale;
    let max_imag = roots.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let boundary = roots.iter().any(|z| z.re.abs() <= tol_root);
    // Clustered roots come back from the eigenvalue solver with an imaginary part
    // of order eps^{1/m}; the real parts stay reliable, so only they decide.
    let in_cone = roots.iter().all(|z| z.re < -tol_root);
    Ok(ConeReport { r, point: x.clone(), roots, in_cone, boundary, max_imag })
}

/// Sign characterization `σ_1(x) > 0, …, σ_r(x) > 0` (cross-check only).
pub fn positive_sigmas(r: usize, x: &LambdaVec) -> bool {
    let t = elementary_all(x);
    (1..=r).all(|k| t.get(k) > 0.0)
}

fn require_cone(r: usize, x: &LambdaVec, tol: &Tolerances) -> Result<()> {
    let rep = in_garding_cone(r, x, tol)?;
    if !rep.in_cone {
        return Err(Error::OutsideCone { r });
    }
    Ok(())
}

/// Both sides of the Gårding inequality for `P = σ_r`, `m = r`:
/// `(1/r) Σ_k y_k ∂σ_r/∂x_k(x)` and `σ_r(y)^{1/r} σ_r(x)^{1-1/r}`.
pub fn garding_sides(r: usize, x: &LambdaVec, y: &LambdaVec, tol: &Tolerances) -> Result<(f64, f64)> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim() });
    }
    require_cone(r, x, tol)?;
    require_cone(r, y, tol)?;
    let grad = sigma_grad(r, x)?;
    let lhs = grad.iter().zip(y.iter()).map(|(g, yk)| g * yk).sum::<f64>() / r as f64;
    let (sx, sy) = (sigma(r, x), sigma(r, y));
    let m = r as f64;
    let rhs = libm::pow(sy, 1.0 / m) * libm::pow(sx, 1.0 - 1.0 / m);
    Ok((lhs, rhs))
}

/// Gårding gap `LHS - RHS`; non-negative on `Γ_r × Γ_r` up to round-off.
pub fn garding_gap(r: usize, x: &LambdaVec, y: &LambdaVec, tol: &Tolerances) -> Result<f64> {
    garding_sides(r, x, y, tol).map(|(l, rr)| l - rr)
}

/// Closed-form Hessian of `W_r = σ_r^{1/r}`:
/// `(1/r) σ_r^{1/r-2} (((1-r)/r) ∂_iσ_r ∂_jσ_r + σ_r ∂²_{ij}σ_r)`.
pub fn wr_hessian(r: usize, x: &LambdaVec, tol: &Tolerances) -> Result<ConcavityProbe> {
    require_cone(r, x, tol)?;
    let n = x.dim();
    let m = r as f64;
    let s = sigma(r, x);
    let g = sigma_grad(r, x)?;
    let h2 = sigma_hess_or_zero(r, x)?;
    let pre = libm::pow(s, 1.0 / m - 2.0) / m;
    let hessian = Mat::from_fn(n, n, |i, j| pre * ((1.0 - m) / m * g[i] * g[j] + s * h2[(i, j)]));
    let (vals, _) = symmetric_eigen(&hessian);
    let max_eigenvalue = vals[n - 1];
    let f = hessian.frobenius();
    let scale = if f > 0.0 { f } else { 1.0 };
    Ok(ConcavityProbe { r, point: x.clone(), hessian, max_eigenvalue, scale })
}

/// Both sides of `σ_r(x) yᵀ ∇²σ_r(x) y ≤ ((r-1)/r) (yᵀ ∇σ_r(x))²` for `x ∈ Γ_r`.
pub fn quadratic_form_bound(r: usize, x: &LambdaVec, y: &[f64], tol: &Tolerances) -> Result<(f64, f64)> {
    if x.dim() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.len() });
    }
    require_cone(r, x, tol)?;
    Ok(quadratic_form_sides(r, x, y))
}

pub(crate) fn quadratic_form_sides(r: usize, x: &LambdaVec, y: &[f64]) -> (f64, f64) {
    let n = x.dim();
    let s = sigma(r, x);
    let g = sigma_grad(r, x).expect("r checked by caller");
    let h2 = sigma_hess_or_zero(r, x).expect("r checked by caller");
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += y[i] * y[j] * h2[(i, j)];
        }
    }
    let lin: f64 = g.iter().zip(y).map(|(a, b)| a * b).sum();
    (s * quad, (r as f64 - 1.0) / r as f64 * lin * lin)
}

/// Draws a point of `Γ_r` (away from the boundary). Even `index` values give an
/// all-positive vector (a point of `Γ_n ⊂ Γ_r`); odd ones filter Gaussian draws
/// through the membership test so that `Γ_r \ Γ_n` is exercised too.
pub fn sample_cone_point(rng: &mut impl Rng, r: usize, n: usize, index: u64, tol: &Tolerances) -> Option<LambdaVec> {
    if index % 2 == 0 {
        let mut v = uniform_vec(rng, n, 0.0, 2.0);
        v.iter_mut().for_each(|x| *x += 0.05);
        return LambdaVec::new(v).ok();
    }
    for _ in 0..20_000 {
        let v = LambdaVec::new(gaussian_vec(rng, n)).ok()?;
        let rep = in_garding_cone(r, &v, tol).ok()?;
        if rep.in_cone && !rep.boundary {
            return Some(v);
        }
    }
    None
}

/// Draws random points of `R^n` and checks `Γ_r ⊃ Γ_{r+1}` for every level.
///
/// Returns one record per level `r = 1..n-1`: `lhs` counts points found in
/// `Γ_{r+1}`, `rhs` those of them also in `Γ_r`, and the residual is the number of
/// violations (tolerance zero).
pub fn cone_nesting_check(samples: usize, n: usize, seed: u64, tol: &Tolerances) -> Vec<VerificationRecord> {
    let mut in_upper = alloc::vec![0u64; n + 1];
    let mut in_both = alloc::vec![0u64; n + 1];
    let mut first_violation: Vec<Option<u64>> = alloc::vec![None; n + 1];
    for i in 0..samples as u64 {
        let mut rng = sample_rng(seed, 0x4e57, i);
        let v = if i % 2 == 0 { uniform_vec(&mut rng, n, 0.01, 2.0) } else { gaussian_vec(&mut rng, n) };
        let Ok(x) = LambdaVec::new(v) else { continue };
        let reps: Vec<ConeReport> = (1..=n).map(|r| in_garding_cone(r, &x, tol).expect("valid r")).collect();
        for upper in 2..=n {
            let up = &reps[upper - 1];
            if !up.in_cone || up.boundary {
                continue;
            }
            for lower in 1..upper {
                if lower + 1 == upper {
                    in_upper[lower] += 1;
                }
                if reps[lower - 1].in_cone {
                    if lower + 1 == upper {
                        in_both[lower] += 1;
                    }
                } else if first_violation[lower].is_none() {
                    first_violation[lower] = Some(i);
                    if lower + 1 != upper {
                        // a skip-level violation still counts against the adjacent pair
                        in_upper[lower] += 1;
                    }
                }
            }
        }
    }
    (1..n)
        .map(|r| {
            let violations = (in_upper[r] - in_both[r]) as f64;
            let loc = first_violation[r].map(Location::Sample).unwrap_or(Location::Global);
            VerificationRecord::identity(
                format!("cones.nesting.n{n}.r{r}"),
                loc,
                in_upper[r] as f64,
                in_both[r] as f64,
                0.0,
            )
            .with_note(format!("{} points in Γ_{}, {} violations of Γ_{} ⊃ Γ_{}", in_upper[r], r + 1, violations, r, r + 1))
        })
        .collect()
}

/// Largest scaled imaginary part of the roots of `s ↦ σ_r(sa + x)` over random
/// Gaussian points with `n` cycling through `2..=n_max` and every `r`.
pub fn hyperbolicity_check(samples: usize, n_max: usize, seed: u64, tol: &Tolerances) -> Vec<VerificationRecord> {
    let mut worst: Vec<WorstCase> = (2..=n_max).map(|n| WorstCase::new(format!("cones.hyperbolic.n{n}"))).collect();
    for i in 0..samples as u64 {
        let n = 2 + (i as usize) % (n_max - 1);
        let mut rng = sample_rng(seed, 0x4879, i);
        let scale: f64 = 1.0 + 3.0 * rng.random::<f64>();
        let v: Vec<f64> = gaussian_vec(&mut rng, n).into_iter().map(|g| g * scale).collect();
        let x = LambdaVec::new(v).expect("finite");
        let bound = tol.hyperbolic_imag * (1.0 + x.max_abs());
        for r in 1..=n {
            let roots = roots_along(r, &x).expect("valid r");
            let max_imag = roots.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
            worst[n - 2].push(VerificationRecord::at_most(
                format!("cones.hyperbolic.n{n}"),
                Location::Sample(i),
                max_imag,
                0.0,
                bound,
            ));
        }
    }
    worst.into_iter().map(WorstCase::finish).collect()
}

/// Compares the root test with the sign test on random points; boundary points
/// are counted separately and excluded from the comparison.
pub fn membership_equivalence(samples: usize, n: usize, seed: u64, tol: &Tolerances) -> Vec<VerificationRecord> {
    let mut disagree = alloc::vec![0u64; n + 1];
    let mut compared = alloc::vec![0u64; n + 1];
    let mut boundary = alloc::vec![0u64; n + 1];
    let mut first = alloc::vec![None; n + 1];
    for i in 0..samples as u64 {
        let mut rng = sample_rng(seed, 0x4571, i);
        let mut v = gaussian_vec(&mut rng, n);
        // shift part of the sample toward the cone axis so that every level is populated
        let shift = (i % 4) as f64 * 0.5;
        v.iter_mut().for_each(|x| *x += shift);
        let x = LambdaVec::new(v).expect("finite");
        for r in 1..=n {
            let rep = in_garding_cone(r, &x, tol).expect("valid r");
            if rep.boundary {
                boundary[r] += 1;
                continue;
            }
            compared[r] += 1;
            if rep.in_cone != positive_sigmas(r, &x) {
                disagree[r] += 1;
                first[r].get_or_insert(i);
            }
        }
    }
    (1..=n)
        .map(|r| {
            VerificationRecord::identity(
                format!("cones.equivalence.n{n}.r{r}"),
                first[r].map(Location::Sample).unwrap_or(Location::Global),
                disagree[r] as f64,
                0.0,
                0.0,
            )
            .with_note(format!("{} compared, {} boundary points excluded", compared[r], boundary[r]))
        })
        .collect()
}

/// Midpoints of random pairs in `Γ_r` must stay in `Γ_r` (convexity of the cone).
pub fn midpoint_convexity_check(samples: usize, n: usize, r: usize, seed: u64, tol: &Tolerances) -> VerificationRecord {
    let mut violations = 0u64;
    let mut tried = 0u64;
    let mut first = None;
    for i in 0..samples as u64 {
        let mut rng = sample_rng(seed, 0x4d50 + r as u64, i);
        let (Some(x), Some(y)) = (
            sample_cone_point(&mut rng, r, n, i, tol),
            sample_cone_point(&mut rng, r, n, i + 1, tol),
        ) else {
            continue;
        };
        tried += 1;
        let mid = LambdaVec::new(x.iter().zip(y.iter()).map(|(a, b)| 0.5 * (a + b)).collect()).expect("finite");
        let rep = in_garding_cone(r, &mid, tol).expect("valid r");
        if !rep.in_cone && !rep.boundary {
            violations += 1;
            first.get_or_insert(i);
        }
    }
    VerificationRecord::identity(
        format!("cones.convexity.n{n}.r{r}"),
        first.map(Location::Sample).unwrap_or(Location::Global),
        violations as f64,
        0.0,
        0.0,
    )
    .with_note(format!("{tried} pairs"))
}

/// Gårding inequality, its equality case and the quadratic-form bound over random
/// cone pairs for one `(n, r)`. Returns `[gap, equality, quadratic_form]` records.
pub fn garding_check(samples: usize, n: usize, r: usize, seed: u64, tol: &Tolerances) -> Vec<VerificationRecord> {
    let mut gap = WorstCase::new(format!("cones.garding.n{n}.r{r}"));
    let mut eq = WorstCase::new(format!("cones.garding_equality.n{n}.r{r}"));
    let mut quad = WorstCase::new(format!("cones.quadratic_form.n{n}.r{r}"));
    for i in 0..samples as u64 {
        let mut rng = sample_rng(seed, 0x4761 + r as u64, i);
        let (Some(x), Some(y)) = (
            sample_cone_point(&mut rng, r, n, i, tol),
            sample_cone_point(&mut rng, r, n, i / 2 * 2 + 1 - i % 2, tol),
        ) else {
            continue;
        };
        let loc = Location::Sample(i);
        match garding_sides(r, &x, &y, tol) {
            Ok((lhs, rhs)) => {
                // lhs ≥ rhs, so the violation is rhs - lhs
                gap.push(VerificationRecord::at_most("", loc.clone(), rhs, lhs, tol.garding * rhs.abs().max(1.0)));
            }
            Err(e) => gap.push(VerificationRecord::failure("", loc.clone(), e)),
        }
        if let Ok((lhs, rhs)) = garding_sides(r, &x, &x, tol) {
            eq.push(VerificationRecord::identity("", loc.clone(), lhs, rhs, tol.garding_equality * rhs.abs().max(1.0)));
        }
        let w = gaussian_vec(&mut rng, n);
        if let Ok((lhs, rhs)) = quadratic_form_bound(r, &x, &w, tol) {
            quad.push(VerificationRecord::at_most("", loc, lhs, rhs, tol.quadratic_form * rhs.abs().max(1.0)));
        }
    }
    alloc::vec![gap.finish(), eq.finish(), quad.finish()]
}

/// Concavity of `σ_r^{1/r}` on random cone points of one `(n, r)`.
pub fn concavity_check(samples: usize, n: usize, r: usize, seed: u64, tol: &Tolerances) -> VerificationRecord {
    let mut worst = WorstCase::new(format!("cones.concavity.n{n}.r{r}"));
    for i in 0..samples as u64 {
        let mut rng = sample_rng(seed, 0x5752 + r as u64, i);
        let Some(x) = sample_cone_point(&mut rng, r, n, i, tol) else { continue };
        match wr_hessian(r, &x, tol) {
            Ok(p) => worst.push(VerificationRecord::at_most("", Location::Sample(i), p.max_eigenvalue, 0.0, tol.concavity * p.scale)),
            Err(e) => worst.push(VerificationRecord::failure("", Location::Sample(i), e)),
        }
    }
    worst.finish()
}

/// Relative distance to the cone boundary below which [`wr_fd_check`] skips a point.
pub const FD_MIN_DEPTH: f64 = 1e-3;

/// Closed-form Hessian of `σ_r^{1/r}` against a Richardson-extrapolated second
/// difference on random cone points. The stencil is scaled to the distance from
/// the cone boundary along `a`; the tolerance adds the difference quotient's own
/// cancellation error, `512 ε (|W| + max|x|) / h²`. Points closer to the
/// boundary than [`FD_MIN_DEPTH`] are skipped and counted in the note.
pub fn wr_fd_check(samples: usize, n: usize, r: usize, seed: u64, tol: &Tolerances) -> VerificationRecord {
    let mut worst = WorstCase::new(format!("cones.wr_fd.n{n}.r{r}"));
    let m = r as f64;
    let w = |y: &[f64]| libm::pow(sigma(r, &LambdaVec::from_slice(y).expect("finite")), 1.0 / m);
    for i in 0..samples as u64 {
        let mut rng = sample_rng(seed, 0x5746 + r as u64, i);
        let Some(x) = sample_cone_point(&mut rng, r, n, i, tol) else { continue };
        let loc = Location::Sample(i);
        let probe = match wr_hessian(r, &x, tol) {
            Ok(p) => p,
            Err(e) => {
                worst.push(VerificationRecord::failure("", loc, e));
                continue;
            }
        };
        let depth = roots_along(r, &x).expect("valid r").iter().fold(f64::INFINITY, |a, z| a.min(-z.re));
        // too close to the boundary for any step: truncation and cancellation both blow up
        if depth < FD_MIN_DEPTH * (1.0 + x.max_abs()) {
            worst.push(VerificationRecord::skipped("", loc, "finite differences unresolvable near the cone boundary"));
            continue;
        }
        let h = 1e-2 * depth.min(1.0 + x.max_abs());
        let coarse = oracle::central_hessian(w, &x, h);
        let fine = oracle::central_hessian(w, &x, h / 2.0);
        let mut diff = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let fd = (4.0 * fine[(a, b)] - coarse[(a, b)]) / 3.0;
                diff = diff.max((fd - probe.hessian[(a, b)]).abs());
            }
        }
        let noise = 512.0 * f64::EPSILON * (w(&x).abs() + x.max_abs()) / (h * h);
        let scale = probe.hessian.max_abs().max(1.0);
        worst.push(VerificationRecord::judged("", loc, diff, 0.0, diff, tol.wr_fd * scale + noise));
    }
    worst.finish()
}
