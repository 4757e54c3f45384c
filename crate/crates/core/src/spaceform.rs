//! Coordinate models of the simply connected space forms `Q^{n+1}_c`.
//!
//! * `c = 0`: `R^{n+1}` with the Euclidean product.
//! * `c > 0`: the sphere of radius `1/√c` in `R^{n+2}`.
//! * `c < 0`: the sheet `x_0 > 0` of `⟨p, p⟩_L = 1/c` in Minkowski space
//!   `R^{n+1,1}`, `⟨u, v⟩_L = -u_0 v_0 + Σ u_i v_i`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::oracle;
use crate::record::{Location, VerificationRecord, WorstCase};
use crate::sampling::{sample_rng, uniform};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Defect allowed in `c⟨p, p⟩ = 1` and in tangency before an input is rejected.
pub const MANIFOLD_TOL: f64 = 1e-10;

/// Round-off margin by which an `arccos`/`arccosh` argument may leave its
/// domain and still be clamped.
pub const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceForm {
    pub c: f64,
    /// Dimension `n + 1` of the space form itself.
    pub n_ambient: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint {
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmbientVec {
    pub coords: Vec<f64>,
    /// Whether the vector must be tangent to the model at the point it is used with.
    pub tangent: bool,
}

impl AmbientVec {
    pub fn tangent(coords: Vec<f64>) -> Self {
        AmbientVec { coords, tangent: true }
    }

    pub fn free(coords: Vec<f64>) -> Self {
        AmbientVec { coords, tangent: false }
    }
}

/// Signature-aware pairing on raw coordinates: Minkowski when `c < 0`.
pub fn inner_slice<T: Real>(c: f64, u: &[T], v: &[T]) -> T {
    let mut acc = T::from(0.0);
    for (k, (a, b)) in u.iter().zip(v).enumerate() {
        if k == 0 && c < 0.0 {
            acc = acc - *a * *b;
        } else {
            acc = acc + *a * *b;
        }
    }
    acc
}

/// `⟨u, v⟩` of the model: Euclidean for `c ≥ 0`, Minkowski for `c < 0`.
pub fn model_inner(c: f64, u: &AmbientVec, v: &AmbientVec) -> Result<f64> {
    if u.coords.len() != v.coords.len() {
        return Err(Error::DimensionMismatch { expected: u.coords.len(), got: v.coords.len() });
    }
    Ok(inner_slice(c, &u.coords, &v.coords))
}

/// `α_c`: `0` for `c ≥ 0` and `√-c` for `c < 0`.
pub fn alpha_c(c: f64) -> f64 {
    if c < 0.0 {
        libm::sqrt(-c)
    } else {
        0.0
    }
}

/// Principal curvature `μ_c(t)` of a geodesic sphere of radius `t`.
pub fn sphere_curvature(c: f64, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::OutOfDomain { what: "geodesic sphere radius", value: t });
    }
    if c > 0.0 {
        let k = libm::sqrt(c);
        if t >= core::f64::consts::PI / k {
            return Err(Error::OutOfDomain { what: "geodesic sphere radius", value: t });
        }
        Ok(k * libm::cos(k * t) / libm::sin(k * t))
    } else if c == 0.0 {
        Ok(1.0 / t)
    } else {
        let k = libm::sqrt(-c);
        Ok(k / libm::tanh(k * t))
    }
}

fn norm2(c: f64, v: &[f64]) -> f64 {
    inner_slice(c, v, v)
}

impl SpaceForm {
    pub fn new(c: f64, n_ambient: usize) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!("curvature c = {c}")));
        }
        if n_ambient < 2 {
            return Err(Error::DimensionTooSmall(n_ambient));
        }
        Ok(SpaceForm { c, n_ambient })
    }

    /// Number of model coordinates: `n + 1` for `c = 0`, `n + 2` otherwise.
    pub fn coord_len(&self) -> usize {
        if self.c == 0.0 {
            self.n_ambient
        } else {
            self.n_ambient + 1
        }
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        inner_slice(self.c, u, v)
    }

    /// Relative defect of `c⟨p, p⟩ = 1` (zero for the flat model).
    pub fn membership_defect(&self, p: &[f64]) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        let d = (self.c * norm2(self.c, p) - 1.0).abs();
        if self.c < 0.0 && p[0] <= 0.0 {
            return d.max(1.0);
        }
        d
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.coord_len() {
            return Err(Error::DimensionMismatch { expected: self.coord_len(), got: len });
        }
        Ok(())
    }

    pub fn check_point(&self, p: &AmbientPoint) -> Result<()> {
        self.check_len(p.coords.len())?;
        if p.coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::OffManifold { defect: f64::NAN });
        }
        let defect = self.membership_defect(&p.coords);
        if defect > MANIFOLD_TOL {
            return Err(Error::OffManifold { defect });
        }
        Ok(())
    }

    /// Accepts coordinates that already lie on the model (within [`MANIFOLD_TOL`]).
    pub fn point(&self, coords: Vec<f64>) -> Result<AmbientPoint> {
        let p = AmbientPoint { coords };
        self.check_point(&p)?;
        Ok(p)
    }

    /// Radially rescales coordinates onto the model. For `c < 0` the input must
    /// be timelike; its sign is chosen so that the first coordinate is positive.
    pub fn project(&self, mut coords: Vec<f64>) -> Result<AmbientPoint> {
        self.check_len(coords.len())?;
        if self.c != 0.0 {
            let q = norm2(self.c, &coords);
            if !(q * self.c > 0.0) {
                return Err(Error::OffManifold { defect: f64::INFINITY });
            }
            let mut s = 1.0 / libm::sqrt(q * self.c);
            if self.c < 0.0 && coords[0] < 0.0 {
                s = -s;
            }
            coords.iter_mut().for_each(|x| *x *= s);
        }
        Ok(AmbientPoint { coords })
    }

    /// Tangent part of `raw` at `p`: `raw - c⟨raw, p⟩ p`.
    pub fn tangent_projection(&self, p: &AmbientPoint, raw: &[f64]) -> Result<AmbientVec> {
        self.check_len(raw.len())?;
        let mut w = raw.to_vec();
        if self.c != 0.0 {
            let a = self.c * self.inner(raw, &p.coords);
            w.iter_mut().zip(&p.coords).for_each(|(x, pk)| *x -= a * pk);
        }
        Ok(AmbientVec::tangent(w))
    }

    pub fn check_tangent(&self, p: &AmbientPoint, v: &AmbientVec) -> Result<()> {
        self.check_len(v.coords.len())?;
        if self.c == 0.0 || !v.tangent {
            return Ok(());
        }
        let scale = libm::sqrt(norm2(self.c, &v.coords).abs()) * libm::sqrt(1.0 / self.c.abs()) + 1.0;
        let defect = self.inner(&p.coords, &v.coords).abs() / scale;
        if defect > MANIFOLD_TOL {
            return Err(Error::NotTangent { defect });
        }
        Ok(())
    }

    /// Geodesic distance on the model.
    ///
    /// Away from the singular ends the value is computed from the chord length, which
    /// keeps full relative accuracy for nearby points; the result equals
    /// `arccos(c⟨p,q⟩)/√c` and `arccosh(c⟨p,q⟩_L)/√-c` respectively.
    pub fn distance(&self, p: &AmbientPoint, q: &AmbientPoint) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        let diff: Vec<f64> = p.coords.iter().zip(&q.coords).map(|(a, b)| a - b).collect();
        let chord2 = norm2(self.c, &diff);
        if self.c == 0.0 {
            return Ok(libm::sqrt(chord2));
        }
        let a = self.c * self.inner(&p.coords, &q.coords);
        if self.c > 0.0 {
            let k = libm::sqrt(self.c);
            if !(-1.0 - CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&a) {
                return Err(Error::OutOfDomain { what: "arccos", value: a });
            }
            let a = a.clamp(-1.0, 1.0);
            if a > 0.0 {
                let half = (k * libm::sqrt(chord2.max(0.0)) / 2.0).min(1.0);
                Ok(2.0 * libm::asin(half) / k)
            } else {
                Ok(libm::acos(a) / k)
            }
        } else {
            let k = libm::sqrt(-self.c);
            if a < 1.0 - CLAMP_TOL || a.is_nan() {
                return Err(Error::OutOfDomain { what: "arccosh", value: a });
            }
            Ok(2.0 * libm::asinh(k * libm::sqrt(chord2.max(0.0)) / 2.0) / k)
        }
    }

    /// Point at parameter `s` of the geodesic through `p` with initial velocity `v`.
    pub fn geodesic(&self, p: &AmbientPoint, v: &AmbientVec, s: f64) -> Result<AmbientPoint> {
        self.check_len(p.coords.len())?;
        self.check_tangent(p, v)?;
        let speed = libm::sqrt(norm2(self.c, &v.coords).max(0.0));
        if self.c == 0.0 || speed == 0.0 {
            let coords = p.coords.iter().zip(&v.coords).map(|(a, b)| a + s * b).collect();
            return Ok(AmbientPoint { coords });
        }
        let k = libm::sqrt(self.c.abs());
        let theta = k * speed * s;
        let (a, b) = if self.c > 0.0 {
            (libm::cos(theta), libm::sin(theta) / (k * speed))
        } else {
            (libm::cosh(theta), libm::sinh(theta) / (k * speed))
        };
        let coords = p.coords.iter().zip(&v.coords).map(|(x, y)| a * x + b * y).collect();
        Ok(AmbientPoint { coords })
    }

    /// Unit gradient of `r = d(·, q0)` at `p`, as a tangent vector.
    pub fn distance_gradient(&self, q0: &AmbientPoint, p: &AmbientPoint) -> Result<AmbientVec> {
        let d = self.distance(q0, p)?;
        if d <= 1e-12 {
            return Err(Error::AtCenter);
        }
        let w = if self.c == 0.0 {
            AmbientVec::tangent(q0.coords.iter().zip(&p.coords).map(|(a, b)| a - b).collect())
        } else {
            self.tangent_projection(p, &q0.coords)?
        };
        let len = libm::sqrt(norm2(self.c, &w.coords).max(0.0));
        if len <= 1e-300 {
            return Err(Error::AtCenter);
        }
        Ok(AmbientVec::tangent(w.coords.iter().map(|x| -x / len).collect()))
    }

    /// `Hess r(v, v)` for `r = d(·, q0)` at `p`: `μ_c(r(p)) |v_2|²`, where `v_2` is
    /// the part of `v` orthogonal to `∇r`. The radial part contributes nothing.
    pub fn distance_hessian(&self, q0: &AmbientPoint, p: &AmbientPoint, v: &AmbientVec) -> Result<f64> {
        self.check_tangent(p, v)?;
        let d = self.distance(q0, p)?;
        let grad = self.distance_gradient(q0, p)?;
        let radial = self.inner(&v.coords, &grad.coords);
        let v2: Vec<f64> = v.coords.iter().zip(&grad.coords).map(|(a, g)| a - radial * g).collect();
        Ok(sphere_curvature(self.c, d)? * norm2(self.c, &v2))
    }

    /// A canonical base point: the origin for `c = 0`, `(1/√|c|, 0, …)` otherwise.
    pub fn origin(&self) -> AmbientPoint {
        let mut coords = alloc::vec![0.0; self.coord_len()];
        if self.c != 0.0 {
            coords[0] = 1.0 / libm::sqrt(self.c.abs());
        }
        AmbientPoint { coords }
    }
}

/// A random point of the model, from Gaussian raw coordinates.
pub fn random_point(space: &SpaceForm, rng: &mut impl rand::Rng) -> AmbientPoint {
    let mut raw = crate::sampling::gaussian_vec(rng, space.coord_len());
    if space.c < 0.0 {
        // the lift onto the upper sheet; scaled so points stay within a few units of the origin
        let spatial: f64 = raw[1..].iter().map(|x| x * x).sum();
        raw[0] = libm::sqrt(1.0 / -space.c + spatial);
        return AmbientPoint { coords: raw };
    }
    space.project(raw).expect("nonzero Gaussian vector")
}

/// Randomized checks of the model geometry in `Q^3_c` for each listed curvature:
/// constructor membership, symmetry and triangle inequality of the distance,
/// the distance Hessian against second differences along geodesics, and the
/// monotonicity and flat limit of `μ_c`.
pub fn model_checks(samples: usize, curvatures: &[f64], seed: u64, tol: &Tolerances) -> Vec<VerificationRecord> {
    let mut out = Vec::new();
    for (ci, &c) in curvatures.iter().enumerate() {
        let space = SpaceForm::new(c, 3).expect("finite curvature");
        let mut membership = WorstCase::new(format!("spaceform.membership.c{c}"));
        let mut symmetry = WorstCase::new(format!("spaceform.distance_symmetry.c{c}"));
        let mut triangle = WorstCase::new(format!("spaceform.triangle.c{c}"));
        let mut hessian = WorstCase::new(format!("spaceform.distance_hessian_fd.c{c}"));
        let mut monotone = WorstCase::new(format!("spaceform.mu_monotone.c{c}"));
        for i in 0..samples as u64 {
            let loc = || Location::Sample(i);
            let mut rng = sample_rng(seed, 0x5346 + ci as u64, i);
            let (p, q, s) = (random_point(&space, &mut rng), random_point(&space, &mut rng), random_point(&space, &mut rng));
            for x in [&p, &q, &s] {
                membership.push(VerificationRecord::at_most("", loc(), space.membership_defect(&x.coords), 0.0, tol.manifold));
            }
            let run = || -> Result<[VerificationRecord; 2]> {
                let (pq, qp) = (space.distance(&p, &q)?, space.distance(&q, &p)?);
                let via = space.distance(&p, &s)? + space.distance(&s, &q)?;
                Ok([
                    VerificationRecord::identity("", loc(), pq, qp, tol.distance),
                    VerificationRecord::at_most("", loc(), pq, via, tol.distance),
                ])
            };
            match run() {
                Ok([a, b]) => {
                    symmetry.push(a);
                    triangle.push(b);
                }
                Err(e) => symmetry.push(VerificationRecord::failure("", loc(), e)),
            }

            // Hessian of r = d(p, ·) at q, away from p and from the cut locus
            let d = space.distance(&p, &q).unwrap_or(0.0);
            let admissible = d > 0.1 && (c <= 0.0 || d < 0.9 * core::f64::consts::PI / libm::sqrt(c));
            if admissible {
                let raw = crate::sampling::gaussian_vec(&mut rng, space.coord_len());
                let fd_step = 1e-4;
                let rec = space.tangent_projection(&q, &raw).and_then(|v| {
                    let exact = space.distance_hessian(&p, &q, &v)?;
                    let fd = oracle::distance_second_difference(&space, &p, &q, &v, fd_step);
                    let speed = space.inner(&v.coords, &v.coords);
                    Ok(VerificationRecord::identity("", loc(), exact, fd, tol.distance_hessian_fd * (1.0 + exact.abs()) * speed.max(1.0)))
                });
                hessian.push(rec.unwrap_or_else(|e| VerificationRecord::failure("", loc(), e)));
            }

            let top = if c > 0.0 { core::f64::consts::PI / libm::sqrt(c) } else { 10.0 };
            let (a, b) = (uniform(&mut rng, 0.001, 0.999) * top, uniform(&mut rng, 0.001, 0.999) * top);
            if a != b {
                let (t1, t2) = (a.min(b), a.max(b));
                let (m1, m2) = (sphere_curvature(c, t1).expect("in range"), sphere_curvature(c, t2).expect("in range"));
                // violation of μ(t1) > μ(t2)
                monotone.push(VerificationRecord::at_most("", loc(), m2, m1, 0.0).with_note(format!("t1 = {t1}, t2 = {t2}")));
            }
        }
        out.extend([membership, symmetry, triangle, hessian, monotone].into_iter().map(WorstCase::finish));
    }
    let mut limit = WorstCase::new("spaceform.flat_limit");
    for (k, t) in (0..=30).map(|k| (k, 0.5 + 1.5 * k as f64 / 30.0)) {
        for c in [1e-6, -1e-6] {
            let mu = sphere_curvature(c, t).expect("in range");
            limit.push(VerificationRecord::identity("", Location::Sample(k), mu, 1.0 / t, tol.sphere_limit));
        }
    }
    out.push(limit.finish());
    out
}

/// Free-function form of [`SpaceForm::distance`].
pub fn distance(c: f64, p: &AmbientPoint, q: &AmbientPoint) -> Result<f64> {
    let len = p.coords.len();
    let n_ambient = if c == 0.0 { len } else { len.saturating_sub(1) };
    SpaceForm::new(c, n_ambient)?.distance(p, q)
}

/// Free-function form of [`SpaceForm::distance_hessian`].
pub fn distance_hessian(c: f64, q0: &AmbientPoint, p: &AmbientPoint, v: &AmbientVec) -> Result<f64> {
    let len = p.coords.len();
    let n_ambient = if c == 0.0 { len } else { len.saturating_sub(1) };
    SpaceForm::new(c, n_ambient)?.distance_hessian(q0, p, v)
}
