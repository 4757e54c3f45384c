//! Built-in analytic chart families.
//!
//! Every family is a map from a box `U ⊂ R^n` into model coordinates, written once
//! against [`Real`] so that it evaluates both on floats and on jets. Spherical
//! families use hyperspherical coordinates `ω(u) ∈ S^n`,
//!
//! `ω_1 = cos u_1, ω_2 = sin u_1 cos u_2, …, ω_{n+1} = sin u_1 ⋯ sin u_n`,
//!
//! on a box that stays away from the coordinate poles.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Names accepted by [`Family::from_params`].
pub const FAMILY_NAMES: &[&str] = &["sphere", "ellipsoid", "torus", "cylinder", "bump"];

/// Largest chart dimension supported by the jet engine.
pub const MAX_DIM: usize = crate::jet::MAX_VARS;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Geodesic sphere of radius `t` about the model's origin.
    Sphere { n: usize, t: f64 },
    /// `Σ (x_i / a_i)² = 1` in `R^{n+1}`.
    Ellipsoid { axes: Vec<f64> },
    /// Torus of revolution in `R³` with tube radius `minor` about a circle of radius `major`.
    Torus { major: f64, minor: f64 },
    /// Patch `|u_k| ≤ half_length` of `S¹(radius) × R^{n-1}` in `R^{n+1}`.
    Cylinder { n: usize, radius: f64, half_length: f64 },
    /// Star-shaped perturbation of the geodesic sphere: the radius in direction `ω`
    /// is `t (1 + eps·b(ω))` with `b = ω_1 ω_2 + ω_{n+1}³ / 2`.
    Bump { n: usize, t: f64, eps: f64 },
}

fn get(params: &[(String, f64)], key: &str, default: f64) -> f64 {
    params.iter().rev().find(|(k, _)| k == key).map(|(_, v)| *v).unwrap_or(default)
}

fn get_dim(params: &[(String, f64)], default: usize) -> Result<usize> {
    let v = get(params, "n", default as f64);
    if libm::trunc(v) != v || !(2.0..=MAX_DIM as f64).contains(&v) {
        return Err(Error::InvalidParameter(format!("n = {v} must be an integer in 2..={MAX_DIM}")));
    }
    Ok(v as usize)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
    }
    Ok(v)
}

fn check_keys(family: &str, params: &[(String, f64)], allowed: &[&str]) -> Result<()> {
    for (k, _) in params {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::InvalidParameter(format!(
                "unknown parameter {k:?} for family {family} (expected one of {})",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

/// Hyperspherical coordinates `ω(u) ∈ S^n ⊂ R^{n+1}`.
pub fn hyperspherical<T: Real>(u: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(u.len() + 1);
    let mut s = T::from(1.0);
    for &ui in u {
        out.push(s * ui.cos());
        s = s * ui.sin();
    }
    out.push(s);
    out
}

/// Places the direction `ω` at geodesic distance `rho` from the model's origin.
fn radial_embed<T: Real>(c: f64, omega: &[T], rho: T) -> Vec<T> {
    if c == 0.0 {
        return omega.iter().map(|&w| w * rho).collect();
    }
    let k = libm::sqrt(c.abs());
    let (a, b) = if c > 0.0 { ((rho * k).cos(), (rho * k).sin()) } else { ((rho * k).cosh(), (rho * k).sinh()) };
    let mut out = Vec::with_capacity(omega.len() + 1);
    out.push(a / k);
    out.extend(omega.iter().map(|&w| w * b / k));
    out
}

fn spherical_domain(n: usize) -> Vec<(f64, f64)> {
    let mut d = vec![(FRAC_PI_2 - 1.1, FRAC_PI_2 + 1.1); n - 1];
    d.push((-2.6, 2.6));
    d
}

impl Family {
    /// Builds a family from its name and a `key = value` list; missing keys take
    /// defaults. `c` is the curvature of the ambient model.
    pub fn from_params(name: &str, params: &[(String, f64)], c: f64) -> Result<Family> {
        let fam = match name {
            "sphere" => {
                check_keys(name, params, &["n", "t"])?;
                Family::Sphere { n: get_dim(params, 2)?, t: positive("t", get(params, "t", 1.0))? }
            }
            "ellipsoid" => {
                check_keys(name, params, &["a", "b", "c", "d"])?;
                let mut axes = vec![get(params, "a", 1.0), get(params, "b", 1.1), get(params, "c", 1.25)];
                if params.iter().any(|(k, _)| k == "d") {
                    axes.push(get(params, "d", 1.4));
                }
                for (i, a) in axes.iter().enumerate() {
                    positive(&format!("axis {}", i + 1), *a)?;
                }
                Family::Ellipsoid { axes }
            }
            "torus" => {
                check_keys(name, params, &["major", "minor"])?;
                let major = positive("major", get(params, "major", 2.0))?;
                let minor = positive("minor", get(params, "minor", 1.0))?;
                if minor >= major {
                    return Err(Error::InvalidParameter("torus needs minor < major".to_string()));
                }
                Family::Torus { major, minor }
            }
            "cylinder" => {
                check_keys(name, params, &["n", "a", "length"])?;
                let half_length = get(params, "length", 1.0);
                if !(half_length > 0.0) {
                    return Err(Error::InvalidParameter(format!("length = {half_length} must be positive")));
                }
                Family::Cylinder { n: get_dim(params, 2)?, radius: positive("a", get(params, "a", 1.0))?, half_length }
            }
            "bump" => {
                check_keys(name, params, &["n", "t", "eps"])?;
                let eps = get(params, "eps", 1e-3);
                if !(eps.is_finite() && eps.abs() < 0.5) {
                    return Err(Error::InvalidParameter(format!("eps = {eps} must satisfy |eps| < 0.5")));
                }
                Family::Bump { n: get_dim(params, 2)?, t: positive("t", get(params, "t", 1.0))?, eps }
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown family {other:?}; available: {}",
                    FAMILY_NAMES.join(", ")
                )))
            }
        };
        fam.check_model(c)?;
        Ok(fam)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Sphere { .. } => "sphere",
            Family::Ellipsoid { .. } => "ellipsoid",
            Family::Torus { .. } => "torus",
            Family::Cylinder { .. } => "cylinder",
            Family::Bump { .. } => "bump",
        }
    }

    /// Identifier with parameters, e.g. `sphere(n=2,t=1)`.
    pub fn tag(&self) -> String {
        match self {
            Family::Sphere { n, t } => format!("sphere(n={n},t={t})"),
            Family::Ellipsoid { axes } => {
                let a: Vec<String> = axes.iter().map(|x| format!("{x}")).collect();
                format!("ellipsoid(axes={})", a.join(":"))
            }
            Family::Torus { major, minor } => format!("torus(major={major},minor={minor})"),
            Family::Cylinder { n, radius, half_length } => format!("cylinder(n={n},a={radius},length={half_length})"),
            Family::Bump { n, t, eps } => format!("bump(n={n},t={t},eps={eps})"),
        }
    }

    /// Dimension `n` of the hypersurface.
    pub fn dim(&self) -> usize {
        match self {
            Family::Sphere { n, .. } | Family::Cylinder { n, .. } | Family::Bump { n, .. } => *n,
            Family::Ellipsoid { axes } => axes.len() - 1,
            Family::Torus { .. } => 2,
        }
    }

    /// Rejects models the family is not defined in.
    pub fn check_model(&self, c: f64) -> Result<()> {
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!("curvature c = {c}")));
        }
        let n = self.dim();
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::InvalidParameter(format!("dimension n = {n} outside 2..={MAX_DIM}")));
        }
        match self {
            Family::Ellipsoid { axes } if !(3..=4).contains(&axes.len()) => {
                Err(Error::InvalidParameter("ellipsoid needs 3 or 4 axes".to_string()))
            }
            Family::Ellipsoid { .. } | Family::Torus { .. } | Family::Cylinder { .. } if c != 0.0 => Err(
                Error::InvalidParameter(format!("family {} is only defined for c = 0", self.name())),
            ),
            Family::Sphere { t, .. } | Family::Bump { t, .. } if c > 0.0 => {
                let reach = match self {
                    Family::Bump { eps, .. } => t * (1.0 + 1.5 * eps.abs()),
                    _ => *t,
                };
                if reach >= PI / libm::sqrt(c) {
                    Err(Error::InvalidParameter(format!("radius {t} does not fit in the sphere of curvature {c}")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Chart domain box; non-finite bounds mark an unbounded family.
    pub fn domain(&self) -> Vec<(f64, f64)> {
        match self {
            Family::Sphere { n, .. } | Family::Bump { n, .. } => spherical_domain(*n),
            Family::Ellipsoid { axes } => spherical_domain(axes.len() - 1),
            Family::Torus { .. } => vec![(-PI, PI), (-PI, PI)],
            Family::Cylinder { n, half_length, .. } => {
                let mut d = vec![(-PI, PI)];
                d.extend(core::iter::repeat_n((-half_length, *half_length), n - 1));
                d
            }
        }
    }

    /// Centre of the domain box (all-zero for unbounded directions).
    pub fn base_point(&self) -> Vec<f64> {
        self.domain()
            .iter()
            .map(|&(a, b)| if a.is_finite() && b.is_finite() { 0.5 * (a + b) } else { 0.0 })
            .collect()
    }

    /// Evaluates the chart map in model coordinates for curvature `c`.
    pub fn eval<T: Real>(&self, c: f64, u: &[T]) -> Vec<T> {
        match self {
            Family::Sphere { t, .. } => radial_embed(c, &hyperspherical(u), T::from(*t)),
            Family::Ellipsoid { axes } => {
                hyperspherical(u).into_iter().zip(axes).map(|(w, &a)| w * a).collect()
            }
            Family::Torus { major, minor } => {
                let ring = (u[1].cos() * *minor) + *major;
                vec![ring * u[0].cos(), ring * u[0].sin(), u[1].sin() * *minor]
            }
            Family::Cylinder { radius, .. } => {
                let mut out = vec![u[0].cos() * *radius, u[0].sin() * *radius];
                out.extend(u[1..].iter().copied());
                out
            }
            Family::Bump { n, t, eps } => {
                let omega = hyperspherical(u);
                let b = omega[0] * omega[1] + omega[*n].powi(3) * 0.5;
                let rho = (b * *eps + 1.0) * *t;
                radial_embed(c, &omega, rho)
            }
        }
    }
}
