//! Default numerical tolerances, in one place.
//!
//! Every check reads its threshold from a [`Tolerances`] value and copies it into
//! the [`VerificationRecord`](crate::VerificationRecord) it produces, so a report
//! always states the threshold its verdicts were judged against.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};

macro_rules! tolerances {
    ($( $(#[$doc:meta])* $name:ident = $value:expr ),* $(,)?) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct Tolerances {
            $( $(#[$doc])* pub $name: f64, )*
        }

        impl Default for Tolerances {
            fn default() -> Self {
                Tolerances { $( $name: $value, )* }
            }
        }

        impl Tolerances {
            /// Names of every tolerance, in declaration order.
            pub const NAMES: &'static [&'static str] = &[$( stringify!($name), )*];

            pub fn get(&self, name: &str) -> Option<f64> {
                match name {
                    $( stringify!($name) => Some(self.$name), )*
                    _ => None,
                }
            }

            /// Overrides one tolerance by name; unknown names are an error.
            pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
                if !(value.is_finite() && value >= 0.0) {
                    return Err(Error::InvalidParameter(alloc::format!("tolerance {name} must be a finite non-negative number")));
                }
                match name {
                    $( stringify!($name) => { self.$name = value; Ok(()) } )*
                    _ => Err(Error::InvalidParameter(name.to_string())),
                }
            }

            pub fn entries(&self) -> Vec<(&'static str, f64)> {
                alloc::vec![$( (stringify!($name), self.$name), )*]
            }
        }
    };
}

tolerances! {
    /// Finite-difference agreement of σ_r derivatives (relative, floor 1).
    sym_fd = 1e-8,
    /// Hessian of σ_r against differences of the gradient.
    sym_hess_fd = 1e-7,
    /// Algebraic identities of σ_r (relative to the absolute-value bound).
    sym_algebraic = 1e-12,
    /// Basis invariance of the characteristic-polynomial route.
    sym_basis = 1e-11,
    /// Largest imaginary part of a hyperbolic root, times (1 + max|x_i|).
    hyperbolic_imag = 1e-8,
    /// Roots closer to zero than this, times (1 + max|x_i|), mark the cone boundary.
    root_boundary = 1e-10,
    /// Gårding inequality slack, times max(1, |rhs|).
    garding = 1e-10,
    /// Equality case of the Gårding inequality.
    garding_equality = 1e-12,
    /// Largest Hessian eigenvalue of σ_r^{1/r}, times the Hessian's Frobenius norm.
    concavity = 1e-9,
    /// Closed-form against finite-difference Hessian of σ_r^{1/r}.
    wr_fd = 1e-6,
    /// Quadratic-form bound slack, times max(1, |rhs|).
    quadratic_form = 1e-10,
    /// Distance symmetry and triangle inequality.
    distance = 1e-9,
    /// Model membership of constructed points.
    manifold = 1e-10,
    /// μ_c(t) against 1/t for |c| = 1e-6.
    sphere_limit = 1e-5,
    /// Distance Hessian against second differences along geodesics.
    distance_hessian_fd = 1e-6,
    /// Principal curvatures of geodesic spheres against μ_c(t).
    geodesic_sphere = 1e-6,
    /// n²H² = |A|² + n(n-1)(R-c), times n²(1 + H²).
    curvature_relation = 1e-9,
    /// Gauss-equation against intrinsic Riemann tensor (relative).
    gauss = 1e-7,
    /// Sectional curvature of eigenplanes against c + λ_iλ_j.
    sectional = 1e-8,
    /// Total symmetry of ∇h, times 1 + max|h_ijk|.
    codazzi = 1e-7,
    /// Commutation of second covariant derivatives, times 1 + max|h_ijkl|.
    commutation = 1e-6,
    /// Two routes to σ_r(λ) (eigenvalues against characteristic polynomial).
    sigma_paths = 1e-10,
    /// Walter's formula, |LHS - RHS| / (1 + |LHS|).
    walter = 1e-5,
    /// Gradient identity, times 1 + |rhs|.
    gradient_identity = 1e-6,
    /// Trace identity n Hess H(e_j, e_j) = Σ_k h_kkjj, times 1 + max|h_kkjj|.
    hess_trace = 1e-6,
    /// Laplace–Beltrami against the finite-difference oracle (relative).
    laplacian_fd = 1e-5,
    /// Inequality chain of the rigidity argument, times max(1, |rhs|).
    proof_chain = 1e-9,
    /// Minimal eigenvalue gap, times 1 + max|λ|, for frame-dependent checks.
    eigen_gap = 1e-5,
    /// Umbilicity deficit λ_n - λ_1 below which a scan is declared rigid.
    umbilic = 1e-8,
    /// Range of H and H_r below which a family counts as having them constant.
    constancy = 1e-9,
    /// Deficit that a constant-H, constant-H_r family may not exceed.
    theorem_deficit = 1e-6,
    /// Range of H that a negative control must exceed.
    negative_control = 1e-2,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        let mut t = Tolerances::default();
        for name in Tolerances::NAMES {
            assert!(t.get(name).is_some());
        }
        t.set("walter", 2e-5).unwrap();
        assert_eq!(t.walter, 2e-5);
        assert!(t.set("walterr", 1.0).is_err());
        assert!(t.set("walter", f64::NAN).is_err());
        assert_eq!(t.entries().len(), Tolerances::NAMES.len());
    }
}
