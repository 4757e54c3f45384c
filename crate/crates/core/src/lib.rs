//! Numerical machinery for the characterization of round spheres in space forms.
//!
//! The crate is `no_std` and only needs an allocator. It covers:
//!
//! * [`symfun`]: elementary symmetric functions `σ_r`, their derivatives and the
//!   normalized mean curvatures `H_r`.
//! * [`cones`]: Gårding cones `Γ_r` of `σ_r` with respect to `(1, …, 1)`, the Gårding
//!   inequality and concavity of `σ_r^{1/r}`.
//! * [`spaceform`]: flat, spherical and hyperbolic models of `Q^{n+1}_c`.
//! * [`hypersurface`]: fundamental forms, shape operator, covariant derivatives of
//!   the second fundamental form and both sides of Walter's formula for `ΔH_r`,
//!   all driven by truncated Taylor [`jet`] arithmetic.
//! * [`rigidity`]: grid scans that exercise the umbilicity argument on test families.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cones;
pub mod error;
pub mod families;
pub mod hypersurface;
pub mod jet;
pub mod linalg;
pub mod oracle;
pub mod record;
pub mod rigidity;
pub mod sampling;
pub mod scalar;
pub mod spaceform;
pub mod symfun;
pub mod tolerance;

pub use error::{Error, Result};
pub use record::{Location, VerificationRecord, Verdict};
pub use symfun::{LambdaVec, SigmaTable};
pub use tolerance::Tolerances;

/// Binomial coefficient `C(n, k)` as a float; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    libm::round(acc)
}
