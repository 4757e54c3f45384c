use core::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar arithmetic shared by plain floats and [`Jet`](crate::jet::Jet)s.
///
/// Chart maps and the small dense algorithms in [`linalg`](crate::linalg) are
/// written once against this trait, so the same code runs on `f64` for finite
/// difference oracles and on jets for exact derivatives.
pub trait Real:
    Copy
    + From<f64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// Value part (the jet's constant term).
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn recip(self) -> Self;

    fn powi(self, k: u32) -> Self {
        let mut acc = Self::from(1.0);
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }
}

impl Real for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        libm::sqrt(self)
    }
    fn sin(self) -> Self {
        libm::sin(self)
    }
    fn cos(self) -> Self {
        libm::cos(self)
    }
    fn sinh(self) -> Self {
        libm::sinh(self)
    }
    fn cosh(self) -> Self {
        libm::cosh(self)
    }
    fn exp(self) -> Self {
        libm::exp(self)
    }
    fn ln(self) -> Self {
        libm::log(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
}
