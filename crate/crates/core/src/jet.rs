//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] carries the Taylor coefficients `∂^α f / α!` of a scalar function of
//! up to [`MAX_VARS`] chart coordinates, for all multi-indices with `|α| ≤ order`
//! and `order ≤ MAX_ORDER`. Products are truncated at the smaller order of the two
//! operands; [`Jet::partial`] lowers the order by one, so a chart evaluated at order
//! 4 yields a metric valid to order 3 and a second fundamental form valid to order 2.
//!
//! Monomials are stored in graded order, so the coefficients of an order-`k` jet are
//! a prefix of the storage. The monomial and product tables are built at compile time.

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::scalar::Real;

pub const MAX_VARS: usize = 4;
pub const MAX_ORDER: usize = 4;
/// `C(MAX_VARS + MAX_ORDER, MAX_ORDER)`.
pub const MAX_MONOMIALS: usize = 70;
/// Number of ordered monomial pairs with total degree at most `MAX_ORDER` in
/// `MAX_VARS` variables: `C(2 * MAX_VARS + MAX_ORDER, MAX_ORDER)`.
const MAX_PAIRS: usize = 495;
/// Base-5 dense encoding of exponent vectors (each exponent is at most 4).
const DENSE: usize = 625;
const NONE: u8 = u8::MAX;

struct Tables {
    exps: [[u8; MAX_VARS]; MAX_MONOMIALS],
    monos_upto: [usize; MAX_ORDER + 1],
    pairs: [[u8; 3]; MAX_PAIRS],
    pairs_upto: [usize; MAX_ORDER + 1],
    shift: [[u8; MAX_VARS]; MAX_MONOMIALS],
}

const fn encode(e: &[u8; MAX_VARS]) -> usize {
    let mut code = 0;
    let mut i = MAX_VARS;
    while i > 0 {
        i -= 1;
        code = code * 5 + e[i] as usize;
    }
    code
}

const fn build(nv: usize) -> Tables {
    let mut t = Tables {
        exps: [[0; MAX_VARS]; MAX_MONOMIALS],
        monos_upto: [0; MAX_ORDER + 1],
        pairs: [[0; 3]; MAX_PAIRS],
        pairs_upto: [0; MAX_ORDER + 1],
        shift: [[NONE; MAX_VARS]; MAX_MONOMIALS],
    };
    let mut lookup = [NONE; DENSE];
    let mut limit = 1;
    let mut i = 0;
    while i < nv {
        limit *= 5;
        i += 1;
    }

    let mut count = 0;
    let mut d = 0;
    while d <= MAX_ORDER {
        let mut code = 0;
        while code < limit {
            let mut e = [0u8; MAX_VARS];
            let mut rest = code;
            let mut sum = 0;
            let mut v = 0;
            while v < MAX_VARS {
                e[v] = (rest % 5) as u8;
                sum += rest % 5;
                rest /= 5;
                v += 1;
            }
            if sum == d {
                t.exps[count] = e;
                lookup[code] = count as u8;
                count += 1;
            }
            code += 1;
        }
        t.monos_upto[d] = count;
        d += 1;
    }

    let mut np = 0;
    let mut d = 0;
    while d <= MAX_ORDER {
        let lo = if d == 0 { 0 } else { t.monos_upto[d - 1] };
        let mut gi = lo;
        while gi < t.monos_upto[d] {
            let g = t.exps[gi];
            let mut ai = 0;
            while ai < t.monos_upto[d] {
                let a = t.exps[ai];
                let mut fits = true;
                let mut b = [0u8; MAX_VARS];
                let mut v = 0;
                while v < MAX_VARS {
                    if a[v] > g[v] {
                        fits = false;
                    } else {
                        b[v] = g[v] - a[v];
                    }
                    v += 1;
                }
                if fits {
                    t.pairs[np] = [ai as u8, lookup[encode(&b)], gi as u8];
                    np += 1;
                }
                ai += 1;
            }
            gi += 1;
        }
        t.pairs_upto[d] = np;
        d += 1;
    }

    let mut mi = 0;
    while mi < count {
        let e = t.exps[mi];
        let mut deg = 0;
        let mut v = 0;
        while v < MAX_VARS {
            deg += e[v] as usize;
            v += 1;
        }
        if deg < MAX_ORDER {
            let mut v = 0;
            while v < nv {
                let mut up = e;
                up[v] += 1;
                t.shift[mi][v] = lookup[encode(&up)];
                v += 1;
            }
        }
        mi += 1;
    }
    t
}

static TABLES: [Tables; MAX_VARS + 1] = [build(0), build(1), build(2), build(3), build(4)];

/// Truncated Taylor expansion of a scalar in `nvars` chart coordinates.
///
/// A jet with `nvars == 0` is a constant; it combines with jets of any width.
#[derive(Clone, Copy)]
pub struct Jet {
    nv: u8,
    order: u8,
    c: [f64; MAX_MONOMIALS],
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        let mut c = [0.0; MAX_MONOMIALS];
        c[0] = value;
        Jet { nv: 0, order: MAX_ORDER as u8, c }
    }

    /// The coordinate function `u_i` expanded around `value`.
    pub fn variable(nvars: usize, order: usize, index: usize, value: f64) -> Self {
        assert!(nvars <= MAX_VARS && index < nvars && order <= MAX_ORDER);
        let mut c = [0.0; MAX_MONOMIALS];
        c[0] = value;
        if order >= 1 {
            // degree-one monomials are e_0, e_1, ... in that order
            c[1 + index] = 1.0;
        }
        Jet { nv: nvars as u8, order: order as u8, c }
    }

    /// Builds a jet from raw Taylor coefficients in graded monomial order.
    pub fn from_coefficients(nvars: usize, order: usize, coeffs: &[f64]) -> Self {
        assert!(nvars <= MAX_VARS && order <= MAX_ORDER);
        let m = TABLES[nvars].monos_upto[order];
        assert!(coeffs.len() == m, "expected {m} coefficients");
        let mut c = [0.0; MAX_MONOMIALS];
        c[..m].copy_from_slice(coeffs);
        Jet { nv: nvars as u8, order: order as u8, c }
    }

    pub fn nvars(&self) -> usize {
        self.nv as usize
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    fn len(&self) -> usize {
        TABLES[self.nv as usize].monos_upto[self.order as usize]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c[..self.len()]
    }

    /// Exponent vector of the monomial stored at `index`.
    pub fn exponents(nvars: usize, index: usize) -> [u8; MAX_VARS] {
        TABLES[nvars].exps[index]
    }

    pub fn monomial_count(nvars: usize, order: usize) -> usize {
        TABLES[nvars].monos_upto[order]
    }

    /// Lowers the order, discarding higher coefficients.
    pub fn truncate(mut self, order: usize) -> Self {
        if order < self.order as usize {
            let keep = TABLES[self.nv as usize].monos_upto[order];
            let len = self.len();
            self.c[keep..len].iter_mut().for_each(|x| *x = 0.0);
            self.order = order as u8;
        }
        self
    }

    /// The partial derivative `∂f/∂u_i`, valid to one order less.
    pub fn partial(&self, i: usize) -> Self {
        assert!(self.order >= 1, "partial derivative of an order-0 jet");
        let t = &TABLES[self.nv as usize];
        let order = self.order as usize - 1;
        let mut out = Jet { nv: self.nv, order: order as u8, c: [0.0; MAX_MONOMIALS] };
        if i >= self.nv as usize {
            return out;
        }
        for m in 0..t.monos_upto[order] {
            let up = t.shift[m][i] as usize;
            out.c[m] = (t.exps[m][i] as f64 + 1.0) * self.c[up];
        }
        out
    }

    /// First derivatives at the expansion point.
    pub fn gradient(&self, n: usize) -> [f64; MAX_VARS] {
        let mut g = [0.0; MAX_VARS];
        if self.order >= 1 {
            for (i, gi) in g.iter_mut().enumerate().take(n.min(self.nv as usize)) {
                *gi = self.c[1 + i];
            }
        }
        g
    }

    /// Second derivative `∂²f/∂u_i∂u_j` at the expansion point.
    pub fn second(&self, i: usize, j: usize) -> f64 {
        if self.order < 2 || i >= self.nv as usize || j >= self.nv as usize {
            return 0.0;
        }
        let t = &TABLES[self.nv as usize];
        let m = t.shift[1 + i][j] as usize;
        let factor = if i == j { 2.0 } else { 1.0 };
        factor * self.c[m]
    }

    fn merged_shape(&self, other: &Jet) -> (u8, u8) {
        let nv = if self.nv == 0 {
            other.nv
        } else {
            debug_assert!(other.nv == 0 || other.nv == self.nv, "jet width mismatch");
            self.nv
        };
        (nv, self.order.min(other.order))
    }

    /// Evaluates `Σ_k taylor[k] · (self − self.value())^k`, i.e. the composition
    /// with a univariate function whose scaled derivatives at the value are `taylor`.
    pub fn compose(&self, taylor: &[f64; MAX_ORDER + 1]) -> Self {
        let mut delta = *self;
        delta.c[0] = 0.0;
        let top = (self.order as usize).min(MAX_ORDER);
        let mut acc = Jet::constant(taylor[top]).widen(self.nv, self.order);
        for k in (0..top).rev() {
            acc = acc * delta;
            acc.c[0] += taylor[k];
        }
        acc
    }

    fn widen(mut self, nv: u8, order: u8) -> Self {
        if self.nv == 0 {
            self.nv = nv;
        }
        self.order = self.order.min(order);
        self
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.nv)
            .field("order", &self.order)
            .field("coefficients", &self.coefficients())
            .finish()
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let (nv, order) = self.merged_shape(&rhs);
        let mut out = Jet { nv, order, c: [0.0; MAX_MONOMIALS] };
        let m = out.len();
        for k in 0..m {
            out.c[k] = self.c[k] + rhs.c[k];
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let (nv, order) = self.merged_shape(&rhs);
        let mut out = Jet { nv, order, c: [0.0; MAX_MONOMIALS] };
        let m = out.len();
        for k in 0..m {
            out.c[k] = self.c[k] - rhs.c[k];
        }
        out
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let (nv, order) = self.merged_shape(&rhs);
        let mut out = Jet { nv, order, c: [0.0; MAX_MONOMIALS] };
        if self.nv == 0 || rhs.nv == 0 {
            let (s, j) = if self.nv == 0 { (self.c[0], &rhs) } else { (rhs.c[0], &self) };
            let m = out.len();
            for k in 0..m {
                out.c[k] = s * j.c[k];
            }
            return out;
        }
        let t = &TABLES[nv as usize];
        for p in &t.pairs[..t.pairs_upto[order as usize]] {
            out.c[p[2] as usize] += self.c[p[0] as usize] * rhs.c[p[1] as usize];
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        let m = self.len();
        self.c[..m].iter_mut().for_each(|x| *x = -*x);
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        let m = self.len();
        self.c[..m].iter_mut().for_each(|x| *x *= rhs);
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = *self - rhs;
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, rhs: Jet) {
        *self = *self * rhs;
    }
}

impl Real for Jet {
    fn value(&self) -> f64 {
        self.c[0]
    }

    fn sqrt(self) -> Self {
        let x = self.c[0];
        let s = libm::sqrt(x);
        // binomial series of x^{1/2}
        self.compose(&[s, 0.5 / s, -0.125 / (s * x), 0.0625 / (s * x * x), -0.0390625 / (s * x * x * x)])
    }

    fn sin(self) -> Self {
        let (s, c) = (libm::sin(self.c[0]), libm::cos(self.c[0]));
        self.compose(&[s, c, -s / 2.0, -c / 6.0, s / 24.0])
    }

    fn cos(self) -> Self {
        let (s, c) = (libm::sin(self.c[0]), libm::cos(self.c[0]));
        self.compose(&[c, -s, -c / 2.0, s / 6.0, c / 24.0])
    }

    fn sinh(self) -> Self {
        let (s, c) = (libm::sinh(self.c[0]), libm::cosh(self.c[0]));
        self.compose(&[s, c, s / 2.0, c / 6.0, s / 24.0])
    }

    fn cosh(self) -> Self {
        let (s, c) = (libm::sinh(self.c[0]), libm::cosh(self.c[0]));
        self.compose(&[c, s, c / 2.0, s / 6.0, c / 24.0])
    }

    fn exp(self) -> Self {
        let e = libm::exp(self.c[0]);
        self.compose(&[e, e, e / 2.0, e / 6.0, e / 24.0])
    }

    fn ln(self) -> Self {
        let x = self.c[0];
        let r = 1.0 / x;
        self.compose(&[libm::log(x), r, -r * r / 2.0, r * r * r / 3.0, -r * r * r * r / 4.0])
    }

    fn recip(self) -> Self {
        let r = 1.0 / self.c[0];
        self.compose(&[r, -r * r, r * r * r, -r * r * r * r, r * r * r * r * r])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(u: &[f64]) -> alloc::vec::Vec<Jet> {
        (0..u.len()).map(|i| Jet::variable(u.len(), 4, i, u[i])).collect()
    }

    #[test]
    fn monomial_counts_match_binomials() {
        for nv in 0..=MAX_VARS {
            for d in 0..=MAX_ORDER {
                let expected = crate::binomial(nv + d, d) as usize;
                assert_eq!(Jet::monomial_count(nv, d), expected, "nv={nv} d={d}");
            }
        }
        assert_eq!(TABLES[4].pairs_upto[4], MAX_PAIRS);
    }

    #[test]
    fn product_of_variables() {
        let v = vars(&[2.0, 3.0]);
        let p = v[0] * v[1];
        assert_eq!(p.value(), 6.0);
        assert_eq!(p.gradient(2)[..2], [3.0, 2.0]);
        assert_eq!(p.second(0, 1), 1.0);
        assert_eq!(p.second(0, 0), 0.0);
    }

    #[test]
    fn partial_lowers_order() {
        let v = vars(&[0.3, -0.2, 0.5]);
        let f = (v[0] * v[1] * v[2]).sin();
        let fx = f.partial(0);
        assert_eq!(fx.order(), 3);
        let x = 0.3 * -0.2 * 0.5;
        assert!((fx.value() - libm::cos(x) * (-0.2 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn fourth_derivative_of_exp_product() {
        // f = exp(u v); ∂⁴f/∂u²∂v² at (0, 0) = 4 (coefficient of u²v² is 1/2, times 2!2!)
        let v = vars(&[0.0, 0.0]);
        let f = (v[0] * v[1]).exp();
        let fuu = f.partial(0).partial(0);
        let fuuvv = fuu.partial(1).partial(1);
        assert!((fuuvv.value() - 2.0).abs() < 1e-14, "{}", fuuvv.value());
    }

    #[test]
    fn elementary_functions_match_finite_differences() {
        let u0 = [0.4, 0.7];
        let f = |x: f64, y: f64| libm::sqrt(1.0 + x * x) * libm::cosh(y) / (2.0 + libm::sin(x * y)) + libm::log(1.5 + x);
        let v = vars(&u0);
        let one = Jet::constant(1.0);
        let j = (one + v[0] * v[0]).sqrt() * v[1].cosh() / ((v[0] * v[1]).sin() + 2.0) + (v[0] + 1.5).ln();
        let h = 1e-4;
        let fxx = (f(u0[0] + h, u0[1]) - 2.0 * f(u0[0], u0[1]) + f(u0[0] - h, u0[1])) / (h * h);
        let fxy = (f(u0[0] + h, u0[1] + h) - f(u0[0] + h, u0[1] - h) - f(u0[0] - h, u0[1] + h)
            + f(u0[0] - h, u0[1] - h))
            / (4.0 * h * h);
        assert!((j.value() - f(u0[0], u0[1])).abs() < 1e-14);
        assert!((j.second(0, 0) - fxx).abs() < 1e-6);
        assert!((j.second(0, 1) - fxy).abs() < 1e-6);
    }

    #[test]
    fn reciprocal_series_is_exact_to_order_four() {
        let v = vars(&[0.0]);
        let r = (v[0] + 1.0).recip();
        assert_eq!(r.coefficients(), &[1.0, -1.0, 1.0, -1.0, 1.0]);
    }
}
