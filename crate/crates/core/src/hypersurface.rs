//! Curvature engine for chart immersions `f: U ⊂ R^n → Q^{n+1}_c`.
//!
//! The chart map is evaluated in [`Jet`] arithmetic at the point of interest, and
//! every derived quantity (metric, normal, second fundamental form, Christoffel
//! symbols, `σ_r(A)`) is carried as a jet for as long as its derivatives are
//! needed. Order-4 jets of `f` give `g` to order 3 and `h` to order 2, which is
//! exactly what `∇²h`, the intrinsic curvature and `Δσ_r(A)` require.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::families::Family;
use crate::jet::Jet;
use crate::linalg::{cholesky, det, generalized_eigen, inverse, Mat};
use crate::record::{Location, VerificationRecord, WorstCase};
use crate::scalar::Real;
use crate::spaceform::{inner_slice, sphere_curvature, SpaceForm};
use crate::symfun::{char_poly_sigma, elementary_all, sigma_grad, sigma_hess_or_zero, LambdaVec, SigmaTable};
use crate::tolerance::Tolerances;

/// Dense tensor of rank `rank` over `n` indices per slot, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    n: usize,
    rank: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(n: usize, rank: usize) -> Self {
        Tensor { n, rank, data: vec![0.0; n.pow(rank as u32)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Components in the frame whose vectors are the columns of `e`:
    /// `T'_{a…} = Σ T_{i…} e_{ia} ⋯`.
    pub fn in_frame(&self, e: &Mat) -> Tensor {
        let n = self.n;
        let mut cur = self.data.clone();
        for mode in 0..self.rank {
            let stride = n.pow((self.rank - 1 - mode) as u32);
            let mut next = vec![0.0; cur.len()];
            for (flat, slot) in next.iter_mut().enumerate() {
                let a = (flat / stride) % n;
                let base = flat - a * stride;
                let mut s = 0.0;
                for i in 0..n {
                    s += cur[base + i * stride] * e[(i, a)];
                }
                *slot = s;
            }
            cur = next;
        }
        Tensor { n, rank: self.rank, data: cur }
    }
}

/// Multi-index iterator over `0..n` in each of `rank` slots.
fn indices(n: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n.pow(rank as u32)).map(move |mut flat| {
        let mut idx = vec![0; rank];
        for slot in idx.iter_mut().rev() {
            *slot = flat % n;
            flat /= n;
        }
        idx
    })
}

/// A built-in family realized as a chart in one model, with a fixed normal orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionChart {
    family: Family,
    space: SpaceForm,
    domain: Vec<(f64, f64)>,
    normal_sign: f64,
}

/// Jets of the first and second fundamental forms and of the unit normal at a point.
#[derive(Debug, Clone)]
pub struct JetForms {
    pub g: Mat<Jet>,
    pub h: Mat<Jet>,
    pub normal: Vec<Jet>,
}

impl ImmersionChart {
    /// Realizes `family` in the model of curvature `c`. The normal is oriented so
    /// that `h_11 ≥ 0` at the centre of the domain.
    pub fn new(family: Family, c: f64) -> Result<Self> {
        family.check_model(c)?;
        let space = SpaceForm::new(c, family.dim() + 1)?;
        let domain = family.domain();
        let mut chart = ImmersionChart { family, space, domain, normal_sign: 1.0 };
        let base = chart.family.base_point();
        let forms = chart.jet_forms(&base, 2)?;
        if forms.h[(0, 0)].value() < 0.0 {
            chart.normal_sign = -1.0;
        }
        Ok(chart)
    }

    /// The same immersion with the opposite unit normal.
    pub fn flipped(&self) -> Self {
        ImmersionChart { normal_sign: -self.normal_sign, ..self.clone() }
    }

    /// Replaces the chart domain (for example to zoom in on a region).
    pub fn with_domain(mut self, domain: Vec<(f64, f64)>) -> Result<Self> {
        if domain.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: domain.len() });
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn tag(&self) -> String {
        format!("{}@c={}", self.family.tag(), self.space.c)
    }

    pub fn space(&self) -> &SpaceForm {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.family.dim()
    }

    pub fn c(&self) -> f64 {
        self.space.c
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn normal_sign(&self) -> f64 {
        self.normal_sign
    }

    pub fn is_bounded(&self) -> bool {
        self.domain.iter().all(|(a, b)| a.is_finite() && b.is_finite())
    }

    /// Chart map in model coordinates.
    pub fn map<T: Real>(&self, u: &[T]) -> Vec<T> {
        self.family.eval(self.space.c, u)
    }

    /// Cell-centred tensor grid with `res[i]` points along axis `i`.
    pub fn grid(&self, res: &[usize]) -> Result<Vec<Vec<f64>>> {
        if res.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: res.len() });
        }
        if !self.is_bounded() {
            return Err(Error::Unbounded);
        }
        let total: usize = res.iter().product();
        let mut out = Vec::with_capacity(total);
        for mut flat in 0..total {
            let mut u = vec![0.0; self.n()];
            for i in (0..self.n()).rev() {
                let k = flat % res[i];
                flat /= res[i];
                let (a, b) = self.domain[i];
                u[i] = a + (b - a) * (k as f64 + 0.5) / res[i] as f64;
            }
            out.push(u);
        }
        Ok(out)
    }

    /// Point of the domain box shrunk by 5% on each side, from unit-interval draws.
    pub fn interior_point(&self, unit: &[f64]) -> Vec<f64> {
        self.domain
            .iter()
            .zip(unit)
            .map(|(&(a, b), &s)| {
                if a.is_finite() && b.is_finite() {
                    let m = 0.05 * (b - a);
                    a + m + (b - a - 2.0 * m) * s
                } else {
                    4.0 * s - 2.0
                }
            })
            .collect()
    }

    fn coordinate_jets(&self, u: &[f64], order: usize) -> Vec<Jet> {
        let n = self.n();
        (0..n).map(|i| Jet::variable(n, order, i, u[i])).collect()
    }

    /// `g`, `h` and the unit normal as jets, from a chart expansion of order `order`
    /// (`g` is then accurate to order `order - 1` and `h` to `order - 2`).
    pub fn jet_forms(&self, u: &[f64], order: usize) -> Result<JetForms> {
        let n = self.n();
        if u.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: u.len() });
        }
        if order < 2 {
            return Err(Error::JetOrder { have: order, need: 2 });
        }
        let c = self.space.c;
        let f = self.map(&self.coordinate_jets(u, order));
        let m = f.len();
        let df: Vec<Vec<Jet>> = (0..n).map(|i| f.iter().map(|x| x.partial(i)).collect()).collect();
        let g = Mat::from_fn(n, n, |i, j| inner_slice(c, &df[i], &df[j]));
        if cholesky(&g.map(|x| x.value())).is_none() {
            return Err(Error::DegenerateMetric);
        }
        // generalized cross product of the tangent vectors (and the position when c ≠ 0)
        let mut rows: Vec<&[Jet]> = df.iter().map(|v| v.as_slice()).collect();
        if c != 0.0 {
            rows.push(&f);
        }
        debug_assert_eq!(rows.len(), m - 1);
        let mut w: Vec<Jet> = (0..m)
            .map(|k| {
                let minor = Mat::from_fn(m - 1, m - 1, |a, b| rows[a][if b < k { b } else { b + 1 }]);
                let d = det(&minor);
                if k % 2 == 1 {
                    -d
                } else {
                    d
                }
            })
            .collect();
        if c < 0.0 {
            w[0] = -w[0];
        }
        let len2 = inner_slice(c, &w, &w);
        let scale = w.iter().fold(0.0f64, |s, x| s.max(x.value().abs()));
        if !(len2.value() > 1e-24 * scale * scale) || scale == 0.0 {
            return Err(Error::VanishingNormal);
        }
        let inv_len = len2.sqrt().recip() * self.normal_sign;
        let normal: Vec<Jet> = w.iter().map(|&x| x * inv_len).collect();
        let h = Mat::from_fn(n, n, |i, j| {
            let d2: Vec<Jet> = df[i].iter().map(|x| x.partial(j)).collect();
            inner_slice(c, &d2, &normal)
        });
        Ok(JetForms { g, h, normal })
    }
}

/// First and second fundamental forms and the unit normal at `u`.
pub fn fundamental_forms(chart: &ImmersionChart, u: &[f64]) -> Result<(Mat, Mat, Vec<f64>)> {
    let forms = chart.jet_forms(u, 2)?;
    Ok((
        forms.g.map(|x| x.value()),
        forms.h.map(|x| x.value()),
        forms.normal.iter().map(|x| x.value()).collect(),
    ))
}

/// How far [`point_geometry`] differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    /// `g`, `h`, principal curvatures and `H_r` only.
    Shape,
    /// Everything: `∇h`, `∇²h`, intrinsic curvature, `Δσ_r(A)` and `Hess H`.
    Full,
}

/// Reliability of the principal frame at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameStatus {
    /// All principal curvatures separated by at least the gap threshold.
    Distinct,
    /// All principal curvatures equal (within the umbilic tolerance); every
    /// orthonormal frame diagonalizes `A`.
    Umbilic,
    /// Some but not all principal curvatures (nearly) coincide.
    Degenerate,
}

impl FrameStatus {
    pub fn frame_reliable(self) -> bool {
        self != FrameStatus::Degenerate
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointGeometry {
    pub u: Vec<f64>,
    pub n: usize,
    pub c: f64,
    pub g: Mat,
    pub g_inv: Mat,
    /// `Γ^k_{ij}` stored at index `[k, i, j]`; only filled at [`Depth::Full`].
    pub christoffel: Option<Tensor>,
    pub h: Mat,
    /// Shape operator `A = g^{-1} h` in the chart basis.
    pub shape: Mat,
    pub normal: Vec<f64>,
    pub normal_sign: f64,
    /// Principal curvatures, ascending.
    pub lambda: LambdaVec,
    /// `g`-orthonormal principal directions (chart components) as columns.
    pub eigenframe: Mat,
    pub frame: FrameStatus,
    /// `H_0, …, H_n` from the principal curvatures.
    pub h_list: Vec<f64>,
    /// `σ_0(A), …, σ_n(A)` from the characteristic polynomial.
    pub sigma_char: SigmaTable,
    /// Normalized scalar curvature: intrinsic at [`Depth::Full`], `c + H_2` otherwise.
    pub r_scalar: f64,
    /// `h_{ijk}` in the eigenframe.
    pub nabla_h: Option<Tensor>,
    /// `h_{ijkl}` in the eigenframe (`k` differentiated first).
    pub nabla2_h: Option<Tensor>,
    /// Intrinsic `R_{ijkl} = ⟨R(e_i, e_j) e_l, e_k⟩` in the eigenframe.
    pub riemann: Option<Tensor>,
    /// The same tensor from the Gauss equation.
    pub riemann_gauss: Tensor,
    /// `K_{ij}` of eigenplanes (intrinsic when available).
    pub sectional: Mat,
    /// `Δσ_r(A)`, `r = 0..n`.
    pub laplacian_sigma: Option<Vec<f64>>,
    /// `e_k(σ_r(A))` at index `[r][k]`.
    pub frame_grad_sigma: Option<Vec<Vec<f64>>>,
    /// `Hess H(e_a, e_b)` in the eigenframe.
    pub hess_h: Option<Mat>,
}

fn frame_status(lambda: &[f64], tol: &Tolerances) -> FrameStatus {
    let scale = 1.0 + lambda.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let spread = lambda[lambda.len() - 1] - lambda[0];
    if spread <= tol.umbilic * scale {
        return FrameStatus::Umbilic;
    }
    let gap = lambda.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if gap < tol.eigen_gap * scale {
        FrameStatus::Degenerate
    } else {
        FrameStatus::Distinct
    }
}

fn mat_vec_mat(e: &Mat, m: &Mat) -> Mat {
    e.transpose().matmul(m).matmul(e)
}

/// Assembles every curvature quantity at `u`.
pub fn point_geometry(chart: &ImmersionChart, u: &[f64], depth: Depth, tol: &Tolerances) -> Result<PointGeometry> {
    let n = chart.n();
    let c = chart.c();
    let order = match depth {
        Depth::Shape => 2,
        Depth::Full => 4,
    };
    let forms = chart.jet_forms(u, order)?;
    let g = forms.g.map(|x| x.value());
    let h = forms.h.map(|x| x.value());
    let g_inv_j = inverse(&forms.g).ok_or(Error::DegenerateMetric)?;
    let g_inv = g_inv_j.map(|x| x.value());
    let shape_j = Mat::from_fn(n, n, |i, j| {
        (0..n).fold(Jet::constant(0.0), |s, k| s + g_inv_j[(i, k)] * forms.h[(k, j)])
    });
    let shape = shape_j.map(|x| x.value());
    let sigma_j = char_poly_sigma(&shape_j)?;
    let sigma_char = crate::symfun::char_poly_table(&shape)?;

    let (vals, frame_m) = generalized_eigen(&h, &g).ok_or(Error::DegenerateMetric)?;
    let lambda = LambdaVec::new(vals)?;
    let frame = frame_status(&lambda, tol);
    let table = elementary_all(&lambda);
    let h_list: Vec<f64> = (0..=n).map(|r| table.get(r) / crate::binomial(n, r)).collect();

    // Gauss equation in the chart basis, then rotated
    let mut gauss = Tensor::zeros(n, 4);
    for idx in indices(n, 4) {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        let v = c * (g[(i, k)] * g[(j, l)] - g[(i, l)] * g[(j, k)]) + h[(i, k)] * h[(j, l)] - h[(i, l)] * h[(j, k)];
        gauss.set(&idx, v);
    }
    let riemann_gauss = gauss.in_frame(&frame_m);

    let mut pg = PointGeometry {
        u: u.to_vec(),
        n,
        c,
        g,
        g_inv,
        christoffel: None,
        h,
        shape,
        normal: forms.normal.iter().map(|x| x.value()).collect(),
        normal_sign: chart.normal_sign(),
        lambda,
        eigenframe: frame_m,
        frame,
        h_list,
        sigma_char,
        r_scalar: 0.0,
        nabla_h: None,
        nabla2_h: None,
        riemann: None,
        riemann_gauss,
        sectional: Mat::zeros(n, n),
        laplacian_sigma: None,
        frame_grad_sigma: None,
        hess_h: None,
    };

    if depth == Depth::Full {
        fill_derivatives(&mut pg, &forms, &g_inv_j, &sigma_j);
    }
    let riem = pg.riemann.as_ref().unwrap_or(&pg.riemann_gauss);
    pg.sectional = Mat::from_fn(n, n, |i, j| if i == j { 0.0 } else { riem.get(&[i, j, i, j]) });
    let mut ksum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                ksum += pg.sectional[(i, j)];
            }
        }
    }
    pg.r_scalar = ksum / (n * (n - 1)) as f64;
    Ok(pg)
}

fn fill_derivatives(pg: &mut PointGeometry, forms: &JetForms, g_inv: &Mat<Jet>, sigma_j: &[Jet]) {
    let n = pg.n;
    let g = &forms.g;
    let h = &forms.h;
    let e = pg.eigenframe.clone();

    // Γ^k_{ij} as order-2 jets
    let dg: Vec<Mat<Jet>> = (0..n).map(|l| g.map(|x| x.partial(l))).collect();
    let mut gamma: Vec<Jet> = vec![Jet::constant(0.0); n * n * n];
    let gi = |k: usize, i: usize, j: usize| k * n * n + i * n + j;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = Jet::constant(0.0);
                for l in 0..n {
                    s += g_inv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                gamma[gi(k, i, j)] = s * 0.5;
            }
        }
    }
    let mut chr = Tensor::zeros(n, 3);
    for idx in indices(n, 3) {
        chr.set(&idx, gamma[gi(idx[0], idx[1], idx[2])].value());
    }

    // h_{ij;k} as order-1 jets
    let hi = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let mut dh: Vec<Jet> = vec![Jet::constant(0.0); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = h[(i, j)].partial(k);
                for m in 0..n {
                    s = s - gamma[gi(m, k, i)] * h[(m, j)] - gamma[gi(m, k, j)] * h[(i, m)];
                }
                dh[hi(i, j, k)] = s.truncate(1);
            }
        }
    }
    let mut nabla = Tensor::zeros(n, 3);
    for idx in indices(n, 3) {
        nabla.set(&idx, dh[hi(idx[0], idx[1], idx[2])].value());
    }

    // h_{ij;k;l}
    let mut nabla2 = Tensor::zeros(n, 4);
    for idx in indices(n, 4) {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        let mut s = dh[hi(i, j, k)].partial(l).value();
        for m in 0..n {
            s -= gamma[gi(m, l, i)].value() * dh[hi(m, j, k)].value();
            s -= gamma[gi(m, l, j)].value() * dh[hi(i, m, k)].value();
            s -= gamma[gi(m, l, k)].value() * dh[hi(i, j, m)].value();
        }
        nabla2.set(&idx, s);
    }

    // intrinsic curvature R^m_{ijk} from the Christoffel symbols
    let gv = &pg.g;
    let mut rup = vec![0.0; n * n * n * n];
    let ri = |m: usize, i: usize, j: usize, k: usize| ((m * n + i) * n + j) * n + k;
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = gamma[gi(m, j, k)].partial(i).value() - gamma[gi(m, i, k)].partial(j).value();
                    for p in 0..n {
                        s += gamma[gi(m, i, p)].value() * gamma[gi(p, j, k)].value();
                        s -= gamma[gi(m, j, p)].value() * gamma[gi(p, i, k)].value();
                    }
                    rup[ri(m, i, j, k)] = s;
                }
            }
        }
    }
    let mut riem = Tensor::zeros(n, 4);
    for idx in indices(n, 4) {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        // ⟨R(∂_i, ∂_j) ∂_l, ∂_k⟩ = g_{km} R^m_{ijl}
        let v: f64 = (0..n).map(|m| gv[(k, m)] * rup[ri(m, i, j, l)]).sum();
        riem.set(&idx, v);
    }

    // Δσ_r(A) in divergence form
    let sqrt_det = det(g).sqrt();
    let sd = sqrt_det.value();
    let laplacian: Vec<f64> = sigma_j
        .iter()
        .map(|phi| {
            let grad: Vec<Jet> = (0..n).map(|j| phi.partial(j)).collect();
            let mut div = 0.0;
            for i in 0..n {
                let mut vi = Jet::constant(0.0);
                for (j, gj) in grad.iter().enumerate() {
                    vi += sqrt_det * g_inv[(i, j)] * *gj;
                }
                div += vi.partial(i).value();
            }
            div / sd
        })
        .collect();
    let frame_grad: Vec<Vec<f64>> = sigma_j
        .iter()
        .map(|phi| {
            let d = phi.gradient(n);
            (0..n).map(|k| (0..n).map(|i| e[(i, k)] * d[i]).sum()).collect()
        })
        .collect();

    // covariant Hessian of H = σ_1(A) / n
    let mean = sigma_j[1] * (1.0 / n as f64);
    let dmean = mean.gradient(n);
    let hess_chart = Mat::from_fn(n, n, |i, j| {
        mean.second(i, j) - (0..n).map(|k| gamma[gi(k, i, j)].value() * dmean[k]).sum::<f64>()
    });

    pg.christoffel = Some(chr);
    pg.nabla_h = Some(nabla.in_frame(&e));
    pg.nabla2_h = Some(nabla2.in_frame(&e));
    pg.riemann = Some(riem.in_frame(&e));
    pg.laplacian_sigma = Some(laplacian);
    pg.frame_grad_sigma = Some(frame_grad);
    pg.hess_h = Some(mat_vec_mat(&e, &hess_chart));
}

fn require<'a, T>(x: &'a Option<T>, need: usize) -> Result<&'a T> {
    x.as_ref().ok_or(Error::JetOrder { have: 2, need })
}

fn loc(pg: &PointGeometry) -> Location {
    Location::Chart(pg.u.clone())
}

fn check_r(r: usize, n: usize) -> Result<()> {
    if r < 1 || r > n {
        return Err(Error::OrderOutOfRange { r, lo: 1, hi: n });
    }
    Ok(())
}

/// `n²H² - |A|² - n(n-1)(R - c)` with `H` from the characteristic polynomial,
/// `|A|² = Σ λ_i²` and the normalized scalar curvature `R` of the point.
pub fn curvature_relation_residual(pg: &PointGeometry) -> f64 {
    let n = pg.n as f64;
    let mean = pg.sigma_char.get(1) / n;
    let a2: f64 = pg.lambda.iter().map(|l| l * l).sum();
    n * n * mean * mean - a2 - n * (n - 1.0) * (pg.r_scalar - pg.c)
}

pub fn curvature_relation_record(pg: &PointGeometry, tol: &Tolerances) -> VerificationRecord {
    let n = pg.n as f64;
    let mean = pg.sigma_char.get(1) / n;
    let a2: f64 = pg.lambda.iter().map(|l| l * l).sum();
    let lhs = n * n * mean * mean;
    let rhs = a2 + n * (n - 1.0) * (pg.r_scalar - pg.c);
    VerificationRecord::identity("curvature_relation", loc(pg), lhs, rhs, tol.curvature_relation * n * n * (1.0 + mean * mean))
}

/// Laplace–Beltrami operator of a chart scalar, by jet arithmetic in divergence form.
/// `scalar` receives the coordinate jets and the chart and returns the scalar's jet.
pub fn laplace_beltrami(
    chart: &ImmersionChart,
    u: &[f64],
    scalar: impl Fn(&ImmersionChart, &[Jet]) -> Jet,
) -> Result<f64> {
    let n = chart.n();
    let forms = chart.jet_forms(u, 3)?;
    let g = &forms.g;
    let g_inv = inverse(g).ok_or(Error::DegenerateMetric)?;
    let sqrt_det = det(g).sqrt();
    let coords: Vec<Jet> = (0..n).map(|i| Jet::variable(n, 2, i, u[i])).collect();
    let phi = scalar(chart, &coords);
    if phi.nvars() != 0 && phi.order() < 2 {
        return Err(Error::JetOrder { have: phi.order(), need: 2 });
    }
    let mut div = 0.0;
    for i in 0..n {
        let mut vi = Jet::constant(0.0);
        for j in 0..n {
            vi += sqrt_det * g_inv[(i, j)] * phi.partial(j);
        }
        div += vi.partial(i).value();
    }
    Ok(div / sqrt_det.value())
}

/// Both sides of Walter's formula for `Δ σ_r(A)` at a point.
pub fn walter_sides(pg: &PointGeometry, r: usize) -> Result<(f64, f64)> {
    let n = pg.n;
    check_r(r, n)?;
    let lap = require(&pg.laplacian_sigma, 4)?;
    let nabla = require(&pg.nabla_h, 3)?;
    let hess = require(&pg.hess_h, 4)?;
    let d1 = sigma_grad(r, &pg.lambda)?;
    let d2 = sigma_hess_or_zero(r, &pg.lambda)?;
    let lam = &pg.lambda;
    let mut rhs = 0.0;
    for j in 0..n {
        rhs += n as f64 * d1[j] * hess[(j, j)];
    }
    for i in 0..n {
        for j in i + 1..n {
            let gap = lam[i] - lam[j];
            rhs -= d2[(i, j)] * gap * gap * pg.sectional[(i, j)];
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                let hijk = nabla.get(&[i, j, k]);
                s += nabla.get(&[i, i, k]) * nabla.get(&[j, j, k]) - hijk * hijk;
            }
            rhs += d2[(i, j)] * s;
        }
    }
    Ok((lap[r], rhs))
}

/// Walter's formula as a record, judged by `|LHS - RHS| ≤ tol·(1 + |LHS|)`.
/// Points with partly coincident principal curvatures are skipped.
pub fn walter_record(pg: &PointGeometry, r: usize, tol: &Tolerances) -> VerificationRecord {
    let id = format!("walter.r{r}");
    if pg.frame == FrameStatus::Degenerate {
        return VerificationRecord::skipped(id, loc(pg), "skipped-degenerate");
    }
    match walter_sides(pg, r) {
        Ok((lhs, rhs)) => {
            let rel = (lhs - rhs).abs() / (1.0 + lhs.abs());
            VerificationRecord::identity(id, loc(pg), lhs, rhs, tol.walter * (1.0 + lhs.abs()))
                .with_note(format!("relative residual {rel:.3e}"))
        }
        Err(e) => VerificationRecord::failure(id, loc(pg), e),
    }
}

/// Evaluates the full geometry at `u` and checks Walter's formula for `r`.
pub fn walter_residual(chart: &ImmersionChart, u: &[f64], r: usize, tol: &Tolerances) -> Result<VerificationRecord> {
    check_r(r, chart.n())?;
    let pg = point_geometry(chart, u, Depth::Full, tol)?;
    Ok(walter_record(&pg, r, tol))
}

/// `Σ_j h_{jjk} ∂σ_r/∂x_j(λ) - e_k(σ_r(A))`.
pub fn gradient_identity_residual(pg: &PointGeometry, r: usize, k: usize) -> Result<f64> {
    gradient_identity_sides(pg, r, k).map(|(l, rr)| l - rr)
}

pub fn gradient_identity_sides(pg: &PointGeometry, r: usize, k: usize) -> Result<(f64, f64)> {
    let n = pg.n;
    check_r(r, n)?;
    if k >= n {
        return Err(Error::DimensionMismatch { expected: n, got: k });
    }
    if pg.frame == FrameStatus::Degenerate {
        return Err(Error::DegenerateFrame);
    }
    let nabla = require(&pg.nabla_h, 3)?;
    let grad = require(&pg.frame_grad_sigma, 3)?;
    let d1 = sigma_grad(r, &pg.lambda)?;
    let lhs: f64 = (0..n).map(|j| nabla.get(&[j, j, k]) * d1[j]).sum();
    Ok((lhs, grad[r][k]))
}

pub fn gradient_identity_record(pg: &PointGeometry, r: usize, k: usize, tol: &Tolerances) -> VerificationRecord {
    let id = format!("gradient_identity.r{r}.k{k}");
    match gradient_identity_sides(pg, r, k) {
        Ok((lhs, rhs)) => VerificationRecord::identity(id, loc(pg), lhs, rhs, tol.gradient_identity * (1.0 + rhs.abs())),
        Err(Error::DegenerateFrame) => VerificationRecord::skipped(id, loc(pg), "skipped-degenerate"),
        Err(e) => VerificationRecord::failure(id, loc(pg), e),
    }
}

/// Largest violation of `h_{ijkl} - h_{ijlk} = Σ_m 𝓡_{klim} h_{mj} + Σ_m 𝓡_{kljm} h_{im}`,
/// with `𝓡_{klim} = ⟨R(e_k, e_l) e_i, e_m⟩`.
pub fn commutation_residual(pg: &PointGeometry) -> Result<f64> {
    let n = pg.n;
    let d2 = require(&pg.nabla2_h, 4)?;
    let riem = require(&pg.riemann, 4)?;
    // h in the eigenframe (diagonal up to round-off)
    let hf = mat_vec_mat(&pg.eigenframe, &pg.h);
    let mut worst = 0.0f64;
    for idx in indices(n, 4) {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        let mut rhs = 0.0;
        for m in 0..n {
            rhs += riem.get(&[k, l, m, i]) * hf[(m, j)] + riem.get(&[k, l, m, j]) * hf[(i, m)];
        }
        let lhs = d2.get(&[i, j, k, l]) - d2.get(&[i, j, l, k]);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

pub fn commutation_record(pg: &PointGeometry, tol: &Tolerances) -> VerificationRecord {
    match commutation_residual(pg) {
        Ok(res) => {
            let scale = 1.0 + pg.nabla2_h.as_ref().map_or(0.0, Tensor::max_abs);
            VerificationRecord::judged("commutation", loc(pg), res, 0.0, res, tol.commutation * scale)
        }
        Err(e) => VerificationRecord::failure("commutation", loc(pg), e),
    }
}

/// Largest deviation of `h_{ijk}` from total symmetry.
pub fn codazzi_residual(pg: &PointGeometry) -> Result<f64> {
    let n = pg.n;
    let t = require(&pg.nabla_h, 3)?;
    let mut worst = 0.0f64;
    for idx in indices(n, 3) {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        let v = t.get(&[i, j, k]);
        for p in [[j, i, k], [i, k, j], [k, j, i], [j, k, i], [k, i, j]] {
            worst = worst.max((v - t.get(&p)).abs());
        }
    }
    Ok(worst)
}

pub fn codazzi_record(pg: &PointGeometry, tol: &Tolerances) -> VerificationRecord {
    match codazzi_residual(pg) {
        Ok(res) => {
            let scale = 1.0 + pg.nabla_h.as_ref().map_or(0.0, Tensor::max_abs);
            VerificationRecord::judged("codazzi", loc(pg), res, 0.0, res, tol.codazzi * scale)
        }
        Err(e) => VerificationRecord::failure("codazzi", loc(pg), e),
    }
}

/// Intrinsic against Gauss-equation curvature tensor, relative to `1 + max|R|`.
pub fn gauss_record(pg: &PointGeometry, tol: &Tolerances) -> VerificationRecord {
    let Some(riem) = &pg.riemann else {
        return VerificationRecord::failure("gauss", loc(pg), Error::JetOrder { have: 2, need: 4 });
    };
    let diff = riem
        .as_slice()
        .iter()
        .zip(pg.riemann_gauss.as_slice())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let scale = 1.0 + pg.riemann_gauss.max_abs();
    VerificationRecord::judged("gauss", loc(pg), diff, 0.0, diff, tol.gauss * scale)
}

/// `K_{ij} = c + λ_i λ_j` on eigenplanes.
pub fn sectional_record(pg: &PointGeometry, tol: &Tolerances) -> VerificationRecord {
    let n = pg.n;
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let want = pg.c + pg.lambda[i] * pg.lambda[j];
                worst = worst.max((pg.sectional[(i, j)] - want).abs());
                scale = scale.max(1.0 + want.abs());
            }
        }
    }
    VerificationRecord::judged("sectional", loc(pg), worst, 0.0, worst, tol.sectional * scale)
}

/// `σ_r` of the principal curvatures against `σ_r` from `det(A + tI)`.
pub fn sigma_paths_record(pg: &PointGeometry, tol: &Tolerances) -> VerificationRecord {
    let eig = elementary_all(&pg.lambda);
    let abs = elementary_all(&LambdaVec::new(pg.lambda.iter().map(|x| x.abs()).collect()).expect("finite"));
    let mut worst = 0.0f64;
    for r in 0..=pg.n {
        let d = (eig.get(r) - pg.sigma_char.get(r)).abs() / (1.0 + abs.get(r));
        worst = worst.max(d);
    }
    VerificationRecord::judged("sigma_paths", loc(pg), worst, 0.0, worst, tol.sigma_paths)
}

/// `n Hess H(e_j, e_j) = Σ_k h_{kkjj}` for every `j`.
pub fn hess_trace_record(pg: &PointGeometry, tol: &Tolerances) -> VerificationRecord {
    let (Some(hess), Some(d2)) = (&pg.hess_h, &pg.nabla2_h) else {
        return VerificationRecord::failure("hess_trace", loc(pg), Error::JetOrder { have: 2, need: 4 });
    };
    let n = pg.n;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for j in 0..n {
        let tr: f64 = (0..n).map(|k| d2.get(&[k, k, j, j])).sum();
        worst = worst.max((n as f64 * hess[(j, j)] - tr).abs());
        for k in 0..n {
            scale = scale.max(d2.get(&[k, k, j, j]).abs());
        }
    }
    VerificationRecord::judged("hess_trace", loc(pg), worst, 0.0, worst, tol.hess_trace * (1.0 + scale))
}

/// Geodesic spheres of radius `t` about the model origin: every principal
/// curvature at every grid point against `μ_c(t)`.
pub fn geodesic_sphere_check(c: f64, t: f64, n: usize, res: usize, tol: &Tolerances) -> VerificationRecord {
    let id = format!("spaceform.geodesic_sphere.c{c}.t{t}.n{n}");
    let mu = match sphere_curvature(c, t) {
        Ok(mu) => mu,
        Err(e) => return VerificationRecord::failure(id, Location::Global, e),
    };
    let mut worst = WorstCase::new(id.clone());
    let chart = match ImmersionChart::new(Family::Sphere { n, t }, c) {
        Ok(ch) => ch,
        Err(e) => return VerificationRecord::failure(id, Location::Global, e),
    };
    for u in chart.grid(&vec![res; n]).expect("bounded chart") {
        match point_geometry(&chart, &u, Depth::Shape, tol) {
            Ok(pg) => {
                let far = pg.lambda.iter().copied().max_by(|a, b| (a - mu).abs().total_cmp(&(b - mu).abs())).unwrap_or(mu);
                worst.push(VerificationRecord::identity("", Location::Chart(u), far, mu, tol.geodesic_sphere));
            }
            Err(e) => worst.push(VerificationRecord::failure("", Location::Chart(u), e)),
        }
    }
    worst.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaceform::sphere_curvature;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn tensor_frame_rotation_round_trips() {
        let mut t = Tensor::zeros(2, 3);
        for (k, idx) in indices(2, 3).enumerate() {
            t.set(&idx, k as f64 + 0.5);
        }
        let (s, c) = (libm::sin(0.4), libm::cos(0.4));
        let q = Mat::from_rows(2, 2, vec![c, -s, s, c]);
        let back = t.in_frame(&q).in_frame(&q.transpose());
        for (a, b) in back.as_slice().iter().zip(t.as_slice()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_sphere_has_identity_shape_operator() {
        let chart = ImmersionChart::new(Family::Sphere { n: 2, t: 1.0 }, 0.0).unwrap();
        let u = [1.2, 0.4];
        let (g, h, xi) = fundamental_forms(&chart, &u).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((g[(i, j)] - h[(i, j)]).abs() < 1e-14);
            }
        }
        // inward normal
        let x = chart.map(&u);
        let d: f64 = x.iter().zip(&xi).map(|(a, b)| a * b).sum();
        assert!((d + 1.0).abs() < 1e-14);
    }

    #[test]
    fn cylinder_principal_curvatures() {
        let chart = ImmersionChart::new(Family::Cylinder { n: 3, radius: 2.0, half_length: 1.0 }, 0.0).unwrap();
        let pg = point_geometry(&chart, &[0.3, 0.1, -0.4], Depth::Full, &tol()).unwrap();
        assert!(pg.lambda[0].abs() < 1e-14 && pg.lambda[1].abs() < 1e-14);
        assert!((pg.lambda[2] - 0.5).abs() < 1e-14);
        assert!(commutation_residual(&pg).unwrap() <= 1e-8);
    }

    #[test]
    fn ellipsoid_axis_point_curvatures() {
        let (a, b, c) = (1.0, 1.1, 1.25);
        let chart = ImmersionChart::new(Family::Ellipsoid { axes: vec![a, b, c] }, 0.0).unwrap();
        // the base point maps to (0, b, 0)
        let u = chart.family().base_point();
        let x = chart.map(&u);
        assert!(x[0].abs() < 1e-15 && (x[1] - b).abs() < 1e-15 && x[2].abs() < 1e-15);
        let pg = point_geometry(&chart, &u, Depth::Shape, &tol()).unwrap();
        let mut want = [b / (a * a), b / (c * c)];
        want.sort_by(f64::total_cmp);
        assert!((pg.lambda[0] - want[0]).abs() < 1e-13);
        assert!((pg.lambda[1] - want[1]).abs() < 1e-13);
    }

    #[test]
    fn geodesic_spheres_in_all_models() {
        for &c in &[0.0, 1.0, -1.0] {
            for &t in &[0.5, 1.0, 1.5] {
                let chart = ImmersionChart::new(Family::Sphere { n: 3, t }, c).unwrap();
                let pg = point_geometry(&chart, &[1.0, 2.0, 0.7], Depth::Full, &tol()).unwrap();
                let mu = sphere_curvature(c, t).unwrap();
                for l in pg.lambda.iter() {
                    assert!((l - mu).abs() < 1e-10, "c={c} t={t} λ={l} μ={mu}");
                }
                assert_eq!(pg.frame, FrameStatus::Umbilic);
                assert!(pg.nabla_h.as_ref().unwrap().max_abs() < 1e-9);
                let rec = walter_record(&pg, 2, &tol());
                assert!(rec.passed() && rec.lhs.abs() < 1e-8, "{rec:?}");
            }
        }
    }

    #[test]
    fn torus_gauss_curvature() {
        let (major, minor) = (2.0, 0.7);
        let chart = ImmersionChart::new(Family::Torus { major, minor }, 0.0).unwrap();
        for &v in &[-2.5, -1.0, 0.0, 0.4, 1.9, 3.0] {
            let pg = point_geometry(&chart, &[0.3, v], Depth::Full, &tol()).unwrap();
            let want = libm::cos(v) / (minor * (major + minor * libm::cos(v)));
            let k = pg.riemann.as_ref().unwrap().get(&[0, 1, 0, 1]);
            assert!((k - want).abs() < 1e-10, "v={v}: {k} vs {want}");
            assert!(commutation_residual(&pg).unwrap() < 1e-8);
            assert!(codazzi_residual(&pg).unwrap() < 1e-10);
        }
    }

    #[test]
    fn curvature_relation_example() {
        // λ = (1, 2, 3), c = 0: 36 - 14 - 6·(11/3) = 0
        let n = 3.0;
        let h = 2.0;
        let h2 = 11.0 / 3.0;
        assert_eq!(n * n * h * h - 14.0 - n * (n - 1.0) * h2, 0.0);
        let chart = ImmersionChart::new(Family::Ellipsoid { axes: vec![1.0, 1.3, 0.8, 1.1] }, 0.0).unwrap();
        let pg = point_geometry(&chart, &[1.0, 1.7, 0.3], Depth::Full, &tol()).unwrap();
        assert!(curvature_relation_record(&pg, &tol()).passed());
    }

    #[test]
    fn laplacian_of_height_on_unit_sphere() {
        let chart = ImmersionChart::new(Family::Sphere { n: 2, t: 1.0 }, 0.0).unwrap();
        let u = [1.1, 0.6];
        let z = chart.map(&u)[2];
        let lap = laplace_beltrami(&chart, &u, |ch, x| ch.map(x)[2]).unwrap();
        assert!((lap + 2.0 * z).abs() < 1e-12);
        assert_eq!(laplace_beltrami(&chart, &u, |_, _| Jet::constant(3.0)).unwrap(), 0.0);
    }

    #[test]
    fn walter_on_ellipsoid() {
        let chart = ImmersionChart::new(Family::Ellipsoid { axes: vec![1.0, 1.1, 1.25] }, 0.0).unwrap();
        for u in [[1.0, 0.5], [2.0, -1.3], [1.4, 2.2]] {
            let pg = point_geometry(&chart, &u, Depth::Full, &tol()).unwrap();
            assert_eq!(pg.frame, FrameStatus::Distinct);
            for r in 1..=2 {
                let rec = walter_record(&pg, r, &tol());
                assert!(rec.passed(), "{rec:?}");
                assert!(gradient_identity_record(&pg, r, 1, &tol()).passed());
            }
            assert!(hess_trace_record(&pg, &tol()).passed());
            assert!(gauss_record(&pg, &tol()).passed());
            assert!(sectional_record(&pg, &tol()).passed());
            assert!(sigma_paths_record(&pg, &tol()).passed());
        }
    }

    #[test]
    fn orientation_flip() {
        let chart = ImmersionChart::new(Family::Bump { n: 2, t: 1.0, eps: 0.1 }, -1.0).unwrap();
        let flip = chart.flipped();
        let u = [1.3, 0.8];
        let a = point_geometry(&chart, &u, Depth::Full, &tol()).unwrap();
        let b = point_geometry(&flip, &u, Depth::Full, &tol()).unwrap();
        for i in 0..2 {
            assert!((a.lambda[i] + b.lambda[1 - i]).abs() < 1e-12);
        }
        let (la, ra) = walter_sides(&a, 2).unwrap();
        let (lb, rb) = walter_sides(&b, 2).unwrap();
        assert!((la - lb).abs() < 1e-9 && (ra - rb).abs() < 1e-9);
        let (la, _) = walter_sides(&a, 1).unwrap();
        let (lb, _) = walter_sides(&b, 1).unwrap();
        assert!((la + lb).abs() < 1e-9);
    }

    #[test]
    fn degenerate_points_are_skipped() {
        // cylinder in R^4: two zero principal curvatures
        let chart = ImmersionChart::new(Family::Cylinder { n: 3, radius: 1.0, half_length: 1.0 }, 0.0).unwrap();
        let pg = point_geometry(&chart, &[0.1, 0.2, 0.3], Depth::Full, &tol()).unwrap();
        assert_eq!(pg.frame, FrameStatus::Degenerate);
        let rec = walter_record(&pg, 2, &tol());
        assert_eq!(rec.verdict, crate::Verdict::Skipped);
        assert_eq!(rec.note, "skipped-degenerate");
    }

    #[test]
    fn rejects_bad_inputs() {
        let chart = ImmersionChart::new(Family::Sphere { n: 2, t: 1.0 }, 0.0).unwrap();
        assert!(walter_residual(&chart, &[1.0, 0.0], 3, &tol()).is_err());
        assert!(chart.jet_forms(&[1.0], 4).is_err());
        // the pole of the hyperspherical chart is not an immersion point
        assert_eq!(chart.jet_forms(&[0.0, 0.3], 4).unwrap_err(), Error::DegenerateMetric);
        let shape = point_geometry(&chart, &[1.0, 0.0], Depth::Shape, &tol()).unwrap();
        assert!(walter_sides(&shape, 1).is_err());
    }
}
