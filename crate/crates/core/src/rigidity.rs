//! Grid scans that walk through the umbilicity argument on a chart family.
//!
//! The supremum arguments of the continuous proof are replaced by exhaustive search
//! over a tensor grid on the (compact) chart domain. Every report carries that
//! caveat, together with the truncation caveat for families that are patches of
//! complete non-compact hypersurfaces.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cones::{in_garding_cone, quadratic_form_sides};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::hypersurface::{gradient_identity_record, point_geometry, Depth, FrameStatus, ImmersionChart, PointGeometry};
use crate::record::{Location, VerificationRecord, WorstCase};
use crate::spaceform::alpha_c;
use crate::tolerance::Tolerances;

/// Minimum grid resolution per chart axis.
pub const MIN_GRID: usize = 8;

/// Printed into every report.
pub const GRID_CAVEAT: &str =
    "suprema and infima are taken over a finite grid on a compact chart domain, not over the whole hypersurface";

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub family: Family,
    pub c: f64,
    pub r: usize,
    pub grid: Vec<usize>,
    pub tol: Tolerances,
    pub seed: u64,
}

impl ScanConfig {
    pub fn new(family: Family, c: f64, r: usize, grid: Vec<usize>) -> Self {
        ScanConfig { family, c, r, grid, tol: Tolerances::default(), seed: 0 }
    }

    /// Checks the configuration and builds the chart.
    pub fn chart(&self) -> Result<ImmersionChart> {
        let chart = ImmersionChart::new(self.family.clone(), self.c)?;
        let n = chart.n();
        if self.grid.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.grid.len() });
        }
        if let Some(&g) = self.grid.iter().find(|&&g| g < MIN_GRID) {
            return Err(Error::InvalidParameter(format!("grid resolution {g} is below {MIN_GRID}")));
        }
        if self.r < 1 || self.r > n {
            return Err(Error::OrderOutOfRange { r: self.r, lo: 1, hi: n });
        }
        if !chart.is_bounded() {
            return Err(Error::Unbounded);
        }
        Ok(chart)
    }
}

/// Geometry of every grid point of a configuration.
#[derive(Debug, Clone)]
pub struct GridScan {
    pub cfg: ScanConfig,
    pub chart: ImmersionChart,
    pub depth: Depth,
    pub points: Vec<PointGeometry>,
    /// One failure record per grid point whose geometry could not be evaluated.
    pub failures: Vec<VerificationRecord>,
}

impl GridScan {
    /// Evaluates the whole grid sequentially.
    pub fn evaluate(cfg: &ScanConfig, depth: Depth) -> Result<GridScan> {
        let chart = cfg.chart()?;
        let grid = chart.grid(&cfg.grid)?;
        let results = grid.iter().map(|u| point_geometry(&chart, u, depth, &cfg.tol)).collect();
        Ok(Self::from_results(cfg, chart, depth, &grid, results))
    }

    /// Assembles a scan from per-point results computed elsewhere (in grid order).
    pub fn from_results(
        cfg: &ScanConfig,
        chart: ImmersionChart,
        depth: Depth,
        grid: &[Vec<f64>],
        results: Vec<Result<PointGeometry>>,
    ) -> GridScan {
        let mut points = Vec::with_capacity(results.len());
        let mut failures = Vec::new();
        for (u, res) in grid.iter().zip(results) {
            match res {
                Ok(pg) => points.push(pg),
                Err(e) => failures.push(VerificationRecord::failure("rigidity.point_evaluation", Location::Chart(u.clone()), e)),
            }
        }
        GridScan { cfg: cfg.clone(), chart, depth, points, failures }
    }
}

/// Outcome of the elliptic-point search.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticScan {
    pub found: bool,
    pub best_point: Vec<f64>,
    /// `max(λ_1 - α_c, -λ_n - α_c)` at the best point: positive when the second
    /// fundamental form is definite with margin `α_c` for one of the two normals.
    pub margin: f64,
    /// Largest distance of a grid image from the model's origin.
    pub max_distance: f64,
    pub records: Vec<VerificationRecord>,
}

fn elliptic_margin(pg: &PointGeometry, alpha: f64) -> f64 {
    let n = pg.n;
    (pg.lambda[0] - alpha).max(-pg.lambda[n - 1] - alpha)
}

/// Searches the grid for a point whose principal curvatures all exceed `α_c`.
pub fn elliptic_point_scan(scan: &GridScan) -> EllipticScan {
    let alpha = alpha_c(scan.cfg.c);
    let mut best = f64::NEG_INFINITY;
    let mut best_point = Vec::new();
    for pg in &scan.points {
        let m = elliptic_margin(pg, alpha);
        if m > best {
            best = m;
            best_point = pg.u.clone();
        }
    }
    let space = scan.chart.space();
    let origin = space.origin();
    let mut max_distance = 0.0f64;
    for pg in &scan.points {
        let x = scan.chart.map(&pg.u);
        if let Ok(p) = space.point(x) {
            if let Ok(d) = space.distance(&origin, &p) {
                max_distance = max_distance.max(d);
            }
        }
    }
    let found = best > 0.0;
    let mut records = Vec::new();
    let expected = !matches!(scan.cfg.family, Family::Cylinder { .. });
    let mut note = format!("best margin {best:.6e}; {GRID_CAVEAT}");
    if scan.cfg.c > 0.0 {
        let limit = core::f64::consts::FRAC_PI_2 / libm::sqrt(scan.cfg.c);
        if max_distance >= limit {
            note = format!("{note}; image leaves the ball of radius π/(2√c) (max distance {max_distance:.6})");
        }
    }
    let loc = if best_point.is_empty() { Location::Global } else { Location::Chart(best_point.clone()) };
    records.push(
        VerificationRecord::identity(
            "rigidity.elliptic_point",
            loc.clone(),
            found as u8 as f64,
            expected as u8 as f64,
            0.0,
        )
        .with_note(note),
    );
    if let Family::Sphere { t, .. } = scan.cfg.family {
        if let Ok(mu) = crate::spaceform::sphere_curvature(scan.cfg.c, t) {
            let want = mu.abs() - alpha;
            records.push(VerificationRecord::identity(
                "rigidity.elliptic_margin",
                loc,
                best,
                want,
                scan.cfg.tol.geodesic_sphere,
            ));
        }
    }
    EllipticScan { found, best_point, margin: best, max_distance, records }
}

/// Cone membership of every grid point, for every order `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeScan {
    /// `membership[p][k]`: point `p` lies in `Γ_{k+1}`.
    pub membership: Vec<Vec<bool>>,
    pub records: Vec<VerificationRecord>,
}

/// Classifies each principal-curvature vector by the cones `Γ_1 ⊃ … ⊃ Γ_n`.
/// Points with all `λ_i > 0` must belong to every cone.
pub fn cone_membership_scan(scan: &GridScan) -> ConeScan {
    let tol = &scan.cfg.tol;
    let n = scan.chart.n();
    let mut membership = Vec::with_capacity(scan.points.len());
    let mut inside = alloc::vec![0u64; n + 1];
    let mut positive = 0u64;
    let mut violations = alloc::vec![0u64; n + 1];
    let mut first = alloc::vec![None; n + 1];
    for pg in &scan.points {
        let all_pos = pg.lambda.iter().all(|&l| l > tol.root_boundary * (1.0 + pg.lambda.max_abs()));
        positive += all_pos as u64;
        let row: Vec<bool> = (1..=n)
            .map(|k| in_garding_cone(k, &pg.lambda, tol).map(|rep| rep.in_cone).unwrap_or(false))
            .collect();
        for k in 1..=n {
            if row[k - 1] {
                inside[k] += 1;
            } else if all_pos {
                violations[k] += 1;
                first[k].get_or_insert_with(|| pg.u.clone());
            }
        }
        membership.push(row);
    }
    let total = scan.points.len();
    let records = (1..=n)
        .map(|k| {
            let loc = first[k].clone().map(Location::Chart).unwrap_or(Location::Global);
            VerificationRecord::identity(format!("rigidity.cone_membership.r{k}"), loc, violations[k] as f64, 0.0, 0.0)
                .with_note(format!(
                    "{} of {total} points in Γ_{k}; {positive} points with all λ_i > 0",
                    inside[k]
                ))
        })
        .collect();
    ConeScan { membership, records }
}

/// Quadratic-form step of the argument at every grid point with `λ ∈ Γ_r`:
/// `σ_r Σ_{ij} h_{iik} h_{jjk} ∂²σ_r/∂x_i∂x_j ≤ ((r-1)/r) (Σ_j h_{jjk} ∂σ_r/∂x_j)²`
/// for every `k`, plus the gradient identity for the inner sum.
pub fn proof_chain_check(scan: &GridScan) -> Vec<VerificationRecord> {
    let cfg = &scan.cfg;
    let tol = &cfg.tol;
    let r = cfg.r;
    let n = scan.chart.n();
    let mut chain = WorstCase::new(format!("rigidity.proof_chain.r{r}"));
    let mut grad = WorstCase::new(format!("rigidity.proof_chain_gradient.r{r}"));
    let (mut outside, mut degenerate, mut used) = (0u64, 0u64, 0u64);
    let mut out = Vec::new();
    for pg in &scan.points {
        let Some(nabla) = &pg.nabla_h else {
            out.push(VerificationRecord::failure(
                format!("rigidity.proof_chain.r{r}"),
                Location::Chart(pg.u.clone()),
                Error::JetOrder { have: 2, need: 3 },
            ));
            break;
        };
        let rep = in_garding_cone(r, &pg.lambda, tol);
        if !matches!(rep, Ok(ref c) if c.in_cone && !c.boundary) {
            outside += 1;
            continue;
        }
        if pg.frame == FrameStatus::Degenerate {
            degenerate += 1;
            continue;
        }
        used += 1;
        for k in 0..n {
            let y: Vec<f64> = (0..n).map(|j| nabla.get(&[j, j, k])).collect();
            let (lhs, rhs) = quadratic_form_sides(r, &pg.lambda, &y);
            chain.push(VerificationRecord::at_most(
                "",
                Location::Chart(pg.u.clone()),
                lhs,
                rhs,
                tol.proof_chain * rhs.abs().max(1.0),
            ));
            grad.push(gradient_identity_record(pg, r, k, tol));
        }
    }
    let note = format!("{used} points used, {outside} outside Γ_{r}, {degenerate} degenerate; {GRID_CAVEAT}");
    let mut a = chain.finish();
    a.note = format!("{}; {note}", a.note);
    out.push(a);
    out.push(grad.finish());
    out
}

/// Mean, population standard deviation and extremes of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: impl Iterator<Item = f64> + Clone) -> Stats {
        let count = values.clone().count().max(1) as f64;
        let mean = values.clone().sum::<f64>() / count;
        let var = values.clone().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count;
        let (min, max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        Stats { mean, stddev: libm::sqrt(var), min, max }
    }

    pub fn range(&self) -> f64 {
        self.max - self.min
    }
}

/// Per-point data kept in a [`RigidityReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub u: Vec<f64>,
    pub lambda: Vec<f64>,
    pub h_list: Vec<f64>,
    /// Membership in `Γ_1, …, Γ_n`.
    pub in_cone: Vec<bool>,
    /// `λ_n - λ_1`.
    pub deficit: f64,
    pub frame: FrameStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityReport {
    pub tag: String,
    pub c: f64,
    pub r: usize,
    pub grid: Vec<usize>,
    pub points: Vec<PointSummary>,
    pub min_lambda_min: f64,
    pub h_stats: Stats,
    pub hr_stats: Stats,
    pub max_deficit: f64,
    pub elliptic_point_found: bool,
    pub elliptic_margin: f64,
    pub rigid: bool,
    pub records: Vec<VerificationRecord>,
    pub caveats: Vec<String>,
}

impl RigidityReport {
    pub fn verdict(&self) -> &'static str {
        if self.rigid {
            "RIGID"
        } else {
            "NOT RIGID"
        }
    }

    /// Recomputes the aggregates from the per-point data and compares.
    pub fn is_consistent(&self) -> bool {
        let min_l = self.points.iter().map(|p| p.lambda[0]).fold(f64::INFINITY, f64::min);
        let max_d = self.points.iter().map(|p| p.deficit).fold(0.0, f64::max);
        let h = Stats::of(self.points.iter().map(|p| p.h_list[1]));
        let hr = Stats::of(self.points.iter().map(|p| p.h_list[self.r]));
        min_l == self.min_lambda_min && max_d == self.max_deficit && h == self.h_stats && hr == self.hr_stats
    }
}

/// Umbilicity deficit, `H` and `H_r` statistics and the rigidity verdict, with
/// the theorem-consistency and control checks that apply to the family.
pub fn umbilicity_certificate(scan: &GridScan) -> Result<RigidityReport> {
    let cfg = &scan.cfg;
    let tol = &cfg.tol;
    let r = cfg.r;
    let n = scan.chart.n();
    if r < 2 {
        return Err(Error::OrderOutOfRange { r, lo: 2, hi: n });
    }
    let cones = cone_membership_scan(scan);
    let points: Vec<PointSummary> = scan
        .points
        .iter()
        .zip(cones.membership)
        .map(|(pg, in_cone)| PointSummary {
            u: pg.u.clone(),
            lambda: pg.lambda.to_vec(),
            h_list: pg.h_list.clone(),
            in_cone,
            deficit: pg.lambda[n - 1] - pg.lambda[0],
            frame: pg.frame,
        })
        .collect();
    let min_lambda_min = points.iter().map(|p| p.lambda[0]).fold(f64::INFINITY, f64::min);
    let max_deficit = points.iter().map(|p| p.deficit).fold(0.0, f64::max);
    let worst_u = points
        .iter()
        .max_by(|a, b| a.deficit.total_cmp(&b.deficit))
        .map(|p| Location::Chart(p.u.clone()))
        .unwrap_or(Location::Global);
    let h_stats = Stats::of(points.iter().map(|p| p.h_list[1]));
    let hr_stats = Stats::of(points.iter().map(|p| p.h_list[r]));
    let rigid = !points.is_empty() && max_deficit <= tol.umbilic;
    let elliptic = elliptic_point_scan(scan);

    let mut records = scan.failures.clone();
    records.extend(elliptic.records.iter().cloned());
    records.extend(cones.records);
    let verdict = if rigid { "RIGID" } else { "NOT RIGID" };
    records.push(
        VerificationRecord::judged("rigidity.umbilicity_deficit", worst_u.clone(), max_deficit, tol.umbilic, max_deficit, f64::MAX)
            .with_note(format!(
                "verdict {verdict} at tol_umb = {:e}; range(H) = {:.6e}, range(H_{r}) = {:.6e}",
                tol.umbilic,
                h_stats.range(),
                hr_stats.range()
            )),
    );
    let constant = h_stats.range() <= tol.constancy && hr_stats.range() <= tol.constancy;
    let closed = !matches!(cfg.family, Family::Cylinder { .. });
    if !closed {
        // constant H and H_r without umbilicity: the patch is not compact
        records.push(VerificationRecord::skipped(
            "rigidity.theorem_consistency",
            Location::Global,
            "truncated patch of a non-compact hypersurface; not a theorem instance",
        ));
    } else if constant {
        records.push(VerificationRecord::at_most(
            "rigidity.theorem_consistency",
            worst_u.clone(),
            max_deficit,
            0.0,
            tol.theorem_deficit,
        ));
    } else {
        records.push(VerificationRecord::skipped(
            "rigidity.theorem_consistency",
            Location::Global,
            format!("hypotheses not met: range(H) = {:.3e}, range(H_{r}) = {:.3e}", h_stats.range(), hr_stats.range()),
        ));
    }
    match cfg.family {
        Family::Sphere { .. } => {
            records.push(VerificationRecord::at_most("rigidity.sphere_control", worst_u, max_deficit, 0.0, tol.umbilic));
            records.push(VerificationRecord::at_most(
                "rigidity.sphere_control_range_h",
                Location::Global,
                h_stats.range(),
                0.0,
                tol.constancy,
            ));
            records.push(VerificationRecord::at_most(
                format!("rigidity.sphere_control_range_h{r}"),
                Location::Global,
                hr_stats.range(),
                0.0,
                tol.constancy,
            ));
        }
        Family::Ellipsoid { .. } => {
            records.push(
                VerificationRecord::at_most(
                    "rigidity.negative_control",
                    Location::Global,
                    tol.negative_control,
                    h_stats.range(),
                    0.0,
                )
                .with_note("range(H) must exceed the negative-control threshold"),
            );
        }
        _ => {}
    }
    let mut caveats = alloc::vec![String::from(GRID_CAVEAT)];
    if let Family::Cylinder { .. } = cfg.family {
        caveats.push(String::from("truncated chart of a complete non-compact hypersurface"));
    }
    Ok(RigidityReport {
        tag: scan.chart.tag(),
        c: cfg.c,
        r,
        grid: cfg.grid.clone(),
        points,
        min_lambda_min,
        h_stats,
        hr_stats,
        max_deficit,
        elliptic_point_found: elliptic.found,
        elliptic_margin: elliptic.margin,
        rigid,
        records,
        caveats,
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| libm::log(*v)).collect();
    let ly: Vec<f64> = y.iter().map(|v| libm::log(*v)).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
