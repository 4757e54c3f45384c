//! The verification suites behind `--suite`.
//!
//! Each suite returns its records in a fixed order. Work is spread over rayon's
//! pool, but results are always collected back in submission order, so the
//! record list does not depend on the thread count.

use std::f64::consts::PI;

use rayon::prelude::*;
use roundsphere_core::cones::{
    concavity_check, cone_nesting_check, garding_check, hyperbolicity_check, membership_equivalence,
    midpoint_convexity_check, wr_fd_check,
};
use roundsphere_core::hypersurface::*;
use roundsphere_core::rigidity::{proof_chain_check, umbilicity_certificate, GridScan, ScanConfig, GRID_CAVEAT};
use roundsphere_core::spaceform::model_checks;
use roundsphere_core::symfun::identity_checks;
use roundsphere_core::{Location, Result, VerificationRecord};

use crate::config::{RunConfig, Suite};

/// Largest dimension probed by the cone suite (the hyperbolicity sweep goes to 8).
pub const CONE_MAX_DIM: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct RigiditySummary {
    pub tag: String,
    pub c: f64,
    pub r: usize,
    pub verdict: String,
    pub max_deficit: f64,
    pub min_lambda_min: f64,
    pub range_h: f64,
    pub range_hr: f64,
    pub stddev_h: f64,
    pub stddev_hr: f64,
    pub elliptic_point_found: bool,
    pub elliptic_margin: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOutput {
    pub records: Vec<VerificationRecord>,
    pub rigidity: Option<RigiditySummary>,
    pub caveats: Vec<String>,
}

type Task<'a> = Box<dyn Fn() -> Vec<VerificationRecord> + Send + Sync + 'a>;

fn run_tasks(tasks: Vec<Task<'_>>) -> Vec<VerificationRecord> {
    tasks.par_iter().map(|t| t()).collect::<Vec<_>>().into_iter().flatten().collect()
}

pub fn symfun_suite(cfg: &RunConfig) -> Vec<VerificationRecord> {
    identity_checks(cfg.samples, cfg.seed, &cfg.tolerances)
}

pub fn cones_suite(cfg: &RunConfig) -> Vec<VerificationRecord> {
    let (s, seed, tol) = (cfg.samples, cfg.seed, &cfg.tolerances);
    let mut tasks: Vec<Task> = vec![Box::new(move || hyperbolicity_check(s, 8, seed, tol))];
    for n in 2..=CONE_MAX_DIM {
        tasks.push(Box::new(move || cone_nesting_check(s, n, seed, tol)));
        tasks.push(Box::new(move || membership_equivalence(s, n, seed, tol)));
    }
    for n in 2..=CONE_MAX_DIM {
        for r in 1..=n {
            tasks.push(Box::new(move || garding_check(s, n, r, seed, tol)));
            tasks.push(Box::new(move || vec![concavity_check(s, n, r, seed, tol), wr_fd_check(s, n, r, seed, tol)]));
            tasks.push(Box::new(move || vec![midpoint_convexity_check(s, n, r, seed, tol)]));
        }
    }
    run_tasks(tasks)
}

/// Model curvatures exercised by the space-form suite: the three normalized
/// models plus the configured one.
fn curvatures(cfg: &RunConfig) -> Vec<f64> {
    let mut cs = vec![0.0, 1.0, -1.0];
    if !cs.contains(&cfg.c) {
        cs.push(cfg.c);
    }
    cs
}

pub fn spaceform_suite(cfg: &RunConfig) -> Vec<VerificationRecord> {
    let tol = &cfg.tolerances;
    let cs = curvatures(cfg);
    let mut tasks: Vec<Task> = vec![Box::new(|| model_checks(cfg.samples, &cs, cfg.seed, tol))];
    for &c in &cs {
        for t in [0.5, 1.0, 1.5] {
            if c > 0.0 && t >= PI / (2.0 * c.sqrt()) {
                continue;
            }
            for n in 2..=3 {
                tasks.push(Box::new(move || vec![geodesic_sphere_check(c, t, n, 8, tol)]));
            }
        }
    }
    run_tasks(tasks)
}

/// Evaluates a scan with the grid points spread over the thread pool.
pub fn parallel_scan(scan_cfg: &ScanConfig, depth: Depth) -> Result<GridScan> {
    let chart = scan_cfg.chart()?;
    let grid = chart.grid(&scan_cfg.grid)?;
    let results = grid.par_iter().map(|u| point_geometry(&chart, u, depth, &scan_cfg.tol)).collect();
    Ok(GridScan::from_results(scan_cfg, chart, depth, &grid, results))
}

fn scan_config(cfg: &RunConfig) -> ScanConfig {
    ScanConfig {
        family: cfg.family.clone(),
        c: cfg.c,
        r: cfg.r,
        grid: cfg.grid.clone(),
        tol: cfg.tolerances.clone(),
        seed: cfg.seed,
    }
}

fn point_records(pg: &PointGeometry, cfg: &RunConfig) -> Vec<VerificationRecord> {
    let tol = &cfg.tolerances;
    let n = pg.n;
    let mut out = Vec::new();
    for r in 1..=n {
        out.push(walter_record(pg, r, tol));
    }
    for r in 1..=n {
        for k in 0..n {
            out.push(gradient_identity_record(pg, r, k, tol));
        }
    }
    out.extend([
        codazzi_record(pg, tol),
        commutation_record(pg, tol),
        gauss_record(pg, tol),
        sectional_record(pg, tol),
        curvature_relation_record(pg, tol),
        sigma_paths_record(pg, tol),
        hess_trace_record(pg, tol),
    ]);
    out
}

/// Walter's formula and the structure equations at every grid point of the
/// configured family, for every admissible `r`.
pub fn walter_suite(cfg: &RunConfig) -> Vec<VerificationRecord> {
    let scan = match parallel_scan(&scan_config(cfg), Depth::Full) {
        Ok(s) => s,
        Err(e) => return vec![VerificationRecord::failure("walter.scan", Location::Global, e)],
    };
    let mut records = scan.failures.clone();
    let per_point: Vec<Vec<VerificationRecord>> = scan.points.par_iter().map(|pg| point_records(pg, cfg)).collect();
    let n = scan.chart.n();
    for r in 1..=n {
        let id = format!("walter.r{r}");
        let (mut worst, mut used, mut skipped) = (0.0f64, 0usize, 0usize);
        for rec in per_point.iter().flatten().filter(|x| x.check_id == id) {
            if rec.verdict == roundsphere_core::Verdict::Skipped {
                skipped += 1;
            } else {
                used += 1;
                let rel = (rec.lhs - rec.rhs).abs() / (1.0 + rec.lhs.abs());
                worst = if rel.is_nan() { f64::NAN } else { worst.max(rel) };
            }
        }
        records.push(
            VerificationRecord::at_most(format!("walter.max_relative_residual.r{r}"), Location::Global, worst, 0.0, cfg.tolerances.walter)
                .with_note(format!("{used} points evaluated, {skipped} skipped-degenerate")),
        );
    }
    records.extend(per_point.into_iter().flatten());
    records
}

pub fn rigidity_suite(cfg: &RunConfig) -> (Vec<VerificationRecord>, Option<RigiditySummary>, Vec<String>) {
    let scan = match parallel_scan(&scan_config(cfg), Depth::Full) {
        Ok(s) => s,
        Err(e) => return (vec![VerificationRecord::failure("rigidity.scan", Location::Global, e)], None, vec![]),
    };
    let report = match umbilicity_certificate(&scan) {
        Ok(r) => r,
        Err(e) => return (vec![VerificationRecord::failure("rigidity.certificate", Location::Global, e)], None, vec![]),
    };
    let mut records = report.records.clone();
    records.extend(proof_chain_check(&scan));
    records.push(VerificationRecord::identity(
        "rigidity.report_consistency",
        Location::Global,
        if report.is_consistent() { 1.0 } else { 0.0 },
        1.0,
        0.0,
    ));
    let summary = RigiditySummary {
        tag: report.tag.clone(),
        c: report.c,
        r: report.r,
        verdict: report.verdict().to_string(),
        max_deficit: report.max_deficit,
        min_lambda_min: report.min_lambda_min,
        range_h: report.h_stats.range(),
        range_hr: report.hr_stats.range(),
        stddev_h: report.h_stats.stddev,
        stddev_hr: report.hr_stats.stddev,
        elliptic_point_found: report.elliptic_point_found,
        elliptic_margin: report.elliptic_margin,
        points: report.points.len(),
    };
    (records, Some(summary), report.caveats)
}

pub fn run_suite(cfg: &RunConfig) -> SuiteOutput {
    let mut out = SuiteOutput::default();
    let want = |s: Suite| cfg.suite == s || cfg.suite == Suite::All;
    if want(Suite::Symfun) {
        out.records.extend(symfun_suite(cfg));
    }
    if want(Suite::Cones) {
        out.records.extend(cones_suite(cfg));
    }
    if want(Suite::Spaceform) {
        out.records.extend(spaceform_suite(cfg));
    }
    if want(Suite::Walter) {
        out.records.extend(walter_suite(cfg));
        out.caveats.push(GRID_CAVEAT.to_string());
    }
    if want(Suite::Rigidity) {
        let (recs, summary, caveats) = rigidity_suite(cfg);
        out.records.extend(recs);
        out.rigidity = summary;
        for c in caveats {
            if !out.caveats.contains(&c) {
                out.caveats.push(c);
            }
        }
    }
    out
}
