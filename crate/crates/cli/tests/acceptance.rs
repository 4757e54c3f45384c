//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use roundsphere::suites::parallel_scan;
use roundsphere_core::cones::*;
use roundsphere_core::families::Family;
use roundsphere_core::hypersurface::*;
use roundsphere_core::rigidity::*;
use roundsphere_core::sampling::{sample_rng, uniform_vec};
use roundsphere_core::symfun::identity_checks;
use roundsphere_core::{Tolerances, VerificationRecord, Verdict};

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

/// Tally of a record list: every record must pass (skips allowed only where noted).
struct Tally {
    total: usize,
    failed: usize,
    skipped: usize,
    worst_ratio: f64,
    worst_id: String,
}

fn tally(recs: &[VerificationRecord]) -> Tally {
    let mut t = Tally { total: recs.len(), failed: 0, skipped: 0, worst_ratio: 0.0, worst_id: String::new() };
    for r in recs {
        match r.verdict {
            Verdict::Fail => t.failed += 1,
            Verdict::Skipped => t.skipped += 1,
            Verdict::Pass => {}
        }
        if r.verdict != Verdict::Skipped {
            let ratio = if r.tolerance > 0.0 { r.residual.abs() / r.tolerance } else if r.residual == 0.0 { 0.0 } else { f64::INFINITY };
            let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
            if ratio >= t.worst_ratio {
                t.worst_ratio = ratio;
                t.worst_id = r.check_id.clone();
            }
        }
    }
    t
}

impl Tally {
    fn describe(&self) -> String {
        format!(
            "{} records, {} failed, {} skipped, worst |residual|/tol = {:.2e} ({})",
            self.total, self.failed, self.skipped, self.worst_ratio, self.worst_id
        )
    }
}

fn first_failure(recs: &[VerificationRecord]) -> String {
    recs.iter().find(|r| r.failed()).map(|r| format!("; first failure: {} at {:?}: {}", r.check_id, r.location, r.note)).unwrap_or_default()
}

fn judge(recs: &[VerificationRecord], allow_skips: bool, limit: Option<(Duration, Duration)>) -> Outcome {
    let t = tally(recs);
    let mut pass = t.failed == 0 && t.total > 0 && (allow_skips || t.skipped == 0);
    let mut detail = t.describe() + &first_failure(recs);
    if let Some((took, max)) = limit {
        if took > max {
            pass = false;
            detail += &format!("; runtime {:.1} s exceeds {:.0} s", took.as_secs_f64(), max.as_secs_f64());
        }
    }
    Outcome { pass, detail }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

/// Parallel fan-out over a list of jobs, results in job order.
fn fan<T: Sync, F>(jobs: &[T], f: F) -> Vec<VerificationRecord>
where
    F: Fn(&T) -> Vec<VerificationRecord> + Sync + Send,
{
    jobs.par_iter().map(f).collect::<Vec<_>>().into_iter().flatten().collect()
}

fn c1_symfun() -> Outcome {
    let start = Instant::now();
    // 10^4 instances of each identity; dimensions cycle through 2..=8 inside
    let chunks: Vec<u64> = (0..8).collect();
    let recs = fan(&chunks, |&k| identity_checks(1250, SEED + k, &tol()));
    judge(&recs, false, Some((start.elapsed(), Duration::from_secs(10))))
}

fn c2_hyperbolicity() -> Outcome {
    let start = Instant::now();
    let chunks: Vec<u64> = (0..10).collect();
    let recs = fan(&chunks, |&k| hyperbolicity_check(10_000, 8, SEED + k, &tol()));
    judge(&recs, false, Some((start.elapsed(), Duration::from_secs(60))))
}

fn pairs(max_n: usize) -> Vec<(usize, usize)> {
    (2..=max_n).flat_map(|n| (1..=n).map(move |r| (n, r))).collect()
}

fn c3_garding() -> Outcome {
    let start = Instant::now();
    let recs = fan(&pairs(6), |&(n, r)| garding_check(10_000, n, r, SEED, &tol()));
    judge(&recs, false, Some((start.elapsed(), Duration::from_secs(60))))
}

fn c4_concavity() -> Outcome {
    let start = Instant::now();
    let recs = fan(&pairs(6), |&(n, r)| vec![concavity_check(10_000, n, r, SEED, &tol()), wr_fd_check(10_000, n, r, SEED, &tol())]);
    judge(&recs, false, Some((start.elapsed(), Duration::from_secs(60))))
}

fn c5_nesting() -> Outcome {
    let dims: Vec<usize> = (2..=6).collect();
    let mut recs = fan(&dims, |&n| cone_nesting_check(10_000, n, SEED, &tol()));
    recs.extend(fan(&pairs(6), |&(n, r)| vec![midpoint_convexity_check(2_000, n, r, SEED, &tol())]));
    judge(&recs, false, None)
}

/// Every built-in family in every model it lives in.
fn all_families() -> Vec<(Family, f64)> {
    let mut out = Vec::new();
    for c in [0.0, 1.0, -1.0] {
        for n in 2..=4 {
            out.push((Family::Sphere { n, t: 1.0 }, c));
        }
        for n in 2..=3 {
            out.push((Family::Bump { n, t: 1.0, eps: 0.05 }, c));
        }
    }
    out.push((Family::Ellipsoid { axes: vec![1.0, 1.1, 1.25] }, 0.0));
    out.push((Family::Ellipsoid { axes: vec![1.0, 1.1, 1.25, 1.4] }, 0.0));
    out.push((Family::Torus { major: 2.0, minor: 1.0 }, 0.0));
    out.push((Family::Cylinder { n: 2, radius: 0.8, half_length: 1.5 }, 0.0));
    out.push((Family::Cylinder { n: 3, radius: 0.8, half_length: 1.5 }, 0.0));
    out
}

fn random_points(chart: &ImmersionChart, count: usize, salt: u64) -> Vec<Vec<f64>> {
    (0..count as u64)
        .map(|i| {
            let mut rng = sample_rng(SEED, salt, i);
            chart.interior_point(&uniform_vec(&mut rng, chart.n(), 0.0, 1.0))
        })
        .collect()
}

fn per_point<F>(families: &[(Family, f64)], points: impl Fn(&ImmersionChart) -> Vec<Vec<f64>> + Sync, f: F) -> Vec<VerificationRecord>
where
    F: Fn(&PointGeometry) -> Vec<VerificationRecord> + Sync,
{
    let jobs: Vec<(ImmersionChart, Vec<f64>)> = families
        .iter()
        .flat_map(|(fam, c)| {
            let chart = ImmersionChart::new(fam.clone(), *c).expect("valid family");
            points(&chart).into_iter().map(move |u| (chart.clone(), u))
        })
        .collect();
    fan(&jobs, |(chart, u)| match point_geometry(chart, u, Depth::Full, &tol()) {
        Ok(pg) => f(&pg),
        Err(e) => vec![VerificationRecord::failure(format!("point.{}", chart.tag()), roundsphere_core::Location::Chart(u.clone()), e)],
    })
}

fn c6_curvature_relation() -> Outcome {
    let grid = |ch: &ImmersionChart| ch.grid(&vec![if ch.n() == 4 { 4 } else { 6 }; ch.n()]).expect("bounded");
    let recs = per_point(&all_families(), grid, |pg| vec![curvature_relation_record(pg, &tol())]);
    judge(&recs, false, None)
}

fn c7_geodesic_spheres() -> Outcome {
    let mut recs = Vec::new();
    for c in [0.0, 1.0, -1.0] {
        for t in [0.5, 1.0, 1.5] {
            if c > 0.0 && t >= PI / (2.0 * f64::sqrt(c)) {
                continue;
            }
            for n in 2..=3 {
                recs.push(geodesic_sphere_check(c, t, n, 8, &tol()));
            }
        }
    }
    judge(&recs, false, None)
}

fn walter_families() -> Vec<(Family, f64)> {
    let mut out = vec![
        (Family::Ellipsoid { axes: vec![1.0, 1.1, 1.25] }, 0.0),
        (Family::Ellipsoid { axes: vec![1.0, 1.1, 1.25, 1.4] }, 0.0),
    ];
    for c in [1.0, -1.0] {
        for n in 2..=3 {
            out.push((Family::Bump { n, t: 1.0, eps: 0.05 }, c));
        }
    }
    out
}

/// Walter's formula (or the gradient identity) at 100 random points per family;
/// each family must contribute at least 50 non-degenerate points.
fn walter_like(gradient: bool) -> Outcome {
    let start = Instant::now();
    let fams = walter_families();
    let mut recs = Vec::new();
    let mut counts = Vec::new();
    for (fam, c) in &fams {
        let rs = per_point(&[(fam.clone(), *c)], |ch| random_points(ch, 100, 0x5741), |pg| {
            let n = pg.n;
            if gradient {
                (1..=n).flat_map(|r| (0..n).map(move |k| (r, k))).map(|(r, k)| gradient_identity_record(pg, r, k, &tol())).collect()
            } else {
                (1..=n).map(|r| walter_record(pg, r, &tol())).collect()
            }
        });
        let n = fam.dim();
        let per_point_count = if gradient { n * n } else { n };
        let used = rs.iter().filter(|r| r.verdict != Verdict::Skipped).count() / per_point_count;
        counts.push(format!("{}:{}", ImmersionChart::new(fam.clone(), *c).unwrap().tag(), used));
        recs.push((used, rs));
    }
    let enough = recs.iter().all(|(used, _)| *used >= 50);
    let flat: Vec<VerificationRecord> = recs.into_iter().flat_map(|(_, r)| r).collect();
    let mut out = judge(&flat, true, Some((start.elapsed(), Duration::from_secs(300))));
    if !enough {
        out.pass = false;
    }
    out.detail += &format!("; non-degenerate points per family [{}]", counts.join(", "));
    out
}

fn c9_commutation_codazzi() -> Outcome {
    let recs = per_point(&all_families(), |ch| random_points(ch, 30, 0x4c32), |pg| vec![commutation_record(pg, &tol()), codazzi_record(pg, &tol())]);
    judge(&recs, false, None)
}

fn scan(family: Family, c: f64, r: usize, res: usize) -> GridScan {
    let n = family.dim();
    parallel_scan(&ScanConfig::new(family, c, r, vec![res; n]), Depth::Full).expect("valid scan")
}

fn c11_proof_chain() -> Outcome {
    let mut cases: Vec<(Family, f64, usize)> = vec![
        (Family::Ellipsoid { axes: vec![1.0, 1.1, 1.25, 1.4] }, 0.0, 16),
        (Family::Ellipsoid { axes: vec![1.0, 1.1, 1.25] }, 0.0, 16),
    ];
    for c in [0.0, 1.0, -1.0] {
        cases.push((Family::Sphere { n: 2, t: 1.0 }, c, 8));
        cases.push((Family::Sphere { n: 3, t: 1.0 }, c, 8));
        cases.push((Family::Bump { n: 2, t: 1.0, eps: 0.05 }, c, 16));
        cases.push((Family::Bump { n: 3, t: 1.0, eps: 0.05 }, c, 8));
    }
    let mut recs = Vec::new();
    let mut outside = 0usize;
    for (fam, c, res) in cases {
        for r in 2..=fam.dim() {
            let s = scan(fam.clone(), c, r, res);
            outside += cone_membership_scan(&s).membership.iter().filter(|m| !m[r - 1]).count();
            recs.extend(s.failures.clone());
            recs.extend(proof_chain_check(&s));
        }
    }
    let mut out = judge(&recs, false, None);
    // the families are meant to be Γ_r-valued throughout
    if outside > 0 {
        out.pass = false;
    }
    out.detail += &format!("; {outside} grid points outside Γ_r");
    out
}

fn c12_rigidity_controls() -> Outcome {
    let mut problems = Vec::new();
    for c in [0.0, 1.0, -1.0] {
        for n in 2..=3 {
            for r in 2..=n {
                let rep = umbilicity_certificate(&scan(Family::Sphere { n, t: 1.0 }, c, r, 8)).unwrap();
                if !(rep.rigid && rep.max_deficit <= 1e-8 && rep.h_stats.range() <= 1e-9 && rep.hr_stats.range() <= 1e-9) {
                    problems.push(format!("sphere c={c} n={n} r={r}: deficit {:e}", rep.max_deficit));
                }
            }
        }
    }
    let ell = umbilicity_certificate(&scan(Family::Ellipsoid { axes: vec![1.0, 1.0, 1.2] }, 0.0, 2, 16)).unwrap();
    if !(ell.h_stats.range() > 1e-2) || ell.rigid {
        problems.push(format!("ellipsoid range(H) = {:e}", ell.h_stats.range()));
    }
    let mut slopes = Vec::new();
    for c in [0.0, 1.0, -1.0] {
        let eps = [1e-2, 1e-3, 1e-4];
        let deficits: Vec<f64> = eps
            .iter()
            .map(|&e| umbilicity_certificate(&scan(Family::Bump { n: 2, t: 1.0, eps: e }, c, 2, 8)).unwrap().max_deficit)
            .collect();
        let slope = log_log_slope(&eps, &deficits);
        if (slope - 1.0).abs() > 0.2 {
            problems.push(format!("bump c={c}: slope {slope:.3}"));
        }
        slopes.push(format!("{slope:.4}"));
    }
    // theorem consistency across every bounded family
    for (fam, c) in all_families() {
        let rep = umbilicity_certificate(&scan(fam.clone(), c, 2, 8)).unwrap();
        if let Some(bad) = rep.records.iter().find(|r| r.failed()) {
            problems.push(format!("{}: {} failed", rep.tag, bad.check_id));
        }
    }
    Outcome {
        pass: problems.is_empty(),
        detail: format!(
            "spheres rigid in all models; ellipsoid range(H) = {:.3e}; bump deficit slopes [{}]{}",
            ell.h_stats.range(),
            slopes.join(", "),
            if problems.is_empty() { String::new() } else { format!("; problems: {}", problems.join("; ")) }
        ),
    }
}

fn c13_determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut texts = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_roundsphere"))
            .args(["--suite", "all", "--seed", "42", "--out"])
            .arg(&out)
            .stderr(std::process::Stdio::null())
            .status()
            .expect("binary runs");
        if status.code() != Some(0) {
            return Outcome { pass: false, detail: format!("run {k} exited with {status}") };
        }
        let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        texts.push(serde_json::to_string(&doc["records"]).unwrap());
    }
    let n = serde_json::from_str::<serde_json::Value>(&texts[0]).unwrap().as_array().map_or(0, |a| a.len());
    Outcome { pass: texts[0] == texts[1] && n > 0, detail: format!("{n} records, identical: {}", texts[0] == texts[1]) }
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("symmetric-function identities", c1_symfun),
        ("hyperbolicity of sigma_r", c2_hyperbolicity),
        ("Garding inequality", c3_garding),
        ("concavity of sigma_r^(1/r)", c4_concavity),
        ("cone nesting and convexity", c5_nesting),
        ("curvature relation", c6_curvature_relation),
        ("geodesic spheres", c7_geodesic_spheres),
        ("Walter's formula", || walter_like(false)),
        ("commutation and Codazzi", c9_commutation_codazzi),
        ("gradient identity", || walter_like(true)),
        ("proof-chain inequality", c11_proof_chain),
        ("rigidity controls", c12_rigidity_controls),
        ("determinism", c13_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        if !out.pass {
            failed += 1;
        }
        println!("criterion {:>2} {verdict} {name} ({:.1} s): {}", i + 1, start.elapsed().as_secs_f64(), out.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
