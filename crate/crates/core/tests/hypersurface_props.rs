use proptest::prelude::*;
use roundsphere_core::families::Family;
use roundsphere_core::hypersurface::*;
use roundsphere_core::linalg::{generalized_eigen, inverse};
use roundsphere_core::oracle::{flat_principal_curvatures_fd, laplacian_fd};
use roundsphere_core::spaceform::sphere_curvature;
use roundsphere_core::symfun::char_poly_table;
use roundsphere_core::{Tolerances, Verdict};

fn charts() -> Vec<ImmersionChart> {
    let mut out = Vec::new();
    for c in [0.0, 1.0, -1.0] {
        for n in [2, 3] {
            out.push(ImmersionChart::new(Family::Sphere { n, t: 0.8 }, c).unwrap());
            out.push(ImmersionChart::new(Family::Bump { n, t: 0.8, eps: 0.05 }, c).unwrap());
        }
    }
    out.push(ImmersionChart::new(Family::Ellipsoid { axes: vec![1.0, 1.1, 1.25] }, 0.0).unwrap());
    out.push(ImmersionChart::new(Family::Ellipsoid { axes: vec![1.0, 1.1, 1.25, 1.4] }, 0.0).unwrap());
    out.push(ImmersionChart::new(Family::Torus { major: 2.0, minor: 1.0 }, 0.0).unwrap());
    out.push(ImmersionChart::new(Family::Cylinder { n: 2, radius: 0.7, half_length: 1.0 }, 0.0).unwrap());
    out.push(ImmersionChart::new(Family::Cylinder { n: 3, radius: 0.7, half_length: 1.0 }, 0.0).unwrap());
    out
}

fn not_failed(rec: &roundsphere_core::VerificationRecord) -> bool {
    rec.verdict != Verdict::Fail
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn structure_equations_hold(unit in proptest::collection::vec(0.0f64..1.0, 3)) {
        let tol = Tolerances::default();
        for chart in charts() {
            let u = chart.interior_point(&unit[..chart.n()]);
            let pg = point_geometry(&chart, &u, Depth::Full, &tol).unwrap();
            for rec in [
                codazzi_record(&pg, &tol),
                gauss_record(&pg, &tol),
                sectional_record(&pg, &tol),
                sigma_paths_record(&pg, &tol),
                curvature_relation_record(&pg, &tol),
                commutation_record(&pg, &tol),
                hess_trace_record(&pg, &tol),
            ] {
                prop_assert!(not_failed(&rec), "{}: {rec:?}", chart.tag());
            }
            for r in 1..=chart.n() {
                let w = walter_record(&pg, r, &tol);
                prop_assert!(not_failed(&w), "{}: {w:?}", chart.tag());
                if pg.frame == FrameStatus::Distinct {
                    for k in 0..chart.n() {
                        let rec = gradient_identity_record(&pg, r, k, &tol);
                        prop_assert!(rec.passed(), "{}: {rec:?}", chart.tag());
                    }
                }
            }
        }
    }

    #[test]
    fn orientation_flip(unit in proptest::collection::vec(0.0f64..1.0, 3)) {
        let tol = Tolerances::default();
        for chart in charts() {
            let u = chart.interior_point(&unit[..chart.n()]);
            let a = point_geometry(&chart, &u, Depth::Full, &tol).unwrap();
            let b = point_geometry(&chart.flipped(), &u, Depth::Full, &tol).unwrap();
            let n = chart.n();
            for i in 0..n {
                prop_assert!((a.lambda[i] + b.lambda[n - 1 - i]).abs() <= 1e-12 * (1.0 + a.lambda[i].abs()));
            }
            for r in 0..=n {
                let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                prop_assert!((a.h_list[r] - sign * b.h_list[r]).abs() <= 1e-12 * (1.0 + a.h_list[r].abs()));
                if a.frame == FrameStatus::Distinct && r >= 1 {
                    let (la, ra) = walter_sides(&a, r).unwrap();
                    let (lb, rb) = walter_sides(&b, r).unwrap();
                    let s = 1e-9 * (1.0 + la.abs());
                    prop_assert!((la - sign * lb).abs() <= s && (ra - sign * rb).abs() <= s);
                    prop_assert!(((la - ra) - sign * (lb - rb)).abs() <= s);
                }
            }
        }
    }
}

#[test]
fn laplacian_matches_finite_differences() {
    let tol = Tolerances::default();
    let charts = [
        ImmersionChart::new(Family::Ellipsoid { axes: vec![1.0, 1.1, 1.25] }, 0.0).unwrap(),
        ImmersionChart::new(Family::Bump { n: 2, t: 0.8, eps: 0.05 }, 1.0).unwrap(),
        ImmersionChart::new(Family::Bump { n: 2, t: 0.8, eps: 0.05 }, -1.0).unwrap(),
        ImmersionChart::new(Family::Torus { major: 2.0, minor: 1.0 }, 0.0).unwrap(),
    ];
    for chart in &charts {
        for unit in [[0.3, 0.6], [0.7, 0.2], [0.55, 0.45]] {
            let u = chart.interior_point(&unit);
            let pg = point_geometry(chart, &u, Depth::Full, &tol).unwrap();
            let lap = pg.laplacian_sigma.clone().unwrap();
            for r in 1..=2 {
                let phi = |y: &[f64]| {
                    let (g, h, _) = fundamental_forms(chart, y).unwrap();
                    char_poly_table(&inverse(&g).unwrap().matmul(&h)).unwrap().get(r)
                };
                let fd = laplacian_fd(chart, &u, phi, 2e-3);
                assert!((fd - lap[r]).abs() <= tol.laplacian_fd * (1.0 + lap[r].abs()), "{} r={r}: {} vs {fd}", chart.tag(), lap[r]);
            }
            // Δ of a coordinate function through the jet operator
            let x0 = laplace_beltrami(chart, &u, |ch, jets| ch.map(jets)[0].clone()).unwrap();
            let fd = laplacian_fd(chart, &u, |y| chart.map(y)[0], 2e-3);
            assert!((x0 - fd).abs() <= tol.laplacian_fd * (1.0 + x0.abs()));
        }
    }
}

#[test]
fn principal_curvatures_match_finite_differences() {
    let tol = Tolerances::default();
    for chart in [
        ImmersionChart::new(Family::Ellipsoid { axes: vec![1.0, 1.1, 1.25] }, 0.0).unwrap(),
        ImmersionChart::new(Family::Ellipsoid { axes: vec![1.0, 1.1, 1.25, 1.4] }, 0.0).unwrap(),
        ImmersionChart::new(Family::Bump { n: 3, t: 1.0, eps: 0.1 }, 0.0).unwrap(),
    ] {
        let u = chart.interior_point(&[0.35, 0.6, 0.8][..chart.n()]);
        let pg = point_geometry(&chart, &u, Depth::Shape, &tol).unwrap();
        let fd = flat_principal_curvatures_fd(&chart, &u, 1e-4);
        for (a, b) in pg.lambda.iter().zip(&fd) {
            assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()), "{}: {a} vs {b}", chart.tag());
        }
        // the shape operator's eigenvalues by the generalized problem agree too
        let (vals, _) = generalized_eigen(&pg.h, &pg.g).unwrap();
        for (a, b) in pg.lambda.iter().zip(&vals) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }
}

#[test]
fn geodesic_spheres_reproduce_model_curvature() {
    let tol = Tolerances::default();
    for c in [0.0, 1.0, -1.0, 0.3] {
        for t in [0.5, 1.0, 1.5] {
            let mu = sphere_curvature(c, t).unwrap();
            for n in 2..=4 {
                let chart = ImmersionChart::new(Family::Sphere { n, t }, c).unwrap();
                for p in chart.grid(&vec![3; n]).unwrap() {
                    let pg = point_geometry(&chart, &p, Depth::Shape, &tol).unwrap();
                    assert!(pg.lambda.iter().all(|l| (l - mu).abs() <= tol.geodesic_sphere));
                }
            }
        }
    }
}
