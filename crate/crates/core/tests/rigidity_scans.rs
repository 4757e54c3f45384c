use roundsphere_core::families::Family;
use roundsphere_core::hypersurface::Depth;
use roundsphere_core::rigidity::*;
use roundsphere_core::spaceform::{alpha_c, sphere_curvature};

fn scan(family: Family, c: f64, r: usize, res: usize, depth: Depth) -> GridScan {
    let n = family.dim();
    GridScan::evaluate(&ScanConfig::new(family, c, r, vec![res; n]), depth).unwrap()
}

#[test]
fn sphere_controls_in_every_model() {
    for c in [0.0, 1.0, -1.0] {
        for n in [2, 3] {
            for r in 2..=n {
                let s = scan(Family::Sphere { n, t: 1.0 }, c, r, 8, Depth::Shape);
                let report = umbilicity_certificate(&s).unwrap();
                assert!(report.rigid, "c={c} n={n} r={r}");
                assert!(report.max_deficit <= 1e-8);
                assert!(report.h_stats.range() <= 1e-9 && report.hr_stats.range() <= 1e-9);
                assert!(report.is_consistent());
                assert!(report.records.iter().all(|x| !x.failed()), "{:?}", report.records);
                let e = elliptic_point_scan(&s);
                assert!(e.found);
                let want = sphere_curvature(c, 1.0).unwrap() - alpha_c(c);
                assert!((e.margin - want).abs() <= 1e-6);
            }
        }
    }
}

#[test]
fn ellipsoid_is_a_negative_control() {
    let s = scan(Family::Ellipsoid { axes: vec![1.0, 1.0, 1.2] }, 0.0, 2, 10, Depth::Full);
    let report = umbilicity_certificate(&s).unwrap();
    assert!(!report.rigid);
    assert!(report.h_stats.range() > 1e-2);
    assert!(report.records.iter().all(|x| !x.failed()));
    let cones = cone_membership_scan(&s);
    assert!(cones.membership.iter().all(|row| row.iter().all(|&m| m)));
    for rec in proof_chain_check(&s) {
        assert!(rec.passed(), "{rec:?}");
    }
}

#[test]
fn theorem_consistency_over_families() {
    let families = [
        (Family::Sphere { n: 2, t: 0.7 }, 1.0),
        (Family::Sphere { n: 3, t: 0.7 }, -1.0),
        (Family::Ellipsoid { axes: vec![1.0, 1.1, 1.25] }, 0.0),
        (Family::Torus { major: 2.0, minor: 1.0 }, 0.0),
        (Family::Bump { n: 2, t: 1.0, eps: 1e-2 }, -1.0),
    ];
    for (family, c) in families {
        let report = umbilicity_certificate(&scan(family.clone(), c, 2, 8, Depth::Shape)).unwrap();
        let constant = report.h_stats.range() <= 1e-9 && report.hr_stats.range() <= 1e-9;
        assert!(!constant || report.max_deficit <= 1e-6, "{family:?}");
        assert!(report.is_consistent());
        assert!(report.records.iter().all(|x| !x.failed()), "{family:?}");
    }
}

#[test]
fn cylinder_patch_is_not_a_theorem_instance() {
    let report = umbilicity_certificate(&scan(Family::Cylinder { n: 2, radius: 1.0, half_length: 1.0 }, 0.0, 2, 8, Depth::Shape)).unwrap();
    assert!(report.h_stats.range() <= 1e-9 && report.hr_stats.range() <= 1e-9);
    assert!(!report.rigid && !report.elliptic_point_found);
    assert!(report.records.iter().all(|x| !x.failed()));
    assert_eq!(report.caveats.len(), 2);
}

#[test]
fn bump_deficit_is_linear_in_eps() {
    for c in [0.0, 1.0, -1.0] {
        let eps = [1e-2, 1e-3, 1e-4];
        let mut deficit = Vec::new();
        let mut h_range = Vec::new();
        for &e in &eps {
            let report = umbilicity_certificate(&scan(Family::Bump { n: 2, t: 1.0, eps: e }, c, 2, 8, Depth::Shape)).unwrap();
            assert!(!report.rigid);
            deficit.push(report.max_deficit);
            h_range.push(report.h_stats.range());
        }
        assert!((log_log_slope(&eps, &deficit) - 1.0).abs() <= 0.2);
        assert!((log_log_slope(&eps, &h_range) - 1.0).abs() <= 0.2);
    }
}

#[test]
fn unbounded_and_invalid_configs_are_rejected() {
    let open = Family::Cylinder { n: 2, radius: 1.0, half_length: f64::INFINITY };
    assert!(ScanConfig::new(open, 0.0, 2, vec![8, 8]).chart().is_err());
    assert!(ScanConfig::new(Family::Sphere { n: 2, t: 1.0 }, 0.0, 2, vec![4, 8]).chart().is_err());
    assert!(ScanConfig::new(Family::Sphere { n: 2, t: 1.0 }, 0.0, 3, vec![8, 8]).chart().is_err());
}
