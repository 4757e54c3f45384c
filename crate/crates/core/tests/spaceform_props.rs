use proptest::prelude::*;
use roundsphere_core::oracle::distance_second_difference;
use roundsphere_core::spaceform::{sphere_curvature, AmbientPoint, SpaceForm};

fn model(c: f64) -> SpaceForm {
    SpaceForm::new(c, 3).unwrap()
}

fn point(m: &SpaceForm, raw: &[f64]) -> AmbientPoint {
    let mut v = raw[..m.coord_len()].to_vec();
    if m.c < 0.0 {
        // make it timelike
        v[0] = 1.0 + v.iter().skip(1).map(|x| x * x).sum::<f64>().sqrt() * (1.0 + v[0].abs());
    }
    m.project(v).unwrap()
}

fn curvature() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1.0), Just(-1.0), 0.1f64..3.0, -3.0f64..-0.1]
}

fn raw() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.5f64..1.5, 4)
}

proptest! {
    #[test]
    fn projection_lands_on_the_model(c in curvature(), x in raw()) {
        let m = model(c);
        let p = point(&m, &x);
        prop_assert!(m.membership_defect(&p.coords) <= 1e-12);
        if c < 0.0 {
            prop_assert!(p.coords[0] > 0.0);
        }
    }

    #[test]
    fn distance_is_a_metric(c in curvature(), a in raw(), b in raw(), d in raw()) {
        let m = model(c);
        let (p, q, s) = (point(&m, &a), point(&m, &b), point(&m, &d));
        let pq = m.distance(&p, &q).unwrap();
        prop_assert!(pq >= 0.0);
        prop_assert!((pq - m.distance(&q, &p).unwrap()).abs() <= 1e-9);
        prop_assert!(pq <= m.distance(&p, &s).unwrap() + m.distance(&s, &q).unwrap() + 1e-9);
    }

    #[test]
    fn sphere_curvature_decreases(c in curvature(), a in 0.01f64..0.99, b in 0.01f64..0.99) {
        prop_assume!((a - b).abs() > 1e-9);
        let top = if c > 0.0 { std::f64::consts::PI / c.sqrt() } else { 10.0 };
        let (t1, t2) = (a.min(b) * top, a.max(b) * top);
        let (m1, m2) = (sphere_curvature(c, t1).unwrap(), sphere_curvature(c, t2).unwrap());
        prop_assert!(m1 > m2);
        if c >= 0.0 && t1 < top / 2.0 {
            prop_assert!(m1 > 0.0);
        }
        if c < 0.0 {
            prop_assert!(m2 > (-c).sqrt());
        }
    }

    #[test]
    fn flat_limit(t in 0.5f64..2.0) {
        for c in [1e-6, -1e-6] {
            prop_assert!((sphere_curvature(c, t).unwrap() - 1.0 / t).abs() <= 1e-5);
        }
    }

    #[test]
    fn distance_hessian_matches_second_differences(c in curvature(), a in raw(), b in raw(), w in raw()) {
        let m = model(c);
        let (q0, p) = (point(&m, &a), point(&m, &b));
        let d = m.distance(&q0, &p).unwrap();
        prop_assume!(d > 0.05);
        if c > 0.0 {
            prop_assume!(d < 0.9 * std::f64::consts::PI / c.sqrt());
        }
        let v = m.tangent_projection(&p, &w[..m.coord_len()]).unwrap();
        let hess = m.distance_hessian(&q0, &p, &v).unwrap();
        let fd = distance_second_difference(&m, &q0, &p, &v, 1e-4);
        let speed2 = m.inner(&v.coords, &v.coords);
        prop_assert!((hess - fd).abs() <= 1e-6 * (1.0 + hess.abs()) * speed2.max(1.0), "{hess} vs {fd}");
        let grad = m.distance_gradient(&q0, &p).unwrap();
        prop_assert!(m.distance_hessian(&q0, &p, &grad).unwrap().abs() <= 1e-12);
    }
}
