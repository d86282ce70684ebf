mod common;

use std::f64::consts::PI;

use adscone::cone_hyp::{gauss_bonnet_area, holonomy_of_loop, triangle_edge_from_angles, ConeSurface, ConeSurfaceSpec, Face};
use adscone::hs_surface::{
    check_polyhedron_conditions, classify_hs_sphere, CurveRecord, MarkedHSMetric, MetricType, TComponent, TimelikeJoin,
};
use adscone::interactions::{collision_link, doubled_rhombus, solve_conjugator, surgery_collision};
use adscone::isom::{classify, degree_decomposition, translation_number, IsomClass, LiftedProj2, Proj2};
use adscone::linalg::{ads_geodesic, classify_ray, cross, AdSPoint, Mat2, Mink3Vec, TangentVec, Vec22};
use adscone::links::particle_mass;
use adscone::lr_metrics::{complex_structure, jacobi_norm, shifted_dets, Connection, JacobiData};
use adscone::rp1::{classify_circle, CircleKind, RP1Circle};
use adscone::spacetimes::ModelSpacetime;
use proptest::prelude::*;

fn proj(m: Mat2<f64>) -> Proj2<f64> {
    Proj2::new(m).unwrap()
}

/// `R(α)·diag(eˢ, e⁻ˢ)·R(β)`: covers PSL(2,R) with bounded entries.
fn conjugator() -> impl Strategy<Value = Proj2<f64>> {
    (0.0..2.0 * PI, -1.0..1.0f64, 0.0..2.0 * PI)
        .prop_map(|(a, s, b)| proj(Mat2::rotation(a).mul(&Mat2::diag(s.exp(), (-s).exp())).mul(&Mat2::rotation(b))))
}

#[derive(Clone, Debug)]
enum Kind {
    Elliptic(f64),
    Parabolic(f64),
    Hyperbolic(f64),
}

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![
        (0.1..2.0 * PI - 0.1).prop_map(Kind::Elliptic),
        prop_oneof![-3.0..-0.1f64, 0.1..3.0f64].prop_map(Kind::Parabolic),
        (0.1..3.0f64).prop_map(Kind::Hyperbolic),
    ]
}

fn element(k: &Kind) -> Proj2<f64> {
    match *k {
        Kind::Elliptic(theta) => proj(Mat2::rotation(theta / 2.0)),
        Kind::Parabolic(h) => proj(Mat2::new(1.0, h, 0.0, 1.0)),
        Kind::Hyperbolic(l) => proj(Mat2::diag((l / 2.0).exp(), (-l / 2.0).exp())),
    }
}

fn point() -> impl Strategy<Value = AdSPoint<f64>> {
    (-0.8..0.8f64, -0.5..0.5f64, -0.5..0.5f64).prop_map(|(a, b, c)| AdSPoint::from_timelike(Vec22::new(1.0, a, b, c)).unwrap())
}

fn coeffs() -> impl Strategy<Value = [f64; 4]> {
    [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64]
}

fn vec4(c: [f64; 4]) -> Vec22<f64> {
    Vec22::new(c[0], c[1], c[2], c[3])
}

/// Unit timelike tangent at `p` with rapidity `b` in direction `a`.
fn unit_timelike(p: &AdSPoint<f64>, a: f64, b: f64) -> Vec22<f64> {
    let [e0, e1, e2] = p.frame();
    e0 * b.cosh() + (e1 * a.cos() + e2 * a.sin()) * b.sinh()
}

fn close_classes(a: &IsomClass<f64>, b: &IsomClass<f64>, tol: f64) -> bool {
    match (a, b) {
        (IsomClass::Elliptic { angle: x }, IsomClass::Elliptic { angle: y })
        | (IsomClass::Hyperbolic { length: x }, IsomClass::Hyperbolic { length: y }) => (x - y).abs() <= tol,
        (x, y) => x == y,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn timelike_geodesics_stay_on_the_quadric_and_close_up(p in point(), a in 0.0..2.0 * PI, b in -1.0..1.0f64, t in -4.0..4.0f64) {
        let v = TangentVec::new(p, unit_timelike(&p, a, b)).unwrap();
        let x = ads_geodesic(&p, &v, t).unwrap();
        prop_assert!((x.vec().norm_sq() + 1.0).abs() <= 1e-10);
        let y = ads_geodesic(&p, &v, t + 2.0 * PI).unwrap();
        prop_assert!((x.vec() - y.vec()).euclid_norm() <= 1e-10);
    }

    #[test]
    fn cross_product_is_orthogonal(p in point(), u in coeffs(), w in coeffs()) {
        let (u, w) = (TangentVec::new(p, p.project(vec4(u))).unwrap(), TangentVec::new(p, p.project(vec4(w))).unwrap());
        let c = cross(&u, &w).unwrap();
        prop_assert!(c.v.dot(&u.v).abs() <= 1e-12);
        prop_assert!(c.v.dot(&w.v).abs() <= 1e-12);
    }

    #[test]
    fn ray_class_ignores_positive_scaling(y in [-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64], k in 0.01..100.0f64) {
        let y = Mink3Vec::new(y[0], y[1], y[2]);
        prop_assume!(y.euclid_sq() > 1e-6);
        prop_assert_eq!(classify_ray(&y).ok(), classify_ray(&y.scale(k)).ok());
    }

    #[test]
    fn classification_is_conjugation_invariant(k in kind(), a in conjugator()) {
        let g = element(&k);
        prop_assert!(close_classes(&classify(&g), &classify(&g.conjugate_by(&a)), 1e-9));
    }

    #[test]
    fn delta_shifts_translation_number_by_pi(k in kind(), n in -2i64..3) {
        let h = LiftedProj2::from_offset(element(&k), n);
        let t = translation_number(&h).unwrap();
        let t1 = translation_number(&h.compose(&LiftedProj2::delta())).unwrap();
        prop_assert!((t1 - t - PI).abs() <= 1e-8, "{} vs {}", t1, t);
    }

    #[test]
    fn degree_decomposition_recomposes(k in kind(), n in -3i64..4, a in conjugator()) {
        prop_assume!(!matches!(k, Kind::Elliptic(_)));
        let h = LiftedProj2::from_offset(element(&k).conjugate_by(&a), n);
        let (d, g0) = degree_decomposition(&h).unwrap();
        prop_assert_eq!(d, n);
        prop_assert!(LiftedProj2::delta_pow(d).compose(&g0).distance(&h) <= 1e-9);
    }

    #[test]
    fn inverting_a_parabolic_flips_its_sign(h in prop_oneof![-3.0..-0.1f64, 0.1..3.0f64], a in conjugator()) {
        let g = element(&Kind::Parabolic(h)).conjugate_by(&a);
        match (classify(&g), classify(&g.inverse())) {
            (IsomClass::Parabolic { sign: s }, IsomClass::Parabolic { sign: t }) => prop_assert_eq!(t, s.flip()),
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn circle_class_is_conjugation_invariant(k in kind(), n in 1i64..4, a in conjugator(), j in -1i64..2) {
        let h = LiftedProj2::from_offset(element(&k), n);
        let c = LiftedProj2::from_offset(a, j);
        let (Ok(x), Ok(y)) = (RP1Circle::full(h), RP1Circle::full(h.conjugate_by(&c))) else {
            return Err(TestCaseError::reject("not a positive generator"));
        };
        let (x, y) = (classify_circle(&x).unwrap(), classify_circle(&y).unwrap());
        let same = match (x, y) {
            (CircleKind::Elliptic { angle: p }, CircleKind::Elliptic { angle: q }) => (p - q).abs() <= 1e-9,
            (CircleKind::Hyperbolic { degree: d, length: p, .. }, CircleKind::Hyperbolic { degree: e, length: q, .. }) => {
                d == e && (p - q).abs() <= 1e-9
            }
            (p, q) => p == q,
        };
        prop_assert!(same, "{:?} vs {:?}", x, y);
    }

    #[test]
    fn particle_mass_decreases_with_angle(a in 0.01..10.0f64, d in 0.001..1.0f64) {
        prop_assert!(particle_mass(a + d) < particle_mass(a));
    }

    #[test]
    fn doubled_triangle_area_matches_defects(a in 0.1..1.0f64, b in 0.1..1.0f64, c in 0.1..1.0f64) {
        prop_assume!(a + b + c < PI - 0.05);
        let [x, y, z] = triangle_edge_from_angles(a, b, c).unwrap();
        let faces = vec![Face { vertices: [0, 1, 2], edges: [0, 1, 2] }, Face { vertices: [1, 0, 2], edges: [0, 2, 1] }];
        let spec = ConeSurfaceSpec { targets: vec![Some(2.0 * a), Some(2.0 * b), Some(2.0 * c)], edge_lengths: vec![z, x, y], faces };
        let s = ConeSurface::new(spec).unwrap();
        let area = gauss_bonnet_area(&s).unwrap();
        prop_assert!((area - s.face_defect_sum()).abs() <= 1e-8);
        prop_assert!((area - 2.0 * (PI - a - b - c)).abs() <= 1e-10);
    }

    #[test]
    fn geodesic_lengths_are_monotone(l in 0.5..12.0f64, d in 0.0..3.0f64) {
        let metric = |sigma: f64, t: f64| MarkedHSMetric {
            vertices: vec![],
            sigma_geodesics: vec![CurveRecord { length: sigma, degenerate: false, bounds: None }],
            t_geodesics: vec![CurveRecord { length: t, degenerate: false, bounds: None }],
            t_components: vec![TComponent { width: 0.0, joins: TimelikeJoin::HToSigma }],
            metric_type: MetricType::Hyperbolic,
            hyperbolic_components: 1,
            sigma_components: 1,
            sigma_segments: vec![],
            sigma_boundary_lengths: vec![],
            sigma_convex: true,
        };
        let r = check_polyhedron_conditions(&metric(l, l)).unwrap();
        let longer = check_polyhedron_conditions(&metric(l + d, l)).unwrap();
        prop_assert!(!r.b.pass || longer.b.pass);
        prop_assume!(l - d > 0.0);
        let shorter = check_polyhedron_conditions(&metric(l, l - d)).unwrap();
        prop_assert!(!r.c.pass || shorter.c.pass);
    }

    #[test]
    fn shape_operators_preserve_area(g in [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64], s in [-1.5..1.5f64, -1.5..1.5f64, -1.5..1.5f64]) {
        let a = Mat2::from_row_major(g);
        let g = a.mul(&a.transpose());
        let g = Mat2::new(g.m[0][0] + 0.2, g.m[0][1], g.m[0][1], g.m[1][1] + 0.2);
        let b = g.inverse().mul(&Mat2::new(s[0], s[1], s[1], s[2]));
        prop_assert!(complex_structure(&g).mul(&b).trace().abs() <= 1e-12);
        let (l, r) = shifted_dets(&g.m, &b.m);
        prop_assert!((l - (b.det() + 1.0)).abs() <= 1e-12 && (r - (b.det() + 1.0)).abs() <= 1e-12);
    }

    #[test]
    fn jacobi_norms_are_constant(p in point(), a in 0.0..2.0 * PI, b in -1.0..1.0f64, da in coeffs(), w in coeffs(), t in 0.0..6.0f64) {
        let v = unit_timelike(&p, a, b);
        let da = p.project(vec4(da));
        let w = p.project(vec4(w));
        let db = w + v * w.dot(&v) + p.vec() * da.dot(&v);
        let d = JacobiData { point: p.vec(), velocity: v, dpoint: da, dvelocity: db };
        for conn in [Connection::Left, Connection::Right] {
            let (m0, mt) = (jacobi_norm(conn, &d, 0.0).unwrap(), jacobi_norm(conn, &d, t).unwrap());
            prop_assert!((m0 - mt).abs() <= 1e-8 * m0.max(1e-3));
        }
    }

    #[test]
    fn conjugator_is_recovered(ks in proptest::collection::vec(kind(), 2..4), c in conjugator()) {
        // Two non-commuting elements pin the conjugator down.
        let gens: Vec<Proj2<f64>> = ks.iter().enumerate().map(|(i, k)| element(k).conjugate_by(&proj(Mat2::rotation(0.7 * i as f64)).mul(&proj(Mat2::diag(1.0 + 0.3 * i as f64, 1.0 / (1.0 + 0.3 * i as f64)))))).collect();
        let pairs: Vec<_> = gens.iter().map(|g| (*g, g.conjugate_by(&c))).collect();
        let (found, residual) = solve_conjugator(&pairs).unwrap();
        prop_assert!(residual <= 1e-8);
        for (a, b) in &pairs {
            prop_assert!(a.conjugate_by(&found).distance(b) <= 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn surgery_keeps_complement_holonomy(eta1 in 1.35 * PI..1.7 * PI, eta2 in 1.35 * PI..1.7 * PI, radius in 0.6..1.2f64) {
        let base = ModelSpacetime::ProductM { base: doubled_rhombus(PI, PI / 2.0).unwrap() };
        let Ok(g) = surgery_collision(&base, &collision_link(PI, &[eta1, eta2]), 0, radius) else {
            return Err(TestCaseError::reject("no placement of the new cone points"));
        };
        let (before, after) = (&g.vertices[g.edges[0].past], &g.vertices[g.edges[0].future]);
        for (l, r) in [(&before.left, &after.left), (&before.right, &after.right)] {
            let (sb, sa) = (ConeSurface::new(l.clone()).unwrap(), ConeSurface::new(r.clone()).unwrap());
            for lp in &g.edges[0].generators {
                let (hb, ha) = (holonomy_of_loop(&sb, &lp.past).unwrap(), holonomy_of_loop(&sa, &lp.future).unwrap());
                prop_assert!(hb.distance(&ha) <= 1e-8);
            }
        }
    }
}

#[test]
fn time_reversal_swaps_hole_tags_on_the_corpus() {
    for f in common::corpus() {
        let Some(expected) = f.expected else { continue };
        assert_eq!(classify_hs_sphere(&f.sphere, true).unwrap(), expected, "{}", f.name);
        assert_eq!(classify_hs_sphere(&f.sphere.time_reverse(), true).unwrap(), expected.time_reversed(), "{}", f.name);
    }
}

#[test]
fn positive_fixtures_have_angles_below_two_pi() {
    for f in common::corpus().into_iter().filter(|f| f.expected.is_some()) {
        assert!(f.sphere.hyperbolic_regions.iter().flat_map(|h| &h.cone_angles).all(|a| *a < 2.0 * PI), "{}", f.name);
    }
}
