//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
//!
//! Built without the libtest harness so the table is always printed.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use adscone::cone_hyp::{
    holonomy_of_loop, triangle_angles_from_edges, vertex_loop, ConeSurface, ConeSurfaceSpec, Face, FaceLoop,
};
use adscone::hs_surface::{
    check_polyhedron_conditions, classify_hs_sphere, AngleGroup, CurveRecord, FaceAngle, MarkedHSMetric, MetricType,
    Part, PositionClass, TComponent, TimelikeJoin, VertexRecord,
};
use adscone::interactions::{assemble_holonomy, collision_link, doubled_rhombus, surgery_collision, validate_geometric_data};
use adscone::isom::{classify, IsomClass, Proj2, Sign};
use adscone::linalg::{AdSPoint, Mat2, Vec22};
use adscone::links::{classify_singularity, SingularityType};
use adscone::lr_metrics::{
    complex_structure, cone_configuration, holonomy_pair, jacobi_norm, left_right_metrics, loop_deviation, meridian,
    shifted_dets, square_loop, transverse_check, Connection, JacobiData, JetSample, SurfaceJet,
};
use adscone::spacetimes::{causal_speed_check, link_of_line, ChartSample, ModelSpacetime};
use adscone::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot be met as stated; see the README for why.
const KNOWN_UNATTAINABLE: &[u32] = &[11];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if let Some(limit) = limit {
        o.detail = format!("{}; {:.2?} (limit {:?})", o.detail, took, limit);
        o.pass &= took < limit;
    }
    o
}

fn elliptic_angle(p: &Proj2<f64>) -> Option<f64> {
    match classify(p) {
        IsomClass::Elliptic { angle } => Some(angle),
        _ => None,
    }
}

fn flatness() -> Outcome {
    let side = 1e-2;
    let area = side * side;
    let (mut worst_flat, mut least_lc, mut raw_lc) = (0.0f64, f64::INFINITY, f64::INFINITY);
    for (a, b, c) in [(0.0, 0.0, 0.0), (0.3, 0.1, -0.2), (-0.5, 0.7, 0.4)] {
        let x = AdSPoint::from_timelike(Vec22::new(1.0, a, b, c)).unwrap();
        let [e0, e1, e2] = x.frame();
        let lp = square_loop(&x, &e1, &e2, side).unwrap();
        let frame = [e0, e1, e2];
        for conn in [Connection::Left, Connection::Right] {
            worst_flat = worst_flat.max(loop_deviation(conn, &lp, &frame).unwrap() / area);
        }
        let lc = loop_deviation(Connection::LeviCivita, &lp, &frame).unwrap();
        least_lc = least_lc.min(lc / area);
        raw_lc = raw_lc.min(lc);
    }
    outcome(
        worst_flat <= 1e-4 && least_lc >= 5e-3,
        format!("left/right {worst_flat:.2e} per unit area, Levi-Civita {least_lc:.3} per unit area (raw {raw_lc:.2e})"),
    )
}

fn factorization() -> Outcome {
    let mut worst = 0.0f64;
    for theta in [PI / 3.0, PI / 2.0, PI, 1.5 * PI] {
        let lp = meridian(&ModelSpacetime::ConeP { angle: theta }, 0.5, 1e-2).unwrap();
        let h = holonomy_pair(&lp).unwrap();
        for f in [h.left, h.right] {
            worst = worst.max(elliptic_angle(&f).map_or(f64::INFINITY, |a| (a - theta).abs()));
        }
    }
    outcome(worst <= 1e-6, format!("worst angle error {worst:.2e}"))
}

fn random_tangent(rng: &mut ChaCha8Rng, p: &AdSPoint<f64>) -> Vec22<f64> {
    let w = Vec22::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    p.project(w)
}

fn random_jacobi(rng: &mut ChaCha8Rng) -> JacobiData<f64> {
    let p = AdSPoint::from_timelike(Vec22::new(1.0, rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)))
        .unwrap();
    let [e0, e1, e2] = p.frame();
    let (a, b) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(-1.0..1.0f64));
    let v = e0 * b.cosh() + (e1 * a.cos() + e2 * a.sin()) * b.sinh();
    let da = random_tangent(rng, &p);
    let w = random_tangent(rng, &p);
    let bt = w + v * w.dot(&v);
    let db = bt + p.vec() * da.dot(&v);
    JacobiData { point: p.vec(), velocity: v, dpoint: da, dvelocity: db }
}

fn flow_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = random_jacobi(&mut rng);
        for conn in [Connection::Left, Connection::Right] {
            let vals: Vec<f64> = [0.0, 0.5, 1.0, 2.0].iter().map(|&t| jacobi_norm(conn, &d, t).unwrap()).collect();
            let (lo, hi) = vals.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
            worst = worst.max((hi - lo) / hi.max(1e-300));
        }
    }
    outcome(worst <= 1e-8, format!("worst relative variation {worst:.2e} over 100 samples"))
}

/// Random positive definite first form and a shape operator self-adjoint for it.
fn random_jet_sample(rng: &mut ChaCha8Rng) -> JetSample<f64> {
    let a = Mat2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let g = a.mul(&a.transpose());
    let g = Mat2::new(g.m[0][0] + 0.2, g.m[0][1], g.m[0][1], g.m[1][1] + 0.2);
    let off = rng.gen_range(-1.0..1.0);
    let s = Mat2::new(rng.gen_range(-1.5..1.5), off, off, rng.gen_range(-1.5..1.5));
    JetSample { first: g.m, shape: g.inverse().mul(&s).m, field: None }
}

fn jet_samples() -> Vec<JetSample<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    (0..10_000).map(|_| random_jet_sample(&mut rng)).collect()
}

fn area_preservation(samples: &[JetSample<f64>]) -> Outcome {
    let mut worst_trace = 0.0f64;
    for s in samples {
        let jb = complex_structure(&Mat2 { m: s.first }).mul(&Mat2 { m: s.shape });
        worst_trace = worst_trace.max(jb.trace().abs());
    }
    let jet = SurfaceJet::new(100, 100, samples.to_vec()).unwrap();
    let (l, r) = left_right_metrics(&jet).unwrap();
    let worst_det = (0..samples.len()).map(|i| (l.det(i) - r.det(i)).abs() / l.det(i)).fold(0.0f64, f64::max);
    outcome(
        worst_trace <= 1e-12 && worst_det <= 1e-10,
        format!("max |tr(JB)| {worst_trace:.2e}, max relative det mismatch {worst_det:.2e}"),
    )
}

fn curvature_identity(samples: &[JetSample<f64>]) -> Outcome {
    let mut worst = 0.0f64;
    for s in samples {
        let target = Mat2 { m: s.shape }.det() + 1.0;
        let (p, m) = shifted_dets(&s.first, &s.shape);
        worst = worst.max((p - target).abs()).max((m - target).abs());
    }
    // Shape operators with det B = -1 exactly, and just off it.
    let g = Mat2::new(1.3, 0.4, 0.4, 0.9);
    let shape_with_det = |d: f64| {
        let s = Mat2::new(0.7, 0.2, 0.2, (d * g.det() + 0.04) / 0.7);
        JetSample { first: g.m, shape: g.inverse().mul(&s).m, field: None }
    };
    let dets = [-1.0, -1.0 + 1e-6, 0.3, -1.0, -1.0 - 1e-6, -1.0];
    let jet = SurfaceJet::new(1, dets.len(), dets.iter().map(|&d| shape_with_det(d)).collect()).unwrap();
    let failed: Vec<usize> = transverse_check(&jet).failures.iter().map(|f| f.sample).collect();
    let expected = vec![0, 3, 5];
    outcome(
        worst <= 1e-12 && failed == expected,
        format!("max |det(-B±J) - (det B + 1)| {worst:.2e}; transverse failures at {failed:?} (expected {expected:?})"),
    )
}

fn model_round_trip() -> Outcome {
    let mut cases: Vec<(ModelSpacetime<f64>, &str, SingularityType<f64>)> = Vec::new();
    for theta in [PI / 3.0, PI / 2.0, PI, 1.5 * PI] {
        let mass = 1.0 - theta / (2.0 * PI);
        cases.push((ModelSpacetime::ConeP { angle: theta }, "c", SingularityType::MassiveParticle { angle: theta, mass }));
    }
    for mass in [0.5, -0.5, 1.0, -1.0] {
        cases.push((ModelSpacetime::TachyonT { mass }, "c", SingularityType::Tachyon { mass }));
    }
    let b = ModelSpacetime::BlackHoleB { mass: 1.3 };
    cases.push((b.clone(), "c", SingularityType::BtzFuture { length: 1.3 }));
    cases.push((b, "past", SingularityType::BtzPast { length: 1.3 }));
    cases.push((ModelSpacetime::GravitonG { sign: Sign::Positive }, "c", SingularityType::GravitonPositive));
    cases.push((ModelSpacetime::GravitonG { sign: Sign::Negative }, "c", SingularityType::GravitonNegative));
    cases.push((ModelSpacetime::ExtremeE, "future", SingularityType::ExtremeBtzFuture));
    cases.push((ModelSpacetime::ExtremeE, "past", SingularityType::ExtremeBtzPast));
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;
    let mut bad = Vec::new();
    for (model, line, want) in &cases {
        let got = link_of_line(model, line).and_then(|l| classify_singularity(&l));
        let ok = match (&got, want) {
            (Ok(SingularityType::MassiveParticle { angle, mass }), SingularityType::MassiveParticle { angle: a, mass: m }) => {
                close(*angle, *a) && close(*mass, *m)
            }
            (Ok(SingularityType::Tachyon { mass }), SingularityType::Tachyon { mass: m }) => close(*mass, *m),
            (Ok(SingularityType::BtzFuture { length }), SingularityType::BtzFuture { length: l })
            | (Ok(SingularityType::BtzPast { length }), SingularityType::BtzPast { length: l }) => close(*length, *l),
            (Ok(g), w) => g == w,
            (Err(_), _) => false,
        };
        if !ok {
            bad.push(format!("{model:?}/{line}: {got:?}"));
        }
    }
    outcome(bad.is_empty(), format!("{} models, mismatches {bad:?}", cases.len()))
}

fn sphere_classifier() -> Outcome {
    let corpus = common::corpus();
    let mut mislabels = Vec::new();
    let mut swaps = 0;
    for f in &corpus {
        let got = classify_hs_sphere(&f.sphere, true);
        match (&got, f.expected) {
            (Ok(c), Some(e)) if *c == e => {
                let back = classify_hs_sphere(&f.sphere.time_reverse(), true);
                if back.as_ref().ok() != Some(&e.time_reversed()) {
                    mislabels.push(format!("{} reversed: {back:?}", f.name));
                }
                swaps += 1;
            }
            (Err(Error::NotCausal(_)), None) => {}
            _ => mislabels.push(format!("{}: {got:?}", f.name)),
        }
    }
    let rejected = corpus.iter().filter(|f| f.expected.is_none()).count();
    outcome(
        mislabels.is_empty() && corpus.len() >= 12 && rejected >= 3,
        format!("{} spheres ({rejected} acausal), {swaps} reversals checked, mislabels {mislabels:?}", corpus.len()),
    )
}

fn blank_metric() -> MarkedHSMetric<f64> {
    MarkedHSMetric {
        vertices: vec![],
        sigma_geodesics: vec![],
        t_geodesics: vec![],
        t_components: vec![TComponent { width: 0.0, joins: TimelikeJoin::HToSigma }],
        metric_type: MetricType::Hyperbolic,
        hyperbolic_components: 1,
        sigma_components: 1,
        sigma_segments: vec![],
        sigma_boundary_lengths: vec![],
        sigma_convex: true,
    }
}

fn polyhedron_thresholds() -> Outcome {
    let eps = 0.01;
    let curve = |length| CurveRecord { length, degenerate: false, bounds: None };
    let vertex = |position, sum: f64| VertexRecord {
        position,
        groups: vec![AngleGroup { part: Part::Sigma, angles: vec![FaceAngle::Riemannian { angle: sum / 3.0 }; 3], lightlike: false }],
    };
    // (description, metric, condition selector, expected pass)
    type Pick = fn(&adscone::hs_surface::PolyhedronReport) -> bool;
    let mut cases: Vec<(String, MarkedHSMetric<f64>, Pick, bool)> = Vec::new();
    for (d, pass) in [(eps, true), (-eps, false)] {
        let mut m = blank_metric();
        m.sigma_geodesics = vec![curve(2.0 * PI + d)];
        cases.push((format!("Σ-geodesic 2π{d:+}"), m, |r| r.b.pass, pass));
        let mut m = blank_metric();
        m.t_geodesics = vec![curve(2.0 * PI - d)];
        cases.push((format!("T-geodesic 2π{:+}", -d), m, |r| r.c.pass, pass));
        let mut m = blank_metric();
        m.vertices = vec![vertex(PositionClass::Hyperbolic, 2.0 * PI - d)];
        cases.push((format!("H vertex 2π{:+}", -d), m, |r| r.a.pass, pass));
        let mut m = blank_metric();
        m.vertices = vec![vertex(PositionClass::InteriorSigma, 2.0 * PI + d)];
        cases.push((format!("Σ vertex 2π{d:+}"), m, |r| r.a.pass, pass));
        let mut m = blank_metric();
        m.metric_type = MetricType::Compact;
        m.hyperbolic_components = 0;
        m.sigma_components = 2;
        m.t_components = vec![TComponent { width: 0.5, joins: TimelikeJoin::SigmaPlusToSigmaMinus }];
        m.sigma_segments = vec![PI - d];
        cases.push((format!("segment π{:+}", -d), m, |r| r.d_c_segments.as_ref().is_some_and(|c| c.pass), pass));
    }
    let mut wrong = Vec::new();
    for (name, m, pick, want) in &cases {
        match check_polyhedron_conditions(m) {
            Ok(r) if pick(&r) == *want => {}
            other => wrong.push(format!("{name}: {:?}", other.map(|r| pick(&r)))),
        }
    }
    outcome(wrong.is_empty(), format!("{} threshold cases, wrong {wrong:?}", cases.len()))
}

/// Radial curve with `|z|^{1-m} = s·t + c`, saturating the bound at `s = 1`.
fn null_curve(m: f64, s: f64) -> Vec<ChartSample<f64>> {
    (0..=800)
        .map(|i| {
            let t = i as f64 * 1e-3;
            ChartSample { t, z: [(s * t + 0.05).powf(1.0 / (1.0 - m)), 0.0] }
        })
        .collect()
}

fn causal_speed() -> Outcome {
    let mut wrong = Vec::new();
    for m in [0.25, 0.5, 0.75] {
        let sat = causal_speed_check(&null_curve(m, 1.0), m).unwrap();
        let fast = causal_speed_check(&null_curve(m, 1.01), m).unwrap();
        if !sat || fast {
            wrong.push(format!("m={m}: saturating {sat}, inflated {fast}"));
        }
    }
    outcome(wrong.is_empty(), format!("m in {{0.25, 0.5, 0.75}}, wrong {wrong:?}"))
}

fn disk_isometry() -> Outcome {
    let apex = AdSPoint::from_timelike(Vec22::new(1.0, 0.2, 0.1, -0.3)).unwrap();
    let samples = cone_configuration(&apex, 100).unwrap();
    let dev = adscone::lr_metrics::disk_link_isometry_check(&apex, &samples).unwrap();
    outcome(dev <= 1e-6, format!("deviation {dev:.2e} over 100 radii in [0.1, π-0.1]"))
}

fn surgery_pipeline(etas: f64) -> Result<String, String> {
    let base = ModelSpacetime::ProductM { base: doubled_rhombus(PI, PI / 2.0).map_err(|e| e.to_string())? };
    let g = surgery_collision(&base, &collision_link(PI, &[etas, etas]), 0, 1.0).map_err(|e| e.to_string())?;
    let report = validate_geometric_data(&g).map_err(|e| e.to_string())?;
    if !report.valid {
        return Err(format!("invalid graph: {:?}", report.violations));
    }
    let h = assemble_holonomy(&g).map_err(|e| e.to_string())?;
    let residual = h.max_relation_residual().map_err(|e| e.to_string())?;
    let i = h.find_generator("after.p0").ok_or("no meridian generator")?;
    let pair = h.generator_value(i).map_err(|e| e.to_string())?;
    let err = [pair.left, pair.right]
        .iter()
        .map(|f| elliptic_angle(f).map_or(f64::INFINITY, |a| (a - PI).abs()))
        .fold(0.0f64, f64::max);
    if residual <= 1e-8 && err <= 1e-6 {
        Ok(format!("relations {residual:.2e}, meridian angle error {err:.2e}"))
    } else {
        Err(format!("relations {residual:.2e}, meridian angle error {err:.2e}"))
    }
}

fn end_to_end() -> Outcome {
    let stated = surgery_pipeline(2.0 * PI / 3.0);
    let feasible = surgery_pipeline(1.52 * PI);
    let detail = format!(
        "link (π; 2π/3, 2π/3): {}; supplementary link (π; 1.52π, 1.52π): {}",
        match &stated {
            Ok(s) => s.clone(),
            Err(e) => format!("rejected ({e})"),
        },
        match &feasible {
            Ok(s) => s.clone(),
            Err(e) => format!("failed ({e})"),
        }
    );
    outcome(stated.is_ok(), detail)
}

/// Four equilateral triangles of side `l` glued into a sphere.
fn tetrahedron(l: f64) -> ConeSurface<f64> {
    let alpha = triangle_angles_from_edges(l, l, l).unwrap()[0];
    let faces = vec![
        Face { vertices: [0, 1, 2], edges: [0, 1, 2] },
        Face { vertices: [0, 3, 1], edges: [3, 4, 0] },
        Face { vertices: [1, 3, 2], edges: [4, 5, 1] },
        Face { vertices: [0, 2, 3], edges: [2, 5, 3] },
    ];
    ConeSurface::new(ConeSurfaceSpec { targets: vec![Some(3.0 * alpha); 4], edge_lengths: vec![l; 6], faces }).unwrap()
}

fn rigidity() -> Outcome {
    let s = tetrahedron(1.2);
    let loops: Vec<FaceLoop> = (0..3).map(|c| vertex_loop(&s, 0, c).unwrap()).collect();
    let base: Vec<Proj2<f64>> = loops.iter().map(|l| holonomy_of_loop(&s, l).unwrap()).collect();
    let again = loops.iter().zip(&base).map(|(l, h)| holonomy_of_loop(&s, l).unwrap().distance(h)).fold(0.0f64, f64::max);
    let p = s.with_edge_length(0, 1.2 + 1e-3).unwrap();
    let moved = loops.iter().zip(&base).map(|(l, h)| holonomy_of_loop(&p, l).unwrap().distance(h)).fold(0.0f64, f64::max);
    outcome(moved >= 1e-6 && again <= 1e-10, format!("perturbed {moved:.2e}, recomputed {again:.2e}"))
}

fn main() {
    let samples = jet_samples();
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "flatness of the left/right connections", timed(Some(Duration::from_secs(10)), flatness)),
        (2, "holonomy factorization on cone meridians", timed(Some(Duration::from_secs(30)), factorization)),
        (3, "geodesic-flow invariance", timed(None, flow_invariance)),
        (4, "area preservation", timed(None, || area_preservation(&samples))),
        (5, "curvature identity and transversality", timed(None, || curvature_identity(&samples))),
        (6, "model-link round trip", timed(None, model_round_trip)),
        (7, "HS-sphere classifier", timed(None, sphere_classifier)),
        (8, "polyhedron thresholds", timed(None, polyhedron_thresholds)),
        (9, "causal-speed boundary", timed(None, causal_speed)),
        (10, "disk/link isometry", timed(None, disk_isometry)),
        (11, "end-to-end surgery pipeline", timed(Some(Duration::from_secs(120)), end_to_end)),
        (12, "cone-surface rigidity", timed(None, rigidity)),
    ];
    for (n, name, o) in &results {
        println!("criterion {n:>2} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let failing: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    if failing != KNOWN_UNATTAINABLE {
        eprintln!("failing criteria {failing:?} differ from the documented set {KNOWN_UNATTAINABLE:?}");
        std::process::exit(1);
    }
}
