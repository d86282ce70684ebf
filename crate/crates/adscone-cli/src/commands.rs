//! One function per subcommand; each maps an input document to a report and an exit code.

use adscone::cone_hyp::ConeSurfaceSpec;
use adscone::hs_surface::{check_polyhedron_conditions, classify_hs_sphere, MarkedHSMetric, SingularHSSurface};
use adscone::interactions::{assemble_holonomy, surgery_collision, validate_geometric_data, InteractionGraph};
use adscone::isom::{classify, LiftedProj2, Proj2};
use adscone::links::{classify_singularity, SingularityType};
use adscone::lr_metrics::{left_right_metrics, shifted_dets, transverse_check, SurfaceJet};
use adscone::rp1::{mark_timelike_arcs, Arc, Domain, LinkCircle, RP1Circle};
use adscone::linalg::{HSPointClass, Mat2};
use adscone::spacetimes::{achronal_graph_check, causal_speed_check, model_link, ChartSample, ModelSpacetime, PolarGrid};
use adscone::Error;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::doc::{envelope, read_document, render, short, InputError};
use crate::plot;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_REJECTED: i32 = 2;

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub positive: bool,
    pub json: bool,
    pub want_plot: bool,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    /// JSON report, also written to `--output` when requested.
    pub report: Option<Value>,
    pub plot: Option<String>,
}

impl Outcome {
    fn report(code: i32, schema: &str, payload: Value) -> Self {
        let v = envelope(schema, &payload);
        Self { code, stdout: render(&v), report: Some(v), plot: None }
    }

    pub fn input_error(msg: impl std::fmt::Display) -> Self {
        Self { code: EXIT_INPUT, stdout: String::new(), report: Some(json!({ "error": msg.to_string() })), plot: None }
    }
}

/// Library errors that point at malformed data rather than a geometric rejection.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::MalformedArcs(_)
            | Error::Triangulation(_)
            | Error::InvalidGraph(_)
            | Error::InvalidJet(_)
            | Error::BadLoop(_)
            | Error::BadDisk(_)
            | Error::FixedPointData(_)
            | Error::VertexRecord { .. }
            | Error::UnknownLine(_)
            | Error::GridTooCoarse(_)
            | Error::SamplingTooCoarse(_)
            | Error::LeavesDisk(_)
            | Error::BadDeterminant(_)
            | Error::BadLift { .. }
            | Error::NotOnQuadric(_)
            | Error::NotTangent(_)
    )
}

fn failure(schema: &str, e: &Error) -> Outcome {
    let code = if is_input_error(e) { EXIT_INPUT } else { EXIT_REJECTED };
    let mut o = Outcome::report(code, schema, json!({ "error": e.to_string() }));
    o.stdout = format!("{e}\n");
    o
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, schema: &str) -> Result<T, Outcome> {
    read_document(text, schema).map_err(|InputError(m)| Outcome::input_error(m))
}

macro_rules! input {
    ($text:expr, $schema:expr) => {
        match parse($text, $schema) {
            Ok(x) => x,
            Err(o) => return o,
        }
    };
}

macro_rules! attempt {
    ($schema:expr, $e:expr) => {
        match $e {
            Ok(x) => x,
            Err(err) => return failure($schema, &err),
        }
    };
}

// classify-link

/// A circle given either by a model singularity or by its holonomy and marking.
#[derive(Debug, Serialize, Deserialize)]
pub struct LinkDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<SingularityType<f64>>,
    /// Row-major SL(2,R) matrix of the holonomy generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<[f64; 4]>,
    /// Image of the angle 0 under the lifted generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<HSPointClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arcs: Option<Vec<Arc<f64>>>,
}

impl LinkDocument {
    fn build(&self) -> adscone::Result<LinkCircle<f64>> {
        if let Some(tag) = &self.model {
            return model_link(tag);
        }
        let (Some(m), Some(s), Some(bp)) = (self.holonomy, self.lift, self.basepoint) else {
            return Err(Error::MalformedArcs("a link needs `model` or `holonomy`, `lift` and `basepoint`".into()));
        };
        let h = LiftedProj2::new(Proj2::from_row_major(m)?, s)?;
        let circle = RP1Circle::new(h, self.domain.unwrap_or(Domain::Full))?;
        match &self.arcs {
            Some(arcs) => LinkCircle::from_parts(circle, bp, self.anchor, arcs),
            None => mark_timelike_arcs(&circle, bp, self.anchor),
        }
    }
}

pub fn singularity_line(t: &SingularityType<f64>) -> String {
    match *t {
        SingularityType::MassiveParticle { angle, mass } => format!("MassiveParticle θ={} m={}", short(angle), short(mass)),
        SingularityType::Tachyon { mass } => format!("Tachyon m={}", short(mass)),
        SingularityType::GravitonPositive => "GravitonPositive".into(),
        SingularityType::GravitonNegative => "GravitonNegative".into(),
        SingularityType::BtzFuture { length } => format!("BtzFuture ℓ={}", short(length)),
        SingularityType::BtzPast { length } => format!("BtzPast ℓ={}", short(length)),
        SingularityType::ExtremeBtzFuture => "ExtremeBtzFuture".into(),
        SingularityType::ExtremeBtzPast => "ExtremeBtzPast".into(),
        SingularityType::RejectedDegree { degree } => format!("RejectedDegree({degree})"),
        SingularityType::RejectedSpacelikeHyperbolic => "RejectedSpacelikeHyperbolic".into(),
    }
}

pub fn classify_link(text: &str, opts: Options) -> Outcome {
    const SCHEMA: &str = "singularity-report";
    let d: LinkDocument = input!(text, "link-circle");
    let link = attempt!(SCHEMA, d.build());
    let t = attempt!(SCHEMA, classify_singularity(&link));
    let line = singularity_line(&t);
    let mut code = if t.is_rejected() { EXIT_REJECTED } else { EXIT_OK };
    if opts.positive && !t.has_positive_mass() {
        code = EXIT_REJECTED;
    }
    let mut o = Outcome::report(
        code,
        SCHEMA,
        json!({ "singularity": t, "summary": line, "positive_mass": t.has_positive_mass() }),
    );
    if !opts.json {
        o.stdout = format!("{line}\n");
    }
    o
}

// classify-sphere

pub fn classify_sphere(text: &str, opts: Options) -> Outcome {
    const SCHEMA: &str = "sphere-report";
    let s: SingularHSSurface<f64> = input!(text, "hs-surface");
    let class = attempt!(SCHEMA, classify_hs_sphere(&s, opts.positive));
    let tag = format!("{class:?}");
    let mut o = Outcome::report(EXIT_OK, SCHEMA, json!({ "class": class, "tag": tag }));
    if !opts.json {
        o.stdout = format!("{tag}\n");
    }
    o
}

// check-polyhedron

pub fn check_polyhedron(text: &str, _opts: Options) -> Outcome {
    const SCHEMA: &str = "polyhedron-report";
    let m: MarkedHSMetric<f64> = input!(text, "marked-hs-metric");
    let r = attempt!(SCHEMA, check_polyhedron_conditions(&m));
    let code = if r.all_pass() { EXIT_OK } else { EXIT_REJECTED };
    Outcome::report(code, SCHEMA, json!({ "pass": r.all_pass(), "conditions": r }))
}

// trace-causal

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CausalDocument {
    Curve { mass: f64, samples: Vec<ChartSample<f64>> },
    Graph { mass: f64, grid: PolarGrid<f64> },
}

pub fn trace_causal(text: &str, opts: Options) -> Outcome {
    const SCHEMA: &str = "causal-report";
    let d: CausalDocument = input!(text, "causal-trace");
    match d {
        CausalDocument::Curve { mass, samples } => {
            let ok = attempt!(SCHEMA, causal_speed_check(&samples, mass));
            let mut times = Vec::new();
            let (mut speed, mut bound) = (Vec::new(), Vec::new());
            let mut worst: f64 = 0.0;
            for w in samples.windows(2) {
                let dt = (w[1].t - w[0].t).abs();
                let v = (w[1].z[0] - w[0].z[0]).hypot(w[1].z[1] - w[0].z[1]) / dt;
                let r = w[0].z[0].hypot(w[0].z[1]).max(w[1].z[0].hypot(w[1].z[1]));
                let b = r.powf(mass) / (1.0 - mass);
                times.push(w[0].t);
                speed.push(v);
                bound.push(b);
                if b > 0.0 {
                    worst = worst.max(v / b);
                }
            }
            let code = if ok { EXIT_OK } else { EXIT_REJECTED };
            let mut o = Outcome::report(code, SCHEMA, json!({ "causal": ok, "max_speed_ratio": worst, "steps": speed.len() }));
            if opts.want_plot {
                o.plot = Some(plot::lines(
                    "coordinate speed against the causal bound",
                    &times,
                    &[("speed", "steelblue", speed), ("bound", "firebrick", bound)],
                ));
            }
            o
        }
        CausalDocument::Graph { mass, grid } => {
            let ok = attempt!(SCHEMA, achronal_graph_check(&grid, mass));
            let code = if ok { EXIT_OK } else { EXIT_REJECTED };
            let mut o = Outcome::report(code, SCHEMA, json!({ "achronal": ok }));
            if opts.want_plot {
                o.plot = Some(plot::heatmap("graph values", grid.n_r, grid.n_theta, &grid.values));
            }
            o
        }
    }
}

// lr-metrics

pub fn lr_metrics(text: &str, opts: Options) -> Outcome {
    const SCHEMA: &str = "lr-metrics-report";
    let j: SurfaceJet<f64> = input!(text, "surface-jet");
    attempt!(SCHEMA, j.validate());
    let t = transverse_check(&j);
    if !t.transverse {
        return Outcome::report(EXIT_REJECTED, SCHEMA, json!({ "transverse": t }));
    }
    let (l, r) = attempt!(SCHEMA, left_right_metrics(&j));
    let dl: Vec<f64> = (0..l.forms.len()).map(|i| l.det(i)).collect();
    let dr: Vec<f64> = (0..r.forms.len()).map(|i| r.det(i)).collect();
    let mut area: f64 = 0.0;
    let mut curvature: f64 = 0.0;
    for (i, s) in j.samples.iter().enumerate() {
        area = area.max((dl[i] - dr[i]).abs() / dl[i].abs());
        let (p, m) = shifted_dets(&s.first, &s.shape);
        let det_b = Mat2 { m: s.shape }.det();
        curvature = curvature.max((p - (det_b + 1.0)).abs()).max((m - (det_b + 1.0)).abs());
    }
    let mut o = Outcome::report(
        EXIT_OK,
        SCHEMA,
        json!({
            "transverse": t,
            "left": l,
            "right": r,
            "max_relative_area_mismatch": area,
            "max_curvature_identity_residual": curvature,
        }),
    );
    if opts.want_plot {
        o.plot = Some(plot::heatmap("det of the left metric", j.rows, j.cols, &dl));
    }
    o
}

// surgery

#[derive(Debug, Serialize, Deserialize)]
pub struct SurgeryDocument {
    pub base: ConeSurfaceSpec<f64>,
    pub link: SingularHSSurface<f64>,
    pub at: usize,
    pub radius: f64,
}

pub fn surgery(text: &str, _opts: Options) -> Outcome {
    let d: SurgeryDocument = input!(text, "surgery-request");
    let base = ModelSpacetime::ProductM { base: d.base };
    let g = attempt!("interaction-graph", surgery_collision(&base, &d.link, d.at, d.radius));
    Outcome::report(EXIT_OK, "interaction-graph", serde_json::to_value(&g).unwrap_or(Value::Null))
}

// validate-graph

pub fn validate_graph(text: &str, _opts: Options) -> Outcome {
    const SCHEMA: &str = "graph-report";
    let g: InteractionGraph<f64> = input!(text, "interaction-graph");
    let r = attempt!(SCHEMA, validate_geometric_data(&g));
    let code = if r.valid { EXIT_OK } else { EXIT_REJECTED };
    Outcome::report(code, SCHEMA, serde_json::to_value(&r).unwrap_or(Value::Null))
}

// assemble-holonomy

pub fn assemble(text: &str, _opts: Options) -> Outcome {
    const SCHEMA: &str = "holonomy-report";
    let g: InteractionGraph<f64> = input!(text, "interaction-graph");
    let a = attempt!(SCHEMA, assemble_holonomy(&g));
    let mut table = Vec::new();
    for (i, gen) in a.generators.iter().enumerate() {
        let h = attempt!(SCHEMA, a.generator_value(i));
        table.push(json!({
            "vertex": gen.vertex,
            "name": gen.name,
            "left": h.left.matrix().row_major(),
            "right": h.right.matrix().row_major(),
            "left_class": classify(&h.left),
            "right_class": classify(&h.right),
        }));
    }
    let conj: Vec<Value> = a
        .edge_conjugators
        .iter()
        .map(|c| json!({ "left": c.left.matrix().row_major(), "right": c.right.matrix().row_major() }))
        .collect();
    let residual = attempt!(SCHEMA, a.max_relation_residual());
    Outcome::report(
        EXIT_OK,
        SCHEMA,
        json!({ "generators": table, "edge_conjugators": conj, "max_relation_residual": residual }),
    )
}
