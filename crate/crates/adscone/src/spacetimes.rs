//! Model singular spacetimes, suspensions of HS-surfaces, static BTZ quotients, and
//! sampled causality checks in the singular chart `(z, t)` near a massive line.

use serde::{Deserialize, Serialize};

use crate::cone_hyp::ConeSurfaceSpec;
use crate::error::{Error, Result};
use crate::hs_surface::{check_causal, SingularHSSurface};
use crate::isom::{classify, IsomClass, IsomPair, Proj2, Sign};
use crate::linalg::{stabilizer_generator, AdSPoint, Mat2, Mat3, Mink3Vec, Vec22};
use crate::links::{graviton_positivity_from_gluing, SingularityType};
use crate::rp1::{LinkCircle, Pencil, RayKind};
use crate::scalar::Scalar;

/// Invariant spacelike geodesic, as a point and a unit tangent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geodesic<S> {
    pub point: Vec22<S>,
    pub tangent: Vec22<S>,
}

impl<S: Scalar> Geodesic<S> {
    pub fn at(&self, s: S) -> Vec22<S> {
        self.point * s.cosh() + self.tangent * s.sinh()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpacetime<S> {
    ConeP { angle: S },
    TachyonT { mass: S },
    BlackHoleB { mass: S },
    GravitonG { sign: Sign },
    ExtremeE,
    ProductM { base: ConeSurfaceSpec<S> },
    Suspension { link: SingularHSSurface<S> },
    BtzStatic { left: Proj2<S>, right: Proj2<S>, fixed: Geodesic<S>, translated: Geodesic<S> },
}

impl<S: Scalar> ModelSpacetime<S> {
    /// Identifiers of the singular lines and their types.
    pub fn singular_lines(&self) -> Vec<(String, SingularityType<S>)> {
        let particle = |a: S| SingularityType::MassiveParticle { angle: a, mass: crate::links::particle_mass(a) };
        match self {
            Self::ConeP { angle } => vec![("c".into(), particle(*angle))],
            Self::TachyonT { mass } => vec![("c".into(), SingularityType::Tachyon { mass: *mass })],
            Self::BlackHoleB { mass } => vec![
                ("future".into(), SingularityType::BtzFuture { length: *mass }),
                ("past".into(), SingularityType::BtzPast { length: *mass }),
            ],
            Self::GravitonG { sign } => vec![(
                "c".into(),
                match sign {
                    Sign::Positive => SingularityType::GravitonPositive,
                    Sign::Negative => SingularityType::GravitonNegative,
                },
            )],
            Self::ExtremeE => vec![
                ("future".into(), SingularityType::ExtremeBtzFuture),
                ("past".into(), SingularityType::ExtremeBtzPast),
            ],
            Self::ProductM { base } => base
                .targets
                .iter()
                .enumerate()
                .filter_map(|(v, t)| t.filter(|a| *a > S::zero()).map(|a| (format!("cone:{v}"), particle(a))))
                .collect(),
            Self::Suspension { link } => {
                link.singularities().into_iter().enumerate().map(|(i, t)| (format!("s{i}"), t)).collect()
            }
            Self::BtzStatic { .. } => Vec::new(),
        }
    }

    /// Whether the vertex of a suspension is an interaction (at least three singular lines).
    pub fn is_interaction(&self) -> bool {
        matches!(self, Self::Suspension { .. }) && self.singular_lines().len() >= 3
    }
}

/// Link circle of a singular line of a model spacetime.
pub fn link_of_line<S: Scalar>(m: &ModelSpacetime<S>, line: &str) -> Result<LinkCircle<S>> {
    let lines = m.singular_lines();
    let alias = match (m, line) {
        (ModelSpacetime::BlackHoleB { .. } | ModelSpacetime::ExtremeE, "c") => "future",
        (_, "axis") => "c",
        _ => line,
    };
    let (_, tag) = lines
        .into_iter()
        .find(|(name, _)| name == alias || (alias.parse::<usize>().is_ok() && name == &format!("cone:{alias}")))
        .ok_or_else(|| Error::UnknownLine(line.to_string()))?;
    model_link(&tag)
}

/// Link circle of the model singular line of a given type.
pub fn model_link<S: Scalar>(tag: &SingularityType<S>) -> Result<LinkCircle<S>> {
    let two_pi = S::two() * S::PI();
    match *tag {
        SingularityType::MassiveParticle { angle, .. } => {
            if !(angle > S::zero()) {
                return Err(Error::Precondition("cone angle must be positive".into()));
            }
            let x = Mink3Vec::new(S::one(), S::zero(), S::zero());
            let g = stabilizer_generator(&x).scale(angle).exp();
            Pencil::at(x)?.glued_link(&g, S::zero(), angle)
        }
        SingularityType::Tachyon { mass } => {
            if mass == S::zero() {
                return Err(Error::Precondition("tachyon mass must be non-zero".into()));
            }
            let x = Mink3Vec::new(S::zero(), S::one(), S::zero());
            let pencil = Pencil::at(x)?;
            let cut = pencil.anchor().ok_or_else(|| Error::Precondition("no future arc".into()))?;
            let gen = unit_speed_generator(&pencil)?;
            // Positive mass: the gluing pushes points of the future cut ray into their future.
            let mut g = gen.scale(mass.abs()).exp();
            if expands_ray(&pencil, &g, cut)? != (mass > S::zero()) {
                g = g.inverse();
            }
            pencil.glued_link(&g, cut, cut + two_pi)
        }
        SingularityType::BtzFuture { length } | SingularityType::BtzPast { length } => {
            if !(length > S::zero()) {
                return Err(Error::Precondition("black hole mass must be positive".into()));
            }
            let pencil = Pencil::at(Mink3Vec::new(S::zero(), S::one(), S::zero()))?;
            let g = unit_speed_generator(&pencil)?.scale(length).exp();
            let kind = if matches!(tag, SingularityType::BtzFuture { .. }) { RayKind::Past } else { RayKind::Future };
            let (lo, hi) = arc_of_kind(&pencil, kind)?;
            pencil.interval_link(&g, lo, hi)
        }
        SingularityType::ExtremeBtzFuture | SingularityType::ExtremeBtzPast => {
            let x = Mink3Vec::new(S::one(), S::one(), S::zero());
            let pencil = Pencil::at(x)?;
            let g = stabilizer_generator(&x).exp();
            let kind = if matches!(tag, SingularityType::ExtremeBtzFuture) { RayKind::Past } else { RayKind::Future };
            let (lo, hi) = arc_of_kind(&pencil, kind)?;
            pencil.interval_link(&g, lo, hi)
        }
        SingularityType::GravitonPositive | SingularityType::GravitonNegative => {
            let x = Mink3Vec::new(S::one(), S::one(), S::zero());
            let pencil = Pencil::at(x)?;
            let cut = pencil.anchor().ok_or_else(|| Error::Precondition("no future arc".into()))?;
            let mut g = stabilizer_generator(&x).exp();
            let positive = graviton_positivity_from_gluing(&g, &x, &pencil.direction(cut))?.positive;
            if positive != matches!(tag, SingularityType::GravitonPositive) {
                g = g.inverse();
            }
            pencil.glued_link(&g, cut, cut + two_pi)
        }
        SingularityType::RejectedDegree { .. } | SingularityType::RejectedSpacelikeHyperbolic => {
            Err(Error::NotCausal("no model spacetime for a rejected singularity".into()))
        }
    }
}

/// Boost generator at a de Sitter point, scaled so `exp(t·A)` has translation length `t`
/// on the circle of rays.
fn unit_speed_generator<S: Scalar>(pencil: &Pencil<S>) -> Result<Mat3<S>> {
    let gen = stabilizer_generator(&pencil.point());
    let q = Proj2::new(pencil.quotient_matrix(&gen.exp())?)?;
    match classify(&q) {
        IsomClass::Hyperbolic { length } => Ok(gen.scale(length.recip())),
        k => Err(Error::Precondition(format!("stabilizer is not a boost: {k:?}"))),
    }
}

fn expands_ray<S: Scalar>(pencil: &Pencil<S>, g: &Mat3<S>, phi: S) -> Result<bool> {
    let q = Proj2::new(pencil.quotient_matrix(g)?)?;
    Ok(q.eigenvalue_on(phi) > S::one())
}

/// Consecutive null angles bounding an arc of rays of the given kind.
fn arc_of_kind<S: Scalar>(pencil: &Pencil<S>, kind: RayKind) -> Result<(S, S)> {
    let nulls = pencil.null_angles();
    let two_pi = S::two() * S::PI();
    (0..nulls.len())
        .map(|i| (nulls[i], if i + 1 < nulls.len() { nulls[i + 1] } else { nulls[0] + two_pi }))
        .find(|(a, b)| pencil.ray_kind((*a + *b) * S::half()) == kind)
        .ok_or_else(|| Error::Precondition(format!("no {kind:?} arc at this point")))
}

/// Suspension of a causal HS-surface.
pub fn suspend<S: Scalar>(link: &SingularHSSurface<S>) -> Result<ModelSpacetime<S>> {
    let report = check_causal(link)?;
    if !report.causal {
        return Err(Error::NotCausal(report.diagnoses.join("; ")));
    }
    Ok(ModelSpacetime::Suspension { link: link.clone() })
}

/// A sample `(t, z)` of a curve in the singular chart; `z` is in the unit disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSample<S> {
    pub t: S,
    pub z: [S; 2],
}

/// Extra slack allowed on the causal speed bound.
pub const SPEED_SLACK: f64 = 1e-6;

/// Whether a sampled curve is causal near a massive line of mass `m`: the
/// coordinate speed is at most `|z|^m / (1 - m)`.
///
/// The bound is evaluated at the endpoint of each step where `|z|` is larger.
pub fn causal_speed_check<S: Scalar>(curve: &[ChartSample<S>], m: S) -> Result<bool> {
    if !(m < S::one()) {
        return Err(Error::Precondition("mass must be below 1".into()));
    }
    let alpha = S::one() - m;
    for (i, p) in curve.iter().enumerate() {
        if !(p.z[0].hypot(p.z[1]) < S::one()) {
            return Err(Error::LeavesDisk(i));
        }
    }
    let mut ok = true;
    for (i, w) in curve.windows(2).enumerate() {
        let dt = w[1].t - w[0].t;
        if dt.abs() > S::tol(1e-3) * (S::one() + S::tol(1e-9)) {
            return Err(Error::SamplingTooCoarse(dt.to_f64_lossy()));
        }
        if dt == S::zero() {
            return Err(Error::Precondition(format!("repeated time at sample {i}")));
        }
        let speed = (w[1].z[0] - w[0].z[0]).hypot(w[1].z[1] - w[0].z[1]) / dt.abs();
        let r = w[0].z[0].hypot(w[0].z[1]).max(w[1].z[0].hypot(w[1].z[1]));
        if speed > r.powf(m) / alpha + S::tol(SPEED_SLACK) {
            ok = false;
        }
    }
    Ok(ok)
}

/// Samples of a function on a polar grid `r_i = r_min + i·dr`, `θ_j = 2πj/n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid<S> {
    pub r_min: S,
    pub r_max: S,
    pub n_r: usize,
    pub n_theta: usize,
    /// Row-major: `values[i * n_theta + j]`.
    pub values: Vec<S>,
}

impl<S: Scalar> PolarGrid<S> {
    pub fn sample(r_min: S, r_max: S, n_r: usize, n_theta: usize, f: impl Fn([S; 2]) -> S) -> Self {
        let mut values = Vec::with_capacity(n_r * n_theta);
        for i in 0..n_r {
            let r = Self::radius(r_min, r_max, n_r, i);
            for j in 0..n_theta {
                let th = S::two() * S::PI() * S::c(j as f64) / S::c(n_theta as f64);
                values.push(f([r * th.cos(), r * th.sin()]));
            }
        }
        Self { r_min, r_max, n_r, n_theta, values }
    }

    fn radius(r_min: S, r_max: S, n_r: usize, i: usize) -> S {
        r_min + (r_max - r_min) * S::c(i as f64) / S::c((n_r.max(2) - 1) as f64)
    }

    fn dr(&self) -> S {
        (self.r_max - self.r_min) / S::c((self.n_r.max(2) - 1) as f64)
    }
}

/// Whether a graph `t = f(z)` is achronal near a massive line: the differential of
/// `f` has norm below `(1 - m)|z|^{-m}` at every interior grid node.
pub fn achronal_graph_check<S: Scalar>(grid: &PolarGrid<S>, m: S) -> Result<bool> {
    if !(grid.r_min > S::zero()) || !(grid.r_max < S::one()) || grid.r_max <= grid.r_min {
        return Err(Error::Precondition("grid must lie in 0 < r < 1 and avoid z = 0".into()));
    }
    if grid.values.len() != grid.n_r * grid.n_theta || grid.n_r < 3 || grid.n_theta < 3 {
        return Err(Error::Precondition("grid shape does not match its values".into()));
    }
    let dr = grid.dr();
    let dth = S::two() * S::PI() / S::c(grid.n_theta as f64);
    let spacing = dr.max(grid.r_max * dth);
    if spacing > S::tol(1e-2) {
        return Err(Error::GridTooCoarse(spacing.to_f64_lossy()));
    }
    let alpha = S::one() - m;
    let at = |i: usize, j: usize| grid.values[i * grid.n_theta + j % grid.n_theta];
    for i in 1..grid.n_r - 1 {
        let r = PolarGrid::radius(grid.r_min, grid.r_max, grid.n_r, i);
        for j in 0..grid.n_theta {
            let fr = (at(i + 1, j) - at(i - 1, j)) / (S::two() * dr);
            let ft = (at(i, j + 1) - at(i, j + grid.n_theta - 1)) / (S::two() * dth * r);
            if !(fr.hypot(ft) < alpha * r.powf(-m)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Eigenbasis `A` with `A⁻¹ g A = diag(λ, 1/λ)`, `λ > 1`, `det A = 1`.
fn hyperbolic_frame<S: Scalar>(g: &Proj2<S>) -> Result<(Mat2<S>, S)> {
    let mut m = g.matrix();
    if m.trace() < S::zero() {
        m = m.scale(-S::one());
    }
    let tr = m.trace();
    if !(tr > S::two() + S::tol(1e-12)) {
        return Err(Error::Precondition("element is not hyperbolic".into()));
    }
    let lambda = (tr + (tr * tr - S::c(4.0)).sqrt()) * S::half();
    let [[a, b], [c, d]] = m.m;
    let eig = |l: S| {
        // Kernel of m - l·I, from whichever row is larger.
        if (a - l).abs() + b.abs() >= c.abs() + (d - l).abs() {
            [b, l - a]
        } else {
            [l - d, c]
        }
    };
    let (u, v) = (eig(lambda), eig(lambda.recip()));
    let det = u[0] * v[1] - u[1] * v[0];
    let k = det.abs().sqrt().recip();
    let sv = if det < S::zero() { -k } else { k };
    Ok((Mat2::new(u[0] * k, v[0] * sv, u[1] * k, v[1] * sv), lambda))
}

/// Static BTZ quotient data for a pair of hyperbolic elements with equal translation
/// lengths: the geodesic fixed pointwise by the pair and the one it translates.
pub fn btz_static<S: Scalar>(left: &Proj2<S>, right: &Proj2<S>) -> Result<ModelSpacetime<S>> {
    let len = |g: &Proj2<S>| match classify(g) {
        IsomClass::Hyperbolic { length } => Ok(length),
        k => Err(Error::Precondition(format!("not hyperbolic: {k:?}"))),
    };
    let (l1, l2) = (len(left)?, len(right)?);
    if (l1 - l2).abs() > S::tol(1e-9) {
        return Err(Error::Precondition(format!("translation lengths differ: {l1} and {l2}")));
    }
    let (a, _) = hyperbolic_frame(left)?;
    let (b, _) = hyperbolic_frame(right)?;
    // Fixed: a·diag(e^s, e^-s)·b⁻¹. Translated: a·[[0, e^u], [-e^-u, 0]]·b⁻¹.
    let frame = IsomPair::new(Proj2::new(a)?, Proj2::new(b)?);
    let image = |v: Vec22<S>| frame.act_vec(&v);
    let fixed = Geodesic { point: image(Vec22::basis(0)), tangent: image(Vec22::basis(2)) };
    let translated = Geodesic { point: image(Vec22::basis(1)), tangent: image(Vec22::basis(3)) };
    let out = ModelSpacetime::BtzStatic { left: *left, right: *right, fixed, translated };
    btz_duality_defect(&out)?;
    Ok(out)
}

/// Largest deviation from `π/2` of the timelike distance between sampled points of
/// the fixed and translated geodesics, after checking the segments are timelike.
pub fn btz_duality_defect<S: Scalar>(m: &ModelSpacetime<S>) -> Result<S> {
    let ModelSpacetime::BtzStatic { fixed, translated, .. } = m else {
        return Err(Error::Precondition("not a static BTZ model".into()));
    };
    let mut worst = S::zero();
    for i in 0..7 {
        for j in 0..7 {
            let p = fixed.at(S::c(i as f64 - 3.0) * S::half());
            let q = translated.at(S::c(j as f64 - 3.0) * S::half());
            AdSPoint::new(p)?;
            AdSPoint::new(q)?;
            let c = p.dot(&q);
            // Tangent at p of the segment towards q.
            let dir = q + p * c;
            if !(dir.norm_sq() < S::zero()) {
                return Err(Error::Precondition("points are not joined by a timelike segment".into()));
            }
            let d = (-c).max(-S::one()).min(S::one()).acos();
            worst = worst.max((d - S::FRAC_PI_2()).abs());
        }
    }
    Ok(worst)
}
