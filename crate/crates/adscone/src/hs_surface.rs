//! Singular HS-surfaces as decompositions into hyperbolic and de Sitter regions,
//! the causality filter, the classification of causal positive HS-spheres, and
//! the checker for marked HS-metrics on boundaries of convex polyhedra.

use serde::{Deserialize, Serialize};

use crate::cone_hyp::{gauss_bonnet_from_angles, ConeSurface, ConeSurfaceSpec};
use crate::error::{Error, Result};
use crate::links::SingularityType;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeOrientation {
    Future,
    Past,
}

impl TimeOrientation {
    pub fn reversed(self) -> Self {
        match self {
            Self::Future => Self::Past,
            Self::Past => Self::Future,
        }
    }
}

/// A region of timelike rays: a hyperbolic surface with cone points and cusps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Deserialize<'de>"))]
pub struct HyperbolicRegion<S> {
    pub orientation: TimeOrientation,
    #[serde(default)]
    pub genus: u32,
    #[serde(default)]
    pub cone_angles: Vec<S>,
    #[serde(default)]
    pub cusps: usize,
    /// Optional triangulation; when present its cone points must match `cone_angles`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<ConeSurfaceSpec<S>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DsTopology {
    Disk,
    Annulus,
    Sphere,
}

impl DsTopology {
    pub fn boundary_circles(self) -> usize {
        match self {
            Self::Disk => 1,
            Self::Annulus => 2,
            Self::Sphere => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Deserialize<'de>"))]
pub struct DeSitterRegion<S> {
    pub topology: DsTopology,
    #[serde(default)]
    pub singularities: Vec<SingularityType<S>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionRef {
    Hyperbolic(usize),
    DeSitter(usize),
}

/// A circle of photons between a hyperbolic region and a de Sitter region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Deserialize<'de>"))]
pub struct PhotonCircle<S> {
    pub sides: [RegionRef; 2],
    #[serde(default)]
    pub gravitons: Vec<SingularityType<S>>,
}

/// An extreme parabolic singularity closing one end of a de Sitter region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicPoint {
    pub region: usize,
    pub orientation: TimeOrientation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Deserialize<'de>"))]
pub struct SingularHSSurface<S> {
    #[serde(default)]
    pub hyperbolic_regions: Vec<HyperbolicRegion<S>>,
    #[serde(default)]
    pub de_sitter_regions: Vec<DeSitterRegion<S>>,
    #[serde(default)]
    pub photon_circles: Vec<PhotonCircle<S>>,
    #[serde(default)]
    pub parabolic_points: Vec<ParabolicPoint>,
}

/// Where a de Sitter region's timelike leaves start or end.
fn end_of<S: Scalar>(t: &SingularityType<S>) -> Option<TimeOrientation> {
    match t {
        SingularityType::BtzFuture { .. } | SingularityType::ExtremeBtzFuture => Some(TimeOrientation::Future),
        SingularityType::BtzPast { .. } | SingularityType::ExtremeBtzPast => Some(TimeOrientation::Past),
        _ => None,
    }
}

impl<S: Scalar> SingularHSSurface<S> {
    /// Every singularity, with extreme parabolic points and cusps given their tags.
    pub fn singularities(&self) -> Vec<SingularityType<S>> {
        let mut out = Vec::new();
        for h in &self.hyperbolic_regions {
            out.extend(h.cone_angles.iter().map(|&a| SingularityType::MassiveParticle {
                angle: a,
                mass: crate::links::particle_mass(a),
            }));
            // A cusp is an extreme black hole seen from the hyperbolic side.
            let cusp = match h.orientation {
                TimeOrientation::Past => SingularityType::ExtremeBtzFuture,
                TimeOrientation::Future => SingularityType::ExtremeBtzPast,
            };
            out.extend(std::iter::repeat_n(cusp, h.cusps));
        }
        for d in &self.de_sitter_regions {
            out.extend(d.singularities.iter().copied());
        }
        for c in &self.photon_circles {
            out.extend(c.gravitons.iter().copied());
        }
        out.extend(self.parabolic_points.iter().map(|p| match p.orientation {
            TimeOrientation::Future => SingularityType::ExtremeBtzFuture,
            TimeOrientation::Past => SingularityType::ExtremeBtzPast,
        }));
        out
    }

    fn hyperbolic_boundary(&self, i: usize) -> usize {
        self.photon_circles.iter().flat_map(|c| c.sides).filter(|r| *r == RegionRef::Hyperbolic(i)).count()
    }

    fn ds_ends(&self, j: usize) -> usize {
        self.photon_circles.iter().flat_map(|c| c.sides).filter(|r| *r == RegionRef::DeSitter(j)).count()
            + self.parabolic_points.iter().filter(|p| p.region == j).count()
    }

    /// Structural checks: references, tag placement, boundary counts, connectedness.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSurface(m));
        let (nh, nd) = (self.hyperbolic_regions.len(), self.de_sitter_regions.len());
        if nh + nd == 0 {
            return bad("no regions".into());
        }
        for (k, c) in self.photon_circles.iter().enumerate() {
            let hyp = c.sides.iter().filter(|r| matches!(r, RegionRef::Hyperbolic(_))).count();
            if hyp != 1 {
                return bad(format!("photon circle {k} must separate a hyperbolic and a de Sitter region"));
            }
            for r in c.sides {
                match r {
                    RegionRef::Hyperbolic(i) if i >= nh => return bad(format!("photon circle {k}: no hyperbolic region {i}")),
                    RegionRef::DeSitter(j) if j >= nd => return bad(format!("photon circle {k}: no de Sitter region {j}")),
                    _ => {}
                }
            }
            if c.gravitons.iter().any(|g| !matches!(g, SingularityType::GravitonPositive | SingularityType::GravitonNegative)) {
                return bad(format!("photon circle {k} carries a non-graviton singularity"));
            }
        }
        for p in &self.parabolic_points {
            if p.region >= nd {
                return bad(format!("parabolic point in missing de Sitter region {}", p.region));
            }
        }
        for (j, d) in self.de_sitter_regions.iter().enumerate() {
            let allowed = |t: &SingularityType<S>| {
                matches!(
                    t,
                    SingularityType::Tachyon { .. }
                        | SingularityType::BtzFuture { .. }
                        | SingularityType::BtzPast { .. }
                        | SingularityType::RejectedDegree { .. }
                        | SingularityType::RejectedSpacelikeHyperbolic
                )
            };
            if !d.singularities.iter().all(allowed) {
                return bad(format!("de Sitter region {j} carries a singularity that cannot lie in de Sitter space"));
            }
            if self.ds_ends(j) != d.topology.boundary_circles() {
                return bad(format!(
                    "de Sitter region {j} is a {:?} but has {} boundary components",
                    d.topology,
                    self.ds_ends(j)
                ));
            }
        }
        for (i, h) in self.hyperbolic_regions.iter().enumerate() {
            if h.cone_angles.iter().any(|a| !(*a > S::zero())) {
                return bad(format!("hyperbolic region {i} has a non-positive cone angle"));
            }
            if h.genus == 0 && self.hyperbolic_boundary(i) == 0 {
                let angles: Vec<S> = h.cone_angles.iter().copied().chain(std::iter::repeat_n(S::zero(), h.cusps)).collect();
                gauss_bonnet_from_angles(&angles, 2)?;
            }
            if let Some(spec) = &h.surface {
                let surf = ConeSurface::with_boundary(spec.clone())?;
                let mut listed: Vec<S> = h.cone_angles.clone();
                let mut found: Vec<S> = surf
                    .cone_points()
                    .into_iter()
                    .filter(|(v, a)| !surf.is_boundary_vertex(*v) && *a > S::zero())
                    .map(|(_, a)| a)
                    .collect();
                listed.sort_by(|a, b| a.partial_cmp(b).unwrap());
                found.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let same = listed.len() == found.len()
                    && listed.iter().zip(&found).all(|(a, b)| (*a - *b).abs() <= S::tol(1e-9));
                if !same {
                    return bad(format!("hyperbolic region {i}: triangulation cone points differ from the listed ones"));
                }
            }
        }
        // Connectedness through photon circles.
        let mut parent: Vec<usize> = (0..nh + nd).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let idx = |r: RegionRef| match r {
            RegionRef::Hyperbolic(i) => i,
            RegionRef::DeSitter(j) => nh + j,
        };
        for c in &self.photon_circles {
            let (a, b) = (find(&mut parent, idx(c.sides[0])), find(&mut parent, idx(c.sides[1])));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        if (0..nh + nd).any(|x| find(&mut parent, x) != root) {
            return bad("regions do not form a connected surface".into());
        }
        Ok(())
    }

    /// Euler characteristic of the closed surface obtained by gluing the regions.
    pub fn euler_characteristic(&self) -> i64 {
        let hyp: i64 = (0..self.hyperbolic_regions.len())
            .map(|i| 2 - 2 * self.hyperbolic_regions[i].genus as i64 - self.hyperbolic_boundary(i) as i64)
            .sum();
        let ds: i64 = self.de_sitter_regions.iter().map(|d| 2 - d.topology.boundary_circles() as i64).sum();
        hyp + ds + self.parabolic_points.len() as i64
    }

    /// Past and future ends of a de Sitter region: boundary circles, parabolic points
    /// and black-hole singularities where its timelike leaves accumulate.
    fn ds_end_orientations(&self, j: usize) -> Vec<TimeOrientation> {
        let mut ends = Vec::new();
        for c in &self.photon_circles {
            if c.sides.contains(&RegionRef::DeSitter(j)) {
                for r in c.sides {
                    if let RegionRef::Hyperbolic(i) = r {
                        ends.push(self.hyperbolic_regions[i].orientation);
                    }
                }
            }
        }
        ends.extend(self.parabolic_points.iter().filter(|p| p.region == j).map(|p| p.orientation));
        ends.extend(self.de_sitter_regions[j].singularities.iter().filter_map(end_of));
        ends
    }

    /// Reverses the time orientation.
    pub fn time_reverse(&self) -> Self {
        let flip = |t: &SingularityType<S>| match *t {
            SingularityType::BtzFuture { length } => SingularityType::BtzPast { length },
            SingularityType::BtzPast { length } => SingularityType::BtzFuture { length },
            SingularityType::ExtremeBtzFuture => SingularityType::ExtremeBtzPast,
            SingularityType::ExtremeBtzPast => SingularityType::ExtremeBtzFuture,
            other => other,
        };
        let mut out = self.clone();
        for h in &mut out.hyperbolic_regions {
            h.orientation = h.orientation.reversed();
        }
        for d in &mut out.de_sitter_regions {
            d.singularities = d.singularities.iter().map(flip).collect();
        }
        for p in &mut out.parabolic_points {
            p.orientation = p.orientation.reversed();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalReport {
    pub causal: bool,
    pub diagnoses: Vec<String>,
}

/// Causality filter: rejects degree ≥ 4 and spacelike hyperbolic singularities
/// (the latter force closed timelike curves), and de Sitter regions whose ends do
/// not allow every timelike leaf to run from a past end to a future end.
pub fn check_causal<S: Scalar>(s: &SingularHSSurface<S>) -> Result<CausalReport> {
    s.validate()?;
    let mut diagnoses = Vec::new();
    for t in s.singularities() {
        match t {
            SingularityType::RejectedDegree { degree } => {
                diagnoses.push(format!("singularity of degree {degree}: excluded"))
            }
            SingularityType::RejectedSpacelikeHyperbolic => {
                diagnoses.push("spacelike hyperbolic singularity: closed timelike curves nearby (CTC)".into())
            }
            _ => {}
        }
    }
    for (j, d) in s.de_sitter_regions.iter().enumerate() {
        let black_holes = d.singularities.iter().filter(|t| matches!(t, SingularityType::BtzFuture { .. } | SingularityType::BtzPast { .. })).count();
        let expected = match d.topology {
            DsTopology::Sphere => 2,
            DsTopology::Disk => 1,
            DsTopology::Annulus => 0,
        };
        if black_holes != expected {
            diagnoses.push(format!(
                "de Sitter region {j}: a {:?} must contain {expected} timelike hyperbolic singularities, found {black_holes}",
                d.topology
            ));
            continue;
        }
        let ends = s.ds_end_orientations(j);
        let past = ends.iter().filter(|e| **e == TimeOrientation::Past).count();
        let future = ends.len() - past;
        if past != 1 || future != 1 {
            diagnoses.push(format!(
                "de Sitter region {j}: {past} past and {future} future ends; leaves cannot all run from past to future (CCC)"
            ));
        }
    }
    Ok(CausalReport { causal: diagnoses.is_empty(), diagnoses })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HSSphereClass {
    CausallyRegular,
    BlackHoleInteraction,
    WhiteHoleInteraction,
    BigBangOrCrunch,
    BHWHInteraction,
}

impl HSSphereClass {
    pub fn time_reversed(self) -> Self {
        match self {
            Self::BlackHoleInteraction => Self::WhiteHoleInteraction,
            Self::WhiteHoleInteraction => Self::BlackHoleInteraction,
            other => other,
        }
    }
}

/// Classifies a causal HS-sphere with at least three singularities.
pub fn classify_hs_sphere<S: Scalar>(s: &SingularHSSurface<S>, positive: bool) -> Result<HSSphereClass> {
    let report = check_causal(s)?;
    if s.euler_characteristic() != 2 {
        return Err(Error::InvalidSurface(format!("not a sphere: Euler characteristic {}", s.euler_characteristic())));
    }
    let sing = s.singularities();
    if sing.len() < 3 {
        return Err(Error::TooFewSingularities(sing.len()));
    }
    if !report.causal {
        return Err(Error::NotCausal(report.diagnoses.join("; ")));
    }
    if positive {
        let two_pi = S::two() * S::PI();
        let elliptic_ok = s.hyperbolic_regions.iter().flat_map(|h| &h.cone_angles).all(|a| *a < two_pi);
        if !elliptic_ok || !sing.iter().all(|t| t.has_positive_mass()) {
            return Err(Error::Precondition("a particle, tachyon or graviton has non-positive mass".into()));
        }
    }
    let count = |o| s.hyperbolic_regions.iter().filter(|h| h.orientation == o).count();
    let (past, future) = (count(TimeOrientation::Past), count(TimeOrientation::Future));
    if past > 1 || future > 1 {
        return Err(Error::InvalidSurface(format!("{past} past and {future} future hyperbolic regions")));
    }
    let bad = |m: &str| Err(Error::InvalidSurface(m.into()));
    let is_disk = |i: usize| s.hyperbolic_regions[i].genus == 0 && s.hyperbolic_boundary(i) == 1;
    match (past, future, s.de_sitter_regions.len()) {
        (1, 1, n) => {
            if n != 1 || s.de_sitter_regions[0].topology != DsTopology::Annulus {
                return bad("two hyperbolic regions need a single de Sitter annulus between them");
            }
            if !(0..2).all(is_disk) {
                return bad("hyperbolic regions adjacent to a de Sitter annulus must be disks");
            }
            Ok(HSSphereClass::CausallyRegular)
        }
        (p, f, 0) if p + f == 1 => {
            if s.hyperbolic_regions[0].genus != 0 || s.hyperbolic_boundary(0) != 0 {
                return bad("a lone hyperbolic region must be a sphere");
            }
            Ok(HSSphereClass::BigBangOrCrunch)
        }
        (p, f, _) if p + f == 1 => {
            let o = s.hyperbolic_regions[0].orientation;
            // Each de Sitter region is a disk closed by a black hole of the opposite time type.
            for d in &s.de_sitter_regions {
                if d.topology == DsTopology::Sphere {
                    return bad("a de Sitter sphere cannot meet a hyperbolic region");
                }
            }
            Ok(match o {
                TimeOrientation::Past => HSSphereClass::BlackHoleInteraction,
                TimeOrientation::Future => HSSphereClass::WhiteHoleInteraction,
            })
        }
        (0, 0, 1) => Ok(HSSphereClass::BHWHInteraction),
        _ => bad("region layout matches no case"),
    }
}

// Marked HS-metrics.

/// Position of a vertex relative to the hyperbolic part `H`, the spacelike part `Σ`
/// and the timelike part `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionClass {
    Hyperbolic,
    InteriorSigma,
    InteriorT,
    IsolatedSigma,
    /// In the closure of `Σ` and in `T`, with only spacelike rays from it.
    SpacelikeStar,
    ClosureConnectedT,
    ClosureDisconnectedT,
}

/// Face angle at a vertex: real for a Riemannian face, `kπ/2 + i·r` for a Lorentzian one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FaceAngle<S> {
    Riemannian { angle: S },
    Lorentzian { k: i64, r: S },
}

impl<S: Scalar> FaceAngle<S> {
    fn complex(&self) -> (S, S) {
        match *self {
            Self::Riemannian { angle } => (angle, S::zero()),
            Self::Lorentzian { k, r } => (S::c(k as f64) * S::FRAC_PI_2(), r),
        }
    }

    fn finite(&self) -> bool {
        let (a, b) = self.complex();
        a.is_finite() && b.is_finite()
    }
}

fn angle_sum<S: Scalar>(angles: &[FaceAngle<S>]) -> (S, S) {
    angles.iter().fold((S::zero(), S::zero()), |(a, b), x| {
        let (c, d) = x.complex();
        (a + c, b + d)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Sigma,
    T,
}

/// The faces at a vertex lying in one local component of `Σ` or `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Deserialize<'de>"))]
pub struct AngleGroup<S> {
    pub part: Part,
    pub angles: Vec<FaceAngle<S>>,
    #[serde(default)]
    pub lightlike: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord<S> {
    pub position: PositionClass,
    pub groups: Vec<AngleGroup<S>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Deserialize<'de>"))]
pub struct CurveRecord<S> {
    pub length: S,
    /// Caller's assertion that the curve bounds a degenerate domain in `T`.
    #[serde(default)]
    pub degenerate: bool,
    /// Component of `T` bounded by the curve, required when `degenerate` is set.
    #[serde(default)]
    pub bounds: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimelikeJoin {
    HToSigma,
    HPlusToHMinus,
    SigmaPlusToSigmaMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TComponent<S> {
    pub width: S,
    pub joins: TimelikeJoin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricType {
    Hyperbolic,
    BiHyperbolic,
    Compact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Deserialize<'de>"))]
pub struct MarkedHSMetric<S> {
    pub vertices: Vec<VertexRecord<S>>,
    #[serde(default)]
    pub sigma_geodesics: Vec<CurveRecord<S>>,
    #[serde(default)]
    pub t_geodesics: Vec<CurveRecord<S>>,
    #[serde(default)]
    pub t_components: Vec<TComponent<S>>,
    pub metric_type: MetricType,
    #[serde(default)]
    pub hyperbolic_components: usize,
    #[serde(default)]
    pub sigma_components: usize,
    /// Lengths of Σ-geodesic segments in `Σ₊` and `Σ₋` (compact type).
    #[serde(default)]
    pub sigma_segments: Vec<S>,
    /// Boundary lengths of `Σ₊` and `Σ₋` (compact type).
    #[serde(default)]
    pub sigma_boundary_lengths: Vec<S>,
    #[serde(default = "yes")]
    pub sigma_convex: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub pass: bool,
    pub failures: Vec<String>,
}

impl ConditionResult {
    fn from(failures: Vec<String>) -> Self {
        Self { pass: failures.is_empty(), failures }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyhedronReport {
    pub a: ConditionResult,
    pub b: ConditionResult,
    pub c: ConditionResult,
    /// Structural clause of the declared type.
    pub d: ConditionResult,
    /// Segment clause of the compact type, reported apart from `d`.
    pub d_c_segments: Option<ConditionResult>,
    pub e: Option<ConditionResult>,
}

impl PolyhedronReport {
    pub fn all_pass(&self) -> bool {
        [&self.a, &self.b, &self.c, &self.d].iter().all(|c| c.pass)
            && self.d_c_segments.as_ref().is_none_or(|c| c.pass)
            && self.e.as_ref().is_none_or(|c| c.pass)
    }
}

/// Angle-sum tolerance for equalities.
pub const SUM_TOL: f64 = 1e-9;

fn check_vertex<S: Scalar>(i: usize, v: &VertexRecord<S>) -> Result<Option<String>> {
    let err = |reason: &str| Err(Error::VertexRecord { vertex: i, reason: reason.into() });
    let tol = S::tol(SUM_TOL);
    let two_pi = S::two() * S::PI();
    let all: Vec<FaceAngle<S>> = v.groups.iter().flat_map(|g| g.angles.iter().copied()).collect();
    if !all.iter().all(FaceAngle::finite) {
        return err("non-finite angle");
    }
    let riemannian = all.iter().all(|a| matches!(a, FaceAngle::Riemannian { .. }));
    let groups_of = |p: Part| v.groups.iter().filter(|g| g.part == p).collect::<Vec<_>>();
    let fail = |m: String| Ok(Some(format!("vertex {i}: {m}")));
    match v.position {
        PositionClass::Hyperbolic | PositionClass::InteriorSigma => {
            if !riemannian {
                return err("Lorentzian face at a Riemannian vertex");
            }
            let (sum, _) = angle_sum(&all);
            let positive = v.position == PositionClass::Hyperbolic;
            if positive && !(sum < two_pi) {
                return fail(format!("angle sum {sum} is not below 2π"));
            }
            if !positive && !(sum > two_pi) {
                return fail(format!("angle sum {sum} is not above 2π"));
            }
            Ok(None)
        }
        PositionClass::InteriorT => {
            if all.iter().any(|a| matches!(a, FaceAngle::Riemannian { .. })) {
                return err("Riemannian face in the interior of T");
            }
            let (re, im) = angle_sum(&all);
            if (re - two_pi).abs() > tol || !(im > S::zero()) {
                return fail(format!("angle sum {re} + {im}i is not 2π + ir with r > 0"));
            }
            Ok(None)
        }
        PositionClass::IsolatedSigma => Ok(None),
        PositionClass::SpacelikeStar => {
            let (sig, t) = (groups_of(Part::Sigma), groups_of(Part::T));
            if sig.len() != 2 || t.len() != 2 {
                return err("needs two Σ groups and two T groups");
            }
            for g in sig {
                let (re, im) = angle_sum(&g.angles);
                if im.abs() > tol || re < -tol || !(re < S::PI()) {
                    return fail(format!("Σ angle sum {re} + {im}i is not in [0, π)"));
                }
            }
            for g in t {
                let (re, im) = angle_sum(&g.angles);
                if re.abs() > tol || im < -tol {
                    return fail(format!("T angle sum {re} + {im}i is not in iR≥0"));
                }
            }
            Ok(None)
        }
        PositionClass::ClosureConnectedT => {
            let (sig, t) = (groups_of(Part::Sigma), groups_of(Part::T));
            if t.len() != 1 {
                return err("needs exactly one T group");
            }
            let (re, im) = angle_sum(&t[0].angles);
            let r1 = -im;
            if (re - S::PI()).abs() > tol {
                return fail(format!("T angle sum {re} + {im}i is not π - ir"));
            }
            let sig_angles: Vec<FaceAngle<S>> = sig.iter().flat_map(|g| g.angles.iter().copied()).collect();
            let (r2, im2) = angle_sum(&sig_angles);
            if im2.abs() > tol || r2 < -tol {
                return fail(format!("Σ angle sum {r2} + {im2}i is not a non-negative real"));
            }
            if !(r1 > S::zero() || r2 < S::PI()) {
                return fail(format!("neither r₁ = {r1} > 0 nor r₂ = {r2} < π"));
            }
            Ok(None)
        }
        PositionClass::ClosureDisconnectedT => {
            let t = groups_of(Part::T);
            if t.len() < 2 {
                return err("needs at least two T groups");
            }
            for g in t {
                let (re, im) = angle_sum(&g.angles);
                let timelike = (re - S::PI()).abs() <= tol && im < S::zero();
                let lightlike = (re - S::PI()).abs() <= tol && im.abs() <= tol && g.lightlike;
                if !(timelike || lightlike) {
                    return fail(format!("T angle sum {re} + {im}i is not in π - iR>0 nor a lightlike π"));
                }
            }
            let (re, im) = angle_sum(&all);
            if (re - two_pi).abs() <= tol && im.abs() <= tol {
                return fail("total angle is 2π".into());
            }
            Ok(None)
        }
    }
}

fn check_curve<S: Scalar>(m: &MarkedHSMetric<S>, what: &str, i: usize, c: &CurveRecord<S>, above: bool) -> Result<Option<String>> {
    if !(c.length > S::zero()) || !c.length.is_finite() {
        return Err(Error::Precondition(format!("{what} {i}: length must be positive")));
    }
    if c.degenerate {
        let ok = c.bounds.and_then(|k| m.t_components.get(k)).is_some_and(|t| t.width == S::zero());
        if !ok {
            return Err(Error::Precondition(format!("{what} {i}: degenerate flag without an adjacent zero-width T component")));
        }
    }
    let two_pi = S::two() * S::PI();
    let equal = (c.length - two_pi).abs() <= S::tol(SUM_TOL);
    let strict = if above { c.length > two_pi } else { c.length < two_pi };
    Ok(if (strict && !equal) || (equal && c.degenerate) {
        None
    } else {
        Some(format!("{what} {i}: length {}", c.length))
    })
}

/// Checks the vertex, length and type conditions satisfied by marked HS-metrics
/// induced on convex polyhedra.
pub fn check_polyhedron_conditions<S: Scalar>(m: &MarkedHSMetric<S>) -> Result<PolyhedronReport> {
    let mut a = Vec::new();
    for (i, v) in m.vertices.iter().enumerate() {
        a.extend(check_vertex(i, v)?);
    }
    let mut b = Vec::new();
    for (i, c) in m.sigma_geodesics.iter().enumerate() {
        b.extend(check_curve(m, "closed Σ-geodesic", i, c, true)?);
    }
    let mut c = Vec::new();
    for (i, g) in m.t_geodesics.iter().enumerate() {
        c.extend(check_curve(m, "simple T-geodesic", i, g, false)?);
    }
    let joins_all = |j: TimelikeJoin| m.t_components.iter().all(|t| t.joins == j);
    let mut d = Vec::new();
    let (mut dc, mut e) = (None, None);
    match m.metric_type {
        MetricType::Hyperbolic => {
            if m.hyperbolic_components == 0 || !joins_all(TimelikeJoin::HToSigma) {
                d.push("hyperbolic type: timelike geodesics must join H to Σ".into());
            }
        }
        MetricType::BiHyperbolic => {
            if m.sigma_components != 0 || m.hyperbolic_components != 2 || !joins_all(TimelikeJoin::HPlusToHMinus) {
                d.push("bi-hyperbolic type: Σ empty, two H components joined by every timelike geodesic".into());
            }
        }
        MetricType::Compact => {
            if m.hyperbolic_components != 0 || m.sigma_components != 2 || !joins_all(TimelikeJoin::SigmaPlusToSigmaMinus) {
                d.push("compact type: H empty, two Σ components joined by every timelike geodesic".into());
            }
            let seg = m
                .sigma_segments
                .iter()
                .enumerate()
                .filter(|(_, l)| !(**l < S::PI()))
                .map(|(i, l)| format!("Σ-geodesic segment {i}: length {l} is not below π"))
                .collect();
            dc = Some(ConditionResult::from(seg));
            let mut ev: Vec<String> = m
                .sigma_boundary_lengths
                .iter()
                .enumerate()
                .filter(|(_, l)| !(**l < S::two() * S::PI()))
                .map(|(i, l)| format!("boundary {i} of Σ±: length {l} is not below 2π"))
                .collect();
            if !m.sigma_convex {
                ev.push("Σ± not convex".into());
            }
            e = Some(ConditionResult::from(ev));
        }
    }
    Ok(PolyhedronReport {
        a: ConditionResult::from(a),
        b: ConditionResult::from(b),
        c: ConditionResult::from(c),
        d: ConditionResult::from(d),
        d_c_segments: dc,
        e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn disk(o: TimeOrientation, angles: &[f64]) -> HyperbolicRegion<f64> {
        HyperbolicRegion { orientation: o, genus: 0, cone_angles: angles.to_vec(), cusps: 0, surface: None }
    }

    fn regular_collision(theta: f64, eta: [f64; 2]) -> SingularHSSurface<f64> {
        SingularHSSurface {
            hyperbolic_regions: vec![disk(TimeOrientation::Future, &[theta]), disk(TimeOrientation::Past, &eta)],
            de_sitter_regions: vec![DeSitterRegion { topology: DsTopology::Annulus, singularities: vec![] }],
            photon_circles: vec![
                PhotonCircle { sides: [RegionRef::Hyperbolic(0), RegionRef::DeSitter(0)], gravitons: vec![] },
                PhotonCircle { sides: [RegionRef::Hyperbolic(1), RegionRef::DeSitter(0)], gravitons: vec![] },
            ],
            parabolic_points: vec![],
        }
    }

    #[test]
    fn particle_collision_is_causally_regular() {
        let s = regular_collision(PI, [2.0 * PI / 3.0; 2]);
        assert_eq!(s.euler_characteristic(), 2);
        assert!(check_causal(&s).unwrap().causal);
        assert_eq!(classify_hs_sphere(&s, true).unwrap(), HSSphereClass::CausallyRegular);
        assert_eq!(classify_hs_sphere(&s.time_reverse(), true).unwrap(), HSSphereClass::CausallyRegular);
    }

    #[test]
    fn too_few_singularities() {
        let s = regular_collision(PI, [PI, PI]);
        let mut two = s.clone();
        two.hyperbolic_regions[1].cone_angles.pop();
        assert!(matches!(classify_hs_sphere(&two, true), Err(Error::TooFewSingularities(2))));
    }

    #[test]
    fn spacelike_hyperbolic_is_a_ctc() {
        let mut s = regular_collision(PI, [PI, PI]);
        s.de_sitter_regions[0].singularities.push(SingularityType::RejectedSpacelikeHyperbolic);
        let r = check_causal(&s).unwrap();
        assert!(!r.causal);
        assert!(r.diagnoses.iter().any(|d| d.contains("CTC")));
    }

    #[test]
    fn misplaced_black_hole_is_not_causal() {
        // A de Sitter disk whose only boundary faces a future region and whose black hole is also future.
        let s = SingularHSSurface {
            hyperbolic_regions: vec![disk(TimeOrientation::Future, &[1.0, 1.0, 1.0])],
            de_sitter_regions: vec![DeSitterRegion {
                topology: DsTopology::Disk,
                singularities: vec![SingularityType::BtzFuture { length: 1.0 }],
            }],
            photon_circles: vec![PhotonCircle { sides: [RegionRef::Hyperbolic(0), RegionRef::DeSitter(0)], gravitons: vec![] }],
            parabolic_points: vec![],
        };
        assert!(!check_causal(&s).unwrap().causal);
        let fixed = s.time_reverse();
        assert!(!check_causal(&fixed).unwrap().causal);
        let mut ok = s.clone();
        ok.de_sitter_regions[0].singularities = vec![SingularityType::BtzPast { length: 1.0 }];
        assert!(check_causal(&ok).unwrap().causal);
        assert_eq!(classify_hs_sphere(&ok, true).unwrap(), HSSphereClass::WhiteHoleInteraction);
        assert_eq!(classify_hs_sphere(&ok.time_reverse(), true).unwrap(), HSSphereClass::BlackHoleInteraction);
    }

    #[test]
    fn structural_errors() {
        let mut s = regular_collision(PI, [PI, PI]);
        s.de_sitter_regions[0].topology = DsTopology::Disk;
        assert!(matches!(check_causal(&s), Err(Error::InvalidSurface(_))));
        let mut s = regular_collision(PI, [PI, PI]);
        s.photon_circles[0].sides = [RegionRef::DeSitter(0), RegionRef::DeSitter(0)];
        assert!(s.validate().is_err());
        let mut s = regular_collision(PI, [PI, PI]);
        s.de_sitter_regions[0].singularities.push(SingularityType::GravitonPositive);
        assert!(s.validate().is_err());
    }

    fn vertex(position: PositionClass, groups: Vec<(Part, Vec<FaceAngle<f64>>)>) -> VertexRecord<f64> {
        VertexRecord {
            position,
            groups: groups.into_iter().map(|(part, angles)| AngleGroup { part, angles, lightlike: false }).collect(),
        }
    }

    fn riem(a: f64) -> FaceAngle<f64> {
        FaceAngle::Riemannian { angle: a }
    }

    fn metric(vertices: Vec<VertexRecord<f64>>) -> MarkedHSMetric<f64> {
        MarkedHSMetric {
            vertices,
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

    #[test]
    fn hyperbolic_vertex_needs_positive_curvature() {
        let over = 2.0 * PI + 0.1;
        let m = metric(vec![vertex(PositionClass::Hyperbolic, vec![(Part::Sigma, vec![riem(over / 3.0); 3])])]);
        let r = check_polyhedron_conditions(&m).unwrap();
        assert!(!r.a.pass && r.a.failures[0].starts_with("vertex 0"));
        let m = metric(vec![vertex(PositionClass::Hyperbolic, vec![(Part::Sigma, vec![riem(2.0); 3])])]);
        assert!(check_polyhedron_conditions(&m).unwrap().a.pass);
    }

    #[test]
    fn inconsistent_encoding_is_an_error() {
        let m = metric(vec![vertex(PositionClass::Hyperbolic, vec![(Part::Sigma, vec![FaceAngle::Lorentzian { k: 1, r: 0.3 }])])]);
        assert!(matches!(check_polyhedron_conditions(&m), Err(Error::VertexRecord { vertex: 0, .. })));
    }

    #[test]
    fn interior_t_vertex() {
        let ok = vertex(PositionClass::InteriorT, vec![(Part::T, vec![FaceAngle::Lorentzian { k: 2, r: 0.2 }; 2])]);
        let flat = vertex(PositionClass::InteriorT, vec![(Part::T, vec![FaceAngle::Lorentzian { k: 2, r: -0.2 }; 2])]);
        assert!(check_polyhedron_conditions(&metric(vec![ok])).unwrap().a.pass);
        assert!(!check_polyhedron_conditions(&metric(vec![flat])).unwrap().a.pass);
    }

    #[test]
    fn sigma_and_t_geodesic_lengths() {
        let mut m = metric(vec![]);
        m.sigma_geodesics = vec![CurveRecord { length: 5.0, degenerate: false, bounds: None }];
        assert!(!check_polyhedron_conditions(&m).unwrap().b.pass);
        m.t_geodesics = vec![CurveRecord { length: 2.0 * PI, degenerate: true, bounds: Some(0) }];
        assert!(check_polyhedron_conditions(&m).unwrap().c.pass);
        m.t_geodesics[0].bounds = None;
        assert!(check_polyhedron_conditions(&m).is_err());
    }

    #[test]
    fn compact_type_reports_segments_and_boundaries_apart() {
        let mut m = metric(vec![]);
        m.metric_type = MetricType::Compact;
        m.hyperbolic_components = 0;
        m.sigma_components = 2;
        m.t_components = vec![TComponent { width: 0.5, joins: TimelikeJoin::SigmaPlusToSigmaMinus }];
        m.sigma_segments = vec![PI + 0.01];
        m.sigma_boundary_lengths = vec![6.0, 6.1];
        let r = check_polyhedron_conditions(&m).unwrap();
        assert!(r.d.pass);
        assert!(!r.d_c_segments.unwrap().pass);
        assert!(r.e.unwrap().pass);
    }
}
