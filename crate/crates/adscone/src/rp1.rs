//! Real projective circles and the link circles of points of HS².
//!
//! A circle is described by its holonomy generator, a lift acting on the lifted
//! projective line with `h(x) > x` on the developing image. Angles are measured in
//! the coordinate of [`crate::isom`]: the ray at angle `φ` in a 2-plane is
//! `(cos φ, sin φ)`, so the central element `δ` shifts by `π` and a full turn of
//! rays is `δ²`. A regular point therefore has link holonomy `δ²` and angle `2π`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isom::{classify, degree_decomposition, translation_number, IsomClass, LiftedProj2, Proj2, Sign};
use crate::linalg::{classify_ray, HSPointClass, Mat2, Mat3, Mink3Vec, NULL_TOL};
use crate::scalar::Scalar;

const GRID: usize = 64;
const FIXED_TOL: f64 = 1e-9;

/// Developing image of a circle on the lifted line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain<S> {
    /// The whole lifted line; the holonomy acts freely.
    Full,
    /// An interval between two consecutive fixed points (degree zero).
    Interval { lo: S, hi: S },
}

/// An RP¹-structure on the circle, given by its holonomy generator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RP1Circle<S> {
    holonomy: LiftedProj2<S>,
    domain: Domain<S>,
}

impl<S: Scalar> RP1Circle<S> {
    pub fn new(holonomy: LiftedProj2<S>, domain: Domain<S>) -> Result<Self> {
        let tol = S::tol(FIXED_TOL);
        match domain {
            Domain::Full => {
                for i in 0..GRID {
                    let x = S::c(i as f64) * S::PI() / S::c(GRID as f64);
                    if !(holonomy.apply(x) - x > tol) {
                        return Err(Error::NotPositiveGenerator(format!("h(x) <= x at x = {x}")));
                    }
                }
            }
            Domain::Interval { lo, hi } => {
                if !(lo < hi) || hi - lo > S::PI() + tol {
                    return Err(Error::FixedPointData(format!("bad interval ]{lo}, {hi}[")));
                }
                let (k, g0) = degree_decomposition(&holonomy)?;
                if k != 0 {
                    return Err(Error::FixedPointData(format!("interval domain needs degree 0, got {k}")));
                }
                for end in [lo, hi] {
                    if (g0.apply(end) - end).abs() > tol * S::one().max(end.abs()) {
                        return Err(Error::FixedPointData(format!("{end} is not a fixed point")));
                    }
                }
                for i in 1..GRID {
                    let x = lo + (hi - lo) * S::c(i as f64) / S::c(GRID as f64);
                    if !(holonomy.apply(x) > x) {
                        return Err(Error::NotPositiveGenerator(format!("h(x) <= x at x = {x}")));
                    }
                }
            }
        }
        Ok(Self { holonomy, domain })
    }

    pub fn full(holonomy: LiftedProj2<S>) -> Result<Self> {
        Self::new(holonomy, Domain::Full)
    }

    pub fn holonomy(&self) -> &LiftedProj2<S> {
        &self.holonomy
    }

    pub fn domain(&self) -> Domain<S> {
        self.domain
    }

    /// Degree `k` in `h = δᵏ g0`, or `None` for elliptic holonomy.
    pub fn degree(&self) -> Option<i64> {
        degree_decomposition(&self.holonomy).ok().map(|(k, _)| k)
    }
}

/// Classification of a circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircleKind<S> {
    /// Angle in the ray-angle normalisation: `2π` for a regular point.
    Elliptic { angle: S },
    Parabolic { degree: i64, sign: Sign },
    /// `sign` is only defined once timelike arcs are known and the degree is positive.
    Hyperbolic { degree: i64, length: S, sign: Option<Sign> },
}

/// Sign of a parabolic fixed-point lift: positive iff `g0(x) <= x` everywhere.
fn lift_sign<S: Scalar>(g0: &LiftedProj2<S>) -> Result<Sign> {
    let tol = S::tol(FIXED_TOL);
    let (mut lo, mut hi) = (S::zero(), S::zero());
    for i in 0..GRID {
        let x = S::c(i as f64) * S::PI() / S::c(GRID as f64);
        let d = g0.apply(x) - x;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if hi <= tol && lo < -tol {
        Ok(Sign::Positive)
    } else if lo >= -tol && hi > tol {
        Ok(Sign::Negative)
    } else {
        Err(Error::FixedPointData("parabolic lift is not one-sided".into()))
    }
}

pub fn classify_circle<S: Scalar>(c: &RP1Circle<S>) -> Result<CircleKind<S>> {
    let h = c.holonomy();
    match classify(&h.g) {
        IsomClass::Elliptic { .. } | IsomClass::Identity => {
            Ok(CircleKind::Elliptic { angle: translation_number(h)? })
        }
        IsomClass::Parabolic { .. } => {
            let (degree, g0) = degree_decomposition(h)?;
            Ok(CircleKind::Parabolic { degree, sign: lift_sign(&g0)? })
        }
        IsomClass::Hyperbolic { length } => {
            let (degree, _) = degree_decomposition(h)?;
            Ok(CircleKind::Hyperbolic { degree, length, sign: None })
        }
    }
}

/// Causal type of a ray, or of an arc of rays.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcKind {
    Future,
    Past,
    Spacelike,
}

/// A half-open arc `[start, end)` of the developing coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc<S> {
    pub start: S,
    pub end: S,
    pub kind: ArcKind,
}

/// A circle together with the causal marking of its rays.
///
/// `anchor` is the left end of a future arc. It is a fixed point of the
/// degree-zero part of the holonomy and is absent for elliptic circles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkCircle<S> {
    circle: RP1Circle<S>,
    basepoint: HSPointClass,
    anchor: Option<S>,
    arcs: Vec<Arc<S>>,
}

impl<S: Scalar> LinkCircle<S> {
    pub fn circle(&self) -> &RP1Circle<S> {
        &self.circle
    }

    pub fn basepoint(&self) -> HSPointClass {
        self.basepoint
    }

    pub fn anchor(&self) -> Option<S> {
        self.anchor
    }

    /// Arcs covering one period.
    pub fn arcs(&self) -> &[Arc<S>] {
        &self.arcs
    }

    /// Rebuilds a link from serialized parts, rejecting arcs that disagree with the marking.
    pub fn from_parts(
        circle: RP1Circle<S>,
        basepoint: HSPointClass,
        anchor: Option<S>,
        arcs: &[Arc<S>],
    ) -> Result<Self> {
        let link = mark_timelike_arcs(&circle, basepoint, anchor)?;
        check_arcs(arcs)?;
        let tol = S::tol(1e-7);
        let same = arcs.len() == link.arcs.len()
            && arcs.iter().zip(&link.arcs).all(|(a, b)| {
                a.kind == b.kind && (a.start - b.start).abs() <= tol && (a.end - b.end).abs() <= tol
            });
        if !same {
            return Err(Error::MalformedArcs("arcs disagree with the holonomy and anchor".into()));
        }
        Ok(link)
    }

    /// Classification, with the hyperbolic sign read off the attraction pattern.
    ///
    /// A hyperbolic link of positive degree is positive when the anchor is an
    /// attracting fixed point of the degree-zero part of the holonomy.
    pub fn kind(&self) -> Result<CircleKind<S>> {
        let kind = classify_circle(&self.circle)?;
        match (kind, self.anchor) {
            (CircleKind::Hyperbolic { degree, length, .. }, Some(x0)) if degree > 0 => {
                let lambda = self.circle.holonomy.g.eigenvalue_on(x0);
                let sign = if lambda > S::one() { Sign::Positive } else { Sign::Negative };
                Ok(CircleKind::Hyperbolic { degree, length, sign: Some(sign) })
            }
            _ => Ok(kind),
        }
    }

    /// Causal type of the ray at developing coordinate `x`, or `None` on an arc boundary.
    pub fn kind_at(&self, x: S) -> Option<ArcKind> {
        let first = self.arcs.first()?;
        let period = self.arcs.last()?.end - first.start;
        let y = match self.circle.domain {
            Domain::Full => first.start + (x - first.start).modulo(period),
            Domain::Interval { .. } => x,
        };
        let tol = S::tol(1e-12);
        self.arcs
            .iter()
            .find(|a| y > a.start + tol && y < a.end - tol)
            .map(|a| a.kind)
    }

    /// Whether every arc is timelike of the given orientation.
    pub fn all_of(&self, kind: ArcKind) -> bool {
        self.arcs.iter().all(|a| a.kind == kind)
    }

    pub fn count(&self, kind: ArcKind) -> usize {
        self.arcs.iter().filter(|a| a.kind == kind).count()
    }
}

fn check_arcs<S: Scalar>(arcs: &[Arc<S>]) -> Result<()> {
    if arcs.is_empty() {
        return Err(Error::MalformedArcs("no arcs".into()));
    }
    for a in arcs {
        if !(a.start < a.end) {
            return Err(Error::MalformedArcs(format!("empty arc [{}, {})", a.start, a.end)));
        }
    }
    for w in arcs.windows(2) {
        if w[1].start < w[0].end - S::tol(1e-12) {
            return Err(Error::MalformedArcs("overlapping arcs".into()));
        }
    }
    Ok(())
}

fn is_fixed<S: Scalar>(g0: &LiftedProj2<S>, x: S) -> bool {
    (g0.apply(x) - x).abs() <= S::tol(1e-8) * S::one().max(x.abs())
}

/// Index `j` with `x = base + jπ`, if any.
fn pi_index<S: Scalar>(x: S, base: S) -> Option<i64> {
    let j = ((x - base) / S::PI()).round();
    ((x - base - j * S::PI()).abs() <= S::tol(1e-8) * S::one().max(x.abs())).then(|| j.to_i64().unwrap_or(0))
}

/// Marks the future, past and spacelike arcs of a circle seen as the link of a
/// point of class `basepoint`.
///
/// For hyperbolic holonomy over de Sitter points the lifted fixed points are
/// `x₀ < x₁ < δx₀ < δx₁ < …`; the arcs `δ²ⁱ]x₀,x₁[` are future, `δ²ⁱ⁺¹]x₀,x₁[`
/// past, and the rest spacelike. Over boundary points the arcs `]x₀, δx₀[`
/// alternate future and past.
pub fn mark_timelike_arcs<S: Scalar>(
    c: &RP1Circle<S>,
    basepoint: HSPointClass,
    anchor: Option<S>,
) -> Result<LinkCircle<S>> {
    let h = c.holonomy();
    let pi = S::PI();
    let class = classify(&h.g);
    let link = |arcs: Vec<Arc<S>>, anchor: Option<S>| Ok(LinkCircle { circle: *c, basepoint, anchor, arcs });
    match class {
        IsomClass::Elliptic { .. } | IsomClass::Identity => {
            let kind = match basepoint {
                HSPointClass::H2Plus => ArcKind::Future,
                HSPointClass::H2Minus => ArcKind::Past,
                other => {
                    return Err(Error::FixedPointData(format!("elliptic holonomy over a {other:?} point")))
                }
            };
            link(vec![Arc { start: S::zero(), end: h.apply(S::zero()), kind }], None)
        }
        IsomClass::Parabolic { .. } | IsomClass::Hyperbolic { .. } => {
            let parabolic = matches!(class, IsomClass::Parabolic { .. });
            match (parabolic, basepoint) {
                (true, HSPointClass::BoundaryPlus | HSPointClass::BoundaryMinus) => {}
                (false, HSPointClass::DS2) => {}
                (_, other) => {
                    return Err(Error::FixedPointData(format!("{class:?} holonomy over a {other:?} point")))
                }
            }
            let x0 = anchor.ok_or_else(|| Error::FixedPointData("missing anchor".into()))?;
            let (k, g0) = degree_decomposition(h)?;
            if !is_fixed(&g0, x0) {
                return Err(Error::FixedPointData(format!("anchor {x0} is not a fixed point")));
            }
            // Breakpoints of one δ-period starting at x₀, with the kind of the arc after each.
            let pattern: Vec<(S, usize)> = if parabolic {
                vec![(x0, 0)]
            } else {
                let x1 = other_fixed_point(&g0, x0)?;
                vec![(x0, 0), (x1, 1)]
            };
            let kind_of = |j: i64, slot: usize| match (slot, j.rem_euclid(2)) {
                (1, _) => ArcKind::Spacelike,
                (_, 0) => ArcKind::Future,
                _ => ArcKind::Past,
            };
            match c.domain() {
                Domain::Full => {
                    if k % 2 != 0 {
                        return Err(Error::OddDegree(k));
                    }
                    let mut breaks = Vec::new();
                    for j in 0..k {
                        for &(p, slot) in &pattern {
                            breaks.push((p + S::c(j as f64) * pi, kind_of(j, slot)));
                        }
                    }
                    let end = x0 + S::c(k as f64) * pi;
                    let arcs = (0..breaks.len())
                        .map(|i| Arc {
                            start: breaks[i].0,
                            end: breaks.get(i + 1).map_or(end, |b| b.0),
                            kind: breaks[i].1,
                        })
                        .collect();
                    link(arcs, Some(x0))
                }
                Domain::Interval { lo, hi } => {
                    let kind = pattern
                        .iter()
                        .find_map(|&(p, slot)| pi_index(lo, p).map(|j| kind_of(j, slot)))
                        .ok_or_else(|| {
                            Error::FixedPointData(format!("interval start {lo} is not a lift of a fixed point"))
                        })?;
                    link(vec![Arc { start: lo, end: hi, kind }], Some(x0))
                }
            }
        }
    }
}

/// The fixed point of a hyperbolic fixed-point lift in `]x₀, x₀ + π[`.
fn other_fixed_point<S: Scalar>(g0: &LiftedProj2<S>, x0: S) -> Result<S> {
    let pi = S::PI();
    g0.g.fixed_lines()
        .into_iter()
        .map(|f| {
            let j = ((x0 - f) / pi).floor() + S::one();
            f + j * pi
        })
        .find(|&f| f - x0 > S::tol(1e-8) && x0 + pi - f > S::tol(1e-8))
        .ok_or_else(|| Error::FixedPointData("hyperbolic element with a single fixed line".into()))
}

/// Causal type of a ray at a point of HS², including the lightlike boundary case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RayKind {
    Future,
    Past,
    Spacelike,
    Lightlike,
}

/// The circle of rays at a point `x` of HS², with a linear coordinate.
///
/// Rays from `x` are classes of vectors modulo `x`. The basis `(b₁, b₂)` is
/// Euclidean-orthonormal, orthogonal to `x`, and `det(x, b₁, b₂) > 0`, so the
/// coordinate orientation is invariant under SO₀(1,2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pencil<S> {
    x: Mink3Vec<S>,
    class: HSPointClass,
    b: [Mink3Vec<S>; 2],
}

impl<S: Scalar> Pencil<S> {
    pub fn at(x: Mink3Vec<S>) -> Result<Self> {
        let class = classify_ray(&x)?;
        let x = x.scale(x.euclid_sq().sqrt().recip());
        let edot = |a: &Mink3Vec<S>, b: &Mink3Vec<S>| (0..3).fold(S::zero(), |s, i| s + a.c[i] * b.c[i]);
        let axis = (0..3)
            .min_by(|&i, &j| x.c[i].abs().partial_cmp(&x.c[j].abs()).unwrap())
            .unwrap_or(0);
        let mut e = [S::zero(); 3];
        e[axis] = S::one();
        let e = Mink3Vec { c: e };
        let b1 = e.add(&x.scale(-edot(&e, &x)));
        let b1 = b1.scale(b1.euclid_sq().sqrt().recip());
        let b2 = Mink3Vec::new(
            x.c[1] * b1.c[2] - x.c[2] * b1.c[1],
            x.c[2] * b1.c[0] - x.c[0] * b1.c[2],
            x.c[0] * b1.c[1] - x.c[1] * b1.c[0],
        );
        Ok(Self { x, class, b: [b1, b2] })
    }

    pub fn point(&self) -> Mink3Vec<S> {
        self.x
    }

    pub fn class(&self) -> HSPointClass {
        self.class
    }

    pub fn direction(&self, phi: S) -> Mink3Vec<S> {
        self.b[0].scale(phi.cos()).add(&self.b[1].scale(phi.sin()))
    }

    /// Coordinates of `w` modulo `x` in the basis `(b₁, b₂)`.
    pub fn coords(&self, w: &Mink3Vec<S>) -> [S; 2] {
        let edot = |a: &Mink3Vec<S>| (0..3).fold(S::zero(), |s, i| s + a.c[i] * w.c[i]);
        [edot(&self.b[0]), edot(&self.b[1])]
    }

    /// Angle of the ray from `x` towards `w`, in `(-π, π]`.
    pub fn angle_of(&self, w: &Mink3Vec<S>) -> S {
        let [a, b] = self.coords(w);
        b.atan2(a)
    }

    pub fn ray_kind(&self, phi: S) -> RayKind {
        let w = self.direction(phi);
        let x = &self.x;
        let null = S::c(NULL_TOL).sqrt();
        match self.class {
            HSPointClass::H2Plus => RayKind::Future,
            HSPointClass::H2Minus => RayKind::Past,
            HSPointClass::DS2 => {
                let t = w.add(&x.scale(-w.dot(x) / x.dot(x)));
                let q = t.dot(&t);
                if q.abs() <= null {
                    RayKind::Lightlike
                } else if q > S::zero() {
                    RayKind::Spacelike
                } else if t.c[0] > S::zero() {
                    RayKind::Future
                } else {
                    RayKind::Past
                }
            }
            HSPointClass::BoundaryPlus | HSPointClass::BoundaryMinus => {
                let s = x.dot(&w);
                if s.abs() <= null {
                    RayKind::Lightlike
                } else if (s < S::zero()) == (self.class == HSPointClass::BoundaryPlus) {
                    RayKind::Future
                } else {
                    RayKind::Past
                }
            }
        }
    }

    /// Angles in `[0, 2π)` of the lightlike rays.
    pub fn null_angles(&self) -> Vec<S> {
        let two_pi = S::two() * S::PI();
        let x = &self.x;
        let mut out: Vec<S> = match self.class {
            HSPointClass::H2Plus | HSPointClass::H2Minus => Vec::new(),
            HSPointClass::BoundaryPlus | HSPointClass::BoundaryMinus => {
                let (a, b) = (x.dot(&self.b[0]), x.dot(&self.b[1]));
                let phi = a.atan2(-b);
                vec![phi, phi + S::PI()]
            }
            HSPointClass::DS2 => {
                let proj = |w: &Mink3Vec<S>| w.add(&x.scale(-w.dot(x) / x.dot(x)));
                let (p1, p2) = (proj(&self.b[0]), proj(&self.b[1]));
                let (a, b, c) = (p1.dot(&p1), p1.dot(&p2), p2.dot(&p2));
                let mean = (a + c) * S::half();
                let r = ((a - c) * S::half()).hypot(b);
                let psi = b.atan2((a - c) * S::half());
                let spread = (-mean / r).max(-S::one()).min(S::one()).acos();
                let (u, v) = ((psi + spread) * S::half(), (psi - spread) * S::half());
                vec![u, u + S::PI(), v, v + S::PI()]
            }
        };
        for a in out.iter_mut() {
            *a = a.modulo(two_pi);
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    /// Left end, in `[0, 2π)`, of a future arc of rays.
    pub fn anchor(&self) -> Option<S> {
        let nulls = self.null_angles();
        let two_pi = S::two() * S::PI();
        (0..nulls.len()).find_map(|i| {
            let next = if i + 1 < nulls.len() { nulls[i + 1] } else { nulls[0] + two_pi };
            (self.ray_kind((nulls[i] + next) * S::half()) == RayKind::Future).then_some(nulls[i])
        })
    }

    /// Matrix of a Lorentz map fixing the ray of `x` on the quotient by `x`.
    pub fn quotient_matrix(&self, g: &Mat3<S>) -> Result<Mat2<S>> {
        let gx = g.apply(&self.x);
        let mu = (0..3).fold(S::zero(), |s, i| s + gx.c[i] * self.x.c[i]);
        let off = gx.add(&self.x.scale(-mu));
        if !(mu > S::zero()) || off.euclid_sq().sqrt() > S::tol(1e-9) * mu {
            return Err(Error::GlueMap("map does not fix the base ray".into()));
        }
        let c0 = self.coords(&g.apply(&self.b[0]));
        let c1 = self.coords(&g.apply(&self.b[1]));
        Ok(Mat2::new(c0[0], c1[0], c0[1], c1[1]))
    }

    /// Link circle obtained by developing the rays from `start` to `end`, with
    /// the Lorentz map `g` carrying the ray at `start` to the ray at `end`.
    pub fn glued_link(&self, g: &Mat3<S>, start: S, end: S) -> Result<LinkCircle<S>> {
        let m = self.quotient_matrix(g)?;
        let img = m.apply([start.cos(), start.sin()]);
        let target = [end.cos(), end.sin()];
        let cross = img[0] * target[1] - img[1] * target[0];
        let dot = img[0] * target[0] + img[1] * target[1];
        if !(dot > S::zero()) || cross.abs() > S::tol(1e-8) * dot {
            return Err(Error::GlueMap("map does not carry the start ray to the end ray".into()));
        }
        let g = Proj2::new(m)?;
        let base = LiftedProj2::from_offset(g, 0);
        let k = ((end - base.apply(start)) / S::PI()).round().to_i64().unwrap_or(0);
        let circle = RP1Circle::full(LiftedProj2::from_offset(g, k))?;
        mark_timelike_arcs(&circle, self.class, self.anchor())
    }

    /// Degree-zero link on the arc of rays between two consecutive null directions,
    /// with holonomy generated by `g` or its inverse, whichever moves rays forward.
    pub fn interval_link(&self, g: &Mat3<S>, lo: S, hi: S) -> Result<LinkCircle<S>> {
        let g = Proj2::new(self.quotient_matrix(g)?)?;
        let mid = (lo + hi) * S::half();
        let mut h = LiftedProj2::from_offset(g, 0);
        if h.apply(mid) < mid {
            h = LiftedProj2::from_offset(g.inverse(), 0);
        }
        // Ray angles have period 2π; take the anchor lift at or just below the interval.
        let two_pi = S::two() * S::PI();
        let anchor = self.anchor().map(|a| a + ((lo - a) / two_pi + S::tol(1e-9)).floor() * two_pi);
        let circle = RP1Circle::new(h, Domain::Interval { lo, hi })?;
        mark_timelike_arcs(&circle, self.class, anchor)
    }
}
