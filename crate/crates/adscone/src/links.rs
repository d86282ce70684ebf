//! Singular line types read off link circles, masses and positivity predicates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isom::{Proj2, Sign};
use crate::linalg::{stabilizer_generator, Mat3, Mink3Vec};
use crate::rp1::{ArcKind, CircleKind, LinkCircle, Pencil};
use crate::scalar::Scalar;

/// Type of a singular line, determined by the link of one of its points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SingularityType<S> {
    MassiveParticle { angle: S, mass: S },
    Tachyon { mass: S },
    GravitonPositive,
    GravitonNegative,
    /// Future singularity of a black hole; `length` is the holonomy translation length.
    BtzFuture { length: S },
    /// Past singularity of a white hole.
    BtzPast { length: S },
    ExtremeBtzFuture,
    ExtremeBtzPast,
    RejectedDegree { degree: i64 },
    RejectedSpacelikeHyperbolic,
}

impl<S: Scalar> SingularityType<S> {
    /// Whether the line is admissible when only positive masses are allowed.
    pub fn has_positive_mass(&self) -> bool {
        match *self {
            Self::MassiveParticle { mass, .. } | Self::Tachyon { mass } => mass > S::zero(),
            Self::GravitonPositive => true,
            Self::GravitonNegative => false,
            _ => true,
        }
    }

    pub fn is_rejected(&self) -> bool {
        matches!(self, Self::RejectedDegree { .. } | Self::RejectedSpacelikeHyperbolic)
    }
}

/// Mass of a particle with cone angle `angle`: `1 - angle/2π`.
pub fn particle_mass<S: Scalar>(angle: S) -> S {
    S::one() - angle / (S::two() * S::PI())
}

pub fn classify_singularity<S: Scalar>(link: &LinkCircle<S>) -> Result<SingularityType<S>> {
    if link.arcs().is_empty() {
        return Err(Error::MalformedArcs("no arcs".into()));
    }
    let only = |kind| link.all_of(kind);
    Ok(match link.kind()? {
        CircleKind::Elliptic { angle } => SingularityType::MassiveParticle { angle, mass: particle_mass(angle) },
        CircleKind::Parabolic { degree: 0, .. } => {
            if only(ArcKind::Past) {
                SingularityType::ExtremeBtzFuture
            } else if only(ArcKind::Future) {
                SingularityType::ExtremeBtzPast
            } else {
                return Err(Error::MalformedArcs("degree-0 parabolic link with mixed arcs".into()));
            }
        }
        CircleKind::Parabolic { degree: 2, sign } => match sign {
            Sign::Positive => SingularityType::GravitonPositive,
            Sign::Negative => SingularityType::GravitonNegative,
        },
        CircleKind::Hyperbolic { degree: 0, length, .. } => {
            if only(ArcKind::Past) {
                SingularityType::BtzFuture { length }
            } else if only(ArcKind::Future) {
                SingularityType::BtzPast { length }
            } else if only(ArcKind::Spacelike) {
                SingularityType::RejectedSpacelikeHyperbolic
            } else {
                return Err(Error::MalformedArcs("degree-0 hyperbolic link with mixed arcs".into()));
            }
        }
        CircleKind::Hyperbolic { degree: 2, length, sign } => {
            let sign = sign.ok_or_else(|| Error::MalformedArcs("tachyon link without anchor".into()))?;
            let mass = if sign == Sign::Positive { length } else { -length };
            SingularityType::Tachyon { mass }
        }
        CircleKind::Parabolic { degree, .. } | CircleKind::Hyperbolic { degree, .. } => {
            if degree % 2 != 0 {
                return Err(Error::OddDegree(degree));
            }
            if degree < 0 {
                return Err(Error::NegativeDegree(degree));
            }
            SingularityType::RejectedDegree { degree }
        }
    })
}

fn plane_form<S: Scalar>(v: [S; 2]) -> S {
    -v[0] * v[0] + v[1] * v[1]
}

fn det2<S: Scalar>(a: [S; 2], b: [S; 2]) -> S {
    a[0] * b[1] - a[1] * b[0]
}

/// Cross-ratio `[a:b:c:d] = ((a-c)(b-d))/((a-b)(c-d))` of four lines in a plane.
///
/// Written with determinants so that vertical lines need no special case; on
/// slopes it agrees with the affine formula.
pub fn cross_ratio<S: Scalar>(a: [S; 2], b: [S; 2], c: [S; 2], d: [S; 2]) -> S {
    det2(a, c) * det2(b, d) / (det2(a, b) * det2(c, d))
}

/// Tachyon mass from the plane orthogonal to the singular line.
///
/// Vectors are given in coordinates where the form is `-a² + b²`; `l1, l2` span the
/// lightlike lines and `d1, d2` the traces of the two timelike planes.
pub fn tachyon_mass_from_planes<S: Scalar>(l1: [S; 2], l2: [S; 2], d1: [S; 2], d2: [S; 2]) -> Result<S> {
    let sq = |v: [S; 2]| v[0] * v[0] + v[1] * v[1];
    for l in [l1, l2] {
        if plane_form(l).abs() > S::tol(1e-9) * sq(l) || sq(l) == S::zero() {
            return Err(Error::Precondition("l1 and l2 must be lightlike".into()));
        }
    }
    if det2(l1, l2).abs() <= S::tol(1e-12) * sq(l1).sqrt() * sq(l2).sqrt() {
        return Err(Error::Precondition("l1 and l2 must be distinct".into()));
    }
    for d in [d1, d2] {
        if !(plane_form(d) < S::zero()) {
            return Err(Error::Precondition("d1 and d2 must be timelike".into()));
        }
    }
    let cr = cross_ratio(l1, d1, d2, l2);
    let cr = if cr >= S::one() { cr } else { cross_ratio(l1, d2, d1, l2) };
    if !(cr >= S::one() - S::tol(1e-12)) || !cr.is_finite() {
        return Err(Error::CrossRatio(cr.to_f64_lossy()));
    }
    Ok(cr.max(S::one()).ln())
}

/// Which lightlike half-plane bounded by the singular line is cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Future,
    Past,
}

/// Outcome of a causal positivity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Positivity {
    pub positive: bool,
    /// The gluing map is the identity on the cut: mass zero.
    pub degenerate: bool,
}

const POSITIVITY_SAMPLES: usize = 8;

fn classify_displacements<S: Scalar>(disp: impl Iterator<Item = Mink3Vec<S>>, side: Side) -> Positivity {
    let tol = S::tol(1e-12);
    let (mut all_future, mut all_past, mut all_zero) = (true, true, true);
    for d in disp {
        let size = d.euclid_sq().sqrt();
        if size <= tol {
            continue;
        }
        all_zero = false;
        let causal = d.dot(&d) <= tol * size;
        all_future &= causal && d.c[0] > S::zero();
        all_past &= causal && d.c[0] < S::zero();
    }
    if all_zero {
        return Positivity { positive: true, degenerate: true };
    }
    let positive = match side {
        Side::Future => all_future,
        Side::Past => all_past,
    };
    Positivity { positive, degenerate: false }
}

/// Causal positivity of a tachyon cut along a lightlike half-plane.
///
/// `glue` acts on the plane orthogonal to the singular line, in coordinates where
/// the form is `-a² + b²` and the future has `a > 0`. The cut half-plane is spanned
/// by the line and the lightlike ray `(1, 1)` (future side) or `(-1, -1)` (past
/// side). The map must preserve that ray. Displacements are sampled on an 8×8 grid
/// of the half-plane; the tachyon is positive when they are all future (future
/// side) or all past (past side).
pub fn positivity_from_gluing<S: Scalar>(glue: &Proj2<S>, side: Side) -> Result<Positivity> {
    let m = glue.matrix();
    let eta = |u: [S; 2], v: [S; 2]| -u[0] * v[0] + u[1] * v[1];
    let cols = [m.apply([S::one(), S::zero()]), m.apply([S::zero(), S::one()])];
    let iso = (eta(cols[0], cols[0]) + S::one()).abs() + (eta(cols[1], cols[1]) - S::one()).abs()
        + eta(cols[0], cols[1]).abs();
    if iso > S::tol(1e-9) || !(m.m[0][0] > S::zero()) {
        return Err(Error::GlueMap("not a time-orientation preserving isometry of the plane".into()));
    }
    let n = match side {
        Side::Future => [S::one(), S::one()],
        Side::Past => [-S::one(), -S::one()],
    };
    let gn = m.apply(n);
    if det2(gn, n).abs() > S::tol(1e-9) {
        return Err(Error::GlueMap("the cut ray is not preserved".into()));
    }
    let disp = (0..POSITIVITY_SAMPLES * POSITIVITY_SAMPLES).map(|i| {
        let t = S::c((i / POSITIVITY_SAMPLES + 1) as f64) / S::c(POSITIVITY_SAMPLES as f64);
        let p = [n[0] * t, n[1] * t];
        let q = m.apply(p);
        // The component along the line is fixed pointwise; only the normal part moves.
        Mink3Vec::new(q[0] - p[0], q[1] - p[1], S::zero())
    });
    Ok(classify_displacements(disp, side))
}

/// Causal positivity of a graviton.
///
/// `glue` is a Lorentz map of the tangent space R^{1,2} at a point of the singular
/// line, `null` a future vector along the line and `cut` a spacelike vector
/// orthogonal to it, so that the cut half-plane is `{t·null + s·cut : s ≥ 0}`.
/// The map glues the side adjacent to the causal future of the line onto the
/// other one; the graviton is positive when it moves every sampled point of the
/// half-plane into its causal future.
pub fn graviton_positivity_from_gluing<S: Scalar>(
    glue: &Mat3<S>,
    null: &Mink3Vec<S>,
    cut: &Mink3Vec<S>,
) -> Result<Positivity> {
    let tol = S::tol(1e-9);
    let scale = null.euclid_sq().sqrt();
    if null.dot(null).abs() > tol * scale * scale || !(null.c[0] > S::zero()) {
        return Err(Error::Precondition("null must be future lightlike".into()));
    }
    if null.dot(cut).abs() > tol * scale * cut.euclid_sq().sqrt() {
        return Err(Error::Precondition("cut must be orthogonal to the line".into()));
    }
    let gn = glue.apply(null).add(&null.scale(-S::one()));
    if gn.euclid_sq().sqrt() > tol * scale {
        return Err(Error::GlueMap("the singular line is not fixed pointwise".into()));
    }
    let gc = glue.apply(cut).add(&cut.scale(-S::one()));
    let along = mink_residual(&gc, null);
    if along > tol * cut.euclid_sq().sqrt() {
        return Err(Error::GlueMap("the cut half-plane is not preserved".into()));
    }
    let k = S::c(POSITIVITY_SAMPLES as f64);
    let disp = (0..POSITIVITY_SAMPLES * POSITIVITY_SAMPLES).map(|i| {
        let t = S::c((i % POSITIVITY_SAMPLES) as f64) / k - S::half();
        let s = S::c((i / POSITIVITY_SAMPLES + 1) as f64) / k;
        let p = null.scale(t).add(&cut.scale(s));
        glue.apply(&p).add(&p.scale(-S::one()))
    });
    Ok(classify_displacements(disp, Side::Future))
}

/// Euclidean distance from `v` to the line spanned by `n`.
fn mink_residual<S: Scalar>(v: &Mink3Vec<S>, n: &Mink3Vec<S>) -> S {
    let edot = (0..3).fold(S::zero(), |a, i| a + v.c[i] * n.c[i]);
    v.add(&n.scale(-edot / n.euclid_sq())).euclid_sq().sqrt()
}

/// Angle of a future null vector on the boundary circle of H²₊.
fn boundary_angle<S: Scalar>(p: &Mink3Vec<S>) -> S {
    p.c[2].atan2(p.c[1])
}

/// The element of the stabilizer of `x` in SO₀(1,2) sending the null ray `p1` to `p2`.
///
/// Follows the orbit of `p1` under the one-parameter stabilizer in both time
/// directions, tracking the unwrapped boundary angle, and bisects on the step
/// where it reaches the angle of `p2` modulo 2π.
pub fn stabilizer_element_mapping<S: Scalar>(x: &Mink3Vec<S>, p1: &Mink3Vec<S>, p2: &Mink3Vec<S>) -> Result<Mat3<S>> {
    let x = x.scale(x.euclid_sq().sqrt().recip());
    let gen = stabilizer_generator(&x);
    let two_pi = S::two() * S::PI();
    let target = boundary_angle(p2) - boundary_angle(p1);
    let angle_at = |t: S| boundary_angle(&gen.scale(t).exp().apply(p1));
    let wrap = |a: S| {
        let r = a.modulo(two_pi);
        if r > S::PI() {
            r - two_pi
        } else {
            r
        }
    };
    let cell = |u: S| ((u - target) / two_pi).floor();
    let step = S::c(0.01);
    for dir in [S::one(), -S::one()] {
        let (mut t, mut travelled, mut prev) = (S::zero(), S::zero(), boundary_angle(p1));
        if (travelled - target).modulo(two_pi) == S::zero() {
            return Ok(Mat3::identity());
        }
        while t.abs() < S::c(80.0) {
            let next_t = t + dir * step;
            let a = angle_at(next_t);
            let next = travelled + wrap(a - prev);
            if cell(next) != cell(travelled) {
                let crossing = cell(next).max(cell(travelled)) * two_pi + target;
                let f = |s: S| travelled + wrap(angle_at(s) - prev) - crossing;
                let (mut lo, mut hi) = (t, next_t);
                let flo_neg = f(lo) < S::zero();
                for _ in 0..100 {
                    let mid = (lo + hi) * S::half();
                    if (f(mid) < S::zero()) == flo_neg {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(gen.scale((lo + hi) * S::half()).exp());
            }
            t = next_t;
            travelled = next;
            prev = a;
        }
    }
    Err(Error::GlueMap("the second ray is not in the orbit of the first".into()))
}

/// Link at `x` of the singular point obtained by removing the wedge of rays from
/// `x` through the arc `[p1, p2]` of the boundary of H²₊ and gluing back by the
/// stabilizer element of `x` carrying `p1` to `p2`.
///
/// For `x` in H² this is a massive particle, on the boundary a graviton and in
/// de Sitter space a tachyon; the three cases form one continuous family.
pub fn wedge_link<S: Scalar>(x: &Mink3Vec<S>, p1: &Mink3Vec<S>, p2: &Mink3Vec<S>) -> Result<LinkCircle<S>> {
    let pencil = Pencil::at(*x)?;
    let g = stabilizer_element_mapping(x, p1, p2)?;
    let two_pi = S::two() * S::PI();
    let a1 = pencil.angle_of(p1);
    let a2 = pencil.angle_of(p2);
    let wedge = (a2 - a1).modulo(two_pi);
    // The generator carries the ray towards p2 around the surviving sector to the ray towards p1.
    pencil.glued_link(&g.inverse(), a2, a2 + two_pi - wedge)
}
