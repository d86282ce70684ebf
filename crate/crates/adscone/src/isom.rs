//! PSL(2,R), its universal cover acting on the lifted projective line, and left/right pairs.
//!
//! The lifted projective line uses the line-angle coordinate: the line spanned by
//! `(cos φ, sin φ)` has coordinate `φ`, and the central generator `δ` is `φ ↦ φ + π`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{mat_to_vec, vec_to_mat, AdSPoint, Mat2};
use crate::scalar::Scalar;

/// Trace tolerance separating parabolic from elliptic/hyperbolic classes.
pub const TRACE_TOL: f64 = 1e-9;
/// Iteration count for the orbit estimate of the translation number.
pub const TRANSLATION_ITERATIONS: usize = 1 << 14;
/// Slack allowed between the closed form and the orbit estimate.
pub const TRANSLATION_TOL: f64 = 1e-8;

/// Orientation sign of a parabolic element or of a link circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

/// An element of PSL(2,R) stored by its canonical SL(2,R) representative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proj2<S> {
    m: Mat2<S>,
}

impl<S: Scalar> Proj2<S> {
    /// Rescales `m` to determinant one and picks the canonical sign.
    pub fn new(m: Mat2<S>) -> Result<Self> {
        let d = m.det();
        if !(d > S::zero()) || !d.is_finite() {
            return Err(Error::BadDeterminant(d.to_f64_lossy()));
        }
        Ok(Self { m: canonical(m.scale(d.sqrt().recip())) })
    }

    pub fn from_row_major(r: [S; 4]) -> Result<Self> {
        Self::new(Mat2::from_row_major(r))
    }

    pub fn identity() -> Self {
        Self { m: Mat2::identity() }
    }

    pub fn matrix(&self) -> Mat2<S> {
        self.m
    }

    pub fn trace(&self) -> S {
        self.m.trace()
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self { m: canonical(self.m.mul(&o.m)) }
    }

    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.m.m;
        Self { m: canonical(Mat2::new(d, -b, -c, a)) }
    }

    pub fn conjugate_by(&self, a: &Self) -> Self {
        a.mul(self).mul(&a.inverse())
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { *self };
        (0..n.unsigned_abs()).fold(Self::identity(), |acc, _| acc.mul(&base))
    }

    /// Distance between canonical representatives (sign ambiguity already removed).
    pub fn distance(&self, o: &Self) -> S {
        let d1 = self.m.frobenius_dist(&o.m);
        let d2 = self.m.frobenius_dist(&o.m.scale(-S::one()));
        d1.min(d2)
    }

    pub fn is_identity(&self, tol: S) -> bool {
        self.distance(&Self::identity()) <= tol
    }

    /// Signed angle from the line `φ` to its image, in `(-π, π)`.
    ///
    /// Continuous in `φ` because the canonical representative never sends a
    /// vector to a negative multiple of itself.
    pub fn displacement(&self, phi: S) -> S {
        let v = [phi.cos(), phi.sin()];
        let w = self.m.apply(v);
        let cr = v[0] * w[1] - v[1] * w[0];
        let dt = v[0] * w[0] + v[1] * w[1];
        cr.atan2(dt)
    }

    /// Line angles in `[0, π)` of the fixed lines (eigenvectors with positive eigenvalue).
    pub fn fixed_lines(&self) -> Vec<S> {
        let tr = self.trace();
        let disc = tr * tr - S::c(4.0);
        if disc < -S::tol(TRACE_TOL) {
            return Vec::new();
        }
        let root = disc.max(S::zero()).sqrt();
        let mut out = Vec::new();
        for lam in [(tr + root) * S::half(), (tr - root) * S::half()] {
            if let Some(phi) = self.eigen_line(lam) {
                if !out.iter().any(|&p: &S| line_gap(p, phi) < S::tol(1e-10)) {
                    out.push(phi);
                }
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    fn eigen_line(&self, lam: S) -> Option<S> {
        let [[a, b], [c, d]] = self.m.m;
        let r1 = [a - lam, b];
        let r2 = [c, d - lam];
        let n1 = r1[0].hypot(r1[1]);
        let n2 = r2[0].hypot(r2[1]);
        let row = if n1 >= n2 { r1 } else { r2 };
        let v = if n1.max(n2) <= S::tol(1e-14) {
            return None;
        } else {
            [-row[1], row[0]]
        };
        Some(reduce_line(v[1].atan2(v[0])))
    }

    /// Eigenvalue on the fixed line `φ`; the line attracts iff it exceeds one.
    pub fn eigenvalue_on(&self, phi: S) -> S {
        let v = [phi.cos(), phi.sin()];
        let w = self.m.apply(v);
        w[0] * v[0] + w[1] * v[1]
    }
}

fn canonical<S: Scalar>(m: Mat2<S>) -> Mat2<S> {
    let tr = m.trace();
    let flip = if tr.abs() > S::tol(1e-14) {
        tr < S::zero()
    } else {
        let [[a, b], [c, _]] = m.m;
        let lead = [a, b, c].into_iter().find(|x| x.abs() > S::tol(1e-14)).unwrap_or(S::one());
        lead < S::zero()
    };
    if flip {
        m.scale(-S::one())
    } else {
        m
    }
}

fn reduce_line<S: Scalar>(phi: S) -> S {
    let p = S::PI();
    let mut r = phi % p;
    if r < S::zero() {
        r = r + p;
    }
    if r >= p {
        r = r - p;
    }
    r
}

fn line_gap<S: Scalar>(a: S, b: S) -> S {
    let d = reduce_line(a - b);
    d.min(S::PI() - d)
}

/// Conjugacy class of an element of PSL(2,R).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum IsomClass<S> {
    Identity,
    Elliptic { angle: S },
    Parabolic { sign: Sign },
    Hyperbolic { length: S },
}

impl<S: Scalar> IsomClass<S> {
    pub fn same_kind(&self, o: &Self) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(o)
    }
}

/// Elliptic/parabolic/hyperbolic classification.
///
/// Elliptic angles lie in `(0, 2π)` and satisfy `tr = 2cos(θ/2)` up to sign; the
/// rotation direction is the one for which the Möbius derivative at the fixed point
/// in the upper half-plane equals `e^{-iθ}`. With this choice `θ` is twice the
/// translation number of the lift with displacement in `(-π/2, π/2]`, modulo 2π.
pub fn classify<S: Scalar>(g: &Proj2<S>) -> IsomClass<S> {
    let tol = S::tol(TRACE_TOL);
    if g.is_identity(S::tol(1e-12)) {
        return IsomClass::Identity;
    }
    let tr = g.trace();
    let two = S::two();
    if (tr - two).abs() <= tol {
        // g = I + N with N nilpotent; the sign of the rank-one form v ↦ v × Nv
        // is the sign of the displacement of the fixed-point lift.
        let [[_, b], [c, _]] = g.m.m;
        let sign = if c - b < S::zero() { Sign::Positive } else { Sign::Negative };
        return IsomClass::Parabolic { sign };
    }
    if tr > two {
        return IsomClass::Hyperbolic { length: two * (tr / two).acosh() };
    }
    let c = g.m.m[1][0];
    let s = (S::c(4.0) - tr * tr).max(S::zero()).sqrt();
    let beta = (s * c.signum()).atan2(tr);
    let mut angle = two * beta;
    if angle <= S::zero() {
        angle = angle + two * S::PI();
    }
    IsomClass::Elliptic { angle }
}

/// An element of the universal cover: `g` together with the image `s` of the angle 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedProj2<S> {
    pub g: Proj2<S>,
    pub s: S,
}

impl<S: Scalar> LiftedProj2<S> {
    /// Validates that `s` lies over `g·[e₀]` and snaps it to the exact lift.
    pub fn new(g: Proj2<S>, s: S) -> Result<Self> {
        let base = g.displacement(S::zero());
        let k = ((s - base) / S::PI()).round();
        let exact = base + k * S::PI();
        let residual = (s - exact).abs();
        if residual > S::tol(1e-9) * S::one().max(s.abs()) {
            return Err(Error::BadLift { s: s.to_f64_lossy(), residual: residual.to_f64_lossy() });
        }
        Ok(Self { g, s: exact })
    }

    /// The lift `φ ↦ φ + displacement(φ) + kπ`.
    pub fn from_offset(g: Proj2<S>, k: i64) -> Self {
        let s = g.displacement(S::zero()) + S::c(k as f64) * S::PI();
        Self { g, s }
    }

    pub fn identity() -> Self {
        Self::from_offset(Proj2::identity(), 0)
    }

    /// The central generator `δ: φ ↦ φ + π`.
    pub fn delta() -> Self {
        Self::delta_pow(1)
    }

    pub fn delta_pow(k: i64) -> Self {
        Self::from_offset(Proj2::identity(), k)
    }

    /// Number of π-shifts relative to the lift with displacement in `(-π, π)`.
    pub fn offset(&self) -> i64 {
        let base = self.g.displacement(S::zero());
        ((self.s - base) / S::PI()).round().to_i64().unwrap_or(0)
    }

    pub fn apply(&self, phi: S) -> S {
        phi + self.g.displacement(phi) + S::c(self.offset() as f64) * S::PI()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let g = self.g.mul(&other.g);
        let s = self.apply(other.s);
        Self::new(g, s).unwrap_or_else(|_| Self::from_offset(g, 0))
    }

    pub fn inverse(&self) -> Self {
        let gi = self.g.inverse();
        let probe = Self::from_offset(gi, 0);
        let back = self.apply(probe.s);
        let j = (-back / S::PI()).round().to_i64().unwrap_or(0);
        Self::from_offset(gi, j)
    }

    pub fn conjugate_by(&self, a: &Self) -> Self {
        a.compose(self).compose(&a.inverse())
    }

    /// Compares two lifts by their values on a grid of one period.
    pub fn distance(&self, o: &Self) -> S {
        (0..16)
            .map(|i| S::c(i as f64) * S::PI() / S::c(16.0))
            .map(|phi| (self.apply(phi) - o.apply(phi)).abs())
            .fold(S::zero(), |a, b| a.max(b))
    }
}

/// Exact translation number, using conjugacy invariance.
fn translation_closed_form<S: Scalar>(h: &LiftedProj2<S>) -> S {
    let k = S::c(h.offset() as f64) * S::PI();
    match classify(&h.g) {
        IsomClass::Elliptic { .. } => {
            let tr = h.g.trace().min(S::two());
            let alpha = (tr / S::two()).acos();
            let dir = h.g.displacement(S::zero()).signum();
            dir * alpha + k
        }
        _ => k,
    }
}

/// Translation number `lim h̃ⁿ(0)/n` in line-angle units.
///
/// The orbit estimate after `2^14` steps (with one Richardson step) is used as a
/// consistency guard; its error is bounded by `4π/N`, which is far above the
/// exact value's accuracy, so the closed form is returned once the two agree.
pub fn translation_number<S: Scalar>(h: &LiftedProj2<S>) -> Result<S> {
    let exact = translation_closed_form(h);
    let n = TRANSLATION_ITERATIONS;
    let mut x = S::zero();
    let mut half = S::zero();
    for i in 1..=n {
        x = h.apply(x);
        if i == n / 2 {
            half = x / S::c((n / 2) as f64);
        }
    }
    let full = x / S::c(n as f64);
    let estimate = S::two() * full - half;
    let bound = S::c(4.0) * S::PI() / S::c(n as f64) + S::tol(TRANSLATION_TOL);
    if !estimate.is_finite() || (estimate - exact).abs() > bound {
        return Err(Error::NonConvergence {
            estimate: estimate.to_f64_lossy(),
            expected: exact.to_f64_lossy(),
        });
    }
    Ok(exact)
}

/// Writes `h = δᵏ · g0` with `g0` fixing points of the lifted line.
pub fn degree_decomposition<S: Scalar>(h: &LiftedProj2<S>) -> Result<(i64, LiftedProj2<S>)> {
    match classify(&h.g) {
        IsomClass::Elliptic { .. } => Err(Error::EllipticHasNoFixedPoint),
        _ => Ok((h.offset(), LiftedProj2::from_offset(h.g, 0))),
    }
}

/// An orientation and time-orientation preserving isometry of AdS₃,
/// acting on the SL(2,R) model by `X ↦ left · X · right⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsomPair<S> {
    pub left: Proj2<S>,
    pub right: Proj2<S>,
}

impl<S: Scalar> IsomPair<S> {
    pub fn new(left: Proj2<S>, right: Proj2<S>) -> Self {
        Self { left, right }
    }

    pub fn identity() -> Self {
        Self::new(Proj2::identity(), Proj2::identity())
    }

    pub fn compose(&self, o: &Self) -> Self {
        Self::new(self.left.mul(&o.left), self.right.mul(&o.right))
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.left.inverse(), self.right.inverse())
    }

    /// Image of a point; defined up to the antipodal map since the factors are projective.
    pub fn act(&self, x: &AdSPoint<S>) -> AdSPoint<S> {
        let m = self.left.matrix().mul(&x.to_sl2()).mul(&self.right.matrix().inverse());
        AdSPoint::from_sl2(&m).unwrap_or(*x)
    }

    /// Differential on an ambient tangent vector (linear in the SL(2,R) model).
    pub fn act_vec(&self, v: &crate::linalg::Vec22<S>) -> crate::linalg::Vec22<S> {
        let m = self.left.matrix().mul(&vec_to_mat(v)).mul(&self.right.matrix().inverse());
        mat_to_vec(&m)
    }

    pub fn distance(&self, o: &Self) -> S {
        self.left.distance(&o.left).max(self.right.distance(&o.right))
    }
}
