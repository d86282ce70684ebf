//! Flat ambient spaces R^{2,2} and R^{1,2}, the AdS quadric and its geodesics.
//!
//! Conventions:
//! - `<x,y> = -x0 y0 - x1 y1 + x2 y2 + x3 y3` on R^{2,2}; AdS is `<x,x> = -1`.
//! - The future cone is the one containing the unit vector field
//!   `T(x) = (-x1, x0, -x3, x2)`, i.e. counterclockwise rotation in the (x0,x1) plane.
//! - A frame `(e0, e1, e2)` at `x` is positively oriented when the Euclidean
//!   determinant of `(x, e0, e1, e2)` is positive.
//! - `x ↦ [[x0+x2, x1+x3], [x3-x1, x0-x2]]` identifies AdS with SL(2,R);
//!   `det = -<x,x>`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tolerance for staying on the quadric after arithmetic.
pub const QUADRIC_TOL: f64 = 1e-12;
/// Relative tolerance under which a Minkowski ray counts as lightlike.
pub const NULL_TOL: f64 = 1e-10;

const SIGN22: [f64; 4] = [-1.0, -1.0, 1.0, 1.0];

/// A vector of R^{2,2}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec22<S> {
    pub c: [S; 4],
}

impl<S: Scalar> Vec22<S> {
    pub fn new(x0: S, x1: S, x2: S, x3: S) -> Self {
        Self { c: [x0, x1, x2, x3] }
    }

    pub fn zero() -> Self {
        Self { c: [S::zero(); 4] }
    }

    pub fn basis(i: usize) -> Self {
        let mut c = [S::zero(); 4];
        c[i] = S::one();
        Self { c }
    }

    /// The (2,2) bilinear form.
    pub fn dot(&self, o: &Self) -> S {
        let mut acc = S::zero();
        for i in 0..4 {
            acc = acc + S::c(SIGN22[i]) * self.c[i] * o.c[i];
        }
        acc
    }

    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    pub fn euclid_norm(&self) -> S {
        self.c.iter().fold(S::zero(), |a, &x| a + x * x).sqrt()
    }

    /// Index-lowered vector: `dot(a, b) = Σ a.lowered()[i] * b[i]`.
    pub fn lowered(&self) -> Self {
        let mut c = self.c;
        for (i, ci) in c.iter_mut().enumerate() {
            *ci = *ci * S::c(SIGN22[i]);
        }
        Self { c }
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }
}

impl<S: Scalar> Add for Vec22<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { c: [self.c[0] + o.c[0], self.c[1] + o.c[1], self.c[2] + o.c[2], self.c[3] + o.c[3]] }
    }
}

impl<S: Scalar> Sub for Vec22<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { c: [self.c[0] - o.c[0], self.c[1] - o.c[1], self.c[2] - o.c[2], self.c[3] - o.c[3]] }
    }
}

impl<S: Scalar> Neg for Vec22<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { c: [-self.c[0], -self.c[1], -self.c[2], -self.c[3]] }
    }
}

impl<S: Scalar> Mul<S> for Vec22<S> {
    type Output = Self;
    fn mul(self, k: S) -> Self {
        Self { c: [self.c[0] * k, self.c[1] * k, self.c[2] * k, self.c[3] * k] }
    }
}

/// A point of AdS₃, i.e. a vector with `<v,v> = -1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdSPoint<S> {
    v: Vec22<S>,
}

impl<S: Scalar> AdSPoint<S> {
    /// Accepts `v` if `<v,v>` is within `1e-6` of `-1`, then renormalizes.
    pub fn new(v: Vec22<S>) -> Result<Self> {
        let q = v.norm_sq();
        if !v.is_finite() || (q + S::one()).abs() > S::tol(1e-6) {
            return Err(Error::NotOnQuadric(q.to_f64_lossy()));
        }
        Ok(Self::renormalized(v))
    }

    /// Radially projects a timelike vector onto the quadric.
    pub fn from_timelike(v: Vec22<S>) -> Result<Self> {
        let q = v.norm_sq();
        if !(q < S::zero()) {
            return Err(Error::NotOnQuadric(q.to_f64_lossy()));
        }
        Ok(Self::renormalized(v))
    }

    fn renormalized(v: Vec22<S>) -> Self {
        let q = v.norm_sq();
        Self { v: v * (-q).sqrt().recip() }
    }

    /// The point `(1,0,0,0)`, the identity of SL(2,R).
    pub fn origin() -> Self {
        Self { v: Vec22::basis(0) }
    }

    pub fn vec(&self) -> Vec22<S> {
        self.v
    }

    pub fn antipode(&self) -> Self {
        Self { v: -self.v }
    }

    /// Unit future-pointing timelike vector field defining the time orientation.
    pub fn time_field(&self) -> Vec22<S> {
        let c = self.v.c;
        Vec22::new(-c[1], c[0], -c[3], c[2])
    }

    /// Orthogonal projection of an ambient vector onto the tangent space.
    pub fn project(&self, w: Vec22<S>) -> Vec22<S> {
        w + self.v * w.dot(&self.v)
    }

    /// SL(2,R) matrix of this point.
    pub fn to_sl2(&self) -> Mat2<S> {
        vec_to_mat(&self.v)
    }

    pub fn from_sl2(m: &Mat2<S>) -> Result<Self> {
        Self::new(mat_to_vec(m))
    }

    /// A positively oriented orthonormal frame `(e0, e1, e2)` with `e0` future timelike.
    pub fn frame(&self) -> [Vec22<S>; 3] {
        let e0 = self.project(self.time_field());
        let e0 = e0 * (-e0.norm_sq()).sqrt().recip();
        let mut spacelike: Vec<Vec22<S>> = Vec::with_capacity(2);
        let basis = (0..4).map(Vec22::basis);
        for cand in basis {
            let mut w = self.project(cand);
            w = w + e0 * w.dot(&e0);
            for s in &spacelike {
                w = w - *s * w.dot(s);
            }
            let n = w.norm_sq();
            if n > S::c(1e-6) {
                spacelike.push(w * n.sqrt().recip());
                if spacelike.len() == 2 {
                    break;
                }
            }
        }
        let (e1, mut e2) = (spacelike[0], spacelike[1]);
        if det4(&self.v, &e0, &e1, &e2) < S::zero() {
            e2 = -e2;
        }
        [e0, e1, e2]
    }
}

pub(crate) fn vec_to_mat<S: Scalar>(v: &Vec22<S>) -> Mat2<S> {
    let c = v.c;
    Mat2::new(c[0] + c[2], c[1] + c[3], c[3] - c[1], c[0] - c[2])
}

pub(crate) fn mat_to_vec<S: Scalar>(m: &Mat2<S>) -> Vec22<S> {
    let h = S::half();
    let [[a, b], [c, d]] = m.m;
    Vec22::new((a + d) * h, (b - c) * h, (a - d) * h, (b + c) * h)
}

/// Euclidean determinant of four column vectors.
pub fn det4<S: Scalar>(a: &Vec22<S>, b: &Vec22<S>, c: &Vec22<S>, d: &Vec22<S>) -> S {
    let cols = [a.c, b.c, c.c, d.c];
    let m = |r: usize, k: usize| cols[k][r];
    let mut acc = S::zero();
    for (j, sign) in [(0usize, 1.0), (1, -1.0), (2, 1.0), (3, -1.0)] {
        let rest: Vec<usize> = (0..4).filter(|&k| k != j).collect();
        let minor = m(1, rest[0]) * (m(2, rest[1]) * m(3, rest[2]) - m(2, rest[2]) * m(3, rest[1]))
            - m(1, rest[1]) * (m(2, rest[0]) * m(3, rest[2]) - m(2, rest[2]) * m(3, rest[0]))
            + m(1, rest[2]) * (m(2, rest[0]) * m(3, rest[1]) - m(2, rest[1]) * m(3, rest[0]));
        acc = acc + S::c(sign) * m(0, j) * minor;
    }
    acc
}

/// Causal character of a tangent vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalClass {
    TimelikeFuture,
    TimelikePast,
    Spacelike,
    Lightlike,
}

/// A tangent vector at a point of AdS₃.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVec<S> {
    pub base: AdSPoint<S>,
    pub v: Vec22<S>,
}

impl<S: Scalar> TangentVec<S> {
    /// Checks orthogonality to the base point and projects away the residual.
    pub fn new(base: AdSPoint<S>, v: Vec22<S>) -> Result<Self> {
        let r = base.vec().dot(&v);
        let scale = S::one().max(v.euclid_norm()) * base.vec().euclid_norm();
        if r.abs() > S::tol(1e-9) * scale {
            return Err(Error::NotTangent(r.to_f64_lossy()));
        }
        Ok(Self { base, v: base.project(v) })
    }

    pub fn norm_sq(&self) -> S {
        self.v.norm_sq()
    }

    pub fn class(&self) -> CausalClass {
        let q = self.v.norm_sq();
        let e = self.v.euclid_norm();
        if q.abs() <= S::c(NULL_TOL) * e * e {
            CausalClass::Lightlike
        } else if q > S::zero() {
            CausalClass::Spacelike
        } else if self.v.dot(&self.base.time_field()) < S::zero() {
            CausalClass::TimelikeFuture
        } else {
            CausalClass::TimelikePast
        }
    }
}

/// Geodesic `t ↦ exp_x(t v)` for a unit timelike or spacelike `v`.
pub fn ads_geodesic<S: Scalar>(x: &AdSPoint<S>, v: &TangentVec<S>, t: S) -> Result<AdSPoint<S>> {
    let q = v.norm_sq();
    if (q.abs() - S::one()).abs() > S::tol(1e-9) {
        if q.abs() <= S::c(NULL_TOL) * v.v.euclid_norm().powi(2) {
            return Err(Error::Lightlike);
        }
        return Err(Error::NotUnit(q.to_f64_lossy()));
    }
    let r = x.vec().dot(&v.v);
    if r.abs() > S::tol(1e-9) {
        return Err(Error::NotTangent(r.to_f64_lossy()));
    }
    let p = if q < S::zero() {
        x.vec() * t.cos() + v.v * t.sin()
    } else {
        x.vec() * t.cosh() + v.v * t.sinh()
    };
    Ok(AdSPoint::renormalized(p))
}

/// Lightlike geodesic `x + t v`; it stays on the quadric exactly when `<v,v> = 0`.
pub fn ads_null_geodesic<S: Scalar>(x: &AdSPoint<S>, v: &Vec22<S>, t: S) -> Vec22<S> {
    x.vec() + *v * t
}

/// Cross product in `T_x AdS`: the vector `c` with `<c, z> = det(x, u, w, z)`.
pub fn cross_at<S: Scalar>(x: &Vec22<S>, u: &Vec22<S>, w: &Vec22<S>) -> Vec22<S> {
    let mut c = [S::zero(); 4];
    for (i, ci) in c.iter_mut().enumerate() {
        *ci = det4(x, u, w, &Vec22::basis(i)) * S::c(SIGN22[i]);
    }
    Vec22 { c }
}

pub fn cross<S: Scalar>(u: &TangentVec<S>, w: &TangentVec<S>) -> Result<TangentVec<S>> {
    let d = (u.base.vec() - w.base.vec()).euclid_norm();
    if d > S::tol(1e-9) {
        return Err(Error::BasePointMismatch);
    }
    Ok(TangentVec { base: u.base, v: cross_at(&u.base.vec(), &u.v, &w.v) })
}

/// A vector of Minkowski space R^{1,2}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mink3Vec<S> {
    pub c: [S; 3],
}

impl<S: Scalar> Mink3Vec<S> {
    pub fn new(y0: S, y1: S, y2: S) -> Self {
        Self { c: [y0, y1, y2] }
    }

    pub fn dot(&self, o: &Self) -> S {
        -self.c[0] * o.c[0] + self.c[1] * o.c[1] + self.c[2] * o.c[2]
    }

    pub fn euclid_sq(&self) -> S {
        self.c.iter().fold(S::zero(), |a, &x| a + x * x)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.c[0] + o.c[0], self.c[1] + o.c[1], self.c[2] + o.c[2])
    }

    pub fn scale(&self, k: S) -> Self {
        Self::new(self.c[0] * k, self.c[1] * k, self.c[2] * k)
    }
}

/// The five strata of HS².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HSPointClass {
    H2Plus,
    H2Minus,
    DS2,
    BoundaryPlus,
    BoundaryMinus,
}

impl HSPointClass {
    /// Class of the antipodal ray.
    pub fn antipode(self) -> Self {
        match self {
            Self::H2Plus => Self::H2Minus,
            Self::H2Minus => Self::H2Plus,
            Self::DS2 => Self::DS2,
            Self::BoundaryPlus => Self::BoundaryMinus,
            Self::BoundaryMinus => Self::BoundaryPlus,
        }
    }
}

pub fn classify_ray<S: Scalar>(y: &Mink3Vec<S>) -> Result<HSPointClass> {
    let e = y.euclid_sq();
    if e == S::zero() || !e.is_finite() {
        return Err(Error::ZeroVector);
    }
    let q = y.dot(y);
    Ok(if q.abs() <= S::c(NULL_TOL) * e {
        if y.c[0] > S::zero() {
            HSPointClass::BoundaryPlus
        } else {
            HSPointClass::BoundaryMinus
        }
    } else if q > S::zero() {
        HSPointClass::DS2
    } else if y.c[0] > S::zero() {
        HSPointClass::H2Plus
    } else {
        HSPointClass::H2Minus
    })
}

/// A real 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2<S> {
    pub m: [[S; 2]; 2],
}

impl<S: Scalar> Mat2<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Self::new(S::one(), S::zero(), S::zero(), S::one())
    }

    /// Counterclockwise rotation of R² by `a`.
    pub fn rotation(a: S) -> Self {
        Self::new(a.cos(), -a.sin(), a.sin(), a.cos())
    }

    pub fn diag(a: S, d: S) -> Self {
        Self::new(a, S::zero(), S::zero(), d)
    }

    pub fn from_row_major(r: [S; 4]) -> Self {
        Self::new(r[0], r[1], r[2], r[3])
    }

    pub fn row_major(&self) -> [S; 4] {
        [self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]]
    }

    pub fn det(&self) -> S {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> S {
        self.m[0][0] + self.m[1][1]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn scale(&self, k: S) -> Self {
        Self::new(self.m[0][0] * k, self.m[0][1] * k, self.m[1][0] * k, self.m[1][1] * k)
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self::new(self.m[1][1] / d, -self.m[0][1] / d, -self.m[1][0] / d, self.m[0][0] / d)
    }

    pub fn apply(&self, v: [S; 2]) -> [S; 2] {
        [self.m[0][0] * v[0] + self.m[0][1] * v[1], self.m[1][0] * v[0] + self.m[1][1] * v[1]]
    }

    pub fn frobenius_dist(&self, o: &Self) -> S {
        let a = self.row_major();
        let b = o.row_major();
        (0..4).fold(S::zero(), |acc, i| acc + (a[i] - b[i]) * (a[i] - b[i])).sqrt()
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }
}

/// Minkowski cross product: `<a × b, z> = det(a, b, z)`.
pub fn mink_cross<S: Scalar>(a: &Mink3Vec<S>, b: &Mink3Vec<S>) -> Mink3Vec<S> {
    let (a, b) = (a.c, b.c);
    let e = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    Mink3Vec::new(-e[0], e[1], e[2])
}

/// A real 3×3 matrix, used for linear maps of R^{1,2}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat3<S> {
    pub m: [[S; 3]; 3],
}

impl<S: Scalar> Mat3<S> {
    pub fn identity() -> Self {
        let mut m = [[S::zero(); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = S::one();
        }
        Self { m }
    }

    pub fn from_columns(c: [Mink3Vec<S>; 3]) -> Self {
        let mut m = [[S::zero(); 3]; 3];
        for (j, col) in c.iter().enumerate() {
            for (i, row) in m.iter_mut().enumerate() {
                row[j] = col.c[i];
            }
        }
        Self { m }
    }

    pub fn column(&self, j: usize) -> Mink3Vec<S> {
        Mink3Vec::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    pub fn apply(&self, v: &Mink3Vec<S>) -> Mink3Vec<S> {
        let mut out = [S::zero(); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).fold(S::zero(), |a, j| a + self.m[i][j] * v.c[j]);
        }
        Mink3Vec { c: out }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut m = [[S::zero(); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..3).fold(S::zero(), |a, k| a + self.m[i][k] * o.m[k][j]);
            }
        }
        Self { m }
    }

    pub fn scale(&self, k: S) -> Self {
        let mut m = self.m;
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = *x * k;
            }
        }
        Self { m }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut m = self.m;
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = *x + o.m[i][j];
            }
        }
        Self { m }
    }

    pub fn det(&self) -> S {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn inverse(&self) -> Self {
        let m = &self.m;
        let d = self.det();
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        let adj = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ];
        Self { m: adj }.scale(d.recip())
    }

    pub fn max_abs(&self) -> S {
        self.m.iter().flatten().fold(S::zero(), |a, &x| a.max(x.abs()))
    }

    /// Matrix exponential by scaling and squaring of a Taylor polynomial.
    pub fn exp(&self) -> Self {
        let n = self.max_abs() * S::c(3.0);
        let mut k = 0;
        let mut scale = S::one();
        while n * scale > S::half() {
            scale = scale * S::half();
            k += 1;
        }
        let a = self.scale(scale);
        let mut term = Self::identity();
        let mut sum = Self::identity();
        for i in 1..=20 {
            term = term.mul(&a).scale(S::c(i as f64).recip());
            sum = sum.add(&term);
        }
        for _ in 0..k {
            sum = sum.mul(&sum);
        }
        sum
    }
}

/// Generator `y ↦ x × y` of the stabilizer of `x` in SO₀(1,2).
pub fn stabilizer_generator<S: Scalar>(x: &Mink3Vec<S>) -> Mat3<S> {
    let cols = [0, 1, 2].map(|j| {
        let mut e = [S::zero(); 3];
        e[j] = S::one();
        mink_cross(x, &Mink3Vec { c: e })
    });
    Mat3::from_columns(cols)
}

/// Trace-free matrix of a Minkowski vector; `det = -<y,y>`.
///
/// This is the tangent space at the identity of the SL(2,R) model of AdS.
pub fn mink_to_sl2_algebra<S: Scalar>(y: &Mink3Vec<S>) -> Mat2<S> {
    let [y0, y1, y2] = y.c;
    Mat2::new(y1, y0 + y2, y2 - y0, -y1)
}

pub fn sl2_algebra_to_mink<S: Scalar>(m: &Mat2<S>) -> Mink3Vec<S> {
    let h = S::half();
    let [[a, b], [c, _]] = m.m;
    Mink3Vec::new((b - c) * h, a, (b + c) * h)
}

/// Adjoint action `Y ↦ g Y g⁻¹` as an element of SO₀(1,2).
pub fn adjoint<S: Scalar>(g: &Mat2<S>) -> Mat3<S> {
    let gi = g.inverse();
    let cols = [0, 1, 2].map(|j| {
        let mut e = [S::zero(); 3];
        e[j] = S::one();
        let y = mink_to_sl2_algebra(&Mink3Vec { c: e });
        sl2_algebra_to_mink(&g.mul(&y).mul(&gi))
    });
    Mat3::from_columns(cols)
}

/// Recovers `±g` from `adjoint(g)` using the images of three null rays.
pub fn adjoint_inverse<S: Scalar>(a: &Mat3<S>) -> Result<Mat2<S>> {
    // A maps null_ray_of_line(v) to null_ray_of_line(g v), whose coordinates are
    // quadratic in g v; each column of g is read off up to sign.
    let column = |v: [S; 2]| -> [S; 2] {
        let n = a.apply(&null_ray_of_line(v));
        let (pp, qq, pq) = (n.c[0] + n.c[2], n.c[0] - n.c[2], -n.c[1]);
        if pp >= qq {
            let p = pp.max(S::zero()).sqrt();
            [p, pq / p]
        } else {
            let q = qq.max(S::zero()).sqrt();
            [pq / q, q]
        }
    };
    let c0 = column([S::one(), S::zero()]);
    let mut c1 = column([S::zero(), S::one()]);
    let mut g = Mat2::new(c0[0], c1[0], c0[1], c1[1]);
    if g.det() < S::zero() {
        c1 = [-c1[0], -c1[1]];
        g = Mat2::new(c0[0], c1[0], c0[1], c1[1]);
    }
    let d = g.det();
    if !d.is_finite() || (d - S::one()).abs() > S::tol(1e-6) {
        return Err(Error::Conjugator(format!("not an adjoint matrix, det {}", d.to_f64_lossy())));
    }
    Ok(g.scale(d.sqrt().recip()))
}

/// Future null ray corresponding to the line spanned by `v` under [`adjoint`].
pub fn null_ray_of_line<S: Scalar>(v: [S; 2]) -> Mink3Vec<S> {
    let [p, q] = v;
    let h = S::half();
    Mink3Vec::new((p * p + q * q) * h, -p * q, (p * p - q * q) * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample_point() -> AdSPoint<f64> {
        // cosh/sinh mixture keeps the point away from the origin chart
        let a: f64 = 0.7;
        let b: f64 = 0.4;
        let v = Vec22::new(a.cosh() * b.cos(), a.cosh() * b.sin(), a.sinh() * 0.6, a.sinh() * 0.8);
        AdSPoint::new(v).unwrap()
    }

    #[test]
    fn timelike_geodesic_reaches_antipode_at_pi() {
        let x = sample_point();
        let [e0, _, _] = x.frame();
        let v = TangentVec::new(x, e0).unwrap();
        let y = ads_geodesic(&x, &v, PI).unwrap();
        assert!((y.vec() + x.vec()).euclid_norm() < 1e-12);
        let y0 = ads_geodesic(&x, &v, 0.0).unwrap();
        assert!((y0.vec() - x.vec()).euclid_norm() < 1e-15);
    }

    #[test]
    fn spacelike_geodesic_stays_on_quadric() {
        let x = sample_point();
        let [_, e1, _] = x.frame();
        let v = TangentVec::new(x, e1).unwrap();
        let y = ads_geodesic(&x, &v, 1.0).unwrap();
        let expected = x.vec() * 1f64.cosh() + e1 * 1f64.sinh();
        assert!((y.vec() - expected).euclid_norm() < 1e-12);
        assert!((y.vec().norm_sq() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn lightlike_direction_is_rejected() {
        let x = sample_point();
        let [e0, e1, _] = x.frame();
        let v = TangentVec::new(x, e0 + e1).unwrap();
        assert_eq!(v.class(), CausalClass::Lightlike);
        assert_eq!(ads_geodesic(&x, &v, 1.0), Err(Error::Lightlike));
    }

    // Oracle: hand-evaluated Hodge star at the origin with e_i the coordinate axes.
    #[test]
    fn cross_product_on_oriented_frame() {
        for x in [AdSPoint::origin(), sample_point()] {
            let [e0, e1, e2] = x.frame();
            let t = |v| TangentVec::new(x, v).unwrap();
            let c01 = cross(&t(e0), &t(e1)).unwrap().v;
            let c12 = cross(&t(e1), &t(e2)).unwrap().v;
            let c20 = cross(&t(e2), &t(e0)).unwrap().v;
            assert!((c01 - e2).euclid_norm() < 1e-12);
            assert!((c12 + e0).euclid_norm() < 1e-12);
            assert!((c20 - e1).euclid_norm() < 1e-12);
            assert!(cross(&t(e1), &t(e1)).unwrap().v.euclid_norm() < 1e-14);
        }
    }

    #[test]
    fn origin_frame_is_coordinate_frame() {
        let [e0, e1, e2] = AdSPoint::<f64>::origin().frame();
        assert_eq!(e0, Vec22::basis(1));
        assert!((e1 - Vec22::basis(2)).euclid_norm() < 1e-15);
        assert!((e2 - Vec22::basis(3)).euclid_norm() < 1e-15);
    }

    #[test]
    fn ray_classes() {
        assert_eq!(classify_ray(&Mink3Vec::new(1.0, 0.0, 0.0)).unwrap(), HSPointClass::H2Plus);
        assert_eq!(classify_ray(&Mink3Vec::new(-1.0, 0.2, 0.0)).unwrap(), HSPointClass::H2Minus);
        assert_eq!(classify_ray(&Mink3Vec::new(0.0, 1.0, 0.0)).unwrap(), HSPointClass::DS2);
        assert_eq!(classify_ray(&Mink3Vec::new(1.0, 1.0, 0.0)).unwrap(), HSPointClass::BoundaryPlus);
        assert_eq!(classify_ray(&Mink3Vec::new(-1.0, 0.0, 1.0)).unwrap(), HSPointClass::BoundaryMinus);
        assert_eq!(classify_ray(&Mink3Vec::new(0.0, 0.0, 0.0)), Err(Error::ZeroVector));
    }

    #[test]
    fn sl2_model_roundtrip() {
        let x = sample_point();
        let m = x.to_sl2();
        assert!((m.det() - 1.0).abs() < 1e-12);
        let back = AdSPoint::from_sl2(&m).unwrap();
        assert!((back.vec() - x.vec()).euclid_norm() < 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let x = AdSPoint::<f32>::origin();
        let [e0, _, _] = x.frame();
        let v = TangentVec::new(x, e0).unwrap();
        let y = ads_geodesic(&x, &v, std::f32::consts::PI).unwrap();
        assert!((y.vec() + x.vec()).euclid_norm() < 1e-5);
    }

    #[test]
    fn mink_cross_is_hodge_dual() {
        let a = Mink3Vec::new(0.3f64, -1.2, 0.5);
        let b = Mink3Vec::new(1.1, 0.4, -0.7);
        let c = mink_cross(&a, &b);
        assert!(c.dot(&a).abs() < 1e-14 && c.dot(&b).abs() < 1e-14);
        let z = Mink3Vec::new(0.2, 0.9, -0.4);
        let det = Mat3::from_columns([a, b, z]).det();
        assert!((c.dot(&z) - det).abs() < 1e-14);
    }

    #[test]
    fn stabilizer_flow_is_lorentz_and_fixes_axis() {
        let x = Mink3Vec::new(0.4f64, 1.0, 0.3);
        let g = stabilizer_generator(&x).scale(0.8).exp();
        let gx = g.apply(&x);
        assert!((gx.c[0] - x.c[0]).abs() + (gx.c[1] - x.c[1]).abs() + (gx.c[2] - x.c[2]).abs() < 1e-13);
        let y = Mink3Vec::new(1.0, -0.3, 0.6);
        assert!((g.apply(&y).dot(&g.apply(&y)) - y.dot(&y)).abs() < 1e-12);
        assert!((g.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adjoint_is_equivariant_on_null_rays() {
        let g = Mat2::new(1.3, 0.4, -0.2, 0.7).scale(1.0 / (1.3f64 * 0.7 + 0.08).sqrt());
        let ad = adjoint(&g);
        let v = [0.6, -1.1];
        let lhs = ad.apply(&null_ray_of_line(v));
        let rhs = null_ray_of_line(g.apply(v));
        for i in 0..3 {
            assert!((lhs.c[i] - rhs.c[i]).abs() < 1e-12);
        }
        assert!(null_ray_of_line(v).dot(&null_ray_of_line(v)).abs() < 1e-15);
        assert!((ad.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adjoint_inverse_recovers_matrix_up_to_sign() {
        for g in [
            Mat2::new(1.3, 0.4, -0.2, 0.7).scale(1.0 / (1.3f64 * 0.7 + 0.08).sqrt()),
            Mat2::rotation(PI / 4.0),
            Mat2::rotation(2.0),
            Mat2::new(0.0, -1.0, 1.0, 3.0),
        ] {
            let h = adjoint_inverse(&adjoint(&g)).unwrap();
            let d = h.frobenius_dist(&g).min(h.frobenius_dist(&g.scale(-1.0)));
            assert!(d < 1e-12, "{g:?} -> {h:?}");
        }
    }
}
