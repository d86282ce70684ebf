//! Left and right flat connections on unit timelike vectors, the hyperbolic
//! metrics they induce on spacelike surfaces, and the factorization of holonomy
//! into a pair of PSL(2,R) elements.
//!
//! `D^l_x u = ∇_x u + u × x` and `D^r_x u = ∇_x u − u × x`, with `×` the cross
//! product of [`cross_at`]. In the SL(2,R) model the `D^l`-parallel fields are
//! `X ↦ η X` and the `D^r`-parallel fields are `X ↦ X ξ` for constant trace-free
//! `η`, `ξ`, so the left holonomy is read in the trivialization `u ↦ u X⁻¹` and
//! transforms under the left factor of an [`IsomPair`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isom::{IsomPair, Proj2};
use crate::linalg::{
    adjoint_inverse, cross_at, mat_to_vec, sl2_algebra_to_mink, vec_to_mat, AdSPoint, Mat2, Mat3, Mink3Vec, Vec22,
};
use crate::scalar::Scalar;
use crate::spacetimes::ModelSpacetime;

/// Maximal integration step, in path parameter.
pub const TRANSPORT_STEP: f64 = 1e-3;
/// Steps between projections back onto the tangent space.
pub const REORTHO_EVERY: usize = 10;
/// `|det B + 1|` at or below this counts as non-transverse.
pub const TRANSVERSE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Connection {
    Left,
    Right,
    LeviCivita,
}

/// A parameterized curve in AdS₃ given with its velocity.
pub trait Path<S: Scalar> {
    /// Parameters at which the curve may fail to be smooth, including both ends.
    fn breakpoints(&self) -> Vec<S>;
    fn eval(&self, s: S) -> (Vec22<S>, Vec22<S>);
}

/// Piecewise curve through AdS points; each piece is the radial projection of a chord.
///
/// Parameterized by cumulative Euclidean chord length.
#[derive(Clone, Debug)]
pub struct Polyline<S> {
    points: Vec<AdSPoint<S>>,
    params: Vec<S>,
}

impl<S: Scalar> Polyline<S> {
    pub fn new(points: Vec<AdSPoint<S>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::BadLoop("a polyline needs at least two points".into()));
        }
        let mut params = vec![S::zero()];
        for w in points.windows(2) {
            let (a, b) = (w[0].vec(), w[1].vec());
            // the chord must stay timelike for the projection to exist
            let mid = (a + b) * S::half();
            if !(mid.norm_sq() < S::zero()) {
                return Err(Error::BadLoop("consecutive points too far apart".into()));
            }
            let last = *params.last().unwrap_or(&S::zero());
            params.push(last + (b - a).euclid_norm());
        }
        Ok(Self { points, params })
    }

    pub fn points(&self) -> &[AdSPoint<S>] {
        &self.points
    }
}

impl<S: Scalar> Path<S> for Polyline<S> {
    fn breakpoints(&self) -> Vec<S> {
        self.params.clone()
    }

    fn eval(&self, s: S) -> (Vec22<S>, Vec22<S>) {
        let n = self.points.len();
        let k = self.params.partition_point(|&t| t <= s).clamp(1, n - 1) - 1;
        let (a, b) = (self.points[k].vec(), self.points[k + 1].vec());
        let len = self.params[k + 1] - self.params[k];
        if len <= S::zero() {
            return (a, Vec22::zero());
        }
        let tau = (s - self.params[k]) / len;
        let w = a * (S::one() - tau) + b * tau;
        let dw = (b - a) * len.recip();
        let norm = (-w.norm_sq()).sqrt();
        let dnorm = -w.dot(&dw) / norm;
        (w * norm.recip(), dw * norm.recip() - w * (dnorm / (norm * norm)))
    }
}

fn connection_rhs<S: Scalar>(conn: Connection, x: &Vec22<S>, xd: &Vec22<S>, u: &Vec22<S>) -> Vec22<S> {
    let normal = *x * u.dot(xd);
    match conn {
        Connection::LeviCivita => normal,
        Connection::Left => normal - cross_at(x, u, xd),
        Connection::Right => normal + cross_at(x, u, xd),
    }
}

fn retract<S: Scalar>(x: &Vec22<S>, u: Vec22<S>, norm_sq: S) -> Vec22<S> {
    let x = *x * (-x.norm_sq()).sqrt().recip();
    let u = u + x * u.dot(&x);
    let q = u.norm_sq();
    if norm_sq.abs() > S::tol(1e-12) && q * norm_sq > S::zero() {
        u * (norm_sq / q).sqrt()
    } else {
        u
    }
}

/// Transports tangent vectors at the start of `path` to its end.
///
/// Classical RK4 with step at most [`TRANSPORT_STEP`] on each smooth piece.
pub fn transport_frame<S: Scalar>(conn: Connection, path: &impl Path<S>, u0: &[Vec22<S>]) -> Result<Vec<Vec22<S>>> {
    let bp = path.breakpoints();
    if bp.len() < 2 || bp.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Transport("path parameters must be increasing".into()));
    }
    let (x0, _) = path.eval(bp[0]);
    let mut us: Vec<Vec22<S>> = u0.iter().map(|u| retract(&x0, *u, u.norm_sq())).collect();
    let norms: Vec<S> = us.iter().map(|u| u.norm_sq()).collect();
    let step = S::c(TRANSPORT_STEP);
    let mut count = 0usize;
    for w in bp.windows(2) {
        let len = w[1] - w[0];
        if len <= S::zero() {
            continue;
        }
        let n = (len / step).ceil().to_usize().unwrap_or(1).max(1);
        let h = len / S::c(n as f64);
        // nudge inside the piece so that eval never crosses a breakpoint
        let inner = |s: S| s.max(w[0]).min(w[1] - len * S::tol(1e-12));
        for i in 0..n {
            let s = w[0] + h * S::c(i as f64);
            let (xa, va) = path.eval(inner(s + len * S::tol(1e-12)));
            let (xm, vm) = path.eval(inner(s + h * S::half()));
            let (xb, vb) = path.eval(inner(s + h));
            for u in us.iter_mut() {
                let k1 = connection_rhs(conn, &xa, &va, u);
                let k2 = connection_rhs(conn, &xm, &vm, &(*u + k1 * (h * S::half())));
                let k3 = connection_rhs(conn, &xm, &vm, &(*u + k2 * (h * S::half())));
                let k4 = connection_rhs(conn, &xb, &vb, &(*u + k3 * h));
                *u = *u + (k1 + k2 * S::two() + k3 * S::two() + k4) * (h / S::c(6.0));
            }
            count += 1;
            if count.is_multiple_of(REORTHO_EVERY) {
                for (u, q) in us.iter_mut().zip(&norms) {
                    *u = retract(&xb, *u, *q);
                }
            }
        }
    }
    let (x1, _) = path.eval(bp[bp.len() - 1]);
    let out: Vec<Vec22<S>> = us.iter().zip(&norms).map(|(u, q)| retract(&x1, *u, *q)).collect();
    if out.iter().any(|u| !u.is_finite()) {
        return Err(Error::Transport("integration diverged".into()));
    }
    Ok(out)
}

pub fn transport<S: Scalar>(conn: Connection, path: &impl Path<S>, u0: &Vec22<S>) -> Result<Vec22<S>> {
    Ok(transport_frame(conn, path, std::slice::from_ref(u0))?[0])
}

/// Closed square `(a, b) ∈ [0, side]²` in the chart `(a, b) ↦ [x + a e + b f]`.
pub fn square_loop<S: Scalar>(x: &AdSPoint<S>, e: &Vec22<S>, f: &Vec22<S>, side: S) -> Result<Polyline<S>> {
    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)];
    let pts = corners
        .iter()
        .map(|&(a, b)| AdSPoint::from_timelike(x.vec() + *e * (side * S::c(a)) + *f * (side * S::c(b))))
        .collect::<Result<Vec<_>>>()?;
    Polyline::new(pts)
}

/// Largest Euclidean displacement of a frame transported around a closed path.
pub fn loop_deviation<S: Scalar>(conn: Connection, path: &impl Path<S>, frame: &[Vec22<S>]) -> Result<S> {
    let out = transport_frame(conn, path, frame)?;
    Ok(frame.iter().zip(&out).fold(S::zero(), |m, (a, b)| m.max((*a - *b).euclid_norm())))
}

/// Path from a point to its image under the gluing map of a model spacetime.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar + Deserialize<'de>"))]
pub struct DevelopedLoop<S> {
    pub path: Vec<AdSPoint<S>>,
    pub glue: IsomPair<S>,
}

/// Fiber coordinates in which the holonomy of `conn` is a constant adjoint action.
fn fiber_coords<S: Scalar>(conn: Connection, x: &Mat2<S>, v: &Vec22<S>) -> Mink3Vec<S> {
    let m = vec_to_mat(v);
    let xi = x.inverse();
    match conn {
        Connection::Right => sl2_algebra_to_mink(&xi.mul(&m)),
        _ => sl2_algebra_to_mink(&m.mul(&xi)),
    }
}

fn transport_holonomy<S: Scalar>(conn: Connection, lp: &DevelopedLoop<S>, poly: &Polyline<S>) -> Result<Proj2<S>> {
    let p0 = lp.path[0];
    let frame = p0.frame();
    let moved = transport_frame(conn, poly, &frame)?;
    let end = lp.path[lp.path.len() - 1].vec();
    let target = lp.glue.act_vec(&p0.vec());
    let sign = if (end - target).euclid_norm() <= (end + target).euclid_norm() { S::one() } else { -S::one() };
    let inv = lp.glue.inverse();
    let x = p0.to_sl2();
    let cols = |vs: &[Vec22<S>]| Mat3::from_columns([0, 1, 2].map(|i| fiber_coords(conn, &x, &vs[i])));
    let pulled: Vec<Vec22<S>> = moved.iter().map(|v| inv.act_vec(v) * sign).collect();
    let ad = cols(&pulled).mul(&cols(&frame).inverse());
    Ok(Proj2::new(adjoint_inverse(&ad)?)?.inverse())
}

/// Holonomy of the left and right connections along a developed loop.
pub fn holonomy_pair<S: Scalar>(lp: &DevelopedLoop<S>) -> Result<IsomPair<S>> {
    let n = lp.path.len();
    if n < 2 {
        return Err(Error::BadLoop("loop needs at least two samples".into()));
    }
    let end = lp.path[n - 1].vec();
    let target = lp.glue.act_vec(&lp.path[0].vec());
    let gap = (end - target).euclid_norm().min((end + target).euclid_norm());
    if gap > S::tol(1e-6) {
        return Err(Error::BadLoop(format!("endpoint misses the glued start by {}", gap.to_f64_lossy())));
    }
    let poly = Polyline::new(lp.path.clone())?;
    Ok(IsomPair::new(
        transport_holonomy(Connection::Left, lp, &poly)?,
        transport_holonomy(Connection::Right, lp, &poly)?,
    ))
}

/// A loop once around the singular line of a massive particle or tachyon model.
///
/// `radius` is the distance from the line; samples are at most `spacing` apart
/// in the angular parameter.
pub fn meridian<S: Scalar>(model: &ModelSpacetime<S>, radius: S, spacing: S) -> Result<DevelopedLoop<S>> {
    match model {
        ModelSpacetime::ConeP { angle } => {
            let angle = *angle;
            let n = (angle / spacing).ceil().to_usize().unwrap_or(1).max(2);
            let p = AdSPoint::new(Vec22::new(radius.cosh(), S::zero(), radius.sinh(), S::zero()))?.to_sl2();
            let path = (0..=n)
                .map(|k| {
                    let r = Mat2::rotation(angle * S::c(k as f64 / n as f64) * S::half());
                    AdSPoint::from_sl2(&r.mul(&p).mul(&r.inverse()))
                })
                .collect::<Result<Vec<_>>>()?;
            let k = Proj2::new(Mat2::rotation(angle * S::half()))?;
            Ok(DevelopedLoop { path, glue: IsomPair::new(k, k) })
        }
        ModelSpacetime::TachyonT { mass } => {
            let mass = *mass;
            let h = (mass * S::half()).exp();
            let k = Proj2::new(Mat2::diag(h, h.recip()))?;
            // spiral in the Lorentzian plane normal to the line, from the null ray
            // e1 + e3 to its image, which is the same ray scaled by e^mass
            let r0 = radius.min(S::half() * (-mass.abs()).exp());
            let n = (S::two() * S::PI() / spacing).ceil().to_usize().unwrap_or(1).max(2);
            let quarter = S::PI() / S::c(4.0);
            let path = (0..=n)
                .map(|i| {
                    let f = S::c(i as f64 / n as f64);
                    let phi = quarter + S::two() * S::PI() * f;
                    let rho = r0 * S::two().sqrt() * (mass * f).exp();
                    AdSPoint::from_timelike(Vec22::new(S::one(), rho * phi.cos(), S::zero(), rho * phi.sin()))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(DevelopedLoop { path, glue: IsomPair::new(k, k) })
        }
        _ => Err(Error::Precondition("meridians are defined for ConeP and TachyonT".into())),
    }
}

/// Point of `H² × H²` of the timelike geodesic through `x` with unit direction `u`.
///
/// The components transform under the left and right factors of an [`IsomPair`].
pub fn geodesic_chart<S: Scalar>(x: &AdSPoint<S>, u: &Vec22<S>) -> (Mink3Vec<S>, Mink3Vec<S>) {
    let m = x.to_sl2();
    (fiber_coords(Connection::Left, &m, u), fiber_coords(Connection::Right, &m, u))
}

fn numeric_rank<S: Scalar>(rows: &[Vec<S>], tol: S) -> usize {
    let mut a: Vec<Vec<S>> = rows.to_vec();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..a.len()).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap());
        let Some(p) = pivot else { break };
        if a[p][col].abs() <= tol {
            continue;
        }
        a.swap(rank, p);
        for i in 0..a.len() {
            if i != rank {
                let f = a[i][col] / a[rank][col];
                for j in col..ncols {
                    let v = a[rank][j];
                    a[i][j] = a[i][j] - f * v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Ranks of the left, right and combined geodesic charts at `(x, u)`, by central differences.
pub fn product_rank<S: Scalar>(x: &AdSPoint<S>, u: &Vec22<S>) -> Result<[usize; 3]> {
    let h = S::c(1e-5);
    let frame = x.frame();
    let uq = u.norm_sq();
    if !(uq < S::zero()) {
        return Err(Error::Precondition("direction must be timelike".into()));
    }
    let unit = *u * (-uq).sqrt().recip();
    let others: Vec<Vec22<S>> = {
        let mut v = Vec::new();
        for f in frame {
            let mut w = f + unit * f.dot(&unit);
            for o in &v {
                w = w - *o * w.dot(o);
            }
            if w.norm_sq() > S::c(1e-6) {
                v.push(w * w.norm_sq().sqrt().recip());
            }
        }
        v.truncate(2);
        v
    };
    let chart = |xv: Vec22<S>, uv: Vec22<S>| -> Result<Vec<S>> {
        let p = AdSPoint::from_timelike(xv)?;
        let uu = p.project(uv);
        let uu = uu * (-uu.norm_sq()).sqrt().recip();
        let (l, r) = geodesic_chart(&p, &uu);
        Ok(vec![l.c[0], l.c[1], l.c[2], r.c[0], r.c[1], r.c[2]])
    };
    let mut columns: Vec<Vec<S>> = Vec::new();
    for f in frame {
        let plus = chart(x.vec() + f * h, unit)?;
        let minus = chart(x.vec() - f * h, unit)?;
        columns.push(plus.iter().zip(&minus).map(|(a, b)| (*a - *b) / (S::two() * h)).collect());
    }
    for g in &others {
        let plus = chart(x.vec(), unit + *g * h)?;
        let minus = chart(x.vec(), unit - *g * h)?;
        columns.push(plus.iter().zip(&minus).map(|(a, b)| (*a - *b) / (S::two() * h)).collect());
    }
    let rows = |range: std::ops::Range<usize>| -> Vec<Vec<S>> {
        range.map(|i| columns.iter().map(|c| c[i]).collect()).collect()
    };
    let tol = S::tol(1e-6);
    Ok([numeric_rank(&rows(0..3), tol), numeric_rank(&rows(3..6), tol), numeric_rank(&rows(0..6), tol)])
}

/// Variation of a timelike geodesic `t ↦ cos t·point + sin t·velocity`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct JacobiData<S> {
    pub point: Vec22<S>,
    pub velocity: Vec22<S>,
    pub dpoint: Vec22<S>,
    pub dvelocity: Vec22<S>,
}

impl<S: Scalar> JacobiData<S> {
    pub fn validate(&self) -> Result<()> {
        let (p, v, a, b) = (self.point, self.velocity, self.dpoint, self.dvelocity);
        let checks = [
            (p.norm_sq() + S::one(), "point off the quadric"),
            (v.norm_sq() + S::one(), "velocity not unit timelike"),
            (p.dot(&v), "velocity not tangent"),
            (p.dot(&a), "dpoint not tangent"),
            (v.dot(&b), "dvelocity breaks unit speed"),
            (a.dot(&v) + p.dot(&b), "dvelocity breaks tangency"),
        ];
        for (r, what) in checks {
            if r.abs() > S::tol(1e-9) {
                return Err(Error::Precondition(format!("{what}: residual {}", r.to_f64_lossy())));
            }
        }
        Ok(())
    }
}

/// `‖v' ± v × x'‖²` at time `t` along the varied geodesic (`+` for left, `−` for right).
pub fn jacobi_norm<S: Scalar>(conn: Connection, d: &JacobiData<S>, t: S) -> Result<S> {
    d.validate()?;
    let sign = match conn {
        Connection::Left => S::one(),
        Connection::Right => -S::one(),
        Connection::LeviCivita => return Err(Error::Precondition("left or right connection required".into())),
    };
    let (c, s) = (t.cos(), t.sin());
    let x = d.point * c + d.velocity * s;
    let v = d.velocity * c - d.point * s;
    let xp = d.dpoint * c + d.dvelocity * s;
    let vp = d.dvelocity * c - d.dpoint * s;
    let vp = vp + x * vp.dot(&x);
    let m = vp + cross_at(&x, &v, &xp) * sign;
    Ok(m.norm_sq())
}

/// One sample of a surface jet.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar + Deserialize<'de>"))]
pub struct JetSample<S> {
    /// First fundamental form in the local coordinates.
    pub first: [[S; 2]; 2],
    /// Shape operator, self-adjoint for `first`.
    pub shape: [[S; 2]; 2],
    /// A transverse field other than the unit normal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldJet<S>>,
}

/// Ambient first-order data of a unit timelike field along a surface.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FieldJet<S> {
    pub point: Vec22<S>,
    pub tangents: [Vec22<S>; 2],
    pub field: Vec22<S>,
    /// `∇_{tangents[i]} field`.
    pub derivative: [Vec22<S>; 2],
}

/// Sampled spacelike surface patch on a `rows × cols` grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar + Deserialize<'de>"))]
pub struct SurfaceJet<S> {
    pub rows: usize,
    pub cols: usize,
    pub samples: Vec<JetSample<S>>,
}

impl<S: Scalar> SurfaceJet<S> {
    pub fn new(rows: usize, cols: usize, samples: Vec<JetSample<S>>) -> Result<Self> {
        let j = Self { rows, cols, samples };
        j.validate()?;
        Ok(j)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows * self.cols != self.samples.len() || self.samples.is_empty() {
            return Err(Error::InvalidJet(format!(
                "{}x{} grid with {} samples",
                self.rows,
                self.cols,
                self.samples.len()
            )));
        }
        for (i, s) in self.samples.iter().enumerate() {
            let g = Mat2 { m: s.first };
            let b = Mat2 { m: s.shape };
            let scale = S::one().max(g.m[0][0].abs()).max(g.m[1][1].abs());
            if (g.m[0][1] - g.m[1][0]).abs() > S::tol(1e-12) * scale || !(g.m[0][0] > S::zero()) || !(g.det() > S::zero())
            {
                return Err(Error::InvalidJet(format!("first fundamental form not positive definite at sample {i}")));
            }
            let gb = g.mul(&b);
            let bscale = scale * S::one().max(b.m.iter().flatten().fold(S::zero(), |m, x| m.max(x.abs())));
            if (gb.m[0][1] - gb.m[1][0]).abs() > S::tol(1e-9) * bscale {
                return Err(Error::InvalidJet(format!("shape operator not self-adjoint at sample {i}")));
            }
            let j = complex_structure(&g);
            let jj = j.mul(&j);
            if jj.frobenius_dist(&Mat2::identity().scale(-S::one())) > S::tol(1e-10) {
                return Err(Error::InvalidJet(format!("complex structure degenerate at sample {i}")));
            }
        }
        Ok(())
    }
}

/// Rotation by `+π/2` for the metric `g`.
pub fn complex_structure<S: Scalar>(g: &Mat2<S>) -> Mat2<S> {
    let r = g.det().sqrt().recip();
    let [[a, b], [_, d]] = g.m;
    Mat2::new(-b, -d, a, b).scale(r)
}

/// A field of 2×2 positive definite forms on the jet grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar + Deserialize<'de>"))]
pub struct HyperbolicMetric2<S> {
    pub rows: usize,
    pub cols: usize,
    pub forms: Vec<[[S; 2]; 2]>,
    /// Determinants computed as `det I · det(A)²`; the entry-wise determinant of a
    /// nearly degenerate form loses most of its digits.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dets: Vec<S>,
}

impl<S: Scalar> HyperbolicMetric2<S> {
    pub fn det(&self, i: usize) -> S {
        match self.dets.get(i) {
            Some(d) => *d,
            None => Mat2 { m: self.forms[i] }.det(),
        }
    }
}

fn pullback<S: Scalar>(g: &Mat2<S>, a: &Mat2<S>) -> [[S; 2]; 2] {
    let mut m = a.transpose().mul(g).mul(a);
    let off = (m.m[0][1] + m.m[1][0]) * S::half();
    m.m[0][1] = off;
    m.m[1][0] = off;
    m.m
}

/// `μ_l = I((−B+J)·, (−B+J)·)` and `μ_r = I((−B−J)·, (−B−J)·)` at every sample.
pub fn left_right_metrics<S: Scalar>(j: &SurfaceJet<S>) -> Result<(HyperbolicMetric2<S>, HyperbolicMetric2<S>)> {
    j.validate()?;
    let mut left = Vec::with_capacity(j.samples.len());
    let mut right = Vec::with_capacity(j.samples.len());
    let mut dets = (Vec::with_capacity(j.samples.len()), Vec::with_capacity(j.samples.len()));
    for (i, s) in j.samples.iter().enumerate() {
        let g = Mat2 { m: s.first };
        let b = Mat2 { m: s.shape };
        let jm = complex_structure(&g);
        let nb = b.scale(-S::one());
        let al = add2(&nb, &jm);
        let ar = add2(&nb, &jm.scale(-S::one()));
        if al.det().abs() <= S::tol(TRANSVERSE_TOL) || ar.det().abs() <= S::tol(TRANSVERSE_TOL) {
            return Err(Error::DegenerateJet(i));
        }
        left.push(pullback(&g, &al));
        right.push(pullback(&g, &ar));
        dets.0.push(g.det() * al.det().powi(2));
        dets.1.push(g.det() * ar.det().powi(2));
    }
    let wrap = |forms, dets| HyperbolicMetric2 { rows: j.rows, cols: j.cols, forms, dets };
    Ok((wrap(left, dets.0), wrap(right, dets.1)))
}

fn add2<S: Scalar>(a: &Mat2<S>, b: &Mat2<S>) -> Mat2<S> {
    Mat2::new(a.m[0][0] + b.m[0][0], a.m[0][1] + b.m[0][1], a.m[1][0] + b.m[1][0], a.m[1][1] + b.m[1][1])
}

/// `(det(−B+J), det(−B−J))` for one sample.
pub fn shifted_dets<S: Scalar>(first: &[[S; 2]; 2], shape: &[[S; 2]; 2]) -> (S, S) {
    let g = Mat2 { m: *first };
    let jm = complex_structure(&g);
    let nb = Mat2 { m: *shape }.scale(-S::one());
    (add2(&nb, &jm).det(), add2(&nb, &jm.scale(-S::one())).det())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransverseFailure {
    pub sample: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransverseReport {
    pub transverse: bool,
    pub failures: Vec<TransverseFailure>,
}

/// Rank-two test for `v ↦ D^{l,r}_v u`.
///
/// For the unit normal this is `det B + 1 ≠ 0`; samples carrying a [`FieldJet`]
/// are tested directly on the ambient vectors `∇_{e_i} u ± u × e_i`.
pub fn transverse_check<S: Scalar>(j: &SurfaceJet<S>) -> TransverseReport {
    let mut failures = Vec::new();
    for (i, s) in j.samples.iter().enumerate() {
        match &s.field {
            None => {
                let d = Mat2 { m: s.shape }.det() + S::one();
                if d.abs() <= S::tol(TRANSVERSE_TOL) {
                    failures.push(TransverseFailure {
                        sample: i,
                        reason: format!("det B + 1 = {:e}", d.to_f64_lossy()),
                    });
                }
            }
            Some(f) => {
                for (name, sign) in [("left", S::one()), ("right", -S::one())] {
                    let c: Vec<Vec22<S>> = (0..2)
                        .map(|k| f.derivative[k] + cross_at(&f.point, &f.field, &f.tangents[k]) * sign)
                        .collect();
                    let e = f.tangents[0].euclid_norm() * f.tangents[1].euclid_norm();
                    let dot = |a: &Vec22<S>, b: &Vec22<S>| (0..4).fold(S::zero(), |m, k| m + a.c[k] * b.c[k]);
                    let gram = dot(&c[0], &c[0]) * dot(&c[1], &c[1]) - dot(&c[0], &c[1]).powi(2);
                    if gram.max(S::zero()).sqrt() <= S::tol(TRANSVERSE_TOL) * e {
                        failures.push(TransverseFailure { sample: i, reason: format!("{name} derivative has rank < 2") });
                    }
                }
            }
        }
    }
    TransverseReport { transverse: failures.is_empty(), failures }
}

/// Unit tangents at `x` of the timelike geodesics through `apex`, and the distance to it.
pub fn cone_field<S: Scalar>(apex: &AdSPoint<S>, x: &AdSPoint<S>) -> Result<(Vec22<S>, S)> {
    let c = -x.vec().dot(&apex.vec());
    if !(c.abs() < S::one()) {
        return Err(Error::Precondition("point is not timelike-related to the apex".into()));
    }
    let s = (S::one() - c * c).sqrt();
    Ok(((x.vec() * c - apex.vec()) * s.recip(), c.acos()))
}

/// Covariant derivative of [`cone_field`] at `x` in direction `v`.
pub fn cone_field_derivative<S: Scalar>(apex: &AdSPoint<S>, x: &AdSPoint<S>, v: &Vec22<S>) -> Result<Vec22<S>> {
    let (u, r) = cone_field(apex, x)?;
    let (c, s) = (r.cos(), r.sin());
    let dc = -v.dot(&apex.vec());
    let ds = -c * dc / s;
    let du = (x.vec() * dc + *v * c) * s.recip() - u * (ds / s);
    Ok(x.project(du))
}

/// Point and tangent direction for the cone configuration.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConeSample<S> {
    pub point: AdSPoint<S>,
    pub tangent: Vec22<S>,
}

/// `n` samples at radii spread evenly over `[0.1, π − 0.1]`, in varied directions.
pub fn cone_configuration<S: Scalar>(apex: &AdSPoint<S>, n: usize) -> Result<Vec<ConeSample<S>>> {
    let [e0, e1, e2] = apex.frame();
    let (lo, hi) = (S::c(0.1), S::PI() - S::c(0.1));
    let golden = S::c(0.618_033_988_749_895);
    (0..n)
        .map(|k| {
            let f = if n > 1 { S::c(k as f64 / (n - 1) as f64) } else { S::half() };
            let r = lo + (hi - lo) * f;
            let a = S::two() * S::PI() * (S::c(k as f64) * golden).fract();
            let b = S::c(0.8) * (S::c(3.0 * k as f64) * golden).fract();
            let dir = e0 * b.cosh() + (e1 * a.cos() + e2 * a.sin()) * b.sinh();
            let point = AdSPoint::new(apex.vec() * r.cos() + dir * r.sin())?;
            let (u, _) = cone_field(apex, &point)?;
            let [_, f1, f2] = point.frame();
            let mut basis = Vec::new();
            for w in [f1, f2, point.frame()[0]] {
                let mut w = w + u * w.dot(&u);
                for o in &basis {
                    w = w - *o * w.dot(o);
                }
                if w.norm_sq() > S::c(1e-6) {
                    basis.push(w * w.norm_sq().sqrt().recip());
                }
            }
            let g = S::c(1.7) * S::c(k as f64);
            let tangent = basis[0] * g.cos() + basis[1] * g.sin() + u * S::c(0.3);
            Ok(ConeSample { point, tangent })
        })
        .collect()
}

/// Surface jet of the cone configuration, with the cone field as transverse field.
pub fn cone_jet<S: Scalar>(apex: &AdSPoint<S>, samples: &[ConeSample<S>]) -> Result<SurfaceJet<S>> {
    let mut out = Vec::with_capacity(samples.len());
    for s in samples {
        let (u, _) = cone_field(apex, &s.point)?;
        let w = s.tangent + u * s.tangent.dot(&u);
        let w = w * w.norm_sq().sqrt().recip();
        let w2 = cross_at(&s.point.vec(), &u, &w);
        let tangents = [w, w2];
        let derivative = [
            cone_field_derivative(apex, &s.point, &w)?,
            cone_field_derivative(apex, &s.point, &w2)?,
        ];
        let field = FieldJet { point: s.point.vec(), tangents, field: u, derivative };
        let id = [[S::one(), S::zero()], [S::zero(), S::one()]];
        let zero = [[S::zero(); 2]; 2];
        out.push(JetSample { first: id, shape: zero, field: Some(field) });
    }
    SurfaceJet::new(1, samples.len(), out)
}

/// Largest `|‖D_v u‖²·sin²r − ‖w‖²|` over the samples and both connections,
/// where `u` is the cone field, `r` the distance to the apex and `w` the part
/// of `v` orthogonal to `u`.
pub fn disk_link_isometry_check<S: Scalar>(apex: &AdSPoint<S>, samples: &[ConeSample<S>]) -> Result<S> {
    let mut worst = S::zero();
    for s in samples {
        let (u, r) = cone_field(apex, &s.point)?;
        let du = cone_field_derivative(apex, &s.point, &s.tangent)?;
        let w = s.tangent + u * s.tangent.dot(&u);
        for sign in [S::one(), -S::one()] {
            let d = du + cross_at(&s.point.vec(), &u, &s.tangent) * sign;
            let dev = (d.norm_sq() * r.sin().powi(2) - w.norm_sq()).abs();
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

/// Right-invariant field `X ↦ η X` at `x`, for trace-free `η`.
pub fn left_parallel_field<S: Scalar>(eta: &Mat2<S>, x: &AdSPoint<S>) -> Vec22<S> {
    mat_to_vec(&eta.mul(&x.to_sl2()))
}

/// Left-invariant field `X ↦ X ξ` at `x`, for trace-free `ξ`.
pub fn right_parallel_field<S: Scalar>(xi: &Mat2<S>, x: &AdSPoint<S>) -> Vec22<S> {
    mat_to_vec(&x.to_sl2().mul(xi))
}
