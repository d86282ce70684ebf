//! Hyperbolic surfaces with cone singularities, given as geodesic triangulations.
//!
//! A face lists its corners counterclockwise; side `j` runs from corner `j` to
//! corner `j+1` and carries the edge `edges[j]`. Each edge is used by at most two
//! sides, traversed in opposite directions. The corner angle at corner `j` is
//! opposite side `j+1`.
//!
//! A vertex whose target angle is `0` is a cusp. Sides ending at a cusp carry the
//! length from their finite endpoint to a fixed horocycle (height 1 when the cusp
//! sits at infinity in the upper half-plane); that length may be negative.
//!
//! Developing maps use frames in PSL(2,R): a frame `g` is the image under `g` of
//! the unit vector at `i` pointing to `∞`. Positive rotations are `R(φ/2)`, so a
//! small loop around a cone point of angle `θ` has holonomy classified as
//! `Elliptic { angle: θ }`.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isom::Proj2;
use crate::linalg::Mat2;
use crate::scalar::Scalar;

/// Tolerance on vertex angle sums.
pub const ANGLE_TOL: f64 = 1e-9;
/// Tolerance for matching edge lengths between isometric disks.
pub const LENGTH_TOL: f64 = 1e-8;

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub vertices: [usize; 3],
    pub edges: [usize; 3],
}

/// Serializable description of a triangulated surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSurfaceSpec<S> {
    /// Target cone angle per vertex; `None` means a regular point (angle `2π`).
    pub targets: Vec<Option<S>>,
    pub edge_lengths: Vec<S>,
    pub faces: Vec<Face>,
}

/// A validated triangulated hyperbolic cone surface, possibly with boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSurface<S> {
    spec: ConeSurfaceSpec<S>,
    corner_angles: Vec<[S; 3]>,
    vertex_angles: Vec<S>,
    /// For each side, the neighbouring `(face, side)` or `NONE`.
    neighbors: Vec<[(usize, usize); 3]>,
    boundary_vertex: Vec<bool>,
}

fn cosh_law<S: Scalar>(a: S, b: S, c: S) -> S {
    (b.cosh() * c.cosh() - a.cosh()) / (b.sinh() * c.sinh())
}

/// Angles opposite the sides `a, b, c` of a compact hyperbolic triangle.
pub fn triangle_angles_from_edges<S: Scalar>(a: S, b: S, c: S) -> Option<[S; 3]> {
    if !(a > S::zero() && b > S::zero() && c > S::zero()) {
        return None;
    }
    let cs = [cosh_law(a, b, c), cosh_law(b, c, a), cosh_law(c, a, b)];
    if cs.iter().any(|x| !(x.abs() < S::one())) {
        return None;
    }
    Some(cs.map(|x| x.acos()))
}

/// Side lengths opposite the angles `α, β, γ` of a hyperbolic triangle.
pub fn triangle_edge_from_angles<S: Scalar>(alpha: S, beta: S, gamma: S) -> Result<[S; 3]> {
    let angles = [alpha, beta, gamma];
    if angles.iter().any(|x| !(*x > S::zero() && *x < S::PI())) || !(alpha + beta + gamma < S::PI()) {
        return Err(Error::BadTriangleAngles(format!("({alpha}, {beta}, {gamma})")));
    }
    let side = |a: S, b: S, c: S| ((a.cos() + b.cos() * c.cos()) / (b.sin() * c.sin())).max(S::one()).acosh();
    Ok([side(alpha, beta, gamma), side(beta, gamma, alpha), side(gamma, alpha, beta)])
}

/// Horocyclic width and finite corner angles of a triangle with one ideal vertex.
///
/// `l1`, `l2` are the truncated lengths of the sides from the two finite corners
/// (in counterclockwise order after the ideal one) and `d` the finite side.
fn ideal_triangle<S: Scalar>(l1: S, l2: S, d: S) -> Option<(S, S, S)> {
    let (y1, y2) = ((-l1).exp(), (-l2).exp());
    let w2 = S::two() * y1 * y2 * (d.cosh() - S::one()) - (y1 - y2) * (y1 - y2);
    if !(w2 > S::zero() && d > S::zero()) {
        return None;
    }
    let h = w2.sqrt();
    let c0 = (h * h + y2 * y2 - y1 * y1) / (S::two() * h);
    Some((h, y1.atan2(c0), y2.atan2(h - c0)))
}

impl<S: Scalar> ConeSurface<S> {
    /// A closed surface: every edge is shared by two sides.
    pub fn new(spec: ConeSurfaceSpec<S>) -> Result<Self> {
        let s = Self::build(spec)?;
        if s.neighbors.iter().flatten().any(|n| n.0 == NONE) {
            return Err(Error::Triangulation("surface has boundary".into()));
        }
        s.check_targets()?;
        Ok(s)
    }

    /// A surface with boundary; boundary vertices carry no angle condition.
    pub fn with_boundary(spec: ConeSurfaceSpec<S>) -> Result<Self> {
        let s = Self::build(spec)?;
        s.check_targets()?;
        Ok(s)
    }

    fn build(spec: ConeSurfaceSpec<S>) -> Result<Self> {
        let nv = spec.targets.len();
        let ne = spec.edge_lengths.len();
        if spec.faces.is_empty() {
            return Err(Error::Triangulation("no faces".into()));
        }
        let mut uses: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ne];
        for (f, face) in spec.faces.iter().enumerate() {
            for j in 0..3 {
                if face.vertices[j] >= nv || face.edges[j] >= ne {
                    return Err(Error::Triangulation(format!("face {f} refers to a missing vertex or edge")));
                }
                uses[face.edges[j]].push((f, j));
            }
        }
        let mut neighbors = vec![[(NONE, NONE); 3]; spec.faces.len()];
        for (e, u) in uses.iter().enumerate() {
            match u.as_slice() {
                [] => return Err(Error::Triangulation(format!("edge {e} is unused"))),
                [_] => {}
                [(f, j), (g, k)] => {
                    let (a, b) = (spec.faces[*f].vertices[*j], spec.faces[*f].vertices[(*j + 1) % 3]);
                    let (c, d) = (spec.faces[*g].vertices[*k], spec.faces[*g].vertices[(*k + 1) % 3]);
                    if a != d || b != c {
                        return Err(Error::Triangulation(format!("edge {e} is not glued with opposite orientations")));
                    }
                    neighbors[*f][*j] = (*g, *k);
                    neighbors[*g][*k] = (*f, *j);
                }
                _ => return Err(Error::Triangulation(format!("edge {e} is used more than twice"))),
            }
        }
        let mut boundary_vertex = vec![false; nv];
        for (f, face) in spec.faces.iter().enumerate() {
            for j in 0..3 {
                if neighbors[f][j].0 == NONE {
                    boundary_vertex[face.vertices[j]] = true;
                    boundary_vertex[face.vertices[(j + 1) % 3]] = true;
                }
            }
        }
        let is_cusp = |v: usize| spec.targets[v] == Some(S::zero());
        let mut corner_angles = Vec::with_capacity(spec.faces.len());
        for (f, face) in spec.faces.iter().enumerate() {
            let l = face.edges.map(|e| spec.edge_lengths[e]);
            let cusps: Vec<usize> = (0..3).filter(|&j| is_cusp(face.vertices[j])).collect();
            let angles = match cusps.as_slice() {
                [] => {
                    // Corner j is opposite side j+1.
                    triangle_angles_from_edges(l[1], l[2], l[0]).ok_or(Error::TriangleInequality(f))?
                }
                [k] => {
                    let (j1, j2) = ((k + 1) % 3, (k + 2) % 3);
                    let (_, b1, b2) = ideal_triangle(l[*k], l[j2], l[j1]).ok_or(Error::TriangleInequality(f))?;
                    let mut a = [S::zero(); 3];
                    a[j1] = b1;
                    a[j2] = b2;
                    a
                }
                _ => return Err(Error::Triangulation(format!("face {f} has more than one cusp"))),
            };
            corner_angles.push(angles);
        }
        let mut vertex_angles = vec![S::zero(); nv];
        for (face, a) in spec.faces.iter().zip(&corner_angles) {
            for j in 0..3 {
                vertex_angles[face.vertices[j]] = vertex_angles[face.vertices[j]] + a[j];
            }
        }
        Ok(Self { spec, corner_angles, vertex_angles, neighbors, boundary_vertex })
    }

    fn check_targets(&self) -> Result<()> {
        let two_pi = S::two() * S::PI();
        for (v, t) in self.spec.targets.iter().enumerate() {
            if self.boundary_vertex[v] {
                continue;
            }
            let expected = t.unwrap_or(two_pi);
            let actual = self.vertex_angles[v];
            if (actual - expected).abs() > S::tol(ANGLE_TOL) {
                return Err(Error::AngleMismatch {
                    vertex: v,
                    expected: expected.to_f64_lossy(),
                    actual: actual.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &ConeSurfaceSpec<S> {
        &self.spec
    }

    pub fn num_vertices(&self) -> usize {
        self.spec.targets.len()
    }

    pub fn num_faces(&self) -> usize {
        self.spec.faces.len()
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.spec.faces[f]
    }

    pub fn edge_length(&self, e: usize) -> S {
        self.spec.edge_lengths[e]
    }

    pub fn corner_angles(&self, f: usize) -> [S; 3] {
        self.corner_angles[f]
    }

    pub fn vertex_angle(&self, v: usize) -> S {
        self.vertex_angles[v]
    }

    pub fn is_cusp(&self, v: usize) -> bool {
        self.spec.targets[v] == Some(S::zero())
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    /// The `(face, side)` across side `j` of face `f`, if any.
    pub fn neighbor(&self, f: usize, j: usize) -> Option<(usize, usize)> {
        let n = self.neighbors[f][j];
        (n.0 != NONE).then_some(n)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.spec.edge_lengths.len() as i64 + self.num_faces() as i64
    }

    /// Vertices of cone points: marked vertices with a target angle other than `2π`.
    pub fn cone_points(&self) -> Vec<(usize, S)> {
        self.spec.targets.iter().enumerate().filter_map(|(v, t)| t.map(|a| (v, a))).collect()
    }

    /// Area of a face: `π` minus its angle sum.
    pub fn face_area(&self, f: usize) -> S {
        let a = self.corner_angles[f];
        S::PI() - a[0] - a[1] - a[2]
    }

    pub fn face_defect_sum(&self) -> S {
        (0..self.num_faces()).fold(S::zero(), |acc, f| acc + self.face_area(f))
    }

    /// Same triangulation with one edge length changed; every vertex is re-marked
    /// with its new angle so the result is a valid cone surface.
    pub fn with_edge_length(&self, e: usize, length: S) -> Result<Self> {
        let mut spec = self.spec.clone();
        *spec.edge_lengths.get_mut(e).ok_or_else(|| Error::Triangulation(format!("no edge {e}")))? = length;
        let mut s = Self::build(spec)?;
        for v in 0..s.num_vertices() {
            if !s.is_cusp(v) {
                s.spec.targets[v] = Some(s.vertex_angles[v]);
            }
        }
        Ok(s)
    }

    /// Frame at the start of side `j`, pointing along it, relative to the frame of side 0.
    fn side_frame(&self, f: usize, j: usize) -> Mat2<S> {
        let mut w = Mat2::identity();
        for k in 0..j {
            w = w.mul(&self.side_step(f, k));
        }
        w
    }

    /// Transition from the frame of side `k` to the frame of side `k+1`.
    fn side_step(&self, f: usize, k: usize) -> Mat2<S> {
        let face = &self.spec.faces[f];
        let next = (k + 1) % 3;
        let len = self.spec.edge_lengths[face.edges[k]];
        if self.is_cusp(face.vertices[next]) {
            let l = face.edges.map(|e| self.spec.edge_lengths[e]);
            let (h, _, _) = ideal_triangle(l[k], l[next], l[(k + 2) % 3]).unwrap_or((S::zero(), S::zero(), S::zero()));
            translation(len).mul(&horocyclic(h)).mul(&rotation(S::PI()))
        } else {
            translation(len).mul(&rotation(S::PI() - self.corner_angles[f][next]))
        }
    }

    /// Frame of `g` given the frame of `f`, when `g` lies across side `j` of `f`.
    fn cross(&self, frame: &Mat2<S>, f: usize, j: usize) -> Result<(Mat2<S>, usize)> {
        let (g, k) = self.neighbor(f, j).ok_or_else(|| Error::BadLoop(format!("side {j} of face {f} is on the boundary")))?;
        let len = self.spec.edge_lengths[self.spec.faces[f].edges[j]];
        let m = frame
            .mul(&self.side_frame(f, j))
            .mul(&translation(len))
            .mul(&rotation(S::PI()))
            .mul(&self.side_frame(g, k).inverse());
        Ok((m, g))
    }
}

fn translation<S: Scalar>(l: S) -> Mat2<S> {
    let e = (l * S::half()).exp();
    Mat2::diag(e, e.recip())
}

fn rotation<S: Scalar>(phi: S) -> Mat2<S> {
    Mat2::rotation(phi * S::half())
}

fn horocyclic<S: Scalar>(h: S) -> Mat2<S> {
    Mat2::new(S::one(), h, S::zero(), S::one())
}

/// Area from Gauss–Bonnet, cross-checked against the sum of face defects.
pub fn gauss_bonnet_area<S: Scalar>(s: &ConeSurface<S>) -> Result<S> {
    let two_pi = S::two() * S::PI();
    let curvature = (0..s.num_vertices())
        .filter(|&v| !s.is_boundary_vertex(v))
        .fold(S::zero(), |acc, v| acc + two_pi - s.spec.targets[v].unwrap_or(two_pi));
    let area = curvature - two_pi * S::c(s.euler_characteristic() as f64);
    if !(area > S::zero()) {
        return Err(Error::NotHyperbolic(area.to_f64_lossy()));
    }
    let defect = s.face_defect_sum();
    if (defect - area).abs() > S::tol(1e-8) * S::one().max(area) {
        return Err(Error::Triangulation(format!("face defects sum to {defect}, Gauss-Bonnet gives {area}")));
    }
    Ok(area)
}

/// Area of a spec from its target angles alone, without building a triangulation check.
pub fn gauss_bonnet_from_angles<S: Scalar>(angles: &[S], euler_characteristic: i64) -> Result<S> {
    let two_pi = S::two() * S::PI();
    let area = angles.iter().fold(S::zero(), |a, &t| a + two_pi - t) - two_pi * S::c(euler_characteristic as f64);
    if !(area > S::zero()) {
        return Err(Error::NotHyperbolic(area.to_f64_lossy()));
    }
    Ok(area)
}

/// A closed path in the dual graph: start in a face and cross the listed sides in turn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceLoop {
    pub start_face: usize,
    pub sides: Vec<usize>,
}

/// Holonomy of a loop, by developing face after face.
///
/// The result maps the developed image of the start face to its image after
/// going once around the loop.
pub fn holonomy_of_loop<S: Scalar>(s: &ConeSurface<S>, lp: &FaceLoop) -> Result<Proj2<S>> {
    if lp.start_face >= s.num_faces() {
        return Err(Error::BadLoop(format!("no face {}", lp.start_face)));
    }
    let mut frame = Mat2::identity();
    let mut f = lp.start_face;
    for &j in &lp.sides {
        if j > 2 {
            return Err(Error::BadLoop(format!("side index {j}")));
        }
        let (m, g) = s.cross(&frame, f, j)?;
        frame = m;
        f = g;
    }
    if f != lp.start_face {
        return Err(Error::BadLoop("path does not return to its start face".into()));
    }
    Proj2::new(frame)
}

/// Counterclockwise loop around an interior vertex, starting from a face where it
/// appears as `corner`.
pub fn vertex_loop<S: Scalar>(s: &ConeSurface<S>, face: usize, corner: usize) -> Result<FaceLoop> {
    let v = s.face(face).vertices[corner];
    if s.is_boundary_vertex(v) {
        return Err(Error::BadLoop(format!("vertex {v} is on the boundary")));
    }
    let (mut f, mut c) = (face, corner);
    let mut sides = Vec::new();
    loop {
        let j = (c + 2) % 3;
        let (g, k) = s.neighbor(f, j).ok_or_else(|| Error::BadLoop("reached the boundary".into()))?;
        sides.push(j);
        f = g;
        c = k;
        if (f, c) == (face, corner) {
            return Ok(FaceLoop { start_face: face, sides });
        }
        if sides.len() > 3 * s.num_faces() {
            return Err(Error::BadLoop("vertex star does not close".into()));
        }
    }
}

/// A set of faces of a surface forming a topological disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskSpec {
    pub faces: Vec<usize>,
}

/// Extracts a disk as a surface with boundary, keeping targets of interior vertices.
pub fn extract_disk<S: Scalar>(s: &ConeSurface<S>, d: &DiskSpec) -> Result<ConeSurface<S>> {
    let mut fmap = HashMap::new();
    for &f in &d.faces {
        if f >= s.num_faces() || fmap.insert(f, fmap.len()).is_some() {
            return Err(Error::BadDisk(format!("bad or repeated face {f}")));
        }
    }
    let (mut vmap, mut emap) = (HashMap::new(), HashMap::new());
    let mut faces = Vec::new();
    let mut lengths = Vec::new();
    let mut orig_vertex = Vec::new();
    for &f in &d.faces {
        let face = s.face(f);
        let vertices = face.vertices.map(|v| {
            *vmap.entry(v).or_insert_with(|| {
                orig_vertex.push(v);
                orig_vertex.len() - 1
            })
        });
        let edges = face.edges.map(|e| {
            *emap.entry(e).or_insert_with(|| {
                lengths.push(s.edge_length(e));
                lengths.len() - 1
            })
        });
        faces.push(Face { vertices, edges });
    }
    let provisional = ConeSurfaceSpec { targets: vec![None; orig_vertex.len()], edge_lengths: lengths, faces };
    let built = ConeSurface::build(provisional)?;
    if built.euler_characteristic() != 1 {
        return Err(Error::BadDisk(format!("Euler characteristic {}", built.euler_characteristic())));
    }
    let mut seen = vec![false; built.num_faces()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(f) = queue.pop_front() {
        for j in 0..3 {
            if let Some((g, _)) = built.neighbor(f, j) {
                if !seen[g] {
                    seen[g] = true;
                    queue.push_back(g);
                }
            }
        }
    }
    if seen.iter().any(|x| !x) {
        return Err(Error::BadDisk("faces are not connected".into()));
    }
    let mut spec = built.spec.clone();
    for (i, &v) in orig_vertex.iter().enumerate() {
        spec.targets[i] = if built.boundary_vertex[i] { None } else { s.spec.targets[v] };
    }
    ConeSurface::with_boundary(spec)
}

/// Length of the diagonal replacing side `j` of `f` in the quadrilateral formed with its neighbour.
fn flipped_length<S: Scalar>(s: &ConeSurface<S>, f: usize, j: usize) -> Option<S> {
    let (g, k) = s.neighbor(f, j)?;
    // At the start corner of side j, the two faces contribute adjacent angles.
    let a = s.corner_angles[f][j] + s.corner_angles[g][(k + 1) % 3];
    let b = s.edge_length(s.face(f).edges[(j + 2) % 3]);
    let c = s.edge_length(s.face(g).edges[(k + 1) % 3]);
    if !(a < S::PI()) {
        return None;
    }
    Some((b.cosh() * c.cosh() - b.sinh() * c.sinh() * a.cos()).max(S::one()).acosh())
}

/// Replaces the edge on side `j` of `f` by the other diagonal of its quadrilateral.
pub fn flip_edge<S: Scalar>(s: &ConeSurface<S>, f: usize, j: usize) -> Result<ConeSurface<S>> {
    let (g, k) = s.neighbor(f, j).ok_or_else(|| Error::Triangulation("cannot flip a boundary edge".into()))?;
    if g == f {
        return Err(Error::Triangulation("cannot flip an edge inside one face".into()));
    }
    let ff = *s.face(f);
    let fg = *s.face(g);
    if (0..3).any(|i| s.is_cusp(ff.vertices[i]) || s.is_cusp(fg.vertices[i])) {
        return Err(Error::Triangulation("flips next to cusps are not supported".into()));
    }
    let second = s.corner_angles[f][(j + 1) % 3] + s.corner_angles[g][k];
    let len = flipped_length(s, f, j)
        .filter(|_| second < S::PI())
        .ok_or_else(|| Error::Triangulation("quadrilateral is not convex".into()))?;
    // Quadrilateral corners: p = f[j], q = f[j+1], r = f[j+2] (opposite in f), t = g[k+2] (opposite in g).
    let (p, q, r, t) = (ff.vertices[j], ff.vertices[(j + 1) % 3], ff.vertices[(j + 2) % 3], fg.vertices[(k + 2) % 3]);
    let e = ff.edges[j];
    let (e_qr, e_rp) = (ff.edges[(j + 1) % 3], ff.edges[(j + 2) % 3]);
    let (e_pt, e_tq) = (fg.edges[(k + 1) % 3], fg.edges[(k + 2) % 3]);
    let mut spec = s.spec.clone();
    spec.edge_lengths[e] = len;
    // New diagonal from t to r.
    spec.faces[f] = Face { vertices: [r, p, t], edges: [e_rp, e_pt, e] };
    spec.faces[g] = Face { vertices: [t, q, r], edges: [e_tq, e_qr, e] };
    ConeSurface::with_boundary(spec)
}

/// Hyperbolic Delaunay condition on an interior edge: the opposite angles sum to at
/// most the four remaining angles of the quadrilateral.
fn is_delaunay<S: Scalar>(s: &ConeSurface<S>, f: usize, j: usize) -> bool {
    let Some((g, k)) = s.neighbor(f, j) else { return true };
    let (af, ag) = (s.corner_angles[f], s.corner_angles[g]);
    let opposite = af[(j + 2) % 3] + ag[(k + 2) % 3];
    let rest = af[j] + af[(j + 1) % 3] + ag[k] + ag[(k + 1) % 3];
    opposite <= rest + S::tol(1e-12)
}

/// Flips edges until every interior edge satisfies the Delaunay condition.
pub fn delaunay_normalize<S: Scalar>(s: &ConeSurface<S>) -> Result<ConeSurface<S>> {
    let mut cur = s.clone();
    for _ in 0..10_000 {
        let bad = (0..cur.num_faces())
            .flat_map(|f| (0..3).map(move |j| (f, j)))
            .find(|&(f, j)| !is_delaunay(&cur, f, j));
        match bad {
            None => return Ok(cur),
            Some((f, j)) => cur = flip_edge(&cur, f, j)?,
        }
    }
    Err(Error::Triangulation("flip normalization did not terminate".into()))
}

/// Whether two disks are isometric by a map respecting cone points.
///
/// Both disks are flipped to Delaunay triangulations, then matched face by face
/// from every boundary side of the second disk, with and without reflection.
pub fn disks_isometric<S: Scalar>(s1: &ConeSurface<S>, d1: &DiskSpec, s2: &ConeSurface<S>, d2: &DiskSpec) -> bool {
    let (Ok(a), Ok(b)) = (extract_disk(s1, d1), extract_disk(s2, d2)) else { return false };
    let (Ok(a), Ok(b)) = (delaunay_normalize(&a), delaunay_normalize(&b)) else { return false };
    if a.num_faces() != b.num_faces() || a.num_vertices() != b.num_vertices() {
        return false;
    }
    let Some(start) = boundary_side(&a) else { return false };
    let candidates: Vec<(usize, usize)> =
        (0..b.num_faces()).flat_map(|f| (0..3).map(move |j| (f, j))).filter(|&(f, j)| b.neighbor(f, j).is_none()).collect();
    candidates
        .iter()
        .any(|&(f, j)| [false, true].iter().any(|&refl| match_from(&a, &b, start, (f, j), refl)))
}

fn boundary_side<S: Scalar>(s: &ConeSurface<S>) -> Option<(usize, usize)> {
    (0..s.num_faces()).flat_map(|f| (0..3).map(move |j| (f, j))).find(|&(f, j)| s.neighbor(f, j).is_none())
}

/// Corner map of a face: corner `c` goes to `shift + c` (or `shift - c` when reflected).
#[derive(Clone, Copy, PartialEq)]
struct CornerMap {
    face: usize,
    shift: usize,
    refl: bool,
}

impl CornerMap {
    fn corner(&self, c: usize) -> usize {
        if self.refl {
            (self.shift + 3 - c) % 3
        } else {
            (self.shift + c) % 3
        }
    }

    /// Image of side `j` (from corner j to j+1) as a side index of the target face.
    fn side(&self, j: usize) -> usize {
        if self.refl {
            self.corner(j + 1)
        } else {
            self.corner(j)
        }
    }
}

fn match_from<S: Scalar>(a: &ConeSurface<S>, b: &ConeSurface<S>, sa: (usize, usize), sb: (usize, usize), refl: bool) -> bool {
    let first = if refl {
        // Side sa.1 reversed onto side sb.1: corner sa.1 goes to corner sb.1 + 1.
        CornerMap { face: sb.0, shift: (sb.1 + 1 + sa.1) % 3, refl }
    } else {
        CornerMap { face: sb.0, shift: (sb.1 + 3 - sa.1) % 3, refl }
    };
    let mut maps: Vec<Option<CornerMap>> = vec![None; a.num_faces()];
    let mut used = vec![false; b.num_faces()];
    let mut vmap: Vec<Option<usize>> = vec![None; a.num_vertices()];
    maps[sa.0] = Some(first);
    used[sb.0] = true;
    let mut queue = VecDeque::from([sa.0]);
    let tol = S::tol(LENGTH_TOL);
    while let Some(f) = queue.pop_front() {
        let m = maps[f].unwrap();
        for c in 0..3 {
            let va = a.face(f).vertices[c];
            let vb = b.face(m.face).vertices[m.corner(c)];
            match vmap[va] {
                Some(x) if x != vb => return false,
                _ => vmap[va] = Some(vb),
            }
            let (ta, tb) = (a.spec.targets[va], b.spec.targets[vb]);
            let same_target = match (ta, tb) {
                (None, None) => true,
                (Some(x), Some(y)) => (x - y).abs() <= S::tol(1e-12),
                _ => false,
            };
            if !same_target || a.is_boundary_vertex(va) != b.is_boundary_vertex(vb) {
                return false;
            }
        }
        for j in 0..3 {
            let jb = m.side(j);
            let la = a.edge_length(a.face(f).edges[j]);
            let lb = b.edge_length(b.face(m.face).edges[jb]);
            if (la - lb).abs() > tol {
                return false;
            }
            match (a.neighbor(f, j), b.neighbor(m.face, jb)) {
                (None, None) => {}
                (Some((g, k)), Some((g2, k2))) => {
                    let mg = if refl {
                        CornerMap { face: g2, shift: (k + k2 + 1) % 3, refl }
                    } else {
                        CornerMap { face: g2, shift: (k2 + 3 - k) % 3, refl }
                    };
                    match maps[g] {
                        Some(existing) if existing != mg => return false,
                        Some(_) => {}
                        None => {
                            if used[g2] {
                                return false;
                            }
                            used[g2] = true;
                            maps[g] = Some(mg);
                            queue.push_back(g);
                        }
                    }
                }
                _ => return false,
            }
        }
    }
    maps.iter().all(|m| m.is_some())
}
