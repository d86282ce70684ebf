//! Graphs of interactions: spacelike slices joined by collisions.
//!
//! A vertex carries a slice as a pair of cone metrics (left and right) on the same
//! triangulation together with its marked cone points. An edge records a collision
//! from its past slice to its future slice: a disk on each side that the collision
//! replaces, the correspondence of marked points outside the disks, and a list of
//! loop pairs generating the fundamental group of the common complement. Isometry
//! of the complements is certified by holonomy: the two lists of holonomies must be
//! conjugate.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::cone_hyp::{
    disks_isometric, holonomy_of_loop, triangle_edge_from_angles, vertex_loop, ConeSurface, ConeSurfaceSpec, DiskSpec,
    Face, FaceLoop, ANGLE_TOL,
};
use crate::error::{Error, Result};
use crate::hs_surface::{
    classify_hs_sphere, DeSitterRegion, DsTopology, HSSphereClass, HyperbolicRegion, PhotonCircle, RegionRef,
    SingularHSSurface, TimeOrientation,
};
use crate::isom::{IsomPair, Proj2};
use crate::linalg::{stabilizer_generator, Mat2, Mat3, Mink3Vec};
use crate::scalar::Scalar;
use crate::spacetimes::ModelSpacetime;

/// Largest holonomy mismatch accepted when matching complements.
pub const HOLONOMY_TOL: f64 = 1e-8;
/// Directions tried when placing the two new cone points.
const PLACEMENT_DIRECTIONS: usize = 72;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkedPoint<S> {
    pub vertex: usize,
    pub angle: S,
}

/// A spacelike slice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Deserialize<'de>"))]
pub struct SliceVertex<S> {
    pub name: String,
    pub genus: u32,
    pub marked: Vec<MarkedPoint<S>>,
    pub left: ConeSurfaceSpec<S>,
    pub right: ConeSurfaceSpec<S>,
    /// Face holding the base point for this slice's generators.
    #[serde(default)]
    pub base_face: usize,
    #[serde(default)]
    pub initial: bool,
    #[serde(default)]
    pub terminal: bool,
    /// Supplied with the data; not inferred.
    #[serde(default = "yes")]
    pub good: bool,
}

fn yes() -> bool {
    true
}

/// The same complement loop seen in the past and in the future slice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopPair {
    pub past: FaceLoop,
    pub future: FaceLoop,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Deserialize<'de>"))]
pub struct CollisionEdge<S> {
    pub past: usize,
    pub future: usize,
    pub past_disk: DiskSpec,
    pub future_disk: DiskSpec,
    /// Pairs `(past vertex, future vertex)` of marked points outside the disks.
    #[serde(default)]
    pub marked_map: Vec<(usize, usize)>,
    #[serde(default)]
    pub generators: Vec<LoopPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link: Option<SingularHSSurface<S>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Deserialize<'de>"))]
pub struct InteractionGraph<S> {
    pub vertices: Vec<SliceVertex<S>>,
    pub edges: Vec<CollisionEdge<S>>,
}

impl<S: Scalar> InteractionGraph<S> {
    /// Checks indices, acyclicity, matching triangulations and genus.
    pub fn check_structure(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGraph(m));
        let n = self.vertices.len();
        for (i, v) in self.vertices.iter().enumerate() {
            if v.left.faces != v.right.faces || v.left.targets.len() != v.right.targets.len() {
                return bad(format!("vertex {i}: left and right metrics use different triangulations"));
            }
            if v.left.edge_lengths.len() != v.right.edge_lengths.len() {
                return bad(format!("vertex {i}: left and right metrics have different edge counts"));
            }
            let chi = v.left.targets.len() as i64 - v.left.edge_lengths.len() as i64 + v.left.faces.len() as i64;
            if chi != 2 - 2 * v.genus as i64 {
                return bad(format!("vertex {i}: genus {} but Euler characteristic {chi}", v.genus));
            }
            if v.base_face >= v.left.faces.len() {
                return bad(format!("vertex {i}: no base face {}", v.base_face));
            }
            let mut seen = vec![false; v.left.targets.len()];
            for m in &v.marked {
                if m.vertex >= seen.len() || std::mem::replace(&mut seen[m.vertex], true) {
                    return bad(format!("vertex {i}: bad or repeated marked point {}", m.vertex));
                }
            }
        }
        let mut indegree = vec![0usize; n];
        for (k, e) in self.edges.iter().enumerate() {
            if e.past >= n || e.future >= n || e.past == e.future {
                return bad(format!("edge {k}: bad endpoints {} -> {}", e.past, e.future));
            }
            let (p, f) = (&self.vertices[e.past], &self.vertices[e.future]);
            let disk_ok = |d: &DiskSpec, nf: usize| !d.faces.is_empty() && d.faces.iter().all(|&x| x < nf);
            if !disk_ok(&e.past_disk, p.left.faces.len()) || !disk_ok(&e.future_disk, f.left.faces.len()) {
                return bad(format!("edge {k}: disk refers to missing faces"));
            }
            for &(a, b) in &e.marked_map {
                if a >= p.left.targets.len() || b >= f.left.targets.len() {
                    return bad(format!("edge {k}: marked-point correspondence out of range"));
                }
            }
            if p.terminal || f.initial {
                return bad(format!("edge {k} leaves a final slice or enters an initial one"));
            }
            indegree[e.future] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut visited = 0;
        while let Some(v) = queue.pop_front() {
            visited += 1;
            for e in self.edges.iter().filter(|e| e.past == v) {
                indegree[e.future] -= 1;
                if indegree[e.future] == 0 {
                    queue.push_back(e.future);
                }
            }
        }
        if visited != n {
            return bad("graph has an oriented cycle".into());
        }
        Ok(())
    }

    /// Vertices without incoming edges.
    pub fn sources(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.edges.iter().all(|e| e.future != v)).collect()
    }
}

/// Reverses every edge and swaps the past and future roles.
pub fn time_reverse<S: Scalar>(g: &InteractionGraph<S>) -> InteractionGraph<S> {
    let vertices = g
        .vertices
        .iter()
        .map(|v| SliceVertex { initial: v.terminal, terminal: v.initial, ..v.clone() })
        .collect();
    let edges = g
        .edges
        .iter()
        .map(|e| CollisionEdge {
            past: e.future,
            future: e.past,
            past_disk: e.future_disk.clone(),
            future_disk: e.past_disk.clone(),
            marked_map: e.marked_map.iter().map(|&(a, b)| (b, a)).collect(),
            generators: e.generators.iter().map(|p| LoopPair { past: p.future.clone(), future: p.past.clone() }).collect(),
            link: e.link.as_ref().map(|l| l.time_reverse()),
        })
        .collect();
    InteractionGraph { vertices, edges }
}

// Dual-graph loops.

/// Spanning tree of the dual graph restricted to `allowed` faces, rooted at `base`.
struct DualTree {
    /// `(parent face, side crossed in the parent, side entered in the child)`.
    parent: Vec<Option<(usize, usize, usize)>>,
    reached: Vec<bool>,
}

impl DualTree {
    fn new<S: Scalar>(s: &ConeSurface<S>, base: usize, allowed: &[bool]) -> Self {
        let n = s.num_faces();
        let mut parent = vec![None; n];
        let mut reached = vec![false; n];
        reached[base] = true;
        let mut queue = VecDeque::from([base]);
        while let Some(f) = queue.pop_front() {
            for j in 0..3 {
                if let Some((g, k)) = s.neighbor(f, j) {
                    if allowed[g] && !reached[g] {
                        reached[g] = true;
                        parent[g] = Some((f, j, k));
                        queue.push_back(g);
                    }
                }
            }
        }
        Self { parent, reached }
    }

    fn path_from_base(&self, f: usize) -> Vec<usize> {
        let mut sides = Vec::new();
        let mut cur = f;
        while let Some((p, j, _)) = self.parent[cur] {
            sides.push(j);
            cur = p;
        }
        sides.reverse();
        sides
    }

    fn path_to_base(&self, f: usize) -> Vec<usize> {
        let mut sides = Vec::new();
        let mut cur = f;
        while let Some((p, _, k)) = self.parent[cur] {
            sides.push(k);
            cur = p;
        }
        sides
    }
}

/// Loops at `base` closing each dual edge outside a spanning tree of the allowed faces.
pub fn fundamental_loops<S: Scalar>(s: &ConeSurface<S>, base: usize, allowed: &[bool]) -> Result<Vec<FaceLoop>> {
    if base >= s.num_faces() || allowed.len() != s.num_faces() || !allowed[base] {
        return Err(Error::BadLoop(format!("base face {base} is not allowed")));
    }
    let tree = DualTree::new(s, base, allowed);
    let mut loops = Vec::new();
    for f in (0..s.num_faces()).filter(|&f| tree.reached[f]) {
        for j in 0..3 {
            let Some((g, k)) = s.neighbor(f, j) else { continue };
            if !allowed[g] || (g, k) < (f, j) || tree.parent[g] == Some((f, j, k)) || tree.parent[f] == Some((g, k, j)) {
                continue;
            }
            let mut sides = tree.path_from_base(f);
            sides.push(j);
            sides.extend(tree.path_to_base(g));
            loops.push(FaceLoop { start_face: base, sides });
        }
    }
    Ok(loops)
}

/// Counterclockwise loop around `vertex`, based at `base` through allowed faces.
pub fn based_meridian<S: Scalar>(s: &ConeSurface<S>, base: usize, vertex: usize, allowed: &[bool]) -> Result<FaceLoop> {
    let tree = DualTree::new(s, base, allowed);
    let (f, c) = (0..s.num_faces())
        .filter(|&f| tree.reached[f])
        .find_map(|f| s.face(f).vertices.iter().position(|&v| v == vertex).map(|c| (f, c)))
        .ok_or_else(|| Error::BadLoop(format!("vertex {vertex} is not reachable from face {base}")))?;
    let mut sides = tree.path_from_base(f);
    sides.extend(vertex_loop(s, f, c)?.sides);
    sides.extend(tree.path_to_base(f));
    Ok(FaceLoop { start_face: base, sides })
}

/// Faces visited by a loop, starting face included.
pub fn loop_faces<S: Scalar>(s: &ConeSurface<S>, lp: &FaceLoop) -> Result<Vec<usize>> {
    if lp.start_face >= s.num_faces() {
        return Err(Error::BadLoop(format!("no face {}", lp.start_face)));
    }
    let mut out = vec![lp.start_face];
    let mut f = lp.start_face;
    for &j in &lp.sides {
        let (g, _) = s.neighbor(f, j.min(2)).ok_or_else(|| Error::BadLoop(format!("side {j} of face {f} is open")))?;
        out.push(g);
        f = g;
    }
    Ok(out)
}

// Conjugators.

/// Eigen-decomposition of a symmetric 4×4 matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues and the matrix whose columns are the eigenvectors.
fn symmetric_eigen4<S: Scalar>(mut a: [[S; 4]; 4]) -> ([S; 4], [[S; 4]; 4]) {
    let mut v = [[S::zero(); 4]; 4];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = S::one();
    }
    for _ in 0..64 {
        let off: S = (0..4).flat_map(|p| (0..4).filter(move |&q| q != p).map(move |q| (p, q))).fold(S::zero(), |acc, (p, q)| acc + a[p][q] * a[p][q]);
        if off <= S::epsilon() * S::epsilon() {
            break;
        }
        for p in 0..3 {
            for q in p + 1..4 {
                if a[p][q] == S::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (S::two() * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + S::one()).sqrt());
                let c = (t * t + S::one()).sqrt().recip();
                let s = t * c;
                for k in 0..4 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2], a[3][3]], v)
}

fn conjugation_residual<S: Scalar>(c: &Proj2<S>, pairs: &[(Proj2<S>, Proj2<S>)]) -> S {
    pairs.iter().fold(S::zero(), |m, (a, b)| m.max(a.conjugate_by(c).distance(b)))
}

/// Finds `C` with `C a C⁻¹ = b` for every pair, returning it with the largest mismatch.
///
/// Solves the linear system `C a = ±b C` in the entries of `C`; the sign is fixed
/// by the traces except for elements of trace zero, where both are tried.
pub fn solve_conjugator<S: Scalar>(pairs: &[(Proj2<S>, Proj2<S>)]) -> Result<(Proj2<S>, S)> {
    if pairs.is_empty() {
        return Ok((Proj2::identity(), S::zero()));
    }
    let zero_tr = S::tol(1e-6);
    let ambiguous: Vec<usize> = (0..pairs.len())
        .filter(|&i| pairs[i].0.trace().abs() <= zero_tr || pairs[i].1.trace().abs() <= zero_tr)
        .collect();
    if ambiguous.len() > 12 {
        return Err(Error::Conjugator("too many half-turns to resolve signs".into()));
    }
    let mut best: Option<(Proj2<S>, S)> = None;
    for mask in 0u32..(1 << ambiguous.len()) {
        let sign = |i: usize| -> S {
            match ambiguous.iter().position(|&k| k == i) {
                Some(bit) if mask & (1 << bit) != 0 => -S::one(),
                Some(_) => S::one(),
                None => (pairs[i].0.trace() * pairs[i].1.trace()).signum(),
            }
        };
        let mut ktk = [[S::zero(); 4]; 4];
        for (i, (a, b)) in pairs.iter().enumerate() {
            let (am, bm, s) = (a.matrix().m, b.matrix().m, sign(i));
            for r in 0..2 {
                for col in 0..2 {
                    let mut row = [S::zero(); 4];
                    for k in 0..2 {
                        row[2 * r + k] = row[2 * r + k] + am[k][col];
                        row[2 * k + col] = row[2 * k + col] - s * bm[r][k];
                    }
                    for x in 0..4 {
                        for y in 0..4 {
                            ktk[x][y] = ktk[x][y] + row[x] * row[y];
                        }
                    }
                }
            }
        }
        let (vals, vecs) = symmetric_eigen4(ktk);
        let mut order = [0, 1, 2, 3];
        order.sort_by(|&x, &y| vals[x].partial_cmp(&vals[y]).unwrap_or(std::cmp::Ordering::Equal));
        let col = |k: usize| [0, 1, 2, 3].map(|r| vecs[r][order[k]]);
        let (v1, v2) = (col(0), col(1));
        // Near-degenerate null spaces (a single generator) leave a pencil of
        // solutions; take the member with the largest determinant.
        let steps = if vals[order[1]] <= S::tol(1e-12) * (S::one() + vals[order[3]]) { 64 } else { 1 };
        for t in 0..steps {
            let phi = S::PI() * S::c(t as f64) / S::c(steps as f64);
            let w = [0, 1, 2, 3].map(|r| v1[r] * phi.cos() + v2[r] * phi.sin());
            let m = Mat2::new(w[0], w[1], w[2], w[3]);
            let Ok(c) = Proj2::new(m) else { continue };
            let res = conjugation_residual(&c, pairs);
            if best.as_ref().is_none_or(|(_, r)| res < *r) {
                best = Some((c, res));
            }
        }
    }
    best.ok_or_else(|| Error::Conjugator("no orientation-preserving solution".into()))
}

// Validation.

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// 1: cone angles, 2: complement holonomy and marked points, 3: left/right disks.
    pub condition: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    /// Largest conjugation mismatch over all edges and both factors.
    pub max_complement_residual: f64,
}

impl GraphReport {
    pub fn fails(&self, condition: u8) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }
}

fn pair_holonomy<S: Scalar>(l: &ConeSurface<S>, r: &ConeSurface<S>, lp: &FaceLoop) -> Result<IsomPair<S>> {
    Ok(IsomPair::new(holonomy_of_loop(l, lp)?, holonomy_of_loop(r, lp)?))
}

/// Checks the cone-angle, complement and disk conditions of a structurally valid graph.
pub fn validate_geometric_data<S: Scalar>(g: &InteractionGraph<S>) -> Result<GraphReport> {
    g.check_structure()?;
    let mut violations = Vec::new();
    let two_pi = S::two() * S::PI();
    let tol = S::tol(ANGLE_TOL);
    let mut surfaces: Vec<Option<(ConeSurface<S>, ConeSurface<S>)>> = Vec::new();
    for (i, v) in g.vertices.iter().enumerate() {
        let mut built = Vec::new();
        for (side, spec) in [("left", &v.left), ("right", &v.right)] {
            match ConeSurface::new(spec.clone()) {
                Ok(s) => {
                    for x in 0..s.num_vertices() {
                        let declared = v.marked.iter().find(|m| m.vertex == x).map_or(two_pi, |m| m.angle);
                        let actual = s.vertex_angle(x);
                        if (actual - declared).abs() > tol {
                            violations.push(Violation {
                                condition: 1,
                                vertex: Some(i),
                                edge: None,
                                detail: format!("{side} metric: point {x} has angle {actual}, expected {declared}"),
                            });
                        }
                    }
                    built.push(s);
                }
                Err(e) => violations.push(Violation {
                    condition: 1,
                    vertex: Some(i),
                    edge: None,
                    detail: format!("{side} metric: {e}"),
                }),
            }
        }
        surfaces.push(if built.len() == 2 {
            let r = built.pop();
            let l = built.pop();
            l.zip(r)
        } else {
            None
        });
    }
    let mut max_res = S::zero();
    for (k, e) in g.edges.iter().enumerate() {
        let (Some(past), Some(future)) = (&surfaces[e.past], &surfaces[e.future]) else { continue };
        let (pv, fv) = (&g.vertices[e.past], &g.vertices[e.future]);
        let mut push = |condition, detail: String| {
            violations.push(Violation { condition, vertex: None, edge: Some(k), detail });
        };
        for &(a, b) in &e.marked_map {
            let angle = |v: &SliceVertex<S>, x| v.marked.iter().find(|m| m.vertex == x).map(|m| m.angle);
            match (angle(pv, a), angle(fv, b)) {
                (Some(x), Some(y)) if (x - y).abs() <= tol => {}
                (x, y) => push(2, format!("marked points {a} -> {b} disagree: {x:?} vs {y:?}")),
            }
        }
        for (lbl, s, d) in [("past", past, &e.past_disk), ("future", future, &e.future_disk)] {
            if !disks_isometric(&s.0, d, &s.1, d) {
                push(3, format!("{lbl} disk: left and right metrics are not isometric there"));
            }
        }
        let mut loops_ok = true;
        for (idx, lp) in e.generators.iter().enumerate() {
            for (s, l, d) in [(&past.0, &lp.past, &e.past_disk), (&future.0, &lp.future, &e.future_disk)] {
                match loop_faces(s, l) {
                    Ok(fs) if fs.iter().any(|f| d.faces.contains(f)) => {
                        loops_ok = false;
                        push(2, format!("generator {idx} enters the collision disk"));
                    }
                    Ok(_) => {}
                    Err(err) => {
                        loops_ok = false;
                        push(2, format!("generator {idx}: {err}"));
                    }
                }
            }
        }
        if !loops_ok {
            continue;
        }
        for (lbl, pick) in [("left", 0usize), ("right", 1)] {
            let side = |p: &(ConeSurface<S>, ConeSurface<S>)| if pick == 0 { p.0.clone() } else { p.1.clone() };
            let (ps, fs) = (side(past), side(future));
            let pairs: Result<Vec<_>> = e
                .generators
                .iter()
                .map(|lp| Ok((holonomy_of_loop(&fs, &lp.future)?, holonomy_of_loop(&ps, &lp.past)?)))
                .collect();
            match pairs.and_then(|p| solve_conjugator(&p)) {
                Ok((_, res)) => {
                    max_res = max_res.max(res);
                    if res > S::tol(HOLONOMY_TOL) {
                        push(2, format!("{lbl} complement holonomies differ by {res} after conjugation"));
                    }
                }
                Err(err) => push(2, format!("{lbl} complement: {err}")),
            }
        }
    }
    Ok(GraphReport { valid: violations.is_empty(), violations, max_complement_residual: max_res.to_f64_lossy() })
}

// Holonomy assembly.

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Deserialize<'de>"))]
pub struct Generator<S> {
    pub vertex: usize,
    pub name: String,
    pub lp: FaceLoop,
    /// Holonomy in the vertex's own developing frame.
    pub local: IsomPair<S>,
}

/// One loop of a word; `inverse` runs it backwards.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Letter {
    pub vertex: usize,
    pub lp: FaceLoop,
    #[serde(default)]
    pub inverse: bool,
}

/// Holonomy pairs of every slice, brought into a common frame.
#[derive(Clone, Debug)]
pub struct HolonomyAssembly<S> {
    surfaces: Vec<(ConeSurface<S>, ConeSurface<S>)>,
    /// Maps each slice's frame into the common one.
    pub vertex_frames: Vec<IsomPair<S>>,
    /// Per edge: `C` with `C h_future C⁻¹ = h_past` on complement loops.
    pub edge_conjugators: Vec<IsomPair<S>>,
    pub generators: Vec<Generator<S>>,
    /// Words `α_e(γ) γ⁻¹`, one per complement loop pair.
    pub relations: Vec<Vec<Letter>>,
}

impl<S: Scalar> HolonomyAssembly<S> {
    pub fn evaluate_loop(&self, vertex: usize, lp: &FaceLoop) -> Result<IsomPair<S>> {
        let (l, r) = self.surfaces.get(vertex).ok_or_else(|| Error::BadLoop(format!("no vertex {vertex}")))?;
        let k = self.vertex_frames[vertex];
        Ok(k.compose(&pair_holonomy(l, r, lp)?).compose(&k.inverse()))
    }

    /// Product of the letters, leftmost first.
    pub fn evaluate(&self, word: &[Letter]) -> Result<IsomPair<S>> {
        word.iter().try_fold(IsomPair::identity(), |acc, w| {
            let h = self.evaluate_loop(w.vertex, &w.lp)?;
            Ok(acc.compose(&if w.inverse { h.inverse() } else { h }))
        })
    }

    /// Value of a generator in the common frame.
    pub fn generator_value(&self, i: usize) -> Result<IsomPair<S>> {
        let g = self.generators.get(i).ok_or_else(|| Error::BadLoop(format!("no generator {i}")))?;
        let k = self.vertex_frames[g.vertex];
        Ok(k.compose(&g.local).compose(&k.inverse()))
    }

    pub fn find_generator(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Largest distance from the identity over all relation words.
    pub fn max_relation_residual(&self) -> Result<S> {
        self.relations.iter().try_fold(S::zero(), |m, w| Ok(m.max(self.evaluate(w)?.distance(&IsomPair::identity()))))
    }
}

/// Glues the slice holonomies along the edges; refuses graphs that fail validation.
pub fn assemble_holonomy<S: Scalar>(g: &InteractionGraph<S>) -> Result<HolonomyAssembly<S>> {
    let report = validate_geometric_data(g)?;
    if !report.valid {
        let first = &report.violations[0];
        return Err(Error::Precondition(format!(
            "graph fails condition ({}): {}",
            first.condition, first.detail
        )));
    }
    let surfaces: Vec<(ConeSurface<S>, ConeSurface<S>)> = g
        .vertices
        .iter()
        .map(|v| Ok((ConeSurface::new(v.left.clone())?, ConeSurface::new(v.right.clone())?)))
        .collect::<Result<_>>()?;
    let mut generators = Vec::new();
    for (i, v) in g.vertices.iter().enumerate() {
        let (l, r) = &surfaces[i];
        let all = vec![true; l.num_faces()];
        for (k, lp) in fundamental_loops(l, v.base_face, &all)?.into_iter().enumerate() {
            let local = pair_holonomy(l, r, &lp)?;
            generators.push(Generator { vertex: i, name: format!("{}.loop{k}", v.name), lp, local });
        }
        for m in &v.marked {
            let lp = based_meridian(l, v.base_face, m.vertex, &all)?;
            let local = pair_holonomy(l, r, &lp)?;
            generators.push(Generator { vertex: i, name: format!("{}.p{}", v.name, m.vertex), lp, local });
        }
    }
    let mut edge_conjugators = Vec::new();
    for e in &g.edges {
        let (past, future) = (&surfaces[e.past], &surfaces[e.future]);
        let solve = |p: &ConeSurface<S>, f: &ConeSurface<S>| -> Result<Proj2<S>> {
            let pairs = e
                .generators
                .iter()
                .map(|lp| Ok((holonomy_of_loop(f, &lp.future)?, holonomy_of_loop(p, &lp.past)?)))
                .collect::<Result<Vec<_>>>()?;
            let (c, res) = solve_conjugator(&pairs)?;
            if res > S::tol(HOLONOMY_TOL) {
                return Err(Error::Conjugator(format!("residual {res}")));
            }
            Ok(c)
        };
        let cl = solve(&past.0, &future.0)?;
        let cr = solve(&past.1, &future.1)?;
        edge_conjugators.push(IsomPair::new(cl, cr));
    }
    // Spread frames over each connected component: K_future = K_past · C.
    let n = g.vertices.len();
    let mut frames: Vec<Option<IsomPair<S>>> = vec![None; n];
    for root in 0..n {
        if frames[root].is_some() {
            continue;
        }
        frames[root] = Some(IsomPair::identity());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let kv = frames[v].unwrap_or_else(IsomPair::identity);
            for (e, c) in g.edges.iter().zip(&edge_conjugators) {
                let next = if e.past == v && frames[e.future].is_none() {
                    Some((e.future, kv.compose(c)))
                } else if e.future == v && frames[e.past].is_none() {
                    Some((e.past, kv.compose(&c.inverse())))
                } else {
                    None
                };
                if let Some((w, k)) = next {
                    frames[w] = Some(k);
                    queue.push_back(w);
                }
            }
        }
    }
    let relations = g
        .edges
        .iter()
        .flat_map(|e| {
            e.generators.iter().map(move |lp| {
                vec![
                    Letter { vertex: e.past, lp: lp.past.clone(), inverse: false },
                    Letter { vertex: e.future, lp: lp.future.clone(), inverse: true },
                ]
            })
        })
        .collect();
    Ok(HolonomyAssembly {
        surfaces,
        vertex_frames: frames.into_iter().map(|k| k.unwrap_or_else(IsomPair::identity)).collect(),
        edge_conjugators,
        generators,
        relations,
    })
}

// Surgery.

fn h2_point<S: Scalar>(r: S, angle: S) -> Mink3Vec<S> {
    Mink3Vec::new(r.cosh(), r.sinh() * angle.cos(), r.sinh() * angle.sin())
}

fn h2_dist<S: Scalar>(a: &Mink3Vec<S>, b: &Mink3Vec<S>) -> S {
    (-a.dot(b)).max(S::one()).acosh()
}

/// Counterclockwise rotation by `phi` about a point of the hyperboloid.
fn h2_rotation<S: Scalar>(center: &Mink3Vec<S>, phi: S) -> Mat3<S> {
    stabilizer_generator(center).scale(phi).exp()
}

fn orientation<S: Scalar>(a: &Mink3Vec<S>, b: &Mink3Vec<S>, c: &Mink3Vec<S>) -> S {
    Mat3::from_columns([*a, *b, *c]).det()
}

/// Signed rotation angle of `m` at its fixed point `p`, in `(-π, π]`.
fn rotation_angle_at<S: Scalar>(m: &Mat3<S>, p: &Mink3Vec<S>) -> S {
    let e1 = Mink3Vec::new(S::zero(), S::one(), S::zero());
    let t = e1.add(&p.scale(e1.dot(p)));
    let t = t.scale(t.dot(&t).sqrt().recip());
    let mt = m.apply(&t);
    let n = crate::linalg::mink_cross(p, &t);
    mt.dot(&n).atan2(mt.dot(&t))
}

/// Result of replacing one cone point by two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Deserialize<'de>"))]
pub struct ConeSplit<S> {
    pub spec: ConeSurfaceSpec<S>,
    /// Faces of the new surface replacing the star.
    pub disk: DiskSpec,
    /// Faces of the star of the original point.
    pub star: DiskSpec,
    /// Vertices carrying the two new cone angles; the first reuses the old index.
    pub points: [usize; 2],
    /// Distances of the new points from the old one.
    pub distances: [S; 2],
}

/// Replaces the star of the cone point `p` by a disk with two cone points `etas`
/// and the same boundary, so the holonomy around the boundary is unchanged.
///
/// The two points and `p` span a triangle with angles `π − η₁/2`, `π − η₂/2`,
/// `π − θ/2`; no such disk exists unless these angles form a hyperbolic triangle.
pub fn split_cone_point<S: Scalar>(spec: &ConeSurfaceSpec<S>, p: usize, etas: [S; 2], radius: S) -> Result<ConeSplit<S>> {
    let s = ConeSurface::new(spec.clone())?;
    if p >= s.num_vertices() {
        return Err(Error::Precondition(format!("no vertex {p}")));
    }
    let theta = s.vertex_angle(p);
    let (pi, two_pi) = (S::PI(), S::two() * S::PI());
    if etas.iter().any(|e| !(*e > S::zero() && *e < two_pi)) {
        return Err(Error::Precondition("new cone angles must lie in (0, 2π)".into()));
    }
    let [a_ang, b_ang, o_ang] = [pi - etas[0] * S::half(), pi - etas[1] * S::half(), pi - theta * S::half()];
    let [_, ob, oa] = triangle_edge_from_angles(o_ang, a_ang, b_ang).map_err(|_| {
        Error::Precondition(format!(
            "no hyperbolic disk carries cone angles {} and {} with boundary holonomy of angle {theta}: \
             requires η₁ + η₂ + θ > 4π",
            etas[0], etas[1]
        ))
    })?;
    if oa > radius || ob > radius {
        return Err(Error::Precondition(format!(
            "new cone points at distances {oa}, {ob} exceed the surgery radius {radius}"
        )));
    }

    // The star of p in counterclockwise order.
    let (f0, c0) = (0..s.num_faces())
        .find_map(|f| s.face(f).vertices.iter().position(|&v| v == p).map(|c| (f, c)))
        .ok_or_else(|| Error::Precondition(format!("vertex {p} is in no face")))?;
    let lp = vertex_loop(&s, f0, c0)?;
    let mut star = vec![(f0, c0)];
    for &j in &lp.sides[..lp.sides.len() - 1] {
        let (f, _) = *star.last().unwrap_or(&(f0, c0));
        let (g, k) = s.neighbor(f, j).ok_or_else(|| Error::BadLoop("open star".into()))?;
        star.push((g, k));
    }
    let star_faces: Vec<usize> = star.iter().map(|x| x.0).collect();
    for (i, &(f, c)) in star.iter().enumerate() {
        let face = s.face(f);
        if star_faces[..i].contains(&f) || face.vertices.iter().filter(|&&v| v == p).count() != 1 {
            return Err(Error::Precondition(format!("the star of vertex {p} is not an embedded disk")));
        }
        if s.neighbor(f, (c + 1) % 3).is_some_and(|(g, _)| star_faces.contains(&g)) {
            return Err(Error::Precondition(format!("the star of vertex {p} is glued to itself")));
        }
    }
    let n = star.len();

    // Develop the star around p at the origin of the hyperboloid.
    let origin = Mink3Vec::new(S::one(), S::zero(), S::zero());
    let mut ring = Vec::with_capacity(n + 1);
    let mut ring_ids = Vec::with_capacity(n + 1);
    let mut angle = S::zero();
    {
        let (f, c) = star[0];
        ring.push(h2_point(s.edge_length(s.face(f).edges[c]), angle));
        ring_ids.push(s.face(f).vertices[(c + 1) % 3]);
    }
    for &(f, c) in &star {
        angle = angle + s.corner_angles(f)[c];
        ring.push(h2_point(s.edge_length(s.face(f).edges[(c + 2) % 3]), angle));
        ring_ids.push(s.face(f).vertices[(c + 2) % 3]);
    }
    let glue = h2_rotation(&origin, theta);

    // Place the new points so every new triangle is positively oriented.
    let mut best: Option<(S, Mink3Vec<S>, Mink3Vec<S>)> = None;
    for step in 0..PLACEMENT_DIRECTIONS {
        let psi = theta * S::c(step as f64) / S::c(PLACEMENT_DIRECTIONS as f64);
        for turn in [S::one(), -S::one()] {
            let a = h2_point(oa, psi);
            let b = h2_point(ob, psi + turn * o_ang);
            let m = glue.mul(&h2_rotation(&a, -etas[0]));
            let fixed = m.apply(&b).add(&b.scale(-S::one())).euclid_sq().sqrt();
            let twist = (rotation_angle_at(&m, &b) - etas[1]).modulo(two_pi);
            let twist = twist.min(two_pi - twist);
            if fixed > S::tol(1e-9) * (S::one() + b.c[0]) || twist > S::tol(1e-8) {
                continue;
            }
            let a2 = glue.apply(&a);
            let mut margin = orientation(&b, &a, &ring[0]).min(orientation(&b, &ring[n], &a2));
            for w in ring.windows(2) {
                margin = margin.min(orientation(&b, &w[0], &w[1]));
            }
            if margin > S::zero() && best.as_ref().is_none_or(|x| margin > x.0) {
                best = Some((margin, a, b));
            }
        }
    }
    let (_, a, b) = best.ok_or_else(|| {
        Error::Precondition(format!("the two new cone points do not fit inside the star of vertex {p}"))
    })?;

    // Rebuild: star faces become the fan (B, V_j, V_{j+1}); two faces close the cut.
    let mut out = spec.clone();
    let new_b = out.targets.len();
    out.targets[p] = Some(etas[0]);
    out.targets.push(Some(etas[1]));
    let mut spokes: Vec<usize> = star.iter().map(|&(f, c)| s.face(f).edges[c]).collect();
    spokes.push(out.edge_lengths.len());
    let (cut, bridge) = (spokes[n] + 1, spokes[n] + 2);
    for (j, &e) in spokes.iter().enumerate() {
        let len = h2_dist(&b, &ring[j]);
        if e < out.edge_lengths.len() {
            out.edge_lengths[e] = len;
        } else {
            out.edge_lengths.push(len);
        }
    }
    out.edge_lengths.push(h2_dist(&a, &ring[0]));
    out.edge_lengths.push(h2_dist(&b, &a));
    for (j, &(f, c)) in star.iter().enumerate() {
        out.faces[f] = Face {
            vertices: [new_b, ring_ids[j], ring_ids[j + 1]],
            edges: [spokes[j], s.face(f).edges[(c + 1) % 3], spokes[j + 1]],
        };
    }
    let first = out.faces.len();
    out.faces.push(Face { vertices: [new_b, p, ring_ids[0]], edges: [bridge, cut, spokes[0]] });
    out.faces.push(Face { vertices: [new_b, ring_ids[n], p], edges: [spokes[n], cut, bridge] });
    ConeSurface::new(out.clone())?;
    let mut disk = star_faces.clone();
    disk.extend([first, first + 1]);
    Ok(ConeSplit {
        spec: out,
        disk: DiskSpec { faces: disk },
        star: DiskSpec { faces: star_faces },
        points: [p, new_b],
        distances: [oa, ob],
    })
}

/// HS-sphere of a collision of two particles into one.
pub fn collision_link<S: Scalar>(theta: S, etas: &[S]) -> SingularHSSurface<S> {
    let disk = |orientation, angles: Vec<S>| HyperbolicRegion { orientation, genus: 0, cone_angles: angles, cusps: 0, surface: None };
    SingularHSSurface {
        hyperbolic_regions: vec![disk(TimeOrientation::Future, vec![theta]), disk(TimeOrientation::Past, etas.to_vec())],
        de_sitter_regions: vec![DeSitterRegion { topology: DsTopology::Annulus, singularities: vec![] }],
        photon_circles: vec![
            PhotonCircle { sides: [RegionRef::Hyperbolic(0), RegionRef::DeSitter(0)], gravitons: vec![] },
            PhotonCircle { sides: [RegionRef::Hyperbolic(1), RegionRef::DeSitter(0)], gravitons: vec![] },
        ],
        parabolic_points: vec![],
    }
}

/// Future angle and past angles of a causally regular collision of particles.
pub fn collision_angles<S: Scalar>(link: &SingularHSSurface<S>) -> Result<(S, Vec<S>)> {
    let class = classify_hs_sphere(link, false)?;
    if class != HSSphereClass::CausallyRegular {
        return Err(Error::Precondition(format!("link is {class:?}, not causally regular")));
    }
    let region = |o| link.hyperbolic_regions.iter().find(|h| h.orientation == o);
    let (Some(future), Some(past)) = (region(TimeOrientation::Future), region(TimeOrientation::Past)) else {
        return Err(Error::Precondition("link lacks a past or future hyperbolic disk".into()));
    };
    if future.cone_angles.len() != 1 || future.cusps != 0 || past.cusps != 0 {
        return Err(Error::Precondition("surgery needs exactly one outgoing particle".into()));
    }
    Ok((future.cone_angles[0], past.cone_angles.clone()))
}

fn marked_of<S: Scalar>(spec: &ConeSurfaceSpec<S>) -> Vec<MarkedPoint<S>> {
    spec.targets.iter().enumerate().filter_map(|(v, t)| t.map(|angle| MarkedPoint { vertex: v, angle })).collect()
}

fn genus_of<S: Scalar>(spec: &ConeSurfaceSpec<S>) -> u32 {
    let chi = spec.targets.len() as i64 - spec.edge_lengths.len() as i64 + spec.faces.len() as i64;
    ((2 - chi) / 2).max(0) as u32
}

/// Earlier slice, past and future disks, marked-point map and complement loops.
type SplitSlice<S> = (SliceVertex<S>, DiskSpec, DiskSpec, Vec<(usize, usize)>, Vec<LoopPair>);

/// Splits `at` on both metrics of a slice and records the collision edge data.
fn split_slice<S: Scalar>(
    v: &SliceVertex<S>,
    link: &SingularHSSurface<S>,
    at: usize,
    radius: S,
    name: String,
) -> Result<SplitSlice<S>> {
    let (theta, etas) = collision_angles(link)?;
    if etas.len() != 2 {
        return Err(Error::Precondition(format!("{} incoming particles; surgery handles two", etas.len())));
    }
    for spec in [&v.left, &v.right] {
        let actual = spec.targets.get(at).copied().flatten();
        if actual.is_none_or(|a| (a - theta).abs() > S::tol(ANGLE_TOL)) {
            return Err(Error::AngleMismatch {
                vertex: at,
                expected: theta.to_f64_lossy(),
                actual: actual.map_or(2.0 * std::f64::consts::PI, |a| a.to_f64_lossy()),
            });
        }
    }
    let etas = [etas[0], etas[1]];
    let left = split_cone_point(&v.left, at, etas, radius)?;
    let right = if v.right == v.left { left.clone() } else { split_cone_point(&v.right, at, etas, radius)? };
    if left.disk != right.disk || left.spec.faces != right.spec.faces {
        return Err(Error::Precondition("left and right stars have different combinatorics".into()));
    }
    let future = ConeSurface::new(v.left.clone())?;
    let outside: Vec<bool> = (0..future.num_faces()).map(|f| !left.star.faces.contains(&f)).collect();
    let base = outside.iter().position(|&x| x).ok_or_else(|| Error::Precondition("surgery disk is the whole slice".into()))?;
    let generators =
        fundamental_loops(&future, base, &outside)?.into_iter().map(|lp| LoopPair { past: lp.clone(), future: lp }).collect();
    let marked_map = v.marked.iter().filter(|m| m.vertex != at).map(|m| (m.vertex, m.vertex)).collect();
    let before = SliceVertex {
        name,
        genus: genus_of(&left.spec),
        marked: marked_of(&left.spec),
        left: left.spec.clone(),
        right: right.spec,
        base_face: base,
        initial: true,
        terminal: false,
        good: v.good,
    };
    Ok((before, left.disk, left.star, marked_map, generators))
}

/// Collision of two particles into the cone point `at` of a static product spacetime.
///
/// Vertex 0 is the slice before the collision, vertex 1 the slice after it.
pub fn surgery_collision<S: Scalar>(
    base: &ModelSpacetime<S>,
    link: &SingularHSSurface<S>,
    at: usize,
    radius: S,
) -> Result<InteractionGraph<S>> {
    let ModelSpacetime::ProductM { base: spec } = base else {
        return Err(Error::Precondition("surgery needs a product spacetime".into()));
    };
    ConeSurface::new(spec.clone())?;
    let after = SliceVertex {
        name: "after".into(),
        genus: genus_of(spec),
        marked: marked_of(spec),
        left: spec.clone(),
        right: spec.clone(),
        base_face: 0,
        initial: false,
        terminal: true,
        good: true,
    };
    let (mut before, past_disk, future_disk, marked_map, generators) =
        split_slice(&after, link, at, radius, "before".into())?;
    let mut after = after;
    after.base_face = before.base_face;
    before.initial = true;
    Ok(InteractionGraph {
        vertices: vec![before, after],
        edges: vec![CollisionEdge { past: 0, future: 1, past_disk, future_disk, marked_map, generators, link: Some(link.clone()) }],
    })
}

/// Adds a collision before the unique initial slice of `g`, at its cone point `at`.
pub fn prepend_surgery<S: Scalar>(
    g: &InteractionGraph<S>,
    link: &SingularHSSurface<S>,
    at: usize,
    radius: S,
) -> Result<InteractionGraph<S>> {
    let sources = g.sources();
    let [first] = sources[..] else {
        return Err(Error::InvalidGraph(format!("{} initial slices, expected one", sources.len())));
    };
    let name = format!("before-{}", g.vertices.len());
    let (before, past_disk, future_disk, marked_map, generators) = split_slice(&g.vertices[first], link, at, radius, name)?;
    let mut out = g.clone();
    out.vertices[first].initial = false;
    let idx = out.vertices.len();
    out.vertices.push(before);
    out.edges.push(CollisionEdge {
        past: idx,
        future: first,
        past_disk,
        future_disk,
        marked_map,
        generators,
        link: Some(link.clone()),
    });
    Ok(out)
}

/// Double of a hyperbolic rhombus, coned from the centre of each copy.
///
/// Vertices 0 and 2 get cone angle `even`, vertices 1 and 3 cone angle `odd`,
/// vertices 4 and 5 are the regular centres. The stars of 0 and 2 share no face.
pub fn doubled_rhombus<S: Scalar>(even: S, odd: S) -> Result<ConeSurfaceSpec<S>> {
    let q = S::c(4.0);
    let [side, spoke_odd, spoke_even] = triangle_edge_from_angles(S::FRAC_PI_2(), even / q, odd / q)?;
    let mut faces = Vec::new();
    for i in 0..4 {
        faces.push(Face { vertices: [4, i, (i + 1) % 4], edges: [4 + i, i, 4 + (i + 1) % 4] });
    }
    for i in 0..4 {
        faces.push(Face { vertices: [5, (i + 1) % 4, i], edges: [8 + (i + 1) % 4, i, 8 + i] });
    }
    let spoke = |i: usize| if i.is_multiple_of(2) { spoke_even } else { spoke_odd };
    let mut edge_lengths = vec![side; 4];
    edge_lengths.extend((0..4).map(spoke));
    edge_lengths.extend((0..4).map(spoke));
    let targets = vec![Some(even), Some(odd), Some(even), Some(odd), None, None];
    Ok(ConeSurfaceSpec { targets, edge_lengths, faces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isom::{classify, IsomClass};
    use std::f64::consts::PI;

    fn base() -> ConeSurfaceSpec<f64> {
        doubled_rhombus(PI, PI / 2.0).unwrap()
    }

    fn graph(eta: f64) -> Result<InteractionGraph<f64>> {
        surgery_collision(&ModelSpacetime::ProductM { base: base() }, &collision_link(PI, &[eta, eta]), 0, 1.0)
    }

    fn elliptic_angle(p: &Proj2<f64>) -> f64 {
        match classify(p) {
            IsomClass::Elliptic { angle } => angle,
            other => panic!("not elliptic: {other:?}"),
        }
    }

    #[test]
    fn rhombus_has_the_requested_cone_points() {
        let s = ConeSurface::new(base()).unwrap();
        assert_eq!(s.euler_characteristic(), 2);
        assert!((s.vertex_angle(0) - PI).abs() < 1e-12);
        assert!((s.vertex_angle(3) - PI / 2.0).abs() < 1e-12);
        assert!((s.vertex_angle(4) - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn symmetric_eigen_diagonalizes() {
        let a = [[4.0, 1.0, 0.5, 0.0], [1.0, 3.0, 0.2, 0.1], [0.5, 0.2, 2.0, 0.3], [0.0, 0.1, 0.3, 1.0]];
        let (vals, v) = symmetric_eigen4(a);
        for k in 0..4 {
            for r in 0..4 {
                let av: f64 = (0..4).map(|c| a[r][c] * v[c][k]).sum();
                assert!((av - vals[k] * v[r][k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn conjugator_recovers_a_known_conjugation() {
        let c = Proj2::from_row_major([1.2, 0.3, -0.4, 0.7333333333333333]).unwrap();
        let gens = [
            Proj2::new(Mat2::rotation(0.7)).unwrap(),
            Proj2::new(Mat2::diag(1.5, 1.0 / 1.5)).unwrap(),
            Proj2::new(Mat2::rotation(PI / 2.0)).unwrap(),
        ];
        let pairs: Vec<_> = gens.iter().map(|g| (*g, g.conjugate_by(&c))).collect();
        let (found, res) = solve_conjugator(&pairs).unwrap();
        assert!(res < 1e-10, "{res}");
        assert!(found.distance(&c) < 1e-8);
    }

    #[test]
    fn split_keeps_boundary_and_sets_new_angles() {
        let eta = 1.52 * PI;
        let split = split_cone_point(&base(), 0, [eta, eta], 1.0).unwrap();
        let s = ConeSurface::new(split.spec.clone()).unwrap();
        for &v in &split.points {
            assert!((s.vertex_angle(v) - eta).abs() < 1e-9);
        }
        // Independent oracle: the developed triangle of the three points.
        let [_, ob, oa] = triangle_edge_from_angles(PI / 2.0, PI - eta / 2.0, PI - eta / 2.0).unwrap();
        assert!((split.distances[0] - oa).abs() < 1e-12 && (split.distances[1] - ob).abs() < 1e-12);
        let area = crate::cone_hyp::gauss_bonnet_area(&s).unwrap();
        let old = crate::cone_hyp::gauss_bonnet_area(&ConeSurface::new(base()).unwrap()).unwrap();
        // The disk loses the area of two copies of the triangle.
        assert!((area - old + 2.0 * (PI - (PI / 2.0 + 2.0 * (PI - eta / 2.0)))).abs() < 1e-9);
    }

    #[test]
    fn impossible_collision_is_rejected() {
        let err = split_cone_point(&base(), 0, [2.0 * PI / 3.0; 2], 1.0).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn surgery_graph_has_expected_angles_and_validates() {
        let eta = 1.52 * PI;
        let g = graph(eta).unwrap();
        let angles = |v: &SliceVertex<f64>| {
            let mut a: Vec<f64> = v.marked.iter().map(|m| m.angle).collect();
            a.sort_by(f64::total_cmp);
            a
        };
        assert_eq!(angles(&g.vertices[1]), vec![PI / 2.0, PI / 2.0, PI, PI]);
        assert_eq!(angles(&g.vertices[0]), vec![PI / 2.0, PI / 2.0, PI, eta, eta]);
        let report = validate_geometric_data(&g).unwrap();
        assert!(report.valid, "{:?}", report.violations);
        assert!(!g.edges[0].generators.is_empty());
    }

    #[test]
    fn mismatched_future_angle_is_an_error() {
        let link = collision_link(PI / 2.0, &[1.8 * PI, 1.8 * PI]);
        let err = surgery_collision(&ModelSpacetime::ProductM { base: base() }, &link, 0, 1.0).unwrap_err();
        assert!(matches!(err, Error::AngleMismatch { .. }));
    }

    #[test]
    fn perturbed_left_metric_fails_complement_condition() {
        let mut g = graph(1.52 * PI).unwrap();
        let s = ConeSurface::new(g.vertices[0].left.clone()).unwrap();
        // Side 1 of the rhombus lies outside the surgery disk.
        let l = s.edge_length(1);
        g.vertices[0].left = s.with_edge_length(1, l + 1e-2).unwrap().spec().clone();
        let report = validate_geometric_data(&g).unwrap();
        assert!(report.fails(2), "{:?}", report.violations);
        assert!(assemble_holonomy(&g).is_err());
    }

    #[test]
    fn single_vertex_graph_passes() {
        let spec = base();
        let v = SliceVertex {
            name: "only".into(),
            genus: 0,
            marked: marked_of(&spec),
            left: spec.clone(),
            right: spec,
            base_face: 0,
            initial: true,
            terminal: true,
            good: true,
        };
        let g = InteractionGraph { vertices: vec![v], edges: vec![] };
        assert!(validate_geometric_data(&g).unwrap().valid);
        let asm = assemble_holonomy(&g).unwrap();
        for (i, gen) in asm.generators.iter().enumerate() {
            assert!(asm.generator_value(i).unwrap().distance(&gen.local) < 1e-12);
        }
    }

    #[test]
    fn assembled_meridians_and_relations() {
        let g = graph(1.52 * PI).unwrap();
        let asm = assemble_holonomy(&g).unwrap();
        assert!(asm.max_relation_residual().unwrap() < 1e-8);
        let i = asm.find_generator("after.p0").unwrap();
        let h = asm.generator_value(i).unwrap();
        assert!((elliptic_angle(&h.left) - PI).abs() < 1e-6);
        assert!((elliptic_angle(&h.right) - PI).abs() < 1e-6);
        for gen in &asm.generators {
            if let Some(m) = g.vertices[gen.vertex].marked.iter().find(|m| gen.name.ends_with(&format!(".p{}", m.vertex))) {
                let h = asm.generator_value(asm.find_generator(&gen.name).unwrap()).unwrap();
                assert!((elliptic_angle(&h.left) - m.angle).abs() < 1e-8, "{}", gen.name);
            }
        }
    }

    #[test]
    fn iterated_surgery_gives_a_path() {
        let eta = 1.52 * PI;
        let g = graph(eta).unwrap();
        let g3 = prepend_surgery(&g, &collision_link(PI, &[eta, eta]), 2, 1.0).unwrap();
        assert_eq!(g3.vertices.len(), 3);
        assert_eq!(g3.sources(), vec![2]);
        let counts: Vec<usize> = g3.vertices.iter().map(|v| v.marked.len()).collect();
        assert_eq!(counts, vec![5, 4, 6]);
        let report = validate_geometric_data(&g3).unwrap();
        assert!(report.valid, "{:?}", report.violations);
        assert!(assemble_holonomy(&g3).unwrap().max_relation_residual().unwrap() < 1e-8);
    }

    #[test]
    fn time_reversal_is_an_involution_and_swaps_roles() {
        let g = graph(1.52 * PI).unwrap();
        let r = time_reverse(&g);
        assert_eq!(time_reverse(&r), g);
        assert_eq!((r.edges[0].past, r.edges[0].future), (1, 0));
        assert!(r.vertices[1].initial && r.vertices[0].terminal);
        // One particle before, two after.
        let before = &r.vertices[r.edges[0].past];
        assert!(before.marked.iter().all(|m| m.angle < 1.1 * PI));
        assert!(validate_geometric_data(&r).unwrap().valid);
    }

    #[test]
    fn structure_rejects_cycles() {
        let mut g = graph(1.52 * PI).unwrap();
        let mut back = g.edges[0].clone();
        std::mem::swap(&mut back.past, &mut back.future);
        g.vertices[0].initial = false;
        g.vertices[1].terminal = false;
        g.edges.push(back);
        assert!(matches!(g.check_structure(), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn surgery_keeps_complement_holonomy() {
        let g = graph(1.52 * PI).unwrap();
        let (b, a) = (&g.vertices[0], &g.vertices[1]);
        let (sb, sa) = (ConeSurface::new(b.left.clone()).unwrap(), ConeSurface::new(a.left.clone()).unwrap());
        for lp in &g.edges[0].generators {
            let (hb, ha) = (holonomy_of_loop(&sb, &lp.past).unwrap(), holonomy_of_loop(&sa, &lp.future).unwrap());
            assert!(hb.distance(&ha) < 1e-8);
        }
    }
}
