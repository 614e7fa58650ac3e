//! Semi-stable partitions of a lattice polytope and the data they induce:
//! dual complex, concave piecewise-linear lifting function, central frame
//! and the fans of the associated toric fibration.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::combinat::{nonempty_subsets, subsets};
use crate::error::{Error, Result};
use crate::fan_toolkit::{face_fan, refine_with_boundary_rays, stellar_subdivide, Cone, Fan};
use crate::lattice_geometry::{convex_hull, Facet, LatticePolytope, LatticeVector};
use crate::linalg::{dot, int_rank, integer_kernel, primitive_from_q, q, q_to_i64, QMatrix, Q};
use crate::polyhedral::vertices_of_system;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemistablePartition {
    host: LatticePolytope,
    pieces: Vec<LatticePolytope>,
    complex: DualComplex,
}

/// Abstract simplicial complex on the piece indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualComplex {
    pub vertex_count: usize,
    pub simplices: Vec<Vec<usize>>,
}

impl DualComplex {
    pub fn dim(&self) -> usize {
        self.simplices.iter().map(|s| s.len()).max().unwrap_or(1) - 1
    }

    pub fn is_closed_under_subsets(&self) -> bool {
        self.simplices.iter().all(|s| {
            (1..s.len()).all(|k| subsets(s.len(), k).iter().all(|sub| {
                let t: Vec<usize> = sub.iter().map(|&i| s[i]).collect();
                self.simplices.contains(&t)
            }))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub clause: String,
    pub sigma: Vec<LatticeVector>,
    pub tau: Vec<LatticeVector>,
    pub expected: usize,
    pub found: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    /// Per piece: exactly n edges at every vertex spanning the space.
    pub simplicial_pieces: Vec<bool>,
}

/// Facet inequalities of a full-dimensional polytope as `a·x ≥ b`.
fn ineqs(p: &LatticePolytope) -> Vec<(Vec<i64>, i64)> {
    p.facets().iter().map(|f| (f.normal.clone(), -f.offset)).collect()
}

/// Vertices of the intersection of the given polytopes.
fn intersection_vertices(polys: &[&LatticePolytope]) -> Vec<Vec<Q>> {
    let rank = polys[0].rank();
    let all: Vec<(Vec<i64>, i64)> = polys.iter().flat_map(|p| ineqs(p)).collect();
    vertices_of_system(&[], &all, rank)
}

fn to_q(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

/// Whether a set of rational points is exactly the vertex set of a face of `p`.
fn is_face_point_set(points: &[Vec<Q>], p: &LatticePolytope) -> bool {
    let tight: Vec<&Facet> = p
        .facets()
        .iter()
        .filter(|f| points.iter().all(|x| crate::linalg::q_dot_i(x, &f.normal) + q(f.offset) == q(0)))
        .collect();
    let face: BTreeSet<Vec<Q>> =
        p.vertices().iter().filter(|v| tight.iter().all(|f| f.value(v) == 0)).map(|v| to_q(v)).collect();
    let want: BTreeSet<Vec<Q>> = points.iter().cloned().collect();
    face == want
}

fn affine_rank(points: &[LatticeVector]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let rows: Vec<Vec<i64>> =
        points[1..].iter().map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect()).collect();
    int_rank(&rows)
}

impl SemistablePartition {
    /// Build a partition, checking that the pieces tile the host.
    pub fn new(host: LatticePolytope, pieces: Vec<LatticePolytope>) -> Result<SemistablePartition> {
        if pieces.is_empty() {
            return Err(Error::Empty("partition without pieces".into()));
        }
        if !host.is_full_dimensional() {
            return Err(Error::Structural("host polytope is not full-dimensional".into()));
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.rank() != host.rank() {
                return Err(Error::RankMismatch { expected: host.rank(), found: p.rank() });
            }
            if !p.is_full_dimensional() {
                return Err(Error::Structural(format!("piece {i} is not full-dimensional")));
            }
            if !host.contains_polytope(p) {
                return Err(Error::Structural(format!("piece {i} is not contained in the host")));
            }
        }
        let total: i64 = pieces.iter().map(|p| p.normalized_volume()).sum();
        if total != host.normalized_volume() {
            return Err(Error::Structural(format!(
                "piece volumes sum to {total}, host volume is {}",
                host.normalized_volume()
            )));
        }
        for i in 0..pieces.len() {
            for j in i + 1..pieces.len() {
                let x = intersection_vertices(&[&pieces[i], &pieces[j]]);
                if x.is_empty() {
                    continue;
                }
                if !is_face_point_set(&x, &pieces[i]) || !is_face_point_set(&x, &pieces[j]) {
                    return Err(Error::Structural(format!("pieces {i} and {j} do not meet in a common face")));
                }
            }
        }
        let complex = compute_dual_complex(&pieces);
        Ok(SemistablePartition { host, pieces, complex })
    }

    /// Partition given by vertex lists of the pieces.
    pub fn from_vertices(host: LatticePolytope, pieces: &[Vec<LatticeVector>]) -> Result<SemistablePartition> {
        let polys = pieces.iter().map(|p| convex_hull(p)).collect::<Result<Vec<_>>>()?;
        if let Some((i, _)) = polys.iter().zip(pieces).enumerate().find(|(_, (poly, given))| {
            let g: BTreeSet<&LatticeVector> = given.iter().collect();
            poly.vertices().iter().any(|v| !g.contains(v))
        }) {
            return Err(Error::Structural(format!("piece {i} has a vertex outside its vertex list")));
        }
        SemistablePartition::new(host, polys)
    }

    pub fn host(&self) -> &LatticePolytope {
        &self.host
    }

    pub fn pieces(&self) -> &[LatticePolytope] {
        &self.pieces
    }

    pub fn dual_complex(&self) -> &DualComplex {
        &self.complex
    }

    /// Vertex sets of all faces of all pieces, deduplicated.
    fn gamma_faces(&self) -> Vec<(usize, Vec<LatticeVector>)> {
        let mut set: BTreeSet<(usize, Vec<LatticeVector>)> = BTreeSet::new();
        for p in &self.pieces {
            for f in p.all_faces() {
                set.insert((f.dim, p.face_points(&f)));
            }
        }
        set.into_iter().collect()
    }

    fn piece_has_face(&self, i: usize, sigma: &[LatticeVector]) -> bool {
        let p = &self.pieces[i];
        p.all_faces().iter().any(|f| p.face_points(f) == sigma)
    }

    /// Smallest face of the host containing all the given points.
    fn carrier_face(&self, sigma: &[LatticeVector]) -> Vec<LatticeVector> {
        let tight: Vec<&Facet> =
            self.host.facets().iter().filter(|f| sigma.iter().all(|x| f.value(x) == 0)).collect();
        self.host.vertices().iter().filter(|v| tight.iter().all(|f| f.value(v) == 0)).cloned().collect()
    }

    pub fn validate_semistable(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for v in self.host.vertices() {
            let found = self.pieces.iter().filter(|p| p.contains(v)).count();
            if found != 1 {
                violations.push(Violation {
                    clause: "vertex-uniqueness".into(),
                    sigma: vec![v.clone()],
                    tau: vec![v.clone()],
                    expected: 1,
                    found,
                });
            }
        }
        for (l, sigma) in self.gamma_faces() {
            let tau = self.carrier_face(&sigma);
            let k = affine_rank(&tau);
            let found = (0..self.pieces.len()).filter(|&i| self.piece_has_face(i, &sigma)).count();
            if found != k - l + 1 {
                violations.push(Violation { clause: "face-count".into(), sigma, tau, expected: k - l + 1, found });
            }
        }
        let simplicial_pieces = self.pieces.iter().map(|p| p.is_simplicial()).collect();
        ValidationReport { valid: violations.is_empty(), violations, simplicial_pieces }
    }

    /// The origin lies in every piece.
    pub fn is_central(&self) -> bool {
        let origin = vec![0; self.host.rank()];
        self.pieces.iter().all(|p| p.contains(&origin))
    }

    /// Vertices of pieces that are not vertices of the host.
    pub fn gamma_vertices(&self) -> Vec<LatticeVector> {
        let set: BTreeSet<LatticeVector> = self
            .pieces
            .iter()
            .flat_map(|p| p.vertices().iter().cloned())
            .filter(|v| self.host.vertex_index(v).is_none())
            .collect();
        set.into_iter().collect()
    }

    /// Every Γ-vertex is a smooth vertex of some piece containing it.
    pub fn is_nonsingular(&self) -> bool {
        self.gamma_vertices().iter().all(|v| {
            self.pieces.iter().any(|p| p.vertex_index(v).is_some_and(|i| p.is_smooth_vertex(i)))
        })
    }

    /// Dimension of the common intersection of all pieces, if nonempty.
    pub fn common_face_dim(&self) -> Option<usize> {
        let refs: Vec<&LatticePolytope> = self.pieces.iter().collect();
        let x = intersection_vertices(&refs);
        if x.is_empty() {
            return None;
        }
        let rows: Vec<Vec<Q>> = x[1..].iter().map(|p| p.iter().zip(&x[0]).map(|(a, b)| a - b).collect()).collect();
        Some(if rows.is_empty() { 0 } else { QMatrix::from_rows(rows, self.host.rank()).map(|m| m.rank()).unwrap_or(0) })
    }

    /// Pairs of pieces sharing a facet, with the wall functional taken from the first piece.
    fn walls(&self) -> Vec<(usize, usize, Facet)> {
        let n = self.host.rank();
        let mut out = Vec::new();
        for i in 0..self.pieces.len() {
            for j in 0..self.pieces.len() {
                if i == j {
                    continue;
                }
                let x = intersection_vertices(&[&self.pieces[i], &self.pieces[j]]);
                let Some(pts) = x.iter().map(|v| q_to_i64(v)).collect::<Option<Vec<_>>>() else { continue };
                if pts.is_empty() || affine_rank(&pts) != n - 1 {
                    continue;
                }
                if let Some(f) = self.pieces[i].facets().iter().find(|f| pts.iter().all(|p| f.value(p) == 0)) {
                    out.push((i, j, f.clone()));
                }
            }
        }
        out
    }
}

fn compute_dual_complex(pieces: &[LatticePolytope]) -> DualComplex {
    let simplices = nonempty_subsets(pieces.len())
        .into_iter()
        .filter(|s| {
            let refs: Vec<&LatticePolytope> = s.iter().map(|&i| &pieces[i]).collect();
            s.len() == 1 || !intersection_vertices(&refs).is_empty()
        })
        .collect();
    DualComplex { vertex_count: pieces.len(), simplices }
}

/// Integral affine functionals `x ↦ ⟨c_i, x⟩ + d_i`, one per piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FGamma {
    pub functionals: Vec<(LatticeVector, i64)>,
    pub root: usize,
    pub bound: i64,
}

impl FGamma {
    pub fn piece_value(&self, i: usize, x: &[i64]) -> i64 {
        dot(&self.functionals[i].0, x) + self.functionals[i].1
    }

    /// `F(x) = min_i m_i(x)`.
    pub fn value(&self, x: &[i64]) -> i64 {
        (0..self.functionals.len()).map(|i| self.piece_value(i, x)).min().expect("at least one piece")
    }
}

/// Find the concave integral PL function whose domains of linearity are the pieces.
///
/// The piece holding the lexicographically smallest host vertex gets `m = 0`.
/// Across each wall of a spanning tree the neighbour differs by a positive
/// multiple `t ≤ bound` of the wall functional. Among valid choices the one
/// with the smallest sum of multiples, then the smallest flattened
/// coefficient vector, is returned.
pub fn build_f_gamma(g: &SemistablePartition, bound: i64) -> Result<FGamma> {
    if bound <= 0 {
        return Err(Error::pre("search bound must be positive"));
    }
    let report = g.validate_semistable();
    if !report.valid {
        return Err(Error::pre("partition is not semi-stable"));
    }
    if !g.is_nonsingular() {
        return Err(Error::pre("partition is singular"));
    }
    let n = g.host.rank();
    let k = g.pieces.len();
    let lowest = &g.host.vertices()[0];
    let root = (0..k).find(|&i| g.pieces[i].contains(lowest)).expect("some piece holds each host vertex");
    let walls = g.walls();
    let mut parent: Vec<Option<(usize, Facet)>> = vec![None; k];
    let mut seen = vec![false; k];
    seen[root] = true;
    let mut order = vec![root];
    let mut queue = VecDeque::from([root]);
    while let Some(i) = queue.pop_front() {
        for (a, b, f) in &walls {
            if *a == i && !seen[*b] {
                seen[*b] = true;
                parent[*b] = Some((i, f.clone()));
                order.push(*b);
                queue.push_back(*b);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Structural("pieces are not connected through walls".into()));
    }
    let tree: Vec<usize> = order[1..].to_vec();
    let mut best: Option<(i64, Vec<i64>, Vec<(LatticeVector, i64)>)> = None;
    let mut t = vec![1i64; tree.len()];
    loop {
        let mut m: Vec<Option<(LatticeVector, i64)>> = vec![None; k];
        m[root] = Some((vec![0; n], 0));
        for (e, &child) in tree.iter().enumerate() {
            let (p, f) = parent[child].as_ref().expect("tree edge");
            let (c, d) = m[*p].clone().expect("parent assigned first");
            let c2: Vec<i64> = c.iter().zip(&f.normal).map(|(a, b)| a + t[e] * b).collect();
            m[child] = Some((c2, d + t[e] * f.offset));
        }
        let m: Vec<(LatticeVector, i64)> = m.into_iter().map(|x| x.expect("all assigned")).collect();
        if f_gamma_valid(g, &m, &walls, bound) {
            let flat: Vec<i64> = m.iter().flat_map(|(c, d)| c.iter().copied().chain([*d])).collect();
            let key = (t.iter().sum::<i64>(), flat);
            if best.as_ref().map_or(true, |(s, f, _)| (key.0, &key.1) < (*s, f)) {
                best = Some((key.0, key.1, m));
            }
        }
        let mut i = 0;
        loop {
            if i == t.len() {
                let Some((_, _, m)) = best else {
                    return Err(Error::SearchExhausted(format!("no concave integral lifting with multiples ≤ {bound}")));
                };
                return Ok(FGamma { functionals: m, root, bound });
            }
            if t[i] < bound {
                t[i] += 1;
                break;
            }
            t[i] = 1;
            i += 1;
        }
    }
}

fn f_gamma_valid(
    g: &SemistablePartition,
    m: &[(LatticeVector, i64)],
    walls: &[(usize, usize, Facet)],
    bound: i64,
) -> bool {
    if m.iter().any(|(c, d)| c.iter().chain([d]).any(|x| x.abs() > bound)) {
        return false;
    }
    let val = |i: usize, x: &[i64]| dot(&m[i].0, x) + m[i].1;
    for (a, b, f) in walls {
        // m_b - m_a must be a positive multiple of the wall functional of a.
        let diff: Vec<i64> = m[*b].0.iter().zip(&m[*a].0).map(|(x, y)| x - y).collect();
        let dd = m[*b].1 - m[*a].1;
        let full: Vec<i64> = diff.iter().copied().chain([dd]).collect();
        let wall: Vec<i64> = f.normal.iter().copied().chain([f.offset]).collect();
        let s = wall.iter().zip(&full).find(|(w, _)| **w != 0).map(|(w, x)| x / w).unwrap_or(0);
        if s <= 0 || wall.iter().zip(&full).any(|(w, x)| w * s != *x) {
            return false;
        }
    }
    g.pieces.iter().enumerate().all(|(i, p)| {
        p.vertices().iter().all(|v| (0..m.len()).all(|j| val(j, v) >= val(i, v)))
    })
}

/// `{(y, x) : x ∈ Δ, y ≥ F(x)}` with inequalities `⟨normal, (y, x)⟩ ≥ −offset`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftedPolyhedron {
    pub rank: usize,
    pub inequalities: Vec<Facet>,
    pub recession_rays: Vec<LatticeVector>,
}

impl LiftedPolyhedron {
    pub fn contains(&self, x: &[i64]) -> bool {
        self.inequalities.iter().all(|f| f.value(x) >= 0)
    }
}

pub fn lifting_polyhedron(g: &SemistablePartition, f: &FGamma) -> LiftedPolyhedron {
    let n = g.host.rank();
    let mut set: BTreeSet<Facet> = BTreeSet::new();
    for (c, d) in &f.functionals {
        let mut normal = vec![1];
        normal.extend(c.iter().map(|x| -x));
        set.insert(Facet { normal, offset: -d });
    }
    for h in g.host.facets() {
        let mut normal = vec![0];
        normal.extend(h.normal.iter().copied());
        set.insert(Facet { normal, offset: h.offset });
    }
    let mut up = vec![0; n + 1];
    up[0] = 1;
    LiftedPolyhedron { rank: n + 1, inequalities: set.into_iter().collect(), recession_rays: vec![up] }
}

/// Bounded faces of the lifting and whether each projects to a face of the host or of a piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionCheck {
    pub bounded_faces: usize,
    pub failures: Vec<Vec<LatticeVector>>,
}

/// Truncate the lifting above its highest vertex (display helper).
pub fn truncated_lifting(g: &SemistablePartition, f: &FGamma) -> Result<LatticePolytope> {
    let lifted = lifted_vertices(g, f);
    let top = lifted.iter().map(|v| v[0]).max().unwrap_or(0) + 1;
    let mut pts = lifted;
    for v in g.host.vertices() {
        let mut p = vec![top];
        p.extend(v.iter().copied());
        pts.push(p);
    }
    convex_hull(&pts)
}

fn lifted_vertices(g: &SemistablePartition, f: &FGamma) -> Vec<LatticeVector> {
    let set: BTreeSet<LatticeVector> = g
        .pieces
        .iter()
        .flat_map(|p| p.vertices().iter())
        .map(|v| {
            let mut p = vec![f.value(v)];
            p.extend(v.iter().copied());
            p
        })
        .collect();
    set.into_iter().collect()
}

pub fn projection_check(g: &SemistablePartition, f: &FGamma) -> Result<ProjectionCheck> {
    let trunc = truncated_lifting(g, f)?;
    let top = trunc.vertices().iter().map(|v| v[0]).max().unwrap_or(0);
    let mut bounded = 0;
    let mut failures = Vec::new();
    let mut candidates: Vec<BTreeSet<LatticeVector>> = Vec::new();
    for p in g.pieces.iter().chain(std::iter::once(&g.host)) {
        for face in p.all_faces() {
            candidates.push(p.face_points(&face).into_iter().collect());
        }
    }
    for face in trunc.all_faces() {
        let pts = trunc.face_points(&face);
        if pts.iter().any(|p| p[0] == top) {
            continue;
        }
        bounded += 1;
        let proj: BTreeSet<LatticeVector> = pts.iter().map(|p| p[1..].to_vec()).collect();
        if !candidates.contains(&proj) {
            failures.push(proj.into_iter().collect());
        }
    }
    Ok(ProjectionCheck { bounded_faces: bounded, failures })
}

/// Linear span of the common face and the primitive vectors `v_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentralFrame {
    pub l: usize,
    pub l_basis: Vec<LatticeVector>,
    /// Rows of a surjection `ℤⁿ → ℤˡ` with kernel `L`.
    pub quotient: Vec<LatticeVector>,
    /// Rays of the projected fan, indexed like the pieces.
    pub quotient_rays: Vec<LatticeVector>,
    pub v: Vec<LatticeVector>,
}

impl CentralFrame {
    pub fn project(&self, x: &[i64]) -> LatticeVector {
        self.quotient.iter().map(|r| dot(r, x)).collect()
    }
}

pub fn central_frame(g: &SemistablePartition) -> Result<CentralFrame> {
    if !g.is_central() {
        return Err(Error::pre("partition is not central"));
    }
    let n = g.host.rank();
    let refs: Vec<&LatticePolytope> = g.pieces.iter().collect();
    let common = intersection_vertices(&refs);
    let common: Vec<LatticeVector> = common.iter().map(|v| primitive_from_q(v)).filter(|v| v.iter().any(|&x| x != 0)).collect();
    let quotient = if common.is_empty() {
        (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
    } else {
        integer_kernel(&common, n)
    };
    let l_basis = integer_kernel(&quotient, n);
    let l = quotient.len();
    if g.complex.dim() != l {
        return Err(Error::Structural(format!(
            "dual complex has dimension {} but the common face has codimension {l}",
            g.complex.dim()
        )));
    }
    if l == 0 {
        return Ok(CentralFrame { l, l_basis, quotient, quotient_rays: Vec::new(), v: Vec::new() });
    }
    let proj = |x: &LatticeVector| -> LatticeVector { quotient.iter().map(|r| dot(r, x)).collect() };
    let piece_cones: Vec<Cone> = g
        .pieces
        .iter()
        .map(|p| Cone::new(&p.vertices().iter().map(proj).collect::<Vec<_>>(), l))
        .collect::<Result<_>>()?;
    let rays: BTreeSet<LatticeVector> = piece_cones.iter().flat_map(|c| c.rays.iter().cloned()).collect();
    let rays: Vec<LatticeVector> = rays.into_iter().collect();
    if rays.len() != l + 1 || g.pieces.len() != l + 1 {
        return Err(Error::Structural(format!(
            "projected pieces give {} rays for {} pieces, expected {}",
            rays.len(),
            g.pieces.len(),
            l + 1
        )));
    }
    let mut quotient_rays = Vec::new();
    for (i, c) in piece_cones.iter().enumerate() {
        let missing: Vec<&LatticeVector> = rays.iter().filter(|r| !c.has_ray(r)).collect();
        if missing.len() != 1 {
            return Err(Error::Structural(format!("projection of piece {i} omits {} rays", missing.len())));
        }
        quotient_rays.push(missing[0].clone());
    }
    if quotient_rays.iter().collect::<BTreeSet<_>>().len() != l + 1 {
        return Err(Error::Structural("two pieces omit the same projected ray".into()));
    }
    let cols: Vec<Vec<i64>> = (0..l).map(|r| rays.iter().map(|w| w[r]).collect()).collect();
    let rel = QMatrix::from_i64(&cols).nullspace();
    let positive = rel.len() == 1 && {
        let s = &rel[0];
        s.iter().all(|x| *x > q(0)) || s.iter().all(|x| *x < q(0))
    };
    if !positive {
        return Err(Error::Structural("projected rays do not form a complete simplicial fan".into()));
    }
    let qm = QMatrix::from_i64(&quotient);
    let gram = qm.mul(&qm.transpose())?;
    let v = quotient_rays
        .iter()
        .map(|w| {
            let wq: Vec<Q> = w.iter().map(|&x| q(x)).collect();
            let alpha = gram.solve(&wq).expect("gram matrix of a basis is invertible");
            primitive_from_q(&qm.transpose().mul_vec(&alpha))
        })
        .collect();
    Ok(CentralFrame { l, l_basis, quotient, quotient_rays, v })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FibrationFans {
    pub sigma_delta: Fan,
    pub sigma_prime: Fan,
    pub sigma_v: Fan,
    pub sigma_gamma: Fan,
    pub sigma_prime_gamma: Fan,
    /// `v_i` that had to be added to the refined fan by star subdivision.
    pub forced_rays: Vec<LatticeVector>,
}

pub fn build_fibration_fans(g: &SemistablePartition, frame: &CentralFrame) -> Result<FibrationFans> {
    let n = g.host.rank();
    if n > 3 {
        return Err(Error::Unsupported(format!("fibration fans in rank {n} (limit 3)")));
    }
    let sigma_delta = face_fan(&g.host)?;
    let mut sigma_prime = refine_with_boundary_rays(&sigma_delta, &g.host)?;
    let mut forced_rays = Vec::new();
    for v in &frame.v {
        if !sigma_prime.rays.contains(v) {
            sigma_prime = stellar_subdivide(&sigma_prime, v)?;
            forced_rays.push(v.clone());
        }
    }
    let sigma_v = if frame.l == 0 {
        Fan::point()
    } else {
        let cones = subsets(frame.l + 1, frame.l)
            .into_iter()
            .map(|s| Cone::new(&s.iter().map(|&i| frame.quotient_rays[i].clone()).collect::<Vec<_>>(), frame.l))
            .collect::<Result<Vec<_>>>()?;
        Fan::new(frame.l, cones)?
    };
    let in_l: Vec<LatticeVector> = sigma_prime
        .rays
        .iter()
        .filter(|r| frame.project(r).iter().all(|&x| x == 0))
        .cloned()
        .chain(frame.v.iter().cloned())
        .collect();
    let sigma_gamma = sigma_prime.restrict_to_rays(&in_l);
    let mut walls: Vec<LatticeVector> = sigma_prime
        .rays
        .iter()
        .filter(|r| g.pieces.iter().filter(|p| p.contains(r)).count() >= 2)
        .cloned()
        .collect();
    walls.extend(frame.v.iter().cloned());
    let sigma_prime_gamma = sigma_prime.restrict_to_rays(&walls);
    Ok(FibrationFans { sigma_delta, sigma_prime, sigma_v, sigma_gamma, sigma_prime_gamma, forced_rays })
}

/// Normalized volumes per piece, for the tiling invariant.
pub fn piece_volumes(g: &SemistablePartition) -> BTreeMap<usize, i64> {
    g.pieces.iter().enumerate().map(|(i, p)| (i, p.normalized_volume())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_geometry::named::*;

    fn vsplit() -> SemistablePartition {
        SemistablePartition::from_vertices(
            square(),
            &[
                vec![vec![0, -1], vec![0, 1], vec![1, -1], vec![1, 1]],
                vec![vec![-1, -1], vec![-1, 1], vec![0, -1], vec![0, 1]],
            ],
        )
        .unwrap()
    }

    fn diag() -> SemistablePartition {
        SemistablePartition::from_vertices(
            square(),
            &[vec![vec![-1, -1], vec![1, -1], vec![1, 1]], vec![vec![-1, -1], vec![-1, 1], vec![1, 1]]],
        )
        .unwrap()
    }

    #[test]
    fn vertical_split_is_semistable() {
        let g = vsplit();
        let r = g.validate_semistable();
        assert!(r.valid, "{:?}", r.violations);
        assert_eq!(g.dual_complex().simplices, vec![vec![0], vec![1], vec![0, 1]]);
        assert_eq!(g.dual_complex().dim(), 1);
        assert!(g.is_central());
        assert!(g.is_nonsingular());
    }

    #[test]
    fn diagonal_split_fails_vertex_uniqueness() {
        let r = diag().validate_semistable();
        assert!(!r.valid);
        let bad: Vec<&Violation> = r.violations.iter().filter(|v| v.clause == "vertex-uniqueness").collect();
        let pts: Vec<LatticeVector> = bad.iter().map(|v| v.sigma[0].clone()).collect();
        assert_eq!(pts, vec![vec![-1, -1], vec![1, 1]]);
    }

    #[test]
    fn trivial_partition() {
        let g = SemistablePartition::new(square(), vec![square()]).unwrap();
        assert!(g.validate_semistable().valid);
        assert_eq!(g.dual_complex().dim(), 0);
        let f = build_f_gamma(&g, 10).unwrap();
        assert_eq!(f.functionals, vec![(vec![0, 0], 0)]);
        let frame = central_frame(&g).unwrap();
        assert_eq!(frame.l, 0);
        assert!(frame.v.is_empty());
    }

    #[test]
    fn non_tiling_rejected() {
        let half = convex_hull(&[vec![0, -1], vec![0, 1], vec![1, -1], vec![1, 1]]).unwrap();
        assert!(matches!(SemistablePartition::new(square(), vec![half]), Err(Error::Structural(_))));
        assert!(SemistablePartition::new(square(), vec![square(), square()]).is_err());
    }

    #[test]
    fn f_gamma_vertical_split() {
        let g = vsplit();
        let f = build_f_gamma(&g, 10).unwrap();
        assert_eq!(f.functionals[1], (vec![0, 0], 0));
        assert_eq!(f.functionals[0], (vec![-1, 0], 0));
        for x in g.host().lattice_points() {
            assert_eq!(f.value(&x), 0.min(-x[0]));
        }
        assert!(build_f_gamma(&diag(), 10).is_err());
    }

    #[test]
    fn lifting_vertical_split() {
        let g = vsplit();
        let f = build_f_gamma(&g, 10).unwrap();
        let lift = lifting_polyhedron(&g, &f);
        assert!(lift.inequalities.contains(&Facet { normal: vec![1, 0, 0], offset: 0 }));
        assert!(lift.inequalities.contains(&Facet { normal: vec![1, 1, 0], offset: 0 }));
        assert_eq!(lift.inequalities.len(), 6);
        assert_eq!(lift.recession_rays, vec![vec![1, 0, 0]]);
        let check = projection_check(&g, &f).unwrap();
        assert!(check.failures.is_empty());
        assert!(check.bounded_faces > 0);
    }

    #[test]
    fn frame_and_fans() {
        let g = vsplit();
        let frame = central_frame(&g).unwrap();
        assert_eq!(frame.l, 1);
        assert_eq!(frame.l_basis, vec![vec![0, 1]]);
        assert_eq!(frame.v, vec![vec![-1, 0], vec![1, 0]]);
        let fans = build_fibration_fans(&g, &frame).unwrap();
        assert_eq!(fans.sigma_delta.rays.len(), 4);
        assert_eq!(fans.sigma_prime.rays.len(), 8);
        assert_eq!(fans.sigma_v.rays.len(), 2);
        assert!(fans.sigma_v.is_complete());
        assert!(fans.forced_rays.is_empty());
        assert_eq!(fans.sigma_gamma.rays, vec![vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]);
    }
}
