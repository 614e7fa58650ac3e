//! Lattice polytopes with exact integer V- and H-representations.
//!
//! Facets are stored as `(normal, offset)` meaning `⟨normal, x⟩ ≥ −offset`.
//! Polytopes that are not full-dimensional keep a list of affine equations
//! cutting out their affine hull; their facets are then relative facets.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::combinat::subsets;
use crate::error::{Error, Result};
use crate::linalg::{dot, int_det, int_rank, integer_kernel, primitive, Q};
use crate::polyhedral::independent_coords;

/// Integer coordinates in a lattice of fixed rank.
pub type LatticeVector = Vec<i64>;

pub fn is_primitive(v: &[i64]) -> bool {
    crate::linalg::gcd_slice(v) == 1
}

/// Which of the two dual lattices a polytope lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ambient {
    M,
    N,
}

impl Ambient {
    pub fn flip(self) -> Self {
        match self {
            Ambient::M => Ambient::N,
            Ambient::N => Ambient::M,
        }
    }
}

/// Supporting inequality `⟨normal, x⟩ ≥ −offset`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Facet {
    pub normal: LatticeVector,
    pub offset: i64,
}

impl Facet {
    pub fn value(&self, x: &[i64]) -> i64 {
        dot(&self.normal, x) + self.offset
    }
}

/// A face given by the indices of the vertices it contains.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face {
    pub dim: usize,
    pub vertices: Vec<usize>,
}

/// Lattice points of the (relative) interior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteriorPoints {
    pub points: Vec<LatticeVector>,
    /// True when the polytope is not full-dimensional and the points are
    /// relative-interior points.
    pub relative: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolytope {
    rank: usize,
    ambient: Ambient,
    dim: usize,
    vertices: Vec<LatticeVector>,
    facets: Vec<Facet>,
    /// Affine hull as `⟨a, x⟩ = b`.
    equations: Vec<(LatticeVector, i64)>,
}

pub fn convex_hull(points: &[LatticeVector]) -> Result<LatticePolytope> {
    convex_hull_in(points, Ambient::M)
}

pub fn convex_hull_in(points: &[LatticeVector], ambient: Ambient) -> Result<LatticePolytope> {
    let first = points.first().ok_or_else(|| Error::Empty("convex hull of no points".into()))?;
    let rank = first.len();
    if let Some(p) = points.iter().find(|p| p.len() != rank) {
        return Err(Error::RankMismatch { expected: rank, found: p.len() });
    }
    let pts: Vec<LatticeVector> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let base = &pts[0];
    let diffs: Vec<Vec<i64>> = pts[1..].iter().map(|p| sub(p, base)).collect();
    let dim = if diffs.is_empty() { 0 } else { int_rank(&diffs) };
    let equations: Vec<(LatticeVector, i64)> = if dim == rank {
        Vec::new()
    } else {
        let ker = integer_kernel(&diffs, rank);
        let mut eqs: Vec<(LatticeVector, i64)> = ker.into_iter().map(|a| {
            let b = dot(&a, base);
            (a, b)
        }).collect();
        eqs.sort();
        eqs
    };
    if dim == 0 {
        return Ok(LatticePolytope { rank, ambient, dim, vertices: pts, facets: Vec::new(), equations });
    }
    let coords = independent_coords(&diffs, rank, dim);
    let proj: Vec<Vec<i64>> = pts.iter().map(|p| coords.iter().map(|&c| p[c]).collect()).collect();
    let local = full_dim_facets(&proj, dim);
    let mut facets: Vec<Facet> = local
        .into_iter()
        .map(|f| {
            let mut normal = vec![0; rank];
            for (k, &c) in coords.iter().enumerate() {
                normal[c] = f.normal[k];
            }
            Facet { normal, offset: f.offset }
        })
        .collect();
    facets.sort();
    let vertices = pts
        .iter()
        .filter(|p| {
            let tight: Vec<Vec<i64>> = facets.iter().filter(|f| f.value(p) == 0).map(|f| f.normal.clone()).collect();
            !tight.is_empty() && int_rank(&tight) == dim
        })
        .cloned()
        .collect();
    Ok(LatticePolytope { rank, ambient, dim, vertices, facets, equations })
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Facets of a full-dimensional point configuration, by brute force over
/// hyperplanes through affinely independent point tuples.
fn full_dim_facets(pts: &[Vec<i64>], n: usize) -> Vec<Facet> {
    let mut found: BTreeSet<Facet> = BTreeSet::new();
    for combo in subsets(pts.len(), n) {
        let base = &pts[combo[0]];
        let rows: Vec<Vec<i64>> = combo[1..].iter().map(|&i| sub(&pts[i], base)).collect();
        if !rows.is_empty() && int_rank(&rows) != n - 1 {
            continue;
        }
        let ker = integer_kernel(&rows, n);
        if ker.len() != 1 {
            continue;
        }
        let normal = &ker[0];
        let c0 = dot(normal, base);
        let vals: Vec<i64> = pts.iter().map(|p| dot(normal, p)).collect();
        if vals.iter().all(|&v| v >= c0) {
            found.insert(Facet { normal: normal.clone(), offset: -c0 });
        } else if vals.iter().all(|&v| v <= c0) {
            found.insert(Facet { normal: normal.iter().map(|x| -x).collect(), offset: c0 });
        }
    }
    found.into_iter().collect()
}

impl LatticePolytope {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn with_ambient(mut self, ambient: Ambient) -> Self {
        self.ambient = ambient;
        self
    }

    pub fn vertices(&self) -> &[LatticeVector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn equations(&self) -> &[(LatticeVector, i64)] {
        &self.equations
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.rank
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.equations.iter().all(|(a, b)| dot(a, x) == *b) && self.facets.iter().all(|f| f.value(x) >= 0)
    }

    /// Membership of a rational point.
    pub fn contains_q(&self, x: &[Q]) -> bool {
        use crate::linalg::{q, q_dot_i};
        self.equations.iter().all(|(a, b)| q_dot_i(x, a) == q(*b))
            && self.facets.iter().all(|f| q_dot_i(x, &f.normal) + q(f.offset) >= q(0))
    }

    pub fn strictly_contains(&self, x: &[i64]) -> bool {
        self.equations.iter().all(|(a, b)| dot(a, x) == *b) && self.facets.iter().all(|f| f.value(x) > 0)
    }

    pub fn contains_polytope(&self, other: &LatticePolytope) -> bool {
        other.vertices.iter().all(|v| self.contains(v))
    }

    pub fn vertex_index(&self, v: &[i64]) -> Option<usize> {
        self.vertices.iter().position(|w| w == v)
    }

    /// Indices of vertices on which a facet is tight.
    pub fn facet_vertices(&self, f: &Facet) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&i| f.value(&self.vertices[i]) == 0).collect()
    }

    fn affine_dim(&self, idx: &[usize]) -> usize {
        if idx.len() <= 1 {
            return 0;
        }
        let base = &self.vertices[idx[0]];
        let rows: Vec<Vec<i64>> = idx[1..].iter().map(|&i| sub(&self.vertices[i], base)).collect();
        int_rank(&rows)
    }

    /// Every nonempty face, ordered by dimension then vertex set.
    pub fn all_faces(&self) -> Vec<Face> {
        let full: Vec<usize> = (0..self.vertices.len()).collect();
        let facet_sets: Vec<Vec<usize>> = self.facets.iter().map(|f| self.facet_vertices(f)).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        seen.insert(full.clone());
        let mut queue: Vec<Vec<usize>> = vec![full];
        while let Some(cur) = queue.pop() {
            for fs in &facet_sets {
                let inter: Vec<usize> = cur.iter().copied().filter(|i| fs.contains(i)).collect();
                if !inter.is_empty() && seen.insert(inter.clone()) {
                    queue.push(inter);
                }
            }
        }
        let mut faces: Vec<Face> = seen.into_iter().map(|v| Face { dim: self.affine_dim(&v), vertices: v }).collect();
        faces.sort();
        faces
    }

    /// All faces of dimension `l`.
    pub fn faces(&self, l: usize) -> Result<Vec<Face>> {
        if l > self.dim {
            return Err(Error::pre(format!("face dimension {l} exceeds polytope dimension {}", self.dim)));
        }
        Ok(self.all_faces().into_iter().filter(|f| f.dim == l).collect())
    }

    pub fn face_points(&self, f: &Face) -> Vec<LatticeVector> {
        f.vertices.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    fn bounding_box(&self) -> (Vec<i64>, Vec<i64>) {
        let lo = (0..self.rank).map(|c| self.vertices.iter().map(|v| v[c]).min().unwrap_or(0)).collect();
        let hi = (0..self.rank).map(|c| self.vertices.iter().map(|v| v[c]).max().unwrap_or(0)).collect();
        (lo, hi)
    }

    /// Lattice points by bounding-box scan, in lexicographic order.
    pub fn lattice_points(&self) -> Vec<LatticeVector> {
        let (lo, hi) = self.bounding_box();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        if self.rank == 0 {
            return vec![Vec::new()];
        }
        loop {
            if self.contains(&cur) {
                out.push(cur.clone());
            }
            let mut c = self.rank;
            loop {
                if c == 0 {
                    return out;
                }
                c -= 1;
                if cur[c] < hi[c] {
                    cur[c] += 1;
                    for k in c + 1..self.rank {
                        cur[k] = lo[k];
                    }
                    break;
                }
            }
        }
    }

    pub fn interior_lattice_points(&self) -> InteriorPoints {
        let points = if self.dim == 0 {
            self.vertices.clone()
        } else {
            self.lattice_points().into_iter().filter(|p| self.strictly_contains(p)).collect()
        };
        InteriorPoints { points, relative: !self.is_full_dimensional() }
    }

    pub fn boundary_lattice_points(&self) -> Vec<LatticeVector> {
        self.lattice_points().into_iter().filter(|p| !self.strictly_contains(p)).collect()
    }

    /// Why the polytope fails to be reflexive, if it does.
    pub fn reflexivity_diagnostic(&self) -> Option<String> {
        if !self.is_full_dimensional() {
            return Some(format!("polytope has dimension {} in rank {}", self.dim, self.rank));
        }
        let origin = vec![0; self.rank];
        if !self.strictly_contains(&origin) {
            return Some("origin is not an interior point".into());
        }
        self.facets
            .iter()
            .find(|f| f.offset != 1)
            .map(|f| format!("facet with normal {:?} has offset {}", f.normal, f.offset))
    }

    pub fn is_reflexive(&self) -> bool {
        self.reflexivity_diagnostic().is_none()
    }

    /// Polar dual `{u : ⟨u, v⟩ ≥ −1 for v in self}`; the ambient tag flips.
    pub fn polar_dual(&self) -> Result<LatticePolytope> {
        if let Some(why) = self.reflexivity_diagnostic() {
            return Err(Error::pre(format!("polar dual needs a reflexive polytope: {why}")));
        }
        let normals: Vec<LatticeVector> = self.facets.iter().map(|f| f.normal.clone()).collect();
        convex_hull_in(&normals, self.ambient.flip())
    }

    /// Primitive edge directions leaving vertex `v`.
    pub fn edge_directions(&self, v: usize) -> Vec<LatticeVector> {
        self.all_faces()
            .into_iter()
            .filter(|f| f.dim == 1 && f.vertices.contains(&v))
            .map(|f| {
                let w = *f.vertices.iter().find(|&&w| w != v).expect("edge has two endpoints");
                primitive(&sub(&self.vertices[w], &self.vertices[v]))
            })
            .collect()
    }

    /// Exactly `n` edges at each vertex whose directions span the space.
    pub fn is_simplicial(&self) -> bool {
        self.is_full_dimensional()
            && (0..self.vertices.len()).all(|v| {
                let e = self.edge_directions(v);
                e.len() == self.rank && int_rank(&e) == self.rank
            })
    }

    pub fn is_smooth_vertex(&self, v: usize) -> bool {
        let e = self.edge_directions(v);
        e.len() == self.dim && self.dim == self.rank && int_det(&e).abs() == 1
    }

    /// Edge directions at every vertex form a lattice basis.
    pub fn is_smooth(&self) -> bool {
        self.is_full_dimensional() && (0..self.vertices.len()).all(|v| self.is_smooth_vertex(v))
    }

    /// Normalized lattice volume (`n!` times Euclidean volume) of a full-dimensional polytope.
    pub fn normalized_volume(&self) -> i64 {
        if !self.is_full_dimensional() {
            return 0;
        }
        let faces = self.all_faces();
        let full: Vec<usize> = (0..self.vertices.len()).collect();
        let simplices = pull_triangulation(&faces, &full, self.dim);
        simplices
            .iter()
            .map(|s| {
                let base = &self.vertices[s[0]];
                let rows: Vec<Vec<i64>> = s[1..].iter().map(|&i| sub(&self.vertices[i], base)).collect();
                int_det(&rows).abs()
            })
            .sum()
    }

    /// Image under an integer linear map given by its rows.
    pub fn transform(&self, m: &[Vec<i64>]) -> Result<LatticePolytope> {
        let pts: Vec<LatticeVector> =
            self.vertices.iter().map(|v| m.iter().map(|row| dot(row, v)).collect()).collect();
        convex_hull_in(&pts, self.ambient)
    }
}

/// Pulling triangulation of a face: cone the smallest vertex over every
/// facet of the face that avoids it.
fn pull_triangulation(faces: &[Face], face: &[usize], dim: usize) -> Vec<Vec<usize>> {
    if dim == 0 {
        return vec![face.to_vec()];
    }
    let apex = face[0];
    let mut out = Vec::new();
    for g in faces.iter().filter(|g| {
        g.dim + 1 == dim && !g.vertices.contains(&apex) && g.vertices.iter().all(|v| face.contains(v))
    }) {
        for mut s in pull_triangulation(faces, &g.vertices, dim - 1) {
            s.insert(0, apex);
            out.push(s);
        }
    }
    out
}

pub fn minkowski_sum(a: &LatticePolytope, b: &LatticePolytope) -> Result<LatticePolytope> {
    if a.rank != b.rank {
        return Err(Error::RankMismatch { expected: a.rank, found: b.rank });
    }
    let pts: Vec<LatticeVector> =
        a.vertices.iter().flat_map(|u| b.vertices.iter().map(move |v| add(u, v))).collect();
    convex_hull_in(&pts, a.ambient)
}

/// The polytopes used throughout the tests and the bundled corpus.
pub mod named {
    use super::*;

    pub fn square() -> LatticePolytope {
        convex_hull(&[vec![-1, -1], vec![-1, 1], vec![1, -1], vec![1, 1]]).expect("square")
    }

    pub fn diamond() -> LatticePolytope {
        convex_hull(&[vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]]).expect("diamond")
    }

    pub fn big_square() -> LatticePolytope {
        convex_hull(&[vec![-2, -2], vec![-2, 2], vec![2, -2], vec![2, 2]]).expect("big square")
    }

    pub fn hexagon() -> LatticePolytope {
        convex_hull(&[vec![1, 0], vec![0, 1], vec![-1, 1], vec![-1, 0], vec![0, -1], vec![1, -1]]).expect("hexagon")
    }

    pub fn cube() -> LatticePolytope {
        let mut pts = Vec::new();
        for x in [-1, 1] {
            for y in [-1, 1] {
                for z in [-1, 1] {
                    pts.push(vec![x, y, z]);
                }
            }
        }
        convex_hull(&pts).expect("cube")
    }

    pub fn octahedron() -> LatticePolytope {
        let mut pts = Vec::new();
        for i in 0..3 {
            for s in [-1, 1] {
                let mut v = vec![0; 3];
                v[i] = s;
                pts.push(v);
            }
        }
        convex_hull(&pts).expect("octahedron")
    }

    pub fn by_name(name: &str) -> Option<LatticePolytope> {
        match name {
            "square" => Some(square()),
            "diamond" => Some(diamond()),
            "big-square" => Some(big_square()),
            "hexagon" => Some(hexagon()),
            "cube" => Some(cube()),
            "octahedron" => Some(octahedron()),
            _ => None,
        }
    }
}
