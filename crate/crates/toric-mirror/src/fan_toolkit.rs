//! Strongly convex rational cones, fans and piecewise-linear functions on them.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::lattice_geometry::{LatticePolytope, LatticeVector};
use crate::linalg::{dot, int_rank, primitive, q, q_dot_i, q_to_i64, QMatrix, Q};
use crate::polyhedral::{cone_h, extreme_rays, independent_coords, ConeH};

/// Cone spanned by primitive extreme rays, stored in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cone {
    pub rays: Vec<LatticeVector>,
}

impl Cone {
    /// Cone generated by `gens`; redundant generators are dropped.
    pub fn new(gens: &[LatticeVector], rank: usize) -> Result<Cone> {
        if let Some(g) = gens.iter().find(|g| g.len() != rank) {
            return Err(Error::RankMismatch { expected: rank, found: g.len() });
        }
        let prim: BTreeSet<LatticeVector> =
            gens.iter().filter(|g| g.iter().any(|&x| x != 0)).map(|g| primitive(g)).collect();
        let prim: Vec<LatticeVector> = prim.into_iter().collect();
        let h = cone_h(&prim, rank);
        if !h.is_pointed(rank) {
            return Err(Error::Structural(format!("cone over {prim:?} contains a line")));
        }
        let rays = prim
            .iter()
            .filter(|r| {
                let tight: Vec<Vec<i64>> = h.inequalities.iter().filter(|a| dot(a, r) == 0).cloned().collect();
                h.dim <= 1 || (!tight.is_empty() && int_rank(&tight_in_span(&tight, &h, rank)) == h.dim - 1)
            })
            .cloned()
            .collect();
        Ok(Cone { rays })
    }

    pub fn dim(&self) -> usize {
        if self.rays.is_empty() {
            0
        } else {
            int_rank(&self.rays)
        }
    }

    pub fn rank(&self) -> usize {
        self.rays.first().map_or(0, |r| r.len())
    }

    pub fn h_rep(&self, rank: usize) -> ConeH {
        cone_h(&self.rays, rank)
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.h_rep(x.len()).contains(x)
    }

    pub fn has_ray(&self, r: &[i64]) -> bool {
        self.rays.iter().any(|s| s == r)
    }

    /// Ray subsets of the faces of this cone (including the apex and the cone itself).
    pub fn face_ray_sets(&self, rank: usize) -> Vec<Vec<LatticeVector>> {
        let h = self.h_rep(rank);
        let tight_sets: Vec<Vec<LatticeVector>> = h
            .inequalities
            .iter()
            .map(|a| self.rays.iter().filter(|r| dot(a, r) == 0).cloned().collect())
            .collect();
        let mut seen: BTreeSet<Vec<LatticeVector>> = BTreeSet::new();
        seen.insert(self.rays.clone());
        let mut queue = vec![self.rays.clone()];
        while let Some(cur) = queue.pop() {
            for t in &tight_sets {
                let inter: Vec<LatticeVector> = cur.iter().filter(|r| t.contains(r)).cloned().collect();
                if seen.insert(inter.clone()) {
                    queue.push(inter);
                }
            }
        }
        seen.into_iter().collect()
    }
}

/// Tight facet normals reduced modulo the equations of the span, for rank counting.
fn tight_in_span(tight: &[Vec<i64>], h: &ConeH, rank: usize) -> Vec<Vec<i64>> {
    // Restrict the functionals to the span by projecting onto independent coordinates of it.
    let span_basis = crate::linalg::integer_kernel(&h.equations, rank);
    tight.iter().map(|a| span_basis.iter().map(|b| dot(a, b)).collect()).collect()
}

/// Rays of `c1 ∩ c2` when both cones are pointed.
pub fn intersect(c1: &Cone, c2: &Cone, rank: usize) -> Vec<LatticeVector> {
    let (h1, h2) = (c1.h_rep(rank), c2.h_rep(rank));
    let mut eqs = h1.equations.clone();
    eqs.extend(h2.equations.iter().cloned());
    let mut ineqs = h1.inequalities.clone();
    ineqs.extend(h2.inequalities.iter().cloned());
    extreme_rays(&eqs, &ineqs, rank)
}

/// Whether the cone spanned by `rays` is a face of `c`.
pub fn is_face_of(rays: &[LatticeVector], c: &Cone, rank: usize) -> bool {
    if rays.is_empty() {
        return true;
    }
    let h = c.h_rep(rank);
    let tight: Vec<&Vec<i64>> = h.inequalities.iter().filter(|a| rays.iter().all(|r| dot(a, r) == 0)).collect();
    let face: BTreeSet<&LatticeVector> =
        c.rays.iter().filter(|r| tight.iter().all(|a| dot(a, r) == 0)).collect();
    let want: BTreeSet<&LatticeVector> = rays.iter().collect();
    face == want
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub ambient_rank: usize,
    pub maximal_cones: Vec<Cone>,
    pub rays: Vec<LatticeVector>,
}

impl Fan {
    /// Build a fan, checking that every pairwise intersection is a face of both cones.
    pub fn new(ambient_rank: usize, cones: Vec<Cone>) -> Result<Fan> {
        let mut cones: Vec<Cone> = cones.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        cones.retain(|c| !c.rays.is_empty() || ambient_rank == 0);
        for i in 0..cones.len() {
            for j in i + 1..cones.len() {
                let inter = intersect(&cones[i], &cones[j], ambient_rank);
                if !is_face_of(&inter, &cones[i], ambient_rank) || !is_face_of(&inter, &cones[j], ambient_rank) {
                    return Err(Error::Structural(format!(
                        "cones {:?} and {:?} meet outside a common face",
                        cones[i].rays, cones[j].rays
                    )));
                }
            }
        }
        let rays: BTreeSet<LatticeVector> = cones.iter().flat_map(|c| c.rays.iter().cloned()).collect();
        Ok(Fan { ambient_rank, maximal_cones: cones, rays: rays.into_iter().collect() })
    }

    /// Fan of rank 0 consisting of the origin only.
    pub fn point() -> Fan {
        Fan { ambient_rank: 0, maximal_cones: vec![Cone { rays: Vec::new() }], rays: Vec::new() }
    }

    /// Every full-dimensional cone's facets are shared by exactly two maximal cones.
    pub fn is_complete(&self) -> bool {
        let n = self.ambient_rank;
        if n == 0 {
            return true;
        }
        if self.maximal_cones.iter().any(|c| c.dim() != n) {
            return false;
        }
        let mut count: BTreeMap<Vec<LatticeVector>, usize> = BTreeMap::new();
        for c in &self.maximal_cones {
            for f in c.face_ray_sets(n) {
                let d = if f.is_empty() { 0 } else { int_rank(&f) };
                if d == n - 1 {
                    *count.entry(f).or_default() += 1;
                }
            }
        }
        !count.is_empty() && count.values().all(|&k| k == 2)
    }

    /// Every cone of the fan: all faces of the maximal cones.
    pub fn all_cones(&self) -> Vec<Cone> {
        let set: BTreeSet<Vec<LatticeVector>> =
            self.maximal_cones.iter().flat_map(|c| c.face_ray_sets(self.ambient_rank)).collect();
        set.into_iter().map(|rays| Cone { rays }).collect()
    }

    /// Subfan of cones whose rays all lie in `allowed`, keeping only maximal ones.
    pub fn restrict_to_rays(&self, allowed: &[LatticeVector]) -> Fan {
        let mut cones: Vec<Cone> =
            self.all_cones().into_iter().filter(|c| c.rays.iter().all(|r| allowed.contains(r))).collect();
        let snapshot = cones.clone();
        cones.retain(|c| !snapshot.iter().any(|d| d != c && c.rays.iter().all(|r| d.rays.contains(r))));
        cones.retain(|c| !c.rays.is_empty());
        let rays: BTreeSet<LatticeVector> = cones.iter().flat_map(|c| c.rays.iter().cloned()).collect();
        Fan { ambient_rank: self.ambient_rank, maximal_cones: cones, rays: rays.into_iter().collect() }
    }

    /// Every cone of `self` lies in some cone of `coarse`.
    pub fn refines(&self, coarse: &Fan) -> bool {
        self.maximal_cones.iter().all(|c| coarse.maximal_cones.iter().any(|d| c.rays.iter().all(|r| d.contains(r))))
    }

    /// Index of the maximal cones containing `x`.
    pub fn cones_containing(&self, x: &[i64]) -> Vec<usize> {
        (0..self.maximal_cones.len()).filter(|&i| self.maximal_cones[i].contains(x)).collect()
    }
}

/// Fan over the facets of a reflexive polytope.
pub fn face_fan(p: &LatticePolytope) -> Result<Fan> {
    if let Some(why) = p.reflexivity_diagnostic() {
        return Err(Error::pre(format!("face fan needs a reflexive polytope: {why}")));
    }
    let cones = p
        .facets()
        .iter()
        .map(|f| {
            let verts: Vec<LatticeVector> = p.facet_vertices(f).iter().map(|&i| p.vertices()[i].clone()).collect();
            Cone::new(&verts, p.rank())
        })
        .collect::<Result<Vec<_>>>()?;
    Fan::new(p.rank(), cones)
}

/// Normal fan: one cone per vertex spanned by the inner normals of the facets through it.
pub fn normal_fan(p: &LatticePolytope) -> Result<Fan> {
    if !p.is_full_dimensional() {
        return Err(Error::pre("normal fan needs a full-dimensional polytope"));
    }
    let cones = p
        .vertices()
        .iter()
        .map(|v| {
            let normals: Vec<LatticeVector> =
                p.facets().iter().filter(|f| f.value(v) == 0).map(|f| f.normal.clone()).collect();
            Cone::new(&normals, p.rank())
        })
        .collect::<Result<Vec<_>>>()?;
    Fan::new(p.rank(), cones)
}

/// Refine `face_fan(p)` so that every boundary lattice point of `p` spans a ray.
///
/// Rank 2 subdivides each edge at its lattice points. Rank 3 triangulates each
/// facet by coning off its non-vertex lattice points one at a time in
/// lexicographic order.
pub fn refine_with_boundary_rays(f: &Fan, p: &LatticePolytope) -> Result<Fan> {
    let n = p.rank();
    if n > 3 {
        return Err(Error::Unsupported(format!("boundary-ray refinement in rank {n} (limit 3)")));
    }
    if *f != face_fan(p)? {
        return Err(Error::pre("fan to refine must be the face fan of the polytope"));
    }
    if n == 1 {
        return Ok(f.clone());
    }
    let points = p.lattice_points();
    let mut cones = Vec::new();
    for facet in p.facets() {
        let on: Vec<LatticeVector> = points.iter().filter(|x| facet.value(x) == 0).cloned().collect();
        let verts: Vec<LatticeVector> = p.facet_vertices(facet).iter().map(|&i| p.vertices()[i].clone()).collect();
        let cells = if n == 2 {
            on.windows(2).map(|w| w.to_vec()).collect()
        } else {
            triangulate_polygon(&verts, &on)
        };
        for cell in cells {
            cones.push(Cone::new(&cell, n)?);
        }
    }
    Fan::new(n, cones)
}

/// Triangulation of a planar lattice polygon (embedded in rank 3) using every given point.
fn triangulate_polygon(verts: &[LatticeVector], points: &[LatticeVector]) -> Vec<Vec<LatticeVector>> {
    let base = &verts[0];
    let diffs: Vec<Vec<i64>> = verts.iter().map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    let coords = independent_coords(&diffs, base.len(), 2);
    let p2 = |x: &LatticeVector| -> [i64; 2] { [x[coords[0]], x[coords[1]]] };
    let cycle = convex_cycle(verts, &p2);
    let cross = |a: [i64; 2], b: [i64; 2], c: [i64; 2]| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let on_segment = |a: [i64; 2], b: [i64; 2], x: [i64; 2]| {
        cross(a, b, x) == 0
            && x[0] >= a[0].min(b[0])
            && x[0] <= a[0].max(b[0])
            && x[1] >= a[1].min(b[1])
            && x[1] <= a[1].max(b[1])
    };
    let extra: Vec<&LatticeVector> = points.iter().filter(|x| !verts.contains(x)).collect();
    let mut tris: Vec<[LatticeVector; 3]> = Vec::new();
    let k = cycle.len();
    let Some((first, rest)) = extra.split_first() else {
        for i in 1..k - 1 {
            tris.push([cycle[0].clone(), cycle[i].clone(), cycle[i + 1].clone()]);
        }
        return tris.into_iter().map(|t| t.to_vec()).collect();
    };
    for i in 0..k {
        let (a, b) = (&cycle[i], &cycle[(i + 1) % k]);
        if !on_segment(p2(a), p2(b), p2(first)) {
            tris.push([(*first).clone(), a.clone(), b.clone()]);
        }
    }
    for x in rest {
        let px = p2(x);
        let mut next = Vec::new();
        for t in tris {
            let [a, b, c] = [p2(&t[0]), p2(&t[1]), p2(&t[2])];
            let (s1, s2, s3) = (cross(a, b, px), cross(b, c, px), cross(c, a, px));
            let inside = (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
            if !inside {
                next.push(t);
                continue;
            }
            let edges = [(0, 1, 2, s1), (1, 2, 0, s2), (2, 0, 1, s3)];
            let zero: Vec<_> = edges.iter().filter(|e| e.3 == 0).collect();
            if zero.is_empty() {
                next.push([(*x).clone(), t[0].clone(), t[1].clone()]);
                next.push([(*x).clone(), t[1].clone(), t[2].clone()]);
                next.push([(*x).clone(), t[2].clone(), t[0].clone()]);
            } else {
                let (i, j, o, _) = *zero[0];
                next.push([(*x).clone(), t[i].clone(), t[o].clone()]);
                next.push([(*x).clone(), t[j].clone(), t[o].clone()]);
            }
        }
        tris = next;
    }
    tris.into_iter().map(|t| t.to_vec()).collect()
}

/// Vertices of a convex polygon in cyclic order.
fn convex_cycle(verts: &[LatticeVector], p2: &dyn Fn(&LatticeVector) -> [i64; 2]) -> Vec<LatticeVector> {
    let mut rest: Vec<LatticeVector> = verts.to_vec();
    rest.sort();
    let start = rest.remove(0);
    let s = p2(&start);
    let cross = |a: [i64; 2], b: [i64; 2]| (a[0] - s[0]) * (b[1] - s[1]) - (a[1] - s[1]) * (b[0] - s[0]);
    rest.sort_by(|a, b| {
        let c = cross(p2(a), p2(b));
        0.cmp(&c)
    });
    let mut out = vec![start];
    out.extend(rest);
    out
}

/// Star subdivision of a simplicial fan at the primitive vector `v`.
pub fn stellar_subdivide(fan: &Fan, v: &[i64]) -> Result<Fan> {
    let n = fan.ambient_rank;
    let mut cones = Vec::new();
    for c in &fan.maximal_cones {
        if !c.contains(v) {
            cones.push(c.clone());
            continue;
        }
        if c.rays.len() != c.dim() {
            return Err(Error::Unsupported(format!("star subdivision of non-simplicial cone {:?}", c.rays)));
        }
        let m = QMatrix::from_i64(&c.rays).transpose();
        let target: Vec<Q> = v.iter().map(|&x| q(x)).collect();
        let lambda = m.solve(&target).expect("v lies in the cone");
        for (j, l) in lambda.iter().enumerate() {
            if *l > q(0) {
                let mut gens: Vec<LatticeVector> =
                    c.rays.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, r)| r.clone()).collect();
                gens.push(v.to_vec());
                cones.push(Cone::new(&gens, n)?);
            }
        }
    }
    Fan::new(n, cones)
}

/// Integer value per ray of a fan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLFunction {
    pub fan: Fan,
    pub values: BTreeMap<LatticeVector, i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlChecks {
    pub is_convex: bool,
    pub is_concave: bool,
    pub is_strictly_convex: bool,
}

impl PLFunction {
    pub fn new(fan: Fan, values: BTreeMap<LatticeVector, i64>) -> Result<PLFunction> {
        if let Some(r) = fan.rays.iter().find(|r| !values.contains_key(*r)) {
            return Err(Error::pre(format!("no value given for ray {r:?}")));
        }
        Ok(PLFunction { fan, values })
    }

    /// The linear functional agreeing with the values on the rays of cone `i`.
    pub fn linear_piece(&self, i: usize) -> Result<Vec<Q>> {
        let cone = &self.fan.maximal_cones[i];
        let m = QMatrix::from_i64(&cone.rays);
        let b: Vec<Q> = cone.rays.iter().map(|r| q(self.values[r])).collect();
        let mut u = m
            .solve(&b)
            .ok_or_else(|| Error::Inconsistent(format!("no linear extension on cone {:?}", cone.rays)))?;
        u.resize(self.fan.ambient_rank, q(0));
        Ok(u)
    }

    /// Linear pieces of every maximal cone, with integrality checked.
    pub fn integral_pieces(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.fan.maximal_cones.len())
            .map(|i| {
                let u = self.linear_piece(i)?;
                q_to_i64(&u).ok_or_else(|| {
                    Error::Inconsistent(format!(
                        "linear extension on cone {:?} is not integral",
                        self.fan.maximal_cones[i].rays
                    ))
                })
            })
            .collect()
    }

    /// First `(cone, foreign ray)` pair where the piece exceeds the value.
    pub fn convexity_witness(&self) -> Result<Option<(usize, LatticeVector)>> {
        for i in 0..self.fan.maximal_cones.len() {
            let u = self.linear_piece(i)?;
            for r in &self.fan.rays {
                if !self.fan.maximal_cones[i].has_ray(r) && q_dot_i(&u, r) > q(self.values[r]) {
                    return Ok(Some((i, r.clone())));
                }
            }
        }
        Ok(None)
    }

    pub fn checks(&self) -> Result<PlChecks> {
        let mut out = PlChecks { is_convex: true, is_concave: true, is_strictly_convex: true };
        for i in 0..self.fan.maximal_cones.len() {
            let u = self.linear_piece(i)?;
            for r in &self.fan.rays {
                if self.fan.maximal_cones[i].has_ray(r) {
                    continue;
                }
                let lhs = q_dot_i(&u, r);
                let v = q(self.values[r]);
                out.is_convex &= lhs <= v;
                out.is_concave &= lhs >= v;
                out.is_strictly_convex &= lhs < v;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_geometry::named::*;
    use crate::lattice_geometry::convex_hull;

    #[test]
    fn face_fans() {
        let f = face_fan(&square()).unwrap();
        assert_eq!(f.maximal_cones.len(), 4);
        assert_eq!(f.rays.len(), 4);
        assert!(f.is_complete());
        let d = face_fan(&diamond()).unwrap();
        assert_eq!(d.rays, vec![vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]);
        let seg = convex_hull(&[vec![-1], vec![1]]).unwrap();
        assert_eq!(face_fan(&seg).unwrap().rays, vec![vec![-1], vec![1]]);
        assert!(face_fan(&big_square()).is_err());
    }

    #[test]
    fn normal_equals_dual_face_fan() {
        assert_eq!(normal_fan(&diamond()).unwrap(), face_fan(&square()).unwrap());
        assert_eq!(normal_fan(&square()).unwrap(), face_fan(&diamond()).unwrap());
        let unit = convex_hull(&[vec![0], vec![1]]).unwrap();
        assert_eq!(normal_fan(&unit).unwrap().rays, vec![vec![-1], vec![1]]);
    }

    #[test]
    fn bad_fan_rejected() {
        let a = Cone::new(&[vec![1, 0], vec![0, 1]], 2).unwrap();
        let b = Cone::new(&[vec![1, 1], vec![-1, 1]], 2).unwrap();
        assert!(Fan::new(2, vec![a, b]).is_err());
        assert!(Cone::new(&[vec![1, 0], vec![-1, 0]], 2).is_err());
    }

    #[test]
    fn redundant_generator_dropped() {
        let c = Cone::new(&[vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 0]], 2).unwrap();
        assert_eq!(c.rays, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn refinements() {
        let sq = square();
        let r = refine_with_boundary_rays(&face_fan(&sq).unwrap(), &sq).unwrap();
        assert_eq!(r.rays.len(), 8);
        assert_eq!(r.maximal_cones.len(), 8);
        assert!(r.is_complete());
        let dm = diamond();
        let fd = face_fan(&dm).unwrap();
        assert_eq!(refine_with_boundary_rays(&fd, &dm).unwrap(), fd);
        let seg = convex_hull(&[vec![-1], vec![1]]).unwrap();
        let fs = face_fan(&seg).unwrap();
        assert_eq!(refine_with_boundary_rays(&fs, &seg).unwrap(), fs);
    }

    #[test]
    fn rank_three_refinement() {
        let oct = octahedron().polar_dual().unwrap();
        let f = face_fan(&oct).unwrap();
        let r = refine_with_boundary_rays(&f, &oct).unwrap();
        assert_eq!(r.rays.len(), oct.boundary_lattice_points().len());
        assert!(r.is_complete());
        assert!(r.refines(&f));
    }

    #[test]
    fn star_subdivision() {
        let f = face_fan(&square()).unwrap();
        let r = stellar_subdivide(&f, &[1, 0]).unwrap();
        assert_eq!(r.rays.len(), 5);
        assert_eq!(r.maximal_cones.len(), 5);
        assert!(r.is_complete());
    }

    #[test]
    fn pl_convexity() {
        let fan = face_fan(&diamond()).unwrap();
        let zero: BTreeMap<_, _> = fan.rays.iter().map(|r| (r.clone(), 0)).collect();
        let c = PLFunction::new(fan.clone(), zero).unwrap().checks().unwrap();
        assert!(c.is_convex && c.is_concave && !c.is_strictly_convex);
        let mut v: BTreeMap<_, _> = fan.rays.iter().map(|r| (r.clone(), 0)).collect();
        v.insert(vec![-1, 0], 1);
        let c = PLFunction::new(fan.clone(), v.clone()).unwrap().checks().unwrap();
        assert!(c.is_convex && !c.is_concave);
        v.insert(vec![1, 0], -1);
        let c = PLFunction::new(fan, v).unwrap().checks().unwrap();
        assert!(c.is_convex && c.is_concave);
    }
}
