//! Nef partitions of a reflexive polytope's vertex set and the dual pieces ∇_i.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::fan_toolkit::{face_fan, PLFunction};
use crate::lattice_geometry::{convex_hull_in, minkowski_sum, LatticePolytope, LatticeVector};
use crate::linalg::q_to_i64;
use crate::polyhedral::{extreme_rays, vertices_of_system};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NefPartition {
    host: LatticePolytope,
    parts: Vec<Vec<usize>>,
    certificates: Vec<PLFunction>,
}

/// Why a proposed partition is not nef.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NefFailure {
    pub part: usize,
    pub cone: Vec<LatticeVector>,
    pub ray: Option<LatticeVector>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NefCheck {
    Valid(NefPartition),
    Invalid(NefFailure),
}

pub fn validate_nef(host: &LatticePolytope, parts: &[Vec<usize>]) -> Result<NefCheck> {
    if let Some(why) = host.reflexivity_diagnostic() {
        return Err(Error::pre(format!("nef partitions need a reflexive host: {why}")));
    }
    let nv = host.vertices().len();
    let mut seen = BTreeSet::new();
    for part in parts {
        if part.is_empty() {
            return Err(Error::pre("empty part"));
        }
        for &i in part {
            if i >= nv || !seen.insert(i) {
                return Err(Error::pre(format!("vertex index {i} is out of range or repeated")));
            }
        }
    }
    if seen.len() != nv {
        return Err(Error::pre("parts do not cover every vertex"));
    }
    let fan = face_fan(host)?;
    let n = host.rank();
    if let Some(c) = fan.maximal_cones.iter().find(|c| c.rays.len() != n) {
        return Ok(NefCheck::Invalid(NefFailure {
            part: 0,
            cone: c.rays.clone(),
            ray: None,
            reason: "non-simplicial cone; certificates are only built on simplicial fans".into(),
        }));
    }
    let mut certificates = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        let values: BTreeMap<LatticeVector, i64> = host
            .vertices()
            .iter()
            .enumerate()
            .map(|(k, v)| (v.clone(), i64::from(part.contains(&k))))
            .collect();
        let phi = PLFunction::new(fan.clone(), values)?;
        for (c, cone) in fan.maximal_cones.iter().enumerate() {
            let u = match phi.linear_piece(c) {
                Ok(u) => u,
                Err(e) => {
                    return Ok(NefCheck::Invalid(NefFailure { part: i, cone: cone.rays.clone(), ray: None, reason: e.to_string() }))
                }
            };
            if q_to_i64(&u).is_none() {
                return Ok(NefCheck::Invalid(NefFailure {
                    part: i,
                    cone: cone.rays.clone(),
                    ray: None,
                    reason: "linear extension is not integral".into(),
                }));
            }
        }
        if let Some((c, r)) = phi.convexity_witness()? {
            return Ok(NefCheck::Invalid(NefFailure {
                part: i,
                cone: fan.maximal_cones[c].rays.clone(),
                ray: Some(r),
                reason: "linear piece exceeds the value on a foreign ray".into(),
            }));
        }
        certificates.push(phi);
    }
    Ok(NefCheck::Valid(NefPartition { host: host.clone(), parts: parts.to_vec(), certificates }))
}

impl NefPartition {
    pub fn host(&self) -> &LatticePolytope {
        &self.host
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn certificates(&self) -> &[PLFunction] {
        &self.certificates
    }

    pub fn part_vertices(&self, i: usize) -> Vec<LatticeVector> {
        self.parts[i].iter().map(|&k| self.host.vertices()[k].clone()).collect()
    }

    /// `Δ_i = conv(0 ∪ E_i)`.
    pub fn delta_piece(&self, i: usize) -> Result<LatticePolytope> {
        let mut pts = self.part_vertices(i);
        pts.push(vec![0; self.host.rank()]);
        convex_hull_in(&pts, self.host.ambient())
    }

    /// `∇_i = {u : ⟨u, v⟩ ≥ −φ_i(v)}`, a lattice polytope in the dual lattice.
    pub fn nabla(&self, i: usize) -> Result<LatticePolytope> {
        let n = self.host.rank();
        let phi = &self.certificates[i];
        let ineqs: Vec<(Vec<i64>, i64)> = self.host.vertices().iter().map(|v| (v.clone(), -phi.values[v])).collect();
        let homog: Vec<Vec<i64>> = ineqs.iter().map(|(a, _)| a.clone()).collect();
        if !extreme_rays(&[], &homog, n).is_empty() {
            return Err(Error::Inconsistent(format!("region for part {i} is unbounded")));
        }
        let verts = vertices_of_system(&[], &ineqs, n);
        let pts = verts
            .iter()
            .map(|v| q_to_i64(v).ok_or_else(|| Error::Inconsistent(format!("part {i} gives a non-lattice vertex"))))
            .collect::<Result<Vec<_>>>()?;
        convex_hull_in(&pts, self.host.ambient().flip())
    }

    pub fn nablas(&self) -> Result<Vec<LatticePolytope>> {
        (0..self.parts.len()).map(|i| self.nabla(i)).collect()
    }

    /// `∇ = conv(∇_1 ∪ ⋯ ∪ ∇_{k+1})`, checked to lie in the polar dual of the host.
    pub fn nabla_hull(&self) -> Result<LatticePolytope> {
        let pts: Vec<LatticeVector> = self.nablas()?.iter().flat_map(|p| p.vertices().to_vec()).collect();
        let hull = convex_hull_in(&pts, self.host.ambient().flip())?;
        if !self.host.polar_dual()?.contains_polytope(&hull) {
            return Err(Error::Inconsistent("∇ is not contained in the polar dual of the host".into()));
        }
        Ok(hull)
    }

    /// Whether the Minkowski sum of the ∇_i equals the polar dual of the host.
    pub fn minkowski_check(&self) -> Result<bool> {
        let nablas = self.nablas()?;
        let mut sum = nablas[0].clone();
        for p in &nablas[1..] {
            sum = minkowski_sum(&sum, p)?;
        }
        Ok(sum.vertices() == self.host.polar_dual()?.vertices())
    }
}
