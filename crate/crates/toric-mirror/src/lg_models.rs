//! Symbolic Givental-type (hybrid) Landau–Ginzburg models, their
//! compactified fiber equations and the monomial map of a toric fibration.

use serde::Serialize;
use serde_json::{json, Map, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::fan_toolkit::Fan;
use crate::lattice_geometry::{convex_hull, LatticePolytope, LatticeVector};
use crate::linalg::{dot, q, QMatrix, Q};
use crate::nef_partitions::NefPartition;
use crate::partition_engine::CentralFrame;

pub fn point_label(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// One monomial `a_ρ x^ρ` of a Laurent polynomial with symbolic coefficient.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LaurentTerm {
    pub rho: LatticeVector,
    pub exponent: LatticeVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolicLaurent {
    pub monomials: Vec<LaurentTerm>,
}

impl SymbolicLaurent {
    /// `Σ_{ρ ∈ P ∩ M} a_ρ x^ρ`.
    pub fn from_polytope(p: &LatticePolytope) -> SymbolicLaurent {
        let monomials = p.lattice_points().into_iter().map(|rho| LaurentTerm { exponent: rho.clone(), rho }).collect();
        SymbolicLaurent { monomials }
    }

    pub fn newton_polytope(&self) -> Result<LatticePolytope> {
        let pts: Vec<LatticeVector> = self.monomials.iter().map(|m| m.exponent.clone()).collect();
        convex_hull(&pts)
    }
}

impl fmt::Display for SymbolicLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .monomials
            .iter()
            .map(|m| {
                let mut s = format!("a_{}", point_label(&m.rho));
                for (i, e) in m.exponent.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => s.push_str(&format!(" x{}", i + 1)),
                        _ => s.push_str(&format!(" x{}^{}", i + 1, e)),
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridLGModel {
    pub k: usize,
    pub r: usize,
    pub constraints: Vec<SymbolicLaurent>,
    pub potentials: Vec<SymbolicLaurent>,
    /// `Δ_1, …, Δ_{k+r}`.
    pub deltas: Vec<LatticePolytope>,
}

/// Constraints from the first `k` parts, potentials from the last `r`.
pub fn givental_hybrid(nef: &NefPartition, k: usize, r: usize) -> Result<HybridLGModel> {
    let parts = nef.parts().len();
    if k + r != parts || r == 0 {
        return Err(Error::pre(format!("split {k}:{r} does not match {parts} parts")));
    }
    let deltas = (0..parts).map(|i| nef.delta_piece(i)).collect::<Result<Vec<_>>>()?;
    let laurent: Vec<SymbolicLaurent> = deltas.iter().map(SymbolicLaurent::from_polytope).collect();
    Ok(HybridLGModel {
        k,
        r,
        constraints: laurent[..k].to_vec(),
        potentials: laurent[k..].to_vec(),
        deltas,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Coef {
    A(LatticeVector),
    Lambda(String),
}

impl Coef {
    pub fn label(&self) -> String {
        match self {
            Coef::A(rho) => format!("a_{}", point_label(rho)),
            Coef::Lambda(name) => name.clone(),
        }
    }
}

/// Term of a homogeneous equation in the coordinates `z_σ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomTerm {
    pub coef: Coef,
    pub sign: i64,
    /// Nonzero exponents only.
    pub exps: BTreeMap<LatticeVector, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomogeneousEquation {
    pub terms: Vec<HomTerm>,
    /// `σ_min` used for the `a_ρ` terms, one per ray.
    pub sigma_min: BTreeMap<LatticeVector, i64>,
}

impl HomogeneousEquation {
    /// Recompute every `a_ρ` exponent from `⟨σ, ρ⟩ − σ_min`.
    pub fn exponents_consistent(&self) -> bool {
        self.terms.iter().all(|t| match &t.coef {
            Coef::A(rho) => self.sigma_min.iter().all(|(s, m)| {
                let e = dot(s, rho) - m;
                e >= 0 && t.exps.get(s).copied().unwrap_or(0) == e
            }),
            Coef::Lambda(_) => t.exps.values().all(|&e| e >= 0),
        })
    }

    /// All terms have the same class: exponent differences are `(⟨σ, m⟩)_σ` for some `m`.
    pub fn degree_consistent(&self) -> bool {
        let rays: Vec<LatticeVector> = self.sigma_min.keys().cloned().collect();
        let Some(first) = self.terms.first() else { return true };
        let m = QMatrix::from_i64(&rays);
        self.terms.iter().all(|t| {
            let diff: Vec<Q> = rays
                .iter()
                .map(|s| q(t.exps.get(s).copied().unwrap_or(0) - first.exps.get(s).copied().unwrap_or(0)))
                .collect();
            m.solve(&diff).is_some()
        })
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|t| {
                let mut exps = Map::new();
                for (s, e) in &t.exps {
                    exps.insert(format!("z_{}", point_label(s)), json!(e));
                }
                json!({"coef": t.coef.label(), "sign": t.sign, "exps": exps})
            })
            .collect();
        json!({ "terms": terms })
    }
}

impl fmt::Display for HomogeneousEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            let op = match (i, t.sign < 0) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            write!(f, "{op}{}", t.coef.label())?;
            for (s, e) in &t.exps {
                if *e == 1 {
                    write!(f, " z_{}", point_label(s))?;
                } else {
                    write!(f, " z_{}^{}", point_label(s), e)?;
                }
            }
        }
        write!(f, " = 0")
    }
}

/// ∇-side data used by the compactification: the ∇_i and the ray set of the
/// refined fan over ∇ (its boundary lattice points).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NablaData {
    pub nablas: Vec<LatticePolytope>,
    pub rays: Vec<LatticeVector>,
}

impl NablaData {
    pub fn from_nef(nef: &NefPartition) -> Result<NablaData> {
        let hull = nef.nabla_hull()?;
        Ok(NablaData { nablas: nef.nablas()?, rays: hull.boundary_lattice_points() })
    }
}

fn sigma_mins(rays: &[LatticeVector], delta: &LatticePolytope) -> BTreeMap<LatticeVector, i64> {
    rays.iter()
        .map(|s| (s.clone(), delta.vertices().iter().map(|v| dot(s, v)).min().expect("nonempty polytope")))
        .collect()
}

fn a_term(rho: &[i64], mins: &BTreeMap<LatticeVector, i64>, sign: i64) -> Result<HomTerm> {
    let mut exps = BTreeMap::new();
    for (s, m) in mins {
        let e = dot(s, rho) - m;
        if e < 0 {
            return Err(Error::Inconsistent(format!("negative exponent for σ = {s:?}, ρ = {rho:?}")));
        }
        if e > 0 {
            exps.insert(s.clone(), e);
        }
    }
    Ok(HomTerm { coef: Coef::A(rho.to_vec()), sign, exps })
}

fn lambda_term(name: &str, nabla: &LatticePolytope, rays: &[LatticeVector]) -> Result<HomTerm> {
    let mut exps = BTreeMap::new();
    for s in nabla.lattice_points() {
        if s.iter().all(|&x| x == 0) {
            continue;
        }
        if !rays.contains(&s) {
            return Err(Error::Inconsistent(format!("lattice point {s:?} of ∇ is not a ray")));
        }
        exps.insert(s, 1);
    }
    Ok(HomTerm { coef: Coef::Lambda(name.to_string()), sign: 1, exps })
}

fn constraint_equations(model: &HybridLGModel, data: &NablaData) -> Result<Vec<HomogeneousEquation>> {
    (0..model.k)
        .map(|i| {
            let mins = sigma_mins(&data.rays, &model.deltas[i]);
            let terms = model.constraints[i]
                .monomials
                .iter()
                .map(|m| a_term(&m.rho, &mins, 1))
                .collect::<Result<Vec<_>>>()?;
            Ok(HomogeneousEquation { terms, sigma_min: mins })
        })
        .collect()
}

/// Compactified equations: `k` constraints then `r` potential fibers at `λ`.
pub fn compactify_fiber(model: &HybridLGModel, data: &NablaData, lambda: &[String]) -> Result<Vec<HomogeneousEquation>> {
    if lambda.len() != model.r {
        return Err(Error::pre(format!("{} λ symbols for {} potentials", lambda.len(), model.r)));
    }
    if data.nablas.len() != model.k + model.r {
        return Err(Error::pre("∇ data does not match the number of parts"));
    }
    let mut out = constraint_equations(model, data)?;
    for j in 0..model.r {
        let idx = model.k + j;
        let mins = sigma_mins(&data.rays, &model.deltas[idx]);
        let mut terms = vec![lambda_term(&lambda[j], &data.nablas[idx], &data.rays)?];
        for m in &model.potentials[j].monomials {
            if m.rho.iter().all(|&x| x == 0) {
                continue;
            }
            terms.push(a_term(&m.rho, &mins, -1)?);
        }
        out.push(HomogeneousEquation { terms, sigma_min: mins });
    }
    Ok(out)
}

/// Split the single potential's nonzero lattice points into groups `F_j`,
/// each getting its own `λ_j`, all sharing `σ^{k+1}_min` and the λ-monomial
/// of `∇_{k+1}`. Mirror status of the result is open.
pub fn non_nef_split_fiber(
    model: &HybridLGModel,
    data: &NablaData,
    groups: &[Vec<LatticeVector>],
    lambda: &[String],
) -> Result<Vec<HomogeneousEquation>> {
    if model.r != 1 {
        return Err(Error::pre("the split acts on a model with a single potential"));
    }
    if lambda.len() != groups.len() || groups.is_empty() {
        return Err(Error::pre(format!("{} λ symbols for {} groups", lambda.len(), groups.len())));
    }
    let idx = model.k;
    let points: BTreeSet<LatticeVector> =
        model.potentials[0].monomials.iter().map(|m| m.rho.clone()).filter(|r| r.iter().any(|&x| x != 0)).collect();
    let mut covered = BTreeSet::new();
    for g in groups {
        for rho in g {
            if !points.contains(rho) || !covered.insert(rho.clone()) {
                return Err(Error::pre(format!("group entry {rho:?} is not a fresh nonzero lattice point of the potential")));
            }
        }
    }
    if covered != points {
        let missing: Vec<&LatticeVector> = points.difference(&covered).collect();
        return Err(Error::pre(format!("lattice points {missing:?} are not assigned to a group")));
    }
    let mins = sigma_mins(&data.rays, &model.deltas[idx]);
    let mut out = constraint_equations(model, data)?;
    for (g, name) in groups.iter().zip(lambda) {
        let mut terms = vec![lambda_term(name, &data.nablas[idx], &data.rays)?];
        let mut sorted = g.clone();
        sorted.sort();
        for rho in &sorted {
            terms.push(a_term(rho, &mins, -1)?);
        }
        out.push(HomogeneousEquation { terms, sigma_min: mins.clone() });
    }
    Ok(out)
}

/// Monomial components `[m_0 : … : m_l]` of the fibration map, each a list
/// of `(ray, exponent)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PiGamma {
    pub components: Vec<Vec<(LatticeVector, i64)>>,
}

impl fmt::Display for PiGamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| {
                let zs: Vec<String> = c
                    .iter()
                    .map(|(s, e)| if *e == 1 { format!("z_{}", point_label(s)) } else { format!("z_{}^{}", point_label(s), e) })
                    .collect();
                zs.join(" ")
            })
            .collect();
        write!(f, "[{}]", parts.join(" : "))
    }
}

pub fn pi_gamma_monomials(sigma_prime: &Fan, frame: &CentralFrame) -> Result<PiGamma> {
    let mut components = vec![Vec::new(); frame.quotient_rays.len()];
    for s in &sigma_prime.rays {
        let y = frame.project(s);
        if y.iter().all(|&x| x == 0) {
            continue;
        }
        let hit = frame.quotient_rays.iter().enumerate().find_map(|(i, w)| {
            let k = w.iter().zip(&y).find(|(a, _)| **a != 0).map(|(a, b)| b / a)?;
            (k >= 1 && w.iter().zip(&y).all(|(a, b)| a * k == *b)).then_some((i, k))
        });
        let (i, c) = hit.ok_or_else(|| Error::Structural(format!("ray {s:?} projects outside every v_i ray")))?;
        components[i].push((s.clone(), c));
    }
    Ok(PiGamma { components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_geometry::named::*;
    use crate::nef_partitions::{validate_nef, NefCheck};
    use crate::partition_engine::{build_fibration_fans, central_frame, SemistablePartition};

    fn diamond_nef() -> NefPartition {
        let d = diamond();
        let e1: Vec<usize> = [[1, 0], [0, 1], [0, -1]].iter().map(|v| d.vertex_index(v).unwrap()).collect();
        let e2 = vec![d.vertex_index(&[-1, 0]).unwrap()];
        match validate_nef(&d, &[e1, e2]).unwrap() {
            NefCheck::Valid(n) => n,
            NefCheck::Invalid(f) => panic!("{f:?}"),
        }
    }

    #[test]
    fn diamond_model() {
        let model = givental_hybrid(&diamond_nef(), 1, 1).unwrap();
        let rhos: Vec<LatticeVector> = model.constraints[0].monomials.iter().map(|m| m.rho.clone()).collect();
        assert_eq!(rhos, vec![vec![0, -1], vec![0, 0], vec![0, 1], vec![1, 0]]);
        let rhos: Vec<LatticeVector> = model.potentials[0].monomials.iter().map(|m| m.rho.clone()).collect();
        assert_eq!(rhos, vec![vec![-1, 0], vec![0, 0]]);
        assert_eq!(model.constraints[0].newton_polytope().unwrap(), model.deltas[0]);
        assert!(givental_hybrid(&diamond_nef(), 2, 1).is_err());
    }

    #[test]
    fn diamond_compactification() {
        let nef = diamond_nef();
        let model = givental_hybrid(&nef, 1, 1).unwrap();
        let data = NablaData::from_nef(&nef).unwrap();
        let eqs = compactify_fiber(&model, &data, &["lambda_1".to_string()]).unwrap();
        assert_eq!(eqs.len(), 2);
        let t = eqs[0].terms.iter().find(|t| t.coef == Coef::A(vec![0, 1])).unwrap();
        assert_eq!(t.exps.get(&vec![-1, 1]), Some(&2));
        assert!(eqs.iter().all(|e| e.exponents_consistent() && e.degree_consistent()));
        assert_eq!(eqs[1].terms[0].exps, BTreeMap::from([(vec![1, 0], 1)]));
    }

    #[test]
    fn pi_gamma_square() {
        let g = SemistablePartition::from_vertices(
            square(),
            &[
                vec![vec![0, -1], vec![0, 1], vec![1, -1], vec![1, 1]],
                vec![vec![-1, -1], vec![-1, 1], vec![0, -1], vec![0, 1]],
            ],
        )
        .unwrap();
        let frame = central_frame(&g).unwrap();
        let fans = build_fibration_fans(&g, &frame).unwrap();
        let pi = pi_gamma_monomials(&fans.sigma_prime, &frame).unwrap();
        assert_eq!(pi.to_string(), "[z_(-1,-1) z_(-1,0) z_(-1,1) : z_(1,-1) z_(1,0) z_(1,1)]");
    }
}
