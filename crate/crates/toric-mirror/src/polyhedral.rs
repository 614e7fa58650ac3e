//! Exact polyhedral helpers: cone H-representations, cone intersections and
//! brute-force vertex enumeration of small inequality systems.

use std::collections::BTreeSet;

use crate::combinat::subsets;
use crate::linalg::{dot, int_rank, integer_kernel, primitive, QMatrix, Q};

/// H-representation of a polyhedral cone: `eq·x = 0` and `ineq·x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeH {
    pub dim: usize,
    pub equations: Vec<Vec<i64>>,
    pub inequalities: Vec<Vec<i64>>,
}

impl ConeH {
    pub fn contains(&self, x: &[i64]) -> bool {
        self.equations.iter().all(|a| dot(a, x) == 0) && self.inequalities.iter().all(|a| dot(a, x) >= 0)
    }

    /// True when the inequalities cut the linear span down to a pointed cone.
    pub fn is_pointed(&self, rank: usize) -> bool {
        let mut rows = self.equations.clone();
        rows.extend(self.inequalities.iter().cloned());
        rows.is_empty() && rank == 0 || !rows.is_empty() && int_rank(&rows) == rank
    }
}

/// H-representation of the cone generated by `gens` in rank `rank`.
pub fn cone_h(gens: &[Vec<i64>], rank: usize) -> ConeH {
    let gens: Vec<Vec<i64>> = gens.iter().filter(|g| g.iter().any(|&x| x != 0)).cloned().collect();
    let dim = if gens.is_empty() { 0 } else { int_rank(&gens) };
    let equations = integer_kernel(&gens, rank);
    if dim == 0 {
        return ConeH { dim, equations, inequalities: Vec::new() };
    }
    let coords = independent_coords(&gens, rank, dim);
    let proj: Vec<Vec<i64>> = gens.iter().map(|g| coords.iter().map(|&c| g[c]).collect()).collect();
    let mut found: BTreeSet<Vec<i64>> = BTreeSet::new();
    for combo in subsets(proj.len(), dim - 1) {
        let rows: Vec<Vec<i64>> = combo.iter().map(|&i| proj[i].clone()).collect();
        if !rows.is_empty() && int_rank(&rows) != dim - 1 {
            continue;
        }
        let ker = integer_kernel(&rows, dim);
        if ker.len() != 1 {
            continue;
        }
        let w = &ker[0];
        let vals: Vec<i64> = proj.iter().map(|g| dot(w, g)).collect();
        if vals.iter().all(|&v| v >= 0) {
            found.insert(w.clone());
        } else if vals.iter().all(|&v| v <= 0) {
            found.insert(w.iter().map(|x| -x).collect());
        }
    }
    let inequalities = found
        .into_iter()
        .map(|w| {
            let mut full = vec![0; rank];
            for (k, &c) in coords.iter().enumerate() {
                full[c] = w[k];
            }
            full
        })
        .collect();
    ConeH { dim, equations, inequalities }
}

pub fn independent_coords(vecs: &[Vec<i64>], rank: usize, dim: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for c in 0..rank {
        if chosen.len() == dim {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(c);
        let m: Vec<Vec<i64>> = vecs.iter().map(|d| trial.iter().map(|&k| d[k]).collect()).collect();
        if int_rank(&m) == trial.len() {
            chosen = trial;
        }
    }
    chosen
}

/// Extreme rays (primitive, sorted) of `{eq·x = 0, ineq·x ≥ 0}`, assuming the cone is pointed.
pub fn extreme_rays(equations: &[Vec<i64>], inequalities: &[Vec<i64>], rank: usize) -> Vec<Vec<i64>> {
    let eq_rank = if equations.is_empty() { 0 } else { int_rank(equations) };
    let k = rank - eq_rank;
    let mut out: BTreeSet<Vec<i64>> = BTreeSet::new();
    if k == 0 {
        return Vec::new();
    }
    for combo in subsets(inequalities.len(), k - 1) {
        let mut rows: Vec<Vec<i64>> = equations.to_vec();
        rows.extend(combo.iter().map(|&i| inequalities[i].clone()));
        let ker = integer_kernel(&rows, rank);
        if ker.len() != 1 {
            continue;
        }
        for sign in [1, -1] {
            let v: Vec<i64> = ker[0].iter().map(|x| sign * x).collect();
            if inequalities.iter().all(|a| dot(a, &v) >= 0) {
                out.insert(primitive(&v));
            }
        }
    }
    out.into_iter().collect()
}

/// Vertices of the bounded polyhedron `{eq·x = b, ineq·x ≥ c}` given as `(a, b)` pairs.
pub fn vertices_of_system(equations: &[(Vec<i64>, i64)], inequalities: &[(Vec<i64>, i64)], rank: usize) -> Vec<Vec<Q>> {
    let eq_rows: Vec<Vec<i64>> = equations.iter().map(|(a, _)| a.clone()).collect();
    let eq_rank = if eq_rows.is_empty() { 0 } else { int_rank(&eq_rows) };
    let mut out: BTreeSet<Vec<Q>> = BTreeSet::new();
    for combo in subsets(inequalities.len(), rank - eq_rank) {
        let mut rows: Vec<Vec<i64>> = eq_rows.clone();
        let mut rhs: Vec<i64> = equations.iter().map(|(_, b)| *b).collect();
        for &i in &combo {
            rows.push(inequalities[i].0.clone());
            rhs.push(inequalities[i].1);
        }
        if rows.is_empty() {
            if rank == 0 {
                out.insert(Vec::new());
            }
            continue;
        }
        if int_rank(&rows) != rank {
            continue;
        }
        let m = QMatrix::from_i64(&rows);
        let b: Vec<Q> = rhs.iter().map(|&x| crate::linalg::q(x)).collect();
        let Some(x) = m.solve(&b) else { continue };
        let ok_eq = equations.iter().all(|(a, b)| crate::linalg::q_dot_i(&x, a) == crate::linalg::q(*b));
        let ok_in = inequalities.iter().all(|(a, c)| crate::linalg::q_dot_i(&x, a) >= crate::linalg::q(*c));
        if ok_eq && ok_in {
            out.insert(x);
        }
    }
    out.into_iter().collect()
}
