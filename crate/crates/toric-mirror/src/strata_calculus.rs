//! Euler-characteristic bookkeeping for normal-crossing strata, the polydisk
//! cover of the glued base and topological mirror checks.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::combinat::{nonempty_subsets, union};
use crate::error::{Error, Result};
use crate::lattice_geometry::LatticePolytope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Degeneration,
    Hybrid,
}

/// Euler numbers `e(X_I)` (or `e(Y_I)`) of the strata indexed by nonempty
/// `I ⊆ {0..N}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrataEuler {
    pub n: usize,
    pub components: usize,
    pub side: Side,
    entries: BTreeMap<Vec<usize>, i64>,
    missing_as_empty: bool,
}

#[derive(Deserialize)]
struct EntryDoc {
    #[serde(rename = "I")]
    index: Vec<usize>,
    e: i64,
}

#[derive(Deserialize)]
struct StrataDoc {
    n: usize,
    components: usize,
    side: Side,
    entries: Vec<EntryDoc>,
    #[serde(default)]
    missing_as_empty: bool,
}

impl StrataEuler {
    pub fn new(
        n: usize,
        components: usize,
        side: Side,
        entries: impl IntoIterator<Item = (Vec<usize>, i64)>,
        missing_as_empty: bool,
    ) -> Result<StrataEuler> {
        if components == 0 {
            return Err(Error::Empty("no components".into()));
        }
        let mut map = BTreeMap::new();
        for (mut i, e) in entries {
            let len = i.len();
            i.sort_unstable();
            i.dedup();
            if i.is_empty() || i.len() != len || i.iter().any(|&x| x >= components) {
                return Err(Error::Parse(format!("malformed index set {i:?}")));
            }
            if map.insert(i.clone(), e).is_some() {
                return Err(Error::Parse(format!("index set {i:?} given twice")));
            }
        }
        let d = StrataEuler { n, components, side, entries: map, missing_as_empty };
        if !missing_as_empty {
            if let Some(i) = nonempty_subsets(components).into_iter().find(|i| !d.entries.contains_key(i)) {
                return Err(Error::Parse(format!("missing entry for {i:?}")));
            }
        }
        Ok(d)
    }

    pub fn from_json(text: &str) -> Result<StrataEuler> {
        let doc: StrataDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        StrataEuler::new(doc.n, doc.components, doc.side, doc.entries.into_iter().map(|e| (e.index, e.e)), doc.missing_as_empty)
    }

    pub fn get(&self, i: &[usize]) -> Result<i64> {
        match self.entries.get(i) {
            Some(&e) => Ok(e),
            None if self.missing_as_empty => Ok(0),
            None => Err(Error::Parse(format!("missing entry for {i:?}"))),
        }
    }

    pub fn index_sets(&self) -> Vec<Vec<usize>> {
        nonempty_subsets(self.components)
    }

    /// Relabel components by `perm` (component `i` becomes `perm[i]`).
    pub fn relabel(&self, perm: &[usize]) -> Result<StrataEuler> {
        let entries = self.entries.iter().map(|(i, e)| (i.iter().map(|&x| perm[x]).collect(), *e));
        StrataEuler::new(self.n, self.components, self.side, entries, self.missing_as_empty)
    }

    fn expect_side(&self, side: Side) -> Result<()> {
        if self.side != side {
            return Err(Error::pre(format!("expected {side:?} data")));
        }
        Ok(())
    }
}

fn sign(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `e(X_c) = Σ (−1)^{|I|−1} e(X_I)`.
pub fn euler_snc(d: &StrataEuler) -> Result<i64> {
    d.expect_side(Side::Degeneration)?;
    d.index_sets().iter().map(|i| Ok(sign(i.len() - 1) * d.get(i)?)).sum()
}

/// `e(X) = Σ (−1)^{|I|−1} |I| e(X_I)` for a semistable degeneration.
pub fn euler_smoothing(d: &StrataEuler) -> Result<i64> {
    d.expect_side(Side::Degeneration)?;
    if d.components < 2 {
        return Err(Error::pre("the smoothing formula needs at least two components"));
    }
    d.index_sets().iter().map(|i| Ok(sign(i.len() - 1) * i.len() as i64 * d.get(i)?)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenericFiberEuler {
    pub value: i64,
    /// `I` is the full index set, so no potential is left.
    pub rank_zero: bool,
}

/// `e(Y_{I,sm}) = Σ_{∅≠J⊆Iᶜ} (−1)^{|J|−1} e(Y_{I∪J})`.
pub fn euler_generic_fiber(d: &StrataEuler, i: &[usize]) -> Result<GenericFiberEuler> {
    d.expect_side(Side::Hybrid)?;
    let comp: Vec<usize> = (0..d.components).filter(|x| !i.contains(x)).collect();
    if comp.is_empty() {
        return Ok(GenericFiberEuler { value: 0, rank_zero: true });
    }
    let mut value = 0;
    for j in nonempty_subsets(comp.len()) {
        let jj: Vec<usize> = j.iter().map(|&t| comp[t]).collect();
        value += sign(jj.len() - 1) * d.get(&union(i, &jj))?;
    }
    Ok(GenericFiberEuler { value, rank_zero: false })
}

/// `e(Y_I, Y_{I,sm}) = e(Y_I) − e(Y_{I,sm})`.
pub fn euler_relative(d: &StrataEuler, i: &[usize]) -> Result<i64> {
    Ok(d.get(i)? - euler_generic_fiber(d, i)?.value)
}

pub fn euler_tilde_total(d: &StrataEuler) -> Result<i64> {
    d.index_sets().iter().map(|i| euler_relative(d, i)).sum()
}

/// Charts with `|I| > 1` are torus bundles and contribute nothing.
pub fn euler_glued_total(d: &StrataEuler) -> Result<i64> {
    d.expect_side(Side::Hybrid)?;
    (0..d.components).map(|i| d.get(&[i])).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumVerdict {
    pub index_set: Vec<usize>,
    pub e_x: i64,
    pub e_relative: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MirrorReport {
    pub e_x: i64,
    pub e_x_c: i64,
    pub e_y: i64,
    pub e_y_tilde: i64,
    /// `e(Y) = (−1)ⁿ e(X)`.
    pub smoothing_identity: bool,
    /// `e(Ỹ) = (−1)ⁿ e(X_c)`, the identity the argument establishes.
    pub compact_identity: bool,
    /// `e(Ỹ) = (−1)ⁿ e(X)`, the literal second statement.
    pub compact_identity_literal: bool,
    pub strata: Vec<StratumVerdict>,
}

impl MirrorReport {
    pub fn failing_strata(&self) -> Vec<&StratumVerdict> {
        self.strata.iter().filter(|s| !s.holds).collect()
    }

    pub fn holds(&self) -> bool {
        self.smoothing_identity && self.compact_identity && self.strata.iter().all(|s| s.holds)
    }
}

pub fn check_topological_mirror(deg: &StrataEuler, hyb: &StrataEuler) -> Result<MirrorReport> {
    deg.expect_side(Side::Degeneration)?;
    hyb.expect_side(Side::Hybrid)?;
    if deg.n != hyb.n || deg.components != hyb.components {
        return Err(Error::pre("degeneration and hybrid data have different shapes"));
    }
    let n = deg.n;
    let s = sign(n);
    let (e_x, e_x_c) = (euler_smoothing(deg)?, euler_snc(deg)?);
    let (e_y, e_y_tilde) = (euler_glued_total(hyb)?, euler_tilde_total(hyb)?);
    let strata = deg
        .index_sets()
        .into_iter()
        .map(|i| {
            let e_x = deg.get(&i)?;
            let e_relative = euler_relative(hyb, &i)?;
            let holds = e_x == sign(n + 1 + i.len()) * e_relative;
            Ok(StratumVerdict { index_set: i, e_x, e_relative, holds })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MirrorReport {
        e_x,
        e_x_c,
        e_y,
        e_y_tilde,
        smoothing_identity: e_y == s * e_x,
        compact_identity: e_y_tilde == s * e_x_c,
        compact_identity_literal: e_y_tilde == s * e_x,
        strata,
    })
}

/// `U_I ≃ (S¹)^{|I|−1} × Δ^{N+1−|I|}` in the cover of `ℙᴺ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChartIntersection {
    pub index_set: Vec<usize>,
    pub torus_rank: usize,
    pub disk_rank: usize,
}

impl ChartIntersection {
    pub fn euler(&self) -> i64 {
        i64::from(self.torus_rank == 0)
    }
}

pub fn chart_intersections(n: usize) -> Vec<ChartIntersection> {
    nonempty_subsets(n + 1)
        .into_iter()
        .map(|i| ChartIntersection { torus_rank: i.len() - 1, disk_rank: n + 1 - i.len(), index_set: i })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct MonodromyRep {
    #[serde(default)]
    pub i: Option<usize>,
    pub j: usize,
    #[serde(default)]
    pub matrix: Option<Vec<Vec<i64>>>,
    /// Permutation `k ↦ perm[k]`, used when no matrix is given.
    #[serde(default)]
    pub perm: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct MonodromyDoc {
    pub dim: usize,
    pub reps: Vec<MonodromyRep>,
}

impl MonodromyDoc {
    pub fn from_json(text: &str) -> Result<MonodromyDoc> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationVerdict {
    pub i: usize,
    pub j: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonodromyReport {
    pub checked: Vec<RelationVerdict>,
    /// `(i, j)` loops whose `φ_{T_j}` was not supplied.
    pub unmatched: Vec<(usize, usize)>,
}

impl MonodromyReport {
    pub fn holds(&self) -> bool {
        self.unmatched.is_empty() && self.checked.iter().all(|v| v.holds)
    }
}

fn rep_matrix(rep: &MonodromyRep, dim: usize) -> Result<Vec<Vec<i64>>> {
    let m = match (&rep.matrix, &rep.perm) {
        (Some(m), _) => m.clone(),
        (None, Some(p)) => {
            let mut sorted = p.clone();
            sorted.sort_unstable();
            if sorted != (0..dim).collect::<Vec<_>>() {
                return Err(Error::Parse(format!("{p:?} is not a permutation of 0..{dim}")));
            }
            let mut m = vec![vec![0; dim]; dim];
            for (k, &pk) in p.iter().enumerate() {
                m[pk][k] = 1;
            }
            m
        }
        (None, None) => return Err(Error::Parse("representation without matrix or perm".into())),
    };
    if m.len() != dim || m.iter().any(|r| r.len() != dim) {
        return Err(Error::RankMismatch { expected: dim, found: m.len() });
    }
    Ok(m)
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = b.first().map_or(0, Vec::len);
    a.iter().map(|r| (0..n).map(|c| r.iter().zip(b).map(|(x, row)| x * row[c]).sum()).collect()).collect()
}

/// Tests `φ_{T_ij} ∘ φ_{T_j} = Id` for every supplied `(i, j)` with `i ≠ j`.
pub fn monodromy_relation_check(doc: &MonodromyDoc) -> Result<MonodromyReport> {
    let mut single = BTreeMap::new();
    let mut pairs = BTreeMap::new();
    for rep in &doc.reps {
        let m = rep_matrix(rep, doc.dim)?;
        match rep.i {
            Some(i) if i == rep.j => return Err(Error::Parse(format!("loop ({i},{i}) needs distinct indices"))),
            Some(i) => pairs.insert((i, rep.j), m),
            None => single.insert(rep.j, m),
        };
    }
    let id: Vec<Vec<i64>> = (0..doc.dim).map(|r| (0..doc.dim).map(|c| i64::from(r == c)).collect()).collect();
    let mut report = MonodromyReport { checked: Vec::new(), unmatched: Vec::new() };
    for ((i, j), m) in &pairs {
        match single.get(j) {
            Some(mj) => report.checked.push(RelationVerdict { i: *i, j: *j, holds: mat_mul(m, mj) == id }),
            None => report.unmatched.push((*i, *j)),
        }
    }
    Ok(report)
}

/// Euler number `2 − 2g` of a smooth curve with Newton polygon `p`, where
/// `g` is the number of interior lattice points.
pub fn curve_euler(p: &LatticePolytope) -> Result<i64> {
    if p.rank() != 2 || p.dim() != 2 {
        return Err(Error::pre("curve helper needs a full-dimensional lattice polygon"));
    }
    Ok(2 - 2 * p.interior_lattice_points().points.len() as i64)
}
