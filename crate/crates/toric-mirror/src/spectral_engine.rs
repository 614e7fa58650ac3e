//! Exact-rational E1 pages built from strata cohomology: the weight and
//! monodromy-weight pages of a degeneration, the flag pages of a hybrid
//! model, their E2 dimensions and the mirror comparisons between them.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::{BTreeMap, BTreeSet};

use crate::combinat::mv_sign;
use crate::error::{Error, Result};
use crate::linalg::{parse_q, q, QMatrix, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Gysin,
    Restrict,
    Rho,
    RhoDual,
}

impl MapKind {
    pub fn degree_shift(self) -> i64 {
        match self {
            MapKind::Gysin => 2,
            MapKind::Restrict => 0,
            MapKind::Rho => 1,
            MapKind::RhoDual => -1,
        }
    }

    /// The target index set has one more element than the source.
    pub fn enlarges(self) -> bool {
        matches!(self, MapKind::Restrict | MapKind::RhoDual)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StratumCohomology {
    pub dims: BTreeMap<i64, usize>,
    /// Per degree, counts of basis vectors with label `a = p − q`; the basis
    /// is ordered by increasing label.
    pub hodge: Option<BTreeMap<i64, BTreeMap<i64, usize>>>,
    /// Gram matrix of the pairing `H^k × H^{2n_I − k} → ℚ`, keyed by `k`.
    pub pairing: BTreeMap<i64, QMatrix>,
}

impl StratumCohomology {
    pub fn dim(&self, k: i64) -> usize {
        self.dims.get(&k).copied().unwrap_or(0)
    }

    pub fn labels(&self, k: i64) -> Option<Vec<i64>> {
        let h = self.hodge.as_ref()?;
        Some(h.get(&k).map(|m| m.iter().flat_map(|(a, c)| std::iter::repeat(*a).take(*c)).collect()).unwrap_or_default())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrataMap {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    pub kind: MapKind,
    /// Degree of the source.
    pub degree: i64,
    pub matrix: QMatrix,
}

/// Per-stratum graded cohomology together with the structure maps between
/// adjacent strata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrataComplexData {
    pub n: usize,
    strata: BTreeMap<Vec<usize>, StratumCohomology>,
    maps: BTreeMap<(MapKind, Vec<usize>, Vec<usize>, i64), QMatrix>,
    pub abutment: Option<BTreeMap<i64, usize>>,
}

fn differs_by_one(small: &[usize], big: &[usize]) -> Option<usize> {
    if big.len() != small.len() + 1 || !small.iter().all(|x| big.contains(x)) {
        return None;
    }
    big.iter().copied().find(|x| !small.contains(x))
}

impl StrataComplexData {
    pub fn new(
        n: usize,
        strata: BTreeMap<Vec<usize>, StratumCohomology>,
        maps: Vec<StrataMap>,
        abutment: Option<BTreeMap<i64, usize>>,
    ) -> Result<StrataComplexData> {
        let mut d = StrataComplexData { n, strata: BTreeMap::new(), maps: BTreeMap::new(), abutment };
        for (i, s) in strata {
            if i.is_empty() || i.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse(format!("index set {i:?} must be nonempty and strictly increasing")));
            }
            if let Some(h) = &s.hodge {
                for (k, counts) in h {
                    if counts.values().sum::<usize>() != s.dim(*k) {
                        return Err(Error::Parse(format!("hodge counts of {i:?} in degree {k} do not add up to the dimension")));
                    }
                }
                if let Some(k) = s.dims.iter().find(|(k, &v)| v > 0 && !h.contains_key(k)).map(|(k, _)| k) {
                    return Err(Error::Parse(format!("hodge counts of {i:?} missing in degree {k}")));
                }
            }
            let ni = n as i64 + 1 - i.len() as i64;
            for (k, g) in &s.pairing {
                if g.rows() != s.dim(*k) || g.cols() != s.dim(2 * ni - k) {
                    return Err(Error::Parse(format!("pairing of {i:?} in degree {k} has the wrong shape")));
                }
            }
            d.strata.insert(i, s);
        }
        for m in maps {
            let (small, big) = if m.kind.enlarges() { (&m.from, &m.to) } else { (&m.to, &m.from) };
            if differs_by_one(small, big).is_none() {
                return Err(Error::Parse(format!("{:?} map {:?} → {:?} does not change one index", m.kind, m.from, m.to)));
            }
            if !d.strata.contains_key(&m.from) || !d.strata.contains_key(&m.to) {
                return Err(Error::Parse(format!("map {:?} → {:?} refers to an undeclared stratum", m.from, m.to)));
            }
            let rows = d.dim(&m.to, m.degree + m.kind.degree_shift());
            let cols = d.dim(&m.from, m.degree);
            if m.matrix.rows() != rows || m.matrix.cols() != cols {
                return Err(Error::Parse(format!(
                    "{:?} map {:?} → {:?} in degree {} is {}x{}, expected {rows}x{cols}",
                    m.kind,
                    m.from,
                    m.to,
                    m.degree,
                    m.matrix.rows(),
                    m.matrix.cols()
                )));
            }
            if d.maps.insert((m.kind, m.from.clone(), m.to.clone(), m.degree), m.matrix).is_some() {
                return Err(Error::Parse(format!("map {:?} → {:?} given twice", m.from, m.to)));
            }
        }
        Ok(d)
    }

    pub fn from_json(text: &str) -> Result<StrataComplexData> {
        let doc: ComplexDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.into_data()
    }

    pub fn strata(&self) -> &BTreeMap<Vec<usize>, StratumCohomology> {
        &self.strata
    }

    pub fn dim(&self, i: &[usize], k: i64) -> usize {
        self.strata.get(i).map_or(0, |s| s.dim(k))
    }

    /// Poincaré dimension `n + 1 − |I|` of a stratum.
    pub fn n_of(&self, i: &[usize]) -> i64 {
        self.n as i64 + 1 - i.len() as i64
    }

    pub fn has_hodge(&self) -> bool {
        self.strata.values().all(|s| s.hodge.is_some() || s.dims.values().all(|&v| v == 0))
    }

    pub fn labels(&self, i: &[usize], k: i64) -> Option<Vec<i64>> {
        let s = self.strata.get(i)?;
        if s.dim(k) == 0 {
            return Some(Vec::new());
        }
        s.labels(k)
    }

    pub fn supplied(&self, kind: MapKind, from: &[usize], to: &[usize], degree: i64) -> Option<&QMatrix> {
        self.maps.get(&(kind, from.to_vec(), to.to_vec(), degree))
    }

    pub fn has_kind(&self, kind: MapKind) -> bool {
        self.maps.keys().any(|k| k.0 == kind)
    }

    /// Gram matrix at `(I, k)`; the identity stands in when none is declared.
    pub fn gram(&self, i: &[usize], k: i64, flags: &mut BTreeSet<String>) -> Result<QMatrix> {
        if let Some(g) = self.strata.get(i).and_then(|s| s.pairing.get(&k)) {
            return Ok(g.clone());
        }
        let (a, b) = (self.dim(i, k), self.dim(i, 2 * self.n_of(i) - k));
        if a != b {
            return Err(Error::Inconsistent(format!("{i:?} has no pairing between degrees {k} and {}", 2 * self.n_of(i) - k)));
        }
        flags.insert("pairing-default".into());
        Ok(QMatrix::identity(a))
    }

    fn required(&self, kind: MapKind, from: &[usize], to: &[usize], degree: i64) -> Result<QMatrix> {
        let rows = self.dim(to, degree + kind.degree_shift());
        let cols = self.dim(from, degree);
        if let Some(m) = self.supplied(kind, from, to, degree) {
            return Ok(m.clone());
        }
        if rows == 0 || cols == 0 {
            return Ok(QMatrix::zeros(rows, cols));
        }
        Err(Error::Structural(format!("missing {kind:?} map {from:?} → {to:?} in degree {degree}")))
    }

    pub fn restrict(&self, i: &[usize], j: &[usize], k: i64) -> Result<QMatrix> {
        self.required(MapKind::Restrict, i, j, k)
    }

    pub fn rho(&self, j: &[usize], i: &[usize], c: i64) -> Result<QMatrix> {
        self.required(MapKind::Rho, j, i, c)
    }

    /// Gysin `H^k(X_J) → H^{k+2}(X_I)`, defaulting to the adjoint of restriction.
    pub fn gysin(&self, j: &[usize], i: &[usize], k: i64, flags: &mut BTreeSet<String>) -> Result<QMatrix> {
        if let Some(m) = self.supplied(MapKind::Gysin, j, i, k) {
            return Ok(m.clone());
        }
        let (rows, cols) = (self.dim(i, k + 2), self.dim(j, k));
        if rows == 0 || cols == 0 {
            return Ok(QMatrix::zeros(rows, cols));
        }
        let kp = 2 * self.n_of(j) - k;
        let r = self.restrict(i, j, kp)?;
        adjoint(&r, &self.gram(i, k + 2, flags)?, &self.gram(j, k, flags)?)
    }

    /// `ρ^∨: H^b(Y_I) → H^{b−1}(Y_J)`, defaulting to the pairing conjugate of `ρ`.
    pub fn rho_dual(&self, i: &[usize], j: &[usize], b: i64, flags: &mut BTreeSet<String>) -> Result<QMatrix> {
        if let Some(m) = self.supplied(MapKind::RhoDual, i, j, b) {
            return Ok(m.clone());
        }
        let (rows, cols) = (self.dim(j, b - 1), self.dim(i, b));
        if rows == 0 || cols == 0 {
            return Ok(QMatrix::zeros(rows, cols));
        }
        self.rho_dual_conjugate(i, j, b, flags)
    }

    fn rho_dual_conjugate(&self, i: &[usize], j: &[usize], b: i64, flags: &mut BTreeSet<String>) -> Result<QMatrix> {
        let c = 2 * self.n_of(i) - b - 1;
        let r = self.rho(j, i, c)?;
        adjoint(&r, &self.gram(j, b - 1, flags)?, &self.gram(i, b, flags)?)
    }
}

/// `f^†` with `⟨f^† x, y⟩_A = ⟨x, f y⟩_B`, i.e. `G_A^{−T} fᵀ G_Bᵀ`.
fn adjoint(f: &QMatrix, g_a: &QMatrix, g_b: &QMatrix) -> Result<QMatrix> {
    let inv = g_a.transpose().inverse().ok_or_else(|| Error::Inconsistent("degenerate pairing".into()))?;
    inv.mul(&f.transpose())?.mul(&g_b.transpose())
}

#[derive(Deserialize)]
struct StratumDoc {
    #[serde(rename = "I")]
    index: Vec<usize>,
    #[serde(default)]
    dims: BTreeMap<String, usize>,
    #[serde(default)]
    hodge: Option<BTreeMap<String, BTreeMap<String, usize>>>,
    #[serde(default)]
    pairing: BTreeMap<String, Vec<Vec<Value>>>,
}

#[derive(Deserialize)]
struct MapDoc {
    from: Vec<usize>,
    to: Vec<usize>,
    kind: MapKind,
    degree: i64,
    matrix: Vec<Vec<Value>>,
}

#[derive(Deserialize)]
struct ComplexDoc {
    n: usize,
    strata: Vec<StratumDoc>,
    #[serde(default)]
    maps: Vec<MapDoc>,
    #[serde(default)]
    abutment: Option<BTreeMap<String, usize>>,
}

fn key(s: &str) -> Result<i64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad integer key {s:?}")))
}

fn entry(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(x) => x.as_i64().map(q).ok_or_else(|| Error::Parse(format!("bad matrix entry {x}"))),
        other => Err(Error::Parse(format!("bad matrix entry {other}"))),
    }
}

/// Parse a JSON matrix; an empty list stands for the zero matrix of the
/// expected shape.
pub fn parse_matrix(rows: &[Vec<Value>], expected: (usize, usize)) -> Result<QMatrix> {
    if rows.is_empty() {
        return Ok(QMatrix::zeros(expected.0, expected.1));
    }
    let cols = rows[0].len();
    let parsed = rows.iter().map(|r| r.iter().map(entry).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    QMatrix::from_rows(parsed, cols)
}

impl ComplexDoc {
    fn into_data(self) -> Result<StrataComplexData> {
        let n = self.n;
        let mut strata = BTreeMap::new();
        for s in self.strata {
            let mut index = s.index;
            index.sort_unstable();
            let dims = s.dims.iter().map(|(k, v)| Ok((key(k)?, *v))).collect::<Result<BTreeMap<_, _>>>()?;
            let hodge = s
                .hodge
                .map(|h| {
                    h.iter()
                        .map(|(k, m)| Ok((key(k)?, m.iter().map(|(a, c)| Ok((key(a)?, *c))).collect::<Result<BTreeMap<_, _>>>()?)))
                        .collect::<Result<BTreeMap<_, _>>>()
                })
                .transpose()?;
            let ni = n as i64 + 1 - index.len() as i64;
            let mut pairing = BTreeMap::new();
            for (k, m) in &s.pairing {
                let k = key(k)?;
                let shape = (dims.get(&k).copied().unwrap_or(0), dims.get(&(2 * ni - k)).copied().unwrap_or(0));
                pairing.insert(k, parse_matrix(m, shape)?);
            }
            if strata.insert(index.clone(), StratumCohomology { dims, hodge, pairing }).is_some() {
                return Err(Error::Parse(format!("stratum {index:?} given twice")));
            }
        }
        let dim = |i: &Vec<usize>, k: i64| strata.get(i).map_or(0, |s: &StratumCohomology| s.dim(k));
        let maps = self
            .maps
            .into_iter()
            .map(|m| {
                let mut from = m.from;
                let mut to = m.to;
                from.sort_unstable();
                to.sort_unstable();
                let shape = (dim(&to, m.degree + m.kind.degree_shift()), dim(&from, m.degree));
                Ok(StrataMap { matrix: parse_matrix(&m.matrix, shape)?, from, to, kind: m.kind, degree: m.degree })
            })
            .collect::<Result<Vec<_>>>()?;
        let abutment = self.abutment.map(|a| a.iter().map(|(k, v)| Ok((key(k)?, *v))).collect::<Result<BTreeMap<_, _>>>()).transpose()?;
        StrataComplexData::new(n, strata, maps, abutment)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PageKind {
    Weight,
    MonodromyWeight,
    GFlag,
    DeltaFlag,
}

/// One direct summand `H^degree` of a stratum sitting in a page term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Summand {
    pub tag: i64,
    pub stratum: Vec<usize>,
    pub degree: i64,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageTerm {
    pub summands: Vec<Summand>,
    pub labels: Option<Vec<i64>>,
}

impl PageTerm {
    pub fn dim(&self) -> usize {
        self.summands.iter().map(|s| s.dim).sum()
    }

    fn offset(&self, idx: usize) -> usize {
        self.summands[..idx].iter().map(|s| s.dim).sum()
    }
}

pub type Position = (i64, i64);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigradedPage {
    pub kind: PageKind,
    pub terms: BTreeMap<Position, PageTerm>,
    /// Differential out of each position.
    pub differentials: BTreeMap<Position, QMatrix>,
    pub d_bidegree: Position,
    pub d2_bidegree: Position,
    /// Total degree of `(p, q)` is `p + q + degree_shift`.
    pub degree_shift: i64,
    pub flags: BTreeSet<String>,
}

impl BigradedPage {
    pub fn target(&self, p: Position) -> Position {
        (p.0 + self.d_bidegree.0, p.1 + self.d_bidegree.1)
    }

    pub fn total_degree(&self, p: Position) -> i64 {
        p.0 + p.1 + self.degree_shift
    }

    pub fn dim(&self, p: Position) -> usize {
        self.terms.get(&p).map_or(0, PageTerm::dim)
    }

    /// First nonzero block of some `d ∘ d`, if any.
    pub fn d_squared_witness(&self) -> Result<Option<DSquaredWitness>> {
        for (&p, d) in &self.differentials {
            let t = self.target(p);
            let Some(d2) = self.differentials.get(&t) else { continue };
            let comp = d2.mul(d)?;
            if comp.is_zero() {
                continue;
            }
            let (src, tgt) = (&self.terms[&p], &self.terms[&self.target(t)]);
            let mut best: Option<DSquaredWitness> = None;
            for (a, sa) in src.summands.iter().enumerate() {
                for (b, sb) in tgt.summands.iter().enumerate() {
                    let blk = comp.block(tgt.offset(b), src.offset(a), sb.dim, sa.dim);
                    let size = sa.dim * sb.dim;
                    if !blk.is_zero() && best.as_ref().map_or(true, |w| size < w.source.dim * w.target.dim) {
                        best = Some(DSquaredWitness { position: p, source: sa.clone(), target: sb.clone() });
                    }
                }
            }
            return Ok(best);
        }
        Ok(None)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DSquaredWitness {
    pub position: Position,
    pub source: Summand,
    pub target: Summand,
}

type Placed = (Position, Summand);

fn assemble(
    kind: PageKind,
    summands: Vec<Placed>,
    labels_of: impl Fn(&Summand) -> Option<Vec<i64>>,
    d_bidegree: Position,
    d2_bidegree: Position,
    degree_shift: i64,
    mut link: impl FnMut(Position, &Summand, &Summand) -> Result<Option<QMatrix>>,
) -> Result<BigradedPage> {
    let mut grouped: BTreeMap<Position, Vec<Summand>> = BTreeMap::new();
    for (p, s) in summands.into_iter().filter(|(_, s)| s.dim > 0) {
        grouped.entry(p).or_default().push(s);
    }
    let terms: BTreeMap<Position, PageTerm> = grouped
        .into_iter()
        .map(|(p, mut ss)| {
            ss.sort();
            let labels = ss.iter().map(&labels_of).collect::<Option<Vec<_>>>().map(|v| v.concat());
            (p, PageTerm { summands: ss, labels })
        })
        .collect();
    let mut differentials = BTreeMap::new();
    for (&p, src) in &terms {
        let t = (p.0 + d_bidegree.0, p.1 + d_bidegree.1);
        let Some(tgt) = terms.get(&t) else { continue };
        let mut m = QMatrix::zeros(tgt.dim(), src.dim());
        for (a, sa) in src.summands.iter().enumerate() {
            for (b, sb) in tgt.summands.iter().enumerate() {
                if let Some(blk) = link(p, sa, sb)? {
                    m.put_block(tgt.offset(b), src.offset(a), &blk);
                }
            }
        }
        differentials.insert(p, m);
    }
    Ok(BigradedPage { kind, terms, differentials, d_bidegree, d2_bidegree, degree_shift, flags: BTreeSet::new() })
}

fn checked(page: BigradedPage) -> Result<BigradedPage> {
    match page.d_squared_witness()? {
        None => Ok(page),
        Some(w) => Err(Error::Inconsistent(format!(
            "d1 ∘ d1 ≠ 0 at {:?}: {:?} H^{} → {:?} H^{}",
            w.position, w.source.stratum, w.source.degree, w.target.stratum, w.target.degree
        ))),
    }
}

fn signed(sign: i64, m: QMatrix) -> QMatrix {
    if sign == 1 {
        m
    } else {
        m.scale(&q(sign))
    }
}

fn degrees(data: &StrataComplexData) -> impl Iterator<Item = (Vec<usize>, i64, usize)> + '_ {
    data.strata.iter().flat_map(|(i, s)| s.dims.iter().filter(|(_, &v)| v > 0).map(move |(k, v)| (i.clone(), *k, *v)))
}

fn label_fn(data: &StrataComplexData) -> impl Fn(&Summand) -> Option<Vec<i64>> + '_ {
    move |s| data.labels(&s.stratum, s.degree)
}

/// Weight page: `E1^{i,j} = ⊕_{|I|=i+1} H^j(X_I)` with the signed restrictions.
pub fn build_weight_e1(data: &StrataComplexData) -> Result<BigradedPage> {
    let summands = degrees(data)
        .map(|(i, k, dim)| ((i.len() as i64 - 1, k), Summand { tag: 0, stratum: i, degree: k, dim }))
        .collect();
    let page = assemble(PageKind::Weight, summands, label_fn(data), (1, 0), (2, -1), 0, |_, s, t| {
        let Some(b) = differs_by_one(&s.stratum, &t.stratum) else { return Ok(None) };
        Ok(Some(signed(mv_sign(&t.stratum, b), data.restrict(&s.stratum, &t.stratum, s.degree)?)))
    })?;
    checked(page)
}

/// Positions `(p, k)` of a stratum with `m = |I|` in the two-directional
/// layout: `p = 2k + 1 − m` for `0 ≤ k ≤ m − 1`.
fn two_way_slots(m: usize) -> impl Iterator<Item = (i64, i64)> {
    let m = m as i64;
    (0..m).map(move |k| (2 * k + 1 - m, k))
}

/// Monodromy-weight page `E1^{p,q} = ⊕_{k ≥ max(0,p)} H^{q+2p−2k}(E(2k−p+1))`
/// with `d1 = G + (−1)^p d`.
pub fn build_monodromy_e1(data: &StrataComplexData) -> Result<BigradedPage> {
    let mut summands = Vec::new();
    for (i, d, dim) in degrees(data) {
        let m = i.len() as i64;
        for (p, k) in two_way_slots(i.len()) {
            let q = d - 2 * k - 2 + 2 * m;
            summands.push(((p, q), Summand { tag: k, stratum: i.clone(), degree: d, dim }));
        }
    }
    let mut flags = BTreeSet::new();
    let mut page = assemble(PageKind::MonodromyWeight, summands, label_fn(data), (1, 0), (2, -1), 0, |p, s, t| {
        if t.tag == s.tag && t.degree == s.degree + 2 {
            if let Some(b) = differs_by_one(&t.stratum, &s.stratum) {
                return Ok(Some(signed(mv_sign(&s.stratum, b), data.gysin(&s.stratum, &t.stratum, s.degree, &mut flags)?)));
            }
        }
        if t.tag == s.tag + 1 && t.degree == s.degree {
            if let Some(b) = differs_by_one(&s.stratum, &t.stratum) {
                let sign = mv_sign(&t.stratum, b) * if p.0.rem_euclid(2) == 0 { 1 } else { -1 };
                return Ok(Some(signed(sign, data.restrict(&s.stratum, &t.stratum, s.degree)?)));
            }
        }
        Ok(None)
    })?;
    page.flags = flags;
    checked(page)
}

/// Flag page of a hybrid model: column `l = |I| − 1`, row `a` holding
/// `H^{n_I − a}(Y_I, Y_{I,sm})`, differential the signed `ρ` toward `l − 1`.
pub fn build_g_flag_e1(data: &StrataComplexData) -> Result<BigradedPage> {
    let summands = degrees(data)
        .map(|(i, k, dim)| ((i.len() as i64 - 1, data.n_of(&i) - k), Summand { tag: 0, stratum: i, degree: k, dim }))
        .collect();
    let page = assemble(PageKind::GFlag, summands, |_| None, (-1, 0), (-2, 1), data.n as i64, |_, s, t| {
        let Some(b) = differs_by_one(&t.stratum, &s.stratum) else { return Ok(None) };
        Ok(Some(signed(mv_sign(&s.stratum, b), data.rho(&s.stratum, &t.stratum, s.degree)?)))
    })?;
    checked(page)
}

/// Sign rule for the anti-diagonal part of the δ-flag differential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Twist {
    /// `d1 = d_I + (−1)^l d_II`.
    Alternating,
    /// `d1 = d_I + d_II`, kept for testing the sign rule.
    Constant,
}

pub fn build_delta_e1(data: &StrataComplexData) -> Result<BigradedPage> {
    build_delta_e1_with(data, Twist::Alternating)
}

/// δ-flag page: column `l` holds `⊕_{k ≥ max(0,l)} ⊕_{|I|=2k−l+1}
/// H^{n_I+a}(Y_I, Y_{I,sm})` in row `a`.
pub fn build_delta_e1_with(data: &StrataComplexData, twist: Twist) -> Result<BigradedPage> {
    let mut summands = Vec::new();
    for (i, d, dim) in degrees(data) {
        let a = d - data.n_of(&i);
        for (l, k) in two_way_slots(i.len()) {
            summands.push(((l, a), Summand { tag: k, stratum: i.clone(), degree: d, dim }));
        }
    }
    let mut flags = BTreeSet::new();
    let mut page = assemble(PageKind::DeltaFlag, summands, |_| None, (1, 0), (2, -1), data.n as i64, |p, s, t| {
        if t.tag == s.tag && t.degree == s.degree + 1 {
            if let Some(b) = differs_by_one(&t.stratum, &s.stratum) {
                return Ok(Some(signed(mv_sign(&s.stratum, b), data.rho(&s.stratum, &t.stratum, s.degree)?)));
            }
        }
        if t.tag == s.tag + 1 && t.degree == s.degree - 1 {
            if let Some(b) = differs_by_one(&s.stratum, &t.stratum) {
                let tw = match twist {
                    Twist::Alternating if p.0.rem_euclid(2) == 1 => -1,
                    _ => 1,
                };
                let m = data.rho_dual(&s.stratum, &t.stratum, s.degree, &mut flags)?;
                return Ok(Some(signed(mv_sign(&t.stratum, b) * tw, m)));
            }
        }
        Ok(None)
    })?;
    page.flags = flags;
    checked(page)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct E2Entry {
    pub p: i64,
    pub q: i64,
    pub total_degree: i64,
    pub dim: usize,
    pub by_label: Option<BTreeMap<i64, usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct E2Report {
    pub kind: PageKind,
    pub entries: Vec<E2Entry>,
    pub totals: BTreeMap<i64, usize>,
    pub euler_e1: i64,
    pub euler_e2: i64,
    pub abutment_match: Option<bool>,
    /// Pairs of nonzero E2 terms a `d2` could connect.
    pub d2_candidates: Vec<(Position, Position)>,
    pub flags: BTreeSet<String>,
}

impl E2Report {
    pub fn get(&self, p: i64, q: i64) -> usize {
        self.entries.iter().find(|e| e.p == p && e.q == q).map_or(0, |e| e.dim)
    }

    pub fn get_label(&self, p: i64, q: i64, a: i64) -> usize {
        self.entries
            .iter()
            .find(|e| e.p == p && e.q == q)
            .and_then(|e| e.by_label.as_ref())
            .and_then(|m| m.get(&a).copied())
            .unwrap_or(0)
    }

    /// `d2` vanishes for degree reasons.
    pub fn degenerates_for_degree_reasons(&self) -> bool {
        self.d2_candidates.is_empty()
    }
}

fn select(m: &QMatrix, rows: &[usize], cols: &[usize]) -> QMatrix {
    let mut out = QMatrix::zeros(rows.len(), cols.len());
    for (r, &rr) in rows.iter().enumerate() {
        for (c, &cc) in cols.iter().enumerate() {
            out.set(r, c, m.get(rr, cc).clone());
        }
    }
    out
}

fn positions_of(labels: &[i64], a: i64) -> Vec<usize> {
    labels.iter().enumerate().filter(|(_, &x)| x == a).map(|(i, _)| i).collect()
}

fn sign_of(deg: i64) -> i64 {
    if deg.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// E2 dimensions, per label when every term carries labels.
pub fn e2_report(page: &BigradedPage, abutment: Option<&BTreeMap<i64, usize>>) -> Result<E2Report> {
    let labelled = page.terms.values().all(|t| t.labels.is_some());
    let mut flags = page.flags.clone();
    if !labelled && matches!(page.kind, PageKind::Weight | PageKind::MonodromyWeight) {
        flags.insert("total-dimension".into());
    }
    let incoming: BTreeMap<Position, Position> = page.differentials.keys().map(|&p| (page.target(p), p)).collect();
    if labelled {
        for (&p, d) in &page.differentials {
            let (ls, lt) = (page.terms[&p].labels.as_ref().unwrap(), page.terms[&page.target(p)].labels.as_ref().unwrap());
            for r in 0..d.rows() {
                for c in 0..d.cols() {
                    if lt[r] != ls[c] && !num_traits::Zero::is_zero(d.get(r, c)) {
                        return Err(Error::Inconsistent(format!("differential out of {p:?} mixes labels {} and {}", ls[c], lt[r])));
                    }
                }
            }
        }
    }
    let mut entries = Vec::new();
    for (&p, term) in &page.terms {
        let out = page.differentials.get(&p);
        let inc = incoming.get(&p).map(|s| (&page.differentials[s], *s));
        let dim = term.dim() - out.map_or(0, QMatrix::rank) - inc.map_or(0, |(m, _)| m.rank());
        let by_label = if labelled {
            let labels = term.labels.as_ref().unwrap();
            let set: BTreeSet<i64> = labels.iter().copied().collect();
            let mut m = BTreeMap::new();
            for a in set {
                let here = positions_of(labels, a);
                let mut v = here.len();
                if let Some(d) = out {
                    let tl = page.terms[&page.target(p)].labels.as_ref().unwrap();
                    v -= select(d, &positions_of(tl, a), &here).rank();
                }
                if let Some((d, s)) = inc {
                    let sl = page.terms[&s].labels.as_ref().unwrap();
                    v -= select(d, &here, &positions_of(sl, a)).rank();
                }
                if v > 0 {
                    m.insert(a, v);
                }
            }
            Some(m)
        } else {
            None
        };
        if dim > 0 {
            entries.push(E2Entry { p: p.0, q: p.1, total_degree: page.total_degree(p), dim, by_label });
        }
    }
    let mut totals = BTreeMap::new();
    for e in &entries {
        *totals.entry(e.total_degree).or_insert(0) += e.dim;
    }
    let euler_e1 = page.terms.iter().map(|(&p, t)| sign_of(page.total_degree(p)) * t.dim() as i64).sum();
    let euler_e2 = entries.iter().map(|e| sign_of(e.total_degree) * e.dim as i64).sum();
    let abutment_match = abutment.map(|a| {
        let keys: BTreeSet<i64> = a.keys().chain(totals.keys()).copied().collect();
        keys.iter().all(|k| a.get(k).copied().unwrap_or(0) == totals.get(k).copied().unwrap_or(0))
    });
    let mut d2_candidates = Vec::new();
    for e in &entries {
        let t = (e.p + page.d2_bidegree.0, e.q + page.d2_bidegree.1);
        if entries.iter().any(|f| (f.p, f.q) == t) {
            d2_candidates.push(((e.p, e.q), t));
        }
    }
    Ok(E2Report { kind: page.kind, entries, totals, euler_e1, euler_e2, abutment_match, d2_candidates, flags })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PdDimVerdict {
    pub stratum: Vec<usize>,
    pub degree: i64,
    pub dim: usize,
    pub dual_degree: i64,
    pub dual_dim: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PdMapVerdict {
    /// `|I|` of the source stratum.
    pub level: usize,
    pub checked: usize,
    /// `+1` or `−1` when one global sign fits every map of the level.
    pub sign: Option<i64>,
    pub failing: Option<(Vec<usize>, Vec<usize>, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PdReport {
    pub dims: Vec<PdDimVerdict>,
    pub maps: Vec<PdMapVerdict>,
    pub flags: BTreeSet<String>,
}

impl PdReport {
    pub fn holds(&self) -> bool {
        self.dims.iter().all(|d| d.holds) && self.maps.iter().all(|m| m.sign.is_some())
    }

    pub fn failures(&self) -> Vec<&PdDimVerdict> {
        self.dims.iter().filter(|d| !d.holds).collect()
    }
}

/// Dimension symmetry about `n_I` for each stratum and, where `ρ^∨` is
/// supplied, agreement with the pairing conjugate of `ρ` up to one sign per level.
pub fn check_poincare_duality(data: &StrataComplexData) -> PdReport {
    let mut dims = Vec::new();
    for (i, s) in &data.strata {
        let ni = data.n_of(i);
        let keys: BTreeSet<i64> = s.dims.iter().filter(|(_, &v)| v > 0).flat_map(|(k, _)| [*k, 2 * ni - k]).collect();
        for k in keys {
            let (dim, dual_dim) = (s.dim(k), s.dim(2 * ni - k));
            dims.push(PdDimVerdict { stratum: i.clone(), degree: k, dim, dual_degree: 2 * ni - k, dual_dim, holds: dim == dual_dim });
        }
    }
    let mut flags = BTreeSet::new();
    let mut levels: BTreeMap<usize, Vec<(Vec<usize>, Vec<usize>, i64, Option<QMatrix>, QMatrix)>> = BTreeMap::new();
    for ((kind, from, to, b), m) in &data.maps {
        if *kind != MapKind::RhoDual {
            continue;
        }
        let conj = data.rho_dual_conjugate(from, to, *b, &mut flags).ok();
        levels.entry(from.len()).or_default().push((from.clone(), to.clone(), *b, conj, m.clone()));
    }
    let maps = levels
        .into_iter()
        .map(|(level, items)| {
            let fits = |s: i64| items.iter().find(|(_, _, _, c, m)| c.as_ref().map_or(true, |c| c.scale(&q(s)) != *m));
            let (plus, minus) = (fits(1), fits(-1));
            let sign = match (plus, minus) {
                (None, _) => Some(1),
                (_, None) => Some(-1),
                _ => None,
            };
            let failing = if sign.is_none() { plus.map(|(f, t, b, _, _)| (f.clone(), t.clone(), *b)) } else { None };
            PdMapVerdict { level, checked: items.len(), sign, failing }
        })
        .collect();
    PdReport { dims, maps, flags }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PwMode {
    Smoothing,
    CentralFiber,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PwRow {
    /// `None` in total-dimension mode.
    pub a: Option<i64>,
    pub l: i64,
    pub b_side: usize,
    pub a_side: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PwReport {
    pub mode: PwMode,
    pub total_dimension_mode: bool,
    pub rows: Vec<PwRow>,
    pub flags: BTreeSet<String>,
}

impl PwReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }

    pub fn failures(&self) -> Vec<&PwRow> {
        self.rows.iter().filter(|r| !r.holds).collect()
    }
}

/// Compares label-`a` pieces of the degeneration's E2 (summed over weights,
/// column `l`) with the hybrid page's E2 at `(l, a)`.
pub fn check_mirror_pw(deg: &StrataComplexData, hyb: &StrataComplexData, mode: PwMode) -> Result<PwReport> {
    let (b, a) = match mode {
        PwMode::Smoothing => (build_monodromy_e1(deg)?, build_delta_e1(hyb)?),
        PwMode::CentralFiber => (build_weight_e1(deg)?, build_g_flag_e1(hyb)?),
    };
    let (rb, ra) = (e2_report(&b, None)?, e2_report(&a, None)?);
    let total_mode = !deg.has_hodge();
    let mut table: BTreeMap<(Option<i64>, i64), (usize, usize)> = BTreeMap::new();
    for e in &rb.entries {
        match (&e.by_label, total_mode) {
            (Some(m), false) => {
                for (&lab, &v) in m {
                    table.entry((Some(lab), e.p)).or_default().0 += v;
                }
            }
            _ => table.entry((None, e.p)).or_default().0 += e.dim,
        }
    }
    for e in &ra.entries {
        let k = if total_mode { (None, e.p) } else { (Some(e.q), e.p) };
        table.entry(k).or_default().1 += e.dim;
    }
    let rows = table
        .into_iter()
        .map(|((a, l), (bs, as_))| PwRow { a, l, b_side: bs, a_side: as_, holds: bs == as_ })
        .collect();
    let mut flags: BTreeSet<String> = rb.flags.union(&ra.flags).cloned().collect();
    if total_mode {
        flags.insert("total-dimension".into());
    }
    Ok(PwReport { mode, total_dimension_mode: total_mode, rows, flags })
}

/// A cubical diagram of vector spaces at a fixed label: dimensions per
/// index set and maps between adjacent index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicalData {
    pub label: i64,
    pub dims: BTreeMap<Vec<usize>, usize>,
    pub maps: BTreeMap<(Vec<usize>, Vec<usize>), QMatrix>,
}

#[derive(Deserialize)]
struct CubicalDoc {
    label: i64,
    dims: Vec<CubicalDimDoc>,
    #[serde(default)]
    maps: Vec<CubicalMapDoc>,
}

#[derive(Deserialize)]
struct CubicalDimDoc {
    #[serde(rename = "I")]
    index: Vec<usize>,
    dim: usize,
}

#[derive(Deserialize)]
struct CubicalMapDoc {
    from: Vec<usize>,
    to: Vec<usize>,
    matrix: Vec<Vec<Value>>,
}

impl CubicalData {
    pub fn new(
        label: i64,
        dims: BTreeMap<Vec<usize>, usize>,
        maps: BTreeMap<(Vec<usize>, Vec<usize>), QMatrix>,
    ) -> Result<CubicalData> {
        for ((f, t), m) in &maps {
            let (Some(&c), Some(&r)) = (dims.get(f), dims.get(t)) else {
                return Err(Error::Parse(format!("map {f:?} → {t:?} refers to an undeclared index set")));
            };
            if differs_by_one(f, t).is_none() && differs_by_one(t, f).is_none() {
                return Err(Error::Parse(format!("map {f:?} → {t:?} does not change one index")));
            }
            if m.rows() != r || m.cols() != c {
                return Err(Error::Parse(format!("map {f:?} → {t:?} has the wrong shape")));
            }
        }
        Ok(CubicalData { label, dims, maps })
    }

    pub fn from_json(text: &str) -> Result<CubicalData> {
        let doc: CubicalDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let dims: BTreeMap<Vec<usize>, usize> = doc
            .dims
            .into_iter()
            .map(|d| {
                let mut i = d.index;
                i.sort_unstable();
                (i, d.dim)
            })
            .collect();
        let mut maps = BTreeMap::new();
        for m in doc.maps {
            let (mut f, mut t) = (m.from, m.to);
            f.sort_unstable();
            t.sort_unstable();
            let shape = (dims.get(&t).copied().unwrap_or(0), dims.get(&f).copied().unwrap_or(0));
            maps.insert((f, t), parse_matrix(&m.matrix, shape)?);
        }
        CubicalData::new(doc.label, dims, maps)
    }
}

/// Label-`a` parts of `H^*(X_I)` with the Gysin maps between them.
pub fn cubical_degeneration(data: &StrataComplexData, a: i64) -> Result<CubicalData> {
    if !data.has_hodge() {
        return Err(Error::pre("the degeneration side needs Hodge labels"));
    }
    let mut flags = BTreeSet::new();
    // Basis: degrees in increasing order, label-a vectors inside each degree.
    let layout = |i: &Vec<usize>| -> Vec<(i64, Vec<usize>)> {
        data.strata[i].dims.keys().map(|&k| (k, positions_of(&data.labels(i, k).unwrap_or_default(), a))).collect()
    };
    let dims: BTreeMap<Vec<usize>, usize> =
        data.strata.keys().map(|i| (i.clone(), layout(i).iter().map(|(_, v)| v.len()).sum())).collect();
    let mut maps = BTreeMap::new();
    for j in data.strata.keys() {
        for i in data.strata.keys().filter(|i| differs_by_one(i, j).is_some()) {
            let (lj, li) = (layout(j), layout(i));
            let mut m = QMatrix::zeros(dims[i], dims[j]);
            let mut col = 0;
            for (k, cols) in &lj {
                let mut row = 0;
                for (k2, rows) in &li {
                    if *k2 == k + 2 && !rows.is_empty() && !cols.is_empty() {
                        let g = data.gysin(j, i, *k, &mut flags)?;
                        m.put_block(row, col, &select(&g, rows, cols));
                    }
                    row += rows.len();
                }
                col += cols.len();
            }
            maps.insert((j.clone(), i.clone()), m);
        }
    }
    CubicalData::new(a, dims, maps)
}

/// `H^{n_I + a}(Y_I, Y_{I,sm})` with the maps `ρ`.
pub fn cubical_hybrid(data: &StrataComplexData, a: i64) -> Result<CubicalData> {
    let dims: BTreeMap<Vec<usize>, usize> =
        data.strata.keys().map(|i| (i.clone(), data.dim(i, data.n_of(i) + a))).collect();
    let mut maps = BTreeMap::new();
    for j in data.strata.keys() {
        for i in data.strata.keys().filter(|i| differs_by_one(i, j).is_some()) {
            maps.insert((j.clone(), i.clone()), data.rho(j, i, data.n_of(j) + a)?);
        }
    }
    CubicalData::new(a, dims, maps)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubicalDimVerdict {
    pub index_set: Vec<usize>,
    pub b_side: usize,
    pub a_side: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubicalRankVerdict {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    pub b_rank: usize,
    pub a_rank: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareVerdict {
    pub side: String,
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    pub commutes: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubicalReport {
    pub label: i64,
    pub dims: Vec<CubicalDimVerdict>,
    pub ranks: Vec<CubicalRankVerdict>,
    pub squares: Vec<SquareVerdict>,
}

impl CubicalReport {
    pub fn holds(&self) -> bool {
        self.dims.iter().all(|d| d.holds) && self.ranks.iter().all(|r| r.holds) && self.squares.iter().all(|s| s.commutes)
    }
}

fn squares(side: &str, c: &CubicalData) -> Result<Vec<SquareVerdict>> {
    let mut out = Vec::new();
    for ((x, y), f) in &c.maps {
        for ((y2, z), g) in &c.maps {
            if y2 != y || z == x {
                continue;
            }
            for ((x3, w), f2) in &c.maps {
                if x3 != x || w == y {
                    continue;
                }
                let Some(g2) = c.maps.get(&(w.clone(), z.clone())) else { continue };
                if y > w {
                    continue;
                }
                let commutes = g.mul(f)? == g2.mul(f2)?;
                out.push(SquareVerdict { side: side.into(), from: x.clone(), to: z.clone(), commutes });
            }
        }
    }
    Ok(out)
}

/// Dimension and rank agreement of two cubical diagrams, plus commutativity
/// of every square supplied on either side.
pub fn check_cubical_mirror(b: &CubicalData, a: &CubicalData) -> Result<CubicalReport> {
    if b.label != a.label {
        return Err(Error::pre(format!("labels differ: {} vs {}", b.label, a.label)));
    }
    if b.dims.keys().ne(a.dims.keys()) {
        return Err(Error::pre("index families differ"));
    }
    let dims = b
        .dims
        .iter()
        .map(|(i, &db)| CubicalDimVerdict { index_set: i.clone(), b_side: db, a_side: a.dims[i], holds: db == a.dims[i] })
        .collect();
    let pairs: BTreeSet<&(Vec<usize>, Vec<usize>)> = b.maps.keys().chain(a.maps.keys()).collect();
    let ranks = pairs
        .into_iter()
        .map(|k| {
            let rb = b.maps.get(k).map_or(0, QMatrix::rank);
            let ra = a.maps.get(k).map_or(0, QMatrix::rank);
            CubicalRankVerdict { from: k.0.clone(), to: k.1.clone(), b_rank: rb, a_rank: ra, holds: rb == ra }
        })
        .collect();
    let mut sq = squares("b", b)?;
    sq.extend(squares("a", a)?);
    Ok(CubicalReport { label: b.label, dims, ranks, squares: sq })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn elliptic_deg() -> StrataComplexData {
        StrataComplexData::from_json(
            r#"{"n":1,"strata":[
                {"I":[0],"dims":{"0":1,"2":1},"hodge":{"0":{"0":1},"2":{"0":1}}},
                {"I":[1],"dims":{"0":1,"2":1},"hodge":{"0":{"0":1},"2":{"0":1}}},
                {"I":[0,1],"dims":{"0":2},"hodge":{"0":{"0":2}}}],
              "maps":[
                {"from":[0],"to":[0,1],"kind":"restrict","degree":0,"matrix":[[1],[1]]},
                {"from":[1],"to":[0,1],"kind":"restrict","degree":0,"matrix":[[1],[1]]}],
              "abutment":{"0":1,"1":2,"2":1}}"#,
        )
        .unwrap()
    }

    pub(crate) fn elliptic_hyb() -> StrataComplexData {
        StrataComplexData::from_json(
            r#"{"n":1,"strata":[
                {"I":[0],"dims":{"1":2},"pairing":{"1":[[0,1],[-1,0]]}},
                {"I":[1],"dims":{"1":2},"pairing":{"1":[[0,1],[-1,0]]}},
                {"I":[0,1],"dims":{"0":2},"pairing":{"0":[[1,0],[0,1]]}}],
              "maps":[
                {"from":[0,1],"to":[0],"kind":"rho","degree":0,"matrix":[[1,-1],[0,0]]},
                {"from":[0,1],"to":[1],"kind":"rho","degree":0,"matrix":[[1,-1],[0,0]]},
                {"from":[0],"to":[0,1],"kind":"rho_dual","degree":1,"matrix":[[0,-1],[0,1]]},
                {"from":[1],"to":[0,1],"kind":"rho_dual","degree":1,"matrix":[[0,-1],[0,1]]}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn weight_page() {
        let page = build_weight_e1(&elliptic_deg()).unwrap();
        let r = e2_report(&page, None).unwrap();
        assert_eq!((r.get(0, 0), r.get(1, 0), r.get(0, 2)), (1, 1, 2));
        assert_eq!(r.euler_e2, 2);
        assert_eq!(r.euler_e1, r.euler_e2);
    }

    #[test]
    fn monodromy_page() {
        let page = build_monodromy_e1(&elliptic_deg()).unwrap();
        assert!(page.flags.contains("pairing-default"));
        let r = e2_report(&page, elliptic_deg().abutment.as_ref()).unwrap();
        assert_eq!((r.get(0, 0), r.get(1, 0), r.get(-1, 2), r.get(0, 2)), (1, 1, 1, 1));
        assert_eq!(r.abutment_match, Some(true));
    }

    #[test]
    fn hybrid_pages() {
        let g = e2_report(&build_g_flag_e1(&elliptic_hyb()).unwrap(), None).unwrap();
        assert_eq!((g.get(0, 0), g.get(1, 0)), (3, 1));
        assert_eq!(g.euler_e2, -2);
        let d = e2_report(&build_delta_e1(&elliptic_hyb()).unwrap(), None).unwrap();
        assert_eq!((d.get(-1, 0), d.get(0, 0), d.get(1, 0)), (1, 2, 1));
        assert_eq!(d.totals, BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
    }

    #[test]
    fn mirror_checks() {
        for mode in [PwMode::Smoothing, PwMode::CentralFiber] {
            let r = check_mirror_pw(&elliptic_deg(), &elliptic_hyb(), mode).unwrap();
            assert!(r.holds(), "{r:?}");
            assert!(!r.total_dimension_mode);
        }
        let pd = check_poincare_duality(&elliptic_hyb());
        assert!(pd.holds());
        assert_eq!(pd.maps[0].sign, Some(1));
        let c = check_cubical_mirror(&cubical_degeneration(&elliptic_deg(), 0).unwrap(), &cubical_hybrid(&elliptic_hyb(), 0).unwrap())
            .unwrap();
        assert!(c.holds());
        assert!(c.dims.iter().all(|d| d.b_side == 2));
    }

    #[test]
    fn shape_errors() {
        let bad = r#"{"n":1,"strata":[{"I":[0],"dims":{"0":1}},{"I":[0,1],"dims":{"0":2}}],
            "maps":[{"from":[0],"to":[0,1],"kind":"restrict","degree":0,"matrix":[[1]]}]}"#;
        assert!(StrataComplexData::from_json(bad).is_err());
        let missing = r#"{"n":1,"strata":[{"I":[0],"dims":{"0":1}},{"I":[0,1],"dims":{"0":2}}]}"#;
        assert!(build_weight_e1(&StrataComplexData::from_json(missing).unwrap()).is_err());
    }
}
