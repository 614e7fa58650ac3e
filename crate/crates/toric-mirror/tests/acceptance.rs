//! Acceptance run: the square example, the elliptic pair, seeded property
//! suites and negative cases. One PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toric_mirror::combinat::nonempty_subsets;
use toric_mirror::io::{nef_doc_from_value, parse_value, partition_from_value};
use toric_mirror::lattice_geometry::{convex_hull, named, LatticePolytope, LatticeVector};
use toric_mirror::lg_models::{compactify_fiber, givental_hybrid, pi_gamma_monomials, Coef, HomogeneousEquation, NablaData};
use toric_mirror::linalg::{q, QMatrix};
use toric_mirror::nef_partitions::{validate_nef, NefCheck};
use toric_mirror::partition_engine::{build_fibration_fans, central_frame};
use toric_mirror::spectral_engine::{
    build_delta_e1, build_delta_e1_with, build_g_flag_e1, build_monodromy_e1, build_weight_e1, check_mirror_pw,
    check_poincare_duality, e2_report, BigradedPage, E2Report, MapKind, PwMode, StrataComplexData, StrataMap,
    StratumCohomology, Twist,
};
use toric_mirror::strata_calculus::{
    check_topological_mirror, euler_glued_total, euler_smoothing, euler_snc, euler_tilde_total, Side, StrataEuler,
};
use toric_mirror::Error;

const FAST: Duration = Duration::from_secs(1);
const SUITE: Duration = Duration::from_secs(60);
const CASES: usize = 1000;
const SEED: u64 = 0x7011c;

type Outcome = Result<String, String>;

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "corpus", name].iter().collect();
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: toric_mirror::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn v(x: &[i64]) -> LatticeVector {
    x.to_vec()
}

// ---------------------------------------------------------------- criterion 1

fn square_pipeline() -> Outcome {
    let g = lib(partition_from_value(&lib(parse_value(&corpus("square-vsplit.json")))?))?;
    let report = g.validate_semistable();
    ensure(report.valid, || format!("partition rejected: {:?}", report.violations))?;
    let k = g.dual_complex();
    ensure(k.vertex_count == 2 && k.dim() == 1 && k.simplices.contains(&vec![0, 1]), || format!("K_Gamma = {k:?}"))?;
    let frame = lib(central_frame(&g))?;
    let fans = lib(build_fibration_fans(&g, &frame))?;
    let counts = (fans.sigma_delta.rays.len(), fans.sigma_prime.rays.len(), fans.sigma_v.rays.len());
    ensure(counts == (4, 8, 2), || format!("ray counts {counts:?}"))?;
    let pi = lib(pi_gamma_monomials(&fans.sigma_prime, &frame))?;
    // One factor per ray over x = -1 and over x = 1; a displayed z_(-1,-1)
    // repeated twice is read as the typo it is.
    let expect: BTreeSet<BTreeSet<(LatticeVector, i64)>> = [
        [v(&[-1, 1]), v(&[-1, 0]), v(&[-1, -1])].map(|r| (r, 1)).into_iter().collect(),
        [v(&[1, 1]), v(&[1, 0]), v(&[1, -1])].map(|r| (r, 1)).into_iter().collect(),
    ]
    .into_iter()
    .collect();
    let got: BTreeSet<BTreeSet<(LatticeVector, i64)>> =
        pi.components.iter().map(|c| c.iter().cloned().collect()).collect();
    ensure(got == expect, || format!("pi_Gamma = {pi}"))?;
    Ok(format!("K_Gamma 1-simplex, rays 4/8/2, pi_Gamma = {pi} (repeated-index typo corrected)"))
}

// ---------------------------------------------------------------- criterion 2

type Term = (String, i64, BTreeMap<LatticeVector, i64>);

fn term(coef: &str, sign: i64, exps: &[(&[i64], i64)]) -> Term {
    (coef.to_string(), sign, exps.iter().map(|(r, e)| (r.to_vec(), *e)).collect())
}

fn terms_of(e: &HomogeneousEquation) -> BTreeSet<Term> {
    e.terms
        .iter()
        .map(|t| {
            let c = match &t.coef {
                Coef::A(rho) => format!("a{rho:?}"),
                Coef::Lambda(s) => s.clone(),
            };
            (c, t.sign, t.exps.clone())
        })
        .collect()
}

fn givental_compactification() -> Outcome {
    let doc = lib(nef_doc_from_value(&lib(parse_value(&corpus("diamond-nef.json")))?))?;
    let nef = match lib(validate_nef(&doc.host, &doc.parts))? {
        NefCheck::Valid(n) => n,
        NefCheck::Invalid(f) => return Err(format!("nef partition rejected: {}", f.reason)),
    };
    let model = lib(givental_hybrid(&nef, 1, 1))?;
    let data = lib(NablaData::from_nef(&nef))?;
    let eqs = lib(compactify_fiber(&model, &data, &["lambda".to_string()]))?;
    ensure(eqs.len() == 2, || format!("{} equations", eqs.len()))?;
    // Both equations, term by term.
    let first: BTreeSet<Term> = [
        term("a[0, 0]", 1, &[(&[0, 1], 1), (&[-1, 1], 1), (&[-1, 0], 1), (&[-1, -1], 1), (&[0, -1], 1)]),
        term("a[1, 0]", 1, &[(&[0, 1], 1), (&[0, -1], 1), (&[1, 0], 1)]),
        term("a[0, 1]", 1, &[(&[0, 1], 2), (&[-1, 1], 2), (&[-1, 0], 1)]),
        term("a[0, -1]", 1, &[(&[0, -1], 2), (&[-1, -1], 2), (&[-1, 0], 1)]),
    ]
    .into_iter()
    .collect();
    let second: BTreeSet<Term> = [
        term("lambda", 1, &[(&[1, 0], 1)]),
        term("a[-1, 0]", -1, &[(&[-1, 1], 1), (&[-1, 0], 1), (&[-1, -1], 1)]),
    ]
    .into_iter()
    .collect();
    ensure(terms_of(&eqs[0]) == first, || format!("first equation: {}", eqs[0]))?;
    ensure(terms_of(&eqs[1]) == second, || format!("second equation: {}", eqs[1]))?;
    ensure(eqs.iter().all(|e| e.exponents_consistent() && e.degree_consistent()), || "degree check".into())?;
    Ok("6 terms match, all exponents exact".into())
}

// ---------------------------------------------------------------- criterion 3

fn topological_mirror() -> Outcome {
    let deg = lib(StrataEuler::from_json(&corpus("elliptic-deg.json")))?;
    let hyb = lib(StrataEuler::from_json(&corpus("elliptic-hyb.json")))?;
    // Oracle: inclusion-exclusion for X_c, multiplicity-weighted for the smoothing.
    let (mut e_x, mut e_xc) = (0, 0);
    for i in nonempty_subsets(deg.components) {
        let s = if i.len() % 2 == 1 { 1 } else { -1 };
        e_xc += s * lib(deg.get(&i))?;
        e_x += s * i.len() as i64 * lib(deg.get(&i))?;
    }
    let e_y: i64 = (0..hyb.components).map(|c| hyb.get(&[c]).unwrap()).sum();
    let r = lib(check_topological_mirror(&deg, &hyb))?;
    let got = (r.e_x, r.e_x_c, r.e_y, r.e_y_tilde);
    ensure(got == (0, 2, 0, -2), || format!("(e(X), e(X_c), e(Y), e(Y~)) = {got:?}"))?;
    ensure((e_x, e_xc, e_y) == (r.e_x, r.e_x_c, r.e_y), || "independent sums disagree".into())?;
    ensure(r.smoothing_identity && r.compact_identity, || format!("{r:?}"))?;
    ensure(r.failing_strata().is_empty(), || format!("failing strata {:?}", r.failing_strata()))?;
    Ok(format!("e(X)=0 e(X_c)=2 e(Y)=0 e(Y~)=-2, {} strata", r.strata.len()))
}

// ---------------------------------------------------------------- criterion 4

fn graded(r: &E2Report) -> BTreeMap<i64, BTreeMap<i64, usize>> {
    let mut out: BTreeMap<i64, BTreeMap<i64, usize>> = BTreeMap::new();
    for e in &r.entries {
        *out.entry(e.total_degree).or_default().entry(e.q).or_default() += e.dim;
    }
    out
}

fn table(rows: &[(i64, &[(i64, usize)])]) -> BTreeMap<i64, BTreeMap<i64, usize>> {
    rows.iter().map(|(k, ws)| (*k, ws.iter().copied().collect())).collect()
}

fn spectral_dimensions() -> Outcome {
    let deg = lib(StrataComplexData::from_json(&corpus("elliptic-deg-complex.json")))?;
    // Cycle of two lines: H^1 is the loop (weight 0), H^2 one class per line.
    let w = graded(&lib(e2_report(&lib(build_weight_e1(&deg))?, None))?);
    let w_expect = table(&[(0, &[(0, 1)]), (1, &[(0, 1)]), (2, &[(2, 2)])]);
    ensure(w == w_expect, || format!("weight E2 {w:?}"))?;
    // Smooth elliptic curve with maximally unipotent monodromy.
    let m = lib(e2_report(&lib(build_monodromy_e1(&deg))?, deg.abutment.as_ref()))?;
    let m_expect = table(&[(0, &[(0, 1)]), (1, &[(0, 1), (2, 1)]), (2, &[(2, 1)])]);
    ensure(graded(&m) == m_expect, || format!("monodromy E2 {:?}", graded(&m)))?;
    ensure(m.abutment_match == Some(true), || "monodromy page misses the abutment".into())?;
    Ok("weight (1 | 1 | w2=2), monodromy (1 | w0=1 w2=1 | 1)".into())
}

// ---------------------------------------------------------------- criterion 5

fn mirror_pw() -> Outcome {
    let deg = lib(StrataComplexData::from_json(&corpus("elliptic-deg-complex.json")))?;
    let hyb = lib(StrataComplexData::from_json(&corpus("elliptic-hyb-complex.json")))?;
    let cases: [(PwMode, &[(i64, i64, usize)]); 2] =
        [(PwMode::Smoothing, &[(0, -1, 1), (0, 0, 2), (0, 1, 1)]), (PwMode::CentralFiber, &[(0, 0, 3), (0, 1, 1)])];
    for (mode, expect) in cases {
        let r = lib(check_mirror_pw(&deg, &hyb, mode))?;
        ensure(r.holds() && !r.total_dimension_mode, || format!("{mode:?}: {:?}", r.rows))?;
        let got: Vec<(i64, i64, usize, usize)> = r.rows.iter().map(|x| (x.a.unwrap_or(i64::MIN), x.l, x.b_side, x.a_side)).collect();
        let want: Vec<(i64, i64, usize, usize)> = expect.iter().map(|&(a, l, d)| (a, l, d, d)).collect();
        ensure(got == want, || format!("{mode:?} table {got:?}"))?;
    }
    Ok("smoothing (1,2,1) and central fiber (3,1) tables match".into())
}

// ---------------------------------------------------------------- criterion 6

fn reflexive_corpus() -> Vec<LatticePolytope> {
    let mut pts = Vec::new();
    for x in -2i64..=2 {
        for y in -2i64..=2 {
            if (x, y) != (0, 0) && num_gcd(x, y) == 1 {
                pts.push(vec![x, y]);
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    subsets_rec(&pts, 0, &mut chosen, &mut |s| {
        if s.len() < 3 {
            return;
        }
        let Ok(p) = convex_hull(s) else { return };
        if p.dim() != 2 || p.vertices().len() != s.len() || !p.is_reflexive() {
            return;
        }
        if seen.insert(normal_form(&p)) {
            out.push(p);
        }
    });
    out
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        num_gcd(b, a % b)
    }
}

fn subsets_rec(pts: &[Vec<i64>], from: usize, chosen: &mut Vec<Vec<i64>>, f: &mut impl FnMut(&[Vec<i64>])) {
    f(chosen);
    if chosen.len() == 6 {
        return;
    }
    for i in from..pts.len() {
        chosen.push(pts[i].clone());
        subsets_rec(pts, i + 1, chosen, f);
        chosen.pop();
    }
}

/// Row Hermite form of a 2 × m integer matrix under left GL2(Z) action.
fn hermite_2(mut m: [Vec<i64>; 2]) -> [Vec<i64>; 2] {
    let cols = m[0].len();
    let mut j = 0;
    while j < cols && m[0][j] == 0 && m[1][j] == 0 {
        j += 1;
    }
    // Euclid on column j.
    while m[1][j] != 0 {
        let q = m[0][j].div_euclid(m[1][j]);
        for c in 0..cols {
            m[0][c] -= q * m[1][c];
        }
        m.swap(0, 1);
    }
    if m[0][j] < 0 {
        m[0].iter_mut().for_each(|x| *x = -*x);
    }
    let Some(k) = (j + 1..cols).find(|&c| m[1][c] != 0) else { return m };
    if m[1][k] < 0 {
        m[1].iter_mut().for_each(|x| *x = -*x);
    }
    let q = m[0][k].div_euclid(m[1][k]);
    for c in 0..cols {
        m[0][c] -= q * m[1][c];
    }
    m
}

/// Minimum Hermite form over all cyclic orderings of the vertices.
fn normal_form(p: &LatticePolytope) -> [Vec<i64>; 2] {
    let mut vs: Vec<Vec<i64>> = p.vertices().to_vec();
    vs.sort_by(|a, b| (a[1] as f64).atan2(a[0] as f64).partial_cmp(&(b[1] as f64).atan2(b[0] as f64)).unwrap());
    let n = vs.len();
    let mut best: Option<[Vec<i64>; 2]> = None;
    for rev in [false, true] {
        for s in 0..n {
            let order: Vec<&Vec<i64>> =
                (0..n).map(|i| if rev { &vs[(s + n - i) % n] } else { &vs[(s + i) % n] }).collect();
            let h = hermite_2([order.iter().map(|x| x[0]).collect(), order.iter().map(|x| x[1]).collect()]);
            if best.as_ref().map_or(true, |b| h < *b) {
                best = Some(h);
            }
        }
    }
    best.unwrap()
}

fn unimodular(rng: &mut ChaCha8Rng, dim: usize, steps: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..dim).map(|i| (0..dim).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..steps {
        let (a, b) = (rng.gen_range(0..dim), rng.gen_range(0..dim));
        if a == b {
            m[a].iter_mut().for_each(|x| *x = -*x);
            continue;
        }
        let c = rng.gen_range(-1..=1);
        let row = m[b].clone();
        m[a].iter_mut().zip(&row).for_each(|(x, y)| *x += c * y);
    }
    m
}

fn random_points(rng: &mut ChaCha8Rng, dim: usize, bound: i64, count: usize) -> Vec<LatticeVector> {
    (0..count).map(|_| (0..dim).map(|_| rng.gen_range(-bound..=bound)).collect()).collect()
}

fn polar_involution(rng: &mut ChaCha8Rng, polygons: &[LatticePolytope]) -> Result<(), String> {
    let mut pool = polygons.to_vec();
    pool.push(named::cube());
    pool.push(named::octahedron());
    for case in 0..CASES {
        let base = pool.choose(rng).unwrap();
        let t = unimodular(rng, base.rank(), 4);
        let p = lib(base.transform(&t))?;
        let d = lib(p.polar_dual())?;
        ensure(d.is_reflexive() && lib(d.polar_dual())? == p, || format!("case {case}: {:?}", p.vertices()))?;
    }
    Ok(())
}

fn hull_and_faces(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..CASES {
        let (dim, bound, count) = if case % 4 == 3 { (3, 2, rng.gen_range(4..=7)) } else { (2, 3, rng.gen_range(3..=8)) };
        let pts = random_points(rng, dim, bound, count);
        let p = match convex_hull(&pts) {
            Ok(p) => p,
            Err(Error::Empty(_)) => continue,
            Err(e) => return Err(format!("case {case}: {e}")),
        };
        ensure(lib(convex_hull(p.vertices()))? == p, || format!("case {case}: hull of vertices differs"))?;
        ensure(lib(convex_hull(&p.lattice_points()))? == p, || format!("case {case}: hull of lattice points differs"))?;
        let d = p.dim();
        if d == 0 {
            continue;
        }
        let mut alt = 0i64;
        for l in 0..d {
            let f = lib(p.faces(l))?.len() as i64;
            alt += if l % 2 == 0 { f } else { -f };
        }
        let rhs = 1 - if d % 2 == 0 { 1 } else { -1 };
        ensure(alt == rhs, || format!("case {case}: face sum {alt} in dim {d}"))?;
    }
    Ok(())
}

/// Random invertible integer matrix.
fn gauge(rng: &mut ChaCha8Rng, r: usize) -> QMatrix {
    let rows = unimodular(rng, r, 3 * r + 2);
    QMatrix::from_i64(&rows)
}

fn small_matrix(rng: &mut ChaCha8Rng, r: usize) -> QMatrix {
    QMatrix::from_i64(&(0..r).map(|_| (0..r).map(|_| rng.gen_range(-2..=2)).collect()).collect::<Vec<_>>())
}

/// Integer weights summing to zero, not all zero.
fn balanced(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    loop {
        let mut g: Vec<i64> = (0..n - 1).map(|_| rng.gen_range(-3..=3)).collect();
        g.push(-g.iter().sum::<i64>());
        if g.iter().any(|&x| x != 0) {
            return g;
        }
    }
}

/// Strata complex whose structure maps are conjugates of one another:
/// increasing maps `P_J P_I^{-1}`, decreasing maps
/// `(−1)^{|J|} γ_b P_{J∖b} M P_J^{-1}` with `Σ γ_b = 0`. The sign makes the
/// Mayer–Vietoris-signed horizontal and anti-diagonal parts commute, and the
/// balanced weights make the self-loops cancel.
///
/// Degeneration strata carry degrees `0..=top`. Hybrid strata carry the
/// degrees `d` with `d + |I|` in a fixed window, which `ρ` and `ρ^∨` preserve.
fn consistent_complex(rng: &mut ChaCha8Rng, comps: usize, r: usize, top: i64, side: Side) -> StrataComplexData {
    let sets = nonempty_subsets(comps);
    let p: BTreeMap<Vec<usize>, (QMatrix, QMatrix)> = sets
        .iter()
        .map(|i| {
            let g = gauge(rng, r);
            let inv = g.inverse().expect("unimodular");
            (i.clone(), (g, inv))
        })
        .collect();
    let m = small_matrix(rng, r);
    let gamma = balanced(rng, comps);
    let base = comps as i64 + 1 + rng.gen_range(0..=1);
    let degrees = |i: &[usize]| -> Vec<i64> {
        match side {
            Side::Degeneration => (0..=top).collect(),
            Side::Hybrid => (base..=base + top).map(|s| s - i.len() as i64).collect(),
        }
    };
    let strata = sets
        .iter()
        .map(|i| (i.clone(), StratumCohomology { dims: degrees(i).into_iter().map(|k| (k, r)).collect(), ..Default::default() }))
        .collect();
    let (up, down) = match side {
        Side::Degeneration => (MapKind::Restrict, MapKind::Gysin),
        Side::Hybrid => (MapKind::RhoDual, MapKind::Rho),
    };
    let mut maps = Vec::new();
    for i in &sets {
        for c in (0..comps).filter(|c| !i.contains(c)) {
            let mut j = i.clone();
            j.push(c);
            j.sort_unstable();
            let mat = p[&j].0.mul(&p[i].1).unwrap();
            for k in degrees(i) {
                maps.push(StrataMap { from: i.clone(), to: j.clone(), kind: up, degree: k, matrix: mat.clone() });
            }
            let dm = p[i].0.mul(&m).unwrap().mul(&p[&j].1).unwrap().scale(&q(if j.len() % 2 == 0 { gamma[c] } else { -gamma[c] }));
            let targets = degrees(i);
            for k in degrees(&j).into_iter().filter(|k| targets.contains(&(k + down.degree_shift()))) {
                maps.push(StrataMap { from: j.clone(), to: i.clone(), kind: down, degree: k, matrix: dm.clone() });
            }
        }
    }
    StrataComplexData::new(comps - 1, strata, maps, None).expect("consistent data")
}

fn check_page(page: toric_mirror::Result<BigradedPage>, what: &str) -> Result<BigradedPage, String> {
    let page = page.map_err(|e| format!("{what}: {e}"))?;
    ensure(lib(page.d_squared_witness())?.is_none(), || format!("{what}: d^2 != 0"))?;
    let r = lib(e2_report(&page, None))?;
    ensure(r.euler_e1 == r.euler_e2, || format!("{what}: E1 euler {} vs E2 {}", r.euler_e1, r.euler_e2))?;
    Ok(page)
}

fn d_squared_and_euler(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..CASES {
        let comps = rng.gen_range(2..=4);
        let r = rng.gen_range(1..=2);
        let top = rng.gen_range(1..=3);
        let side = if case % 2 == 0 { Side::Degeneration } else { Side::Hybrid };
        let data = consistent_complex(rng, comps, r, top, side);
        let tag = format!("case {case} ({comps} components, {side:?})");
        match side {
            Side::Degeneration => {
                check_page(build_weight_e1(&data), &tag)?;
                check_page(build_monodromy_e1(&data), &tag)?;
            }
            Side::Hybrid => {
                check_page(build_g_flag_e1(&data), &tag)?;
                check_page(build_delta_e1(&data), &tag)?;
            }
        }
    }
    // Declared abutments of the bundled data.
    let deg = lib(StrataComplexData::from_json(&corpus("elliptic-deg-complex.json")))?;
    let r = lib(e2_report(&lib(build_monodromy_e1(&deg))?, deg.abutment.as_ref()))?;
    let declared: i64 = deg.abutment.as_ref().unwrap().iter().map(|(k, d)| if k % 2 == 0 { *d as i64 } else { -(*d as i64) }).sum();
    ensure(r.abutment_match == Some(true) && r.euler_e1 == declared, || format!("abutment: {r:?}"))?;
    Ok(())
}

fn random_strata(rng: &mut ChaCha8Rng, comps: usize, side: Side) -> StrataEuler {
    let entries = nonempty_subsets(comps).into_iter().map(|i| (i, rng.gen_range(-4..=4)));
    StrataEuler::new(comps - 1, comps, side, entries, false).unwrap()
}

fn relabel_invariance(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..CASES {
        let comps = rng.gen_range(2..=5);
        let deg = random_strata(rng, comps, Side::Degeneration);
        let hyb = random_strata(rng, comps, Side::Hybrid);
        let mut perm: Vec<usize> = (0..comps).collect();
        perm.shuffle(rng);
        let (d2, h2) = (lib(deg.relabel(&perm))?, lib(hyb.relabel(&perm))?);
        let before = (lib(euler_snc(&deg))?, lib(euler_smoothing(&deg))?, lib(euler_tilde_total(&hyb))?, lib(euler_glued_total(&hyb))?);
        let after = (lib(euler_snc(&d2))?, lib(euler_smoothing(&d2))?, lib(euler_tilde_total(&h2))?, lib(euler_glued_total(&h2))?);
        ensure(before == after, || format!("case {case}: {before:?} vs {after:?}"))?;
        let (a, b) = (lib(check_topological_mirror(&deg, &hyb))?, lib(check_topological_mirror(&d2, &h2))?);
        ensure(a.holds() == b.holds() && a.failing_strata().len() == b.failing_strata().len(), || format!("case {case}: verdicts differ"))?;
    }
    Ok(())
}

fn poincare_symmetry() -> Result<(), String> {
    let hyb = lib(StrataComplexData::from_json(&corpus("elliptic-hyb-complex.json")))?;
    let pd = check_poincare_duality(&hyb);
    ensure(pd.holds(), || format!("{:?}", pd.failures()))
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let polygons = reflexive_corpus();
    ensure(polygons.len() == 16, || format!("{} reflexive polygons", polygons.len()))?;
    polar_involution(&mut rng, &polygons)?;
    hull_and_faces(&mut rng)?;
    d_squared_and_euler(&mut rng)?;
    relabel_invariance(&mut rng)?;
    poincare_symmetry()?;
    Ok(format!("16 reflexive polygons, {CASES} cases per randomized suite, seed {SEED:#x}"))
}

// ---------------------------------------------------------------- criterion 7

fn negatives() -> Outcome {
    let g = lib(partition_from_value(&lib(parse_value(&corpus("square-diag.json")))?))?;
    let r = g.validate_semistable();
    ensure(!r.valid && r.violations.iter().any(|x| x.clause == "vertex-uniqueness"), || format!("{r:?}"))?;

    let deg = lib(StrataEuler::from_json(&corpus("elliptic-deg.json")))?;
    let mut doc: serde_json::Value = lib(parse_value(&corpus("elliptic-hyb.json")))?;
    let entry = doc["entries"].as_array_mut().unwrap().iter_mut().find(|e| e["I"] == serde_json::json!([1])).unwrap();
    entry["e"] = serde_json::Value::from(entry["e"].as_i64().unwrap() + 3);
    let hyb = lib(StrataEuler::from_json(&doc.to_string()))?;
    let m = lib(check_topological_mirror(&deg, &hyb))?;
    let named: Vec<Vec<usize>> = m.failing_strata().iter().map(|s| s.index_set.clone()).collect();
    ensure(!m.holds() && named == vec![vec![1]], || format!("failing strata {named:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let data = consistent_complex(&mut rng, 3, 2, 2, Side::Hybrid);
    ensure(build_delta_e1_with(&data, Twist::Alternating).is_ok(), || "alternating twist rejected".into())?;
    match build_delta_e1_with(&data, Twist::Constant) {
        Err(Error::Inconsistent(msg)) => {
            Ok(format!("diagonal square rejected, stratum [1] named, constant twist: {msg}"))
        }
        other => Err(format!("constant twist accepted: {:?}", other.map(|p| p.terms.len()))),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 7] = [
        ("square pipeline", square_pipeline, FAST),
        ("compactified fiber", givental_compactification, FAST),
        ("topological mirror", topological_mirror, FAST),
        ("spectral dimensions", spectral_dimensions, FAST),
        ("mirror P=W", mirror_pw, FAST),
        ("property suites", property_suites, SUITE),
        ("negative cases", negatives, FAST),
    ];
    let mut failed = 0;
    for (n, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let verdict = match (&out, took <= *limit) {
            (Ok(_), true) => "PASS",
            _ => "FAIL",
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        let detail = match out {
            Ok(s) if took <= *limit => s,
            Ok(_) => format!("took {took:?}, limit {limit:?}"),
            Err(e) => e,
        };
        println!("criterion {} {verdict} [{name}] {:.3}s: {detail}", n + 1, took.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
