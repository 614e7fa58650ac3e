//! Subcommand bodies. Each returns a text rendering and a JSON value.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use toric_mirror::fan_toolkit::Fan;
use toric_mirror::io::{
    fan_to_json, nef_doc_from_value, parse_value, partition_from_value, polytope_from_value, polytope_name, polytope_to_json,
};
use toric_mirror::lattice_geometry::{named, LatticePolytope};
use toric_mirror::lg_models::{
    compactify_fiber, givental_hybrid, non_nef_split_fiber, pi_gamma_monomials, point_label, NablaData,
};
use toric_mirror::nef_partitions::{validate_nef, NefCheck};
use toric_mirror::partition_engine::{build_f_gamma, build_fibration_fans, central_frame, lifting_polyhedron, projection_check};
use toric_mirror::spectral_engine::{
    build_delta_e1, build_g_flag_e1, build_monodromy_e1, build_weight_e1, check_cubical_mirror, check_mirror_pw,
    check_poincare_duality, cubical_degeneration, cubical_hybrid, e2_report, E2Report, PwMode, StrataComplexData,
};
use toric_mirror::strata_calculus::{chart_intersections, check_topological_mirror, monodromy_relation_check, MonodromyDoc, StrataEuler};
use toric_mirror::Error;

use crate::{LgAction, Mode, PartitionAction, PolytopeAction, SsAction, WorkspaceConfig};

pub struct Report {
    pub text: String,
    pub json: Value,
    pub ok: bool,
}

pub enum Outcome {
    Done(Report),
    /// Input parsed but failed a structural or mathematical precondition.
    Invalid(String),
    /// Input could not be read or parsed.
    Malformed(String),
}

type Step<T> = Result<T, Outcome>;

fn from_lib(context: &str) -> impl Fn(Error) -> Outcome + '_ {
    move |e| match e {
        Error::Parse(msg) => Outcome::Malformed(format!("{context}: {msg}")),
        other => Outcome::Invalid(format!("{context}: {other}")),
    }
}

fn finish(r: Step<Report>) -> Outcome {
    r.map_or_else(|e| e, Outcome::Done)
}

fn read(path: &Path) -> Step<String> {
    fs::read_to_string(path).map_err(|e| Outcome::Malformed(format!("{}: {e}", path.display())))
}

fn read_value(path: &Path) -> Step<Value> {
    parse_value(&read(path)?).map_err(from_lib(&path.display().to_string()))
}

fn inputs(cfg: &WorkspaceConfig, n: usize) -> Step<&[std::path::PathBuf]> {
    if cfg.inputs.len() != n {
        return Err(Outcome::Invalid(format!("expected {n} input file(s), got {}", cfg.inputs.len())));
    }
    Ok(&cfg.inputs)
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn points(v: &[Vec<i64>]) -> String {
    v.iter().map(|p| point_label(p)).collect::<Vec<_>>().join(" ")
}

fn known_name(p: &LatticePolytope) -> Option<&'static str> {
    ["square", "diamond", "big-square", "hexagon", "cube", "octahedron"]
        .into_iter()
        .find(|n| named::by_name(n).is_some_and(|q| q.vertices() == p.vertices()))
}

pub fn polytope(cfg: &WorkspaceConfig, action: PolytopeAction) -> Outcome {
    finish((|| {
        let path = &inputs(cfg, 1)?[0];
        let ctx = path.display().to_string();
        let v = read_value(path)?;
        let p = polytope_from_value(&v).map_err(from_lib(&ctx))?;
        let name = polytope_name(&v);
        let report = match action {
            PolytopeAction::Dual => {
                let d = p.polar_dual().map_err(from_lib(&ctx))?;
                let dname = known_name(&d).map_or_else(|| format!("{name}-dual"), str::to_string);
                let doc = polytope_to_json(&d, &dname);
                Report { text: format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")), json: doc, ok: true }
            }
            PolytopeAction::Reflexive => {
                let why = p.reflexivity_diagnostic();
                let mut text = format!("{}\n", why.is_none());
                if let Some(w) = &why {
                    let _ = writeln!(text, "reason: {w}");
                }
                Report { text, json: json!({"reflexive": why.is_none(), "reason": why}), ok: true }
            }
            PolytopeAction::Points => {
                let all = p.lattice_points();
                let interior = p.interior_lattice_points();
                let text = format!(
                    "lattice points ({}): {}\ninterior{} ({}): {}\n",
                    all.len(),
                    points(&all),
                    if interior.relative { " (relative)" } else { "" },
                    interior.points.len(),
                    points(&interior.points)
                );
                let json = json!({"points": all, "interior": interior.points, "relative": interior.relative});
                Report { text, json, ok: true }
            }
            PolytopeAction::Faces => {
                let mut text = String::new();
                let mut by_dim = Vec::new();
                for l in 0..=p.dim() {
                    let faces = p.faces(l).map_err(from_lib(&ctx))?;
                    let sets: Vec<Vec<Vec<i64>>> =
                        faces.iter().map(|f| f.vertices.iter().map(|&i| p.vertices()[i].clone()).collect()).collect();
                    let _ = writeln!(text, "dim {l}: {} face(s)", sets.len());
                    for s in &sets {
                        let _ = writeln!(text, "  {}", points(s));
                    }
                    by_dim.push(json!({"dim": l, "faces": sets}));
                }
                Report { text, json: json!({"faces": by_dim}), ok: true }
            }
            PolytopeAction::Smooth => {
                let (s, m) = (p.is_simplicial(), p.is_smooth());
                Report { text: format!("simplicial: {s}\nsmooth: {m}\n"), json: json!({"simplicial": s, "smooth": m}), ok: true }
            }
        };
        Ok(report)
    })())
}

fn fan_text(out: &mut String, label: &str, f: &Fan) {
    let _ = writeln!(out, "{label}: {} rays, {} maximal cones", f.rays.len(), f.maximal_cones.len());
    let _ = writeln!(out, "  rays: {}", points(&f.rays));
}

pub fn partition(cfg: &WorkspaceConfig, action: PartitionAction) -> Outcome {
    finish((|| {
        let path = &inputs(cfg, 1)?[0];
        let ctx = path.display().to_string();
        let g = partition_from_value(&read_value(path)?).map_err(from_lib(&ctx))?;
        if g.host().rank() > cfg.rank_limit {
            return Err(Outcome::Invalid(format!("rank {} exceeds the rank limit {}", g.host().rank(), cfg.rank_limit)));
        }
        let report = match action {
            PartitionAction::Validate => {
                let r = g.validate_semistable();
                let mut text = if r.valid { "valid\n".to_string() } else { "invalid\n".to_string() };
                for v in &r.violations {
                    let _ = writeln!(
                        text,
                        "  {}: sigma = {{{}}} in tau = {{{}}}: expected {}, found {}",
                        v.clause,
                        points(&v.sigma),
                        points(&v.tau),
                        v.expected,
                        v.found
                    );
                }
                let _ = writeln!(text, "simplicial pieces: {:?}", r.simplicial_pieces);
                Report { text, json: to_json(&r), ok: r.valid }
            }
            PartitionAction::DualComplex => {
                let k = g.dual_complex();
                let text = format!("vertices: {}\ndimension: {}\nsimplices: {:?}\n", k.vertex_count, k.dim(), k.simplices);
                Report { text, json: json!({"vertex_count": k.vertex_count, "dim": k.dim(), "simplices": k.simplices}), ok: true }
            }
            PartitionAction::Lift => {
                let f = build_f_gamma(&g, cfg.bound).map_err(from_lib(&ctx))?;
                let lift = lifting_polyhedron(&g, &f);
                let check = projection_check(&g, &f).map_err(from_lib(&ctx))?;
                let mut text = String::from("F_Gamma pieces (m_i, c_i):\n");
                for (i, (m, c)) in f.functionals.iter().enumerate() {
                    let _ = writeln!(text, "  piece {i}: m = {}, c = {c}", point_label(m));
                }
                let _ = writeln!(text, "lifted inequalities <n, (y,x)> >= -offset:");
                for ineq in &lift.inequalities {
                    let _ = writeln!(text, "  n = {}, offset = {}", point_label(&ineq.normal), ineq.offset);
                }
                let _ = writeln!(text, "recession rays: {}", points(&lift.recession_rays));
                let _ = writeln!(text, "bounded faces: {}, projection failures: {}", check.bounded_faces, check.failures.len());
                let ok = check.failures.is_empty();
                Report { text, json: json!({"f_gamma": to_json(&f), "lifting": to_json(&lift), "projection": to_json(&check)}), ok }
            }
            PartitionAction::Frame => {
                let fr = central_frame(&g).map_err(from_lib(&ctx))?;
                let text = format!("l = {}\nL basis: {}\nv: {}\n", fr.l, points(&fr.l_basis), points(&fr.v));
                Report { text, json: to_json(&fr), ok: true }
            }
            PartitionAction::Fans => {
                let fr = central_frame(&g).map_err(from_lib(&ctx))?;
                let fans = build_fibration_fans(&g, &fr).map_err(from_lib(&ctx))?;
                let pi = pi_gamma_monomials(&fans.sigma_prime, &fr).map_err(from_lib(&ctx))?;
                let mut text = String::new();
                fan_text(&mut text, "Sigma_Delta", &fans.sigma_delta);
                fan_text(&mut text, "Sigma'", &fans.sigma_prime);
                fan_text(&mut text, "Sigma_v", &fans.sigma_v);
                fan_text(&mut text, "Sigma_Gamma", &fans.sigma_gamma);
                fan_text(&mut text, "Sigma'_Gamma", &fans.sigma_prime_gamma);
                let _ = writeln!(text, "pi_Gamma = {pi}");
                let json = json!({
                    "sigma_delta": fan_to_json(&fans.sigma_delta),
                    "sigma_prime": fan_to_json(&fans.sigma_prime),
                    "sigma_v": fan_to_json(&fans.sigma_v),
                    "sigma_gamma": fan_to_json(&fans.sigma_gamma),
                    "sigma_prime_gamma": fan_to_json(&fans.sigma_prime_gamma),
                    "pi_gamma": to_json(&pi),
                    "pi_gamma_text": pi.to_string(),
                });
                Report { text, json, ok: true }
            }
        };
        Ok(report)
    })())
}

fn parse_split(s: &str) -> Step<(usize, usize)> {
    let bad = || Outcome::Malformed(format!("--split expects k:r, got {s:?}"));
    let (k, r) = s.split_once(':').ok_or_else(bad)?;
    Ok((k.trim().parse().map_err(|_| bad())?, r.trim().parse().map_err(|_| bad())?))
}

pub fn lg(cfg: &WorkspaceConfig, action: LgAction, split: Option<&str>, lambda: Option<&str>) -> Outcome {
    finish((|| {
        let path = &inputs(cfg, 1)?[0];
        let ctx = path.display().to_string();
        let doc = nef_doc_from_value(&read_value(path)?).map_err(from_lib(&ctx))?;
        let nef = match validate_nef(&doc.host, &doc.parts).map_err(from_lib(&ctx))? {
            NefCheck::Valid(n) => n,
            NefCheck::Invalid(f) => {
                let text = format!("not a nef partition: part {}: {}\n", f.part, f.reason);
                return Ok(Report { text, json: to_json(&f), ok: false });
            }
        };
        let parts = doc.parts.len();
        let (k, r) = match split {
            Some(s) => parse_split(s)?,
            None => (parts - 1, 1),
        };
        let model = givental_hybrid(&nef, k, r).map_err(from_lib(&ctx))?;
        let potentials = doc.split_groups.as_ref().map_or(r, Vec::len);
        let names: Vec<String> = match lambda {
            Some(l) => l.split(',').map(|s| s.trim().to_string()).collect(),
            None if potentials == 1 => vec!["lambda".to_string()],
            None => (1..=potentials).map(|j| format!("lambda_{j}")).collect(),
        };
        let report = match action {
            LgAction::Emit => {
                let mut text = String::new();
                for (i, c) in model.constraints.iter().enumerate() {
                    let _ = writeln!(text, "constraint {}: {c} = 0", i + 1);
                }
                for (j, w) in model.potentials.iter().enumerate() {
                    let _ = writeln!(text, "potential {}: W = {w}", j + 1);
                }
                let json = json!({
                    "k": model.k, "r": model.r,
                    "constraints": model.constraints.iter().map(to_json).collect::<Vec<_>>(),
                    "potentials": model.potentials.iter().map(to_json).collect::<Vec<_>>(),
                });
                Report { text, json, ok: true }
            }
            LgAction::Compactify => {
                let data = NablaData::from_nef(&nef).map_err(from_lib(&ctx))?;
                let (eqs, banner) = match &doc.split_groups {
                    Some(groups) => (
                        non_nef_split_fiber(&model, &data, groups, &names).map_err(from_lib(&ctx))?,
                        Some("non-nef split: mirror status open"),
                    ),
                    None => (compactify_fiber(&model, &data, &names).map_err(from_lib(&ctx))?, None),
                };
                let mut text = String::new();
                if let Some(b) = banner {
                    let _ = writeln!(text, "# {b}");
                }
                for e in &eqs {
                    let _ = writeln!(text, "{e}");
                }
                let ok = eqs.iter().all(|e| e.exponents_consistent() && e.degree_consistent());
                if !ok {
                    let _ = writeln!(text, "# degree check failed");
                }
                let json = json!({
                    "banner": banner,
                    "rays": data.rays,
                    "equations": eqs.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
                });
                Report { text, json, ok }
            }
        };
        Ok(report)
    })())
}

fn signed_text(n: usize, x: i64) -> String {
    match (n % 2 == 1, x >= 0) {
        (false, _) => x.to_string(),
        (true, true) => format!("-{x}"),
        (true, false) => (-x).to_string(),
    }
}

pub fn euler_check(cfg: &WorkspaceConfig) -> Outcome {
    finish((|| {
        let files = inputs(cfg, 2)?;
        let load = |p: &Path| StrataEuler::from_json(&read(p)?).map_err(from_lib(&p.display().to_string()));
        let (deg, hyb) = (load(&files[0])?, load(&files[1])?);
        let r = check_topological_mirror(&deg, &hyb).map_err(from_lib("euler check"))?;
        let n = deg.n;
        let verdict = if r.holds() { "PASS" } else { "FAIL" };
        let mut text = format!(
            "topological mirror: {verdict} ({} = {}; {} = {})\n",
            r.e_y,
            signed_text(n, r.e_x),
            r.e_y_tilde,
            signed_text(n, r.e_x_c)
        );
        let _ = writeln!(text, "e(X) = {}, e(X_c) = {}, e(Y) = {}, e(Y~) = {}", r.e_x, r.e_x_c, r.e_y, r.e_y_tilde);
        let _ = writeln!(
            text,
            "literal reading e(Y~) = (-1)^n e(X): {}",
            if r.compact_identity_literal { "holds" } else { "fails" }
        );
        for s in &r.strata {
            let _ = writeln!(
                text,
                "  I = {:?}: e(X_I) = {}, e(Y_I, Y_I,sm) = {}: {}",
                s.index_set,
                s.e_x,
                s.e_relative,
                if s.holds { "ok" } else { "FAIL" }
            );
        }
        Ok(Report { text, json: to_json(&r), ok: r.holds() })
    })())
}

pub fn euler_charts(n: usize) -> Outcome {
    let charts = chart_intersections(n);
    let mut text = String::new();
    for c in &charts {
        let _ = writeln!(text, "I = {:?}: (S^1)^{} x D^{}", c.index_set, c.torus_rank, c.disk_rank);
    }
    Outcome::Done(Report { text, json: to_json(&charts), ok: true })
}

pub fn euler_monodromy(cfg: &WorkspaceConfig) -> Outcome {
    finish((|| {
        let path = &inputs(cfg, 1)?[0];
        let ctx = path.display().to_string();
        let doc = MonodromyDoc::from_json(&read(path)?).map_err(from_lib(&ctx))?;
        let r = monodromy_relation_check(&doc).map_err(from_lib(&ctx))?;
        let mut text = format!("monodromy relation: {}\n", if r.holds() { "PASS" } else { "FAIL" });
        for v in &r.checked {
            let _ = writeln!(text, "  ({}, {}): {}", v.i, v.j, if v.holds { "ok" } else { "FAIL" });
        }
        for (i, j) in &r.unmatched {
            let _ = writeln!(text, "  ({i}, {j}): no matching single-loop representation");
        }
        Ok(Report { text, json: to_json(&r), ok: r.holds() })
    })())
}

fn e2_text(r: &E2Report, weight_rows: bool) -> String {
    let mut text = String::new();
    if weight_rows {
        for (&k, _) in &r.totals {
            let mut row: Vec<(i64, usize)> = r.entries.iter().filter(|e| e.total_degree == k).map(|e| (e.q, e.dim)).collect();
            row.sort_unstable();
            let parts: Vec<String> = row.iter().map(|(q, d)| format!("w{q}={d}")).collect();
            let _ = writeln!(text, "H^{k}: {}", parts.join(" "));
        }
    } else {
        for e in &r.entries {
            let _ = writeln!(text, "l={} a={}: {}", e.p, e.q, e.dim);
        }
        let totals: Vec<String> = r.totals.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        let _ = writeln!(text, "totals by degree: {}", totals.join(" "));
    }
    let _ = writeln!(text, "euler E1 = {}, E2 = {}", r.euler_e1, r.euler_e2);
    if let Some(m) = r.abutment_match {
        let _ = writeln!(text, "abutment: {}", if m { "match" } else { "MISMATCH" });
    }
    if r.degenerates_for_degree_reasons() {
        let _ = writeln!(text, "d2: vanishes for degree reasons");
    } else {
        let _ = writeln!(text, "d2 candidates: {:?}", r.d2_candidates);
    }
    if !r.flags.is_empty() {
        let _ = writeln!(text, "flags: {}", r.flags.iter().cloned().collect::<Vec<_>>().join(", "));
    }
    text
}

pub fn ss(cfg: &WorkspaceConfig, action: SsAction, mode: Mode, label: i64) -> Outcome {
    finish((|| {
        let load = |p: &Path| StrataComplexData::from_json(&read(p)?).map_err(from_lib(&p.display().to_string()));
        let report = match action {
            SsAction::Weight | SsAction::Monodromy | SsAction::Gflag | SsAction::Delta => {
                let path = &inputs(cfg, 1)?[0];
                let data = load(path)?;
                let ctx = path.display().to_string();
                let page = match action {
                    SsAction::Weight => build_weight_e1(&data),
                    SsAction::Monodromy => build_monodromy_e1(&data),
                    SsAction::Gflag => build_g_flag_e1(&data),
                    _ => build_delta_e1(&data),
                }
                .map_err(from_lib(&ctx))?;
                // The weight page abuts to the central fiber, the others to the smoothing.
                let abutment = if matches!(action, SsAction::Weight) { None } else { data.abutment.as_ref() };
                let r = e2_report(&page, abutment).map_err(from_lib(&ctx))?;
                let ok = r.abutment_match != Some(false) && r.euler_e1 == r.euler_e2;
                let text = e2_text(&r, matches!(action, SsAction::Weight | SsAction::Monodromy));
                Report { text, json: to_json(&r), ok }
            }
            SsAction::Pw => {
                let files = inputs(cfg, 2)?;
                let (deg, hyb) = (load(&files[0])?, load(&files[1])?);
                let m = match mode {
                    Mode::Smoothing => PwMode::Smoothing,
                    Mode::CentralFiber => PwMode::CentralFiber,
                };
                let r = check_mirror_pw(&deg, &hyb, m).map_err(from_lib("pw"))?;
                let mut text = format!("{:>4} {:>4} {:>6} {:>6}\n", "a", "l", "B", "A");
                for row in &r.rows {
                    let a = row.a.map_or_else(|| "*".to_string(), |a| a.to_string());
                    let mark = if row.holds { "" } else { "  FAIL" };
                    let _ = writeln!(text, "{a:>4} {:>4} {:>6} {:>6}{mark}", row.l, row.b_side, row.a_side);
                }
                if r.total_dimension_mode {
                    let _ = writeln!(text, "note: no Hodge labels, compared in total-dimension mode");
                }
                let _ = writeln!(text, "P=W: {}", if r.holds() { "PASS" } else { "FAIL" });
                Report { text, json: to_json(&r), ok: r.holds() }
            }
            SsAction::Pd => {
                let path = &inputs(cfg, 1)?[0];
                let r = check_poincare_duality(&load(path)?);
                let mut text = String::new();
                for d in &r.dims {
                    let _ = writeln!(
                        text,
                        "I = {:?}: H^{} = {} vs H^{} = {}{}",
                        d.stratum,
                        d.degree,
                        d.dim,
                        d.dual_degree,
                        d.dual_dim,
                        if d.holds { "" } else { "  FAIL" }
                    );
                }
                for m in &r.maps {
                    let _ = writeln!(
                        text,
                        "rho_dual from |I| = {}: {} map(s), sign {}",
                        m.level,
                        m.checked,
                        m.sign.map_or_else(|| "none fits".to_string(), |s| s.to_string())
                    );
                }
                let _ = writeln!(text, "Poincare duality: {}", if r.holds() { "PASS" } else { "FAIL" });
                Report { text, json: to_json(&r), ok: r.holds() }
            }
            SsAction::Cubical => {
                let files = inputs(cfg, 2)?;
                let (deg, hyb) = (load(&files[0])?, load(&files[1])?);
                let b = cubical_degeneration(&deg, label).map_err(from_lib("cubical"))?;
                let a = cubical_hybrid(&hyb, label).map_err(from_lib("cubical"))?;
                let r = check_cubical_mirror(&b, &a).map_err(from_lib("cubical"))?;
                let mut text = String::new();
                for d in &r.dims {
                    let _ = writeln!(text, "I = {:?}: {} vs {}{}", d.index_set, d.b_side, d.a_side, if d.holds { "" } else { "  FAIL" });
                }
                for m in &r.ranks {
                    let _ = writeln!(
                        text,
                        "{:?} -> {:?}: rank {} vs {}{}",
                        m.from,
                        m.to,
                        m.b_rank,
                        m.a_rank,
                        if m.holds { "" } else { "  FAIL" }
                    );
                }
                let _ = writeln!(text, "cubical a={label}: {}", if r.holds() { "PASS" } else { "FAIL" });
                Report { text, json: to_json(&r), ok: r.holds() }
            }
        };
        Ok(report)
    })())
}
