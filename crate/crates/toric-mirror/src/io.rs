//! JSON documents for polytopes, fans, partitions and nef partitions.
//!
//! Strata, monodromy, strata-complex and cubical documents are parsed by
//! their owning modules.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fan_toolkit::{Cone, Fan};
use crate::lattice_geometry::{convex_hull_in, named, Ambient, LatticePolytope, LatticeVector};
use crate::partition_engine::SemistablePartition;

fn parse_err(what: &str, e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{what}: {e}"))
}

pub fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err("invalid JSON", e))
}

fn vectors(v: &Value, what: &str) -> Result<Vec<LatticeVector>> {
    serde_json::from_value(v.clone()).map_err(|e| parse_err(what, e))
}

/// `{"name", "rank", "vertices", "ambient"?}`, or a bundled polytope name.
pub fn polytope_from_value(v: &Value) -> Result<LatticePolytope> {
    if let Some(name) = v.as_str() {
        return named::by_name(name).ok_or_else(|| Error::Parse(format!("unknown polytope name {name:?}")));
    }
    let rank = v.get("rank").and_then(Value::as_u64).ok_or_else(|| Error::Parse("polytope needs an integer \"rank\"".into()))?;
    let vertices = vectors(v.get("vertices").unwrap_or(&Value::Null), "polytope \"vertices\"")?;
    if let Some(bad) = vertices.iter().position(|x| x.len() as u64 != rank) {
        return Err(Error::Parse(format!("vertex {bad} does not have {rank} coordinates")));
    }
    let ambient = match v.get("ambient").and_then(Value::as_str) {
        None | Some("M") => Ambient::M,
        Some("N") => Ambient::N,
        Some(other) => return Err(Error::Parse(format!("unknown ambient {other:?}"))),
    };
    convex_hull_in(&vertices, ambient)
}

pub fn polytope_from_json(text: &str) -> Result<LatticePolytope> {
    polytope_from_value(&parse_value(text)?)
}

pub fn polytope_name(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        _ => v.get("name").and_then(Value::as_str).unwrap_or("polytope").to_string(),
    }
}

pub fn polytope_to_json(p: &LatticePolytope, name: &str) -> Value {
    let facets: Vec<Value> = p.facets().iter().map(|f| json!({"normal": f.normal, "offset": f.offset})).collect();
    json!({
        "name": name,
        "rank": p.rank(),
        "ambient": p.ambient(),
        "vertices": p.vertices(),
        "facets": facets,
    })
}

pub fn fan_to_json(f: &Fan) -> Value {
    let cones: Vec<&Vec<LatticeVector>> = f.maximal_cones.iter().map(|c| &c.rays).collect();
    json!({"rank": f.ambient_rank, "rays": f.rays, "maximal_cones": cones})
}

pub fn fan_from_value(v: &Value) -> Result<Fan> {
    let rank = v.get("rank").and_then(Value::as_u64).ok_or_else(|| Error::Parse("fan needs an integer \"rank\"".into()))? as usize;
    let cones: Vec<Vec<LatticeVector>> = serde_json::from_value(v.get("maximal_cones").cloned().unwrap_or(Value::Null))
        .map_err(|e| parse_err("fan \"maximal_cones\"", e))?;
    let cones = cones.iter().map(|c| Cone::new(c, rank)).collect::<Result<Vec<_>>>()?;
    Fan::new(rank, cones)
}

/// `{"polytope": name | inline, "pieces": [[[int]]]}`.
pub fn partition_from_value(v: &Value) -> Result<SemistablePartition> {
    let host = polytope_from_value(v.get("polytope").ok_or_else(|| Error::Parse("partition needs \"polytope\"".into()))?)?;
    let pieces: Vec<Vec<LatticeVector>> =
        serde_json::from_value(v.get("pieces").cloned().unwrap_or(Value::Null)).map_err(|e| parse_err("partition \"pieces\"", e))?;
    SemistablePartition::from_vertices(host, &pieces)
}

/// Contents of a nef-partition document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NefDoc {
    pub host: LatticePolytope,
    pub parts: Vec<Vec<usize>>,
    /// Groups of lattice points splitting the last part into several potentials.
    pub split_groups: Option<Vec<Vec<LatticeVector>>>,
}

/// `{"polytope", "parts", "split_groups"?}`; a bare polytope document is
/// read as the single-part partition.
pub fn nef_doc_from_value(v: &Value) -> Result<NefDoc> {
    let (host, parts) = match v.get("parts") {
        Some(parts) => {
            let host = polytope_from_value(v.get("polytope").ok_or_else(|| Error::Parse("nef document needs \"polytope\"".into()))?)?;
            let parts: Vec<Vec<usize>> = serde_json::from_value(parts.clone()).map_err(|e| parse_err("nef \"parts\"", e))?;
            (host, parts)
        }
        None => {
            let host = polytope_from_value(v)?;
            let all = (0..host.vertices().len()).collect();
            (host, vec![all])
        }
    };
    let split_groups = v.get("split_groups").map(vectors_nested).transpose()?;
    Ok(NefDoc { host, parts, split_groups })
}

fn vectors_nested(v: &Value) -> Result<Vec<Vec<LatticeVector>>> {
    serde_json::from_value(v.clone()).map_err(|e| parse_err("\"split_groups\"", e))
}
