//! JSON documents for matrices, Siegel objects, `P`-tables, lattices and
//! Laurent series. Field elements are always strings in the canonical
//! grammar; sizes are integers.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::arith::laurent::LaurentSeries;
use crate::arith::parse::{parse_elem, ParseError};
use crate::arith::{Elem, FieldSpec};
use crate::lattice::{make_jordan_matrix, LatticeError, LatticeInstance};
use crate::linalg::Mat;
use crate::partition::{jordan_data, PartitionError, PartitionWithZeroes};
use crate::siegel::{PTable, SiegelError, SiegelObject, TetraIndex};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Format(String),
    #[error("cannot parse {text:?}: {source}")]
    Elem { text: String, source: ParseError },
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Siegel(#[from] SiegelError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

fn bad(msg: impl Into<String>) -> IoError {
    IoError::Format(msg.into())
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value, IoError> {
    obj.get(key).ok_or_else(|| bad(format!("missing key {key:?}")))
}

fn usize_of(v: &Value, what: &str) -> Result<usize, IoError> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| bad(format!("{what} must be a non-negative integer")))
}

fn usize_list(v: &Value, what: &str) -> Result<Vec<usize>, IoError> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be an array")))?
        .iter()
        .map(|x| usize_of(x, what))
        .collect()
}

pub fn spec_from_json(v: &Value) -> Result<Arc<FieldSpec>, IoError> {
    Ok(Arc::new(serde_json::from_value(v.clone())?))
}

pub fn elem_to_json(spec: &FieldSpec, e: &Elem) -> Value {
    Value::String(spec.format(e))
}

pub fn elem_from_json(spec: &FieldSpec, v: &Value) -> Result<Elem, IoError> {
    let text = v.as_str().ok_or_else(|| bad("field elements must be strings"))?;
    parse_elem(spec, text).map_err(|source| IoError::Elem {
        text: text.to_string(),
        source,
    })
}

pub fn vector_to_json(spec: &FieldSpec, v: &[Elem]) -> Value {
    Value::Array(v.iter().map(|e| elem_to_json(spec, e)).collect())
}

pub fn vector_from_json(spec: &FieldSpec, v: &Value, len: usize) -> Result<Vec<Elem>, IoError> {
    let items = v.as_array().ok_or_else(|| bad("vectors must be arrays"))?;
    if items.len() != len {
        return Err(bad(format!("vector of length {}, expected {len}", items.len())));
    }
    items.iter().map(|x| elem_from_json(spec, x)).collect()
}

/// Rows of entry strings.
pub fn mat_to_json(m: &Mat) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_to_json(m.spec(), m.row(i))).collect())
}

/// Reads a matrix of known size; an empty array is any matrix with no rows.
pub fn mat_from_json(spec: &Arc<FieldSpec>, v: &Value, rows: usize, cols: usize) -> Result<Mat, IoError> {
    let items = v.as_array().ok_or_else(|| bad("matrices must be arrays of rows"))?;
    if items.len() != rows {
        return Err(bad(format!("matrix has {} rows, expected {rows}", items.len())));
    }
    let data = items
        .iter()
        .map(|row| vector_from_json(spec, row, cols))
        .collect::<Result<_, _>>()?;
    Ok(Mat::from_rows(spec.clone(), cols, data).map_err(SiegelError::from)?)
}

fn parse_key(key: &str) -> Result<(usize, usize, usize, usize), IoError> {
    let parts: Vec<usize> = key
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| bad(format!("bad index key {key:?}"))))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [u, v, y, z] => Ok((u, v, y, z)),
        _ => Err(bad(format!("index key {key:?} needs four components"))),
    }
}

pub fn siegel_to_json(s: &SiegelObject) -> Value {
    let entries: Map<String, Value> = s.entries().map(|(idx, m)| (idx.to_string(), mat_to_json(m))).collect();
    json!({
        "field": s.spec().as_ref(),
        "shape": s.shape(),
        "entries": entries,
    })
}

pub fn siegel_from_json(v: &Value) -> Result<SiegelObject, IoError> {
    let spec = spec_from_json(field(v, "field")?)?;
    let shape = usize_list(field(v, "shape")?, "shape")?;
    if shape.len() < 2 {
        return Err(bad("shape needs at least two segments"));
    }
    let raw = field(v, "entries")?.as_object().ok_or_else(|| bad("entries must be an object"))?;
    let mut entries = BTreeMap::new();
    for (key, mat) in raw {
        let (u, v, y, z) = parse_key(key)?;
        let idx = TetraIndex::new(u, y, z);
        if u == 0 || v + 1 != u || !idx.is_valid(shape.len() - 1) {
            return Err(bad(format!("{key:?} is not a tetrahedral index for this shape")));
        }
        entries.insert(idx, mat_from_json(&spec, mat, shape[u - 1], shape[y - 1])?);
    }
    Ok(SiegelObject::new(spec, shape, entries)?)
}

pub fn ptable_to_json(p: &PTable) -> Value {
    let entries: Map<String, Value> = p
        .entries()
        .map(|((u, v, y, z), m)| (format!("{u},{v},{y},{z}"), mat_to_json(m)))
        .collect();
    json!({
        "field": p.spec().as_ref(),
        "shape": p.shape(),
        "entries": entries,
    })
}

pub fn ptable_from_json(v: &Value) -> Result<PTable, IoError> {
    let spec = spec_from_json(field(v, "field")?)?;
    let shape = usize_list(field(v, "shape")?, "shape")?;
    let raw = field(v, "entries")?.as_object().ok_or_else(|| bad("entries must be an object"))?;
    let mut entries = BTreeMap::new();
    for (key, mat) in raw {
        let (u, v, y, z) = parse_key(key)?;
        if u == 0 || u > shape.len() || y == 0 || y > shape.len() {
            return Err(bad(format!("index {key:?} out of range")));
        }
        entries.insert((u, v, y, z), mat_from_json(&spec, mat, shape[u - 1], shape[y - 1])?);
    }
    Ok(PTable::from_entries(spec, shape, entries)?)
}

/// `{"field", "m", "d", "basis"}` plus `"operator"` when `N` is not the
/// Jordan matrix.
pub fn lattice_to_json(l: &LatticeInstance) -> Value {
    let spec = l.spec();
    let mut out = Map::new();
    out.insert("field".into(), serde_json::to_value(spec.as_ref()).expect("field specs serialize"));
    out.insert("m".into(), json!(l.m()));
    out.insert("d".into(), json!(l.jordan().d().parts()));
    out.insert(
        "basis".into(),
        Value::Array(l.basis().iter().map(|v| vector_to_json(spec, v)).collect()),
    );
    if *l.operator() != make_jordan_matrix(spec, l.jordan()) {
        out.insert("operator".into(), mat_to_json(l.operator()));
    }
    Value::Object(out)
}

pub fn lattice_from_json(v: &Value) -> Result<LatticeInstance, IoError> {
    let spec = spec_from_json(field(v, "field")?)?;
    let m = usize_of(field(v, "m")?, "m")?;
    let d = PartitionWithZeroes::new(usize_list(field(v, "d")?, "d")?)?;
    let jordan = jordan_data(&d, m)?;
    let n = jordan.n();
    let basis = field(v, "basis")?
        .as_array()
        .ok_or_else(|| bad("basis must be an array of vectors"))?
        .iter()
        .map(|x| vector_from_json(&spec, x, n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match v.get("operator") {
        Some(op) => {
            let op = mat_from_json(&spec, op, n, n)?;
            LatticeInstance::with_operator(spec, jordan, op, basis)?
        }
        None => LatticeInstance::new(spec, jordan, basis)?,
    })
}

/// Coefficients of `N^{-kappa}, ..., N^{truncation}`.
pub fn laurent_to_json(s: &LaurentSeries) -> Value {
    let spec = s.field();
    let coefficients: Vec<Value> = (-s.kappa()..=s.truncation())
        .map(|j| Value::String(spec.format(s.coeff(j).expect("stored exponent").elem())))
        .collect();
    json!({
        "field": spec.as_ref(),
        "kappa": s.kappa(),
        "truncation": s.truncation(),
        "coefficients": coefficients,
    })
}

pub fn laurent_from_json(v: &Value) -> Result<LaurentSeries, IoError> {
    let spec = spec_from_json(field(v, "field")?)?;
    let kappa = field(v, "kappa")?.as_i64().ok_or_else(|| bad("kappa must be an integer"))?;
    let truncation = field(v, "truncation")?
        .as_i64()
        .ok_or_else(|| bad("truncation must be an integer"))?;
    if kappa < 0 || truncation < -kappa - 1 {
        return Err(bad("kappa and truncation are inconsistent"));
    }
    let coeffs = vector_from_json(&spec, field(v, "coefficients")?, (truncation + kappa + 1) as usize)?;
    if kappa > 0 && coeffs[0].is_zero() {
        return Err(bad("the leading coefficient of a pole must be nonzero"));
    }
    Ok(LaurentSeries::from_coeffs(spec, -kappa, coeffs))
}

/// Pretty-printed document with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
