//! Resolving object arguments.
//!
//! An object argument is one of
//! - `std:EXPR`: a standard lattice such as `std:twist(A2,-1)`;
//! - `json:TEXT`: the object spelled out inline;
//! - `-`: the object read from standard input;
//! - `PATH#NAME`: the object `NAME` of a workspace file;
//! - `PATH`: a file holding the bare object.

use std::io::Read;

use enriq_core::finite_form::{FiniteQuadraticSpace, Generatrix};
use enriq_core::json::{
    array, embedding_from_json, embedding_to_json, generatrix_from_json, generatrix_to_json, lattice_from_json,
    lattice_to_json, space_from_json,
};
use enriq_core::lattice::{construct_standard, GroupCaps, IntegerLattice, LatticeEmbedding};
use enriq_core::periods::{EmbeddingCatalog, PeriodPoint};
use enriq_core::{Error, Result};
use num_bigint::BigInt;
use serde_json::{Map, Value};

use crate::workspace::{Object, Workspace};

/// Every object loaded for a command, in canonical form, keyed by the
/// argument it came from. Its digest goes into the report.
#[derive(Default)]
pub struct Inputs {
    pub values: Map<String, Value>,
}

impl Inputs {
    pub fn record(&mut self, key: &str, v: Value) {
        self.values.insert(key.to_string(), v);
    }
}

enum Loaded {
    Value(Value),
    Object(Object),
}

fn read_text(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Malformed(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{path}: {e}")))
}

pub fn parse_json(text: &str, origin: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(format!("{origin}: {e}")))
}

fn load(spec: &str, caps: GroupCaps) -> Result<Loaded> {
    if let Some(text) = spec.strip_prefix("json:") {
        return Ok(Loaded::Value(parse_json(text, "inline object")?));
    }
    if spec != "-" {
        if let Some((path, name)) = spec.rsplit_once('#') {
            let ws = Workspace::from_json(&parse_json(&read_text(path)?, path)?, caps)?;
            return Ok(Loaded::Object(ws.get(name)?.clone()));
        }
    }
    Ok(Loaded::Value(parse_json(&read_text(spec)?, spec)?))
}

fn wrong_kind(spec: &str, expected: &str, found: &Object) -> Error {
    Error::Malformed(format!("{spec}: expected a {expected}, found a {}", found.kind()))
}

pub fn lattice(spec: &str, caps: GroupCaps) -> Result<IntegerLattice> {
    if let Some(expr) = spec.strip_prefix("std:") {
        return construct_standard(expr);
    }
    match load(spec, caps)? {
        Loaded::Value(v) => lattice_from_json(&v, spec),
        Loaded::Object(Object::Lattice(l)) => Ok(l),
        Loaded::Object(o) => Err(wrong_kind(spec, "lattice", &o)),
    }
}

pub fn embedding(spec: &str, caps: GroupCaps) -> Result<LatticeEmbedding> {
    match load(spec, caps)? {
        Loaded::Value(v) => embedding_from_json(&v, spec),
        Loaded::Object(Object::Embedding { embedding, .. }) => Ok(embedding),
        Loaded::Object(o) => Err(wrong_kind(spec, "embedding", &o)),
    }
}

pub fn generatrix(spec: &str, caps: GroupCaps) -> Result<Generatrix> {
    match load(spec, caps)? {
        Loaded::Value(v) => generatrix_from_json(&v, spec),
        Loaded::Object(Object::Generatrix(g)) => Ok(g),
        Loaded::Object(o) => Err(wrong_kind(spec, "generatrix", &o)),
    }
}

/// A JSON array of generatrices.
pub fn generatrix_list(spec: &str, caps: GroupCaps) -> Result<Vec<Generatrix>> {
    match load(spec, caps)? {
        Loaded::Value(v) => array(&v, spec)?
            .iter()
            .enumerate()
            .map(|(i, g)| generatrix_from_json(g, &format!("{spec}[{i}]")))
            .collect(),
        Loaded::Object(Object::Generatrix(g)) => Ok(vec![g]),
        Loaded::Object(o) => Err(wrong_kind(spec, "generatrix list", &o)),
    }
}

pub fn catalog(spec: &str, caps: GroupCaps) -> Result<EmbeddingCatalog> {
    match load(spec, caps)? {
        Loaded::Value(v) => EmbeddingCatalog::from_json(&v, spec, caps),
        Loaded::Object(Object::Catalog(c)) => Ok(*c),
        Loaded::Object(o) => Err(wrong_kind(spec, "catalog", &o)),
    }
}

pub fn period_point(spec: &str, caps: GroupCaps) -> Result<PeriodPoint> {
    match load(spec, caps)? {
        Loaded::Value(v) => PeriodPoint::from_json(&v, spec),
        Loaded::Object(Object::PeriodPoint(p)) => Ok(p),
        Loaded::Object(o) => Err(wrong_kind(spec, "period point", &o)),
    }
}

pub fn space(spec: &str) -> Result<FiniteQuadraticSpace> {
    match load(spec, GroupCaps::default())? {
        Loaded::Value(v) => space_from_json(&v, spec),
        Loaded::Object(Object::Generatrix(g)) => Ok(g.ambient().clone()),
        Loaded::Object(o) => Err(wrong_kind(spec, "quadratic space", &o)),
    }
}

/// `"1,0;0,1"`: rows separated by `;`, entries by `,`.
pub fn parse_rows(text: &str, what: &str) -> Result<Vec<Vec<i64>>> {
    let rows: Vec<Vec<i64>> = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Malformed(format!("{what}: '{}' is not an integer", x.trim())))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::Malformed(format!("{what}: rows have different lengths")));
    }
    Ok(rows)
}

pub fn parse_big_rows(text: &str, what: &str) -> Result<Vec<Vec<BigInt>>> {
    Ok(parse_rows(text, what)?
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect())
}

/// An embedding given either as an object argument or as vectors in an
/// ambient lattice.
pub fn marking(
    embedding_spec: Option<&str>,
    ambient_spec: Option<&str>,
    vectors: Option<&str>,
    caps: GroupCaps,
    inputs: &mut Inputs,
) -> Result<LatticeEmbedding> {
    let e = match (embedding_spec, ambient_spec, vectors) {
        (Some(spec), None, None) => embedding(spec, caps)?,
        (None, Some(spec), Some(vs)) => {
            let n = lattice(spec, caps)?;
            LatticeEmbedding::from_vectors(&n, &parse_big_rows(vs, "--vectors")?)?
        }
        _ => {
            return Err(Error::Malformed(
                "give either an embedding, or an ambient lattice together with --vectors".into(),
            ))
        }
    };
    inputs.record("embedding", embedding_to_json(&e));
    Ok(e)
}

pub fn record_lattice(inputs: &mut Inputs, key: &str, l: &IntegerLattice) {
    inputs.record(key, lattice_to_json(l));
}

pub fn record_generatrix(inputs: &mut Inputs, key: &str, g: &Generatrix) {
    inputs.record(key, generatrix_to_json(g));
}
