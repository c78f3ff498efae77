//! Workspace files: a versioned, named collection of objects.
//!
//! ```json
//! {"version": 1,
//!  "objects": {"N": {"kind": "lattice", "data": {...}},
//!              "g": {"kind": "embedding", "data": {"source": {...}, "target": "N", "matrix": [...]}}},
//!  "notes": {"N": "A2(-1) squared"}}
//! ```
//!
//! The `source` and `target` of an embedding may name a lattice object
//! instead of spelling it out. Names are kept on save, so a canonical file
//! survives a load/save cycle byte for byte.

use std::collections::BTreeMap;

use enriq_core::finite_form::Generatrix;
use enriq_core::json::{
    canonical_string, embedding_to_json, field, generatrix_from_json, generatrix_to_json, lattice_from_json,
    lattice_to_json, matrix_from_json, parse_u64,
};
use enriq_core::lattice::{GroupCaps, IntegerLattice, LatticeEmbedding};
use enriq_core::periods::{EmbeddingCatalog, PeriodPoint};
use enriq_core::{Error, Result};
use serde_json::{json, Map, Value};

pub const WORKSPACE_VERSION: u64 = 1;

#[derive(Clone, Debug)]
pub enum LatticeRef {
    Inline,
    Named(String),
}

#[derive(Clone, Debug)]
pub enum Object {
    Lattice(IntegerLattice),
    Embedding {
        embedding: LatticeEmbedding,
        source: LatticeRef,
        target: LatticeRef,
    },
    Generatrix(Generatrix),
    Catalog(Box<EmbeddingCatalog>),
    PeriodPoint(PeriodPoint),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Lattice(_) => "lattice",
            Object::Embedding { .. } => "embedding",
            Object::Generatrix(_) => "generatrix",
            Object::Catalog(_) => "catalog",
            Object::PeriodPoint(_) => "period_point",
        }
    }

    fn data_json(&self) -> Value {
        match self {
            Object::Lattice(l) => lattice_to_json(l),
            Object::Embedding {
                embedding,
                source,
                target,
            } => {
                let mut v = embedding_to_json(embedding);
                if let LatticeRef::Named(n) = source {
                    v["source"] = Value::String(n.clone());
                }
                if let LatticeRef::Named(n) = target {
                    v["target"] = Value::String(n.clone());
                }
                v
            }
            Object::Generatrix(g) => generatrix_to_json(g),
            Object::Catalog(c) => c.to_json(),
            Object::PeriodPoint(p) => p.to_json(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub objects: BTreeMap<String, Object>,
    pub notes: BTreeMap<String, String>,
}

fn malformed(path: &str, what: impl std::fmt::Display) -> Error {
    Error::Malformed(format!("{path}: {what}"))
}

impl Workspace {
    pub fn from_json(v: &Value, caps: GroupCaps) -> Result<Workspace> {
        let version = parse_u64(field(v, "version", "workspace")?, "workspace.version")?;
        if version != WORKSPACE_VERSION {
            return Err(malformed("workspace.version", format!("unsupported version {version}")));
        }
        let raw = field(v, "objects", "workspace")?
            .as_object()
            .ok_or_else(|| malformed("workspace.objects", "expected an object"))?;

        let mut ws = Workspace::default();
        // lattices first, so that embeddings can refer to them
        let mut pending = Vec::new();
        for (name, entry) in raw {
            let path = format!("objects.{name}");
            let kind = field(entry, "kind", &path)?
                .as_str()
                .ok_or_else(|| malformed(&path, "kind must be a string"))?;
            let data = field(entry, "data", &path)?;
            let data_path = format!("{path}.data");
            let object = match kind {
                "lattice" => Object::Lattice(lattice_from_json(data, &data_path)?),
                "generatrix" => Object::Generatrix(generatrix_from_json(data, &data_path)?),
                "catalog" => Object::Catalog(Box::new(
                    EmbeddingCatalog::from_json(data, &data_path, caps).map_err(|e| relabel(e, &path))?,
                )),
                "period_point" => Object::PeriodPoint(PeriodPoint::from_json(data, &data_path)?),
                "embedding" => {
                    pending.push((name.clone(), data));
                    continue;
                }
                other => return Err(malformed(&path, format!("unknown kind '{other}'"))),
            };
            ws.objects.insert(name.clone(), object);
        }
        for (name, data) in pending {
            let path = format!("objects.{name}.data");
            let (source, source_ref) = ws.lattice_or_ref(field(data, "source", &path)?, &format!("{path}.source"))?;
            let (target, target_ref) = ws.lattice_or_ref(field(data, "target", &path)?, &format!("{path}.target"))?;
            let matrix = matrix_from_json(
                field(data, "matrix", &path)?,
                target.rank(),
                source.rank(),
                &format!("{path}.matrix"),
            )?;
            let embedding = LatticeEmbedding::new(source, target, matrix).map_err(|e| malformed(&path, e))?;
            ws.objects.insert(
                name,
                Object::Embedding {
                    embedding,
                    source: source_ref,
                    target: target_ref,
                },
            );
        }

        if let Some(notes) = v.get("notes") {
            let notes = notes.as_object().ok_or_else(|| malformed("workspace.notes", "expected an object"))?;
            for (name, note) in notes {
                if !ws.objects.contains_key(name) {
                    return Err(malformed(&format!("notes.{name}"), "note for an unknown object"));
                }
                let text = note
                    .as_str()
                    .ok_or_else(|| malformed(&format!("notes.{name}"), "expected a string"))?;
                ws.notes.insert(name.clone(), text.to_string());
            }
        }
        Ok(ws)
    }

    fn lattice_or_ref(&self, v: &Value, path: &str) -> Result<(IntegerLattice, LatticeRef)> {
        match v {
            Value::String(name) => match self.objects.get(name) {
                Some(Object::Lattice(l)) => Ok((l.clone(), LatticeRef::Named(name.clone()))),
                Some(other) => Err(malformed(path, format!("'{name}' is a {}, not a lattice", other.kind()))),
                None => Err(malformed(path, format!("unknown object '{name}'"))),
            },
            _ => Ok((lattice_from_json(v, path)?, LatticeRef::Inline)),
        }
    }

    pub fn to_json(&self) -> Value {
        let objects: Map<String, Value> = self
            .objects
            .iter()
            .map(|(name, o)| (name.clone(), json!({ "kind": o.kind(), "data": o.data_json() })))
            .collect();
        let mut out = json!({ "version": WORKSPACE_VERSION, "objects": objects });
        if !self.notes.is_empty() {
            out["notes"] = json!(self.notes);
        }
        out
    }

    pub fn to_canonical_string(&self) -> String {
        canonical_string(&self.to_json())
    }

    pub fn get(&self, name: &str) -> Result<&Object> {
        self.objects
            .get(name)
            .ok_or_else(|| Error::Malformed(format!("workspace has no object '{name}'")))
    }
}

fn relabel(e: Error, path: &str) -> Error {
    match e {
        Error::InconsistentCatalog(m) => Error::InconsistentCatalog(format!("{path}: {m}")),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Value {
        json!({
            "version": 1,
            "objects": {
                "N": {"kind": "lattice", "data": {"rank": 2, "gram": [[-4, 0], [0, -4]]}},
                "g": {"kind": "embedding", "data": {
                    "source": {"rank": 1, "gram": [[-4]]},
                    "target": "N",
                    "matrix": [[1], [0]]
                }}
            },
            "notes": {"g": "first coordinate line"}
        })
    }

    #[test]
    fn references_survive_roundtrip() {
        let ws = Workspace::from_json(&sample(), GroupCaps::default()).unwrap();
        let text = ws.to_canonical_string();
        assert!(text.contains(r#""target":"N""#));
        let again = Workspace::from_json(&serde_json::from_str(&text).unwrap(), GroupCaps::default()).unwrap();
        assert_eq!(again.to_canonical_string(), text);
        assert_eq!(text, canonical_string(&sample()));
    }

    #[test]
    fn bad_references_are_named() {
        let mut v = sample();
        v["objects"]["g"]["data"]["target"] = json!("M");
        let err = Workspace::from_json(&v, GroupCaps::default()).unwrap_err();
        assert!(err.to_string().contains("objects.g.data.target"), "{err}");

        let mut v = sample();
        v["objects"]["g"]["data"]["matrix"] = json!([[1], [1]]);
        let err = Workspace::from_json(&v, GroupCaps::default()).unwrap_err();
        assert!(err.to_string().contains("objects.g"), "{err}");

        let mut v = sample();
        v["notes"]["h"] = json!("dangling");
        assert!(Workspace::from_json(&v, GroupCaps::default()).is_err());

        let mut v = sample();
        v["version"] = json!(2);
        assert!(Workspace::from_json(&v, GroupCaps::default()).is_err());
    }
}
